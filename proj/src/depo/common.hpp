// Copyright 2026 The depoaspect Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DEPO_COMMON_HPP
#define DEPO_COMMON_HPP

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace depo {

// Error taxonomy shared by every module. The C API maps each class onto a
// distinct status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller supplied an argument or configuration outside the contract.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Input data is malformed or inconsistent.
class DataError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it into place, so readers
// never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view data);

// Splits on '\n', dropping a trailing '\r' from each line. A trailing newline
// does not produce an extra empty line.
std::vector<std::string> split_lines(std::string_view text);

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

// Fixed-point rendering, e.g. format_fixed(0.8312, 2) == "0.83".
std::string format_fixed(double v, int decimals);

}  // namespace depo

#endif  // DEPO_COMMON_HPP
