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

#ifndef DEPO_TRANSCRIPT_HPP
#define DEPO_TRANSCRIPT_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "depo/ontology.hpp"

namespace depo {

// Inclusive range of 1-based physical line numbers in the source text.
struct LineRange {
  std::size_t first = 0;
  std::size_t last = 0;

  friend bool operator==(const LineRange&, const LineRange&) = default;
};

struct QAPair {
  std::size_t index = 0;
  std::string question;
  std::string answer;
  std::optional<std::string> page_line;
  // Source lines that make up the pair (question block, answer block and
  // any continuations).
  std::vector<LineRange> source;

  friend bool operator==(const QAPair& a, const QAPair& b) {
    return a.index == b.index && a.question == b.question && a.answer == b.answer;
  }
};

struct Discarded {
  LineRange lines;
  std::string reason;  // "blank", "colloquy", "header", "exhibit", ...
  std::string text;
};

struct Deposition {
  std::string id;
  std::optional<DeponentRole> role;
  std::vector<QAPair> pairs;
  std::vector<Discarded> discarded;
};

struct ParseConfig {
  std::vector<std::string> question_prefixes{"Q.", "Q:", "Q "};
  std::vector<std::string> answer_prefixes{"A.", "A:", "A "};
  bool keep_unanswered = false;
  bool strip_line_numbers = true;

  // Throws InvalidArgument if a prefix list is empty or the lists overlap.
  void validate() const;
};

enum class LineKind { Question, Answer, Colloquy, Header, Exhibit, Blank, Text };

struct LogicalLine {
  std::string text;
  LineKind kind = LineKind::Text;
  LineRange source;
};

// Line-number columns stripped (when configured), hyphenated wraps and
// unmarked continuation lines joined onto the preceding logical line, runs
// of blank lines collapsed into one entry with empty text.
std::vector<LogicalLine> normalize_lines(std::string_view raw, const ParseConfig& config = {});

// Convenience view: the text of each logical line.
std::vector<std::string> normalize_line_texts(std::string_view raw,
                                              const ParseConfig& config = {});

// Throws DataError("no QA content ...") if no pair survives.
Deposition parse_transcript(std::string_view raw, const ParseConfig& config = {},
                            std::string deposition_id = "deposition",
                            std::optional<DeponentRole> role = std::nullopt);

struct QAStats {
  std::size_t pair_count = 0;
  double mean_question_tokens = 0.0;
  double mean_answer_tokens = 0.0;
  std::size_t discarded_count = 0;
};

QAStats qa_stats(const Deposition& d);

// Pair records in the interchange JSONL layout:
// {"deposition_id", "index", "question", "answer", "role"}.
struct PairRecord {
  std::string deposition_id;
  std::size_t index = 0;
  std::string question;
  std::string answer;
  std::optional<DeponentRole> role;
};

std::string pairs_to_jsonl(const Deposition& d);
std::string pair_records_to_jsonl(const std::vector<PairRecord>& records);
std::vector<PairRecord> parse_pairs_jsonl(std::string_view text);

}  // namespace depo

#endif  // DEPO_TRANSCRIPT_HPP
