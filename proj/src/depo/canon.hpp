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

#ifndef DEPO_CANON_HPP
#define DEPO_CANON_HPP

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace depo {

enum class QuestionDA { YesNo, Wh, DeclarativeCheck, Choice, OtherQ };
enum class AnswerDA { Affirm, Deny, Statement, DontKnow, OtherA };

std::string_view da_name(QuestionDA da);
std::string_view da_name(AnswerDA da);

QuestionDA tag_question_da(std::string_view question);
AnswerDA tag_answer_da(std::string_view answer);

enum class Provenance { Machine, Human };

struct DeclarativeText {
  std::vector<std::string> sentences;
  Provenance provenance = Provenance::Machine;

  std::string joined() const;
};

// Canonical declarative rewrite of a QA pair (DS-M). Dispatches on the
// (question DA, answer DA) cell:
//   YES_NO + AFFIRM            question restated as a first-person statement
//   YES_NO + DENY              same, with "not" after the auxiliary
//   WH + STATEMENT             answer sentences; the question is kept as a
//                              context sentence when the answer has < 3 words
//   DECLARATIVE_CHECK + AFFIRM question body with pronouns flipped
//   any + DONT_KNOW            "I don't know." plus the flipped question
//   everything else            flipped question ("?" -> ".") plus the answer
// Throws DataError("untransformable pair") if nothing survives.
DeclarativeText to_declarative(std::string_view question, std::string_view answer);

// Same as to_declarative, but never throws: falls back to the question and
// answer joined by a space. `fell_back` reports whether that happened.
DeclarativeText to_declarative_or_concat(std::string_view question, std::string_view answer,
                                         bool* fell_back = nullptr);

// Splits text into sentences, each ending in '.' or '!' ('?' is rewritten
// to '.'), first letter capitalized.
std::vector<std::string> split_declarative_sentences(std::string_view text);

// Every token (lowercased, as produced by the shared tokenizer) that the
// rewrite rules may introduce on their own.
const std::set<std::string>& rewrite_lexicon();

enum class InputVariant { Q, A, QA, DSM, QADSM, DSC, DSCM };

std::string_view variant_token(InputVariant v);    // "q", "a", "qa", "dsm", ...
std::string_view variant_display(InputVariant v);  // "Q", "A", "Q+A", "DS-M", ...
InputVariant parse_variant(std::string_view text);
const std::vector<InputVariant>& experiment_variants();  // Q, A, Q+A, DS-M, Q+A+DS-M
bool needs_declarative(InputVariant v);

struct ComposeSource {
  std::string_view question;
  std::string_view answer;
  const DeclarativeText* ds_m = nullptr;
  const DeclarativeText* ds_c = nullptr;
};

// Text fed to a classifier for the given variant. DS-CM places the human
// sentences first. Throws InvalidArgument if a needed DS text is missing.
std::string compose_input(const ComposeSource& src, InputVariant variant);

}  // namespace depo

#endif  // DEPO_CANON_HPP
