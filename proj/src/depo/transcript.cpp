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

#include "depo/transcript.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "depo/common.hpp"
#include "depo/embeddings.hpp"
#include "json.hpp"

namespace depo {
namespace {

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
bool is_lower(char c) { return std::islower(static_cast<unsigned char>(c)) != 0; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

bool starts_with_any(std::string_view s, const std::vector<std::string>& prefixes,
                     std::size_t* matched = nullptr) {
  for (const std::string& p : prefixes) {
    if (s.substr(0, p.size()) == p) {
      if (matched) *matched = p.size();
      return true;
    }
  }
  return false;
}

// Removes a leading transcript line-number column. A number counts as a
// column when it stands alone, is followed by a tab or two or more spaces,
// or directly precedes a Q/A marker.
std::string strip_line_number(const std::string& line, const ParseConfig& cfg) {
  std::size_t i = 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  const std::size_t digits_start = i;
  while (i < line.size() && is_digit(line[i])) ++i;
  const std::size_t ndigits = i - digits_start;
  if (ndigits == 0 || ndigits > 3) return line;
  if (i == line.size()) return std::string();
  if (line[i] != ' ' && line[i] != '\t') return line;
  std::size_t j = i;
  bool tab = false;
  while (j < line.size() && (line[j] == ' ' || line[j] == '\t')) {
    tab = tab || line[j] == '\t';
    ++j;
  }
  const std::string_view rest = std::string_view(line).substr(j);
  if (tab || j - i >= 2 || starts_with_any(rest, cfg.question_prefixes) ||
      starts_with_any(rest, cfg.answer_prefixes)) {
    return std::string(rest);
  }
  return line;
}

bool looks_like_speaker_label(std::string_view s) {
  const std::size_t colon = s.find(':');
  if (colon == std::string_view::npos || colon == 0 || colon > 48) return false;
  std::size_t letters = 0;
  for (std::size_t i = 0; i < colon; ++i) {
    const char c = s[i];
    if (is_lower(c)) return false;
    if (is_upper(c)) {
      ++letters;
    } else if (c != ' ' && c != '.' && c != '\'' && c != '-') {
      return false;
    }
  }
  return letters >= 2;
}

bool looks_like_header(std::string_view s) {
  if (s.substr(0, 3) == "BY ") return true;
  if (s.size() > 5 && (s.substr(0, 5) == "Page " || s.substr(0, 5) == "PAGE ") && is_digit(s[5])) {
    return true;
  }
  bool upper = false;
  for (char c : s) {
    if (is_lower(c)) return false;
    upper = upper || is_upper(c);
  }
  return upper;
}

LineKind classify(std::string_view s, const ParseConfig& cfg) {
  if (s.empty()) return LineKind::Blank;
  if (starts_with_any(s, cfg.question_prefixes)) return LineKind::Question;
  if (starts_with_any(s, cfg.answer_prefixes)) return LineKind::Answer;
  if (s.front() == '(') return LineKind::Exhibit;
  if (s.substr(0, 3) == "BY ") return LineKind::Header;
  if (looks_like_speaker_label(s)) return LineKind::Colloquy;
  if (looks_like_header(s)) return LineKind::Header;
  return LineKind::Text;
}

void append_continuation(std::string& text, const std::string& more) {
  if (text.size() >= 2 && text.back() == '-' && is_alpha(text[text.size() - 2])) {
    text.pop_back();
    text += more;
    return;
  }
  if (!text.empty()) text += ' ';
  text += more;
}

std::string strip_marker(const std::string& text, const std::vector<std::string>& prefixes) {
  std::size_t n = 0;
  starts_with_any(text, prefixes, &n);
  return trim(std::string_view(text).substr(n));
}

std::string discard_reason(const LogicalLine& l) {
  switch (l.kind) {
    case LineKind::Blank: return "blank";
    case LineKind::Colloquy: return "colloquy";
    case LineKind::Header: return "header";
    case LineKind::Exhibit: {
      return to_lower(l.text).find("exhibit") != std::string::npos ? "exhibit" : "parenthetical";
    }
    default: return "unattached";
  }
}

struct Block {
  std::string text;
  std::vector<LineRange> source;
};

}  // namespace

void ParseConfig::validate() const {
  if (question_prefixes.empty()) throw InvalidArgument("question prefix list is empty");
  if (answer_prefixes.empty()) throw InvalidArgument("answer prefix list is empty");
  for (const auto& q : question_prefixes) {
    if (q.empty()) throw InvalidArgument("empty question prefix");
    for (const auto& a : answer_prefixes) {
      if (a.empty()) throw InvalidArgument("empty answer prefix");
      if (q == a) throw InvalidArgument("prefix '" + q + "' is both a question and answer marker");
    }
  }
}

std::vector<LogicalLine> normalize_lines(std::string_view raw, const ParseConfig& config) {
  std::vector<LogicalLine> out;
  const std::vector<std::string> physical = split_lines(raw);
  for (std::size_t i = 0; i < physical.size(); ++i) {
    const std::size_t lineno = i + 1;
    std::string text = config.strip_line_numbers ? strip_line_number(physical[i], config)
                                                 : physical[i];
    text = trim(text);
    const LineKind kind = classify(text, config);
    if (kind == LineKind::Blank) {
      if (!out.empty() && out.back().kind == LineKind::Blank) {
        out.back().source.last = lineno;
      } else {
        out.push_back({std::string(), LineKind::Blank, {lineno, lineno}});
      }
      continue;
    }
    if (kind == LineKind::Text && !out.empty() && out.back().kind != LineKind::Blank) {
      append_continuation(out.back().text, text);
      out.back().source.last = lineno;
      continue;
    }
    out.push_back({std::move(text), kind, {lineno, lineno}});
  }
  return out;
}

std::vector<std::string> normalize_line_texts(std::string_view raw, const ParseConfig& config) {
  std::vector<std::string> texts;
  for (auto& l : normalize_lines(raw, config)) texts.push_back(std::move(l.text));
  return texts;
}

Deposition parse_transcript(std::string_view raw, const ParseConfig& config,
                            std::string deposition_id, std::optional<DeponentRole> role) {
  config.validate();
  if (deposition_id.empty()) throw InvalidArgument("deposition id must not be empty");
  Deposition d;
  d.id = std::move(deposition_id);
  d.role = role;

  std::optional<Block> question;
  std::optional<Block> answer;
  LineKind last_nonblank = LineKind::Blank;

  auto discard_block = [&](const Block& b, const std::string& reason) {
    for (const LineRange& r : b.source) d.discarded.push_back({r, reason, b.text});
  };

  auto flush = [&] {
    if (!question) return;
    Block q = std::move(*question);
    question.reset();
    std::optional<Block> a = std::move(answer);
    answer.reset();
    if (q.text.empty()) {
      discard_block(q, "empty question");
      if (a) discard_block(*a, "empty question");
      return;
    }
    const bool answered = a && !a->text.empty();
    if (!answered && !config.keep_unanswered) {
      discard_block(q, "unanswered");
      if (a) discard_block(*a, "unanswered");
      return;
    }
    QAPair pair;
    pair.index = d.pairs.size();
    pair.question = q.text;
    pair.answer = a ? a->text : std::string();
    pair.source = q.source;
    if (a) pair.source.insert(pair.source.end(), a->source.begin(), a->source.end());
    std::size_t lo = pair.source.front().first;
    std::size_t hi = pair.source.front().last;
    for (const LineRange& r : pair.source) {
      lo = std::min(lo, r.first);
      hi = std::max(hi, r.last);
    }
    pair.page_line = "lines " + std::to_string(lo) + "-" + std::to_string(hi);
    d.pairs.push_back(std::move(pair));
  };

  for (LogicalLine& line : normalize_lines(raw, config)) {
    switch (line.kind) {
      case LineKind::Question:
        flush();
        question = Block{strip_marker(line.text, config.question_prefixes), {line.source}};
        break;
      case LineKind::Answer: {
        std::string text = strip_marker(line.text, config.answer_prefixes);
        if (!question) {
          d.discarded.push_back({line.source, "orphan answer", line.text});
        } else if (!answer) {
          answer = Block{std::move(text), {line.source}};
        } else {
          append_continuation(answer->text, text);
          answer->source.push_back(line.source);
        }
        break;
      }
      case LineKind::Text:
        if (question && (last_nonblank == LineKind::Question || last_nonblank == LineKind::Answer)) {
          Block& target = (last_nonblank == LineKind::Answer && answer) ? *answer : *question;
          append_continuation(target.text, line.text);
          target.source.push_back(line.source);
        } else {
          d.discarded.push_back({line.source, "unattached", line.text});
        }
        break;
      default:
        d.discarded.push_back({line.source, discard_reason(line), line.text});
        break;
    }
    if (line.kind != LineKind::Blank && line.kind != LineKind::Text) last_nonblank = line.kind;
  }
  flush();

  if (d.pairs.empty()) {
    std::map<std::string, std::size_t> counts;
    for (const Discarded& x : d.discarded) counts[x.reason] += x.lines.last - x.lines.first + 1;
    std::string summary;
    for (const auto& [reason, n] : counts) {
      if (!summary.empty()) summary += ", ";
      summary += std::to_string(n) + " " + reason;
    }
    throw DataError("no QA content in deposition '" + d.id + "' (discarded lines: " +
                    (summary.empty() ? std::string("none") : summary) + ")");
  }
  return d;
}

QAStats qa_stats(const Deposition& d) {
  QAStats s;
  s.pair_count = d.pairs.size();
  s.discarded_count = d.discarded.size();
  if (d.pairs.empty()) return s;
  std::size_t q = 0;
  std::size_t a = 0;
  for (const QAPair& p : d.pairs) {
    q += tokenize(p.question).size();
    a += tokenize(p.answer).size();
  }
  s.mean_question_tokens = static_cast<double>(q) / static_cast<double>(d.pairs.size());
  s.mean_answer_tokens = static_cast<double>(a) / static_cast<double>(d.pairs.size());
  return s;
}

std::string pair_records_to_jsonl(const std::vector<PairRecord>& records) {
  std::string out;
  for (const PairRecord& r : records) {
    nlohmann::ordered_json rec;
    rec["deposition_id"] = r.deposition_id;
    rec["index"] = r.index;
    rec["question"] = r.question;
    rec["answer"] = r.answer;
    rec["role"] = r.role ? nlohmann::ordered_json(role_token(*r.role)) : nlohmann::ordered_json();
    out += rec.dump();
    out += '\n';
  }
  return out;
}

std::string pairs_to_jsonl(const Deposition& d) {
  std::vector<PairRecord> records;
  records.reserve(d.pairs.size());
  for (const QAPair& p : d.pairs) records.push_back({d.id, p.index, p.question, p.answer, d.role});
  return pair_records_to_jsonl(records);
}

std::vector<PairRecord> parse_pairs_jsonl(std::string_view text) {
  std::vector<PairRecord> out;
  const std::vector<std::string> lines = split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (trim(lines[ln]).empty()) continue;
    const std::string where = "pairs JSONL line " + std::to_string(ln + 1);
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(lines[ln]);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + ": " + e.what());
    }
    try {
      PairRecord r;
      r.deposition_id = rec.at("deposition_id").get<std::string>();
      r.index = rec.at("index").get<std::size_t>();
      r.question = rec.at("question").get<std::string>();
      r.answer = rec.at("answer").get<std::string>();
      if (rec.contains("role") && !rec["role"].is_null()) {
        r.role = parse_role(rec["role"].get<std::string>());
      }
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + ": " + e.what());
    } catch (const InvalidArgument& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  return out;
}

}  // namespace depo
