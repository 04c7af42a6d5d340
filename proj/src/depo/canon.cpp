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

#include "depo/canon.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>

#include "depo/common.hpp"
#include "depo/embeddings.hpp"

namespace depo {
namespace {

// A whitespace-delimited word split into leading punctuation, body, and
// trailing punctuation ("(you," -> "(", "you", ",").
struct Word {
  std::string lead;
  std::string body;
  std::string trail;

  std::string key() const { return to_lower(body); }
  std::string text() const { return lead + body + trail; }
};

bool is_edge_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::ispunct(u) && c != '\'' && c != '-';
}

std::string normalize_quotes(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    // U+2019 RIGHT SINGLE QUOTATION MARK -> '
    if (i + 2 < s.size() && static_cast<unsigned char>(s[i]) == 0xE2 &&
        static_cast<unsigned char>(s[i + 1]) == 0x80 &&
        static_cast<unsigned char>(s[i + 2]) == 0x99) {
      out.push_back('\'');
      i += 2;
      continue;
    }
    out.push_back(s[i]);
  }
  return out;
}

std::vector<Word> split_words(std::string_view text) {
  std::vector<Word> words;
  const std::string norm = normalize_quotes(text);
  std::size_t i = 0;
  while (i < norm.size()) {
    while (i < norm.size() && std::isspace(static_cast<unsigned char>(norm[i]))) ++i;
    const std::size_t start = i;
    while (i < norm.size() && !std::isspace(static_cast<unsigned char>(norm[i]))) ++i;
    if (i == start) break;
    std::string raw = norm.substr(start, i - start);
    Word w;
    std::size_t b = 0;
    std::size_t e = raw.size();
    while (b < e && (is_edge_punct(raw[b]) || raw[b] == '\'')) ++b;
    while (e > b && (is_edge_punct(raw[e - 1]) || raw[e - 1] == '\'')) --e;
    // Keep abbreviation dots ("p.m.") attached to the body.
    if (e < raw.size() && raw[e] == '.' && e > b && raw.substr(b, e - b).find('.') != std::string::npos) ++e;
    w.lead = raw.substr(0, b);
    w.body = raw.substr(b, e - b);
    w.trail = raw.substr(e);
    words.push_back(std::move(w));
  }
  return words;
}

bool has_alnum(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
  });
}

std::string join_words(const std::vector<Word>& words) {
  std::string out;
  for (const Word& w : words) {
    const std::string t = w.text();
    if (t.empty()) continue;
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

const std::set<std::string> kAbbreviations = {"mr", "mrs", "ms", "dr", "st", "jr", "sr",
                                              "vs", "etc", "a.m", "p.m", "u.s", "i.e", "e.g",
                                              "approx", "no."};

const std::set<std::string> kAux = {"am",   "is",    "are",   "was",   "were", "do",
                                    "does", "did",   "have",  "has",   "had",  "can",
                                    "could", "will", "would", "should"};

const std::map<std::string, std::string> kNegAux = {
    {"didn't", "did"},   {"don't", "do"},      {"doesn't", "does"},   {"wasn't", "was"},
    {"weren't", "were"}, {"isn't", "is"},      {"aren't", "are"},     {"haven't", "have"},
    {"hasn't", "has"},   {"hadn't", "had"},    {"can't", "can"},      {"couldn't", "could"},
    {"won't", "will"},   {"wouldn't", "would"}, {"shouldn't", "should"}};

const std::set<std::string> kWh = {"what", "when",  "where", "who", "whom",
                                   "whose", "which", "why",  "how"};

const std::set<std::string> kDiscourse = {"and", "so", "now", "okay", "ok", "well", "then",
                                          "also", "but", "all"};

const std::set<std::string> kTags = {
    "correct",           "right",          "is that correct",   "is that right",
    "isn't that right",  "isn't that correct", "true",          "is that true",
    "isn't that true",   "fair",           "is that fair",      "fair enough",
    "agreed",            "yes",            "no",                "okay",
    "didn't you",        "did you",        "wasn't it",         "was it",
    "don't you",         "do you",         "weren't you",       "isn't it",
    "is it",             "aren't you",     "haven't you",       "wouldn't you agree",
    "would you agree",   "am i right",     "have i got that right"};

const std::set<std::string> kYes = {"yes",      "yeah",    "yep",     "yup",   "correct",
                                    "right",    "sure",    "absolutely", "definitely",
                                    "uh-huh",   "true",    "okay",    "ok",    "certainly",
                                    "exactly",  "affirmative", "indeed"};

const std::set<std::string> kNo = {"no", "nope", "nah", "never", "huh-uh", "incorrect",
                                   "negative", "nay"};

const std::set<std::string> kHonorific = {"sir", "ma'am", "maam", "mam"};

const std::array<std::string_view, 17> kDontKnow = {
    "don't know",     "do not know",   "don't recall",    "do not recall",   "don't remember",
    "do not remember", "can't recall", "cannot recall",   "can't remember",  "cannot remember",
    "not sure",       "no idea",       "not that i recall", "not that i remember",
    "couldn't tell",  "can't say",     "couldn't say"};

const std::set<std::string> kSubjectPronouns = {
    "you", "i", "he", "she", "it", "we", "they", "there", "this", "that",
    "anyone", "anybody", "someone", "somebody", "everyone", "anything", "something", "one"};

const std::set<std::string> kDeterminers = {"the",  "a",     "an",   "your", "my",   "his",
                                            "her",  "their", "our",  "its",  "these", "those",
                                            "any",  "some",  "each", "every", "no"};

const std::set<std::string> kPrepositions = {
    "to",   "for",    "with",   "at",      "from",    "by",     "about", "of",
    "on",   "in",     "into",   "toward",  "towards", "against", "than", "like",
    "upon", "without", "behind", "beside", "near",    "after",  "before", "around"};

const std::set<std::string> kObjectTakingVerbs = {
    "tell",  "told",  "show",     "showed",   "give",   "gave",  "ask",    "asked",
    "hit",   "help",  "helped",   "call",     "called", "send",  "sent",   "pay",
    "paid",  "bring", "brought",  "take",     "took",   "treat", "treated", "examine",
    "examined", "hurt", "injured", "let",     "make",   "made",  "want",   "wanted",
    "expect", "need", "needed",   "hire",     "hired",  "drive", "drove",  "meet", "met",
    "contact", "contacted", "visit", "visited", "see",  "saw",   "hear",   "heard"};

std::string capitalize_first(std::string s) {
  for (char& c : s) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) break;
  }
  return s;
}

// Lowercases the first letter unless the body is "I" or an "I'" contraction.
std::string decapitalize(const std::string& body) {
  if (body.empty() || body == "I" || body.rfind("I'", 0) == 0) return body;
  std::string out = body;
  // Leave all-caps acronyms alone.
  if (out.size() > 1 && std::all_of(out.begin(), out.end(), [](char c) {
        return !std::isalpha(static_cast<unsigned char>(c)) || std::isupper(static_cast<unsigned char>(c));
      })) {
    return out;
  }
  out[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[0])));
  return out;
}

bool is_aux_key(const std::string& k) { return kAux.count(k) || kNegAux.count(k); }

std::string aux_base(const std::string& k) {
  auto it = kNegAux.find(k);
  return it == kNegAux.end() ? k : it->second;
}

// First-person agreement for an auxiliary whose subject became "I".
std::string agree_first_person(const std::string& aux) {
  if (aux == "are") return "am";
  if (aux == "were") return "was";
  return aux;
}

// Second-person agreement for an auxiliary whose subject became "you".
std::string agree_second_person(const std::string& aux) {
  if (aux == "am") return "are";
  if (aux == "was") return "were";
  return aux;
}

// Swaps speaker perspective in place: the attorney's "you" becomes the
// deponent's "I"/"me", and the attorney's own "I"/"me" becomes "you".
// Auxiliaries adjacent to a flipped subject are re-agreed.
void flip_pronouns(std::vector<Word>& words, std::size_t begin = 0) {
  std::vector<std::string> keys;
  keys.reserve(words.size());
  for (const Word& w : words) keys.push_back(w.key());

  for (std::size_t i = begin; i < words.size(); ++i) {
    const std::string& k = keys[i];
    const std::string prev = i > 0 ? keys[i - 1] : std::string();
    const std::string next = i + 1 < words.size() ? keys[i + 1] : std::string();
    Word& w = words[i];
    if (k == "you") {
      const bool object = kPrepositions.count(prev) || kObjectTakingVerbs.count(prev) ||
                          (!w.trail.empty() && i > 0 && !is_aux_key(prev));
      if (object) {
        w.body = "me";
        continue;
      }
      w.body = "I";
      if (i > 0 && kAux.count(prev)) {
        words[i - 1].body = agree_first_person(prev);
        keys[i - 1] = words[i - 1].body;
      }
      if (kAux.count(next)) {
        words[i + 1].body = agree_first_person(next);
        keys[i + 1] = words[i + 1].body;
        ++i;
      }
    } else if (k == "your") {
      w.body = "my";
    } else if (k == "yours") {
      w.body = "mine";
    } else if (k == "yourself") {
      w.body = "myself";
    } else if (k == "you're") {
      w.body = "I'm";
    } else if (k == "you've") {
      w.body = "I've";
    } else if (k == "you'll") {
      w.body = "I'll";
    } else if (k == "you'd") {
      w.body = "I'd";
    } else if (k == "i") {
      w.body = "you";
      if (kAux.count(next)) {
        words[i + 1].body = agree_second_person(next);
        keys[i + 1] = words[i + 1].body;
        ++i;
      }
    } else if (k == "me") {
      w.body = "you";
    } else if (k == "my") {
      w.body = "your";
    } else if (k == "mine") {
      w.body = "yours";
    } else if (k == "myself") {
      w.body = "yourself";
    } else if (k == "i'm") {
      w.body = "you're";
    } else if (k == "i've") {
      w.body = "you've";
    } else if (k == "i'll") {
      w.body = "you'll";
    } else if (k == "i'd") {
      w.body = "you'd";
    }
  }
}

std::size_t skip_discourse(const std::vector<Word>& words) {
  std::size_t i = 0;
  while (i + 1 < words.size() && kDiscourse.count(words[i].key())) ++i;
  return i;
}

// Strips the terminal "?"/"." of the last word and any trailing confirmation
// tag (", correct?"). Returns the words that remain.
std::vector<Word> question_body(std::string_view question, bool* had_tag = nullptr) {
  std::string q = trim(normalize_quotes(question));
  bool tag = false;
  const std::size_t comma = q.rfind(',');
  if (comma != std::string::npos) {
    std::string tail = to_lower(trim(std::string_view(q).substr(comma + 1)));
    while (!tail.empty() && (tail.back() == '?' || tail.back() == '.')) tail.pop_back();
    if (kTags.count(trim(tail))) {
      q = q.substr(0, comma);
      tag = true;
    }
  }
  if (had_tag) *had_tag = tag;
  std::vector<Word> words = split_words(q);
  std::size_t start = skip_discourse(words);
  words.erase(words.begin(), words.begin() + static_cast<std::ptrdiff_t>(start));
  if (!words.empty()) {
    std::string& trail = words.back().trail;
    while (!trail.empty() && (trail.back() == '?' || trail.back() == '.' || trail.back() == ',')) {
      trail.pop_back();
    }
  }
  return words;
}

std::string finish_sentence(std::vector<Word> words) {
  while (!words.empty() && !has_alnum(words.back().body)) words.pop_back();
  if (words.empty()) return {};
  std::string& trail = words.back().trail;
  // "(Witness nods.)" is already terminated inside its closer.
  const std::size_t closer = trail.find_last_not_of(")]\"");
  if (closer != std::string::npos && closer + 1 < trail.size() &&
      (trail[closer] == '.' || trail[closer] == '!')) {
    return capitalize_first(join_words(words));
  }
  while (!trail.empty() && (trail.back() == '?' || trail.back() == '.' || trail.back() == ',' ||
                            trail.back() == ';' || trail.back() == ':')) {
    trail.pop_back();
  }
  if (trail.empty() || trail.back() != '!') trail += '.';
  return capitalize_first(join_words(words));
}

// Flipped question used as a context or topic sentence: pronouns swapped
// and "?" turned into ".".
std::string flipped_question(std::string_view question) {
  std::vector<Word> words = question_body(question);
  flip_pronouns(words);
  return finish_sentence(std::move(words));
}

// Restates a yes/no question as a first-person declarative:
// "Were you able to go?" -> "I was able to go." (negated: "I was not able to go.")
std::string restate_yes_no(std::string_view question, bool negate) {
  std::vector<Word> words = question_body(question);
  if (words.size() < 2) return {};
  const std::string aux_key = words[0].key();
  if (!is_aux_key(aux_key)) return {};
  const std::string aux = aux_base(aux_key);

  // Subject span [1, subject_end).
  std::size_t subject_end = 2;
  const std::string first = words[1].key();
  if (kSubjectPronouns.count(first)) {
    subject_end = 2;
  } else if (kDeterminers.count(first)) {
    subject_end = std::min<std::size_t>(3, words.size());
  } else if (!words[1].body.empty() && std::isupper(static_cast<unsigned char>(words[1].body[0]))) {
    while (subject_end < words.size() &&
           (words[subject_end - 1].trail.empty() ||
            (words[subject_end - 1].trail == "." && kAbbreviations.count(words[subject_end - 1].key()))) &&
           !words[subject_end].body.empty() &&
           std::isupper(static_cast<unsigned char>(words[subject_end].body[0]))) {
      ++subject_end;
    }
  }

  std::vector<Word> subject(words.begin() + 1, words.begin() + static_cast<std::ptrdiff_t>(subject_end));
  std::vector<Word> rest(words.begin() + static_cast<std::ptrdiff_t>(subject_end), words.end());

  std::string aux_out = aux;
  if (subject.size() == 1) {
    const std::string sk = subject[0].key();
    if (sk == "you") {
      subject[0].body = "I";
      aux_out = agree_first_person(aux);
    } else if (sk == "i") {
      subject[0].body = "you";
      aux_out = agree_second_person(aux);
    }
  }
  if (subject[0].key() != "i") {
    for (std::size_t i = 0; i < subject.size(); ++i) {
      if (subject[i].key() == "your") subject[i].body = "my";
      else if (subject[i].key() == "my") subject[i].body = "your";
    }
  }
  if (!subject.empty() && subject[0].body != "I") subject[0].body = decapitalize(subject[0].body);

  flip_pronouns(rest);

  std::vector<Word> out = subject;
  out.push_back(Word{"", aux_out, ""});
  if (negate) out.push_back(Word{"", "not", ""});
  out.insert(out.end(), rest.begin(), rest.end());
  return finish_sentence(std::move(out));
}

bool is_honorific(const std::string& k) { return kHonorific.count(k) > 0; }

// Removes a leading yes/no token (and a following "sir"/"ma'am") from the
// first answer sentence; drops sentences left empty.
std::vector<std::string> strip_polarity(const std::vector<std::string>& sentences,
                                        const std::set<std::string>& tokens) {
  std::vector<std::string> out;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    if (s > 0) {
      out.push_back(sentences[s]);
      continue;
    }
    std::vector<Word> words = split_words(sentences[s]);
    std::size_t i = 0;
    if (i < words.size() && tokens.count(words[i].key())) ++i;
    while (i < words.size() && is_honorific(words[i].key())) ++i;
    words.erase(words.begin(), words.begin() + static_cast<std::ptrdiff_t>(i));
    std::string rest = finish_sentence(words);
    if (!rest.empty()) out.push_back(rest);
  }
  return out;
}

// "I did.", "I was not.", "I didn't." and the like add nothing once the
// question has been restated.
bool is_echo(const std::string& sentence) {
  std::vector<Word> words = split_words(sentence);
  if (words.empty() || words.size() > 3) return false;
  const std::string k0 = words[0].key();
  if (k0 != "i" && k0 != "it" && k0 != "that" && k0 != "we" && k0 != "he" && k0 != "she" &&
      k0 != "they") {
    return false;
  }
  if (words.size() < 2 || !is_aux_key(words[1].key())) return false;
  return words.size() == 2 || words[2].key() == "not";
}

std::size_t word_count(std::string_view text) {
  std::size_t n = 0;
  for (const Word& w : split_words(text)) {
    if (has_alnum(w.body)) ++n;
  }
  return n;
}


}  // namespace

std::string_view da_name(QuestionDA da) {
  switch (da) {
    case QuestionDA::YesNo: return "YES_NO";
    case QuestionDA::Wh: return "WH";
    case QuestionDA::DeclarativeCheck: return "DECLARATIVE_CHECK";
    case QuestionDA::Choice: return "CHOICE";
    case QuestionDA::OtherQ: return "OTHER_Q";
  }
  return "OTHER_Q";
}

std::string_view da_name(AnswerDA da) {
  switch (da) {
    case AnswerDA::Affirm: return "AFFIRM";
    case AnswerDA::Deny: return "DENY";
    case AnswerDA::Statement: return "STATEMENT";
    case AnswerDA::DontKnow: return "DONT_KNOW";
    case AnswerDA::OtherA: return "OTHER_A";
  }
  return "OTHER_A";
}

QuestionDA tag_question_da(std::string_view question) {
  std::vector<Word> all = split_words(question);
  const std::size_t start = skip_discourse(all);
  if (start >= all.size()) return QuestionDA::OtherQ;
  const std::string first = all[start].key();
  if (is_aux_key(first)) {
    for (std::size_t i = start + 1; i < all.size(); ++i) {
      if (all[i].key() == "or") return QuestionDA::Choice;
    }
    return QuestionDA::YesNo;
  }
  if (kWh.count(first)) return QuestionDA::Wh;
  bool tag = false;
  question_body(question, &tag);
  if (tag) return QuestionDA::DeclarativeCheck;
  return QuestionDA::OtherQ;
}

AnswerDA tag_answer_da(std::string_view answer) {
  const std::string a = trim(normalize_quotes(answer));
  if (!has_alnum(a) || a.front() == '(') return AnswerDA::OtherA;
  std::vector<Word> words = split_words(a);
  const std::string first = words.front().key();
  const bool standalone = words.size() == 1 || !words.front().trail.empty() ||
                          (words.size() > 1 && is_honorific(words[1].key()));
  if (standalone && kYes.count(first)) return AnswerDA::Affirm;
  if (standalone && kNo.count(first)) return AnswerDA::Deny;
  const std::string lower = to_lower(a);
  for (std::string_view p : kDontKnow) {
    if (lower.find(p) != std::string::npos) return AnswerDA::DontKnow;
  }
  return AnswerDA::Statement;
}

std::string DeclarativeText::joined() const {
  std::string out;
  for (const std::string& s : sentences) {
    if (!out.empty()) out += ' ';
    out += s;
  }
  return out;
}

std::vector<std::string> split_declarative_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::vector<Word> current;
  for (Word& w : split_words(text)) {
    const bool terminal = !w.trail.empty() &&
                          (w.trail.find_first_of(".!?") != std::string::npos);
    const bool abbrev = w.trail.empty() && !w.body.empty() && w.body.back() == '.' &&
                        kAbbreviations.count(to_lower(w.body.substr(0, w.body.size() - 1)));
    const bool body_dot_end = w.trail.empty() && !w.body.empty() && w.body.back() == '.' && !abbrev;
    current.push_back(std::move(w));
    if (terminal || body_dot_end) {
      std::string s = finish_sentence(current);
      if (!s.empty()) out.push_back(std::move(s));
      current.clear();
    }
  }
  if (!current.empty()) {
    std::string s = finish_sentence(current);
    if (!s.empty()) out.push_back(std::move(s));
  }
  return out;
}

const std::set<std::string>& rewrite_lexicon() {
  static const std::set<std::string> lex = [] {
    std::set<std::string> s;
    const std::vector<std::string> phrases = {
        "i", "me", "my", "mine", "myself", "you", "your", "yours", "yourself", "i'm", "i've",
        "i'll", "i'd", "you're", "you've", "you'll", "you'd", "not", "i don't know", "."};
    for (const auto& p : phrases) {
      for (auto& t : tokenize(p)) s.insert(t);
    }
    for (const auto& a : kAux) s.insert(a);
    return s;
  }();
  return lex;
}

DeclarativeText to_declarative(std::string_view question, std::string_view answer) {
  const QuestionDA qda = tag_question_da(question);
  const AnswerDA ada = tag_answer_da(answer);
  const std::vector<std::string> answer_sentences = split_declarative_sentences(answer);

  DeclarativeText out;
  out.provenance = Provenance::Machine;
  auto append = [&](const std::string& s) {
    if (!s.empty()) out.sentences.push_back(s);
  };
  auto fallback = [&] {
    append(flipped_question(question));
    for (const auto& s : answer_sentences) append(s);
  };

  if (ada == AnswerDA::DontKnow) {
    append("I don't know.");
    append(flipped_question(question));
  } else if (qda == QuestionDA::YesNo && (ada == AnswerDA::Affirm || ada == AnswerDA::Deny)) {
    const bool negate = ada == AnswerDA::Deny;
    const std::string restated = restate_yes_no(question, negate);
    if (restated.empty()) {
      fallback();
    } else {
      append(restated);
      for (const auto& s : strip_polarity(answer_sentences, negate ? kNo : kYes)) {
        if (!is_echo(s)) append(s);
      }
    }
  } else if (qda == QuestionDA::Wh && ada == AnswerDA::Statement) {
    if (word_count(answer) < 3) append(flipped_question(question));
    for (const auto& s : answer_sentences) append(s);
  } else if (qda == QuestionDA::DeclarativeCheck && ada == AnswerDA::Affirm) {
    std::vector<Word> body = question_body(question);
    flip_pronouns(body);
    append(finish_sentence(std::move(body)));
    for (const auto& s : strip_polarity(answer_sentences, kYes)) {
      if (!is_echo(s)) append(s);
    }
  } else {
    fallback();
  }

  if (out.sentences.empty()) throw DataError("untransformable pair");
  return out;
}

DeclarativeText to_declarative_or_concat(std::string_view question, std::string_view answer,
                                         bool* fell_back) {
  if (fell_back) *fell_back = false;
  try {
    return to_declarative(question, answer);
  } catch (const DataError&) {
    if (fell_back) *fell_back = true;
    DeclarativeText t;
    std::string joined = trim(question);
    const std::string a = trim(answer);
    if (!a.empty()) joined += (joined.empty() ? "" : " ") + a;
    if (!joined.empty()) t.sentences.push_back(joined);
    return t;
  }
}

std::string_view variant_token(InputVariant v) {
  switch (v) {
    case InputVariant::Q: return "q";
    case InputVariant::A: return "a";
    case InputVariant::QA: return "qa";
    case InputVariant::DSM: return "dsm";
    case InputVariant::QADSM: return "qadsm";
    case InputVariant::DSC: return "dsc";
    case InputVariant::DSCM: return "dscm";
  }
  return "q";
}

std::string_view variant_display(InputVariant v) {
  switch (v) {
    case InputVariant::Q: return "Q";
    case InputVariant::A: return "A";
    case InputVariant::QA: return "Q+A";
    case InputVariant::DSM: return "DS-M";
    case InputVariant::QADSM: return "Q+A+DS-M";
    case InputVariant::DSC: return "DS-C";
    case InputVariant::DSCM: return "DS-CM";
  }
  return "Q";
}

InputVariant parse_variant(std::string_view text) {
  std::string key;
  for (char c : text) {
    if (c == '+' || c == '-' || c == '_' || c == ' ') continue;
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  for (InputVariant v : {InputVariant::Q, InputVariant::A, InputVariant::QA, InputVariant::DSM,
                         InputVariant::QADSM, InputVariant::DSC, InputVariant::DSCM}) {
    if (key == variant_token(v)) return v;
  }
  throw InvalidArgument("unknown input variant '" + std::string(text) +
                        "' (expected q, a, qa, dsm, qadsm, dsc, dscm)");
}

const std::vector<InputVariant>& experiment_variants() {
  static const std::vector<InputVariant> v = {InputVariant::Q, InputVariant::A, InputVariant::QA,
                                              InputVariant::DSM, InputVariant::QADSM};
  return v;
}

bool needs_declarative(InputVariant v) {
  return v == InputVariant::DSM || v == InputVariant::QADSM || v == InputVariant::DSC ||
         v == InputVariant::DSCM;
}

std::string compose_input(const ComposeSource& src, InputVariant variant) {
  auto need = [&](const DeclarativeText* ds, std::string_view what) -> std::string {
    if (!ds) {
      throw InvalidArgument("variant " + std::string(variant_display(variant)) + " needs " +
                            std::string(what) + " declarative text, none supplied");
    }
    return ds->joined();
  };
  switch (variant) {
    case InputVariant::Q: return std::string(src.question);
    case InputVariant::A: return std::string(src.answer);
    case InputVariant::QA: return std::string(src.question) + " " + std::string(src.answer);
    case InputVariant::DSM: return need(src.ds_m, "DS-M");
    case InputVariant::DSC: return need(src.ds_c, "DS-C");
    case InputVariant::QADSM: {
      const std::string ds = need(src.ds_m, "DS-M");
      return std::string(src.question) + " " + std::string(src.answer) + " " + ds;
    }
    case InputVariant::DSCM: {
      const std::string dsm = need(src.ds_m, "DS-M");
      return need(src.ds_c, "DS-C") + " " + dsm;
    }
  }
  return {};
}

}  // namespace depo
