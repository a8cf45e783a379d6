#include "kphom/textkit.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <array>
#include <cctype>

#include "kphom/error.hpp"

namespace kphom {
namespace textkit {

namespace {

// ---------------------------------------------------------------------
// Porter stemmer (single application, words of length <= 2 unchanged).
// ---------------------------------------------------------------------

bool is_consonant(const std::string& w, std::size_t i) {
  switch (w[i]) {
    case 'a': case 'e': case 'i': case 'o': case 'u':
      return false;
    case 'y':
      return i == 0 ? true : !is_consonant(w, i - 1);
    default:
      return true;
  }
}

// m in the [C](VC)^m[V] decomposition.
int measure(const std::string& w) {
  int m = 0;
  std::size_t i = 0;
  const std::size_t n = w.size();
  while (i < n && is_consonant(w, i)) ++i;
  while (i < n) {
    while (i < n && !is_consonant(w, i)) ++i;
    if (i >= n) break;
    while (i < n && is_consonant(w, i)) ++i;
    ++m;
  }
  return m;
}

bool contains_vowel(const std::string& w) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!is_consonant(w, i)) return true;
  }
  return false;
}

bool ends_double_consonant(const std::string& w) {
  const std::size_t n = w.size();
  return n >= 2 && w[n - 1] == w[n - 2] && is_consonant(w, n - 1);
}

// *o: stem ends consonant-vowel-consonant, final consonant not w, x, y.
bool ends_cvc(const std::string& w) {
  const std::size_t n = w.size();
  if (n < 3) return false;
  if (!is_consonant(w, n - 3) || is_consonant(w, n - 2) ||
      !is_consonant(w, n - 1)) {
    return false;
  }
  const char last = w[n - 1];
  return last != 'w' && last != 'x' && last != 'y';
}

bool ends_with(const std::string& w, const char* suffix) {
  const std::size_t len = std::char_traits<char>::length(suffix);
  return w.size() >= len && w.compare(w.size() - len, len, suffix) == 0;
}

struct SuffixRule {
  const char* suffix;
  const char* replacement;
  int min_measure;  // condition: measure(stem) > min_measure
};

// Rules are ordered so the first suffix that matches is the longest
// match; once matched, no other rule in the step is considered.
bool apply_step(std::string& w, const SuffixRule* rules, std::size_t count) {
  for (std::size_t r = 0; r < count; ++r) {
    if (!ends_with(w, rules[r].suffix)) continue;
    const std::size_t cut =
        w.size() - std::char_traits<char>::length(rules[r].suffix);
    std::string stem = w.substr(0, cut);
    if (measure(stem) > rules[r].min_measure) {
      w = stem + rules[r].replacement;
    }
    return true;
  }
  return false;
}

void step1a(std::string& w) {
  if (ends_with(w, "sses")) {
    w.erase(w.size() - 2);
  } else if (ends_with(w, "ies")) {
    w.erase(w.size() - 2);
  } else if (ends_with(w, "ss")) {
    // unchanged
  } else if (ends_with(w, "s")) {
    w.pop_back();
  }
}

void step1b(std::string& w) {
  if (ends_with(w, "eed")) {
    if (measure(w.substr(0, w.size() - 3)) > 0) w.pop_back();
    return;
  }
  bool removed = false;
  if (ends_with(w, "ed") && contains_vowel(w.substr(0, w.size() - 2))) {
    w.erase(w.size() - 2);
    removed = true;
  } else if (ends_with(w, "ing") && contains_vowel(w.substr(0, w.size() - 3))) {
    w.erase(w.size() - 3);
    removed = true;
  }
  if (!removed) return;
  if (ends_with(w, "at") || ends_with(w, "bl") || ends_with(w, "iz")) {
    w += 'e';
  } else if (ends_double_consonant(w)) {
    const char last = w.back();
    if (last != 'l' && last != 's' && last != 'z') w.pop_back();
  } else if (measure(w) == 1 && ends_cvc(w)) {
    w += 'e';
  }
}

void step1c(std::string& w) {
  if (ends_with(w, "y") && contains_vowel(w.substr(0, w.size() - 1))) {
    w.back() = 'i';
  }
}

void step2(std::string& w) {
  static const SuffixRule rules[] = {
      {"ational", "ate", 0}, {"ization", "ize", 0}, {"iveness", "ive", 0},
      {"fulness", "ful", 0}, {"ousness", "ous", 0}, {"tional", "tion", 0},
      {"biliti", "ble", 0},  {"ousli", "ous", 0},   {"entli", "ent", 0},
      {"ation", "ate", 0},   {"alism", "al", 0},    {"aliti", "al", 0},
      {"iviti", "ive", 0},   {"enci", "ence", 0},   {"anci", "ance", 0},
      {"izer", "ize", 0},    {"abli", "able", 0},   {"alli", "al", 0},
      {"ator", "ate", 0},    {"eli", "e", 0},
  };
  apply_step(w, rules, std::size(rules));
}

void step3(std::string& w) {
  static const SuffixRule rules[] = {
      {"icate", "ic", 0}, {"ative", "", 0}, {"alize", "al", 0},
      {"iciti", "ic", 0}, {"ical", "ic", 0}, {"ness", "", 0},
      {"ful", "", 0},
  };
  apply_step(w, rules, std::size(rules));
}

void step4(std::string& w) {
  static const SuffixRule rules[] = {
      {"ement", "", 1}, {"ance", "", 1}, {"ence", "", 1}, {"able", "", 1},
      {"ible", "", 1},  {"ment", "", 1}, {"ant", "", 1},  {"ent", "", 1},
      {"ism", "", 1},   {"ate", "", 1},  {"iti", "", 1},  {"ous", "", 1},
      {"ive", "", 1},   {"ize", "", 1},  {"al", "", 1},   {"er", "", 1},
      {"ic", "", 1},    {"ou", "", 1},
  };
  // "ion" carries an extra condition (stem must end in s or t) and never
  // overlaps a table suffix at the same word end.
  if (ends_with(w, "ion")) {
    std::string stem = w.substr(0, w.size() - 3);
    if (!stem.empty() && (stem.back() == 's' || stem.back() == 't') &&
        measure(stem) > 1) {
      w = stem;
    }
    return;
  }
  apply_step(w, rules, std::size(rules));
}

void step5a(std::string& w) {
  if (!ends_with(w, "e")) return;
  std::string stem = w.substr(0, w.size() - 1);
  const int m = measure(stem);
  if (m > 1 || (m == 1 && !ends_cvc(stem))) w = stem;
}

void step5b(std::string& w) {
  if (measure(w) > 1 && ends_double_consonant(w) && w.back() == 'l') {
    w.pop_back();
  }
}

// ---------------------------------------------------------------------
// Unicode plumbing (ICU)
// ---------------------------------------------------------------------

const icu::Normalizer2* nfc() {
  static const icu::Normalizer2* instance = [] {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
    return U_SUCCESS(status) ? n : nullptr;
  }();
  return instance;
}

bool all_ascii_alpha(const std::string& s) {
  for (unsigned char c : s) {
    if (c < 'a' || c > 'z') return false;
  }
  return !s.empty();
}

std::string to_utf8(const icu::UnicodeString& us) {
  std::string out;
  us.toUTF8String(out);
  return out;
}

}  // namespace

std::string porter_stem(const std::string& word) {
  if (word.size() <= 2) return word;
  std::string w = word;
  step1a(w);
  step1b(w);
  step1c(w);
  step2(w);
  step3(w);
  step4(w);
  step5a(w);
  step5b(w);
  return w;
}

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> tokens;
  if (text.empty()) return tokens;

  icu::UnicodeString raw = icu::UnicodeString::fromUTF8(text);
  icu::UnicodeString norm = raw;
  if (const icu::Normalizer2* n = nfc()) {
    UErrorCode status = U_ZERO_ERROR;
    icu::UnicodeString normalized = n->normalize(raw, status);
    if (U_SUCCESS(status)) norm = std::move(normalized);
  }

  icu::UnicodeString surface;
  icu::UnicodeString lowered;
  auto flush = [&]() {
    if (surface.isEmpty()) return;
    Token tok;
    tok.surface = to_utf8(surface);
    std::string low = to_utf8(lowered);
    tok.stem = all_ascii_alpha(low) ? porter_stem(low) : low;
    tokens.push_back(std::move(tok));
    surface.remove();
    lowered.remove();
  };

  for (int32_t i = 0; i < norm.length(); i = norm.moveIndex32(i, 1)) {
    const UChar32 c = norm.char32At(i);
    if (u_isalnum(c)) {
      surface.append(c);
      lowered.append(u_tolower(c));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::vector<std::string> stem_sequence(const std::string& text) {
  std::vector<std::string> stems;
  for (auto& tok : tokenize(text)) stems.push_back(std::move(tok.stem));
  return stems;
}

NormalizedPhrase normalize_phrase(const std::string& phrase) {
  NormalizedPhrase result;
  result.stems = stem_sequence(phrase);
  if (result.stems.empty()) {
    throw Error(ErrorKind::empty_phrase,
                "phrase has no alphanumeric content: \"" + phrase + "\"");
  }
  std::size_t begin = 0;
  std::size_t end = phrase.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(phrase[begin])))
    ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(phrase[end - 1])))
    --end;
  result.surface = phrase.substr(begin, end - begin);
  return result;
}

std::size_t word_count(const std::string& text) {
  std::size_t count = 0;
  bool in_word = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++count;
    }
  }
  return count;
}

std::string stems_key(const std::vector<std::string>& stems) {
  std::string key;
  for (const auto& s : stems) {
    key += s;
    key += '\x1f';
  }
  return key;
}

}  // namespace textkit
}  // namespace kphom
