#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace kphom {
namespace textkit {

// One word unit of a text: the surface run as it appeared (after NFC,
// original case) and its canonical comparison form (lowercased, Porter
// stemmed).  Every set comparison in the toolkit happens on stems.
struct Token {
  std::string surface;
  std::string stem;
};

// Canonical form of a keyphrase: the ordered stems of its tokens.  Two
// phrases differing only in case, surrounding whitespace or inflection
// handled by the stemmer normalize to the same stems list.
struct NormalizedPhrase {
  std::vector<std::string> stems;
  std::string surface;  // input, trimmed

  bool operator==(const NormalizedPhrase& other) const {
    return stems == other.stems;
  }
};

// Porter stem of a single lowercase word.  Applied to ASCII-alphabetic
// words only by tokenize(); other tokens pass through unchanged.
std::string porter_stem(const std::string& word);

// Splits text into maximal alphanumeric runs after Unicode NFC
// normalization; lowercases and stems each run.  All punctuation,
// hyphens included, separates tokens.  Total on any input.
std::vector<Token> tokenize(const std::string& text);

// Stems of tokenize(text), as a plain vector.
std::vector<std::string> stem_sequence(const std::string& text);

// Throws Error(empty_phrase) when the phrase has no alphanumeric content.
NormalizedPhrase normalize_phrase(const std::string& phrase);

// Number of whitespace-delimited words in the raw text.  Used by the
// reformulation length filter, which concerns surface length, so no
// normalization is applied.
std::size_t word_count(const std::string& text);

// Stable key for a stems list (stems never contain the separator).
std::string stems_key(const std::vector<std::string>& stems);

}  // namespace textkit
}  // namespace kphom
