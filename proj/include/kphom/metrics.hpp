#pragma once

#include <cstddef>
#include <string>
#include <unordered_set>
#include <vector>

#include "kphom/textkit.hpp"

namespace kphom {
namespace metrics {

// Both consistency metrics come in the intersection-over-union form and
// the 2C/(A+B) form; reports always carry the tag so the two are never
// mixed silently.
enum class SetFormula { jaccard, dice };

const char* to_string(SetFormula formula);
SetFormula set_formula_from_string(const std::string& name);

// A deduplicated set of keyphrases; equality of members is equality of
// their stems lists.  Insertion order of first occurrences is kept so
// iteration is deterministic.
class KeyphraseSet {
 public:
  KeyphraseSet() = default;

  // Deduplicates by stems list, keeping the first occurrence.
  explicit KeyphraseSet(std::vector<textkit::NormalizedPhrase> phrases);

  // Normalizes raw texts; texts with no alphanumeric content are
  // skipped (auto-terminating models can emit garbage members).
  static KeyphraseSet from_texts(const std::vector<std::string>& texts);

  void insert(textkit::NormalizedPhrase phrase);

  std::size_t size() const { return phrases_.size(); }
  bool empty() const { return phrases_.empty(); }
  const std::vector<textkit::NormalizedPhrase>& phrases() const {
    return phrases_;
  }
  bool contains(const textkit::NormalizedPhrase& phrase) const {
    return keys_.count(textkit::stems_key(phrase.stems)) > 0;
  }

  // Unique stems occurring anywhere in the member phrases (the word
  // scale the Rodgers metric operates on).
  std::unordered_set<std::string> unique_stems() const;

 private:
  std::vector<textkit::NormalizedPhrase> phrases_;
  std::unordered_set<std::string> keys_;
};

struct CpScores {
  double hooper = 0.0;
  double rodgers = 0.0;
  SetFormula formula = SetFormula::jaccard;
};

enum class CorrelationMethod { pearson, spearman };

const char* to_string(CorrelationMethod method);
CorrelationMethod correlation_method_from_string(const std::string& name);

struct CorrelationResult {
  double coefficient = 0.0;
  double p_value = 1.0;
  CorrelationMethod method = CorrelationMethod::pearson;
  std::size_t n = 0;
};

// Consistency of a pair at the keyphrase scale.  With C = |a o b| by
// stems equality, A = |a|, B = |b|: jaccard C/(A+B-C), dice 2C/(A+B).
// Both sets empty -> 1, exactly one empty -> 0.
double hooper_cp(const KeyphraseSet& a, const KeyphraseSet& b,
                 SetFormula formula);

// Consistency of a pair at the word scale: the same formula applied to
// the sets of unique stems occurring anywhere in each side's phrases.
double rodgers_cp(const KeyphraseSet& a, const KeyphraseSet& b,
                  SetFormula formula);

// Word error rate: token-level edit distance between the stem
// sequences, divided by the reference token count.  May exceed 1.
// Throws Error(empty_reference) when the reference has no tokens.
double wer(const std::string& reference, const std::string& hypothesis);

// Fraction of the reference's unique stems found in the candidate.
double rouge1_recall(const std::string& reference,
                     const std::string& candidate);

// Product-moment correlation; p-value from a two-sided t-test with n-2
// degrees of freedom.  Throws InsufficientData (n < 3 or mismatched
// lengths) or ConstantSeries.
CorrelationResult pearson(const std::vector<double>& xs,
                          const std::vector<double>& ys);

// Pearson over average-ranked series; ties receive their mean rank.
CorrelationResult spearman(const std::vector<double>& xs,
                           const std::vector<double>& ys);

// Average ranks (1-based); ties share the mean of their rank range.
std::vector<double> average_ranks(const std::vector<double>& xs);

// Edit distance on token sequences, unit costs.
std::size_t edit_distance(const std::vector<std::string>& a,
                          const std::vector<std::string>& b);

}  // namespace metrics
}  // namespace kphom
