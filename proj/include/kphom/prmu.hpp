#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "kphom/corpus.hpp"
#include "kphom/metrics.hpp"
#include "kphom/textkit.hpp"

namespace kphom {
namespace prmu {

// Four-way classification of a keyphrase against a source text.
//   Present   - stems occur as a contiguous subsequence of the text
//   Reordered - every stem occurs somewhere, but never contiguously
//   Mixed     - some but not all stems occur
//   Unseen    - no stem occurs
enum class PrmuClass { present, reordered, mixed, unseen };

const char* to_string(PrmuClass c);

struct PrmuDistribution {
  double p_pct = 0.0;
  double r_pct = 0.0;
  double m_pct = 0.0;
  double u_pct = 0.0;
  std::size_t n = 0;
};

struct GenericityStats {
  double mean_document_frequency = 0.0;
  double mean_length_words = 0.0;
  std::size_t n_keyphrases = 0;
  std::size_t n_zero_frequency = 0;  // keyphrases found in no reference set
};

// Separator inserted between title and body stems so a phrase can never
// match across the seam.  Tokens are alphanumeric runs, so no real stem
// ever equals it.
inline const std::string kSeamSentinel = "\x1e";

// Stems of a title+body text with the seam barrier between them.
std::vector<std::string> classification_stems(const std::string& title,
                                              const std::string& body);

// Throws Error(empty_phrase) when the keyphrase has no stems.
PrmuClass classify(const textkit::NormalizedPhrase& keyphrase,
                   const std::vector<std::string>& document_stems);

enum class Weighting { pooled, per_document };

// Percentage of keyphrases in each class over all (keyphrase, document)
// attachments.  pooled counts every attachment once; per_document
// averages the per-document distributions.
PrmuDistribution distribution(
    const std::vector<std::pair<metrics::KeyphraseSet,
                                std::vector<std::string>>>& attachments,
    Weighting weighting = Weighting::pooled);

// Percentage of predicted keyphrases whose class is not Present.
// Empty prediction set -> 0 by convention.
double absent_rate(const metrics::KeyphraseSet& predictions,
                   const std::vector<std::string>& document_stems);

// Document frequency (membership in reference sets, by stems equality)
// and length in words of the given keyphrases over a corpus.
GenericityStats genericity(const metrics::KeyphraseSet& shared_keyphrases,
                           const corpus::Corpus& docs);

}  // namespace prmu
}  // namespace kphom
