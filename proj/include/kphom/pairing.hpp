#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "kphom/corpus.hpp"
#include "kphom/metrics.hpp"

namespace kphom {
namespace pairing {

// Reference-set similarity used to decide whether two documents treat
// the same notions.  jaccard is C/(A+B-C); houbre_max is C/max(A,B),
// the variant used by earlier self-composition work.
enum class SimilarityMetric { jaccard, houbre_max };

const char* to_string(SimilarityMetric metric);
SimilarityMetric similarity_metric_from_string(const std::string& name);

struct PairingConfig {
  SimilarityMetric metric = SimilarityMetric::jaccard;
  double threshold = 0.5;  // must lie in (0, 1]
};

struct PairingSummary {
  std::size_t docs_without_references = 0;  // skipped, with a warning
  std::size_t candidates_scored = 0;
};

// Both-empty -> 1, one-empty -> 0, same conventions as the CP metrics.
double similarity(const metrics::KeyphraseSet& a,
                  const metrics::KeyphraseSet& b, SimilarityMetric metric);

// Every unordered pair of documents whose normalized reference sets
// reach the threshold.  An inverted index (keyphrase stems -> docs)
// restricts scoring to pairs sharing at least one keyphrase, which is
// lossless for any threshold > 0.  Documents may appear in several
// pairs.  Output is sorted by pair_id (the sorted doc ids joined with
// "--").  Throws EmptyCorpus; std::invalid_argument on a bad threshold.
std::vector<corpus::DocumentPair> build_pairs(const corpus::Corpus& docs,
                                              const PairingConfig& config,
                                              PairingSummary* summary = nullptr);

// Best CP any extractor agreeing with the references could reach on a
// pair: the CP between the Present-class subsets of each document's
// references relative to its own text.  Throws UnresolvedDocId when the
// pair names unknown documents and MissingReferences when either side
// has none.
metrics::CpScores extraction_upper_bound(
    const corpus::DocumentPair& pair, const corpus::Corpus& docs,
    metrics::SetFormula formula = metrics::SetFormula::jaccard);

}  // namespace pairing
}  // namespace kphom
