#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kphom/corpus.hpp"
#include "kphom/metrics.hpp"
#include "kphom/prmu.hpp"

namespace kphom {
namespace harness {

inline const char kToolkitVersion[] = "0.1.0";

enum class EmptyFlags { none, one_empty, both_empty };

const char* to_string(EmptyFlags flags);

// Scores of one system on one document pair.
struct PairResult {
  std::string pair_id;
  std::string system;
  metrics::CpScores cp;
  double rouge1_between_docs = 0.0;
  double absent_rate_a = 0.0;  // % of predictions not Present, side a
  double absent_rate_b = 0.0;
  EmptyFlags empty_flags = EmptyFlags::none;
};

// Aggregates of one system over all pairs it covered.  Percentages are
// unrounded 0..100 values; rendering applies the display rounding.
struct SystemSummary {
  std::string system;
  double mean_hooper = 0.0;
  double mean_rodgers = 0.0;
  double gen_rate = 0.0;  // mean of the per-side absent rates
  metrics::CorrelationResult correlation;      // configured method
  metrics::CorrelationResult correlation_alt;  // the other method
  bool correlation_available = false;
  std::string correlation_note;  // why unavailable, when it is
  std::size_t n_pairs = 0;
  std::size_t n_empty = 0;    // pairs with at least one empty prediction set
  std::size_t n_skipped = 0;  // pairs without predictions for this system
};

struct EvaluateOptions {
  metrics::SetFormula formula = metrics::SetFormula::jaccard;
  unsigned threads = 1;
};

// Per pair and system: CP scores on the normalized deduplicated
// prediction sets, ROUGE-1 between the two document texts, and the
// absent-prediction rate on each side.  Pairs a system has no
// predictions for (either side) are skipped and counted in n_skipped.
// Output is sorted by (system, pair_id) and is byte-stable across
// thread counts.  Throws UnresolvedDocId for pairs naming unknown
// documents and NoOverlap when a system covers zero pairs.
std::vector<PairResult> evaluate(const std::vector<corpus::DocumentPair>& pairs,
                                 const corpus::Corpus& docs,
                                 const corpus::PredictionsLoad& predictions,
                                 const EvaluateOptions& options = {});

// Groups results by system (lexicographic order) and aggregates.  The
// correlation relates per-pair document ROUGE-1 to per-pair Hooper CP;
// both methods are computed, `correlation` holds the configured one.
// Too few or constant series mark the correlation unavailable instead
// of failing the summary.
std::vector<SystemSummary> summarize(const std::vector<PairResult>& results,
                                     metrics::CorrelationMethod method);

// ---------------------------------------------------------------------------
// TF-IDF extraction baseline

struct BaselineConfig {
  std::size_t top_k = 5;
  std::size_t max_ngram = 3;
  std::string stopwords = "english";  // or "none"
};

struct DocumentFrequencies {
  std::unordered_map<std::string, std::size_t> df;  // stem -> n docs
  std::size_t n_docs = 0;
};

DocumentFrequencies document_frequencies(const corpus::Corpus& docs);

// Candidates are word n-grams (1..max_ngram) over the stemmed tokens,
// never crossing the title/body seam and never starting or ending on a
// stopword.  score = mean over constituent stems of tf * log(N/(1+df)).
// Top k by score; ties break by earlier first occurrence, then by
// lexicographic stems.  Every output occurs contiguously in the text.
// A document of only stopwords yields an empty set; a document with no
// tokens at all throws EmptyDocument.
corpus::PredictionSet tfidf_extract(const corpus::Document& doc,
                                    const DocumentFrequencies& frequencies,
                                    const BaselineConfig& config = {});

corpus::PredictionSet tfidf_extract(const corpus::Document& doc,
                                    const corpus::Corpus& docs,
                                    const BaselineConfig& config = {});

inline const char kBaselineSystemName[] = "tfidf";

// ---------------------------------------------------------------------------
// Dataset statistics

struct DatasetStats {
  std::string dataset;  // from meta "dataset"/"version", else "unlabeled"
  std::size_t documents = 0;
  std::size_t pairs = 0;  // only set by the pairs overload
  prmu::PrmuDistribution prmu;  // n == 0 when no references exist
  double mean_references = 0.0;
  double mean_keyphrase_length = 0.0;  // words per normalized reference
};

// Per dataset label: document count, PRMU distribution of the reference
// keyphrases, mean references per document, mean keyphrase length.
// Throws EmptyCorpus.
std::vector<DatasetStats> dataset_stats(const corpus::Corpus& docs);

// Same, restricted to the unique documents appearing in pairs.
std::vector<DatasetStats> dataset_stats(
    const corpus::Corpus& docs, const std::vector<corpus::DocumentPair>& pairs);

// ---------------------------------------------------------------------------
// Reports

struct ReportConfig {
  metrics::SetFormula formula = metrics::SetFormula::jaccard;
  metrics::CorrelationMethod correlation = metrics::CorrelationMethod::spearman;
  std::string markdown_path;  // empty skips the file
  std::string csv_path;       // empty skips the file
};

// (label, path) of every input file; fingerprinted into the report.
using ReportInputs = std::vector<std::pair<std::string, std::string>>;

std::string render_markdown(const std::vector<SystemSummary>& summaries,
                            const std::vector<DatasetStats>& stats,
                            const ReportConfig& config,
                            const ReportInputs& inputs);

// One row per system; percentages and correlations at full precision so
// a reload compares equal.  Both correlation methods are carried.
std::string render_csv(const std::vector<SystemSummary>& summaries);

// Writes the markdown and CSV renderings (same content, two formats).
// Reports carry no timestamps: identical inputs give identical bytes.
// Throws IoError.
void emit_report(const std::vector<SystemSummary>& summaries,
                 const std::vector<DatasetStats>& stats,
                 const ReportConfig& config, const ReportInputs& inputs);

}  // namespace harness
}  // namespace kphom
