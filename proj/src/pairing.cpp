#include "kphom/pairing.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <utility>

#include "kphom/error.hpp"
#include "kphom/prmu.hpp"

namespace kphom {
namespace pairing {

const char* to_string(SimilarityMetric metric) {
  return metric == SimilarityMetric::jaccard ? "jaccard" : "houbre_max";
}

SimilarityMetric similarity_metric_from_string(const std::string& name) {
  if (name == "jaccard") return SimilarityMetric::jaccard;
  if (name == "houbre_max") return SimilarityMetric::houbre_max;
  throw std::invalid_argument("unknown similarity metric: " + name);
}

double similarity(const metrics::KeyphraseSet& a,
                  const metrics::KeyphraseSet& b, SimilarityMetric metric) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  std::size_t common = 0;
  for (const auto& phrase : a.phrases()) {
    if (b.contains(phrase)) ++common;
  }
  const double c = static_cast<double>(common);
  if (metric == SimilarityMetric::houbre_max) {
    return c / static_cast<double>(std::max(a.size(), b.size()));
  }
  return c / static_cast<double>(a.size() + b.size() - common);
}

std::vector<corpus::DocumentPair> build_pairs(const corpus::Corpus& docs,
                                              const PairingConfig& config,
                                              PairingSummary* summary) {
  if (docs.empty()) {
    throw Error(ErrorKind::empty_corpus, "cannot pair an empty corpus");
  }
  if (!(config.threshold > 0.0 && config.threshold <= 1.0)) {
    throw std::invalid_argument("pairing threshold must lie in (0, 1]");
  }

  struct Entry {
    const corpus::Document* doc;
    metrics::KeyphraseSet refs;
  };
  std::vector<Entry> entries;
  std::size_t skipped = 0;
  for (const auto& doc : docs.documents()) {
    auto refs = metrics::KeyphraseSet::from_texts(doc.references);
    if (refs.empty()) {
      ++skipped;
      continue;
    }
    entries.push_back({&doc, std::move(refs)});
  }

  // Inverted index; only pairs sharing a keyphrase can pass a positive
  // threshold, so scoring the co-occurring pairs is exhaustive.
  std::unordered_map<std::string, std::vector<std::size_t>> postings;
  for (std::size_t e = 0; e < entries.size(); ++e) {
    for (const auto& phrase : entries[e].refs.phrases()) {
      postings[textkit::stems_key(phrase.stems)].push_back(e);
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> candidates;
  for (const auto& [key, ids] : postings) {
    for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
      for (std::size_t j = i + 1; j < ids.size(); ++j) {
        candidates.emplace_back(ids[i], ids[j]);
      }
    }
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());

  std::vector<corpus::DocumentPair> pairs;
  for (const auto& [ia, ib] : candidates) {
    const double sim =
        similarity(entries[ia].refs, entries[ib].refs, config.metric);
    if (sim < config.threshold) continue;
    const std::string* a = &entries[ia].doc->id;
    const std::string* b = &entries[ib].doc->id;
    if (*b < *a) std::swap(a, b);
    corpus::DocumentPair pair;
    pair.pair_id = *a + "--" + *b;
    pair.doc_a = *a;
    pair.doc_b = *b;
    pair.provenance = corpus::PairProvenance::shared_keyphrase;
    pair.reference_similarity = sim;
    pairs.push_back(std::move(pair));
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const corpus::DocumentPair& x, const corpus::DocumentPair& y) {
              if (x.pair_id != y.pair_id) return x.pair_id < y.pair_id;
              return std::tie(x.doc_a, x.doc_b) < std::tie(y.doc_a, y.doc_b);
            });

  if (summary) {
    summary->docs_without_references = skipped;
    summary->candidates_scored = candidates.size();
  }
  return pairs;
}

namespace {

metrics::KeyphraseSet present_subset(const corpus::Document& doc) {
  if (doc.references.empty()) {
    throw Error(ErrorKind::missing_references,
                "document '" + doc.id + "' carries no reference keyphrases");
  }
  const auto stems = prmu::classification_stems(doc.title, doc.body);
  const auto refs = metrics::KeyphraseSet::from_texts(doc.references);
  metrics::KeyphraseSet present;
  for (const auto& phrase : refs.phrases()) {
    if (prmu::classify(phrase, stems) == prmu::PrmuClass::present) {
      present.insert(phrase);
    }
  }
  return present;
}

}  // namespace

metrics::CpScores extraction_upper_bound(const corpus::DocumentPair& pair,
                                         const corpus::Corpus& docs,
                                         metrics::SetFormula formula) {
  const corpus::Document* a = docs.find(pair.doc_a);
  const corpus::Document* b = docs.find(pair.doc_b);
  if (!a || !b) {
    throw Error(ErrorKind::unresolved_doc_id,
                "pair '" + pair.pair_id + "' names a document not in the corpus");
  }
  const auto pa = present_subset(*a);
  const auto pb = present_subset(*b);
  metrics::CpScores scores;
  scores.hooper = metrics::hooper_cp(pa, pb, formula);
  scores.rodgers = metrics::rodgers_cp(pa, pb, formula);
  scores.formula = formula;
  return scores;
}

}  // namespace pairing
}  // namespace kphom
