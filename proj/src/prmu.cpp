#include "kphom/prmu.hpp"

#include <algorithm>
#include <array>
#include <unordered_set>

#include "kphom/error.hpp"

namespace kphom {
namespace prmu {

const char* to_string(PrmuClass c) {
  switch (c) {
    case PrmuClass::present: return "present";
    case PrmuClass::reordered: return "reordered";
    case PrmuClass::mixed: return "mixed";
    case PrmuClass::unseen: return "unseen";
  }
  return "unknown";
}

std::vector<std::string> classification_stems(const std::string& title,
                                              const std::string& body) {
  std::vector<std::string> stems = textkit::stem_sequence(title);
  if (!stems.empty() && !body.empty()) stems.push_back(kSeamSentinel);
  auto body_stems = textkit::stem_sequence(body);
  stems.insert(stems.end(), std::make_move_iterator(body_stems.begin()),
               std::make_move_iterator(body_stems.end()));
  return stems;
}

PrmuClass classify(const textkit::NormalizedPhrase& keyphrase,
                   const std::vector<std::string>& document_stems) {
  if (keyphrase.stems.empty()) {
    throw Error(ErrorKind::empty_phrase, "keyphrase has no stems");
  }
  const auto& needle = keyphrase.stems;
  if (needle.size() <= document_stems.size()) {
    auto it = std::search(document_stems.begin(), document_stems.end(),
                          needle.begin(), needle.end());
    if (it != document_stems.end()) return PrmuClass::present;
  }
  const std::unordered_set<std::string> doc_set(document_stems.begin(),
                                                document_stems.end());
  std::size_t found = 0;
  std::unordered_set<std::string> distinct(needle.begin(), needle.end());
  for (const auto& stem : distinct) {
    if (doc_set.count(stem)) ++found;
  }
  if (found == distinct.size()) return PrmuClass::reordered;
  if (found > 0) return PrmuClass::mixed;
  return PrmuClass::unseen;
}

PrmuDistribution distribution(
    const std::vector<std::pair<metrics::KeyphraseSet,
                                std::vector<std::string>>>& attachments,
    Weighting weighting) {
  std::size_t total = 0;
  std::array<double, 4> pct{};
  std::array<std::size_t, 4> pooled{};
  std::size_t docs_counted = 0;

  for (const auto& [keyphrases, stems] : attachments) {
    std::array<std::size_t, 4> local{};
    for (const auto& phrase : keyphrases.phrases()) {
      ++local[static_cast<std::size_t>(classify(phrase, stems))];
    }
    const std::size_t n =
        local[0] + local[1] + local[2] + local[3];
    total += n;
    if (n == 0) continue;
    ++docs_counted;
    for (std::size_t c = 0; c < 4; ++c) {
      pooled[c] += local[c];
      if (weighting == Weighting::per_document) {
        pct[c] += 100.0 * static_cast<double>(local[c]) /
                  static_cast<double>(n);
      }
    }
  }
  if (total == 0) {
    throw Error(ErrorKind::empty_corpus, "no keyphrases to classify");
  }

  PrmuDistribution dist;
  dist.n = total;
  if (weighting == Weighting::pooled) {
    for (std::size_t c = 0; c < 4; ++c) {
      pct[c] = 100.0 * static_cast<double>(pooled[c]) /
               static_cast<double>(total);
    }
  } else {
    for (std::size_t c = 0; c < 4; ++c) {
      pct[c] /= static_cast<double>(docs_counted);
    }
  }
  dist.p_pct = pct[0];
  dist.r_pct = pct[1];
  dist.m_pct = pct[2];
  dist.u_pct = pct[3];
  return dist;
}

double absent_rate(const metrics::KeyphraseSet& predictions,
                   const std::vector<std::string>& document_stems) {
  if (predictions.empty()) return 0.0;
  std::size_t absent = 0;
  for (const auto& phrase : predictions.phrases()) {
    if (classify(phrase, document_stems) != PrmuClass::present) ++absent;
  }
  return 100.0 * static_cast<double>(absent) /
         static_cast<double>(predictions.size());
}

GenericityStats genericity(const metrics::KeyphraseSet& shared_keyphrases,
                           const corpus::Corpus& docs) {
  if (docs.empty()) {
    throw Error(ErrorKind::empty_corpus, "genericity needs documents");
  }
  GenericityStats stats;
  stats.n_keyphrases = shared_keyphrases.size();
  if (shared_keyphrases.empty()) return stats;

  // Normalize every document's reference set once.
  std::vector<metrics::KeyphraseSet> reference_sets;
  reference_sets.reserve(docs.size());
  for (const auto& doc : docs.documents()) {
    reference_sets.push_back(metrics::KeyphraseSet::from_texts(doc.references));
  }

  double df_sum = 0.0;
  double len_sum = 0.0;
  for (const auto& phrase : shared_keyphrases.phrases()) {
    std::size_t df = 0;
    for (const auto& refs : reference_sets) {
      if (refs.contains(phrase)) ++df;
    }
    if (df == 0) ++stats.n_zero_frequency;
    df_sum += static_cast<double>(df);
    len_sum += static_cast<double>(phrase.stems.size());
  }
  stats.mean_document_frequency =
      df_sum / static_cast<double>(shared_keyphrases.size());
  stats.mean_length_words =
      len_sum / static_cast<double>(shared_keyphrases.size());
  return stats;
}

}  // namespace prmu
}  // namespace kphom
