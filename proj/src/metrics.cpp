#include "kphom/metrics.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kphom/error.hpp"

namespace kphom {
namespace metrics {

const char* to_string(SetFormula formula) {
  return formula == SetFormula::jaccard ? "jaccard" : "dice";
}

SetFormula set_formula_from_string(const std::string& name) {
  if (name == "jaccard") return SetFormula::jaccard;
  if (name == "dice") return SetFormula::dice;
  throw Error(ErrorKind::parse_error, "unknown formula: " + name);
}

const char* to_string(CorrelationMethod method) {
  return method == CorrelationMethod::pearson ? "pearson" : "spearman";
}

CorrelationMethod correlation_method_from_string(const std::string& name) {
  if (name == "pearson") return CorrelationMethod::pearson;
  if (name == "spearman") return CorrelationMethod::spearman;
  throw Error(ErrorKind::parse_error, "unknown correlation method: " + name);
}

KeyphraseSet::KeyphraseSet(std::vector<textkit::NormalizedPhrase> phrases) {
  for (auto& p : phrases) insert(std::move(p));
}

KeyphraseSet KeyphraseSet::from_texts(const std::vector<std::string>& texts) {
  KeyphraseSet set;
  for (const auto& text : texts) {
    textkit::NormalizedPhrase phrase;
    phrase.stems = textkit::stem_sequence(text);
    if (phrase.stems.empty()) continue;
    phrase.surface = text;
    set.insert(std::move(phrase));
  }
  return set;
}

void KeyphraseSet::insert(textkit::NormalizedPhrase phrase) {
  std::string key = textkit::stems_key(phrase.stems);
  if (keys_.insert(std::move(key)).second) {
    phrases_.push_back(std::move(phrase));
  }
}

std::unordered_set<std::string> KeyphraseSet::unique_stems() const {
  std::unordered_set<std::string> stems;
  for (const auto& phrase : phrases_) {
    stems.insert(phrase.stems.begin(), phrase.stems.end());
  }
  return stems;
}

namespace {

double overlap_score(std::size_t a, std::size_t b, std::size_t common,
                     SetFormula formula) {
  if (a == 0 && b == 0) return 1.0;
  if (a == 0 || b == 0) return 0.0;
  const double c = static_cast<double>(common);
  if (formula == SetFormula::dice) {
    return 2.0 * c / static_cast<double>(a + b);
  }
  return c / static_cast<double>(a + b - common);
}

}  // namespace

double hooper_cp(const KeyphraseSet& a, const KeyphraseSet& b,
                 SetFormula formula) {
  std::size_t common = 0;
  for (const auto& phrase : a.phrases()) {
    if (b.contains(phrase)) ++common;
  }
  return overlap_score(a.size(), b.size(), common, formula);
}

double rodgers_cp(const KeyphraseSet& a, const KeyphraseSet& b,
                  SetFormula formula) {
  const auto wa = a.unique_stems();
  const auto wb = b.unique_stems();
  std::size_t common = 0;
  for (const auto& stem : wa) {
    if (wb.count(stem)) ++common;
  }
  return overlap_score(wa.size(), wb.size(), common, formula);
}

std::size_t edit_distance(const std::vector<std::string>& a,
                          const std::vector<std::string>& b) {
  const std::size_t rows = a.size() + 1;
  const std::size_t cols = b.size() + 1;
  std::vector<std::size_t> prev(cols), curr(cols);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i < rows; ++i) {
    curr[0] = i;
    for (std::size_t j = 1; j < cols; ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      curr[j] = std::min({prev[j] + 1, curr[j - 1] + 1, sub});
    }
    std::swap(prev, curr);
  }
  return prev[cols - 1];
}

double wer(const std::string& reference, const std::string& hypothesis) {
  const auto ref = textkit::stem_sequence(reference);
  if (ref.empty()) {
    throw Error(ErrorKind::empty_reference, "reference tokenizes to nothing");
  }
  const auto hyp = textkit::stem_sequence(hypothesis);
  return static_cast<double>(edit_distance(ref, hyp)) /
         static_cast<double>(ref.size());
}

double rouge1_recall(const std::string& reference,
                     const std::string& candidate) {
  const auto ref = textkit::stem_sequence(reference);
  if (ref.empty()) {
    throw Error(ErrorKind::empty_reference, "reference tokenizes to nothing");
  }
  const std::unordered_set<std::string> ref_stems(ref.begin(), ref.end());
  const auto cand = textkit::stem_sequence(candidate);
  const std::unordered_set<std::string> cand_stems(cand.begin(), cand.end());
  std::size_t recalled = 0;
  for (const auto& stem : ref_stems) {
    if (cand_stems.count(stem)) ++recalled;
  }
  return static_cast<double>(recalled) / static_cast<double>(ref_stems.size());
}

namespace {

void check_series(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) {
    throw Error(ErrorKind::insufficient_data, "series lengths differ");
  }
  if (xs.size() < 3) {
    throw Error(ErrorKind::insufficient_data,
                "need at least 3 paired samples, got " +
                    std::to_string(xs.size()));
  }
  auto constant = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(),
                       [&](double x) { return x == v.front(); });
  };
  if (constant(xs) || constant(ys)) {
    throw Error(ErrorKind::constant_series, "a series is constant");
  }
}

double t_test_p_value(double r, std::size_t n) {
  const double denom = 1.0 - r * r;
  if (denom <= 0.0) return 0.0;
  const double t = r * std::sqrt(static_cast<double>(n - 2) / denom);
  boost::math::students_t dist(static_cast<double>(n - 2));
  return 2.0 * boost::math::cdf(dist, -std::abs(t));
}

}  // namespace

CorrelationResult pearson(const std::vector<double>& xs,
                          const std::vector<double>& ys) {
  check_series(xs, ys);
  const std::size_t n = xs.size();
  const double mean_x = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double mean_y = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mean_x;
    const double dy = ys[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  CorrelationResult result;
  result.method = CorrelationMethod::pearson;
  result.n = n;
  result.coefficient = sxy / std::sqrt(sxx * syy);
  result.coefficient = std::clamp(result.coefficient, -1.0, 1.0);
  result.p_value = t_test_p_value(result.coefficient, n);
  return result;
}

std::vector<double> average_ranks(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
    // positions i..j (0-based) share the mean of ranks i+1..j+1
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

CorrelationResult spearman(const std::vector<double>& xs,
                           const std::vector<double>& ys) {
  check_series(xs, ys);
  CorrelationResult result = pearson(average_ranks(xs), average_ranks(ys));
  result.method = CorrelationMethod::spearman;
  return result;
}

}  // namespace metrics
}  // namespace kphom
