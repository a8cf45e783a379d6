#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <unistd.h>
#include <vector>

#include "kphom/corpus.hpp"
#include "kphom/error.hpp"
#include "kphom/harness.hpp"
#include "kphom/metrics.hpp"
#include "kphom/prmu.hpp"
#include "kphom/textkit.hpp"
#include "oracles.hpp"

using namespace kphom;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path root;
  TempDir() {
    static int n = 0;
    root = fs::temp_directory_path() /
           ("kphom-harness-" + std::to_string(::getpid()) + "-" +
            std::to_string(n++));
    fs::create_directories(root);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(root, ec);
  }
};

corpus::Document make_doc(std::string id, std::string title, std::string body,
                          std::vector<std::string> refs) {
  corpus::Document d;
  d.id = std::move(id);
  d.title = std::move(title);
  d.body = std::move(body);
  d.references = std::move(refs);
  return d;
}

void predict(corpus::PredictionsLoad* load, const std::string& system,
             const std::string& doc_id,
             const std::vector<std::string>& keyphrases) {
  corpus::PredictionSet p;
  p.doc_id = doc_id;
  p.system = system;
  p.keyphrases = keyphrases;
  if (std::find(load->systems.begin(), load->systems.end(), system) ==
      load->systems.end()) {
    load->systems.push_back(system);
  }
  load->predictions.emplace(std::make_pair(system, doc_id), std::move(p));
}

corpus::DocumentPair make_pair(const std::string& a, const std::string& b) {
  corpus::DocumentPair p;
  p.pair_id = a + "--" + b;
  p.doc_a = a;
  p.doc_b = b;
  return p;
}

// Single-letter documents: the stemmer leaves words of length <= 2
// alone, so every number below is hand-checkable.
struct Fixture {
  corpus::Corpus docs;
  std::vector<corpus::DocumentPair> pairs;
  corpus::PredictionsLoad preds;

  Fixture() {
    docs.add(make_doc("d1", "b c", "d f g", {"b c"}));
    docs.add(make_doc("d2", "b c", "d j k", {"b c"}));
    docs.add(make_doc("d3", "m n", "p q", {"m"}));
    docs.add(make_doc("d4", "m n", "p r", {"m"}));
    pairs = {make_pair("d1", "d2"), make_pair("d3", "d4")};
    predict(&preds, "sysa", "d1", {"b c", "d"});
    predict(&preds, "sysa", "d2", {"b c"});
    predict(&preds, "sysa", "d3", {"m n"});
    predict(&preds, "sysa", "d4", {"m n", "z z"});
    predict(&preds, "sysb", "d1", {});
    predict(&preds, "sysb", "d2", {"b c", "d j"});
  }
};

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("evaluate scores every covered (system, pair)") {
  Fixture fx;
  const auto results = harness::evaluate(fx.pairs, fx.docs, fx.preds);
  REQUIRE(results.size() == 3);

  // sorted by (system, pair_id)
  CHECK(results[0].system == "sysa");
  CHECK(results[0].pair_id == "d1--d2");
  CHECK(results[1].system == "sysa");
  CHECK(results[1].pair_id == "d3--d4");
  CHECK(results[2].system == "sysb");
  CHECK(results[2].pair_id == "d1--d2");

  // sysa on d1--d2: sets {bc, d} vs {bc}
  CHECK(results[0].cp.hooper == 0.5);         // 1/(2+1-1)
  CHECK(results[0].cp.rodgers == 2.0 / 3.0);  // stems {b,c,d} vs {b,c}
  CHECK(results[0].rouge1_between_docs == 3.0 / 5.0);
  CHECK(results[0].absent_rate_a == 0.0);
  CHECK(results[0].absent_rate_b == 0.0);
  CHECK(results[0].empty_flags == harness::EmptyFlags::none);

  // sysa on d3--d4: sets {mn} vs {mn, zz}
  CHECK(results[1].cp.hooper == 0.5);
  CHECK(results[1].cp.rodgers == 2.0 / 3.0);
  CHECK(results[1].rouge1_between_docs == 3.0 / 4.0);
  CHECK(results[1].absent_rate_a == 0.0);
  CHECK(results[1].absent_rate_b == 50.0);  // "z z" is unseen in d4

  // sysb on d1--d2: one side empty
  CHECK(results[2].cp.hooper == 0.0);
  CHECK(results[2].cp.rodgers == 0.0);
  CHECK(results[2].empty_flags == harness::EmptyFlags::one_empty);
  CHECK(results[2].absent_rate_a == 0.0);  // empty set -> 0 by convention
  CHECK(results[2].absent_rate_b == 0.0);  // "d j" is contiguous in d2
}

TEST_CASE("summarize aggregates per system") {
  Fixture fx;
  const auto results = harness::evaluate(fx.pairs, fx.docs, fx.preds);
  const auto summaries =
      harness::summarize(results, metrics::CorrelationMethod::spearman);
  REQUIRE(summaries.size() == 2);

  const auto& a = summaries[0];
  CHECK(a.system == "sysa");
  CHECK(a.n_pairs == 2);
  CHECK(a.n_empty == 0);
  CHECK(a.mean_hooper == 50.0);
  CHECK(a.mean_rodgers ==
        doctest::Approx(100.0 * 2.0 / 3.0).epsilon(1e-12));
  CHECK(a.gen_rate == 12.5);  // mean of (0+0)/2 and (0+50)/2
  // two pairs cannot support a correlation
  CHECK_FALSE(a.correlation_available);
  CHECK(a.correlation_note.find("InsufficientData") != std::string::npos);
  CHECK(a.correlation.method == metrics::CorrelationMethod::spearman);
  CHECK(a.correlation_alt.method == metrics::CorrelationMethod::pearson);

  const auto& b = summaries[1];
  CHECK(b.system == "sysb");
  CHECK(b.n_pairs == 1);
  CHECK(b.n_empty == 1);
  CHECK(b.mean_hooper == 0.0);
  CHECK(b.gen_rate == 0.0);
}

TEST_CASE("summary means match a long-double oracle") {
  Fixture fx;
  const auto results = harness::evaluate(fx.pairs, fx.docs, fx.preds);
  const auto summaries =
      harness::summarize(results, metrics::CorrelationMethod::spearman);
  std::vector<double> hoopers, gens;
  for (const auto& r : results) {
    if (r.system != "sysa") continue;
    hoopers.push_back(r.cp.hooper);
    gens.push_back((r.absent_rate_a + r.absent_rate_b) / 2.0);
  }
  CHECK(summaries[0].mean_hooper ==
        doctest::Approx(100.0 * static_cast<double>(oracles::mean_ld(hoopers)))
            .epsilon(1e-12));
  CHECK(summaries[0].gen_rate ==
        doctest::Approx(static_cast<double>(oracles::mean_ld(gens)))
            .epsilon(1e-12));
}

TEST_CASE("duplicated predictions change nothing") {
  Fixture fx;
  const auto base = harness::evaluate(fx.pairs, fx.docs, fx.preds);
  corpus::PredictionsLoad doubled = fx.preds;
  for (auto& [key, pred] : doubled.predictions) {
    const auto original = pred.keyphrases;
    pred.keyphrases.insert(pred.keyphrases.end(), original.begin(),
                           original.end());
  }
  const auto again = harness::evaluate(fx.pairs, fx.docs, doubled);
  REQUIRE(again.size() == base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(again[i].cp.hooper == base[i].cp.hooper);
    CHECK(again[i].cp.rodgers == base[i].cp.rodgers);
    CHECK(again[i].absent_rate_a == base[i].absent_rate_a);
    CHECK(again[i].absent_rate_b == base[i].absent_rate_b);
  }
}

TEST_CASE("swapping the sides of every pair changes no summary") {
  Fixture fx;
  auto swapped = fx.pairs;
  for (auto& p : swapped) std::swap(p.doc_a, p.doc_b);

  const auto before = harness::summarize(
      harness::evaluate(fx.pairs, fx.docs, fx.preds),
      metrics::CorrelationMethod::spearman);
  const auto after = harness::summarize(
      harness::evaluate(swapped, fx.docs, fx.preds),
      metrics::CorrelationMethod::spearman);
  REQUIRE(before.size() == after.size());
  for (std::size_t i = 0; i < before.size(); ++i) {
    CHECK(before[i].system == after[i].system);
    CHECK(before[i].mean_hooper == after[i].mean_hooper);
    CHECK(before[i].mean_rodgers == after[i].mean_rodgers);
    CHECK(before[i].gen_rate == after[i].gen_rate);
    CHECK(before[i].n_empty == after[i].n_empty);
    CHECK(before[i].correlation_available == after[i].correlation_available);
  }
  // the CSV rendering is byte-identical too
  CHECK(harness::render_csv(before) == harness::render_csv(after));
}

TEST_CASE("thread count never changes results") {
  Fixture fx;
  harness::EvaluateOptions serial, parallel;
  serial.threads = 1;
  parallel.threads = 4;
  const auto r1 = harness::evaluate(fx.pairs, fx.docs, fx.preds, serial);
  const auto r4 = harness::evaluate(fx.pairs, fx.docs, fx.preds, parallel);
  REQUIRE(r1.size() == r4.size());
  for (std::size_t i = 0; i < r1.size(); ++i) {
    CHECK(r1[i].pair_id == r4[i].pair_id);
    CHECK(r1[i].system == r4[i].system);
    CHECK(r1[i].cp.hooper == r4[i].cp.hooper);
    CHECK(r1[i].rouge1_between_docs == r4[i].rouge1_between_docs);
  }
  CHECK(harness::render_csv(harness::summarize(
            r1, metrics::CorrelationMethod::spearman)) ==
        harness::render_csv(harness::summarize(
            r4, metrics::CorrelationMethod::spearman)));
}

TEST_CASE("both-empty prediction sets count as agreement") {
  corpus::Corpus docs;
  docs.add(make_doc("x", "t u", "v w", {"t"}));
  docs.add(make_doc("y", "t u", "v z", {"t"}));
  corpus::PredictionsLoad preds;
  predict(&preds, "mute", "x", {});
  predict(&preds, "mute", "y", {});
  const auto results =
      harness::evaluate({make_pair("x", "y")}, docs, preds);
  REQUIRE(results.size() == 1);
  CHECK(results[0].cp.hooper == 1.0);
  CHECK(results[0].cp.rodgers == 1.0);
  CHECK(results[0].empty_flags == harness::EmptyFlags::both_empty);
}

TEST_CASE("evaluate error paths") {
  Fixture fx;
  auto ghost = fx.pairs;
  ghost.push_back(make_pair("d1", "nowhere"));
  CHECK_THROWS_AS(harness::evaluate(ghost, fx.docs, fx.preds), Error);

  // a system covering zero pairs is a configuration error
  corpus::PredictionsLoad lonely = fx.preds;
  predict(&lonely, "outsider", "d1", {"b"});  // d2 side missing
  try {
    harness::evaluate(fx.pairs, fx.docs, lonely);
    FAIL("expected no_overlap");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::no_overlap);
    CHECK(std::string(e.what()).find("outsider") != std::string::npos);
  }
}

TEST_CASE("correlation becomes available with enough varied pairs") {
  // synthetic per-pair results: rouge and hooper co-monotone
  std::vector<harness::PairResult> results(4);
  const double rouge[] = {0.2, 0.4, 0.6, 0.8};
  const double hooper[] = {0.1, 0.3, 0.5, 0.9};
  for (int i = 0; i < 4; ++i) {
    results[i].pair_id = "p" + std::to_string(i);
    results[i].system = "mono";
    results[i].cp.hooper = hooper[i];
    results[i].rouge1_between_docs = rouge[i];
  }
  const auto summaries =
      harness::summarize(results, metrics::CorrelationMethod::spearman);
  REQUIRE(summaries.size() == 1);
  REQUIRE(summaries[0].correlation_available);
  CHECK(summaries[0].correlation.coefficient == doctest::Approx(1.0));
  CHECK(summaries[0].correlation.p_value == doctest::Approx(0.0));
  // matches a direct computation over the same series
  const auto direct =
      metrics::pearson({0.2, 0.4, 0.6, 0.8}, {0.1, 0.3, 0.5, 0.9});
  CHECK(summaries[0].correlation_alt.coefficient ==
        doctest::Approx(direct.coefficient).epsilon(1e-12));
  CHECK(summaries[0].correlation_alt.p_value ==
        doctest::Approx(direct.p_value).epsilon(1e-12));

  // constant hooper marks it unavailable instead of throwing
  for (auto& r : results) r.cp.hooper = 0.5;
  const auto flat =
      harness::summarize(results, metrics::CorrelationMethod::spearman);
  CHECK_FALSE(flat[0].correlation_available);
  CHECK(flat[0].correlation_note.find("ConstantSeries") != std::string::npos);
}

// --- tf-idf baseline --------------------------------------------------------

TEST_CASE("tfidf ranks the recurring rare phrase first") {
  corpus::Corpus docs;
  docs.add(make_doc("x", "",
                    "quantum entanglement quantum entanglement studies", {}));
  docs.add(make_doc("y", "", "generic studies of text", {}));
  docs.add(make_doc("z", "", "more generic text", {}));

  const auto pred = harness::tfidf_extract(docs.at("x"), docs);
  CHECK(pred.doc_id == "x");
  CHECK(pred.system == harness::kBaselineSystemName);
  // hand-ranked: score ties resolve by position, then stems
  const std::vector<std::string> expected = {
      "quantum", "quantum entanglement", "quantum entanglement quantum",
      "entanglement", "entanglement quantum"};
  CHECK(pred.keyphrases == expected);
}

TEST_CASE("tfidf candidates never cross the title seam") {
  corpus::Corpus docs;
  docs.add(make_doc("x", "neural keyphrase", "generation models", {}));
  docs.add(make_doc("y", "", "filler words entirely", {}));
  harness::BaselineConfig config;
  config.top_k = 50;
  const auto pred = harness::tfidf_extract(docs.at("x"), docs, config);
  for (const auto& keyphrase : pred.keyphrases) {
    CHECK(keyphrase.find("keyphrase generation") == std::string::npos);
  }
  // the within-section bigrams are still there
  CHECK(std::find(pred.keyphrases.begin(), pred.keyphrases.end(),
                  "neural keyphrase") != pred.keyphrases.end());
  CHECK(std::find(pred.keyphrases.begin(), pred.keyphrases.end(),
                  "generation models") != pred.keyphrases.end());
}

TEST_CASE("stopwords cannot start or end a keyphrase") {
  corpus::Corpus docs;
  docs.add(make_doc("x", "", "the quantum theory of computation", {}));
  docs.add(make_doc("y", "", "unrelated filler material", {}));
  docs.add(make_doc("z", "", "other padding words", {}));
  harness::BaselineConfig config;
  config.top_k = 100;
  const auto pred = harness::tfidf_extract(docs.at("x"), docs, config);
  REQUIRE(!pred.keyphrases.empty());
  for (const auto& keyphrase : pred.keyphrases) {
    CHECK(keyphrase.rfind("the ", 0) != 0);
    CHECK(keyphrase != "the");
    CHECK(keyphrase.find(" of") != keyphrase.size() - 3);
  }
  // interior stopwords are allowed
  CHECK(std::find(pred.keyphrases.begin(), pred.keyphrases.end(),
                  "theory of computation") != pred.keyphrases.end());

  // with stopwords disabled the boundary phrases reappear
  config.stopwords = "none";
  const auto open = harness::tfidf_extract(docs.at("x"), docs, config);
  CHECK(std::find(open.keyphrases.begin(), open.keyphrases.end(),
                  "the quantum") != open.keyphrases.end());
}

TEST_CASE("tfidf respects top_k and max_ngram") {
  corpus::Corpus docs;
  docs.add(make_doc("x", "", "alpha beta gamma delta epsilon zeta", {}));
  docs.add(make_doc("y", "", "unrelated words", {}));
  harness::BaselineConfig config;
  config.top_k = 3;
  config.max_ngram = 1;
  const auto pred = harness::tfidf_extract(docs.at("x"), docs, config);
  CHECK(pred.keyphrases.size() == 3);
  for (const auto& keyphrase : pred.keyphrases) {
    CHECK(keyphrase.find(' ') == std::string::npos);
  }
}

TEST_CASE("tfidf degenerate documents") {
  corpus::Corpus docs;
  docs.add(make_doc("stop", "", "the of and with", {}));
  docs.add(make_doc("real", "", "actual content here", {}));
  // all-stopword document: empty prediction set, not an error
  const auto pred = harness::tfidf_extract(docs.at("stop"), docs);
  CHECK(pred.keyphrases.empty());
  // no tokens at all: error
  const auto blank = make_doc("blank", "", "...!!!", {});
  CHECK_THROWS_AS(harness::tfidf_extract(blank, docs), Error);

  harness::BaselineConfig bad;
  bad.top_k = 0;
  CHECK_THROWS_AS(harness::tfidf_extract(docs.at("real"), docs, bad),
                  std::invalid_argument);
  bad.top_k = 5;
  bad.max_ngram = 0;
  CHECK_THROWS_AS(harness::tfidf_extract(docs.at("real"), docs, bad),
                  std::invalid_argument);
  bad.max_ngram = 3;
  bad.stopwords = "german";
  CHECK_THROWS_AS(harness::tfidf_extract(docs.at("real"), docs, bad),
                  std::invalid_argument);

  CHECK_THROWS_AS(harness::document_frequencies(corpus::Corpus{}), Error);
}

TEST_CASE("every tfidf keyphrase occurs contiguously in its document") {
  oracles::Rng rng(0x7f1d);
  for (int trial = 0; trial < 30; ++trial) {
    corpus::Corpus docs;
    const std::size_t n_docs = 2 + rng.below(4);
    for (std::size_t d = 0; d < n_docs; ++d) {
      std::string title, body;
      for (std::size_t w = 0; w < rng.below(4); ++w) {
        if (!title.empty()) title += ' ';
        title += oracles::random_word(rng);
      }
      for (std::size_t w = 0; w < 1 + rng.below(12); ++w) {
        if (!body.empty()) body += ' ';
        body += oracles::random_word(rng);
      }
      docs.add(make_doc("d" + std::to_string(d), title, body, {}));
    }
    for (const auto& doc : docs.documents()) {
      const auto pred = harness::tfidf_extract(doc, docs);
      const auto stems = prmu::classification_stems(doc.title, doc.body);
      for (const auto& keyphrase : pred.keyphrases) {
        CHECK(prmu::classify(textkit::normalize_phrase(keyphrase), stems) ==
              prmu::PrmuClass::present);
      }
    }
  }
}

TEST_CASE("tfidf matches a brute-force enumeration") {
  // independent reimplementation: enumerate every window, score, rank
  auto brute = [](const corpus::Document& doc, const corpus::Corpus& all,
                  std::size_t top_k, std::size_t max_ngram) {
    std::map<std::string, std::size_t> df;
    for (const auto& d : all.documents()) {
      std::map<std::string, bool> seen;
      for (const auto& tok : textkit::tokenize(d.full_text())) {
        if (!seen[tok.stem]) {
          seen[tok.stem] = true;
          ++df[tok.stem];
        }
      }
    }
    std::map<std::string, double> tf;
    const auto title = textkit::tokenize(doc.title);
    const auto body = textkit::tokenize(doc.body);
    for (const auto* sec : {&title, &body}) {
      for (const auto& tok : *sec) tf[tok.stem] += 1.0;
    }
    struct Row {
      double score;
      std::size_t pos;
      std::string key, surface;
    };
    std::map<std::string, Row> rows;
    std::size_t base = 0;
    for (const auto* sec : {&title, &body}) {
      for (std::size_t i = 0; i < sec->size(); ++i) {
        for (std::size_t len = 1; len <= max_ngram && i + len <= sec->size();
             ++len) {
          double sum = 0.0;
          std::string key, surface;
          for (std::size_t k = 0; k < len; ++k) {
            const auto& tok = (*sec)[i + k];
            sum += tf.at(tok.stem) *
                   std::log(static_cast<double>(all.size()) /
                            (1.0 + static_cast<double>(df.at(tok.stem))));
            key += tok.stem + '\x1f';
            if (k) surface += ' ';
            surface += tok.surface;
          }
          if (!rows.count(key)) {
            rows.emplace(key, Row{sum / static_cast<double>(len), base + i,
                                  key, surface});
          }
        }
      }
      base += sec->size();
    }
    std::vector<const Row*> ranked;
    for (const auto& [key, row] : rows) ranked.push_back(&row);
    std::sort(ranked.begin(), ranked.end(), [](const Row* x, const Row* y) {
      if (x->score != y->score) return x->score > y->score;
      if (x->pos != y->pos) return x->pos < y->pos;
      return x->key < y->key;
    });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < ranked.size() && i < top_k; ++i) {
      out.push_back(ranked[i]->surface);
    }
    return out;
  };

  oracles::Rng rng(0x0c1e);
  harness::BaselineConfig config;
  config.stopwords = "none";  // the oracle carries no stopword list
  for (int trial = 0; trial < 40; ++trial) {
    corpus::Corpus docs;
    const std::size_t n_docs = 2 + rng.below(5);
    for (std::size_t d = 0; d < n_docs; ++d) {
      std::string title, body;
      for (std::size_t w = 0; w < rng.below(3); ++w) {
        if (!title.empty()) title += ' ';
        title += oracles::random_word(rng);
      }
      for (std::size_t w = 0; w < 1 + rng.below(10); ++w) {
        if (!body.empty()) body += ' ';
        body += oracles::random_word(rng);
      }
      docs.add(make_doc("d" + std::to_string(d), title, body, {}));
    }
    config.top_k = 1 + rng.below(8);
    config.max_ngram = 1 + rng.below(3);
    const auto freqs = harness::document_frequencies(docs);
    for (const auto& doc : docs.documents()) {
      const auto got = harness::tfidf_extract(doc, freqs, config);
      const auto want = brute(doc, docs, config.top_k, config.max_ngram);
      CHECK(got.keyphrases == want);
    }
  }
}

// --- dataset statistics -----------------------------------------------------

TEST_CASE("dataset stats group by label") {
  corpus::Corpus docs;
  auto d1 = make_doc("i1", "alpha beta", "gamma", {"alpha beta"});
  d1.meta["dataset"] = "inspec";
  auto d2 = make_doc("i2", "alpha beta", "delta", {"alpha beta", "delta"});
  d2.meta["dataset"] = "inspec";
  auto d3 = make_doc("k1", "epsilon", "zeta", {"epsilon"});
  d3.meta["dataset"] = "kp20k";
  d3.meta["version"] = "v2";
  auto d4 = make_doc("u1", "eta", "theta", {});
  docs.add(d1);
  docs.add(d2);
  docs.add(d3);
  docs.add(d4);

  const auto stats = harness::dataset_stats(docs);
  REQUIRE(stats.size() == 3);  // sorted labels
  CHECK(stats[0].dataset == "inspec");
  CHECK(stats[0].documents == 2);
  CHECK(stats[0].pairs == 0);
  CHECK(stats[0].prmu.n == 3);
  CHECK(stats[0].prmu.p_pct == 100.0);  // every reference is verbatim
  CHECK(stats[0].mean_references == 1.5);
  CHECK(stats[0].mean_keyphrase_length ==
        doctest::Approx(5.0 / 3.0).epsilon(1e-12));
  CHECK(stats[1].dataset == "kp20k (v2)");
  CHECK(stats[2].dataset == "unlabeled");
  CHECK(stats[2].prmu.n == 0);  // no references at all

  CHECK_THROWS_AS(harness::dataset_stats(corpus::Corpus{}), Error);
}

TEST_CASE("pair-restricted stats count pairs under doc_a's label") {
  corpus::Corpus docs;
  auto d1 = make_doc("i1", "alpha", "beta", {"alpha"});
  d1.meta["dataset"] = "inspec";
  auto d2 = make_doc("k1", "gamma", "delta", {"gamma"});
  d2.meta["dataset"] = "kp20k";
  auto d3 = make_doc("i2", "alpha", "epsilon", {"alpha"});
  d3.meta["dataset"] = "inspec";
  docs.add(d1);
  docs.add(d2);
  docs.add(d3);

  const auto stats =
      harness::dataset_stats(docs, {make_pair("i1", "k1")});
  REQUIRE(stats.size() == 2);
  CHECK(stats[0].dataset == "inspec");
  CHECK(stats[0].documents == 1);  // only i1 appears in a pair
  CHECK(stats[0].pairs == 1);
  CHECK(stats[1].dataset == "kp20k");
  CHECK(stats[1].pairs == 0);

  CHECK_THROWS_AS(harness::dataset_stats(docs, {}), Error);
  CHECK_THROWS_AS(harness::dataset_stats(docs, {make_pair("i1", "ghost")}),
                  Error);
}

// --- reports ----------------------------------------------------------------

TEST_CASE("markdown report golden rendering") {
  TempDir tmp;
  std::ofstream(tmp.root / "corpus.jsonl") << "hello\n";

  harness::SystemSummary s;
  s.system = "tfidf";
  s.mean_hooper = 33.5;
  s.mean_rodgers = 42.5;
  s.gen_rate = 0.0;
  s.correlation_available = true;
  s.correlation.method = metrics::CorrelationMethod::spearman;
  s.correlation.coefficient = 0.25;
  s.correlation.p_value = 0.03;
  s.correlation_alt.method = metrics::CorrelationMethod::pearson;
  s.correlation_alt.coefficient = -0.5;
  s.correlation_alt.p_value = 0.666;
  s.n_pairs = 3;
  s.n_empty = 0;
  s.n_skipped = 1;

  harness::DatasetStats st;
  st.dataset = "demo";
  st.documents = 4;
  st.pairs = 2;
  st.prmu = {100.0, 0.0, 0.0, 0.0, 6};
  st.mean_references = 1.5;
  st.mean_keyphrase_length = 2.0;

  harness::ReportConfig config;
  const auto markdown = harness::render_markdown(
      {s}, {st}, config, {{"corpus", (tmp.root / "corpus.jsonl").string()}});

  const std::string expected =
      "# Keyphrase prediction homogeneity report\n"
      "\n"
      "- toolkit version: 0.1.0\n"
      "- set formula: jaccard\n"
      "- correlation method: spearman\n"
      "\n"
      "## Inputs\n"
      "\n"
      "| file | fnv1a-64 |\n"
      "| --- | --- |\n"
      "| corpus | `a9bc80cca21f28b3` |\n"
      "\n"
      "## Systems\n"
      "\n"
      "| system | CP Hooper | CP Rodgers | % Gen. | Cor. ROUGE (spearman) | "
      "pairs | empty | skipped |\n"
      "| --- | --- | --- | --- | --- | --- | --- | --- |\n"
      "| tfidf | 33.5 | 42.5 | 0.0 | 0.25* | 3 | 0 | 1 |\n"
      "\n"
      "`*` marks p < 0.05.\n"
      "\n"
      "## Dataset statistics\n"
      "\n"
      "| dataset | documents | pairs | % P | % R | % M | % U | refs/doc | "
      "words/keyphrase |\n"
      "| --- | --- | --- | --- | --- | --- | --- | --- | --- |\n"
      "| demo | 4 | 2 | 100.0 | 0.0 | 0.0 | 0.0 | 1.5 | 2.0 |\n";
  CHECK(markdown == expected);

  // unavailable correlations render as n/a
  s.correlation_available = false;
  const auto na = harness::render_markdown({s}, {}, config, {});
  CHECK(na.find("| 0.0 | n/a | 3 |") != std::string::npos);
  const auto nobody = harness::render_markdown({}, {}, config, {});
  CHECK(nobody.find("no systems evaluated") != std::string::npos);
}

TEST_CASE("csv rows reload to the exact doubles") {
  std::vector<harness::PairResult> results(5);
  const double rouge[] = {0.21, 0.47, 0.55, 0.62, 0.88};
  for (int i = 0; i < 5; ++i) {
    results[i].pair_id = "p" + std::to_string(i);
    results[i].system = "sys, \"quoted\"";  // exercises CSV escaping
    results[i].cp.hooper = 1.0 / (i + 3.0);
    results[i].cp.rodgers = 1.0 / (i + 7.0);
    results[i].rouge1_between_docs = rouge[i];
    results[i].absent_rate_a = 100.0 / (i + 2.0);
  }
  const auto summaries =
      harness::summarize(results, metrics::CorrelationMethod::spearman);
  REQUIRE(summaries.size() == 1);
  REQUIRE(summaries[0].correlation_available);

  const auto csv = harness::render_csv(summaries);
  std::istringstream in(csv);
  std::string header, row;
  REQUIRE(std::getline(in, header));
  CHECK(header ==
        "system,n_pairs,n_empty,n_skipped,mean_hooper_pct,mean_rodgers_pct,"
        "gen_rate_pct,spearman_r,spearman_p,pearson_r,pearson_p,significant");
  REQUIRE(std::getline(in, row));
  CHECK(row.rfind("\"sys, \"\"quoted\"\"\",5,0,0,", 0) == 0);

  // the numeric cells parse back to bit-identical doubles
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream fields(row.substr(row.find("\",") + 2));
  while (std::getline(fields, cell, ',')) cells.push_back(cell);
  REQUIRE(cells.size() == 11);
  CHECK(std::strtod(cells[3].c_str(), nullptr) == summaries[0].mean_hooper);
  CHECK(std::strtod(cells[4].c_str(), nullptr) == summaries[0].mean_rodgers);
  CHECK(std::strtod(cells[5].c_str(), nullptr) == summaries[0].gen_rate);
  CHECK(std::strtod(cells[6].c_str(), nullptr) ==
        summaries[0].correlation.coefficient);
  CHECK(std::strtod(cells[7].c_str(), nullptr) ==
        summaries[0].correlation.p_value);
  CHECK(std::strtod(cells[8].c_str(), nullptr) ==
        summaries[0].correlation_alt.coefficient);

  // unavailable correlations leave the cells empty
  harness::SystemSummary bare;
  bare.system = "bare";
  bare.n_pairs = 1;
  const auto sparse = harness::render_csv({bare});
  CHECK(sparse.find(",,,,") != std::string::npos);
}

TEST_CASE("emit_report writes both renderings") {
  TempDir tmp;
  harness::SystemSummary s;
  s.system = "sys";
  s.n_pairs = 1;
  harness::ReportConfig config;
  config.markdown_path = (tmp.root / "report.md").string();
  config.csv_path = (tmp.root / "report.csv").string();
  harness::emit_report({s}, {}, config, {});

  std::ifstream md(config.markdown_path);
  std::string first_md;
  REQUIRE(std::getline(md, first_md));
  CHECK(first_md == "# Keyphrase prediction homogeneity report");
  std::ifstream csv(config.csv_path);
  std::string provenance, header;
  REQUIRE(std::getline(csv, provenance));
  CHECK(provenance ==
        "# toolkit_version=0.1.0 formula=jaccard correlation=spearman");
  REQUIRE(std::getline(csv, header));
  CHECK(header.rfind("system,", 0) == 0);

  config.markdown_path = (tmp.root / "no-such-dir" / "report.md").string();
  CHECK_THROWS_AS(harness::emit_report({s}, {}, config, {}), Error);
}

}  // TEST_SUITE
