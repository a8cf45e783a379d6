// Command-line front end: pair building, reformulation, QC filtering,
// evaluation, the TF-IDF baseline, dataset statistics and the
// extraction upper bound, over JSONL corpora.
#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "kphom/corpus.hpp"
#include "kphom/error.hpp"
#include "kphom/harness.hpp"
#include "kphom/metrics.hpp"
#include "kphom/pairing.hpp"
#include "kphom/prmu.hpp"
#include "kphom/reformulation.hpp"

namespace {

using namespace kphom;

std::string underscored(std::string name) {
  std::replace(name.begin(), name.end(), '-', '_');
  return name;
}

// ---------------------------------------------------------------------------

struct PairArgs {
  std::string corpus;
  std::string out;
  std::string metric = "jaccard";
  double threshold = 0.5;
};

void run_pair(const PairArgs& args) {
  corpus::LoadSummary load;
  const corpus::Corpus docs = corpus::load_corpus(args.corpus, &load);
  pairing::PairingConfig config;
  config.metric = pairing::similarity_metric_from_string(underscored(args.metric));
  config.threshold = args.threshold;
  pairing::PairingSummary summary;
  const auto pairs = pairing::build_pairs(docs, config, &summary);
  corpus::save_pairs(pairs, args.out);

  std::unordered_set<std::string> unique;
  for (const auto& p : pairs) {
    unique.insert(p.doc_a);
    unique.insert(p.doc_b);
  }
  if (summary.docs_without_references > 0) {
    std::cerr << "warning: skipped " << summary.docs_without_references
              << " documents without reference keyphrases\n";
  }
  std::cout << "pairs: " << pairs.size() << " over " << unique.size()
            << " unique documents (corpus " << docs.size() << ", metric "
            << pairing::to_string(config.metric) << ", threshold "
            << config.threshold << ")\n";
  std::cout << "wrote " << args.out << "\n";
}

// ---------------------------------------------------------------------------

struct ReformulateArgs {
  std::string corpus;
  std::string out;
  std::string method = "paraphrase";
  reformulation::ClientConfig client;
  double requests_per_second = 1.0;
  unsigned concurrency = 1;
  std::size_t limit = 0;  // 0 = whole corpus
};

void run_reformulate(const ReformulateArgs& args) {
  const corpus::Corpus docs = corpus::load_corpus(args.corpus);
  const auto method = reformulation::method_from_string(args.method);
  const std::size_t count = args.limit == 0
                                ? docs.size()
                                : std::min(args.limit, docs.size());

  std::vector<std::optional<reformulation::ReformulationRecord>> slots(count);
  std::vector<std::string> failures(count);
  reformulation::TokenBucket bucket(args.requests_per_second,
                                    std::max(1.0, static_cast<double>(
                                                      args.concurrency)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      bucket.take();
      const corpus::Document& doc = docs.documents()[i];
      try {
        slots[i] = reformulation::generate(doc, method, args.client);
      } catch (const Error& e) {
        failures[i] = std::string(to_string(e.kind())) + ": " + e.what();
      }
    }
  };
  const unsigned workers =
      std::max(1u, std::min<unsigned>(args.concurrency,
                                      static_cast<unsigned>(count)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<reformulation::ReformulationRecord> records;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (slots[i]) {
      records.push_back(std::move(*slots[i]));
    } else {
      ++failed;
      std::cerr << "warning: " << docs.documents()[i].id << ": "
                << failures[i] << "\n";
    }
  }
  if (records.empty() && failed > 0) {
    throw Error(ErrorKind::transport_error,
                "every generation attempt failed (" + std::to_string(failed) +
                    " documents)");
  }
  reformulation::save_records(records, args.out);
  std::cout << "generated " << records.size() << " reformulations ("
            << reformulation::to_string(method) << "), " << failed
            << " failures\n";
  std::cout << "wrote " << args.out << "\n";
}

// ---------------------------------------------------------------------------

struct FilterArgs {
  std::string corpus;
  std::string records;
  std::string out;
  std::string report;
  std::string docs_out;
  double window = 0.10;
};

void run_filter(const FilterArgs& args) {
  const corpus::Corpus docs = corpus::load_corpus(args.corpus);
  const auto records = reformulation::load_records(args.records);
  const auto outcome = reformulation::filter_pipeline(records, docs,
                                                      args.window);
  corpus::save_pairs(outcome.pairs, args.out);
  if (!args.report.empty()) {
    reformulation::save_reports(outcome.reports, args.report);
  }
  if (!args.docs_out.empty()) {
    corpus::Corpus accepted;
    for (const auto& doc : outcome.accepted_documents) accepted.add(doc);
    corpus::save_corpus(accepted, args.docs_out);
  }
  std::size_t para = 0, back = 0;
  for (const auto& pair : outcome.pairs) {
    if (pair.provenance == corpus::PairProvenance::reformulation_paraphrase) {
      ++para;
    } else {
      ++back;
    }
  }
  std::cout << "accepted " << outcome.pairs.size() << " of " << records.size()
            << " records (" << back << " backtranslation, " << para
            << " paraphrase)\n";
  std::cout << "wrote " << args.out << "\n";
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::string corpus;
  std::string pairs;
  std::string predictions;
  std::string out;
  std::string csv;
  std::string formula = "jaccard";
  std::string correlation = "spearman";
  unsigned threads = 1;
};

void run_evaluate(const EvaluateArgs& args) {
  const corpus::Corpus docs = corpus::load_corpus(args.corpus);
  const auto pairs = corpus::load_pairs(args.pairs, &docs);
  const auto predictions = corpus::load_predictions(args.predictions, &docs);
  if (predictions.unknown_doc_warnings > 0) {
    std::cerr << "warning: " << predictions.unknown_doc_warnings
              << " predictions reference documents outside the corpus\n";
  }

  harness::EvaluateOptions options;
  options.formula = metrics::set_formula_from_string(args.formula);
  options.threads = args.threads;
  const auto results = harness::evaluate(pairs, docs, predictions, options);
  auto summaries = harness::summarize(
      results, metrics::correlation_method_from_string(args.correlation));
  for (auto& summary : summaries) {
    summary.n_skipped = pairs.size() - summary.n_pairs;
  }
  const auto stats = harness::dataset_stats(docs, pairs);

  harness::ReportConfig config;
  config.formula = options.formula;
  config.correlation =
      metrics::correlation_method_from_string(args.correlation);
  config.markdown_path = args.out;
  config.csv_path = args.csv;
  const harness::ReportInputs inputs = {
      {"corpus", args.corpus},
      {"pairs", args.pairs},
      {"predictions", args.predictions},
  };
  std::cout << harness::render_markdown(summaries, stats, config, inputs);
  harness::emit_report(summaries, stats, config, inputs);
  if (!args.out.empty()) std::cout << "\nwrote " << args.out << "\n";
  if (!args.csv.empty()) std::cout << "wrote " << args.csv << "\n";
}

// ---------------------------------------------------------------------------

struct BaselineArgs {
  std::string corpus;
  std::string out;
  std::size_t top_k = 5;
  std::size_t max_ngram = 3;
  std::string stopwords = "english";
};

void run_baseline(const BaselineArgs& args) {
  const corpus::Corpus docs = corpus::load_corpus(args.corpus);
  harness::BaselineConfig config;
  config.top_k = args.top_k;
  config.max_ngram = args.max_ngram;
  config.stopwords = args.stopwords;
  const auto frequencies = harness::document_frequencies(docs);

  std::vector<corpus::PredictionSet> predictions;
  std::size_t skipped = 0;
  for (const auto& doc : docs.documents()) {
    try {
      predictions.push_back(harness::tfidf_extract(doc, frequencies, config));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::empty_document) throw;
      ++skipped;
      std::cerr << "warning: " << doc.id << ": " << e.what() << "\n";
    }
  }
  corpus::save_predictions(predictions, args.out);
  std::cout << "predicted for " << predictions.size() << " documents";
  if (skipped > 0) std::cout << " (" << skipped << " without tokens skipped)";
  std::cout << "\nwrote " << args.out << "\n";
}

// ---------------------------------------------------------------------------

struct StatsArgs {
  std::string corpus;
  std::string pairs;
  std::string out;
};

void run_stats(const StatsArgs& args) {
  const corpus::Corpus docs = corpus::load_corpus(args.corpus);
  std::vector<harness::DatasetStats> stats;
  harness::ReportInputs inputs = {{"corpus", args.corpus}};
  if (args.pairs.empty()) {
    stats = harness::dataset_stats(docs);
  } else {
    const auto pairs = corpus::load_pairs(args.pairs, &docs);
    stats = harness::dataset_stats(docs, pairs);
    inputs.emplace_back("pairs", args.pairs);
  }
  const std::string rendered =
      harness::render_markdown({}, stats, harness::ReportConfig{}, inputs);
  if (args.out.empty()) {
    std::cout << rendered;
  } else {
    harness::ReportConfig config;
    config.markdown_path = args.out;
    harness::emit_report({}, stats, config, inputs);
    std::cout << "wrote " << args.out << "\n";
  }
}

// ---------------------------------------------------------------------------

struct UpperBoundArgs {
  std::string corpus;
  std::string pairs;
  std::string formula = "jaccard";
  std::string per_pair;
};

void run_upper_bound(const UpperBoundArgs& args) {
  const corpus::Corpus docs = corpus::load_corpus(args.corpus);
  const auto pairs = corpus::load_pairs(args.pairs, &docs);
  if (pairs.empty()) {
    throw Error(ErrorKind::empty_corpus, "no pairs to bound");
  }
  const auto formula = metrics::set_formula_from_string(args.formula);

  double hooper = 0.0, rodgers = 0.0;
  std::string per_pair_csv = "pair_id,hooper,rodgers\n";
  for (const auto& pair : pairs) {
    const auto bound = pairing::extraction_upper_bound(pair, docs, formula);
    hooper += bound.hooper;
    rodgers += bound.rodgers;
    if (!args.per_pair.empty()) {
      char row[64];
      std::snprintf(row, sizeof(row), ",%.17g,%.17g\n", bound.hooper,
                    bound.rodgers);
      per_pair_csv += pair.pair_id + row;
    }
  }
  const double n = static_cast<double>(pairs.size());
  std::printf(
      "extraction upper bound (%s) over %zu pairs: hooper %.4f, rodgers %.4f\n",
      metrics::to_string(formula), pairs.size(), hooper / n, rodgers / n);
  if (!args.per_pair.empty()) {
    std::ofstream out(args.per_pair, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorKind::io_error,
                  "cannot write per-pair file: " + args.per_pair);
    }
    out << per_pair_csv;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"keyphrase prediction homogeneity toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from an INI file");

  PairArgs pair_args;
  auto* pair_cmd = app.add_subcommand(
      "pair", "build document pairs from shared reference keyphrases");
  pair_cmd->add_option("--corpus", pair_args.corpus, "corpus JSONL file")
      ->required();
  pair_cmd->add_option("--metric", pair_args.metric, "similarity metric")
      ->check(CLI::IsMember({"jaccard", "houbre-max"}))
      ->capture_default_str();
  pair_cmd
      ->add_option("--threshold", pair_args.threshold,
                   "minimum reference similarity, in (0,1]")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  pair_cmd->add_option("--out", pair_args.out, "pairs output file")->required();

  ReformulateArgs ref_args;
  auto* ref_cmd = app.add_subcommand(
      "reformulate", "generate document reformulations via a chat endpoint "
                     "(API key from KPHOM_API_KEY or OPENAI_API_KEY)");
  ref_cmd->add_option("--corpus", ref_args.corpus, "corpus JSONL file")
      ->required();
  ref_cmd->add_option("--method", ref_args.method, "reformulation method")
      ->check(CLI::IsMember({"paraphrase", "backtranslation"}))
      ->capture_default_str();
  ref_cmd->add_option("--endpoint", ref_args.client.endpoint,
                      "chat-completions base URL")
      ->capture_default_str();
  ref_cmd->add_option("--model", ref_args.client.model, "model name")
      ->capture_default_str();
  ref_cmd->add_option("--pivot", ref_args.client.pivot_language,
                      "pivot language for backtranslation")
      ->capture_default_str();
  ref_cmd->add_option("--cache", ref_args.client.cache_dir,
                      "response cache directory");
  ref_cmd->add_option("--prompts", ref_args.client.prompt_dir,
                      "prompt template override directory");
  ref_cmd
      ->add_option("--max-attempts", ref_args.client.max_attempts,
                   "attempts per request")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ref_cmd
      ->add_option("--timeout", ref_args.client.timeout_seconds,
                   "per-request timeout, seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ref_cmd
      ->add_option("--rps", ref_args.requests_per_second,
                   "request rate limit per second")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ref_cmd
      ->add_option("--concurrency", ref_args.concurrency,
                   "parallel in-flight requests")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ref_cmd->add_option("--limit", ref_args.limit,
                      "process only the first N documents (0 = all)");
  ref_cmd->add_option("--out", ref_args.out, "records output file")->required();

  FilterArgs filter_args;
  auto* filter_cmd = app.add_subcommand(
      "filter", "apply quality-control filters to reformulation records");
  filter_cmd->add_option("--corpus", filter_args.corpus, "corpus JSONL file")
      ->required();
  filter_cmd->add_option("--records", filter_args.records,
                         "reformulation records file")
      ->required();
  filter_cmd->add_option("--out", filter_args.out, "accepted pairs output")
      ->required();
  filter_cmd->add_option("--report", filter_args.report,
                         "per-record QC report output");
  filter_cmd->add_option("--docs-out", filter_args.docs_out,
                         "accepted reformulated documents (corpus JSONL)");
  filter_cmd
      ->add_option("--window", filter_args.window,
                   "allowed word-count deviation")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();

  EvaluateArgs eval_args;
  auto* eval_cmd = app.add_subcommand(
      "evaluate", "score per-system predictions over document pairs");
  eval_cmd->add_option("--corpus", eval_args.corpus, "corpus JSONL file")
      ->required();
  eval_cmd->add_option("--pairs", eval_args.pairs, "pairs file")->required();
  eval_cmd->add_option("--predictions", eval_args.predictions,
                       "predictions JSONL file")
      ->required();
  eval_cmd->add_option("--formula", eval_args.formula, "set-overlap formula")
      ->check(CLI::IsMember({"jaccard", "dice"}))
      ->capture_default_str();
  eval_cmd
      ->add_option("--correlation", eval_args.correlation,
                   "correlation method for the report")
      ->check(CLI::IsMember({"spearman", "pearson"}))
      ->capture_default_str();
  eval_cmd->add_option("--threads", eval_args.threads, "worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  eval_cmd->add_option("--out", eval_args.out, "markdown report path");
  eval_cmd->add_option("--csv", eval_args.csv, "CSV report path");

  BaselineArgs base_args;
  auto* base_cmd = app.add_subcommand(
      "baseline-tfidf", "extract keyphrases with the TF-IDF baseline");
  base_cmd->add_option("--corpus", base_args.corpus, "corpus JSONL file")
      ->required();
  base_cmd->add_option("--top-k", base_args.top_k, "predictions per document")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  base_cmd
      ->add_option("--max-ngram", base_args.max_ngram,
                   "longest candidate in words")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  base_cmd->add_option("--stopwords", base_args.stopwords, "stopword list")
      ->check(CLI::IsMember({"english", "none"}))
      ->capture_default_str();
  base_cmd->add_option("--out", base_args.out, "predictions output file")
      ->required();

  StatsArgs stats_args;
  auto* stats_cmd =
      app.add_subcommand("stats", "dataset statistics (PRMU distribution)");
  stats_cmd->add_option("--corpus", stats_args.corpus, "corpus JSONL file")
      ->required();
  stats_cmd->add_option("--pairs", stats_args.pairs,
                        "restrict to documents in these pairs");
  stats_cmd->add_option("--out", stats_args.out, "markdown output path");

  UpperBoundArgs ub_args;
  auto* ub_cmd = app.add_subcommand(
      "upper-bound", "extraction upper bound over a pairs file");
  ub_cmd->add_option("--corpus", ub_args.corpus, "corpus JSONL file")
      ->required();
  ub_cmd->add_option("--pairs", ub_args.pairs, "pairs file")->required();
  ub_cmd->add_option("--formula", ub_args.formula, "set-overlap formula")
      ->check(CLI::IsMember({"jaccard", "dice"}))
      ->capture_default_str();
  ub_cmd->add_option("--per-pair", ub_args.per_pair,
                     "write per-pair bounds CSV here");

  try {
    app.parse(argc, argv);
    if (pair_cmd->parsed()) run_pair(pair_args);
    if (ref_cmd->parsed()) run_reformulate(ref_args);
    if (filter_cmd->parsed()) run_filter(filter_args);
    if (eval_cmd->parsed()) run_evaluate(eval_args);
    if (base_cmd->parsed()) run_baseline(base_args);
    if (stats_cmd->parsed()) run_stats(stats_args);
    if (ub_cmd->parsed()) run_upper_bound(ub_args);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  } catch (const kphom::Error& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
