#include "kphom/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "kphom/error.hpp"
#include "kphom/textkit.hpp"

namespace kphom {
namespace harness {

const char* to_string(EmptyFlags flags) {
  switch (flags) {
    case EmptyFlags::none: return "none";
    case EmptyFlags::one_empty: return "one_empty";
    case EmptyFlags::both_empty: return "both_empty";
  }
  return "unknown";
}

namespace {

// Index-addressed task runner: workers claim indices through an atomic
// counter and write to preallocated slots, so results are identical for
// any thread count.
void run_parallel(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      if (failed.load(std::memory_order_relaxed)) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };
  const unsigned k =
      static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::vector<std::thread> pool;
  pool.reserve(k);
  for (unsigned t = 0; t < k; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

// ---------------------------------------------------------------------------
// Evaluation

std::vector<PairResult> evaluate(const std::vector<corpus::DocumentPair>& pairs,
                                 const corpus::Corpus& docs,
                                 const corpus::PredictionsLoad& predictions,
                                 const EvaluateOptions& options) {
  // Slot-index every document appearing in a pair.
  std::unordered_map<std::string, std::size_t> slot_of;
  std::vector<const corpus::Document*> involved;
  for (const auto& pair : pairs) {
    for (const std::string* id : {&pair.doc_a, &pair.doc_b}) {
      const corpus::Document* doc = docs.find(*id);
      if (!doc) {
        throw Error(ErrorKind::unresolved_doc_id,
                    "pair '" + pair.pair_id + "' references unknown document '" +
                        *id + "'");
      }
      if (!slot_of.count(*id)) {
        slot_of.emplace(*id, involved.size());
        involved.push_back(doc);
      }
    }
  }

  std::vector<std::vector<std::string>> doc_stems(involved.size());
  run_parallel(involved.size(), options.threads, [&](std::size_t i) {
    doc_stems[i] =
        prmu::classification_stems(involved[i]->title, involved[i]->body);
  });

  // ROUGE-1 between the two texts, symmetrized so swapping the sides of
  // every pair cannot change any downstream number.
  std::vector<double> pair_rouge(pairs.size());
  run_parallel(pairs.size(), options.threads, [&](std::size_t i) {
    const std::string ta = docs.at(pairs[i].doc_a).full_text();
    const std::string tb = docs.at(pairs[i].doc_b).full_text();
    pair_rouge[i] = (metrics::rouge1_recall(ta, tb) +
                     metrics::rouge1_recall(tb, ta)) /
                    2.0;
  });

  // Normalized prediction sets per (system, involved document).
  const auto& systems = predictions.systems;
  std::vector<std::vector<std::optional<metrics::KeyphraseSet>>> sets(
      systems.size());
  for (std::size_t s = 0; s < systems.size(); ++s) {
    sets[s].resize(involved.size());
    for (std::size_t d = 0; d < involved.size(); ++d) {
      auto it = predictions.predictions.find({systems[s], involved[d]->id});
      if (it != predictions.predictions.end()) {
        sets[s][d] = metrics::KeyphraseSet::from_texts(it->second.keyphrases);
      }
    }
  }

  struct Task {
    std::size_t system;
    std::size_t pair;
    std::size_t slot_a;
    std::size_t slot_b;
  };
  std::vector<Task> tasks;
  std::vector<std::size_t> covered(systems.size(), 0);
  for (std::size_t s = 0; s < systems.size(); ++s) {
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const std::size_t a = slot_of.at(pairs[p].doc_a);
      const std::size_t b = slot_of.at(pairs[p].doc_b);
      if (sets[s][a] && sets[s][b]) {
        tasks.push_back({s, p, a, b});
        ++covered[s];
      }
    }
  }
  for (std::size_t s = 0; s < systems.size(); ++s) {
    if (covered[s] == 0) {
      throw Error(ErrorKind::no_overlap,
                  "system '" + systems[s] +
                      "' has predictions for zero pairs");
    }
  }

  std::vector<PairResult> results(tasks.size());
  run_parallel(tasks.size(), options.threads, [&](std::size_t i) {
    const Task& task = tasks[i];
    const auto& sa = *sets[task.system][task.slot_a];
    const auto& sb = *sets[task.system][task.slot_b];
    PairResult r;
    r.pair_id = pairs[task.pair].pair_id;
    r.system = systems[task.system];
    r.cp.hooper = metrics::hooper_cp(sa, sb, options.formula);
    r.cp.rodgers = metrics::rodgers_cp(sa, sb, options.formula);
    r.cp.formula = options.formula;
    r.rouge1_between_docs = pair_rouge[task.pair];
    r.absent_rate_a = prmu::absent_rate(sa, doc_stems[task.slot_a]);
    r.absent_rate_b = prmu::absent_rate(sb, doc_stems[task.slot_b]);
    if (sa.empty() && sb.empty()) {
      r.empty_flags = EmptyFlags::both_empty;
    } else if (sa.empty() || sb.empty()) {
      r.empty_flags = EmptyFlags::one_empty;
    }
    results[i] = std::move(r);
  });

  std::stable_sort(results.begin(), results.end(),
                   [](const PairResult& x, const PairResult& y) {
                     if (x.system != y.system) return x.system < y.system;
                     return x.pair_id < y.pair_id;
                   });
  return results;
}

std::vector<SystemSummary> summarize(const std::vector<PairResult>& results,
                                     metrics::CorrelationMethod method) {
  std::map<std::string, std::vector<const PairResult*>> by_system;
  for (const auto& r : results) by_system[r.system].push_back(&r);

  const auto other = method == metrics::CorrelationMethod::pearson
                         ? metrics::CorrelationMethod::spearman
                         : metrics::CorrelationMethod::pearson;

  std::vector<SystemSummary> summaries;
  for (const auto& [system, rows] : by_system) {
    SystemSummary s;
    s.system = system;
    s.n_pairs = rows.size();
    double hooper = 0.0, rodgers = 0.0, gen = 0.0;
    std::vector<double> xs, ys;
    xs.reserve(rows.size());
    ys.reserve(rows.size());
    for (const PairResult* r : rows) {
      hooper += r->cp.hooper;
      rodgers += r->cp.rodgers;
      gen += (r->absent_rate_a + r->absent_rate_b) / 2.0;
      if (r->empty_flags != EmptyFlags::none) ++s.n_empty;
      xs.push_back(r->rouge1_between_docs);
      ys.push_back(r->cp.hooper);
    }
    const double n = static_cast<double>(rows.size());
    s.mean_hooper = 100.0 * hooper / n;
    s.mean_rodgers = 100.0 * rodgers / n;
    s.gen_rate = gen / n;  // absent rates are already percentages
    s.correlation.method = method;
    s.correlation_alt.method = other;
    try {
      auto compute = [&](metrics::CorrelationMethod m) {
        return m == metrics::CorrelationMethod::pearson
                   ? metrics::pearson(xs, ys)
                   : metrics::spearman(xs, ys);
      };
      s.correlation = compute(method);
      s.correlation_alt = compute(other);
      s.correlation_available = true;
    } catch (const Error& e) {
      s.correlation_available = false;
      s.correlation_note = std::string(to_string(e.kind())) + ": " + e.what();
      s.correlation.method = method;
      s.correlation_alt.method = other;
    }
    summaries.push_back(std::move(s));
  }
  return summaries;
}

// ---------------------------------------------------------------------------
// TF-IDF extraction baseline

namespace {

const std::unordered_set<std::string>& english_stopwords() {
  static const std::unordered_set<std::string> words = {
      "a",          "about",   "above",   "after",    "again",    "against",
      "all",        "am",      "an",      "and",      "any",      "are",
      "as",         "at",      "be",      "because",  "been",     "before",
      "being",      "below",   "between", "both",     "but",      "by",
      "can",        "cannot",  "could",   "did",      "do",       "does",
      "doing",      "down",    "during",  "each",     "few",      "for",
      "from",       "further", "had",     "has",      "have",     "having",
      "he",         "her",     "here",    "hers",     "herself",  "him",
      "himself",    "his",     "how",     "i",        "if",       "in",
      "into",       "is",      "it",      "its",      "itself",   "me",
      "more",       "most",    "my",      "myself",   "no",       "nor",
      "not",        "of",      "off",     "on",       "once",     "only",
      "or",         "other",   "ought",   "our",      "ours",     "ourselves",
      "out",        "over",    "own",     "same",     "she",      "should",
      "so",         "some",    "such",    "than",     "that",     "the",
      "their",      "theirs",  "them",    "themselves", "then",   "there",
      "these",      "they",    "this",    "those",    "through",  "to",
      "too",        "under",   "until",   "up",       "very",     "was",
      "we",         "were",    "what",    "when",     "where",    "which",
      "while",      "who",     "whom",    "why",      "with",     "would",
      "you",        "your",    "yours",   "yourself", "yourselves",
  };
  return words;
}

std::string ascii_lower(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace

DocumentFrequencies document_frequencies(const corpus::Corpus& docs) {
  if (docs.empty()) {
    throw Error(ErrorKind::empty_corpus,
                "document frequencies need a non-empty corpus");
  }
  DocumentFrequencies freqs;
  freqs.n_docs = docs.size();
  for (const auto& doc : docs.documents()) {
    std::unordered_set<std::string> seen;
    for (const auto& tok : textkit::tokenize(doc.full_text())) {
      if (seen.insert(tok.stem).second) ++freqs.df[tok.stem];
    }
  }
  return freqs;
}

corpus::PredictionSet tfidf_extract(const corpus::Document& doc,
                                    const DocumentFrequencies& frequencies,
                                    const BaselineConfig& config) {
  if (config.top_k < 1) throw std::invalid_argument("top_k must be >= 1");
  if (config.max_ngram < 1) throw std::invalid_argument("max_ngram must be >= 1");
  const std::unordered_set<std::string>* stop = nullptr;
  if (config.stopwords == "english") {
    stop = &english_stopwords();
  } else if (config.stopwords != "none") {
    throw std::invalid_argument("unknown stopword list: " + config.stopwords);
  }

  const std::vector<textkit::Token> title = textkit::tokenize(doc.title);
  const std::vector<textkit::Token> body = textkit::tokenize(doc.body);
  if (title.empty() && body.empty()) {
    throw Error(ErrorKind::empty_document,
                "document '" + doc.id + "' has no tokens");
  }

  std::unordered_map<std::string, double> tf;
  for (const auto* section : {&title, &body}) {
    for (const auto& tok : *section) tf[tok.stem] += 1.0;
  }
  const double n_docs = static_cast<double>(frequencies.n_docs);
  auto weight = [&](const std::string& stem) {
    auto it = frequencies.df.find(stem);
    const double df = it == frequencies.df.end()
                          ? 0.0
                          : static_cast<double>(it->second);
    return tf.at(stem) * std::log(n_docs / (1.0 + df));
  };
  auto is_stop = [&](const textkit::Token& tok) {
    return stop && stop->count(ascii_lower(tok.surface)) > 0;
  };

  struct Candidate {
    double score;
    std::size_t first_pos;
    std::string key;
    std::string surface;
  };
  std::unordered_map<std::string, Candidate> best;  // keyed by stems
  std::size_t base = 0;
  // n-grams are generated per section so no candidate crosses the
  // title/body seam.
  for (const auto* section : {&title, &body}) {
    const auto& toks = *section;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (is_stop(toks[i])) continue;  // candidates never start on a stopword
      for (std::size_t len = 1; len <= config.max_ngram && i + len <= toks.size();
           ++len) {
        if (is_stop(toks[i + len - 1])) continue;  // nor end on one
        std::vector<std::string> stems;
        stems.reserve(len);
        double sum = 0.0;
        std::string surface;
        for (std::size_t k = 0; k < len; ++k) {
          stems.push_back(toks[i + k].stem);
          sum += weight(toks[i + k].stem);
          if (k) surface += ' ';
          surface += toks[i + k].surface;
        }
        std::string key = textkit::stems_key(stems);
        if (best.count(key)) continue;  // first occurrence wins
        best.emplace(std::move(key),
                     Candidate{sum / static_cast<double>(len), base + i,
                               textkit::stems_key(stems), std::move(surface)});
      }
    }
    base += toks.size();
  }

  std::vector<const Candidate*> ranked;
  ranked.reserve(best.size());
  for (const auto& [key, cand] : best) ranked.push_back(&cand);
  std::sort(ranked.begin(), ranked.end(),
            [](const Candidate* x, const Candidate* y) {
              if (x->score != y->score) return x->score > y->score;
              if (x->first_pos != y->first_pos) return x->first_pos < y->first_pos;
              return x->key < y->key;
            });

  corpus::PredictionSet out;
  out.doc_id = doc.id;
  out.system = kBaselineSystemName;
  for (std::size_t i = 0; i < ranked.size() && i < config.top_k; ++i) {
    out.keyphrases.push_back(ranked[i]->surface);
  }
  return out;
}

corpus::PredictionSet tfidf_extract(const corpus::Document& doc,
                                    const corpus::Corpus& docs,
                                    const BaselineConfig& config) {
  return tfidf_extract(doc, document_frequencies(docs), config);
}

// ---------------------------------------------------------------------------
// Dataset statistics

namespace {

std::string dataset_label(const corpus::Document& doc) {
  std::string label;
  if (auto it = doc.meta.find("dataset"); it != doc.meta.end()) {
    label = it->second;
  }
  if (auto it = doc.meta.find("version");
      it != doc.meta.end() && !label.empty() && !it->second.empty()) {
    label += " (" + it->second + ")";
  }
  return label.empty() ? "unlabeled" : label;
}

DatasetStats stats_for(const std::string& label,
                       const std::vector<const corpus::Document*>& group) {
  DatasetStats st;
  st.dataset = label;
  st.documents = group.size();
  std::vector<std::pair<metrics::KeyphraseSet, std::vector<std::string>>>
      attachments;
  std::size_t total_refs = 0;
  std::size_t n_phrases = 0;
  double len_sum = 0.0;
  for (const corpus::Document* doc : group) {
    total_refs += doc->references.size();
    auto refs = metrics::KeyphraseSet::from_texts(doc->references);
    for (const auto& phrase : refs.phrases()) {
      len_sum += static_cast<double>(phrase.stems.size());
      ++n_phrases;
    }
    attachments.emplace_back(
        std::move(refs), prmu::classification_stems(doc->title, doc->body));
  }
  try {
    st.prmu = prmu::distribution(attachments);
  } catch (const Error&) {
    // no reference keyphrases anywhere in the group: distribution n stays 0
  }
  st.mean_references = static_cast<double>(total_refs) /
                       static_cast<double>(group.size());
  st.mean_keyphrase_length =
      n_phrases ? len_sum / static_cast<double>(n_phrases) : 0.0;
  return st;
}

}  // namespace

std::vector<DatasetStats> dataset_stats(const corpus::Corpus& docs) {
  if (docs.empty()) {
    throw Error(ErrorKind::empty_corpus, "statistics need a non-empty corpus");
  }
  std::map<std::string, std::vector<const corpus::Document*>> groups;
  for (const auto& doc : docs.documents()) {
    groups[dataset_label(doc)].push_back(&doc);
  }
  std::vector<DatasetStats> out;
  for (const auto& [label, group] : groups) {
    out.push_back(stats_for(label, group));
  }
  return out;
}

std::vector<DatasetStats> dataset_stats(
    const corpus::Corpus& docs,
    const std::vector<corpus::DocumentPair>& pairs) {
  if (pairs.empty()) {
    throw Error(ErrorKind::empty_corpus, "statistics need at least one pair");
  }
  std::map<std::string, std::vector<const corpus::Document*>> groups;
  std::map<std::string, std::size_t> pair_counts;
  std::unordered_set<std::string> seen;
  for (const auto& pair : pairs) {
    for (const std::string* id : {&pair.doc_a, &pair.doc_b}) {
      const corpus::Document* doc = docs.find(*id);
      if (!doc) {
        throw Error(ErrorKind::unresolved_doc_id,
                    "pair '" + pair.pair_id +
                        "' references unknown document '" + *id + "'");
      }
      if (seen.insert(*id).second) groups[dataset_label(*doc)].push_back(doc);
    }
    ++pair_counts[dataset_label(docs.at(pair.doc_a))];
  }
  std::vector<DatasetStats> out;
  for (const auto& [label, group] : groups) {
    DatasetStats st = stats_for(label, group);
    if (auto it = pair_counts.find(label); it != pair_counts.end()) {
      st.pairs = it->second;
    }
    out.push_back(std::move(st));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string pct1(double v) { return fmt("%.1f", v); }
std::string corr2(double v) { return fmt("%.2f", v); }
std::string full(double v) { return fmt("%.17g", v); }

std::string corr_cell(const SystemSummary& s,
                      const metrics::CorrelationResult& c) {
  if (!s.correlation_available) return "n/a";
  std::string out = corr2(c.coefficient);
  if (c.p_value < 0.05) out += "*";
  return out;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::io_error, "cannot write report: " + path);
  }
  out << content;
  if (!out) {
    throw Error(ErrorKind::io_error, "short write on report: " + path);
  }
}

}  // namespace

std::string render_markdown(const std::vector<SystemSummary>& summaries,
                            const std::vector<DatasetStats>& stats,
                            const ReportConfig& config,
                            const ReportInputs& inputs) {
  std::ostringstream out;
  out << "# Keyphrase prediction homogeneity report\n\n";
  out << "- toolkit version: " << kToolkitVersion << "\n";
  out << "- set formula: " << metrics::to_string(config.formula) << "\n";
  out << "- correlation method: " << metrics::to_string(config.correlation)
      << "\n";

  if (!inputs.empty()) {
    out << "\n## Inputs\n\n";
    out << "| file | fnv1a-64 |\n| --- | --- |\n";
    for (const auto& [label, path] : inputs) {
      out << "| " << label << " | `"
          << corpus::fingerprint_hex(corpus::file_fingerprint(path))
          << "` |\n";
    }
  }

  out << "\n## Systems\n\n";
  if (summaries.empty()) {
    out << "no systems evaluated\n";
  } else {
    // the CSV carries both correlation methods; markdown shows the
    // configured one
    out << "| system | CP Hooper | CP Rodgers | % Gen. | Cor. ROUGE ("
        << metrics::to_string(config.correlation)
        << ") | pairs | empty | skipped |\n";
    out << "| --- | --- | --- | --- | --- | --- | --- | --- |\n";
    for (const auto& s : summaries) {
      out << "| " << s.system << " | " << pct1(s.mean_hooper) << " | "
          << pct1(s.mean_rodgers) << " | " << pct1(s.gen_rate) << " | "
          << corr_cell(s, s.correlation) << " | " << s.n_pairs << " | "
          << s.n_empty << " | " << s.n_skipped << " |\n";
    }
    out << "\n`*` marks p < 0.05.\n";
  }

  if (!stats.empty()) {
    out << "\n## Dataset statistics\n\n";
    out << "| dataset | documents | pairs | % P | % R | % M | % U | "
           "refs/doc | words/keyphrase |\n";
    out << "| --- | --- | --- | --- | --- | --- | --- | --- | --- |\n";
    for (const auto& st : stats) {
      out << "| " << st.dataset << " | " << st.documents << " | " << st.pairs
          << " | ";
      if (st.prmu.n == 0) {
        out << "n/a | n/a | n/a | n/a | ";
      } else {
        out << pct1(st.prmu.p_pct) << " | " << pct1(st.prmu.r_pct) << " | "
            << pct1(st.prmu.m_pct) << " | " << pct1(st.prmu.u_pct) << " | ";
      }
      out << pct1(st.mean_references) << " | "
          << pct1(st.mean_keyphrase_length) << " |\n";
    }
  }
  return out.str();
}

std::string render_csv(const std::vector<SystemSummary>& summaries) {
  std::ostringstream out;
  out << "system,n_pairs,n_empty,n_skipped,mean_hooper_pct,mean_rodgers_pct,"
         "gen_rate_pct,spearman_r,spearman_p,pearson_r,pearson_p,"
         "significant\n";
  for (const auto& s : summaries) {
    const metrics::CorrelationResult& sp =
        s.correlation.method == metrics::CorrelationMethod::spearman
            ? s.correlation
            : s.correlation_alt;
    const metrics::CorrelationResult& pe =
        s.correlation.method == metrics::CorrelationMethod::pearson
            ? s.correlation
            : s.correlation_alt;
    out << csv_escape(s.system) << ',' << s.n_pairs << ',' << s.n_empty << ','
        << s.n_skipped << ',' << full(s.mean_hooper) << ','
        << full(s.mean_rodgers) << ',' << full(s.gen_rate) << ',';
    if (s.correlation_available) {
      out << full(sp.coefficient) << ',' << full(sp.p_value) << ','
          << full(pe.coefficient) << ',' << full(pe.p_value) << ','
          << (s.correlation.p_value < 0.05 ? '1' : '0');
    } else {
      out << ",,,,";
    }
    out << '\n';
  }
  return out.str();
}

void emit_report(const std::vector<SystemSummary>& summaries,
                 const std::vector<DatasetStats>& stats,
                 const ReportConfig& config, const ReportInputs& inputs) {
  if (!config.markdown_path.empty()) {
    write_file(config.markdown_path,
               render_markdown(summaries, stats, config, inputs));
  }
  if (!config.csv_path.empty()) {
    std::ostringstream csv;
    csv << "# toolkit_version=" << kToolkitVersion
        << " formula=" << metrics::to_string(config.formula)
        << " correlation=" << metrics::to_string(config.correlation);
    for (const auto& [label, path] : inputs) {
      csv << ' ' << label << '='
          << corpus::fingerprint_hex(corpus::file_fingerprint(path));
    }
    csv << '\n' << render_csv(summaries);
    write_file(config.csv_path, csv.str());
  }
}

}  // namespace harness
}  // namespace kphom
