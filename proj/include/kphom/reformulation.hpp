#pragma once

#include <chrono>
#include <cstddef>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "kphom/corpus.hpp"
#include "kphom/prmu.hpp"

namespace kphom {
namespace reformulation {

enum class Method { paraphrase, backtranslation };

const char* to_string(Method method);
Method method_from_string(const std::string& name);

// A second version of a document produced by an external model.
struct ReformulationRecord {
  std::string original;  // document id
  std::string reformulated_text;
  Method method = Method::paraphrase;
  std::string intermediate_text;  // pivot-language hop, backtranslation only
  std::string model_label;
};

// Outcome of the quality-control filters for one record.
struct QcReport {
  std::string original;
  Method method = Method::paraphrase;
  // Every reference keyphrase with its class in the reformulation.
  std::vector<std::pair<std::string, prmu::PrmuClass>> keyphrase_preservation;
  bool preserved = false;
  double word_count_ratio = 0.0;
  bool length_ok = false;
  double wer = 0.0;     // diagnostics only, never gate acceptance
  double rouge1 = 0.0;  //
  bool accepted = false;
  std::string note;  // failure reason when the record could not be checked
};

struct PreservationResult {
  bool preserved = true;
  std::vector<std::pair<std::string, prmu::PrmuClass>> classes;
};

// Every reference keyphrase classified Present in the ORIGINAL must be
// Present or Reordered in the reformulation; other references are
// informational only.  Throws NoReferences.
PreservationResult qc_keyphrase_preservation(const corpus::Document& original,
                                             const std::string& reformulated_text);

// Ratio of reformulation word count to original word count; passes iff
// 1-window <= ratio <= 1+window (inclusive).  Throws EmptyOriginal.
std::pair<bool, double> qc_word_count(const corpus::Document& original,
                                      const std::string& reformulated_text,
                                      double window = 0.10);

// (wer, rouge1_recall) of the reformulation against the original text.
std::pair<double, double> diversity(const corpus::Document& original,
                                    const std::string& reformulated_text);

// Line separating title from abstract in prompts and model responses.
inline const std::string kSectionDelimiter = "=====";

// Splits "title\n=====\nabstract"; false when no delimiter line exists.
bool split_sections(const std::string& text, std::string* title,
                    std::string* body);

struct PromptTemplates {
  std::string paraphrase;
  std::string translate_forward;
  std::string translate_back;
};

// Built-in templates, with per-file overrides from dir (paraphrase.txt,
// translate_forward.txt, translate_back.txt) when dir is non-empty.
PromptTemplates load_templates(const std::string& dir);

struct ClientConfig {
  std::string endpoint = "http://localhost:8080/v1";  // chat-completions base
  std::string model = "gpt-4o";
  std::string pivot_language = "Spanish";
  std::string cache_dir;   // empty disables the response cache
  std::string prompt_dir;  // empty uses the built-in templates
  int max_attempts = 3;
  int timeout_seconds = 120;
  int backoff_initial_ms = 250;  // doubled after every failed attempt
};

// One reformulated version of doc.  paraphrase is a single chat
// request; backtranslation is two (forward hop, then back).  Responses
// must keep the section delimiter or MalformedResponse is thrown.
// Results are cached one file per (doc id, method, prompt hash); a
// cache hit performs no network calls.  The API key is read from the
// KPHOM_API_KEY (or OPENAI_API_KEY) environment variable and is never
// written to disk or logs.  Throws TransportError, RateLimited,
// MalformedResponse, EmptyDocument.
ReformulationRecord generate(const corpus::Document& doc, Method method,
                             const ClientConfig& config);

struct FilterOutcome {
  std::vector<corpus::Document> accepted_documents;  // id suffixed by method
  std::vector<corpus::DocumentPair> pairs;           // original vs reformulated
  std::vector<QcReport> reports;                     // one per input record
};

// Applies both filters to every record.  Per-record failures (unknown
// ids, missing references) land in the report's note instead of being
// thrown.  Accepted records become new documents carrying the
// original's references, paired with their original at similarity 1.
FilterOutcome filter_pipeline(const std::vector<ReformulationRecord>& records,
                              const corpus::Corpus& docs,
                              double length_window = 0.10);

// Records persist as JSON lines (original, method, reformulated_text,
// intermediate_text, model_label).
std::vector<ReformulationRecord> load_records(const std::string& path);
void save_records(const std::vector<ReformulationRecord>& records,
                  const std::string& path);

void save_reports(const std::vector<QcReport>& reports,
                  const std::string& path);

// Blocking token bucket used to pace outbound requests.
class TokenBucket {
 public:
  TokenBucket(double per_second, double burst);

  void take();      // blocks until a token is available
  bool try_take();  // non-blocking

 private:
  double refill_locked();

  double per_second_;
  double burst_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
  std::mutex mutex_;
};

}  // namespace reformulation
}  // namespace kphom
