#include "kphom/reformulation.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "kphom/error.hpp"
#include "kphom/metrics.hpp"
#include "kphom/textkit.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace kphom {
namespace reformulation {

const char* to_string(Method method) {
  return method == Method::paraphrase ? "paraphrase" : "backtranslation";
}

Method method_from_string(const std::string& name) {
  if (name == "paraphrase") return Method::paraphrase;
  if (name == "backtranslation") return Method::backtranslation;
  throw std::invalid_argument("unknown reformulation method: " + name);
}

// ---------------------------------------------------------------------------
// Quality-control filters

PreservationResult qc_keyphrase_preservation(const corpus::Document& original,
                                             const std::string& reformulated_text) {
  if (original.references.empty()) {
    throw Error(ErrorKind::no_references,
                "document '" + original.id + "' has no reference keyphrases");
  }
  const auto original_stems =
      prmu::classification_stems(original.title, original.body);
  const auto reformulated_stems = textkit::stem_sequence(reformulated_text);
  const auto references = metrics::KeyphraseSet::from_texts(original.references);

  PreservationResult result;
  for (const auto& phrase : references.phrases()) {
    const auto in_original = prmu::classify(phrase, original_stems);
    const auto in_reformulation = prmu::classify(phrase, reformulated_stems);
    result.classes.emplace_back(phrase.surface, in_reformulation);
    if (in_original == prmu::PrmuClass::present &&
        in_reformulation != prmu::PrmuClass::present &&
        in_reformulation != prmu::PrmuClass::reordered) {
      result.preserved = false;
    }
  }
  return result;
}

std::pair<bool, double> qc_word_count(const corpus::Document& original,
                                      const std::string& reformulated_text,
                                      double window) {
  if (window < 0.0) throw std::invalid_argument("length window must be >= 0");
  const std::size_t original_words = textkit::word_count(original.full_text());
  if (original_words == 0) {
    throw Error(ErrorKind::empty_original,
                "document '" + original.id + "' has no words");
  }
  const double ratio =
      static_cast<double>(textkit::word_count(reformulated_text)) /
      static_cast<double>(original_words);
  const bool ok = ratio >= 1.0 - window && ratio <= 1.0 + window;
  return {ok, ratio};
}

std::pair<double, double> diversity(const corpus::Document& original,
                                    const std::string& reformulated_text) {
  const std::string text = original.full_text();
  return {metrics::wer(text, reformulated_text),
          metrics::rouge1_recall(text, reformulated_text)};
}

// ---------------------------------------------------------------------------
// Section delimiter handling

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool is_delimiter_line(const std::string& line) {
  const std::string t = trim(line);
  if (t.size() < 3) return false;
  return t.find_first_not_of('=') == std::string::npos;
}

}  // namespace

bool split_sections(const std::string& text, std::string* title,
                    std::string* body) {
  std::istringstream in(text);
  std::string line;
  std::string before, after;
  bool seen = false;
  while (std::getline(in, line)) {
    if (!seen && is_delimiter_line(line)) {
      seen = true;
      continue;
    }
    std::string& part = seen ? after : before;
    if (!part.empty()) part += '\n';
    part += line;
  }
  if (!seen) return false;
  if (title) *title = trim(before);
  if (body) *body = trim(after);
  return true;
}

// ---------------------------------------------------------------------------
// Prompt templates

namespace {

const char kDefaultParaphrase[] =
    "You are rewriting scientific abstracts.\n"
    "Paraphrase the document below: rewrite the title and the abstract in "
    "your own words while preserving the full technical meaning.\n"
    "Keep the line containing only ===== between the title and the abstract.\n"
    "Output only the new title, the delimiter line, and the new abstract.\n"
    "\n"
    "{{TITLE}}\n"
    "=====\n"
    "{{ABSTRACT}}\n";

const char kDefaultTranslateForward[] =
    "Translate the document below from English to {{PIVOT}}.\n"
    "Keep the line containing only ===== between the title and the abstract.\n"
    "Output only the translated title, the delimiter line, and the translated "
    "abstract.\n"
    "\n"
    "{{TITLE}}\n"
    "=====\n"
    "{{ABSTRACT}}\n";

const char kDefaultTranslateBack[] =
    "Translate the document below from {{PIVOT}} to English.\n"
    "Keep the line containing only ===== between the title and the abstract.\n"
    "Output only the translated title, the delimiter line, and the translated "
    "abstract.\n"
    "\n"
    "{{TEXT}}\n";

std::string read_override(const fs::path& path, const char* fallback) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return fallback;
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string fill(std::string tpl, const std::string& placeholder,
                 const std::string& value) {
  std::size_t pos = 0;
  while ((pos = tpl.find(placeholder, pos)) != std::string::npos) {
    tpl.replace(pos, placeholder.size(), value);
    pos += value.size();
  }
  return tpl;
}

// FNV-1a 64 over a string; used only to key the response cache.
std::uint64_t fnv64(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string sanitize_for_filename(const std::string& id) {
  std::string out;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    out.push_back(ok ? c : '_');
    if (out.size() >= 80) break;
  }
  if (out.empty()) out = "doc";
  return out;
}

}  // namespace

PromptTemplates load_templates(const std::string& dir) {
  PromptTemplates t;
  t.paraphrase = kDefaultParaphrase;
  t.translate_forward = kDefaultTranslateForward;
  t.translate_back = kDefaultTranslateBack;
  if (!dir.empty()) {
    t.paraphrase = read_override(fs::path(dir) / "paraphrase.txt",
                                 kDefaultParaphrase);
    t.translate_forward = read_override(fs::path(dir) / "translate_forward.txt",
                                        kDefaultTranslateForward);
    t.translate_back = read_override(fs::path(dir) / "translate_back.txt",
                                     kDefaultTranslateBack);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Chat-completions client

namespace {

struct Endpoint {
  std::string origin;     // scheme://host:port
  std::string base_path;  // e.g. /v1
  bool https = false;
};

Endpoint parse_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorKind::transport_error,
                "endpoint must start with http:// or https://: " + url);
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error(ErrorKind::transport_error, "unsupported scheme: " + scheme);
  }
  Endpoint ep;
  ep.https = scheme == "https";
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    ep.origin = url;
  } else {
    ep.origin = url.substr(0, path_start);
    ep.base_path = url.substr(path_start);
  }
  while (!ep.base_path.empty() && ep.base_path.back() == '/') {
    ep.base_path.pop_back();
  }
  return ep;
}

const char* api_key_from_env() {
  const char* key = std::getenv("KPHOM_API_KEY");
  if (key && *key) return key;
  key = std::getenv("OPENAI_API_KEY");
  if (key && *key) return key;
  return nullptr;
}

// One chat request with retries.  Returns the assistant message content
// and appends (prompt, raw body) to the exchange log.
std::string chat_request(httplib::Client& client, const Endpoint& ep,
                         const ClientConfig& config, const std::string& prompt,
                         std::vector<std::pair<std::string, std::string>>* log) {
  const json body_json = {
      {"model", config.model},
      {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
  };
  const std::string body = body_json.dump();
  httplib::Headers headers;
  if (const char* key = api_key_from_env()) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  const std::string path = ep.base_path + "/chat/completions";

  const int attempts = std::max(1, config.max_attempts);
  int backoff_ms = std::max(1, config.backoff_initial_ms);
  std::string last_failure = "no attempt made";
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
      backoff_ms *= 2;
    }
    auto res = client.Post(path, headers, body, "application/json");
    if (!res) {
      last_failure = "connection failed: " + httplib::to_string(res.error());
      continue;  // retryable
    }
    if (res->status == 429) {
      last_failure = "rate limited (429)";
      if (attempt + 1 == attempts) {
        throw Error(ErrorKind::rate_limited,
                    "endpoint rate limit persisted across " +
                        std::to_string(attempts) + " attempts");
      }
      continue;
    }
    if (res->status >= 500) {
      last_failure = "server error (" + std::to_string(res->status) + ")";
      continue;  // retryable
    }
    if (res->status != 200) {
      throw Error(ErrorKind::transport_error,
                  "endpoint returned status " + std::to_string(res->status));
    }
    json parsed;
    try {
      parsed = json::parse(res->body);
    } catch (const json::exception&) {
      throw Error(ErrorKind::malformed_response,
                  "response body is not valid JSON");
    }
    if (!parsed.contains("choices") || !parsed["choices"].is_array() ||
        parsed["choices"].empty() ||
        !parsed["choices"][0].contains("message") ||
        !parsed["choices"][0]["message"].contains("content") ||
        !parsed["choices"][0]["message"]["content"].is_string()) {
      throw Error(ErrorKind::malformed_response,
                  "response carries no choices[0].message.content");
    }
    if (log) log->emplace_back(prompt, res->body);
    return parsed["choices"][0]["message"]["content"].get<std::string>();
  }
  throw Error(ErrorKind::transport_error,
              "request failed after " + std::to_string(attempts) +
                  " attempts; last failure: " + last_failure);
}

fs::path cache_path(const ClientConfig& config, const std::string& doc_id,
                    Method method, std::uint64_t prompt_hash) {
  return fs::path(config.cache_dir) /
         (sanitize_for_filename(doc_id) + "-" + to_string(method) + "-" +
          hex64(prompt_hash) + ".json");
}

bool load_cached(const fs::path& path, const std::string& doc_id,
                 Method method, ReformulationRecord* record) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  json entry;
  try {
    in >> entry;
    record->original = doc_id;
    record->method = method;
    record->reformulated_text = entry.at("reformulated_text").get<std::string>();
    record->intermediate_text = entry.value("intermediate_text", "");
    record->model_label = entry.value("model_label", "");
  } catch (const json::exception&) {
    return false;  // corrupt cache entry: regenerate and overwrite
  }
  return true;
}

void store_cached(const fs::path& path, const ReformulationRecord& record,
                  std::uint64_t prompt_hash,
                  const std::vector<std::pair<std::string, std::string>>& log) {
  json exchanges = json::array();
  for (const auto& [prompt, response] : log) {
    exchanges.push_back(json{{"prompt", prompt}, {"response", response}});
  }
  const json entry = {
      {"doc", record.original},
      {"method", to_string(record.method)},
      {"prompt_hash", hex64(prompt_hash)},
      {"model_label", record.model_label},
      {"reformulated_text", record.reformulated_text},
      {"intermediate_text", record.intermediate_text},
      {"exchanges", exchanges},
  };
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::io_error,
                "cannot write cache file: " + path.string());
  }
  out << entry.dump(2) << '\n';
}

}  // namespace

ReformulationRecord generate(const corpus::Document& doc, Method method,
                             const ClientConfig& config) {
  if (doc.title.empty() && doc.body.empty()) {
    throw Error(ErrorKind::empty_document,
                "document '" + doc.id + "' has no text to reformulate");
  }
  const PromptTemplates templates = load_templates(config.prompt_dir);

  std::string first_prompt;
  std::string hash_input;
  if (method == Method::paraphrase) {
    first_prompt = fill(fill(templates.paraphrase, "{{TITLE}}", doc.title),
                        "{{ABSTRACT}}", doc.body);
    hash_input = config.model + '\x1f' + first_prompt;
  } else {
    first_prompt = fill(
        fill(fill(templates.translate_forward, "{{PIVOT}}",
                  config.pivot_language),
             "{{TITLE}}", doc.title),
        "{{ABSTRACT}}", doc.body);
    hash_input = config.model + '\x1f' + first_prompt + '\x1f' +
                 fill(templates.translate_back, "{{PIVOT}}",
                      config.pivot_language);
  }
  const std::uint64_t prompt_hash = fnv64(hash_input);

  ReformulationRecord record;
  record.original = doc.id;
  record.method = method;
  record.model_label = config.model + "@default-decoding";

  if (!config.cache_dir.empty()) {
    const fs::path path = cache_path(config, doc.id, method, prompt_hash);
    if (load_cached(path, doc.id, method, &record)) return record;
  }

  const Endpoint ep = parse_endpoint(config.endpoint);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (ep.https) {
    throw Error(ErrorKind::transport_error,
                "built without TLS support; use an http endpoint");
  }
#endif
  httplib::Client client(ep.origin);
  client.set_connection_timeout(config.timeout_seconds);
  client.set_read_timeout(config.timeout_seconds);
  client.set_write_timeout(config.timeout_seconds);

  std::vector<std::pair<std::string, std::string>> log;
  if (method == Method::paraphrase) {
    record.reformulated_text = chat_request(client, ep, config, first_prompt,
                                            &log);
  } else {
    record.intermediate_text = chat_request(client, ep, config, first_prompt,
                                            &log);
    if (!split_sections(record.intermediate_text, nullptr, nullptr)) {
      throw Error(ErrorKind::malformed_response,
                  "forward hop dropped the section delimiter");
    }
    const std::string back_prompt =
        fill(fill(templates.translate_back, "{{PIVOT}}", config.pivot_language),
             "{{TEXT}}", record.intermediate_text);
    record.reformulated_text = chat_request(client, ep, config, back_prompt,
                                            &log);
  }
  if (!split_sections(record.reformulated_text, nullptr, nullptr)) {
    throw Error(ErrorKind::malformed_response,
                "response dropped the section delimiter");
  }

  if (!config.cache_dir.empty()) {
    fs::create_directories(config.cache_dir);
    store_cached(cache_path(config, doc.id, method, prompt_hash), record,
                 prompt_hash, log);
  }
  return record;
}

// ---------------------------------------------------------------------------
// Filter pipeline

FilterOutcome filter_pipeline(const std::vector<ReformulationRecord>& records,
                              const corpus::Corpus& docs,
                              double length_window) {
  FilterOutcome outcome;
  std::unordered_set<std::string> used_ids;
  for (const auto& doc : docs.documents()) used_ids.insert(doc.id);

  for (const auto& record : records) {
    QcReport report;
    report.original = record.original;
    report.method = record.method;

    const corpus::Document* original = docs.find(record.original);
    if (!original) {
      report.note = "UnresolvedDocId: record references unknown document '" +
                    record.original + "'";
      outcome.reports.push_back(std::move(report));
      continue;
    }

    // Reformulated text may keep the title/abstract delimiter; strip it
    // so QC never counts the delimiter line as a word.
    std::string title, body;
    if (!split_sections(record.reformulated_text, &title, &body)) {
      title.clear();
      body = record.reformulated_text;
    }
    corpus::Document candidate;
    candidate.title = title;
    candidate.body = body;
    const std::string qc_text = candidate.full_text();

    try {
      auto preservation = qc_keyphrase_preservation(*original, qc_text);
      report.keyphrase_preservation = std::move(preservation.classes);
      report.preserved = preservation.preserved;
      auto [length_ok, ratio] = qc_word_count(*original, qc_text,
                                              length_window);
      report.length_ok = length_ok;
      report.word_count_ratio = ratio;
      auto [wer_score, rouge_score] = diversity(*original, qc_text);
      report.wer = wer_score;
      report.rouge1 = rouge_score;
    } catch (const Error& e) {
      report.note = std::string(to_string(e.kind())) + ": " + e.what();
      outcome.reports.push_back(std::move(report));
      continue;
    }

    report.accepted = report.preserved && report.length_ok;
    if (report.accepted) {
      std::string id = record.original + "::" + to_string(record.method);
      for (int n = 2; used_ids.count(id); ++n) {
        id = record.original + "::" + to_string(record.method) + "-" +
             std::to_string(n);
      }
      used_ids.insert(id);

      candidate.id = id;
      candidate.references = original->references;
      candidate.meta = original->meta;
      candidate.meta["reformulation_method"] = to_string(record.method);
      if (!record.model_label.empty()) {
        candidate.meta["reformulation_model"] = record.model_label;
      }

      corpus::DocumentPair pair;
      const std::string* a = &original->id;
      const std::string* b = &id;
      if (*b < *a) std::swap(a, b);
      pair.pair_id = *a + "--" + *b;
      pair.doc_a = *a;
      pair.doc_b = *b;
      pair.provenance = record.method == Method::paraphrase
                            ? corpus::PairProvenance::reformulation_paraphrase
                            : corpus::PairProvenance::reformulation_backtranslation;
      pair.reference_similarity = 1.0;

      outcome.accepted_documents.push_back(std::move(candidate));
      outcome.pairs.push_back(std::move(pair));
    }
    outcome.reports.push_back(std::move(report));
  }
  return outcome;
}

// ---------------------------------------------------------------------------
// Record persistence

std::vector<ReformulationRecord> load_records(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::io_error, "cannot open records file: " + path);
  }
  std::vector<ReformulationRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string trimmed = trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    json entry;
    try {
      entry = json::parse(trimmed);
      ReformulationRecord record;
      record.original = entry.at("original").get<std::string>();
      record.reformulated_text =
          entry.at("reformulated_text").get<std::string>();
      record.method = method_from_string(entry.at("method").get<std::string>());
      record.intermediate_text = entry.value("intermediate_text", "");
      record.model_label = entry.value("model_label", "");
      records.push_back(std::move(record));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::parse_error,
                  path + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw Error(ErrorKind::parse_error,
                  path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return records;
}

void save_records(const std::vector<ReformulationRecord>& records,
                  const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::io_error, "cannot write records file: " + path);
  }
  for (const auto& record : records) {
    json entry = {
        {"original", record.original},
        {"method", to_string(record.method)},
        {"reformulated_text", record.reformulated_text},
        {"model_label", record.model_label},
    };
    if (!record.intermediate_text.empty()) {
      entry["intermediate_text"] = record.intermediate_text;
    }
    out << entry.dump() << '\n';
  }
}

void save_reports(const std::vector<QcReport>& reports,
                  const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::io_error, "cannot write report file: " + path);
  }
  for (const auto& report : reports) {
    json classes = json::array();
    for (const auto& [keyphrase, cls] : report.keyphrase_preservation) {
      classes.push_back(json{{"keyphrase", keyphrase},
                             {"class", prmu::to_string(cls)}});
    }
    const json entry = {
        {"original", report.original},
        {"method", to_string(report.method)},
        {"preserved", report.preserved},
        {"word_count_ratio", report.word_count_ratio},
        {"length_ok", report.length_ok},
        {"wer", report.wer},
        {"rouge1", report.rouge1},
        {"accepted", report.accepted},
        {"note", report.note},
        {"keyphrase_preservation", classes},
    };
    out << entry.dump() << '\n';
  }
}

// ---------------------------------------------------------------------------
// Request pacing

TokenBucket::TokenBucket(double per_second, double burst)
    : per_second_(per_second),
      burst_(std::max(1.0, burst)),
      tokens_(std::max(1.0, burst)),
      last_(std::chrono::steady_clock::now()) {
  if (per_second <= 0.0) {
    throw std::invalid_argument("token bucket rate must be positive");
  }
}

double TokenBucket::refill_locked() {
  const auto now = std::chrono::steady_clock::now();
  const double dt = std::chrono::duration<double>(now - last_).count();
  last_ = now;
  tokens_ = std::min(burst_, tokens_ + dt * per_second_);
  return tokens_;
}

bool TokenBucket::try_take() {
  std::lock_guard<std::mutex> lock(mutex_);
  if (refill_locked() >= 1.0) {
    tokens_ -= 1.0;
    return true;
  }
  return false;
}

void TokenBucket::take() {
  for (;;) {
    double wait_s = 0.0;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      if (refill_locked() >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
      wait_s = (1.0 - tokens_) / per_second_;
    }
    std::this_thread::sleep_for(std::chrono::duration<double>(wait_s));
  }
}

}  // namespace reformulation
}  // namespace kphom
