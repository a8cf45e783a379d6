#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace kphom {
namespace corpus {

struct Document {
  std::string id;
  std::string title;
  std::string body;
  std::vector<std::string> references;  // raw keyphrase texts, ordered
  std::map<std::string, std::string> meta;

  // Title first, body after; the surface text used by WER/ROUGE.
  std::string full_text() const {
    if (title.empty()) return body;
    if (body.empty()) return title;
    return title + "\n" + body;
  }
};

enum class PairProvenance {
  reformulation_paraphrase,
  reformulation_backtranslation,
  shared_keyphrase,
};

const char* to_string(PairProvenance p);
PairProvenance provenance_from_string(const std::string& name);

struct DocumentPair {
  std::string pair_id;
  std::string doc_a;
  std::string doc_b;
  PairProvenance provenance = PairProvenance::shared_keyphrase;
  double reference_similarity = 0.0;

  bool operator==(const DocumentPair& other) const {
    return pair_id == other.pair_id && doc_a == other.doc_a &&
           doc_b == other.doc_b && provenance == other.provenance &&
           reference_similarity == other.reference_similarity;
  }
};

struct PredictionSet {
  std::string doc_id;
  std::string system;
  std::vector<std::string> keyphrases;  // ordered, may be empty
};

// Immutable after load; safe to share across threads.
class Corpus {
 public:
  const Document* find(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &documents_[it->second];
  }
  const Document& at(const std::string& id) const;
  const std::vector<Document>& documents() const { return documents_; }
  std::size_t size() const { return documents_.size(); }
  bool empty() const { return documents_.empty(); }

  // Throws Error(duplicate_id) when the id is already present.
  void add(Document doc);

 private:
  std::vector<Document> documents_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct LoadSummary {
  std::size_t documents = 0;
  std::size_t semicolon_split = 0;  // keyphrase strings split on ';'
  std::size_t synthesized_ids = 0;  // records without an id field
};

// Alternate field names accepted on input; output always writes the
// canonical names (id, title, abstract, keyphrases).
struct FieldMapping {
  std::string id = "id";
  std::string title = "title";
  std::string body = "abstract";
  std::string keyphrases = "keyphrases";
  std::vector<std::string> keyphrase_aliases = {"keywords", "keyword"};
  std::vector<std::string> body_aliases = {"body", "text"};
};

// One JSON record per line.  Unknown fields land in Document::meta.
// Records missing both title and body raise Error(missing_field);
// repeated ids raise Error(duplicate_id); bad JSON raises
// Error(parse_error) naming the line.
Corpus load_corpus(const std::string& path, LoadSummary* summary = nullptr,
                   const FieldMapping& fields = {});

void save_corpus(const Corpus& corpus, const std::string& path);

struct PredictionsLoad {
  // keyed by (system, doc_id)
  std::map<std::pair<std::string, std::string>, PredictionSet> predictions;
  std::vector<std::string> systems;      // in order of first appearance
  std::size_t unknown_doc_warnings = 0;  // doc_ids absent from the corpus
};

// One JSON record per line with doc_id, system, keyphrases.  Unknown
// doc ids are kept but counted when a corpus is supplied.
PredictionsLoad load_predictions(const std::string& path,
                                 const Corpus* corpus = nullptr);

void save_predictions(const std::vector<PredictionSet>& predictions,
                      const std::string& path);

// Pairs files start with a '#' header line; loaders skip comments.
// When a corpus is supplied, pairs referencing unknown documents raise
// Error(unresolved_doc_id).
std::vector<DocumentPair> load_pairs(const std::string& path,
                                     const Corpus* corpus = nullptr);

void save_pairs(const std::vector<DocumentPair>& pairs,
                const std::string& path);

// FNV-1a 64-bit over a file's bytes; provenance fingerprint in reports.
std::uint64_t file_fingerprint(const std::string& path);
std::string fingerprint_hex(std::uint64_t h);

}  // namespace corpus
}  // namespace kphom
