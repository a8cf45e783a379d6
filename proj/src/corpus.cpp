#include "kphom/corpus.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "kphom/error.hpp"

namespace kphom {
namespace corpus {

using nlohmann::json;

const char* to_string(PairProvenance p) {
  switch (p) {
    case PairProvenance::reformulation_paraphrase:
      return "reformulation_paraphrase";
    case PairProvenance::reformulation_backtranslation:
      return "reformulation_backtranslation";
    case PairProvenance::shared_keyphrase:
      return "shared_keyphrase";
  }
  return "unknown";
}

PairProvenance provenance_from_string(const std::string& name) {
  if (name == "reformulation_paraphrase")
    return PairProvenance::reformulation_paraphrase;
  if (name == "reformulation_backtranslation")
    return PairProvenance::reformulation_backtranslation;
  if (name == "shared_keyphrase") return PairProvenance::shared_keyphrase;
  throw Error(ErrorKind::parse_error, "unknown provenance: " + name);
}

const Document& Corpus::at(const std::string& id) const {
  const Document* doc = find(id);
  if (!doc) {
    throw Error(ErrorKind::unresolved_doc_id, "no document with id " + id);
  }
  return *doc;
}

void Corpus::add(Document doc) {
  if (index_.count(doc.id)) {
    throw Error(ErrorKind::duplicate_id, "duplicate document id " + doc.id);
  }
  index_.emplace(doc.id, documents_.size());
  documents_.push_back(std::move(doc));
}

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::io_error, "cannot open " + path);
  }
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorKind::io_error, "cannot write " + path);
  }
  return out;
}

json parse_line(const std::string& line, std::size_t lineno,
                const std::string& path) {
  json record = json::parse(line, nullptr, false);
  if (record.is_discarded() || !record.is_object()) {
    throw Error(ErrorKind::parse_error,
                path + ":" + std::to_string(lineno) + ": invalid record");
  }
  return record;
}

std::vector<std::string> split_semicolons(const std::string& joined) {
  std::vector<std::string> out;
  std::stringstream ss(joined);
  std::string part;
  while (std::getline(ss, part, ';')) {
    std::size_t b = part.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    std::size_t e = part.find_last_not_of(" \t");
    out.push_back(part.substr(b, e - b + 1));
  }
  return out;
}

// Keyphrase fields appear as arrays or as one ';'-joined string in the
// public distributions; both are accepted.
std::vector<std::string> read_keyphrases(const json& value, bool* split) {
  std::vector<std::string> out;
  if (value.is_array()) {
    for (const auto& item : value) {
      if (item.is_string()) out.push_back(item.get<std::string>());
    }
  } else if (value.is_string()) {
    out = split_semicolons(value.get<std::string>());
    if (split) *split = true;
  }
  return out;
}

std::string meta_value(const json& value) {
  return value.is_string() ? value.get<std::string>() : value.dump();
}

}  // namespace

Corpus load_corpus(const std::string& path, LoadSummary* summary,
                   const FieldMapping& fields) {
  std::ifstream in = open_input(path);
  Corpus result;
  LoadSummary counts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    json record = parse_line(line, lineno, path);

    Document doc;
    if (record.contains(fields.id) && record[fields.id].is_string()) {
      doc.id = record[fields.id].get<std::string>();
    } else if (record.contains(fields.id)) {
      doc.id = record[fields.id].dump();
    } else {
      doc.id = "line-" + std::to_string(lineno);
      ++counts.synthesized_ids;
    }
    if (record.contains(fields.title) && record[fields.title].is_string()) {
      doc.title = record[fields.title].get<std::string>();
    }
    std::string body_key = fields.body;
    if (!record.contains(body_key)) {
      for (const auto& alias : fields.body_aliases) {
        if (record.contains(alias)) {
          body_key = alias;
          break;
        }
      }
    }
    if (record.contains(body_key) && record[body_key].is_string()) {
      doc.body = record[body_key].get<std::string>();
    }
    if (doc.title.empty() && doc.body.empty()) {
      throw Error(ErrorKind::missing_field,
                  path + ":" + std::to_string(lineno) +
                      ": record has neither title nor " + fields.body);
    }

    std::string kp_key = fields.keyphrases;
    if (!record.contains(kp_key)) {
      for (const auto& alias : fields.keyphrase_aliases) {
        if (record.contains(alias)) {
          kp_key = alias;
          break;
        }
      }
    }
    if (record.contains(kp_key)) {
      bool split = false;
      doc.references = read_keyphrases(record[kp_key], &split);
      if (split) ++counts.semicolon_split;
    }

    for (const auto& [key, value] : record.items()) {
      if (key == fields.id || key == fields.title || key == body_key ||
          key == kp_key) {
        continue;
      }
      doc.meta[key] = meta_value(value);
    }

    try {
      result.add(std::move(doc));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::duplicate_id) {
        throw Error(ErrorKind::duplicate_id,
                    path + ":" + std::to_string(lineno) + ": " + e.what());
      }
      throw;
    }
  }
  counts.documents = result.size();
  if (summary) *summary = counts;
  return result;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out = open_output(path);
  for (const auto& doc : corpus.documents()) {
    json record;
    record["id"] = doc.id;
    record["title"] = doc.title;
    record["abstract"] = doc.body;
    record["keyphrases"] = doc.references;
    for (const auto& [key, value] : doc.meta) record[key] = value;
    out << record.dump() << "\n";
  }
  if (!out) throw Error(ErrorKind::io_error, "write failed: " + path);
}

PredictionsLoad load_predictions(const std::string& path,
                                 const Corpus* corpus) {
  std::ifstream in = open_input(path);
  PredictionsLoad result;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    json record = parse_line(line, lineno, path);
    PredictionSet pred;
    if (!record.contains("doc_id") || !record.contains("system")) {
      throw Error(ErrorKind::missing_field,
                  path + ":" + std::to_string(lineno) +
                      ": prediction needs doc_id and system");
    }
    pred.doc_id = record["doc_id"].get<std::string>();
    pred.system = record["system"].get<std::string>();
    if (record.contains("keyphrases")) {
      pred.keyphrases = read_keyphrases(record["keyphrases"], nullptr);
    }
    auto key = std::make_pair(pred.system, pred.doc_id);
    if (result.predictions.count(key)) {
      throw Error(ErrorKind::duplicate_prediction,
                  path + ":" + std::to_string(lineno) + ": system " +
                      pred.system + " already has predictions for " +
                      pred.doc_id);
    }
    if (std::find(result.systems.begin(), result.systems.end(), pred.system) ==
        result.systems.end()) {
      result.systems.push_back(pred.system);
    }
    if (corpus && !corpus->find(pred.doc_id)) ++result.unknown_doc_warnings;
    result.predictions.emplace(std::move(key), std::move(pred));
  }
  return result;
}

void save_predictions(const std::vector<PredictionSet>& predictions,
                      const std::string& path) {
  std::ofstream out = open_output(path);
  for (const auto& pred : predictions) {
    json record;
    record["doc_id"] = pred.doc_id;
    record["system"] = pred.system;
    record["keyphrases"] = pred.keyphrases;
    out << record.dump() << "\n";
  }
  if (!out) throw Error(ErrorKind::io_error, "write failed: " + path);
}

std::vector<DocumentPair> load_pairs(const std::string& path,
                                     const Corpus* corpus) {
  std::ifstream in = open_input(path);
  std::vector<DocumentPair> pairs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    json record = parse_line(line, lineno, path);
    DocumentPair pair;
    try {
      pair.pair_id = record.at("pair_id").get<std::string>();
      pair.doc_a = record.at("doc_a").get<std::string>();
      pair.doc_b = record.at("doc_b").get<std::string>();
      pair.provenance =
          provenance_from_string(record.at("provenance").get<std::string>());
      pair.reference_similarity = record.at("reference_similarity").get<double>();
    } catch (const json::exception& e) {
      throw Error(ErrorKind::parse_error,
                  path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (corpus) {
      if (!corpus->find(pair.doc_a)) {
        throw Error(ErrorKind::unresolved_doc_id,
                    path + ":" + std::to_string(lineno) +
                        ": unknown document " + pair.doc_a);
      }
      if (!corpus->find(pair.doc_b)) {
        throw Error(ErrorKind::unresolved_doc_id,
                    path + ":" + std::to_string(lineno) +
                        ": unknown document " + pair.doc_b);
      }
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

void save_pairs(const std::vector<DocumentPair>& pairs,
                const std::string& path) {
  std::ofstream out = open_output(path);
  out << "# pairs: pair_id doc_a doc_b provenance reference_similarity\n";
  for (const auto& pair : pairs) {
    json record;
    record["pair_id"] = pair.pair_id;
    record["doc_a"] = pair.doc_a;
    record["doc_b"] = pair.doc_b;
    record["provenance"] = to_string(pair.provenance);
    record["reference_similarity"] = pair.reference_similarity;
    out << record.dump() << "\n";
  }
  if (!out) throw Error(ErrorKind::io_error, "write failed: " + path);
}

std::uint64_t file_fingerprint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_error, "cannot open " + path);
  std::uint64_t h = 14695981039346656037ull;
  char buffer[1 << 14];
  while (in.read(buffer, sizeof buffer) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buffer[i]);
      h *= 1099511628211ull;
    }
  }
  return h;
}

std::string fingerprint_hex(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace corpus
}  // namespace kphom
