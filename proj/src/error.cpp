#include "kphom/error.hpp"

namespace kphom {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::empty_phrase: return "EmptyPhrase";
    case ErrorKind::empty_reference: return "EmptyReference";
    case ErrorKind::empty_original: return "EmptyOriginal";
    case ErrorKind::empty_document: return "EmptyDocument";
    case ErrorKind::empty_corpus: return "EmptyCorpus";
    case ErrorKind::insufficient_data: return "InsufficientData";
    case ErrorKind::constant_series: return "ConstantSeries";
    case ErrorKind::parse_error: return "ParseError";
    case ErrorKind::duplicate_id: return "DuplicateId";
    case ErrorKind::duplicate_prediction: return "DuplicatePrediction";
    case ErrorKind::missing_field: return "MissingField";
    case ErrorKind::unresolved_doc_id: return "UnresolvedDocId";
    case ErrorKind::missing_references: return "MissingReferences";
    case ErrorKind::no_references: return "NoReferences";
    case ErrorKind::no_overlap: return "NoOverlap";
    case ErrorKind::transport_error: return "TransportError";
    case ErrorKind::rate_limited: return "RateLimited";
    case ErrorKind::malformed_response: return "MalformedResponse";
    case ErrorKind::io_error: return "IoError";
  }
  return "Error";
}

}  // namespace kphom
