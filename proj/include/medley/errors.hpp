#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace medley {

enum class Errc {
  // score-io
  MalformedHeader,
  UnsupportedSmfType,
  NotAZipOrXml,
  MissingContainerRootfile,
  XmlSyntax,
  UnbalancedRepeat,
  BarOutOfRange,
  AlignmentMismatch,
  // filtering / slicing
  InsufficientContext,
  SongTooShort,
  // codec / augmentation
  TooManyVoices,
  LegacySchemeUnsupported,
  KOutOfRange,
  // metrics
  FewerThanTwoVoices,
  EmptyCorpus,
  UnnormalizedInput,
  ZeroBaselineStd,
  ShapeMismatch,
  // cli
  NoInputFiles,
  UnpairedFile,
  BadConfig,
  IoFailure,
};

const char* errc_name(Errc c);

class MedleyError : public std::runtime_error {
 public:
  MedleyError(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

// Non-fatal diagnostics collected while parsing or filtering. A null sink
// discards them.
struct AuditRecord {
  std::string code;
  std::string message;
};

using Audit = std::vector<AuditRecord>;

inline void audit_note(Audit* sink, std::string code, std::string message) {
  if (sink) sink->push_back({std::move(code), std::move(message)});
}

}  // namespace medley
