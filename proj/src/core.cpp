#include "medley/core.hpp"

namespace medley {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::UnsupportedSmfType: return "UnsupportedSmfType";
    case Errc::NotAZipOrXml: return "NotAZipOrXml";
    case Errc::MissingContainerRootfile: return "MissingContainerRootfile";
    case Errc::XmlSyntax: return "XmlSyntax";
    case Errc::UnbalancedRepeat: return "UnbalancedRepeat";
    case Errc::BarOutOfRange: return "BarOutOfRange";
    case Errc::AlignmentMismatch: return "AlignmentMismatch";
    case Errc::InsufficientContext: return "InsufficientContext";
    case Errc::SongTooShort: return "SongTooShort";
    case Errc::TooManyVoices: return "TooManyVoices";
    case Errc::LegacySchemeUnsupported: return "LegacySchemeUnsupported";
    case Errc::KOutOfRange: return "KOutOfRange";
    case Errc::FewerThanTwoVoices: return "FewerThanTwoVoices";
    case Errc::EmptyCorpus: return "EmptyCorpus";
    case Errc::UnnormalizedInput: return "UnnormalizedInput";
    case Errc::ZeroBaselineStd: return "ZeroBaselineStd";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::NoInputFiles: return "NoInputFiles";
    case Errc::UnpairedFile: return "UnpairedFile";
    case Errc::BadConfig: return "BadConfig";
    case Errc::IoFailure: return "IoFailure";
  }
  return "UnknownError";
}

std::set<int> sounding_pitches(const RollGrid& grid, int bar, int step) {
  std::set<int> pitches;
  for (int voice = 0; voice < grid.voices; ++voice) {
    int symbol = grid.cell(bar, step, voice);
    if (is_onset(symbol)) {
      pitches.insert(symbol);
    } else if (symbol > kPitchMax && symbol <= kPitchMax + kHoldOffset) {
      pitches.insert(symbol - kHoldOffset);
    }
  }
  return pitches;
}

}  // namespace medley
