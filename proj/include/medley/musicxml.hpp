#pragma once

#include <string_view>

#include "medley/core.hpp"
#include "medley/errors.hpp"

namespace medley {

// Parses compressed (.mxl) or bare MusicXML into the notation view.
// A ZIP archive is resolved through META-INF/container.xml; anything that
// is neither a ZIP nor an XML document raises NotAZipOrXml. Both
// score-partwise and score-timewise documents are accepted. Text
// directions are collected from every part; time signatures and repeat
// barlines come from the first part carrying them.
ScoreDocument parse_mxl(std::string_view bytes, Audit* audit = nullptr);

}  // namespace medley
