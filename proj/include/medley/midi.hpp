#pragma once

#include <string_view>

#include "medley/core.hpp"
#include "medley/errors.hpp"

namespace medley {

// Parses a Standard MIDI File (format 0 or 1) into the playback view.
// Note-on with velocity 0 closes the note like a note-off; a note-on left
// open at end of track is closed there and reported through `audit`.
// Two overlapping note-ons for the same key on one track close the earlier
// note at the later onset.
Song parse_midi(std::string_view bytes, Audit* audit = nullptr);

}  // namespace medley
