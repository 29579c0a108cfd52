#pragma once

#include <string>
#include <string_view>

#include "medley/core.hpp"
#include "medley/errors.hpp"
#include "medley/filter.hpp"

namespace medley {

// Encodes a quantized note slice into roll symbols. In the doubled scheme
// pitch p onsets as p and sustains as p+128; the legacy scheme sustains
// every pitch with the shared symbol 129. Chords are stacked into voices
// by descending pitch, with a sustained note keeping its previous voice.
// More simultaneous notes than voices keeps the highest and reports the
// rest through `audit`.
PianoRoll encode(const NoteSlice& slice, int bars, int voices, Scheme scheme,
                 Audit* audit = nullptr);

// Inverse of encode. Doubled rolls must be normalized (see
// normalize_holds); decode then never fails. Returned notes carry the
// voice they were read from.
NoteSlice decode(const PianoRoll& roll);

// Repairs mismatched hold symbols: a hold whose predecessor sounds a
// different pitch snaps to that pitch's hold; a hold at step 0 or after
// silence becomes its own onset. Doubled scheme only.
PianoRoll normalize_holds(const PianoRoll& roll);

// .mdlr binary format: "MDLR", u16 version, u16 bars, u16 steps-per-bar,
// u16 voices, u8 scheme, then bar-major u16 cells. Little-endian.
std::string to_mdlr(const PianoRoll& roll);
PianoRoll from_mdlr(std::string_view bytes);

// CSV mirror: one row per (bar, step), one column per voice.
std::string to_csv(const PianoRoll& roll);
PianoRoll from_csv(std::string_view text, Scheme scheme);

}  // namespace medley
