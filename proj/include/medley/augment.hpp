#pragma once

#include <optional>

#include "medley/core.hpp"
#include "medley/errors.hpp"
#include "medley/filter.hpp"

namespace medley {

// Shifts every pitch by k semitones (|k| <= 11). Returns nothing when any
// pitch would leave 1..128; silence cells are untouched and onset/hold
// classes are preserved.
std::optional<PianoRoll> transpose(const PianoRoll& roll, int semitones);
std::optional<TransitionSample> transpose(const TransitionSample& sample, int semitones);

// All surviving transpositions for k in -11..-1, +1..+11, k ascending.
// At most 22; the original (k = 0) is not included.
std::vector<TransitionSample> vertical_variants(const TransitionSample& sample);
std::vector<PianoRoll> vertical_variants(const PianoRoll& roll);

// Number of shifts vertical_variants would keep, from the pitch span alone.
int vertical_variant_capacity(int min_pitch, int max_pitch);

// Every width-bar window of the song at one-bar stride, quantized like
// slice_sample. Throws SongTooShort when fewer than `width` bars exist.
std::vector<NoteSlice> horizontal_windows(const Song& song, int width = kSampleBars,
                                          int stride = 1, Audit* audit = nullptr);

}  // namespace medley
