#pragma once

#include "medley/core.hpp"
#include "medley/errors.hpp"
#include "medley/playback.hpp"

namespace medley {

enum class VividMode { All4, Any1 };

struct FilterConfig {
  int min_starts_per_half_bar = 1;
  double tempo_tolerance_bpm = 0.5;
  VividMode vivid_mode = VividMode::All4;
};

// True when the transition is lively enough to learn from. In All4 mode
// every one of the four half bars around the TP (two before, two after)
// needs at least min_starts_per_half_bar note onsets; Any1 keeps the
// transition if any of the four has an onset.
bool is_vivid(const Song& song, int bar_offset, const FilterConfig& config = {});

// True when the 12-bar window around the TP stays in a 4/4-reducible
// signature (numerator == denominator, so bars hold 16 sixteenths) and the
// tempo spread over the window is at most tempo_tolerance_bpm.
bool beat_ok(const Song& song, int bar_offset, const FilterConfig& config = {});

// One quantized note inside a 12-bar window: step coordinates on the
// 1/16 grid, step 0 = start of the window's first bar.
struct SlicedNote {
  int step = 0;
  int length = 1;  // in steps
  int pitch = 0;   // 1..128
  int voice = -1;  // set by decode; ignored by encode

  auto operator<=>(const SlicedNote&) const = default;
};

using NoteSlice = std::vector<SlicedNote>;

// Cuts the 12-bar window [bar_offset-6, bar_offset+5] and quantizes it to
// the 1/16 grid (round half up). Notes crossing the window edges are
// truncated; notes shorter than half a step vanish.
NoteSlice slice_sample(const Song& song, int bar_offset, Audit* audit = nullptr);

// Quantizes an arbitrary bar window [first_bar, first_bar + bars - 1].
NoteSlice slice_window(const Song& song, int first_bar, int bars, Audit* audit = nullptr);

// Slices and encodes the 12-bar doubled-scheme sample around a TP,
// stamping the tempo at the transition instant and the source location.
TransitionSample make_transition_sample(const Song& song, int bar_offset, int voices,
                                        Audit* audit = nullptr);

}  // namespace medley
