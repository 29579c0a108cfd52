#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "medley/errors.hpp"

namespace medley {

// Pitch space used throughout: 1..128, with 0 reserved for silence.
// MIDI key k maps to pitch k+1 so the full MIDI range fits without
// colliding with the silence symbol.
inline constexpr int kSilence = 0;
inline constexpr int kPitchMin = 1;
inline constexpr int kPitchMax = 128;
inline constexpr int kHoldOffset = 128;      // doubled scheme: hold of p is p+128
inline constexpr int kLegacyHold = 129;      // legacy scheme: shared hold symbol
inline constexpr int kStepsPerBar = 16;      // 1/16-note grid
inline constexpr int kSampleBars = 12;       // 4 past + 4 target + 4 future

struct NoteEvent {
  int pitch = 0;      // 1..128
  int64_t onset = 0;  // ticks
  int64_t duration = 0;
  int velocity = 0;   // 0..127
  int track = 0;
  std::optional<int> voice_hint;

  int64_t end() const { return onset + duration; }
};

struct TempoEvent {
  int64_t tick = 0;
  int64_t microseconds_per_quarter = 500000;
  double bpm() const { return 60.0e6 / static_cast<double>(microseconds_per_quarter); }
};

struct TimeSignatureEvent {
  int64_t tick = 0;
  int numerator = 4;
  int denominator = 4;
};

struct KeySignature {
  int sharps = 0;  // negative = flats
  bool minor = false;
  bool operator==(const KeySignature&) const = default;
};

struct KeySignatureEvent {
  int64_t tick = 0;
  KeySignature key;
};

// Playback view of one medley, as read from a Standard MIDI File.
// All event maps are sorted by tick and carry an entry at tick 0.
struct Song {
  int ticks_per_quarter = 480;
  std::vector<NoteEvent> notes;  // sorted by onset
  std::vector<TempoEvent> tempo_map;
  std::vector<TimeSignatureEvent> time_signatures;
  std::vector<KeySignatureEvent> key_signatures;
  std::vector<std::optional<int>> programs;  // one slot per track
  std::string title;
  std::string id;

  int64_t last_note_end() const {
    int64_t end = 0;
    for (const auto& n : notes) end = std::max(end, n.end());
    return end;
  }
};

enum class Placement { Unspecified, Above, Below };

struct Annotation {
  std::string text;
  Placement placement = Placement::Unspecified;
};

struct Measure {
  int index_real = 0;  // 1-based notation index
  std::vector<Annotation> annotations;
  std::optional<std::pair<int, int>> time_signature;  // (numerator, denominator)
  bool repeat_start = false;
  std::optional<int> repeat_end;  // total passes through the span, >= 1
};

// Notation view of the same medley, as read from (compressed) MusicXML.
struct ScoreDocument {
  std::vector<Measure> measures;  // index_real contiguous from 1
  std::vector<std::string> parts;
  std::string title;
};

// One labeled transition, anchored at the start of a bar.
struct TransitionPoint {
  std::string song_id;
  std::string text;
  int bar_real = 0;
  int bar_offset = 0;
  double time_seconds = 0.0;
  int notes_during = 0;
  double avg_note_length_seconds = 0.0;
  int notes_before_bar = 0;
  int notes_after_bar = 0;
  std::array<int, 4> half_bar_starts{0, 0, 0, 0};
};

struct RollShape {
  int bars = kSampleBars;
  int steps_per_bar = kStepsPerBar;
  int pitches = kPitchMax;
  int voices = 1;
};

enum class Scheme : uint8_t { Doubled = 0, Legacy = 1 };

// Dense b x 16 x v grid of note symbols. Cell layout is bar-major, then
// step, then voice.
struct RollGrid {
  int bars = 0;
  int voices = 0;
  std::vector<uint16_t> cells;

  RollGrid() = default;
  RollGrid(int b, int v) : bars(b), voices(v), cells(static_cast<size_t>(b) * kStepsPerBar * v, 0) {}

  int steps() const { return bars * kStepsPerBar; }
  size_t index(int bar, int step, int voice) const {
    return (static_cast<size_t>(bar) * kStepsPerBar + step) * voices + voice;
  }
  uint16_t& cell(int bar, int step, int voice) { return cells[index(bar, step, voice)]; }
  uint16_t cell(int bar, int step, int voice) const { return cells[index(bar, step, voice)]; }
  uint16_t& at_step(int global_step, int voice) {
    return cells[static_cast<size_t>(global_step) * voices + voice];
  }
  uint16_t at_step(int global_step, int voice) const {
    return cells[static_cast<size_t>(global_step) * voices + voice];
  }
  bool operator==(const RollGrid&) const = default;
};

struct PianoRoll {
  RollGrid grid;
  Scheme scheme = Scheme::Doubled;

  RollShape shape() const { return RollShape{grid.bars, kStepsPerBar, kPitchMax, grid.voices}; }
  bool operator==(const PianoRoll&) const = default;
};

// 12-bar sample around one transition point. Bars 0-3 are past context,
// 4-7 the target, 8-11 future context.
struct TransitionSample {
  PianoRoll roll;  // doubled scheme, 12 bars
  double tempo_bpm = 120.0;
  std::string song_id;
  int bar_offset = 0;
};

// Symbol classification. The three classes partition 0..256.
inline bool is_silence(int symbol) { return symbol == kSilence; }
inline bool is_onset(int symbol) { return symbol >= kPitchMin && symbol <= kPitchMax; }
inline bool is_hold(int symbol, Scheme scheme) {
  if (scheme == Scheme::Legacy) return symbol == kLegacyHold;
  return symbol > kPitchMax && symbol <= kPitchMax + kHoldOffset;
}

// Pitch sounding in a cell, or 0. Legacy hold symbols carry no pitch of
// their own and resolve to 0 here; callers that need the held pitch must
// track the run themselves.
inline int cell_pitch(int symbol, Scheme scheme = Scheme::Doubled) {
  if (is_onset(symbol)) return symbol;
  if (scheme == Scheme::Doubled && is_hold(symbol, scheme)) return symbol - kHoldOffset;
  return kSilence;
}

// Distinct pitches sounding at one (bar, step) across all voices, with
// hold symbols resolved to their underlying pitch.
std::set<int> sounding_pitches(const RollGrid& grid, int bar, int step);

}  // namespace medley
