#pragma once

#include "medley/core.hpp"
#include "medley/errors.hpp"
#include "medley/metrics.hpp"

namespace medley {

struct MedleySummary {
  double duration_minutes = 0.0;
  int key_change_count = 0;    // key-signature events after tick 0
  int tempo_change_count = 0;  // tempo events after tick 0
  int instrument_count = 0;    // distinct programs across tracks
};

MedleySummary medley_summary(const Song& song);

struct ProgramProbability {
  int program = 0;
  double probability = 0.0;
};

// Per-program probability of appearing in a medley, all 128 programs,
// sorted by probability descending (ties by program number).
std::vector<ProgramProbability> instrumentation_distribution(const std::vector<Song>& corpus);

// Histogram over the number of note onsets in the target bars (4..7) of
// each 12-bar sample.
Histogram transition_note_histogram(const std::vector<PianoRoll>& samples);
int target_onset_count(const PianoRoll& sample);

std::string instrumentation_csv(const std::vector<ProgramProbability>& distribution);
std::string note_histogram_csv(const Histogram& histogram);

}  // namespace medley
