#pragma once

#include <vector>

#include "medley/core.hpp"
#include "medley/extract.hpp"
#include "medley/filter.hpp"
#include "medley/metrics.hpp"

namespace medley::oracles {

// Optimal transport cost between two normalized scalar histograms with
// |x - y| ground cost, solved as a min-cost flow on the bipartite
// transportation graph (successive shortest paths).
double wasserstein_lp(const Histogram& a, const Histogram& b);

// Brute-force metric recomputation from decoded, voice-tagged notes.
double silent_ratio_from_notes(const NoteSlice& notes, int bars, int voices);
double length_variety_from_notes(const NoteSlice& notes);
double avg_note_length_from_notes(const NoteSlice& notes);
std::vector<double> dissonant_values_from_notes(const NoteSlice& notes, int total_steps);
double variety_score_from_notes(const NoteSlice& notes, int total_steps);
double variety_ratio_from_notes(const NoteSlice& notes);

// Rebuilds the cell grid from voice-tagged notes and counts pattern
// multiplicities with quadratic pairwise comparisons.
RepetitionBreakdown repetition_from_notes(const NoteSlice& notes, int bars, int voices,
                                          Scheme scheme);

// Exhaustive maximum matching for label evaluation on small instances.
int64_t max_matching_bruteforce(const std::vector<int>& predicted, const std::vector<int>& truth,
                                int window_bars);

}  // namespace medley::oracles
