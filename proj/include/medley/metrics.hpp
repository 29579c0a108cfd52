#pragma once

#include <map>
#include <optional>
#include <string>

#include "medley/core.hpp"
#include "medley/errors.hpp"

namespace medley {

// Empirical distribution over scalar values.
struct Histogram {
  std::vector<std::pair<double, double>> bins;  // (value, mass), values strictly increasing
  double total_mass = 0.0;

  static Histogram from_values(const std::vector<double>& values);
  void normalize();
  bool is_normalized() const;
};

// Distribution over canonical sounding-pitch combinations.
using PitchCombo = std::vector<int>;  // sorted distinct pitches; empty = silence
struct ComboHistogram {
  std::map<PitchCombo, double> bins;
  double total_mass = 0.0;
  void normalize();
};

struct MetricReport {
  std::string metric;
  double raw_distance = 0.0;
  double baseline_mean = 0.0;
  double baseline_std = 0.0;
  std::optional<double> normalized;  // null when the baseline has zero spread
  int n_splits = 0;
  uint64_t seed = 0;
};

struct RepetitionBreakdown {
  int pbar_max = 0;
  int pquarter_max = 0;
  double bar_score_scaled = 0.0;
  double quarter_score_scaled = 0.0;
  double repetition_score = 0.0;
  bool degenerate_single_bar = false;  // bar component pinned to 1.0
};

// Minor second, tritone, major seventh, modulo octaves.
bool is_dissonant(int interval);

// Share of dissonant intervals among all C(v,2) pitch pairs of one chord.
double dissonant_ratio(const std::vector<int>& chord);

// Distinct sounding pitches per step, hold symbols resolved. Legacy rolls
// resolve the shared hold by run; a leading hold degenerates to pitch 1.
std::vector<PitchCombo> step_pitch_combos(const PianoRoll& roll);

// Per-step dissonant ratios; steps with fewer than two pitches skipped.
std::vector<double> piece_dissonant_values(const PianoRoll& roll);
// Mean of piece_dissonant_values, or nothing for a roll with no polyphony.
std::optional<double> piece_dissonance(const PianoRoll& roll);

double silent_ratio(const PianoRoll& roll);          // zero cells / all cells
double variety_ratio(const PianoRoll& roll);         // distinct pitches / 128
double variety_score(const PianoRoll& roll);         // distinct step combos / steps
double length_variety_ratio(const PianoRoll& roll);  // hold cells / non-silent cells
double avg_note_length(const PianoRoll& roll);       // mean note length in steps; 0 if empty

RepetitionBreakdown repetition_score(const PianoRoll& roll);

// Pooled combination distribution of a corpus, normalized to mass 1.
ComboHistogram note_combination_distribution(const std::vector<PianoRoll>& rolls);

// Area between CDFs; both inputs must be normalized.
double wasserstein_1d(const Histogram& a, const Histogram& b);
// Half L1 between mass functions; both inputs must be normalized.
double total_variation(const Histogram& a, const Histogram& b);
double total_variation(const ComboHistogram& a, const ComboHistogram& b);

// Distance between the generated distribution and the full reference,
// normalized against distances between seeded random half/half splits of
// the reference: z = (raw - mean) / std over n_splits splits.
MetricReport normalized_score(const std::string& metric_name,
                              const std::vector<double>& generated_values,
                              const std::vector<double>& reference_values, int n_splits,
                              uint64_t seed);

// Same construction for combination distributions, compared with total
// variation. Each reference piece contributes its per-step combos.
MetricReport normalized_score_combinations(const std::string& metric_name,
                                           const std::vector<PianoRoll>& generated,
                                           const std::vector<PianoRoll>& reference, int n_splits,
                                           uint64_t seed);

// Harmony regularizer: proportion of adjacent-voice intervals that agree
// between the two rolls, pooled over all steps, as -log(max(rho, 1e-6)).
double interval_match_regularizer(const PianoRoll& generated, const PianoRoll& reference);

}  // namespace medley
