#include "medley/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

namespace medley {

namespace {

constexpr double kMassTolerance = 1e-9;
constexpr double kRhoFloor = 1e-6;

void require_normalized(double total_mass) {
  if (std::abs(total_mass - 1.0) > kMassTolerance)
    throw MedleyError(Errc::UnnormalizedInput,
                      "histogram mass " + std::to_string(total_mass) + " != 1");
}

// Per-voice sounding pitch at every step (0 = silent). Resolves legacy
// holds by tracking the run within each voice.
std::vector<std::vector<int>> voice_pitch_matrix(const PianoRoll& roll) {
  const int steps = roll.grid.steps();
  std::vector<std::vector<int>> pitch(steps, std::vector<int>(roll.grid.voices, 0));
  for (int v = 0; v < roll.grid.voices; ++v) {
    int running = 0;
    for (int t = 0; t < steps; ++t) {
      int symbol = roll.grid.at_step(t, v);
      if (is_onset(symbol)) running = symbol;
      else if (symbol == kSilence) running = 0;
      else if (roll.scheme == Scheme::Doubled) running = symbol - kHoldOffset;
      else if (running == 0) running = symbol - kHoldOffset;  // leading legacy hold
      pitch[t][v] = running;
    }
  }
  return pitch;
}

}  // namespace

Histogram Histogram::from_values(const std::vector<double>& values) {
  Histogram h;
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  for (double v : sorted) {
    if (!h.bins.empty() && h.bins.back().first == v) h.bins.back().second += 1.0;
    else h.bins.emplace_back(v, 1.0);
    h.total_mass += 1.0;
  }
  h.normalize();
  return h;
}

void Histogram::normalize() {
  if (total_mass <= 0.0) return;
  for (auto& [value, mass] : bins) mass /= total_mass;
  total_mass = 1.0;
}

bool Histogram::is_normalized() const { return std::abs(total_mass - 1.0) <= kMassTolerance; }

void ComboHistogram::normalize() {
  if (total_mass <= 0.0) return;
  for (auto& [combo, mass] : bins) mass /= total_mass;
  total_mass = 1.0;
}

bool is_dissonant(int interval) {
  int cls = interval % 12;
  return cls == 1 || cls == 6 || cls == 11;
}

double dissonant_ratio(const std::vector<int>& chord) {
  const int v = static_cast<int>(chord.size());
  if (v < 2)
    throw MedleyError(Errc::FewerThanTwoVoices, "dissonant_ratio needs at least two pitches");
  int dissonant = 0, pairs = 0;
  for (int i = 0; i < v; ++i) {
    for (int j = i + 1; j < v; ++j) {
      ++pairs;
      if (is_dissonant(std::abs(chord[i] - chord[j]) % 12)) ++dissonant;
    }
  }
  return static_cast<double>(dissonant) / pairs;
}

std::vector<PitchCombo> step_pitch_combos(const PianoRoll& roll) {
  auto matrix = voice_pitch_matrix(roll);
  std::vector<PitchCombo> combos;
  combos.reserve(matrix.size());
  for (const auto& row : matrix) {
    std::set<int> distinct;
    for (int p : row)
      if (p != 0) distinct.insert(p);
    combos.emplace_back(distinct.begin(), distinct.end());
  }
  return combos;
}

std::vector<double> piece_dissonant_values(const PianoRoll& roll) {
  std::vector<double> values;
  for (const auto& combo : step_pitch_combos(roll))
    if (combo.size() >= 2) values.push_back(dissonant_ratio(combo));
  return values;
}

std::optional<double> piece_dissonance(const PianoRoll& roll) {
  auto values = piece_dissonant_values(roll);
  if (values.empty()) return std::nullopt;
  return std::accumulate(values.begin(), values.end(), 0.0) / values.size();
}

double silent_ratio(const PianoRoll& roll) {
  if (roll.grid.cells.empty()) return 1.0;
  size_t zeros = std::count(roll.grid.cells.begin(), roll.grid.cells.end(), uint16_t{0});
  return static_cast<double>(zeros) / roll.grid.cells.size();
}

double variety_ratio(const PianoRoll& roll) {
  std::set<int> pitches;
  for (const auto& combo : step_pitch_combos(roll)) pitches.insert(combo.begin(), combo.end());
  return static_cast<double>(pitches.size()) / kPitchMax;
}

double variety_score(const PianoRoll& roll) {
  auto combos = step_pitch_combos(roll);
  if (combos.empty()) return 0.0;
  std::set<PitchCombo> distinct(combos.begin(), combos.end());
  return static_cast<double>(distinct.size()) / combos.size();
}

double length_variety_ratio(const PianoRoll& roll) {
  size_t holds = 0, nonsilent = 0;
  for (uint16_t cell : roll.grid.cells) {
    if (cell == kSilence) continue;
    ++nonsilent;
    if (is_hold(cell, roll.scheme)) ++holds;
  }
  return nonsilent ? static_cast<double>(holds) / nonsilent : 0.0;
}

double avg_note_length(const PianoRoll& roll) {
  size_t onsets = 0, nonsilent = 0;
  for (uint16_t cell : roll.grid.cells) {
    if (cell == kSilence) continue;
    ++nonsilent;
    if (is_onset(cell)) ++onsets;
  }
  return onsets ? static_cast<double>(nonsilent) / onsets : 0.0;
}

RepetitionBreakdown repetition_score(const PianoRoll& roll) {
  const int b = roll.grid.bars;
  const int v = roll.grid.voices;
  if (b < 1) throw MedleyError(Errc::ShapeMismatch, "repetition_score needs at least one bar");
  constexpr int kQuartersPerBar = 4;
  constexpr int kStepsPerQuarter = kStepsPerBar / kQuartersPerBar;

  auto block = [&](int bar, int quarter_begin, int quarter_steps) {
    std::vector<uint16_t> cells;
    cells.reserve(static_cast<size_t>(quarter_steps) * v);
    for (int s = quarter_begin; s < quarter_begin + quarter_steps; ++s)
      for (int voice = 0; voice < v; ++voice) cells.push_back(roll.grid.cell(bar, s, voice));
    return cells;
  };

  std::map<std::vector<uint16_t>, int> bar_patterns;
  std::map<std::vector<uint16_t>, int> quarter_patterns;
  for (int bar = 0; bar < b; ++bar) {
    ++bar_patterns[block(bar, 0, kStepsPerBar)];
    for (int q = 0; q < kQuartersPerBar; ++q)
      ++quarter_patterns[block(bar, q * kStepsPerQuarter, kStepsPerQuarter)];
  }

  RepetitionBreakdown out;
  for (const auto& [pattern, count] : bar_patterns) out.pbar_max = std::max(out.pbar_max, count);
  for (const auto& [pattern, count] : quarter_patterns)
    out.pquarter_max = std::max(out.pquarter_max, count);

  const double quarters_total = static_cast<double>(kQuartersPerBar) * b;
  const double quarter_score = out.pquarter_max / quarters_total;
  const double quarter_min = 1.0 / quarters_total;
  out.quarter_score_scaled = (quarter_score - quarter_min) / (1.0 - quarter_min);

  if (b == 1) {
    out.degenerate_single_bar = true;
    out.bar_score_scaled = 1.0;
  } else {
    const double bar_score = static_cast<double>(out.pbar_max) / b;
    const double bar_min = 1.0 / b;
    out.bar_score_scaled = (bar_score - bar_min) / (1.0 - bar_min);
  }
  out.repetition_score = (out.bar_score_scaled + out.quarter_score_scaled) / 2.0;
  return out;
}

ComboHistogram note_combination_distribution(const std::vector<PianoRoll>& rolls) {
  if (rolls.empty())
    throw MedleyError(Errc::EmptyCorpus, "note_combination_distribution needs rolls");
  ComboHistogram h;
  for (const auto& roll : rolls) {
    for (auto& combo : step_pitch_combos(roll)) {
      h.bins[combo] += 1.0;
      h.total_mass += 1.0;
    }
  }
  h.normalize();
  return h;
}

double wasserstein_1d(const Histogram& a, const Histogram& b) {
  require_normalized(a.total_mass);
  require_normalized(b.total_mass);
  size_t i = 0, j = 0;
  double cdf_a = 0.0, cdf_b = 0.0, distance = 0.0;
  std::optional<double> previous;
  while (i < a.bins.size() || j < b.bins.size()) {
    double x;
    if (j >= b.bins.size() || (i < a.bins.size() && a.bins[i].first <= b.bins[j].first))
      x = a.bins[i].first;
    else
      x = b.bins[j].first;
    if (previous) distance += std::abs(cdf_a - cdf_b) * (x - *previous);
    while (i < a.bins.size() && a.bins[i].first == x) cdf_a += a.bins[i++].second;
    while (j < b.bins.size() && b.bins[j].first == x) cdf_b += b.bins[j++].second;
    previous = x;
  }
  return distance;
}

double total_variation(const Histogram& a, const Histogram& b) {
  require_normalized(a.total_mass);
  require_normalized(b.total_mass);
  std::map<double, double> delta;
  for (const auto& [value, mass] : a.bins) delta[value] += mass;
  for (const auto& [value, mass] : b.bins) delta[value] -= mass;
  double l1 = 0.0;
  for (const auto& [value, d] : delta) l1 += std::abs(d);
  return 0.5 * l1;
}

double total_variation(const ComboHistogram& a, const ComboHistogram& b) {
  require_normalized(a.total_mass);
  require_normalized(b.total_mass);
  double l1 = 0.0;
  auto ia = a.bins.begin();
  auto ib = b.bins.begin();
  while (ia != a.bins.end() || ib != b.bins.end()) {
    if (ib == b.bins.end() || (ia != a.bins.end() && ia->first < ib->first)) {
      l1 += std::abs(ia->second);
      ++ia;
    } else if (ia == a.bins.end() || ib->first < ia->first) {
      l1 += std::abs(ib->second);
      ++ib;
    } else {
      l1 += std::abs(ia->second - ib->second);
      ++ia, ++ib;
    }
  }
  return 0.5 * l1;
}

namespace {

// Deterministic shuffle independent of the standard library's
// distribution internals, so seeded runs reproduce everywhere.
void shuffle_indices(std::vector<size_t>& indices, std::mt19937_64& rng) {
  for (size_t i = indices.size(); i > 1; --i)
    std::swap(indices[i - 1], indices[rng() % i]);
}

struct Baseline {
  double mean = 0.0;
  double stddev = 0.0;
};

Baseline summarize(const std::vector<double>& distances) {
  Baseline b;
  b.mean = std::accumulate(distances.begin(), distances.end(), 0.0) / distances.size();
  double ss = 0.0;
  for (double d : distances) ss += (d - b.mean) * (d - b.mean);
  b.stddev = distances.size() > 1 ? std::sqrt(ss / (distances.size() - 1)) : 0.0;
  return b;
}

void check_corpus(size_t reference_size, int n_splits) {
  if (reference_size < 4)
    throw MedleyError(Errc::EmptyCorpus, "reference corpus needs at least 4 pieces");
  if (n_splits < 2) throw MedleyError(Errc::BadConfig, "n_splits must be at least 2");
}

MetricReport finish_report(std::string name, double raw, const std::vector<double>& split_distances,
                           int n_splits, uint64_t seed) {
  Baseline baseline = summarize(split_distances);
  MetricReport report;
  report.metric = std::move(name);
  report.raw_distance = raw;
  report.baseline_mean = baseline.mean;
  report.baseline_std = baseline.stddev;
  report.n_splits = n_splits;
  report.seed = seed;
  if (baseline.stddev > 1e-15)
    report.normalized = (raw - baseline.mean) / baseline.stddev;
  return report;
}

}  // namespace

MetricReport normalized_score(const std::string& metric_name,
                              const std::vector<double>& generated_values,
                              const std::vector<double>& reference_values, int n_splits,
                              uint64_t seed) {
  check_corpus(reference_values.size(), n_splits);
  Histogram reference = Histogram::from_values(reference_values);
  Histogram generated = Histogram::from_values(generated_values);
  double raw = wasserstein_1d(generated, reference);

  std::mt19937_64 rng(seed);
  std::vector<size_t> indices(reference_values.size());
  std::iota(indices.begin(), indices.end(), size_t{0});
  std::vector<double> distances;
  distances.reserve(n_splits);
  for (int split = 0; split < n_splits; ++split) {
    shuffle_indices(indices, rng);
    size_t half = indices.size() / 2;
    std::vector<double> left, right;
    for (size_t i = 0; i < indices.size(); ++i)
      (i < half ? left : right).push_back(reference_values[indices[i]]);
    distances.push_back(wasserstein_1d(Histogram::from_values(left), Histogram::from_values(right)));
  }
  return finish_report(metric_name, raw, distances, n_splits, seed);
}

MetricReport normalized_score_combinations(const std::string& metric_name,
                                           const std::vector<PianoRoll>& generated,
                                           const std::vector<PianoRoll>& reference, int n_splits,
                                           uint64_t seed) {
  check_corpus(reference.size(), n_splits);
  if (generated.empty()) throw MedleyError(Errc::EmptyCorpus, "generated corpus is empty");
  double raw = total_variation(note_combination_distribution(generated),
                               note_combination_distribution(reference));

  std::mt19937_64 rng(seed);
  std::vector<size_t> indices(reference.size());
  std::iota(indices.begin(), indices.end(), size_t{0});
  std::vector<double> distances;
  distances.reserve(n_splits);
  for (int split = 0; split < n_splits; ++split) {
    shuffle_indices(indices, rng);
    size_t half = indices.size() / 2;
    std::vector<PianoRoll> left, right;
    for (size_t i = 0; i < indices.size(); ++i)
      (i < half ? left : right).push_back(reference[indices[i]]);
    distances.push_back(total_variation(note_combination_distribution(left),
                                        note_combination_distribution(right)));
  }
  return finish_report(metric_name, raw, distances, n_splits, seed);
}

double interval_match_regularizer(const PianoRoll& generated, const PianoRoll& reference) {
  if (generated.grid.bars != reference.grid.bars ||
      generated.grid.voices != reference.grid.voices)
    throw MedleyError(Errc::ShapeMismatch, "rolls differ in bars or voices");
  const int v = generated.grid.voices;
  if (v < 2)
    throw MedleyError(Errc::FewerThanTwoVoices, "interval regularizer needs at least two voices");

  auto gen = voice_pitch_matrix(generated);
  auto ref = voice_pitch_matrix(reference);
  int64_t comparable = 0, matching = 0;
  for (size_t t = 0; t < gen.size(); ++t) {
    for (int j = 0; j + 1 < v; ++j) {
      bool has_gen = gen[t][j] > 0 && gen[t][j + 1] > 0;
      bool has_ref = ref[t][j] > 0 && ref[t][j + 1] > 0;
      if (!has_gen && !has_ref) continue;
      ++comparable;
      if (has_gen && has_ref &&
          std::abs(gen[t][j] - gen[t][j + 1]) == std::abs(ref[t][j] - ref[t][j + 1]))
        ++matching;
    }
  }
  double rho = comparable ? static_cast<double>(matching) / comparable : 1.0;
  return -std::log(std::max(rho, kRhoFloor));
}

}  // namespace medley
