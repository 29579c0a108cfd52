#include "medley/stats.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "medley/playback.hpp"

namespace medley {

MedleySummary medley_summary(const Song& song) {
  MedleySummary s;
  s.duration_minutes = seconds_at_tick(song, song.last_note_end()) / 60.0;
  for (const auto& t : song.tempo_map)
    if (t.tick > 0) ++s.tempo_change_count;
  for (const auto& k : song.key_signatures)
    if (k.tick > 0) ++s.key_change_count;
  std::set<int> programs;
  for (const auto& p : song.programs)
    if (p) programs.insert(*p);
  s.instrument_count = static_cast<int>(programs.size());
  return s;
}

std::vector<ProgramProbability> instrumentation_distribution(const std::vector<Song>& corpus) {
  if (corpus.empty()) throw MedleyError(Errc::EmptyCorpus, "no songs");
  std::array<int, 128> counts{};
  for (const auto& song : corpus) {
    std::set<int> programs;
    for (const auto& p : song.programs)
      if (p && *p >= 0 && *p < 128) programs.insert(*p);
    for (int p : programs) ++counts[p];
  }
  std::vector<ProgramProbability> out;
  out.reserve(128);
  for (int p = 0; p < 128; ++p)
    out.push_back({p, static_cast<double>(counts[p]) / corpus.size()});
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.probability > b.probability;
  });
  return out;
}

int target_onset_count(const PianoRoll& sample) {
  int first_step = 4 * kStepsPerBar;
  int last_step = std::min(8 * kStepsPerBar, sample.grid.steps());
  int onsets = 0;
  for (int step = first_step; step < last_step; ++step)
    for (int v = 0; v < sample.grid.voices; ++v)
      if (is_onset(sample.grid.at_step(step, v))) ++onsets;
  return onsets;
}

Histogram transition_note_histogram(const std::vector<PianoRoll>& samples) {
  if (samples.empty()) throw MedleyError(Errc::EmptyCorpus, "no samples");
  std::vector<double> counts;
  counts.reserve(samples.size());
  for (const auto& sample : samples) counts.push_back(target_onset_count(sample));
  return Histogram::from_values(counts);
}

std::string instrumentation_csv(const std::vector<ProgramProbability>& distribution) {
  std::ostringstream out;
  out << "program,probability\n";
  for (const auto& row : distribution) out << row.program << ',' << row.probability << '\n';
  return out.str();
}

std::string note_histogram_csv(const Histogram& histogram) {
  std::ostringstream out;
  out << "note_count,frequency\n";
  for (const auto& [value, mass] : histogram.bins)
    out << static_cast<int64_t>(value) << ',' << mass << '\n';
  return out.str();
}

}  // namespace medley
