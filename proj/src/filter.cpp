#include "medley/filter.hpp"

#include <algorithm>
#include <cmath>

#include "medley/roll.hpp"

namespace medley {

namespace {

int onsets_in(const Song& song, int64_t begin, int64_t end) {
  int count = 0;
  for (const auto& note : song.notes)
    if (note.onset >= begin && note.onset < end) ++count;
  return count;
}

}  // namespace

bool is_vivid(const Song& song, int bar_offset, const FilterConfig& config) {
  if (bar_offset < 1)
    throw MedleyError(Errc::BarOutOfRange, "bar_offset " + std::to_string(bar_offset));
  BarGrid grid(song);
  const int64_t tp = grid.bar_start_tick(bar_offset);
  const int64_t before = bar_offset >= 2 ? grid.bar_start_tick(bar_offset - 1) : tp;
  const int64_t after = grid.bar_start_tick(bar_offset + 1);
  const int64_t halves[5] = {before, before + (tp - before) / 2, tp, tp + (after - tp) / 2, after};

  int needed = std::max(1, config.min_starts_per_half_bar);
  bool all = true, any = false;
  for (int h = 0; h < 4; ++h) {
    int starts = halves[h] < halves[h + 1] ? onsets_in(song, halves[h], halves[h + 1]) : 0;
    all = all && starts >= needed;
    any = any || starts >= 1;
  }
  return config.vivid_mode == VividMode::All4 ? all : any;
}

bool beat_ok(const Song& song, int bar_offset, const FilterConfig& config) {
  const int first_bar = bar_offset - 6;
  const int last_bar = bar_offset + 5;
  if (first_bar < 1 || last_bar > song_bar_count(song))
    throw MedleyError(Errc::BarOutOfRange,
                      "12-bar window around bar " + std::to_string(bar_offset));
  BarGrid grid(song);
  const int64_t window_begin = grid.bar_start_tick(first_bar);
  const int64_t window_end = grid.bar_start_tick(last_bar + 1);

  for (size_t i = 0; i < song.time_signatures.size(); ++i) {
    const auto& ts = song.time_signatures[i];
    int64_t active_until =
        i + 1 < song.time_signatures.size() ? song.time_signatures[i + 1].tick : window_end;
    if (ts.tick < window_end && active_until > window_begin) {
      if (ts.numerator != ts.denominator) return false;  // not reducible to 4/4
    }
  }

  double min_bpm = 0.0, max_bpm = 0.0;
  bool first = true;
  auto consider = [&](double bpm) {
    min_bpm = first ? bpm : std::min(min_bpm, bpm);
    max_bpm = first ? bpm : std::max(max_bpm, bpm);
    first = false;
  };
  consider(bpm_at_tick(song, window_begin));
  for (const auto& t : song.tempo_map)
    if (t.tick > window_begin && t.tick < window_end) consider(t.bpm());
  return max_bpm - min_bpm <= config.tempo_tolerance_bpm;
}

NoteSlice slice_window(const Song& song, int first_bar, int bars, Audit* audit) {
  BarGrid grid(song);
  const int64_t window_begin = grid.bar_start_tick(first_bar);
  const int64_t window_end = grid.bar_start_tick(first_bar + bars);
  const int total_steps = bars * kStepsPerBar;

  // Fractional step coordinate of a tick, bar-anchored so every bar holds
  // exactly 16 steps regardless of its tick length.
  auto step_of = [&](int64_t tick) -> double {
    int bar = grid.bar_of_tick(tick);
    bar = std::clamp(bar, first_bar, first_bar + bars - 1);
    int64_t begin = grid.bar_start_tick(bar);
    int64_t end = grid.bar_start_tick(bar + 1);
    double within = end > begin ? static_cast<double>(tick - begin) / (end - begin) : 0.0;
    return (bar - first_bar + within) * kStepsPerBar;
  };

  NoteSlice slice;
  for (const auto& note : song.notes) {
    int64_t begin = std::max(note.onset, window_begin);
    int64_t end = std::min(note.end(), window_end);
    if (end <= begin) continue;
    int on = static_cast<int>(std::floor(step_of(begin) + 0.5));
    int off = static_cast<int>(std::floor(step_of(end) + 0.5));
    on = std::clamp(on, 0, total_steps);
    off = std::clamp(off, 0, total_steps);
    if (off - on < 1) {
      audit_note(audit, "NoteDropped",
                 "sub-half-step note at tick " + std::to_string(note.onset) + " pitch " +
                     std::to_string(note.pitch));
      continue;
    }
    slice.push_back({on, off - on, note.pitch, -1});
  }
  std::sort(slice.begin(), slice.end(), [](const SlicedNote& a, const SlicedNote& b) {
    if (a.step != b.step) return a.step < b.step;
    return a.pitch > b.pitch;
  });
  return slice;
}

NoteSlice slice_sample(const Song& song, int bar_offset, Audit* audit) {
  const int first_bar = bar_offset - 6;
  if (first_bar < 1 || bar_offset + 5 > song_bar_count(song))
    throw MedleyError(Errc::InsufficientContext,
                      "12-bar window around bar " + std::to_string(bar_offset) +
                          " exceeds song bounds");
  return slice_window(song, first_bar, kSampleBars, audit);
}

TransitionSample make_transition_sample(const Song& song, int bar_offset, int voices,
                                        Audit* audit) {
  TransitionSample sample;
  sample.roll = encode(slice_sample(song, bar_offset, audit), kSampleBars, voices,
                       Scheme::Doubled, audit);
  sample.tempo_bpm = bpm_at_tick(song, BarGrid(song).bar_start_tick(bar_offset));
  sample.song_id = song.id;
  sample.bar_offset = bar_offset;
  return sample;
}

}  // namespace medley
