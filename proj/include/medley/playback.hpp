#pragma once

#include <map>

#include "medley/core.hpp"
#include "medley/errors.hpp"

namespace medley {

// Notation-to-playback alignment derived from repeat barlines.
struct PlaybackMap {
  std::vector<int> order;                        // bar_real in playback order
  std::map<int, std::vector<int>> real_to_offset;  // bar_real -> 1-based playback positions

  int first_offset(int bar_real) const {
    auto it = real_to_offset.find(bar_real);
    if (it == real_to_offset.end() || it->second.empty())
      throw MedleyError(Errc::BarOutOfRange, "bar_real " + std::to_string(bar_real));
    return it->second.front();
  }
};

// Expands forward/backward repeat pairs into playback order. A backward
// repeat without any opening starts its span at bar 1 for the first span
// and at the bar after the previous span otherwise; both emit an
// UnbalancedRepeat warning only when a forward repeat is genuinely missing
// after a previous span closed.
PlaybackMap expand_repeats(const ScoreDocument& doc, Audit* audit = nullptr);

// Bar arithmetic over a song's time-signature map. Bars are 1-based.
// A signature change restarts bar boundaries at its tick.
class BarGrid {
 public:
  explicit BarGrid(const Song& song);

  int64_t bar_start_tick(int bar) const;   // throws BarOutOfRange for bar < 1
  int64_t bar_end_tick(int bar) const { return bar_start_tick(bar + 1); }
  int bar_of_tick(int64_t tick) const;     // bar containing tick (tick >= 0)
  // Number of bars needed to cover [0, end_tick); 0 for an empty span.
  int bar_count(int64_t end_tick) const;

 private:
  struct Segment {
    int64_t start_tick;
    int first_bar;            // 1-based index of the first bar in this segment
    int64_t bar_ticks_num;    // bar length = num/den ticks, exact rational
    int64_t bar_ticks_den;
  };
  std::vector<Segment> segments_;
};

int song_bar_count(const Song& song);

// Seconds elapsed from tick 0 to `tick` under the song's tempo map.
double seconds_at_tick(const Song& song, int64_t tick);

// Start time of a bar in seconds; bar 1 starts at 0.
double time_of_bar(const Song& song, int bar_offset);

// Tempo in BPM at an instant.
double bpm_at_tick(const Song& song, int64_t tick);

}  // namespace medley
