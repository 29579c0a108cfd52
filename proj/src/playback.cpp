#include "medley/playback.hpp"

#include <algorithm>

namespace medley {

PlaybackMap expand_repeats(const ScoreDocument& doc, Audit* audit) {
  PlaybackMap map;
  const int n = static_cast<int>(doc.measures.size());
  bool forward_seen = false;
  bool any_span_closed = false;
  int bar = 1;
  // Bars accumulated since the current span opened. A span opens at a
  // forward repeat, after the previous backward repeat, or at bar 1.
  std::vector<int> pending;

  auto flush = [&](int passes) {
    for (int p = 0; p < passes; ++p)
      for (int b : pending) map.order.push_back(b);
    pending.clear();
  };

  while (bar <= n) {
    const Measure& m = doc.measures[bar - 1];
    if (m.repeat_start) {
      flush(1);
      forward_seen = true;
    }
    pending.push_back(bar);
    if (m.repeat_end.has_value()) {
      int passes = std::max(1, *m.repeat_end);
      if (!forward_seen && any_span_closed) {
        audit_note(audit, "UnbalancedRepeat",
                   "backward repeat at bar " + std::to_string(bar) + " has no opening");
      }
      // `pending` holds exactly the span: the lead-in was flushed when the
      // span opened, explicitly or implicitly.
      flush(passes);
      forward_seen = false;
      any_span_closed = true;
    }
    ++bar;
  }
  flush(1);

  for (size_t i = 0; i < map.order.size(); ++i)
    map.real_to_offset[map.order[i]].push_back(static_cast<int>(i) + 1);
  return map;
}

BarGrid::BarGrid(const Song& song) {
  const int64_t tpq = song.ticks_per_quarter;
  int first_bar = 1;
  for (size_t i = 0; i < song.time_signatures.size(); ++i) {
    const auto& ts = song.time_signatures[i];
    Segment seg;
    seg.start_tick = ts.tick;
    seg.first_bar = first_bar;
    seg.bar_ticks_num = 4 * tpq * ts.numerator;
    seg.bar_ticks_den = ts.denominator;
    if (i + 1 < song.time_signatures.size()) {
      int64_t span = song.time_signatures[i + 1].tick - ts.tick;
      // Bars fully or partially inside this segment; a change mid-bar cuts
      // the bar short and the next segment starts a fresh bar.
      int64_t bars = (span * seg.bar_ticks_den + seg.bar_ticks_num - 1) / seg.bar_ticks_num;
      first_bar += static_cast<int>(std::max<int64_t>(1, bars));
    }
    segments_.push_back(seg);
  }
  if (segments_.empty()) segments_.push_back({0, 1, 4 * tpq * 4, 4});
}

int64_t BarGrid::bar_start_tick(int bar) const {
  if (bar < 1) throw MedleyError(Errc::BarOutOfRange, "bar " + std::to_string(bar));
  const Segment* seg = &segments_.back();
  for (size_t i = 0; i + 1 < segments_.size(); ++i) {
    if (bar < segments_[i + 1].first_bar) {
      seg = &segments_[i];
      break;
    }
  }
  int64_t k = bar - seg->first_bar;
  return seg->start_tick + (k * seg->bar_ticks_num) / seg->bar_ticks_den;
}

int BarGrid::bar_of_tick(int64_t tick) const {
  const Segment* seg = &segments_.back();
  for (size_t i = 0; i + 1 < segments_.size(); ++i) {
    if (tick < segments_[i + 1].start_tick) {
      seg = &segments_[i];
      break;
    }
  }
  int64_t k = ((tick - seg->start_tick) * seg->bar_ticks_den) / seg->bar_ticks_num;
  int bar = seg->first_bar + static_cast<int>(k);
  // Guard against a tick inside the cut-short final bar of the segment.
  if (seg != &segments_.back()) {
    const Segment* next = seg + 1;
    bar = std::min(bar, next->first_bar - 1);
  }
  return bar;
}

int BarGrid::bar_count(int64_t end_tick) const {
  if (end_tick <= 0) return 0;
  return bar_of_tick(end_tick - 1);
}

int song_bar_count(const Song& song) {
  return BarGrid(song).bar_count(song.last_note_end());
}

double seconds_at_tick(const Song& song, int64_t tick) {
  double seconds = 0.0;
  const double tpq = song.ticks_per_quarter;
  const auto& map = song.tempo_map;
  for (size_t i = 0; i < map.size(); ++i) {
    int64_t seg_start = map[i].tick;
    if (seg_start >= tick) break;
    int64_t seg_end = (i + 1 < map.size()) ? std::min(map[i + 1].tick, tick) : tick;
    if (seg_end > seg_start)
      seconds += (seg_end - seg_start) / tpq * map[i].microseconds_per_quarter * 1e-6;
  }
  return seconds;
}

double time_of_bar(const Song& song, int bar_offset) {
  if (bar_offset < 1) throw MedleyError(Errc::BarOutOfRange, "bar " + std::to_string(bar_offset));
  return seconds_at_tick(song, BarGrid(song).bar_start_tick(bar_offset));
}

double bpm_at_tick(const Song& song, int64_t tick) {
  const TempoEvent* current = &song.tempo_map.front();
  for (const auto& t : song.tempo_map) {
    if (t.tick <= tick) current = &t;
    else break;
  }
  return current->bpm();
}

}  // namespace medley
