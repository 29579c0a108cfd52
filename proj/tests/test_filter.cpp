#include <doctest.h>

#include "medley/filter.hpp"
#include "support/testgen.hpp"

using namespace medley;

TEST_SUITE_BEGIN("filter");

namespace {

Song blank_song(int bars, double bpm = 120.0) {
  Song song;
  song.ticks_per_quarter = 480;
  song.tempo_map.push_back({0, static_cast<int64_t>(60000000.0 / bpm + 0.5)});
  song.time_signatures.push_back({0, 4, 4});
  song.key_signatures.push_back({0, {}});
  song.programs = {std::nullopt, 0};
  NoteEvent cap;  // pin the bar count
  cap.pitch = 20;
  cap.onset = static_cast<int64_t>(bars - 1) * 1920;
  cap.duration = 1920;
  cap.velocity = 1;
  cap.track = 1;
  song.notes.push_back(cap);
  return song;
}

void add_note(Song& song, int64_t onset, int64_t duration, int pitch = 60) {
  NoteEvent n;
  n.pitch = pitch;
  n.onset = onset;
  n.duration = duration;
  n.velocity = 90;
  n.track = 1;
  song.notes.push_back(n);
  std::stable_sort(song.notes.begin(), song.notes.end(),
                   [](const NoteEvent& a, const NoteEvent& b) { return a.onset < b.onset; });
}

}  // namespace

TEST_CASE("is_vivid: onsets in all four half bars pass the default rule") {
  Song song = blank_song(16);
  const int64_t tp = 7 * 1920;  // bar 8
  add_note(song, tp - 1920, 200, 60);       // half bar 1
  add_note(song, tp - 960 + 120, 200, 62);  // half bar 2
  add_note(song, tp + 240, 200, 64);        // half bar 3
  add_note(song, tp + 960, 200, 65);        // half bar 4
  CHECK(is_vivid(song, 8));

  // The kept transition carries at least four played notes in its target.
  int target_onsets = 0;
  for (const auto& n : song.notes)
    if (n.onset >= tp - 2 * 1920 && n.onset < tp + 2 * 1920) ++target_onsets;
  CHECK(target_onsets >= 4);
}

TEST_CASE("is_vivid: silence around the TP fails") {
  Song song = blank_song(16);
  CHECK_FALSE(is_vivid(song, 8));
}

TEST_CASE("is_vivid: one onset only, all4 vs any1") {
  Song song = blank_song(16);
  const int64_t tp = 7 * 1920;
  add_note(song, tp - 1920 + 60, 200, 60);  // first half bar only
  FilterConfig all4;
  CHECK_FALSE(is_vivid(song, 8, all4));
  FilterConfig any1;
  any1.vivid_mode = VividMode::Any1;
  CHECK(is_vivid(song, 8, any1));
}

TEST_CASE("is_vivid honors min_starts_per_half_bar") {
  Song song = blank_song(16);
  const int64_t tp = 7 * 1920;
  for (int half = 0; half < 4; ++half) {
    add_note(song, tp - 1920 + half * 960 + 0, 100, 50 + half);
    if (half != 2) add_note(song, tp - 1920 + half * 960 + 480, 100, 70 + half);
  }
  FilterConfig config;
  CHECK(is_vivid(song, 8, config));
  config.min_starts_per_half_bar = 2;
  CHECK_FALSE(is_vivid(song, 8, config));
}

TEST_CASE("beat_ok: constant 4/4 at constant tempo passes") {
  Song song = blank_song(20);
  CHECK(beat_ok(song, 10));
}

TEST_CASE("beat_ok: 3/4 anywhere in the window fails, reducible signatures pass") {
  Song song = blank_song(20);
  SUBCASE("3/4 in the window") {
    song.time_signatures.push_back({8 * 1920, 3, 4});
    CHECK_FALSE(beat_ok(song, 10));
  }
  SUBCASE("2/2 and 8/8 are 4/4-reducible") {
    song.time_signatures.push_back({8 * 1920, 2, 2});
    song.time_signatures.push_back({10 * 1920, 8, 8});
    CHECK(beat_ok(song, 10));
  }
}

TEST_CASE("beat_ok: tempo ramp beyond tolerance fails") {
  Song song = blank_song(20);
  song.tempo_map.push_back({9 * 1920, static_cast<int64_t>(60000000.0 / 121.0 + 0.5)});
  FilterConfig config;  // tolerance 0.5 BPM
  CHECK_FALSE(beat_ok(song, 10, config));
  config.tempo_tolerance_bpm = 2.0;
  CHECK(beat_ok(song, 10, config));
}

TEST_CASE("beat_ok needs the full 12-bar window") {
  Song song = blank_song(20);
  CHECK_THROWS_AS(beat_ok(song, 3), MedleyError);
  CHECK_THROWS_AS(beat_ok(song, 18), MedleyError);
}

TEST_CASE("slice_sample: exact fit and insufficient context") {
  Song song = blank_song(12);
  add_note(song, 0, 480, 72);
  CHECK_NOTHROW(slice_sample(song, 7));
  try {
    slice_sample(song, 3);
    FAIL("expected throw");
  } catch (const MedleyError& e) {
    CHECK(e.code() == Errc::InsufficientContext);
  }
}

TEST_CASE("slice_sample quantizes and truncates to the window") {
  Song song = blank_song(24);
  // a note from mid-bar 6 to mid-bar 7 in song coordinates
  add_note(song, 5 * 1920 + 960, 1920, 72);
  // TP at bar 12: window covers bars 6..17, so window step 0 is bar 6
  NoteSlice slice = slice_sample(song, 12);
  bool found = false;
  for (const auto& n : slice) {
    if (n.pitch == 72) {
      found = true;
      CHECK(n.step == 8);     // half a bar into the window
      CHECK(n.length == 16);  // one full bar long
    }
  }
  CHECK(found);

  SUBCASE("a note reaching past the window is cut at the edge") {
    add_note(song, 16 * 1920, 4 * 1920, 80);  // starts in window bar 11, exceeds it
    NoteSlice cut = slice_sample(song, 12);
    for (const auto& n : cut)
      if (n.pitch == 80) CHECK(n.step + n.length <= 12 * 16);
  }
  SUBCASE("sub-half-step notes vanish with an audit record") {
    add_note(song, 8 * 1920, 40, 90);  // 40 ticks = a third of a step
    Audit audit;
    NoteSlice tiny = slice_sample(song, 12, &audit);
    for (const auto& n : tiny) CHECK(n.pitch != 90);
    bool dropped = false;
    for (const auto& a : audit) dropped = dropped || a.code == "NoteDropped";
    CHECK(dropped);
  }
}

TEST_CASE("slice_sample rounds onsets half-up to the nearest step") {
  Song song = blank_song(24);
  add_note(song, 5 * 1920 + 59, 480, 70);   // 59/120 below half -> step 0
  add_note(song, 5 * 1920 + 60, 480, 71);   // exactly half -> step 1 (round half up)
  add_note(song, 5 * 1920 + 180, 480, 73);  // 1.5 steps -> step 2
  NoteSlice slice = slice_sample(song, 12);  // window starts at bar 6
  auto step_of_pitch = [&](int pitch) {
    for (const auto& n : slice)
      if (n.pitch == pitch) return n.step;
    return -1;
  };
  CHECK(step_of_pitch(70) == 0);
  CHECK(step_of_pitch(71) == 1);
  CHECK(step_of_pitch(73) == 2);
}

TEST_CASE("vivid filtering is idempotent over a random corpus") {
  testgen::Rng rng(555);
  FilterConfig config;
  int checked = 0;
  for (int iteration = 0; iteration < 60; ++iteration) {
    Song song = testgen::random_song(rng);
    int bars = song_bar_count(song);
    for (int bar = 2; bar < bars; bar += 3) {
      bool first = is_vivid(song, bar, config);
      bool second = is_vivid(song, bar, config);  // same inputs, same verdict
      CHECK(first == second);
      ++checked;
    }
  }
  CHECK(checked > 100);
}

TEST_SUITE_END();
