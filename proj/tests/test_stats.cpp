#include <doctest.h>

#include "medley/filter.hpp"
#include "medley/roll.hpp"
#include "medley/stats.hpp"
#include "support/testgen.hpp"

using namespace medley;

TEST_SUITE_BEGIN("stats");

TEST_CASE("medley_summary on a constant-tempo single-program song") {
  Song song;
  song.ticks_per_quarter = 480;
  song.tempo_map.push_back({0, 500000});
  song.time_signatures.push_back({0, 4, 4});
  song.key_signatures.push_back({0, {}});
  song.programs = {std::nullopt, 0};
  NoteEvent n;
  n.pitch = 61;
  n.onset = 0;
  n.duration = 8 * 1920;  // 8 bars at 2 s each
  n.velocity = 90;
  n.track = 1;
  song.notes.push_back(n);

  MedleySummary s = medley_summary(song);
  CHECK(s.duration_minutes == doctest::Approx(16.0 / 60.0));
  CHECK(s.key_change_count == 0);
  CHECK(s.tempo_change_count == 0);
  CHECK(s.instrument_count == 1);

  SUBCASE("entries after tick 0 count as changes") {
    song.tempo_map.push_back({1920, 600000});
    song.tempo_map.push_back({3840, 700000});
    song.tempo_map.push_back({5760, 800000});
    song.key_signatures.push_back({1920, KeySignature{2, false}});
    MedleySummary changed = medley_summary(song);
    CHECK(changed.tempo_change_count == 3);
    CHECK(changed.key_change_count == 1);
  }
  SUBCASE("distinct programs across tracks") {
    song.programs = {std::nullopt, 0, 24, 24, 40};
    CHECK(medley_summary(song).instrument_count == 3);
  }
}

TEST_CASE("instrumentation_distribution fractions are exact") {
  auto song_with_programs = [](std::vector<int> programs) {
    Song s;
    s.programs.emplace_back(std::nullopt);
    for (int p : programs) s.programs.emplace_back(p);
    return s;
  };
  std::vector<Song> corpus = {
      song_with_programs({0}),
      song_with_programs({0, 24}),
      song_with_programs({0, 24, 24}),
      song_with_programs({40}),
  };
  auto distribution = instrumentation_distribution(corpus);
  REQUIRE(distribution.size() == 128);
  CHECK(distribution[0].program == 0);
  CHECK(distribution[0].probability == doctest::Approx(0.75));
  auto probability_of = [&](int program) {
    for (const auto& row : distribution)
      if (row.program == program) return row.probability;
    return -1.0;
  };
  CHECK(probability_of(24) == doctest::Approx(0.5));
  CHECK(probability_of(40) == doctest::Approx(0.25));
  CHECK(probability_of(77) == doctest::Approx(0.0));
  for (const auto& row : distribution) {
    CHECK(row.probability >= 0.0);
    CHECK(row.probability <= 1.0);
  }
  CHECK_THROWS_AS(instrumentation_distribution({}), MedleyError);
}

TEST_CASE("instrumentation_distribution counting oracle on random corpora") {
  testgen::Rng rng(98765);
  for (int iteration = 0; iteration < 20; ++iteration) {
    std::vector<Song> corpus;
    std::array<int, 128> expected{};
    int songs = rng.range(2, 8);
    for (int s = 0; s < songs; ++s) {
      Song song;
      song.programs.emplace_back(std::nullopt);
      std::set<int> present;
      int tracks = rng.range(1, 4);
      for (int t = 0; t < tracks; ++t) {
        int program = rng.range(0, 127);
        song.programs.emplace_back(program);
        present.insert(program);
      }
      for (int p : present) ++expected[p];
      corpus.push_back(std::move(song));
    }
    auto distribution = instrumentation_distribution(corpus);
    for (const auto& row : distribution)
      CHECK(row.probability ==
            doctest::Approx(static_cast<double>(expected[row.program]) / songs));
  }
}

TEST_CASE("transition_note_histogram counts target-bar onsets") {
  SUBCASE("identical samples give a single bin") {
    NoteSlice slice;
    for (int i = 0; i < 6; ++i) slice.push_back({4 * 16 + i * 2, 1, 60 + i, -1});
    PianoRoll roll = encode(slice, kSampleBars, 1, Scheme::Doubled);
    CHECK(target_onset_count(roll) == 6);
    Histogram h = transition_note_histogram({roll, roll, roll});
    REQUIRE(h.bins.size() == 1);
    CHECK(h.bins[0].first == doctest::Approx(6.0));
    CHECK(h.bins[0].second == doctest::Approx(1.0));
  }
  SUBCASE("onsets outside the target bars are not counted") {
    NoteSlice slice = {{0, 2, 60, -1}, {8 * 16, 2, 60, -1}, {5 * 16, 2, 70, -1}};
    PianoRoll roll = encode(slice, kSampleBars, 1, Scheme::Doubled);
    CHECK(target_onset_count(roll) == 1);
  }
  SUBCASE("random corpus matches a counting oracle") {
    testgen::Rng rng(1111);
    std::vector<PianoRoll> rolls;
    std::map<int, int> expected;
    for (int i = 0; i < 40; ++i) {
      NoteSlice slice = testgen::random_slice(rng, kSampleBars, 2);
      int count = 0;
      for (const auto& n : slice)
        if (n.step >= 64 && n.step < 128) ++count;
      expected[count] += 1;
      rolls.push_back(encode(slice, kSampleBars, 2, Scheme::Doubled));
    }
    Histogram h = transition_note_histogram(rolls);
    double total = 0.0;
    for (const auto& [value, mass] : h.bins) {
      CHECK(mass == doctest::Approx(expected.at(static_cast<int>(value)) / 40.0));
      total += mass;
    }
    CHECK(total == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(transition_note_histogram({}), MedleyError);
}

TEST_CASE("vivid-filtered samples never land below four target onsets") {
  // is_vivid(all4) looks at the two half bars each side of the TP, which sit
  // inside the target bars of the slice around that TP.
  testgen::Rng rng(424211);
  int vivid_count = 0;
  for (int iteration = 0; iteration < 1000; ++iteration) {
    Song song = testgen::random_song(rng);
    int bars = song_bar_count(song);
    int bar = rng.range(7, std::max(7, bars - 5));
    if (bar + 5 > bars) continue;
    if (!is_vivid(song, bar)) continue;
    ++vivid_count;
    NoteSlice slice = slice_sample(song, bar);
    PianoRoll roll = encode(slice, kSampleBars, 8, Scheme::Doubled);
    CHECK(target_onset_count(roll) >= 4);
  }
  CHECK(vivid_count > 100);  // the property was actually exercised
}

TEST_SUITE_END();
