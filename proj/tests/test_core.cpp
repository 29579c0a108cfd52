#include <doctest.h>

#include "medley/core.hpp"

using namespace medley;

namespace {

RollGrid grid_with(std::vector<uint16_t> voices_at_cell) {
  RollGrid grid(1, static_cast<int>(voices_at_cell.size()));
  for (size_t v = 0; v < voices_at_cell.size(); ++v) grid.cell(0, 0, static_cast<int>(v)) = voices_at_cell[v];
  return grid;
}

}  // namespace

TEST_CASE("sounding_pitches resolves onsets, holds, and silence") {
  CHECK(sounding_pitches(grid_with({72, 0}), 0, 0) == std::set<int>{72});
  CHECK(sounding_pitches(grid_with({200}), 0, 0) == std::set<int>{72});
  CHECK(sounding_pitches(grid_with({0, 0, 0}), 0, 0) == std::set<int>{});
}

TEST_CASE("symbol classes partition 0..256") {
  for (int s = 0; s <= 256; ++s) {
    int classes = (is_silence(s) ? 1 : 0) + (is_onset(s) ? 1 : 0) +
                  (is_hold(s, Scheme::Doubled) ? 1 : 0);
    CHECK(classes == 1);
  }
}

TEST_CASE("sounding_pitches is invariant under onset-to-hold replacement") {
  for (int pitch = 1; pitch <= 128; pitch += 13) {
    auto as_onset = sounding_pitches(grid_with({static_cast<uint16_t>(pitch)}), 0, 0);
    auto as_hold = sounding_pitches(grid_with({static_cast<uint16_t>(pitch + 128)}), 0, 0);
    CHECK(as_onset == as_hold);
  }
}

TEST_CASE("legacy scheme classifies only 129 as hold") {
  CHECK(is_hold(129, Scheme::Legacy));
  CHECK_FALSE(is_hold(130, Scheme::Legacy));
  CHECK_FALSE(is_onset(129));
}
