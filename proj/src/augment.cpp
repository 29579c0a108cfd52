#include "medley/augment.hpp"

#include "medley/playback.hpp"

namespace medley {

std::optional<PianoRoll> transpose(const PianoRoll& roll, int semitones) {
  if (semitones < -11 || semitones > 11)
    throw MedleyError(Errc::KOutOfRange, "transposition " + std::to_string(semitones));
  PianoRoll shifted = roll;
  for (uint16_t& cell : shifted.grid.cells) {
    if (cell == kSilence) continue;
    if (roll.scheme == Scheme::Legacy && cell == kLegacyHold) continue;
    bool hold = cell > kPitchMax;
    int pitch = hold ? cell - kHoldOffset : cell;
    pitch += semitones;
    if (pitch < kPitchMin || pitch > kPitchMax) return std::nullopt;
    cell = static_cast<uint16_t>(hold ? pitch + kHoldOffset : pitch);
  }
  return shifted;
}

std::optional<TransitionSample> transpose(const TransitionSample& sample, int semitones) {
  auto roll = transpose(sample.roll, semitones);
  if (!roll) return std::nullopt;
  TransitionSample out = sample;
  out.roll = std::move(*roll);
  return out;
}

std::vector<PianoRoll> vertical_variants(const PianoRoll& roll) {
  std::vector<PianoRoll> out;
  for (int k = -11; k <= 11; ++k) {
    if (k == 0) continue;
    if (auto shifted = transpose(roll, k)) out.push_back(std::move(*shifted));
  }
  return out;
}

std::vector<TransitionSample> vertical_variants(const TransitionSample& sample) {
  std::vector<TransitionSample> out;
  for (int k = -11; k <= 11; ++k) {
    if (k == 0) continue;
    if (auto shifted = transpose(sample, k)) out.push_back(std::move(*shifted));
  }
  return out;
}

int vertical_variant_capacity(int min_pitch, int max_pitch) {
  int count = 0;
  for (int k = -11; k <= 11; ++k) {
    if (k == 0) continue;
    if (min_pitch + k >= kPitchMin && max_pitch + k <= kPitchMax) ++count;
  }
  return count;
}

std::vector<NoteSlice> horizontal_windows(const Song& song, int width, int stride, Audit* audit) {
  const int bars = song_bar_count(song);
  if (bars < width)
    throw MedleyError(Errc::SongTooShort, std::to_string(bars) + " bars, window needs " +
                                              std::to_string(width));
  std::vector<NoteSlice> out;
  for (int first = 1; first + width - 1 <= bars; first += stride)
    out.push_back(slice_window(song, first, width, audit));
  return out;
}

}  // namespace medley
