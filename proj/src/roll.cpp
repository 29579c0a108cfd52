#include "medley/roll.hpp"

#include <algorithm>
#include <sstream>

namespace medley {

PianoRoll encode(const NoteSlice& slice, int bars, int voices, Scheme scheme, Audit* audit) {
  PianoRoll roll;
  roll.scheme = scheme;
  roll.grid = RollGrid(bars, voices);
  const int total_steps = bars * kStepsPerBar;

  struct Active {
    size_t note;
    int until;  // exclusive end step
  };
  // voice -> active note, carried across steps for voice stability
  std::vector<std::optional<Active>> assigned(voices);

  // Notes sorted by onset; sweep step by step.
  std::vector<size_t> order(slice.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return slice[a].step < slice[b].step; });
  size_t next = 0;

  for (int step = 0; step < total_steps; ++step) {
    for (auto& a : assigned)
      if (a && (a->until <= step)) a.reset();

    std::vector<size_t> starting;
    while (next < order.size() && slice[order[next]].step <= step) {
      const SlicedNote& n = slice[order[next]];
      if (n.step == step && n.length >= 1 && n.pitch >= kPitchMin && n.pitch <= kPitchMax)
        starting.push_back(order[next]);
      else if (n.step == step)
        audit_note(audit, "InvalidNote",
                   "note at step " + std::to_string(n.step) + " pitch " +
                       std::to_string(n.pitch) + " ignored");
      ++next;
    }
    if (starting.empty() && std::none_of(assigned.begin(), assigned.end(),
                                         [](const auto& a) { return a.has_value(); }))
      continue;

    // Keep the `voices` highest pitches among everything sounding now.
    std::vector<std::pair<int, size_t>> sounding;  // (pitch, note index)
    for (const auto& a : assigned)
      if (a) sounding.emplace_back(slice[a->note].pitch, a->note);
    for (size_t idx : starting) sounding.emplace_back(slice[idx].pitch, idx);
    std::stable_sort(sounding.begin(), sounding.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    if (static_cast<int>(sounding.size()) > voices) {
      for (size_t k = voices; k < sounding.size(); ++k) {
        audit_note(audit, "TooManyVoices",
                   "step " + std::to_string(step) + ": pitch " +
                       std::to_string(sounding[k].first) + " dropped (" +
                       std::to_string(sounding.size()) + " simultaneous, " +
                       std::to_string(voices) + " voices)");
      }
      sounding.resize(voices);
    }

    std::vector<char> keep(voices, 0);
    std::vector<size_t> fresh;  // kept notes that need a voice this step
    for (const auto& [pitch, idx] : sounding) {
      bool continuing = false;
      for (int v = 0; v < voices; ++v) {
        if (assigned[v] && assigned[v]->note == idx) {
          keep[v] = 1;
          continuing = true;
          break;
        }
      }
      if (!continuing) fresh.push_back(idx);
    }
    for (int v = 0; v < voices; ++v)
      if (assigned[v] && !keep[v]) assigned[v].reset();

    // Fresh notes fill free voices in descending pitch order. A note that
    // lost its voice to the keep-highest rule never re-enters: it is gone
    // from `assigned` and its onset step has passed.
    for (size_t idx : fresh) {
      for (int v = 0; v < voices; ++v) {
        if (!assigned[v]) {
          assigned[v] = Active{idx, std::min(slice[idx].step + slice[idx].length, total_steps)};
          break;
        }
      }
    }

    for (int v = 0; v < voices; ++v) {
      if (!assigned[v]) continue;
      const SlicedNote& n = slice[assigned[v]->note];
      uint16_t symbol;
      if (n.step == step) symbol = static_cast<uint16_t>(n.pitch);
      else if (scheme == Scheme::Doubled) symbol = static_cast<uint16_t>(n.pitch + kHoldOffset);
      else symbol = kLegacyHold;
      roll.grid.at_step(step, v) = symbol;
    }
  }
  return roll;
}

NoteSlice decode(const PianoRoll& roll) {
  NoteSlice out;
  const int total_steps = roll.grid.steps();
  for (int v = 0; v < roll.grid.voices; ++v) {
    int run_pitch = 0;
    int run_start = 0;
    auto flush = [&](int end_step) {
      if (run_pitch != 0) out.push_back({run_start, end_step - run_start, run_pitch, v});
      run_pitch = 0;
    };
    for (int step = 0; step < total_steps; ++step) {
      int symbol = roll.grid.at_step(step, v);
      if (is_onset(symbol)) {
        flush(step);
        run_pitch = symbol;
        run_start = step;
      } else if (symbol == kSilence) {
        flush(step);
      } else if (roll.scheme == Scheme::Doubled) {
        int held = symbol - kHoldOffset;
        if (run_pitch != held) {
          // Hold after silence or a foreign pitch: normalize_holds policy
          // turns it into its own onset.
          flush(step);
          run_pitch = held;
          run_start = step;
        }
      } else {  // legacy shared hold
        if (run_pitch == 0) {
          run_pitch = symbol - kHoldOffset;  // == 1; degenerate leading hold
          run_start = step;
        }
      }
    }
    flush(total_steps);
  }
  std::sort(out.begin(), out.end(), [](const SlicedNote& a, const SlicedNote& b) {
    if (a.step != b.step) return a.step < b.step;
    if (a.pitch != b.pitch) return a.pitch > b.pitch;
    return a.voice < b.voice;
  });
  return out;
}

PianoRoll normalize_holds(const PianoRoll& roll) {
  if (roll.scheme != Scheme::Doubled)
    throw MedleyError(Errc::LegacySchemeUnsupported, "normalize_holds needs the doubled scheme");
  PianoRoll fixed = roll;
  const int total_steps = fixed.grid.steps();
  for (int v = 0; v < fixed.grid.voices; ++v) {
    for (int step = 0; step < total_steps; ++step) {
      uint16_t symbol = fixed.grid.at_step(step, v);
      if (!is_hold(symbol, Scheme::Doubled)) continue;
      int previous = step > 0 ? fixed.grid.at_step(step - 1, v) : kSilence;
      int previous_pitch = cell_pitch(previous);
      if (previous_pitch == kSilence) {
        fixed.grid.at_step(step, v) = static_cast<uint16_t>(symbol - kHoldOffset);
      } else if (previous_pitch != symbol - kHoldOffset) {
        fixed.grid.at_step(step, v) = static_cast<uint16_t>(previous_pitch + kHoldOffset);
      }
    }
  }
  return fixed;
}

namespace {

void wr16le(std::string& out, uint16_t v) {
  out += static_cast<char>(v & 0xFF);
  out += static_cast<char>(v >> 8);
}

uint16_t rd16le(std::string_view b, size_t off) {
  return static_cast<uint16_t>(static_cast<uint8_t>(b[off]) |
                               (static_cast<uint8_t>(b[off + 1]) << 8));
}

constexpr uint16_t kMdlrVersion = 1;

}  // namespace

std::string to_mdlr(const PianoRoll& roll) {
  std::string out = "MDLR";
  wr16le(out, kMdlrVersion);
  wr16le(out, static_cast<uint16_t>(roll.grid.bars));
  wr16le(out, kStepsPerBar);
  wr16le(out, static_cast<uint16_t>(roll.grid.voices));
  out += static_cast<char>(roll.scheme == Scheme::Doubled ? 0 : 1);
  for (uint16_t cell : roll.grid.cells) wr16le(out, cell);
  return out;
}

PianoRoll from_mdlr(std::string_view bytes) {
  if (bytes.size() < 13 || bytes.substr(0, 4) != "MDLR")
    throw MedleyError(Errc::MalformedHeader, "not an MDLR roll");
  uint16_t version = rd16le(bytes, 4);
  if (version != kMdlrVersion)
    throw MedleyError(Errc::MalformedHeader, "unsupported MDLR version " + std::to_string(version));
  int bars = rd16le(bytes, 6);
  int steps_per_bar = rd16le(bytes, 8);
  int voices = rd16le(bytes, 10);
  if (steps_per_bar != kStepsPerBar)
    throw MedleyError(Errc::MalformedHeader, "unsupported steps-per-bar");
  uint8_t scheme_byte = static_cast<uint8_t>(bytes[12]);
  if (scheme_byte > 1) throw MedleyError(Errc::MalformedHeader, "unknown scheme byte");
  PianoRoll roll;
  roll.scheme = scheme_byte == 0 ? Scheme::Doubled : Scheme::Legacy;
  roll.grid = RollGrid(bars, voices);
  size_t need = 13 + roll.grid.cells.size() * 2;
  if (bytes.size() < need) throw MedleyError(Errc::MalformedHeader, "truncated MDLR payload");
  for (size_t i = 0; i < roll.grid.cells.size(); ++i)
    roll.grid.cells[i] = rd16le(bytes, 13 + 2 * i);
  const uint16_t cap = roll.scheme == Scheme::Doubled ? 256 : kLegacyHold;
  for (uint16_t cell : roll.grid.cells)
    if (cell > cap)
      throw MedleyError(Errc::MalformedHeader, "cell value " + std::to_string(cell) +
                                                   " outside the scheme's symbol range");
  return roll;
}

std::string to_csv(const PianoRoll& roll) {
  std::ostringstream out;
  for (int bar = 0; bar < roll.grid.bars; ++bar) {
    for (int step = 0; step < kStepsPerBar; ++step) {
      for (int v = 0; v < roll.grid.voices; ++v) {
        if (v) out << ',';
        out << roll.grid.cell(bar, step, v);
      }
      out << '\n';
    }
  }
  return out.str();
}

PianoRoll from_csv(std::string_view text, Scheme scheme) {
  std::vector<std::vector<uint16_t>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<uint16_t> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(static_cast<uint16_t>(std::stoi(cell)));
    if (!rows.empty() && row.size() != rows.front().size())
      throw MedleyError(Errc::MalformedHeader, "ragged CSV roll");
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.size() % kStepsPerBar != 0)
    throw MedleyError(Errc::MalformedHeader, "CSV row count is not a multiple of 16");
  PianoRoll roll;
  roll.scheme = scheme;
  roll.grid = RollGrid(static_cast<int>(rows.size()) / kStepsPerBar,
                       static_cast<int>(rows.front().size()));
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t v = 0; v < rows[r].size(); ++v)
      roll.grid.cells[r * rows[r].size() + v] = rows[r][v];
  return roll;
}

}  // namespace medley
