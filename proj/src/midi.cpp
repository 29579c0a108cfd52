#include "medley/midi.hpp"

#include <algorithm>
#include <map>

namespace medley {

namespace {

class Reader {
 public:
  Reader(std::string_view data, size_t base) : data_(data), base_(base) {}

  bool eof() const { return pos_ >= data_.size(); }
  size_t remaining() const { return data_.size() - pos_; }
  size_t offset() const { return base_ + pos_; }

  uint8_t u8() {
    require(1);
    return static_cast<uint8_t>(data_[pos_++]);
  }
  uint8_t peek() const {
    if (eof()) throw MedleyError(Errc::MalformedHeader, "unexpected end of data");
    return static_cast<uint8_t>(data_[pos_]);
  }
  uint16_t u16() { return static_cast<uint16_t>((u8() << 8) | u8()); }
  uint32_t u32() {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | u8();
    return v;
  }
  uint32_t varint() {
    uint32_t value = 0;
    for (int i = 0; i < 4; ++i) {
      uint8_t byte = u8();
      value = (value << 7) | (byte & 0x7F);
      if (!(byte & 0x80)) return value;
    }
    throw MedleyError(Errc::MalformedHeader, "variable-length quantity too long at offset " +
                                                 std::to_string(offset()));
  }
  std::string_view bytes(size_t n) {
    require(n);
    std::string_view v = data_.substr(pos_, n);
    pos_ += n;
    return v;
  }
  void skip(size_t n) { require(n), pos_ += n; }

 private:
  void require(size_t n) const {
    if (remaining() < n)
      throw MedleyError(Errc::MalformedHeader,
                        "unexpected end of data at offset " + std::to_string(offset()));
  }
  std::string_view data_;
  size_t base_;
  size_t pos_ = 0;
};

struct OpenNote {
  int64_t onset;
  int velocity;
};

void close_note(Song& song, int track, int pitch, int velocity, int64_t onset, int64_t end) {
  NoteEvent note;
  note.pitch = pitch;
  note.onset = onset;
  note.duration = std::max<int64_t>(1, end - onset);
  note.velocity = velocity;
  note.track = track;
  song.notes.push_back(note);
}

template <typename Event>
void ensure_tick_zero(std::vector<Event>& events, Event fallback) {
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) { return a.tick < b.tick; });
  // Collapse duplicate ticks, keeping the last event written at that tick.
  std::vector<Event> dedup;
  for (const auto& e : events) {
    if (!dedup.empty() && dedup.back().tick == e.tick) dedup.back() = e;
    else dedup.push_back(e);
  }
  events = std::move(dedup);
  if (events.empty() || events.front().tick != 0) events.insert(events.begin(), fallback);
}

}  // namespace

Song parse_midi(std::string_view bytes, Audit* audit) {
  Reader header(bytes, 0);
  if (bytes.size() < 14 || header.bytes(4) != "MThd")
    throw MedleyError(Errc::MalformedHeader, "missing MThd chunk");
  uint32_t header_len = header.u32();
  if (header_len < 6) throw MedleyError(Errc::MalformedHeader, "MThd too short");
  uint16_t format = header.u16();
  uint16_t declared_tracks = header.u16();
  uint16_t division = header.u16();
  header.skip(header_len - 6);
  if (format > 1)
    throw MedleyError(Errc::UnsupportedSmfType, "SMF type " + std::to_string(format));
  if (division & 0x8000)
    throw MedleyError(Errc::MalformedHeader, "SMPTE time division is not supported");
  if (division == 0) throw MedleyError(Errc::MalformedHeader, "zero ticks per quarter");

  Song song;
  song.ticks_per_quarter = division;

  size_t pos = 14 + (header_len - 6);
  int track_index = 0;
  while (pos + 8 <= bytes.size()) {
    std::string_view tag = bytes.substr(pos, 4);
    Reader chunk_header(bytes.substr(pos + 4, 4), pos + 4);
    uint32_t chunk_len = chunk_header.u32();
    if (pos + 8 + chunk_len > bytes.size())
      throw MedleyError(Errc::MalformedHeader, "track chunk overruns file");
    if (tag != "MTrk") {  // unknown chunks are skipped per the SMF spec
      pos += 8 + chunk_len;
      continue;
    }
    Reader track(bytes.substr(pos + 8, chunk_len), pos + 8);
    song.programs.push_back(std::nullopt);

    int64_t tick = 0;
    uint8_t running_status = 0;
    // key: (channel << 8) | midi key
    std::map<int, OpenNote> open;
    bool ended = false;
    while (!track.eof() && !ended) {
      tick += track.varint();
      uint8_t status = track.peek();
      if (status & 0x80) {
        track.u8();
        if (status < 0xF0) running_status = status;
      } else {
        if (running_status == 0)
          throw MedleyError(Errc::MalformedHeader,
                            "data byte with no running status at offset " +
                                std::to_string(track.offset()));
        status = running_status;
      }

      if (status == 0xFF) {
        running_status = 0;  // meta events cancel running status
        uint8_t type = track.u8();
        uint32_t len = track.varint();
        std::string_view payload = track.bytes(len);
        switch (type) {
          case 0x2F: ended = true; break;
          case 0x51:
            if (len == 3) {
              int64_t uspq = (static_cast<uint8_t>(payload[0]) << 16) |
                             (static_cast<uint8_t>(payload[1]) << 8) |
                             static_cast<uint8_t>(payload[2]);
              song.tempo_map.push_back({tick, uspq});
            }
            break;
          case 0x58:
            if (len >= 2) {
              int exponent = std::min<int>(static_cast<uint8_t>(payload[1]), 15);
              song.time_signatures.push_back(
                  {tick, static_cast<uint8_t>(payload[0]), 1 << exponent});
            }
            break;
          case 0x59:
            if (len >= 2)
              song.key_signatures.push_back(
                  {tick, KeySignature{static_cast<int8_t>(payload[0]), payload[1] != 0}});
            break;
          case 0x03:
            if (song.title.empty()) song.title.assign(payload);
            break;
          default: break;
        }
        continue;
      }
      if (status == 0xF0 || status == 0xF7) {  // sysex, cancels running status
        running_status = 0;
        uint32_t len = track.varint();
        track.skip(len);
        continue;
      }

      uint8_t kind = status & 0xF0;
      int channel = status & 0x0F;
      switch (kind) {
        case 0x90: {
          int key = track.u8() & 0x7F;
          int velocity = track.u8() & 0x7F;
          int slot = (channel << 8) | key;
          if (velocity == 0) {
            auto it = open.find(slot);
            if (it != open.end()) {
              close_note(song, track_index, key + 1, it->second.velocity, it->second.onset, tick);
              open.erase(it);
            }
            break;
          }
          auto it = open.find(slot);
          if (it != open.end()) {
            // Monophonic-per-key: a re-strike closes the earlier note here.
            close_note(song, track_index, key + 1, it->second.velocity, it->second.onset, tick);
            open.erase(it);
          }
          open[slot] = {tick, velocity};
          break;
        }
        case 0x80: {
          int key = track.u8() & 0x7F;
          track.u8();  // release velocity
          auto it = open.find((channel << 8) | key);
          if (it != open.end()) {
            close_note(song, track_index, key + 1, it->second.velocity, it->second.onset, tick);
            open.erase(it);
          }
          break;
        }
        case 0xC0: {
          int program = track.u8() & 0x7F;
          if (!song.programs.back().has_value()) song.programs.back() = program;
          break;
        }
        case 0xD0: track.u8(); break;                    // channel pressure
        case 0xA0: case 0xB0: case 0xE0: track.skip(2); break;
        default:
          throw MedleyError(Errc::MalformedHeader,
                            "unknown status byte at offset " + std::to_string(track.offset()));
      }
    }

    for (const auto& [slot, note] : open) {
      audit_note(audit, "DanglingNoteOn",
                 "track " + std::to_string(track_index) + " key " + std::to_string(slot & 0xFF) +
                     " never released; closed at track end");
      close_note(song, track_index, (slot & 0xFF) + 1, note.velocity, note.onset, tick);
    }
    // Tracks with notes but no program change play the General MIDI default.
    if (!song.programs.back().has_value()) {
      bool has_notes = std::any_of(song.notes.begin(), song.notes.end(),
                                   [&](const NoteEvent& n) { return n.track == track_index; });
      if (has_notes) song.programs.back() = 0;
    }
    ++track_index;
    pos += 8 + chunk_len;
  }
  if (track_index == 0)
    throw MedleyError(Errc::MalformedHeader, "no MTrk chunks");
  if (track_index != declared_tracks)
    audit_note(audit, "TrackCountMismatch",
               "header declares " + std::to_string(declared_tracks) + " tracks, found " +
                   std::to_string(track_index));

  std::stable_sort(song.notes.begin(), song.notes.end(), [](const NoteEvent& a, const NoteEvent& b) {
    if (a.onset != b.onset) return a.onset < b.onset;
    if (a.track != b.track) return a.track < b.track;
    return a.pitch < b.pitch;
  });
  ensure_tick_zero(song.tempo_map, TempoEvent{0, 500000});
  ensure_tick_zero(song.time_signatures, TimeSignatureEvent{0, 4, 4});
  ensure_tick_zero(song.key_signatures, KeySignatureEvent{0, KeySignature{0, false}});
  return song;
}

}  // namespace medley
