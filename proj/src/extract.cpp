#include "medley/extract.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace medley {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Permissive UTF-8 decoding; a malformed byte stands for itself.
std::vector<uint32_t> codepoints(std::string_view s) {
  std::vector<uint32_t> out;
  size_t i = 0;
  while (i < s.size()) {
    uint8_t b = static_cast<uint8_t>(s[i]);
    int extra = 0;
    uint32_t cp = b;
    if ((b & 0x80) == 0) extra = 0;
    else if ((b & 0xE0) == 0xC0) cp = b & 0x1F, extra = 1;
    else if ((b & 0xF0) == 0xE0) cp = b & 0x0F, extra = 2;
    else if ((b & 0xF8) == 0xF0) cp = b & 0x07, extra = 3;
    if (extra > 0 && i + extra >= s.size()) {
      extra = 0;
      cp = b;
    }
    for (int k = 1; k <= extra; ++k) {
      uint8_t cont = static_cast<uint8_t>(s[i + k]);
      if ((cont & 0xC0) != 0x80) {
        cp = b;
        extra = k - 1;
        break;
      }
      cp = (cp << 6) | (cont & 0x3F);
    }
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

bool is_ascii_punct(uint32_t cp) {
  return cp < 0x80 && std::ispunct(static_cast<int>(cp));
}

// Tempo, dynamics, and expression terms that composers write into scores
// but that never name a song. Seed list; override with a blacklist file.
constexpr const char* kDefaultBlacklist = R"(# Default annotation blacklist: musical expressions, one entry per line.
# Single non-alphanumeric codepoints are treated as forbidden glyphs.
a tempo
accelerando
accel.
adagietto
adagio
ad libitum
agitato
al coda
al fine
alla breve
allargando
allegretto
allegro
andante
andantino
animato
appassionato
arco
arpeggio
assai
brillante
brio
calando
cantabile
capo
choir
chorus
coda
con brio
con moto
crescendo
cresc.
da capo
dal segno
d.c.
d.s.
decrescendo
decresc.
delicato
diminuendo
dim.
divisi
dolce
dolcissimo
doloroso
drums
energico
espressivo
espr.
fermata
fine
forte
fortissimo
forzando
fuoco
furioso
giocoso
glissando
grandioso
grave
grazioso
interlude
intro
larghetto
largo
legato
leggiero
lento
loco
maestoso
marcato
marcia
melody
meno
meno mosso
mezzo
misterioso
moderato
molto
morendo
mosso
moto
non troppo
obbligato
ottava
outro
pedal
pesante
pianissimo
piano
pizzicato
pizz.
piu
piu mosso
poco
poco a poco
portamento
prestissimo
presto
prima
primo
quasi
rallentando
rall.
rapido
refrain
religioso
repeat
rinforzando
risoluto
ritardando
rit.
ritenuto
riten.
rubato
scherzando
scherzo
segno
semplice
sempre
senza
sforzando
sfz
simile
smorzando
solo
soli
sonore
sostenuto
sotto voce
spiritoso
staccato
stacc.
stretto
stringendo
string.
subito
sul ponticello
sul tasto
swing
tacet
tempo
tempo primo
tenuto
ten.
tranquillo
tremolo
trill
triste
troppo
tutti
un poco
unis.
unisono
veloce
verse
vivace
vivacissimo
vivante
vivo
vocals
voce
volta
♩
♪
♫
♬
♭
♮
♯
𝄞
𝄢
)";

}  // namespace

void Blacklist::add(std::string_view entry) {
  std::string_view t = trim(entry);
  if (t.empty()) return;
  auto cps = codepoints(t);
  if (cps.size() == 1 && !(cps[0] < 0x80 && std::isalnum(static_cast<int>(cps[0])))) {
    glyphs_.insert(cps[0]);
  } else {
    words_.insert(lowercase(t));
  }
}

Blacklist Blacklist::from_text(std::string_view text) {
  Blacklist bl;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
    std::string_view t = trim(line);
    if (!t.empty() && t.front() != '#') bl.add(t);
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return bl;
}

Blacklist Blacklist::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MedleyError(Errc::IoFailure, "cannot open blacklist file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

const Blacklist& Blacklist::default_seed() {
  static const Blacklist instance = from_text(kDefaultBlacklist);
  return instance;
}

bool Blacklist::has_word(std::string_view lowercase_word) const {
  return words_.count(std::string(lowercase_word)) > 0;
}

bool Blacklist::has_glyph(uint32_t codepoint) const { return glyphs_.count(codepoint) > 0; }

bool classify_annotation(std::string_view text, const Blacklist& blacklist) {
  std::string_view t = trim(text);
  if (t.empty()) return false;

  auto cps = codepoints(t);
  bool has_letter = false;
  for (uint32_t cp : cps) {
    if (blacklist.has_glyph(cp)) return false;
    if (cp < 0x80) {
      if (std::isalpha(static_cast<int>(cp))) has_letter = true;
    } else {
      has_letter = true;  // non-ASCII, non-glyph: counts as text
    }
  }
  if (!has_letter) return false;  // digits, punctuation, and spaces only

  std::string lower = lowercase(t);
  if (blacklist.has_word(lower)) return false;

  // Single-token annotations are also checked with surrounding punctuation
  // stripped, so "Allegro!" matches the entry "allegro".
  if (lower.find_first_of(" \t") == std::string::npos) {
    std::string_view token = lower;
    while (!token.empty() && is_ascii_punct(static_cast<unsigned char>(token.front())))
      token.remove_prefix(1);
    while (!token.empty() && is_ascii_punct(static_cast<unsigned char>(token.back())))
      token.remove_suffix(1);
    if (!token.empty() && blacklist.has_word(token)) return false;
  }
  return true;
}

std::vector<std::pair<int, std::string>> extract_annotations(const ScoreDocument& doc) {
  std::vector<std::pair<int, std::string>> out;
  for (const auto& measure : doc.measures)
    for (const auto& annotation : measure.annotations)
      out.emplace_back(measure.index_real, annotation.text);
  return out;
}

ContextStats tp_context_stats(const Song& song, int bar_offset, double epsilon_seconds) {
  if (bar_offset < 1)
    throw MedleyError(Errc::BarOutOfRange, "bar_offset " + std::to_string(bar_offset));
  BarGrid grid(song);
  int bars = grid.bar_count(song.last_note_end());
  if (bar_offset > bars + 1)
    throw MedleyError(Errc::BarOutOfRange, "bar_offset " + std::to_string(bar_offset) +
                                               " beyond song end (" + std::to_string(bars) +
                                               " bars)");

  const int64_t tp = grid.bar_start_tick(bar_offset);
  const int64_t before_start = bar_offset >= 2 ? grid.bar_start_tick(bar_offset - 1) : tp;
  const int64_t after_end = grid.bar_start_tick(bar_offset + 1);
  const int64_t mid_before = before_start + (tp - before_start) / 2;
  const int64_t mid_after = tp + (after_end - tp) / 2;

  // Epsilon is given in seconds; convert at the tempo active at the TP.
  double us_per_quarter = 500000.0;
  for (const auto& t : song.tempo_map) {
    if (t.tick <= tp) us_per_quarter = static_cast<double>(t.microseconds_per_quarter);
    else break;
  }
  const int64_t eps_ticks = static_cast<int64_t>(
      epsilon_seconds * 1e6 / us_per_quarter * song.ticks_per_quarter + 0.5);

  ContextStats stats;
  double during_seconds = 0.0;
  for (const auto& note : song.notes) {
    if (note.onset <= tp + eps_ticks && note.end() > tp - eps_ticks) {
      ++stats.notes_during;
      during_seconds += seconds_at_tick(song, note.end()) - seconds_at_tick(song, note.onset);
    }
    if (note.onset >= before_start && note.onset < tp && bar_offset >= 2) {
      ++stats.notes_before_bar;
      if (note.onset < mid_before) ++stats.half_bar_starts[0];
      else ++stats.half_bar_starts[1];
    }
    if (note.onset >= tp && note.onset < after_end) {
      ++stats.notes_after_bar;
      if (note.onset < mid_after) ++stats.half_bar_starts[2];
      else ++stats.half_bar_starts[3];
    }
  }
  if (stats.notes_during > 0) stats.avg_note_length_seconds = during_seconds / stats.notes_during;
  return stats;
}

std::vector<TransitionPoint> extract_transitions(const ScoreDocument& doc, const Song& song,
                                                 const Blacklist& blacklist,
                                                 const ExtractConfig& config, Audit* audit) {
  PlaybackMap map = expand_repeats(doc, audit);
  const int doc_bars = static_cast<int>(map.order.size());
  const int song_bars = song_bar_count(song);
  const int divergence = std::abs(doc_bars - song_bars);
  if (divergence > config.bar_count_tolerance)
    throw MedleyError(Errc::AlignmentMismatch,
                      "notation expands to " + std::to_string(doc_bars) + " bars but MIDI has " +
                          std::to_string(song_bars));
  if (divergence != 0)
    audit_note(audit, "BarCountDrift",
               "notation " + std::to_string(doc_bars) + " vs MIDI " + std::to_string(song_bars) +
                   " bars (within tolerance)");

  std::vector<TransitionPoint> out;
  for (const auto& measure : doc.measures) {
    for (const auto& annotation : measure.annotations) {
      if (!classify_annotation(annotation.text, blacklist)) continue;
      TransitionPoint tp;
      tp.song_id = song.id;
      tp.text = annotation.text;
      tp.bar_real = measure.index_real;
      tp.bar_offset = map.first_offset(measure.index_real);
      try {
        tp.time_seconds = time_of_bar(song, tp.bar_offset);
        ContextStats stats = tp_context_stats(song, tp.bar_offset, config.epsilon_seconds);
        tp.notes_during = stats.notes_during;
        tp.avg_note_length_seconds = stats.avg_note_length_seconds;
        tp.notes_before_bar = stats.notes_before_bar;
        tp.notes_after_bar = stats.notes_after_bar;
        tp.half_bar_starts = stats.half_bar_starts;
      } catch (const MedleyError& e) {
        audit_note(audit, "SkippedTransition",
                   "bar_real " + std::to_string(tp.bar_real) + ": " + e.what());
        continue;
      }
      out.push_back(std::move(tp));
    }
  }
  return out;
}

std::optional<double> precision(const ConfusionMatrix& m) {
  if (m.tp + m.fp == 0) return std::nullopt;
  return static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
}

std::optional<double> recall(const ConfusionMatrix& m) {
  if (m.tp + m.fn == 0) return std::nullopt;
  return static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
}

namespace {

// Kuhn's augmenting-path matching; small per-song instances.
bool try_match(int p, const std::vector<std::vector<int>>& adj, std::vector<int>& truth_owner,
               std::vector<char>& visited) {
  for (int t : adj[p]) {
    if (visited[t]) continue;
    visited[t] = 1;
    if (truth_owner[t] < 0 || try_match(truth_owner[t], adj, truth_owner, visited)) {
      truth_owner[t] = p;
      return true;
    }
  }
  return false;
}

}  // namespace

ConfusionMatrix evaluate_labels(const std::vector<LabelKey>& predicted,
                                const std::vector<LabelKey>& truth, int window_bars,
                                const std::vector<LabelKey>& candidates) {
  std::map<std::string, std::pair<std::vector<int>, std::vector<int>>> per_song;
  for (const auto& p : predicted) per_song[p.song_id].first.push_back(p.bar_real);
  for (const auto& t : truth) per_song[t.song_id].second.push_back(t.bar_real);

  ConfusionMatrix m;
  for (auto& [song, bars] : per_song) {
    auto& [preds, truths] = bars;
    std::vector<std::vector<int>> adj(preds.size());
    for (size_t i = 0; i < preds.size(); ++i)
      for (size_t j = 0; j < truths.size(); ++j)
        if (std::abs(preds[i] - truths[j]) <= window_bars) adj[i].push_back(static_cast<int>(j));
    std::vector<int> truth_owner(truths.size(), -1);
    int matched = 0;
    for (size_t i = 0; i < preds.size(); ++i) {
      std::vector<char> visited(truths.size(), 0);
      if (try_match(static_cast<int>(i), adj, truth_owner, visited)) ++matched;
    }
    m.tp += matched;
    m.fp += static_cast<int64_t>(preds.size()) - matched;
    m.fn += static_cast<int64_t>(truths.size()) - matched;
  }

  if (!candidates.empty()) {
    std::set<LabelKey> predicted_set(predicted.begin(), predicted.end());
    std::set<LabelKey> truth_set(truth.begin(), truth.end());
    std::set<LabelKey> seen;
    for (const auto& c : candidates) {
      if (!seen.insert(c).second) continue;
      if (!predicted_set.count(c) && !truth_set.count(c)) ++m.tn;
    }
  }
  return m;
}

}  // namespace medley
