#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "medley/core.hpp"
#include "medley/errors.hpp"
#include "medley/playback.hpp"

namespace medley {

// Annotation filter. Word lookup is case-insensitive on trimmed text;
// glyph entries are single non-alphanumeric codepoints (musical symbols).
class Blacklist {
 public:
  Blacklist() = default;

  static Blacklist from_text(std::string_view text);   // one entry per line, '#' comments
  static Blacklist from_file(const std::string& path);
  static const Blacklist& default_seed();

  void add(std::string_view entry);
  bool has_word(std::string_view lowercase_word) const;
  bool has_glyph(uint32_t codepoint) const;
  size_t word_count() const { return words_.size(); }
  size_t glyph_count() const { return glyphs_.size(); }

 private:
  std::set<std::string> words_;
  std::set<uint32_t> glyphs_;
};

// True if the text survives all blacklist rules: not digits/punctuation
// only, no forbidden glyph, and neither its full lowercase form nor its
// bare single-token form is a blacklisted word.
bool classify_annotation(std::string_view text, const Blacklist& blacklist);

// All measure-attached text directions in notation order.
std::vector<std::pair<int, std::string>> extract_annotations(const ScoreDocument& doc);

struct ExtractConfig {
  double epsilon_seconds = 0.0;  // tolerance around the TP for "during" counting
  int bar_count_tolerance = 1;   // notation/playback bar-count mismatch allowed
};

struct ContextStats {
  int notes_during = 0;
  double avg_note_length_seconds = 0.0;
  int notes_before_bar = 0;
  int notes_after_bar = 0;
  std::array<int, 4> half_bar_starts{0, 0, 0, 0};
};

// Note statistics around the start of a bar. "During" counts notes whose
// sounding interval covers the transition instant (within +/- epsilon);
// before/after count onsets in the single adjacent bars; half_bar_starts
// counts onsets in the two half bars before and the two after, in
// temporal order. Regions outside the song count as silence.
ContextStats tp_context_stats(const Song& song, int bar_offset, double epsilon_seconds = 0.0);

// The automatic labeling pipeline for one medley: accepted annotations
// become TransitionPoints anchored at the start of their bar.
std::vector<TransitionPoint> extract_transitions(const ScoreDocument& doc, const Song& song,
                                                 const Blacklist& blacklist,
                                                 const ExtractConfig& config = {},
                                                 Audit* audit = nullptr);

struct ConfusionMatrix {
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t fn = 0;
  int64_t tn = 0;
};

// Undefined ratios (zero denominator) are reported as nullopt.
std::optional<double> precision(const ConfusionMatrix& m);
std::optional<double> recall(const ConfusionMatrix& m);

struct LabelKey {
  std::string song_id;
  int bar_real = 0;
  auto operator<=>(const LabelKey&) const = default;
};

// Matches predictions to ground truth within +/- window_bars per song and
// tallies the confusion matrix. Matching is maximum-cardinality, so tp is
// the best achievable pairing. `candidates` lists every annotated bar
// that was considered; candidate bars in neither set count as tn.
ConfusionMatrix evaluate_labels(const std::vector<LabelKey>& predicted,
                                const std::vector<LabelKey>& truth, int window_bars = 0,
                                const std::vector<LabelKey>& candidates = {});

}  // namespace medley
