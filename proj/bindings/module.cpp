#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "medley/augment.hpp"
#include "medley/extract.hpp"
#include "medley/filter.hpp"
#include "medley/jsonio.hpp"
#include "medley/metrics.hpp"
#include "medley/midi.hpp"
#include "medley/musicxml.hpp"
#include "medley/playback.hpp"
#include "medley/roll.hpp"
#include "medley/stats.hpp"

namespace py = pybind11;
using namespace medley;

namespace {

Scheme scheme_from(const std::string& name) {
  if (name == "doubled") return Scheme::Doubled;
  if (name == "legacy") return Scheme::Legacy;
  throw MedleyError(Errc::BadConfig, "unknown scheme '" + name + "' (doubled|legacy)");
}

std::string scheme_name(Scheme scheme) {
  return scheme == Scheme::Doubled ? "doubled" : "legacy";
}

py::array_t<uint16_t> roll_to_array(const PianoRoll& roll) {
  py::array_t<uint16_t> array({roll.grid.bars, kStepsPerBar, roll.grid.voices});
  auto view = array.mutable_unchecked<3>();
  for (int bar = 0; bar < roll.grid.bars; ++bar)
    for (int step = 0; step < kStepsPerBar; ++step)
      for (int voice = 0; voice < roll.grid.voices; ++voice)
        view(bar, step, voice) = roll.grid.cell(bar, step, voice);
  return array;
}

PianoRoll roll_from_array(py::array array, const std::string& scheme) {
  auto typed = py::array_t<uint16_t, py::array::c_style | py::array::forcecast>::ensure(array);
  if (!typed || typed.ndim() != 3 || typed.shape(1) != kStepsPerBar)
    throw MedleyError(Errc::ShapeMismatch, "roll array must have shape (bars, 16, voices)");
  PianoRoll roll;
  roll.scheme = scheme_from(scheme);
  roll.grid = RollGrid(static_cast<int>(typed.shape(0)), static_cast<int>(typed.shape(2)));
  auto view = typed.unchecked<3>();
  for (int bar = 0; bar < roll.grid.bars; ++bar)
    for (int step = 0; step < kStepsPerBar; ++step)
      for (int voice = 0; voice < roll.grid.voices; ++voice)
        roll.grid.cell(bar, step, voice) = view(bar, step, voice);
  return roll;
}

NoteSlice slice_from_tuples(const std::vector<std::tuple<int, int, int>>& notes) {
  NoteSlice slice;
  slice.reserve(notes.size());
  for (const auto& [step, length, pitch] : notes) slice.push_back({step, length, pitch, -1});
  return slice;
}

Histogram histogram_from_pairs(const std::vector<std::pair<double, double>>& bins) {
  Histogram h;
  h.bins = bins;
  std::sort(h.bins.begin(), h.bins.end());
  for (const auto& [value, mass] : h.bins) h.total_mass += mass;
  h.normalize();
  return h;
}

py::dict report_to_dict(const MetricReport& report) {
  py::dict d;
  d["metric"] = report.metric;
  d["raw_distance"] = report.raw_distance;
  d["baseline_mean"] = report.baseline_mean;
  d["baseline_std"] = report.baseline_std;
  d["normalized"] = report.normalized ? py::object(py::float_(*report.normalized))
                                      : py::object(py::none());
  d["n_splits"] = report.n_splits;
  d["seed"] = report.seed;
  return d;
}

}  // namespace

PYBIND11_MODULE(_medley2k, m) {
  m.doc() = "Medley transition dataset pipeline: parsing, labeling, piano-roll "
            "encoding, augmentation, and evaluation metrics.";

  py::register_exception<MedleyError>(m, "MedleyError");

  py::class_<NoteEvent>(m, "NoteEvent")
      .def_readonly("pitch", &NoteEvent::pitch)
      .def_readonly("onset", &NoteEvent::onset)
      .def_readonly("duration", &NoteEvent::duration)
      .def_readonly("velocity", &NoteEvent::velocity)
      .def_readonly("track", &NoteEvent::track)
      .def("__repr__", [](const NoteEvent& n) {
        return "NoteEvent(pitch=" + std::to_string(n.pitch) + ", onset=" +
               std::to_string(n.onset) + ", duration=" + std::to_string(n.duration) + ")";
      });

  py::class_<Song>(m, "Song")
      .def_readonly("ticks_per_quarter", &Song::ticks_per_quarter)
      .def_readonly("notes", &Song::notes)
      .def_readonly("title", &Song::title)
      .def_readonly("id", &Song::id)
      .def_property_readonly("tempo_map",
                             [](const Song& s) {
                               std::vector<std::pair<int64_t, int64_t>> out;
                               for (const auto& t : s.tempo_map)
                                 out.emplace_back(t.tick, t.microseconds_per_quarter);
                               return out;
                             })
      .def_property_readonly("time_signatures",
                             [](const Song& s) {
                               std::vector<std::tuple<int64_t, int, int>> out;
                               for (const auto& t : s.time_signatures)
                                 out.emplace_back(t.tick, t.numerator, t.denominator);
                               return out;
                             })
      .def_property_readonly("programs",
                             [](const Song& s) {
                               py::list out;
                               for (const auto& p : s.programs)
                                 out.append(p ? py::object(py::int_(*p)) : py::none());
                               return out;
                             })
      .def_property_readonly("bar_count", &song_bar_count);

  py::class_<Measure>(m, "Measure")
      .def_readonly("index_real", &Measure::index_real)
      .def_readonly("repeat_start", &Measure::repeat_start)
      .def_property_readonly("repeat_end",
                             [](const Measure& me) {
                               return me.repeat_end ? py::object(py::int_(*me.repeat_end))
                                                    : py::none();
                             })
      .def_property_readonly("annotations", [](const Measure& me) {
        std::vector<std::string> out;
        for (const auto& a : me.annotations) out.push_back(a.text);
        return out;
      });

  py::class_<ScoreDocument>(m, "ScoreDocument")
      .def_readonly("measures", &ScoreDocument::measures)
      .def_readonly("parts", &ScoreDocument::parts)
      .def_readonly("title", &ScoreDocument::title);

  py::class_<PlaybackMap>(m, "PlaybackMap")
      .def_readonly("order", &PlaybackMap::order)
      .def("first_offset", &PlaybackMap::first_offset, py::arg("bar_real"));

  py::class_<TransitionPoint>(m, "TransitionPoint")
      .def_readonly("song_id", &TransitionPoint::song_id)
      .def_readonly("text", &TransitionPoint::text)
      .def_readonly("bar_real", &TransitionPoint::bar_real)
      .def_readonly("bar_offset", &TransitionPoint::bar_offset)
      .def_readonly("time_seconds", &TransitionPoint::time_seconds)
      .def_readonly("notes_during", &TransitionPoint::notes_during)
      .def_readonly("avg_note_length_seconds", &TransitionPoint::avg_note_length_seconds)
      .def_readonly("notes_before_bar", &TransitionPoint::notes_before_bar)
      .def_readonly("notes_after_bar", &TransitionPoint::notes_after_bar)
      .def_readonly("half_bar_starts", &TransitionPoint::half_bar_starts)
      .def("to_json", &tp_to_json);

  py::class_<Blacklist>(m, "Blacklist")
      .def_static("default", [] { return Blacklist::default_seed(); })
      .def_static("from_text", [](const std::string& text) { return Blacklist::from_text(text); })
      .def_static("from_file", &Blacklist::from_file)
      .def_property_readonly("word_count", &Blacklist::word_count)
      .def_property_readonly("glyph_count", &Blacklist::glyph_count);

  py::class_<ConfusionMatrix>(m, "ConfusionMatrix")
      .def(py::init([](int64_t tp, int64_t fp, int64_t fn, int64_t tn) {
             return ConfusionMatrix{tp, fp, fn, tn};
           }),
           py::arg("tp"), py::arg("fp"), py::arg("fn"), py::arg("tn") = 0)
      .def_readonly("tp", &ConfusionMatrix::tp)
      .def_readonly("fp", &ConfusionMatrix::fp)
      .def_readonly("fn", &ConfusionMatrix::fn)
      .def_readonly("tn", &ConfusionMatrix::tn)
      .def_property_readonly("precision",
                             [](const ConfusionMatrix& cm) {
                               auto p = precision(cm);
                               return p ? py::object(py::float_(*p)) : py::none();
                             })
      .def_property_readonly("recall", [](const ConfusionMatrix& cm) {
        auto r = recall(cm);
        return r ? py::object(py::float_(*r)) : py::none();
      });

  py::class_<RepetitionBreakdown>(m, "RepetitionBreakdown")
      .def_readonly("pbar_max", &RepetitionBreakdown::pbar_max)
      .def_readonly("pquarter_max", &RepetitionBreakdown::pquarter_max)
      .def_readonly("bar_score_scaled", &RepetitionBreakdown::bar_score_scaled)
      .def_readonly("quarter_score_scaled", &RepetitionBreakdown::quarter_score_scaled)
      .def_readonly("repetition_score", &RepetitionBreakdown::repetition_score);

  // parsing and alignment
  m.def("parse_midi",
        [](py::bytes data) { return parse_midi(std::string_view(std::string(data))); },
        py::arg("data"), "Parse a Standard MIDI File (format 0 or 1).");
  m.def("parse_mxl",
        [](py::bytes data) { return parse_mxl(std::string_view(std::string(data))); },
        py::arg("data"), "Parse compressed or bare MusicXML.");
  m.def("expand_repeats", [](const ScoreDocument& doc) { return expand_repeats(doc); },
        py::arg("doc"));
  m.def("time_of_bar", &time_of_bar, py::arg("song"), py::arg("bar_offset"));

  // labeling
  m.def("classify_annotation", &classify_annotation, py::arg("text"), py::arg("blacklist"));
  m.def("extract_annotations", &extract_annotations, py::arg("doc"));
  m.def("extract_transitions",
        [](const ScoreDocument& doc, const Song& song, const Blacklist& blacklist) {
          return extract_transitions(doc, song, blacklist);
        },
        py::arg("doc"), py::arg("song"), py::arg("blacklist"));
  m.def("evaluate_labels",
        [](const std::vector<std::pair<std::string, int>>& predicted,
           const std::vector<std::pair<std::string, int>>& truth, int window_bars) {
          auto keys = [](const std::vector<std::pair<std::string, int>>& raw) {
            std::vector<LabelKey> out;
            for (const auto& [song, bar] : raw) out.push_back({song, bar});
            return out;
          };
          return evaluate_labels(keys(predicted), keys(truth), window_bars);
        },
        py::arg("predicted"), py::arg("truth"), py::arg("window_bars") = 0);

  // filtering and slicing
  m.def("is_vivid",
        [](const Song& song, int bar_offset, const std::string& mode, int min_starts) {
          FilterConfig config;
          config.vivid_mode = mode == "any1" ? VividMode::Any1 : VividMode::All4;
          config.min_starts_per_half_bar = min_starts;
          return is_vivid(song, bar_offset, config);
        },
        py::arg("song"), py::arg("bar_offset"), py::arg("mode") = "all4",
        py::arg("min_starts") = 1);
  m.def("beat_ok",
        [](const Song& song, int bar_offset, double tolerance) {
          FilterConfig config;
          config.tempo_tolerance_bpm = tolerance;
          return beat_ok(song, bar_offset, config);
        },
        py::arg("song"), py::arg("bar_offset"), py::arg("tempo_tolerance_bpm") = 0.5);
  m.def("slice_sample",
        [](const Song& song, int bar_offset) {
          NoteSlice slice = slice_sample(song, bar_offset);
          std::vector<std::tuple<int, int, int>> out;
          for (const auto& n : slice) out.emplace_back(n.step, n.length, n.pitch);
          return out;
        },
        py::arg("song"), py::arg("bar_offset"));

  // codec
  m.def("encode",
        [](const std::vector<std::tuple<int, int, int>>& notes, int bars, int voices,
           const std::string& scheme) {
          return roll_to_array(encode(slice_from_tuples(notes), bars, voices, scheme_from(scheme)));
        },
        py::arg("notes"), py::arg("bars") = kSampleBars, py::arg("voices") = 1,
        py::arg("scheme") = "doubled",
        "Encode (step, length, pitch) notes into a (bars, 16, voices) uint16 roll.");
  m.def("decode",
        [](py::array roll, const std::string& scheme) {
          NoteSlice notes = decode(roll_from_array(roll, scheme));
          std::vector<std::tuple<int, int, int, int>> out;
          for (const auto& n : notes) out.emplace_back(n.step, n.length, n.pitch, n.voice);
          return out;
        },
        py::arg("roll"), py::arg("scheme") = "doubled",
        "Decode a roll back into (step, length, pitch, voice) notes.");
  m.def("normalize_holds",
        [](py::array roll) { return roll_to_array(normalize_holds(roll_from_array(roll, "doubled"))); },
        py::arg("roll"));
  m.def("to_mdlr",
        [](py::array roll, const std::string& scheme) {
          return py::bytes(to_mdlr(roll_from_array(roll, scheme)));
        },
        py::arg("roll"), py::arg("scheme") = "doubled");
  m.def("from_mdlr", [](py::bytes data) {
    PianoRoll roll = from_mdlr(std::string(data));
    return py::make_tuple(roll_to_array(roll), scheme_name(roll.scheme));
  });

  // augmentation
  m.def("transpose",
        [](py::array roll, int semitones, const std::string& scheme) -> py::object {
          auto shifted = transpose(roll_from_array(roll, scheme), semitones);
          if (!shifted) return py::none();
          return roll_to_array(*shifted);
        },
        py::arg("roll"), py::arg("semitones"), py::arg("scheme") = "doubled");
  m.def("vertical_variants",
        [](py::array roll, const std::string& scheme) {
          std::vector<py::array_t<uint16_t>> out;
          for (const auto& variant : vertical_variants(roll_from_array(roll, scheme)))
            out.push_back(roll_to_array(variant));
          return out;
        },
        py::arg("roll"), py::arg("scheme") = "doubled");
  m.def("horizontal_windows",
        [](const Song& song, int width, int stride) {
          std::vector<std::vector<std::tuple<int, int, int>>> out;
          for (const auto& window : horizontal_windows(song, width, stride)) {
            std::vector<std::tuple<int, int, int>> notes;
            for (const auto& n : window) notes.emplace_back(n.step, n.length, n.pitch);
            out.push_back(std::move(notes));
          }
          return out;
        },
        py::arg("song"), py::arg("width") = kSampleBars, py::arg("stride") = 1);

  // metrics
  m.def("is_dissonant", &is_dissonant, py::arg("interval"));
  m.def("dissonant_ratio", &dissonant_ratio, py::arg("chord"));
  m.def("silent_ratio",
        [](py::array roll, const std::string& scheme) {
          return silent_ratio(roll_from_array(roll, scheme));
        },
        py::arg("roll"), py::arg("scheme") = "doubled");
  m.def("variety_ratio",
        [](py::array roll, const std::string& scheme) {
          return variety_ratio(roll_from_array(roll, scheme));
        },
        py::arg("roll"), py::arg("scheme") = "doubled");
  m.def("variety_score",
        [](py::array roll, const std::string& scheme) {
          return variety_score(roll_from_array(roll, scheme));
        },
        py::arg("roll"), py::arg("scheme") = "doubled");
  m.def("length_variety_ratio",
        [](py::array roll, const std::string& scheme) {
          return length_variety_ratio(roll_from_array(roll, scheme));
        },
        py::arg("roll"), py::arg("scheme") = "doubled");
  m.def("avg_note_length",
        [](py::array roll, const std::string& scheme) {
          return avg_note_length(roll_from_array(roll, scheme));
        },
        py::arg("roll"), py::arg("scheme") = "doubled");
  m.def("repetition_score",
        [](py::array roll, const std::string& scheme) {
          return repetition_score(roll_from_array(roll, scheme));
        },
        py::arg("roll"), py::arg("scheme") = "doubled");
  m.def("interval_match_regularizer",
        [](py::array generated, py::array reference, const std::string& scheme) {
          return interval_match_regularizer(roll_from_array(generated, scheme),
                                            roll_from_array(reference, scheme));
        },
        py::arg("generated"), py::arg("reference"), py::arg("scheme") = "doubled");
  m.def("wasserstein_1d",
        [](const std::vector<std::pair<double, double>>& a,
           const std::vector<std::pair<double, double>>& b) {
          return wasserstein_1d(histogram_from_pairs(a), histogram_from_pairs(b));
        },
        py::arg("a"), py::arg("b"),
        "1-D Wasserstein distance between two (value, mass) histograms; masses are normalized.");
  m.def("total_variation",
        [](const std::vector<std::pair<double, double>>& a,
           const std::vector<std::pair<double, double>>& b) {
          return total_variation(histogram_from_pairs(a), histogram_from_pairs(b));
        },
        py::arg("a"), py::arg("b"));
  m.def("normalized_score",
        [](const std::string& name, const std::vector<double>& generated,
           const std::vector<double>& reference, int n_splits, uint64_t seed) {
          return report_to_dict(normalized_score(name, generated, reference, n_splits, seed));
        },
        py::arg("metric"), py::arg("generated"), py::arg("reference"), py::arg("n_splits") = 50,
        py::arg("seed") = 17);
  m.def("target_onset_count",
        [](py::array roll, const std::string& scheme) {
          return target_onset_count(roll_from_array(roll, scheme));
        },
        py::arg("roll"), py::arg("scheme") = "doubled");
}
