#include "medley/jsonio.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace medley {

using nlohmann::json;

std::string tp_to_json(const TransitionPoint& tp) {
  json j;
  j["song_id"] = tp.song_id;
  j["text"] = tp.text;
  j["bar_real"] = tp.bar_real;
  j["bar_offset"] = tp.bar_offset;
  j["time_seconds"] = tp.time_seconds;
  j["notes_during"] = tp.notes_during;
  j["avg_note_length_seconds"] = tp.avg_note_length_seconds;
  j["notes_before_bar"] = tp.notes_before_bar;
  j["notes_after_bar"] = tp.notes_after_bar;
  j["half_bar_starts"] = tp.half_bar_starts;
  return j.dump();
}

TransitionPoint tp_from_json(const std::string& line) {
  json j = json::parse(line);
  TransitionPoint tp;
  tp.song_id = j.at("song_id").get<std::string>();
  tp.bar_real = j.at("bar_real").get<int>();
  // Ground-truth and candidate files may carry only (song_id, bar_real).
  tp.text = j.value("text", std::string());
  tp.bar_offset = j.value("bar_offset", tp.bar_real);
  tp.time_seconds = j.value("time_seconds", 0.0);
  tp.notes_during = j.value("notes_during", 0);
  tp.avg_note_length_seconds = j.value("avg_note_length_seconds", 0.0);
  tp.notes_before_bar = j.value("notes_before_bar", 0);
  tp.notes_after_bar = j.value("notes_after_bar", 0);
  if (j.contains("half_bar_starts")) {
    auto arr = j.at("half_bar_starts");
    for (size_t i = 0; i < 4 && i < arr.size(); ++i) tp.half_bar_starts[i] = arr[i].get<int>();
  }
  return tp;
}

std::vector<TransitionPoint> read_tp_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MedleyError(Errc::IoFailure, "cannot open " + path);
  std::vector<TransitionPoint> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(tp_from_json(line));
  }
  return out;
}

void write_tp_jsonl(const std::string& path, const std::vector<TransitionPoint>& tps) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MedleyError(Errc::IoFailure, "cannot write " + path);
  for (const auto& tp : tps) out << tp_to_json(tp) << '\n';
}

std::string metric_report_to_json(const MetricReport& report) {
  json j;
  j["metric"] = report.metric;
  j["raw_distance"] = report.raw_distance;
  j["baseline_mean"] = report.baseline_mean;
  j["baseline_std"] = report.baseline_std;
  if (report.normalized) j["normalized"] = *report.normalized;
  else j["normalized"] = nullptr;
  j["n_splits"] = report.n_splits;
  j["seed"] = report.seed;
  return j.dump();
}

std::string confusion_to_json(const ConfusionMatrix& matrix) {
  json j;
  j["tp"] = matrix.tp;
  j["fp"] = matrix.fp;
  j["fn"] = matrix.fn;
  j["tn"] = matrix.tn;
  auto p = precision(matrix);
  auto r = recall(matrix);
  j["precision"] = p ? json(*p) : json(nullptr);
  j["recall"] = r ? json(*r) : json(nullptr);
  return j.dump();
}

ConfusionMatrix confusion_from_json(const std::string& text) {
  json j = json::parse(text);
  ConfusionMatrix m;
  m.tp = j.at("tp").get<int64_t>();
  m.fp = j.at("fp").get<int64_t>();
  m.fn = j.at("fn").get<int64_t>();
  m.tn = j.value("tn", int64_t{0});
  return m;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MedleyError(Errc::IoFailure, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MedleyError(Errc::IoFailure, "cannot write " + path);
  out << contents;
}

}  // namespace medley
