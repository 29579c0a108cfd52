#include "cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "medley/augment.hpp"
#include "medley/extract.hpp"
#include "medley/filter.hpp"
#include "medley/jsonio.hpp"
#include "medley/metrics.hpp"
#include "medley/midi.hpp"
#include "medley/musicxml.hpp"
#include "medley/roll.hpp"
#include "medley/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace medley::cli {

namespace {

template <typename Fn>
void parallel_for(size_t count, int workers, Fn&& fn) {
  if (workers <= 1 || count <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> cursor{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      size_t i = cursor.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  int n = std::min<int>(workers, static_cast<int>(count));
  pool.reserve(n);
  for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

bool has_extension(const fs::path& p, std::initializer_list<const char*> exts) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  for (const char* candidate : exts)
    if (e == candidate) return true;
  return false;
}

Scheme scheme_from(const std::string& name) {
  if (name == "doubled") return Scheme::Doubled;
  if (name == "legacy") return Scheme::Legacy;
  throw MedleyError(Errc::BadConfig, "unknown scheme '" + name + "' (doubled|legacy)");
}

VividMode vivid_from(const std::string& name) {
  if (name == "all4") return VividMode::All4;
  if (name == "any1") return VividMode::Any1;
  throw MedleyError(Errc::BadConfig, "unknown vivid mode '" + name + "' (all4|any1)");
}

Blacklist load_blacklist(const std::string& path) {
  if (path.empty()) return Blacklist::default_seed();
  return Blacklist::from_file(path);
}

Song load_song(const std::string& path, const std::string& id, Audit* audit) {
  Song song = parse_midi(read_file(path), audit);
  song.id = id;
  fs::path sidecar = fs::path(path).replace_extension(".json");
  if (fs::exists(sidecar)) {
    try {
      json meta = json::parse(read_file(sidecar.string()));
      if (meta.contains("title") && meta["title"].is_string())
        song.title = meta["title"].get<std::string>();
    } catch (const json::exception&) {
      audit_note(audit, "BadMetadata", sidecar.string() + ": unparseable JSON ignored");
    }
  }
  if (song.title.empty()) song.title = id;
  return song;
}

std::map<std::string, Song> load_song_dir(const std::string& dir,
                                          const std::vector<std::string>& wanted_ids,
                                          int workers, CommandResult& result) {
  std::vector<std::string> ids(wanted_ids);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<std::optional<Song>> loaded(ids.size());
  std::vector<Audit> audits(ids.size());
  parallel_for(ids.size(), workers, [&](size_t i) {
    for (const char* ext : {".mid", ".midi"}) {
      fs::path p = fs::path(dir) / (ids[i] + ext);
      if (!fs::exists(p)) continue;
      try {
        loaded[i] = load_song(p.string(), ids[i], &audits[i]);
      } catch (const std::exception& e) {
        audit_note(&audits[i], "MidiParseFailure", ids[i] + ": " + e.what());
      }
      return;
    }
    audit_note(&audits[i], "MidiMissing", ids[i] + ": no .mid/.midi in " + dir);
  });
  std::map<std::string, Song> songs;
  for (size_t i = 0; i < ids.size(); ++i) {
    for (auto& a : audits[i]) result.audit.push_back(std::move(a));
    if (loaded[i]) songs.emplace(ids[i], std::move(*loaded[i]));
  }
  return songs;
}

std::vector<PianoRoll> load_roll_dir(const std::string& dir, std::vector<std::string>* names) {
  std::vector<fs::path> files;
  if (!fs::is_directory(dir)) throw MedleyError(Errc::NoInputFiles, dir + " is not a directory");
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && has_extension(entry.path(), {".mdlr"}))
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<PianoRoll> rolls;
  rolls.reserve(files.size());
  for (const auto& f : files) {
    rolls.push_back(from_mdlr(read_file(f.string())));
    if (names) names->push_back(f.stem().string());
  }
  if (rolls.empty()) throw MedleyError(Errc::NoInputFiles, "no .mdlr rolls in " + dir);
  return rolls;
}

void write_or_print(const std::string& path, const std::string& contents) {
  if (path.empty()) std::cout << contents;
  else write_file(path, contents);
}

int exit_code_for(int processed, int failed) {
  if (processed == 0 && failed > 0) return 2;
  return failed > 0 ? 1 : 0;
}

}  // namespace

Config load_config(const std::string& path) {
  Config config;
  if (path.empty()) return config;
  std::ifstream in(path);
  if (!in) throw MedleyError(Errc::BadConfig, "cannot open config " + path);
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw MedleyError(Errc::BadConfig,
                          path + ":" + std::to_string(line_number) + ": expected key=value");
      continue;
    }
    auto trim = [](std::string s) {
      size_t b = s.find_first_not_of(" \t\r");
      size_t e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "blacklist") config.blacklist_path = value;
      else if (key == "tempo_tolerance_bpm") config.tempo_tolerance_bpm = std::stod(value);
      else if (key == "vivid_mode") config.vivid_mode = value;
      else if (key == "n_splits") config.n_splits = std::stoi(value);
      else if (key == "seed") config.seed = std::stoull(value);
      else if (key == "epsilon_seconds") config.epsilon_seconds = std::stod(value);
      else if (key == "window_bars") config.window_bars = std::stoi(value);
      else
        throw MedleyError(Errc::BadConfig,
                          path + ":" + std::to_string(line_number) + ": unknown key " + key);
    } catch (const std::invalid_argument&) {
      throw MedleyError(Errc::BadConfig,
                        path + ":" + std::to_string(line_number) + ": bad value for " + key);
    }
  }
  return config;
}

void apply_seed_env(Config& config) {
  if (const char* env = std::getenv("MEDLEY_SEED")) {
    try {
      config.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw MedleyError(Errc::BadConfig, "MEDLEY_SEED is not a number");
    }
  }
}

CommandResult run_extract(const ExtractOptions& options) {
  CommandResult result;
  if (!fs::is_directory(options.input_dir))
    throw MedleyError(Errc::NoInputFiles, options.input_dir + " is not a directory");

  std::map<std::string, std::pair<fs::path, fs::path>> pairs;  // id -> (score, midi)
  for (const auto& entry : fs::directory_iterator(options.input_dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path& p = entry.path();
    if (has_extension(p, {".mxl", ".musicxml", ".xml"})) pairs[p.stem().string()].first = p;
    else if (has_extension(p, {".mid", ".midi"})) pairs[p.stem().string()].second = p;
  }
  std::vector<std::pair<std::string, std::pair<fs::path, fs::path>>> jobs;
  for (auto& [id, files] : pairs) {
    if (files.first.empty() || files.second.empty()) {
      audit_note(&result.audit, "UnpairedFile",
                 id + ": missing " + (files.first.empty() ? "score" : "midi") + " file");
      continue;
    }
    jobs.emplace_back(id, files);
  }
  if (jobs.empty())
    throw MedleyError(Errc::NoInputFiles, "no paired score/midi files in " + options.input_dir);

  Blacklist blacklist = load_blacklist(options.blacklist_path);
  ExtractConfig extract_config;
  extract_config.epsilon_seconds = options.epsilon_seconds;

  struct JobResult {
    std::vector<TransitionPoint> tps;
    Audit audit;
    bool failed = false;
  };
  std::vector<JobResult> outcomes(jobs.size());
  parallel_for(jobs.size(), options.workers, [&](size_t i) {
    JobResult& out = outcomes[i];
    const auto& [id, files] = jobs[i];
    try {
      ScoreDocument doc = parse_mxl(read_file(files.first.string()), &out.audit);
      Song song = load_song(files.second.string(), id, &out.audit);
      out.tps = extract_transitions(doc, song, blacklist, extract_config, &out.audit);
    } catch (const std::exception& e) {
      out.failed = true;
      audit_note(&out.audit, "FileFailure", id + ": " + e.what());
    }
  });

  std::vector<TransitionPoint> all;
  for (auto& outcome : outcomes) {
    for (auto& a : outcome.audit) result.audit.push_back(std::move(a));
    if (outcome.failed) ++result.failed;
    else {
      ++result.processed;
      for (auto& tp : outcome.tps) all.push_back(std::move(tp));
    }
  }
  std::stable_sort(all.begin(), all.end(), [](const TransitionPoint& a, const TransitionPoint& b) {
    if (a.song_id != b.song_id) return a.song_id < b.song_id;
    if (a.bar_real != b.bar_real) return a.bar_real < b.bar_real;
    return a.text < b.text;
  });
  write_tp_jsonl(options.out_path, all);
  result.exit_code = exit_code_for(result.processed, result.failed);
  return result;
}

CommandResult run_filter(const FilterOptions& options) {
  CommandResult result;
  FilterConfig config;
  config.vivid_mode = vivid_from(options.vivid_mode);
  config.min_starts_per_half_bar = options.min_starts_per_half_bar;
  config.tempo_tolerance_bpm = options.tempo_tolerance_bpm;

  std::vector<TransitionPoint> tps = read_tp_jsonl(options.tp_path);
  std::vector<std::string> ids;
  for (const auto& tp : tps) ids.push_back(tp.song_id);
  auto songs = load_song_dir(options.midi_dir, ids, options.workers, result);

  std::vector<TransitionPoint> kept;
  for (const auto& tp : tps) {
    auto it = songs.find(tp.song_id);
    if (it == songs.end()) {
      ++result.failed;
      audit_note(&result.audit, "SkippedTransition",
                 tp.song_id + " bar " + std::to_string(tp.bar_offset) + ": midi unavailable");
      continue;
    }
    ++result.processed;
    try {
      if (!is_vivid(it->second, tp.bar_offset, config)) {
        audit_note(&result.audit, "NotVivid",
                   tp.song_id + " bar " + std::to_string(tp.bar_offset));
        continue;
      }
      if (!beat_ok(it->second, tp.bar_offset, config)) {
        audit_note(&result.audit, "BeatOrTempo",
                   tp.song_id + " bar " + std::to_string(tp.bar_offset));
        continue;
      }
    } catch (const MedleyError& e) {
      audit_note(&result.audit, "WindowOutOfRange",
                 tp.song_id + " bar " + std::to_string(tp.bar_offset) + ": " + e.what());
      continue;
    }
    kept.push_back(tp);
  }
  write_tp_jsonl(options.out_path, kept);
  result.exit_code = exit_code_for(result.processed, result.failed);
  return result;
}

namespace {

std::string roll_file_name(const std::string& song_id, int bar_offset) {
  std::ostringstream name;
  name << song_id << "__bar" << bar_offset;
  return name.str();
}

}  // namespace

CommandResult run_encode(const EncodeOptions& options) {
  CommandResult result;
  const Scheme scheme = scheme_from(options.scheme);
  if (options.voices < 1) throw MedleyError(Errc::BadConfig, "voices must be >= 1");
  std::vector<TransitionPoint> tps = read_tp_jsonl(options.tp_path);
  std::vector<std::string> ids;
  for (const auto& tp : tps) ids.push_back(tp.song_id);
  auto songs = load_song_dir(options.midi_dir, ids, options.workers, result);
  fs::create_directories(options.out_dir);

  struct JobResult {
    Audit audit;
    int failed = 0;
    int processed = 0;
  };
  std::vector<JobResult> outcomes(tps.size());
  parallel_for(tps.size(), options.workers, [&](size_t i) {
    const TransitionPoint& tp = tps[i];
    JobResult& out = outcomes[i];
    auto it = songs.find(tp.song_id);
    if (it == songs.end()) {
      out.failed = 1;
      audit_note(&out.audit, "SkippedTransition", tp.song_id + ": midi unavailable");
      return;
    }
    try {
      NoteSlice slice = slice_sample(it->second, tp.bar_offset, &out.audit);
      PianoRoll roll = encode(slice, kSampleBars, options.voices, scheme, &out.audit);
      std::string base =
          (fs::path(options.out_dir) / roll_file_name(tp.song_id, tp.bar_offset)).string();
      write_file(base + ".mdlr", to_mdlr(roll));
      if (options.csv_mirror) write_file(base + ".csv", to_csv(roll));
      out.processed = 1;
    } catch (const MedleyError& e) {
      if (e.code() == Errc::InsufficientContext) {
        audit_note(&out.audit, "InsufficientContext",
                   tp.song_id + " bar " + std::to_string(tp.bar_offset));
      } else {
        out.failed = 1;
        audit_note(&out.audit, "EncodeFailure",
                   tp.song_id + " bar " + std::to_string(tp.bar_offset) + ": " + e.what());
      }
    }
  });
  for (auto& o : outcomes) {
    result.processed += o.processed;
    result.failed += o.failed;
    for (auto& a : o.audit) result.audit.push_back(std::move(a));
  }
  result.exit_code = exit_code_for(result.processed, result.failed);
  return result;
}

CommandResult run_decode(const DecodeOptions& options) {
  CommandResult result;
  PianoRoll roll = from_mdlr(read_file(options.roll_path));
  NoteSlice notes = decode(roll);
  std::ostringstream out;
  for (const auto& n : notes) {
    json j;
    j["step"] = n.step;
    j["length"] = n.length;
    j["pitch"] = n.pitch;
    j["voice"] = n.voice;
    out << j.dump() << '\n';
  }
  write_or_print(options.out_path, out.str());
  result.processed = 1;
  return result;
}

CommandResult run_augment(const AugmentOptions& options) {
  CommandResult result;
  fs::create_directories(options.out_dir);
  const Scheme scheme = scheme_from(options.scheme);

  if (options.horizontal) {
    if (!fs::is_directory(options.midi_dir))
      throw MedleyError(Errc::NoInputFiles, options.midi_dir + " is not a directory");
    std::vector<std::string> ids;
    for (const auto& entry : fs::directory_iterator(options.midi_dir))
      if (entry.is_regular_file() && has_extension(entry.path(), {".mid", ".midi"}))
        ids.push_back(entry.path().stem().string());
    if (ids.empty()) throw MedleyError(Errc::NoInputFiles, "no midi files in " + options.midi_dir);
    std::sort(ids.begin(), ids.end());
    auto songs = load_song_dir(options.midi_dir, ids, options.workers, result);
    for (const auto& [id, song] : songs) {
      try {
        auto windows = horizontal_windows(song, kSampleBars, 1, &result.audit);
        for (size_t w = 0; w < windows.size(); ++w) {
          PianoRoll roll = encode(windows[w], kSampleBars, options.voices, scheme, &result.audit);
          std::ostringstream name;
          name << id << "__w" << (w + 1) << ".mdlr";
          write_file((fs::path(options.out_dir) / name.str()).string(), to_mdlr(roll));
        }
        ++result.processed;
      } catch (const MedleyError& e) {
        if (e.code() == Errc::SongTooShort) {
          audit_note(&result.audit, "SongTooShort", id);
        } else {
          ++result.failed;
          audit_note(&result.audit, "AugmentFailure", id + ": " + e.what());
        }
      }
    }
    result.exit_code = exit_code_for(result.processed, result.failed);
    return result;
  }

  std::vector<std::string> names;
  std::vector<PianoRoll> rolls = load_roll_dir(options.in_dir, &names);
  parallel_for(rolls.size(), options.workers, [&](size_t i) {
    for (int k = -11; k <= 11; ++k) {
      if (k == 0) continue;
      auto shifted = transpose(rolls[i], k);
      if (!shifted) continue;
      std::ostringstream name;
      name << names[i] << "__k" << (k > 0 ? "+" : "") << k << ".mdlr";
      write_file((fs::path(options.out_dir) / name.str()).string(), to_mdlr(*shifted));
    }
  });
  result.processed = static_cast<int>(rolls.size());
  return result;
}

CommandResult run_metrics(const MetricsOptions& options) {
  CommandResult result;
  std::vector<PianoRoll> generated = load_roll_dir(options.generated_dir, nullptr);
  std::vector<PianoRoll> reference = load_roll_dir(options.reference_dir, nullptr);

  struct ScalarMetric {
    const char* name;
    double (*value)(const PianoRoll&);
  };
  static const ScalarMetric kScalars[] = {
      {"silent_ratio", silent_ratio},
      {"variety_ratio", variety_ratio},
      {"variety_score", variety_score},
      {"length_variety_ratio", length_variety_ratio},
      {"avg_note_length", avg_note_length},
      {"repetition_score", [](const PianoRoll& r) { return repetition_score(r).repetition_score; }},
  };

  std::ostringstream out;
  auto values_of = [](const std::vector<PianoRoll>& rolls, double (*fn)(const PianoRoll&)) {
    std::vector<double> values;
    values.reserve(rolls.size());
    for (const auto& roll : rolls) values.push_back(fn(roll));
    return values;
  };
  for (const auto& metric : kScalars) {
    MetricReport report = normalized_score(metric.name, values_of(generated, metric.value),
                                           values_of(reference, metric.value), options.n_splits,
                                           options.seed);
    out << metric_report_to_json(report) << '\n';
    ++result.processed;
  }

  // Dissonant ratio: purely monophonic pieces carry no value.
  {
    auto dissonance_values = [](const std::vector<PianoRoll>& rolls) {
      std::vector<double> values;
      for (const auto& roll : rolls)
        if (auto v = piece_dissonance(roll)) values.push_back(*v);
      return values;
    };
    std::vector<double> gen = dissonance_values(generated);
    std::vector<double> ref = dissonance_values(reference);
    if (gen.empty() || ref.size() < 4) {
      audit_note(&result.audit, "MetricSkipped",
                 "dissonant_ratio: not enough polyphonic pieces");
    } else {
      MetricReport report =
          normalized_score("dissonant_ratio", gen, ref, options.n_splits, options.seed);
      out << metric_report_to_json(report) << '\n';
      ++result.processed;
    }
  }

  MetricReport vd = normalized_score_combinations("variety_distribution", generated, reference,
                                                  options.n_splits, options.seed);
  out << metric_report_to_json(vd) << '\n';
  ++result.processed;

  write_or_print(options.out_path, out.str());
  return result;
}

CommandResult run_stats(const StatsOptions& options) {
  CommandResult result;
  if (!fs::is_directory(options.midi_dir))
    throw MedleyError(Errc::NoInputFiles, options.midi_dir + " is not a directory");
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(options.midi_dir))
    if (entry.is_regular_file() && has_extension(entry.path(), {".mid", ".midi"}))
      ids.push_back(entry.path().stem().string());
  if (ids.empty()) throw MedleyError(Errc::NoInputFiles, "no midi files in " + options.midi_dir);
  std::sort(ids.begin(), ids.end());
  auto by_id = load_song_dir(options.midi_dir, ids, options.workers, result);

  std::vector<Song> corpus;
  std::ostringstream summary;
  summary << "song_id,duration_minutes,key_changes,tempo_changes,instruments\n";
  double mean_duration = 0, mean_keys = 0, mean_tempos = 0, mean_instruments = 0;
  for (const auto& id : ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      ++result.failed;
      continue;
    }
    MedleySummary s = medley_summary(it->second);
    summary << id << ',' << s.duration_minutes << ',' << s.key_change_count << ','
            << s.tempo_change_count << ',' << s.instrument_count << '\n';
    mean_duration += s.duration_minutes;
    mean_keys += s.key_change_count;
    mean_tempos += s.tempo_change_count;
    mean_instruments += s.instrument_count;
    corpus.push_back(it->second);
    ++result.processed;
  }
  if (corpus.empty()) throw MedleyError(Errc::EmptyCorpus, "no parseable midi files");

  write_file(options.out_prefix + "_summary.csv", summary.str());
  {
    json means;
    means["songs"] = corpus.size();
    means["mean_duration_minutes"] = mean_duration / corpus.size();
    means["mean_key_changes"] = mean_keys / corpus.size();
    means["mean_tempo_changes"] = mean_tempos / corpus.size();
    means["mean_instruments"] = mean_instruments / corpus.size();
    write_file(options.out_prefix + "_means.json", means.dump(2) + "\n");
  }
  write_file(options.out_prefix + "_instrumentation.csv",
             instrumentation_csv(instrumentation_distribution(corpus)));
  if (!options.rolls_dir.empty()) {
    std::vector<PianoRoll> rolls = load_roll_dir(options.rolls_dir, nullptr);
    write_file(options.out_prefix + "_transition_notes.csv",
               note_histogram_csv(transition_note_histogram(rolls)));
  }
  result.exit_code = exit_code_for(result.processed, result.failed);
  return result;
}

CommandResult run_validate(const ValidateOptions& options) {
  CommandResult result;
  ConfusionMatrix matrix;
  if (!options.counts_path.empty()) {
    matrix = confusion_from_json(read_file(options.counts_path));
  } else {
    auto to_keys = [](const std::vector<TransitionPoint>& tps) {
      std::vector<LabelKey> keys;
      keys.reserve(tps.size());
      for (const auto& tp : tps) keys.push_back({tp.song_id, tp.bar_real});
      return keys;
    };
    std::vector<LabelKey> predicted = to_keys(read_tp_jsonl(options.predicted_path));
    std::vector<LabelKey> truth = to_keys(read_tp_jsonl(options.truth_path));
    std::vector<LabelKey> candidates;
    if (!options.candidates_path.empty())
      candidates = to_keys(read_tp_jsonl(options.candidates_path));
    matrix = evaluate_labels(predicted, truth, options.window_bars, candidates);
  }
  write_or_print(options.out_path, confusion_to_json(matrix) + "\n");
  result.processed = 1;
  return result;
}

}  // namespace medley::cli
