#pragma once

#include <optional>
#include <string>
#include <vector>

#include "medley/core.hpp"
#include "medley/errors.hpp"

namespace medley::cli {

// Flat key=value config file. Recognized keys: blacklist,
// tempo_tolerance_bpm, vivid_mode, n_splits, seed, epsilon_seconds,
// window_bars. Precedence: command-line flag > MEDLEY_SEED env > config
// file > default.
struct Config {
  std::string blacklist_path;
  double tempo_tolerance_bpm = 0.5;
  std::string vivid_mode = "all4";
  int n_splits = 50;
  uint64_t seed = 17;
  double epsilon_seconds = 0.0;
  int window_bars = 0;
};

Config load_config(const std::string& path);  // empty path -> defaults
void apply_seed_env(Config& config);          // MEDLEY_SEED override

struct CommandResult {
  int exit_code = 0;  // 0 ok, 1 partial failures, 2 fatal
  int processed = 0;
  int failed = 0;
  Audit audit;
};

struct ExtractOptions {
  std::string input_dir;
  std::string out_path;
  std::string blacklist_path;  // empty -> built-in seed list
  double epsilon_seconds = 0.0;
  int workers = 1;
};
CommandResult run_extract(const ExtractOptions& options);

struct FilterOptions {
  std::string tp_path;
  std::string midi_dir;
  std::string out_path;
  std::string vivid_mode = "all4";  // or "any1"
  int min_starts_per_half_bar = 1;
  double tempo_tolerance_bpm = 0.5;
  int workers = 1;
};
CommandResult run_filter(const FilterOptions& options);

struct EncodeOptions {
  std::string tp_path;
  std::string midi_dir;
  std::string out_dir;
  int voices = 1;
  std::string scheme = "doubled";  // or "legacy"
  bool csv_mirror = false;
  int workers = 1;
};
CommandResult run_encode(const EncodeOptions& options);

struct DecodeOptions {
  std::string roll_path;
  std::string out_path;  // empty -> stdout
};
CommandResult run_decode(const DecodeOptions& options);

struct AugmentOptions {
  std::string in_dir;    // .mdlr rolls (vertical mode)
  std::string out_dir;
  bool horizontal = false;
  std::string midi_dir;  // horizontal mode input
  int voices = 1;
  std::string scheme = "doubled";
  int workers = 1;
};
CommandResult run_augment(const AugmentOptions& options);

struct MetricsOptions {
  std::string generated_dir;
  std::string reference_dir;
  std::string out_path;  // empty -> stdout
  int n_splits = 50;
  uint64_t seed = 17;
};
CommandResult run_metrics(const MetricsOptions& options);

struct StatsOptions {
  std::string midi_dir;
  std::string rolls_dir;  // optional
  std::string out_prefix;
  int workers = 1;
};
CommandResult run_stats(const StatsOptions& options);

struct ValidateOptions {
  std::string predicted_path;
  std::string truth_path;
  std::string candidates_path;  // optional
  std::string counts_path;      // alternative input: confusion counts JSON
  std::string out_path;         // empty -> stdout
  int window_bars = 0;
};
CommandResult run_validate(const ValidateOptions& options);

}  // namespace medley::cli
