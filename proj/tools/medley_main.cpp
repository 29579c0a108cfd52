#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli/commands.hpp"

using namespace medley;
using medley::cli::Config;

namespace {

void print_audit(const Audit& audit) {
  for (const auto& record : audit) {
    nlohmann::json j;
    j["code"] = record.code;
    j["message"] = record.message;
    std::cerr << j.dump() << '\n';
  }
}

int finish(const cli::CommandResult& result) {
  print_audit(result.audit);
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Medley transition dataset pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "flat key=value config file")->configurable(false);

  // extract
  auto* extract = app.add_subcommand("extract", "label transitions from paired .mxl/.mid files");
  cli::ExtractOptions extract_options;
  extract->add_option("--input", extract_options.input_dir, "directory of paired files")
      ->required();
  extract->add_option("--out", extract_options.out_path, "output JSON-lines file")->required();
  auto* extract_blacklist =
      extract->add_option("--blacklist", extract_options.blacklist_path, "blacklist file");
  auto* extract_epsilon = extract->add_option("--epsilon-seconds", extract_options.epsilon_seconds,
                                              "tolerance around the TP instant");
  extract->add_option("--workers", extract_options.workers, "parallel file workers");

  // filter
  auto* filter = app.add_subcommand("filter", "postprocess transitions (vividness, beat, tempo)");
  cli::FilterOptions filter_options;
  filter->add_option("--tp", filter_options.tp_path, "input TransitionPoint JSON-lines")
      ->required();
  filter->add_option("--midi-dir", filter_options.midi_dir, "directory of .mid files")->required();
  filter->add_option("--out", filter_options.out_path, "output JSON-lines file")->required();
  auto* filter_vivid =
      filter->add_option("--vivid-mode", filter_options.vivid_mode, "all4 or any1");
  filter->add_option("--min-starts", filter_options.min_starts_per_half_bar,
                     "required onsets per half bar");
  auto* filter_tolerance = filter->add_option(
      "--tempo-tolerance", filter_options.tempo_tolerance_bpm, "max BPM spread in the window");
  filter->add_option("--workers", filter_options.workers, "parallel workers");

  // encode
  auto* encode = app.add_subcommand("encode", "slice 12-bar samples and write piano rolls");
  cli::EncodeOptions encode_options;
  encode->add_option("--tp", encode_options.tp_path)->required();
  encode->add_option("--midi-dir", encode_options.midi_dir)->required();
  encode->add_option("--out-dir", encode_options.out_dir)->required();
  encode->add_option("--voices", encode_options.voices, "voices per step");
  encode->add_option("--scheme", encode_options.scheme, "doubled or legacy");
  encode->add_flag("--csv", encode_options.csv_mirror, "also write CSV mirrors");
  encode->add_option("--workers", encode_options.workers);

  // decode
  auto* decode = app.add_subcommand("decode", "decode one .mdlr roll into notes");
  cli::DecodeOptions decode_options;
  decode->add_option("--roll", decode_options.roll_path)->required();
  decode->add_option("--out", decode_options.out_path, "output path (default stdout)");

  // augment
  auto* augment = app.add_subcommand("augment", "vertical (default) or horizontal augmentation");
  cli::AugmentOptions augment_options;
  augment->add_option("--in-dir", augment_options.in_dir, "roll directory (vertical mode)");
  augment->add_option("--out-dir", augment_options.out_dir)->required();
  augment->add_flag("--horizontal", augment_options.horizontal, "slide 12-bar windows over songs");
  augment->add_option("--midi-dir", augment_options.midi_dir, "midi directory (horizontal mode)");
  augment->add_option("--voices", augment_options.voices);
  augment->add_option("--scheme", augment_options.scheme);
  augment->add_option("--workers", augment_options.workers);

  // metrics
  auto* metrics = app.add_subcommand("metrics", "score a generated roll set against a reference");
  cli::MetricsOptions metrics_options;
  metrics->add_option("--generated", metrics_options.generated_dir)->required();
  metrics->add_option("--reference", metrics_options.reference_dir)->required();
  metrics->add_option("--out", metrics_options.out_path, "output path (default stdout)");
  auto* metrics_splits = metrics->add_option("--n-splits", metrics_options.n_splits);
  auto* metrics_seed = metrics->add_option("--seed", metrics_options.seed);

  // stats
  auto* stats = app.add_subcommand("stats", "corpus statistics (summary, instrumentation)");
  cli::StatsOptions stats_options;
  stats->add_option("--midi-dir", stats_options.midi_dir)->required();
  stats->add_option("--rolls", stats_options.rolls_dir, "roll directory for the note histogram");
  stats->add_option("--out-prefix", stats_options.out_prefix)->required();
  stats->add_option("--workers", stats_options.workers);

  // validate
  auto* validate = app.add_subcommand("validate", "precision/recall of predicted labels");
  cli::ValidateOptions validate_options;
  validate->add_option("--predicted", validate_options.predicted_path);
  validate->add_option("--truth", validate_options.truth_path);
  validate->add_option("--candidates", validate_options.candidates_path,
                       "annotated candidate bars for tn counting");
  validate->add_option("--counts", validate_options.counts_path,
                       "confusion counts JSON instead of label files");
  auto* validate_window =
      validate->add_option("--window-bars", validate_options.window_bars, "match tolerance");
  validate->add_option("--out", validate_options.out_path, "output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    Config config = cli::load_config(config_path);
    cli::apply_seed_env(config);

    if (*extract) {
      if (!*extract_blacklist) extract_options.blacklist_path = config.blacklist_path;
      if (!*extract_epsilon) extract_options.epsilon_seconds = config.epsilon_seconds;
      return finish(cli::run_extract(extract_options));
    }
    if (*filter) {
      if (!*filter_vivid) filter_options.vivid_mode = config.vivid_mode;
      if (!*filter_tolerance) filter_options.tempo_tolerance_bpm = config.tempo_tolerance_bpm;
      return finish(cli::run_filter(filter_options));
    }
    if (*encode) return finish(cli::run_encode(encode_options));
    if (*decode) return finish(cli::run_decode(decode_options));
    if (*augment) return finish(cli::run_augment(augment_options));
    if (*metrics) {
      if (!*metrics_splits) metrics_options.n_splits = config.n_splits;
      if (!*metrics_seed) metrics_options.seed = config.seed;
      return finish(cli::run_metrics(metrics_options));
    }
    if (*stats) return finish(cli::run_stats(stats_options));
    if (*validate) {
      if (!*validate_window) validate_options.window_bars = config.window_bars;
      return finish(cli::run_validate(validate_options));
    }
  } catch (const MedleyError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
