// skna: synthesize cohorts, extract SKNA envelopes, compute per-segment
// indices, and evaluate / compare them across sampling rates.
//
// Exit codes: 0 success, 1 data or model failure, 2 usage or config failure.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "skna/errors.hpp"
#include "skna/evaluate.hpp"
#include "skna/indices.hpp"
#include "skna/io_util.hpp"
#include "skna/manifest.hpp"
#include "skna/pipelines.hpp"
#include "skna/recording.hpp"
#include "skna/stats.hpp"
#include "skna/svg.hpp"
#include "skna/synth.hpp"
#include "skna/toml.hpp"
#include "skna/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---- shared plumbing -----------------------------------------------------

// Failures while reading configuration inputs are usage errors (exit 2),
// unlike failures in data files (exit 1).
template <typename Fn>
auto as_config(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const skna::ConfigError&) {
    throw;
  } catch (const skna::Error& e) {
    throw skna::ConfigError(e.what());
  }
}

std::vector<skna::SknaKind> parse_kinds(const std::vector<std::string>& names) {
  std::vector<skna::SknaKind> kinds;
  for (const auto& n : names) {
    kinds.push_back(as_config([&] { return skna::skna_kind_from(n); }));
  }
  if (kinds.empty()) throw skna::ConfigError("no SKNA kinds selected");
  return kinds;
}

struct PipelineOverrides {
  std::optional<double> smoothing_window_s;
  std::optional<double> tvskna_highpass_hz;
  std::optional<bool> notch_iskna;
  std::optional<int> filter_order;
  std::optional<double> baseline_gap_s;
};

PipelineOverrides load_overrides(const std::string& path) {
  PipelineOverrides ov;
  if (path.empty()) return ov;
  auto doc = as_config([&] { return skna::toml::parse_file(path); });
  const std::set<std::string> allowed = {
      "pipeline.smoothing_window_s", "pipeline.tvskna_highpass_hz", "pipeline.notch_iskna",
      "pipeline.filter_order", "baseline.gap_s"};
  for (const auto& [key, value] : doc.root) {
    if (!allowed.count(key)) throw skna::ConfigError(path + ": unknown config key '" + key + "'");
    (void)value;
  }
  if (!doc.arrays.empty()) throw skna::ConfigError(path + ": unexpected table array");
  return as_config([&] {
    PipelineOverrides o;
    if (doc.has("pipeline.smoothing_window_s")) {
      o.smoothing_window_s = doc.root.at("pipeline.smoothing_window_s").as_number();
    }
    if (doc.has("pipeline.tvskna_highpass_hz")) {
      o.tvskna_highpass_hz = doc.root.at("pipeline.tvskna_highpass_hz").as_number();
    }
    if (doc.has("pipeline.notch_iskna")) {
      o.notch_iskna = doc.root.at("pipeline.notch_iskna").as_bool();
    }
    if (doc.has("pipeline.filter_order")) {
      o.filter_order = static_cast<int>(doc.root.at("pipeline.filter_order").as_number());
    }
    if (doc.has("baseline.gap_s")) o.baseline_gap_s = doc.root.at("baseline.gap_s").as_number();
    return o;
  });
}

std::vector<skna::PipelineConfig> make_configs(const std::vector<double>& rates,
                                               const PipelineOverrides& ov) {
  if (rates.empty()) throw skna::ConfigError("no target rates selected");
  std::vector<skna::PipelineConfig> configs;
  for (double r : rates) {
    auto cfg = skna::default_config(r);
    if (ov.smoothing_window_s) cfg.smoothing_window_s = *ov.smoothing_window_s;
    if (ov.tvskna_highpass_hz) cfg.tvskna_highpass_hz = *ov.tvskna_highpass_hz;
    if (ov.notch_iskna) cfg.notch_iskna = *ov.notch_iskna;
    if (ov.filter_order) cfg.filter_order = *ov.filter_order;
    as_config([&] { cfg.validate(); return 0; });
    configs.push_back(std::move(cfg));
  }
  return configs;
}

json pipeline_config_json(const skna::PipelineConfig& cfg) {
  json j;
  j["target_rate_hz"] = cfg.target_rate_hz;
  j["iskna_band_hz"] = {cfg.iskna_band_hz.first, cfg.iskna_band_hz.second};
  j["tvskna_band_hz"] = {cfg.tvskna_band_hz.first, cfg.tvskna_band_hz.second};
  j["tvskna_highpass_hz"] = cfg.tvskna_highpass_hz;
  json notches = json::array();
  for (const auto& nz : cfg.notches) notches.push_back({{"freq_hz", nz.freq_hz}, {"q", nz.q}});
  j["notches"] = notches;
  j["notch_iskna"] = cfg.notch_iskna;
  j["smoothing_window_s"] = cfg.smoothing_window_s;
  j["filter_order"] = cfg.filter_order;
  j["vfcdm_components"] = cfg.vfcdm.n_components;
  j["vfcdm_half_bandwidth_hz"] = cfg.vfcdm.half_bandwidth_hz;
  return j;
}

json analysis_config_json(const std::vector<skna::PipelineConfig>& configs,
                          const std::vector<skna::SknaKind>& kinds,
                          const skna::BaselinePolicy& policy) {
  json j;
  json pipelines = json::array();
  for (const auto& cfg : configs) pipelines.push_back(pipeline_config_json(cfg));
  j["pipelines"] = pipelines;
  json kind_names = json::array();
  for (auto k : kinds) kind_names.push_back(skna::to_string(k));
  j["kinds"] = kind_names;
  j["baseline_gap_s"] = policy.gap_s;
  return j;
}

void write_manifest(const std::string& command, const std::vector<std::string>& inputs,
                    const fs::path& out_dir_or_file, json config, const fs::path& manifest_path) {
  skna::RunManifest m;
  m.command = command;
  m.inputs = inputs;
  m.output_dir = out_dir_or_file.string();
  m.config = std::move(config);
  m.write(manifest_path.string());
}

// Removes every path written so far if the command fails partway.
class OutputSet {
 public:
  void track(const fs::path& p) { paths_.push_back(p); }
  void discard_all() noexcept {
    std::error_code ec;
    for (const auto& p : paths_) fs::remove(p, ec);
  }

 private:
  std::vector<fs::path> paths_;
};

std::string rate_color(double rate) {
  if (rate == 4000.0) return "#1f77b4";
  if (rate == 1000.0) return "#d62728";
  if (rate == 500.0) return "#2ca02c";
  return "#7f7f7f";
}

// ---- synth -----------------------------------------------------------------

struct SynthArgs {
  std::string spec_path;
  std::string out_dir;
  std::string format = "bin";
  std::optional<std::uint64_t> seed_override;
};

void parse_plan_table(const skna::toml::Table& entry, std::vector<skna::SegmentAnnotation>& plan,
                      const std::string& path) {
  const std::set<std::string> allowed = {"label", "start_s", "duration_s", "vas"};
  for (const auto& [key, value] : entry) {
    if (!allowed.count(key)) throw skna::ConfigError(path + ": unknown plan key '" + key + "'");
    (void)value;
  }
  skna::SegmentAnnotation a;
  if (!entry.count("label") || !entry.count("start_s") || !entry.count("duration_s")) {
    throw skna::ConfigError(path + ": plan entries need label, start_s, duration_s");
  }
  a.label = as_config([&] { return skna::task_label_from(entry.at("label").as_string()); });
  a.start_s = entry.at("start_s").as_number();
  a.duration_s = entry.at("duration_s").as_number();
  if (entry.count("vas")) a.vas = entry.at("vas").as_number();
  plan.push_back(a);
}

std::pair<skna::SynthSpec, skna::CohortJitter> load_synth_spec(const std::string& path) {
  skna::SynthSpec spec;
  skna::CohortJitter jitter;
  if (fs::path(path).extension() == ".csv") {
    spec.plan = as_config([&] { return skna::load_annotations(path); });
    return {spec, jitter};
  }
  auto doc = as_config([&] { return skna::toml::parse_file(path); });
  const std::map<std::string, double*> numeric = {
      {"native_rate_hz", &spec.native_rate_hz},
      {"channel2_gain", &spec.channel2_gain},
      {"tail_s", &spec.tail_s},
      {"ecg.heart_rate_bpm", &spec.ecg.heart_rate_bpm},
      {"ecg.qrs_amplitude_mv", &spec.ecg.qrs_amplitude_mv},
      {"ecg.qrs_width_s", &spec.ecg.qrs_width_s},
      {"burst.band_lo_hz", &spec.burst.band_lo_hz},
      {"burst.band_hi_hz", &spec.burst.band_hi_hz},
      {"burst.amplitude_mv", &spec.burst.amplitude_mv},
      {"burst.duration_s", &spec.burst.duration_s},
      {"burst.rate_per_s", &spec.burst.rate_per_s},
      {"noise.white_sigma_mv", &spec.noise.white_sigma_mv},
      {"noise.mains_hz", &spec.noise.mains_hz},
      {"noise.mains_amplitude_mv", &spec.noise.mains_amplitude_mv},
      {"jitter.gain_sigma", &jitter.gain_sigma},
      {"jitter.burst_amplitude_sigma", &jitter.burst_amplitude_sigma},
      {"jitter.heart_rate_sigma", &jitter.heart_rate_sigma},
      {"jitter.noise_sigma", &jitter.noise_sigma},
  };
  for (const auto& [key, value] : doc.root) {
    if (key == "seed") {
      const double s = as_config([&] { return value.as_number(); });
      if (!(s >= 0.0) || s != std::floor(s)) {
        throw skna::ConfigError(path + ": seed must be a non-negative integer");
      }
      spec.seed = static_cast<std::uint64_t>(s);
    } else if (key == "n_participants") {
      spec.n_participants = static_cast<int>(as_config([&] { return value.as_number(); }));
    } else if (auto it = numeric.find(key); it != numeric.end()) {
      *it->second = as_config([&] { return value.as_number(); });
    } else {
      throw skna::ConfigError(path + ": unknown spec key '" + key + "'");
    }
  }
  for (const auto& [name, entries] : doc.arrays) {
    if (name != "plan") throw skna::ConfigError(path + ": unknown table array '" + name + "'");
    for (const auto& entry : entries) parse_plan_table(entry, spec.plan, path);
  }
  if (spec.plan.empty()) spec.plan = skna::standard_plan();
  return {spec, jitter};
}

json synth_config_json(const skna::SynthSpec& s, const skna::CohortJitter& j,
                       const std::string& format) {
  json plan = json::array();
  for (const auto& a : s.plan) {
    json e;
    e["label"] = skna::to_string(a.label);
    e["start_s"] = a.start_s;
    e["duration_s"] = a.duration_s;
    if (a.vas) e["vas"] = *a.vas;
    plan.push_back(e);
  }
  return json{
      {"command", "synth"},
      {"format", format},
      {"n_participants", s.n_participants},
      {"native_rate_hz", s.native_rate_hz},
      {"channel2_gain", s.channel2_gain},
      {"tail_s", s.tail_s},
      {"seed", s.seed},
      {"ecg",
       {{"heart_rate_bpm", s.ecg.heart_rate_bpm},
        {"qrs_amplitude_mv", s.ecg.qrs_amplitude_mv},
        {"qrs_width_s", s.ecg.qrs_width_s}}},
      {"burst",
       {{"band_lo_hz", s.burst.band_lo_hz},
        {"band_hi_hz", s.burst.band_hi_hz},
        {"amplitude_mv", s.burst.amplitude_mv},
        {"duration_s", s.burst.duration_s},
        {"rate_per_s", s.burst.rate_per_s}}},
      {"noise",
       {{"white_sigma_mv", s.noise.white_sigma_mv},
        {"mains_hz", s.noise.mains_hz},
        {"mains_amplitude_mv", s.noise.mains_amplitude_mv}}},
      {"jitter",
       {{"gain_sigma", j.gain_sigma},
        {"burst_amplitude_sigma", j.burst_amplitude_sigma},
        {"heart_rate_sigma", j.heart_rate_sigma},
        {"noise_sigma", j.noise_sigma}}},
      {"plan", plan},
  };
}

int cmd_synth(const SynthArgs& args) {
  if (!fs::exists(args.spec_path)) {
    throw skna::ConfigError("spec file not found: " + args.spec_path);
  }
  auto [spec, jitter] = load_synth_spec(args.spec_path);
  if (args.seed_override) spec.seed = *args.seed_override;
  as_config([&] { spec.validate(); return 0; });

  fs::create_directories(args.out_dir);
  OutputSet outputs;
  try {
    auto cohort = skna::generate_cohort(spec, jitter);

    std::string truth = "participant,seed,gain,burst_amplitude_mv,heart_rate_bpm,noise_sigma_mv\n";
    for (const auto& member : cohort) {
      const fs::path base = fs::path(args.out_dir) / member.factors.participant_id;
      if (args.format == "csv") {
        fs::path p = base;
        p += ".csv";
        skna::save_recording_csv(p, member.recording);
        outputs.track(p);
      } else {
        fs::path p = base;
        p += ".skr";
        skna::save_recording_binary(p, member.recording);
        outputs.track(p);
        fs::path meta = p;
        meta += ".meta";
        outputs.track(meta);
      }
      fs::path ann = base;
      ann += ".ann.csv";
      skna::save_annotations(ann, member.annotations);
      outputs.track(ann);

      const auto& f = member.factors;
      truth += f.participant_id + "," + std::to_string(f.seed) + "," +
               skna::format_double(f.gain) + "," + skna::format_double(f.burst_amplitude_mv) +
               "," + skna::format_double(f.heart_rate_bpm) + "," +
               skna::format_double(f.noise_sigma_mv) + "\n";
    }
    const fs::path truth_path = fs::path(args.out_dir) / "ground_truth.csv";
    skna::write_file_atomic(truth_path.string(), truth);
    outputs.track(truth_path);

    write_manifest("synth", {args.spec_path}, args.out_dir,
                   synth_config_json(spec, jitter, args.format),
                   fs::path(args.out_dir) / "manifest.json");
    std::cout << "wrote " << cohort.size() << " recordings to " << args.out_dir << "\n";
    return 0;
  } catch (...) {
    outputs.discard_all();
    throw;
  }
}

// ---- extract ---------------------------------------------------------------

struct ExtractArgs {
  std::string recording_path;
  std::string annotations_path;
  std::vector<double> rates{4000.0, 1000.0, 500.0};
  std::vector<std::string> kind_names{"iskna", "tvskna"};
  std::string config_path;
  std::string out_dir;
  bool plot = false;
};

int cmd_extract(const ExtractArgs& args) {
  const auto kinds = parse_kinds(args.kind_names);
  const auto configs = make_configs(args.rates, load_overrides(args.config_path));

  const skna::Recording rec = skna::load_recording(args.recording_path);
  if (!args.annotations_path.empty()) {
    (void)skna::load_annotations(args.annotations_path);  // validated, reserved for overlays
  }
  const std::string stem = fs::path(args.recording_path).stem().string();

  fs::create_directories(args.out_dir);
  OutputSet outputs;
  try {
    // kind -> channel -> one trace per rate, for the overlay plot
    std::map<int, std::vector<std::vector<skna::SvgTrace>>> plot_traces;
    for (std::size_t ch = 0; ch < rec.channels.size(); ++ch) {
      for (const auto& cfg : configs) {
        for (auto kind : kinds) {
          auto series = skna::compute_skna(rec.channel(ch), cfg, kind);
          skna::Recording out;
          out.participant_id = rec.participant_id;
          out.rate = series.rate;
          out.channel_names = {std::string(skna::to_string(kind))};
          out.channels = {series.samples};
          const fs::path path =
              fs::path(args.out_dir) /
              (stem + "_" + rec.channel_names[ch] + "_" +
               skna::format_double(cfg.target_rate_hz) + "hz_" + skna::to_string(kind) + ".csv");
          skna::save_recording_csv(path, out);
          outputs.track(path);

          if (args.plot) {
            auto& panels = plot_traces[static_cast<int>(kind)];
            if (panels.size() <= ch) panels.resize(rec.channels.size());
            skna::SvgTrace trace;
            trace.label = skna::format_double(cfg.target_rate_hz) + " Hz";
            trace.color = rate_color(cfg.target_rate_hz);
            trace.rate = series.rate;
            trace.values = std::move(series.samples);
            panels[ch].push_back(std::move(trace));
          }
        }
      }
    }

    if (args.plot) {
      for (auto& [kind_i, panels] : plot_traces) {
        const auto kind = static_cast<skna::SknaKind>(kind_i);
        skna::SvgFigure fig;
        fig.title = stem + " " + skna::to_string(kind);
        for (std::size_t ch = 0; ch < panels.size(); ++ch) {
          skna::SvgPanel panel;
          panel.title = rec.channel_names[ch];
          panel.y_label = std::string(skna::to_string(kind)) + " (mV)";
          panel.traces = std::move(panels[ch]);
          fig.panels.push_back(std::move(panel));
        }
        const fs::path path =
            fs::path(args.out_dir) / (stem + "_" + skna::to_string(kind) + ".svg");
        skna::save_svg(path.string(), fig);
        outputs.track(path);
      }
    }

    json config;
    config["command"] = "extract";
    config["analysis"] = analysis_config_json(configs, kinds, {});
    config["plot"] = args.plot;
    std::vector<std::string> inputs = {args.recording_path};
    if (!args.annotations_path.empty()) inputs.push_back(args.annotations_path);
    write_manifest("extract", inputs, args.out_dir, std::move(config),
                   fs::path(args.out_dir) / "manifest.json");
    return 0;
  } catch (...) {
    outputs.discard_all();
    throw;
  }
}

// ---- indices / evaluate ------------------------------------------------------

struct TableArgs {
  std::string data_dir;
  std::vector<double> rates{4000.0, 1000.0, 500.0};
  std::vector<std::string> kind_names{"iskna", "tvskna"};
  std::string config_path;
  unsigned threads = 0;
};

// Loads every recording in a directory along with its .ann.csv sidecar.
std::pair<std::vector<skna::Recording>, std::vector<std::vector<skna::SegmentAnnotation>>>
load_data_dir(const std::string& dir) {
  if (!fs::is_directory(dir)) throw skna::ConfigError("not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    const auto ext = entry.path().extension().string();
    if (ext == ".skr") {
      files.push_back(entry.path());
    } else if (ext == ".csv" && !name.ends_with(".ann.csv") && name != "ground_truth.csv") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw skna::DataError("no recordings found in " + dir);

  std::vector<skna::Recording> recordings;
  std::vector<std::vector<skna::SegmentAnnotation>> annotations;
  for (const auto& path : files) {
    fs::path ann = path;
    ann.replace_extension("");
    ann += ".ann.csv";
    if (!fs::exists(ann)) {
      throw skna::DataError("missing annotations for " + path.string() + " (expected " +
                            ann.string() + ")");
    }
    recordings.push_back(skna::load_recording(path));
    annotations.push_back(skna::load_annotations(ann));
  }
  return {std::move(recordings), std::move(annotations)};
}

skna::IndexTable build_table(const TableArgs& args, std::vector<skna::PipelineConfig>& configs,
                             std::vector<skna::SknaKind>& kinds, skna::BaselinePolicy& policy) {
  kinds = parse_kinds(args.kind_names);
  const auto overrides = load_overrides(args.config_path);
  configs = make_configs(args.rates, overrides);
  if (overrides.baseline_gap_s) policy.gap_s = *overrides.baseline_gap_s;
  auto [recordings, annotations] = load_data_dir(args.data_dir);
  return skna::build_index_table(recordings, annotations, configs, kinds, policy, args.threads);
}

int cmd_indices(const TableArgs& args, const std::string& out_path) {
  std::vector<skna::PipelineConfig> configs;
  std::vector<skna::SknaKind> kinds;
  skna::BaselinePolicy policy;
  auto table = build_table(args, configs, kinds, policy);
  skna::save_index_table(out_path, table);

  json config;
  config["command"] = "indices";
  config["analysis"] = analysis_config_json(configs, kinds, policy);
  fs::path manifest = out_path;
  manifest.replace_extension(".manifest.json");
  write_manifest("indices", {args.data_dir}, out_path, std::move(config), manifest);
  std::cout << "wrote " << table.rows.size() << " index rows (" << table.exclusions.size()
            << " exclusions) to " << out_path << "\n";
  return 0;
}

struct EvaluateArgs {
  std::string indices_path;
  TableArgs table;
  std::string icc_form = "two-way";
  std::string out_path;
};

int cmd_evaluate(const EvaluateArgs& args) {
  skna::IccForm form;
  if (args.icc_form == "two-way") {
    form = skna::IccForm::TwoWayConsistency;
  } else if (args.icc_form == "one-way") {
    form = skna::IccForm::OneWayRandom;
  } else {
    throw skna::ConfigError("--icc-form must be 'two-way' or 'one-way'");
  }

  skna::IndexTable table;
  json config;
  config["command"] = "evaluate";
  config["icc_form"] = args.icc_form;
  std::vector<std::string> inputs;
  if (!args.indices_path.empty()) {
    table = skna::load_index_table(args.indices_path);
    inputs = {args.indices_path};
    config["source"] = "index-table";
  } else {
    std::vector<skna::PipelineConfig> configs;
    std::vector<skna::SknaKind> kinds;
    skna::BaselinePolicy policy;
    table = build_table(args.table, configs, kinds, policy);
    inputs = {args.table.data_dir};
    config["source"] = "data-dir";
    config["analysis"] = analysis_config_json(configs, kinds, policy);
  }

  auto grid = skna::evaluate_table(table, form);
  skna::save_results_csv(args.out_path, grid);
  std::cout << skna::format_results_text(grid);

  fs::path manifest = args.out_path;
  manifest.replace_extension(".manifest.json");
  write_manifest("evaluate", inputs, args.out_path, std::move(config), manifest);
  return 0;
}

// ---- compare-rates -----------------------------------------------------------

struct CompareArgs {
  std::vector<std::string> grid_paths;
  std::string indices_path;
  std::string out_path;
};

int cmd_compare_rates(const CompareArgs& args) {
  std::optional<skna::IndexTable> table;
  if (!args.indices_path.empty()) table = skna::load_index_table(args.indices_path);
  const skna::IndexTable* table_ptr = table ? &*table : nullptr;

  skna::RateAgreementReport report;
  if (args.grid_paths.empty()) {
    if (!table_ptr) {
      throw skna::ConfigError("compare-rates needs results grids and/or --indices");
    }
    report = skna::compare_rates(skna::evaluate_table(*table_ptr), table_ptr);
  } else if (args.grid_paths.size() == 1) {
    report = skna::compare_rates(skna::load_results_csv(args.grid_paths[0]), table_ptr);
  } else {
    std::vector<skna::ResultsGrid> grids;
    for (const auto& p : args.grid_paths) grids.push_back(skna::load_results_csv(p));
    report = skna::compare_grids(grids, table_ptr);
  }

  skna::save_agreement_csv(args.out_path, report);
  std::cout << skna::format_agreement_text(report);

  json config;
  config["command"] = "compare-rates";
  config["n_grids"] = args.grid_paths.size();
  config["with_indices"] = !args.indices_path.empty();
  std::vector<std::string> inputs = args.grid_paths;
  if (!args.indices_path.empty()) inputs.push_back(args.indices_path);
  fs::path manifest = args.out_path;
  manifest.replace_extension(".manifest.json");
  write_manifest("compare-rates", inputs, args.out_path, std::move(config), manifest);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"skin sympathetic nerve activity extraction and cross-rate evaluation"};
  app.set_version_flag("--version", std::string("skna ") + skna::kVersion);
  app.require_subcommand(1);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "generate a synthetic two-channel ECG+SKNA cohort");
  synth->add_option("--spec", synth_args.spec_path, "cohort spec (.toml) or plan (.csv)")
      ->required();
  synth->add_option("--out", synth_args.out_dir, "output directory")->required();
  synth->add_option("--format", synth_args.format, "recording file format")
      ->check(CLI::IsMember({"bin", "csv"}));
  std::uint64_t seed_value = 0;
  auto* seed_opt = synth->add_option("--seed", seed_value, "override the spec seed");

  ExtractArgs extract_args;
  auto* extract = app.add_subcommand("extract", "extract iSKNA/TVSKNA envelopes from a recording");
  extract->add_option("--recording", extract_args.recording_path, "input recording (.csv/.skr)")
      ->required();
  extract->add_option("--annotations", extract_args.annotations_path, "segment annotations");
  extract->add_option("--rates", extract_args.rates, "target rates in Hz")->delimiter(',');
  extract->add_option("--kinds", extract_args.kind_names, "iskna,tvskna")->delimiter(',');
  extract->add_option("--config", extract_args.config_path, "pipeline config TOML");
  extract->add_option("--out", extract_args.out_dir, "output directory")->required();
  extract->add_flag("--plot", extract_args.plot, "write one SVG per kind overlaying the rates");

  TableArgs indices_args;
  std::string indices_out;
  auto* indices = app.add_subcommand("indices", "compute per-segment index table for a cohort");
  indices->add_option("--data", indices_args.data_dir, "directory of recordings + .ann.csv")
      ->required();
  indices->add_option("--rates", indices_args.rates, "target rates in Hz")->delimiter(',');
  indices->add_option("--kinds", indices_args.kind_names, "iskna,tvskna")->delimiter(',');
  indices->add_option("--config", indices_args.config_path, "pipeline config TOML");
  indices->add_option("--threads", indices_args.threads, "worker threads (0 = serial)");
  indices->add_option("--out", indices_out, "output table CSV")->required();

  EvaluateArgs evaluate_args;
  auto* evaluate = app.add_subcommand("evaluate", "fit LMM / AUC / ICC grid from an index table");
  evaluate->add_option("--indices", evaluate_args.indices_path, "precomputed index table CSV");
  evaluate->add_option("--data", evaluate_args.table.data_dir,
                       "directory of recordings (builds the table first)");
  evaluate->add_option("--rates", evaluate_args.table.rates, "target rates in Hz")->delimiter(',');
  evaluate->add_option("--kinds", evaluate_args.table.kind_names, "iskna,tvskna")->delimiter(',');
  evaluate->add_option("--config", evaluate_args.table.config_path, "pipeline config TOML");
  evaluate->add_option("--threads", evaluate_args.table.threads, "worker threads (0 = serial)");
  evaluate->add_option("--icc-form", evaluate_args.icc_form, "two-way (default) or one-way");
  evaluate->add_option("--out", evaluate_args.out_path, "output results CSV")->required();

  CompareArgs compare_args;
  auto* compare = app.add_subcommand("compare-rates", "cross-rate agreement of results grids");
  compare->add_option("grids", compare_args.grid_paths, "results CSVs from evaluate");
  compare->add_option("--indices", compare_args.indices_path,
                      "index table CSV for per-segment correlations");
  compare->add_option("--out", compare_args.out_path, "output agreement CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (synth->parsed()) {
      if (seed_opt->count() > 0) synth_args.seed_override = seed_value;
      return cmd_synth(synth_args);
    }
    if (extract->parsed()) return cmd_extract(extract_args);
    if (indices->parsed()) return cmd_indices(indices_args, indices_out);
    if (evaluate->parsed()) {
      if (evaluate_args.indices_path.empty() && evaluate_args.table.data_dir.empty()) {
        throw skna::ConfigError("evaluate needs --indices or --data");
      }
      return cmd_evaluate(evaluate_args);
    }
    if (compare->parsed()) return cmd_compare_rates(compare_args);
    throw skna::ConfigError("no subcommand selected");
  } catch (const skna::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
