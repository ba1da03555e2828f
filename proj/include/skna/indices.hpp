#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "digest.hpp"
#include "errors.hpp"
#include "io_util.hpp"
#include "parallel.hpp"
#include "pipelines.hpp"
#include "recording.hpp"
#include "series.hpp"

namespace skna {

// Analysis category a segment's values are filed under.
enum class Condition { Baseline, Task, CSPminus, CSPplus };

inline const char* to_string(Condition c) {
  switch (c) {
    case Condition::Baseline: return "baseline";
    case Condition::Task: return "task";
    case Condition::CSPminus: return "csp-";
    case Condition::CSPplus: return "csp+";
  }
  return "?";
}

inline Condition condition_from(std::string_view s) {
  if (s == "baseline") return Condition::Baseline;
  if (s == "task") return Condition::Task;
  if (s == "csp-") return Condition::CSPminus;
  if (s == "csp+") return Condition::CSPplus;
  throw FormatError("unknown condition '" + std::string(s) + "'");
}

// Per-segment summary of one SKNA envelope: peak, mean, and standard
// deviation (maxSKNA / aSKNA / vSKNA).
struct SegmentStats {
  double max_val = 0.0;
  double mean_val = 0.0;
  double sd_val = 0.0;
};

inline SegmentStats compute_indices(std::span<const double> samples) {
  if (samples.empty()) throw DataError("compute_indices: empty segment");
  double mx = samples[0];
  long double sum = 0.0L;
  for (double v : samples) {
    if (v > mx) mx = v;
    sum += v;
  }
  const double mean = static_cast<double>(sum / static_cast<long double>(samples.size()));
  long double ss = 0.0L;
  for (double v : samples) {
    const long double d = v - mean;
    ss += d * d;
  }
  SegmentStats s;
  s.max_val = mx;
  s.mean_val = mean;
  s.sd_val = static_cast<double>(std::sqrt(ss / static_cast<long double>(samples.size())));
  return s;
}

// Extracts the annotated window from an envelope; throws DataError when the
// window does not fit inside the series.
inline SampleSeries slice_segment(const SknaSeries& series, const SegmentAnnotation& ann) {
  const long long n = static_cast<long long>(series.size());
  const long long i0 = std::llround(ann.start_s * series.rate);
  const long long len = std::llround(ann.duration_s * series.rate);
  if (len < 1) throw DataError("slice_segment: window shorter than one sample");
  if (i0 < 0 || i0 + len > n) {
    throw DataError("slice_segment: window [" + format_double(ann.start_s) + ", " +
                    format_double(ann.end_s()) + ") s falls outside the series");
  }
  SampleSeries out;
  out.rate = series.rate;
  out.samples.assign(series.samples.begin() + i0, series.samples.begin() + i0 + len);
  return out;
}

enum class TgCategory { CSPminus, CSPplus };

// Pain trials: 0 < VAS < 4 is low pain, VAS >= 4 moderate/severe.  VAS = 0
// belongs to neither category and excludes the segment.
inline TgCategory categorize_tg(const SegmentAnnotation& ann) {
  if (ann.label != TaskLabel::TG) {
    throw ConfigError("categorize_tg: not a TG segment");
  }
  if (!ann.vas.has_value()) {
    throw DataError("categorize_tg: TG segment lacks a VAS score");
  }
  const double vas = *ann.vas;
  if (vas >= 4.0) return TgCategory::CSPplus;
  if (vas > 0.0) return TgCategory::CSPminus;
  throw ExcludedSegment("TG segment with VAS = 0 matches no pain category");
}

/// Baseline window selection: a same-length window ending `gap_s` before each
// task segment's onset.
struct BaselinePolicy {
  double gap_s = 5.0;
};

inline SegmentAnnotation baseline_for(const SegmentAnnotation& task, const BaselinePolicy& policy) {
  SegmentAnnotation b;
  b.label = TaskLabel::Baseline;
  b.duration_s = task.duration_s;
  b.start_s = task.start_s - policy.gap_s - task.duration_s;
  return b;
}

// One row of the long-format index table.
struct IndexRecord {
  std::string participant_id;
  int channel = 0;  // 1-based
  double rate_hz = 0.0;
  SknaKind kind = SknaKind::iSKNA;
  TaskLabel task = TaskLabel::VM;
  Condition condition = Condition::Task;
  std::string segment_id;  // e.g. "VM0", "TG3" — matches the paired baseline row
  double max_val = 0.0;
  double mean_val = 0.0;
  double sd_val = 0.0;
};

struct ExclusionRecord {
  std::string participant_id;
  int channel = 0;
  double rate_hz = 0.0;
  SknaKind kind = SknaKind::iSKNA;
  std::string segment_id;
  std::string reason;
};

struct IndexTable {
  std::vector<IndexRecord> rows;
  std::vector<ExclusionRecord> exclusions;
  std::string provenance;  // digest of the configuration that produced it
};

namespace indices_detail {

inline std::tuple<std::string, int, double, int, int, int, std::string> row_key(
    const IndexRecord& r) {
  return {r.participant_id, r.channel, r.rate_hz, static_cast<int>(r.kind),
          static_cast<int>(r.task), static_cast<int>(r.condition), r.segment_id};
}

inline std::string table_provenance(const std::vector<PipelineConfig>& configs,
                                    const std::vector<SknaKind>& kinds,
                                    const BaselinePolicy& policy) {
  std::string canon;
  for (const auto& cfg : configs) {
    canon += "rate=" + format_double(cfg.target_rate_hz);
    canon += ";iskna=" + format_double(cfg.iskna_band_hz.first) + "-" +
             format_double(cfg.iskna_band_hz.second);
    canon += ";tvskna=" + format_double(cfg.tvskna_band_hz.first) + "-" +
             format_double(cfg.tvskna_band_hz.second);
    canon += ";hp=" + format_double(cfg.tvskna_highpass_hz);
    canon += ";notches=";
    for (const auto& nz : cfg.notches) canon += format_double(nz.freq_hz) + "/";
    canon += ";smooth=" + format_double(cfg.smoothing_window_s);
    canon += "\n";
  }
  for (auto k : kinds) canon += std::string(to_string(k)) + ",";
  canon += "\ngap=" + format_double(policy.gap_s);
  return sha256_hex(canon);
}

}  // namespace indices_detail

// Computes the full long-format table: every recording x channel x rate x
// kind x annotated task segment (plus its matched baseline).  Unusable
// segments (excluded pain category, out-of-bounds windows, non-finite
// values) become exclusion entries instead of rows.
inline IndexTable build_index_table(const std::vector<Recording>& recordings,
                                    const std::vector<std::vector<SegmentAnnotation>>& annotations,
                                    const std::vector<PipelineConfig>& configs,
                                    const std::vector<SknaKind>& kinds,
                                    const BaselinePolicy& policy = {},
                                    unsigned threads = 0) {
  if (recordings.size() != annotations.size()) {
    throw ConfigError("build_index_table: one annotation list per recording required");
  }
  if (configs.empty() || kinds.empty()) {
    throw ConfigError("build_index_table: need at least one config and kind");
  }
  for (const auto& cfg : configs) cfg.validate();

  struct WorkItem {
    std::size_t rec_idx;
    std::size_t cfg_idx;
    std::size_t kind_idx;
  };
  std::vector<WorkItem> items;
  for (std::size_t r = 0; r < recordings.size(); ++r) {
    for (std::size_t c = 0; c < configs.size(); ++c) {
      for (std::size_t k = 0; k < kinds.size(); ++k) items.push_back({r, c, k});
    }
  }

  std::vector<IndexTable> partial(items.size());
  parallel_for(items.size(), threads, [&](std::size_t w) {
    const auto& item = items[w];
    const Recording& rec = recordings[item.rec_idx];
    const auto& anns = annotations[item.rec_idx];
    const PipelineConfig& cfg = configs[item.cfg_idx];
    const SknaKind kind = kinds[item.kind_idx];
    IndexTable& local = partial[w];

    // Segment ids number task segments of each label in temporal order.
    std::map<TaskLabel, int> ordinal;
    std::vector<std::pair<SegmentAnnotation, std::string>> tasks;
    for (const auto& ann : anns) {
      if (ann.label == TaskLabel::Baseline) continue;
      validate_annotation(ann);
      std::string seg_id = std::string(to_string(ann.label)) + std::to_string(ordinal[ann.label]++);
      tasks.emplace_back(ann, seg_id);
    }
    if (tasks.empty()) return;

    for (std::size_t ch = 0; ch < rec.channels.size(); ++ch) {
      SknaSeries env = compute_skna(rec.channel(ch), cfg, kind);
      for (const auto& [ann, seg_id] : tasks) {
        auto exclude = [&](const std::string& reason) {
          local.exclusions.push_back({rec.participant_id, static_cast<int>(ch + 1),
                                      cfg.target_rate_hz, kind, seg_id, reason});
        };
        Condition task_condition = Condition::Task;
        if (ann.label == TaskLabel::TG) {
          try {
            task_condition = categorize_tg(ann) == TgCategory::CSPplus ? Condition::CSPplus
                                                                       : Condition::CSPminus;
          } catch (const ExcludedSegment& e) {
            exclude(e.what());
            continue;
          }
        }
        SegmentAnnotation base_ann = baseline_for(ann, policy);
        if (base_ann.start_s < 0.0) {
          exclude("baseline window precedes the recording start");
          continue;
        }
        try {
          SampleSeries task_win = slice_segment(env, ann);
          SampleSeries base_win = slice_segment(env, base_ann);
          SegmentStats ts = compute_indices(task_win.samples);
          SegmentStats bs = compute_indices(base_win.samples);
          if (!std::isfinite(ts.max_val) || !std::isfinite(ts.mean_val) ||
              !std::isfinite(ts.sd_val) || !std::isfinite(bs.max_val) ||
              !std::isfinite(bs.mean_val) || !std::isfinite(bs.sd_val)) {
            exclude("non-finite index value");
            continue;
          }
          IndexRecord base_row{rec.participant_id, static_cast<int>(ch + 1), cfg.target_rate_hz,
                               kind, ann.label, Condition::Baseline, seg_id,
                               bs.max_val, bs.mean_val, bs.sd_val};
          IndexRecord task_row{rec.participant_id, static_cast<int>(ch + 1), cfg.target_rate_hz,
                               kind, ann.label, task_condition, seg_id,
                               ts.max_val, ts.mean_val, ts.sd_val};
          local.rows.push_back(std::move(base_row));
          local.rows.push_back(std::move(task_row));
        } catch (const DataError& e) {
          exclude(e.what());
        }
      }
    }
  });

  IndexTable table;
  for (auto& p : partial) {
    for (auto& r : p.rows) table.rows.push_back(std::move(r));
    for (auto& e : p.exclusions) table.exclusions.push_back(std::move(e));
  }
  std::sort(table.rows.begin(), table.rows.end(), [](const IndexRecord& a, const IndexRecord& b) {
    return indices_detail::row_key(a) < indices_detail::row_key(b);
  });
  std::sort(table.exclusions.begin(), table.exclusions.end(),
            [](const ExclusionRecord& a, const ExclusionRecord& b) {
              return std::tie(a.participant_id, a.channel, a.rate_hz, a.kind, a.segment_id) <
                     std::tie(b.participant_id, b.channel, b.rate_hz, b.kind, b.segment_id);
            });
  table.provenance = indices_detail::table_provenance(configs, kinds, policy);
  return table;
}

// ---- Long-format CSV --------------------------------------------------------

inline const char* kIndexTableHeader =
    "participant,channel,rate,kind,task,condition,segment_id,max,mean,sd";

inline void save_index_table(const std::filesystem::path& path, const IndexTable& table) {
  std::string out;
  out += "# provenance=";
  out += table.provenance;
  out += '\n';
  out += kIndexTableHeader;
  out += '\n';
  for (const auto& r : table.rows) {
    out += r.participant_id;
    out += ',';
    out += std::to_string(r.channel);
    out += ',';
    out += format_double(r.rate_hz);
    out += ',';
    out += to_string(r.kind);
    out += ',';
    out += to_string(r.task);
    out += ',';
    out += to_string(r.condition);
    out += ',';
    out += r.segment_id;
    out += ',';
    out += format_double(r.max_val);
    out += ',';
    out += format_double(r.mean_val);
    out += ',';
    out += format_double(r.sd_val);
    out += '\n';
  }
  for (const auto& e : table.exclusions) {
    out += "# excluded:";
    out += e.participant_id;
    out += ',';
    out += std::to_string(e.channel);
    out += ',';
    out += format_double(e.rate_hz);
    out += ',';
    out += to_string(e.kind);
    out += ',';
    out += e.segment_id;
    out += ',';
    out += e.reason;
    out += '\n';
  }
  write_file_atomic(path, out);
}

inline IndexTable load_index_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open index table: " + path.string());
  IndexTable table;
  std::string line;
  bool saw_header = false;
  std::ptrdiff_t row = 0;
  while (std::getline(in, line)) {
    std::string_view sv = trim_view(line);
    if (sv.empty()) continue;
    if (sv.starts_with("# provenance=")) {
      table.provenance = std::string(sv.substr(13));
      continue;
    }
    if (sv.starts_with("# excluded:")) continue;  // informational
    if (sv.starts_with("#")) continue;
    if (!saw_header) {
      if (sv != kIndexTableHeader) throw FormatError(path.string() + ": bad index table header");
      saw_header = true;
      continue;
    }
    auto f = split_view(sv, ',');
    if (f.size() != 10) throw DataError(path.string() + ": index rows need 10 fields", row);
    IndexRecord r;
    r.participant_id = std::string(trim_view(f[0]));
    r.channel = static_cast<int>(parse_int_strict(f[1], "channel"));
    r.rate_hz = parse_double_strict(f[2], "rate");
    r.kind = skna_kind_from(trim_view(f[3]));
    r.task = task_label_from(trim_view(f[4]));
    r.condition = condition_from(trim_view(f[5]));
    r.segment_id = std::string(trim_view(f[6]));
    r.max_val = parse_double_strict(f[7], "max");
    r.mean_val = parse_double_strict(f[8], "mean");
    r.sd_val = parse_double_strict(f[9], "sd");
    if (!std::isfinite(r.max_val) || !std::isfinite(r.mean_val) || !std::isfinite(r.sd_val)) {
      throw DataError(path.string() + ": non-finite index value", row);
    }
    table.rows.push_back(std::move(r));
    ++row;
  }
  if (!saw_header) throw FormatError(path.string() + ": missing index table header");
  return table;
}

}  // namespace skna
