#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "errors.hpp"
#include "indices.hpp"
#include "io_util.hpp"
#include "stats.hpp"

namespace skna {

// Analysis cells of the results tables: task contrasts plus the two pain
// categories.
enum class TaskCell { VM, ST, CSPminus, CSPplus };

inline const char* to_string(TaskCell c) {
  switch (c) {
    case TaskCell::VM: return "VM";
    case TaskCell::ST: return "ST";
    case TaskCell::CSPminus: return "CSP-";
    case TaskCell::CSPplus: return "CSP+";
  }
  return "?";
}

inline const char* kIndexNames[3] = {"max", "mean", "sd"};

inline TaskCell task_cell_from(std::string_view s) {
  if (s == "VM") return TaskCell::VM;
  if (s == "ST") return TaskCell::ST;
  if (s == "CSP-") return TaskCell::CSPminus;
  if (s == "CSP+") return TaskCell::CSPplus;
  throw FormatError("unknown results cell '" + std::string(s) + "'");
}

inline std::string significance_stars(double p) {
  if (p < 0.001) return "**";
  if (p < 0.05) return "*";
  return "";
}

// One (channel, rate, kind, cell, index) entry of the results grid.
struct CellResult {
  int channel = 0;
  double rate_hz = 0.0;
  SknaKind kind = SknaKind::iSKNA;
  TaskCell cell = TaskCell::VM;
  std::string index_name;

  bool available = false;
  std::string unavailable_reason;
  int n_participants = 0;
  int n_pairs = 0;  // task/baseline row pairs feeding the model

  double beta1 = 0.0;
  double p_value = 1.0;
  std::string stars;
  double effect_d = 0.0;
  double auc_value = 0.5;

  bool icc_available = false;
  double icc_raw = 0.0;
  double icc_display = 0.0;  // floored at zero for table output
  bool icc_truncated = false;
};

struct ResultsGrid {
  std::vector<CellResult> cells;
  IccForm icc_form = IccForm::TwoWayConsistency;
  std::string provenance;
};

namespace evaluate_detail {

struct PairKey {
  std::string participant;
  std::string segment_id;
  bool operator<(const PairKey& o) const {
    return std::tie(participant, segment_id) < std::tie(o.participant, o.segment_id);
  }
};

struct SegmentPair {
  double baseline[3] = {0, 0, 0};  // max, mean, sd
  double task[3] = {0, 0, 0};
  bool has_baseline = false;
  bool has_task = false;
};

inline bool cell_matches(TaskCell cell, const IndexRecord& r) {
  switch (cell) {
    case TaskCell::VM: return r.task == TaskLabel::VM;
    case TaskCell::ST: return r.task == TaskLabel::ST;
    case TaskCell::CSPminus:
      return r.task == TaskLabel::TG &&
             (r.condition == Condition::Baseline || r.condition == Condition::CSPminus);
    case TaskCell::CSPplus:
      return r.task == TaskLabel::TG &&
             (r.condition == Condition::Baseline || r.condition == Condition::CSPplus);
  }
  return false;
}

// TG baselines match both CSP cells by segment pairing: a baseline row only
// counts for the cell its task row landed in, which the has_task flag below
// enforces (pairs lacking a categorized task row are dropped).
inline std::map<PairKey, SegmentPair> collect_pairs(const IndexTable& table, int channel,
                                                    double rate, SknaKind kind, TaskCell cell) {
  std::map<PairKey, SegmentPair> pairs;
  for (const auto& r : table.rows) {
    if (r.channel != channel || r.rate_hz != rate || r.kind != kind) continue;
    if (!cell_matches(cell, r)) continue;
    auto& pair = pairs[{r.participant_id, r.segment_id}];
    if (r.condition == Condition::Baseline) {
      pair.baseline[0] = r.max_val;
      pair.baseline[1] = r.mean_val;
      pair.baseline[2] = r.sd_val;
      pair.has_baseline = true;
    } else {
      pair.task[0] = r.max_val;
      pair.task[1] = r.mean_val;
      pair.task[2] = r.sd_val;
      pair.has_task = true;
    }
  }
  for (auto it = pairs.begin(); it != pairs.end();) {
    if (!it->second.has_baseline || !it->second.has_task) {
      it = pairs.erase(it);
    } else {
      ++it;
    }
  }
  return pairs;
}

}  // namespace evaluate_detail

// Builds the full results grid from a long-format index table: a linear mixed
// model (random participant intercept) per cell and index, with Cohen's d,
// AUC, and ICC of the repeated (baseline, task) measurements.
inline ResultsGrid evaluate_table(const IndexTable& table,
                                  IccForm icc_form = IccForm::TwoWayConsistency) {
  if (table.rows.empty()) throw DataError("evaluate_table: empty index table");

  std::set<int> channels;
  std::set<double> rates;
  std::set<int> kinds_present;
  for (const auto& r : table.rows) {
    channels.insert(r.channel);
    rates.insert(r.rate_hz);
    kinds_present.insert(static_cast<int>(r.kind));
  }
  std::vector<double> rates_desc(rates.begin(), rates.end());
  std::sort(rates_desc.begin(), rates_desc.end(), std::greater<>());

  ResultsGrid grid;
  grid.icc_form = icc_form;
  grid.provenance = table.provenance;

  const TaskCell cells[4] = {TaskCell::VM, TaskCell::ST, TaskCell::CSPminus, TaskCell::CSPplus};
  for (int ch : channels) {
    for (int kind_i : kinds_present) {
      const SknaKind kind = static_cast<SknaKind>(kind_i);
      for (double rate : rates_desc) {
        for (TaskCell cell : cells) {
          auto pairs = evaluate_detail::collect_pairs(table, ch, rate, kind, cell);
          for (int idx = 0; idx < 3; ++idx) {
            CellResult res;
            res.channel = ch;
            res.rate_hz = rate;
            res.kind = kind;
            res.cell = cell;
            res.index_name = kIndexNames[idx];
            res.n_pairs = static_cast<int>(pairs.size());

            if (pairs.empty()) {
              res.unavailable_reason = "no segment pairs in this cell";
              grid.cells.push_back(std::move(res));
              continue;
            }

            PairedObservations obs;
            std::vector<double> base_vals, task_vals;
            std::map<std::string, std::vector<double>> icc_rows;  // participant -> measurements
            std::set<std::string> participants;
            for (const auto& [key, pair] : pairs) {
              participants.insert(key.participant);
              obs.rows.push_back({key.participant, 0, pair.baseline[idx]});
              obs.rows.push_back({key.participant, 1, pair.task[idx]});
              base_vals.push_back(pair.baseline[idx]);
              task_vals.push_back(pair.task[idx]);
              auto& row = icc_rows[key.participant];
              row.push_back(pair.baseline[idx]);  // pairs map is sorted by segment id
              row.push_back(pair.task[idx]);
            }
            res.n_participants = static_cast<int>(participants.size());

            try {
              LmmFit fit = fit_lmm(obs);
              res.beta1 = fit.beta1;
              res.p_value = fit.p_value;
              res.stars = significance_stars(fit.p_value);
              res.effect_d = cohens_d(fit);
              res.auc_value = auc(base_vals, task_vals);
              res.available = true;
            } catch (const Error& e) {
              res.unavailable_reason = e.what();
              grid.cells.push_back(std::move(res));
              continue;
            }

            try {
              std::vector<std::vector<double>> matrix;
              matrix.reserve(icc_rows.size());
              for (auto& [id, row] : icc_rows) matrix.push_back(std::move(row));
              IccResult ic = icc(matrix, icc_form);
              res.icc_available = true;
              res.icc_raw = ic.value;
              res.icc_display = std::max(ic.value, 0.0);
              res.icc_truncated = ic.truncated;
            } catch (const Error&) {
              res.icc_available = false;
            }
            grid.cells.push_back(std::move(res));
          }
        }
      }
    }
  }
  return grid;
}

// ---- Results CSV -------------------------------------------------------------

inline const char* kResultsHeader =
    "channel,rate,kind,cell,index,available,n_participants,n_pairs,beta1,p_value,stars,"
    "cohens_d,auc,icc_raw,icc_display,icc_truncated,reason";

inline void save_results_csv(const std::filesystem::path& path, const ResultsGrid& grid) {
  std::string out;
  out += "# provenance=";
  out += grid.provenance;
  out += '\n';
  out += "# icc_form=";
  out += grid.icc_form == IccForm::TwoWayConsistency ? "two-way" : "one-way";
  out += '\n';
  out += kResultsHeader;
  out += '\n';
  for (const auto& c : grid.cells) {
    out += std::to_string(c.channel);
    out += ',';
    out += format_double(c.rate_hz);
    out += ',';
    out += to_string(c.kind);
    out += ',';
    out += to_string(c.cell);
    out += ',';
    out += c.index_name;
    out += ',';
    out += c.available ? "1" : "0";
    out += ',';
    out += std::to_string(c.n_participants);
    out += ',';
    out += std::to_string(c.n_pairs);
    out += ',';
    out += format_double(c.beta1);
    out += ',';
    out += format_double(c.p_value);
    out += ',';
    out += c.stars;
    out += ',';
    out += format_double(c.effect_d);
    out += ',';
    out += format_double(c.auc_value);
    out += ',';
    out += c.icc_available ? format_double(c.icc_raw) : "";
    out += ',';
    out += c.icc_available ? format_double(c.icc_display) : "";
    out += ',';
    out += c.icc_truncated ? "1" : "0";
    out += ',';
    for (char ch : c.unavailable_reason) {  // keep the reason on one CSV field
      out += (ch == ',' || ch == '\n') ? ';' : ch;
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

inline ResultsGrid load_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open results: " + path.string());
  ResultsGrid grid;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    std::string_view sv = trim_view(line);
    if (sv.empty()) continue;
    if (sv.starts_with("# provenance=")) {
      grid.provenance = std::string(sv.substr(13));
      continue;
    }
    if (sv.starts_with("# icc_form=")) {
      grid.icc_form = sv.substr(11) == "one-way" ? IccForm::OneWayRandom
                                                 : IccForm::TwoWayConsistency;
      continue;
    }
    if (sv.starts_with("#")) continue;
    if (!saw_header) {
      if (sv != kResultsHeader) throw FormatError(path.string() + ": bad results header");
      saw_header = true;
      continue;
    }
    auto f = split_view(sv, ',');
    if (f.size() != 17) {
      throw FormatError(path.string() + ": results rows need 17 fields");
    }
    CellResult c;
    const std::string where = path.string() + " results";
    c.channel = static_cast<int>(parse_int_strict(f[0], where));
    c.rate_hz = parse_double_strict(f[1], where);
    c.kind = skna_kind_from(trim_view(f[2]));
    c.cell = task_cell_from(trim_view(f[3]));
    c.index_name = std::string(trim_view(f[4]));
    c.available = trim_view(f[5]) == "1";
    c.n_participants = static_cast<int>(parse_int_strict(f[6], where));
    c.n_pairs = static_cast<int>(parse_int_strict(f[7], where));
    c.beta1 = parse_double_strict(f[8], where);
    c.p_value = parse_double_strict(f[9], where);
    c.stars = std::string(trim_view(f[10]));
    c.effect_d = parse_double_strict(f[11], where);
    c.auc_value = parse_double_strict(f[12], where);
    if (!trim_view(f[13]).empty()) {
      c.icc_available = true;
      c.icc_raw = parse_double_strict(f[13], where);
      c.icc_display = parse_double_strict(f[14], where);
    }
    c.icc_truncated = trim_view(f[15]) == "1";
    c.unavailable_reason = std::string(trim_view(f[16]));
    grid.cells.push_back(std::move(c));
  }
  if (!saw_header || grid.cells.empty()) {
    throw FormatError(path.string() + ": no results rows");
  }
  return grid;
}

// Fixed-width text rendering, one block per (channel, kind): rows are
// rate x index, columns are the four cells with d / AUC / ICC each.
inline std::string format_results_text(const ResultsGrid& grid) {
  std::string out;
  char buf[128];
  std::set<std::pair<int, int>> blocks;
  for (const auto& c : grid.cells) blocks.insert({c.channel, static_cast<int>(c.kind)});

  for (auto [ch, kind_i] : blocks) {
    const SknaKind kind = static_cast<SknaKind>(kind_i);
    std::snprintf(buf, sizeof(buf), "channel %d, %s\n", ch, to_string(kind));
    out += buf;
    std::snprintf(buf, sizeof(buf), "%6s %-5s", "rate", "index");
    out += buf;
    for (const char* cell : {"VM", "ST", "CSP-", "CSP+"}) {
      std::snprintf(buf, sizeof(buf), " | %8s %6s %6s", (std::string(cell) + " d").c_str(),
                    "AUC", "ICC");
      out += buf;
    }
    out += '\n';

    std::set<double, std::greater<>> rates;
    for (const auto& c : grid.cells) {
      if (c.channel == ch && c.kind == kind) rates.insert(c.rate_hz);
    }
    for (double rate : rates) {
      for (int idx = 0; idx < 3; ++idx) {
        std::snprintf(buf, sizeof(buf), "%6.0f %-5s", rate, kIndexNames[idx]);
        out += buf;
        for (TaskCell cell : {TaskCell::VM, TaskCell::ST, TaskCell::CSPminus, TaskCell::CSPplus}) {
          const CellResult* found = nullptr;
          for (const auto& c : grid.cells) {
            if (c.channel == ch && c.kind == kind && c.rate_hz == rate && c.cell == cell &&
                c.index_name == kIndexNames[idx]) {
              found = &c;
              break;
            }
          }
          if (!found || !found->available) {
            std::snprintf(buf, sizeof(buf), " | %8s %6s %6s", "-", "-", "-");
          } else {
            std::string d_str = format_fixed(found->effect_d, 2) + found->stars;
            std::string icc_str = found->icc_available ? format_fixed(found->icc_display, 2) : "-";
            std::snprintf(buf, sizeof(buf), " | %8s %6.2f %6s", d_str.c_str(), found->auc_value,
                          icc_str.c_str());
          }
          out += buf;
        }
        out += '\n';
      }
    }
    out += '\n';
  }
  return out;
}

// ---- Cross-rate agreement ------------------------------------------------------

struct CellComparison {
  int channel = 0;
  SknaKind kind = SknaKind::iSKNA;
  TaskCell cell = TaskCell::VM;
  std::string index_name;
  double rate_a = 0.0, rate_b = 0.0;
  double d_a = 0.0, d_b = 0.0;
  double auc_a = 0.0, auc_b = 0.0;
  double icc_a = 0.0, icc_b = 0.0;
  std::string stars_a, stars_b;
  bool stars_agree = false;
};

struct SegmentCorrelation {
  int channel = 0;
  SknaKind kind = SknaKind::iSKNA;
  std::string index_name;
  double rate_a = 0.0, rate_b = 0.0;
  double r = 0.0;
  std::size_t n = 0;
};

struct RatePairSummary {
  double rate_a = 0.0, rate_b = 0.0;
  int cells_compared = 0;
  int cells_star_agree = 0;
  double star_agreement = 0.0;
  double mean_abs_delta_d = 0.0;
  double mean_abs_delta_auc = 0.0;
  double mean_abs_delta_icc = 0.0;
};

struct RateAgreementReport {
  std::vector<double> rates;
  std::vector<CellComparison> comparisons;
  std::vector<RatePairSummary> summaries;
  std::vector<SegmentCorrelation> correlations;
};

namespace evaluate_detail {

using ShapeKey = std::tuple<int, int, int, std::string>;  // channel, kind, cell, index

inline std::map<ShapeKey, const CellResult*> slice_cells(const ResultsGrid& grid, double rate) {
  std::map<ShapeKey, const CellResult*> out;
  for (const auto& c : grid.cells) {
    if (c.rate_hz == rate && c.available) {
      out[{c.channel, static_cast<int>(c.kind), static_cast<int>(c.cell), c.index_name}] = &c;
    }
  }
  return out;
}

inline std::vector<double> grid_rates_desc(const ResultsGrid& grid) {
  std::set<double, std::greater<>> rates;
  for (const auto& c : grid.cells) rates.insert(c.rate_hz);
  return {rates.begin(), rates.end()};
}

// Compare two grid slices cell-by-cell.  With strict_shapes, the available
// cell sets must match exactly (grids built over different tasks or channels
// are not comparable).
inline void append_slice_comparison(const ResultsGrid& grid_a, double rate_a,
                                    const ResultsGrid& grid_b, double rate_b,
                                    bool strict_shapes, RateAgreementReport& report) {
  const auto cells_a = slice_cells(grid_a, rate_a);
  const auto cells_b = slice_cells(grid_b, rate_b);
  if (strict_shapes) {
    auto keys_of = [](const std::map<ShapeKey, const CellResult*>& m) {
      std::set<ShapeKey> keys;
      for (const auto& [k, v] : m) keys.insert(k);
      return keys;
    };
    if (keys_of(cells_a) != keys_of(cells_b)) {
      throw DataError("compare: grids have mismatched shapes (different cells available)");
    }
  }

  RatePairSummary summary;
  summary.rate_a = rate_a;
  summary.rate_b = rate_b;
  double sum_dd = 0, sum_dauc = 0, sum_dicc = 0;
  int n_icc = 0;
  for (const auto& [key, ca] : cells_a) {
    auto hit = cells_b.find(key);
    if (hit == cells_b.end()) continue;
    const CellResult* cb = hit->second;
    CellComparison cmp;
    cmp.channel = std::get<0>(key);
    cmp.kind = static_cast<SknaKind>(std::get<1>(key));
    cmp.cell = static_cast<TaskCell>(std::get<2>(key));
    cmp.index_name = std::get<3>(key);
    cmp.rate_a = rate_a;
    cmp.rate_b = rate_b;
    cmp.d_a = ca->effect_d;
    cmp.d_b = cb->effect_d;
    cmp.auc_a = ca->auc_value;
    cmp.auc_b = cb->auc_value;
    cmp.icc_a = ca->icc_available ? ca->icc_raw : std::nan("");
    cmp.icc_b = cb->icc_available ? cb->icc_raw : std::nan("");
    cmp.stars_a = ca->stars;
    cmp.stars_b = cb->stars;
    cmp.stars_agree = ca->stars == cb->stars;
    ++summary.cells_compared;
    if (cmp.stars_agree) ++summary.cells_star_agree;
    sum_dd += std::abs(cmp.d_a - cmp.d_b);
    sum_dauc += std::abs(cmp.auc_a - cmp.auc_b);
    if (ca->icc_available && cb->icc_available) {
      sum_dicc += std::abs(cmp.icc_a - cmp.icc_b);
      ++n_icc;
    }
    report.comparisons.push_back(std::move(cmp));
  }
  if (summary.cells_compared > 0) {
    summary.star_agreement =
        static_cast<double>(summary.cells_star_agree) / summary.cells_compared;
    summary.mean_abs_delta_d = sum_dd / summary.cells_compared;
    summary.mean_abs_delta_auc = sum_dauc / summary.cells_compared;
    summary.mean_abs_delta_icc = n_icc > 0 ? sum_dicc / n_icc : 0.0;
  }
  report.summaries.push_back(summary);
}

}  // namespace evaluate_detail

// Pearson correlation of matched per-segment index values between every rate
// pair present in the table, per (channel, kind, index).
inline std::vector<SegmentCorrelation> segment_correlations(const IndexTable& table) {
  struct SegKey {
    std::string participant;
    int task;
    int condition;
    std::string segment_id;
    bool operator<(const SegKey& o) const {
      return std::tie(participant, task, condition, segment_id) <
             std::tie(o.participant, o.task, o.condition, o.segment_id);
    }
  };
  std::vector<SegmentCorrelation> out;
  std::set<double, std::greater<>> rate_set;
  for (const auto& r : table.rows) rate_set.insert(r.rate_hz);
  const std::vector<double> rates(rate_set.begin(), rate_set.end());

  std::set<std::pair<int, int>> chkinds;
  for (const auto& r : table.rows) chkinds.insert({r.channel, static_cast<int>(r.kind)});
  for (auto [ch, kind_i] : chkinds) {
    for (int idx = 0; idx < 3; ++idx) {
      std::map<double, std::map<SegKey, double>> by_rate;
      for (const auto& r : table.rows) {
        if (r.channel != ch || static_cast<int>(r.kind) != kind_i) continue;
        const double v = idx == 0 ? r.max_val : (idx == 1 ? r.mean_val : r.sd_val);
        by_rate[r.rate_hz][{r.participant_id, static_cast<int>(r.task),
                            static_cast<int>(r.condition), r.segment_id}] = v;
      }
      for (std::size_t i = 0; i < rates.size(); ++i) {
        for (std::size_t j = i + 1; j < rates.size(); ++j) {
          auto ita = by_rate.find(rates[i]);
          auto itb = by_rate.find(rates[j]);
          if (ita == by_rate.end() || itb == by_rate.end()) continue;
          std::vector<double> va, vb;
          for (const auto& [key, v] : ita->second) {
            auto hit = itb->second.find(key);
            if (hit != itb->second.end()) {
              va.push_back(v);
              vb.push_back(hit->second);
            }
          }
          if (va.size() < 2) continue;
          SegmentCorrelation corr;
          corr.channel = ch;
          corr.kind = static_cast<SknaKind>(kind_i);
          corr.index_name = kIndexNames[idx];
          corr.rate_a = rates[i];
          corr.rate_b = rates[j];
          corr.n = va.size();
          try {
            corr.r = pearson(va, vb);
          } catch (const DataError&) {
            continue;
          }
          out.push_back(std::move(corr));
        }
      }
    }
  }
  return out;
}

// Compares every rate pair within one grid cell-by-cell (effect sizes, AUC,
// ICC, significance stars); with a table, also correlates matched per-segment
// index values between rates.  Requires at least two rates.
inline RateAgreementReport compare_rates(const ResultsGrid& grid,
                                         const IndexTable* table = nullptr) {
  RateAgreementReport report;
  report.rates = evaluate_detail::grid_rates_desc(grid);
  if (report.rates.size() < 2) {
    throw DataError("compare_rates: need results at two or more rates");
  }
  for (std::size_t i = 0; i < report.rates.size(); ++i) {
    for (std::size_t j = i + 1; j < report.rates.size(); ++j) {
      evaluate_detail::append_slice_comparison(grid, report.rates[i], grid, report.rates[j],
                                               false, report);
    }
  }
  if (table != nullptr) report.correlations = segment_correlations(*table);
  return report;
}

inline RateAgreementReport compare_rates(const ResultsGrid& grid, const IndexTable& table) {
  return compare_rates(grid, &table);
}

// Compares separately produced grids pairwise (typically one grid per rate).
// Grids must expose the same number of rates; slices are aligned by rate rank
// so per-rate grids pair naturally and identical grids compare rate-to-rate.
inline RateAgreementReport compare_grids(const std::vector<ResultsGrid>& grids,
                                         const IndexTable* table = nullptr) {
  if (grids.size() < 2) throw DataError("compare_grids: need at least two grids");
  std::vector<std::vector<double>> rates;
  rates.reserve(grids.size());
  for (const auto& g : grids) rates.push_back(evaluate_detail::grid_rates_desc(g));
  for (const auto& r : rates) {
    if (r.size() != rates[0].size()) {
      throw DataError("compare: grids have mismatched shapes (different rate counts)");
    }
  }

  RateAgreementReport report;
  std::set<double, std::greater<>> all_rates;
  for (const auto& r : rates) all_rates.insert(r.begin(), r.end());
  report.rates.assign(all_rates.begin(), all_rates.end());

  for (std::size_t i = 0; i < grids.size(); ++i) {
    for (std::size_t j = i + 1; j < grids.size(); ++j) {
      for (std::size_t k = 0; k < rates[i].size(); ++k) {
        evaluate_detail::append_slice_comparison(grids[i], rates[i][k], grids[j], rates[j][k],
                                                 true, report);
      }
    }
  }
  bool any = false;
  for (const auto& s : report.summaries) any = any || s.cells_compared > 0;
  if (!any) throw DataError("compare: grids share no comparable cells");
  if (table != nullptr) report.correlations = segment_correlations(*table);
  return report;
}

inline void save_agreement_csv(const std::filesystem::path& path,
                               const RateAgreementReport& report) {
  std::string out;
  out += "section,channel,kind,cell,index,rate_a,rate_b,d_a,d_b,auc_a,auc_b,icc_a,icc_b,"
         "stars_a,stars_b,stars_agree,r,n\n";
  for (const auto& c : report.comparisons) {
    out += "cell,";
    out += std::to_string(c.channel);
    out += ',';
    out += to_string(c.kind);
    out += ',';
    out += to_string(c.cell);
    out += ',';
    out += c.index_name;
    out += ',';
    out += format_double(c.rate_a);
    out += ',';
    out += format_double(c.rate_b);
    out += ',';
    out += format_double(c.d_a);
    out += ',';
    out += format_double(c.d_b);
    out += ',';
    out += format_double(c.auc_a);
    out += ',';
    out += format_double(c.auc_b);
    out += ',';
    out += std::isnan(c.icc_a) ? "" : format_double(c.icc_a);
    out += ',';
    out += std::isnan(c.icc_b) ? "" : format_double(c.icc_b);
    out += ',';
    out += c.stars_a;
    out += ',';
    out += c.stars_b;
    out += ',';
    out += c.stars_agree ? "1" : "0";
    out += ",,\n";
  }
  for (const auto& s : report.correlations) {
    out += "correlation,";
    out += std::to_string(s.channel);
    out += ',';
    out += to_string(s.kind);
    out += ",,";
    out += s.index_name;
    out += ',';
    out += format_double(s.rate_a);
    out += ',';
    out += format_double(s.rate_b);
    out += ",,,,,,,,,,";
    out += format_double(s.r);
    out += ',';
    out += std::to_string(s.n);
    out += '\n';
  }
  for (const auto& s : report.summaries) {
    out += "summary,,,,,";
    out += format_double(s.rate_a);
    out += ',';
    out += format_double(s.rate_b);
    out += ',';
    out += format_double(s.mean_abs_delta_d);
    out += ",,";
    out += format_double(s.mean_abs_delta_auc);
    out += ",,";
    out += format_double(s.mean_abs_delta_icc);
    out += ",,,,";
    out += format_double(s.star_agreement);
    out += ',';
    out += std::to_string(s.cells_compared);
    out += '\n';
  }
  write_file_atomic(path, out);
}

inline std::string format_agreement_text(const RateAgreementReport& report) {
  std::string out;
  char buf[160];
  out += "cross-rate agreement\n";
  for (const auto& s : report.summaries) {
    std::snprintf(buf, sizeof(buf),
                  "  %4.0f vs %4.0f Hz: star agreement %5.1f%% (%d/%d cells), "
                  "mean |delta d| %.3f, mean |delta AUC| %.3f, mean |delta ICC| %.3f\n",
                  s.rate_a, s.rate_b, 100.0 * s.star_agreement, s.cells_star_agree,
                  s.cells_compared, s.mean_abs_delta_d, s.mean_abs_delta_auc,
                  s.mean_abs_delta_icc);
    out += buf;
  }
  out += "per-segment index correlation across rates\n";
  for (const auto& c : report.correlations) {
    std::snprintf(buf, sizeof(buf), "  ch%d %-6s %-4s %4.0f vs %4.0f Hz: r = %.4f (n = %zu)\n",
                  c.channel, to_string(c.kind), c.index_name.c_str(), c.rate_a, c.rate_b, c.r,
                  c.n);
    out += buf;
  }
  return out;
}

}  // namespace skna
