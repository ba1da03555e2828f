#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace skna {

// Long-format paired observations: one value per (participant, group) cell,
// possibly several per participant and group.  `group` is 0 (reference /
// baseline) or 1 (task).
struct PairedObservations {
  struct Row {
    std::string participant;
    int group = 0;
    double value = 0.0;
  };
  std::vector<Row> rows;
};

// Random-intercept linear mixed model  y = b0 + b1*group + u_participant + e
// fitted by REML.  `lambda` is the profiled variance ratio sigma_u^2/sigma_e^2.
struct LmmFit {
  double beta0 = 0.0;
  double beta1 = 0.0;
  double se_beta1 = 0.0;
  double sigma_u2 = 0.0;
  double sigma_e2 = 0.0;
  double lambda = 0.0;
  double z_value = 0.0;
  double p_value = 1.0;
  bool converged = false;
  std::size_t n_obs = 0;
  std::size_t n_participants = 0;
  std::vector<double> reml_trace;  // best objective after each evaluation
};

namespace stats_detail {

struct Group {
  std::vector<double> y;
  std::vector<double> g;
};

inline std::vector<Group> group_by_participant(const PairedObservations& obs) {
  std::map<std::string, Group> by_id;
  for (const auto& r : obs.rows) {
    if (!std::isfinite(r.value)) throw ModelError("lmm: non-finite observation");
    if (r.group != 0 && r.group != 1) throw ModelError("lmm: group must be 0 or 1");
    auto& grp = by_id[r.participant];
    grp.y.push_back(r.value);
    grp.g.push_back(static_cast<double>(r.group));
  }
  std::vector<Group> out;
  out.reserve(by_id.size());
  for (auto& [id, grp] : by_id) out.push_back(std::move(grp));
  return out;
}

// Profiled REML pieces at a fixed variance ratio.  With V_i = I + lambda*J,
// V_i^-1 = I - lambda/(1 + n_i lambda) J, accumulation over participants
// gives X'V^-1X (2x2 symmetric), X'V^-1y, y'V^-1y, and log|V|.
struct RemlParts {
  double xx00 = 0, xx01 = 0, xx11 = 0;
  double xy0 = 0, xy1 = 0;
  double yy = 0;
  double logdet_v = 0;
  std::size_t n = 0;
};

inline RemlParts accumulate(const std::vector<Group>& groups, double lambda) {
  RemlParts p;
  for (const auto& grp : groups) {
    const std::size_t ni = grp.y.size();
    const double nid = static_cast<double>(ni);
    const double shrink = lambda / (1.0 + nid * lambda);
    double sy = 0, sg = 0, sgy = 0, sgg = 0, syy = 0;
    for (std::size_t i = 0; i < ni; ++i) {
      sy += grp.y[i];
      sg += grp.g[i];
      sgy += grp.g[i] * grp.y[i];
      sgg += grp.g[i] * grp.g[i];
      syy += grp.y[i] * grp.y[i];
    }
    // Columns of X are [1, g]; J-correction subtracts shrink * (column sums).
    p.xx00 += nid - shrink * nid * nid;
    p.xx01 += sg - shrink * nid * sg;
    p.xx11 += sgg - shrink * sg * sg;
    p.xy0 += sy - shrink * nid * sy;
    p.xy1 += sgy - shrink * sg * sy;
    p.yy += syy - shrink * sy * sy;
    p.logdet_v += std::log1p(nid * lambda);
    p.n += ni;
  }
  return p;
}

struct GlsSolution {
  double beta0 = 0, beta1 = 0;
  double rss = 0;          // y'V^-1y - beta'X'V^-1y
  double inv_a11 = 0;      // (X'V^-1X)^-1 [1][1]
  double det = 0;
};

inline GlsSolution solve_gls(const RemlParts& p) {
  GlsSolution s;
  s.det = p.xx00 * p.xx11 - p.xx01 * p.xx01;
  if (!(s.det > 1e-12 * std::max(1.0, p.xx00 * p.xx11))) {
    throw ModelError("lmm: design matrix is singular (a group is empty)");
  }
  s.beta0 = (p.xx11 * p.xy0 - p.xx01 * p.xy1) / s.det;
  s.beta1 = (p.xx00 * p.xy1 - p.xx01 * p.xy0) / s.det;
  s.rss = p.yy - (s.beta0 * p.xy0 + s.beta1 * p.xy1);
  s.inv_a11 = p.xx00 / s.det;
  return s;
}

// -2 * profiled REML log-likelihood (up to constants).
inline double reml_objective(const std::vector<Group>& groups, double lambda) {
  RemlParts p = accumulate(groups, lambda);
  GlsSolution s = solve_gls(p);
  const double dof = static_cast<double>(p.n) - 2.0;
  const double rss = std::max(s.rss, 1e-300);
  return p.logdet_v + std::log(std::max(s.det, 1e-300)) + dof * std::log(rss);
}

}  // namespace stats_detail

// Fits the model at a fixed variance ratio (exposed for oracle checks).
inline LmmFit fit_lmm_fixed_lambda(const PairedObservations& obs, double lambda) {
  auto groups = stats_detail::group_by_participant(obs);
  if (groups.size() < 2) throw ModelError("lmm: need at least two participants");
  auto parts = stats_detail::accumulate(groups, lambda);
  if (parts.n < 4) throw ModelError("lmm: need at least four observations");
  auto sol = stats_detail::solve_gls(parts);

  LmmFit fit;
  fit.lambda = lambda;
  fit.n_obs = parts.n;
  fit.n_participants = groups.size();
  fit.beta0 = sol.beta0;
  fit.beta1 = sol.beta1;
  fit.sigma_e2 = std::max(sol.rss, 0.0) / (static_cast<double>(parts.n) - 2.0);
  fit.sigma_u2 = lambda * fit.sigma_e2;
  fit.se_beta1 = std::sqrt(std::max(fit.sigma_e2 * sol.inv_a11, 0.0));
  if (fit.se_beta1 > 0.0) {
    fit.z_value = fit.beta1 / fit.se_beta1;
    fit.p_value = std::erfc(std::abs(fit.z_value) / std::sqrt(2.0));
  } else {
    fit.z_value = 0.0;
    fit.p_value = 1.0;
  }
  fit.converged = true;
  return fit;
}

// REML fit with the variance ratio profiled out: coarse log-spaced bracket,
// then golden-section refinement.  The trace records the best objective seen
// after each evaluation (non-increasing by construction).
inline LmmFit fit_lmm(const PairedObservations& obs) {
  auto groups = stats_detail::group_by_participant(obs);
  if (groups.size() < 2) throw ModelError("lmm: need at least two participants");

  std::vector<double> grid;
  grid.push_back(0.0);
  for (int i = 0; i <= 80; ++i) {
    grid.push_back(std::pow(10.0, -6.0 + 10.0 * static_cast<double>(i) / 80.0));
  }

  std::vector<double> trace;
  double best = std::numeric_limits<double>::infinity();
  auto eval = [&](double lam) {
    double f = stats_detail::reml_objective(groups, lam);
    best = std::min(best, f);
    trace.push_back(best);
    return f;
  };

  std::size_t best_idx = 0;
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<double> grid_vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid_vals[i] = eval(grid[i]);
    if (grid_vals[i] < best_val) {
      best_val = grid_vals[i];
      best_idx = i;
    }
  }
  double lo = grid[best_idx > 0 ? best_idx - 1 : 0];
  double hi = grid[std::min(best_idx + 1, grid.size() - 1)];

  // Golden-section search on [lo, hi].
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = eval(c), fd = eval(d);
  bool converged = false;
  for (int iter = 0; iter < 200; ++iter) {
    if (b - a < 1e-8 * (1.0 + a)) {
      converged = true;
      break;
    }
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = eval(d);
    }
  }
  double lambda = (fc < fd) ? c : d;
  // The boundary lambda = 0 (no participant variance) must stay reachable.
  if (grid_vals[0] <= std::min(fc, fd)) lambda = 0.0;

  LmmFit fit = fit_lmm_fixed_lambda(obs, lambda);
  fit.converged = converged;
  fit.reml_trace = std::move(trace);
  return fit;
}

// Standardized effect size: the fixed effect over the total model SD.
inline double cohens_d(const LmmFit& fit) {
  if (!fit.converged) throw ModelError("cohens_d: fit did not converge");
  const double total_var = fit.sigma_u2 + fit.sigma_e2;
  if (!(total_var > 0.0)) throw ModelError("cohens_d: total variance is zero");
  return fit.beta1 / std::sqrt(total_var);
}

// Area under the ROC curve for separating group 1 from group 0 via the
// Mann-Whitney statistic with midranks for ties.
inline double auc(std::span<const double> group0, std::span<const double> group1) {
  if (group0.empty() || group1.empty()) throw DataError("auc: both groups must be non-empty");
  struct Tagged {
    double v;
    int grp;
  };
  std::vector<Tagged> all;
  all.reserve(group0.size() + group1.size());
  for (double v : group0) {
    if (!std::isfinite(v)) throw DataError("auc: non-finite value");
    all.push_back({v, 0});
  }
  for (double v : group1) {
    if (!std::isfinite(v)) throw DataError("auc: non-finite value");
    all.push_back({v, 1});
  }
  std::sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) { return a.v < b.v; });

  const double n0 = static_cast<double>(group0.size());
  const double n1 = static_cast<double>(group1.size());
  double rank_sum1 = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].v == all[i].v) ++j;
    // Midrank of the tie block [i, j): average of ranks i+1..j.
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (all[k].grp == 1) rank_sum1 += midrank;
    }
    i = j;
  }
  return (rank_sum1 - n1 * (n1 + 1.0) / 2.0) / (n0 * n1);
}

// ---- Intraclass correlation ---------------------------------------------------

enum class IccForm {
  TwoWayConsistency,  // ICC(3,1): two-way mixed, single measurement, consistency
  OneWayRandom,       // ICC(1,1): one-way random, single measurement
};

struct IccResult {
  double value = 0.0;   // raw estimate (can be negative)
  int n_subjects = 0;
  int k_measures = 0;
  bool truncated = false;  // rows had unequal lengths and were cut to the minimum
};

// `measurements[s]` holds subject s's repeated measurements.  Unequal row
// lengths are truncated to the shortest row (flagged in the result).
inline IccResult icc(const std::vector<std::vector<double>>& measurements,
                     IccForm form = IccForm::TwoWayConsistency) {
  const int n = static_cast<int>(measurements.size());
  if (n < 2) throw DataError("icc: need at least two subjects");
  std::size_t k = measurements[0].size();
  bool truncated = false;
  for (const auto& row : measurements) k = std::min(k, row.size());
  for (const auto& row : measurements) {
    if (row.size() > k) truncated = true;
  }
  if (k < 2) throw DataError("icc: need at least two measurements per subject");
  for (const auto& row : measurements) {
    for (std::size_t j = 0; j < k; ++j) {
      if (!std::isfinite(row[j])) throw DataError("icc: non-finite measurement");
    }
  }

  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  double grand = 0.0;
  std::vector<double> row_mean(static_cast<std::size_t>(n), 0.0);
  std::vector<double> col_mean(k, 0.0);
  for (int s = 0; s < n; ++s) {
    for (std::size_t j = 0; j < k; ++j) {
      const double v = measurements[static_cast<std::size_t>(s)][j];
      grand += v;
      row_mean[static_cast<std::size_t>(s)] += v;
      col_mean[j] += v;
    }
  }
  grand /= nd * kd;
  for (auto& m : row_mean) m /= kd;
  for (auto& m : col_mean) m /= nd;

  double ss_rows = 0.0, ss_cols = 0.0, ss_total = 0.0;
  for (int s = 0; s < n; ++s) {
    const double dr = row_mean[static_cast<std::size_t>(s)] - grand;
    ss_rows += kd * dr * dr;
  }
  for (std::size_t j = 0; j < k; ++j) {
    const double dc = col_mean[j] - grand;
    ss_cols += nd * dc * dc;
  }
  for (int s = 0; s < n; ++s) {
    for (std::size_t j = 0; j < k; ++j) {
      const double d = measurements[static_cast<std::size_t>(s)][j] - grand;
      ss_total += d * d;
    }
  }

  IccResult res;
  res.n_subjects = n;
  res.k_measures = static_cast<int>(k);
  res.truncated = truncated;

  const double ms_rows = ss_rows / (nd - 1.0);
  if (form == IccForm::TwoWayConsistency) {
    const double ss_err = ss_total - ss_rows - ss_cols;
    const double ms_err = ss_err / ((nd - 1.0) * (kd - 1.0));
    const double denom = ms_rows + (kd - 1.0) * ms_err;
    res.value = denom != 0.0 ? (ms_rows - ms_err) / denom : 0.0;
  } else {
    const double ss_within = ss_total - ss_rows;
    const double ms_within = ss_within / (nd * (kd - 1.0));
    const double denom = ms_rows + (kd - 1.0) * ms_within;
    res.value = denom != 0.0 ? (ms_rows - ms_within) / denom : 0.0;
  }
  return res;
}

// Pearson correlation.
inline double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw DataError("pearson: need two equal-length vectors of size >= 2");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw DataError("pearson: zero variance");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace skna
