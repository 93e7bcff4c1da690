#pragma once

// Ensemble studies over disorder realizations: ground-state matching scans,
// P(tau) sweeps (all realizations and impurity-free post-selection), P
// histograms, amplitude scans and optimal-disorder curves.
//
// Every realization r is a pure function of (spec, r); per-realization results
// land in index-addressed slots and are reduced sequentially in r order with
// compensated sums, so outputs do not depend on the thread count.

#include "qac/disorder.hpp"
#include "qac/dynamics.hpp"
#include "qac/encoding.hpp"
#include "qac/graph.hpp"
#include "qac/hamiltonian.hpp"
#include "qac/support.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace qac {

struct Instance {
  Graph graph;
  int K = 0;
  IsingProblem clean;
  SolutionSet solutions;

  static Instance make(const Graph& g, int K) {
    return Instance{g, K, build_ising(g, K), solution_set(g, K)};
  }

  const std::string& graph_id() const { return clean.meta.graph_id; }
};

// ---------------------------------------------------------------------------
// realization predicates (diagonal only, no dynamics)

inline constexpr double kGroundTieTolerance = 1e-12;

/// The disordered ground state is a clean solution; ties within 1e-12 of the
/// minimum count as a match if any tied state is a solution.
inline bool ground_matches(std::span<const double> diag, const SolutionSet& S) {
  const double e0 = *std::min_element(diag.begin(), diag.end());
  for (BasisIndex k : S.indices)
    if (diag[k] <= e0 + kGroundTieTolerance)
      return true;
  return false;
}

/// The |S| lowest diagonal entries are exactly the solution states: every
/// solution lies strictly below every non-solution.
inline bool impurity_free(std::span<const double> diag, const SolutionSet& S) {
  if (S.indices.empty())
    return false;
  double top_solution = -std::numeric_limits<double>::infinity();
  for (BasisIndex k : S.indices)
    top_solution = std::max(top_solution, diag[k]);
  for (BasisIndex k = 0; k < diag.size(); ++k)
    if (!S.contains(k) && !(diag[k] > top_solution))
      return false;
  return true;
}

inline constexpr const char* kImpurityFreeDefinition =
    "impurity_free: every clean solution state has lower disordered problem energy than every "
    "non-solution state (the |S| lowest diagonal entries are exactly S)";

// ---------------------------------------------------------------------------
// ensembles

struct RunOptions {
  EvolveOptions evolve;
  int threads = 1;
  std::function<void(std::size_t done, std::size_t total)> progress;
};

struct RealizationRecord {
  std::uint64_t r = 0;
  double P = 0.0;
  bool ground_match = false;
  bool impurity_free = false;
};

struct EnsembleSummary {
  double mean_P = 0.0;
  double stderr_P = 0.0;
  std::size_t n_realizations = 0;
  std::size_t n_failed = 0;
  std::vector<RealizationRecord> per_realization;
};

/// P for every (realization, tau) pair of one disorder spec.
struct EnsembleRun {
  DisorderSpec spec;
  std::vector<double> taus;
  std::vector<bool> ground_match;          // [r]
  std::vector<bool> impurity_free;         // [r]
  std::vector<std::vector<double>> P;      // [r][tau], NaN on integrator failure
  std::vector<double> max_drift;           // [r], largest norm drift over the taus
  std::vector<std::string> failures;

  std::size_t n_realizations() const { return P.size(); }

  double max_norm_drift() const {
    return max_drift.empty() ? 0.0 : *std::max_element(max_drift.begin(), max_drift.end());
  }
};

inline EnsembleRun run_ensemble(const Instance& inst, const DisorderSpec& spec, std::vector<double> taus,
                                std::size_t n_real, const RunOptions& opt = {}) {
  spec.validate();
  if (n_real < 1)
    throw std::invalid_argument("run_ensemble: n_real must be >= 1");
  for (double t : taus)
    if (!(t > 0.0))
      throw std::invalid_argument("run_ensemble: tau must be positive");

  EnsembleRun run;
  run.spec = spec;
  run.taus = std::move(taus);
  run.ground_match.assign(n_real, false);
  run.impurity_free.assign(n_real, false);
  run.P.assign(n_real, std::vector<double>(run.taus.size(), 0.0));
  run.max_drift.assign(n_real, 0.0);
  std::vector<std::string> errors(n_real);

  // Zero amplitude makes every realization the clean instance.
  const std::size_t distinct = spec.is_clean() ? 1 : n_real;
  std::mutex progress_mutex;
  std::size_t done = 0;
  parallel_for(distinct, opt.threads, [&](std::size_t r) {
    const auto problem = sample_disorder(inst.clean, spec, r);
    const auto H = build_hamiltonian(problem);
    run.ground_match[r] = ground_matches(H.diagonal(), inst.solutions);
    run.impurity_free[r] = impurity_free(H.diagonal(), inst.solutions);
    for (std::size_t t = 0; t < run.taus.size(); ++t) {
      try {
        const auto res = evolve(H, inst.solutions, run.taus[t], opt.evolve);
        run.P[r][t] = res.P;
        run.max_drift[r] = std::max(run.max_drift[r], res.norm_drift);
      } catch (const numerical_error& e) {
        run.P[r][t] = std::numeric_limits<double>::quiet_NaN();
        errors[r] += "realization " + std::to_string(r) + ": " + e.what() + "\n";
      }
    }
    if (opt.progress) {
      std::lock_guard lock(progress_mutex);
      opt.progress(++done, distinct);
    }
  });
  for (std::size_t r = distinct; r < n_real; ++r) {
    run.ground_match[r] = run.ground_match[0];
    run.impurity_free[r] = run.impurity_free[0];
    run.P[r] = run.P[0];
    run.max_drift[r] = run.max_drift[0];
  }
  for (auto& e : errors)
    if (!e.empty())
      run.failures.push_back(std::move(e));
  return run;
}

enum class Selection { all, impurity_free };

inline EnsembleSummary summarize(const EnsembleRun& run, std::size_t tau_index,
                                 Selection sel = Selection::all, bool keep_records = false) {
  EnsembleSummary s;
  std::vector<double> values;
  for (std::size_t r = 0; r < run.n_realizations(); ++r) {
    if (sel == Selection::impurity_free && !run.impurity_free[r])
      continue;
    const double p = run.P[r][tau_index];
    if (std::isnan(p)) {
      ++s.n_failed;
      continue;
    }
    values.push_back(p);
    if (keep_records)
      s.per_realization.push_back({r, p, bool(run.ground_match[r]), bool(run.impurity_free[r])});
  }
  const auto ms = mean_stderr(values);
  s.mean_P = ms.mean;
  s.stderr_P = ms.stderr_;
  s.n_realizations = ms.n;
  return s;
}

/// Realization-weighted mean over several summaries (e.g. one per graph of a
/// family), equal to the mean of the pooled per-realization values.
inline double pooled_mean(const std::vector<EnsembleSummary>& parts) {
  CompensatedSum total;
  std::size_t n = 0;
  for (const auto& s : parts) {
    total.add(s.mean_P * static_cast<double>(s.n_realizations));
    n += s.n_realizations;
  }
  return n ? total.value() / static_cast<double>(n) : 0.0;
}

struct SweepRow {
  double tau = 0.0;
  EnsembleSummary summary;
};

inline std::vector<SweepRow> sweep_from(const EnsembleRun& run, Selection sel) {
  std::vector<SweepRow> rows;
  for (std::size_t t = 0; t < run.taus.size(); ++t)
    rows.push_back({run.taus[t], summarize(run, t, sel)});
  return rows;
}

inline std::vector<SweepRow> anneal_sweep(const Instance& inst, const std::vector<double>& taus,
                                          const DisorderSpec& spec, std::size_t n_real,
                                          const RunOptions& opt = {}) {
  return sweep_from(run_ensemble(inst, spec, taus, n_real, opt), Selection::all);
}

inline std::vector<SweepRow> post_selected_sweep(const Instance& inst, const std::vector<double>& taus,
                                                 const DisorderSpec& spec, std::size_t n_real,
                                                 const RunOptions& opt = {}) {
  return sweep_from(run_ensemble(inst, spec, taus, n_real, opt), Selection::impurity_free);
}

// ---------------------------------------------------------------------------
// ground-state matching

struct GroundMatchCell {
  double w_h = 0.0;
  double w_j = 0.0;
  double p = 0.0;
  std::size_t n_real = 0;
};

inline double ground_match_probability(const Instance& inst, const DisorderSpec& spec, std::size_t n_real,
                                       int threads = 1) {
  if (spec.mode != DisorderMode::generic)
    throw std::invalid_argument("ground_match_scan: generic disorder mode required");
  if (n_real < 1)
    throw std::invalid_argument("ground_match_scan: n_real must be >= 1");
  std::vector<unsigned char> hit(n_real, 0);
  parallel_for(n_real, threads, [&](std::size_t r) {
    const auto problem = sample_generic(inst.clean, spec, r);
    hit[r] = ground_matches(ising_diagonal(problem), inst.solutions);
  });
  const auto matches = std::count(hit.begin(), hit.end(), 1);
  return static_cast<double>(matches) / static_cast<double>(n_real);
}

/// p(W_h, W_J) over the grid, W_h-major. Every cell reuses the same seed, so
/// neighbouring cells share their underlying uniform draws.
inline std::vector<GroundMatchCell> ground_match_scan(const Instance& inst, const std::vector<double>& wh_grid,
                                                      const std::vector<double>& wj_grid, std::size_t n_real,
                                                      std::uint64_t seed, bool per_vertex = false,
                                                      int threads = 1) {
  std::vector<GroundMatchCell> cells;
  for (double wh : wh_grid)
    for (double wj : wj_grid) {
      const DisorderSpec spec{wh, wj, DisorderMode::generic, seed, per_vertex};
      cells.push_back({wh, wj, ground_match_probability(inst, spec, n_real, threads), n_real});
    }
  return cells;
}

// ---------------------------------------------------------------------------
// histograms

struct DensityBin {
  double lo = 0.0;
  double hi = 0.0;
  double rho = 0.0;
};

struct Density {
  DisorderSpec spec;
  std::vector<DensityBin> bins;
  double mean_P = 0.0;
  std::size_t n = 0;
};

/// Normalized histogram (sum rho * width = 1) of P values on [0, 1].
inline std::vector<DensityBin> histogram(std::span<const double> values, int n_bins) {
  if (n_bins < 1)
    throw std::invalid_argument("histogram: n_bins must be >= 1");
  std::vector<std::size_t> counts(n_bins, 0);
  std::size_t n = 0;
  for (double v : values) {
    if (std::isnan(v))
      continue;
    const double c = std::clamp(v, 0.0, 1.0);
    const int b = std::min(n_bins - 1, static_cast<int>(c * n_bins));
    ++counts[b];
    ++n;
  }
  const double width = 1.0 / n_bins;
  std::vector<DensityBin> bins;
  for (int b = 0; b < n_bins; ++b) {
    const double rho = n ? static_cast<double>(counts[b]) / (static_cast<double>(n) * width) : 0.0;
    bins.push_back({b * width, (b + 1) * width, rho});
  }
  return bins;
}

inline std::vector<Density> probability_density(const Instance& inst, double tau,
                                                const std::vector<DisorderSpec>& specs, std::size_t n_real,
                                                int n_bins, const RunOptions& opt = {}) {
  std::vector<Density> out;
  for (const auto& spec : specs) {
    const auto run = run_ensemble(inst, spec, {tau}, n_real, opt);
    std::vector<double> ps;
    for (const auto& row : run.P)
      ps.push_back(row[0]);
    const auto s = summarize(run, 0);
    out.push_back({spec, histogram(ps, n_bins), s.mean_P, s.n_realizations});
  }
  return out;
}

// ---------------------------------------------------------------------------
// amplitude scans and optimal disorder

struct AmplitudeRow {
  double w_h = 0.0;
  EnsembleSummary summary;
};

struct AmplitudeScan {
  double tau = 0.0;
  std::vector<AmplitudeRow> rows;
  double argmax_w = 0.0;
  double max_P = 0.0;
};

namespace detail {

inline void check_grid(const std::vector<double>& grid, const char* what) {
  if (grid.empty())
    throw std::invalid_argument(std::string(what) + ": empty grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw std::invalid_argument(std::string(what) + ": grid must be strictly increasing");
}

// Strict improvement only, scanning ascending W: ties go to the smaller W.
inline std::pair<double, double> argmax(const std::vector<AmplitudeRow>& rows) {
  double best_w = rows.front().w_h, best_p = rows.front().summary.mean_P;
  for (const auto& row : rows)
    if (row.summary.mean_P > best_p) {
      best_p = row.summary.mean_P;
      best_w = row.w_h;
    }
  return {best_w, best_p};
}

} // namespace detail

/// One clamped ensemble per amplitude, all taus evaluated on each realization.
inline std::vector<EnsembleRun> clamped_amplitude_runs(const Instance& inst, const std::vector<double>& taus,
                                                       const std::vector<double>& wh_grid, std::size_t n_real,
                                                       std::uint64_t seed, bool per_vertex,
                                                       const RunOptions& opt) {
  detail::check_grid(wh_grid, "amplitude scan");
  std::vector<EnsembleRun> runs;
  for (double w : wh_grid)
    runs.push_back(run_ensemble(inst, {w, 0.0, DisorderMode::clamped, seed, per_vertex}, taus, n_real, opt));
  return runs;
}

inline AmplitudeScan amplitude_scan_from(const std::vector<EnsembleRun>& runs, std::size_t tau_index) {
  AmplitudeScan scan;
  scan.tau = runs.front().taus[tau_index];
  for (const auto& run : runs)
    scan.rows.push_back({run.spec.w_h, summarize(run, tau_index)});
  std::tie(scan.argmax_w, scan.max_P) = detail::argmax(scan.rows);
  return scan;
}

inline AmplitudeScan amplitude_scan(const Instance& inst, double tau, const std::vector<double>& wh_grid,
                                    std::size_t n_real, std::uint64_t seed, bool per_vertex = false,
                                    const RunOptions& opt = {}) {
  return amplitude_scan_from(clamped_amplitude_runs(inst, {tau}, wh_grid, n_real, seed, per_vertex, opt), 0);
}

struct OptimalRow {
  double tau = 0.0;
  double w_opt = 0.0;
  double p_opt = 0.0;
  double p_clean = 0.0; // P at W_h = 0 when the grid contains it, else NaN
};

inline std::vector<OptimalRow> optimal_from(const std::vector<EnsembleRun>& runs) {
  std::vector<OptimalRow> rows;
  for (std::size_t t = 0; t < runs.front().taus.size(); ++t) {
    const auto scan = amplitude_scan_from(runs, t);
    double p_clean = std::numeric_limits<double>::quiet_NaN();
    for (const auto& row : scan.rows)
      if (row.w_h == 0.0)
        p_clean = row.summary.mean_P;
    rows.push_back({scan.tau, scan.argmax_w, scan.max_P, p_clean});
  }
  return rows;
}

inline std::vector<OptimalRow> optimal_disorder(const Instance& inst, const std::vector<double>& taus,
                                                const std::vector<double>& wh_grid, std::size_t n_real,
                                                std::uint64_t seed, bool per_vertex = false,
                                                const RunOptions& opt = {}) {
  return optimal_from(clamped_amplitude_runs(inst, taus, wh_grid, n_real, seed, per_vertex, opt));
}

// ---------------------------------------------------------------------------
// CSV output; header lines are written verbatim after a "# " prefix.

inline void write_header(std::ostream& os, const std::vector<std::string>& header) {
  for (const auto& line : header)
    os << "# " << line << '\n';
}

inline void write_ground_match_csv(std::ostream& os, const std::vector<GroundMatchCell>& cells,
                                   const std::vector<std::string>& header = {}) {
  write_header(os, header);
  os << "W_h,W_J,p,n_real\n";
  for (const auto& c : cells)
    os << format_double(c.w_h) << ',' << format_double(c.w_j) << ',' << format_double(c.p) << ','
       << c.n_real << '\n';
}

inline void write_sweep_rows(std::ostream& os, const std::vector<SweepRow>& rows, const std::string& mode,
                             double w_h) {
  for (const auto& row : rows)
    os << format_double(row.tau) << ',' << format_double(row.summary.mean_P) << ','
       << format_double(row.summary.stderr_P) << ',' << row.summary.n_realizations << ',' << mode << ','
       << format_double(w_h) << '\n';
}

inline void write_sweep_header(std::ostream& os, const std::vector<std::string>& header = {}) {
  write_header(os, header);
  os << "tau,mean_P,stderr_P,n_real,mode,W_h\n";
}

inline void write_density_csv(std::ostream& os, const std::vector<Density>& densities,
                              const std::vector<std::string>& header = {}) {
  write_header(os, header);
  os << "bin_lo,bin_hi,rho,mode\n";
  for (const auto& d : densities)
    for (const auto& b : d.bins)
      os << format_double(b.lo) << ',' << format_double(b.hi) << ',' << format_double(b.rho) << ','
         << to_string(d.spec.mode) << '\n';
}

inline void write_amplitude_csv(std::ostream& os, const AmplitudeScan& scan,
                                const std::vector<std::string>& header = {}) {
  write_header(os, header);
  os << "W_h,mean_P,stderr_P,n_real\n";
  for (const auto& row : scan.rows)
    os << format_double(row.w_h) << ',' << format_double(row.summary.mean_P) << ','
       << format_double(row.summary.stderr_P) << ',' << row.summary.n_realizations << '\n';
}

inline void write_optimal_csv(std::ostream& os, const std::vector<OptimalRow>& rows,
                              const std::vector<std::string>& header = {}) {
  write_header(os, header);
  os << "tau,W_opt,P_opt\n";
  for (const auto& row : rows)
    os << format_double(row.tau) << ',' << format_double(row.w_opt) << ',' << format_double(row.p_opt) << '\n';
}

} // namespace qac
