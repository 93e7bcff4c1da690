#pragma once

// Config-driven experiment sweeps. Each kind reads its parameters from a
// RunConfig, fills in defaults, and writes a CSV whose header carries the
// fully resolved config and its hash, so re-running from the header
// reproduces the file byte for byte.

#include "qac/config.hpp"
#include "qac/experiments.hpp"
#include "qac/spectrum.hpp"

#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qac {

inline const std::vector<std::string>& sweep_kinds() {
  static const std::vector<std::string> kinds{"ground-match", "tau", "density", "amplitude", "optimal", "spectrum"};
  return kinds;
}

/// Default values per kind; keys present in the user config win.
inline RunConfig sweep_defaults(const std::string& kind) {
  RunConfig d;
  d.set("kind", kind);
  d.set("graph", "Bw");
  d.set("K", "3");
  d.set("per_vertex", "false");
  if (kind != "ground-match" && kind != "spectrum") {
    d.set("dt_max", "0.1");
    d.set("safety", "0.05");
    d.set("min_steps", "16");
  }
  if (kind == "ground-match") {
    d.set("W_h", "linspace(0, 2, 41)");
    d.set("W_J", "linspace(0, 2, 41)");
    d.set("n_real", "10000");
  } else if (kind == "tau") {
    d.set("tau", "logspace(0.1, 100, 13)");
    d.set("W_h", "1");
    d.set("W_J", "0");
    d.set("mode", "clamped");
    d.set("n_real", "2000");
  } else if (kind == "density") {
    d.set("tau", "10");
    d.set("W_h", "1");
    d.set("W_J", "0");
    d.set("modes", "generic, clamped");
    d.set("n_bins", "20");
    d.set("n_real", "2000");
  } else if (kind == "amplitude") {
    d.set("tau", "10");
    d.set("W_h", "linspace(0, 2, 41)");
    d.set("n_real", "2000");
  } else if (kind == "optimal") {
    d.set("tau", "logspace(0.1, 100, 13)");
    d.set("W_h", "linspace(0, 2, 41)");
    d.set("n_real", "2000");
  } else if (kind == "spectrum") {
    d.set("lambda", "linspace(0, 1, 101)");
    d.set("levels", "12");
    d.set("W_h", "0");
    d.set("W_J", "0");
    d.set("mode", "generic");
    d.set("realization", "0");
    d.set("method", "auto");
  } else {
    throw std::invalid_argument("unknown sweep kind '" + kind + "'");
  }
  return d;
}

/// User config layered over the kind defaults. The seed must already be set.
inline RunConfig resolve_sweep_config(const std::string& kind, const RunConfig& user) {
  if (user.has("kind") && user.require("kind") != kind)
    throw std::invalid_argument("config is for sweep kind '" + user.require("kind") + "', not '" + kind + "'");
  if (!user.has("seed"))
    throw std::invalid_argument("config: missing key 'seed'");
  RunConfig cfg = sweep_defaults(kind);
  const auto& known = cfg.values();
  for (const auto& [k, v] : user.values()) {
    if (k != "seed" && !known.count(k))
      throw std::invalid_argument("config: unknown key '" + k + "' for sweep kind '" + kind + "'");
    cfg.set(k, v);
  }
  cfg.unsigned_integer("seed", 0); // validates
  return cfg;
}

struct SweepContext {
  int threads = 1;
  std::function<void(std::size_t, std::size_t)> progress;
};

namespace detail {

inline std::size_t positive_count(const RunConfig& cfg, const std::string& key) {
  const long v = cfg.integer(key, 0);
  if (v < 1)
    throw std::invalid_argument("config: '" + key + "' must be >= 1");
  return static_cast<std::size_t>(v);
}

inline RunOptions run_options(const RunConfig& cfg, const SweepContext& ctx) {
  RunOptions opt;
  opt.evolve.dt_max = cfg.number("dt_max", 0.1);
  opt.evolve.safety = cfg.number("safety", 0.05);
  opt.evolve.min_steps = static_cast<int>(cfg.integer("min_steps", 16));
  if (opt.evolve.min_steps < 1)
    throw std::invalid_argument("config: 'min_steps' must be >= 1");
  if (!(opt.evolve.dt_max > 0) || !(opt.evolve.safety > 0))
    throw std::invalid_argument("config: dt_max and safety must be positive");
  opt.threads = ctx.threads;
  opt.progress = ctx.progress;
  return opt;
}

inline EigenMethod parse_method(const std::string& s) {
  if (s == "auto")
    return EigenMethod::automatic;
  if (s == "dense")
    return EigenMethod::dense;
  if (s == "lanczos")
    return EigenMethod::lanczos;
  throw std::invalid_argument("config: method must be auto|dense|lanczos");
}

} // namespace detail

/// Runs one sweep; `cfg` must come from resolve_sweep_config.
inline void run_sweep(const RunConfig& cfg, std::ostream& os, const SweepContext& ctx = {}) {
  const std::string kind = cfg.require("kind");
  const Instance inst = Instance::make(parse_graph6(cfg.require("graph")), static_cast<int>(cfg.integer("K", 3)));
  const std::uint64_t seed = cfg.unsigned_integer("seed", 0);
  const bool per_vertex = cfg.flag("per_vertex", false);
  const RunOptions opt = detail::run_options(cfg, ctx);
  auto header = cfg.header_lines("qacolor sweep " + kind);

  if (kind == "ground-match") {
    const auto cells = ground_match_scan(inst, cfg.list("W_h", ""), cfg.list("W_J", ""),
                                         detail::positive_count(cfg, "n_real"), seed, per_vertex, ctx.threads);
    write_ground_match_csv(os, cells, header);
  } else if (kind == "tau") {
    const auto taus = cfg.list("tau", "");
    const std::size_t n_real = detail::positive_count(cfg, "n_real");
    const DisorderSpec spec{cfg.number("W_h", 0), cfg.number("W_J", 0), parse_disorder_mode(cfg.require("mode")),
                            seed, per_vertex};
    DisorderSpec clean = spec;
    clean.w_h = clean.w_j = 0.0;
    const auto clean_run = run_ensemble(inst, clean, taus, 1, opt);
    const auto run = run_ensemble(inst, spec, taus, n_real, opt);
    std::size_t qualifying = 0;
    for (bool f : run.impurity_free)
      qualifying += f;
    header.push_back(kImpurityFreeDefinition);
    header.push_back("impurity_free realizations: " + std::to_string(qualifying) + " of " +
                     std::to_string(n_real));
    for (const auto& f : run.failures)
      header.push_back("excluded " + f.substr(0, f.size() - 1));
    write_sweep_header(os, header);
    write_sweep_rows(os, sweep_from(clean_run, Selection::all), "clean", 0.0);
    write_sweep_rows(os, sweep_from(run, Selection::all), to_string(spec.mode), spec.w_h);
    write_sweep_rows(os, sweep_from(run, Selection::impurity_free), to_string(spec.mode) + "/impurity_free",
                     spec.w_h);
  } else if (kind == "density") {
    std::vector<DisorderSpec> specs;
    std::string modes = cfg.require("modes");
    for (std::size_t pos = 0; pos <= modes.size();) {
      auto comma = modes.find(',', pos);
      if (comma == std::string::npos)
        comma = modes.size();
      const auto m = qac::detail::trim(std::string_view(modes).substr(pos, comma - pos));
      if (!m.empty())
        specs.push_back({cfg.number("W_h", 0), cfg.number("W_J", 0), parse_disorder_mode(m), seed, per_vertex});
      pos = comma + 1;
    }
    const auto d = probability_density(inst, cfg.number("tau", 10), specs, detail::positive_count(cfg, "n_real"),
                                       static_cast<int>(detail::positive_count(cfg, "n_bins")), opt);
    for (const auto& x : d)
      header.push_back("mean_P[" + to_string(x.spec.mode) + "] = " + format_double(x.mean_P) + " over " +
                       std::to_string(x.n));
    write_density_csv(os, d, header);
  } else if (kind == "amplitude") {
    const auto scan = amplitude_scan(inst, cfg.number("tau", 10), cfg.list("W_h", ""),
                                     detail::positive_count(cfg, "n_real"), seed, per_vertex, opt);
    header.push_back("argmax W_h = " + format_double(scan.argmax_w) + ", max mean_P = " + format_double(scan.max_P));
    write_amplitude_csv(os, scan, header);
  } else if (kind == "optimal") {
    const auto rows = optimal_disorder(inst, cfg.list("tau", ""), cfg.list("W_h", ""),
                                       detail::positive_count(cfg, "n_real"), seed, per_vertex, opt);
    write_optimal_csv(os, rows, header);
  } else if (kind == "spectrum") {
    const DisorderSpec spec{cfg.number("W_h", 0), cfg.number("W_J", 0), parse_disorder_mode(cfg.require("mode")),
                            seed, per_vertex};
    spec.validate();
    const auto problem = sample_disorder(inst.clean, spec, cfg.unsigned_integer("realization", 0));
    const auto track = spectrum_scan(problem, inst.solutions, cfg.list("lambda", ""),
                                     static_cast<int>(detail::positive_count(cfg, "levels")),
                                     detail::parse_method(cfg.require("method")), ctx.threads);
    try {
      const auto gap = effective_gap(track);
      header.push_back("min effective gap = " + format_double(gap.min_gap) + " at lambda = " +
                       format_double(gap.lambda_at_min));
    } catch (const gap_window_exceeded& e) {
      header.push_back(e.what());
    }
    header.push_back("ambiguous branch matches: " + std::to_string(track.ambiguities.size()));
    write_header(os, header);
    write_spectrum_csv(os, track);
  } else {
    throw std::invalid_argument("unknown sweep kind '" + kind + "'");
  }
}

} // namespace qac
