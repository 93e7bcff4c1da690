// Acceptance suite: one PASS/FAIL line per criterion, measured values alongside.
// Exit status is nonzero when any criterion fails.

#include "qac/qac.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

using namespace qac;

namespace {

constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;
std::vector<int> selected; // empty: every criterion

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
  if (!selected.empty() && std::find(selected.begin(), selected.end(), id) == selected.end())
    return;
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass)
    ++failures;
  std::printf("criterion %2d %s: %s | %s (%.1f s)\n", id, o.pass ? "PASS" : "FAIL", name.c_str(),
              o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(double x, int prec = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, x);
  return buf;
}

void progress(const char* what, std::size_t done, std::size_t total) {
  if (done % 100 == 0 || done == total)
    std::fprintf(stderr, "  %s: %zu/%zu\n", what, done, total);
}

const Instance& triangle() {
  static const Instance inst = Instance::make(make_complete(3), 3);
  return inst;
}

int threads() { return default_thread_count(); }

// Shared between criteria 6, 7 and 9.
const std::vector<double> kCrossoverTaus = {0.1, 0.31622776601683794, 1, 3.1622776601683795, 10,
                                            31.622776601683793, 50, 100};
constexpr std::size_t kCrossoverReal = 2000;

struct Crossover {
  EnsembleRun clean;
  EnsembleRun disordered;
};

const Crossover& crossover() {
  static const Crossover c = [] {
    RunOptions opt;
    opt.threads = threads();
    Crossover out;
    out.clean = run_ensemble(triangle(), {0, 0, DisorderMode::clamped, kSeed}, kCrossoverTaus, 1, opt);
    opt.progress = [](std::size_t d, std::size_t t) { progress("clamped W_h=1 ensemble", d, t); };
    out.disordered =
        run_ensemble(triangle(), {1.0, 0, DisorderMode::clamped, kSeed}, kCrossoverTaus, kCrossoverReal, opt);
    return out;
  }();
  return c;
}

double max_drift_seen = 0.0;

Outcome encoding_equivalence() {
  std::size_t instances = 0, states = 0;
  double worst = 0.0;
  for (int n = 1; n <= 4; ++n)
    for (const auto& g : enumerate_non_isomorphic(n, true))
      for (int K = 1; K <= 4 && K * n <= 16; ++K) {
        const auto q = build_qubo(g, K);
        const auto p = build_ising(g, K);
        const BasisIndex dim = BasisIndex{1} << (K * n);
        for (BasisIndex k = 0; k < dim; ++k)
          worst = std::max(worst, std::abs(qubo_energy_at(q, k) - ising_energy_at(p, k)));
        ++instances;
        states += dim;
      }
  return {worst <= 1e-9, std::to_string(instances) + " (graph, K) instances, " + std::to_string(states) +
                             " bitstrings, max |E_qubo - E_ising| = " + fmt(worst)};
}

Outcome solution_counts() {
  auto scan = [](const Graph& g, int K) {
    const auto q = build_qubo(g, K);
    const BasisIndex dim = BasisIndex{1} << (K * g.n_vertices());
    std::size_t zeros = 0;
    double min_e = qubo_energy_at(q, 0);
    for (BasisIndex k = 0; k < dim; ++k) {
      const double e = qubo_energy_at(q, k);
      zeros += e == 0.0;
      min_e = std::min(min_e, e);
    }
    return std::pair{zeros, min_e};
  };
  const auto [tri3, tri3_min] = scan(make_complete(3), 3);
  const auto [c5, c5_min] = scan(make_cycle(5), 3);
  const auto [tri2, tri2_min] = scan(make_complete(3), 2);
  const bool ok = tri3 == 6 && c5 == 30 && tri2 == 0 && tri2_min >= 1.0 && tri3_min == 0.0 && c5_min == 0.0;
  return {ok, "triangle K=3: " + std::to_string(tri3) + ", C5 K=3: " + std::to_string(c5) +
                  ", triangle K=2: " + std::to_string(tri2) + " (min energy " + fmt(tri2_min) + ")"};
}

Outcome ground_match_point() {
  const std::size_t n = 10000;
  const double p = ground_match_probability(triangle(), {0.5, 0.5, DisorderMode::generic, kSeed}, n, threads());
  return {p >= 0.97 && p <= 1.0, "p(0.5, 0.5) = " + fmt(p) + " over " + std::to_string(n) + " realizations"};
}

Outcome sudden_quench() {
  const auto H = build_hamiltonian(triangle().clean);
  EvolveOptions opt;
  opt.min_steps = 1;
  const auto r = evolve(H, triangle().solutions, 1e-9, opt); // tau -> 0+: one step
  if (r.steps != 1)
    return {false, "expected one step, took " + std::to_string(r.steps)};
  const double expected = 6.0 / 512.0;
  return {std::abs(r.P - expected) < 1e-6,
          "single-step P = " + fmt(r.P, 12) + ", |S|/2^n = " + fmt(expected, 12)};
}

Outcome adiabatic_limit() {
  const auto H = build_hamiltonian(triangle().clean);
  const std::vector<double> taus = {1, 5, 20, 50};
  std::vector<double> P;
  for (double tau : taus) {
    const auto r = evolve(H, triangle().solutions, tau);
    max_drift_seen = std::max(max_drift_seen, r.norm_drift);
    P.push_back(r.P);
  }
  bool monotone = true;
  for (std::size_t i = 1; i < P.size(); ++i)
    monotone = monotone && P[i] >= P[i - 1] - 0.02;
  std::string detail;
  for (std::size_t i = 0; i < P.size(); ++i)
    detail += "P(" + fmt(taus[i]) + ") = " + fmt(P[i]) + (i + 1 < P.size() ? ", " : "");
  detail += std::string("; P(50) > 0.95: ") + (P.back() > 0.95 ? "yes" : "no") +
            ", non-decreasing within 0.02: " + (monotone ? "yes" : "no");
  return {P.back() > 0.95 && monotone, detail};
}

Outcome disorder_crossover() {
  const auto& c = crossover();
  max_drift_seen = std::max({max_drift_seen, c.clean.max_norm_drift(), c.disordered.max_norm_drift()});
  bool assisted = false;
  std::string detail;
  double clean50 = 0, mean50 = 0;
  for (std::size_t t = 0; t < kCrossoverTaus.size(); ++t) {
    const double clean = c.clean.P[0][t];
    const auto s = summarize(c.disordered, t);
    const double z = (s.mean_P - clean) / s.stderr_P;
    assisted = assisted || (t != 6 && s.mean_P - clean > 3 * s.stderr_P);
    if (t == 6) {
      clean50 = clean;
      mean50 = s.mean_P;
    }
    detail += "tau " + fmt(kCrossoverTaus[t], 4) + ": clean " + fmt(clean, 4) + " vs " + fmt(s.mean_P, 4) + "+-" +
              fmt(s.stderr_P, 2) + " (z " + fmt(z, 3) + "); ";
  }
  detail += "n_real " + std::to_string(c.disordered.n_realizations()) + ", failed anneals " +
            std::to_string(c.disordered.failures.size());
  return {assisted && clean50 > mean50 && c.disordered.failures.empty(), detail};
}

Outcome post_selection() {
  const auto& c = crossover();
  bool ok = true;
  std::string detail;
  std::size_t qualifying = 0;
  for (bool f : c.disordered.impurity_free)
    qualifying += f;
  for (std::size_t t = 0; t < kCrossoverTaus.size(); ++t) {
    const auto all = summarize(c.disordered, t, Selection::all);
    const auto pure = summarize(c.disordered, t, Selection::impurity_free);
    const bool here = pure.n_realizations > 0 && pure.mean_P >= all.mean_P;
    ok = ok && here;
    detail += "tau " + fmt(kCrossoverTaus[t], 4) + ": " + fmt(pure.mean_P, 4) + (here ? " >= " : " < ") +
              fmt(all.mean_P, 4) + "; ";
  }
  detail += "impurity-free " + std::to_string(qualifying) + " of " + std::to_string(c.disordered.n_realizations());
  return {ok, detail};
}

Outcome optimal_trend() {
  const std::vector<double> taus = {1, 3.1622776601683795, 10, 31.622776601683793, 100};
  const std::vector<double> grid = {0, 0.25, 0.5, 0.75, 1, 1.25, 1.5, 1.75, 2};
  const std::size_t n_real = 100;
  RunOptions opt;
  opt.threads = threads();
  std::vector<EnsembleRun> runs;
  for (double w : grid) {
    std::fprintf(stderr, "  optimal-disorder scan: W_h = %g\n", w);
    runs.push_back(run_ensemble(triangle(), {w, 0, DisorderMode::clamped, kSeed}, taus, n_real, opt));
    max_drift_seen = std::max(max_drift_seen, runs.back().max_norm_drift());
  }
  const auto rows = optimal_from(runs);
  bool dominates = true;
  std::string detail;
  for (const auto& r : rows) {
    dominates = dominates && r.p_opt >= r.p_clean;
    detail += "tau " + fmt(r.tau, 4) + ": W_opt " + fmt(r.w_opt) + ", P_opt " + fmt(r.p_opt, 4) + ", P_clean " +
              fmt(r.p_clean, 4) + "; ";
  }
  const bool lowest = rows.back().w_opt < grid[1];
  detail += "W grid step 0.25, n_real " + std::to_string(n_real);
  return {lowest && dominates, detail};
}

Outcome numerics() {
  const auto& tri = triangle();
  const auto H = build_hamiltonian(tri.clean);

  // Step halving on the tau = 10 benchmark.
  const auto conv = evolve_converged(H, tri.solutions, 10.0, 1e-6, {}, 1);
  const double halving = conv.p_change;
  max_drift_seen = std::max(max_drift_seen, conv.result.norm_drift);

  // Dense vs Lanczos on 9-spin instances: clean and two clamped realizations.
  double eig_diff = 0.0;
  std::vector<AnnealingHamiltonian> hs = {H};
  for (std::uint64_t r : {0, 1})
    hs.push_back(build_hamiltonian(sample_disorder(tri.clean, {1.0, 0, DisorderMode::clamped, kSeed}, r)));
  for (const auto& h : hs)
    for (double lambda : {0.0, 0.25, 0.5, 0.75, 0.9, 0.99}) {
      const auto d = dense_low_spectrum(h, lambda, 12);
      const auto l = lanczos_low_spectrum(h, lambda, 12);
      for (int i = 0; i < 12; ++i)
        eig_diff = std::max(eig_diff, std::abs(d.values[i] - l.values[i]));
    }

  // lambda = 1: the full spectrum is the sorted diagonal, bit for bit.
  bool exact = true;
  for (const auto& h : hs) {
    std::vector<double> diag(h.diagonal().begin(), h.diagonal().end());
    std::sort(diag.begin(), diag.end());
    const auto s = low_spectrum(h, 1.0, static_cast<int>(h.dim()));
    exact = exact && s.values == diag;
  }

  const bool ok = max_drift_seen < 1e-6 && halving < 1e-6 && eig_diff < 1e-8 && exact;
  return {ok, "max norm drift " + fmt(max_drift_seen, 3) + ", step-halving |dP| at tau 10 = " + fmt(halving, 3) +
                  ", max |dense - Lanczos| = " + fmt(eig_diff, 3) + ", lambda=1 spectrum == sorted diagonal: " +
                  (exact ? "yes" : "no")};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(QACOLOR_BIN) + " " + args + " 2>/dev/null").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism() {
  const std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> sweeps = {
      {"ground-match", {{"W_h", "linspace(0, 2, 5)"}, {"W_J", "linspace(0, 2, 5)"}, {"n_real", "500"}}},
      {"tau", {{"tau", "logspace(0.1, 10, 4)"}, {"n_real", "12"}}},
      {"density", {{"tau", "2"}, {"n_real", "12"}, {"n_bins", "5"}}},
      {"amplitude", {{"tau", "2"}, {"W_h", "linspace(0, 2, 3)"}, {"n_real", "6"}}},
      {"optimal", {{"tau", "1, 3"}, {"W_h", "linspace(0, 2, 3)"}, {"n_real", "6"}}},
      {"spectrum", {{"lambda", "linspace(0, 1, 11)"}, {"W_h", "1"}, {"mode", "clamped"}, {"realization", "3"}}},
  };
  const auto dir = std::filesystem::temp_directory_path() / ("qac_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  std::size_t checked = 0;
  std::string mismatches;
  for (const auto& [kind, overrides] : sweeps) {
    RunConfig user;
    user.set("seed", std::to_string(kSeed));
    for (const auto& [k, v] : overrides)
      user.set(k, v);
    const auto cfg = resolve_sweep_config(kind, user);

    std::ostringstream one, many;
    run_sweep(cfg, one, {1, {}});
    run_sweep(cfg, many, {4, {}});
    ++checked;
    if (one.str() != many.str())
      mismatches += " " + kind + "(library, threads 1 vs 4)";

    // Through the executable: first run from --set values, rerun from the output file itself.
    std::string sets;
    for (const auto& [k, v] : overrides)
      sets += " --set '" + k + "=" + v + "'";
    const auto first = dir / (kind + ".csv"), rerun = dir / (kind + ".rerun.csv");
    const int c1 = run_cli("sweep " + kind + sets + " --seed " + std::to_string(kSeed) + " -j 1 -o " + first.string());
    const int c2 = run_cli("sweep " + kind + " -c " + first.string() + " -j 4 -o " + rerun.string());
    ++checked;
    if (c1 != 0 || c2 != 0 || slurp(first) != slurp(rerun) || slurp(first) != one.str())
      mismatches += " " + kind + "(cli rerun)";
  }
  std::filesystem::remove_all(dir);
  return {mismatches.empty(), std::to_string(checked) + " comparisons over " + std::to_string(sweeps.size()) +
                                  " sweep kinds" + (mismatches.empty() ? ", all byte-identical" : "; differ:" + mismatches)};
}

} // namespace

// Optional arguments restrict the run to the listed criterion numbers.
int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i)
    selected.push_back(std::atoi(argv[i]));
  std::printf("acceptance suite, seed %llu, %d worker thread(s)\n", static_cast<unsigned long long>(kSeed),
              threads());
  report(1, "QUBO/Ising encoding equivalence", encoding_equivalence);
  report(2, "solution-manifold counts", solution_counts);
  report(3, "ground-match point W_h = W_J = 0.5", ground_match_point);
  report(4, "sudden-quench limit", sudden_quench);
  report(5, "adiabatic limit", adiabatic_limit);
  report(6, "disorder-assistance crossover", disorder_crossover);
  report(7, "post-selection dominance", post_selection);
  report(8, "optimal-disorder trend", optimal_trend);
  report(9, "numerics invariants", numerics);
  report(10, "determinism", determinism);
  std::printf("%d of %zu criteria failed\n", failures, selected.empty() ? std::size_t{10} : selected.size());
  return failures == 0 ? 0 : 1;
}
