#include "oracles.hpp"

#include "qac/dynamics.hpp"

#include <gtest/gtest.h>

using namespace qac;

namespace {

struct Triangle {
  IsingProblem p = build_ising(make_complete(3), 3);
  AnnealingHamiltonian H = build_hamiltonian(p);
  SolutionSet S = solution_set(make_complete(3), 3);
};

const Triangle& tri() {
  static const Triangle t;
  return t;
}

} // namespace

TEST(SuccessProbability, BasisStatesAndUniform) {
  const auto& t = tri();
  EXPECT_EQ(success_probability(StateVector::basis(512, t.S.indices[2]), t.S), 1.0);
  EXPECT_EQ(success_probability(StateVector::basis(512, 0), t.S), 0.0);
  EXPECT_NEAR(success_probability(initial_state(9), t.S), 6.0 / 512, 1e-15);
  EXPECT_THROW(success_probability(StateVector(64), t.S), std::invalid_argument);
}

TEST(Evolve, SuddenQuench) {
  const auto& t = tri();
  EvolveOptions opt;
  opt.min_steps = 1;
  const auto r = evolve(t.H, t.S, 1e-9, opt);
  EXPECT_EQ(r.steps, 1);
  EXPECT_NEAR(r.P, 6.0 / 512, 1e-6);
}

TEST(Evolve, FrozenProblemHamiltonianOnlyRotatesPhases) {
  const auto& t = tri();
  StateVector psi = initial_state(9);
  // Put some structure into the magnitudes first.
  propagate(t.H, psi, 3.0, 2000, [](double) { return 0.5; });
  const StateVector before = psi;
  propagate(t.H, psi, 10.0, 20000, [](double) { return 1.0; });
  for (std::size_t k = 0; k < psi.size(); ++k)
    ASSERT_NEAR(std::norm(psi[k]), std::norm(before[k]), 1e-10);
}

TEST(Evolve, StepRule) {
  const auto& t = tri();
  EvolveOptions opt;
  // ||H||_bound = 2 * 9 + 21 = 39, so the safety bound dominates.
  EXPECT_EQ(t.H.norm_bound(), 39.0);
  EXPECT_EQ(step_count(t.H, 10.0, opt), static_cast<long>(std::ceil(10.0 / (0.05 / 39.0) - 1e-9)));
  opt.safety = 100.0;
  EXPECT_EQ(step_count(t.H, 10.0, opt), 100); // dt_max = 0.1
  EXPECT_EQ(step_count(t.H, 0.5, opt), 16);   // tau / N_min
}

TEST(Evolve, MatchesExponentialPropagatorOracle) {
  // Two spins, generic disorder: compare against a piecewise-exact propagator.
  const IsingProblem p = sample_generic(build_ising(Graph(1), 2), {0.7, 0.4, DisorderMode::generic, 5, false}, 0);
  const auto H = build_hamiltonian(p);
  SolutionSet S;
  S.indices = {1, 2};
  EvolveOptions opt;
  opt.keep_state = true;
  const auto r = evolve(H, S, 4.0, opt);
  const std::vector<double> d(H.diagonal().begin(), H.diagonal().end());
  const auto ref = oracle::exponential_midpoint(2, d, 4.0, 8000);
  for (int k = 0; k < 4; ++k)
    EXPECT_NEAR(std::abs((*r.final_state)[k] - ref[k]), 0.0, 1e-6) << k;
}

TEST(Evolve, NormDriftAndStepHalving) {
  const auto& t = tri();
  const auto r = evolve(t.H, t.S, 10.0);
  EXPECT_LT(r.norm_drift, 1e-6);
  EXPECT_FALSE(r.flagged);
  const auto c = evolve_converged(t.H, t.S, 10.0, 1e-6);
  EXPECT_TRUE(c.converged);
  EXPECT_LT(c.p_change, 1e-6);
  EXPECT_NEAR(c.result.P, r.P, 1e-6);
}

TEST(Evolve, EnergySandwich) {
  const auto& t = tri();
  EvolveOptions opt;
  opt.keep_state = true;
  for (double tau : {0.5, 5.0, 20.0}) {
    const auto r = evolve(t.H, t.S, tau, opt);
    const double e = problem_energy(t.H, *r.final_state);
    EXPECT_GE(e, 0.0);
    // Every non-solution state costs at least 1, so <H_f> >= 1 - P.
    EXPECT_GE(e, (1.0 - r.P) - 1e-9);
    EXPECT_GE(r.P, 0.0);
    EXPECT_LE(r.P, 1.0);
  }
}

TEST(Evolve, SlowAnnealBeatsFastAnneal) {
  const auto& t = tri();
  double prev = 0.0;
  for (double tau : {1.0, 5.0, 20.0}) {
    const double P = evolve(t.H, t.S, tau).P;
    EXPECT_GE(P, prev - 0.02) << tau;
    prev = P;
  }
}

TEST(Evolve, Errors) {
  const auto& t = tri();
  EXPECT_THROW(evolve(t.H, t.S, 0.0), std::invalid_argument);
  EXPECT_THROW(evolve(t.H, t.S, -1.0), std::invalid_argument);
  EXPECT_THROW(evolve(t.H, t.S, std::nan("")), std::invalid_argument);

  EvolveOptions coarse;
  coarse.safety = 1e3;
  coarse.dt_max = 5.0;
  coarse.min_steps = 1;
  try {
    evolve(t.H, t.S, 10.0, coarse);
    FAIL() << "expected integrator failure";
  } catch (const numerical_error& e) {
    EXPECT_NE(std::string(e.what()).find("dt ="), std::string::npos);
  }
}

TEST(Evolve, Deterministic) {
  const auto& t = tri();
  EXPECT_EQ(evolve(t.H, t.S, 3.0).P, evolve(t.H, t.S, 3.0).P);
}

TEST(AnnealRecord, JsonSchema) {
  const auto& t = tri();
  const auto r = evolve(t.H, t.S, 1.0);
  const DisorderSpec spec{0.5, 0, DisorderMode::clamped, 3, false};
  const auto j = anneal_record(r, {spec, 4, "Bw", 3});
  for (const char* key : {"tau", "P", "norm_drift", "steps", "spec", "realization", "graph_id", "K"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["realization"], 4);
  EXPECT_EQ(j["spec"].get<DisorderSpec>(), spec);
  EXPECT_EQ(j["P"].get<double>(), r.P);
}
