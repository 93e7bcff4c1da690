#pragma once

// Time evolution i d/dt psi = H(t/tau) psi from the driver ground state with
// fixed-step classical RK4, and the success probability on the clean
// solution manifold.
//
// The state is never renormalized; |1 - ||psi||| at the end is reported as the
// norm drift and doubles as a step-adequacy diagnostic.

#include "qac/disorder.hpp"
#include "qac/encoding.hpp"
#include "qac/errors.hpp"
#include "qac/hamiltonian.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qac {

struct EvolveOptions {
  double dt_max = 0.1;
  int min_steps = 16;          // N_min: at least this many steps per anneal
  double safety = 0.05;        // dt <= safety / ||H||_bound
  double drift_tol = 1e-6;     // results above this are flagged
  double max_norm_drift = 1e-4;// above this the run is an integrator failure
  bool keep_state = false;
};

struct AnnealResult {
  double tau = 0.0;
  double P = 0.0;
  double norm_drift = 0.0;
  double dt = 0.0;
  long steps = 0;
  bool flagged = false;
  std::optional<StateVector> final_state;
};

inline double success_probability(const StateVector& psi, const SolutionSet& S) {
  double p = 0.0;
  for (BasisIndex k : S.indices) {
    if (k >= psi.size())
      throw std::invalid_argument("success_probability: solution index outside the state space");
    p += std::norm(psi[k]);
  }
  return p;
}

/// <psi| H_problem |psi>.
inline double problem_energy(const AnnealingHamiltonian& H, const StateVector& psi) {
  double e = 0.0;
  for (std::size_t k = 0; k < psi.size(); ++k)
    e += H.diagonal()[k] * std::norm(psi[k]);
  return e;
}

/// Step count for an anneal of length tau: dt = min(dt_max, tau/N_min,
/// safety/||H||_bound), rounded so the steps tile [0, tau] exactly.
inline long step_count(const AnnealingHamiltonian& H, double tau, const EvolveOptions& opt) {
  const double dt = std::min({opt.dt_max, tau / std::max(opt.min_steps, 1), opt.safety / H.norm_bound()});
  return std::max<long>(1, static_cast<long>(std::ceil(tau / dt - 1e-9)));
}

/// RK4 from t = 0 to t = `duration` in `steps` equal steps, with mixing
/// weight lambda_of(t). psi is advanced in place.
template <class MixingFn>
void propagate(const AnnealingHamiltonian& H, StateVector& psi, double duration, long steps,
               MixingFn&& lambda_of) {
  if (psi.size() != H.dim())
    throw std::invalid_argument("propagate: state dimension mismatch");
  const std::size_t n = 2 * H.dim();
  std::vector<double> tmp(n), hx(n), acc(n);
  double* x = psi.raw().data();
  const double dt = duration / static_cast<double>(steps);

  double* __restrict tmp_p = tmp.data();
  double* __restrict hx_p = hx.data();
  double* __restrict acc_p = acc.data();

  // f = -i H y  =>  f_re = (Hy)_im, f_im = -(Hy)_re
  auto stage = [&](double t, const double* y, double w_acc, double w_next, bool write_next) {
    H.apply_lanes<2>(std::clamp(lambda_of(t), 0.0, 1.0), y, hx_p);
    if (write_next) {
      for (std::size_t j = 0; j < n; j += 2) {
        const double f_re = hx_p[j + 1];
        const double f_im = -hx_p[j];
        acc_p[j] += w_acc * f_re;
        acc_p[j + 1] += w_acc * f_im;
        tmp_p[j] = x[j] + w_next * f_re;
        tmp_p[j + 1] = x[j + 1] + w_next * f_im;
      }
    } else {
      for (std::size_t j = 0; j < n; j += 2) {
        acc_p[j] += w_acc * hx_p[j + 1];
        acc_p[j + 1] -= w_acc * hx_p[j];
      }
    }
  };

  for (long s = 0; s < steps; ++s) {
    const double t = static_cast<double>(s) * dt;
    std::copy(x, x + n, acc.begin());
    stage(t, x, dt / 6.0, dt / 2.0, true);
    stage(t + 0.5 * dt, tmp_p, dt / 3.0, dt / 2.0, true);
    stage(t + 0.5 * dt, tmp_p, dt / 3.0, dt, true);
    stage(t + dt, tmp_p, dt / 6.0, 0.0, false);
    std::copy(acc.begin(), acc.end(), x);
  }
}

namespace detail {

inline AnnealResult evolve_with_steps(const AnnealingHamiltonian& H, const SolutionSet& S, double tau,
                                      long steps, const EvolveOptions& opt) {
  StateVector psi = initial_state(H.n_spins());
  const Schedule sched{tau};
  propagate(H, psi, tau, steps, [&](double t) { return sched.mixing(t); });

  AnnealResult r;
  r.tau = tau;
  r.steps = steps;
  r.dt = tau / static_cast<double>(steps);
  r.norm_drift = std::abs(psi.norm() - 1.0);
  if (r.norm_drift > opt.max_norm_drift) {
    std::ostringstream msg;
    msg << "integrator failure: norm drift " << r.norm_drift << " with dt = " << r.dt
        << " at tau = " << tau;
    throw numerical_error(msg.str());
  }
  r.flagged = r.norm_drift > opt.drift_tol;
  r.P = success_probability(psi, S);
  if (opt.keep_state)
    r.final_state = std::move(psi);
  return r;
}

} // namespace detail

inline AnnealResult evolve(const AnnealingHamiltonian& H, const SolutionSet& S, double tau,
                           const EvolveOptions& opt = {}) {
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw std::invalid_argument("evolve: tau must be positive");
  return detail::evolve_with_steps(H, S, tau, step_count(H, tau, opt), opt);
}

struct ConvergedAnneal {
  AnnealResult result; // the finest run
  double p_change = 0.0;
  int halvings = 0;
  bool converged = false;
};

/// Re-runs with dt/2 until P moves by less than `tol` (at most max_halvings).
inline ConvergedAnneal evolve_converged(const AnnealingHamiltonian& H, const SolutionSet& S, double tau,
                                        double tol = 1e-6, const EvolveOptions& opt = {},
                                        int max_halvings = 4) {
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw std::invalid_argument("evolve: tau must be positive");
  ConvergedAnneal out;
  long steps = step_count(H, tau, opt);
  AnnealResult coarse = detail::evolve_with_steps(H, S, tau, steps, opt);
  for (out.halvings = 1; out.halvings <= max_halvings; ++out.halvings) {
    steps *= 2;
    AnnealResult fine = detail::evolve_with_steps(H, S, tau, steps, opt);
    out.p_change = std::abs(fine.P - coarse.P);
    out.result = std::move(fine);
    if (out.p_change < tol) {
      out.converged = true;
      break;
    }
    coarse = out.result;
  }
  return out;
}

struct AnnealRecordContext {
  DisorderSpec spec;
  std::uint64_t realization = 0;
  std::string graph_id;
  int K = 0;
};

inline nlohmann::json anneal_record(const AnnealResult& r, const AnnealRecordContext& ctx) {
  return nlohmann::json{{"tau", r.tau},
                        {"P", r.P},
                        {"norm_drift", r.norm_drift},
                        {"steps", r.steps},
                        {"spec", ctx.spec},
                        {"realization", ctx.realization},
                        {"graph_id", ctx.graph_id},
                        {"K", ctx.K}};
}

} // namespace qac
