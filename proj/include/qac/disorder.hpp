#pragma once

// Static disorder on Ising instances.
//
// generic: every field and every stored coupling gets an independent flat
//          perturbation, dh ~ U[-W_h, W_h], dJ ~ U[-W_J, W_J].
// clamped: couplings untouched; fields h + dh are kept when below the largest
//          clean field and clamped to it otherwise.
//
// Draw order is fixed: fields by spin index (or one draw per vertex with
// per_vertex), then couplings in (q, r) order.

#include "qac/encoding.hpp"
#include "qac/rng.hpp"

#include <json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qac {

enum class DisorderMode { generic, clamped };

inline std::string to_string(DisorderMode m) { return m == DisorderMode::generic ? "generic" : "clamped"; }

inline DisorderMode parse_disorder_mode(const std::string& s) {
  if (s == "generic")
    return DisorderMode::generic;
  if (s == "clamped")
    return DisorderMode::clamped;
  throw std::invalid_argument("unknown disorder mode '" + s + "' (expected generic|clamped)");
}

struct DisorderSpec {
  double w_h = 0.0;
  double w_j = 0.0;
  DisorderMode mode = DisorderMode::generic;
  std::uint64_t seed = 0;
  bool per_vertex = false; // one dh per vertex, shared by its K spins

  void validate() const {
    if (!(w_h >= 0.0) || !(w_j >= 0.0))
      throw std::invalid_argument("DisorderSpec: amplitudes must be >= 0");
    if (mode == DisorderMode::clamped && w_j != 0.0)
      throw std::invalid_argument("DisorderSpec: clamped mode requires W_J = 0");
  }

  bool is_clean() const noexcept { return w_h == 0.0 && w_j == 0.0; }

  friend bool operator==(const DisorderSpec&, const DisorderSpec&) = default;
};

namespace detail {

inline void draw_fields(const IsingProblem& p, const DisorderSpec& spec, Substream& rng,
                        std::vector<double>& delta) {
  delta.assign(p.n_spins, 0.0);
  if (spec.per_vertex) {
    const int K = p.meta.K;
    if (K <= 0 || K * p.meta.n_vertices != p.n_spins)
      throw std::invalid_argument("per-vertex disorder needs problem meta (N, K)");
    for (int i = 0; i < p.meta.n_vertices; ++i) {
      const double d = rng.symmetric(spec.w_h);
      for (int c = 0; c < K; ++c)
        delta[spin_index(i, c, K)] = d;
    }
  } else {
    for (int q = 0; q < p.n_spins; ++q)
      delta[q] = rng.symmetric(spec.w_h);
  }
}

} // namespace detail

inline IsingProblem sample_generic(const IsingProblem& p, const DisorderSpec& spec,
                                   std::uint64_t realization) {
  spec.validate();
  if (spec.mode != DisorderMode::generic)
    throw std::invalid_argument("sample_generic: spec mode is not generic");
  Substream rng(spec.seed, realization);
  IsingProblem out = p;
  std::vector<double> dh;
  detail::draw_fields(p, spec, rng, dh);
  for (int q = 0; q < p.n_spins; ++q)
    out.h[q] += dh[q];
  for (auto& c : out.J)
    c.value += rng.symmetric(spec.w_j);
  return out;
}

inline IsingProblem sample_clamped(const IsingProblem& p, const DisorderSpec& spec,
                                   std::uint64_t realization) {
  spec.validate();
  if (spec.mode != DisorderMode::clamped)
    throw std::invalid_argument("sample_clamped: spec mode is not clamped");
  Substream rng(spec.seed, realization);
  IsingProblem out = p;
  const double h_max = p.max_field(); // clean maximum, fixed before perturbation
  std::vector<double> dh;
  detail::draw_fields(p, spec, rng, dh);
  for (int q = 0; q < p.n_spins; ++q) {
    const double v = p.h[q] + dh[q];
    out.h[q] = v < h_max ? v : h_max;
  }
  return out;
}

inline IsingProblem sample_disorder(const IsingProblem& p, const DisorderSpec& spec,
                                    std::uint64_t realization) {
  return spec.mode == DisorderMode::generic ? sample_generic(p, spec, realization)
                                            : sample_clamped(p, spec, realization);
}

inline void to_json(nlohmann::json& j, const DisorderSpec& s) {
  j = nlohmann::json{{"W_h", s.w_h},
                     {"W_J", s.w_j},
                     {"mode", to_string(s.mode)},
                     {"seed", s.seed},
                     {"per_vertex", s.per_vertex}};
}

inline void from_json(const nlohmann::json& j, DisorderSpec& s) {
  s.w_h = j.value("W_h", 0.0);
  s.w_j = j.value("W_J", 0.0);
  s.mode = parse_disorder_mode(j.value("mode", std::string("generic")));
  s.seed = j.value("seed", std::uint64_t{0});
  s.per_vertex = j.value("per_vertex", false);
  s.validate();
}

} // namespace qac
