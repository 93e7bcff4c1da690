#pragma once

// One-hot QUBO and Ising encodings of K-coloring.
//
// Qubit layout: spin q(i,c) = i*K + c for vertex i and color c, and a
// computational basis index is sum_q b_q * 2^q (qubit 0 least significant).
//
// Spin convention: s_q = b_q - 1/2, i.e. S^z eigenvalues are +-1/2, NOT +-1.
// With that convention the clean problem is
//   h_(i,c) = K + deg(i)/2 - 2,
//   J = 2 between the K colour slots of one vertex, J = 1 between equal
//   colour slots of adjacent vertices,
//   C = [1 + K(K-3)/4] N + K|E|/4,
// and reproduces the QUBO energy bit for bit. Offsets are always carried so
// that proper colorings sit at energy exactly 0.

#include "qac/errors.hpp"
#include "qac/graph.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qac {

using BasisIndex = std::uint64_t;

inline constexpr int kMaxEncodedSpins = 30;
inline constexpr int kCrossCheckSpins = 20;

inline int spin_index(int vertex, int color, int K) { return vertex * K + color; }

inline std::vector<std::uint8_t> basis_bits(BasisIndex index, int n_bits) {
  std::vector<std::uint8_t> bits(n_bits);
  for (int q = 0; q < n_bits; ++q)
    bits[q] = static_cast<std::uint8_t>((index >> q) & 1u);
  return bits;
}

inline BasisIndex basis_index(std::span<const std::uint8_t> bits) {
  if (bits.size() > 64)
    throw std::invalid_argument("basis_index: more than 64 bits");
  BasisIndex k = 0;
  for (std::size_t q = 0; q < bits.size(); ++q)
    if (bits[q])
      k |= BasisIndex{1} << q;
  return k;
}

inline BasisIndex encode_coloring(const Coloring& coloring, int K) {
  BasisIndex k = 0;
  for (std::size_t i = 0; i < coloring.size(); ++i)
    k |= BasisIndex{1} << spin_index(static_cast<int>(i), coloring[i], K);
  return k;
}

namespace detail {

inline void check_encodable(const Graph& g, int K, bool allow_large) {
  if (K < 1)
    throw std::invalid_argument("encoding: K must be >= 1");
  if (!allow_large && static_cast<long>(K) * g.n_vertices() > kMaxEncodedSpins)
    throw size_refusal("encoding: K*N = " + std::to_string(K * g.n_vertices()) +
                       " exceeds 30 spins (exhaustive verification impossible)");
}

} // namespace detail

// ---------------------------------------------------------------------------
// QUBO

struct QuboProblem {
  int n_vars = 0;
  std::vector<double> linear;
  std::map<std::pair<int, int>, double> quadratic; // keys (q1 < q2), no zeros stored
  double offset = 0.0;
};

/// sum_i (1 - sum_c X_ic)^2 + sum_<ij> sum_c X_ic X_jc, with X^2 = X folded
/// into the linear terms.
inline QuboProblem build_qubo(const Graph& g, int K, bool allow_large = false) {
  detail::check_encodable(g, K, allow_large);
  const int N = g.n_vertices();
  QuboProblem q;
  q.n_vars = N * K;
  q.linear.assign(q.n_vars, -1.0);
  q.offset = N;
  for (int i = 0; i < N; ++i)
    for (int c1 = 0; c1 < K; ++c1)
      for (int c2 = c1 + 1; c2 < K; ++c2)
        q.quadratic[{spin_index(i, c1, K), spin_index(i, c2, K)}] += 2.0;
  for (const auto& [i, j] : g.edges())
    for (int c = 0; c < K; ++c)
      q.quadratic[{spin_index(i, c, K), spin_index(j, c, K)}] += 1.0;
  std::erase_if(q.quadratic, [](const auto& kv) { return kv.second == 0.0; });
  return q;
}

inline double qubo_energy(const QuboProblem& q, std::span<const std::uint8_t> bits) {
  if (bits.size() != static_cast<std::size_t>(q.n_vars))
    throw std::invalid_argument("qubo_energy: expected " + std::to_string(q.n_vars) +
                                " bits, got " + std::to_string(bits.size()));
  double e = q.offset;
  for (int v = 0; v < q.n_vars; ++v)
    if (bits[v])
      e += q.linear[v];
  for (const auto& [key, value] : q.quadratic)
    if (bits[key.first] && bits[key.second])
      e += value;
  return e;
}

inline double qubo_energy_at(const QuboProblem& q, BasisIndex k) {
  double e = q.offset;
  for (int v = 0; v < q.n_vars; ++v)
    if ((k >> v) & 1u)
      e += q.linear[v];
  for (const auto& [key, value] : q.quadratic)
    if (((k >> key.first) & 1u) && ((k >> key.second) & 1u))
      e += value;
  return e;
}

// ---------------------------------------------------------------------------
// Ising

struct Coupling {
  int q = 0;
  int r = 0; // q < r
  double value = 0.0;

  friend bool operator==(const Coupling&, const Coupling&) = default;
};

struct ProblemMeta {
  int n_vertices = 0;
  int K = 0;
  std::string graph_id; // graph6 of the source graph
  Graph graph;

  friend bool operator==(const ProblemMeta&, const ProblemMeta&) = default;
};

struct IsingProblem {
  int n_spins = 0;
  std::vector<double> h;
  std::vector<Coupling> J; // sorted by (q, r)
  double C = 0.0;
  ProblemMeta meta;

  double max_field() const { return h.empty() ? 0.0 : *std::max_element(h.begin(), h.end()); }

  friend bool operator==(const IsingProblem&, const IsingProblem&) = default;
};

inline IsingProblem build_ising(const Graph& g, int K, bool allow_large = false) {
  detail::check_encodable(g, K, allow_large);
  const int N = g.n_vertices();
  const double E = static_cast<double>(g.n_edges());

  IsingProblem p;
  p.n_spins = N * K;
  p.h.resize(p.n_spins);
  for (int i = 0; i < N; ++i)
    for (int c = 0; c < K; ++c)
      p.h[spin_index(i, c, K)] = K + 0.5 * g.degree(i) - 2.0;

  std::map<std::pair<int, int>, double> J;
  for (int i = 0; i < N; ++i)
    for (int c1 = 0; c1 < K; ++c1)
      for (int c2 = c1 + 1; c2 < K; ++c2)
        J[{spin_index(i, c1, K), spin_index(i, c2, K)}] = 2.0;
  for (const auto& [i, j] : g.edges())
    for (int c = 0; c < K; ++c)
      J[{spin_index(i, c, K), spin_index(j, c, K)}] = 1.0;
  for (const auto& [key, value] : J)
    p.J.push_back({key.first, key.second, value});

  p.C = (1.0 + K * (K - 3) / 4.0) * N + K * E / 4.0;
  p.meta = {N, K, to_graph6(g), g};
  return p;
}

namespace detail {

template <class BitAt>
double ising_energy_impl(const IsingProblem& p, BitAt&& bit) {
  double e = p.C;
  for (int q = 0; q < p.n_spins; ++q)
    e += p.h[q] * (bit(q) - 0.5);
  for (const auto& c : p.J)
    e += c.value * (bit(c.q) - 0.5) * (bit(c.r) - 0.5);
  return e;
}

} // namespace detail

inline double ising_energy(const IsingProblem& p, std::span<const std::uint8_t> bits) {
  if (bits.size() != static_cast<std::size_t>(p.n_spins))
    throw std::invalid_argument("ising_energy: expected " + std::to_string(p.n_spins) +
                                " bits, got " + std::to_string(bits.size()));
  return detail::ising_energy_impl(p, [&](int q) { return double(bits[q] != 0); });
}

inline double ising_energy_at(const IsingProblem& p, BasisIndex k) {
  return detail::ising_energy_impl(p, [k](int q) { return double((k >> q) & 1u); });
}

/// Problem energies of all 2^n basis states, identical (same arithmetic) to
/// ising_energy on each bitstring.
inline std::vector<double> ising_diagonal(const IsingProblem& p) {
  if (p.n_spins > 30)
    throw size_refusal("ising_diagonal: more than 30 spins");
  const BasisIndex dim = BasisIndex{1} << p.n_spins;
  std::vector<double> d(dim);
  for (BasisIndex k = 0; k < dim; ++k)
    d[k] = ising_energy_at(p, k);
  return d;
}

// ---------------------------------------------------------------------------
// solutions

struct SolutionSet {
  std::vector<BasisIndex> indices; // sorted

  std::size_t multiplicity() const noexcept { return indices.size(); }
  bool contains(BasisIndex k) const {
    return std::binary_search(indices.begin(), indices.end(), k);
  }
};

/// Basis indices of every proper K-coloring. Cross-validated against an
/// exhaustive zero-energy scan of the QUBO when K*N <= 20.
inline SolutionSet solution_set(const Graph& g, int K) {
  detail::check_encodable(g, K, false);
  SolutionSet s;
  for (const auto& col : proper_colorings(g, K))
    s.indices.push_back(encode_coloring(col, K));
  std::sort(s.indices.begin(), s.indices.end());

  const int n = K * g.n_vertices();
  if (n <= kCrossCheckSpins) {
    const auto q = build_qubo(g, K);
    std::vector<BasisIndex> zeros;
    for (BasisIndex k = 0; k < (BasisIndex{1} << n); ++k)
      if (qubo_energy_at(q, k) == 0.0)
        zeros.push_back(k);
    if (zeros != s.indices)
      throw std::logic_error("solution_set: coloring enumeration disagrees with zero-energy scan");
  }
  return s;
}

// ---------------------------------------------------------------------------
// JSON

inline void to_json(nlohmann::json& j, const IsingProblem& p) {
  auto J = nlohmann::json::array();
  for (const auto& c : p.J)
    J.push_back({c.q, c.r, c.value});
  j = nlohmann::json{{"n_spins", p.n_spins},
                     {"h", p.h},
                     {"J", std::move(J)},
                     {"C", p.C},
                     {"meta",
                      {{"N", p.meta.n_vertices},
                       {"K", p.meta.K},
                       {"graph_id", p.meta.graph_id},
                       {"graph", p.meta.graph}}}};
}

inline void from_json(const nlohmann::json& j, IsingProblem& p) {
  p.n_spins = j.at("n_spins").get<int>();
  p.h = j.at("h").get<std::vector<double>>();
  if (p.h.size() != static_cast<std::size_t>(p.n_spins))
    throw std::invalid_argument("IsingProblem JSON: h has wrong length");
  p.J.clear();
  for (const auto& c : j.at("J")) {
    Coupling cp{c.at(0).get<int>(), c.at(1).get<int>(), c.at(2).get<double>()};
    if (cp.q > cp.r)
      std::swap(cp.q, cp.r);
    if (cp.q == cp.r || cp.q < 0 || cp.r >= p.n_spins)
      throw std::invalid_argument("IsingProblem JSON: bad coupling index");
    p.J.push_back(cp);
  }
  std::sort(p.J.begin(), p.J.end(),
            [](const Coupling& a, const Coupling& b) { return std::pair(a.q, a.r) < std::pair(b.q, b.r); });
  p.C = j.at("C").get<double>();
  p.meta = {};
  if (auto m = j.find("meta"); m != j.end()) {
    p.meta.n_vertices = m->value("N", 0);
    p.meta.K = m->value("K", 0);
    p.meta.graph_id = m->value("graph_id", std::string{});
    if (auto g = m->find("graph"); g != m->end())
      p.meta.graph = g->get<Graph>();
  }
}

} // namespace qac
