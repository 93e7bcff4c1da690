#pragma once

// Transverse-field annealing Hamiltonian
//
//   H(lambda) = (1 - lambda) * H_driver + lambda * H_problem,   lambda = t / tau,
//
// with H_driver = 4 sum_q S^x_q = 2 sum_q sigma^x_q (per-spin flip amplitude
// 2, ground energy -2n) and H_problem diagonal in the computational basis.
// The driver is applied matrix-free; only the 2^n problem energies are stored.

#include "qac/encoding.hpp"
#include "qac/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qac {

using Amplitude = std::complex<double>;

inline constexpr double kDriverAmplitude = 2.0;
inline constexpr int kMaxSimulatedSpins = 25;

class StateVector {
public:
  StateVector() = default;
  explicit StateVector(std::size_t dim) : amps_(dim) {}
  explicit StateVector(std::vector<Amplitude> amps) : amps_(std::move(amps)) {}

  std::size_t size() const noexcept { return amps_.size(); }
  Amplitude& operator[](std::size_t k) { return amps_[k]; }
  const Amplitude& operator[](std::size_t k) const { return amps_[k]; }

  std::span<Amplitude> amplitudes() noexcept { return amps_; }
  std::span<const Amplitude> amplitudes() const noexcept { return amps_; }

  /// Interleaved (re, im) view used by the real-arithmetic kernels.
  std::span<double> raw() noexcept { return {reinterpret_cast<double*>(amps_.data()), 2 * amps_.size()}; }
  std::span<const double> raw() const noexcept {
    return {reinterpret_cast<const double*>(amps_.data()), 2 * amps_.size()};
  }

  double norm() const {
    double s = 0.0;
    for (const auto& a : amps_)
      s += std::norm(a);
    return std::sqrt(s);
  }

  static StateVector basis(std::size_t dim, std::size_t k) {
    StateVector v(dim);
    v[k] = 1.0;
    return v;
  }

private:
  std::vector<Amplitude> amps_;
};

inline Amplitude inner(const StateVector& a, const StateVector& b) {
  Amplitude s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    s += std::conj(a[k]) * b[k];
  return s;
}

/// Linear ramp lambda(t) = t / tau on t in [0, tau].
struct Schedule {
  double tau = 1.0;

  double mixing(double t) const { return t / tau; }
};

class AnnealingHamiltonian {
public:
  AnnealingHamiltonian() = default;

  AnnealingHamiltonian(int n_spins, std::vector<double> diagonal)
      : n_spins_(n_spins), diagonal_(std::move(diagonal)) {
    if (n_spins < 1 || diagonal_.size() != (std::size_t{1} << n_spins))
      throw std::invalid_argument("AnnealingHamiltonian: diagonal length must be 2^n");
    max_abs_diag_ = 0.0;
    for (double d : diagonal_)
      max_abs_diag_ = std::max(max_abs_diag_, std::abs(d));
  }

  int n_spins() const noexcept { return n_spins_; }
  std::size_t dim() const noexcept { return diagonal_.size(); }
  std::span<const double> diagonal() const noexcept { return diagonal_; }

  /// Upper bound on ||H(lambda)|| valid for every lambda in [0, 1].
  double norm_bound() const noexcept { return kDriverAmplitude * n_spins_ + max_abs_diag_; }

  /// out = H(lambda) in for vectors of `lanes` doubles per basis state
  /// (1 = real vector, 2 = interleaved complex). H is real, so the lanes never mix.
  template <int lanes>
  void apply_lanes(double lambda, const double* __restrict in, double* __restrict out) const {
    const std::size_t dim = diagonal_.size();
    const double a = (1.0 - lambda) * kDriverAmplitude;
    const double* d = diagonal_.data();
    int q = 0;
    if (n_spins_ >= 3) {
      // Diagonal plus the flips of qubits 0..2, one tile of 8 basis states at a time.
      for (std::size_t k0 = 0; k0 < dim; k0 += 8) {
        const double* __restrict ib = in + lanes * k0;
        double* __restrict ob = out + lanes * k0;
        for (int j = 0; j < 8; ++j)
          for (int l = 0; l < lanes; ++l)
            ob[lanes * j + l] = lambda * d[k0 + j] * ib[lanes * j + l] +
                                a * (ib[lanes * (j ^ 1) + l] + ib[lanes * (j ^ 2) + l] +
                                     ib[lanes * (j ^ 4) + l]);
      }
      q = 3;
    } else {
      for (std::size_t k = 0; k < dim; ++k)
        for (int l = 0; l < lanes; ++l)
          out[lanes * k + l] = lambda * d[k] * in[lanes * k + l];
    }
    // Remaining qubits two at a time: within a group of four sub-blocks
    // (00, 01, 10, 11) each block receives its two single-flip neighbours.
    for (; q + 1 < n_spins_; q += 2) {
      const std::size_t s = (std::size_t{1} << q) * lanes;
      for (std::size_t base = 0; base < dim * lanes; base += 4 * s) {
        double* __restrict o0 = out + base;
        double* __restrict o1 = o0 + s;
        double* __restrict o2 = o1 + s;
        double* __restrict o3 = o2 + s;
        const double* __restrict i0 = in + base;
        const double* __restrict i1 = i0 + s;
        const double* __restrict i2 = i1 + s;
        const double* __restrict i3 = i2 + s;
        for (std::size_t j = 0; j < s; ++j) {
          const double x = a * (i1[j] + i2[j]);
          const double y = a * (i0[j] + i3[j]);
          o0[j] += x;
          o3[j] += x;
          o1[j] += y;
          o2[j] += y;
        }
      }
    }
    for (; q < n_spins_; ++q) {
      const std::size_t s = (std::size_t{1} << q) * lanes;
      for (std::size_t base = 0; base < dim * lanes; base += 2 * s) {
        double* __restrict lo = out + base;
        double* __restrict hi = lo + s;
        const double* __restrict in_lo = in + base;
        const double* __restrict in_hi = in_lo + s;
        for (std::size_t j = 0; j < s; ++j) {
          lo[j] += a * in_hi[j];
          hi[j] += a * in_lo[j];
        }
      }
    }
  }

  void apply(double lambda, std::span<const double> in, std::span<double> out) const {
    check(lambda, in.size(), out.size(), 1);
    apply_lanes<1>(lambda, in.data(), out.data());
  }

  void apply(double lambda, const StateVector& in, StateVector& out) const {
    check(lambda, 2 * in.size(), 2 * out.size(), 2);
    apply_lanes<2>(lambda, in.raw().data(), out.raw().data());
  }

  StateVector apply(double lambda, const StateVector& in) const {
    StateVector out(in.size());
    apply(lambda, in, out);
    return out;
  }

private:
  void check(double lambda, std::size_t in, std::size_t out, std::size_t lanes) const {
    if (!(lambda >= 0.0 && lambda <= 1.0))
      throw std::invalid_argument("apply: mixing weight must lie in [0, 1]");
    if (in != lanes * dim() || out != lanes * dim())
      throw std::invalid_argument("apply: state dimension " + std::to_string(in / lanes) +
                                  " does not match 2^n = " + std::to_string(dim()));
  }

  int n_spins_ = 0;
  std::vector<double> diagonal_;
  double max_abs_diag_ = 0.0;
};

inline AnnealingHamiltonian build_hamiltonian(const IsingProblem& p, bool allow_large = false) {
  if (p.n_spins < 1)
    throw std::invalid_argument("build_hamiltonian: problem has no spins");
  if (p.n_spins > kMaxSimulatedSpins && !allow_large)
    throw size_refusal("build_hamiltonian: " + std::to_string(p.n_spins) +
                       " spins exceeds the 25-spin state-vector limit");
  return AnnealingHamiltonian(p.n_spins, ising_diagonal(p));
}

/// Ground state of the driver: every spin in the sigma^x = -1 eigenstate,
/// amplitude (-1)^popcount(k) / 2^(n/2).
inline StateVector initial_state(int n) {
  if (n < 1)
    throw std::invalid_argument("initial_state: n must be >= 1");
  const std::size_t dim = std::size_t{1} << n;
  const double a = std::pow(2.0, -0.5 * n);
  StateVector psi(dim);
  for (std::size_t k = 0; k < dim; ++k)
    psi[k] = (std::popcount(k) & 1) ? -a : a;
  return psi;
}

} // namespace qac
