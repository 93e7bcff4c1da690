#pragma once

// Lowest eigenpairs of H(lambda).
//
// dense:   full matrix + Eigen::SelfAdjointEigenSolver (reference path).
// lanczos: matrix-free Lanczos with full reorthogonalization, explicit restart
//          on the best Ritz vector, and deflation against converged vectors so
//          degenerate levels come out one basis vector at a time.
// automatic picks the exact diagonal answer at lambda = 1, dense up to 12
// spins and Lanczos above.

#include "qac/errors.hpp"
#include "qac/hamiltonian.hpp"
#include "qac/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace qac {

enum class EigenMethod { automatic, dense, lanczos };

inline constexpr int kDenseSpinThreshold = 12;

struct Spectrum {
  std::vector<double> values;  // ascending
  Eigen::MatrixXd vectors;     // dim x k, orthonormal columns (H is real symmetric)
  std::vector<double> residuals;
};

struct LanczosOptions {
  int krylov_dim = 64;
  int max_restarts = 300;
  double tol = 1e-8;
  std::uint64_t seed = 0x5eed;
};

namespace detail {

inline void check_request(const AnnealingHamiltonian& H, double lambda, int k) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("low_spectrum: lambda must lie in [0, 1]");
  if (k < 1 || static_cast<std::size_t>(k) > H.dim())
    throw std::invalid_argument("low_spectrum: k must be in [1, 2^n]");
}

inline Eigen::VectorXd apply(const AnnealingHamiltonian& H, double lambda, const Eigen::VectorXd& x) {
  Eigen::VectorXd y(x.size());
  H.apply_lanes<1>(lambda, x.data(), y.data());
  return y;
}

inline void fill_residuals(const AnnealingHamiltonian& H, double lambda, Spectrum& s) {
  s.residuals.resize(s.values.size());
  for (std::size_t j = 0; j < s.values.size(); ++j) {
    const Eigen::VectorXd v = s.vectors.col(static_cast<Eigen::Index>(j));
    s.residuals[j] = (apply(H, lambda, v) - s.values[j] * v).norm();
  }
}

inline Spectrum diagonal_spectrum(const AnnealingHamiltonian& H, int k) {
  const auto d = H.diagonal();
  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  Spectrum s;
  s.vectors = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d.size()), k);
  for (int j = 0; j < k; ++j) {
    s.values.push_back(d[order[j]]);
    s.vectors(static_cast<Eigen::Index>(order[j]), j) = 1.0;
  }
  s.residuals.assign(k, 0.0);
  return s;
}

} // namespace detail

inline Eigen::MatrixXd dense_matrix(const AnnealingHamiltonian& H, double lambda) {
  const auto n = static_cast<Eigen::Index>(H.dim());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  const double a = (1.0 - lambda) * kDriverAmplitude;
  for (Eigen::Index k = 0; k < n; ++k) {
    M(k, k) = lambda * H.diagonal()[k];
    for (int q = 0; q < H.n_spins(); ++q)
      M(k, k ^ (Eigen::Index{1} << q)) = a;
  }
  return M;
}

inline Spectrum dense_low_spectrum(const AnnealingHamiltonian& H, double lambda, int k) {
  detail::check_request(H, lambda, k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense_matrix(H, lambda));
  if (solver.info() != Eigen::Success)
    throw numerical_error("dense eigensolver failed");
  Spectrum s;
  s.values.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + k);
  s.vectors = solver.eigenvectors().leftCols(k);
  detail::fill_residuals(H, lambda, s);
  return s;
}

inline Spectrum lanczos_low_spectrum(const AnnealingHamiltonian& H, double lambda, int k,
                                     const LanczosOptions& opt = {}) {
  detail::check_request(H, lambda, k);
  using Eigen::Index;
  const auto dim = static_cast<Index>(H.dim());
  Eigen::MatrixXd locked(dim, k);
  std::vector<double> values;
  std::vector<double> residuals;

  // Two passes of Gram-Schmidt against the locked vectors and the current
  // Krylov basis together. Deflating only before the basis projection lets
  // the projection feed locked components back in, and they compound over
  // the Lanczos steps.
  auto orthogonalize = [&](Eigen::VectorXd& w, Index n_locked, const Eigen::MatrixXd& V, Index n_basis) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Index j = 0; j < n_locked; ++j)
        w -= locked.col(j).dot(w) * locked.col(j);
      if (n_basis > 0)
        w -= V.leftCols(n_basis) * (V.leftCols(n_basis).transpose() * w);
    }
  };

  for (int target = 0; target < k; ++target) {
    const Index n_locked = target;
    const Index m_max = std::min<Index>(opt.krylov_dim, dim - n_locked);

    Substream rng(opt.seed, static_cast<std::uint64_t>(target));
    Eigen::VectorXd x(dim);
    for (Index i = 0; i < dim; ++i)
      x[i] = rng.uniform01() - 0.5;
    Eigen::MatrixXd V(dim, m_max);
    orthogonalize(x, n_locked, V, 0);
    x.normalize();

    double residual = 0.0;
    double theta = 0.0;
    bool converged = false;
    for (int restart = 0; restart <= opt.max_restarts && !converged; ++restart) {
      std::vector<double> alpha, beta;
      V.col(0) = x;
      Index m = 0;
      for (Index i = 0; i < m_max; ++i) {
        Eigen::VectorXd w = detail::apply(H, lambda, V.col(i));
        alpha.push_back(V.col(i).dot(w));
        orthogonalize(w, n_locked, V, i + 1);
        m = i + 1;
        const double b = w.norm();
        if (i + 1 == m_max || b < 1e-13 * (1.0 + std::abs(alpha.back())))
          break;
        beta.push_back(b);
        V.col(i + 1) = w / b;
      }

      Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
      Eigen::VectorXd sub(std::max<Index>(m - 1, 0));
      for (Index i = 0; i + 1 < m; ++i)
        sub[i] = beta[i];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      x = V.leftCols(m) * tri.eigenvectors().col(0);
      orthogonalize(x, n_locked, V, 0);
      x.normalize();

      const Eigen::VectorXd Hx = detail::apply(H, lambda, x);
      theta = x.dot(Hx);
      residual = (Hx - theta * x).norm();
      converged = residual < opt.tol;
    }
    if (!converged) {
      std::ostringstream msg;
      msg << "lanczos: eigenpair " << target << " did not converge, residual " << residual;
      throw numerical_error(msg.str());
    }
    locked.col(target) = x;
    values.push_back(theta);
    residuals.push_back(residual);
  }

  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return values[a] < values[b]; });
  Spectrum s;
  s.vectors.resize(dim, k);
  for (int j = 0; j < k; ++j) {
    s.values.push_back(values[order[j]]);
    s.residuals.push_back(residuals[order[j]]);
    s.vectors.col(j) = locked.col(order[j]);
  }
  return s;
}

inline Spectrum low_spectrum(const AnnealingHamiltonian& H, double lambda, int k,
                             EigenMethod method = EigenMethod::automatic,
                             const LanczosOptions& opt = {}) {
  detail::check_request(H, lambda, k);
  switch (method) {
  case EigenMethod::dense:
    return dense_low_spectrum(H, lambda, k);
  case EigenMethod::lanczos:
    return lanczos_low_spectrum(H, lambda, k, opt);
  case EigenMethod::automatic:
    break;
  }
  if (lambda == 1.0)
    return detail::diagonal_spectrum(H, k);
  if (H.n_spins() <= kDenseSpinThreshold)
    return dense_low_spectrum(H, lambda, k);
  return lanczos_low_spectrum(H, lambda, k, opt);
}

} // namespace qac
