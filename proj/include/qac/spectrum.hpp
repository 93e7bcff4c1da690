#pragma once

// Low-energy spectrum tracks over the mixing parameter and the effective gap
// between the ground level and the lowest non-solution ("impurity") branch.
//
// Branches are anchored at lambda = 1, where H is diagonal and every level is
// a computational basis state, and followed backwards by maximal eigenvector
// overlap so avoided crossings keep their identity.

#include "qac/eigensolver.hpp"
#include "qac/encoding.hpp"
#include "qac/hamiltonian.hpp"
#include "qac/support.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace qac {

enum class LevelLabel { solution, impurity };

inline const char* to_string(LevelLabel l) { return l == LevelLabel::solution ? "solution" : "impurity"; }

struct AmbiguousMatch {
  std::size_t grid_index;
  int branch;
  double best_overlap;
  double second_overlap;
};

struct SpectrumTrack {
  std::vector<double> lambdas;               // ascending, last == 1
  std::vector<std::vector<double>> energies; // [grid][level], ascending
  std::vector<std::vector<int>> branch;      // [grid][level] -> branch id
  std::vector<LevelLabel> labels;            // per branch id
  std::vector<BasisIndex> endpoint_state;    // per branch id, basis state at lambda = 1
  std::vector<AmbiguousMatch> ambiguities;

  int n_levels() const { return static_cast<int>(labels.size()); }

  int n_solution_branches() const {
    return static_cast<int>(std::count(labels.begin(), labels.end(), LevelLabel::solution));
  }

  /// True when the lowest |S| levels at lambda = 1 are all solutions.
  bool impurity_free(std::size_t n_solutions) const {
    if (n_solutions > labels.size())
      return false;
    for (std::size_t b = 0; b < n_solutions; ++b)
      if (labels[branch.back()[b]] != LevelLabel::solution)
        return false;
    return true;
  }
};

inline constexpr double kAmbiguityThreshold = 1e-6;

inline SpectrumTrack spectrum_scan(const IsingProblem& p, const SolutionSet& S,
                                   std::vector<double> grid, int k,
                                   EigenMethod method = EigenMethod::automatic, int threads = 1) {
  if (grid.size() < 2)
    throw std::invalid_argument("spectrum_scan: grid needs at least two points");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] <= 1.0))
      throw std::invalid_argument("spectrum_scan: grid points must lie in [0, 1]");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw std::invalid_argument("spectrum_scan: grid must be strictly increasing");
  }
  if (grid.back() != 1.0)
    throw std::invalid_argument("spectrum_scan: grid must end at lambda = 1");

  const auto H = build_hamiltonian(p);
  const std::size_t G = grid.size();
  std::vector<Spectrum> spectra(G);
  parallel_for(G, threads, [&](std::size_t i) {
    spectra[i] = i + 1 == G ? low_spectrum(H, 1.0, k, EigenMethod::automatic)
                            : low_spectrum(H, grid[i], k, method);
  });

  SpectrumTrack t;
  t.lambdas = grid;
  t.energies.resize(G);
  t.branch.assign(G, std::vector<int>(k, -1));
  for (std::size_t i = 0; i < G; ++i)
    t.energies[i] = spectra[i].values;

  const auto& end = spectra.back();
  for (int b = 0; b < k; ++b) {
    Eigen::Index idx = 0;
    end.vectors.col(b).cwiseAbs().maxCoeff(&idx);
    t.endpoint_state.push_back(static_cast<BasisIndex>(idx));
    t.labels.push_back(S.contains(static_cast<BasisIndex>(idx)) ? LevelLabel::solution
                                                                 : LevelLabel::impurity);
    t.branch.back()[b] = b;
  }

  for (std::size_t i = G - 1; i-- > 0;) {
    const Eigen::MatrixXd O = (spectra[i + 1].vectors.transpose() * spectra[i].vectors).cwiseAbs2();
    std::vector<std::tuple<double, int, int>> pairs;
    for (int a = 0; a < k; ++a) {
      double best = -1.0, second = -1.0;
      for (int b = 0; b < k; ++b) {
        const double o = O(a, b);
        pairs.emplace_back(o, a, b);
        if (o > best) {
          second = best;
          best = o;
        } else if (o > second) {
          second = o;
        }
      }
      if (k > 1 && best - second < kAmbiguityThreshold)
        t.ambiguities.push_back({i, t.branch[i + 1][a], best, second});
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) {
      return std::get<0>(x) > std::get<0>(y);
    });
    std::vector<bool> used_a(k, false), used_b(k, false);
    for (const auto& [o, a, b] : pairs) {
      if (used_a[a] || used_b[b])
        continue;
      used_a[a] = used_b[b] = true;
      t.branch[i][b] = t.branch[i + 1][a];
    }
  }
  return t;
}

/// Thrown when no impurity branch lies inside the tracked window.
class gap_window_exceeded : public std::runtime_error {
public:
  gap_window_exceeded()
      : std::runtime_error("effective gap exceeds tracked window; increase the number of levels") {}
};

struct EffectiveGap {
  double min_gap = 0.0;
  double lambda_at_min = 0.0;
  double endpoint_gap = 0.0;
  std::vector<double> per_lambda;
};

inline EffectiveGap effective_gap(const SpectrumTrack& t) {
  if (std::none_of(t.labels.begin(), t.labels.end(),
                   [](LevelLabel l) { return l == LevelLabel::impurity; }))
    throw gap_window_exceeded();
  EffectiveGap g;
  g.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < t.lambdas.size(); ++i) {
    double lowest_impurity = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < t.energies[i].size(); ++l)
      if (t.labels[t.branch[i][l]] == LevelLabel::impurity)
        lowest_impurity = std::min(lowest_impurity, t.energies[i][l]);
    const double gap = lowest_impurity - t.energies[i].front();
    g.per_lambda.push_back(gap);
    if (gap < g.min_gap) {
      g.min_gap = gap;
      g.lambda_at_min = t.lambdas[i];
    }
  }
  g.endpoint_gap = g.per_lambda.back();
  return g;
}

inline void write_spectrum_csv(std::ostream& os, const SpectrumTrack& t) {
  os << "lambda,level_index,energy,label,branch_id\n";
  for (std::size_t i = 0; i < t.lambdas.size(); ++i)
    for (std::size_t l = 0; l < t.energies[i].size(); ++l) {
      const int b = t.branch[i][l];
      os << format_double(t.lambdas[i]) << ',' << l << ',' << format_double(t.energies[i][l]) << ','
         << to_string(t.labels[b]) << ',' << b << '\n';
    }
}

} // namespace qac
