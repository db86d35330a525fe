#pragma once

// Local-hidden-variable oracle: the 81 deterministic strategies, brute-force
// classical bounds, and LP membership in the local polytope via a small
// self-contained phase-1 simplex (exact rational pivoting for rational
// input, double with tolerance otherwise; Bland's rule throughout).

#include "qbell/functionals.hpp"
#include "qbell/prob_core.hpp"
#include "qbell/rational.hpp"

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbell::lhv {

/// Predetermined outcome for each local setting.
struct DeterministicStrategy {
  int a1, a2, b1, b2;  // outcomes in {1,2,3}

  int alice(int setting) const { return setting == 1 ? a1 : a2; }
  int bob(int setting) const { return setting == 1 ? b1 : b2; }
  friend bool operator==(const DeterministicStrategy&, const DeterministicStrategy&) = default;
};

/// All 81 strategies in lexicographic (a1,a2,b1,b2) order.
inline std::vector<DeterministicStrategy> enumerate_strategies() {
  std::vector<DeterministicStrategy> out;
  out.reserve(81);
  for (int a1 = 1; a1 <= 3; ++a1)
    for (int a2 = 1; a2 <= 3; ++a2)
      for (int b1 = 1; b1 <= 3; ++b1)
        for (int b2 = 1; b2 <= 3; ++b2) out.push_back({a1, a2, b1, b2});
  return out;
}

/// The point-mass distribution of a strategy; satisfies no-signaling exactly.
inline JointDistributionQ strategy_distribution(const DeterministicStrategy& s) {
  std::array<Rational, 36> p{};
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j)
      p[flat_index(Setting(i), Setting(j), Outcome(s.alice(i)), Outcome(s.bob(j))) - 1] = 1;
  return JointDistributionQ::validated(std::move(p));
}

struct ClassicalBound {
  Rational max;
  std::vector<DeterministicStrategy> maximizers;  // in enumeration order
};

/// Exact maximum of the functional over all 81 deterministic strategies,
/// with every maximizing strategy reported.
inline ClassicalBound classical_bound(const BellFunctional& f) {
  ClassicalBound out;
  bool first = true;
  for (const auto& s : enumerate_strategies()) {
    const Rational v = evaluate(f, strategy_distribution(s));
    if (first || v > out.max) {
      out.max = v;
      out.maximizers.clear();
      first = false;
    }
    if (v == out.max) out.maximizers.push_back(s);
  }
  return out;
}

class LpError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

template <class S>
struct LpResult {
  bool local = false;
  std::vector<S> weights;  // size 81 when local, empty otherwise
  // No violated-functional witness is produced for a nonlocal verdict.
  bool witness_available = false;
};

namespace detail {

template <class S>
struct SimplexEps {
  static constexpr double value = 1e-12;
};
template <>
struct SimplexEps<Rational> {
  static constexpr double value = 0.0;
};

template <class S>
bool is_negative(const S& v, double eps) {
  if constexpr (std::is_same_v<S, Rational>)
    return v < 0;
  else
    return v < -eps;
}

template <class S>
bool is_positive(const S& v, double eps) {
  if constexpr (std::is_same_v<S, Rational>)
    return v > 0;
  else
    return v > eps;
}

}  // namespace detail

/// Decides whether dist is a convex mixture of deterministic strategies.
/// Phase-1 simplex over the explicit 81-vertex representation: variables are
/// the mixture weights, constraints are the 36 entry equalities plus the
/// unit-sum row. For rational input the verdict is exact; for double input
/// the phase-1 optimum is compared against tol, and a result too close to
/// the tolerance to call is rejected with advice to use rational input.
template <class S>
LpResult<S> lp_membership(const JointDistribution<S>& dist, double tol = kDefaultTol) {
  const auto report = dist.check_no_signaling(tol);
  if (!report.pass)
    throw NoSignalingError("lp_membership requires a no-signaling distribution (worst " +
                           std::to_string(report.worst) + ")");

  const auto strategies = enumerate_strategies();
  constexpr int kRows = 37;        // 36 entries + unit sum
  constexpr int kWeights = 81;
  constexpr int kCols = kWeights + kRows;  // weights + artificials
  const double eps = detail::SimplexEps<S>::value;

  // Tableau rows: [A | I | b], starting basis = artificials.
  std::vector<std::vector<S>> tab(kRows, std::vector<S>(kCols + 1, S{}));
  for (int s = 0; s < kWeights; ++s) {
    const auto d = strategy_distribution(strategies[s]);
    for (int k = 0; k < 36; ++k) {
      if constexpr (std::is_same_v<S, Rational>)
        tab[k][s] = d.entries()[k];
      else
        tab[k][s] = to_double(d.entries()[k]);
    }
    tab[36][s] = S(1);
  }
  for (int r = 0; r < kRows; ++r) tab[r][kWeights + r] = S(1);
  for (int k = 0; k < 36; ++k) tab[k][kCols] = dist.entries()[k];
  tab[36][kCols] = S(1);

  // Reduced-cost row for minimizing the artificial sum.
  std::vector<S> obj(kCols + 1, S{});
  for (int c = 0; c <= kCols; ++c) {
    S colsum{};
    for (int r = 0; r < kRows; ++r) colsum += tab[r][c];
    if (c < kWeights || c == kCols) obj[c] = -colsum;
  }

  std::vector<int> basis(kRows);
  for (int r = 0; r < kRows; ++r) basis[r] = kWeights + r;

  const int kMaxPivots = 20000;
  int pivots = 0;
  while (true) {
    int enter = -1;  // Bland: smallest improving column index
    for (int c = 0; c < kCols; ++c)
      if (detail::is_negative(obj[c], eps)) {
        enter = c;
        break;
      }
    if (enter < 0) break;
    int leave = -1;
    S best_ratio{};
    for (int r = 0; r < kRows; ++r) {
      if (!detail::is_positive(tab[r][enter], eps)) continue;
      const S ratio = tab[r][kCols] / tab[r][enter];
      if (leave < 0 || ratio < best_ratio ||
          (ratio == best_ratio && basis[r] < basis[leave])) {
        leave = r;
        best_ratio = ratio;
      }
    }
    if (leave < 0)
      throw LpError("phase-1 simplex detected an unbounded direction; "
                    "the tableau is corrupt");
    const S inv = S(1) / tab[leave][enter];
    for (auto& v : tab[leave]) v *= inv;
    for (int r = 0; r < kRows; ++r) {
      if (r == leave) continue;
      const S factor = tab[r][enter];
      if (factor == S{}) continue;
      for (int c = 0; c <= kCols; ++c) tab[r][c] -= factor * tab[leave][c];
    }
    {
      const S factor = obj[enter];
      if (!(factor == S{}))
        for (int c = 0; c <= kCols; ++c) obj[c] -= factor * tab[leave][c];
    }
    basis[leave] = enter;
    if (++pivots > kMaxPivots)
      throw LpError("phase-1 simplex failed to converge on float input; "
                    "re-run with a rational distribution");
  }

  const S infeasibility = -obj[kCols];  // optimal artificial sum
  LpResult<S> out;
  bool local;
  if constexpr (std::is_same_v<S, Rational>) {
    local = infeasibility == 0;
  } else {
    if (infeasibility <= tol) {
      local = true;
    } else if (infeasibility <= 10 * tol) {
      throw LpError("phase-1 optimum " + std::to_string(infeasibility) +
                    " is too close to the tolerance to call; "
                    "re-run with a rational distribution");
    } else {
      local = false;
    }
  }
  out.local = local;
  if (local) {
    out.weights.assign(kWeights, S{});
    for (int r = 0; r < kRows; ++r) {
      if (basis[r] < kWeights) {
        S w = tab[r][kCols];
        if constexpr (std::is_same_v<S, double>) {
          if (w < 0.0) w = 0.0;  // roundoff guard
        }
        out.weights[basis[r]] = w;
      }
    }
  }
  return out;
}

}  // namespace qbell::lhv
