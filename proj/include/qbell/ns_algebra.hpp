#pragma once

// Exact rational linear algebra over the 16 normalization + no-signaling
// constraints on the 36 joint probabilities: solving for a chosen set of 12
// variables, rewriting joint-only functionals over the remaining free
// variables, and deciding affine equivalence of two functionals on the
// constraint set. Everything here is exact; no floating point.

#include "qbell/functionals.hpp"
#include "qbell/prob_core.hpp"
#include "qbell/rational.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbell {

/// The 16 affine equations M p = r in canonical row order:
///   rows 1-4   normalization of the setting pairs (1,1), (1,2), (2,1), (2,2);
///   rows 5-10  Alice marginal equalities, i in {1,2} then m in {1,2,3}:
///              sum_n P^{i1}(m,n) - sum_n P^{i2}(m,n) = 0;
///   rows 11-16 Bob marginal equalities, j in {1,2} then n in {1,2,3}:
///              sum_m P^{1j}(m,n) - sum_m P^{2j}(m,n) = 0.
struct ConstraintSystem {
  std::vector<std::array<Rational, 36>> matrix;  // 16 rows
  std::vector<Rational> rhs;                     // 16 entries
};

inline ConstraintSystem build_constraints() {
  ConstraintSystem sys;
  sys.matrix.assign(16, std::array<Rational, 36>{});
  sys.rhs.assign(16, Rational(0));
  int row = 0;
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j) {
      for (int a = 1; a <= 3; ++a)
        for (int b = 1; b <= 3; ++b)
          sys.matrix[row][flat_index(Setting(i), Setting(j), Outcome(a), Outcome(b)) - 1] = 1;
      sys.rhs[row] = 1;
      ++row;
    }
  for (int i = 1; i <= 2; ++i)
    for (int m = 1; m <= 3; ++m) {
      for (int n = 1; n <= 3; ++n) {
        sys.matrix[row][flat_index(Setting(i), Setting(1), Outcome(m), Outcome(n)) - 1] += 1;
        sys.matrix[row][flat_index(Setting(i), Setting(2), Outcome(m), Outcome(n)) - 1] -= 1;
      }
      ++row;
    }
  for (int j = 1; j <= 2; ++j)
    for (int n = 1; n <= 3; ++n) {
      for (int m = 1; m <= 3; ++m) {
        sys.matrix[row][flat_index(Setting(1), Setting(j), Outcome(m), Outcome(n)) - 1] += 1;
        sys.matrix[row][flat_index(Setting(2), Setting(j), Outcome(m), Outcome(n)) - 1] -= 1;
      }
      ++row;
    }
  return sys;
}

/// residual = max |M p - r| over the 16 rows, exact.
inline Rational constraint_residual(const ConstraintSystem& sys,
                                    const std::array<Rational, 36>& p) {
  Rational worst(0);
  for (size_t row = 0; row < sys.matrix.size(); ++row) {
    Rational lhs(0);
    for (int k = 0; k < 36; ++k) lhs += sys.matrix[row][k] * p[k];
    Rational diff = lhs - sys.rhs[row];
    if (diff < 0) diff = -diff;
    if (diff > worst) worst = diff;
  }
  return worst;
}

/// Affine form constant + sum coeffs[k] * p_k over free variables, exact.
struct AffineExpression {
  Rational constant;
  std::map<int, Rational> coeffs;  // flat index -> fully reduced coefficient

  bool is_zero() const { return constant == 0 && coeffs.empty(); }

  Rational eval(const std::array<Rational, 36>& p) const {
    Rational v = constant;
    for (const auto& [k, c] : coeffs) v += c * p[k - 1];
    return v;
  }

  void add_term(int var, const Rational& c) {
    auto& slot = coeffs[var];
    slot += c;
    if (slot == 0) coeffs.erase(var);
  }

  /// Text form with terms in ascending flat-index order, e.g.
  /// "1/3 + 1/3*p1 - 1/3*p2 - 2/3*p5". Unit coefficients drop the "1*".
  std::string to_text() const {
    std::ostringstream os;
    bool first = true;
    if (constant != 0 || coeffs.empty()) {
      os << to_plain_string(constant);
      first = false;
    }
    for (const auto& [k, c] : coeffs) {
      const bool neg = c < 0;
      const Rational mag = neg ? Rational(-c) : c;
      if (first) {
        if (neg) os << "-";
        first = false;
      } else {
        os << (neg ? " - " : " + ");
      }
      if (mag != 1) os << to_plain_string(mag) << "*";
      os << "p" << k;
    }
    return os.str();
  }
};

/// Raised when a 12-variable selection cannot be eliminated: the named
/// subset of targets is linearly dependent over the constraint rows.
class UnsolvableSelection : public std::domain_error {
public:
  explicit UnsolvableSelection(std::vector<int> subset)
      : std::domain_error(make_message(subset)), dependent(std::move(subset)) {}
  std::vector<int> dependent;

private:
  static std::string make_message(const std::vector<int>& subset) {
    std::ostringstream os;
    os << "unsolvable selection: dependent target subset {";
    for (size_t t = 0; t < subset.size(); ++t) os << (t ? "," : "") << "p" << subset[t];
    os << "}";
    return os.str();
  }
};

namespace detail {

inline std::vector<int> checked_targets(const std::vector<int>& targets) {
  std::set<int> uniq(targets.begin(), targets.end());
  if (uniq.size() != 12)
    throw std::invalid_argument("target set must contain exactly 12 distinct indices");
  for (int t : uniq)
    if (t < 1 || t > 36) throw std::invalid_argument("target index out of range 1..36");
  return {uniq.begin(), uniq.end()};
}

}  // namespace detail

/// Gauss-Jordan elimination of the 12 target columns, ascending flat-index
/// order, pivot = first usable row. Returns each target as an affine
/// expression over the 24 non-target variables.
inline std::map<int, AffineExpression> solve_for(const ConstraintSystem& sys,
                                                 const std::vector<int>& targets_in) {
  const std::vector<int> targets = detail::checked_targets(targets_in);
  const size_t rows = sys.matrix.size();
  std::vector<std::array<Rational, 37>> aug(rows);
  for (size_t r = 0; r < rows; ++r) {
    for (int k = 0; k < 36; ++k) aug[r][k] = sys.matrix[r][k];
    aug[r][36] = sys.rhs[r];
  }
  std::vector<bool> used(rows, false);
  std::map<int, size_t> pivot_row;
  std::vector<int> pivoted;
  for (int t : targets) {
    const int col = t - 1;
    size_t pr = rows;
    for (size_t r = 0; r < rows; ++r)
      if (!used[r] && aug[r][col] != 0) {
        pr = r;
        break;
      }
    if (pr == rows) {
      pivoted.push_back(t);
      throw UnsolvableSelection(pivoted);
    }
    const Rational inv = Rational(1) / aug[pr][col];
    for (auto& v : aug[pr]) v *= inv;
    for (size_t r = 0; r < rows; ++r) {
      if (r == pr || aug[r][col] == 0) continue;
      const Rational factor = aug[r][col];
      for (int k = 0; k <= 36; ++k) aug[r][k] -= factor * aug[pr][k];
    }
    used[pr] = true;
    pivot_row[t] = pr;
    pivoted.push_back(t);
  }
  // With 12 pivots placed the remaining rows are spanned by the pivot rows
  // and must have vanished entirely.
  for (size_t r = 0; r < rows; ++r) {
    if (used[r]) continue;
    for (int k = 0; k <= 36; ++k)
      if (aug[r][k] != 0) throw std::logic_error("constraint rank exceeds target count");
  }
  std::map<int, AffineExpression> out;
  for (int t : targets) {
    const auto& row = aug[pivot_row[t]];
    AffineExpression e;
    e.constant = row[36];
    for (int k = 0; k < 36; ++k) {
      if (k == t - 1) continue;
      if (row[k] != 0) e.coeffs[k + 1] = -row[k];
    }
    out[t] = std::move(e);
  }
  return out;
}

namespace detail {

inline std::array<Rational, 36> joint_vector(const BellFunctional& f) {
  if (!f.joint_only())
    throw std::invalid_argument("functional '" + f.name +
                                "' has single-party terms; expand marginals first");
  std::array<Rational, 36> v{};
  for (const auto& [k, c] : f.joint) v[k - 1] = c;
  return v;
}

inline AffineExpression reduce_vector(const std::array<Rational, 36>& v,
                                      const std::map<int, AffineExpression>& solved) {
  AffineExpression out;
  for (int k = 1; k <= 36; ++k) {
    if (v[k - 1] == 0) continue;
    const auto it = solved.find(k);
    if (it == solved.end()) {
      out.add_term(k, v[k - 1]);
    } else {
      out.constant += v[k - 1] * it->second.constant;
      for (const auto& [var, c] : it->second.coeffs) out.add_term(var, v[k - 1] * c);
    }
  }
  return out;
}

}  // namespace detail

/// Rewrites a joint-only functional over the free variables of the given
/// elimination, by substituting the solved target expressions.
inline AffineExpression reduce_functional(const ConstraintSystem& sys,
                                          const BellFunctional& f,
                                          const std::vector<int>& targets) {
  const auto v = detail::joint_vector(f);
  return detail::reduce_vector(v, solve_for(sys, targets));
}

/// Finds (scale, offset) with f = scale*g + offset everywhere on the
/// constraint set, i.e. the coefficient vector of f - scale*g lies in the row
/// space with offset the matching right-hand-side combination. Returns
/// nothing when no such pair exists. The pair is unique whenever g is
/// non-constant on the constraint set.
///
/// Implemented as one exact solve in the unknowns (scale, mu_1..mu_16)
/// against the 36 coefficient equations; offset = mu . rhs.
inline std::optional<std::pair<Rational, Rational>> affine_relation(
    const ConstraintSystem& sys, const BellFunctional& f, const BellFunctional& g) {
  const auto fv = detail::joint_vector(f);
  const auto gv = detail::joint_vector(g);
  const size_t rows = sys.matrix.size();
  const size_t unknowns = 1 + rows;
  // Augmented system: columns [g | M^T | f].
  std::vector<std::vector<Rational>> aug(36, std::vector<Rational>(unknowns + 1));
  for (int k = 0; k < 36; ++k) {
    aug[k][0] = gv[k];
    for (size_t r = 0; r < rows; ++r) aug[k][1 + r] = sys.matrix[r][k];
    aug[k][unknowns] = fv[k];
  }
  std::vector<size_t> pivot_col_of_row;
  size_t rank = 0;
  for (size_t col = 0; col < unknowns && rank < 36; ++col) {
    size_t pr = 36;
    for (size_t r = rank; r < 36; ++r)
      if (aug[r][col] != 0) {
        pr = r;
        break;
      }
    if (pr == 36) continue;
    std::swap(aug[rank], aug[pr]);
    const Rational inv = Rational(1) / aug[rank][col];
    for (auto& v : aug[rank]) v *= inv;
    for (size_t r = 0; r < 36; ++r) {
      if (r == rank || aug[r][col] == 0) continue;
      const Rational factor = aug[r][col];
      for (size_t k = col; k <= unknowns; ++k) aug[r][k] -= factor * aug[rank][k];
    }
    pivot_col_of_row.push_back(col);
    ++rank;
  }
  for (size_t r = rank; r < 36; ++r)
    if (aug[r][unknowns] != 0) return std::nullopt;  // inconsistent: no relation
  // Particular solution with all free unknowns zero.
  std::vector<Rational> x(unknowns, Rational(0));
  for (size_t r = 0; r < rank; ++r) x[pivot_col_of_row[r]] = aug[r][unknowns];
  Rational offset(0);
  for (size_t r = 0; r < rows; ++r) offset += x[1 + r] * sys.rhs[r];
  return std::make_pair(x[0], offset);
}

/// The reduced form of f - scale*g - offset under the given elimination;
/// identically zero iff the affine relation holds.
inline AffineExpression residual(const ConstraintSystem& sys, const BellFunctional& f,
                                 const BellFunctional& g, const Rational& scale,
                                 const Rational& offset, const std::vector<int>& targets) {
  const auto fv = detail::joint_vector(f);
  const auto gv = detail::joint_vector(g);
  std::array<Rational, 36> v{};
  for (int k = 0; k < 36; ++k) v[k] = fv[k] - scale * gv[k];
  AffineExpression out = detail::reduce_vector(v, solve_for(sys, targets));
  out.constant -= offset;
  return out;
}

}  // namespace qbell
