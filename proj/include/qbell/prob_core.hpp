#pragma once

// Two-party, two-setting, three-outcome probability distributions with the
// canonical flat index p_1..p_36, marginals, no-signaling checks, and the
// named special distributions (uniform, PR-box analogue).

#include "qbell/rational.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbell {

inline constexpr double kDefaultTol = 1e-9;

class DistributionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class NoSignalingError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Measurement outcome, 1-based: {1, 2, 3}.
class Outcome {
public:
  explicit Outcome(int v) : v_(v) {
    if (v < 1 || v > 3) throw std::invalid_argument("outcome must be in {1,2,3}");
  }
  int value() const { return v_; }
  /// Outcome shifted by k modulo 3, staying in {1,2,3}.
  Outcome shifted(int k) const {
    int z = (v_ - 1 + k) % 3;
    if (z < 0) z += 3;
    return Outcome(z + 1);
  }
  friend bool operator==(Outcome l, Outcome r) { return l.v_ == r.v_; }

private:
  int v_;
};

/// Measurement setting, 1-based: {1, 2}.
class Setting {
public:
  explicit Setting(int v) : v_(v) {
    if (v < 1 || v > 2) throw std::invalid_argument("setting must be in {1,2}");
  }
  int value() const { return v_; }
  Setting other() const { return Setting(3 - v_); }
  friend bool operator==(Setting l, Setting r) { return l.v_ == r.v_; }

private:
  int v_;
};

enum class Side { Alice, Bob };

inline const char* side_name(Side s) { return s == Side::Alice ? "Alice" : "Bob"; }

/// One single-party probability: which side, which setting, which outcome.
struct MarginalSide {
  Side side;
  Setting setting;
  Outcome outcome;
};

/// Canonical flat index k = 9*(2(i-1)+(j-1)) + 3(a-1) + (b-1) + 1, in 1..36.
inline int flat_index(Setting i, Setting j, Outcome a, Outcome b) {
  return 9 * (2 * (i.value() - 1) + (j.value() - 1)) + 3 * (a.value() - 1) +
         (b.value() - 1) + 1;
}

struct JointKey {
  int i, j, a, b;  // settings in {1,2}, outcomes in {1,2,3}
};

inline JointKey unflatten(int k) {
  if (k < 1 || k > 36) throw std::invalid_argument("flat index must be in 1..36");
  const int z = k - 1;
  const int pair = z / 9;
  return JointKey{pair / 2 + 1, pair % 2 + 1, (z % 9) / 3 + 1, z % 3 + 1};
}

struct NoSignalingViolation {
  Side side;
  int setting;
  int outcome;
  double magnitude;
};

struct NoSignalingReport {
  bool pass = true;
  double worst = 0.0;  // largest marginal mismatch found
  std::vector<NoSignalingViolation> violations;
};

namespace detail {

inline bool exceeds(const Rational& magnitude, double tol) {
  if (tol <= 0.0) return magnitude != 0;
  return magnitude != 0 && to_double(magnitude) > tol;
}
inline bool exceeds(double magnitude, double tol) { return magnitude > tol; }

inline double as_double(const Rational& v) { return to_double(v); }
inline double as_double(double v) { return v; }

inline Rational abs_value(const Rational& v) { return v < 0 ? Rational(-v) : v; }
inline double abs_value(double v) { return std::abs(v); }

}  // namespace detail

/// Joint outcome probabilities P^{ij}(a,b) for the 2x2x3x3 scenario, stored in
/// flat-index order. Scalar is either Rational (exact) or double. Values are
/// immutable after construction; construction validates nonnegativity and the
/// per-setting-pair normalization. Conversion Rational -> double is provided;
/// the reverse direction is deliberately absent.
template <class S>
class JointDistribution {
public:
  /// Validates and builds. For double entries, values in [-tol, 0) are clamped
  /// to zero and each setting-pair sum must be within tol of 1. For Rational
  /// entries the checks are exact and tol is ignored.
  static JointDistribution validated(std::array<S, 36> entries, double tol = kDefaultTol) {
    for (int k = 0; k < 36; ++k) {
      if constexpr (std::is_same_v<S, double>) {
        if (!std::isfinite(entries[k]))
          throw DistributionError("entry p" + std::to_string(k + 1) + " is not finite");
        if (entries[k] < 0.0) {
          if (entries[k] < -tol)
            throw DistributionError("entry p" + std::to_string(k + 1) + " is negative");
          entries[k] = 0.0;
        }
      } else {
        if (entries[k] < 0)
          throw DistributionError("entry p" + std::to_string(k + 1) + " is negative");
      }
    }
    for (int pair = 0; pair < 4; ++pair) {
      S sum{};
      for (int t = 0; t < 9; ++t) sum += entries[9 * pair + t];
      if constexpr (std::is_same_v<S, double>) {
        if (std::abs(sum - 1.0) > tol)
          throw DistributionError("setting pair " + std::to_string(pair + 1) +
                                  " is not normalized");
      } else {
        if (sum != 1)
          throw DistributionError("setting pair " + std::to_string(pair + 1) +
                                  " is not normalized");
      }
    }
    return JointDistribution(std::move(entries));
  }

  /// 1-based flat access, k in 1..36.
  const S& flat(int k) const {
    if (k < 1 || k > 36) throw std::invalid_argument("flat index must be in 1..36");
    return p_[k - 1];
  }

  const S& operator()(Setting i, Setting j, Outcome a, Outcome b) const {
    return p_[flat_index(i, j, a, b) - 1];
  }

  const std::array<S, 36>& entries() const { return p_; }

  /// Single-party probability computed with an explicit partner setting:
  /// Alice: sum_b P^{setting,partner}(outcome, b); Bob symmetric.
  S marginal(const MarginalSide& m, Setting partner) const {
    S sum{};
    for (int o = 1; o <= 3; ++o) {
      if (m.side == Side::Alice)
        sum += (*this)(m.setting, partner, m.outcome, Outcome(o));
      else
        sum += (*this)(partner, m.setting, Outcome(o), m.outcome);
    }
    return sum;
  }

  /// Checks the 12 marginal-equality conditions (both sides, both settings,
  /// all outcomes). A failing report is a valid result, not an error.
  NoSignalingReport check_no_signaling(double tol = kDefaultTol) const {
    NoSignalingReport report;
    for (Side side : {Side::Alice, Side::Bob}) {
      for (int s = 1; s <= 2; ++s) {
        for (int o = 1; o <= 3; ++o) {
          const MarginalSide m{side, Setting(s), Outcome(o)};
          const S diff = marginal(m, Setting(1)) - marginal(m, Setting(2));
          const auto mag = detail::abs_value(diff);
          const double magd = detail::as_double(mag);
          if (magd > report.worst) report.worst = magd;
          if (detail::exceeds(mag, tol)) {
            report.pass = false;
            report.violations.push_back({side, s, o, magd});
          }
        }
      }
    }
    return report;
  }

private:
  explicit JointDistribution(std::array<S, 36> p) : p_(std::move(p)) {}
  std::array<S, 36> p_;
};

using JointDistributionQ = JointDistribution<Rational>;
using JointDistributionD = JointDistribution<double>;

inline JointDistributionD to_double(const JointDistributionQ& q) {
  std::array<double, 36> d{};
  for (int k = 0; k < 36; ++k) d[k] = to_double(q.entries()[k]);
  return JointDistributionD::validated(d);
}

/// All 36 entries equal to 1/9.
inline JointDistributionQ uniform_distribution() {
  std::array<Rational, 36> p;
  p.fill(Rational(1, 9));
  return JointDistributionQ::validated(std::move(p));
}

/// The no-signaling distribution reaching the algebraic maximum I3 = 4:
/// twelve entries of 1/3 (p1,p5,p9, p10,p14,p18, p20,p24,p25, p28,p32,p36),
/// all others zero.
inline JointDistributionQ pr_box_qutrit() {
  std::array<Rational, 36> p{};
  for (int k : {1, 5, 9, 10, 14, 18, 20, 24, 25, 28, 32, 36}) p[k - 1] = Rational(1, 3);
  return JointDistributionQ::validated(std::move(p));
}

}  // namespace qbell
