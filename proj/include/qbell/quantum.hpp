#pragma once

// Quantum predictions for the one-parameter family of two-qutrit states
// measured through phase-parametrized six-port (tritter) unitaries: joint
// probabilities via the general Born rule and via the closed per-cell
// formulas, the phase expression for I3, the optimal phase relations, and
// the violation maximizer.

#include "qbell/prob_core.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace qbell::quantum {

inline constexpr double kPi = std::numbers::pi;

/// Pure two-qutrit state; amplitude (a,b) with a,b in {1,2,3}.
class TwoQutritState {
public:
  static TwoQutritState from_amplitudes(std::array<std::complex<double>, 9> amp,
                                        double tol = 1e-12) {
    double norm2 = 0.0;
    for (const auto& z : amp) norm2 += std::norm(z);
    if (std::abs(norm2 - 1.0) > tol)
      throw std::invalid_argument("state is not normalized");
    return TwoQutritState(amp);
  }

  const std::complex<double>& amp(int a, int b) const { return amp_[3 * (a - 1) + (b - 1)]; }
  const std::array<std::complex<double>, 9>& amplitudes() const { return amp_; }

private:
  explicit TwoQutritState(const std::array<std::complex<double>, 9>& amp) : amp_(amp) {}
  std::array<std::complex<double>, 9> amp_;
};

/// cos(theta) |2>|2> + sin(theta)/sqrt(2) (|1>|1> + |3>|3>).
inline TwoQutritState family_state(double theta) {
  std::array<std::complex<double>, 9> amp{};
  const double s = std::sin(theta) / std::sqrt(2.0);
  amp[3 * 0 + 0] = s;                 // (1,1)
  amp[3 * 1 + 1] = std::cos(theta);   // (2,2)
  amp[3 * 2 + 2] = s;                 // (3,3)
  return TwoQutritState::from_amplitudes(amp);
}

using Unitary3 = std::array<std::array<std::complex<double>, 3>, 3>;

/// Unbiased six-port transformation with one free phase. With
/// w = exp(2*pi*i/3) and v = conj(w), Alice's matrix is
///   (1/sqrt3) [[1, e, e2], [1, w e, v e2], [1, v e, w e2]]
/// where e = exp(i phase), e2 = exp(2 i phase); Bob's swaps w and v.
inline Unitary3 sixport_unitary(Side side, double phase) {
  const double inv = 1.0 / std::sqrt(3.0);
  const std::complex<double> w = std::polar(1.0, 2.0 * kPi / 3.0);
  const std::complex<double> v = std::conj(w);
  const std::complex<double> e1 = std::polar(1.0, phase);
  const std::complex<double> e2 = std::polar(1.0, 2.0 * phase);
  const std::complex<double> x = side == Side::Alice ? w : v;
  const std::complex<double> y = side == Side::Alice ? v : w;
  return Unitary3{{{inv, inv * e1, inv * e2},
                   {inv, inv * x * e1, inv * y * e2},
                   {inv, inv * y * e1, inv * x * e2}}};
}

/// Phases defining the four local transformations; 2*pi periodic.
struct PhaseSettings {
  double alpha1, alpha2, beta1, beta2;

  double alice_phase(int setting) const { return setting == 1 ? alpha1 : alpha2; }
  double bob_phase(int setting) const { return setting == 1 ? beta1 : beta2; }
};

/// Joint outcome probabilities |<mn| (U_A tensor U_B) |psi>|^2 for the four
/// setting pairs, measured in the initial basis after the transformations.
inline JointDistributionD born_distribution(const TwoQutritState& state,
                                            const PhaseSettings& s) {
  std::array<double, 36> p{};
  for (int i = 1; i <= 2; ++i) {
    const Unitary3 ua = sixport_unitary(Side::Alice, s.alice_phase(i));
    for (int j = 1; j <= 2; ++j) {
      const Unitary3 ub = sixport_unitary(Side::Bob, s.bob_phase(j));
      for (int m = 1; m <= 3; ++m)
        for (int n = 1; n <= 3; ++n) {
          std::complex<double> amp = 0.0;
          for (int a = 1; a <= 3; ++a)
            for (int b = 1; b <= 3; ++b)
              amp += ua[m - 1][a - 1] * ub[n - 1][b - 1] * state.amp(a, b);
          p[flat_index(Setting(i), Setting(j), Outcome(m), Outcome(n)) - 1] = std::norm(amp);
        }
    }
  }
  return JointDistributionD::validated(p, 1e-9);
}

/// Closed per-cell form for the family state: each setting pair takes three
/// distinct values, one per outcome-difference class (a-b) mod 3, as
/// functions of phi = alpha_i + beta_j.
inline JointDistributionD closed_form_distribution(double theta, const PhaseSettings& s) {
  const double sin2t = std::sin(theta) * std::sin(theta);
  const double s2t = std::sin(2.0 * theta);
  std::array<double, 36> p{};
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j) {
      const double phi = s.alice_phase(i) + s.bob_phase(j);
      const double c1 = std::cos(phi), s1 = std::sin(phi);
      const double c2 = std::cos(2.0 * phi), s2 = std::sin(2.0 * phi);
      std::array<double, 3> value{};  // indexed by (a-b) mod 3
      value[0] = (1.0 + sin2t * c2 + std::sqrt(2.0) * s2t * c1) / 9.0;
      value[2] = (1.0 - 0.5 * sin2t * (c2 + std::sqrt(3.0) * s2) -
                  s2t * (c1 - std::sqrt(3.0) * s1) / std::sqrt(2.0)) /
                 9.0;
      value[1] = (1.0 - 0.5 * sin2t * (c2 - std::sqrt(3.0) * s2) -
                  s2t * (c1 + std::sqrt(3.0) * s1) / std::sqrt(2.0)) /
                 9.0;
      for (int a = 1; a <= 3; ++a)
        for (int b = 1; b <= 3; ++b)
          p[flat_index(Setting(i), Setting(j), Outcome(a), Outcome(b)) - 1] =
              value[((a - b) % 3 + 3) % 3];
    }
  return JointDistributionD::validated(p, 1e-9);
}

/// I3 as an explicit function of theta and the four phases.
inline double i3_of_phases(double theta, const PhaseSettings& s) {
  const double p11 = s.alpha1 + s.beta1, p12 = s.alpha1 + s.beta2;
  const double p21 = s.alpha2 + s.beta1, p22 = s.alpha2 + s.beta2;
  const double r3 = std::sqrt(3.0);
  const double quad =
      r3 * std::cos(2 * p11) + std::sin(2 * p11) + r3 * std::cos(2 * p12) -
      std::sin(2 * p12) - r3 * std::cos(2 * p21) - std::sin(2 * p21) +
      r3 * std::cos(2 * p22) + std::sin(2 * p22);
  const double lin = r3 * std::cos(p11) - std::sin(p11) + r3 * std::cos(p12) +
                     std::sin(p12) - r3 * std::cos(p21) + std::sin(p21) +
                     r3 * std::cos(p22) - std::sin(p22);
  const double st = std::sin(theta);
  return (r3 / 6.0) * st * st * quad + std::sin(2.0 * theta) * lin / std::sqrt(6.0);
}

/// The phase relation alpha2 = alpha1 + pi/3, beta1 = -alpha1 + pi/6,
/// beta2 = -alpha1 - pi/6, along which I3 is independent of alpha1.
inline PhaseSettings optimal_settings(double alpha1) {
  return PhaseSettings{alpha1, alpha1 + kPi / 3.0, -alpha1 + kPi / 6.0, -alpha1 - kPi / 6.0};
}

/// I3 along the optimal phase relation: 2 sin^2(theta) + 2 sqrt(2/3) sin(2 theta).
inline double i3_optimal(double theta) {
  const double st = std::sin(theta);
  return 2.0 * st * st + 2.0 * std::sqrt(2.0 / 3.0) * std::sin(2.0 * theta);
}

/// K3 along the optimal phase relation: (2/3)(sqrt(2/3) sin(2 theta) - cos^2 theta).
inline double k3_optimal(double theta) {
  const double ct = std::cos(theta);
  return (2.0 / 3.0) * (std::sqrt(2.0 / 3.0) * std::sin(2.0 * theta) - ct * ct);
}

/// Lower edge of the open violation interval (arctan sqrt(3/8), pi/2).
inline double violation_interval_lower() { return std::atan(std::sqrt(3.0 / 8.0)); }
inline double violation_interval_upper() { return kPi / 2.0; }

/// Stationary angle of i3_optimal on (0, pi/2): tan(2 theta) = -sqrt(8/3)
/// with 2 theta in the second quadrant.
inline double theta_of_maximal_violation() {
  return 0.5 * (kPi - std::atan(std::sqrt(8.0 / 3.0)));
}

enum class PhaseFamily { OptimalSettings, FreeFourPhase };

struct ViolationMaximum {
  double theta_max;
  PhaseSettings settings;
  double i3_max;
};

namespace detail {

template <class F>
double golden_section_max(F f, double lo, double hi, double width_tol) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > width_tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

/// Deterministic maximization of the violation. For OptimalSettings a
/// golden-section search over theta in (0, pi/2) (the profile is unimodal
/// there); for FreeFourPhase a coarse grid over (theta, alpha2, beta1, beta2)
/// with alpha1 = 0 (the value depends on the phases only through the sums
/// alpha_i + beta_j, so fixing alpha1 loses nothing), grid ties broken toward
/// the smallest (theta, alpha1, alpha2, beta1, beta2), followed by
/// coordinate-descent refinement with shrinking steps.
inline ViolationMaximum maximize_violation(PhaseFamily family) {
  if (family == PhaseFamily::OptimalSettings) {
    const double theta =
        detail::golden_section_max(i3_optimal, 0.0, kPi / 2.0, 1e-12);
    return ViolationMaximum{theta, optimal_settings(0.0), i3_optimal(theta)};
  }

  // Grid seed: phases step pi/60 over one period, theta step 0.5 degrees.
  constexpr int kPhaseSteps = 120;
  constexpr int kThetaSteps = 179;
  std::array<double, kPhaseSteps> c1{}, s1{}, c2{}, s2{};
  for (int g = 0; g < kPhaseSteps; ++g) {
    const double phi = 2.0 * kPi * g / kPhaseSteps;
    c1[g] = std::cos(phi);
    s1[g] = std::sin(phi);
    c2[g] = std::cos(2.0 * phi);
    s2[g] = std::sin(2.0 * phi);
  }
  std::array<double, kThetaSteps + 1> sinsq{}, sin2{};
  for (int k = 1; k <= kThetaSteps; ++k) {
    const double theta = k * (kPi / 360.0);
    sinsq[k] = std::sin(theta) * std::sin(theta);
    sin2[k] = std::sin(2.0 * theta);
  }
  const double r3 = std::sqrt(3.0);
  double best_v = -1e300;
  std::array<double, 5> best{};  // theta, alpha1, alpha2, beta1, beta2
  for (int ia2 = 0; ia2 < kPhaseSteps; ++ia2)
    for (int ib1 = 0; ib1 < kPhaseSteps; ++ib1) {
      const int i21 = (ia2 + ib1) % kPhaseSteps;
      for (int ib2 = 0; ib2 < kPhaseSteps; ++ib2) {
        const int i11 = ib1, i12 = ib2;
        const int i22 = (ia2 + ib2) % kPhaseSteps;
        const double quad = r3 * c2[i11] + s2[i11] + r3 * c2[i12] - s2[i12] -
                            r3 * c2[i21] - s2[i21] + r3 * c2[i22] + s2[i22];
        const double lin = r3 * c1[i11] - s1[i11] + r3 * c1[i12] + s1[i12] -
                           r3 * c1[i21] + s1[i21] + r3 * c1[i22] - s1[i22];
        const double qa = (r3 / 6.0) * quad;
        const double qb = lin / std::sqrt(6.0);
        for (int k = 1; k <= kThetaSteps; ++k) {
          const double v = sinsq[k] * qa + sin2[k] * qb;
          if (v < best_v) continue;
          const std::array<double, 5> cand{k * (kPi / 360.0), 0.0,
                                           2.0 * kPi * ia2 / kPhaseSteps,
                                           2.0 * kPi * ib1 / kPhaseSteps,
                                           2.0 * kPi * ib2 / kPhaseSteps};
          if (v > best_v || cand < best) {
            best_v = v;
            best = cand;
          }
        }
      }
    }

  // Coordinate-descent refinement; theta confined to (0, pi/2).
  const auto value = [](const std::array<double, 5>& x) {
    return i3_of_phases(x[0], PhaseSettings{x[1], x[2], x[3], x[4]});
  };
  double step = kPi / 60.0;
  std::array<double, 5> x = best;
  double fx = value(x);
  while (step > 1e-11) {
    bool moved = false;
    for (int d = 0; d < 5; ++d) {
      for (double dir : {+1.0, -1.0}) {
        std::array<double, 5> y = x;
        y[d] += dir * step;
        if (d == 0 && (y[0] <= 0.0 || y[0] >= kPi / 2.0)) continue;
        const double fy = value(y);
        if (fy > fx) {
          x = y;
          fx = fy;
          moved = true;
        }
      }
    }
    if (!moved) step *= 0.5;
  }
  return ViolationMaximum{x[0], PhaseSettings{x[1], x[2], x[3], x[4]}, fx};
}

}  // namespace qbell::quantum
