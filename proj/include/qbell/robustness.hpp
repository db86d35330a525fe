#pragma once

// Noise-admixture and detector-efficiency analysis: uncolored-noise mixing,
// eta-scaled predictions, critical noise/efficiency thresholds, the extended
// distribution with no-click outcomes, and the S3 inequality value.

#include "qbell/functionals.hpp"
#include "qbell/prob_core.hpp"
#include "qbell/quantum.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace qbell::robust {

class NoViolationError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

struct NoiseMix {
  double lambda;
  explicit NoiseMix(double l) : lambda(l) {
    if (!(l >= 0.0 && l <= 1.0)) throw std::invalid_argument("lambda must be in [0,1]");
  }
};

struct Efficiency {
  double eta;
  explicit Efficiency(double e) : eta(e) {
    if (!(e >= 0.0 && e <= 1.0)) throw std::invalid_argument("eta must be in [0,1]");
  }
};

/// Entrywise lambda*p + (1-lambda)/9; marginals become lambda*m + (1-lambda)/3.
inline JointDistributionD noisy_distribution(const JointDistributionD& dist, NoiseMix mix) {
  std::array<double, 36> p{};
  for (int k = 0; k < 36; ++k)
    p[k] = mix.lambda * dist.entries()[k] + (1.0 - mix.lambda) / 9.0;
  return JointDistributionD::validated(p);
}

/// Critical noise weight 2/I3 above which the violation survives.
inline double noise_threshold(double i3_value) {
  if (!(i3_value > 2.0))
    throw NoViolationError("I3 <= 2: no violation at any lambda");
  return 2.0 / i3_value;
}

struct EtaScaled {
  double i3_eta;
  double k3_eta;
};

/// I3 -> eta^2 I3 and K3 -> eta^2 K3 + (4/3) eta (eta - 1). Requires the
/// unit-efficiency inputs to satisfy k3 = (i3 - 2)/3.
inline EtaScaled eta_scaled_values(double i3_value, double k3_value, Efficiency e) {
  if (std::abs(k3_value - (i3_value - 2.0) / 3.0) > 1e-9)
    throw std::invalid_argument("inputs violate k3 = (i3 - 2)/3 beyond 1e-9");
  const double eta = e.eta;
  return EtaScaled{eta * eta * i3_value,
                   eta * eta * k3_value + (4.0 / 3.0) * eta * (eta - 1.0)};
}

/// Threshold efficiency for the CHSH-type test: sqrt(2/I3).
inline double efficiency_threshold_chsh(double i3_value) {
  if (!(i3_value > 2.0)) throw NoViolationError("I3 <= 2: no violation at any eta");
  return std::sqrt(2.0 / i3_value);
}

/// Threshold efficiency for the CH-type test: 4/(2 + I3).
inline double efficiency_threshold_ch(double i3_value) {
  if (!(i3_value > 2.0)) throw NoViolationError("I3 <= 2: no violation at any eta");
  return 4.0 / (2.0 + i3_value);
}

/// Outcome probabilities over the extended alphabet {1,2,3,no-click} for both
/// parties. Entry access uses 0 for the no-click outcome.
class ExtendedDistribution {
public:
  static ExtendedDistribution validated(std::array<double, 64> q, double tol = 1e-9) {
    for (auto& v : q) {
      if (!std::isfinite(v)) throw DistributionError("extended entry is not finite");
      if (v < 0.0) {
        if (v < -tol) throw DistributionError("extended entry is negative");
        v = 0.0;
      }
    }
    ExtendedDistribution ext(q);
    for (int i = 1; i <= 2; ++i)
      for (int j = 1; j <= 2; ++j) {
        double sum = 0.0;
        for (int a = 0; a <= 3; ++a)
          for (int b = 0; b <= 3; ++b) sum += ext.q(i, j, a, b);
        if (std::abs(sum - 1.0) > tol)
          throw DistributionError("extended setting pair is not normalized");
      }
    // No-signaling over the extended alphabet.
    for (int s = 1; s <= 2; ++s)
      for (int o = 0; o <= 3; ++o) {
        double a1 = 0.0, a2 = 0.0, b1 = 0.0, b2 = 0.0;
        for (int t = 0; t <= 3; ++t) {
          a1 += ext.q(s, 1, o, t);
          a2 += ext.q(s, 2, o, t);
          b1 += ext.q(1, s, t, o);
          b2 += ext.q(2, s, t, o);
        }
        if (std::abs(a1 - a2) > tol || std::abs(b1 - b2) > tol)
          throw NoSignalingError("extended distribution violates no-signaling");
      }
    return ext;
  }

  /// a, b in {0,1,2,3}; 0 denotes the no-click outcome.
  double q(int i, int j, int a, int b) const {
    return q_[16 * (2 * (i - 1) + (j - 1)) + 4 * a + b];
  }

private:
  explicit ExtendedDistribution(const std::array<double, 64>& q) : q_(q) {}
  std::array<double, 64> q_;
};

/// Detector model with equal efficiency eta everywhere: detected pairs keep
/// eta^2 of the body, single no-clicks carry eta(1-eta) times the in-block
/// marginal, and the double no-click is (1-eta)^2 for every setting pair.
inline ExtendedDistribution extended_distribution(const JointDistributionD& dist,
                                                  Efficiency e, double tol = kDefaultTol) {
  const auto report = dist.check_no_signaling(tol);
  if (!report.pass)
    throw NoSignalingError("extended_distribution requires a no-signaling input (worst " +
                           std::to_string(report.worst) + ")");
  const double eta = e.eta;
  std::array<double, 64> q{};
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j) {
      const int base = 16 * (2 * (i - 1) + (j - 1));
      q[base + 0] = (1.0 - eta) * (1.0 - eta);
      for (int a = 1; a <= 3; ++a) {
        double row = 0.0, col = 0.0;
        for (int t = 1; t <= 3; ++t) {
          row += dist(Setting(i), Setting(j), Outcome(a), Outcome(t));
          col += dist(Setting(i), Setting(j), Outcome(t), Outcome(a));
        }
        q[base + 4 * a + 0] = eta * (1.0 - eta) * row;
        q[base + 0 + a] = eta * (1.0 - eta) * col;
        for (int b = 1; b <= 3; ++b)
          q[base + 4 * a + b] =
              eta * eta * dist(Setting(i), Setting(j), Outcome(a), Outcome(b));
      }
    }
  return ExtendedDistribution::validated(q, 1e-9);
}

/// I3 evaluated on the detected 3x3 body plus half the summed double
/// no-click probability; classical bound 2.
inline double s3_value(const ExtendedDistribution& ext) {
  double value = 0.0;
  for (const auto& [k, c] : i3_functional().joint) {
    const JointKey key = unflatten(k);
    value += to_double(c) * ext.q(key.i, key.j, key.a, key.b);
  }
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j) value += 0.5 * ext.q(i, j, 0, 0);
  return value;
}

struct ThresholdReport {
  double theta;       // radians
  double i3;          // unit-efficiency I3 at the optimal phase relation
  double lambda_min;  // critical noise weight
  double eta_ch;      // CH-type efficiency threshold
  double eta_chsh;    // CHSH-type efficiency threshold
};

/// Thresholds along the optimal phase relation. theta must lie strictly
/// inside the violation interval (arctan sqrt(3/8), pi/2); outside it the
/// thresholds would exceed 1 and are refused.
inline ThresholdReport threshold_report(double theta) {
  const double lo = quantum::violation_interval_lower();
  const double hi = quantum::violation_interval_upper();
  if (!(theta > lo && theta < hi)) {
    std::ostringstream os;
    os << "no violation: theta must lie in the open interval (" << lo << ", " << hi
       << ") rad";
    throw NoViolationError(os.str());
  }
  const double i3 = quantum::i3_optimal(theta);
  return ThresholdReport{theta, i3, noise_threshold(i3), efficiency_threshold_ch(i3),
                         efficiency_threshold_chsh(i3)};
}

}  // namespace qbell::robust
