#include "qbell/quantum.hpp"

#include "qbell/functionals.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>

using namespace qbell;
using namespace qbell::quantum;

namespace {

double max_entry_gap(const JointDistributionD& x, const JointDistributionD& y) {
  double worst = 0.0;
  for (int k = 1; k <= 36; ++k)
    worst = std::max(worst, std::abs(x.flat(k) - y.flat(k)));
  return worst;
}

}  // namespace

TEST_CASE("family states") {
  SUBCASE("theta = 0 is the basis product state") {
    const auto s = family_state(0.0);
    CHECK(s.amp(2, 2) == std::complex<double>(1.0, 0.0));
    CHECK(std::abs(s.amp(1, 1)) == 0.0);
    CHECK(std::abs(s.amp(3, 3)) == 0.0);
  }
  SUBCASE("cos(theta) = 1/sqrt(3) gives the maximally entangled state") {
    const auto s = family_state(std::acos(1.0 / std::sqrt(3.0)));
    const double inv = 1.0 / std::sqrt(3.0);
    CHECK(s.amp(2, 2).real() == doctest::Approx(inv).epsilon(1e-14));
    CHECK(s.amp(1, 1).real() == doctest::Approx(inv).epsilon(1e-14));
    CHECK(s.amp(3, 3).real() == doctest::Approx(inv).epsilon(1e-14));
  }
  SUBCASE("the maximal-violation state has the closed-form amplitudes") {
    const auto s = family_state(theta_of_maximal_violation());
    const double r33 = std::sqrt(33.0);
    const double mid = std::sqrt((11.0 - r33) / 22.0);
    const double outer = std::sqrt((11.0 + r33) / 44.0);
    CHECK(std::abs(s.amp(2, 2).real() - mid) < 1e-12);
    CHECK(std::abs(s.amp(1, 1).real() - outer) < 1e-12);
    CHECK(std::abs(s.amp(3, 3).real() - outer) < 1e-12);
  }
  SUBCASE("unnormalized amplitudes are rejected") {
    std::array<std::complex<double>, 9> amp{};
    amp[0] = 0.5;
    CHECK_THROWS_AS(TwoQutritState::from_amplitudes(amp), std::invalid_argument);
  }
}

TEST_CASE("six-port transformations are unitary with unimodular structure") {
  for (double phase : {0.0, 0.4, 1.9, -2.7, kPi / 3.0}) {
    for (Side side : {Side::Alice, Side::Bob}) {
      const auto u = sixport_unitary(side, phase);
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
          CHECK(std::abs(std::abs(u[r][c]) - 1.0 / std::sqrt(3.0)) < 1e-14);
          std::complex<double> dot = 0.0;
          for (int t = 0; t < 3; ++t) dot += u[r][t] * std::conj(u[c][t]);
          CHECK(std::abs(dot - (r == c ? 1.0 : 0.0)) < 1e-12);
        }
    }
    // Bob's matrix is Alice's with the two twiddled rows exchanged.
    const auto a = sixport_unitary(Side::Alice, phase);
    const auto b = sixport_unitary(Side::Bob, phase);
    for (int c = 0; c < 3; ++c) {
      CHECK(std::abs(a[0][c] - b[0][c]) < 1e-15);
      CHECK(std::abs(a[1][c] - b[2][c]) < 1e-15);
      CHECK(std::abs(a[2][c] - b[1][c]) < 1e-15);
    }
  }
}

TEST_CASE("product state measures uniformly under any settings") {
  const auto d = born_distribution(family_state(0.0), PhaseSettings{0.3, -1.2, 0.9, 2.2});
  for (int k = 1; k <= 36; ++k) CHECK(d.flat(k) == doctest::Approx(1.0 / 9.0).epsilon(1e-13));
}

TEST_CASE("born and closed-form paths agree and satisfy no-signaling") {
  int points = 0;
  for (double theta : {0.1, 0.7, 1.06, 1.4})
    for (double a1 : {0.0, 0.9})
      for (double a2 : {-0.4, 1.3})
        for (double b1 : {0.2, 2.1})
          for (double b2 : {-1.0, 0.6}) {
            const PhaseSettings s{a1, a2, b1, b2};
            const auto born = born_distribution(family_state(theta), s);
            const auto closed = closed_form_distribution(theta, s);
            CHECK(max_entry_gap(born, closed) < 1e-12);
            CHECK(born.check_no_signaling(1e-12).pass);
            ++points;
          }
  CHECK(points == 64);
}

TEST_CASE("family-state marginals are all 1/3") {
  const auto d = born_distribution(family_state(0.8), PhaseSettings{0.1, 0.5, -0.3, 1.1});
  for (Side side : {Side::Alice, Side::Bob})
    for (int s = 1; s <= 2; ++s)
      for (int o = 1; o <= 3; ++o)
        for (int partner = 1; partner <= 2; ++partner)
          CHECK(d.marginal({side, Setting(s), Outcome(o)}, Setting(partner)) ==
                doctest::Approx(1.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("phase expression for I3 matches the Born-rule evaluation") {
  const auto f = i3_functional();
  for (double theta : {0.2, 0.85, 1.06, 1.5})
    for (double a1 : {0.0, 1.7}) {
      const PhaseSettings s{a1, a1 + 0.8, -a1 + 0.25, 0.5 * a1 - 1.2};
      const double via_phases = i3_of_phases(theta, s);
      const double via_born = evaluate(f, born_distribution(family_state(theta), s));
      CHECK(std::abs(via_phases - via_born) < 1e-12);
    }
}

TEST_CASE("optimal settings") {
  const auto s = optimal_settings(0.0);
  CHECK(s.alpha1 == 0.0);
  CHECK(s.alpha2 == doctest::Approx(kPi / 3.0));
  CHECK(s.beta1 == doctest::Approx(kPi / 6.0));
  CHECK(s.beta2 == doctest::Approx(-kPi / 6.0));

  SUBCASE("the value is independent of alpha1") {
    for (double theta : {0.4, 1.0602, 1.3}) {
      const double v0 = i3_of_phases(theta, optimal_settings(0.0));
      const double v1 = i3_of_phases(theta, optimal_settings(1.234));
      CHECK(std::abs(v0 - v1) < 1e-12);
      CHECK(std::abs(v0 - i3_optimal(theta)) < 1e-12);
    }
  }
  SUBCASE("K3 along the optimal settings follows its closed form") {
    const auto k3 = k3_functional();
    for (double theta : {0.5, 0.9, 1.2}) {
      const auto d = born_distribution(family_state(theta), optimal_settings(0.4));
      CHECK(std::abs(evaluate(k3, d) - k3_optimal(theta)) < 1e-12);
      CHECK(std::abs(k3_optimal(theta) - (i3_optimal(theta) - 2.0) / 3.0) < 1e-14);
    }
  }
}

TEST_CASE("quantum K3 equals (I3 - 2)/3 for arbitrary settings") {
  const auto i3 = i3_functional();
  const auto k3 = k3_functional();
  for (double theta : {0.3, 0.8, 1.25})
    for (double a2 : {0.7, -0.9}) {
      const PhaseSettings s{0.15, a2, 1.9, -0.55};
      const auto d = born_distribution(family_state(theta), s);
      CHECK(std::abs(evaluate(k3, d) - (evaluate(i3, d) - 2.0) / 3.0) < 1e-12);
    }
}

TEST_CASE("boundary of the violation interval") {
  CHECK(std::abs(i3_optimal(violation_interval_lower()) - 2.0) < 1e-12);
  CHECK(std::abs(i3_optimal(kPi / 2.0) - 2.0) < 1e-12);
  CHECK(i3_optimal(0.0) == doctest::Approx(0.0));
  CHECK(k3_optimal(0.0) == doctest::Approx(-2.0 / 3.0));
  // No violation at the degenerate angles n*pi/2.
  for (int n = 0; n <= 4; ++n) CHECK(i3_optimal(n * kPi / 2.0) <= 2.0 + 1e-12);
}

TEST_CASE("one-dimensional maximization hits the analytic optimum") {
  const auto best = maximize_violation(PhaseFamily::OptimalSettings);
  const double want = 1.0 + std::sqrt(11.0 / 3.0);
  CHECK(std::abs(best.i3_max - want) < 1e-9);
  // Golden section resolves the position of a flat maximum to about
  // sqrt(machine epsilon); the value itself is machine-accurate.
  CHECK(std::abs(best.theta_max - theta_of_maximal_violation()) < 1e-6);
  const double theta_deg = best.theta_max * 180.0 / kPi;
  CHECK(std::abs(theta_deg - 60.74) < 0.01);
  // Amplitude form of the profile: 1 - cos(2t) + sqrt(8/3) sin(2t).
  const double amp_max = 1.0 + std::sqrt(1.0 + 8.0 / 3.0);
  CHECK(std::abs(best.i3_max - amp_max) < 1e-9);
  // Corresponding K3 maximum.
  CHECK(std::abs(k3_optimal(best.theta_max) - (std::sqrt(11.0 / 3.0) - 1.0) / 3.0) < 1e-9);
}

TEST_CASE("free four-phase maximization finds no better point") {
  const auto free4 = maximize_violation(PhaseFamily::FreeFourPhase);
  const double want = 1.0 + std::sqrt(11.0 / 3.0);
  CHECK(std::abs(free4.i3_max - want) < 1e-6);
  CHECK(free4.i3_max <= want + 1e-9);
  const double check = i3_of_phases(free4.theta_max, free4.settings);
  CHECK(free4.i3_max == doctest::Approx(check).epsilon(1e-12));
}
