#pragma once

// Bell functionals: sparse linear forms over joint and single-party
// probabilities with a classical bound, normalized to the convention
// "value <= bound" (violation means value > bound). Includes generators for
// the 54-member CGLMP family, the CH-type functionals K3/K3p/W3, and the
// 36-member relabeled W family.

#include "qbell/prob_core.hpp"
#include "qbell/rational.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbell {

/// Key for a single-party coefficient: (setting, outcome), both 1-based.
struct MarginalKey {
  int setting;
  int outcome;
  friend auto operator<=>(const MarginalKey&, const MarginalKey&) = default;
};

class BellFunctional {
public:
  std::string name;
  Rational bound;
  std::map<int, Rational> joint;  // flat index -> coefficient
  std::map<MarginalKey, Rational> alice_marg;
  std::map<MarginalKey, Rational> bob_marg;

  bool joint_only() const { return alice_marg.empty() && bob_marg.empty(); }

  void add_joint(int i, int j, int a, int b, const Rational& c) {
    add_joint_flat(flat_index(Setting(i), Setting(j), Outcome(a), Outcome(b)), c);
  }
  void add_joint_flat(int k, const Rational& c) {
    auto& slot = joint[k];
    slot += c;
    if (slot == 0) joint.erase(k);
  }
  void add_marginal(Side side, int setting, int outcome, const Rational& c) {
    auto& m = side == Side::Alice ? alice_marg : bob_marg;
    auto& slot = m[MarginalKey{setting, outcome}];
    slot += c;
    if (slot == 0) m.erase(MarginalKey{setting, outcome});
  }
};

enum class DifferenceDirection { AminusB, BminusA };

/// The three joint cells of setting pair (i,j) whose outcomes satisfy
/// (a-b) = k mod 3 (AminusB) or (b-a) = k mod 3 (BminusA). Returned as flat
/// indices in ascending order.
inline std::array<int, 3> modular_difference_term(Setting i, Setting j,
                                                  DifferenceDirection dir, int k) {
  std::array<int, 3> out{};
  for (int a = 1; a <= 3; ++a) {
    const Outcome oa(a);
    const Outcome ob = dir == DifferenceDirection::AminusB ? oa.shifted(-k) : oa.shifted(k);
    out[a - 1] = flat_index(i, j, oa, ob);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Choice of the family parameters c1..c4 in {-1,0,+1} with
/// c1+c2+c3+c4 != 0 (mod 3).
struct CGLMPChoice {
  int c1, c2, c3, c4;

  bool valid() const {
    for (int c : {c1, c2, c3, c4})
      if (c < -1 || c > 1) return false;
    return ((c1 + c2 + c3 + c4) % 3 + 3) % 3 != 0;
  }
};

struct WFamilyChoice {
  int alpha, beta;  // in {0,1}, settings shift mod 2
  int x, y;         // in {0,1,2}, outcomes shift mod 3

  bool valid() const {
    return alpha >= 0 && alpha <= 1 && beta >= 0 && beta <= 1 && x >= 0 && x <= 2 &&
           y >= 0 && y <= 2;
  }
};

namespace detail {

inline void add_difference_term(BellFunctional& f, Setting i, Setting j,
                                DifferenceDirection dir, int k, const Rational& c) {
  for (int flat : modular_difference_term(i, j, dir, k)) f.add_joint_flat(flat, c);
}

inline int shift_setting(int s, int delta) { return (s - 1 + delta) % 2 + 1; }
inline int shift_outcome(int o, int delta) { return (o - 1 + delta) % 3 + 1; }

}  // namespace detail

/// The CHSH-type functional
///   P(A1=B1+c1) + P(B1=A2+c2) + P(A2=B2+c3) + P(B2=A1+c4)
///   - P(A1=B1-(c2+c3+c4)) - P(B1=A2-(c1+c3+c4))
///   - P(A2=B2-(c1+c2+c4)) - P(B2=A1-(c1+c2+c3)),  bound 2.
inline BellFunctional cglmp_functional(const CGLMPChoice& c) {
  if (!c.valid())
    throw std::invalid_argument("CGLMP choice requires c_i in {-1,0,+1} and "
                                "c1+c2+c3+c4 != 0 (mod 3)");
  using D = DifferenceDirection;
  BellFunctional f;
  f.name = "CGLMP(" + std::to_string(c.c1) + "," + std::to_string(c.c2) + "," +
           std::to_string(c.c3) + "," + std::to_string(c.c4) + ")";
  f.bound = 2;
  detail::add_difference_term(f, Setting(1), Setting(1), D::AminusB, c.c1, 1);
  detail::add_difference_term(f, Setting(2), Setting(1), D::BminusA, c.c2, 1);
  detail::add_difference_term(f, Setting(2), Setting(2), D::AminusB, c.c3, 1);
  detail::add_difference_term(f, Setting(1), Setting(2), D::BminusA, c.c4, 1);
  detail::add_difference_term(f, Setting(1), Setting(1), D::AminusB, -(c.c2 + c.c3 + c.c4), -1);
  detail::add_difference_term(f, Setting(2), Setting(1), D::BminusA, -(c.c1 + c.c3 + c.c4), -1);
  detail::add_difference_term(f, Setting(2), Setting(2), D::AminusB, -(c.c1 + c.c2 + c.c4), -1);
  detail::add_difference_term(f, Setting(1), Setting(2), D::BminusA, -(c.c1 + c.c2 + c.c3), -1);
  return f;
}

/// All 54 valid choices, lexicographic in (c1,c2,c3,c4) ascending over
/// (-1, 0, +1).
inline std::vector<CGLMPChoice> enumerate_cglmp() {
  std::vector<CGLMPChoice> out;
  for (int c1 = -1; c1 <= 1; ++c1)
    for (int c2 = -1; c2 <= 1; ++c2)
      for (int c3 = -1; c3 <= 1; ++c3)
        for (int c4 = -1; c4 <= 1; ++c4) {
          CGLMPChoice c{c1, c2, c3, c4};
          if (c.valid()) out.push_back(c);
        }
  return out;
}

/// I3, the CGLMP member with c2 = +1 and c1 = c3 = c4 = 0.
inline BellFunctional i3_functional() {
  BellFunctional f = cglmp_functional(CGLMPChoice{0, 1, 0, 0});
  f.name = "I3";
  return f;
}

/// I3', the CGLMP member with c4 = +1 and c1 = c2 = c3 = 0.
inline BellFunctional i3_prime_functional() {
  BellFunctional f = cglmp_functional(CGLMPChoice{0, 0, 0, 1});
  f.name = "I3p";
  return f;
}

/// CH-type functional equivalent to I3 modulo no-signaling:
/// twelve joint terms with pattern (++-+) across setting pairs on the cells
/// (1,1), (2,2), (2,1)/(1,2), minus the four singles P1(1), P1(2), Q2(1), Q2(2).
inline BellFunctional k3_functional() {
  BellFunctional f;
  f.name = "K3";
  f.bound = 0;
  const int cells[3][4][4] = {
      // {i, j, a, b} per setting pair, one row per outcome block
      {{1, 1, 1, 1}, {1, 2, 1, 1}, {2, 1, 1, 1}, {2, 2, 1, 1}},
      {{1, 1, 2, 2}, {1, 2, 2, 2}, {2, 1, 2, 2}, {2, 2, 2, 2}},
      {{1, 1, 2, 1}, {1, 2, 1, 2}, {2, 1, 2, 1}, {2, 2, 2, 1}},
  };
  for (const auto& block : cells)
    for (int t = 0; t < 4; ++t)
      f.add_joint(block[t][0], block[t][1], block[t][2], block[t][3], t == 2 ? -1 : 1);
  f.add_marginal(Side::Alice, 1, 1, -1);
  f.add_marginal(Side::Alice, 1, 2, -1);
  f.add_marginal(Side::Bob, 2, 1, -1);
  f.add_marginal(Side::Bob, 2, 2, -1);
  return f;
}

/// CH-type partner of I3' (minus sign on the setting pair (1,2) column).
inline BellFunctional k3_prime_functional() {
  BellFunctional f;
  f.name = "K3p";
  f.bound = 0;
  const int cells[3][4][4] = {
      {{1, 1, 1, 1}, {1, 2, 1, 1}, {2, 1, 1, 1}, {2, 2, 1, 1}},
      {{1, 1, 2, 2}, {1, 2, 2, 2}, {2, 1, 2, 2}, {2, 2, 2, 2}},
      {{1, 1, 2, 1}, {1, 2, 2, 1}, {2, 1, 1, 2}, {2, 2, 2, 1}},
  };
  for (const auto& block : cells)
    for (int t = 0; t < 4; ++t)
      f.add_joint(block[t][0], block[t][1], block[t][2], block[t][3], t == 1 ? -1 : 1);
  f.add_marginal(Side::Alice, 2, 1, -1);
  f.add_marginal(Side::Alice, 2, 2, -1);
  f.add_marginal(Side::Bob, 1, 1, -1);
  f.add_marginal(Side::Bob, 1, 2, -1);
  return f;
}

/// The CH-type functional that is NOT equivalent to any CGLMP member.
inline BellFunctional w3_functional() {
  BellFunctional f;
  f.name = "W3";
  f.bound = 0;
  const int cells[3][4][4] = {
      {{1, 1, 2, 1}, {1, 2, 2, 1}, {2, 1, 2, 1}, {2, 2, 2, 1}},
      {{1, 1, 1, 2}, {1, 2, 1, 2}, {2, 1, 1, 2}, {2, 2, 1, 2}},
      {{1, 1, 2, 2}, {1, 2, 1, 1}, {2, 1, 2, 2}, {2, 2, 2, 2}},
  };
  for (const auto& block : cells)
    for (int t = 0; t < 4; ++t)
      f.add_joint(block[t][0], block[t][1], block[t][2], block[t][3], t == 2 ? -1 : 1);
  f.add_marginal(Side::Alice, 1, 1, -1);
  f.add_marginal(Side::Alice, 1, 2, -1);
  f.add_marginal(Side::Bob, 2, 1, -1);
  f.add_marginal(Side::Bob, 2, 2, -1);
  return f;
}

/// W3 with settings shifted by (alpha, beta) mod 2 and outcomes shifted by
/// (x, y) mod 3. W(0,0,0,0) is w3_functional().
inline BellFunctional w_family_functional(const WFamilyChoice& w) {
  if (!w.valid())
    throw std::invalid_argument("W family choice requires alpha,beta in {0,1} and "
                                "x,y in {0,1,2}");
  using detail::shift_outcome;
  using detail::shift_setting;
  BellFunctional f;
  f.name = "W(" + std::to_string(w.alpha) + "," + std::to_string(w.beta) + "," +
           std::to_string(w.x) + "," + std::to_string(w.y) + ")";
  f.bound = 0;
  const int s1a = shift_setting(1, w.alpha), s2a = shift_setting(2, w.alpha);
  const int s1b = shift_setting(1, w.beta), s2b = shift_setting(2, w.beta);
  const int o1x = shift_outcome(1, w.x), o2x = shift_outcome(2, w.x);
  const int o1y = shift_outcome(1, w.y), o2y = shift_outcome(2, w.y);
  const auto add_block = [&](int ax, int by, int a_for_12, int b_for_12) {
    f.add_joint(s1a, s1b, ax, by, 1);
    f.add_joint(s1a, s2b, a_for_12, b_for_12, 1);
    f.add_joint(s2a, s1b, ax, by, -1);
    f.add_joint(s2a, s2b, ax, by, 1);
  };
  add_block(o2x, o1y, o2x, o1y);
  add_block(o1x, o2y, o1x, o2y);
  add_block(o2x, o2y, o1x, o1y);
  f.add_marginal(Side::Alice, s1a, o1x, -1);
  f.add_marginal(Side::Alice, s1a, o2x, -1);
  f.add_marginal(Side::Bob, s2b, o1y, -1);
  f.add_marginal(Side::Bob, s2b, o2y, -1);
  return f;
}

/// All 36 members, lexicographic in (alpha, beta, x, y).
inline std::vector<WFamilyChoice> enumerate_w_family() {
  std::vector<WFamilyChoice> out;
  for (int a = 0; a <= 1; ++a)
    for (int b = 0; b <= 1; ++b)
      for (int x = 0; x <= 2; ++x)
        for (int y = 0; y <= 2; ++y) out.push_back(WFamilyChoice{a, b, x, y});
  return out;
}

/// Partner-setting choice used to expand single-party terms into joint sums.
struct ExpansionKey {
  Side side;
  int setting;
  int outcome;
  friend auto operator<=>(const ExpansionKey&, const ExpansionKey&) = default;
};
using ExpansionChoice = std::map<ExpansionKey, int>;  // -> partner setting

/// Replaces every single-party term with the 3-cell joint sum over the chosen
/// partner setting. The result is joint-only; the bound is unchanged.
inline BellFunctional expand_marginals(const BellFunctional& f, const ExpansionChoice& choice) {
  BellFunctional out;
  out.name = f.name;
  out.bound = f.bound;
  out.joint = f.joint;
  const auto expand_side = [&](Side side, const std::map<MarginalKey, Rational>& terms) {
    for (const auto& [key, coeff] : terms) {
      const auto it = choice.find(ExpansionKey{side, key.setting, key.outcome});
      if (it == choice.end())
        throw std::invalid_argument(std::string("missing partner-setting choice for ") +
                                    side_name(side) + " setting " +
                                    std::to_string(key.setting) + " outcome " +
                                    std::to_string(key.outcome));
      const int partner = it->second;
      for (int o = 1; o <= 3; ++o) {
        if (side == Side::Alice)
          out.add_joint(key.setting, partner, key.outcome, o, coeff);
        else
          out.add_joint(partner, key.setting, o, key.outcome, coeff);
      }
    }
  };
  expand_side(Side::Alice, f.alice_marg);
  expand_side(Side::Bob, f.bob_marg);
  return out;
}

/// Expands every single-party term with partner setting 1. Any fixed choice
/// yields the same functional modulo the no-signaling constraint span.
inline ExpansionChoice default_expansion_choice(const BellFunctional& f) {
  ExpansionChoice choice;
  for (const auto& [key, coeff] : f.alice_marg)
    choice[ExpansionKey{Side::Alice, key.setting, key.outcome}] = 1;
  for (const auto& [key, coeff] : f.bob_marg)
    choice[ExpansionKey{Side::Bob, key.setting, key.outcome}] = 1;
  return choice;
}

/// The partner choices producing the ten-joint-term compact forms of K3,
/// K3p and W3 used throughout the derivations.
inline ExpansionChoice k3_compact_choice() {
  return {{{Side::Alice, 1, 1}, 2},
          {{Side::Alice, 1, 2}, 1},
          {{Side::Bob, 2, 1}, 2},
          {{Side::Bob, 2, 2}, 2}};
}

inline ExpansionChoice k3_prime_compact_choice() {
  return {{{Side::Alice, 2, 1}, 1},
          {{Side::Alice, 2, 2}, 2},
          {{Side::Bob, 1, 1}, 1},
          {{Side::Bob, 1, 2}, 2}};
}

inline ExpansionChoice w3_compact_choice() {
  return {{{Side::Alice, 1, 1}, 2},
          {{Side::Alice, 1, 2}, 1},
          {{Side::Bob, 2, 1}, 1},
          {{Side::Bob, 2, 2}, 2}};
}

namespace detail {

inline Rational coeff_as(const Rational& c, const Rational*) { return c; }
inline double coeff_as(const Rational& c, const double*) { return to_double(c); }

}  // namespace detail

/// Linear-form value of f on dist. The numeric type follows the distribution
/// backing. When f carries single-party terms the distribution must pass the
/// no-signaling check (otherwise the value would depend on the partner
/// setting); marginals are then taken with partner setting 1.
template <class S>
S evaluate(const BellFunctional& f, const JointDistribution<S>& dist,
           double tol = kDefaultTol) {
  if (!f.joint_only()) {
    const auto report = dist.check_no_signaling(tol);
    if (!report.pass)
      throw NoSignalingError("functional '" + f.name +
                             "' has single-party terms but the distribution "
                             "violates no-signaling (worst " +
                             std::to_string(report.worst) + ")");
  }
  S value{};
  for (const auto& [k, c] : f.joint)
    value += detail::coeff_as(c, static_cast<const S*>(nullptr)) * dist.flat(k);
  const auto add_marg = [&](Side side, const std::map<MarginalKey, Rational>& terms) {
    for (const auto& [key, c] : terms) {
      const MarginalSide m{side, Setting(key.setting), Outcome(key.outcome)};
      value += detail::coeff_as(c, static_cast<const S*>(nullptr)) *
               dist.marginal(m, Setting(1));
    }
  };
  add_marg(Side::Alice, f.alice_marg);
  add_marg(Side::Bob, f.bob_marg);
  return value;
}

}  // namespace qbell
