// qbell: CH/CHSH Bell-inequality toolkit for two three-level systems.
//
// Subcommands: derive, equivalence, bounds, scan, thresholds, prbox, lpcheck.
// Exit codes: 0 ok; 1 domain error (unsolvable selection, no violation, or
// NOT EQUIVALENT with --expect-equivalent); 2 parse/input error; 3 invalid
// distribution; 4 no-signaling failure.

#include "qbell/functionals.hpp"
#include "qbell/json_io.hpp"
#include "qbell/lhv.hpp"
#include "qbell/ns_algebra.hpp"
#include "qbell/prob_core.hpp"
#include "qbell/quantum.hpp"
#include "qbell/rational.hpp"
#include "qbell/robustness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace {

using namespace qbell;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitInput = 2;
constexpr int kExitInvalidDistribution = 3;
constexpr int kExitNoSignaling = 4;

std::string fmt6(double v) {
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double deg_to_rad(double deg) { return deg * quantum::kPi / 180.0; }
double rad_to_deg(double rad) { return rad * 180.0 / quantum::kPi; }

// ---------------------------------------------------------------------------
// functional name resolution

std::optional<std::vector<int>> parse_paren_ints(const std::string& name,
                                                 const std::string& prefix) {
  if (name.rfind(prefix + "(", 0) != 0 || name.back() != ')') return std::nullopt;
  std::vector<int> out;
  std::string inner = name.substr(prefix.size() + 1, name.size() - prefix.size() - 2);
  std::istringstream is(inner);
  std::string tok;
  while (std::getline(is, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

struct ResolvedFunctional {
  BellFunctional f;
  ExpansionChoice expansion;
};

ResolvedFunctional resolve_functional(const std::string& name) {
  if (name == "I3") return {i3_functional(), {}};
  if (name == "I3p") return {i3_prime_functional(), {}};
  if (name == "K3") return {k3_functional(), k3_compact_choice()};
  if (name == "K3p") return {k3_prime_functional(), k3_prime_compact_choice()};
  if (name == "W3") return {w3_functional(), w3_compact_choice()};
  if (auto c = parse_paren_ints(name, "CGLMP")) {
    if (c->size() != 4) throw std::invalid_argument("CGLMP takes four parameters");
    return {cglmp_functional(CGLMPChoice{(*c)[0], (*c)[1], (*c)[2], (*c)[3]}), {}};
  }
  if (auto w = parse_paren_ints(name, "W")) {
    if (w->size() != 4) throw std::invalid_argument("W takes four parameters");
    return {w_family_functional(WFamilyChoice{(*w)[0], (*w)[1], (*w)[2], (*w)[3]}), {}};
  }
  std::ifstream in(name);
  if (!in) throw std::invalid_argument("unknown functional '" + name +
                                       "' (not a built-in name or a readable file)");
  ResolvedFunctional r{io::functional_from_json(json::parse(in)), {}};
  return r;
}

BellFunctional joint_form(const ResolvedFunctional& r) {
  if (r.f.joint_only()) return r.f;
  const ExpansionChoice choice =
      r.expansion.empty() ? default_expansion_choice(r.f) : r.expansion;
  return expand_marginals(r.f, choice);
}

// ---------------------------------------------------------------------------
// subcommands

int run_derive(const std::vector<int>& targets, const std::string& format) {
  const auto sys = build_constraints();
  const auto solved = solve_for(sys, targets);
  if (format == "json") {
    json arr = json::array();
    for (const auto& [t, expr] : solved) arr.push_back(io::solved_expression_to_json(t, expr));
    std::cout << arr.dump(2) << "\n";
  } else {
    for (const auto& [t, expr] : solved)
      std::cout << "p" << t << " = " << expr.to_text() << "\n";
  }
  return kExitOk;
}

int run_equivalence(const std::string& fname, const std::string& gname,
                    bool expect_equivalent) {
  const auto rf = resolve_functional(fname);
  const auto rg = resolve_functional(gname);
  const auto fj = joint_form(rf);
  const auto gj = joint_form(rg);
  const auto sys = build_constraints();
  const auto rel = affine_relation(sys, fj, gj);
  if (rel) {
    std::cout << rf.f.name << " = " << to_plain_string(rel->second) << " + "
              << to_plain_string(rel->first) << "*" << rg.f.name
              << " (modulo no-signaling)\n";
    return kExitOk;
  }
  // No relation: show the leftover of the canonical candidate. For a
  // CH/CHSH-type pair (bounds 0 and 2) the candidate is CH = (CHSH - 2)/3;
  // otherwise compare the pair directly.
  const std::vector<int> elimination = {3, 4, 8, 11, 15, 16, 21, 22, 26, 30, 31, 35};
  const bool ch_chsh = (fj.bound == 0 && gj.bound == 2) || (fj.bound == 2 && gj.bound == 0);
  const BellFunctional& ch = fj.bound == 0 ? fj : gj;
  const BellFunctional& chsh = fj.bound == 0 ? gj : fj;
  const Rational scale = ch_chsh ? Rational(1, 3) : Rational(1);
  const Rational offset = ch_chsh ? Rational(-2, 3) : Rational(0);
  const auto left = ch_chsh ? residual(sys, ch, chsh, scale, offset, elimination)
                            : residual(sys, fj, gj, scale, offset, elimination);
  std::cout << "NOT EQUIVALENT (modulo no-signaling)\n";
  if (ch_chsh)
    std::cout << "candidate " << ch.name << " = (" << chsh.name << " - 2)/3;";
  else
    std::cout << "candidate " << fj.name << " = " << gj.name << ";";
  std::cout << " elimination targets";
  for (int t : elimination) std::cout << " p" << t;
  std::cout << "\nresidual: " << left.to_text() << "\n";
  return expect_equivalent ? kExitDomain : kExitOk;
}

int run_bounds(const std::string& family) {
  std::vector<BellFunctional> members;
  if (family == "cglmp") {
    for (const auto& c : enumerate_cglmp()) members.push_back(cglmp_functional(c));
  } else if (family == "wfamily") {
    for (const auto& w : enumerate_w_family()) members.push_back(w_family_functional(w));
  } else if (family == "named") {
    members = {i3_functional(), k3_functional(), w3_functional(), k3_prime_functional(),
               i3_prime_functional()};
  } else {
    throw std::invalid_argument("unknown family '" + family + "'");
  }
  std::cout << "name,classical_bound,n_maximizers\n";
  for (const auto& f : members) {
    const auto bound = lhv::classical_bound(f);
    std::cout << f.name << "," << to_plain_string(bound.max) << ","
              << bound.maximizers.size() << "\n";
  }
  return kExitOk;
}

int run_scan(double theta_min, double theta_max, double step, bool radians) {
  if (!(step > 0)) throw std::invalid_argument("step must be positive");
  if (radians) {
    theta_min = rad_to_deg(theta_min);
    theta_max = rad_to_deg(theta_max);
    step = rad_to_deg(step);
  }
  std::cout << "theta_deg,I3,K3,i3_minus_2_minus_3k3\n";
  for (int k = 0;; ++k) {
    const double deg = theta_min + k * step;
    if (deg > theta_max + 1e-9) break;
    const double theta = deg_to_rad(deg);
    const double i3 = quantum::i3_optimal(theta);
    const double k3 = quantum::k3_optimal(theta);
    std::cout << fmt6(deg) << "," << fmt6(i3) << "," << fmt6(k3) << ","
              << fmt6(i3 - 2.0 - 3.0 * k3) << "\n";
  }
  return kExitOk;
}

int run_thresholds(const std::string& mode, double step_deg, double eta_step) {
  if (mode == "optimum") {
    const auto best = quantum::maximize_violation(quantum::PhaseFamily::OptimalSettings);
    std::cout << "lambda_min,eta_ch,eta_chsh,I3_max,theta_max_deg\n";
    std::cout << fmt6(robust::noise_threshold(best.i3_max)) << ","
              << fmt6(robust::efficiency_threshold_ch(best.i3_max)) << ","
              << fmt6(robust::efficiency_threshold_chsh(best.i3_max)) << ","
              << fmt6(best.i3_max) << "," << fmt6(rad_to_deg(best.theta_max)) << "\n";
    return kExitOk;
  }
  if (mode == "eta_curve") {
    if (!(step_deg > 0)) throw std::invalid_argument("step must be positive");
    const double lo_deg = rad_to_deg(quantum::violation_interval_lower());
    const double hi_deg = 90.0;
    std::cout << "theta_deg,I3,K3,lambda_min,eta_ch,eta_chsh\n";
    for (int k = static_cast<int>(lo_deg / step_deg) + 1;; ++k) {
      const double deg = k * step_deg;
      if (deg >= hi_deg - 1e-9) break;
      const auto report = robust::threshold_report(deg_to_rad(deg));
      std::cout << fmt6(deg) << "," << fmt6(report.i3) << ","
                << fmt6(quantum::k3_optimal(report.theta)) << ","
                << fmt6(report.lambda_min) << "," << fmt6(report.eta_ch) << ","
                << fmt6(report.eta_chsh) << "\n";
    }
    return kExitOk;
  }
  if (mode == "eta_scan_fig2") {
    if (!(eta_step > 0)) throw std::invalid_argument("eta-step must be positive");
    const double theta = quantum::theta_of_maximal_violation();
    const auto born =
        quantum::born_distribution(quantum::family_state(theta), quantum::optimal_settings(0.0));
    const double i3 = evaluate(i3_functional(), born);
    const double k3 = (i3 - 2.0) / 3.0;
    std::cout << "eta,I3_eta,K3_eta,S3\n";
    for (int k = 0;; ++k) {
      const double eta = k * eta_step;
      if (eta > 1.0 + 1e-12) break;
      const robust::Efficiency e(std::min(eta, 1.0));
      const auto scaled = robust::eta_scaled_values(i3, k3, e);
      const double s3 = robust::s3_value(robust::extended_distribution(born, e));
      std::cout << fmt6(e.eta) << "," << fmt6(scaled.i3_eta) << "," << fmt6(scaled.k3_eta)
                << "," << fmt6(s3) << "\n";
    }
    return kExitOk;
  }
  throw std::invalid_argument("unknown mode '" + mode + "'");
}

int run_prbox() {
  std::cout << io::distribution_to_json(pr_box_qutrit()).dump(2) << "\n";
  return kExitOk;
}

int run_lpcheck(const std::string& path, bool dump_weights, double tol) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot open '" << path << "'\n";
    return kExitInput;
  }
  json parsed;
  try {
    parsed = json::parse(in);
  } catch (const json::parse_error& e) {
    std::cerr << "JSON parse error: " << e.what() << "\n";
    return kExitInput;
  }
  const auto dist = io::parse_distribution(parsed, tol);

  const auto ns = std::visit([&](const auto& d) { return d.check_no_signaling(tol); }, dist);
  if (!ns.pass) {
    std::cerr << "distribution violates no-signaling (worst " << fmt6(ns.worst) << ")\n";
    return kExitNoSignaling;
  }

  json weights_out = json::array();
  bool local = false;
  if (std::holds_alternative<JointDistributionQ>(dist)) {
    const auto result = lhv::lp_membership(std::get<JointDistributionQ>(dist), tol);
    local = result.local;
    for (const auto& w : result.weights) weights_out.push_back(to_fraction_string(w));
  } else {
    const auto result = lhv::lp_membership(std::get<JointDistributionD>(dist), tol);
    local = result.local;
    for (const auto& w : result.weights) weights_out.push_back(w);
  }
  std::cout << (local ? "local" : "nonlocal") << "\n";
  if (local && dump_weights) std::cout << weights_out.dump() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CH/CHSH Bell-inequality toolkit for two three-level systems"};
  app.require_subcommand(1);
  app.footer("Exit codes: 0 ok, 1 domain error, 2 parse/input error, "
             "3 invalid distribution, 4 no-signaling failure.");

  auto* derive = app.add_subcommand(
      "derive", "Solve the normalization + no-signaling system for 12 targets");
  std::vector<int> targets;
  std::string format = "text";
  derive->add_option("--targets", targets, "12 flat indices in 1..36")
      ->required()
      ->delimiter(',');
  derive->add_option("--format", format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));

  auto* equivalence = app.add_subcommand(
      "equivalence", "Decide whether two functionals are affinely related "
                     "modulo no-signaling");
  std::string fname, gname;
  bool expect_equivalent = false;
  equivalence->add_option("f", fname, "first functional (built-in name or JSON file)")
      ->required();
  equivalence->add_option("g", gname, "second functional")->required();
  equivalence->add_flag("--expect-equivalent", expect_equivalent,
                        "exit 1 when no relation exists");

  auto* bounds = app.add_subcommand("bounds", "Brute-force classical bounds");
  std::string family;
  bounds->add_option("--family", family, "cglmp, wfamily, or named")
      ->required()
      ->check(CLI::IsMember({"cglmp", "wfamily", "named"}));

  auto* scan = app.add_subcommand("scan", "I3 and K3 along the optimal settings");
  double theta_min = 0.0, theta_max = 180.0, step = 1.0;
  bool radians = false;
  scan->add_option("--theta-min", theta_min, "start angle (degrees)");
  scan->add_option("--theta-max", theta_max, "end angle (degrees)");
  scan->add_option("--step", step, "step (degrees)");
  scan->add_flag("--radians", radians, "interpret the inputs as radians");

  auto* thresholds = app.add_subcommand("thresholds", "Noise/efficiency thresholds");
  std::string mode;
  double curve_step = 0.5, eta_step = 0.01;
  thresholds->add_option("--mode", mode, "optimum, eta_curve, or eta_scan_fig2")
      ->required()
      ->check(CLI::IsMember({"optimum", "eta_curve", "eta_scan_fig2"}));
  thresholds->add_option("--step", curve_step, "theta step for eta_curve (degrees)");
  thresholds->add_option("--eta-step", eta_step, "eta step for eta_scan_fig2");

  app.add_subcommand("prbox", "Emit the maximal no-signaling distribution as JSON");

  auto* lpcheck = app.add_subcommand("lpcheck", "Local-polytope membership of a "
                                                "distribution file");
  std::string dist_file;
  bool dump_weights = false;
  double tol = kDefaultTol;
  lpcheck->add_option("file", dist_file, "distribution JSON file")->required();
  lpcheck->add_flag("--weights", dump_weights, "print the mixture weights when local");
  lpcheck->add_option("--tol", tol, "tolerance for float input");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitInput;
  }

  try {
    if (app.got_subcommand("derive")) return run_derive(targets, format);
    if (app.got_subcommand("equivalence"))
      return run_equivalence(fname, gname, expect_equivalent);
    if (app.got_subcommand("bounds")) return run_bounds(family);
    if (app.got_subcommand("scan")) return run_scan(theta_min, theta_max, step, radians);
    if (app.got_subcommand("thresholds")) return run_thresholds(mode, curve_step, eta_step);
    if (app.got_subcommand("prbox")) return run_prbox();
    if (app.got_subcommand("lpcheck")) return run_lpcheck(dist_file, dump_weights, tol);
  } catch (const UnsolvableSelection& e) {
    std::cerr << e.what() << "\n";
    return kExitDomain;
  } catch (const robust::NoViolationError& e) {
    std::cerr << e.what() << "\n";
    return kExitDomain;
  } catch (const lhv::LpError& e) {
    std::cerr << e.what() << "\n";
    return kExitDomain;
  } catch (const NoSignalingError& e) {
    std::cerr << e.what() << "\n";
    return kExitNoSignaling;
  } catch (const DistributionError& e) {
    std::cerr << e.what() << "\n";
    return kExitInvalidDistribution;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}
