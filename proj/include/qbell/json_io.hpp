#pragma once

// JSON schemas shared with the CLI.
//
// JointDistribution: {"numeric": "rational"|"float",
//                     "p": [36 entries, flat index 1 at position 0]}
//   rational entries are "n/d" strings, float entries are numbers.
// BellFunctional: {"name": ..., "bound": "n/d",
//                  "joint": [{"i","j","a","b","c":"n/d"}, ...],
//                  "alice_marg": [{"setting","outcome","c":"n/d"}, ...],
//                  "bob_marg": [...]}
// Solved expression: {"target": k, "constant": "n/d",
//                     "terms": [{"var": k, "c": "n/d"}, ...]}

#include "qbell/functionals.hpp"
#include "qbell/ns_algebra.hpp"
#include "qbell/prob_core.hpp"
#include "qbell/rational.hpp"

#include <json.hpp>

#include <array>
#include <stdexcept>
#include <string>
#include <variant>

namespace qbell::io {

using nlohmann::json;

inline json distribution_to_json(const JointDistributionQ& dist) {
  json arr = json::array();
  for (const auto& v : dist.entries()) arr.push_back(to_fraction_string(v));
  return json{{"numeric", "rational"}, {"p", std::move(arr)}};
}

inline json distribution_to_json(const JointDistributionD& dist) {
  json arr = json::array();
  for (double v : dist.entries()) arr.push_back(v);
  return json{{"numeric", "float"}, {"p", std::move(arr)}};
}

using DistributionVariant = std::variant<JointDistributionQ, JointDistributionD>;

inline DistributionVariant parse_distribution(const json& j, double tol = kDefaultTol) {
  if (!j.is_object() || !j.contains("numeric") || !j.contains("p"))
    throw std::invalid_argument("distribution JSON needs fields \"numeric\" and \"p\"");
  const auto& arr = j.at("p");
  if (!arr.is_array() || arr.size() != 36)
    throw std::invalid_argument("field \"p\" must be an array of 36 entries");
  const std::string numeric = j.at("numeric").get<std::string>();
  if (numeric == "rational") {
    std::array<Rational, 36> p;
    for (int k = 0; k < 36; ++k) {
      const auto& v = arr[k];
      if (v.is_string())
        p[k] = rational_from_string(v.get<std::string>());
      else if (v.is_number_integer())
        p[k] = Rational(v.get<long long>());
      else
        throw std::invalid_argument("rational entries must be \"n/d\" strings");
    }
    return JointDistributionQ::validated(std::move(p), tol);
  }
  if (numeric == "float") {
    std::array<double, 36> p{};
    for (int k = 0; k < 36; ++k) {
      if (!arr[k].is_number())
        throw std::invalid_argument("float entries must be numbers");
      p[k] = arr[k].get<double>();
    }
    return JointDistributionD::validated(p, tol);
  }
  throw std::invalid_argument("field \"numeric\" must be \"rational\" or \"float\"");
}

inline json functional_to_json(const BellFunctional& f) {
  json joint = json::array();
  for (const auto& [k, c] : f.joint) {
    const JointKey key = unflatten(k);
    joint.push_back(json{{"i", key.i},
                         {"j", key.j},
                         {"a", key.a},
                         {"b", key.b},
                         {"c", to_fraction_string(c)}});
  }
  const auto marg_array = [](const std::map<MarginalKey, Rational>& m) {
    json arr = json::array();
    for (const auto& [key, c] : m)
      arr.push_back(json{{"setting", key.setting},
                         {"outcome", key.outcome},
                         {"c", to_fraction_string(c)}});
    return arr;
  };
  return json{{"name", f.name},
              {"bound", to_fraction_string(f.bound)},
              {"joint", std::move(joint)},
              {"alice_marg", marg_array(f.alice_marg)},
              {"bob_marg", marg_array(f.bob_marg)}};
}

inline BellFunctional functional_from_json(const json& j) {
  BellFunctional f;
  f.name = j.at("name").get<std::string>();
  f.bound = rational_from_string(j.at("bound").get<std::string>());
  for (const auto& t : j.at("joint"))
    f.add_joint(t.at("i").get<int>(), t.at("j").get<int>(), t.at("a").get<int>(),
                t.at("b").get<int>(), rational_from_string(t.at("c").get<std::string>()));
  const auto read_marg = [&](const char* field, Side side) {
    if (!j.contains(field)) return;
    for (const auto& t : j.at(field))
      f.add_marginal(side, t.at("setting").get<int>(), t.at("outcome").get<int>(),
                     rational_from_string(t.at("c").get<std::string>()));
  };
  read_marg("alice_marg", Side::Alice);
  read_marg("bob_marg", Side::Bob);
  return f;
}

inline json solved_expression_to_json(int target, const AffineExpression& e) {
  json terms = json::array();
  for (const auto& [var, c] : e.coeffs)
    terms.push_back(json{{"var", var}, {"c", to_fraction_string(c)}});
  return json{{"target", target},
              {"constant", to_fraction_string(e.constant)},
              {"terms", std::move(terms)}};
}

}  // namespace qbell::io
