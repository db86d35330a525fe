#include "qbell/json_io.hpp"

#include "qbell/lhv.hpp"
#include "qbell/quantum.hpp"

#include <doctest.h>

using namespace qbell;
using nlohmann::json;

TEST_CASE("rational distribution round trip is exact") {
  const auto box = pr_box_qutrit();
  const json j = io::distribution_to_json(box);
  CHECK(j.at("numeric") == "rational");
  CHECK(j.at("p").size() == 36);
  CHECK(j.at("p")[0] == "1/3");
  CHECK(j.at("p")[1] == "0/1");
  const auto parsed = io::parse_distribution(j);
  const auto& back = std::get<JointDistributionQ>(parsed);
  for (int k = 1; k <= 36; ++k) CHECK(back.flat(k) == box.flat(k));
}

TEST_CASE("float distribution round trip") {
  const auto d = quantum::born_distribution(quantum::family_state(1.0),
                                            quantum::optimal_settings(0.0));
  const json j = io::distribution_to_json(d);
  CHECK(j.at("numeric") == "float");
  const auto parsed = io::parse_distribution(j);
  const auto& back = std::get<JointDistributionD>(parsed);
  for (int k = 1; k <= 36; ++k) CHECK(back.flat(k) == d.flat(k));
}

TEST_CASE("distribution parsing rejects malformed input") {
  CHECK_THROWS_AS(io::parse_distribution(json::array()), std::invalid_argument);
  CHECK_THROWS_AS(io::parse_distribution(json{{"numeric", "float"}}), std::invalid_argument);
  json wrong_size = {{"numeric", "float"}, {"p", json::array({0.5, 0.5})}};
  CHECK_THROWS_AS(io::parse_distribution(wrong_size), std::invalid_argument);
  json bad_backing = io::distribution_to_json(uniform_distribution());
  bad_backing["numeric"] = "decimal";
  CHECK_THROWS_AS(io::parse_distribution(bad_backing), std::invalid_argument);
  json bad_literal = io::distribution_to_json(uniform_distribution());
  bad_literal["p"][3] = "one/ninth";
  CHECK_THROWS_AS(io::parse_distribution(bad_literal), std::invalid_argument);
  json negative_den = io::distribution_to_json(uniform_distribution());
  negative_den["p"][3] = "1/-9";
  CHECK_THROWS_AS(io::parse_distribution(negative_den), std::invalid_argument);
  // An invalid distribution parses structurally but fails validation.
  json not_normalized = io::distribution_to_json(uniform_distribution());
  not_normalized["p"][0] = "1/3";
  CHECK_THROWS_AS(io::parse_distribution(not_normalized), DistributionError);
}

TEST_CASE("functional round trip keeps coefficients, bound, and singles") {
  const auto k3 = k3_functional();
  const json j = io::functional_to_json(k3);
  CHECK(j.at("name") == "K3");
  CHECK(j.at("bound") == "0/1");
  CHECK(j.at("joint").size() == 12);
  CHECK(j.at("alice_marg").size() == 2);
  CHECK(j.at("bob_marg").size() == 2);
  const auto back = io::functional_from_json(j);
  CHECK(back.name == k3.name);
  CHECK(back.bound == k3.bound);
  CHECK(back.joint == k3.joint);
  CHECK(back.alice_marg == k3.alice_marg);
  CHECK(back.bob_marg == k3.bob_marg);
}

TEST_CASE("solved expression serialization") {
  const auto sys = build_constraints();
  const auto solved = solve_for(sys, {2, 4, 9, 11, 13, 18, 20, 24, 25, 28, 32, 36});
  const json j = io::solved_expression_to_json(2, solved.at(2));
  CHECK(j.at("target") == 2);
  CHECK(j.at("constant") == "1/3");
  CHECK(j.at("terms")[0].at("var") == 1);
  CHECK(j.at("terms")[0].at("c") == "-2/3");
}

TEST_CASE("expression text rendering") {
  const auto sys = build_constraints();
  const auto solved = solve_for(sys, {3, 4, 8, 11, 15, 16, 21, 22, 26, 30, 31, 35});
  const std::string text = solved.at(22).to_text();
  CHECK(text.substr(0, 30) == "1/3 + 1/3*p1 - 1/3*p2 - 2/3*p5");
  AffineExpression zero;
  CHECK(zero.to_text() == "0");
  AffineExpression unitfirst;
  unitfirst.coeffs[1] = -1;
  unitfirst.coeffs[2] = 1;
  CHECK(unitfirst.to_text() == "-p1 + p2");
}
