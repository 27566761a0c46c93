#include <cmath>
#include <numbers>

#include <doctest.h>

#include "finsler/config.hpp"
#include "finsler/expr.hpp"
#include "finsler/report.hpp"

using namespace finsler;

namespace {

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::Usage;
}

} // namespace

TEST_CASE("expression evaluation") {
  const Vector x = v2(0.5, -2.0);
  CHECK(Expression::parse("1 + 2*3")(x) == 7.0);
  CHECK(Expression::parse("2^3^2")(x) == 512.0);
  CHECK(Expression::parse("-x1^2")(x) == -0.25);
  CHECK(Expression::parse("(x + y) / 2")(x) == -0.75);
  CHECK(Expression::parse("sin(pi/2) + cos(0) + exp(0) + sqrt(16)")(x) == doctest::Approx(7.0));
  CHECK(Expression::parse("1e-1 * x2")(x) == doctest::Approx(-0.2));
  CHECK(Expression::parse("3").max_variable() == 0);
  CHECK(Expression::parse("x1 + x4").max_variable() == 4);
  CHECK(Expression::parse("w").max_variable() == 4);
  CHECK(Expression::parse("x2*x1").source() == "x2*x1");
}

TEST_CASE("expression parse errors are usage errors") {
  for (const char* bad : {"", "1 +", "(x1", "foo(x1)", "x0", "2 $ 3", "sin x1"})
    CHECK(kind_of([&] { Expression::parse(bad); }) == ErrorKind::Usage);
}

TEST_CASE("expression gradients") {
  const OneFormField df = expression_gradient(Expression::parse("sin(x1) * x2^2"));
  const Vector x = v2(0.3, 0.7);
  const Vector g = df(x);
  CHECK(g[0] == doctest::Approx(std::cos(0.3) * 0.49).epsilon(1e-10));
  CHECK(g[1] == doctest::Approx(std::sin(0.3) * 1.4).epsilon(1e-10));
}

TEST_CASE("configuration parsing") {
  const RunConfig cfg = parse_config(R"({
    "example": "example-2.5",
    "seed": 9,
    "c": 0.3,
    "grids": {"directions_2d": 256},
    "symmetry": {"sv_threshold": 1e-5, "cross_validate": false},
    "distance": {"segments": 8, "from": [0, 0], "to": [0.1, 0.2], "expected": 0.5},
    "triangle": {"triples": [[[0, 0], [0.1, 0], [0.1, 0.1]]], "flow_field": ["-x2", "x1"]},
    "invariant_forms": {"subalgebra": "so3"}
  })");
  CHECK(cfg.example == "example-2.5");
  CHECK(cfg.seed == 9);
  CHECK(cfg.c == 0.3);
  CHECK(cfg.directions_2d == 256);
  CHECK(cfg.directions_4d == 10000);
  CHECK(cfg.sv_threshold == 1e-5);
  CHECK_FALSE(cfg.cross_validate);
  CHECK(cfg.distance.segments == 8);
  CHECK(cfg.distance.extrapolate);
  CHECK((*cfg.to - v2(0.1, 0.2)).norm() == 0.0);
  CHECK(cfg.expected_distance == 0.5);
  REQUIRE(cfg.triple_list.size() == 1);
  CHECK(cfg.triple_list[0].r == v2(0.1, 0.1));
  CHECK(cfg.flow_field.size() == 2);
  CHECK(cfg.subalgebra == "so3");
  CHECK(resolve_spec(cfg).c == 0.3);
}

TEST_CASE("configuration errors") {
  CHECK(kind_of([] { parse_config("{"); }) == ErrorKind::Usage);
  CHECK(kind_of([] { parse_config("[]"); }) == ErrorKind::Usage);
  CHECK(kind_of([] { parse_config(R"({"unknown": 1})"); }) == ErrorKind::Usage);
  CHECK(kind_of([] { parse_config(R"({"grids": {"directions_5d": 3}})"); }) == ErrorKind::Usage);
  CHECK(kind_of([] { parse_config(R"({"seed": "x"})"); }) == ErrorKind::Usage);
  CHECK(kind_of([] { parse_config(R"({"example": "a", "entry": {"family": "custom"}})"); }) == ErrorKind::Usage);
  CHECK(kind_of([] { load_config("/nonexistent/config.json"); }) == ErrorKind::Usage);
  CHECK(kind_of([] { resolve_spec(RunConfig{}); }) == ErrorKind::Usage);
  RunConfig closed;
  closed.example = "example-2";
  closed.c = 0.1;
  CHECK(kind_of([&] { resolve_spec(closed); }) == ErrorKind::Usage);
}

TEST_CASE("configuration round trip") {
  RunConfig cfg;
  cfg.entry = gallery_spec("example-3-fs");
  cfg.seed = 77;
  cfg.from = v2(0.1, 0.2);
  cfg.projective_potential = "0.1*sin(x1)";
  const Json j = config_to_json(cfg);
  const RunConfig back = parse_config(j.dump());
  CHECK(config_to_json(back) == j);
  CHECK(back.entry->family == "fubini-study-4d");
  CHECK(spec_from_json(spec_to_json(*cfg.entry)).c == cfg.entry->c);
}

TEST_CASE("direction counts by dimension") {
  RunConfig cfg;
  CHECK(direction_count(cfg, 2) == 512);
  CHECK(direction_count(cfg, 3) == 2562);
  CHECK(kind_of([&] { direction_count(cfg, 5); }) == ErrorKind::Usage);
}

TEST_CASE("check records") {
  const Json inputs = {{"a", 1}};
  CHECK(check_at_most("x", inputs, 0.5, 1.0).pass);
  CHECK_FALSE(check_at_most("x", inputs, std::nan(""), 1.0).pass);
  CHECK(check_near("x", inputs, 3.0, 3.0, 0.0).comparison == Comparison::Equal);
  CHECK_FALSE(check_near("x", inputs, 3.0, 4.0, 0.5).pass);
  CHECK(check_above("x", inputs, 2.0, 1.0).pass);
  const CheckRecord err = check_error("x", inputs, "boom");
  CHECK_FALSE(err.pass);
  CHECK(err.note == "boom");
  CHECK(check_at_most("x", inputs, 0, 1).inputs_digest == inputs_digest(inputs));
  CHECK(inputs_digest(inputs) != inputs_digest(Json{{"a", 2}}));
}

TEST_CASE("FNV-1a reference values") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("report serialization") {
  VerificationReport r;
  r.suite = "demo";
  r.environment = {{"seed", 1}};
  r.checks.push_back(check_at_most("b/second", {}, 0.25, 1.0));
  r.checks.push_back(check_error("a/first", {}, "failed"));
  r.sort_checks();
  CHECK(r.checks.front().id == "a/first");
  CHECK_FALSE(r.pass());

  const Json doc = Json::parse(r.to_json());
  CHECK(doc["suite"] == "demo");
  CHECK(doc["schema_version"] == 1);
  CHECK(doc["pass"] == false);
  CHECK(doc["checks"][0]["measured"] == "nan");
  CHECK(doc["checks"][1]["measured"] == 0.25);
  CHECK_FALSE(doc["checks"][1].contains("runtime"));
  CHECK(r.to_json() == r.to_json());

  const std::string csv = r.to_csv();
  CHECK(csv.rfind("id,inputs_digest,measured,expected,tolerance,comparison,pass,runtime\n", 0) == 0);
  CHECK(csv.find("b/second," + inputs_digest({}) + ",0.25,,1,<=,true,\n") != std::string::npos);
}
