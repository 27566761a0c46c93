#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include <doctest.h>
#include <json.hpp>

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(FINSLERKIT_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "finslerkit-cli-test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

const nlohmann::json* find_check(const nlohmann::json& doc, const std::string& id) {
  for (const auto& c : doc["checks"])
    if (c["id"] == id) return &c;
  return nullptr;
}

} // namespace

TEST_CASE("list and usage errors") {
  const Run list = run("list");
  CHECK(list.status == 0);
  CHECK(list.out.find("example-2.5\t") != std::string::npos);

  CHECK(run("").status == 2);
  CHECK(run("verify no-such-example").status == 2);
  CHECK(run("--format xml list").status == 2);
  CHECK(run("frobnicate").status == 2);
  CHECK(run("--config /nonexistent.json verify").status == 2);
  CHECK(run("verify example-2 --c 0.3").status == 2);
}

TEST_CASE("invariant forms report") {
  const Run r = run("invariant-forms example-3");
  REQUIRE(r.status == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["suite"] == "invariant-forms");
  CHECK(doc["schema_version"] == 1);
  CHECK(doc["pass"] == true);
  CHECK(doc.contains("environment"));
  const auto* dim = find_check(doc, "invariant-forms/dimension");
  REQUIRE(dim != nullptr);
  CHECK((*dim)["measured"] == 1);
}

TEST_CASE("verify reports the dimension and is threshold stable") {
  const Run a = run("verify example-2.5 --c 0.4");
  REQUIRE(a.status == 0);
  const auto doc = nlohmann::json::parse(a.out);
  const auto* dim = find_check(doc, "dimension/value");
  REQUIRE(dim != nullptr);
  CHECK((*dim)["measured"] == 3);

  const Run b = run("verify example-2.5 --c 0.4 --sv-threshold 1e-5");
  REQUIRE(b.status == 0);
  const auto doc2 = nlohmann::json::parse(b.out);
  CHECK((*find_check(doc2, "dimension/value"))["measured"] == 3);
  CHECK(doc2["pass"] == true);
}

TEST_CASE("verify on the flat Kahler chart") {
  const Run r = run("verify example-3 --c 0.2");
  REQUIRE(r.status == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK((*find_check(doc, "dimension/value"))["measured"] == 8);
  CHECK(doc["pass"] == true);
}

TEST_CASE("verify output is byte-identical across runs") {
  const Run a = run("--seed 5 verify example-2");
  const Run b = run("--seed 5 verify example-2");
  CHECK(a.status == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("runtime") == std::string::npos);
}

TEST_CASE("CSV output, output files and timings") {
  const Run csv = run("--format csv curvature example-2.5-sphere");
  CHECK(csv.status == 0);
  CHECK(csv.out.rfind("id,inputs_digest,measured,expected,tolerance,comparison,pass,runtime\n", 0) == 0);

  const auto path = scratch("report.json");
  std::filesystem::remove(path);
  const Run file = run("--out " + path.string() + " --timings curvature example-2.5-sphere");
  CHECK(file.status == 0);
  CHECK(file.out.empty());
  std::ifstream in(path);
  const auto doc = nlohmann::json::parse(in);
  CHECK(doc["checks"][0].contains("runtime"));
}

TEST_CASE("failing checks exit with status 1") {
  const auto path = scratch("distance.json");
  write_file(path, R"({"example": "example-2", "distance": {"from": [0, 0], "to": [0.2, 0], "expected": 5.0}})");
  const Run r = run("--config " + path.string() + " distance");
  CHECK(r.status == 1);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["pass"] == false);
  const auto* value = find_check(doc, "distance/value");
  REQUIRE(value != nullptr);
  CHECK((*value)["measured"].get<double>() == doctest::Approx(0.26).epsilon(1e-6));
}

TEST_CASE("exported configurations reproduce a run") {
  const auto path = scratch("exported.json");
  const Run exported = run("--out " + path.string() + " export-config example-4");
  REQUIRE(exported.status == 0);
  const Run r = run("--config " + path.string() + " --format csv curvature");
  CHECK(r.status == 0);
  CHECK(r.out.find("curvature/sectional") != std::string::npos);
}

TEST_CASE("triangle with a flow map") {
  const auto path = scratch("triangle.json");
  write_file(path, R"({"example": "example-2.5", "triangle": {"count": 4, "flow_field": ["-x2", "x1"]}})");
  const Run r = run("--config " + path.string() + " triangle");
  CHECK(r.status == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(find_check(doc, "triangle/invariance") != nullptr);
}
