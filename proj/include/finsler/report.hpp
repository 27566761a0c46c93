#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace finsler {

using Json = nlohmann::ordered_json;

enum class Comparison { AtMost, Equal, Above };
const char* to_string(Comparison c);

struct CheckRecord {
  std::string id;
  std::string inputs_digest;
  double measured = 0.0;
  std::optional<double> expected;
  double tolerance = 0.0;
  Comparison comparison = Comparison::AtMost;
  bool pass = false;
  std::optional<double> runtime;
  std::string note;
  Json details = Json::object();
};

// measured <= tolerance (NaN fails).
CheckRecord check_at_most(std::string id, const Json& inputs, double measured, double tolerance);
// |measured - expected| <= tolerance.
CheckRecord check_near(std::string id, const Json& inputs, double measured, double expected, double tolerance);
// measured > bound.
CheckRecord check_above(std::string id, const Json& inputs, double measured, double bound);
// A check that could not be evaluated.
CheckRecord check_error(std::string id, const Json& inputs, const std::string& message);

struct VerificationReport {
  std::string suite;
  int schema_version = 1;
  Json environment = Json::object();
  std::vector<CheckRecord> checks;

  bool pass() const;
  void sort_checks();
  std::string to_json(bool include_details = true) const;
  // One row per check; details are not part of the CSV form.
  std::string to_csv() const;
};

std::string fnv1a_hex(std::string_view data);
// Digest of the canonical JSON dump.
std::string inputs_digest(const Json& inputs);

} // namespace finsler
