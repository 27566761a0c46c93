#include "finsler/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <sstream>

namespace finsler {

const char* to_string(Comparison c) {
  switch (c) {
  case Comparison::AtMost: return "<=";
  case Comparison::Equal: return "==";
  case Comparison::Above: return ">";
  }
  return "?";
}

namespace {

CheckRecord base_record(std::string id, const Json& inputs) {
  CheckRecord r;
  r.id = std::move(id);
  r.inputs_digest = inputs_digest(inputs);
  return r;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// JSON has no representation for non-finite numbers.
Json number_or_string(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

} // namespace

CheckRecord check_at_most(std::string id, const Json& inputs, double measured, double tolerance) {
  CheckRecord r = base_record(std::move(id), inputs);
  r.measured = measured;
  r.tolerance = tolerance;
  r.comparison = Comparison::AtMost;
  r.pass = measured <= tolerance;
  return r;
}

CheckRecord check_near(std::string id, const Json& inputs, double measured, double expected, double tolerance) {
  CheckRecord r = base_record(std::move(id), inputs);
  r.measured = measured;
  r.expected = expected;
  r.tolerance = tolerance;
  r.comparison = tolerance == 0.0 ? Comparison::Equal : Comparison::AtMost;
  r.pass = std::abs(measured - expected) <= tolerance;
  return r;
}

CheckRecord check_above(std::string id, const Json& inputs, double measured, double bound) {
  CheckRecord r = base_record(std::move(id), inputs);
  r.measured = measured;
  r.tolerance = bound;
  r.comparison = Comparison::Above;
  r.pass = measured > bound;
  return r;
}

CheckRecord check_error(std::string id, const Json& inputs, const std::string& message) {
  CheckRecord r = base_record(std::move(id), inputs);
  r.measured = std::nan("");
  r.pass = false;
  r.note = message;
  return r;
}

bool VerificationReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.pass; });
}

void VerificationReport::sort_checks() {
  std::stable_sort(checks.begin(), checks.end(),
                   [](const CheckRecord& a, const CheckRecord& b) { return a.id < b.id; });
}

std::string VerificationReport::to_json(bool include_details) const {
  Json doc;
  doc["suite"] = suite;
  doc["schema_version"] = schema_version;
  doc["environment"] = environment;
  Json list = Json::array();
  for (const CheckRecord& c : checks) {
    Json j;
    j["id"] = c.id;
    j["inputs_digest"] = c.inputs_digest;
    j["measured"] = number_or_string(c.measured);
    if (c.expected) j["expected"] = number_or_string(*c.expected);
    j["tolerance"] = number_or_string(c.tolerance);
    j["comparison"] = to_string(c.comparison);
    j["pass"] = c.pass;
    if (c.runtime) j["runtime"] = *c.runtime;
    if (!c.note.empty()) j["note"] = c.note;
    if (include_details && !c.details.empty()) j["details"] = c.details;
    list.push_back(std::move(j));
  }
  doc["checks"] = std::move(list);
  doc["pass"] = pass();
  return doc.dump(2) + "\n";
}

std::string VerificationReport::to_csv() const {
  std::ostringstream os;
  os << "id,inputs_digest,measured,expected,tolerance,comparison,pass,runtime\n";
  for (const CheckRecord& c : checks) {
    os << c.id << "," << c.inputs_digest << "," << format_number(c.measured) << ","
       << (c.expected ? format_number(*c.expected) : "") << "," << format_number(c.tolerance) << ","
       << to_string(c.comparison) << "," << (c.pass ? "true" : "false") << ","
       << (c.runtime ? format_number(*c.runtime) : "") << "\n";
  }
  return os.str();
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return buf;
}

std::string inputs_digest(const Json& inputs) { return fnv1a_hex(inputs.dump()); }

} // namespace finsler
