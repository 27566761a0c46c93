#pragma once

#include <string>
#include <vector>

#include "finsler/config.hpp"
#include "finsler/report.hpp"

namespace finsler {

// verify, betterment, dimension, distance, curvature, invariant-forms, triangle
const std::vector<std::string>& suite_names();

// Runs one suite. Unknown names and unusable configurations raise
// ErrorKind::Usage; numerical failures become failing check records.
VerificationReport run_suite(const std::string& suite, const RunConfig& config);

VerificationReport run_verify(const RunConfig& config);
VerificationReport run_betterment(const RunConfig& config);
VerificationReport run_dimension(const RunConfig& config);
VerificationReport run_distance(const RunConfig& config);
VerificationReport run_curvature(const RunConfig& config);
VerificationReport run_invariant_forms(const RunConfig& config);
VerificationReport run_triangle(const RunConfig& config);

} // namespace finsler
