#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "finsler/gallery.hpp"
#include "finsler/geodesic.hpp"
#include "finsler/report.hpp"
#include "finsler/symmetry.hpp"

namespace finsler {

/// Everything a suite run depends on. Loaded from a JSON document; any field
/// may be omitted and keeps the default shown here.
struct RunConfig {
  // Exactly one of `example` (a registered gallery name) or `entry`.
  std::string example;
  std::optional<GallerySpec> entry;

  std::uint64_t seed = 1;
  std::optional<double> c; // overrides the entry's c

  int directions_2d = 512;
  int directions_3d = 2562;
  int directions_4d = 10000;

  // almost-Killing solve
  int degree = 2;
  double sv_threshold = 1e-6;
  int sample_factor = 5;
  bool cross_validate = true;
  double flow_time = 0.3;
  int flow_steps = 64;
  int cross_triples = 10;
  double cross_tolerance = 1e-4;

  // distances
  DistanceOptions distance{32, 40, true};
  std::optional<Vector> from, to;
  std::optional<double> expected_distance;

  // triangular function
  int triples = 20;
  double triple_fraction = 0.6;
  std::vector<TripleSample> triple_list;
  std::vector<std::string> flow_field; // map = time-`flow_time` flow of this field
  double triangle_tolerance = 1e-4;
  // f in F -> F + df; empty selects amplitude * sin(x1 + x2) scaled to the margin
  std::string projective_potential;

  int curvature_planes = 50;
  std::string subalgebra = "u2"; // so2 | so3 | so4 | u2
  std::optional<Vector> point;   // betterment base point (default: box center)
  std::optional<Vector> sigma;   // betterment covector for the invariance check

  bool timings = false;
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
Json config_to_json(const RunConfig& config);

Json spec_to_json(const GallerySpec& spec);
GallerySpec spec_from_json(const Json& j);

// The gallery spec a run refers to, with the c override applied.
GallerySpec resolve_spec(const RunConfig& config);

// Direction count for dimension n from the configured grid sizes.
int direction_count(const RunConfig& config, int n);

} // namespace finsler
