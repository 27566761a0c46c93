#include "finsler/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace finsler {

namespace {

[[noreturn]] void usage(const std::string& message) { throw Error(ErrorKind::Usage, "config: " + message); }

void reject_unknown(const Json& j, const std::set<std::string>& known, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) usage("unknown key '" + it.key() + "' in " + where);
}

template <class T>
void read(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    usage(std::string("field '") + key + "' has the wrong type");
  }
}

Vector read_vector(const Json& j, const std::string& what) {
  if (!j.is_array()) usage(what + " must be an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) usage(what + " must be an array of numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

} // namespace

Json spec_to_json(const GallerySpec& s) {
  Json j;
  j["family"] = s.family;
  j["kind"] = s.kind;
  j["c"] = s.c;
  j["dimension"] = s.dimension;
  if (!s.potential.empty()) j["potential"] = s.potential;
  if (!s.diagonal.empty()) j["diagonal"] = s.diagonal;
  if (!s.metric_expressions.empty()) j["metric"] = s.metric_expressions;
  if (!s.form_expressions.empty()) j["one_form"] = s.form_expressions;
  if (s.expected_dimension) j["expected_dimension"] = *s.expected_dimension;
  if (s.half_width) j["half_width"] = *s.half_width;
  j["fd_step"] = s.fd_step;
  return j;
}

GallerySpec spec_from_json(const Json& j) {
  if (!j.is_object()) usage("entry must be an object");
  reject_unknown(j, {"family", "kind", "c", "dimension", "potential", "diagonal", "metric", "one_form",
                     "expected_dimension", "half_width", "fd_step"},
                 "entry");
  GallerySpec s;
  if (!j.contains("family")) usage("entry needs a family");
  read(j, "family", s.family);
  read(j, "kind", s.kind);
  read(j, "c", s.c);
  read(j, "dimension", s.dimension);
  read(j, "potential", s.potential);
  read(j, "diagonal", s.diagonal);
  read(j, "metric", s.metric_expressions);
  read(j, "one_form", s.form_expressions);
  if (j.contains("expected_dimension")) {
    int d = 0;
    read(j, "expected_dimension", d);
    s.expected_dimension = d;
  }
  if (j.contains("half_width")) {
    double h = 0.0;
    read(j, "half_width", h);
    s.half_width = h;
  }
  read(j, "fd_step", s.fd_step);
  return s;
}

RunConfig parse_config(const std::string& json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    usage(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) usage("top level must be an object");
  reject_unknown(j, {"example", "entry", "seed", "c", "grids", "symmetry", "distance", "triangle", "curvature",
                     "invariant_forms", "betterment", "timings"},
                 "configuration");

  RunConfig cfg;
  read(j, "example", cfg.example);
  if (j.contains("entry")) cfg.entry = spec_from_json(j["entry"]);
  if (!cfg.example.empty() && cfg.entry) usage("give either 'example' or 'entry', not both");
  read(j, "seed", cfg.seed);
  if (j.contains("c")) {
    double c = 0.0;
    read(j, "c", c);
    cfg.c = c;
  }
  read(j, "timings", cfg.timings);

  if (j.contains("grids")) {
    const Json& g = j["grids"];
    reject_unknown(g, {"directions_2d", "directions_3d", "directions_4d"}, "grids");
    read(g, "directions_2d", cfg.directions_2d);
    read(g, "directions_3d", cfg.directions_3d);
    read(g, "directions_4d", cfg.directions_4d);
  }
  if (j.contains("symmetry")) {
    const Json& s = j["symmetry"];
    reject_unknown(s, {"degree", "sv_threshold", "sample_factor", "cross_validate", "flow_time", "flow_steps",
                       "cross_triples", "cross_tolerance"},
                   "symmetry");
    read(s, "degree", cfg.degree);
    read(s, "sv_threshold", cfg.sv_threshold);
    read(s, "sample_factor", cfg.sample_factor);
    read(s, "cross_validate", cfg.cross_validate);
    read(s, "flow_time", cfg.flow_time);
    read(s, "flow_steps", cfg.flow_steps);
    read(s, "cross_triples", cfg.cross_triples);
    read(s, "cross_tolerance", cfg.cross_tolerance);
  }
  if (j.contains("distance")) {
    const Json& d = j["distance"];
    reject_unknown(d, {"segments", "iterations", "extrapolate", "from", "to", "expected"}, "distance");
    read(d, "segments", cfg.distance.segments);
    read(d, "iterations", cfg.distance.iterations);
    read(d, "extrapolate", cfg.distance.extrapolate);
    if (d.contains("from")) cfg.from = read_vector(d["from"], "distance.from");
    if (d.contains("to")) cfg.to = read_vector(d["to"], "distance.to");
    if (d.contains("expected")) {
      double e = 0.0;
      read(d, "expected", e);
      cfg.expected_distance = e;
    }
  }
  if (j.contains("triangle")) {
    const Json& t = j["triangle"];
    reject_unknown(t, {"count", "fraction", "triples", "flow_field", "flow_time", "flow_steps", "tolerance",
                       "potential"},
                   "triangle");
    read(t, "count", cfg.triples);
    read(t, "fraction", cfg.triple_fraction);
    read(t, "flow_field", cfg.flow_field);
    read(t, "flow_time", cfg.flow_time);
    read(t, "flow_steps", cfg.flow_steps);
    read(t, "tolerance", cfg.triangle_tolerance);
    read(t, "potential", cfg.projective_potential);
    if (t.contains("triples")) {
      const Json& list = t["triples"];
      if (!list.is_array()) usage("triangle.triples must be an array");
      for (const Json& item : list) {
        if (!item.is_array() || item.size() != 3) usage("each triple must be [p, q, r]");
        cfg.triple_list.push_back({read_vector(item[0], "triple point"), read_vector(item[1], "triple point"),
                                   read_vector(item[2], "triple point")});
      }
    }
  }
  if (j.contains("curvature")) {
    reject_unknown(j["curvature"], {"planes"}, "curvature");
    read(j["curvature"], "planes", cfg.curvature_planes);
  }
  if (j.contains("invariant_forms")) {
    reject_unknown(j["invariant_forms"], {"subalgebra"}, "invariant_forms");
    read(j["invariant_forms"], "subalgebra", cfg.subalgebra);
  }
  if (j.contains("betterment")) {
    const Json& b = j["betterment"];
    reject_unknown(b, {"point", "sigma"}, "betterment");
    if (b.contains("point")) cfg.point = read_vector(b["point"], "betterment.point");
    if (b.contains("sigma")) cfg.sigma = read_vector(b["sigma"], "betterment.sigma");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Usage, "cannot open configuration file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

Json config_to_json(const RunConfig& cfg) {
  Json j;
  if (!cfg.example.empty()) j["example"] = cfg.example;
  if (cfg.entry) j["entry"] = spec_to_json(*cfg.entry);
  j["seed"] = cfg.seed;
  if (cfg.c) j["c"] = *cfg.c;
  j["grids"] = {{"directions_2d", cfg.directions_2d},
                {"directions_3d", cfg.directions_3d},
                {"directions_4d", cfg.directions_4d}};
  j["symmetry"] = {{"degree", cfg.degree},
                   {"sv_threshold", cfg.sv_threshold},
                   {"sample_factor", cfg.sample_factor},
                   {"cross_validate", cfg.cross_validate},
                   {"flow_time", cfg.flow_time},
                   {"flow_steps", cfg.flow_steps},
                   {"cross_triples", cfg.cross_triples},
                   {"cross_tolerance", cfg.cross_tolerance}};
  Json d = {{"segments", cfg.distance.segments},
            {"iterations", cfg.distance.iterations},
            {"extrapolate", cfg.distance.extrapolate}};
  if (cfg.from) d["from"] = vector_json(*cfg.from);
  if (cfg.to) d["to"] = vector_json(*cfg.to);
  if (cfg.expected_distance) d["expected"] = *cfg.expected_distance;
  j["distance"] = d;
  Json t = {{"count", cfg.triples}, {"fraction", cfg.triple_fraction}, {"tolerance", cfg.triangle_tolerance}};
  if (!cfg.triple_list.empty()) {
    Json list = Json::array();
    for (const auto& tr : cfg.triple_list)
      list.push_back(Json::array({vector_json(tr.p), vector_json(tr.q), vector_json(tr.r)}));
    t["triples"] = list;
  }
  if (!cfg.flow_field.empty()) t["flow_field"] = cfg.flow_field;
  t["flow_time"] = cfg.flow_time;
  t["flow_steps"] = cfg.flow_steps;
  if (!cfg.projective_potential.empty()) t["potential"] = cfg.projective_potential;
  j["triangle"] = t;
  j["curvature"] = {{"planes", cfg.curvature_planes}};
  j["invariant_forms"] = {{"subalgebra", cfg.subalgebra}};
  Json b = Json::object();
  if (cfg.point) b["point"] = vector_json(*cfg.point);
  if (cfg.sigma) b["sigma"] = vector_json(*cfg.sigma);
  if (!b.empty()) j["betterment"] = b;
  if (cfg.timings) j["timings"] = true;
  return j;
}

GallerySpec resolve_spec(const RunConfig& cfg) {
  GallerySpec spec;
  if (cfg.entry) spec = *cfg.entry;
  else if (!cfg.example.empty()) spec = gallery_spec(cfg.example);
  else throw Error(ErrorKind::Usage, "no example name or entry given");
  if (cfg.c) {
    if (spec.family == "randers-closed" || spec.family == "custom")
      throw Error(ErrorKind::Usage, "entry family '" + spec.family + "' has no c parameter");
    spec.c = *cfg.c;
  }
  return spec;
}

int direction_count(const RunConfig& cfg, int n) {
  switch (n) {
  case 2: return cfg.directions_2d;
  case 3: return cfg.directions_3d;
  case 4: return cfg.directions_4d;
  default: throw Error(ErrorKind::Usage, "direction grids exist for dimensions 2 to 4");
  }
}

} // namespace finsler
