#include "roughbie/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace roughbie {

namespace {

using nlohmann::json;

// Walks one JSON object; every accessor records the dotted key so errors can
// name it.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "'" + path_ + "' must be an object");
  }

  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
  bool has(const std::string& k) const { return j_.contains(k); }

  Section sub(const std::string& k, bool required = true) const {
    if (!j_.contains(k)) {
      if (required) throw ConfigError(key(k), "missing required key '" + key(k) + "'");
      static const json empty = json::object();
      return Section(empty, key(k));
    }
    return Section(j_.at(k), key(k));
  }

  double num(const std::string& k, double def, bool required = false) const {
    if (!j_.contains(k)) {
      if (required) throw ConfigError(key(k), "missing required key '" + key(k) + "'");
      return def;
    }
    const json& v = j_.at(k);
    if (!v.is_number()) throw ConfigError(key(k), "'" + key(k) + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(key(k), "'" + key(k) + "' must be finite");
    return x;
  }

  double positive(const std::string& k, double def, bool required = false) const {
    const double x = num(k, def, required);
    if (!(x > 0.0)) throw ConfigError(key(k), "'" + key(k) + "' must be positive");
    return x;
  }

  int integer(const std::string& k, int def) const {
    if (!j_.contains(k)) return def;
    const json& v = j_.at(k);
    if (!v.is_number_integer()) throw ConfigError(key(k), "'" + key(k) + "' must be an integer");
    return v.get<int>();
  }

  bool boolean(const std::string& k, bool def) const {
    if (!j_.contains(k)) return def;
    if (!j_.at(k).is_boolean()) throw ConfigError(key(k), "'" + key(k) + "' must be a boolean");
    return j_.at(k).get<bool>();
  }

  std::string str(const std::string& k, const std::string& def) const {
    if (!j_.contains(k)) return def;
    if (!j_.at(k).is_string()) throw ConfigError(key(k), "'" + key(k) + "' must be a string");
    return j_.at(k).get<std::string>();
  }

  std::vector<double> list(const std::string& k, std::vector<double> def, std::size_t len = 0,
                           bool required = false) const {
    if (!j_.contains(k)) {
      if (required) throw ConfigError(key(k), "missing required key '" + key(k) + "'");
      return def;
    }
    const json& v = j_.at(k);
    if (!v.is_array()) throw ConfigError(key(k), "'" + key(k) + "' must be an array");
    std::vector<double> out;
    for (const json& e : v) {
      if (!e.is_number()) throw ConfigError(key(k), "'" + key(k) + "' must hold numbers");
      out.push_back(e.get<double>());
    }
    if (len && out.size() != len)
      throw ConfigError(key(k), "'" + key(k) + "' must have " + std::to_string(len) + " entries");
    return out;
  }

  Vec3 vec3(const std::string& k, const Vec3& def, bool required = false) const {
    const auto v = list(k, {def.x(), def.y(), def.z()}, 3, required);
    return {v[0], v[1], v[2]};
  }

  Vec2 vec2(const std::string& k, const Vec2& def) const {
    const auto v = list(k, {def.x(), def.y()}, 2);
    return {v[0], v[1]};
  }

  void only(std::initializer_list<const char*> allowed) const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || it.key() == a;
      if (!ok) throw ConfigError(key(it.key()), "unknown key '" + key(it.key()) + "'");
    }
  }

 private:
  const json& j_;
  std::string path_;
};

Medium parse_medium(const Section& s, double omega) {
  s.only({"epsilon", "mu", "sigma"});
  Medium m;
  m.epsilon = s.positive("epsilon", 0.0, true);
  m.mu = s.positive("mu", 0.0, true);
  m.sigma = s.positive("sigma", 0.0, true);
  m.omega = omega;
  return m;
}

ScalarField parse_field(const Section& s) {
  s.only({"kind", "value", "center", "radius"});
  ScalarField f;
  const std::string kind = s.str("kind", "zero");
  if (kind == "zero") f.kind = ScalarField::Kind::zero;
  else if (kind == "constant") f.kind = ScalarField::Kind::constant;
  else if (kind == "bump") f.kind = ScalarField::Kind::bump;
  else throw ConfigError(s.key("kind"), "unknown perturbation kind '" + kind + "'");
  f.value = s.num("value", 1.0);
  f.center = s.vec3("center", Vec3::Zero());
  f.radius = s.positive("radius", 1.0);
  return f;
}

std::vector<double> decreasing_positive(const Section& s, const std::string& k,
                                        std::vector<double> def) {
  const auto v = s.list(k, std::move(def));
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!(v[i] > 0.0) || (i > 0 && !(v[i] < v[i - 1])))
      throw ConfigError(s.key(k), "'" + s.key(k) + "' must be positive and decreasing");
  return v;
}

}  // namespace

Scene ScenarioConfig::scene() const { return make_scene(surface, obstacle, upper, lower, dipole); }

ScenarioConfig parse_config(const nlohmann::json& j) {
  ScenarioConfig c;
  const Section root(j, "");
  root.only({"schema_version", "surface", "obstacle", "media", "dipole", "discretization",
             "solver", "plane", "experiment", "output"});
  if (!root.has("schema_version"))
    throw ConfigError("schema_version", "missing required key 'schema_version'");
  if (root.integer("schema_version", 0) != kSchemaVersion)
    throw ConfigError("schema_version", "unsupported schema_version (expected " +
                                            std::to_string(kSchemaVersion) + ")");

  // required sections in a fixed order so the first missing one is reported
  for (const char* k : {"surface", "obstacle", "media", "dipole"})
    if (!root.has(k)) throw ConfigError(k, std::string("missing required key '") + k + "'");

  {
    const Section s = root.sub("surface");
    s.only({"family", "offset", "amplitude", "width", "center", "wavevector"});
    const std::string fam = s.str("family", "flat");
    if (fam == "flat") c.surface.family = SurfaceFamily::flat;
    else if (fam == "gaussian_bump") c.surface.family = SurfaceFamily::gaussian_bump;
    else if (fam == "sinusoid") c.surface.family = SurfaceFamily::sinusoid;
    else throw ConfigError("surface.family", "unknown surface family '" + fam + "'");
    c.surface.offset = s.num("offset", 0.0);
    c.surface.amplitude = s.num("amplitude", 0.0);
    c.surface.width = s.positive("width", 1.0);
    c.surface.center = s.vec2("center", Vec2::Zero());
    c.surface.wavevector = s.vec2("wavevector", Vec2::Zero());
  }
  {
    const Section s = root.sub("obstacle");
    s.only({"family", "center", "radius", "semi_axes", "amplitude", "degree", "axis"});
    const std::string fam = s.str("family", "sphere");
    if (fam == "sphere") c.obstacle.family = ObstacleFamily::sphere;
    else if (fam == "ellipsoid") c.obstacle.family = ObstacleFamily::ellipsoid;
    else if (fam == "perturbed_sphere") c.obstacle.family = ObstacleFamily::perturbed_sphere;
    else throw ConfigError("obstacle.family", "unknown obstacle family '" + fam + "'");
    c.obstacle.center = s.vec3("center", Vec3::Zero(), true);
    c.obstacle.radius = s.positive("radius", 1.0);
    c.obstacle.semi_axes = s.vec3("semi_axes", Vec3::Ones());
    c.obstacle.amplitude = s.num("amplitude", 0.0);
    c.obstacle.degree = s.integer("degree", 2);
    c.obstacle.axis = s.vec3("axis", Vec3::UnitZ());
    try {
      c.obstacle.validate();
    } catch (const ValidationError& e) {
      throw ConfigError("obstacle", e.what());
    }
  }
  {
    const Section s = root.sub("media");
    s.only({"omega", "upper", "lower"});
    const double omega = s.positive("omega", 0.0, true);
    c.upper = parse_medium(s.sub("upper"), omega);
    c.lower = parse_medium(s.sub("lower"), omega);
  }
  {
    const Section s = root.sub("dipole");
    s.only({"position", "polarization"});
    c.dipole.position = s.vec3("position", Vec3::Zero(), true);
    Vec3 q = s.vec3("polarization", Vec3::Zero(), true);
    const double nq = q.norm();
    if (!(nq > 0.0)) throw ConfigError("dipole.polarization", "dipole polarization must be nonzero");
    if (std::abs(nq - 1.0) > 1e-12) {
      c.warnings.push_back("dipole.polarization normalized from length " + std::to_string(nq));
      q /= nq;
    }
    c.dipole.polarization = q;
  }
  {
    const Section s = root.sub("discretization", false);
    s.only({"half_width", "density", "order", "gamma_density", "quadrature"});
    c.discretization.half_width = s.positive("half_width", 1.5);
    c.discretization.density = s.positive("density", 6.0);
    c.discretization.order = s.integer("order", 6);
    if (c.discretization.order < 2 || c.discretization.order > 20)
      throw ConfigError("discretization.order", "'discretization.order' must lie in [2, 20]");
    c.discretization.gamma_density = s.num("gamma_density", 0.0);
    if (c.discretization.gamma_density < 0.0)
      throw ConfigError("discretization.gamma_density", "'discretization.gamma_density' must be >= 0");
    const Section q = s.sub("quadrature", false);
    q.only({"singular_order", "near_order", "near_factor", "accept_factor", "max_depth"});
    QuadratureOptions& qo = c.assembly.quadrature;
    qo.singular_order = q.integer("singular_order", qo.singular_order);
    qo.near_order = q.integer("near_order", qo.near_order);
    qo.near_factor = q.positive("near_factor", qo.near_factor);
    qo.accept_factor = q.positive("accept_factor", qo.accept_factor);
    qo.max_depth = q.integer("max_depth", qo.max_depth);
    if (qo.singular_order < 2 || qo.near_order < 0 || qo.max_depth < 0)
      throw ConfigError("discretization.quadrature", "quadrature orders out of range");
  }
  {
    const Section s = root.sub("solver", false);
    s.only({"method", "tol", "restart", "max_iterations"});
    const std::string m = s.str("method", "direct");
    if (m == "direct") c.solver.method = SolveMethod::direct;
    else if (m == "iterative") c.solver.method = SolveMethod::iterative;
    else throw ConfigError("solver.method", "unknown solver method '" + m + "'");
    c.solver.tol = s.num("tol", 1e-10);
    if (!(c.solver.tol > 1e-14 && c.solver.tol < 1e-2))
      throw ConfigError("solver.tol", "'solver.tol' must lie in (1e-14, 1e-2)");
    c.solver.restart = s.integer("restart", 200);
    c.solver.max_iterations = s.integer("max_iterations", 4000);
    if (c.solver.restart < 1 || c.solver.max_iterations < 1)
      throw ConfigError("solver.restart", "GMRES limits must be positive");
  }
  {
    const Section s = root.sub("plane", false);
    s.only({"height", "extent", "n"});
    c.plane.height = s.num("height", 2.5);
    const auto e = s.list("extent", {-1.0, 1.0, -1.0, 1.0}, 4);
    c.plane.x0 = e[0];
    c.plane.x1 = e[1];
    c.plane.y0 = e[2];
    c.plane.y1 = e[3];
    const auto n = s.list("n", {21, 21}, 2);
    c.plane.nx = static_cast<int>(n[0]);
    c.plane.ny = static_cast<int>(n[1]);
    if (c.plane.nx < 2 || c.plane.ny < 2 || !(c.plane.x1 > c.plane.x0) || !(c.plane.y1 > c.plane.y0))
      throw ConfigError("plane", "measurement plane grid is degenerate");
  }
  {
    const Section s = root.sub("experiment", false);
    s.only({"stability_h", "derivative_h", "alpha", "holder_cutoff", "perturbation", "converge",
            "field_grid", "energy_radii"});
    c.stability_h = decreasing_positive(s, "stability_h", c.stability_h);
    c.derivative_h = decreasing_positive(s, "derivative_h", c.derivative_h);
    c.alpha = s.num("alpha", 0.5);
    if (!(c.alpha > 0.0 && c.alpha <= 1.0))
      throw ConfigError("experiment.alpha", "'experiment.alpha' must lie in (0, 1]");
    c.holder_cutoff = s.integer("holder_cutoff", 10);
    if (c.holder_cutoff < 1)
      throw ConfigError("experiment.holder_cutoff", "'experiment.holder_cutoff' must be >= 1");
    const Section p = s.sub("perturbation", false);
    p.only({"gamma", "surface"});
    if (p.has("gamma")) {
      c.perturbation.p.gamma = parse_field(p.sub("gamma"));
    } else {
      c.perturbation.p.gamma.kind = ScalarField::Kind::bump;
      c.perturbation.p.gamma.center =
          c.obstacle.center + Vec3(0.0, 0.0, c.obstacle.max_extent());
      c.perturbation.p.gamma.radius = c.obstacle.max_extent() * 1.6;
    }
    if (p.has("surface")) c.perturbation.p.surface = parse_field(p.sub("surface"));
    const Section cv = s.sub("converge", false);
    cv.only({"half_widths", "densities"});
    c.converge.half_widths = cv.list("half_widths", c.converge.half_widths);
    c.converge.densities = cv.list("densities", c.converge.densities);
    for (double v : c.converge.half_widths)
      if (!(v > 0.0)) throw ConfigError("experiment.converge.half_widths", "half-widths must be positive");
    for (double v : c.converge.densities)
      if (!(v > 0.0)) throw ConfigError("experiment.converge.densities", "densities must be positive");
    if (c.converge.half_widths.empty() || c.converge.densities.empty())
      throw ConfigError("experiment.converge", "convergence sweep needs at least one entry per list");
    const Section fg = s.sub("field_grid", false);
    fg.only({"lo", "hi", "n"});
    c.field_grid.lo = fg.vec3("lo", c.field_grid.lo);
    c.field_grid.hi = fg.vec3("hi", c.field_grid.hi);
    const auto n = fg.list("n", {5, 5, 7}, 3);
    for (int k = 0; k < 3; ++k) {
      c.field_grid.n[k] = static_cast<int>(n[k]);
      if (c.field_grid.n[k] < 1) throw ConfigError("experiment.field_grid.n", "grid counts must be >= 1");
    }
    c.energy_radii = s.list("energy_radii", c.energy_radii);
  }
  {
    const Section s = root.sub("output", false);
    s.only({"dump_system"});
    c.dump_system = s.boolean("dump_system", false);
  }

  // cross-checks that need the whole scene
  try {
    c.scene();
  } catch (const Error& e) {
    const std::string msg = e.what();
    std::string key = "obstacle";
    if (msg.find("dipole") != std::string::npos) key = "dipole";
    if (msg.find("medium") != std::string::npos) key = "media";
    throw ConfigError(key, msg);
  }
  c.resolved = to_json(c);
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

namespace {

const char* family_name(SurfaceFamily f) {
  switch (f) {
    case SurfaceFamily::flat: return "flat";
    case SurfaceFamily::gaussian_bump: return "gaussian_bump";
    case SurfaceFamily::sinusoid: return "sinusoid";
  }
  return "flat";
}

const char* family_name(ObstacleFamily f) {
  switch (f) {
    case ObstacleFamily::sphere: return "sphere";
    case ObstacleFamily::ellipsoid: return "ellipsoid";
    case ObstacleFamily::perturbed_sphere: return "perturbed_sphere";
  }
  return "sphere";
}

json field_json(const ScalarField& f) {
  const char* k = f.kind == ScalarField::Kind::zero       ? "zero"
                  : f.kind == ScalarField::Kind::constant ? "constant"
                                                          : "bump";
  return {{"kind", k},
          {"value", f.value},
          {"center", {f.center.x(), f.center.y(), f.center.z()}},
          {"radius", f.radius}};
}

json v3(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

}  // namespace

nlohmann::json to_json(const ScenarioConfig& c) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["surface"] = {{"family", family_name(c.surface.family)},
                  {"offset", c.surface.offset},
                  {"amplitude", c.surface.amplitude},
                  {"width", c.surface.width},
                  {"center", {c.surface.center.x(), c.surface.center.y()}},
                  {"wavevector", {c.surface.wavevector.x(), c.surface.wavevector.y()}}};
  j["obstacle"] = {{"family", family_name(c.obstacle.family)}, {"center", v3(c.obstacle.center)},
                   {"radius", c.obstacle.radius},             {"semi_axes", v3(c.obstacle.semi_axes)},
                   {"amplitude", c.obstacle.amplitude},       {"degree", c.obstacle.degree},
                   {"axis", v3(c.obstacle.axis)}};
  auto med = [](const Medium& m) {
    return json{{"epsilon", m.epsilon}, {"mu", m.mu}, {"sigma", m.sigma}};
  };
  j["media"] = {{"omega", c.upper.omega}, {"upper", med(c.upper)}, {"lower", med(c.lower)}};
  j["dipole"] = {{"position", v3(c.dipole.position)}, {"polarization", v3(c.dipole.polarization)}};
  const QuadratureOptions& q = c.assembly.quadrature;
  j["discretization"] = {{"half_width", c.discretization.half_width},
                         {"density", c.discretization.density},
                         {"order", c.discretization.order},
                         {"gamma_density", c.discretization.gamma_density},
                         {"quadrature",
                          {{"singular_order", q.singular_order},
                           {"near_order", q.near_order},
                           {"near_factor", q.near_factor},
                           {"accept_factor", q.accept_factor},
                           {"max_depth", q.max_depth}}}};
  j["solver"] = {{"method", c.solver.method == SolveMethod::direct ? "direct" : "iterative"},
                 {"tol", c.solver.tol},
                 {"restart", c.solver.restart},
                 {"max_iterations", c.solver.max_iterations}};
  j["plane"] = {{"height", c.plane.height},
                {"extent", {c.plane.x0, c.plane.x1, c.plane.y0, c.plane.y1}},
                {"n", {c.plane.nx, c.plane.ny}}};
  j["experiment"] = {
      {"stability_h", c.stability_h},
      {"derivative_h", c.derivative_h},
      {"alpha", c.alpha},
      {"holder_cutoff", c.holder_cutoff},
      {"perturbation",
       {{"gamma", field_json(c.perturbation.p.gamma)},
        {"surface", field_json(c.perturbation.p.surface)}}},
      {"converge", {{"half_widths", c.converge.half_widths}, {"densities", c.converge.densities}}},
      {"field_grid",
       {{"lo", v3(c.field_grid.lo)},
        {"hi", v3(c.field_grid.hi)},
        {"n", {c.field_grid.n[0], c.field_grid.n[1], c.field_grid.n[2]}}}},
      {"energy_radii", c.energy_radii}};
  j["output"] = {{"dump_system", c.dump_system}};
  return j;
}

}  // namespace roughbie
