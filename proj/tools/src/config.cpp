#include "slelab_cli/config.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include "slelab/stats.hpp"

namespace slelab::cli {

namespace {

using nlohmann::json;

// Field access on one YAML mapping with path-qualified errors and
// rejection of keys the schema does not know.
class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) throw ConfigError(path_, "expected a mapping");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return node_ && node_.IsMap() && node_[key]; }
  YAML::Node raw(const std::string& key) const {
    known_.insert(key);
    return has(key) ? node_[key] : YAML::Node();
  }

  template <class T>
  T get(const std::string& key, T fallback) const {
    known_.insert(key);
    if (!has(key)) return fallback;
    try {
      return node_[key].as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError(at(key), std::string("expected ") + type_name<T>());
    }
  }

  std::size_t count(const std::string& key, std::size_t fallback) const {
    known_.insert(key);
    if (!has(key)) return fallback;
    double v = 0.0;
    try {
      v = node_[key].as<double>();
    } catch (const YAML::Exception&) {
      throw ConfigError(at(key), "expected a positive integer");
    }
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e12) throw ConfigError(at(key), "expected a positive integer");
    return static_cast<std::size_t>(v);
  }

  double positive(const std::string& key, double fallback) const {
    const double v = get<double>(key, fallback);
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(at(key), "must be positive");
    return v;
  }

  double probability(const std::string& key, double fallback) const {
    const double v = get<double>(key, fallback);
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(at(key), "must lie in [0, 1]");
    return v;
  }

  void reject_unknown() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!known_.count(key)) throw ConfigError(at(key), "unknown key");
    }
  }

 private:
  template <class T>
  static const char* type_name() {
    if constexpr (std::is_same_v<T, bool>) return "true or false";
    if constexpr (std::is_same_v<T, std::string>) return "a string";
    if constexpr (std::is_integral_v<T>) return "an integer";
    return "a number";
  }

  YAML::Node node_;
  std::string path_;
  mutable std::set<std::string> known_;
};

ForceSpec parse_force_point(const YAML::Node& node, const std::string& path) {
  Section s(node, path);
  if (!node || !node.IsMap()) throw ConfigError(path, "expected {at: ..., rho: ...}");
  if (!s.has("at")) throw ConfigError(s.at("at"), "missing");
  if (!s.has("rho")) throw ConfigError(s.at("rho"), "missing");
  const double rho = s.get<double>("rho", 0.0);
  const YAML::Node at = s.raw("at");
  s.reject_unknown();

  if (at.IsMap()) {
    Section top(at, s.at("at"));
    if (!top.has("top")) throw ConfigError(s.at("at"), "expected {top: x}");
    const double x = top.get<double>("top", 0.0);
    top.reject_unknown();
    return ForceSpec::top(x, rho);
  }
  if (!at.IsScalar()) throw ConfigError(s.at("at"), "expected a number, \"+inf\", \"-inf\", \"0+\", \"0-\" or {top: x}");
  const std::string text = at.Scalar();
  if (text == "+inf" || text == "inf") return ForceSpec::plus_infinity(rho);
  if (text == "-inf") return ForceSpec::minus_infinity(rho);
  if (text == "0+") return ForceSpec::plus(rho);
  if (text == "0-") return ForceSpec::minus(rho);
  try {
    return ForceSpec::real(at.as<double>(), rho);
  } catch (const YAML::Exception&) {
    throw ConfigError(s.at("at"), "expected a number, \"+inf\", \"-inf\", \"0+\", \"0-\" or {top: x}");
  }
}

json force_point_json(const ForceSpec& f) {
  json at;
  switch (f.kind) {
    case ForceKind::Real: at = f.value; break;
    case ForceKind::DegeneratePlus: at = "0+"; break;
    case ForceKind::DegenerateMinus: at = "0-"; break;
    case ForceKind::PlusInfinity: at = "+inf"; break;
    case ForceKind::MinusInfinity: at = "-inf"; break;
    case ForceKind::StripTop: at = json{{"top", f.value}}; break;
  }
  return json{{"at", at}, {"rho", f.rho}};
}

// Rethrows a library validation error ("field: message") under the sle path.
[[noreturn]] void rethrow_sle(const std::invalid_argument& e) {
  const std::string what = e.what();
  const auto colon = what.find(": ");
  if (colon == std::string::npos) throw ConfigError("sle", what);
  throw ConfigError("sle." + what.substr(0, colon), what.substr(colon + 2));
}

struct Shape {
  const SleConfig& sle;

  void geometry(Geometry g, const char* experiment) const {
    if (sle.geometry != g) {
      throw ConfigError("sle.geometry", std::string(experiment) + " needs " +
                                            (g == Geometry::Strip ? "strip" : "chordal") + " geometry");
    }
  }
  void start_at_zero() const {
    if (sle.start != 0.0) throw ConfigError("sle.start", "this experiment starts at 0");
  }
  std::size_t find(ForceKind kind) const {
    for (std::size_t i = 0; i < sle.force_points.size(); ++i) {
      if (sle.force_points[i].kind == kind) return i;
    }
    return sle.force_points.size();
  }
  void exactly(std::initializer_list<ForceKind> kinds, const char* wanted) const {
    bool ok = sle.force_points.size() == kinds.size();
    for (ForceKind k : kinds) ok = ok && find(k) < sle.force_points.size();
    if (!ok) throw ConfigError("sle.force_points", std::string("expected ") + wanted);
  }
  double rho(ForceKind kind) const { return sle.force_points[find(kind)].rho; }
  // The single real force point with rho = 0 that marks x.
  double marked_point() const {
    if (sle.force_points.size() != 1 || sle.force_points[0].kind != ForceKind::Real) {
      throw ConfigError("sle.force_points", "expected one real point {at: x, rho: 0}");
    }
    if (sle.force_points[0].rho != 0.0) throw ConfigError("sle.force_points[0].rho", "must be 0");
    return sle.force_points[0].value;
  }
  void no_force_points() const {
    if (!sle.force_points.empty()) throw ConfigError("sle.force_points", "this experiment takes no force points");
  }
  void kappa_above_four(const char* experiment) const {
    if (!(sle.kappa > 4.0)) throw ConfigError("sle.kappa", std::string(experiment) + " needs kappa > 4");
  }
};

void check_density_hypotheses(double kappa, double rho_plus, double rho_minus) {
  try {
    (void)DensitySpec::make(kappa, rho_plus, rho_minus);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("sle.force_points", e.what());
  }
}

double default_dt(Experiment e) {
  return e == Experiment::Duality || e == Experiment::Dimension ? 1e-4 : 1e-3;
}

double default_horizon(Experiment e, const Section& params) {
  switch (e) {
    case Experiment::Density:
    case Experiment::Mixture: return 50.0;
    case Experiment::Limits: return 200.0;
    case Experiment::Duality: return 8.0;
    case Experiment::Scaling: return 0.25;
    case Experiment::Dimension: return params.get<std::string>("target", "trace") == "trace" ? 1.0 : 8.0;
    case Experiment::Simulate: return 1.0;
  }
  return 1.0;
}

ExperimentParams parse_params(Experiment e, const SleConfig& sle, const Section& p) {
  const Shape shape{sle};
  switch (e) {
    case Experiment::Simulate: {
      SimulateParams out;
      out.n_samples = p.count("n_samples", out.n_samples);
      const auto curves = p.get<std::string>("curves", "none");
      if (curves == "none") {
        out.curves = CurveKind::None;
      } else if (curves == "hull") {
        out.curves = CurveKind::Hull;
      } else if (curves == "left_right") {
        out.curves = CurveKind::LeftRight;
      } else {
        throw ConfigError(p.at("curves"), "expected none, hull or left_right");
      }
      out.resolution = p.count("resolution", out.resolution);
      if (out.resolution < 2) throw ConfigError(p.at("resolution"), "must be at least 2");
      return out;
    }
    case Experiment::Density: {
      shape.geometry(Geometry::Strip, "density");
      shape.start_at_zero();
      shape.exactly({ForceKind::PlusInfinity, ForceKind::MinusInfinity}, "points at +inf and -inf");
      DensityParams out;
      out.kappa = sle.kappa;
      out.rho_plus = shape.rho(ForceKind::PlusInfinity);
      out.rho_minus = shape.rho(ForceKind::MinusInfinity);
      check_density_hypotheses(out.kappa, out.rho_plus, out.rho_minus);
      out.dt = sle.dt;
      out.horizon = sle.horizon;
      out.n_samples = p.count("n_samples", out.n_samples);
      out.approach = p.positive("approach", out.approach);
      out.max_failure_fraction = p.probability("max_failure_fraction", out.max_failure_fraction);
      return out;
    }
    case Experiment::Mixture: {
      shape.geometry(Geometry::Strip, "mixture");
      shape.start_at_zero();
      shape.exactly({ForceKind::PlusInfinity, ForceKind::MinusInfinity}, "points at +inf and -inf");
      MixtureParams out;
      out.kappa = sle.kappa;
      out.rho_plus = shape.rho(ForceKind::PlusInfinity);
      out.rho_minus = shape.rho(ForceKind::MinusInfinity);
      check_density_hypotheses(out.kappa, out.rho_plus, out.rho_minus);
      out.dt = sle.dt;
      out.endpoint_horizon = sle.horizon;
      out.t0 = p.positive("t0", out.t0);
      if (out.t0 > sle.horizon) throw ConfigError(p.at("t0"), "exceeds sle.horizon");
      out.n_samples = p.count("n_samples", out.n_samples);
      out.endpoint_samples = p.count("endpoint_samples", out.endpoint_samples);
      out.endpoint_radius = p.positive("endpoint_radius", out.endpoint_radius);
      out.endpoint_approach = p.positive("endpoint_approach", out.endpoint_approach);
      out.endpoint_fraction = p.probability("endpoint_fraction", out.endpoint_fraction);
      out.control_only = p.get<bool>("control_only", out.control_only);
      return out;
    }
    case Experiment::Duality: {
      shape.geometry(Geometry::Chordal, "duality");
      shape.start_at_zero();
      shape.kappa_above_four("duality");
      DualityParams out;
      out.kappa = sle.kappa;
      out.x = shape.marked_point();
      out.dt = sle.dt;
      out.horizon = sle.horizon;
      out.n_samples = p.count("n_samples", out.n_samples);
      out.resolution = p.count("resolution", out.resolution);
      out.magnitude_tolerance = p.positive("magnitude_tolerance", out.magnitude_tolerance);
      out.endpoint_tolerance = p.positive("endpoint_tolerance", out.endpoint_tolerance);
      out.max_violation_fraction = p.probability("max_violation_fraction", out.max_violation_fraction);
      return out;
    }
    case Experiment::Limits: {
      shape.geometry(Geometry::Strip, "limits");
      shape.start_at_zero();
      shape.exactly({ForceKind::PlusInfinity, ForceKind::MinusInfinity, ForceKind::StripTop},
                    "points at +inf, -inf and one {top: x0}");
      LimitParams out;
      out.kappa = sle.kappa;
      out.rho_plus = shape.rho(ForceKind::PlusInfinity);
      out.rho_minus = shape.rho(ForceKind::MinusInfinity);
      const std::size_t top = shape.find(ForceKind::StripTop);
      out.p0_re = sle.force_points[top].value;
      if (std::abs(sle.force_points[top].rho - out.rho0()) > 1e-9) {
        throw ConfigError("sle.force_points[" + std::to_string(top) + "].rho",
                          "must equal kappa - 6 - rho_plus - rho_minus = " + std::to_string(out.rho0()));
      }
      out.dt = sle.dt;
      out.horizon = sle.horizon;
      out.n_samples = p.count("n_samples", out.n_samples);
      out.escape_re = p.positive("escape_re", out.escape_re);
      out.reach = p.positive("reach", out.reach);
      out.target_radius = p.positive("target_radius", out.target_radius);
      out.max_undecided = p.probability("max_undecided", out.max_undecided);
      return out;
    }
    case Experiment::Scaling: {
      shape.geometry(Geometry::Chordal, "scaling");
      shape.start_at_zero();
      shape.no_force_points();
      ScalingParams out;
      out.kappa = sle.kappa;
      out.t = sle.horizon;
      out.dt = sle.dt;
      out.a = p.positive("a", out.a);
      out.n_samples = p.count("n_samples", out.n_samples);
      return out;
    }
    case Experiment::Dimension: {
      shape.geometry(Geometry::Chordal, "dimension");
      shape.start_at_zero();
      DimensionParams out;
      out.kappa = sle.kappa;
      out.dt = sle.dt;
      out.t = sle.horizon;
      const auto target = p.get<std::string>("target", "trace");
      if (target == "trace") {
        out.target = DimensionTarget::Trace;
        shape.no_force_points();
      } else if (target == "hull_boundary") {
        out.target = DimensionTarget::HullBoundary;
        shape.kappa_above_four("a hull-boundary dimension");
        out.x = shape.marked_point();
      } else {
        throw ConfigError(p.at("target"), "expected trace or hull_boundary");
      }
      out.n_samples = p.count("n_samples", out.n_samples);
      out.n_scales = p.count("n_scales", out.n_scales);
      if (out.n_scales < 3) throw ConfigError(p.at("n_scales"), "must be at least 3");
      out.tolerance = p.positive("tolerance", out.tolerance);
      out.boundary_resolution = p.count("boundary_resolution", out.boundary_resolution);
      out.boundary_points = p.count("boundary_points", out.boundary_points);
      out.boundary_lift = p.positive("boundary_lift", out.boundary_lift);
      return out;
    }
  }
  throw ConfigError("experiment", "unhandled experiment");
}

json params_json(const ExperimentParams& params) {
  return std::visit(
      [](const auto& p) -> json {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, SimulateParams>) {
          const char* curves = p.curves == CurveKind::None ? "none" : p.curves == CurveKind::Hull ? "hull" : "left_right";
          return {{"n_samples", p.n_samples}, {"curves", curves}, {"resolution", p.resolution}};
        } else if constexpr (std::is_same_v<P, DensityParams>) {
          return {{"n_samples", p.n_samples}, {"approach", p.approach}, {"max_failure_fraction", p.max_failure_fraction}};
        } else if constexpr (std::is_same_v<P, MixtureParams>) {
          return {{"n_samples", p.n_samples},           {"t0", p.t0},
                  {"endpoint_samples", p.endpoint_samples}, {"endpoint_radius", p.endpoint_radius},
                  {"endpoint_approach", p.endpoint_approach},
                  {"endpoint_fraction", p.endpoint_fraction}, {"control_only", p.control_only}};
        } else if constexpr (std::is_same_v<P, DualityParams>) {
          return {{"n_samples", p.n_samples},
                  {"resolution", p.resolution},
                  {"magnitude_tolerance", p.magnitude_tolerance},
                  {"endpoint_tolerance", p.endpoint_tolerance},
                  {"max_violation_fraction", p.max_violation_fraction}};
        } else if constexpr (std::is_same_v<P, LimitParams>) {
          return {{"n_samples", p.n_samples}, {"escape_re", p.escape_re},         {"reach", p.reach},
                  {"target_radius", p.target_radius}, {"max_undecided", p.max_undecided}};
        } else if constexpr (std::is_same_v<P, ScalingParams>) {
          return {{"n_samples", p.n_samples}, {"a", p.a}};
        } else {
          return {{"n_samples", p.n_samples},
                  {"target", p.target == DimensionTarget::Trace ? "trace" : "hull_boundary"},
                  {"n_scales", p.n_scales},
                  {"tolerance", p.tolerance},
                  {"boundary_resolution", p.boundary_resolution},
                  {"boundary_points", p.boundary_points},
                  {"boundary_lift", p.boundary_lift}};
        }
      },
      params);
}

}  // namespace

std::string_view to_string(Experiment e) noexcept {
  switch (e) {
    case Experiment::Simulate: return "simulate";
    case Experiment::Density: return "density";
    case Experiment::Mixture: return "mixture";
    case Experiment::Duality: return "duality";
    case Experiment::Limits: return "limits";
    case Experiment::Scaling: return "scaling";
    case Experiment::Dimension: return "dimension";
  }
  return "simulate";
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"simulate", "density", "mixture", "duality",
                                                 "limits",   "scaling", "dimension"};
  return names;
}

Experiment experiment_from_string(const std::string& name) {
  const auto& names = experiment_names();
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw ConfigError("experiment", "unknown experiment '" + name + "'; valid names: " + list);
  }
  return static_cast<Experiment>(it - names.begin());
}

RunConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("<document>", std::string("YAML syntax error: ") + e.what());
  }
  if (!root || !root.IsMap()) throw ConfigError("<document>", "expected a mapping at the top level");
  const Section top(root, "");

  RunConfig config;
  if (!top.has("experiment")) throw ConfigError("experiment", "missing");
  config.experiment = experiment_from_string(top.get<std::string>("experiment", ""));
  config.output_dir = top.get<std::string>("output_dir", config.output_dir.string());
  const auto format = top.get<std::string>("format", "json");
  if (format == "json") {
    config.format = OutputFormat::Json;
  } else if (format == "csv") {
    config.format = OutputFormat::Csv;
  } else {
    throw ConfigError("format", "expected csv or json");
  }
  config.seed_given = top.has("seed");
  if (config.seed_given) config.sle.seed = top.get<std::uint64_t>("seed", 0);

  const Section params(top.raw("parameters"), "parameters");
  const Section sle(top.raw("sle"), "sle");
  if (!top.has("sle")) throw ConfigError("sle", "missing");
  top.reject_unknown();

  SleConfig& s = config.sle;
  const auto geometry = sle.get<std::string>("geometry", "chordal");
  if (geometry == "chordal") {
    s.geometry = Geometry::Chordal;
  } else if (geometry == "strip") {
    s.geometry = Geometry::Strip;
  } else {
    throw ConfigError("sle.geometry", "expected chordal or strip");
  }
  if (!sle.has("kappa")) throw ConfigError("sle.kappa", "missing");
  s.kappa = sle.get<double>("kappa", 0.0);
  s.start = sle.get<double>("start", 0.0);
  s.dt = sle.get<double>("dt", default_dt(config.experiment));
  s.horizon = sle.get<double>("horizon", default_horizon(config.experiment, params));
  const YAML::Node points = sle.raw("force_points");
  if (points && !points.IsNull()) {
    if (!points.IsSequence()) throw ConfigError("sle.force_points", "expected a list");
    for (std::size_t i = 0; i < points.size(); ++i) {
      s.force_points.push_back(parse_force_point(points[i], "sle.force_points[" + std::to_string(i) + "]"));
    }
  }
  sle.reject_unknown();
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    rethrow_sle(e);
  }

  config.params = parse_params(config.experiment, s, params);
  params.reject_unknown();
  return config;
}

RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("<file>", "cannot read " + file.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

json resolved_config(const RunConfig& config) {
  const SleConfig& s = config.sle;
  json points = json::array();
  for (const ForceSpec& f : s.force_points) points.push_back(force_point_json(f));
  return json{{"experiment", to_string(config.experiment)},
              {"seed", s.seed},
              {"format", config.format == OutputFormat::Json ? "json" : "csv"},
              {"sle",
               {{"geometry", s.geometry == Geometry::Chordal ? "chordal" : "strip"},
                {"kappa", s.kappa},
                {"start", s.start},
                {"dt", s.dt},
                {"horizon", s.horizon},
                {"force_points", points}}},
              {"parameters", params_json(config.params)}};
}

std::string config_hash(const RunConfig& config) {
  const std::string text = resolved_config(config).dump();
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(text.data(), text.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < length; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", digest[i]);
    hex += byte;
  }
  return hex;
}

}  // namespace slelab::cli
