#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gcf/analysis.hpp"
#include "gcf/errors.hpp"
#include "gcf/solver.hpp"

namespace gcf {

using json = nlohmann::json;

enum class TrajectoryFormat { Json, Csv };

inline TrajectoryFormat parse_format(std::string_view s) {
  if (s == "json") return TrajectoryFormat::Json;
  if (s == "csv") return TrajectoryFormat::Csv;
  throw ValidationError("format: expected 'json' or 'csv', got '" + std::string(s) + "'");
}

struct MeshOptions {
  bool enabled = false;
  double time = 0.0;
  int n_theta = 32;
  std::string path = "surface.obj";
};

/// Checker names accepted in the "checks" list.
inline constexpr std::array<std::string_view, 6> kCheckNames{
    "bounds", "no_cutoff", "gradient_range", "bernstein", "decay", "comparison"};

struct RunConfig {
  explicit RunConfig(SolverConfig cfg) : solver(std::move(cfg)) {}

  SolverConfig solver;
  std::vector<std::string> checks;
  double epsilon = 0.25;
  std::uint64_t seed = 0;
  std::string output = "trajectory.json";
  TrajectoryFormat format = TrajectoryFormat::Json;
  std::string report = "report.json";
  MeshOptions mesh;
};

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::size_t line_of(std::string_view text, std::size_t byte) {
  const std::size_t end = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + end, '\n'));
}

inline json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ":" + std::to_string(line_of(text, e.byte)) + ": " + e.what());
  }
}

class FieldReader {
 public:
  explicit FieldReader(const json& doc) : doc_(doc) {
    if (!doc.is_object()) throw ParseError("config: top level must be a JSON object");
  }

  bool has(const char* key) const { return doc_.contains(key) && !doc_.at(key).is_null(); }

  double number(const char* key, std::optional<double> fallback = std::nullopt) const {
    if (!has(key)) {
      if (fallback) return *fallback;
      throw ParseError(std::string("field '") + key + "': required");
    }
    const auto& v = doc_.at(key);
    if (!v.is_number()) throw ParseError(std::string("field '") + key + "': expected number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ParseError(std::string("field '") + key + "': must be finite");
    return d;
  }

  std::int64_t integer(const char* key, std::optional<std::int64_t> fallback = std::nullopt) const {
    if (!has(key)) {
      if (fallback) return *fallback;
      throw ParseError(std::string("field '") + key + "': required");
    }
    const auto& v = doc_.at(key);
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (std::isfinite(d) && d == std::floor(d)) return static_cast<std::int64_t>(d);
    }
    throw ParseError(std::string("field '") + key + "': expected integer");
  }

  std::string string(const char* key, std::optional<std::string> fallback = std::nullopt) const {
    if (!has(key)) {
      if (fallback) return *fallback;
      throw ParseError(std::string("field '") + key + "': required");
    }
    const auto& v = doc_.at(key);
    if (!v.is_string()) throw ParseError(std::string("field '") + key + "': expected string");
    return v.get<std::string>();
  }

  bool boolean(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& v = doc_.at(key);
    if (!v.is_boolean()) throw ParseError(std::string("field '") + key + "': expected boolean");
    return v.get<bool>();
  }

 private:
  const json& doc_;
};

inline Stepper parse_stepper(std::string_view s) {
  if (s == "explicit") return Stepper::Explicit;
  if (s == "implicit") return Stepper::ImplicitEuler;
  throw ValidationError("stepper: expected 'explicit' or 'implicit', got '" + std::string(s) + "'");
}

inline std::string_view stepper_name(Stepper s) {
  return s == Stepper::Explicit ? "explicit" : "implicit";
}

inline std::size_t grid_size_from(std::int64_t n) {
  if (n < 3) throw ValidationError("grid size: n must be >= 3");
  if (n % 2 == 0) throw ValidationError("grid parity: n must be odd");
  return static_cast<std::size_t>(n);
}

inline constexpr std::array<std::string_view, 24> kConfigKeys{
    "profile",        "c",          "amplitude",       "R0",             "sigma",
    "L",              "n",          "t_end",           "stepper",        "dt",
    "safety",         "newton_tol", "newton_max_iter", "snapshot_every", "checks",
    "epsilon",        "seed",       "output",          "format",         "report",
    "mesh_enabled",   "mesh_time",  "mesh_n_theta",    "mesh_output"};

inline bool known_key(std::string_view key) {
  return std::find(kConfigKeys.begin(), kConfigKeys.end(), key) != kConfigKeys.end();
}

inline SolverConfig solver_config_from(const FieldReader& f) {
  const Preset preset = parse_preset(f.string("profile"));
  const ProfileParams params{f.number("c"), f.number("amplitude", 1.0), f.number("R0", 1.0)};
  InitialProfile profile(preset, params);
  Grid grid(f.number("L"), grid_size_from(f.integer("n")));
  SolverConfig cfg{std::move(profile), grid, f.number("t_end")};
  cfg.sigma = f.number("sigma", 1.0);
  cfg.stepper = parse_stepper(f.string("stepper", "explicit"));
  if (f.has("dt")) cfg.fixed_dt = f.number("dt");
  cfg.safety = f.number("safety", 0.9);
  cfg.newton.tol = f.number("newton_tol", 1e-10);
  const auto max_iter = f.integer("newton_max_iter", 30);
  if (max_iter < 0 || max_iter > 1000000) throw ValidationError("newton max_iter: out of range");
  cfg.newton.max_iter = static_cast<int>(max_iter);
  const auto every = f.integer("snapshot_every", 10);
  if (every < 1) throw ValidationError("snapshot_every: must be >= 1");
  cfg.snapshot_every = static_cast<std::size_t>(every);
  cfg.validate();
  return cfg;
}

inline json solver_config_json(const SolverConfig& c) {
  json j;
  j["profile"] = std::string(preset_name(c.profile.preset()));
  j["c"] = c.profile.params().c;
  j["amplitude"] = c.profile.params().amplitude;
  j["R0"] = c.profile.params().radius;
  j["sigma"] = c.sigma;
  j["L"] = c.grid.half_width();
  j["n"] = c.grid.size();
  j["t_end"] = c.t_end;
  j["stepper"] = std::string(stepper_name(c.stepper));
  j["dt"] = c.fixed_dt ? json(*c.fixed_dt) : json(nullptr);
  j["safety"] = c.safety;
  j["newton_tol"] = c.newton.tol;
  j["newton_max_iter"] = c.newton.max_iter;
  j["snapshot_every"] = c.snapshot_every;
  return j;
}

// Scientific notation with 17 significant digits; locale independent.
inline void append_number(std::string& out, double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::scientific, 16);
  out.append(buf.data(), res.ptr);
}

}  // namespace detail

/// Parses a run configuration from JSON text. `origin` names the source in
/// error messages.
inline RunConfig parse_config_text(const std::string& text, const std::string& origin = "config") {
  const json doc = detail::parse_json(text, origin);
  const detail::FieldReader f(doc);
  for (const auto& [key, _] : doc.items()) {
    if (!detail::known_key(key)) throw ValidationError("unknown key: '" + key + "'");
  }
  RunConfig rc{detail::solver_config_from(f)};
  if (f.has("checks")) {
    const auto& arr = doc.at("checks");
    if (!arr.is_array()) throw ParseError("field 'checks': expected array of strings");
    for (const auto& item : arr) {
      if (!item.is_string()) throw ParseError("field 'checks': expected array of strings");
      const auto name = item.get<std::string>();
      if (std::find(kCheckNames.begin(), kCheckNames.end(), name) == kCheckNames.end()) {
        throw ValidationError("checks: unknown checker '" + name + "'");
      }
      rc.checks.push_back(name);
    }
  }
  rc.epsilon = f.number("epsilon", 0.25);
  if (!(rc.epsilon > 0.0)) throw ValidationError("epsilon: must be > 0");
  const auto seed = f.integer("seed", 0);
  if (seed < 0) throw ValidationError("seed: must be >= 0");
  rc.seed = static_cast<std::uint64_t>(seed);
  rc.output = f.string("output", rc.output);
  rc.format = parse_format(f.string("format", "json"));
  rc.report = f.string("report", rc.report);
  if (rc.output.empty() || rc.report.empty()) throw ValidationError("paths: must be nonempty");
  rc.mesh.enabled = f.boolean("mesh_enabled", false);
  rc.mesh.time = f.number("mesh_time", 0.0);
  const auto n_theta = f.integer("mesh_n_theta", 32);
  if (n_theta < 3) throw ValidationError("mesh n_theta: must be >= 3");
  rc.mesh.n_theta = static_cast<int>(n_theta);
  rc.mesh.path = f.string("mesh_output", rc.mesh.path);
  if (rc.mesh.path.empty()) throw ValidationError("paths: must be nonempty");
  return rc;
}

inline RunConfig parse_config(const std::string& path) {
  return parse_config_text(detail::read_file(path), path);
}

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

inline json trajectory_to_json(const Trajectory& traj) {
  json j;
  j["format"] = "gcf-trajectory";
  j["version"] = 1;
  j["config"] = detail::solver_config_json(traj.config);
  const auto& md = traj.metadata;
  j["metadata"] = {{"m", md.m},
                   {"sup_f", md.sup_f},
                   {"grad_min", md.grad_min},
                   {"grad_max", md.grad_max},
                   {"far_field_c", md.far_field_c ? json(*md.far_field_c) : json(nullptr)},
                   {"R0", md.support_radius},
                   {"curvature_bound", md.curvature_bound}};
  j["stats"] = {{"steps", traj.stats.steps},
                {"dt", traj.stats.dt},
                {"cutoff_hits", traj.stats.cutoff_hits},
                {"max_newton_iterations", traj.stats.max_newton_iterations},
                {"dt_halvings", traj.stats.dt_halvings}};
  j["times"] = traj.times;
  j["x"] = traj.grid().nodes();
  j["u"] = traj.samples;
  return j;
}

inline Trajectory trajectory_from_json(const json& j) {
  try {
    if (!j.is_object() || j.value("format", "") != "gcf-trajectory") {
      throw ParseError("trajectory: not a gcf-trajectory document");
    }
    const detail::FieldReader f(j.at("config"));
    SolverConfig cfg = detail::solver_config_from(f);
    const auto& md = j.at("metadata");
    TrajectoryMetadata meta{md.at("m").get<double>(),
                            md.at("sup_f").get<double>(),
                            md.at("grad_min").get<double>(),
                            md.at("grad_max").get<double>(),
                            md.at("far_field_c").is_null()
                                ? std::nullopt
                                : std::optional<double>(md.at("far_field_c").get<double>()),
                            md.at("R0").get<double>(),
                            md.at("curvature_bound").get<double>()};
    SolverStats stats;
    if (j.contains("stats")) {
      const auto& s = j.at("stats");
      stats.steps = s.at("steps").get<std::size_t>();
      stats.dt = s.at("dt").get<double>();
      stats.cutoff_hits = s.at("cutoff_hits").get<std::size_t>();
      stats.max_newton_iterations = s.at("max_newton_iterations").get<int>();
      stats.dt_halvings = s.at("dt_halvings").get<std::size_t>();
    }
    Trajectory traj{std::move(cfg), j.at("times").get<std::vector<double>>(),
                    j.at("u").get<std::vector<std::vector<double>>>(), meta, stats};
    if (traj.times.size() != traj.samples.size()) {
      throw ParseError("trajectory: times and u differ in length");
    }
    for (const auto& s : traj.samples) require_matching(s, traj.grid());
    return traj;
  } catch (const json::exception& e) {
    throw ParseError(std::string("trajectory: ") + e.what());
  } catch (const ValidationError& e) {
    throw ParseError(std::string("trajectory config: ") + e.what());
  } catch (const GridMismatch& e) {
    throw ParseError(std::string("trajectory: ") + e.what());
  }
}

inline std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t,x,u\n";
  const auto xs = traj.grid().nodes();
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      detail::append_number(out, traj.times[k]);
      out += ',';
      detail::append_number(out, xs[i]);
      out += ',';
      detail::append_number(out, traj.samples[k][i]);
      out += '\n';
    }
  }
  return out;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(path + ": cannot open for writing");
  out << text;
  if (!out) throw Error(path + ": write failed");
}

inline void write_trajectory(const Trajectory& traj, const std::string& path,
                             TrajectoryFormat format) {
  if (format == TrajectoryFormat::Json) {
    write_text(path, trajectory_to_json(traj).dump() + "\n");
  } else {
    write_text(path, trajectory_csv(traj));
  }
}

inline Trajectory read_trajectory(const std::string& path) {
  return trajectory_from_json(detail::parse_json(detail::read_file(path), path));
}

// ---------------------------------------------------------------------------
// Surface-of-revolution mesh
// ---------------------------------------------------------------------------

struct SurfaceMesh {
  std::vector<std::array<double, 3>> vertices;
  std::vector<std::array<std::size_t, 3>> triangles;  // 1-based vertex indices
  double time = 0.0;
};

inline std::size_t nearest_snapshot(const Trajectory& traj, double time) {
  if (traj.times.empty()) throw ValidationError("mesh: trajectory has no snapshots");
  std::size_t best = 0;
  for (std::size_t k = 1; k < traj.times.size(); ++k) {
    if (std::abs(traj.times[k] - time) < std::abs(traj.times[best] - time)) best = k;
  }
  return best;
}

/// Revolves the snapshot nearest to `time` about the x-axis:
/// vertex (i, j) = (x_i, u_i cos theta_j, u_i sin theta_j), theta_j = 2 pi j / n_theta,
/// stored at index i * n_theta + j + 1. Each quad becomes two triangles and
/// the seam j = n_theta wraps to j = 0.
inline SurfaceMesh build_mesh(const Trajectory& traj, double time, int n_theta) {
  if (n_theta < 3) throw ValidationError("mesh n_theta: must be >= 3");
  const std::size_t k = nearest_snapshot(traj, time);
  const auto& u = traj.samples[k];
  const Grid& grid = traj.grid();
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0.0)) {
      throw DegenerateSurface("mesh: nonpositive radius at node " + std::to_string(i));
    }
  }
  const auto nt = static_cast<std::size_t>(n_theta);
  SurfaceMesh mesh;
  mesh.time = traj.times[k];
  mesh.vertices.reserve(u.size() * nt);
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t j = 0; j < nt; ++j) {
      const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / n_theta;
      mesh.vertices.push_back({grid.x(i), u[i] * std::cos(theta), u[i] * std::sin(theta)});
    }
  }
  auto id = [nt](std::size_t i, std::size_t j) { return i * nt + j + 1; };
  mesh.triangles.reserve(2 * (u.size() - 1) * nt);
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    for (std::size_t j = 0; j < nt; ++j) {
      const std::size_t jn = (j + 1) % nt;
      mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, jn)});
      mesh.triangles.push_back({id(i, j), id(i + 1, jn), id(i, jn)});
    }
  }
  return mesh;
}

inline std::string mesh_obj(const SurfaceMesh& mesh) {
  std::string out = "# surface of revolution at t = ";
  detail::append_number(out, mesh.time);
  out += '\n';
  for (const auto& v : mesh.vertices) {
    out += "v ";
    detail::append_number(out, v[0]);
    out += ' ';
    detail::append_number(out, v[1]);
    out += ' ';
    detail::append_number(out, v[2]);
    out += '\n';
  }
  for (const auto& f : mesh.triangles) {
    out += "f " + std::to_string(f[0]) + ' ' + std::to_string(f[1]) + ' ' + std::to_string(f[2]) +
           '\n';
  }
  return out;
}

inline void export_mesh(const Trajectory& traj, double time, int n_theta, const std::string& path) {
  write_text(path, mesh_obj(build_mesh(traj, time, n_theta)));
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline json report_to_json(const InvariantReport& r) {
  auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json j = {{"name", r.name},
            {"pass", r.pass},
            {"worst_violation", finite_or_null(r.worst_violation)},
            {"location", {{"x", r.location.x}, {"t", r.location.t}}},
            {"tolerance_used", finite_or_null(r.tolerance_used)},
            {"inconclusive", r.inconclusive}};
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline json reports_to_json(const std::vector<InvariantReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(report_to_json(r));
  return arr;
}

}  // namespace gcf
