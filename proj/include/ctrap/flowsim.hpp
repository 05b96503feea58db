#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ctrap/stokes.hpp"

namespace ctrap {

enum class DensityMode { Solve, AnalyticSphere, Uniform };

/// Plane n.x = offset with n a unit vector.
struct Plane {
  Vec3 normal{1, 0, 0};
  double offset = 0.0;
  double eval(const Vec3& x) const { return dot(normal, x) - offset; }
};

/// Particle lattice on the start plane and the plane it must reach.
struct ShadowSpec {
  Vec3 normal{1, 0, 0};  // unit; particles travel towards +normal
  double start = -1.0, stop = 1.0;
  Vec3 e1{0, 1, 0}, e2{0, 0, 1};  // in-plane unit basis
  double y_lo = 0, y_hi = 1, z_lo = 0, z_hi = 1;
  int count = 15;  // count x count cell-centered particles
  bool reversible = false;  // exit point should equal the entry point in plane coordinates

  Vec3 origin() const { return start * normal; }
  Vec3 point(double y, double z, double offset) const { return offset * normal + y * e1 + z * e2; }
};

struct Scene {
  std::vector<Body> bodies;
  Vec3 u_inf{1, 0, 0};
  bool use_slp = true, use_dlp = true;
  DensityMode density = DensityMode::Solve;
  Vec3 uniform_density{};
  std::optional<ShadowSpec> shadow;
  std::vector<std::pair<Vec3, Vec3>> seed_lines;  // streamline seed segments
  int seeds_per_line = 10;

  /// Fill densities for the analytic and uniform modes; no-op for Solve.
  void apply_density_mode();
};

/// u_inf plus the selected layer potentials of every body.
Vec3 velocity(const Scene& scene, const Vec3& x, const EvalOptions& opt = {});

/// Inside some body (lambda-level < 1).
bool inside_any(const Scene& scene, const Vec3& x);

/// Smallest node-sampled distance from body a to body b; negative if a node of one lies inside the other.
double sampled_gap(const Body& a, const Body& b);

enum class TraceStatus { Crossed, TimedOut, EnteredBody };

std::string to_string(TraceStatus s);

struct TraceRecord {
  double y0 = 0, z0 = 0;
  double t_fin = 0;
  double y_fin1 = 0, y_fin2 = 0;
  Vec3 x_fin;
  TraceStatus status = TraceStatus::TimedOut;
  std::optional<double> error;
};

using VelocityField = std::function<Vec3(const Vec3&)>;
using InsideTest = std::function<bool(const Vec3&)>;

struct TraceResult {
  Vec3 x;
  double t = 0;
  TraceStatus status = TraceStatus::TimedOut;
  std::vector<Vec3> path;  // filled when requested
};

/// Classical RK4 from x0 until the stop plane is crossed (sign change from negative,
/// linearly interpolated), the particle enters a body, or t reaches t_max.
TraceResult rk4_trace(const VelocityField& u, const Vec3& x0, double dt, const std::optional<Plane>& stop,
                      double t_max, const InsideTest& inside = {}, bool keep_path = false);

/// Trace every lattice particle of the spec. Errors use reversibility when the spec says so,
/// otherwise the reference records (same lattice order) when given.
std::vector<TraceRecord> shadow_experiment(const VelocityField& u, const InsideTest& inside, const ShadowSpec& spec,
                                           double dt, double t_max = 1e4,
                                           const std::vector<TraceRecord>* reference = nullptr);

/// Scene text format; see docs/scene-format.md.
Scene parse_scene(const std::string& text, std::optional<double> resolution = std::nullopt);
Scene load_scene(const std::string& path, std::optional<double> resolution = std::nullopt);

/// 17 significant digits.
std::string fmt17(double v);

void write_traces_csv(const std::string& path, const std::vector<TraceRecord>& records);
std::vector<TraceRecord> read_traces_csv(const std::string& path);

}  // namespace ctrap
