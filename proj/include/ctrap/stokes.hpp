#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctrap/expand.hpp"
#include "ctrap/geom.hpp"
#include "ctrap/trapz.hpp"
#include "ctrap/vec3.hpp"

namespace ctrap {

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Node data of one chart in the standard frame. `w` holds the closed-surface T4
/// weight (cell area and beta end terms included).
struct NodeGeometry {
  std::vector<Vec3> x;
  std::vector<Vec3> nJ;
  std::vector<double> J;
  std::vector<double> w;
};

NodeGeometry node_geometry(const StandardEllipsoid& ell, const ChartGrid& grid);

/// Rigid ellipsoid with densities on both charts. Densities are stored with
/// standard-frame components: f~ = R^T f.
struct Body {
  StandardEllipsoid ell;
  Pose pose;
  ChartGrid grid1, grid2;
  std::vector<Vec3> f1, f2;
  NodeGeometry geo1, geo2;

  Body() = default;
  Body(const StandardEllipsoid& e, const Pose& p, int n1, int m1, int n2, int m2);

  const ChartGrid& grid(Chart c) const { return c == Chart::Grid1 ? grid1 : grid2; }
  const NodeGeometry& geometry(Chart c) const { return c == Chart::Grid1 ? geo1 : geo2; }
  std::span<const Vec3> density(Chart c) const { return c == Chart::Grid1 ? f1 : f2; }

  /// Same world-frame density vector at every node of both charts.
  void set_uniform_density(const Vec3& f_world);
  /// Resample the Grid2 density from Grid1 by bicubic interpolation.
  void transfer_density();
  /// World-frame point of a chart node.
  Vec3 node_point(Chart c, int index) const;
};

struct EvalFlags {
  bool correct = false;
  bool roundoff = false;
  Chart chart = Chart::Grid1;
  double d = 0.0;  // signed distance; 0 when the screen skipped the projection
  double d_up = 0.0;
};

struct LayerResult {
  Vec3 value;
  EvalFlags flags;
};

struct LayerPair {
  Vec3 slp, dlp;
  EvalFlags flags;
  Vec3 sum() const { return slp + dlp; }
};

struct EvalOptions {
  bool correction = true;
  std::optional<Chart> chart;  // force a chart instead of the pole-distance rule
  bool force_puncture = false;  // drop the nearest node whenever the target is corrected
};

struct KernelTerms {
  Vec3 slp, dlp;
};

/// Integrands per unit (alpha, beta) area: (1/8pi)(f/rho + (f.x^)x^/rho^3) J and
/// -(3/4pi)(f.x^)x^(x^.nJ)/rho^5 with x^ = x - x_o.
KernelTerms kernel_terms(const Vec3& x, const Vec3& x_o, const Vec3& f, const Vec3& nJ, double J);

/// Everything about one target that does not depend on the density.
struct TargetPlan {
  Vec3 x_std;
  EvalFlags flags;
  std::optional<Puncture> puncture;
  GeometryPlan geo;
  DensityStencil stencil;
  std::array<double, 179> errors{};
};

TargetPlan plan_target(const Body& body, const Vec3& x_world, const EvalOptions& opt = {});

/// Layer potentials in the standard frame for a given density on the plan's chart.
LayerPair apply_plan(const Body& body, const TargetPlan& plan, std::span<const Vec3> density);

/// Corrected (or screened) SLP and DLP at a world point, world-frame components.
LayerPair eval_layers(const Body& body, const Vec3& x_world, const EvalOptions& opt = {});
LayerResult eval_layer(const Body& body, Kernel kernel, const Vec3& x_world, const EvalOptions& opt = {});

/// Quadrature sizes for on-surface targets; zero picks defaults from the chart.
struct OnSurfaceRule {
  int n_phi = 0;
  int n_theta = 0;
};

/// SLP and DLP (principal value) at a surface point, standard frame, for a Grid1 density.
/// The sphere is rotated so the target sits at a pole; trapezoid in longitude and
/// Gauss-Legendre in colatitude, with the density interpolated bicubically.
LayerPair onsurface_layers(const Body& body, const Vec3& target_std, std::span<const Vec3> density1,
                           const OnSurfaceRule& rule = {});

/// On-surface potential at a lattice node of either chart, world-frame components.
LayerResult eval_onsurface(const Body& body, Kernel kernel, Chart chart, int node, const OnSurfaceRule& rule = {});

struct SolveOptions {
  double tol = 1e-10;
  int restart = 50;
  int max_iter = 1000;
  EvalOptions eval;
  OnSurfaceRule rule;
  std::function<void(int, double)> on_iteration;
};

struct SolveReport {
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> history;
};

/// Solve 1/2 f_k + sum_k' (S + D)[f_k'] = -U on every Grid1 node, then transfer to Grid2.
SolveReport solve_densities(std::vector<Body>& bodies, const Vec3& u_inf, const SolveOptions& opt = {});

/// Restarted GMRES on a matrix-free operator. Throws SolverError on stagnation.
SolveReport gmres(const std::function<void(std::span<const double>, std::span<double>)>& apply,
                  std::span<const double> rhs, std::span<double> x, double tol, int restart, int max_iter,
                  const std::function<void(int, double)>& on_iteration = {});

/// Binary density checkpoint; layout in docs/checkpoint.md.
void write_checkpoint(const std::string& path, const std::vector<Body>& bodies);
std::vector<Body> read_checkpoint(const std::string& path);

}  // namespace ctrap
