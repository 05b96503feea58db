#include "ctrap/flowsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace ctrap {

void Scene::apply_density_mode() {
  if (density == DensityMode::AnalyticSphere) {
    for (Body& b : bodies) {
      if (!b.ell.is_sphere() || b.ell.a != 1.0)
        throw std::invalid_argument("analytic_sphere density needs unit spheres");
      b.set_uniform_density(-1.5 * u_inf);
    }
  } else if (density == DensityMode::Uniform) {
    for (Body& b : bodies) b.set_uniform_density(uniform_density);
  }
}

Vec3 velocity(const Scene& scene, const Vec3& x, const EvalOptions& opt) {
  Vec3 u = scene.u_inf;
  for (const Body& b : scene.bodies) {
    if (scene.use_slp && scene.use_dlp) {
      u += eval_layers(b, x, opt).sum();
    } else if (scene.use_slp) {
      u += eval_layer(b, Kernel::SLP, x, opt).value;
    } else if (scene.use_dlp) {
      u += eval_layer(b, Kernel::DLP, x, opt).value;
    }
  }
  return u;
}

bool inside_any(const Scene& scene, const Vec3& x) {
  for (const Body& b : scene.bodies)
    if (b.ell.level(standardize(b.pose, x)) < 1.0) return true;
  return false;
}

double sampled_gap(const Body& a, const Body& b) {
  double gap = std::numeric_limits<double>::infinity();
  auto scan = [&gap](const Body& from, const Body& to) {
    for (int i = 0; i < from.grid1.node_count(); ++i) {
      const Vec3 x = standardize(to.pose, from.node_point(Chart::Grid1, i));
      if (to.ell.level(x) <= 1.0) {
        gap = -1.0;
        return;
      }
      const Chart c = select_chart(to.ell, x);
      const auto [j, k] = nearest_node(to.ell, to.grid(c), x);
      const ProjectionResult p = project(to.ell, c, x, to.grid(c).alpha(j), to.grid(c).beta(k));
      gap = std::min(gap, std::abs(p.d));
    }
  };
  scan(a, b);
  if (gap < 0) return gap;
  scan(b, a);
  return gap;
}

std::string to_string(TraceStatus s) {
  switch (s) {
    case TraceStatus::Crossed: return "crossed";
    case TraceStatus::TimedOut: return "timed_out";
    case TraceStatus::EnteredBody: return "entered_body";
  }
  return "unknown";
}

namespace {

TraceStatus parse_status(const std::string& s) {
  if (s == "crossed") return TraceStatus::Crossed;
  if (s == "timed_out") return TraceStatus::TimedOut;
  if (s == "entered_body") return TraceStatus::EnteredBody;
  throw std::invalid_argument("unknown trace status: " + s);
}

}  // namespace

TraceResult rk4_trace(const VelocityField& u, const Vec3& x0, double dt, const std::optional<Plane>& stop,
                      double t_max, const InsideTest& inside, bool keep_path) {
  if (!(dt > 0)) throw std::invalid_argument("rk4_trace needs dt > 0");
  TraceResult r;
  r.x = x0;
  if (keep_path) r.path.push_back(x0);
  if (inside && inside(x0)) {
    r.status = TraceStatus::EnteredBody;
    return r;
  }
  double g = stop ? stop->eval(x0) : -1.0;
  while (r.t < t_max) {
    const double h = std::min(dt, t_max - r.t);
    Vec3 next;
    try {
      const Vec3 k1 = u(r.x);
      const Vec3 k2 = u(r.x + 0.5 * h * k1);
      const Vec3 k3 = u(r.x + 0.5 * h * k2);
      const Vec3 k4 = u(r.x + h * k3);
      next = r.x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } catch (const EvaluationError&) {
      // A stage point fell deep inside a body.
      r.status = TraceStatus::EnteredBody;
      return r;
    }
    const double g_next = stop ? stop->eval(next) : -1.0;
    if (stop && g < 0 && g_next >= 0) {
      const double s = g / (g - g_next);
      r.x = r.x + s * (next - r.x);
      r.t += s * h;
      r.status = TraceStatus::Crossed;
      if (keep_path) r.path.push_back(r.x);
      return r;
    }
    r.x = next;
    r.t += h;
    g = g_next;
    if (keep_path) r.path.push_back(r.x);
    if (inside && inside(r.x)) {
      r.status = TraceStatus::EnteredBody;
      return r;
    }
  }
  r.status = TraceStatus::TimedOut;
  return r;
}

std::vector<TraceRecord> shadow_experiment(const VelocityField& u, const InsideTest& inside, const ShadowSpec& spec,
                                           double dt, double t_max, const std::vector<TraceRecord>* reference) {
  const int nc = spec.count;
  if (nc <= 0) throw std::invalid_argument("shadow lattice count must be positive");
  if (reference && static_cast<int>(reference->size()) != nc * nc)
    throw std::invalid_argument("reference traces do not match the lattice");
  const Plane exit{spec.normal, spec.stop};
  const double hy = (spec.y_hi - spec.y_lo) / nc, hz = (spec.z_hi - spec.z_lo) / nc;
  std::vector<TraceRecord> out;
  out.reserve(static_cast<size_t>(nc * nc));
  for (int i = 0; i < nc; ++i)
    for (int j = 0; j < nc; ++j) {
      TraceRecord rec;
      rec.y0 = spec.y_lo + (i + 0.5) * hy;
      rec.z0 = spec.z_lo + (j + 0.5) * hz;
      const TraceResult tr = rk4_trace(u, spec.point(rec.y0, rec.z0, spec.start), dt, exit, t_max, inside);
      rec.status = tr.status;
      rec.t_fin = tr.t;
      rec.x_fin = tr.x;
      const Vec3 rel = tr.x - spec.stop * spec.normal;
      rec.y_fin1 = dot(rel, spec.e1);
      rec.y_fin2 = dot(rel, spec.e2);
      if (rec.status == TraceStatus::Crossed) {
        if (spec.reversible) {
          rec.error = std::hypot(rec.y_fin1 - rec.y0, rec.y_fin2 - rec.z0);
        } else if (reference) {
          const TraceRecord& ref = (*reference)[out.size()];
          if (ref.status == TraceStatus::Crossed)
            rec.error = std::hypot(rec.y_fin1 - ref.y_fin1, rec.y_fin2 - ref.y_fin2);
        }
      }
      out.push_back(rec);
    }
  return out;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_traces_csv(const std::string& path, const std::vector<TraceRecord>& records) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "y0,z0,T_fin,y_fin_1,y_fin_2,status,error\n";
  for (const TraceRecord& r : records)
    f << fmt17(r.y0) << ',' << fmt17(r.z0) << ',' << fmt17(r.t_fin) << ',' << fmt17(r.y_fin1) << ','
      << fmt17(r.y_fin2) << ',' << to_string(r.status) << ',' << (r.error ? fmt17(*r.error) : std::string()) << '\n';
}

std::vector<TraceRecord> read_traces_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::string line;
  std::getline(f, line);
  std::vector<TraceRecord> out;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
    if (line.back() == ',') cols.emplace_back();
    if (cols.size() != 7) throw std::runtime_error("malformed trace row in " + path);
    TraceRecord r;
    r.y0 = std::stod(cols[0]);
    r.z0 = std::stod(cols[1]);
    r.t_fin = std::stod(cols[2]);
    r.y_fin1 = std::stod(cols[3]);
    r.y_fin2 = std::stod(cols[4]);
    r.status = parse_status(cols[5]);
    if (!cols[6].empty()) r.error = std::stod(cols[6]);
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------- scene files

namespace {

[[noreturn]] void scene_error(int line, const std::string& msg) {
  throw std::invalid_argument("scene line " + std::to_string(line) + ": " + msg);
}

// Numbers with an optional pi factor and divisor: 0.5, -pi/5, 7pi/8, 2*pi, pi.
double parse_value(const std::string& tok, int line) {
  std::string s = tok;
  double sign = 1.0;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    if (s[0] == '-') sign = -1.0;
    s.erase(0, 1);
  }
  double den = 1.0;
  if (const auto slash = s.find('/'); slash != std::string::npos) {
    try {
      size_t used = 0;
      den = std::stod(s.substr(slash + 1), &used);
      if (used != s.size() - slash - 1) throw std::invalid_argument("");
    } catch (const std::exception&) {
      scene_error(line, "bad number '" + tok + "'");
    }
    s.erase(slash);
  }
  double num = 1.0;
  if (const auto p = s.find("pi"); p != std::string::npos) {
    if (p + 2 != s.size()) scene_error(line, "bad number '" + tok + "'");
    s.erase(p);
    if (!s.empty() && s.back() == '*') s.pop_back();
    num = std::numbers::pi;
    if (s.empty()) return sign * num / den;
  }
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("");
    return sign * v * num / den;
  } catch (const std::exception&) {
    scene_error(line, "bad number '" + tok + "'");
  }
}

int even_up(int n) { return n % 2 == 0 ? n : n + 1; }

struct BodyLine {
  StandardEllipsoid ell;
  Pose pose;
  int m1 = 0, n1 = 0, m2 = 0, n2 = 0;
  bool has_mesh = false;
};

}  // namespace

Scene parse_scene(const std::string& text, std::optional<double> resolution) {
  Scene scene;
  std::vector<BodyLine> lines;
  std::string mesh_kind = "table";
  bool dcb = false;
  double mesh_param = 0.0;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    const std::string& key = tok[0];
    auto num = [&](size_t i) {
      if (i >= tok.size()) scene_error(lineno, "missing value for " + key);
      return parse_value(tok[i], lineno);
    };
    auto vec = [&](size_t i) { return Vec3{num(i), num(i + 1), num(i + 2)}; };
    if (key == "u_inf") {
      scene.u_inf = vec(1);
      if (tok.size() > 4 && tok[4] == "unit") scene.u_inf = normalized(scene.u_inf);
    } else if (key == "layers") {
      if (tok.size() < 2) scene_error(lineno, "layers needs slp, dlp or slp+dlp");
      scene.use_slp = tok[1] == "slp" || tok[1] == "slp+dlp";
      scene.use_dlp = tok[1] == "dlp" || tok[1] == "slp+dlp";
      if (!scene.use_slp && !scene.use_dlp) scene_error(lineno, "unknown layers '" + tok[1] + "'");
    } else if (key == "density") {
      if (tok.size() < 2) scene_error(lineno, "density needs a mode");
      if (tok[1] == "solve") {
        scene.density = DensityMode::Solve;
      } else if (tok[1] == "analytic_sphere") {
        scene.density = DensityMode::AnalyticSphere;
      } else if (tok[1] == "uniform") {
        scene.density = DensityMode::Uniform;
        scene.uniform_density = vec(2);
      } else {
        scene_error(lineno, "unknown density mode '" + tok[1] + "'");
      }
    } else if (key == "rotation") {
      if (tok.size() < 2 || (tok[1] != "bcd" && tok[1] != "dcb")) scene_error(lineno, "rotation needs bcd or dcb");
      if (!lines.empty()) scene_error(lineno, "rotation must precede the body lines");
      dcb = tok[1] == "dcb";
    } else if (key == "mesh") {
      if (tok.size() < 2) scene_error(lineno, "mesh needs table, uniform N or ratio M");
      mesh_kind = tok[1];
      if (mesh_kind == "uniform" || mesh_kind == "ratio") {
        mesh_param = num(2);
      } else if (mesh_kind != "table") {
        scene_error(lineno, "unknown mesh kind '" + mesh_kind + "'");
      }
    } else if (key == "body") {
      if (tok.size() != 10 && tok.size() != 14) scene_error(lineno, "body needs 9 or 13 values");
      BodyLine b;
      b.ell = {num(1), num(2), num(3)};
      if (!(b.ell.a > 0 && b.ell.b > 0 && b.ell.c > 0)) scene_error(lineno, "semi-axes must be positive");
      b.pose.s = vec(4);
      b.pose.phi = num(7);
      b.pose.theta = num(8);
      b.pose.psi = num(9);
      // D(psi) C(theta) B(phi) is B C D with the outer angles exchanged.
      if (dcb) std::swap(b.pose.phi, b.pose.psi);
      if (tok.size() == 14) {
        b.has_mesh = true;
        b.m1 = static_cast<int>(num(10));
        b.n1 = static_cast<int>(num(11));
        b.m2 = static_cast<int>(num(12));
        b.n2 = static_cast<int>(num(13));
      }
      lines.push_back(b);
    } else if (key == "shadow_normal") {
      if (!scene.shadow) scene.shadow.emplace();
      scene.shadow->normal = normalized(vec(1));
    } else if (key == "shadow_planes") {
      if (!scene.shadow) scene.shadow.emplace();
      scene.shadow->start = num(1);
      scene.shadow->stop = num(2);
    } else if (key == "shadow_basis") {
      if (!scene.shadow) scene.shadow.emplace();
      scene.shadow->e1 = normalized(vec(1));
      scene.shadow->e2 = normalized(vec(4));
    } else if (key == "shadow_square") {
      if (!scene.shadow) scene.shadow.emplace();
      scene.shadow->y_lo = num(1);
      scene.shadow->y_hi = num(2);
      scene.shadow->z_lo = num(3);
      scene.shadow->z_hi = num(4);
    } else if (key == "shadow_count") {
      if (!scene.shadow) scene.shadow.emplace();
      scene.shadow->count = static_cast<int>(num(1));
    } else if (key == "shadow_reversible") {
      if (!scene.shadow) scene.shadow.emplace();
      scene.shadow->reversible = tok.size() > 1 && tok[1] == "yes";
    } else if (key == "seed_line") {
      scene.seed_lines.emplace_back(vec(1), vec(4));
    } else if (key == "seeds_per_line") {
      scene.seeds_per_line = static_cast<int>(num(1));
    } else {
      scene_error(lineno, "unknown key '" + key + "'");
    }
  }

  if (resolution && !(*resolution > 0)) throw std::invalid_argument("resolution must be positive");
  for (const BodyLine& b : lines) {
    int n1, m1, n2, m2;
    if (mesh_kind == "uniform") {
      const int n = static_cast<int>(std::lround(resolution ? *resolution : mesh_param));
      if (n < 8 || n % 2 != 0) throw std::invalid_argument("uniform mesh needs an even n >= 8");
      n1 = n2 = n;
      m1 = m2 = n / 2;
    } else if (mesh_kind == "ratio") {
      const int m = static_cast<int>(std::lround(resolution ? *resolution : mesh_param));
      if (m < 4) throw std::invalid_argument("ratio mesh needs m >= 4");
      n1 = 4 * m;
      m1 = m;
      n2 = even_up(3 * m);
      m2 = 2 * m;
    } else {
      if (!b.has_mesh) throw std::invalid_argument("mesh table needs m1 n1 m2 n2 on every body line");
      const double s = resolution ? *resolution : 1.0;
      m1 = static_cast<int>(std::lround(s * b.m1));
      m2 = static_cast<int>(std::lround(s * b.m2));
      n1 = even_up(static_cast<int>(std::lround(s * b.n1)));
      n2 = even_up(static_cast<int>(std::lround(s * b.n2)));
    }
    if (m1 < 4 || m2 < 4 || n1 < 8 || n2 < 8) throw std::invalid_argument("body mesh is too coarse");
    scene.bodies.emplace_back(b.ell, b.pose, n1, m1, n2, m2);
  }
  for (size_t i = 0; i < scene.bodies.size(); ++i)
    for (size_t j = i + 1; j < scene.bodies.size(); ++j)
      if (sampled_gap(scene.bodies[i], scene.bodies[j]) <= 0.0)
        throw std::invalid_argument("bodies " + std::to_string(i + 1) + " and " + std::to_string(j + 1) + " overlap");
  scene.apply_density_mode();
  return scene;
}

Scene load_scene(const std::string& path, std::optional<double> resolution) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read scene " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_scene(ss.str(), resolution);
}

}  // namespace ctrap
