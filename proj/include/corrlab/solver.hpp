#pragma once

#include <Eigen/SparseCholesky>
#include <memory>
#include <optional>
#include <ostream>

#include "corrlab/fem.hpp"
#include "corrlab/flux.hpp"
#include "corrlab/mesh.hpp"

namespace corrlab {

struct TimeGrid {
  double T = 1.0;
  int steps = 16;

  double dt() const { return T / steps; }
  double time(int n) const { return T * double(n) / steps; }

  // Index of a time that must sit on the grid.
  int index_of(double t) const {
    const double k = t / dt();
    const int i = int(std::lround(k));
    if (i < 0 || i > steps || std::abs(k - i) > 1e-9 * std::max(1.0, std::abs(k)))
      fail(Errc::window_off_grid, "time " + std::to_string(t) + " is not a grid point");
    return i;
  }
};

struct SolverConfig {
  double theta = 1.0;      // 1 = backward Euler, 1/2 = trapezoidal
  double lin_tol = 1e-10;  // relative residual accepted from the linear solve
  // Verification-only volume source; disabled (null) on all experiment paths.
  std::function<double(Vec2, double)> source;
};

// Discrete temperature (or ratio) over mesh vertices x time steps.
class Field {
 public:
  Field(std::shared_ptr<const Mesh> mesh, TimeGrid grid, double theta, Matrix values)
      : mesh_(std::move(mesh)), grid_(grid), theta_(theta), values_(std::move(values)) {}

  template <class Fn>
  static Field synthetic(std::shared_ptr<const Mesh> mesh, TimeGrid grid, Fn fn) {
    Matrix v(mesh->n_vertices(), grid.steps + 1);
    for (int n = 0; n <= grid.steps; ++n) {
      const double t = grid.time(n);
      for (int i = 0; i < mesh->n_vertices(); ++i) v(i, n) = fn(mesh->vertices()[i], t);
    }
    return Field(std::move(mesh), grid, 1.0, std::move(v));
  }

  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  const TimeGrid& grid() const { return grid_; }
  double theta() const { return theta_; }
  const Matrix& values() const { return values_; }
  double value(int vertex, int step) const { return values_(vertex, step); }
  Vector at_step(int n) const { return values_.col(n); }

  double min_over(double t_from) const {
    const int n0 = grid_.index_of(t_from);
    return values_.rightCols(grid_.steps + 1 - n0).minCoeff();
  }
  double max_over(double t_from) const {
    const int n0 = grid_.index_of(t_from);
    return values_.rightCols(grid_.steps + 1 - n0).maxCoeff();
  }

  // Data the field was produced with; empty for synthetic fields.
  std::shared_ptr<const FluxSpec> flux;
  std::shared_ptr<const ImpedanceSpec> impedance;
  std::shared_ptr<const SolverConfig> config;

 private:
  std::shared_ptr<const Mesh> mesh_;
  TimeGrid grid_;
  double theta_;
  Matrix values_;
};

// Theta-scheme for u_t = Laplace(u), Neumann flux g on A, Robin gamma on I,
// zero initial data:
//   (M + dt th (K+R^{n+1})) u^{n+1} =
//       (M - dt(1-th)(K+R^n)) u^n + dt (th F^{n+1} + (1-th) F^n)  [+ source].
// Linear systems are SPD and solved by a sparse Cholesky factorization; the
// relative residual is checked against config.lin_tol at every step.
inline Field solve_forward(std::shared_ptr<const Mesh> mesh, const ImpedanceSpec& gamma,
                           const FluxSpec& g, TimeGrid grid, SolverConfig config = {}) {
  if (config.theta < 0.5 || config.theta > 1.0)
    throw std::invalid_argument("theta must lie in [1/2, 1]");
  grid.index_of(g.t1);  // t1 must sit on the grid
  const Mesh& m = *mesh;
  const int n = m.n_vertices();
  const double dt = grid.dt();
  const double th = config.theta;

  const SpMat M = fem::assemble_mass(m);
  const SpMat K = fem::assemble_stiffness(m);
  auto robin = [&](double t) {
    return fem::assemble_boundary_mass(
        m, [](BoundaryTag tag) { return tag == BoundaryTag::I; },
        [&](Vec2 x, double tt) { return gamma(x, tt); }, t);
  };
  auto load = [&](double t) {
    Vector b = fem::assemble_boundary_load(
        m, [](BoundaryTag tag) { return is_accessible(tag); },
        [&](Vec2 x, double tt) { return g(x, tt); }, t);
    if (config.source)
      b += fem::assemble_volume_load(m, [&](Vec2 x, double tt) { return config.source(x, tt); },
                                     t);
    return b;
  };

  Matrix values = Matrix::Zero(n, grid.steps + 1);
  Eigen::SimplicialLLT<SpMat> llt;
  SpMat R_new = robin(grid.time(0));
  SpMat R_old;
  SpMat lhs;
  bool factored = false;

  Vector F_old = load(grid.time(0));
  for (int step = 0; step < grid.steps; ++step) {
    const double t_new = grid.time(step + 1);
    R_old = R_new;
    if (gamma.time_dependent || step == 0) R_new = robin(t_new);
    if (gamma.time_dependent || !factored) {
      lhs = M + dt * th * (K + R_new);
      llt.compute(lhs);
      if (llt.info() != Eigen::Success)
        fail(Errc::singular_system, "Cholesky factorization failed");
      factored = true;
    }
    const Vector F_new = load(t_new);
    Vector rhs = M * values.col(step) - dt * (1.0 - th) * (K * values.col(step)) -
                 dt * (1.0 - th) * (R_old * values.col(step)) +
                 dt * (th * F_new + (1.0 - th) * F_old);
    Vector u = llt.solve(rhs);
    const double res = (lhs * u - rhs).norm();
    const double scale = std::max(rhs.norm(), 1e-300);
    if (res > config.lin_tol * scale)
      fail(Errc::singular_system, "linear solve residual " + std::to_string(res / scale));
    if (!u.allFinite()) fail(Errc::non_finite_value, "non-finite solution values");
    values.col(step + 1) = u;
    F_old = F_new;
  }

  Field f(std::move(mesh), grid, th, std::move(values));
  f.flux = std::make_shared<FluxSpec>(g);
  f.impedance = std::make_shared<ImpedanceSpec>(gamma);
  f.config = std::make_shared<SolverConfig>(config);
  return f;
}

// ---- boundary traces -------------------------------------------------------

// Values of the field on the Sigma edges over a time window, with lumped
// edge x trapezoid quadrature weights (their sum is |Sigma| (w1-w0)).
struct MeasurementTrace {
  struct EdgeGeom {
    Vec2 p0, p1;
    double len = 0.0;
  };
  std::vector<EdgeGeom> edges;
  std::vector<double> times;
  Matrix v0, v1;  // endpoint values, edges x times
  std::vector<double> weights;
  double r0 = 0.1;

  double window_length() const { return times.empty() ? 0.0 : times.back() - times.front(); }
  double sigma_length() const {
    double s = 0.0;
    for (const auto& e : edges) s += e.len;
    return s;
  }
};

inline MeasurementTrace boundary_trace(const Field& field, double w0, double w1) {
  const Mesh& m = field.mesh();
  const int i0 = field.grid().index_of(w0);
  const int i1 = field.grid().index_of(w1);
  if (i0 >= i1) throw std::invalid_argument("empty trace window");
  MeasurementTrace tr;
  tr.r0 = m.domain().r0();
  for (int k = i0; k <= i1; ++k) tr.times.push_back(field.grid().time(k));
  std::vector<std::pair<int, int>> edge_ids;
  for (const auto& e : m.boundary_edges()) {
    if (e.tag != BoundaryTag::Sigma) continue;
    // orient edges left-to-right so layouts are comparable across meshes
    int a = e.a, b = e.b;
    if (m.vertices()[a].x > m.vertices()[b].x) std::swap(a, b);
    edge_ids.push_back({a, b});
  }
  std::sort(edge_ids.begin(), edge_ids.end(), [&](auto l, auto r) {
    return m.vertices()[l.first].x < m.vertices()[r.first].x;
  });
  const int ne = int(edge_ids.size());
  if (ne == 0) fail(Errc::empty_intersection, "mesh has no Sigma-tagged edges");
  tr.edges.resize(ne);
  tr.v0.resize(ne, int(tr.times.size()));
  tr.v1.resize(ne, int(tr.times.size()));
  for (int e = 0; e < ne; ++e) {
    const Vec2 p0 = m.vertices()[edge_ids[e].first];
    const Vec2 p1 = m.vertices()[edge_ids[e].second];
    tr.edges[e] = {p0, p1, norm(p1 - p0)};
    for (int k = 0; k < int(tr.times.size()); ++k) {
      tr.v0(e, k) = field.value(edge_ids[e].first, i0 + k);
      tr.v1(e, k) = field.value(edge_ids[e].second, i0 + k);
    }
  }
  const double dt = field.grid().dt();
  tr.weights.reserve(size_t(2 * ne) * tr.times.size());
  for (int e = 0; e < ne; ++e)
    for (size_t k = 0; k < tr.times.size(); ++k) {
      const double tw = (k == 0 || k + 1 == tr.times.size()) ? 0.5 * dt : dt;
      tr.weights.push_back(0.5 * tr.edges[e].len * tw);
      tr.weights.push_back(0.5 * tr.edges[e].len * tw);
    }
  return tr;
}

namespace detail {

inline void require_same_layout(const MeasurementTrace& a, const MeasurementTrace& b) {
  if (a.edges.size() != b.edges.size() || a.times.size() != b.times.size() ||
      std::abs(a.r0 - b.r0) > 1e-12)
    fail(Errc::incompatible_traces, "traces differ in Sigma discretization or window");
  for (size_t e = 0; e < a.edges.size(); ++e)
    if (norm(a.edges[e].p0 - b.edges[e].p0) > 1e-9 || norm(a.edges[e].p1 - b.edges[e].p1) > 1e-9)
      fail(Errc::incompatible_traces, "traces differ in Sigma discretization");
  for (size_t k = 0; k < a.times.size(); ++k)
    if (std::abs(a.times[k] - b.times[k]) > 1e-12)
      fail(Errc::incompatible_traces, "traces differ in time window");
}

}  // namespace detail

// r0-normalized L2(Sigma x window) distance of two traces:
//   r0^{-(n+2)/2} ( int int (a-b)^2 )^{1/2},  n = 2.
// The difference is bilinear per edge x step, so 2x2 Gauss is exact.
inline double trace_distance(const MeasurementTrace& a, const MeasurementTrace& b) {
  detail::require_same_layout(a, b);
  static const double q[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
  double acc = 0.0;
  for (size_t e = 0; e < a.edges.size(); ++e)
    for (size_t k = 0; k + 1 < a.times.size(); ++k) {
      const double dt = a.times[k + 1] - a.times[k];
      for (double qs : q)
        for (double qt : q) {
          const double d0 = (a.v0(e, k) - b.v0(e, k)) * (1.0 - qt) +
                            (a.v0(e, k + 1) - b.v0(e, k + 1)) * qt;
          const double d1 = (a.v1(e, k) - b.v1(e, k)) * (1.0 - qt) +
                            (a.v1(e, k + 1) - b.v1(e, k + 1)) * qt;
          const double d = d0 * (1.0 - qs) + d1 * qs;
          acc += 0.25 * a.edges[e].len * dt * d * d;
        }
    }
  return std::sqrt(acc) / (a.r0 * a.r0);
}

// Restriction of a finer trace (nested refinement in space, nested or equal
// in time) onto the layout of `pattern`; values are picked at the shared
// vertices and times.
inline MeasurementTrace restrict_trace(const MeasurementTrace& fine,
                                       const MeasurementTrace& pattern) {
  MeasurementTrace out = pattern;
  std::vector<int> tmap(pattern.times.size());
  for (size_t k = 0; k < pattern.times.size(); ++k) {
    const auto it = std::find_if(fine.times.begin(), fine.times.end(), [&](double t) {
      return std::abs(t - pattern.times[k]) < 1e-12;
    });
    if (it == fine.times.end())
      fail(Errc::incompatible_traces, "pattern time not present in fine trace");
    tmap[k] = int(it - fine.times.begin());
  }
  auto value_at = [&](Vec2 p, int ft) {
    for (size_t e = 0; e < fine.edges.size(); ++e) {
      if (norm(fine.edges[e].p0 - p) < 1e-9) return fine.v0(e, ft);
      if (norm(fine.edges[e].p1 - p) < 1e-9) return fine.v1(e, ft);
    }
    fail(Errc::incompatible_traces, "pattern vertex not present in fine trace");
  };
  for (size_t e = 0; e < pattern.edges.size(); ++e)
    for (size_t k = 0; k < pattern.times.size(); ++k) {
      out.v0(e, k) = value_at(pattern.edges[e].p0, tmap[k]);
      out.v1(e, k) = value_at(pattern.edges[e].p1, tmap[k]);
    }
  return out;
}

// ---- variational flux recovery ---------------------------------------------

// Normal derivative on a boundary part, recovered by testing the discrete
// heat operator against boundary hat functions:
//   int_part q phi_i = (M d_t u + K u^th - S^th - [other part data])_i,
// then inverting the part's edge mass matrix.  Collocated at t^{n-1+th}.
struct BoundaryFlux {
  std::vector<int> nodes;
  std::vector<Vec2> positions;
  std::vector<double> times;
  Matrix q;        // nodes x times
  Matrix u_theta;  // field at the same collocation, nodes x times
};

inline BoundaryFlux normal_derivative(const Field& field, BoundaryTag part) {
  const Mesh& m = field.mesh();
  const TimeGrid& grid = field.grid();
  const double dt = grid.dt();
  const double th = field.theta();
  const bool on_unknown = part == BoundaryTag::I;

  const std::vector<int> nodes = on_unknown ? m.tagged_vertices(BoundaryTag::I)
                                            : m.accessible_vertices();
  std::vector<int> local(m.n_vertices(), -1);
  for (size_t i = 0; i < nodes.size(); ++i) local[nodes[i]] = int(i);

  auto pick = [on_unknown](BoundaryTag t) {
    return on_unknown ? t == BoundaryTag::I : is_accessible(t);
  };
  const SpMat Mpart_full = fem::assemble_boundary_mass(
      m, pick, [](Vec2, double) { return 1.0; }, 0.0);
  SpMat Mpart(int(nodes.size()), int(nodes.size()));
  {
    std::vector<Triplet> trip;
    for (int k = 0; k < Mpart_full.outerSize(); ++k)
      for (SpMat::InnerIterator it(Mpart_full, k); it; ++it)
        if (local[it.row()] >= 0 && local[it.col()] >= 0)
          trip.emplace_back(local[it.row()], local[it.col()], it.value());
    Mpart.setFromTriplets(trip.begin(), trip.end());
  }
  Eigen::SimplicialLLT<SpMat> llt(Mpart);
  if (llt.info() != Eigen::Success) fail(Errc::singular_system, "boundary mass not SPD");

  const SpMat M = fem::assemble_mass(m);
  const SpMat K = fem::assemble_stiffness(m);

  BoundaryFlux out;
  out.nodes = nodes;
  for (int v : nodes) out.positions.push_back(m.vertices()[v]);
  out.q.resize(int(nodes.size()), grid.steps);
  out.u_theta.resize(int(nodes.size()), grid.steps);
  out.times.resize(grid.steps);

  for (int step = 1; step <= grid.steps; ++step) {
    const double t_new = grid.time(step), t_old = grid.time(step - 1);
    const double t_th = th * t_new + (1.0 - th) * t_old;
    const Vector u_new = field.at_step(step), u_old = field.at_step(step - 1);
    const Vector u_th = th * u_new + (1.0 - th) * u_old;
    Vector b = M * ((u_new - u_old) / dt) + K * u_th;
    if (field.config && field.config->source)
      b -= th * fem::assemble_volume_load(
               m, [&](Vec2 x, double t) { return field.config->source(x, t); }, t_new) +
           (1.0 - th) * fem::assemble_volume_load(
               m, [&](Vec2 x, double t) { return field.config->source(x, t); }, t_old);
    if (on_unknown) {
      // remove the prescribed A data carried by shared corner hats
      if (field.flux) {
        auto acc = [](BoundaryTag t) { return is_accessible(t); };
        b -= th * fem::assemble_boundary_load(
                 m, acc, [&](Vec2 x, double t) { return (*field.flux)(x, t); }, t_new) +
             (1.0 - th) * fem::assemble_boundary_load(
                 m, acc, [&](Vec2 x, double t) { return (*field.flux)(x, t); }, t_old);
      }
    } else if (field.impedance) {
      // remove the Robin term carried by shared corner hats
      auto unk = [](BoundaryTag t) { return t == BoundaryTag::I; };
      const SpMat R_new = fem::assemble_boundary_mass(
          m, unk, [&](Vec2 x, double t) { return (*field.impedance)(x, t); }, t_new);
      const SpMat R_old = fem::assemble_boundary_mass(
          m, unk, [&](Vec2 x, double t) { return (*field.impedance)(x, t); }, t_old);
      b += th * (R_new * u_new) + (1.0 - th) * (R_old * u_old);
    }
    Vector rhs(int(nodes.size()));
    for (size_t i = 0; i < nodes.size(); ++i) rhs[int(i)] = b[nodes[i]];
    const Vector q = llt.solve(rhs);
    out.times[step - 1] = t_th;
    for (size_t i = 0; i < nodes.size(); ++i) {
      out.q(int(i), step - 1) = q[int(i)];
      out.u_theta(int(i), step - 1) = u_th[nodes[i]];
    }
  }
  return out;
}

// Per-step relative defect of the discrete heat balance with test function 1
// (theta = 1):  int_Omega d_t u + int_I gamma u - int_A g = 0.
inline std::vector<double> energy_balance_residual(const Field& field, const FluxSpec& g,
                                                   const ImpedanceSpec& gamma) {
  if (field.theta() != 1.0)
    throw std::invalid_argument("energy balance identity requires the theta = 1 scheme");
  const Mesh& m = field.mesh();
  const TimeGrid& grid = field.grid();
  const double dt = grid.dt();
  const SpMat M = fem::assemble_mass(m);
  std::vector<double> res(grid.steps);
  for (int step = 1; step <= grid.steps; ++step) {
    const double t = grid.time(step);
    const Vector u_new = field.at_step(step), u_old = field.at_step(step - 1);
    const double heat_rate = (M * ((u_new - u_old) / dt)).sum();
    const SpMat R = fem::assemble_boundary_mass(
        m, [](BoundaryTag tag) { return tag == BoundaryTag::I; },
        [&](Vec2 x, double tt) { return gamma(x, tt); }, t);
    const double robin = (R * u_new).sum();
    const double influx = fem::assemble_boundary_load(
                              m, [](BoundaryTag tag) { return is_accessible(tag); },
                              [&](Vec2 x, double tt) { return g(x, tt); }, t)
                              .sum();
    double source = 0.0;
    if (field.config && field.config->source)
      source = fem::assemble_volume_load(
                   m, [&](Vec2 x, double tt) { return field.config->source(x, tt); }, t)
                   .sum();
    const double scale =
        std::max({std::abs(heat_rate), std::abs(robin), std::abs(influx), 1e-300});
    res[step - 1] = std::abs(heat_rate + robin - influx - source) / scale;
  }
  return res;
}

// Plain-text vertex-value snapshot of one time step.
inline void write_field_step(std::ostream& out, const Field& field, int step) {
  out.precision(17);
  out << "# t " << field.grid().time(step) << "\n";
  for (int i = 0; i < field.mesh().n_vertices(); ++i) {
    const Vec2 p = field.mesh().vertices()[i];
    out << p.x << " " << p.y << " " << field.value(i, step) << "\n";
  }
}

}  // namespace corrlab
