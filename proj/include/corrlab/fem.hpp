#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <vector>

#include "corrlab/mesh.hpp"

namespace corrlab {

using SpMat = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Triplet = Eigen::Triplet<double>;

namespace fem {

struct ElementGeometry {
  double area;
  Vec2 grad[3];  // gradients of the P1 hat functions
};

inline ElementGeometry element_geometry(const Mesh& mesh, int t) {
  const auto& tri = mesh.triangles()[t];
  const Vec2 a = mesh.vertices()[tri[0]];
  const Vec2 b = mesh.vertices()[tri[1]];
  const Vec2 c = mesh.vertices()[tri[2]];
  const double twice_area = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
  ElementGeometry g;
  g.area = 0.5 * twice_area;
  g.grad[0] = {(b.y - c.y) / twice_area, (c.x - b.x) / twice_area};
  g.grad[1] = {(c.y - a.y) / twice_area, (a.x - c.x) / twice_area};
  g.grad[2] = {(a.y - b.y) / twice_area, (b.x - a.x) / twice_area};
  return g;
}

inline SpMat assemble_mass(const Mesh& mesh) {
  std::vector<Triplet> trip;
  trip.reserve(9 * mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const double a = mesh.triangle_area(t) / 12.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trip.emplace_back(tri[i], tri[j], i == j ? 2.0 * a : a);
  }
  SpMat m(mesh.n_vertices(), mesh.n_vertices());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

inline SpMat assemble_stiffness(const Mesh& mesh) {
  std::vector<Triplet> trip;
  trip.reserve(9 * mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const ElementGeometry g = element_geometry(mesh, t);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trip.emplace_back(tri[i], tri[j], g.area * dot(g.grad[i], g.grad[j]));
  }
  SpMat k(mesh.n_vertices(), mesh.n_vertices());
  k.setFromTriplets(trip.begin(), trip.end());
  return k;
}

// Stiffness with coefficient w_h^2, w_h the P1 interpolant of nodal values.
// The integrand is quadratic per element; the mid-edge rule is exact.
inline SpMat assemble_squared_weighted_stiffness(const Mesh& mesh, const Vector& w) {
  std::vector<Triplet> trip;
  trip.reserve(9 * mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const ElementGeometry g = element_geometry(mesh, t);
    const double w0 = w[tri[0]], w1 = w[tri[1]], w2 = w[tri[2]];
    const double m01 = 0.5 * (w0 + w1), m12 = 0.5 * (w1 + w2), m02 = 0.5 * (w0 + w2);
    const double wsq = (m01 * m01 + m12 * m12 + m02 * m02) / 3.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trip.emplace_back(tri[i], tri[j], wsq * g.area * dot(g.grad[i], g.grad[j]));
  }
  SpMat k(mesh.n_vertices(), mesh.n_vertices());
  k.setFromTriplets(trip.begin(), trip.end());
  return k;
}

// Boundary mass sum_e int_e w(x,t) phi_i phi_j ds over edges selected by
// `pick`, with 2-point Gauss per edge (exact for constant and linear w).
template <class Pick, class Weight>
SpMat assemble_boundary_mass(const Mesh& mesh, Pick pick, Weight w, double t) {
  static const double q[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
  std::vector<Triplet> trip;
  for (const auto& e : mesh.boundary_edges()) {
    if (!pick(e.tag)) continue;
    const Vec2 pa = mesh.vertices()[e.a], pb = mesh.vertices()[e.b];
    const double len = norm(pb - pa);
    double m[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    for (double s : q) {
      const Vec2 x = pa + s * (pb - pa);
      const double wv = w(x, t) * 0.5 * len;
      const double phi[2] = {1.0 - s, s};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m[i][j] += wv * phi[i] * phi[j];
    }
    const int id[2] = {e.a, e.b};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) trip.emplace_back(id[i], id[j], m[i][j]);
  }
  SpMat r(mesh.n_vertices(), mesh.n_vertices());
  r.setFromTriplets(trip.begin(), trip.end());
  return r;
}

// Boundary load sum_e int_e f(x,t) phi_i ds over edges selected by `pick`.
template <class Pick, class Fn>
Vector assemble_boundary_load(const Mesh& mesh, Pick pick, Fn f, double t) {
  static const double q[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
  Vector b = Vector::Zero(mesh.n_vertices());
  for (const auto& e : mesh.boundary_edges()) {
    if (!pick(e.tag)) continue;
    const Vec2 pa = mesh.vertices()[e.a], pb = mesh.vertices()[e.b];
    const double len = norm(pb - pa);
    for (double s : q) {
      const Vec2 x = pa + s * (pb - pa);
      const double fv = f(x, t) * 0.5 * len;
      b[e.a] += fv * (1.0 - s);
      b[e.b] += fv * s;
    }
  }
  return b;
}

// Volume load int f(x,t) phi_i dx with the mid-edge rule.
template <class Fn>
Vector assemble_volume_load(const Mesh& mesh, Fn f, double t) {
  Vector b = Vector::Zero(mesh.n_vertices());
  for (int k = 0; k < mesh.n_triangles(); ++k) {
    const auto& tri = mesh.triangles()[k];
    const Vec2 p0 = mesh.vertices()[tri[0]], p1 = mesh.vertices()[tri[1]],
               p2 = mesh.vertices()[tri[2]];
    const double a = mesh.triangle_area(k) / 3.0;
    const Vec2 m01 = 0.5 * (p0 + p1), m12 = 0.5 * (p1 + p2), m02 = 0.5 * (p0 + p2);
    // hat values at opposite mid-edges: 1/2, 1/2, 0 patterns
    const double f01 = f(m01, t), f12 = f(m12, t), f02 = f(m02, t);
    b[tri[0]] += a * 0.5 * (f01 + f02);
    b[tri[1]] += a * 0.5 * (f01 + f12);
    b[tri[2]] += a * 0.5 * (f12 + f02);
  }
  return b;
}

// Degree-5 7-point quadrature of a pointwise function over the mesh.
template <class Fn>
double integrate(const Mesh& mesh, Fn f) {
  static const double w0 = 9.0 / 40.0;
  static const double wa = (155.0 + std::sqrt(15.0)) / 1200.0;
  static const double wb = (155.0 - std::sqrt(15.0)) / 1200.0;
  static const double a1 = (6.0 + std::sqrt(15.0)) / 21.0;
  static const double a2 = (6.0 - std::sqrt(15.0)) / 21.0;
  struct QP {
    double l0, l1, l2, w;
  };
  static const QP pts[7] = {
      {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, w0},
      {1.0 - 2.0 * a1, a1, a1, wa},
      {a1, 1.0 - 2.0 * a1, a1, wa},
      {a1, a1, 1.0 - 2.0 * a1, wa},
      {1.0 - 2.0 * a2, a2, a2, wb},
      {a2, 1.0 - 2.0 * a2, a2, wb},
      {a2, a2, 1.0 - 2.0 * a2, wb},
  };
  double s = 0.0;
  for (int k = 0; k < mesh.n_triangles(); ++k) {
    const auto& tri = mesh.triangles()[k];
    const Vec2 p0 = mesh.vertices()[tri[0]], p1 = mesh.vertices()[tri[1]],
               p2 = mesh.vertices()[tri[2]];
    const double area = mesh.triangle_area(k);
    for (const QP& q : pts) {
      const Vec2 x = q.l0 * p0 + q.l1 * p1 + q.l2 * p2;
      s += area * q.w * f(x);
    }
  }
  return s;
}

// L2 norm of (P1 interpolant of `nodal`) - `exact` over the mesh.
template <class Fn>
double l2_error(const Mesh& mesh, const Vector& nodal, Fn exact) {
  static const double w0 = 9.0 / 40.0;
  static const double wa = (155.0 + std::sqrt(15.0)) / 1200.0;
  static const double wb = (155.0 - std::sqrt(15.0)) / 1200.0;
  static const double a1 = (6.0 + std::sqrt(15.0)) / 21.0;
  static const double a2 = (6.0 - std::sqrt(15.0)) / 21.0;
  struct QP {
    double l0, l1, l2, w;
  };
  static const QP pts[7] = {
      {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, w0},
      {1.0 - 2.0 * a1, a1, a1, wa},
      {a1, 1.0 - 2.0 * a1, a1, wa},
      {a1, a1, 1.0 - 2.0 * a1, wa},
      {1.0 - 2.0 * a2, a2, a2, wb},
      {a2, 1.0 - 2.0 * a2, a2, wb},
      {a2, a2, 1.0 - 2.0 * a2, wb},
  };
  double s = 0.0;
  for (int k = 0; k < mesh.n_triangles(); ++k) {
    const auto& tri = mesh.triangles()[k];
    const Vec2 p0 = mesh.vertices()[tri[0]], p1 = mesh.vertices()[tri[1]],
               p2 = mesh.vertices()[tri[2]];
    const double area = mesh.triangle_area(k);
    for (const QP& q : pts) {
      const Vec2 x = q.l0 * p0 + q.l1 * p1 + q.l2 * p2;
      const double uh = q.l0 * nodal[tri[0]] + q.l1 * nodal[tri[1]] + q.l2 * nodal[tri[2]];
      const double d = uh - exact(x);
      s += area * q.w * d * d;
    }
  }
  return std::sqrt(s);
}

}  // namespace fem
}  // namespace corrlab
