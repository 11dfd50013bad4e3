#pragma once

#include <array>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "corrlab/geometry.hpp"

namespace corrlab {

enum class BoundaryTag { A, I, Sigma };

inline const char* tag_name(BoundaryTag t) {
  switch (t) {
    case BoundaryTag::A: return "A";
    case BoundaryTag::I: return "I";
    case BoundaryTag::Sigma: return "Sigma";
  }
  return "?";
}

// Sigma is measured on the accessible side; geometrically it belongs to A.
inline bool is_accessible(BoundaryTag t) { return t != BoundaryTag::I; }

struct BoundaryEdge {
  int a = 0;
  int b = 0;
  BoundaryTag tag = BoundaryTag::A;
};

// Conforming triangulation of a DomainSpec.  Vertices on the bottom row lie
// exactly on the graph of phi; boundary edges carry exactly one tag.
class Mesh {
 public:
  Mesh(DomainSpec domain, std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
       std::vector<BoundaryEdge> boundary_edges, double h, std::string provenance)
      : domain_(std::move(domain)),
        vertices_(std::move(vertices)),
        triangles_(std::move(triangles)),
        boundary_edges_(std::move(boundary_edges)),
        h_(h),
        provenance_(std::move(provenance)) {}

  const DomainSpec& domain() const { return domain_; }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }
  double h() const { return h_; }
  const std::string& provenance() const { return provenance_; }

  int n_vertices() const { return int(vertices_.size()); }
  int n_triangles() const { return int(triangles_.size()); }

  double triangle_area(int t) const {
    const auto& tri = triangles_[t];
    const Vec2 a = vertices_[tri[0]], b = vertices_[tri[1]], c = vertices_[tri[2]];
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
  }

  double total_area() const {
    double s = 0.0;
    for (int t = 0; t < n_triangles(); ++t) s += triangle_area(t);
    return s;
  }

  double edge_length(const BoundaryEdge& e) const {
    return norm(vertices_[e.b] - vertices_[e.a]);
  }

  double boundary_length(BoundaryTag tag) const {
    double s = 0.0;
    for (const auto& e : boundary_edges_)
      if (e.tag == tag) s += edge_length(e);
    return s;
  }

  double accessible_boundary_length() const {
    return boundary_length(BoundaryTag::A) + boundary_length(BoundaryTag::Sigma);
  }

  double min_angle_deg() const {
    double worst = 180.0;
    for (const auto& tri : triangles_) {
      for (int k = 0; k < 3; ++k) {
        const Vec2 p = vertices_[tri[k]];
        const Vec2 u = vertices_[tri[(k + 1) % 3]] - p;
        const Vec2 v = vertices_[tri[(k + 2) % 3]] - p;
        const double cosang = dot(u, v) / (norm(u) * norm(v));
        worst = std::min(worst, std::acos(std::clamp(cosang, -1.0, 1.0)) * 180.0 / M_PI);
      }
    }
    return worst;
  }

  // Vertex ids incident to edges of the given tag, sorted and unique.
  std::vector<int> tagged_vertices(BoundaryTag tag) const {
    std::vector<int> ids;
    for (const auto& e : boundary_edges_)
      if (e.tag == tag) {
        ids.push_back(e.a);
        ids.push_back(e.b);
      }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
  }

  std::vector<int> accessible_vertices() const {
    std::vector<int> ids;
    for (const auto& e : boundary_edges_)
      if (is_accessible(e.tag)) {
        ids.push_back(e.a);
        ids.push_back(e.b);
      }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
  }

 private:
  DomainSpec domain_;
  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<BoundaryEdge> boundary_edges_;
  double h_;
  std::string provenance_;
};

namespace detail {

inline Mesh structured_mesh(const DomainSpec& domain, double h, int nx, int ny,
                            const std::string& provenance) {
  const double W = domain.width(), H = domain.height();
  const Vec2 o = domain.origin();
  std::vector<Vec2> verts((nx + 1) * (ny + 1));
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int i = 0; i <= nx; ++i) {
    const double x = W * double(i) / nx;
    const double floor_y = domain.phi(x);
    for (int j = 0; j <= ny; ++j)
      verts[id(i, j)] = o + Vec2{x, floor_y + (H - floor_y) * double(j) / ny};
  }
  std::vector<std::array<int, 3>> tris;
  tris.reserve(2 * nx * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  std::vector<BoundaryEdge> edges;
  const SigmaArc sigma = domain.sigma();
  for (int i = 0; i < nx; ++i) {
    edges.push_back({id(i, 0), id(i + 1, 0), BoundaryTag::I});
    const double xm = W * (double(i) + 0.5) / nx;
    const bool in_sigma = xm >= sigma.s0 && xm <= sigma.s1;
    edges.push_back({id(i, ny), id(i + 1, ny), in_sigma ? BoundaryTag::Sigma : BoundaryTag::A});
  }
  for (int j = 0; j < ny; ++j) {
    edges.push_back({id(0, j), id(0, j + 1), BoundaryTag::A});
    edges.push_back({id(nx, j), id(nx, j + 1), BoundaryTag::A});
  }
  return Mesh(domain, std::move(verts), std::move(tris), std::move(edges), h, provenance);
}

}  // namespace detail

// Structured sheared-grid mesher.  Deterministic for a given (domain, h);
// retries with a finer vertical grading before giving up on the 20-degree
// quality floor.
inline Mesh generate_mesh(const DomainSpec& domain, double h) {
  if (h <= 0.0) throw std::invalid_argument("mesh size h must be positive");
  const double W = domain.width(), H = domain.height();
  const int nx = std::max(2, int(std::ceil(W / h - 1e-9)));
  const int ny0 = std::max(2, int(std::ceil((H - domain.profile().min_value()) / h - 1e-9)));
  for (int attempt = 0; attempt < 3; ++attempt) {
    const int ny = ny0 + attempt;
    const double h_actual =
        std::max(W / nx, (H - domain.profile().min_value()) / ny);
    Mesh m = detail::structured_mesh(domain, h_actual, nx, ny,
                                     "generated(h=" + std::to_string(h) + ")");
    if (m.min_angle_deg() >= 20.0) return m;
  }
  fail(Errc::quality_failure, "min angle below 20 degrees after retries; profile too steep "
                              "for the structured mesher");
}

// Uniform 4-to-1 refinement with re-projection of new unknown-boundary
// vertices onto the graph of phi.  Tags are inherited by the child edges.
inline Mesh refine(const Mesh& mesh) {
  const auto& verts = mesh.vertices();
  const auto& tris = mesh.triangles();
  std::vector<Vec2> nv = verts;
  std::map<std::pair<int, int>, int> midpoint;
  std::map<std::pair<int, int>, BoundaryTag> btag;
  for (const auto& e : mesh.boundary_edges())
    btag[{std::min(e.a, e.b), std::max(e.a, e.b)}] = e.tag;

  const DomainSpec& dom = mesh.domain();
  auto mid_id = [&](int a, int b) {
    const auto key = std::make_pair(std::min(a, b), std::max(a, b));
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    Vec2 m = 0.5 * (nv[a] + nv[b]);
    const auto bt = btag.find(key);
    if (bt != btag.end() && bt->second == BoundaryTag::I) {
      const double xl = m.x - dom.origin().x;
      m.y = dom.origin().y + dom.phi(xl);  // project onto the graph
    }
    nv.push_back(m);
    const int idx = int(nv.size()) - 1;
    midpoint.emplace(key, idx);
    return idx;
  };

  std::vector<std::array<int, 3>> nt;
  nt.reserve(4 * tris.size());
  for (const auto& t : tris) {
    const int m01 = mid_id(t[0], t[1]);
    const int m12 = mid_id(t[1], t[2]);
    const int m02 = mid_id(t[0], t[2]);
    nt.push_back({t[0], m01, m02});
    nt.push_back({t[1], m12, m01});
    nt.push_back({t[2], m02, m12});
    nt.push_back({m01, m12, m02});
  }
  std::vector<BoundaryEdge> ne;
  ne.reserve(2 * mesh.boundary_edges().size());
  for (const auto& e : mesh.boundary_edges()) {
    const int m = mid_id(e.a, e.b);
    ne.push_back({e.a, m, e.tag});
    ne.push_back({m, e.b, e.tag});
  }
  return Mesh(mesh.domain(), std::move(nv), std::move(nt), std::move(ne), mesh.h() / 2.0,
              "refined(" + mesh.provenance() + ")");
}

// Plain-text export: vertex table, triangle table, tagged edge table.
inline void write_mesh(std::ostream& out, const Mesh& mesh) {
  out.precision(17);
  out << "# vertices " << mesh.n_vertices() << "\n";
  for (const Vec2& v : mesh.vertices()) out << v.x << " " << v.y << "\n";
  out << "# triangles " << mesh.n_triangles() << "\n";
  for (const auto& t : mesh.triangles()) out << t[0] << " " << t[1] << " " << t[2] << "\n";
  out << "# boundary_edges " << mesh.boundary_edges().size() << "\n";
  for (const auto& e : mesh.boundary_edges())
    out << e.a << " " << e.b << " " << tag_name(e.tag) << "\n";
}

}  // namespace corrlab
