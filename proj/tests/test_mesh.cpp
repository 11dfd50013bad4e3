#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

#include "corrlab/mesh.hpp"
#include "helpers.hpp"

using namespace corrlab;

namespace {

DomainSpec sine_domain(double amplitude = 0.04, double periods = 1.0) {
  const int n = 33;
  std::vector<double> xs(n), ys(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = double(i) / (n - 1);
    ys[i] = amplitude * std::sin(2.0 * M_PI * periods * xs[i]);
  }
  BoundaryProfile p(xs, ys, 0.1, 2.0);
  return build_domain(p, 1.0, 1.0, {0.1, 2.0, 2.0}, {0.3, 0.7});
}

// Each triangle edge must be shared by two triangles or be a boundary edge.
void check_conforming(const Mesh& m) {
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : m.triangles())
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      ++count[{std::min(a, b), std::max(a, b)}];
    }
  std::set<std::pair<int, int>> boundary;
  for (const auto& e : m.boundary_edges())
    boundary.insert({std::min(e.a, e.b), std::max(e.a, e.b)});
  int exposed = 0;
  for (const auto& [edge, c] : count) {
    REQUIRE(c <= 2);
    if (c == 1) {
      ++exposed;
      REQUIRE(boundary.count(edge) == 1);
    }
  }
  REQUIRE(size_t(exposed) == boundary.size());
  for (int t = 0; t < m.n_triangles(); ++t) REQUIRE(m.triangle_area(t) > 0.0);
}

}  // namespace

TEST_CASE("flat unit square at h=0.25 gives the structured 25/32 mesh") {
  auto p = BoundaryProfile::flat(1.0, 0.0, 0.1, 1.0);
  auto d = build_domain(p, 1.0, 1.0, {0.1, 1.0, 2.0}, {0.3, 0.7});
  Mesh m = generate_mesh(d, 0.25);
  CHECK(m.n_vertices() == 25);
  CHECK(m.n_triangles() == 32);
  CHECK(m.min_angle_deg() >= 20.0);
  CHECK(m.total_area() == Catch::Approx(1.0).margin(1e-12));
  check_conforming(m);
}

TEST_CASE("boundary tags partition the boundary") {
  auto d = sine_domain();
  Mesh m = generate_mesh(d, 1.0 / 16);
  check_conforming(m);
  // Sigma edges live on the top side within the arc
  for (const auto& e : m.boundary_edges()) {
    if (e.tag == BoundaryTag::Sigma) {
      CHECK(m.vertices()[e.a].y == Catch::Approx(1.0));
      CHECK(m.vertices()[e.b].y == Catch::Approx(1.0));
      const double xm = 0.5 * (m.vertices()[e.a].x + m.vertices()[e.b].x);
      CHECK(xm >= 0.3);
      CHECK(xm <= 0.7);
    }
  }
  CHECK(m.boundary_length(BoundaryTag::Sigma) > 0.3);
  // bottom vertices sit exactly on the graph
  for (int v : m.tagged_vertices(BoundaryTag::I))
    CHECK(m.vertices()[v].y == Catch::Approx(d.phi(m.vertices()[v].x)).margin(1e-14));
}

TEST_CASE("mesh area converges to the quadrature area at order ~2") {
  // half-sine bump: single-signed curvature, so chord errors cannot cancel
  auto d = sine_domain(0.04, 0.5);
  Mesh m1 = generate_mesh(d, 1.0 / 8);
  Mesh m2 = refine(m1);
  const double exact = d.area();
  const double e1 = std::abs(m1.total_area() - exact);
  const double e2 = std::abs(m2.total_area() - exact);
  REQUIRE(e1 > 0.0);
  CHECK(e1 / e2 >= 3.5);
}

TEST_CASE("unknown-boundary edge length converges to the arc length") {
  auto d = sine_domain();
  const double arc = d.profile().arc_length();
  Mesh m1 = generate_mesh(d, 1.0 / 8);
  Mesh m2 = refine(m1);
  const double e1 = std::abs(m1.boundary_length(BoundaryTag::I) - arc);
  const double e2 = std::abs(m2.boundary_length(BoundaryTag::I) - arc);
  REQUIRE(e1 > 0.0);
  CHECK(e1 / e2 >= 3.5);
}

TEST_CASE("refinement splits four-to-one and halves h") {
  auto p = BoundaryProfile::flat(1.0, 0.0, 0.1, 1.0);
  auto d = build_domain(p, 1.0, 1.0, {0.1, 1.0, 2.0}, {0.3, 0.7});
  Mesh m = generate_mesh(d, 0.25);
  Mesh r = refine(m);
  CHECK(r.n_triangles() == 128);
  CHECK(r.h() == Catch::Approx(m.h() / 2.0));
  // V' = V + E with E the number of distinct edges
  std::set<std::pair<int, int>> edges;
  for (const auto& t : m.triangles())
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      edges.insert({std::min(a, b), std::max(a, b)});
    }
  CHECK(r.n_vertices() == m.n_vertices() + int(edges.size()));
  check_conforming(r);

  Mesh rr = refine(r);
  CHECK(rr.h() == Catch::Approx(m.h() / 4.0));
  // tag inheritance preserves per-tag counts (each edge split in two)
  for (auto tag : {BoundaryTag::A, BoundaryTag::I, BoundaryTag::Sigma}) {
    size_t c0 = 0, c1 = 0;
    for (const auto& e : m.boundary_edges()) c0 += e.tag == tag;
    for (const auto& e : r.boundary_edges()) c1 += e.tag == tag;
    CHECK(c1 == 2 * c0);
  }
}

TEST_CASE("refined unknown-boundary midpoints are re-projected onto the graph") {
  auto d = sine_domain();
  Mesh r = refine(generate_mesh(d, 1.0 / 8));
  for (int v : r.tagged_vertices(BoundaryTag::I))
    CHECK(r.vertices()[v].y == Catch::Approx(d.phi(r.vertices()[v].x)).margin(1e-14));
}

TEST_CASE("steep profile fails the quality floor") {
  // bypass build_domain: this profile is far outside the admissible class
  const int n = 33;
  std::vector<double> xs(n), ys(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = double(i) / (n - 1);
    ys[i] = 0.45 * std::sin(2.0 * M_PI * xs[i]);
  }
  BoundaryProfile p(xs, ys, 0.1, 50.0);
  DomainSpec d(p, 1.0, 1.0, {0.1, 50.0, 2.0}, {0.3, 0.7});
  CHECK_THROWS_MATCHES(generate_mesh(d, 1.0 / 8), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::quality_failure;
                       }));
}

TEST_CASE("mesh export lists vertices, triangles and tagged edges") {
  auto p = BoundaryProfile::flat(1.0, 0.0, 0.1, 1.0);
  auto d = build_domain(p, 1.0, 1.0, {0.1, 1.0, 2.0}, {0.3, 0.7});
  Mesh m = generate_mesh(d, 0.5);
  std::ostringstream out;
  write_mesh(out, m);
  const std::string s = out.str();
  CHECK(s.find("# vertices") != std::string::npos);
  CHECK(s.find("# triangles") != std::string::npos);
  CHECK(s.find("# boundary_edges") != std::string::npos);
  CHECK(s.find(" I") != std::string::npos);
}
