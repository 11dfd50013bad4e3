#pragma once

#include <memory>
#include <random>
#include <vector>

#include "corrlab/geometry.hpp"
#include "corrlab/solver.hpp"

namespace testutil {

using corrlab::DomainSpec;
using corrlab::Vec2;

// Dumb point-set oracles for the sampled distances: sample both sets on a
// regular grid, then take the sup-min over the raw point clouds.  Kept
// independent of the library's graph-based shortcuts on purpose.

inline std::vector<Vec2> closure_cloud(const DomainSpec& d, double res) {
  std::vector<Vec2> pts;
  const Vec2 o = d.origin();
  const int nx = int(std::ceil(d.width() / res));
  const int ny = int(std::ceil(d.height() / res));
  for (int i = 0; i <= nx; ++i) {
    const double x = d.width() * double(i) / nx;
    for (int j = 0; j <= ny; ++j) {
      const double y = d.height() * double(j) / ny;
      if (y >= d.phi(x)) pts.push_back(o + Vec2{x, y});
    }
  }
  for (const Vec2& p : d.sample_boundary(res)) pts.push_back(p);
  return pts;
}

inline std::vector<Vec2> boundary_cloud(const DomainSpec& d, double res) {
  return d.sample_boundary(res);
}

inline double sup_min(const std::vector<Vec2>& from, const std::vector<Vec2>& to) {
  double sup = 0.0;
  for (const Vec2& p : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec2& q : to) {
      const double dx = p.x - q.x, dy = p.y - q.y;
      best = std::min(best, dx * dx + dy * dy);
    }
    sup = std::max(sup, best);
  }
  return std::sqrt(sup);
}

inline double brute_hausdorff(const DomainSpec& a, const DomainSpec& b, double res) {
  const auto ca = closure_cloud(a, res), cb = closure_cloud(b, res);
  return std::max(sup_min(ca, cb), sup_min(cb, ca));
}

inline double brute_boundary_hausdorff(const DomainSpec& a, const DomainSpec& b, double res) {
  const auto ca = boundary_cloud(a, res), cb = boundary_cloud(b, res);
  return std::max(sup_min(ca, cb), sup_min(cb, ca));
}

inline double brute_modified(const DomainSpec& a, const DomainSpec& b, double res) {
  const auto ba = boundary_cloud(a, res), bb = boundary_cloud(b, res);
  const auto ca = closure_cloud(a, res), cb = closure_cloud(b, res);
  return std::max(sup_min(ba, cb), sup_min(bb, ca));
}

// Random admissible profile on [0,1] with pinned endpoints; deterministic in
// the caller-provided engine.
inline corrlab::BoundaryProfile random_profile(std::mt19937& rng, double r0 = 0.1,
                                               double L = 2.0, double max_amp = 0.015) {
  std::uniform_real_distribution<double> amp(-max_amp, max_amp);
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<double> xs, ys;
    const int n = 9;
    for (int i = 0; i < n; ++i) {
      xs.push_back(double(i) / (n - 1));
      ys.push_back(i == 0 || i == n - 1 ? 0.0 : amp(rng));
    }
    corrlab::BoundaryProfile p(xs, ys, r0, L);
    if (p.c11_norm() <= L * r0) return p;
  }
  throw std::runtime_error("could not draw an admissible random profile");
}

inline DomainSpec unit_domain(const corrlab::BoundaryProfile& p, double M = 2.0,
                              corrlab::Vec2 origin = {0.0, 0.0}) {
  return corrlab::build_domain(p, 1.0, 1.0, {p.r0(), p.lipschitz_bound(), M},
                               {0.3, 0.7}, origin);
}

inline DomainSpec flat_domain(double r0 = 0.1, double level = 0.0) {
  auto p = corrlab::BoundaryProfile::flat(1.0, level, r0, 1.0);
  return corrlab::build_domain(p, 1.0, 1.0, {r0, 1.0, 2.0}, {0.3, 0.7});
}

// half-sine bump bottom, the workhorse curved domain of the test suite
inline DomainSpec bump_domain(double amplitude = 0.02, double r0 = 0.1) {
  const int n = 17;
  std::vector<double> xs(n), ys(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = double(i) / (n - 1);
    ys[i] = amplitude * std::sin(M_PI * xs[i]);
  }
  corrlab::BoundaryProfile p(xs, ys, r0, 1.5);
  return corrlab::build_domain(p, 1.0, 1.0, {r0, 1.5, 2.0}, {0.3, 0.7});
}

// Default two-flux measurement setup on a given domain: constant cutoff flux
// plus its ramped companion, constant impedance gamma = 0.5/r0.
struct LabSetup {
  corrlab::FluxSpec g;
  corrlab::FluxSpec gt;
  corrlab::ImpedanceSpec gamma;
  double T = 1.0;
  double t1 = 0.25;
};

inline LabSetup default_lab(const DomainSpec& d) {
  LabSetup s;
  s.g = corrlab::make_cutoff_flux(d, 1.0, s.t1, s.T, 8.0, 0.05);
  s.gt = corrlab::make_ramped_flux(s.g, 1.5);
  s.gamma = corrlab::make_constant_impedance(0.5 / d.r0(), 10.0 / d.r0());
  return s;
}

// Manufactured verification data: u*(x,t) = t^p cos(pi x / W) has zero
// normal flux on every side of a flat rectangle, so with gamma = 0 and
// source f = u*_t - Lap(u*) the forward problem reproduces it.
struct Manufactured {
  double W = 1.0;
  int p = 1;
  double value(corrlab::Vec2 x, double t) const {
    return std::pow(t, p) * std::cos(M_PI * x.x / W);
  }
  double source(corrlab::Vec2 x, double t) const {
    const double c = std::cos(M_PI * x.x / W);
    const double k = M_PI / W;
    return (p * std::pow(t, p - 1) + k * k * std::pow(t, p)) * c;
  }
};

inline double manufactured_error(const DomainSpec& domain, double h, int steps, double theta,
                                 int p = 1) {
  using namespace corrlab;
  auto mesh = std::make_shared<Mesh>(generate_mesh(domain, h));
  TimeGrid grid{1.0, steps};
  Manufactured mf{domain.width(), p};
  SolverConfig cfg;
  cfg.theta = theta;
  cfg.source = [mf](Vec2 x, double t) { return mf.source(x, t); };
  FluxSpec zero_flux;
  zero_flux.g = [](Vec2, double) { return 0.0; };
  zero_flux.T = 1.0;
  zero_flux.t1 = 0.0;  // unused here; keep it on every grid
  ImpedanceSpec zero_gamma = make_constant_impedance(0.0, 1.0);
  Field u = solve_forward(mesh, zero_gamma, zero_flux, grid, cfg);
  return fem::l2_error(*mesh, u.at_step(grid.steps),
                       [&](Vec2 x) { return mf.value(x, 1.0); });
}

}  // namespace testutil
