#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "corrlab/geometry.hpp"

namespace corrlab {

// Admissible heat flux on A x [0,T].  `g` is evaluated in absolute
// coordinates; the declared constants are certified by validate_flux_pair.
struct FluxSpec {
  std::function<double(Vec2, double)> g;
  double T = 1.0;     // horizon
  double t1 = 0.25;   // early-coincidence time of the pair
  double E = 5.0;     // declared C^{0,1} bound
  double Phi1 = 0.05; // declared lower-bound constant (g >= Phi1/r0 on A^{2r0})

  double operator()(Vec2 x, double t) const { return g(x, t); }
};

// Surface impedance on I x [0,T].
struct ImpedanceSpec {
  std::function<double(Vec2, double)> gamma;
  double gamma_bar = 10.0;
  bool time_dependent = false;  // enables single-factorization stepping when false

  double operator()(Vec2 x, double t) const { return gamma(x, t); }
};

// Cutoff profile used by the default fluxes: 0 within 1.2 r0 of I, 1 beyond
// 1.9 r0, cubic smoothstep in between.  Keeps supp g inside A^{r0} while
// g = amplitude on all of A^{2r0}.
inline double unknown_boundary_cutoff(double dist, double r0) {
  const double s = (dist - 1.2 * r0) / (0.7 * r0);
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * (3.0 - 2.0 * s);
}

// Time-constant flux amplitude * cutoff(dist(x, I)).
inline FluxSpec make_cutoff_flux(const DomainSpec& domain, double amplitude, double t1, double T,
                                 double E, double Phi1) {
  auto dom = std::make_shared<DomainSpec>(domain);
  const double r0 = domain.r0();
  FluxSpec f;
  f.g = [dom, amplitude, r0](Vec2 x, double) {
    return amplitude * unknown_boundary_cutoff(dom->distance_to_unknown(x), r0);
  };
  f.T = T;
  f.t1 = t1;
  f.E = E;
  f.Phi1 = Phi1;
  return f;
}

// Second measurement: base flux modulated by 1 + rate*(t - t1)_+, so the two
// fluxes coincide up to t1 and their ratio is a time ramp afterwards.
inline FluxSpec make_ramped_flux(const FluxSpec& base, double rate) {
  FluxSpec f = base;
  const double t1 = base.t1;
  auto g0 = base.g;
  f.g = [g0, rate, t1](Vec2 x, double t) {
    return g0(x, t) * (1.0 + rate * std::max(0.0, t - t1));
  };
  return f;
}

inline FluxSpec make_scaled_flux(const FluxSpec& base, double factor) {
  FluxSpec f = base;
  auto g0 = base.g;
  f.g = [g0, factor](Vec2 x, double t) { return factor * g0(x, t); };
  return f;
}

inline ImpedanceSpec make_constant_impedance(double value, double gamma_bar) {
  ImpedanceSpec s;
  s.gamma = [value](Vec2, double) { return value; };
  s.gamma_bar = gamma_bar;
  s.time_dependent = false;
  return s;
}

inline ImpedanceSpec make_impedance(std::function<double(Vec2, double)> fn, double gamma_bar,
                                    bool time_dependent) {
  return ImpedanceSpec{std::move(fn), gamma_bar, time_dependent};
}

// Certified constants of a validated flux pair.  Phi0 is also recorded on the
// measurement window [t1,T]; the admissibility value is the one on [0,T].
struct FluxValidation {
  double E = 0.0;
  double Phi0 = 0.0;
  double Phi1 = 0.0;
  double t1 = 0.0;
  double Phi0_measurement_window = 0.0;
  double measured_norm_g = 0.0;
  double measured_norm_gt = 0.0;
};

namespace detail {

struct BoundarySample {
  Vec2 x;
  double weight;   // arclength measure
  double dist_I;   // distance to the unknown boundary
};

inline std::vector<BoundarySample> sample_accessible(const DomainSpec& d, double spacing) {
  std::vector<BoundarySample> out;
  auto add_side = [&](Vec2 a, Vec2 b) {
    const double len = norm(b - a);
    const int n = std::max(2, int(std::ceil(len / spacing)));
    for (int i = 0; i <= n; ++i) {
      const Vec2 x = a + (double(i) / n) * (b - a);
      const double w = (i == 0 || i == n) ? 0.5 * len / n : len / n;
      out.push_back({x, w, d.distance_to_unknown(x)});
    }
  };
  const Vec2 o = d.origin();
  add_side(o + Vec2{0.0, d.phi(0.0)}, o + Vec2{0.0, d.height()});
  add_side(o + Vec2{0.0, d.height()}, o + Vec2{d.width(), d.height()});
  add_side(o + Vec2{d.width(), d.height()}, o + Vec2{d.width(), d.phi(d.width())});
  return out;
}

}  // namespace detail

// Certifies assumptions (3a)-(3g) on dense sample grids and measures the
// quantitative independence Phi0 of the pair.
inline FluxValidation validate_flux_pair(const DomainSpec& domain, const FluxSpec& g,
                                         const FluxSpec& gt, int n_time = 160) {
  if (std::abs(g.T - gt.T) > 1e-12 || std::abs(g.t1 - gt.t1) > 1e-12)
    throw std::invalid_argument("flux pair must share T and t1");
  const double r0 = domain.r0();
  const double T = g.T;
  const auto samples = detail::sample_accessible(domain, r0 / 50.0);

  double sup_g = 0.0, sup_gt = 0.0;
  for (const auto& s : samples)
    for (int k = 0; k <= n_time; ++k) {
      const double t = T * double(k) / n_time;
      sup_g = std::max(sup_g, std::abs(g(s.x, t)));
      sup_gt = std::max(sup_gt, std::abs(gt(s.x, t)));
    }
  const double scale = std::max({sup_g, sup_gt, 1e-300});

  // (3b) support inside A^{r0}; (3c) A^{2r0} nonempty
  bool has_2r0 = false;
  for (const auto& s : samples) {
    if (s.dist_I > 2.0 * r0) has_2r0 = true;
    if (s.dist_I <= r0) {
      for (int k = 0; k <= n_time; ++k) {
        const double t = T * double(k) / n_time;
        if (std::abs(g(s.x, t)) > 1e-12 * scale || std::abs(gt(s.x, t)) > 1e-12 * scale)
          fail(Errc::support_violated, "flux support reaches within r0 of the unknown boundary");
      }
    }
  }
  if (!has_2r0) fail(Errc::support_violated, "A^{2r0} is empty");

  // (3a)/(3d): parabolic C^{0,1} estimate sup|g| + r0 * Lip on the grid
  auto lipschitz = [&](const FluxSpec& f) {
    double lip = 0.0;
    const double dt = T / n_time;
    for (size_t i = 0; i + 1 < samples.size(); ++i) {
      const double dx = norm(samples[i + 1].x - samples[i].x);
      if (dx < 1e-14 || dx > r0) continue;  // side junctions
      for (int k = 0; k <= n_time; ++k) {
        const double t = T * double(k) / n_time;
        lip = std::max(lip, std::abs(f(samples[i + 1].x, t) - f(samples[i].x, t)) / dx);
      }
    }
    for (const auto& s : samples)
      for (int k = 0; k < n_time; ++k) {
        const double t = T * double(k) / n_time;
        lip = std::max(lip, std::abs(f(s.x, t + dt) - f(s.x, t)) / std::sqrt(dt));
      }
    return lip;
  };
  FluxValidation v;
  v.measured_norm_g = sup_g + r0 * lipschitz(g);
  v.measured_norm_gt = sup_gt + r0 * lipschitz(gt);
  if (v.measured_norm_g > g.E * (1.0 + 1e-6) || v.measured_norm_gt > gt.E * (1.0 + 1e-6))
    fail(Errc::flux_norm_exceeded,
         "measured C^{0,1} norm exceeds the declared bound E = " + std::to_string(g.E));

  // (3e) early-time coincidence
  for (const auto& s : samples)
    for (int k = 0; k <= n_time; ++k) {
      const double t = g.t1 * double(k) / n_time;
      if (std::abs(g(s.x, t) - gt(s.x, t)) > 1e-12 * scale)
        fail(Errc::early_time_mismatch, "fluxes differ before t1");
    }

  // (3g) lower bound on A^{2r0} x [0,T]
  for (const auto& s : samples) {
    if (s.dist_I <= 2.0 * r0) continue;
    for (int k = 0; k <= n_time; ++k) {
      const double t = T * double(k) / n_time;
      if (g(s.x, t) < g.Phi1 / r0 * (1.0 - 1e-9))
        fail(Errc::lower_bound_violated,
             "g drops below Phi1/r0 on A^{2r0}: g = " + std::to_string(g(s.x, t)));
    }
  }

  // (3f) quantitative independence of the pair through the ratio deviation,
  // integrated where the ratio is defined (|g| above a floor), r0-normalized.
  auto phi0_on = [&](double t_lo) {
    const double floor = 1e-9 * scale;
    double meas = 0.0, mean = 0.0;
    const double dt = (T - t_lo) / n_time;
    for (const auto& s : samples)
      for (int k = 0; k <= n_time; ++k) {
        const double t = t_lo + (T - t_lo) * double(k) / n_time;
        const double tw = (k == 0 || k == n_time) ? 0.5 * dt : dt;
        if (std::abs(g(s.x, t)) <= floor) continue;
        meas += s.weight * tw;
        mean += s.weight * tw * gt(s.x, t) / g(s.x, t);
      }
    if (meas <= 0.0) fail(Errc::support_violated, "flux vanishes on all of A");
    mean /= meas;
    double dev = 0.0;
    for (const auto& s : samples)
      for (int k = 0; k <= n_time; ++k) {
        const double t = t_lo + (T - t_lo) * double(k) / n_time;
        const double tw = (k == 0 || k == n_time) ? 0.5 * dt : dt;
        if (std::abs(g(s.x, t)) <= floor) continue;
        const double r = gt(s.x, t) / g(s.x, t) - mean;
        dev += s.weight * tw * r * r;
      }
    return std::sqrt(dev) / (r0 * r0);  // r0^{-(n+2)/2}, n = 2
  };
  v.Phi0 = phi0_on(0.0);
  v.Phi0_measurement_window = phi0_on(g.t1);
  if (v.Phi0 < 1e-8)
    fail(Errc::fluxes_proportional,
         "the two fluxes are proportional (Phi0 = " + std::to_string(v.Phi0) + ")");

  v.E = g.E;
  v.Phi1 = g.Phi1;
  v.t1 = g.t1;
  return v;
}

// (4a)/(4b): impedance range and Lipschitz sanity on I x [0,T].
inline void validate_impedance(const DomainSpec& domain, const ImpedanceSpec& spec, double T,
                               int n_time = 64) {
  const auto pts = domain.sample_unknown(domain.r0() / 50.0);
  for (const Vec2& x : pts)
    for (int k = 0; k <= n_time; ++k) {
      const double t = T * double(k) / n_time;
      const double gv = spec(x, t);
      if (!(gv >= 0.0) || gv > spec.gamma_bar * (1.0 + 1e-12))
        fail(Errc::impedance_out_of_range,
             "gamma outside [0, gamma_bar] at t = " + std::to_string(t));
    }
}

}  // namespace corrlab
