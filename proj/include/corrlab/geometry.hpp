#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "corrlab/errors.hpp"

namespace corrlab {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }

// Distance from p to the segment [a,b].
inline double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 <= 0.0) return norm(p - a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

// A-priori constants of the admissible domain class: length scale r0,
// C^{1,1} bound L and (normalized) area bound M.
struct AprioriConstants {
  double r0 = 0.1;
  double L = 1.0;
  double M = 2.0;
};

// Sub-arc [s0,s1] of the top side where temperatures are read.
struct SigmaArc {
  double s0 = 0.0;
  double s1 = 0.0;
  double midpoint() const { return 0.5 * (s0 + s1); }
  double length() const { return s1 - s0; }
};

// Graph of the unknown bottom boundary: natural cubic spline through
// (knots, values).  The spline keeps phi and phi' continuous; the C^{1,1}
// bound is certified separately by divided differences.
class BoundaryProfile {
 public:
  BoundaryProfile(std::vector<double> knots, std::vector<double> values, double r0, double L)
      : knots_(std::move(knots)), values_(std::move(values)), r0_(r0), L_(L) {
    if (knots_.size() < 2 || knots_.size() != values_.size())
      throw std::invalid_argument("profile needs >=2 knots with matching values");
    if (!std::is_sorted(knots_.begin(), knots_.end()))
      throw std::invalid_argument("profile knots must be increasing");
    if (r0_ <= 0.0 || L_ <= 0.0) throw std::invalid_argument("r0 and L must be positive");
    build_spline();
  }

  static BoundaryProfile flat(double width, double level, double r0, double L, int n_knots = 5) {
    std::vector<double> xs(n_knots), ys(n_knots, level);
    for (int i = 0; i < n_knots; ++i) xs[i] = width * double(i) / double(n_knots - 1);
    return BoundaryProfile(std::move(xs), std::move(ys), r0, L);
  }

  // Same knot layout, new ordinates.
  BoundaryProfile with_values(std::vector<double> values) const {
    return BoundaryProfile(knots_, std::move(values), r0_, L_);
  }

  double operator()(double x) const { return value(x); }

  double value(double x) const {
    const int i = interval(x);
    const double h = knots_[i + 1] - knots_[i];
    const double a = knots_[i + 1] - x, b = x - knots_[i];
    return m_[i] * a * a * a / (6.0 * h) + m_[i + 1] * b * b * b / (6.0 * h) +
           (values_[i] / h - m_[i] * h / 6.0) * a + (values_[i + 1] / h - m_[i + 1] * h / 6.0) * b;
  }

  double slope(double x) const {
    const int i = interval(x);
    const double h = knots_[i + 1] - knots_[i];
    const double a = knots_[i + 1] - x, b = x - knots_[i];
    return -m_[i] * a * a / (2.0 * h) + m_[i + 1] * b * b / (2.0 * h) +
           (values_[i + 1] - values_[i]) / h - (m_[i + 1] - m_[i]) * h / 6.0;
  }

  double curvature(double x) const {
    const int i = interval(x);
    const double h = knots_[i + 1] - knots_[i];
    return (m_[i] * (knots_[i + 1] - x) + m_[i + 1] * (x - knots_[i])) / h;
  }

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }
  double r0() const { return r0_; }
  double lipschitz_bound() const { return L_; }
  double x_min() const { return knots_.front(); }
  double x_max() const { return knots_.back(); }

  double max_value() const { return extremum(true); }
  double min_value() const { return extremum(false); }

  // Finite-difference estimate of the r0-normalized C^{1,1} norm
  //   sup|phi| + r0 sup|phi'| + r0^2 sup|phi''|
  // on a grid with the given spacing (default r0/50).
  double c11_norm(double spacing = 0.0) const {
    if (spacing <= 0.0) spacing = r0_ / 50.0;
    const double a = x_min(), b = x_max();
    const int n = std::max(4, int(std::ceil((b - a) / spacing)));
    const double h = (b - a) / n;
    double sup0 = 0.0, sup1 = 0.0, sup2 = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double x = a + i * h;
      sup0 = std::max(sup0, std::abs(value(x)));
      if (i >= 1 && i <= n - 1) {
        const double fm = value(x - h), f0 = value(x), fp = value(x + h);
        sup1 = std::max(sup1, std::abs((fp - fm) / (2.0 * h)));
        sup2 = std::max(sup2, std::abs((fp - 2.0 * f0 + fm) / (h * h)));
      }
    }
    return sup0 + r0_ * sup1 + r0_ * r0_ * sup2;
  }

  // Integral of phi over [x_min, x_max]; per-interval Simpson is exact for
  // the cubic pieces.
  double integral() const {
    double s = 0.0;
    for (size_t i = 0; i + 1 < knots_.size(); ++i) {
      const double h = knots_[i + 1] - knots_[i];
      const double mid = 0.5 * (knots_[i] + knots_[i + 1]);
      s += h / 6.0 * (values_[i] + 4.0 * value(mid) + values_[i + 1]);
    }
    return s;
  }

  double arc_length(int subdivisions = 4096) const {
    const double a = x_min(), b = x_max();
    double s = 0.0;
    Vec2 prev{a, value(a)};
    for (int i = 1; i <= subdivisions; ++i) {
      const double x = a + (b - a) * double(i) / subdivisions;
      Vec2 cur{x, value(x)};
      s += norm(cur - prev);
      prev = cur;
    }
    return s;
  }

 private:
  int interval(double x) const {
    if (x <= knots_.front()) return 0;
    if (x >= knots_.back()) return int(knots_.size()) - 2;
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    return int(it - knots_.begin()) - 1;
  }

  void build_spline() {
    const size_t n = knots_.size();
    m_.assign(n, 0.0);
    if (n == 2) return;
    // Thomas solve of the natural-spline tridiagonal system.
    std::vector<double> diag(n, 0.0), sub(n, 0.0), sup(n, 0.0), rhs(n, 0.0);
    for (size_t i = 1; i + 1 < n; ++i) {
      const double hl = knots_[i] - knots_[i - 1];
      const double hr = knots_[i + 1] - knots_[i];
      sub[i] = hl / 6.0;
      diag[i] = (hl + hr) / 3.0;
      sup[i] = hr / 6.0;
      rhs[i] = (values_[i + 1] - values_[i]) / hr - (values_[i] - values_[i - 1]) / hl;
    }
    for (size_t i = 2; i + 1 < n; ++i) {
      const double w = sub[i] / diag[i - 1];
      diag[i] -= w * sup[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    for (size_t i = n - 2; i >= 1; --i) {
      m_[i] = (rhs[i] - sup[i] * (i + 2 < n ? m_[i + 1] : 0.0)) / diag[i];
      if (i == 1) break;
    }
  }

  double extremum(bool want_max) const {
    const double a = x_min(), b = x_max();
    const int n = 512;
    double best = value(a);
    for (int i = 1; i <= n; ++i) {
      const double v = value(a + (b - a) * double(i) / n);
      best = want_max ? std::max(best, v) : std::min(best, v);
    }
    return best;
  }

  std::vector<double> knots_, values_;
  double r0_, L_;
  std::vector<double> m_;  // spline second derivatives at knots
};

// Rectangle with a graph bottom: Omega = {0 < x < W, phi(x) < y < H} shifted
// by `origin`.  The accessible part A is the three straight sides, the
// unknown part I is the graph of phi, and Sigma is a sub-arc of the top side.
class DomainSpec {
 public:
  DomainSpec(BoundaryProfile profile, double W, double H, AprioriConstants constants,
             SigmaArc sigma, Vec2 origin = {0.0, 0.0})
      : profile_(std::move(profile)),
        W_(W),
        H_(H),
        constants_(constants),
        sigma_(sigma),
        origin_(origin) {
    build_graph_cache();
  }

  const BoundaryProfile& profile() const { return profile_; }
  double width() const { return W_; }
  double height() const { return H_; }
  double r0() const { return constants_.r0; }
  double lipschitz_bound() const { return constants_.L; }
  double area_bound() const { return constants_.M; }
  const AprioriConstants& constants() const { return constants_; }
  const SigmaArc& sigma() const { return sigma_; }
  Vec2 origin() const { return origin_; }

  double phi(double x_local) const { return profile_.value(x_local); }

  // |Omega| by quadrature (exact for the spline bottom).
  double area() const { return W_ * H_ - profile_.integral(); }

  double accessible_length() const {
    return W_ + (H_ - profile_.value(0.0)) + (H_ - profile_.value(W_));
  }

  bool contains(Vec2 p) const {
    const Vec2 q = p - origin_;
    if (q.x < 0.0 || q.x > W_ || q.y > H_) return false;
    return q.y >= profile_.value(q.x);
  }

  // Distance from p to the closure of the domain (0 inside).
  double distance_to_closure(Vec2 p) const {
    if (contains(p)) return 0.0;
    double d = distance_to_unknown(p);
    const Vec2 q = p - origin_;
    d = std::min(d, segment_distance(q, {0.0, profile_.value(0.0)}, {0.0, H_}));
    d = std::min(d, segment_distance(q, {W_, profile_.value(W_)}, {W_, H_}));
    d = std::min(d, segment_distance(q, {0.0, H_}, {W_, H_}));
    return d;
  }

  // Distance from p to the full boundary A u I.
  double distance_to_boundary(Vec2 p) const {
    double d = distance_to_unknown(p);
    const Vec2 q = p - origin_;
    d = std::min(d, segment_distance(q, {0.0, profile_.value(0.0)}, {0.0, H_}));
    d = std::min(d, segment_distance(q, {W_, profile_.value(W_)}, {W_, H_}));
    d = std::min(d, segment_distance(q, {0.0, H_}, {W_, H_}));
    return d;
  }

  // Distance from p to the unknown boundary I (graph polyline).  Coarse node
  // scan plus local segment refinement around every coarse candidate; the
  // threshold uses the polyline Lipschitz bound so no minimum can be missed.
  double distance_to_unknown(Vec2 p) const {
    const Vec2 q = p - origin_;
    const int n = int(graph_.size());
    const int stride = 16;
    double coarse = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; i += stride) coarse = std::min(coarse, norm(q - graph_[i]));
    coarse = std::min(coarse, norm(q - graph_.back()));
    const double slack = stride * max_segment_;
    double best = coarse;
    for (int i = 0; i < n; i += stride) {
      if (norm(q - graph_[i]) > coarse + slack) continue;
      const int lo = std::max(0, i - stride), hi = std::min(n - 2, i + stride);
      for (int j = lo; j <= hi; ++j)
        best = std::min(best, segment_distance(q, graph_[j], graph_[j + 1]));
    }
    return best;
  }

  // Distance from p to the accessible boundary A (three straight sides).
  double distance_to_accessible(Vec2 p) const {
    const Vec2 q = p - origin_;
    double d = segment_distance(q, {0.0, H_}, {W_, H_});
    d = std::min(d, segment_distance(q, {0.0, profile_.value(0.0)}, {0.0, H_}));
    d = std::min(d, segment_distance(q, {W_, profile_.value(W_)}, {W_, H_}));
    return d;
  }

  std::vector<Vec2> sample_unknown(double resolution) const {
    const int n = std::max(2, int(std::ceil(W_ / resolution)));
    std::vector<Vec2> pts;
    pts.reserve(n + 1);
    for (int i = 0; i <= n; ++i) {
      const double x = W_ * double(i) / n;
      pts.push_back(origin_ + Vec2{x, profile_.value(x)});
    }
    return pts;
  }

  std::vector<Vec2> sample_boundary(double resolution) const {
    std::vector<Vec2> pts = sample_unknown(resolution);
    auto add_segment = [&](Vec2 a, Vec2 b) {
      const double len = norm(b - a);
      const int n = std::max(1, int(std::ceil(len / resolution)));
      for (int i = 0; i <= n; ++i) pts.push_back(a + (double(i) / n) * (b - a));
    };
    add_segment(origin_ + Vec2{0.0, profile_.value(0.0)}, origin_ + Vec2{0.0, H_});
    add_segment(origin_ + Vec2{W_, profile_.value(W_)}, origin_ + Vec2{W_, H_});
    add_segment(origin_ + Vec2{0.0, H_}, origin_ + Vec2{W_, H_});
    return pts;
  }

 private:
  void build_graph_cache() {
    const double spacing = constants_.r0 / 400.0;
    const int n = std::max(8, int(std::ceil(W_ / spacing)));
    graph_.resize(n + 1);
    for (int i = 0; i <= n; ++i) {
      const double x = W_ * double(i) / n;
      graph_[i] = {x, profile_.value(x)};
    }
    max_segment_ = 0.0;
    for (int i = 0; i < n; ++i)
      max_segment_ = std::max(max_segment_, norm(graph_[i + 1] - graph_[i]));
  }

  BoundaryProfile profile_;
  double W_, H_;
  AprioriConstants constants_;
  SigmaArc sigma_;
  Vec2 origin_;
  std::vector<Vec2> graph_;  // local coordinates
  double max_segment_ = 0.0;
};

// Validates the admissibility assumptions and returns the domain.
//  - C^{1,1} bound of phi certified by divided differences  -> ProfileTooRough
//  - area bound |Omega| <= M (r0-normalized measure)        -> AreaBoundViolated
//  - Sigma long enough to contain a boundary r0-ball trace  -> SigmaBallViolated
inline DomainSpec build_domain(const BoundaryProfile& profile, double W, double H,
                               AprioriConstants constants, SigmaArc sigma,
                               Vec2 origin = {0.0, 0.0}) {
  if (std::abs(profile.x_min()) > 1e-12 || std::abs(profile.x_max() - W) > 1e-12)
    throw std::invalid_argument("profile knots must span [0, W]");
  if (constants.r0 <= 0.0 || constants.L <= 0.0 || constants.M <= 0.0)
    throw std::invalid_argument("a-priori constants must be positive");
  const double phi_max = profile.max_value();
  if (H <= phi_max + constants.r0)
    throw std::invalid_argument("need H > max(phi) + r0: the unknown boundary may not approach A");

  const double c11 = profile.c11_norm(constants.r0 / 50.0);
  if (c11 > constants.L * constants.r0 * (1.0 + 1e-9))
    fail(Errc::profile_too_rough,
         "C^{1,1} certificate " + std::to_string(c11) + " exceeds L*r0 = " +
             std::to_string(constants.L * constants.r0));

  DomainSpec domain(profile, W, H, constants, sigma, origin);

  // Area bound |Omega| <= M r0^n, with the measure itself r0-normalized so
  // both sides carry the same r0^n factor.
  const double a = domain.area();
  if (a > constants.M * (1.0 + 1e-12))
    fail(Errc::area_bound_violated,
         "|Omega| = " + std::to_string(a) + " exceeds M = " + std::to_string(constants.M));

  // The trace of some ball B_r0(P0), P0 in Sigma, must stay inside Sigma:
  // with P0 the midpoint of the arc this needs length >= 2 r0 and clearance
  // from the lateral sides.
  if (!(sigma.s0 >= 0.0 && sigma.s1 <= W && sigma.s0 < sigma.s1))
    throw std::invalid_argument("Sigma must be a nonempty sub-arc of the top side");
  const double mid = sigma.midpoint();
  if (sigma.length() < 2.0 * constants.r0 || mid - constants.r0 <= 0.0 ||
      mid + constants.r0 >= W)
    fail(Errc::sigma_ball_violated,
         "no point of Sigma admits an r0-ball boundary trace inside Sigma");

  return domain;
}

struct DistanceReport {
  double d_hausdorff = 0.0;
  double d_modified = 0.0;
  double d_boundary = 0.0;
  double resolution = 0.0;

  std::string csv_row() const {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g", d_hausdorff, d_modified,
                  d_boundary, resolution);
    return buf;
  }
  static const char* csv_header() { return "d_hausdorff,d_modified,d_boundary,resolution"; }
};

namespace detail {

inline void require_compatible(const DomainSpec& a, const DomainSpec& b) {
  // Shared accessible side means shared rectangle frame; the wall feet may
  // differ (the stubs below the higher foot then belong to the unknown part).
  const bool same_frame = std::abs(a.width() - b.width()) < 1e-12 &&
                          std::abs(a.height() - b.height()) < 1e-12 &&
                          std::abs(a.origin().x - b.origin().x) < 1e-12 &&
                          std::abs(a.origin().y - b.origin().y) < 1e-12;
  if (!same_frame)
    fail(Errc::incompatible_domains, "domains must share W, H and the accessible boundary A");
}

}  // namespace detail

// Hausdorff distance between the closures, by dense sampling at the given
// resolution (error <= 2*resolution).  For shared-A graph domains the
// one-sided sup over a closure is attained on the graph of the profile.
inline double hausdorff_distance(const DomainSpec& d1, const DomainSpec& d2, double resolution) {
  detail::require_compatible(d1, d2);
  auto one_sided = [&](const DomainSpec& from, const DomainSpec& to) {
    double sup = 0.0;
    for (const Vec2& p : from.sample_unknown(resolution))
      sup = std::max(sup, to.distance_to_closure(p));
    return sup;
  };
  return std::max(one_sided(d1, d2), one_sided(d2, d1));
}

// Modified distance: max of the two sup-distances from each full boundary to
// the other closure.  Always <= hausdorff_distance on the same inputs.
inline double modified_distance(const DomainSpec& d1, const DomainSpec& d2, double resolution) {
  detail::require_compatible(d1, d2);
  auto one_sided = [&](const DomainSpec& from, const DomainSpec& to) {
    double sup = 0.0;
    for (const Vec2& p : from.sample_boundary(resolution))
      sup = std::max(sup, to.distance_to_closure(p));
    return sup;
  };
  return std::max(one_sided(d1, d2), one_sided(d2, d1));
}

// Hausdorff distance between the two boundaries as point sets.
inline double boundary_hausdorff(const DomainSpec& d1, const DomainSpec& d2, double resolution) {
  detail::require_compatible(d1, d2);
  auto one_sided = [&](const DomainSpec& from, const DomainSpec& to) {
    double sup = 0.0;
    for (const Vec2& p : from.sample_boundary(resolution))
      sup = std::max(sup, to.distance_to_boundary(p));
    return sup;
  };
  return std::max(one_sided(d1, d2), one_sided(d2, d1));
}

inline DistanceReport distance_report(const DomainSpec& d1, const DomainSpec& d2,
                                      double resolution) {
  DistanceReport r;
  r.resolution = resolution;
  r.d_hausdorff = hausdorff_distance(d1, d2, resolution);
  r.d_modified = modified_distance(d1, d2, resolution);
  r.d_boundary = boundary_hausdorff(d1, d2, resolution);
  return r;
}

// ---- profile files -------------------------------------------------------
//
// Plain-text table with a single header line naming the a-priori constants
// and the enclosing rectangle:
//   # r0=<..> L=<..> M=<..> W=<..> H=<..>
//   <abscissa> <value>
//   ...

struct ProfileFile {
  BoundaryProfile profile;
  AprioriConstants constants;
  double W = 0.0;
  double H = 0.0;
};

inline void save_profile(const std::string& path, const BoundaryProfile& profile, double M,
                         double W, double H) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write profile file: " + path);
  out.precision(17);
  out << "# r0=" << profile.r0() << " L=" << profile.lipschitz_bound() << " M=" << M
      << " W=" << W << " H=" << H << "\n";
  for (size_t i = 0; i < profile.knots().size(); ++i)
    out << profile.knots()[i] << " " << profile.values()[i] << "\n";
}

inline ProfileFile load_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read profile file: " + path);
  std::string header;
  std::getline(in, header);
  auto grab = [&](const std::string& key) {
    const auto pos = header.find(key + "=");
    if (pos == std::string::npos)
      throw std::runtime_error("profile header misses " + key + ": " + path);
    return std::stod(header.substr(pos + key.size() + 1));
  };
  AprioriConstants c{grab("r0"), grab("L"), grab("M")};
  const double W = grab("W"), H = grab("H");
  std::vector<double> xs, ys;
  double x, y;
  while (in >> x >> y) {
    xs.push_back(x);
    ys.push_back(y);
  }
  if (xs.size() < 2) throw std::runtime_error("profile table too short: " + path);
  return ProfileFile{BoundaryProfile(std::move(xs), std::move(ys), c.r0, c.L), c, W, H};
}

}  // namespace corrlab
