#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "rieszlab/errors.hpp"
#include "rieszlab/geometry.hpp"

namespace rieszlab {

/// Reproducibility contract for every number the lab emits.
struct QuadratureSpec {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_subdivisions = 4000;
  int sphere_order = 0;  // 0: pick a per-dimension default
  double split_radius_factor = 0.5;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw SpecError("QuadratureSpec: tolerances must be positive");
    if (max_subdivisions < 1) throw SpecError("QuadratureSpec: max_subdivisions must be >= 1");
    if (sphere_order != 0 && sphere_order < 2) throw SpecError("QuadratureSpec: sphere_order must be >= 2");
    if (!(split_radius_factor > 0.0)) throw SpecError("QuadratureSpec: split_radius_factor must be positive");
  }

  int order_for(int d) const {
    if (sphere_order > 0) return sphere_order;
    if (d <= 3) return 12;
    if (d == 4) return 10;
    return 7;
  }

  /// Derived spec for inner integrals of a nested quadrature.
  QuadratureSpec inner(double factor = 0.1) const {
    QuadratureSpec q = *this;
    q.rel_tol = std::max(rel_tol * factor, 1e-14);
    q.abs_tol = std::max(abs_tol * factor, 1e-300);
    return q;
  }
};

struct Result1D {
  double value = 0.0;
  double error_estimate = 0.0;
};

template <std::size_t N>
struct ArrayResult {
  std::array<double, N> value{};
  std::array<double, N> error{};
  double max_error() const {
    double e = 0.0;
    for (double v : error) e = std::max(e, v);
    return e;
  }
};

namespace detail {

// 15-point Kronrod nodes with embedded 7-point Gauss rule on [-1, 1].
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <std::size_t N>
struct Segment {
  double a = 0.0, b = 0.0;
  std::array<double, N> value{};
  std::array<double, N> error{};
  double worst = 0.0;
};

// One GK15 pass over [a, b]. F: double -> std::array<double, N>.
template <std::size_t N, class F>
Segment<N> gk15(F&& f, double a, double b) {
  Segment<N> seg;
  seg.a = a;
  seg.b = b;
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);

  std::array<std::array<double, N>, 15> fv{};
  for (int i = 0; i < 7; ++i) {
    fv[std::size_t(i)] = f(c - h * kXgk[std::size_t(i)]);
    fv[std::size_t(14 - i)] = f(c + h * kXgk[std::size_t(i)]);
  }
  fv[7] = f(c);

  for (std::size_t k = 0; k < N; ++k) {
    double resk = 0.0, resg = 0.0, resabs = 0.0;
    for (int i = 0; i < 8; ++i) {
      double lo = fv[std::size_t(i)][k];
      double hi = (i < 7) ? fv[std::size_t(14 - i)][k] : 0.0;
      double sum = (i < 7) ? lo + hi : lo;
      resk += kWgk[std::size_t(i)] * sum;
      resabs += kWgk[std::size_t(i)] * ((i < 7) ? std::abs(lo) + std::abs(hi) : std::abs(lo));
    }
    // Gauss points are the odd Kronrod indices.
    for (int i = 0; i < 4; ++i) {
      int j = 2 * i + 1;
      double sum = (j < 7) ? fv[std::size_t(j)][k] + fv[std::size_t(14 - j)][k] : fv[7][k];
      resg += kWg[std::size_t(i)] * sum;
    }
    double mean = 0.5 * resk;
    double resasc = 0.0;
    for (int i = 0; i < 15; ++i) resasc += kWgk[std::size_t(std::min(i, 14 - i))] * std::abs(fv[std::size_t(i)][k] - mean);
    resasc *= std::abs(h);

    double err = std::abs((resk - resg) * h);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    err = std::max(err, 50.0 * std::numeric_limits<double>::epsilon() * resabs * std::abs(h));

    seg.value[k] = resk * h;
    seg.error[k] = err;
    seg.worst = std::max(seg.worst, err);
  }
  return seg;
}

}  // namespace detail

/// Globally adaptive GK15 on the union of [breaks[i], breaks[i+1]].
/// Array-valued: subdivision is driven by the worst component so all
/// components share one mesh. Deterministic for fixed inputs.
template <std::size_t N, class F>
ArrayResult<N> integrate_adaptive(F&& f, std::span<const double> breaks, const QuadratureSpec& q) {
  q.validate();
  std::vector<detail::Segment<N>> segs;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i] < breaks[i + 1])) continue;
    segs.push_back(detail::gk15<N>(f, breaks[i], breaks[i + 1]));
  }

  auto totals = [&segs] {
    ArrayResult<N> t;
    std::vector<std::size_t> order(segs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return segs[i].a < segs[j].a; });
    for (std::size_t i : order)
      for (std::size_t k = 0; k < N; ++k) {
        t.value[k] += segs[i].value[k];
        t.error[k] += segs[i].error[k];
      }
    return t;
  };

  auto converged = [&q](const ArrayResult<N>& t) {
    for (std::size_t k = 0; k < N; ++k)
      if (t.error[k] > std::max(q.abs_tol, q.rel_tol * std::abs(t.value[k]))) return false;
    return true;
  };

  ArrayResult<N> tot = totals();
  int splits = 0;
  while (!converged(tot)) {
    if (splits >= q.max_subdivisions) {
      throw ToleranceError("integrate_adaptive: subdivision budget exhausted",
                           {tot.value.begin(), tot.value.end()}, tot.max_error(), q.abs_tol);
    }
    // Worst segment; ties broken by left endpoint for determinism.
    std::size_t worst = 0;
    for (std::size_t i = 1; i < segs.size(); ++i) {
      if (segs[i].worst > segs[worst].worst ||
          (segs[i].worst == segs[worst].worst && segs[i].a < segs[worst].a))
        worst = i;
    }
    double a = segs[worst].a, b = segs[worst].b, m = 0.5 * (a + b);
    if (!(a < m && m < b)) {
      throw ToleranceError("integrate_adaptive: interval too small to split further",
                           {tot.value.begin(), tot.value.end()}, tot.max_error(), q.abs_tol);
    }
    segs[worst] = detail::gk15<N>(f, a, m);
    segs.push_back(detail::gk15<N>(f, m, b));
    ++splits;
    tot = totals();
  }
  return tot;
}

/// Deterministic adaptive quadrature of f over [a, b].
Result1D integrate_1d_adaptive(const std::function<double(double)>& f, double a, double b,
                               const QuadratureSpec& q);

/// Same, honoring interior breakpoints (kinks, support edges).
Result1D integrate_1d_adaptive(const std::function<double(double)>& f, std::span<const double> breaks,
                               const QuadratureSpec& q);

/// Quadrature rule on S^{d-1}: product of Gauss-Gegenbauer rules in the polar
/// angles and a uniform rule in the azimuth. Weights sum to the sphere area.
struct SphereRule {
  int d = 0;
  std::vector<Vec> nodes;
  std::vector<double> weights;

  double weight_sum() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }
};

/// Gauss rule for int_{-1}^1 f(u) (1-u^2)^{(m-1)/2} du (m >= 0), n points.
void gauss_gegenbauer(int n, int m, std::vector<double>& nodes, std::vector<double>& weights);

/// Product rule with `order` points per angular factor; 2 <= d <= 6.
SphereRule sphere_rule(int d, int order);

namespace detail {

// Radial profile of a polar integral around x: S(t) accumulated over rule
// nodes. Accumulate: (y, omega, weight, out) adds the angular integrand.
template <std::size_t N, class Accumulate>
std::array<double, N> sphere_stage(const Vec& x, double t, const SphereRule& rule, const Box& clip,
                                   Accumulate&& acc) {
  std::array<double, N> out{};
  const int d = x.dim();
  Vec y(d);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const Vec& w = rule.nodes[i];
    for (int k = 0; k < d; ++k) y[k] = x[k] + t * w[k];
    if (!clip.contains(y, 1e-12)) continue;
    acc(y, w, rule.weights[i], out);
  }
  return out;
}

}  // namespace detail

/// Optional restriction of the radial integration range around x.
struct RadialClip {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
};

/// Core of every singular evaluation: integrates t^{d-1-p} * S(t) over the
/// radial range that can meet `domain`, where S(t) is the sphere-rule sum of
/// the caller-supplied angular integrand. The near segment [0, r0] is mapped
/// through t = r0 * tau^{1/(d-p)}, which turns the radial weight into a
/// constant, so nothing is ever evaluated at the singular point.
template <std::size_t N, class Accumulate>
ArrayResult<N> polar_radial_integrate(const Vec& x, double p, const Box& domain,
                                      const QuadratureSpec& q, const SphereRule& rule,
                                      std::span<const double> extra_breaks, Accumulate&& acc,
                                      RadialClip clip = {}) {
  const int d = x.dim();
  if (!(p < d)) throw InvalidPowerError("polar_radial_integrate: power must be < d");

  const double tmin = std::max(domain.dist(x), clip.lo);
  const double tmax = std::min(domain.max_corner_dist(x), clip.hi);
  if (!(tmax > tmin)) return {};

  auto S = [&](double t) { return detail::sphere_stage<N>(x, t, rule, domain, acc); };

  if (tmin > 0.0) {
    // x outside the domain: integrand is smooth, integrate directly.
    std::vector<double> breaks = {tmin, tmax};
    for (double b : extra_breaks)
      if (b > tmin && b < tmax) breaks.push_back(b);
    std::sort(breaks.begin(), breaks.end());
    auto F = [&](double t) {
      auto out = S(t);
      double w = std::pow(t, d - 1 - p);
      for (auto& v : out) v *= w;
      return out;
    };
    return integrate_adaptive<N>(F, breaks, q);
  }

  const double r0 = std::clamp(q.split_radius_factor * std::min(tmax, domain.min_extent()),
                               1e-8 * tmax, 0.5 * tmax);
  const double ex = double(d) - p;  // > 0

  // Near part: int_0^{r0} t^{d-1-p} S(t) dt = (r0^{d-p}/(d-p)) int_0^1 S(r0 tau^{1/(d-p)}) dtau.
  auto Fnear = [&](double tau) {
    double t = r0 * std::pow(tau, 1.0 / ex);
    auto out = S(t);
    double w = std::pow(r0, ex) / ex;
    for (auto& v : out) v *= w;
    return out;
  };
  std::array<double, 2> near_breaks = {0.0, 1.0};
  ArrayResult<N> near = integrate_adaptive<N>(Fnear, near_breaks, q);

  std::vector<double> breaks = {r0, tmax};
  for (double b : extra_breaks)
    if (b > r0 && b < tmax) breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  auto Ffar = [&](double t) {
    auto out = S(t);
    double w = std::pow(t, d - 1 - p);
    for (auto& v : out) v *= w;
    return out;
  };
  ArrayResult<N> far = integrate_adaptive<N>(Ffar, breaks, q);

  ArrayResult<N> total;
  for (std::size_t k = 0; k < N; ++k) {
    total.value[k] = near.value[k] + far.value[k];
    total.error[k] = near.error[k] + far.error[k];
  }
  return total;
}

/// int g(y) / |y-x|^p dm_d(y) for p < d, g continuous and supported in
/// far_domain. Polar split around x; see polar_radial_integrate.
Result1D integrate_polar_singular(const std::function<double(const Vec&)>& g, const Vec& x, double p,
                                  int d, const Box& far_domain, const QuadratureSpec& q,
                                  std::span<const double> extra_breaks = {});

}  // namespace rieszlab
