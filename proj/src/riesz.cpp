#include "rieszlab/riesz.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace rieszlab {

const char* to_string(RieszMethod m) {
  switch (m) {
    case RieszMethod::automatic:
      return "automatic";
    case RieszMethod::polar_split:
      return "polar_split";
    case RieszMethod::radial_reduction:
      return "radial_reduction";
    case RieszMethod::truncated:
      return "truncated";
  }
  return "?";
}

const SphereRule& cached_sphere_rule(int d, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<SphereRule>> cache;
  std::scoped_lock lock(mu);
  auto& slot = cache[{d, order}];
  if (!slot) slot = std::make_unique<SphereRule>(sphere_rule(d, order));
  return *slot;
}

namespace {

template <class Fn>
auto dispatch_dim(int d, Fn&& fn) {
  switch (d) {
    case 2:
      return fn(std::integral_constant<int, 2>{});
    case 3:
      return fn(std::integral_constant<int, 3>{});
    case 4:
      return fn(std::integral_constant<int, 4>{});
    case 5:
      return fn(std::integral_constant<int, 5>{});
    case 6:
      return fn(std::integral_constant<int, 6>{});
    default:
      throw UnsupportedDimensionError("dimension must be in [2, 6]");
  }
}

// Polar-split evaluation of the kernel integral; one radial pass computes all
// d components on a shared adaptive mesh.
RieszValue riesz_polar(const Measure& mu, const Vec& x, const Params& p, const QuadratureSpec& q,
                       RadialClip clip, RieszMethod tag) {
  const SphereRule& rule = cached_sphere_rule(p.d, q.order_for(p.d));
  auto breaks = mu.radial_breakpoints(x);
  RieszValue rv;
  rv.vector = Vec::zero(p.d);
  rv.method = tag;
  dispatch_dim(p.d, [&](auto dim) {
    constexpr int D = decltype(dim)::value;
    auto acc = [&mu](const Vec& y, const Vec& w, double wt, std::array<double, D>& out) {
      double c = wt * mu.density_at(y);
      if (c == 0.0) return;
      for (int i = 0; i < D; ++i) out[std::size_t(i)] += c * w[i];
    };
    ArrayResult<D> r =
        polar_radial_integrate<D>(x, p.s, mu.support_box(), q, rule, breaks, acc, clip);
    for (int i = 0; i < D; ++i) {
      rv.vector[i] = r.value[std::size_t(i)];
      rv.error_estimate += r.error[std::size_t(i)] * r.error[std::size_t(i)];
    }
    return 0;
  });
  rv.error_estimate = std::sqrt(rv.error_estimate);
  return rv;
}

// Inner angular integral of the radial reductions. kernel(t, theta, dist) is
// multiplied by sin^{d-2} theta; the near-singular spike at theta ~ 0 when
// t ~ r gets an explicit breakpoint so the refinement starts at its scale.
template <class Kernel>
double angular_integral(int d, double t, double r, const QuadratureSpec& q, Kernel&& kernel) {
  auto f = [&](double theta) {
    double sh = std::sin(0.5 * theta);
    double dist2 = (t - r) * (t - r) + 4.0 * t * r * sh * sh;
    double dist = std::sqrt(dist2);
    double s = std::sin(theta);
    double w = 1.0;
    for (int k = 0; k < d - 2; ++k) w *= s;
    return w * kernel(theta, dist);
  };
  std::vector<double> breaks = {0.0, std::numbers::pi};
  double tr = t * r;
  if (tr > 0.0) {
    double spike = 16.0 * std::abs(t - r) / std::sqrt(tr);
    if (spike > 0.0 && spike < std::numbers::pi) breaks.insert(breaks.begin() + 1, spike);
  }
  return integrate_adaptive<1>([&f](double th) { return std::array<double, 1>{f(th)}; }, breaks, q)
      .value[0];
}

Result1D potential_radial(const RadialProfile& prof, int d, double r, double power,
                          const QuadratureSpec& q) {
  const double area = unit_sphere_area(d);
  if (r <= 1e-14) {
    auto f = [&](double t) { return prof(t) * std::pow(t, double(d - 1) - power); };
    Result1D v = integrate_1d_adaptive(f, prof.t0, prof.t1, q);
    return {area * v.value, area * v.error_estimate};
  }
  const double wedge = unit_sphere_area(d - 1);
  QuadratureSpec qi = q.inner();
  auto f = [&](double t) {
    double inner = angular_integral(d, t, r, qi, [power](double, double dist) {
      return std::pow(dist, -power);
    });
    return prof(t) * std::pow(t, d - 1) * wedge * inner;
  };
  std::vector<double> breaks = {prof.t0, prof.t1};
  if (r > prof.t0 && r < prof.t1) breaks.insert(breaks.begin() + 1, r);
  return integrate_1d_adaptive(f, breaks, q);
}

}  // namespace

RieszValue riesz_vector(const Measure& mu, const Vec& x, const Params& p, const QuadratureSpec& q,
                        RieszMethod method) {
  q.validate();
  if (x.dim() != mu.dim() || mu.dim() != p.d) throw SpecError("riesz_vector: dimension mismatch");
  if (method == RieszMethod::automatic)
    method = mu.radial() ? RieszMethod::radial_reduction : RieszMethod::polar_split;

  if (method == RieszMethod::radial_reduction) {
    const auto* prof = mu.radial();
    if (!prof) throw SpecError("riesz_vector: radial_reduction requires a radial measure");
    RieszValue rv;
    rv.vector = Vec::zero(p.d);
    rv.method = RieszMethod::radial_reduction;
    double r = x.norm();
    if (r == 0.0) return rv;  // odd kernel, radial density
    Result1D comp = riesz_radial_component(*prof, r, p, q);
    rv.vector = (comp.value / r) * x;
    rv.error_estimate = comp.error_estimate;
    return rv;
  }
  return riesz_polar(mu, x, p, q, RadialClip{}, RieszMethod::polar_split);
}

RieszValue riesz_truncated(const Measure& mu, const Vec& x, double eps, const Params& p,
                           const QuadratureSpec& q) {
  if (!(eps > 0.0)) throw SpecError("riesz_truncated: eps must be positive");
  return riesz_polar(mu, x, p, q, RadialClip{eps, std::numeric_limits<double>::infinity()},
                     RieszMethod::truncated);
}

Result1D riesz_radial_component(const RadialProfile& profile, double r, const Params& p,
                                const QuadratureSpec& q) {
  q.validate();
  if (!(r > 0.0)) throw SpecError("riesz_radial_component: r must be positive");
  const int d = p.d;
  const double s = p.s;
  const double wedge = unit_sphere_area(d - 1);
  QuadratureSpec qi = q.inner();

  auto f = [&](double t) {
    double inner = angular_integral(d, t, r, qi, [s, t, r](double theta, double dist) {
      return (t * std::cos(theta) - r) * std::pow(dist, -(s + 1.0));
    });
    return profile(t) * std::pow(t, d - 1) * wedge * inner;
  };
  std::vector<double> breaks = {profile.t0, profile.t1};
  if (r > profile.t0 && r < profile.t1) breaks.insert(breaks.begin() + 1, r);
  return integrate_1d_adaptive(f, breaks, q);
}

Result1D potential(const Measure& mu, const Vec& x, double power, const QuadratureSpec& q) {
  q.validate();
  if (x.dim() != mu.dim()) throw SpecError("potential: dimension mismatch");
  if (!(power < double(mu.dim()))) throw InvalidPowerError("potential: power must be < d");

  if (const auto* prof = mu.radial()) return potential_radial(*prof, mu.dim(), x.norm(), power, q);

  const SphereRule& rule = cached_sphere_rule(mu.dim(), q.order_for(mu.dim()));
  auto breaks = mu.radial_breakpoints(x);
  if (power < 0.0) {
    // Growing kernel: nothing singular, fold |y-x|^{-power} into the angular stage.
    auto acc = [&mu, &x, power](const Vec& y, const Vec&, double wt, std::array<double, 1>& out) {
      double rho = mu.density_at(y);
      if (rho == 0.0) return;
      out[0] += wt * rho * std::pow(y.dist(x), -power);
    };
    ArrayResult<1> r = polar_radial_integrate<1>(x, 0.0, mu.support_box(), q, rule, breaks, acc);
    return {r.value[0], r.error[0]};
  }
  auto acc = [&mu](const Vec& y, const Vec&, double wt, std::array<double, 1>& out) {
    out[0] += wt * mu.density_at(y);
  };
  ArrayResult<1> r = polar_radial_integrate<1>(x, power, mu.support_box(), q, rule, breaks, acc);
  return {r.value[0], r.error[0]};
}

Result1D log_potential(const Measure& mu, const Vec& x, const QuadratureSpec& q) {
  q.validate();
  if (x.dim() != mu.dim()) throw SpecError("log_potential: dimension mismatch");

  if (const auto* prof = mu.radial()) {
    const int d = mu.dim();
    double r = x.norm();
    const double area = unit_sphere_area(d);
    if (r <= 1e-14) {
      auto f = [&](double t) { return prof->operator()(t) * std::pow(t, d - 1) * std::log(t); };
      Result1D v = integrate_1d_adaptive(f, std::max(prof->t0, 1e-300), prof->t1, q);
      return {-area * v.value, area * v.error_estimate};
    }
    const double wedge = unit_sphere_area(d - 1);
    QuadratureSpec qi = q.inner();
    auto f = [&](double t) {
      double inner = angular_integral(d, t, r, qi,
                                      [](double, double dist) { return std::log(dist); });
      return prof->operator()(t) * std::pow(t, d - 1) * wedge * inner;
    };
    std::vector<double> breaks = {prof->t0, prof->t1};
    if (r > prof->t0 && r < prof->t1) breaks.insert(breaks.begin() + 1, r);
    Result1D v = integrate_1d_adaptive(f, breaks, q);
    return {-v.value, v.error_estimate};
  }

  const SphereRule& rule = cached_sphere_rule(mu.dim(), q.order_for(mu.dim()));
  auto acc = [&mu, &x](const Vec& y, const Vec&, double wt, std::array<double, 1>& out) {
    double rho = mu.density_at(y);
    if (rho == 0.0) return;
    out[0] += wt * rho * std::log(y.dist(x));
  };
  auto breaks = mu.radial_breakpoints(x);
  ArrayResult<1> r = polar_radial_integrate<1>(x, 0.0, mu.support_box(), q, rule, breaks, acc);
  return {-r.value[0], r.error[0]};
}

double riesz_potential_U(const Measure& mu, const Vec& x, const Params& p, const QuadratureSpec& q) {
  if (p.s == 1.0) return log_potential(mu, x, q).value;
  return potential(mu, x, p.s - 1.0, q).value / (p.s - 1.0);
}

Vec gradient_via_potential(const Measure& mu, const Vec& x, const Params& p, const QuadratureSpec& q,
                           double* step_used) {
  const Box& box = mu.support_box();
  double dist = box.dist(x);
  double scale = std::clamp(dist > 0.0 ? dist : 0.25 * box.diameter(), 1e-3, 1.0);
  double h = std::cbrt(q.rel_tol) * scale;
  if (dist > 0.0) h = std::min(h, 0.4 * dist);
  if (step_used) *step_used = h;

  Vec grad(p.d);
  for (int i = 0; i < p.d; ++i) {
    auto diff = [&](double step) {
      Vec xp = x, xm = x;
      xp[i] += step;
      xm[i] -= step;
      return (riesz_potential_U(mu, xp, p, q) - riesz_potential_U(mu, xm, p, q)) / (2.0 * step);
    };
    double d1 = diff(h), d2 = diff(0.5 * h);
    grad[i] = (4.0 * d2 - d1) / 3.0;
  }
  return grad;
}

}  // namespace rieszlab
