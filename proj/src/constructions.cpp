#include "rieszlab/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rieszlab/max_principle.hpp"
#include "rieszlab/parallel.hpp"

namespace rieszlab {

namespace {
constexpr double kTaperFlat = 0.7;  // fraction of the half-width that stays at 1
}

double slab_taper(double t) {
  double a = std::abs(t);
  if (a >= 1.0) return 0.0;
  if (a <= kTaperFlat) return 1.0;
  double u = (a - kTaperFlat) / (1.0 - kTaperFlat);
  double w = 1.0 - u * u;
  return w * w * w * w;
}

double slab_neighborhood_volume(int d, double delta, const QuadratureSpec& q) {
  // Thickness profile over u = |x'|: 2 delta on the disk, a circular cap
  // profile across the rim.
  const double wedge = unit_sphere_area(d - 1);
  auto f = [&](double u) {
    double over = std::max(0.0, u - 1.0);
    double h2 = delta * delta - over * over;
    if (h2 <= 0.0) return 0.0;
    return std::pow(u, d - 2) * 2.0 * std::sqrt(h2);
  };
  std::vector<double> breaks = {0.0, 1.0, 1.0 + delta};
  return wedge * integrate_1d_adaptive(f, breaks, q).value;
}

Measure prop21_measure(const SlabMeasureSpec& spec, const QuadratureSpec& q) {
  spec.validate();
  q.validate();
  const int d = spec.d;
  const double delta = spec.delta;

  // Normalization from the product structure: a 1D factor across the slab and
  // a radial factor in the hyperplane.
  auto axis_factor = [delta](double x1) { return slab_taper(x1 / delta); };
  auto rim_factor = [delta](double u) { return slab_taper(std::max(0.0, (u - 1.0) / delta)); };

  double I1 = integrate_1d_adaptive([&](double t) { return axis_factor(t); }, -delta, delta, q).value;
  const double wedge = unit_sphere_area(d - 1);
  std::vector<double> rbreaks = {0.0, 1.0, 1.0 + kTaperFlat * delta, 1.0 + delta};
  double I2 = wedge * integrate_1d_adaptive(
                          [&](double u) { return rim_factor(u) * std::pow(u, d - 2); }, rbreaks, q)
                          .value;
  const double A = 1.0 / (I1 * I2);

  AnalyticDensity den;
  Vec lo(d), hi(d);
  lo[0] = -delta;
  hi[0] = delta;
  for (int k = 1; k < d; ++k) {
    lo[k] = -(1.0 + delta);
    hi[k] = 1.0 + delta;
  }
  den.support_box = Box(lo, hi);
  den.symmetry_axis = 0;
  den.rho = [A, delta, d](const Vec& x) {
    double u2 = 0.0;
    for (int k = 1; k < d; ++k) u2 += x[k] * x[k];
    double u = std::sqrt(u2);
    return A * slab_taper(x[0] / delta) * slab_taper(std::max(0.0, (u - 1.0) / delta));
  };
  den.support_predicate = [delta, d](const Vec& x) {
    if (std::abs(x[0]) > delta) return false;
    double u2 = 0.0;
    for (int k = 1; k < d; ++k) u2 += x[k] * x[k];
    return u2 <= (1.0 + delta) * (1.0 + delta);
  };
  Measure mu(d, den, false);

  double mass = total_mass(mu, q).value;
  if (std::abs(mass - 1.0) > std::max(1e-6, 100.0 * q.rel_tol))
    throw NormalizationError("prop21_measure: could not certify unit mass (got " +
                             std::to_string(mass) + ")");
  double budget = 2.0 / slab_neighborhood_volume(d, delta, q);
  if (!(A < budget))
    throw NormalizationError("prop21_measure: density peak exceeds the 2/vol budget");
  return mu;
}

SourceProfile u5_profile() {
  SourceProfile sp;
  sp.u = [](double r) {
    if (r <= 1.0) return 2.0 / 3.0;
    return 1.0 / r - 1.0 / (3.0 * r * r * r);
  };
  sp.du = [](double r) {
    if (r <= 1.0) return 0.0;
    double r2 = r * r;
    return -1.0 / r2 + 1.0 / (r2 * r2);
  };
  sp.laplacian_u = [](double r) {
    if (r <= 1.0) return 0.0;
    return -2.0 / (r * r * r);
  };
  return sp;
}

namespace {

// Even polynomial P(t) = sum c_j v^j with v = (t/delta)^2, supported on
// [0, delta]. The radial Laplacian in R^5 maps t^{2j} to 2j(2j+3) t^{2j-2},
// i.e. c_j v^j -> c_j 2j(2j+3) / delta^2 v^{j-1}: exact coefficient algebra.
struct EvenPoly {
  std::vector<double> c;
  double delta = 0.0;

  double operator()(double t) const {
    double v = (t / delta) * (t / delta);
    if (v >= 1.0) return 0.0;
    double acc = 0.0;
    for (std::size_t j = c.size(); j-- > 0;) acc = acc * v + c[j];
    return acc;
  }

  EvenPoly laplacian5() const {
    EvenPoly out;
    out.delta = delta;
    if (c.size() <= 1) {
      out.c = {0.0};
      return out;
    }
    out.c.resize(c.size() - 1);
    for (std::size_t j = 1; j < c.size(); ++j) {
      double twoj = 2.0 * double(j);
      out.c[j - 1] = c[j] * twoj * (twoj + 3.0) / (delta * delta);
    }
    return out;
  }

  // d/dt P = (2t/delta^2) * sum_j j c_j v^{j-1}
  double derivative(double t) const {
    double v = (t / delta) * (t / delta);
    if (v >= 1.0) return 0.0;
    double acc = 0.0;
    for (std::size_t j = c.size(); j-- > 1;) acc = acc * v + double(j) * c[j];
    return acc * 2.0 * t / (delta * delta);
  }
};

EvenPoly bump_poly(double delta, int k, double amplitude) {
  // amplitude * (1 - v)^k expanded in v.
  EvenPoly p;
  p.delta = delta;
  p.c.assign(std::size_t(k + 1), 0.0);
  double binom = 1.0;
  for (int j = 0; j <= k; ++j) {
    p.c[std::size_t(j)] = amplitude * binom * ((j % 2) ? -1.0 : 1.0);
    binom = binom * (k - j) / double(j + 1);
  }
  return p;
}

double bump_amplitude(double delta, int k) {
  // Unit mass in R^5: 1 = A omega_4 delta^5 int_0^1 (1-u^2)^k u^4 du, and the
  // integral is Gamma(5/2) Gamma(k+1) / (2 Gamma(k+7/2)).
  double J = 0.5 * std::exp(std::lgamma(2.5) + std::lgamma(double(k + 1)) - std::lgamma(double(k) + 3.5));
  return 1.0 / (unit_sphere_area(5) * std::pow(delta, 5) * J);
}

// Angular factor of the radial convolution reduction in R^5:
// I(t) = int_0^pi kernel(theta, rho) sin^3 theta dtheta with
// rho^2 = (r-t)^2 + 4 r t sin^2(theta/2). Breakpoints where rho crosses a
// kink radius of the outer factor keep the mesh aligned with the kinks.
template <class Kernel>
double angular5(double t, double r, std::span<const double> rho_breaks, const QuadratureSpec& q,
                Kernel&& kernel) {
  auto f = [&](double theta) {
    double sh = std::sin(0.5 * theta);
    double rho = std::sqrt((r - t) * (r - t) + 4.0 * r * t * sh * sh);
    double s = std::sin(theta);
    return std::array<double, 1>{s * s * s * kernel(theta, rho)};
  };
  std::vector<double> breaks = {0.0, std::numbers::pi};
  if (r * t > 1e-300) {
    for (double b : rho_breaks) {
      double cosv = (r * r + t * t - b * b) / (2.0 * r * t);
      if (cosv > -1.0 && cosv < 1.0) breaks.push_back(std::acos(cosv));
    }
  }
  std::sort(breaks.begin(), breaks.end());
  return integrate_adaptive<1>(f, breaks, q).value[0];
}

std::vector<double> outer_breaks(double r, double gmax, std::span<const double> rho_breaks) {
  std::vector<double> breaks = {0.0, gmax};
  for (double b : rho_breaks) {
    for (double t : {std::abs(r - b), r + b})
      if (t > 0.0 && t < gmax) breaks.push_back(t);
  }
  std::sort(breaks.begin(), breaks.end());
  return breaks;
}

constexpr double kOmega3 = 2.0 * std::numbers::pi * std::numbers::pi;

// (f * g)(r) for radial f and g, g supported on [0, gmax], in R^5.
double conv5_scalar(const std::function<double(double)>& f, const std::function<double(double)>& g,
                    double gmax, double r, std::span<const double> f_breaks,
                    const QuadratureSpec& q) {
  QuadratureSpec qi = q.inner();
  auto outer = [&](double t) {
    double gt = g(t);
    if (gt == 0.0) return 0.0;
    double inner = angular5(t, r, f_breaks, qi, [&f](double, double rho) { return f(rho); });
    return kOmega3 * gt * std::pow(t, 4) * inner;
  };
  return integrate_1d_adaptive(outer, outer_breaks(r, gmax, f_breaks), q).value;
}

// Radial component of (w(|.|) e_r * g)(r): the vector convolution of a radial
// vector field with a radial scalar stays radial.
double conv5_vector_radial(const std::function<double(double)>& w,
                           const std::function<double(double)>& g, double gmax, double r,
                           std::span<const double> f_breaks, const QuadratureSpec& q) {
  QuadratureSpec qi = q.inner();
  auto outer = [&](double t) {
    double gt = g(t);
    if (gt == 0.0) return 0.0;
    double inner = angular5(t, r, f_breaks, qi, [&](double theta, double rho) {
      if (rho <= 0.0) return 0.0;
      return w(rho) * (r - t * std::cos(theta)) / rho;
    });
    return kOmega3 * gt * std::pow(t, 4) * inner;
  };
  return integrate_1d_adaptive(outer, outer_breaks(r, gmax, f_breaks), q).value;
}

// Dense table with local cubic (4-point Lagrange) interpolation; zero outside
// the tabulated interval.
class RadialFieldTable {
 public:
  RadialFieldTable() = default;
  RadialFieldTable(double lo, double hi, int n, const std::function<double(double)>& f)
      : lo_(lo), hi_(hi), step_((hi - lo) / (n - 1)), f_(std::size_t(n)) {
    parallel_for(std::size_t(n), [&](std::size_t i) { f_[i] = f(lo_ + step_ * double(i)); });
  }

  double operator()(double r) const {
    if (r < lo_ || r > hi_) return 0.0;
    double a = (r - lo_) / step_;
    int n = int(f_.size());
    int i0 = std::clamp(int(std::floor(a)) - 1, 0, n - 4);
    double x = a - i0;
    // Lagrange basis on stencil offsets {0, 1, 2, 3}.
    double l0 = -(x - 1) * (x - 2) * (x - 3) / 6.0;
    double l1 = x * (x - 2) * (x - 3) / 2.0;
    double l2 = -x * (x - 1) * (x - 3) / 2.0;
    double l3 = x * (x - 1) * (x - 2) / 6.0;
    return l0 * f_[std::size_t(i0)] + l1 * f_[std::size_t(i0 + 1)] + l2 * f_[std::size_t(i0 + 2)] +
           l3 * f_[std::size_t(i0 + 3)];
  }

 private:
  double lo_ = 0.0, hi_ = 0.0, step_ = 1.0;
  std::vector<double> f_;
};

QuadratureSpec table_build_spec() {
  QuadratureSpec q;
  q.rel_tol = 1e-10;
  q.abs_tol = 1e-13;
  q.max_subdivisions = 20000;
  return q;
}

}  // namespace

BumpProfile bump_profile(const Counterexample5Spec& spec) {
  spec.validate();
  const double delta = spec.moll_radius();
  const int k = spec.bump_exponent;
  EvenPoly phi = bump_poly(delta, k, bump_amplitude(delta, k));
  EvenPoly bilap = phi.laplacian5().laplacian5();

  BumpProfile bp;
  bp.delta = delta;
  bp.k = k;
  bp.phi = [phi](double t) { return phi(std::abs(t)); };
  bp.grad_phi = [phi](double t) { return phi.derivative(t); };
  bp.bilap_phi = [bilap](double t) { return bilap(std::abs(t)); };
  return bp;
}

MollifiedFields mollified_fields(const Counterexample5Spec& spec) {
  spec.validate();
  const double delta = spec.moll_radius();
  BumpProfile bump = bump_profile(spec);
  SourceProfile src = u5_profile();
  QuadratureSpec q = spec.eval_tolerance;
  q.rel_tol = std::min(q.rel_tol, 1e-9);
  q.abs_tol = std::min(q.abs_tol, 1e-12);
  q.max_subdivisions = std::max(q.max_subdivisions, 20000);

  static const std::vector<double> kink = {1.0};  // u and grad u change analytic form at |x| = 1
  MollifiedFields mf;
  mf.U = [src, bump, delta, q](double r) {
    return conv5_scalar(src.u, bump.phi, delta, r, kink, q);
  };
  mf.grad_U = [src, bump, delta, q](double r) {
    return conv5_vector_radial(src.du, bump.phi, delta, r, kink, q);
  };
  mf.nu_density = [src, bump, delta, q](double r) {
    return conv5_scalar(src.u, bump.bilap_phi, delta, r, kink, q);
  };
  mf.eta_radial = [src, bump, delta, q](double r) {
    return conv5_vector_radial(src.du, bump.bilap_phi, delta, r, kink, q);
  };
  return mf;
}

Counterexample5::Counterexample5(const Counterexample5Spec& spec)
    : spec_(spec), fields_(mollified_fields(spec)) {
  const double delta = spec_.moll_radius();
  const double lo = 1.0 - delta, hi = 1.0 + delta;
  const int n = 1201;

  MollifiedFields exact = fields_;
  auto nu_tab = std::make_shared<RadialFieldTable>(lo, hi, n, exact.nu_density);
  auto eta_tab = std::make_shared<RadialFieldTable>(lo, hi, n, exact.eta_radial);

  RadialProfile nu_prof([nu_tab](double t) { return (*nu_tab)(t); }, lo, hi,
                        "tabulated bilaplacian of the mollified profile");
  nu_ = std::make_shared<Measure>(5, nu_prof, true);

  AnalyticDensity eta_den;
  eta_den.support_box = Box::cube(5, hi);
  eta_den.symmetry_axis = 0;
  eta_den.rho = [eta_tab](const Vec& x) {
    double r = x.norm();
    if (r <= 0.0) return 0.0;
    return (*eta_tab)(r)*x[0] / r;
  };
  eta_den.support_predicate = [lo, hi](const Vec& x) {
    double r = x.norm();
    return r >= lo && r <= hi;
  };
  eta_ = std::make_shared<Measure>(5, eta_den, true);
}

namespace {

std::vector<double> test_radii() {
  std::vector<double> radii;
  for (int j = 0; j < 20; ++j) radii.push_back(0.5 + 2.5 * j / 19.0);
  return radii;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

ExperimentReport counterexample_report(const Counterexample5Spec& spec, const QuadratureSpec& q) {
  spec.validate();
  q.validate();
  WallTimer timer;
  Counterexample5 ce(spec);
  Params p(5, 2.0);

  ExperimentReport rep("counterexample5");
  rep.params()["epsilon"] = spec.epsilon;
  rep.params()["moll_radius"] = spec.moll_radius();
  rep.params()["bump_exponent"] = spec.bump_exponent;
  rep.params()["rel_tol"] = q.rel_tol;
  rep.params()["abs_tol"] = q.abs_tol;
  rep.params()["profile_note"] = "polynomial bump (1 - (t/delta)^2)^k, not the C-infinity bell";

  // Route (i): transform of the tabulated density; route (ii): the gradient
  // field scaled by the predicted constant.
  std::vector<double> radii = test_radii();
  std::vector<double> via_transform(radii.size()), via_gradient(radii.size());
  parallel_for(radii.size(), [&](std::size_t i) {
    Vec x = Vec::zero(5);
    x[0] = radii[i];
    via_transform[i] = riesz_vector(ce.nu(), x, p, q).vector[0];
    via_gradient[i] = kSixteenPiSquared * ce.grad_U(radii[i]);
  });

  double peak = 0.0;
  for (double v : via_transform) peak = std::max(peak, std::abs(v));
  double worst = 0.0;
  std::vector<double> ratios;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    worst = std::max(worst, std::abs(via_transform[i] - via_gradient[i]));
    double g = std::abs(ce.grad_U(radii[i]));
    if (g * kSixteenPiSquared >= 1e-3 * peak) ratios.push_back(std::abs(via_transform[i]) / g);
  }
  double route_disagreement = worst / peak;
  double c_hat = median(ratios);

  Vec far = Vec::zero(5);
  far[0] = 2.0;
  RieszValue at2 = riesz_vector(ce.nu(), far, p, q);

  SupSearchSpec sspec;
  sspec.support_samples = 241;
  sspec.refine_rounds = 2;
  SupResult sup = sup_norm(ce.nu(), p, sspec, SupDomain::support, q);

  rep.set_output_heuristic("c_hat", c_hat);
  rep.set_output_heuristic("route_max_rel_disagreement", route_disagreement);
  rep.set_output("value_at_2e1", at2.magnitude(), at2.error_estimate);
  rep.set_output_heuristic("sup_support", sup.value);
  rep.set_output_heuristic("support_to_far_ratio", sup.value / at2.magnitude());
  Result1D nu_total = total_mass(ce.nu(), q);
  rep.set_output("nu_total_mass", nu_total.value, nu_total.error_estimate);
  double g2 = ce.grad_U(2.0);
  rep.set_output("grad_U_at_2", g2, 1e-9 * std::abs(g2));
  rep.set_wall_time_ms(timer.elapsed_ms());

  if (route_disagreement > 1e-2)
    throw RouteDisagreementError(
        "counterexample_report: transform and gradient routes disagree by " +
        std::to_string(route_disagreement));
  return rep;
}

ExperimentReport remark_report(const Counterexample5Spec& spec, const QuadratureSpec& q) {
  spec.validate();
  q.validate();
  WallTimer timer;
  Counterexample5 ce(spec);
  Params p(5, 2.0);
  const double delta = spec.moll_radius();

  ExperimentReport rep("remark_newtonian");
  rep.params()["epsilon"] = spec.epsilon;
  rep.params()["moll_radius"] = delta;
  rep.params()["bump_exponent"] = spec.bump_exponent;
  rep.params()["rel_tol"] = q.rel_tol;
  rep.params()["abs_tol"] = q.abs_tol;

  // Ten probe points: on-axis and tilted, outside the annulus.
  std::vector<Vec> pts;
  for (double r : {1.5, 2.0, 2.5, 3.0}) {
    Vec x = Vec::zero(5);
    x[0] = r;
    pts.push_back(x);
  }
  for (double r : {1.5, 2.0, 2.5}) {
    for (double ang : {std::numbers::pi / 6.0, std::numbers::pi / 3.0}) {
      Vec x = Vec::zero(5);
      x[0] = r * std::cos(ang);
      x[1] = r * std::sin(ang);
      pts.push_back(x);
    }
  }

  std::vector<double> newtonian(pts.size()), first_component(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    newtonian[i] = potential(ce.eta(), pts[i], 1.0, q).value;
    first_component[i] = riesz_vector(ce.nu(), pts[i], p, q).vector[0];
  });
  double peak = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    peak = std::max(peak, std::abs(newtonian[i]));
    worst = std::max(worst, std::abs(newtonian[i] - first_component[i]));
  }
  double route_disagreement = worst / peak;

  Vec far = Vec::zero(5);
  far[0] = 2.0;
  Result1D at2 = potential(ce.eta(), far, 1.0, q);

  // Support samples at several latitudes on the middle sphere of the annulus.
  double sup_sample = 0.0;
  for (double ang : {0.0, std::numbers::pi / 4.0, std::numbers::pi / 2.0}) {
    Vec x = Vec::zero(5);
    x[0] = std::cos(ang);
    x[1] = std::sin(ang);
    sup_sample = std::max(sup_sample, std::abs(potential(ce.eta(), x, 1.0, q).value));
  }

  rep.set_output("u_eta_at_2e1", std::abs(at2.value), at2.error_estimate);
  rep.set_output_heuristic("route_max_rel_disagreement", route_disagreement);
  rep.set_output_heuristic("support_sample_max", sup_sample);
  rep.set_output_heuristic("support_to_far_ratio", sup_sample / std::abs(at2.value));
  rep.set_output("eta_total_mass", total_mass(ce.eta(), q).value, q.abs_tol);
  rep.set_wall_time_ms(timer.elapsed_ms());

  if (route_disagreement > 1e-2)
    throw RouteDisagreementError("remark_report: Newtonian potential and first-component routes disagree by " +
                                 std::to_string(route_disagreement));
  return rep;
}

}  // namespace rieszlab
