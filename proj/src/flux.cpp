#include "rieszlab/flux.hpp"

#include <cmath>

#include "rieszlab/parallel.hpp"

namespace rieszlab {

namespace {

void require_divergence_regime(const Params& p, const char* who) {
  if (!p.divergence_regime())
    throw RegimeError(std::string(who) + ": requires s < d-1 (got s = " + std::to_string(p.s) +
                      ", d = " + std::to_string(p.d) + ")");
}

double outer_support_radius(const Measure& mu, const Vec& center) {
  if (const auto* r = mu.radial()) return center.norm() + r->t1;
  return mu.support_box().max_corner_dist(center);
}

}  // namespace

Result1D surface_flux(const Measure& mu, const Ball& ball, const Params& p, const QuadratureSpec& q) {
  q.validate();
  const SphereRule& rule = cached_sphere_rule(p.d, q.order_for(p.d));
  const double R = ball.radius;

  std::vector<double> dots(rule.nodes.size()), errs(rule.nodes.size());
  parallel_for(rule.nodes.size(), [&](std::size_t i) {
    Vec y = ball.center + R * rule.nodes[i];
    RieszValue rv = riesz_vector(mu, y, p, q);
    dots[i] = rv.vector.dot(rule.nodes[i]);
    errs[i] = rv.error_estimate;
  });
  double sum = 0.0, err = 0.0;
  for (std::size_t i = 0; i < dots.size(); ++i) {
    sum += rule.weights[i] * dots[i];
    err += rule.weights[i] * errs[i];
  }
  double scale = std::pow(R, p.d - 1);
  return {scale * sum, scale * err};
}

Result1D divergence_flux(const Measure& mu, const Ball& ball, const Params& p,
                         const QuadratureSpec& q) {
  q.validate();
  require_divergence_regime(p, "divergence_flux");
  const double R = ball.radius;
  const double factor = p.s + 1.0 - double(p.d);  // divergence of the kernel in x
  QuadratureSpec qi = q.inner(0.05);

  std::vector<double> breaks = {0.0, R};
  for (double b : mu.radial_breakpoints(ball.center))
    if (b > 0.0 && b < R) breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());

  const bool radial_centered = mu.radial() && ball.center.norm() <= 1e-14;
  if (radial_centered) {
    // The inner potential is radial too: one nested 1D integral.
    auto f = [&](double t) {
      Vec y = Vec::zero(p.d);
      y[0] = t;
      return std::pow(t, p.d - 1) * potential(mu, y, p.s + 1.0, qi).value;
    };
    Result1D v = integrate_1d_adaptive(f, breaks, q);
    double a = unit_sphere_area(p.d);
    return {factor * a * v.value, std::abs(factor) * a * v.error_estimate};
  }

  const SphereRule& rule = cached_sphere_rule(p.d, q.order_for(p.d));
  auto shell = [&](double t) {
    std::vector<double> vals(rule.nodes.size());
    parallel_for(rule.nodes.size(), [&](std::size_t i) {
      Vec y = ball.center + t * rule.nodes[i];
      vals[i] = potential(mu, y, p.s + 1.0, qi).value;
    });
    double sum = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i) sum += rule.weights[i] * vals[i];
    return std::pow(t, p.d - 1) * sum;
  };
  Result1D v = integrate_1d_adaptive(shell, breaks, q);
  return {factor * v.value, std::abs(factor) * v.error_estimate};
}

namespace {

// d mu(B(x0, t)) / dt: analytic for radial measures seen from the origin,
// coarea sphere quadrature otherwise.
std::function<double(double)> shell_mass_rate(const Measure& mu, const Vec& center,
                                              const QuadratureSpec& q) {
  if (const auto* prof = mu.radial(); prof && center.norm() <= 1e-14) {
    RadialProfile p = *prof;
    int d = mu.dim();
    double area = unit_sphere_area(d);
    return [p, d, area](double t) { return area * p(t) * std::pow(t, d - 1); };
  }
  const SphereRule& rule = cached_sphere_rule(mu.dim(), q.order_for(mu.dim()));
  Measure m = mu;
  Vec c = center;
  int d = mu.dim();
  return [m, c, d, &rule](double t) {
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      Vec y = c + t * rule.nodes[i];
      sum += rule.weights[i] * m.density_at(y);
    }
    return std::pow(t, d - 1) * sum;
  };
}

}  // namespace

Result1D lemma22_rhs(const Measure& mu, const Ball& ball, const Params& p, const QuadratureSpec& q) {
  q.validate();
  require_divergence_regime(p, "lemma22_rhs");
  const double R = ball.radius;

  Result1D mass = mass_in_ball(mu, ball, q);
  double term1 = std::pow(R, double(p.d) - p.s - 1.0) * mass.value;
  double err = std::pow(R, double(p.d) - p.s - 1.0) * mass.error_estimate;

  const double T = outer_support_radius(mu, ball.center);
  if (T <= R) return {term1, err};

  auto rate = shell_mass_rate(mu, ball.center, q);
  auto f = [&rate, &p](double t) { return rate(t) * std::pow(t, -(p.s + 1.0)); };
  std::vector<double> breaks = {R, T};
  for (double b : mu.radial_breakpoints(ball.center))
    if (b > R && b < T) breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  Result1D tail = integrate_1d_adaptive(f, breaks, q);

  double rd = std::pow(R, p.d);
  return {term1 + rd * tail.value, err + rd * tail.error_estimate};
}

Result1D lemma22_rhs_by_parts(const Measure& mu, const Ball& ball, const Params& p,
                              const QuadratureSpec& q) {
  q.validate();
  require_divergence_regime(p, "lemma22_rhs_by_parts");
  const double R = ball.radius;
  const double T = std::max(outer_support_radius(mu, ball.center), R);

  auto m_at = [&](double t) { return mass_in_ball(mu, Ball(ball.center, t), q).value; };
  const double mR = m_at(R);
  const double mT = m_at(T * (1.0 + 1e-12));

  double term1 = std::pow(R, double(p.d) - p.s - 1.0) * mR;
  double tail = -mR * std::pow(R, -(p.s + 1.0)) + mT * std::pow(T, -(p.s + 1.0));
  if (T > R) {
    auto f = [&](double t) { return m_at(t) * std::pow(t, -(p.s + 2.0)); };
    std::vector<double> breaks = {R, T};
    for (double b : mu.radial_breakpoints(ball.center))
      if (b > R && b < T) breaks.push_back(b);
    std::sort(breaks.begin(), breaks.end());
    Result1D integral = integrate_1d_adaptive(f, breaks, q);
    tail += (p.s + 1.0) * integral.value;
  }
  return {term1 + std::pow(R, p.d) * tail, 0.0};
}

FluxReport flux_report(const Measure& mu, const Ball& ball, const Params& p,
                       const QuadratureSpec& q) {
  FluxReport rep;
  rep.tolerances_used = q;
  rep.surface_value = surface_flux(mu, ball, p, q).value;
  rep.divergence_value = divergence_flux(mu, ball, p, q).value;
  rep.rhs_value = lemma22_rhs(mu, ball, p, q).value;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  rep.ratio_surface_divergence =
      std::abs(rep.divergence_value) > q.abs_tol ? rep.surface_value / rep.divergence_value : nan;
  rep.ratio_abs_surface_rhs =
      std::abs(rep.rhs_value) > q.abs_tol ? std::abs(rep.surface_value) / rep.rhs_value : nan;
  return rep;
}

double component_majorant(const Measure& mu, const Vec& x, double delta, const Params& p,
                          const QuadratureSpec& q) {
  if (!(delta > 0.0)) throw SpecError("component_majorant: delta must be positive");
  auto m_at = [&](double r) { return mass_in_ball(mu, Ball(x, r), q).value; };
  const double T = std::max(outer_support_radius(mu, x), delta * (1.0 + 1e-9));
  const double total = m_at(T * (1.0 + 1e-12));

  double term1 = m_at(delta) * std::pow(delta, -p.s);
  Result1D near = integrate_1d_adaptive(
      [&](double r) { return m_at(r) * std::pow(r, -(p.s + 1.0)); }, 0.0, delta, q);
  Result1D far = integrate_1d_adaptive(
      [&](double r) { return m_at(r) * std::pow(r, -(p.s + 2.0)); }, delta, T, q);
  return term1 + p.s * near.value + delta * (p.s + 1.0) * far.value +
         delta * total * std::pow(T, -(p.s + 1.0));
}

}  // namespace rieszlab
