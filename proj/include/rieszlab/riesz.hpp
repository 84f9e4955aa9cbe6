#pragma once

#include "rieszlab/measure.hpp"
#include "rieszlab/quadrature.hpp"

namespace rieszlab {

enum class RieszMethod { automatic, polar_split, radial_reduction, truncated };

const char* to_string(RieszMethod m);

struct RieszValue {
  Vec vector;
  double error_estimate = 0.0;
  RieszMethod method = RieszMethod::polar_split;

  double magnitude() const { return vector.norm(); }
};

/// Shared, immutable sphere rules; keyed by (d, order).
const SphereRule& cached_sphere_rule(int d, int order);

/// The transform vector int (y-x)/|y-x|^{s+1} dmu(y). The kernel magnitude is
/// |y-x|^{-s}, so the integral converges absolutely for bounded densities.
/// `automatic` picks the radial reduction for radial measures and the polar
/// split otherwise; pass an explicit method to cross-check the two routes.
RieszValue riesz_vector(const Measure& mu, const Vec& x, const Params& p, const QuadratureSpec& q,
                        RieszMethod method = RieszMethod::automatic);

/// Same integral restricted to |y-x| > eps.
RieszValue riesz_truncated(const Measure& mu, const Vec& x, double eps, const Params& p,
                           const QuadratureSpec& q);

/// Signed radial component of the transform of a radial measure at |x| = r,
/// via the 2D reduction over (shell radius, polar angle). The vector equals
/// this component times x/|x|.
Result1D riesz_radial_component(const RadialProfile& profile, double r, const Params& p,
                                const QuadratureSpec& q);

/// int |y-x|^{-power} dmu(y), power < d. Callers compose the s-potential
/// ((s-1)^{-1} at power s-1), the (s+1)-potential, or the Newtonian kernel.
Result1D potential(const Measure& mu, const Vec& x, double power, const QuadratureSpec& q);

/// -int log|y-x| dmu(y): the potential whose gradient is the s = 1 transform.
Result1D log_potential(const Measure& mu, const Vec& x, const QuadratureSpec& q);

/// The scalar potential whose gradient is the transform: for s != 1,
/// (s-1)^{-1} int |y-x|^{1-s} dmu; for s = 1 the logarithmic potential.
double riesz_potential_U(const Measure& mu, const Vec& x, const Params& p, const QuadratureSpec& q);

/// Central finite differences of riesz_potential_U with one Richardson
/// extrapolation step (h tuned as tol^{1/3} times the local length scale).
/// Used to probe the gradient identity against riesz_vector.
Vec gradient_via_potential(const Measure& mu, const Vec& x, const Params& p, const QuadratureSpec& q,
                           double* step_used = nullptr);

}  // namespace rieszlab
