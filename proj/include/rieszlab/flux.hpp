#pragma once

#include "rieszlab/measure.hpp"
#include "rieszlab/riesz.hpp"

namespace rieszlab {

/// Three-route evaluation of the sphere flux of the transform field.
struct FluxReport {
  double surface_value = 0.0;
  double divergence_value = 0.0;
  double rhs_value = 0.0;
  /// surface/divergence (both routes compute the same signed flux) and
  /// |surface|/rhs (the comparability expression is stated for magnitudes;
  /// the flux of a nonnegative measure is <= 0 in the s < d-1 regime).
  double ratio_surface_divergence = 0.0;
  double ratio_abs_surface_rhs = 0.0;
  QuadratureSpec tolerances_used;
};

/// int_{dB} (R mu . n) dsigma via sphere quadrature of the transform field.
Result1D surface_flux(const Measure& mu, const Ball& ball, const Params& p, const QuadratureSpec& q);

/// Exact divergence form of the same flux, valid for s < d-1:
/// (s+1-d) int_B [ int |y-x|^{-(s+1)} dmu(y) ] dm_d(x).
Result1D divergence_flux(const Measure& mu, const Ball& ball, const Params& p, const QuadratureSpec& q);

/// The two-sided comparability expression
/// r^{d-s-1} mu(B) + r^d int_r^T m'(t) / t^{s+1} dt,  m(t) = mu(B(x0, t)),
/// with T the outer support radius seen from the ball center.
Result1D lemma22_rhs(const Measure& mu, const Ball& ball, const Params& p, const QuadratureSpec& q);

/// Integration-by-parts form of the tail used as a self-check:
/// r^{d-s-1} m(r) + r^d [ -m(r) r^{-(s+1)} + (s+1) int_r^T m t^{-(s+2)} dt + m(T) T^{-(s+1)} ].
Result1D lemma22_rhs_by_parts(const Measure& mu, const Ball& ball, const Params& p,
                              const QuadratureSpec& q);

FluxReport flux_report(const Measure& mu, const Ball& ball, const Params& p, const QuadratureSpec& q);

/// Pointwise majorant for one kernel component at x, split at `delta`:
/// m(delta)/delta^s + s int_0^delta m(r) r^{-(s+1)} dr
///                  + delta (s+1) int_delta^inf m(r) r^{-(s+2)} dr,
/// with m(r) = mu(B(x, r)). Every component of the transform is bounded by it.
double component_majorant(const Measure& mu, const Vec& x, double delta, const Params& p,
                          const QuadratureSpec& q);

}  // namespace rieszlab
