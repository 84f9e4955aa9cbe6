#pragma once

#include <functional>
#include <memory>

#include "rieszlab/measure.hpp"
#include "rieszlab/report.hpp"
#include "rieszlab/riesz.hpp"

namespace rieszlab {

/// Unit-mass density concentrated on the delta-neighborhood of the unit
/// (d-1)-disk in the hyperplane {x_1 = 0}.
struct SlabMeasureSpec {
  int d = 3;
  double s = 0.5;
  double delta = 0.1;

  void validate() const {
    if (d < 2 || d > kMaxDim) throw SpecError("SlabMeasureSpec: d must be in [2, 6]");
    if (!(s > 0.0) || !(s < double(d - 1)))
      throw SpecError("SlabMeasureSpec: need 0 < s < d-1");
    if (!(delta > 0.0) || !(delta < 0.5)) throw SpecError("SlabMeasureSpec: delta must be in (0, 1/2)");
  }
};

/// Flat-top taper used by the slab density: identically 1 on |t| <= 0.7 and a
/// quartic falloff on the last 30% of the way to |t| = 1. The flat core keeps
/// the peak below the 2/vol(E_delta) budget, which a pure quartic bump cannot
/// meet (its mean-to-peak ratio is 256/315 * 1/2 < 1/2).
double slab_taper(double t);

/// Volume of the delta-neighborhood of the unit (d-1)-disk in R^d.
double slab_neighborhood_volume(int d, double delta, const QuadratureSpec& q);

/// Builds the slab measure: rho(x) = A * taper(x1/delta) * taper(max(0, (|x'|-1)/delta)),
/// A normalizing total mass to 1. Certifies mass = 1 and sup rho < 2/vol(E_delta).
Measure prop21_measure(const SlabMeasureSpec& spec, const QuadratureSpec& q);

/// Signed radial construction in R^5.
struct Counterexample5Spec {
  /// Target annulus half-thickness: the measure is supported in
  /// {1 - epsilon <= |x| <= 1 + epsilon}.
  double epsilon = 0.05;
  /// Mollification radius; 0 picks epsilon / 8, small enough that the sup of
  /// the field over the support decays well below the far-field value.
  double delta = 0.0;
  int bump_exponent = 8;  // k >= 8: four continuous derivatives at the bump edge
  QuadratureSpec eval_tolerance;

  double moll_radius() const { return delta > 0.0 ? delta : epsilon / 8.0; }

  void validate() const {
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
      throw SpecError("Counterexample5Spec: epsilon must be in (0, 1)");
    double dm = moll_radius();
    if (!(dm > 0.0) || !(dm < epsilon))
      throw SpecError("Counterexample5Spec: mollification radius must be in (0, epsilon)");
    if (bump_exponent < 8) throw SpecError("Counterexample5Spec: bump exponent must be >= 8");
  }
};

/// The piecewise profile driving the construction: constant 2/3 inside the
/// unit ball, 1/r - 1/(3 r^3) outside; C^1 across r = 1 with vanishing
/// gradient there, and biharmonic off the unit sphere.
struct SourceProfile {
  std::function<double(double)> u;
  std::function<double(double)> du;
  std::function<double(double)> laplacian_u;
};
SourceProfile u5_profile();

/// Polynomial mollifier phi(x) = A (1 - (|x|/delta)^2)_+^k with unit mass in
/// R^5; gradient and bilaplacian by exact polynomial differentiation.
struct BumpProfile {
  double delta = 0.0;
  int k = 0;
  std::function<double(double)> phi;
  std::function<double(double)> grad_phi;   // signed radial derivative
  std::function<double(double)> bilap_phi;  // radial profile of the bilaplacian
};
BumpProfile bump_profile(const Counterexample5Spec& spec);

/// Exact mollified fields, each call a 2D radial-convolution quadrature:
///   U(r)       = (u * phi)(r)
///   grad_U(r)  = signed radial component of (grad u * phi)
///   nu_density = (u * bilap phi): the density of the signed measure
///   eta_radial = W(r) with eta(x) = W(|x|) x_1 / |x|  (the Remark's measure)
struct MollifiedFields {
  std::function<double(double)> U;
  std::function<double(double)> grad_U;
  std::function<double(double)> nu_density;
  std::function<double(double)> eta_radial;
};
MollifiedFields mollified_fields(const Counterexample5Spec& spec);

/// Measure-grade construction: the exact convolutions are tabulated once on a
/// dense grid (cubic interpolation, ~1e-9 relative) so transform evaluations
/// can afford millions of density calls.
class Counterexample5 {
 public:
  explicit Counterexample5(const Counterexample5Spec& spec);

  const Counterexample5Spec& spec() const { return spec_; }
  const Measure& nu() const { return *nu_; }    // radial signed, d = 5
  const Measure& eta() const { return *eta_; }  // odd in x_1, d = 5

  double U(double r) const { return fields_.U(r); }
  double grad_U(double r) const { return fields_.grad_U(r); }
  double nu_density(double r) const { return fields_.nu_density(r); }

 private:
  Counterexample5Spec spec_;
  MollifiedFields fields_;
  std::shared_ptr<Measure> nu_, eta_;
};

/// Dual-route experiment: the transform of nu measured by quadrature against
/// the gradient-field route, the fitted proportionality constant (16 pi^2 is
/// the analytic prediction), the sup over the support annulus, and the value
/// at |x| = 2.
ExperimentReport counterexample_report(const Counterexample5Spec& spec, const QuadratureSpec& q);

/// The Remark's experiment: the Newtonian potential of eta versus the first
/// component of the transform of nu, pointwise.
ExperimentReport remark_report(const Counterexample5Spec& spec, const QuadratureSpec& q);

inline constexpr double kSixteenPiSquared = 157.91367041742973;
inline constexpr double kThreePiSquared = 29.608813203268074;

}  // namespace rieszlab
