#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rieszlab/geometry.hpp"
#include "rieszlab/quadrature.hpp"

namespace rieszlab {

/// Dimension d >= 2 and exponent 0 < s < d, with the parameter regimes that
/// change which identities apply.
struct Params {
  int d = 0;
  double s = 0.0;

  Params(int dim, double exponent) : d(dim), s(exponent) {
    if (d < 2 || d > kMaxDim) throw SpecError("Params: dimension must be in [2, 6]");
    if (!(s > 0.0) || !(s < double(d))) throw SpecError("Params: need 0 < s < d strictly");
  }

  bool divergence_regime() const { return s < double(d - 1); }
  bool s_below_one() const { return s < 1.0; }
  bool s_at_codim_one() const { return s == double(d - 1); }
  bool s_above_codim_one() const { return s > double(d - 1); }
};

/// Radial density h(|x|) supported on [t0, t1]; evaluations outside the
/// interval are clamped to zero regardless of the callback.
struct RadialProfile {
  std::function<double(double)> h;
  double t0 = 0.0;
  double t1 = 0.0;
  std::string smoothness_note;

  RadialProfile() = default;
  RadialProfile(std::function<double(double)> fn, double lo, double hi, std::string note = {})
      : h(std::move(fn)), t0(lo), t1(hi), smoothness_note(std::move(note)) {
    if (!(0.0 <= t0 && t0 < t1) || !std::isfinite(t1))
      throw SpecError("RadialProfile: need 0 <= t0 < t1 < inf");
  }

  double operator()(double t) const { return (t < t0 || t > t1) ? 0.0 : h(t); }
};

/// Largest jump |h(t+eta) - h(t)| seen on a dyadically refined grid over the
/// support (plus a margin). A continuous profile drives this to ~0.
double sampled_continuity_defect(const RadialProfile& p, int levels = 12);

/// General continuous density given by a callback, with its support described
/// by a predicate and a bounding box.
struct AnalyticDensity {
  std::function<double(const Vec&)> rho;
  Box support_box;
  std::function<bool(const Vec&)> support_predicate;
  /// If >= 0, the density depends only on (x[axis], |x_perp|); searches may
  /// exploit this. Purely an optimization hint.
  int symmetry_axis = -1;

  double operator()(const Vec& x) const { return support_predicate(x) ? rho(x) : 0.0; }
};

/// Density sampled on a regular grid, extended by multilinear interpolation
/// (continuous, zero one cell beyond the outermost nonzero node).
class LatticeDensity {
 public:
  LatticeDensity(Vec origin, double spacing, std::vector<int> shape, std::vector<double> values);

  static LatticeDensity load(const std::string& path);  // .csv or .json
  static LatticeDensity load_csv(std::istream& in);
  static LatticeDensity load_json(std::istream& in);
  void save_csv(std::ostream& out) const;

  int dim() const { return origin_.dim(); }
  double spacing() const { return spacing_; }
  const Vec& origin() const { return origin_; }
  const std::vector<int>& shape() const { return shape_; }
  const std::vector<double>& values() const { return values_; }
  const Box& support_box() const { return support_box_; }

  double operator()(const Vec& x) const;

 private:
  double node(const std::vector<int>& idx) const;

  Vec origin_;
  double spacing_ = 0.0;
  std::vector<int> shape_;
  std::vector<double> values_;
  std::vector<std::size_t> strides_;
  Box support_box_;  // nonzero nodes dilated by one spacing
};

/// Compactly supported measure with continuous (possibly signed) density.
class Measure {
 public:
  using Density = std::variant<RadialProfile, AnalyticDensity, LatticeDensity>;

  Measure(int d, RadialProfile p, bool sign_allowed = false);
  Measure(int d, AnalyticDensity a, bool sign_allowed = false);
  Measure(int d, LatticeDensity l, bool sign_allowed = false);

  int dim() const { return d_; }
  bool sign_allowed() const { return sign_allowed_; }
  const Density& density() const { return density_; }

  const RadialProfile* radial() const { return std::get_if<RadialProfile>(&density_); }
  const AnalyticDensity* analytic() const { return std::get_if<AnalyticDensity>(&density_); }
  const LatticeDensity* lattice() const { return std::get_if<LatticeDensity>(&density_); }

  double density_at(const Vec& x) const;
  bool in_support(const Vec& x) const;
  const Box& support_box() const { return support_box_; }

  /// Distances from x at which the density may stop being smooth (support
  /// edges); used as quadrature breakpoints in radial integrations around x.
  std::vector<double> radial_breakpoints(const Vec& x) const;

 private:
  int d_ = 0;
  Density density_;
  bool sign_allowed_ = false;
  Box support_box_;
};

/// Spot check of the nonnegativity invariant on quadrature nodes; throws
/// NegativityError if a clearly negative value shows up on a sign_allowed ==
/// false measure.
void check_sign_invariant(const Measure& mu, int samples_per_axis = 9);

/// mu(B) for a bounded ball, within the requested tolerance. Radial measures
/// use exact 1D reductions (center at origin: omega_{d-1} int h t^{d-1};
/// off-center: spherical-cap angular weight).
Result1D mass_in_ball(const Measure& mu, const Ball& ball, const QuadratureSpec& q);

/// Cumulative radial mass of a radial measure: m(t) = mu(B(0, t)) and its
/// analytic derivative m'(t) = omega_{d-1} h(t) t^{d-1}.
struct MassProfile {
  std::function<double(double)> m;
  std::function<double(double)> dm;
  double total = 0.0;
  double t0 = 0.0, t1 = 0.0;
};
MassProfile radial_mass_profile(const RadialProfile& profile, int d, const QuadratureSpec& q);

Result1D total_mass(const Measure& mu, const QuadratureSpec& q);

/// Pushforward nu(A) = r^{-s} mu(x0 + r A); carries density
/// rho_nu(z) = r^{d-s} rho(x0 + r z). Radial inputs with x0 = 0 stay radial.
Measure rescale(const Measure& mu, const Params& p, const Vec& x0, double r);

}  // namespace rieszlab
