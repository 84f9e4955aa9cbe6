#pragma once

#include <optional>
#include <vector>

#include "rieszlab/measure.hpp"
#include "rieszlab/riesz.hpp"

namespace rieszlab {

/// Grid-search configuration for sup-norm estimates. Searches are heuristic
/// lower bounds on suprema over continua; they are monotone in grid density
/// and report their argmax so failures are inspectable.
struct SupSearchSpec {
  double grid_spacing = 0.0;  // <= 0: derived from the box and the budget
  std::optional<Box> bounding_box;  // global box; default: support box dilated 3x
  int refine_rounds = 3;
  double refine_factor = 3.0;
  int support_samples = 600;  // evaluation budget for one grid pass

  void validate() const {
    if (refine_rounds < 0) throw SpecError("SupSearchSpec: refine_rounds must be >= 0");
    if (!(refine_factor > 1.0)) throw SpecError("SupSearchSpec: refine_factor must be > 1");
    if (support_samples < 8) throw SpecError("SupSearchSpec: support_samples too small");
  }
};

enum class SupDomain { support, global };

struct SupResult {
  double value = 0.0;
  Vec argmax;
};

/// Grid scan plus local refinement of |R mu| (or one |component|, if
/// component >= 0). Radial and axis-symmetric measures are scanned in their
/// reduced coordinates. `scanned` (optional) collects every evaluated point.
SupResult sup_norm(const Measure& mu, const Params& p, const SupSearchSpec& spec, SupDomain domain,
                   const QuadratureSpec& q, int component = -1,
                   std::vector<std::pair<Vec, double>>* scanned = nullptr);

/// sup over centers and radii of mu(B(x, r)) / r^s (heuristic lower bound).
/// Rejects signed measures.
double theta_sup(const Measure& mu, const Params& p, const SupSearchSpec& spec,
                 const QuadratureSpec& q);

/// theta at one (center, radius) pair, for the scaling identity.
double theta_at(const Measure& mu, const Params& p, const Vec& x, double r, const QuadratureSpec& q);

enum class WitnessBranch { inner, outer };

struct WitnessResult {
  WitnessBranch branch = WitnessBranch::inner;
  double r_star = 0.0;
  Vec witness;
  bool bound_holds = false;
  double realized_ratio = 0.0;
  double mass_mismatch = 0.0;
};

/// The dichotomy behind the radial maximum principle: compares the near-mass
/// term m(r)/r^s against the tail term r int_r^inf m'(t)/t^{s+1} dt, then
/// finds a support radius r_star with m(r_star) = m(r) by monotone bisection
/// (inner branch: below r; outer branch: above r) and checks
/// |R mu(w)| <= c_test |R mu(r_star e1)|.
WitnessResult radial_witness(const RadialProfile& profile, const Params& p, const Vec& w,
                             const QuadratureSpec& q, double c_test = 50.0);

struct MPReport {
  double sup_support = 0.0;
  double sup_global = 0.0;
  double ratio = 0.0;
  Vec argmax_support;
  Vec argmax_global;
  double theta = 0.0;  // NaN for signed measures
};

/// Support scan, then a global scan seeded with the support argmax (so
/// sup_global >= sup_support holds by construction), plus theta.
MPReport max_principle_report(const Measure& mu, const Params& p, const SupSearchSpec& spec,
                              const QuadratureSpec& q, int component = -1,
                              std::vector<std::pair<Vec, double>>* scanned = nullptr);

}  // namespace rieszlab
