#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "rieszlab/constructions.hpp"
#include "rieszlab/measure.hpp"

namespace rieszlab {

/// Quartic bump (1 - u^2)_+^4: C^3, used for all smooth builtin profiles.
double quartic_bump(double u);

/// h = 1 on [0, 1] (discontinuous at the edge; fine for mass and potential
/// checks, not a member of the smooth transform corpus).
Measure builtin_uniform_ball(int d);

/// Smooth radial bump on [0, 1].
Measure builtin_ball_bump(int d);

/// Smooth annulus profile supported on [1, 2].
Measure builtin_annulus(int d);

/// Random nonnegative radial profile: a full-span quartic bump plus up to two
/// sub-bumps, strictly positive on (t0, t1). Deterministic in the seed.
RadialProfile random_radial_profile(std::uint64_t seed, double t0, double t1);
Measure random_radial_measure(int d, std::uint64_t seed, double t0, double t1);

struct BuiltinRequest {
  std::string name;  // "uniform_ball", "ball_bump", "annulus", "prop21", "counterexample5"
  int d = 3;
  double s = 0.5;
  std::optional<double> delta;  // prop21 thickness / counterexample5 sweep knob
  QuadratureSpec q;
};

/// Resolves a "builtin:<name>" measure; throws SpecError for unknown names or
/// missing parameters.
Measure make_builtin(const BuiltinRequest& req);

}  // namespace rieszlab
