#include "rieszlab/builtins.hpp"

#include <cmath>
#include <random>

namespace rieszlab {

double quartic_bump(double u) {
  double w = 1.0 - u * u;
  if (w <= 0.0) return 0.0;
  return w * w * w * w;
}

namespace {

double interval_bump(double t, double a, double b) {
  return quartic_bump((2.0 * t - a - b) / (b - a));
}

}  // namespace

Measure builtin_uniform_ball(int d) {
  return Measure(d, RadialProfile([](double) { return 1.0; }, 0.0, 1.0, "discontinuous at t = 1"));
}

Measure builtin_ball_bump(int d) {
  return Measure(d, RadialProfile([](double t) { return quartic_bump(t); }, 0.0, 1.0, "C^3"));
}

Measure builtin_annulus(int d) {
  return Measure(d, RadialProfile([](double t) { return interval_bump(t, 1.0, 2.0); }, 1.0, 2.0, "C^3"));
}

RadialProfile random_radial_profile(std::uint64_t seed, double t0, double t1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(0.3, 2.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  struct Piece {
    double a, b, amp;
  };
  std::vector<Piece> pieces;
  pieces.push_back({t0, t1, amp(rng)});  // keeps the profile positive on (t0, t1)
  int extra = 1 + int(unit(rng) * 2.0);
  for (int j = 0; j < extra; ++j) {
    double lo = t0 + (t1 - t0) * 0.8 * unit(rng);
    double hi = lo + (t1 - lo) * std::max(0.15, unit(rng));
    pieces.push_back({lo, std::min(hi, t1), amp(rng)});
  }
  auto h = [pieces](double t) {
    double v = 0.0;
    for (const auto& p : pieces) v += p.amp * interval_bump(t, p.a, p.b);
    return v;
  };
  return RadialProfile(h, t0, t1, "random quartic-bump mixture");
}

Measure random_radial_measure(int d, std::uint64_t seed, double t0, double t1) {
  return Measure(d, random_radial_profile(seed, t0, t1));
}

Measure make_builtin(const BuiltinRequest& req) {
  if (req.name == "uniform_ball") return builtin_uniform_ball(req.d);
  if (req.name == "ball_bump") return builtin_ball_bump(req.d);
  if (req.name == "annulus") return builtin_annulus(req.d);
  if (req.name == "prop21") {
    if (!req.delta) throw SpecError("builtin:prop21 requires --delta");
    SlabMeasureSpec spec;
    spec.d = req.d;
    spec.s = req.s;
    spec.delta = *req.delta;
    return prop21_measure(spec, req.q);
  }
  if (req.name == "counterexample5") {
    if (req.d != 5) throw SpecError("builtin:counterexample5 lives in d = 5");
    Counterexample5Spec spec;
    if (req.delta) spec.epsilon = *req.delta;
    Counterexample5 ce(spec);
    return ce.nu();
  }
  throw SpecError("unknown builtin measure: " + req.name);
}

}  // namespace rieszlab
