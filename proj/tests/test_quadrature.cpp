#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "rieszlab/quadrature.hpp"
#include "test_support.hpp"

using namespace rieszlab;
using testsupport::rel_close;
using testsupport::rel_err;

namespace {
const double kPi = std::numbers::pi;
}

TEST_CASE("integrate_1d_adaptive on analytic oracles") {
  QuadratureSpec q;

  SUBCASE("polynomial") {
    auto r = integrate_1d_adaptive([](double t) { return t * t; }, 0.0, 1.0, q);
    CHECK(rel_close(r.value, 1.0 / 3.0, 1e-13));
    CHECK(r.error_estimate < 1e-10);
  }
  SUBCASE("sine") {
    auto r = integrate_1d_adaptive([](double t) { return std::sin(t); }, 0.0, kPi, q);
    CHECK(rel_close(r.value, 2.0, 1e-12));
  }
  SUBCASE("inverse square root via substitution t = u^2") {
    // int_0^1 t^{-1/2} dt = int_0^1 2 du = 2 after the caller's substitution.
    auto r = integrate_1d_adaptive([](double u) { return (u > 0.0 ? 1.0 / u : 0.0) * 2.0 * u; },
                                   0.0, 1.0, q);
    CHECK(rel_close(r.value, 2.0, 1e-12));
  }
  SUBCASE("kink handled through an interior breakpoint") {
    std::vector<double> breaks = {0.0, 0.3, 1.0};
    auto r = integrate_1d_adaptive([](double t) { return std::abs(t - 0.3); }, breaks, q);
    CHECK(rel_close(r.value, 0.5 * 0.09 + 0.5 * 0.49, 1e-12));
  }
  SUBCASE("subdivision budget exhaustion raises with the best value attached") {
    QuadratureSpec tiny = q;
    tiny.max_subdivisions = 1;
    tiny.rel_tol = 1e-15;
    tiny.abs_tol = 1e-300;
    bool threw = false;
    try {
      integrate_1d_adaptive([](double t) { return std::sqrt(std::abs(t - 0.37)); }, 0.0, 1.0, tiny);
    } catch (const ToleranceError& e) {
      threw = true;
      CHECK(e.best_value.size() == 1);
      CHECK(rel_close(e.best_value[0], 0.245418, 1e-2));
      CHECK(e.achieved_estimate > 0.0);
    }
    CHECK(threw);
  }
}

TEST_CASE("determinism: identical inputs give bit-identical outputs") {
  QuadratureSpec q;
  auto f = [](double t) { return std::exp(-t) * std::cos(7.0 * t) / std::sqrt(t + 1e-3); };
  auto a = integrate_1d_adaptive(f, 0.0, 3.0, q);
  auto b = integrate_1d_adaptive(f, 0.0, 3.0, q);
  CHECK(a.value == b.value);
  CHECK(a.error_estimate == b.error_estimate);
}

TEST_CASE("refinement consistency: halving rel_tol never worsens the oracle error") {
  struct Case {
    std::function<double(double)> f;
    double a, b, exact;
  };
  std::vector<Case> corpus = {
      {[](double t) { return std::sin(t); }, 0.0, kPi, 2.0},
      {[](double t) { return std::pow(t, -0.3); }, 1e-6, 1.0, (1.0 - std::pow(1e-6, 0.7)) / 0.7},
      {[](double t) { return std::exp(t); }, 0.0, 1.0, std::numbers::e - 1.0},
  };
  for (const auto& c : corpus) {
    double prev = std::numeric_limits<double>::infinity();
    for (double rel : {1e-4, 5e-5, 2.5e-5, 1.25e-5}) {
      QuadratureSpec q;
      q.rel_tol = rel;
      q.abs_tol = 1e-16;
      double err = std::abs(integrate_1d_adaptive(c.f, c.a, c.b, q).value - c.exact);
      CHECK(err <= prev + 1e-14);
      prev = err;
    }
  }
}

TEST_CASE("gauss_gegenbauer rules") {
  SUBCASE("weight sums match the beta-function moments") {
    for (int m = 0; m <= 4; ++m) {
      std::vector<double> u, w;
      gauss_gegenbauer(9, m, u, w);
      double sum = 0.0;
      for (double v : w) sum += v;
      double mu0 = std::sqrt(kPi) * std::tgamma(0.5 * (m + 1)) / std::tgamma(0.5 * m + 1.0);
      CHECK(rel_close(sum, mu0, 1e-13));
    }
  }
  SUBCASE("second moment is exact") {
    for (int m = 1; m <= 4; ++m) {
      std::vector<double> u, w;
      gauss_gegenbauer(6, m, u, w);
      double got = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) got += w[i] * u[i] * u[i];
      double want = std::sqrt(kPi) * 0.5 * std::tgamma(0.5 * (m + 1)) / std::tgamma(0.5 * m + 2.0);
      CHECK(rel_close(got, want, 1e-12));
    }
  }
}

TEST_CASE("sphere_rule weight sums equal the sphere areas") {
  // omega_2 = 4 pi, omega_4 = 8 pi^2 / 3, and friends.
  CHECK(rel_close(sphere_rule(2, 8).weight_sum(), 2.0 * kPi, 1e-10));
  CHECK(rel_close(sphere_rule(3, 8).weight_sum(), 4.0 * kPi, 1e-10));
  CHECK(rel_close(sphere_rule(4, 8).weight_sum(), 2.0 * kPi * kPi, 1e-10));
  CHECK(rel_close(sphere_rule(5, 8).weight_sum(), 26.31894506957162, 1e-10));
  CHECK(rel_close(sphere_rule(6, 6).weight_sum(), std::pow(kPi, 3), 1e-10));
  CHECK_THROWS_AS(sphere_rule(7, 8), UnsupportedDimensionError);
  CHECK_THROWS_AS(sphere_rule(3, 1), SpecError);
}

TEST_CASE("sphere_rule node norms and moments") {
  for (int d = 2; d <= 6; ++d) {
    SphereRule rule = sphere_rule(d, d <= 3 ? 10 : 6);
    double area = unit_sphere_area(d);

    for (const Vec& n : rule.nodes) CHECK(std::abs(n.norm() - 1.0) < 1e-12);

    double odd = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) odd += rule.weights[i] * rule.nodes[i][0];
    CHECK(std::abs(odd) < 1e-12 * area);

    // Rotational sanity: int (x . v)^2 = omega_{d-1} / d for any unit v.
    std::mt19937_64 rng(17u + std::uint64_t(d));
    std::normal_distribution<double> gauss;
    Vec v(d);
    for (int k = 0; k < d; ++k) v[k] = gauss(rng);
    v *= 1.0 / v.norm();
    double got = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      double dot = rule.nodes[i].dot(v);
      got += rule.weights[i] * dot * dot;
    }
    CHECK(rel_close(got, area / d, 1e-8));
  }
}

TEST_CASE("integrate_polar_singular") {
  QuadratureSpec q;

  SUBCASE("uniform density, singular power, analytic value") {
    // rho = 1 on B(0,1), x = 0, p = s+1 with s = 0.5, d = 3:
    // omega_2 int_0^1 t^{d-1-p} dt = 4 pi / 1.5.
    Box box = Box::cube(3, 1.0);
    auto rho = [](const Vec& y) { return y.norm() <= 1.0 ? 1.0 : 0.0; };
    auto r = integrate_polar_singular(rho, Vec::zero(3), 1.5, 3, box, q);
    CHECK(rel_close(r.value, 4.0 * kPi / 1.5, 1e-7));
  }
  SUBCASE("zero density") {
    Box box = Box::cube(3, 1.0);
    auto r = integrate_polar_singular([](const Vec&) { return 0.0; }, Vec{0.1, 0.2, 0.0}, 1.5, 3,
                                      box, q);
    CHECK(r.value == 0.0);
  }
  SUBCASE("power >= d rejected") {
    Box box = Box::cube(3, 1.0);
    CHECK_THROWS_AS(
        integrate_polar_singular([](const Vec&) { return 1.0; }, Vec::zero(3), 3.0, 3, box, q),
        InvalidPowerError);
  }
  SUBCASE("far evaluation point cross-checked against tensor quadrature") {
    Box box{Vec{-0.5, -0.5, -0.5}, Vec{0.5, 0.5, 0.5}};
    auto g = [](const Vec& y) {
      return std::cos(y[0]) * (1.0 + y[1] * y[1]) * std::exp(-y[2]);
    };
    Vec x{2.0, 0.7, -0.4};
    double p = 1.7;
    auto got = integrate_polar_singular(g, x, p, 3, box, q);
    auto f = [&](const Vec& y) { return g(y) * std::pow(y.dist(x), -p); };
    double want = testsupport::tensor_box_integrate(f, box, q);
    CHECK(rel_close(got.value, want, 1e-7));
  }
}
