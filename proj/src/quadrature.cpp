#include "rieszlab/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace rieszlab {

Result1D integrate_1d_adaptive(const std::function<double(double)>& f, double a, double b,
                               const QuadratureSpec& q) {
  std::array<double, 2> breaks = {a, b};
  return integrate_1d_adaptive(f, breaks, q);
}

Result1D integrate_1d_adaptive(const std::function<double(double)>& f, std::span<const double> breaks,
                               const QuadratureSpec& q) {
  if (breaks.size() < 2) throw SpecError("integrate_1d_adaptive: need at least two breakpoints");
  for (double b : breaks)
    if (!std::isfinite(b)) throw SpecError("integrate_1d_adaptive: endpoints must be finite");
  auto wrapped = [&f](double t) { return std::array<double, 1>{f(t)}; };
  ArrayResult<1> r = integrate_adaptive<1>(wrapped, breaks, q);
  return {r.value[0], r.error[0]};
}

namespace {

// Eigen decomposition of a symmetric tridiagonal matrix (QL with implicit
// shifts, EISPACK tql2). diag/sub are overwritten; z accumulates the first
// row of the eigenvector matrix, which is all Golub-Welsch needs.
void tridiag_eigen_first_row(std::vector<double>& diag, std::vector<double>& sub, std::vector<double>& z) {
  const int n = int(diag.size());
  z.assign(std::size_t(n), 0.0);
  if (n == 0) return;
  z[0] = 1.0;
  if (n == 1) return;

  // QL only ever applies Givens rotations to adjacent eigenvector columns, so
  // tracking the first row of the eigenvector matrix suffices.
  std::vector<double>& zrow = z;
  std::vector<double> e(sub.begin(), sub.end());
  e.resize(std::size_t(n), 0.0);

  auto D = [&diag](int i) -> double& { return diag[std::size_t(i)]; };
  auto E = [&e](int i) -> double& { return e[std::size_t(i)]; };
  auto Z = [&zrow](int i) -> double& { return zrow[std::size_t(i)]; };

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        double dd = std::abs(D(m)) + std::abs(D(m + 1));
        if (std::abs(E(m)) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m != l) {
        if (iter++ == 60) throw std::runtime_error("tridiag_eigen: no convergence");
        double g = (D(l + 1) - D(l)) / (2.0 * E(l));
        double r = std::hypot(g, 1.0);
        g = D(m) - D(l) + E(l) / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i;
        for (i = m - 1; i >= l; --i) {
          double f = s * E(i), b = c * E(i);
          r = std::hypot(f, g);
          E(i + 1) = r;
          if (r == 0.0) {
            D(i + 1) -= p;
            E(m) = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = D(i + 1) - p;
          r = (D(i) - g) * s + 2.0 * c * b;
          p = s * r;
          D(i + 1) = g + p;
          g = c * r - b;
          double zi1 = Z(i + 1), zi = Z(i);
          Z(i + 1) = s * zi + c * zi1;
          Z(i) = c * zi - s * zi1;
        }
        if (r == 0.0 && i >= l) continue;
        D(l) -= p;
        E(l) = g;
        E(m) = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace

void gauss_gegenbauer(int n, int m, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw SpecError("gauss_gegenbauer: need n >= 1");
  if (m < 0) throw SpecError("gauss_gegenbauer: sin power must be >= 0");

  // Jacobi matrix for the weight (1-u^2)^{(m-1)/2}: zero diagonal,
  // b_k^2 = k (k+m-1) / ((2k+m)(2k+m-2)).
  std::vector<double> diag(std::size_t(n), 0.0), sub;
  sub.reserve(std::size_t(n - 1));
  for (int k = 1; k < n; ++k) {
    double b2;
    if (m == 0 && k == 1) {
      b2 = 0.5;  // Chebyshev weight: the generic formula degenerates to 0/0
    } else {
      b2 = double(k) * (k + m - 1) / (double(2 * k + m) * (2 * k + m - 2));
    }
    sub.push_back(std::sqrt(b2));
  }
  const double mu0 = std::sqrt(std::numbers::pi) * std::tgamma(0.5 * (m + 1)) / std::tgamma(0.5 * m + 1.0);

  std::vector<double> z;
  tridiag_eigen_first_row(diag, sub, z);

  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return diag[a] < diag[b]; });

  nodes.resize(std::size_t(n));
  weights.resize(std::size_t(n));
  for (std::size_t i = 0; i < order.size(); ++i) {
    nodes[i] = diag[order[i]];
    weights[i] = mu0 * z[order[i]] * z[order[i]];
  }
}

SphereRule sphere_rule(int d, int order) {
  if (d < 2 || d > kMaxDim) throw UnsupportedDimensionError("sphere_rule: 2 <= d <= 6 required");
  if (order < 2) throw SpecError("sphere_rule: order must be >= 2");

  SphereRule rule;
  rule.d = d;
  const int n_az = 2 * order;
  const double w_az = 2.0 * std::numbers::pi / n_az;

  if (d == 2) {
    rule.nodes.reserve(std::size_t(n_az));
    rule.weights.assign(std::size_t(n_az), w_az);
    for (int i = 0; i < n_az; ++i) {
      double phi = 2.0 * std::numbers::pi * (i + 0.5) / n_az;
      rule.nodes.push_back(Vec{std::cos(phi), std::sin(phi)});
    }
    return rule;
  }

  // Polar factors: angle theta_j has surface weight sin^{d-1-j} theta_j,
  // j = 1..d-2, handled as Gauss-Gegenbauer rules in u = cos theta.
  std::vector<std::vector<double>> us(std::size_t(d - 2)), ws(std::size_t(d - 2));
  for (int j = 0; j < d - 2; ++j) gauss_gegenbauer(order, d - 2 - j, us[std::size_t(j)], ws[std::size_t(j)]);

  std::vector<int> idx(std::size_t(d - 2), 0);
  for (;;) {
    double wpolar = 1.0;
    std::array<double, kMaxDim> cosv{}, sinv{};
    for (int j = 0; j < d - 2; ++j) {
      double u = us[std::size_t(j)][std::size_t(idx[std::size_t(j)])];
      wpolar *= ws[std::size_t(j)][std::size_t(idx[std::size_t(j)])];
      cosv[std::size_t(j)] = u;
      sinv[std::size_t(j)] = std::sqrt(std::max(0.0, 1.0 - u * u));
    }
    for (int i = 0; i < n_az; ++i) {
      double phi = 2.0 * std::numbers::pi * (i + 0.5) / n_az;
      Vec node(d);
      double prod = 1.0;
      for (int j = 0; j < d - 2; ++j) {
        node[j] = prod * cosv[std::size_t(j)];
        prod *= sinv[std::size_t(j)];
      }
      node[d - 2] = prod * std::cos(phi);
      node[d - 1] = prod * std::sin(phi);
      rule.nodes.push_back(node);
      rule.weights.push_back(wpolar * w_az);
    }
    int j = d - 3;
    while (j >= 0 && ++idx[std::size_t(j)] == order) idx[std::size_t(j--)] = 0;
    if (j < 0) break;
  }
  return rule;
}

Result1D integrate_polar_singular(const std::function<double(const Vec&)>& g, const Vec& x, double p,
                                  int d, const Box& far_domain, const QuadratureSpec& q,
                                  std::span<const double> extra_breaks) {
  if (x.dim() != d || far_domain.dim() != d)
    throw SpecError("integrate_polar_singular: dimension mismatch");
  SphereRule rule = sphere_rule(d, q.order_for(d));
  auto acc = [&g](const Vec& y, const Vec&, double w, std::array<double, 1>& out) {
    out[0] += w * g(y);
  };
  ArrayResult<1> r = polar_radial_integrate<1>(x, p, far_domain, q, rule, extra_breaks, acc);
  return {r.value[0], r.error[0]};
}

}  // namespace rieszlab
