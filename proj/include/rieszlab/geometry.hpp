#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <initializer_list>
#include <numbers>
#include <span>
#include <stdexcept>

namespace rieszlab {

inline constexpr int kMaxDim = 6;

/// Point/vector in R^d, 1 <= d <= kMaxDim. Fixed storage, cheap to copy.
class Vec {
 public:
  Vec() = default;
  explicit Vec(int d) : n_(checked(d)) { c_.fill(0.0); }
  Vec(std::initializer_list<double> xs) : n_(checked(int(xs.size()))) {
    c_.fill(0.0);
    std::copy(xs.begin(), xs.end(), c_.begin());
  }

  static Vec zero(int d) { return Vec(d); }
  static Vec unit(int d, int axis) {
    Vec v(d);
    v[axis] = 1.0;
    return v;
  }
  static Vec from(std::span<const double> xs) {
    Vec v(int(xs.size()));
    std::copy(xs.begin(), xs.end(), v.c_.begin());
    return v;
  }

  int dim() const { return n_; }
  double operator[](int i) const { return c_[std::size_t(i)]; }
  double& operator[](int i) { return c_[std::size_t(i)]; }
  const double* data() const { return c_.data(); }
  std::span<const double> span() const { return {c_.data(), std::size_t(n_)}; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < n_; ++i) c_[std::size_t(i)] += o[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < n_; ++i) c_[std::size_t(i)] -= o[i];
    return *this;
  }
  Vec& operator*=(double a) {
    for (int i = 0; i < n_; ++i) c_[std::size_t(i)] *= a;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(Vec a, double s) { return a *= s; }
  friend Vec operator*(double s, Vec a) { return a *= s; }

  double dot(const Vec& o) const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += c_[std::size_t(i)] * o[i];
    return s;
  }
  double norm_sq() const { return dot(*this); }
  double norm() const { return std::sqrt(norm_sq()); }
  double dist(const Vec& o) const { return (*this - o).norm(); }

  /// Lexicographic order, used for deterministic argmax tie-breaking.
  friend bool lex_less(const Vec& a, const Vec& b) {
    for (int i = 0; i < a.dim(); ++i) {
      if (a[i] < b[i]) return true;
      if (a[i] > b[i]) return false;
    }
    return false;
  }

 private:
  static int checked(int d) {
    if (d < 1 || d > kMaxDim) throw std::invalid_argument("Vec: dimension out of range");
    return d;
  }
  std::array<double, kMaxDim> c_{};
  int n_ = 0;
};

/// Axis-aligned box, lo <= hi componentwise.
struct Box {
  Vec lo, hi;

  Box() = default;
  Box(Vec l, Vec h) : lo(l), hi(h) {
    for (int i = 0; i < dim(); ++i)
      if (!(lo[i] <= hi[i])) throw std::invalid_argument("Box: lo > hi");
  }
  static Box cube(int d, double half_width) {
    Vec l(d), h(d);
    for (int i = 0; i < d; ++i) {
      l[i] = -half_width;
      h[i] = half_width;
    }
    return {l, h};
  }

  int dim() const { return lo.dim(); }

  bool contains(const Vec& x, double pad = 0.0) const {
    for (int i = 0; i < dim(); ++i)
      if (x[i] < lo[i] - pad || x[i] > hi[i] + pad) return false;
    return true;
  }

  Vec center() const { return 0.5 * (lo + hi); }

  double min_extent() const {
    double m = hi[0] - lo[0];
    for (int i = 1; i < dim(); ++i) m = std::min(m, hi[i] - lo[i]);
    return m;
  }
  double diameter() const { return (hi - lo).norm(); }

  /// Box scaled by `factor` about its center.
  Box dilated(double factor) const {
    Vec c = center(), l(dim()), h(dim());
    for (int i = 0; i < dim(); ++i) {
      double half = 0.5 * factor * (hi[i] - lo[i]);
      l[i] = c[i] - half;
      h[i] = c[i] + half;
    }
    return {l, h};
  }

  Box padded(double pad) const {
    Vec l = lo, h = hi;
    for (int i = 0; i < dim(); ++i) {
      l[i] -= pad;
      h[i] += pad;
    }
    return {l, h};
  }

  /// Distance from x to the box (0 if inside).
  double dist(const Vec& x) const {
    double s = 0.0;
    for (int i = 0; i < dim(); ++i) {
      double e = std::max({lo[i] - x[i], 0.0, x[i] - hi[i]});
      s += e * e;
    }
    return std::sqrt(s);
  }

  /// Largest |corner - x| over the 2^d corners.
  double max_corner_dist(const Vec& x) const {
    double s = 0.0;
    for (int i = 0; i < dim(); ++i) {
      double e = std::max(std::abs(lo[i] - x[i]), std::abs(hi[i] - x[i]));
      s += e * e;
    }
    return std::sqrt(s);
  }
};

/// Open ball B(center, radius), radius > 0.
struct Ball {
  Vec center;
  double radius = 0.0;

  Ball() = default;
  Ball(Vec c, double r) : center(c), radius(r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("Ball: radius must be positive and finite");
  }
};

/// Surface measure of the unit sphere S^{d-1} in R^d: 2 pi^{d/2} / Gamma(d/2).
inline double unit_sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

/// Volume of the unit ball in R^d.
inline double unit_ball_volume(int d) { return unit_sphere_area(d) / d; }

}  // namespace rieszlab
