#include "rieszlab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace rieszlab {

namespace {

// int_0^theta sin^m t dt for the sin powers that occur with d <= 6.
double incomplete_sin_integral(int m, double theta) {
  double c = std::cos(theta), s = std::sin(theta);
  switch (m) {
    case 0:
      return theta;
    case 1:
      return 1.0 - c;
    case 2:
      return 0.5 * (theta - s * c);
    case 3:
      return c * c * c / 3.0 - c + 2.0 / 3.0;
    case 4:
      return (3.0 * theta - 3.0 * s * c - 2.0 * s * s * s * c) / 8.0;
    default:
      throw UnsupportedDimensionError("incomplete_sin_integral: sin power out of range");
  }
}

Box radial_support_box(int d, double t1) { return Box::cube(d, t1); }

}  // namespace

double sampled_continuity_defect(const RadialProfile& p, int levels) {
  double span = p.t1 - p.t0;
  double lo = std::max(0.0, p.t0 - 0.1 * span), hi = p.t1 + 0.1 * span;
  int n = 16 << std::min(levels, 16);
  double worst = 0.0;
  double prev = p(lo);
  for (int i = 1; i <= n; ++i) {
    double t = lo + (hi - lo) * double(i) / n;
    double v = p(t);
    worst = std::max(worst, std::abs(v - prev));
    prev = v;
  }
  return worst;
}

LatticeDensity::LatticeDensity(Vec origin, double spacing, std::vector<int> shape,
                               std::vector<double> values)
    : origin_(origin), spacing_(spacing), shape_(std::move(shape)), values_(std::move(values)) {
  int d = origin_.dim();
  if (int(shape_.size()) != d) throw SpecError("LatticeDensity: shape rank != dimension");
  if (!(spacing_ > 0.0)) throw SpecError("LatticeDensity: spacing must be positive");
  std::size_t count = 1;
  for (int n : shape_) {
    if (n < 1) throw SpecError("LatticeDensity: shape entries must be >= 1");
    count *= std::size_t(n);
  }
  if (values_.size() != count) throw SpecError("LatticeDensity: value count does not match shape");

  strides_.assign(std::size_t(d), 1);
  for (int k = d - 2; k >= 0; --k)
    strides_[std::size_t(k)] = strides_[std::size_t(k + 1)] * std::size_t(shape_[std::size_t(k + 1)]);

  // Support = nonzero nodes dilated by one spacing.
  std::vector<int> lo(std::size_t(d), std::numeric_limits<int>::max());
  std::vector<int> hi(std::size_t(d), -1);
  std::vector<int> idx(std::size_t(d), 0);
  for (std::size_t flat = 0; flat < values_.size(); ++flat) {
    if (values_[flat] != 0.0) {
      for (int k = 0; k < d; ++k) {
        lo[std::size_t(k)] = std::min(lo[std::size_t(k)], idx[std::size_t(k)]);
        hi[std::size_t(k)] = std::max(hi[std::size_t(k)], idx[std::size_t(k)]);
      }
    }
    for (int k = d - 1; k >= 0; --k) {
      if (++idx[std::size_t(k)] < shape_[std::size_t(k)]) break;
      idx[std::size_t(k)] = 0;
    }
  }
  Vec blo(d), bhi(d);
  for (int k = 0; k < d; ++k) {
    if (hi[std::size_t(k)] < 0) {  // all-zero lattice
      blo[k] = origin_[k];
      bhi[k] = origin_[k];
    } else {
      blo[k] = origin_[k] + spacing_ * (lo[std::size_t(k)] - 1);
      bhi[k] = origin_[k] + spacing_ * (hi[std::size_t(k)] + 1);
    }
  }
  support_box_ = Box(blo, bhi);
}

double LatticeDensity::node(const std::vector<int>& idx) const {
  std::size_t flat = 0;
  for (int k = 0; k < dim(); ++k) {
    int i = idx[std::size_t(k)];
    if (i < 0 || i >= shape_[std::size_t(k)]) return 0.0;
    flat += strides_[std::size_t(k)] * std::size_t(i);
  }
  return values_[flat];
}

double LatticeDensity::operator()(const Vec& x) const {
  const int d = dim();
  std::array<int, kMaxDim> base{};
  std::array<double, kMaxDim> frac{};
  for (int k = 0; k < d; ++k) {
    double a = (x[k] - origin_[k]) / spacing_;
    double fl = std::floor(a);
    base[std::size_t(k)] = int(fl);
    frac[std::size_t(k)] = a - fl;
    if (a < -1.0 || a > double(shape_[std::size_t(k)])) return 0.0;
  }
  double sum = 0.0;
  std::vector<int> idx(static_cast<std::size_t>(d));
  for (int corner = 0; corner < (1 << d); ++corner) {
    double w = 1.0;
    for (int k = 0; k < d; ++k) {
      int bit = (corner >> k) & 1;
      idx[std::size_t(k)] = base[std::size_t(k)] + bit;
      w *= bit ? frac[std::size_t(k)] : 1.0 - frac[std::size_t(k)];
    }
    if (w != 0.0) sum += w * node(idx);
  }
  return sum;
}

LatticeDensity LatticeDensity::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("LatticeDensity: cannot open " + path);
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return load_json(in);
  return load_csv(in);
}

LatticeDensity LatticeDensity::load_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw SpecError("LatticeDensity: empty file");
  std::vector<double> fields;
  std::stringstream hs(header);
  std::string tok;
  while (std::getline(hs, tok, ',')) fields.push_back(std::stod(tok));
  if (fields.size() < 2) throw SpecError("LatticeDensity: malformed header");
  int d = int(fields[0]);
  if (d < 1 || d > kMaxDim) throw SpecError("LatticeDensity: bad dimension in header");
  if (fields.size() != std::size_t(1 + 1 + 2 * d)) throw SpecError("LatticeDensity: malformed header");
  double spacing = fields[1];
  Vec origin(d);
  std::vector<int> shape(static_cast<std::size_t>(d));
  std::size_t count = 1;
  for (int k = 0; k < d; ++k) {
    origin[k] = fields[std::size_t(2 + k)];
    shape[std::size_t(k)] = int(fields[std::size_t(2 + d + k)]);
    count *= std::size_t(std::max(0, shape[std::size_t(k)]));
  }
  std::vector<double> values;
  values.reserve(count);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    while (std::getline(ls, tok, ',')) values.push_back(std::stod(tok));
  }
  return LatticeDensity(origin, spacing, std::move(shape), std::move(values));
}

LatticeDensity LatticeDensity::load_json(std::istream& in) {
  nlohmann::json j;
  in >> j;
  int d = j.at("d").get<int>();
  if (d < 1 || d > kMaxDim) throw SpecError("LatticeDensity: bad dimension");
  double spacing = j.at("spacing").get<double>();
  auto ov = j.at("origin").get<std::vector<double>>();
  if (int(ov.size()) != d) throw SpecError("LatticeDensity: origin rank mismatch");
  Vec origin = Vec::from(ov);
  auto shape = j.at("shape").get<std::vector<int>>();
  auto values = j.at("values").get<std::vector<double>>();
  return LatticeDensity(origin, spacing, std::move(shape), std::move(values));
}

void LatticeDensity::save_csv(std::ostream& out) const {
  out.precision(17);
  out << dim() << ',' << spacing_;
  for (int k = 0; k < dim(); ++k) out << ',' << origin_[k];
  for (int k = 0; k < dim(); ++k) out << ',' << shape_[std::size_t(k)];
  out << '\n';
  for (double v : values_) out << v << '\n';
}

Measure::Measure(int d, RadialProfile p, bool sign_allowed)
    : d_(d), density_(std::move(p)), sign_allowed_(sign_allowed) {
  if (d < 2 || d > kMaxDim) throw SpecError("Measure: dimension must be in [2, 6]");
  support_box_ = radial_support_box(d, std::get<RadialProfile>(density_).t1);
}

Measure::Measure(int d, AnalyticDensity a, bool sign_allowed)
    : d_(d), density_(std::move(a)), sign_allowed_(sign_allowed) {
  if (d < 2 || d > kMaxDim) throw SpecError("Measure: dimension must be in [2, 6]");
  const auto& an = std::get<AnalyticDensity>(density_);
  if (an.support_box.dim() != d) throw SpecError("Measure: support box dimension mismatch");
  support_box_ = an.support_box;
}

Measure::Measure(int d, LatticeDensity l, bool sign_allowed)
    : d_(d), density_(std::move(l)), sign_allowed_(sign_allowed) {
  if (d < 2 || d > kMaxDim) throw SpecError("Measure: dimension must be in [2, 6]");
  const auto& lat = std::get<LatticeDensity>(density_);
  if (lat.dim() != d) throw SpecError("Measure: lattice dimension mismatch");
  support_box_ = lat.support_box();
}

double Measure::density_at(const Vec& x) const {
  return std::visit(
      [&x](const auto& den) -> double {
        using T = std::decay_t<decltype(den)>;
        if constexpr (std::is_same_v<T, RadialProfile>) {
          return den(x.norm());
        } else {
          return den(x);
        }
      },
      density_);
}

bool Measure::in_support(const Vec& x) const {
  if (const auto* r = radial()) {
    double t = x.norm();
    return t >= r->t0 && t <= r->t1;
  }
  if (const auto* a = analytic()) return a->support_predicate(x);
  return support_box_.contains(x) && density_at(x) != 0.0;
}

std::vector<double> Measure::radial_breakpoints(const Vec& x) const {
  std::vector<double> out;
  if (const auto* r = radial()) {
    double c = x.norm();
    out = {std::abs(c - r->t0), std::abs(c - r->t1), c + r->t0, c + r->t1};
  } else {
    out = {support_box_.dist(x), support_box_.max_corner_dist(x)};
  }
  return out;
}

void check_sign_invariant(const Measure& mu, int samples_per_axis) {
  if (mu.sign_allowed()) return;
  const Box& box = mu.support_box();
  int d = mu.dim();
  int n = d >= 5 ? std::min(samples_per_axis, 5) : samples_per_axis;
  std::vector<int> idx(std::size_t(d), 0);
  double scale = 0.0;
  std::vector<std::pair<Vec, double>> vals;
  for (;;) {
    Vec x(d);
    for (int k = 0; k < d; ++k)
      x[k] = box.lo[k] + (box.hi[k] - box.lo[k]) * (idx[std::size_t(k)] + 0.5) / n;
    double v = mu.density_at(x);
    scale = std::max(scale, std::abs(v));
    vals.emplace_back(x, v);
    int k = d - 1;
    while (k >= 0 && ++idx[std::size_t(k)] == n) idx[std::size_t(k--)] = 0;
    if (k < 0) break;
  }
  for (const auto& [x, v] : vals) {
    if (v < -1e-12 * std::max(scale, 1.0))
      throw NegativityError("measure declared nonnegative has negative density sample");
  }
}

namespace {

Result1D radial_ball_mass(const RadialProfile& p, int d, double c, double R, const QuadratureSpec& q) {
  const double area = unit_sphere_area(d);
  if (c <= 1e-14 * std::max(1.0, R)) {
    double hi = std::min(p.t1, R);
    if (hi <= p.t0) return {0.0, 0.0};
    auto f = [&p, d](double t) { return p(t) * std::pow(t, d - 1); };
    std::vector<double> breaks = {p.t0, hi};
    Result1D r = integrate_1d_adaptive(f, breaks, q);
    return {area * r.value, area * r.error_estimate};
  }

  // Off-center ball: weight each shell by the angular measure of the cap
  // {omega : |t omega - y| <= R}.
  const double lo = p.t0;
  const double hi = std::min(p.t1, c + R);
  if (hi <= lo) return {0.0, 0.0};
  const double wedge = unit_sphere_area(d - 1);  // omega_{d-2}
  auto cap = [&](double t) -> double {
    if (t + c <= R) return area;  // shell entirely inside the ball
    if (std::abs(t - c) >= R) return 0.0;
    double cosstar = (t * t + c * c - R * R) / (2.0 * t * c);
    cosstar = std::clamp(cosstar, -1.0, 1.0);
    return wedge * incomplete_sin_integral(d - 2, std::acos(cosstar));
  };
  auto f = [&](double t) { return p(t) * std::pow(t, d - 1) * cap(t); };
  std::vector<double> breaks = {lo, hi};
  for (double b : {std::abs(c - R), R - c, c + R})
    if (b > lo && b < hi) breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  return integrate_1d_adaptive(f, breaks, q);
}

}  // namespace

Result1D mass_in_ball(const Measure& mu, const Ball& ball, const QuadratureSpec& q) {
  q.validate();
  if (!std::isfinite(ball.radius)) throw SpecError("mass_in_ball: unbounded ball");
  if (ball.center.dim() != mu.dim()) throw SpecError("mass_in_ball: dimension mismatch");

  if (const auto* r = mu.radial())
    return radial_ball_mass(*r, mu.dim(), ball.center.norm(), ball.radius, q);

  // General density: nonsingular polar integration around the ball center.
  SphereRule rule = sphere_rule(mu.dim(), q.order_for(mu.dim()));
  auto acc = [&mu](const Vec& y, const Vec&, double w, std::array<double, 1>& out) {
    out[0] += w * mu.density_at(y);
  };
  auto breaks = mu.radial_breakpoints(ball.center);
  ArrayResult<1> r = polar_radial_integrate<1>(ball.center, 0.0, mu.support_box(), q, rule, breaks,
                                               acc, RadialClip{0.0, ball.radius});
  return {r.value[0], r.error[0]};
}

MassProfile radial_mass_profile(const RadialProfile& profile, int d, const QuadratureSpec& q) {
  const double area = unit_sphere_area(d);
  MassProfile mp;
  mp.t0 = profile.t0;
  mp.t1 = profile.t1;
  RadialProfile p = profile;
  mp.dm = [p, d, area](double t) { return area * p(t) * std::pow(t, d - 1); };
  QuadratureSpec qq = q;
  mp.m = [p, d, area, qq](double t) -> double {
    double hi = std::min(t, p.t1);
    if (hi <= p.t0) return 0.0;
    auto f = [&p, d](double u) { return p(u) * std::pow(u, d - 1); };
    return area * integrate_1d_adaptive(f, p.t0, hi, qq).value;
  };
  mp.total = mp.m(profile.t1);
  return mp;
}

Result1D total_mass(const Measure& mu, const QuadratureSpec& q) {
  if (const auto* r = mu.radial())
    return radial_ball_mass(*r, mu.dim(), 0.0, r->t1 * (1.0 + 1e-12), q);
  Vec c = mu.support_box().center();
  double R = mu.support_box().max_corner_dist(c) * (1.0 + 1e-9) + 1e-12;
  return mass_in_ball(mu, Ball(c, R), q);
}

Measure rescale(const Measure& mu, const Params& p, const Vec& x0, double r) {
  if (!(r > 0.0)) throw SpecError("rescale: scale must be positive");
  if (x0.dim() != mu.dim()) throw SpecError("rescale: center dimension mismatch");
  const double gain = std::pow(r, double(p.d) - p.s);

  if (const auto* rad = mu.radial(); rad && x0.norm() == 0.0) {
    RadialProfile h = *rad;
    RadialProfile scaled([h, gain, r](double t) { return gain * h(r * t); }, h.t0 / r, h.t1 / r,
                         h.smoothness_note);
    return Measure(mu.dim(), scaled, mu.sign_allowed());
  }

  Measure inner = mu;
  Vec lo(mu.dim()), hi(mu.dim());
  for (int k = 0; k < mu.dim(); ++k) {
    lo[k] = (mu.support_box().lo[k] - x0[k]) / r;
    hi[k] = (mu.support_box().hi[k] - x0[k]) / r;
  }
  AnalyticDensity a;
  a.support_box = Box(lo, hi);
  a.rho = [inner, x0, r, gain](const Vec& z) { return gain * inner.density_at(x0 + r * z); };
  a.support_predicate = [inner, x0, r](const Vec& z) { return inner.in_support(x0 + r * z); };
  if (const auto* an = mu.analytic()) a.symmetry_axis = x0.norm() == 0.0 ? an->symmetry_axis : -1;
  return Measure(mu.dim(), a, mu.sign_allowed());
}

}  // namespace rieszlab
