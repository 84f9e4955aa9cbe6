#include "rieszlab/max_principle.hpp"

#include <algorithm>
#include <cmath>

#include "rieszlab/parallel.hpp"

namespace rieszlab {

namespace {

double eval_field(const Measure& mu, const Params& p, const QuadratureSpec& q, const Vec& x,
                  int component) {
  RieszValue rv = riesz_vector(mu, x, p, q);
  return component >= 0 ? std::abs(rv.vector[component]) : rv.magnitude();
}

struct ScanBest {
  double value = -1.0;
  Vec argmax;
};

// Evaluate a batch of candidate points in parallel; reduce sequentially with
// lexicographic tie-breaking.
void scan_points(const Measure& mu, const Params& p, const QuadratureSpec& q, int component,
                 const std::vector<Vec>& pts, ScanBest& best,
                 std::vector<std::pair<Vec, double>>* scanned) {
  std::vector<double> vals(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { vals[i] = eval_field(mu, p, q, pts[i], component); });
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (scanned) scanned->emplace_back(pts[i], vals[i]);
    if (vals[i] > best.value || (vals[i] == best.value && best.value >= 0.0 && lex_less(pts[i], best.argmax)))
      best = {vals[i], pts[i]};
  }
}

// Reduced search coordinates: radial measures scan the radius; densities with
// a symmetry axis scan (axis coordinate, transverse radius); otherwise the
// full d-dimensional grid.
struct SearchFrame {
  enum Kind { radial, axisym, full } kind = full;
  int axis = 0;        // axisym: symmetric axis
  int transverse = 1;  // axisym: representative transverse axis
};

SearchFrame frame_for(const Measure& mu) {
  if (mu.radial()) return {SearchFrame::radial, 0, 1};
  if (const auto* a = mu.analytic(); a && a->symmetry_axis >= 0) {
    SearchFrame f;
    f.kind = SearchFrame::axisym;
    f.axis = a->symmetry_axis;
    f.transverse = f.axis == 0 ? 1 : 0;
    return f;
  }
  return {SearchFrame::full, 0, 1};
}

Vec embed(const SearchFrame& f, int d, const std::vector<double>& coords) {
  Vec x(d);
  switch (f.kind) {
    case SearchFrame::radial:
      x[0] = coords[0];
      break;
    case SearchFrame::axisym:
      x[f.axis] = coords[0];
      x[f.transverse] = coords[1];
      break;
    case SearchFrame::full:
      for (int k = 0; k < d; ++k) x[k] = coords[std::size_t(k)];
      break;
  }
  return x;
}

int search_dims(const SearchFrame& f, int d) {
  return f.kind == SearchFrame::radial ? 1 : (f.kind == SearchFrame::axisym ? 2 : d);
}

struct SearchDomain {
  std::vector<double> lo, hi;  // in search coordinates
  std::function<bool(const Vec&)> accept;
};

std::vector<Vec> grid_points(const SearchFrame& f, int d, const SearchDomain& dom,
                             const std::vector<int>& counts) {
  int dims = int(dom.lo.size());
  std::vector<Vec> pts;
  std::vector<int> idx(std::size_t(dims), 0);
  std::vector<double> coords(std::size_t(dims), 0.0);
  for (;;) {
    for (int k = 0; k < dims; ++k) {
      int n = counts[std::size_t(k)];
      coords[std::size_t(k)] =
          n == 1 ? 0.5 * (dom.lo[std::size_t(k)] + dom.hi[std::size_t(k)])
                 : dom.lo[std::size_t(k)] +
                       (dom.hi[std::size_t(k)] - dom.lo[std::size_t(k)]) * idx[std::size_t(k)] / double(n - 1);
    }
    Vec x = embed(f, d, coords);
    if (!dom.accept || dom.accept(x)) pts.push_back(x);
    int k = dims - 1;
    while (k >= 0 && ++idx[std::size_t(k)] == counts[std::size_t(k)]) idx[std::size_t(k--)] = 0;
    if (k < 0) break;
  }
  return pts;
}

std::vector<int> counts_for(const SearchDomain& dom, double spacing, int budget) {
  int dims = int(dom.lo.size());
  std::vector<int> counts(static_cast<std::size_t>(dims));
  int per_axis_budget = std::max(3, int(std::floor(std::pow(double(budget), 1.0 / dims))));
  for (int k = 0; k < dims; ++k) {
    double w = dom.hi[std::size_t(k)] - dom.lo[std::size_t(k)];
    int n = spacing > 0.0 ? int(std::round(w / spacing)) + 1 : per_axis_budget;
    counts[std::size_t(k)] = std::clamp(n, 2, std::max(2, per_axis_budget * 2));
  }
  return counts;
}

// One coarse pass plus refine_rounds of shrinking local grids around the
// running argmax; the running max never decreases.
SupResult grid_search(const Measure& mu, const Params& p, const QuadratureSpec& q, int component,
                      const SearchFrame& f, SearchDomain dom, const SupSearchSpec& spec,
                      std::vector<std::pair<Vec, double>>* scanned) {
  const int d = mu.dim();
  const int dims = int(dom.lo.size());
  std::vector<int> counts = counts_for(dom, spec.grid_spacing, spec.support_samples);

  ScanBest best;
  scan_points(mu, p, q, component, grid_points(f, d, dom, counts), best, scanned);
  if (best.value < 0.0) return {0.0, Vec::zero(d)};

  std::vector<double> halfwidth(static_cast<std::size_t>(dims));
  for (int k = 0; k < dims; ++k)
    halfwidth[std::size_t(k)] = (dom.hi[std::size_t(k)] - dom.lo[std::size_t(k)]) /
                                std::max(1, counts[std::size_t(k)] - 1);

  for (int round = 0; round < spec.refine_rounds; ++round) {
    std::vector<double> c(static_cast<std::size_t>(dims));
    switch (f.kind) {
      case SearchFrame::radial:
        c[0] = best.argmax.norm();
        break;
      case SearchFrame::axisym: {
        c[0] = best.argmax[f.axis];
        double u2 = 0.0;
        for (int k = 0; k < d; ++k)
          if (k != f.axis) u2 += best.argmax[k] * best.argmax[k];
        c[1] = std::sqrt(u2);
        break;
      }
      case SearchFrame::full:
        for (int k = 0; k < d; ++k) c[std::size_t(k)] = best.argmax[k];
        break;
    }
    SearchDomain local = dom;
    std::vector<int> lcounts(std::size_t(dims), 5);
    for (int k = 0; k < dims; ++k) {
      double hw = halfwidth[std::size_t(k)];
      local.lo[std::size_t(k)] = std::max(dom.lo[std::size_t(k)], c[std::size_t(k)] - hw);
      local.hi[std::size_t(k)] = std::min(dom.hi[std::size_t(k)], c[std::size_t(k)] + hw);
      halfwidth[std::size_t(k)] = 2.0 * hw / (spec.refine_factor * 4.0);
    }
    scan_points(mu, p, q, component, grid_points(f, d, local, lcounts), best, scanned);
  }
  return {best.value, best.argmax};
}

}  // namespace

SupResult sup_norm(const Measure& mu, const Params& p, const SupSearchSpec& spec, SupDomain domain,
                   const QuadratureSpec& q, int component,
                   std::vector<std::pair<Vec, double>>* scanned) {
  spec.validate();
  q.validate();
  const int d = mu.dim();
  SearchFrame f = frame_for(mu);
  const int dims = search_dims(f, d);

  Box global_box = spec.bounding_box ? *spec.bounding_box : mu.support_box().dilated(3.0);

  SearchDomain dom;
  dom.lo.assign(std::size_t(dims), 0.0);
  dom.hi.assign(std::size_t(dims), 0.0);

  if (domain == SupDomain::support) {
    if (f.kind == SearchFrame::radial) {
      const auto* prof = mu.radial();
      dom.lo[0] = prof->t0;
      dom.hi[0] = prof->t1;
    } else if (f.kind == SearchFrame::axisym) {
      const Box& sb = mu.support_box();
      dom.lo[0] = sb.lo[f.axis];
      dom.hi[0] = sb.hi[f.axis];
      double umax = 0.0;
      for (int k = 0; k < d; ++k)
        if (k != f.axis) umax = std::max(umax, std::max(std::abs(sb.lo[k]), std::abs(sb.hi[k])));
      dom.lo[1] = 0.0;
      dom.hi[1] = umax;
      Measure m = mu;
      dom.accept = [m](const Vec& x) { return m.in_support(x); };
    } else {
      const Box& sb = mu.support_box();
      for (int k = 0; k < d; ++k) {
        dom.lo[std::size_t(k)] = sb.lo[k];
        dom.hi[std::size_t(k)] = sb.hi[k];
      }
      Measure m = mu;
      dom.accept = [m](const Vec& x) { return m.in_support(x); };
    }
    return grid_search(mu, p, q, component, f, dom, spec, scanned);
  }

  // Global domain, with the kernel-decay exclusion bound: beyond the search
  // box |R mu| <= |mu|(R^d) / dist^s, so once the found sup beats that bound
  // the box provably contains the supremum of the scan family.
  Measure abs_mu = mu;
  if (mu.sign_allowed()) {
    Measure inner = mu;
    AnalyticDensity a;
    a.support_box = mu.support_box();
    a.rho = [inner](const Vec& y) { return std::abs(inner.density_at(y)); };
    a.support_predicate = [inner](const Vec& y) { return inner.in_support(y); };
    abs_mu = Measure(mu.dim(), a, false);
  }
  double tv_mass = total_mass(abs_mu, q).value;

  Box box = global_box;
  SupResult best{};
  for (int attempt = 0; attempt < 3; ++attempt) {
    if (f.kind == SearchFrame::radial) {
      dom.lo[0] = 0.0;
      dom.hi[0] = box.max_corner_dist(Vec::zero(d));
    } else if (f.kind == SearchFrame::axisym) {
      dom.lo[0] = box.lo[f.axis];
      dom.hi[0] = box.hi[f.axis];
      double umax = 0.0;
      for (int k = 0; k < d; ++k)
        if (k != f.axis) umax = std::max(umax, std::max(std::abs(box.lo[k]), std::abs(box.hi[k])));
      dom.lo[1] = 0.0;
      dom.hi[1] = umax;
      dom.accept = nullptr;
    } else {
      for (int k = 0; k < d; ++k) {
        dom.lo[std::size_t(k)] = box.lo[k];
        dom.hi[std::size_t(k)] = box.hi[k];
      }
      dom.accept = nullptr;
    }
    best = grid_search(mu, p, q, component, f, dom, spec, scanned);

    double margin = 0.0;
    for (int k = 0; k < d; ++k) {
      double m1 = mu.support_box().lo[k] - box.lo[k];
      double m2 = box.hi[k] - mu.support_box().hi[k];
      double m = std::min(m1, m2);
      margin = k == 0 ? m : std::min(margin, m);
    }
    margin = std::max(margin, 1e-9);
    double exclusion = tv_mass / std::pow(margin, p.s);
    if (best.value >= exclusion || tv_mass == 0.0) break;
    box = box.dilated(2.0);
  }
  return best;
}

double theta_at(const Measure& mu, const Params& p, const Vec& x, double r, const QuadratureSpec& q) {
  return mass_in_ball(mu, Ball(x, r), q).value / std::pow(r, p.s);
}

double theta_sup(const Measure& mu, const Params& p, const SupSearchSpec& spec,
                 const QuadratureSpec& q) {
  spec.validate();
  if (mu.sign_allowed())
    throw NegativityError("theta_sup: the density functional is defined for nonnegative measures");

  const int d = mu.dim();
  SearchFrame f = frame_for(mu);
  const Box& sb = mu.support_box();

  std::vector<double> lo, hi;
  if (f.kind == SearchFrame::radial) {
    lo = {0.0};
    hi = {mu.radial()->t1 * 1.05};
  } else if (f.kind == SearchFrame::axisym) {
    double umax = 0.0;
    for (int k = 0; k < d; ++k)
      if (k != f.axis) umax = std::max(umax, std::max(std::abs(sb.lo[k]), std::abs(sb.hi[k])));
    lo = {sb.lo[f.axis], 0.0};
    hi = {sb.hi[f.axis], umax};
  } else {
    lo.resize(std::size_t(d));
    hi.resize(std::size_t(d));
    for (int k = 0; k < d; ++k) {
      lo[std::size_t(k)] = sb.lo[k];
      hi[std::size_t(k)] = sb.hi[k];
    }
  }
  const int dims = int(lo.size());
  int per_axis = std::max(3, int(std::floor(std::pow(double(spec.support_samples) / 8.0, 1.0 / dims))));

  const double rmax = sb.diameter() * 1.1 + 1e-12;
  const int n_radii = 18;

  struct Cand {
    Vec x;
    double r;
  };
  std::vector<Cand> cands;
  std::vector<int> idx(std::size_t(dims), 0);
  for (;;) {
    std::vector<double> coords(static_cast<std::size_t>(dims));
    for (int k = 0; k < dims; ++k)
      coords[std::size_t(k)] = lo[std::size_t(k)] + (hi[std::size_t(k)] - lo[std::size_t(k)]) *
                                                        (per_axis == 1 ? 0.5 : idx[std::size_t(k)] / double(per_axis - 1));
    Vec x = embed(f, d, coords);
    for (int j = 0; j < n_radii; ++j) cands.push_back({x, rmax * std::pow(0.5, j)});
    int k = dims - 1;
    while (k >= 0 && ++idx[std::size_t(k)] == per_axis) idx[std::size_t(k--)] = 0;
    if (k < 0) break;
  }

  std::vector<double> vals(cands.size());
  parallel_for(cands.size(), [&](std::size_t i) { vals[i] = theta_at(mu, p, cands[i].x, cands[i].r, q); });
  std::size_t bi = 0;
  for (std::size_t i = 1; i < cands.size(); ++i)
    if (vals[i] > vals[bi]) bi = i;
  double best = vals[bi];
  Vec bx = cands[bi].x;
  double br = cands[bi].r;

  // Local refinement in center and radius.
  double step = 0.25 * br;
  for (int round = 0; round < spec.refine_rounds + 2; ++round) {
    std::vector<Cand> local;
    for (int k = 0; k < d; ++k) {
      for (double sgn : {-1.0, 1.0}) {
        Vec x2 = bx;
        x2[k] += sgn * step;
        local.push_back({x2, br});
      }
    }
    for (double fr : {0.6, 0.8, 1.25, 1.6}) local.push_back({bx, br * fr});
    std::vector<double> lv(local.size());
    parallel_for(local.size(), [&](std::size_t i) { lv[i] = theta_at(mu, p, local[i].x, local[i].r, q); });
    bool improved = false;
    for (std::size_t i = 0; i < local.size(); ++i) {
      if (lv[i] > best) {
        best = lv[i];
        bx = local[i].x;
        br = local[i].r;
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

WitnessResult radial_witness(const RadialProfile& profile, const Params& p, const Vec& w,
                             const QuadratureSpec& q, double c_test) {
  q.validate();
  const double r = w.norm();
  const int d = p.d;
  MassProfile mp = radial_mass_profile(profile, d, q);
  if (mp.total <= 0.0) throw NoWitnessError("radial_witness: zero or signed total mass");
  const bool off_support = r < profile.t0 || r > profile.t1;
  if (!off_support && profile(r) != 0.0)
    throw NoWitnessError("radial_witness: query point lies on the support");

  const double tol_mass = 1e-8 * mp.total;
  const double mr = mp.m(r);

  double near_term = r > 0.0 ? mr / std::pow(r, p.s) : 0.0;
  double tail_term = 0.0;
  if (r < profile.t1) {
    auto f = [&](double t) { return mp.dm(t) * std::pow(t, -(p.s + 1.0)); };
    std::vector<double> breaks = {std::max(r, profile.t0), profile.t1};
    tail_term = r * integrate_1d_adaptive(f, breaks, q).value;
  }

  WitnessResult res;
  res.branch = near_term >= tail_term ? WitnessBranch::inner : WitnessBranch::outer;

  double lo, hi;
  if (res.branch == WitnessBranch::inner) {
    // Smallest t with m(t) = m(r): left edge of the mass plateau below r.
    lo = profile.t0;
    hi = std::min(r, profile.t1);
    if (mp.m(lo) >= mr - tol_mass) {
      res.r_star = lo;
    } else {
      for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
        double mid = 0.5 * (lo + hi);
        (mp.m(mid) >= mr - tol_mass ? hi : lo) = mid;
      }
      res.r_star = hi;
    }
  } else {
    // Largest t with m(t) = m(r): right edge of the plateau above r.
    lo = std::max(r, profile.t0);
    hi = profile.t1;
    if (mp.m(hi) <= mr + tol_mass) throw NoWitnessError("radial_witness: no mass beyond the query radius");
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
      double mid = 0.5 * (lo + hi);
      (mp.m(mid) <= mr + tol_mass ? lo : hi) = mid;
    }
    res.r_star = lo;
  }

  res.mass_mismatch = std::abs(mp.m(res.r_star) - mr);
  if (res.r_star < profile.t0 - 1e-12 || res.r_star > profile.t1 + 1e-12 ||
      res.mass_mismatch > 2.0 * tol_mass)
    throw NoWitnessError("radial_witness: bisection left the support or missed the mass match");

  res.witness = Vec::zero(d);
  res.witness[0] = res.r_star;
  double at_w = r > 0.0 ? std::abs(riesz_radial_component(profile, r, p, q).value) : 0.0;
  double at_star = std::abs(riesz_radial_component(profile, res.r_star, p, q).value);
  res.realized_ratio = at_star > 0.0 ? at_w / at_star : std::numeric_limits<double>::infinity();
  res.bound_holds = res.realized_ratio <= c_test;
  return res;
}

MPReport max_principle_report(const Measure& mu, const Params& p, const SupSearchSpec& spec,
                              const QuadratureSpec& q, int component,
                              std::vector<std::pair<Vec, double>>* scanned) {
  MPReport rep;
  SupResult sup = sup_norm(mu, p, spec, SupDomain::support, q, component, scanned);
  SupResult glob = sup_norm(mu, p, spec, SupDomain::global, q, component, scanned);
  if (sup.value > glob.value) glob = sup;  // global search includes support samples
  rep.sup_support = sup.value;
  rep.sup_global = glob.value;
  rep.argmax_support = sup.argmax;
  rep.argmax_global = glob.argmax;
  rep.ratio = sup.value > q.abs_tol ? glob.value / sup.value : std::numeric_limits<double>::quiet_NaN();
  rep.theta = mu.sign_allowed() ? std::numeric_limits<double>::quiet_NaN() : theta_sup(mu, p, spec, q);
  return rep;
}

}  // namespace rieszlab
