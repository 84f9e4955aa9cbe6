// riesz_lab: numerical experiments on Riesz transforms of compactly supported
// measures. Subcommands cover pointwise evaluation, sphere-flux identities,
// sup-norm searches, and the two counterexample constructions.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rieszlab/builtins.hpp"
#include "rieszlab/constructions.hpp"
#include "rieszlab/flux.hpp"
#include "rieszlab/max_principle.hpp"
#include "rieszlab/measure.hpp"
#include "rieszlab/report.hpp"
#include "rieszlab/riesz.hpp"

namespace rl = rieszlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitTolerance = 2;
constexpr int kExitRegime = 3;
constexpr int kExitVerdict = 4;

struct Options {
  std::string config;
  std::string out;
  std::string csv;
  int d = 3;
  double s = 0.5;
  double tol = 1e-8;
  double abs_tol = 1e-12;
  int max_subdiv = 4000;
  int sphere_order = 0;
  double split_factor = 0.5;
  std::string measure = "builtin:ball_bump";
  std::string point;
  std::string ball;
  std::string op = "riesz";
  double power = 1.0;
  std::vector<double> deltas;
  double moll_delta = 0.0;
  double target_ratio = 0.0;
  double grid_spacing = 0.0;
  int refine_rounds = 3;
  int samples = 600;
  int component = -1;
  double eps = 0.0;  // truncation radius for eval --op truncated
};

const std::set<std::string> kConfigKeys = {
    "out",          "csv",       "d",           "s",          "tol",       "abs-tol",
    "max-subdiv",   "sphere-order", "split-factor", "measure", "point",    "ball",
    "op",           "power",     "delta",       "moll-delta", "M",         "grid-spacing",
    "refine-rounds", "samples",  "component",   "eps"};

std::vector<double> parse_csv_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument("trailing characters in number: " + tok);
    out.push_back(v);
  }
  return out;
}

rl::QuadratureSpec quad_spec(const Options& o) {
  rl::QuadratureSpec q;
  q.rel_tol = o.tol;
  q.abs_tol = o.abs_tol;
  q.max_subdivisions = o.max_subdiv;
  q.sphere_order = o.sphere_order;
  q.split_radius_factor = o.split_factor;
  q.validate();
  return q;
}

rl::Measure resolve_measure(const Options& o, std::optional<double> delta_override = std::nullopt) {
  const std::string& m = o.measure;
  if (m.rfind("builtin:", 0) == 0) {
    rl::BuiltinRequest req;
    req.name = m.substr(8);
    req.d = o.d;
    req.s = o.s;
    req.q = quad_spec(o);
    if (delta_override)
      req.delta = delta_override;
    else if (!o.deltas.empty())
      req.delta = o.deltas.front();
    return rl::make_builtin(req);
  }
  rl::LatticeDensity lat = rl::LatticeDensity::load(m);
  bool signed_values = false;
  for (double v : lat.values())
    if (v < 0.0) signed_values = true;
  if (lat.dim() != o.d)
    throw rl::SpecError("lattice file dimension " + std::to_string(lat.dim()) +
                        " does not match --d " + std::to_string(o.d));
  return rl::Measure(lat.dim(), lat, signed_values);
}

void echo_params(rl::ExperimentReport& rep, const Options& o) {
  auto& pj = rep.params();
  pj["d"] = o.d;
  pj["s"] = o.s;
  pj["measure"] = o.measure;
  pj["rel_tol"] = o.tol;
  pj["abs_tol"] = o.abs_tol;
  pj["max_subdivisions"] = o.max_subdiv;
  pj["sphere_order"] = o.sphere_order;
  pj["split_radius_factor"] = o.split_factor;
}

void emit(const rl::json& j, const Options& o) {
  std::string text = j.dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << text;
  } else {
    rl::write_file_atomic(o.out, text);
    std::cout << "wrote " << o.out << "\n";
  }
}

int cmd_eval(const Options& o) {
  rl::WallTimer timer;
  rl::QuadratureSpec q = quad_spec(o);
  rl::Params params(o.d, o.s);
  rl::Measure mu = resolve_measure(o);
  std::vector<double> pt = parse_csv_doubles(o.point);
  if (int(pt.size()) != o.d) throw std::invalid_argument("--point needs exactly d coordinates");
  rl::Vec x = rl::Vec::from(pt);

  rl::ExperimentReport rep("eval_" + o.op);
  echo_params(rep, o);
  rep.params()["point"] = pt;
  rep.params()["op"] = o.op;

  if (o.op == "riesz" || o.op == "truncated") {
    rl::RieszValue rv = o.op == "riesz" ? rl::riesz_vector(mu, x, params, q)
                                        : rl::riesz_truncated(mu, x, o.eps, params, q);
    if (o.op == "truncated") rep.params()["eps"] = o.eps;
    for (int i = 0; i < o.d; ++i)
      rep.set_output("R_" + std::to_string(i + 1), rv.vector[i], rv.error_estimate);
    rep.set_output("magnitude", rv.magnitude(), rv.error_estimate);
    rep.params()["method"] = rl::to_string(rv.method);
  } else if (o.op == "radial-component") {
    const auto* prof = mu.radial();
    if (!prof) throw rl::SpecError("--op radial-component requires a radial measure");
    rl::Result1D r = rl::riesz_radial_component(*prof, x.norm(), params, q);
    rep.set_output("radial_component", r.value, r.error_estimate);
  } else if (o.op == "potential") {
    rl::Result1D r = rl::potential(mu, x, o.power, q);
    rep.params()["power"] = o.power;
    rep.set_output("potential", r.value, r.error_estimate);
  } else {
    throw std::invalid_argument("unknown --op " + o.op);
  }
  rep.set_wall_time_ms(timer.elapsed_ms());
  emit(rep.to_json(), o);
  return kExitOk;
}

int cmd_flux(const Options& o) {
  rl::WallTimer timer;
  rl::QuadratureSpec q = quad_spec(o);
  rl::Params params(o.d, o.s);
  rl::Measure mu = resolve_measure(o);
  std::vector<double> b = parse_csv_doubles(o.ball);
  if (int(b.size()) != o.d + 1) throw std::invalid_argument("--ball needs d coordinates plus a radius");
  rl::Ball ball(rl::Vec::from(std::span(b.data(), std::size_t(o.d))), b.back());

  rl::FluxReport fr = rl::flux_report(mu, ball, params, q);
  rl::ExperimentReport rep("flux");
  echo_params(rep, o);
  rep.params()["ball"] = b;
  rep.set_output("surface_value", fr.surface_value, q.rel_tol * std::abs(fr.surface_value));
  rep.set_output("divergence_value", fr.divergence_value, q.rel_tol * std::abs(fr.divergence_value));
  rep.set_output("rhs_value", fr.rhs_value, q.rel_tol * std::abs(fr.rhs_value));
  rep.set_output_heuristic("ratio_surface_divergence", fr.ratio_surface_divergence);
  rep.set_output_heuristic("ratio_abs_surface_rhs", fr.ratio_abs_surface_rhs);
  rep.set_wall_time_ms(timer.elapsed_ms());
  emit(rep.to_json(), o);
  return kExitOk;
}

rl::SupSearchSpec search_spec(const Options& o) {
  rl::SupSearchSpec s;
  s.grid_spacing = o.grid_spacing;
  s.refine_rounds = o.refine_rounds;
  s.support_samples = o.samples;
  return s;
}

int cmd_maxprin(const Options& o) {
  rl::WallTimer timer;
  rl::QuadratureSpec q = quad_spec(o);
  rl::Params params(o.d, o.s);
  rl::Measure mu = resolve_measure(o);

  std::vector<std::pair<rl::Vec, double>> scanned;
  rl::MPReport mp = rl::max_principle_report(mu, params, search_spec(o), q, o.component,
                                             o.csv.empty() ? nullptr : &scanned);

  rl::ExperimentReport rep("maxprin");
  echo_params(rep, o);
  rep.params()["component"] = o.component;
  rep.set_output_heuristic("sup_support", mp.sup_support);
  rep.set_output_heuristic("sup_global", mp.sup_global);
  rep.set_output_heuristic("ratio", mp.ratio);
  rep.set_output_heuristic("theta_sup", mp.theta);
  for (int i = 0; i < o.d; ++i) {
    rep.set_output_heuristic("argmax_support_" + std::to_string(i + 1), mp.argmax_support[i]);
    rep.set_output_heuristic("argmax_global_" + std::to_string(i + 1), mp.argmax_global[i]);
  }
  rep.set_wall_time_ms(timer.elapsed_ms());

  if (!o.csv.empty()) {
    std::vector<std::string> header;
    for (int i = 0; i < o.d; ++i) header.push_back("x" + std::to_string(i + 1));
    header.push_back("value");
    std::vector<std::vector<double>> rows;
    for (const auto& [x, v] : scanned) {
      std::vector<double> row;
      for (int i = 0; i < o.d; ++i) row.push_back(x[i]);
      row.push_back(v);
      rows.push_back(row);
    }
    rl::write_csv(o.csv, header, rows);
  }
  emit(rep.to_json(), o);
  return kExitOk;
}

int cmd_prop21(const Options& o) {
  rl::WallTimer timer;
  rl::QuadratureSpec q = quad_spec(o);
  rl::Params params(o.d, o.s);
  std::vector<double> deltas = o.deltas.empty() ? std::vector<double>{0.2, 0.1, 0.05, 0.02} : o.deltas;

  rl::json experiments = rl::json::array();
  std::vector<double> ratios;
  auto run_delta = [&](double delta) {
    rl::SlabMeasureSpec spec;
    spec.d = o.d;
    spec.s = o.s;
    spec.delta = delta;
    rl::Measure mu = rl::prop21_measure(spec, q);
    rl::MPReport mp = rl::max_principle_report(mu, params, search_spec(o), q, 0);
    rl::ExperimentReport rep("prop21");
    echo_params(rep, o);
    rep.params()["delta"] = delta;
    rep.set_output_heuristic("sup_support_R1", mp.sup_support);
    rep.set_output_heuristic("sup_global_R1", mp.sup_global);
    rep.set_output_heuristic("ratio", mp.ratio);
    rep.set_output_heuristic("theta_sup", mp.theta);
    for (int i = 0; i < o.d; ++i)
      rep.set_output_heuristic("argmax_global_" + std::to_string(i + 1), mp.argmax_global[i]);
    experiments.push_back(rep.to_json());
    ratios.push_back(mp.ratio);
    return mp.ratio;
  };

  for (double delta : deltas) run_delta(delta);

  bool monotone = true;
  for (std::size_t i = 1; i < ratios.size(); ++i)
    if (ratios[i] <= ratios[i - 1]) monotone = false;

  bool achieved = o.target_ratio <= 0.0;
  double delta_hit = 0.0;
  if (o.target_ratio > 0.0) {
    for (std::size_t i = 0; i < ratios.size(); ++i)
      if (ratios[i] > o.target_ratio) {
        achieved = true;
        delta_hit = deltas[i];
        break;
      }
    double delta = deltas.back() / 2.0;
    while (!achieved && delta >= 0.004) {
      double ratio = run_delta(delta);
      deltas.push_back(delta);
      if (ratio > o.target_ratio) {
        achieved = true;
        delta_hit = delta;
      }
      delta /= 2.0;
    }
  }

  rl::json summary;
  summary["deltas"] = deltas;
  summary["ratios"] = ratios;
  summary["monotone_increasing"] = monotone;
  if (o.target_ratio > 0.0) {
    summary["target_ratio"] = o.target_ratio;
    summary["achieved"] = achieved;
    if (achieved) summary["delta_achieving_target"] = delta_hit;
  }
  summary["wall_time_ms"] = timer.elapsed_ms();

  rl::json out;
  out["experiments"] = experiments;
  out["summary"] = summary;
  emit(out, o);

  if (!o.csv.empty()) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < ratios.size(); ++i) rows.push_back({deltas[i], ratios[i]});
    rl::write_csv(o.csv, {"delta", "ratio"}, rows);
  }
  if (!monotone || !achieved) return kExitVerdict;
  return kExitOk;
}

int cmd_counterexample(const Options& o) {
  rl::WallTimer timer;
  rl::QuadratureSpec q = quad_spec(o);
  std::vector<double> epsilons = o.deltas.empty() ? std::vector<double>{0.2, 0.1, 0.05} : o.deltas;

  rl::json experiments = rl::json::array();
  std::vector<double> sups, ratios;
  for (double eps : epsilons) {
    rl::Counterexample5Spec spec;
    spec.epsilon = eps;
    spec.delta = o.moll_delta;
    spec.eval_tolerance = q;
    rl::ExperimentReport rep = rl::counterexample_report(spec, q);
    sups.push_back(rep.output("sup_support"));
    ratios.push_back(rep.output("support_to_far_ratio"));
    experiments.push_back(rep.to_json());
  }

  bool decreasing = true;
  for (std::size_t i = 1; i < sups.size(); ++i)
    if (sups[i] >= sups[i - 1]) decreasing = false;

  rl::json summary;
  summary["epsilons"] = epsilons;
  summary["sup_support"] = sups;
  summary["support_to_far_ratio"] = ratios;
  summary["sup_support_decreasing"] = decreasing;
  summary["wall_time_ms"] = timer.elapsed_ms();

  rl::json out;
  out["experiments"] = experiments;
  out["summary"] = summary;
  emit(out, o);

  if (!o.csv.empty()) {
    // Radial profile table for plotting.
    rl::Counterexample5Spec spec;
    spec.epsilon = epsilons.back();
    spec.delta = o.moll_delta;
    spec.eval_tolerance = q;
    rl::Counterexample5 ce(spec);
    rl::SourceProfile src = rl::u5_profile();
    std::vector<std::vector<double>> rows;
    for (int i = 0; i <= 400; ++i) {
      double r = 0.25 + (3.0 - 0.25) * i / 400.0;
      rows.push_back({r, src.u(r), ce.U(r), ce.grad_U(r), ce.nu_density(r)});
    }
    rl::write_csv(o.csv, {"r", "u", "U", "grad_U", "nu_density"}, rows);
  }
  if (!decreasing && sups.size() > 1) return kExitVerdict;
  return kExitOk;
}

int cmd_remark(const Options& o) {
  rl::QuadratureSpec q = quad_spec(o);
  rl::Counterexample5Spec spec;
  if (!o.deltas.empty()) spec.epsilon = o.deltas.front();
  spec.delta = o.moll_delta;
  spec.eval_tolerance = q;
  rl::ExperimentReport rep = rl::remark_report(spec, q);
  emit(rep.to_json(), o);
  return kExitOk;
}

void apply_config(Options& o, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  nlohmann::json j;
  in >> j;
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kConfigKeys.count(key)) throw std::invalid_argument("unknown config key: " + key);
    if (key == "out") o.out = value.get<std::string>();
    else if (key == "csv") o.csv = value.get<std::string>();
    else if (key == "d") o.d = value.get<int>();
    else if (key == "s") o.s = value.get<double>();
    else if (key == "tol") o.tol = value.get<double>();
    else if (key == "abs-tol") o.abs_tol = value.get<double>();
    else if (key == "max-subdiv") o.max_subdiv = value.get<int>();
    else if (key == "sphere-order") o.sphere_order = value.get<int>();
    else if (key == "split-factor") o.split_factor = value.get<double>();
    else if (key == "measure") o.measure = value.get<std::string>();
    else if (key == "point") o.point = value.get<std::string>();
    else if (key == "ball") o.ball = value.get<std::string>();
    else if (key == "op") o.op = value.get<std::string>();
    else if (key == "power") o.power = value.get<double>();
    else if (key == "delta") o.deltas = value.is_array() ? value.get<std::vector<double>>()
                                                         : std::vector<double>{value.get<double>()};
    else if (key == "moll-delta") o.moll_delta = value.get<double>();
    else if (key == "M") o.target_ratio = value.get<double>();
    else if (key == "grid-spacing") o.grid_spacing = value.get<double>();
    else if (key == "refine-rounds") o.refine_rounds = value.get<int>();
    else if (key == "samples") o.samples = value.get<int>();
    else if (key == "component") o.component = value.get<int>();
    else if (key == "eps") o.eps = value.get<double>();
  }
}

}  // namespace

int main(int argc, char** argv) {
  Options o;

  // The config file provides defaults; explicit flags override it.
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) o.config = argv[i + 1];
    else if (a.rfind("--config=", 0) == 0) o.config = a.substr(9);
  }
  try {
    if (!o.config.empty()) apply_config(o, o.config);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  }

  CLI::App app{"riesz_lab: a numerical laboratory for Riesz transforms of compactly supported measures"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", o.config, "JSON config file (flags override)");
    cmd->add_option("--out", o.out, "write the report JSON here (atomic)");
    cmd->add_option("--d", o.d, "ambient dimension");
    cmd->add_option("--s", o.s, "kernel exponent, 0 < s < d");
    cmd->add_option("--tol", o.tol, "relative quadrature tolerance");
    cmd->add_option("--abs-tol", o.abs_tol, "absolute quadrature tolerance");
    cmd->add_option("--max-subdiv", o.max_subdiv, "adaptive subdivision budget");
    cmd->add_option("--sphere-order", o.sphere_order, "points per angular factor (0 = auto)");
    cmd->add_option("--split-factor", o.split_factor, "singular-split radius factor");
    cmd->add_option("--measure", o.measure, "builtin:NAME or a lattice .csv/.json file");
  };

  CLI::App* eval = app.add_subcommand("eval", "evaluate the transform or a potential at a point");
  add_common(eval);
  eval->add_option("--point", o.point, "comma-separated coordinates")->required();
  eval->add_option("--op", o.op, "riesz | truncated | radial-component | potential");
  eval->add_option("--power", o.power, "kernel power for --op potential");
  eval->add_option("--eps", o.eps, "truncation radius for --op truncated");
  eval->add_option("--delta", o.deltas, "parameter for builtin:prop21 / builtin:counterexample5");

  CLI::App* flux = app.add_subcommand("flux", "three-route sphere flux report");
  add_common(flux);
  flux->add_option("--ball", o.ball, "center coordinates and radius, comma-separated")->required();
  flux->add_option("--delta", o.deltas, "parameter for builtin measures");

  CLI::App* maxprin = app.add_subcommand("maxprin", "sup-norm search on and off the support");
  add_common(maxprin);
  maxprin->add_option("--grid-spacing", o.grid_spacing, "coarse grid spacing (0 = auto)");
  maxprin->add_option("--refine-rounds", o.refine_rounds, "local refinement rounds");
  maxprin->add_option("--samples", o.samples, "grid budget per pass");
  maxprin->add_option("--component", o.component, "restrict to one kernel component (-1 = norm)");
  maxprin->add_option("--csv", o.csv, "dump scanned grid values");
  maxprin->add_option("--delta", o.deltas, "parameter for builtin measures");

  CLI::App* prop21 = app.add_subcommand("prop21", "slab-measure component-ratio sweep");
  add_common(prop21);
  prop21->add_option("--delta", o.deltas, "slab thicknesses to sweep (repeatable)");
  prop21->add_option("--M", o.target_ratio, "search downward in delta until the ratio exceeds M");
  prop21->add_option("--grid-spacing", o.grid_spacing, "coarse grid spacing (0 = auto)");
  prop21->add_option("--refine-rounds", o.refine_rounds, "local refinement rounds");
  prop21->add_option("--samples", o.samples, "grid budget per pass");
  prop21->add_option("--csv", o.csv, "write delta,ratio rows");

  CLI::App* cex = app.add_subcommand("counterexample", "signed radial construction sweep (d = 5, s = 2)");
  add_common(cex);
  cex->add_option("--delta", o.deltas, "annulus half-thicknesses to sweep (repeatable)");
  cex->add_option("--moll-delta", o.moll_delta, "mollification radius (0 = epsilon/8)");
  cex->add_option("--csv", o.csv, "write the radial profile table");

  CLI::App* remark = app.add_subcommand("remark", "Newtonian-potential variant of the counterexample");
  add_common(remark);
  remark->add_option("--delta", o.deltas, "annulus half-thickness");
  remark->add_option("--moll-delta", o.moll_delta, "mollification radius (0 = epsilon/8)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (eval->parsed()) return cmd_eval(o);
    if (flux->parsed()) return cmd_flux(o);
    if (maxprin->parsed()) return cmd_maxprin(o);
    if (prop21->parsed()) return cmd_prop21(o);
    if (cex->parsed()) return cmd_counterexample(o);
    if (remark->parsed()) return cmd_remark(o);
  } catch (const rl::RegimeError& e) {
    std::cerr << "regime violation: " << e.what() << "\n";
    return kExitRegime;
  } catch (const rl::ToleranceError& e) {
    std::cerr << "tolerance not met: " << e.what() << "\n";
    return kExitTolerance;
  } catch (const rl::RouteDisagreementError& e) {
    std::cerr << "route disagreement: " << e.what() << "\n";
    return kExitTolerance;
  } catch (const rl::InvalidPowerError& e) {
    std::cerr << "invalid power: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitTolerance;
  }
  return kExitUsage;
}
