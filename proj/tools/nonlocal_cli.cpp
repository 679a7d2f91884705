// Batch front end: parses experiment configs, dispatches to the library
// modules, and persists canonical JSON / CSV results.
//
// Exit codes: 0 ok, 1 parse error, 2 validation error, 3 numerical failure,
// 4 property violation detected.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include "nonlocal/barrier.hpp"
#include "nonlocal/calibration.hpp"
#include "nonlocal/degiorgi.hpp"
#include "nonlocal/io.hpp"
#include "nonlocal/levy.hpp"
#include "nonlocal/max_principle.hpp"

using namespace nonlocal;
using nlohmann::json;

namespace {

struct PropertyViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  std::string out = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  double h = 0.0;
  bool quiet = false;
};

Point parse_point(const json& j, int dim) {
  Point p;
  p.dim = dim;
  if (j.is_number()) {
    p[0] = j.get<double>();
    return p;
  }
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    throw std::invalid_argument("config: point must be a scalar or an array of length n");
  for (int a = 0; a < dim; ++a) p[a] = j[static_cast<std::size_t>(a)].get<double>();
  return p;
}

DomainSpec parse_domain(const json& jd, int dim) {
  const std::string kind = jd.value("kind", "ball");
  if (kind == "ball") return ball(parse_point(jd.value("center", json(0.0)), dim), jd.at("radius").get<double>());
  if (kind == "box") return box(parse_point(jd.at("lo"), dim), parse_point(jd.at("hi"), dim));
  if (kind == "full_space") return full_space(dim);
  if (kind == "annulus") {
    const Point c = parse_point(jd.value("center", json(0.0)), dim);
    return difference_of(ball(c, jd.at("radius").get<double>()), ball(c, jd.at("inner_radius").get<double>()));
  }
  throw std::invalid_argument("config: unknown domain kind '" + kind + "'");
}

InteractionSet parse_preset(const json& cfg, const DomainSpec& omega) {
  const std::string preset = cfg.value("preset", "dirichlet");
  if (preset == "dirichlet") return InteractionSet::dirichlet(omega);
  if (preset == "restricted") return InteractionSet::restricted(omega);
  if (preset == "semirestricted") return InteractionSet::semirestricted(omega);
  throw std::invalid_argument("config: unknown preset '" + preset + "'");
}

FracParams parse_params(const json& cfg) {
  const json jp = cfg.value("params", json::object());
  return FracParams(jp.value("n", 1), jp.value("s", 0.5));
}

Lattice make_lattice(const json& cfg, const Options& opt, int dim) {
  const double h = opt.h > 0.0 ? opt.h : cfg.value("h", 1.0 / 32);
  const double half = cfg.value("box", 6.0);
  Point lo, hi;
  lo.dim = hi.dim = dim;
  for (int a = 0; a < dim; ++a) {
    lo[a] = -half;
    hi[a] = half;
  }
  const DomainSpec tb = box(lo, hi);
  return build_grid(full_space(dim), h, 0.0, &tb);
}

GridFunction make_function(const json& jf, const Lattice& lat) {
  const std::string kind = jf.value("kind", "gaussian");
  const double amp = jf.value("amplitude", 1.0);
  if (kind == "gaussian") {
    const Point c = parse_point(jf.value("center", json(0.0)), lat.dim);
    return sample(lat, [=](const Point& x) {
      const double d = dist(x, c);
      return amp * std::exp(-d * d);
    });
  }
  if (kind == "bump") {
    const Point c = parse_point(jf.value("center", json(0.0)), lat.dim);
    const double w = jf.value("width", 0.5);
    return sample(lat, [=](const Point& x) { return amp * mollifier(x, c, w); });
  }
  if (kind == "cosine") {
    const double k = jf.value("freq", 1.0);
    const double w = jf.value("width", 4.0);
    const Point origin = parse_point(json(0.0), lat.dim);
    return sample(lat, [=](const Point& x) { return amp * std::cos(k * x[0]) * mollifier(x, origin, w); });
  }
  if (kind == "constant") {
    return sample(lat, [=](const Point&) { return amp; }, FarField::constant(amp));
  }
  if (kind == "indicator") {
    const DomainSpec d = parse_domain(jf.at("domain"), lat.dim);
    return sample(lat, [&](const Point& x) { return contains(d, x) ? amp : 0.0; });
  }
  throw std::invalid_argument("config: unknown function kind '" + kind + "'");
}

std::string out_path(const Options& opt, const std::string& name) {
  std::filesystem::create_directories(opt.out);
  return (std::filesystem::path(opt.out) / name).string();
}

void finish(const Options& opt, const std::string& cmd, const json& j) {
  emit_golden(j, out_path(opt, cmd + ".json"));
  if (!opt.quiet) std::cout << canonical_dump(j);
}

// ---------------------------------------------------------------------------

int cmd_eval_op(const json& cfg, const Options& opt) {
  const FracParams p = parse_params(cfg);
  const DomainSpec omega = parse_domain(cfg.at("domain"), p.n);
  const InteractionSet z = parse_preset(cfg, omega);
  auto lat = make_lattice(cfg, opt, p.n);
  auto u = make_function(cfg.value("function", json::object()), lat);
  std::vector<double> val(lat.size(), 0.0), err(lat.size(), 0.0);
  double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
  for (std::size_t f = 0; f < lat.size(); ++f) {
    const Point x = lat.point(f);
    if (!contains(omega, x)) continue;
    const FormValue v = general_pointwise(u, x, z, p);
    val[f] = v.value;
    err[f] = v.error_estimate;
    vmin = std::min(vmin, v.value);
    vmax = std::max(vmax, v.value);
  }
  std::ofstream csv(out_path(opt, "eval-op.csv"));
  write_csv(csv, lat, val, err);
  json j;
  j["command"] = "eval-op";
  j["min_value"] = vmin;
  j["max_value"] = vmax;
  j["nodes"] = static_cast<long long>(lat.size());
  finish(opt, "eval-op", j);
  return 0;
}

int cmd_energy(const json& cfg, const Options& opt) {
  const FracParams p = parse_params(cfg);
  const DomainSpec omega = parse_domain(cfg.at("domain"), p.n);
  const InteractionSet z = parse_preset(cfg, omega);
  auto lat = make_lattice(cfg, opt, p.n);
  auto u = make_function(cfg.value("function", json::object()), lat);
  const FormValue e = energy_total(u, z, p);
  json j;
  j["command"] = "energy";
  j["value"] = e.value;
  j["error_estimate"] = e.error_estimate;
  finish(opt, "energy", j);
  return 0;
}

int cmd_tail(const json& cfg, const Options& opt) {
  const FracParams p = parse_params(cfg);
  const DomainSpec omega = parse_domain(cfg.at("domain"), p.n);
  const InteractionSet z = parse_preset(cfg, omega);
  auto lat = make_lattice(cfg, opt, p.n);
  auto u = make_function(cfg.value("function", json::object()), lat);
  const Point x0 = parse_point(cfg.value("x0", json(0.0)), p.n);
  const double r = cfg.value("r", 1.0);
  json j;
  j["command"] = "tail";
  j["value"] = relative_tail(u, x0, r, z, p);
  j["r"] = r;
  finish(opt, "tail", j);
  return 0;
}

int cmd_killing_measure(const json& cfg, const Options& opt) {
  const FracParams p = parse_params(cfg);
  const DomainSpec g = parse_domain(cfg.at("domain"), p.n);
  const InteractionSet z = parse_preset(cfg, g);
  auto lat = make_lattice(cfg, opt, p.n);
  std::vector<double> val(lat.size(), 0.0), err(lat.size(), 0.0);
  double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
  const Lattice coarse = detail::coarsen(lat);
  for (std::size_t f = 0; f < lat.size(); ++f) {
    const Point x = lat.point(f);
    if (!contains(g, x)) continue;
    val[f] = killing_measure(x, g, z, p, lat);
    err[f] = std::abs(val[f] - killing_measure(x, g, z, p, coarse));
    vmin = std::min(vmin, val[f]);
    vmax = std::max(vmax, val[f]);
  }
  std::ofstream csv(out_path(opt, "killing-measure.csv"));
  write_csv(csv, lat, val, err);
  json j;
  j["command"] = "killing-measure";
  j["min_value"] = vmin;
  j["max_value"] = vmax;
  finish(opt, "killing-measure", j);
  return 0;
}

int cmd_decomposition_check(const json& cfg, const Options& opt) {
  const FracParams p = parse_params(cfg);
  const DomainSpec g = parse_domain(cfg.at("domain"), p.n);
  const InteractionSet z = parse_preset(cfg, g);
  auto lat = make_lattice(cfg, opt, p.n);
  auto u = make_function(cfg.value("function", json::object()), lat);
  const auto chk = energy_decomposition_check(u, g, z, p);
  json j;
  j["command"] = "decomposition-check";
  j["residual"] = chk.residual;
  j["error_budget"] = chk.error_budget;
  j["energy_z"] = chk.energy_z;
  j["energy_gg"] = chk.energy_gg;
  j["killing_term"] = chk.killing_term;
  finish(opt, "decomposition-check", j);
  if (std::abs(chk.residual) > 5.0 * chk.error_budget + 1e-14)
    throw PropertyViolation("decomposition residual exceeds 5x its error budget");
  return 0;
}

int cmd_caccioppoli_sweep(const json& cfg, const Options& opt) {
  const FracParams p = parse_params(cfg);
  const DomainSpec g = parse_domain(cfg.at("domain"), p.n);
  auto lat = make_lattice(cfg, opt, p.n);
  const int count = cfg.value("count", 10);
  std::mt19937_64 rng(opt.seed_set ? opt.seed : cfg.value("seed", 17));
  std::normal_distribution<double> nrm(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.3, 0.9);
  // keep the random cut-offs strictly inside the domain
  Point glo, ghi;
  bounding_box(g, glo, ghi);
  Point gc;
  gc.dim = p.n;
  for (int a = 0; a < p.n; ++a) gc[a] = 0.5 * (glo[a] + ghi[a]);
  const double rin = signed_distance(g, gc);
  if (!(rin > 0.0)) throw std::invalid_argument("caccioppoli-sweep: domain center must be interior");
  int violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& z : {InteractionSet::dirichlet(g), InteractionSet::restricted(g),
                        InteractionSet::semirestricted(g)}) {
    for (int rep = 0; rep < count; ++rep) {
      const double a = nrm(rng), b = nrm(rng), c = nrm(rng);
      auto w = sample(lat, [&](const Point& x) { return a * std::cos(2.0 * x[0]) + b * std::sin(x[0]) + 0.3 * c; });
      const double wc = 0.3 * rin * unif(rng), ww = 0.55 * rin * unif(rng);
      Point pc = gc;
      pc[0] += wc;
      auto phi = sample(lat, [&](const Point& x) { return mollifier(x, pc, ww); });
      const auto t = caccioppoli_terms(w, phi, g, z, p);
      const double slack = t.gap + t.error_budget;
      worst = std::min(worst, slack);
      if (slack < -1e-10) ++violations;
    }
  }
  json j;
  j["command"] = "caccioppoli-sweep";
  j["cases"] = 3 * count;
  j["violations"] = violations;
  j["worst_slack"] = worst;
  finish(opt, "caccioppoli-sweep", j);
  if (violations > 0) throw PropertyViolation("caccioppoli gap fell below the error budget");
  return 0;
}

int cmd_degiorgi(const json& cfg, const Options& opt) {
  const FracParams p = parse_params(cfg);
  const DomainSpec omega = parse_domain(cfg.at("domain"), p.n);
  const InteractionSet z = parse_preset(cfg, omega);
  auto lat = make_lattice(cfg, opt, p.n);
  auto u = make_function(cfg.value("function", json::object()), lat);
  const Point x0 = parse_point(cfg.value("x0", json(0.0)), p.n);
  const double r = cfg.value("r", 1.0);
  double c_hat;
  if (cfg.contains("constants")) {
    const auto c = load_constants(cfg.at("constants").get<std::string>());
    if (c.n != p.n || std::abs(c.s - p.s) > 1e-12)
      throw std::invalid_argument("degiorgi: constants file does not match (n, s)");
    c_hat = c.c_hat;
  } else {
    c_hat = cfg.value("c_hat", 1.0);
  }
  const auto tr = degiorgi_bound(u, x0, r, z, p, c_hat, cfg.value("jmax", 12));
  json j;
  j["command"] = "degiorgi";
  j["c_hat"] = tr.c_hat;
  j["tilde_k"] = tr.tilde_k;
  j["tail"] = tr.tail;
  j["bound"] = tr.bound;
  j["sup_br"] = tr.sup_br;
  j["sup_ok"] = tr.sup_ok;
  j["alpha"] = tr.alpha;
  j["radii"] = tr.radii;
  j["radii_mid"] = tr.radii_mid;
  j["levels"] = tr.levels;
  j["levels_mid"] = tr.levels_mid;
  j["induction_ok"] = json::array();
  bool all_ok = tr.sup_ok;
  for (bool ok : tr.induction_ok) {
    j["induction_ok"].push_back(ok);
    all_ok = all_ok && ok;
  }
  finish(opt, "degiorgi", j);
  if (!all_ok) throw PropertyViolation("degiorgi ladder check failed");
  return 0;
}

int cmd_barrier(const json& cfg, const Options& opt) {
  const FracParams p = parse_params(cfg);
  const Point x0 = parse_point(cfg.value("x0", json(0.0)), p.n);
  const double r = cfg.value("r", 0.25), R = cfg.value("R", 1.0);
  const int cells = cfg.value("cells", 48);
  auto phi = build_barrier(x0, r, R, p, QuadratureScheme{}, cells);
  const DomainSpec omega = cfg.contains("domain") ? parse_domain(cfg.at("domain"), p.n) : ball(x0, 2.0 * R);
  const auto rep = verify_barrier(phi, x0, r, R, parse_preset(cfg, omega), p);
  std::vector<double> err(phi.lat.size(), 0.0);
  std::ofstream csv(out_path(opt, "barrier.csv"));
  write_csv(csv, phi.lat, phi.v, err);
  json j;
  j["command"] = "barrier";
  j["r"] = rep.r;
  j["R"] = rep.R;
  j["fitted_c"] = rep.fitted_c;
  j["boundary_slope"] = rep.boundary_slope;
  j["max_operator_value"] = rep.max_operator_value;
  j["max_operator_error"] = rep.max_operator_error;
  j["data_ok"] = rep.data_ok;
  finish(opt, "barrier", j);
  if (!rep.data_ok) throw PropertyViolation("barrier data conditions failed");
  return 0;
}

int cmd_verify_mp(const json& cfg, const Options& opt) {
  const FracParams p = parse_params(cfg);
  const DomainSpec omega = parse_domain(cfg.at("domain"), p.n);
  const InteractionSet z = parse_preset(cfg, omega);
  auto lat = make_lattice(cfg, opt, p.n);
  auto u = make_function(cfg.value("function", json::object()), lat);
  const DomainSpec K = cfg.contains("compact_k") ? parse_domain(cfg.at("compact_k"), p.n)
                                                 : ball(parse_point(json(0.0), p.n), 0.4);
  const MPReport rep = smp_report(u, omega, z, K, p, cfg.value("bump_stride", 1));
  json j = mp_report_json(rep);
  j["command"] = "verify-mp";
  finish(opt, "verify-mp", j);
  if (rep.verdict == Verdict::ViolationFound) throw PropertyViolation("strong minimum property violated");
  return 0;
}

int cmd_counterexample(const json& cfg, const Options& opt) {
  const FracParams p = parse_params(cfg);
  const DomainSpec omega = parse_domain(cfg.at("domain"), p.n);
  const auto res = build_counterexample(omega, p, QuadratureScheme{}, opt.h > 0.0 ? opt.h : cfg.value("h", 0.0));
  std::vector<double> err(res.f.lat.size(), 0.0);
  std::ofstream csv(out_path(opt, "counterexample.csv"));
  write_csv(csv, res.f.lat, res.f.v, err);
  json j;
  j["command"] = "counterexample";
  j["epsilon"] = res.epsilon;
  j["interior_argmin"] = point_json(res.interior_argmin);
  j["interior_min"] = res.interior_min;
  j["report"] = mp_report_json(res.report);
  finish(opt, "counterexample", j);
  return 0;
}

int cmd_mc_crosscheck(const json& cfg, const Options& opt) {
  const FracParams p = parse_params(cfg);
  const DomainSpec g = parse_domain(cfg.at("domain"), p.n);
  const std::uint64_t seed = opt.seed_set ? opt.seed : cfg.value("seed", 1);
  const long n_samples = cfg.value("n_samples", 100000);
  const Point x = parse_point(cfg.value("x0", json(0.0)), p.n);
  const auto rc = killing_rate_crosscheck(x, g, p, n_samples, seed);
  json j;
  j["command"] = "mc-crosscheck";
  j["mc_rate"] = rc.mc_rate;
  j["mc_stderr"] = rc.mc_stderr;
  j["quadrature_rate"] = rc.quadrature_rate;
  j["n_samples"] = static_cast<long long>(n_samples);
  j["seed"] = static_cast<long long>(seed);
  finish(opt, "mc-crosscheck", j);
  const double tol = cfg.value("tolerance", 5e-3);
  if (std::abs(rc.mc_rate - rc.quadrature_rate) > 3.0 * rc.mc_stderr + tol)
    throw PropertyViolation("Monte Carlo and quadrature killing rates disagree");
  return 0;
}

int cmd_calibrate_constants(const json& cfg, const Options& opt) {
  const FracParams p = parse_params(cfg);
  const auto res = calibrate_constants(p);
  ConstantsFile c;
  c.n = p.n;
  c.s = p.s;
  c.c_hat = res.c_hat;
  c.c_sob = res.c_sob;
  c.calibration_date = cfg.value("date", "2026-08-24");
  c.family_hash = fnv1a_hex(res.family_description);
  std::ostringstream name;
  name << "constants_n" << p.n << "_s" << p.s << ".json";
  save_constants(c, out_path(opt, name.str()));
  json j = constants_json(c);
  j["command"] = "calibrate-constants";
  finish(opt, "calibrate-constants", j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nonlocal operator toolbox"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print usage");
  Options opt;
  app.add_option("--config", opt.config, "experiment configuration (key=value text or JSON)");
  app.add_option("--out", opt.out, "output directory");
  auto* seed_opt = app.add_option("--seed", opt.seed, "seed override");
  app.add_option("--h", opt.h, "grid spacing override");
  app.add_flag("--quiet", opt.quiet, "suppress stdout");

  const std::vector<std::pair<std::string, int (*)(const json&, const Options&)>> commands = {
      {"eval-op", cmd_eval_op},
      {"energy", cmd_energy},
      {"tail", cmd_tail},
      {"killing-measure", cmd_killing_measure},
      {"decomposition-check", cmd_decomposition_check},
      {"caccioppoli-sweep", cmd_caccioppoli_sweep},
      {"degiorgi", cmd_degiorgi},
      {"barrier", cmd_barrier},
      {"verify-mp", cmd_verify_mp},
      {"counterexample", cmd_counterexample},
      {"mc-crosscheck", cmd_mc_crosscheck},
      {"calibrate-constants", cmd_calibrate_constants},
  };
  for (const auto& [name, fn] : commands) app.add_subcommand(name)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 1 : 0;
  }
  opt.seed_set = seed_opt->count() > 0;

  if (const char* threads = std::getenv("NONLOCAL_MP_THREADS")) {
    char* end = nullptr;
    const long t = std::strtol(threads, &end, 10);
    if (end == threads || *end != '\0' || t < 1) {
      std::cerr << "NONLOCAL_MP_THREADS must be a positive integer\n";
      return 2;
    }
    // all work currently runs on one worker; the variable caps, never raises
  }

  json cfg = json::object();
  try {
    if (!opt.config.empty()) cfg = parse_config_file(opt.config);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }

  try {
    for (const auto& [name, fn] : commands)
      if (app.get_subcommand(name)->parsed()) return fn(cfg, opt);
    std::cerr << "no command selected\n";
    return 1;
  } catch (const PropertyViolation& e) {
    std::cerr << "property violation: " << e.what() << "\n";
    return 4;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}
