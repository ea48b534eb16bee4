// hjft: batch front end for front-tracking runs, sweeps and checks.
//
// Exit codes: 0 pass, 1 config error, 2 solver failure, 3 verification failure.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "config.hpp"
#include "hjft/hj.hpp"
#include "hjft/verify.hpp"

namespace fs = std::filesystem;
using namespace hjft;
using hjft::cli::RunConfig;

namespace {

constexpr int kOk = 0;
constexpr int kConfig = 1;
constexpr int kSolver = 2;
constexpr int kVerify = 3;

struct Options {
  std::string config;
  std::string out;
  std::optional<double> delta;
  std::optional<std::uint64_t> seed;
  std::optional<double> glimm_c;
  std::vector<std::string> suites;
};

RunConfig load(const Options& o) {
  RunConfig c = o.config.empty() ? cli::parse_config(nlohmann::json::object()) : cli::load_config(o.config);
  if (o.delta) {
    if (!(*o.delta > 0.0)) throw ConfigError("--delta", "must be positive");
    c.delta = *o.delta;
  }
  if (o.seed) {
    c.seed = *o.seed;
    // A seed override re-draws a random base scenario.
    if (c.scenario.name.rfind("random-", 0) == 0) {
      const auto keep = c.scenario;
      c.scenario = random_scenario(c.seed);
      c.scenario.model = keep.model;
    }
  }
  if (o.glimm_c) {
    if (!(*o.glimm_c > 0.0)) throw ConfigError("--glimm-c", "must be positive");
    c.glimm_c = *o.glimm_c;
  }
  for (const auto& s : o.suites) {
    if (!cli::known_suites().count(s)) throw ConfigError("--suite", "unknown suite '" + s + "'");
  }
  if (!o.suites.empty()) c.verify.suites = o.suites;
  return c;
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream f(dir / name);
  if (!f) throw ConfigError("--out", "cannot write " + (dir / name).string());
  return f;
}

std::vector<double> sample_points(const Scenario& sc, int n) { return detail::linspace(sc.x_lo, sc.x_hi, n); }

void dump_states(std::ostream& os, const Tracker& tr) {
  os << "# t = " << num(tr.time()) << ", " << tr.active_front_count() << " fronts, cap " << num(tr.cap()) << "\n";
  os << "# p H a\n";
  for (const auto& s : tr.current_states()) os << num(s.p) << ' ' << num(s.h) << ' ' << num(s.a) << '\n';
}

// Runs the tracker; on failure the current states go to <out>/failure_state.txt.
TrackerLog run_tracker(const RunConfig& c, const fs::path& out) {
  Tracker tr(make_problem(c.scenario, c.delta, c.glimm_c));
  try {
    tr.run();
  } catch (const Error&) {
    auto f = open_out(out, "failure_state.txt");
    dump_states(f, tr);
    std::cerr << "state dump: " << (out / "failure_state.txt").string() << '\n';
    throw;
  }
  return tr.take_log();
}

int cmd_run(const Options& o) {
  const auto c = load(o);
  const fs::path out = o.out.empty() ? "out" : o.out;
  const auto log = run_tracker(c, out);
  const auto& sc = c.scenario;
  const HJSolution u(log, sc.x_lo, sc.u0_at(sc.x_lo));
  const auto xs = sample_points(sc, c.output.points);
  {
    auto f = open_out(out, "events.txt");
    log.write_events(f);
  }
  {
    auto f = open_out(out, "monitors.txt");
    log.write_monitors(f);
  }
  auto idx = open_out(out, "snapshots.txt");
  idx << "# k t p_file u_file\n";
  for (std::size_t k = 0; k < c.output.times.size(); ++k) {
    const double t = c.output.times[k];
    const std::string pn = "p_" + std::to_string(k) + ".txt";
    const std::string un = "u_" + std::to_string(k) + ".txt";
    idx << k << ' ' << num(t) << ' ' << pn << ' ' << un << '\n';
    auto fp = open_out(out, pn);
    log.write_snapshot(fp, t, xs);
    auto fu = open_out(out, un);
    fu << "# x u\n";
    const auto us = u.at(t, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) fu << num(xs[i]) << ' ' << num(us[i]) << '\n';
  }
  std::cout << "scenario " << sc.name << '\n'
            << "delta " << num(c.delta) << '\n'
            << "fronts " << log.fronts.size() << '\n'
            << "events " << log.events.size() << '\n'
            << "g_intervals " << log.interval_start.size() << '\n'
            << "glimm_c " << num(log.glimm_c) << '\n'
            << "temple_bound " << num(log.temple_bound) << '\n'
            << "out " << out.string() << '\n';
  return kOk;
}

int cmd_riemann(const Options& o) {
  const auto c = load(o);
  const auto rc = c.riemann.value_or(cli::RiemannConfig{});
  const auto& m = c.scenario.model;
  const auto rf = riemann_fan(m, rc.a_l, rc.a_r, rc.p_l, rc.p_r, rc.g, c.delta);
  std::vector<double> xs = rc.xs;
  if (xs.empty()) xs = detail::linspace(-2.0 * rc.t, 2.0 * rc.t, 9);
  std::ostringstream body;
  write_fan(body, rf.grid, rf.fan);
  body << "# x p u\n";
  for (double x : xs) {
    const auto v = riemann_hj(m, rc.a_l, rc.a_r, rc.p_l, rc.p_r, rc.g, rc.u0, x, rc.t, c.delta);
    body << num(x) << ' ' << num(v.p) << ' ' << num(v.pointwise) << '\n';
  }
  if (o.out.empty()) {
    std::cout << body.str();
  } else {
    auto f = open_out(o.out, "riemann.txt");
    f << body.str();
  }
  return kOk;
}

int cmd_convergence(const Options& o) {
  const auto c = load(o);
  const auto rep = convergence_sweep(c.scenario, c.convergence.deltas, c.convergence.fd_dx, c.glimm_c);
  std::ostringstream body;
  body << "# delta fronts l1_p_next linf_u_next ratio fd_l1\n";
  for (const auto& r : rep.rows) {
    body << num(r.delta) << ' ' << r.fronts << ' ' << num(r.l1_next) << ' ' << num(r.linf_u_next) << ' '
         << num(r.ratio) << ' ' << num(r.fd_l1) << '\n';
  }
  std::cout << body.str() << "fd_dx " << num(rep.fd_dx) << "\nfd_norm " << num(rep.fd_norm) << '\n';
  if (!o.out.empty()) {
    auto f = open_out(o.out, "convergence.txt");
    f << body.str();
  }
  return kOk;
}

int cmd_grid_dump(const Options& o) {
  const auto c = load(o);
  const Tracker tr(make_problem(c.scenario, c.delta, c.glimm_c));
  if (o.out.empty()) {
    tr.grid().dump(std::cout);
  } else {
    auto f = open_out(o.out, "grid.txt");
    tr.grid().dump(f);
  }
  return kOk;
}

// One line per suite: name PASS|FAIL key=value ...
struct SuiteResult {
  std::string name;
  bool pass = true;
  std::string detail;
};

std::vector<std::pair<Scenario, Scenario>> pairs_for(const RunConfig& c, bool ordered) {
  std::vector<std::pair<Scenario, Scenario>> out;
  for (int i = 0; i < c.verify.pairs; ++i) {
    auto pr = random_pair(c.seed + static_cast<std::uint64_t>(i), ordered);
    pr.first.model = c.scenario.model;
    pr.second.model = c.scenario.model;
    out.push_back(pr);
  }
  return out;
}

SuiteResult suite(const std::string& name, const RunConfig& c, const TrackerLog& log) {
  const auto& sc = c.scenario;
  const auto& m = sc.model;
  SuiteResult r{name, true, ""};
  std::ostringstream d;
  if (name == "entropy") {
    const auto bumps = bump_family(log, static_cast<std::size_t>(c.verify.bumps), c.seed, false);
    const auto rep = entropy_check(log, m, bumps, thin_constants(kruzkov_constants(log), 256), 1e-6);
    r.pass = rep.negative == 0;
    d << "evaluations=" << rep.evaluations << " negative=" << rep.negative << " min=" << num(rep.min_residual);
  } else if (name == "forged") {
    const auto forged = forge_jump_log(m, 1.0, -1.0, m.box().a_min, m.box().g_min, sc.x_lo, sc.x_hi, sc.horizon);
    const auto bumps = bump_family(forged, static_cast<std::size_t>(c.verify.bumps), c.seed, false);
    const auto rep = entropy_check(forged, m, bumps, kruzkov_constants(forged), 1e-6);
    r.pass = rep.negative == 0;
    d << "case=jump(1|-1) evaluations=" << rep.evaluations << " negative=" << rep.negative
      << " min=" << num(rep.min_residual);
  } else if (name == "weak") {
    const WeakCoefficients wc{[&](double x) { return sc.a(x); }, [&](double t) { return sc.g(t); }};
    std::vector<double> res;
    for (double delta : c.verify.deltas) {
      const auto lg = track(make_problem(sc, delta, c.glimm_c));
      double worst = 0.0;
      for (const auto& phi : bump_family(lg, static_cast<std::size_t>(c.verify.bumps), c.seed, true)) {
        worst = std::max(worst, weak_residual(lg, m, phi, wc));
      }
      res.push_back(worst);
    }
    d << "residuals=";
    for (std::size_t i = 0; i < res.size(); ++i) {
      d << (i ? "," : "") << num(res[i]);
      if (i > 0 && res[i] > 0.7 * res[i - 1] && res[i] > 1e-8) r.pass = false;
    }
  } else if (name == "interface-viscosity") {
    const auto rep = interface_viscosity_check(log, m);
    r.pass = rep.ok();
    d << "epochs=" << rep.epochs.size() << " dichotomy_failures=" << rep.dichotomy_failures
      << " inequality_failures=" << rep.inequality_failures << " max_excess=" << num(rep.max_excess);
  } else if (name == "contraction" || name == "comparison") {
    const bool ordered = name == "comparison";
    const auto prs = pairs_for(c, ordered);
    std::vector<ContractionReport> reps;
    for (double delta : c.verify.deltas) reps.push_back(contraction_suite(prs, delta));
    for (std::size_t i = 0; i < reps.size(); ++i) {
      const auto& rp = reps[i];
      if (ordered) {
        d << (i ? " " : "") << "delta=" << num(rp.delta) << " C_cmp=" << num(rp.c_comparison());
      } else {
        d << (i ? " " : "") << "delta=" << num(rp.delta) << " C_inf=" << num(rp.c_linf()) << " C_l1=" << num(rp.c_l1());
      }
      if (i == 0) continue;
      const auto& q = reps[i - 1];
      if (ordered) {
        r.pass = r.pass && stable_constant(q.c_comparison(), rp.c_comparison());
      } else {
        r.pass = r.pass && stable_constant(q.c_linf(), rp.c_linf()) && stable_constant(q.c_l1(), rp.c_l1());
      }
    }
  } else if (name == "monitors") {
    const auto rep = monitor_check(log);
    r.pass = rep.ok();
    d << "samples=" << rep.samples << " temple_rises=" << rep.temple_rises << " max_temple_rise="
      << num(rep.max_temple_rise) << " temple_z_rises=" << rep.temple_z_rises << " glimm_rises=" << rep.glimm_rises
      << " bound_excess=" << num(rep.bound_excess);
  } else if (name == "interaction") {
    const auto a = interaction_report(m, c.seed);
    const auto b = interaction_report(m, c.seed + 1);
    r.pass = a.violations == 0 && b.violations == 0 && std::isfinite(a.c) && stable_constant(a.c, b.c);
    d << "C=" << num(a.c) << "," << num(b.c) << " violations=" << a.violations + b.violations;
  }
  r.detail = d.str();
  return r;
}

int cmd_verify(const Options& o) {
  const auto c = load(o);
  if (c.verify.suites.empty()) {
    std::cout << "no suites selected\n";
    return kOk;
  }
  const fs::path out = o.out.empty() ? "out" : o.out;
  const auto log = run_tracker(c, out);
  std::ostringstream body;
  bool all = true;
  for (const auto& name : c.verify.suites) {
    const auto r = suite(name, c, log);
    all = all && r.pass;
    body << r.name << ' ' << (r.pass ? "PASS" : "FAIL") << ' ' << r.detail << '\n';
  }
  std::cout << body.str();
  if (!o.out.empty()) {
    auto f = open_out(out, "verify.txt");
    f << body.str();
  }
  return all ? kOk : kVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hjft: front tracking for Hamilton-Jacobi equations with discontinuous coefficients"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON configuration file");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--delta", o.delta, "grid width delta");
    sub->add_option("--seed", o.seed, "seed for randomized data and suites");
    sub->add_option("--glimm-c", o.glimm_c, "Glimm constant override");
  };
  auto* run = app.add_subcommand("run", "track, reconstruct u, write events, monitors and snapshots");
  auto* riemann = app.add_subcommand("riemann", "solve one interface Riemann problem");
  auto* conv = app.add_subcommand("convergence", "delta sweep with successive differences and FD distances");
  auto* ver = app.add_subcommand("verify", "run verification suites");
  auto* dump = app.add_subcommand("grid-dump", "print the initial (z, alpha) grid");
  for (auto* s : {run, riemann, conv, ver, dump}) common(s);
  ver->add_option("--suite", o.suites, "suite to run (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) return cmd_run(o);
    if (*riemann) return cmd_riemann(o);
    if (*conv) return cmd_convergence(o);
    if (*ver) return cmd_verify(o);
    if (*dump) return cmd_grid_dump(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const SpecError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const InputError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolver;
  }
  return kOk;
}
