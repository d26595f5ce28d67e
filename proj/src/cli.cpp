#include "dwnls/cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>

#include "dwnls/config.hpp"
#include "dwnls/diagnostics.hpp"
#include "dwnls/eigensolver.hpp"
#include "dwnls/io.hpp"
#include "dwnls/nls.hpp"
#include "dwnls/parallel.hpp"
#include "dwnls/twomode.hpp"

namespace dwnls::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Context {
  RunConfig cfg;
  fs::path out;
  RunManifest* manifest;

  fs::path artifact(const std::string& name) const {
    const fs::path p = out / name;
    manifest->add_artifact(p);
    return p;
  }
};

json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

int guarded(const std::string& command, const Options& o, const std::function<int(Context&)>& body) {
  std::optional<RunManifest> manifest;
  Context ctx;
  int code = kOk;
  ctx.out = o.out;
  try {
    fs::create_directories(ctx.out);
    {
      // Until the config parses, the manifest records the raw file and a null config.
      std::ifstream in(o.config);
      std::stringstream raw;
      raw << in.rdbuf();
      manifest.emplace(command, nullptr, raw.str());
    }
    ctx.cfg = load_config(o.config);
    if (o.seed) ctx.cfg.solver.seed = *o.seed;
    manifest.emplace(command, to_json(ctx.cfg), canonical_text(ctx.cfg));
    ctx.manifest = &*manifest;
    code = body(ctx);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    code = kConfigError;
  } catch (const InvalidParameter& e) {
    std::cerr << "invalid parameter: " << e.what() << "\n";
    code = kConfigError;
  } catch (const GridMismatch& e) {
    std::cerr << "grid mismatch: " << e.what() << "\n";
    code = kConfigError;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    code = kSolverError;
  } catch (const ConsistencyError& e) {
    std::cerr << "consistency error: " << e.what() << "\n";
    code = kSolverError;
  } catch (const BlowUpError& e) {
    std::cerr << "blow-up at t = " << e.time_reached << ": " << e.what() << "\n";
    code = kBlowUp;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    code = kSolverError;
  }
  if (manifest) {
    try {
      manifest->write(ctx.out, code);
    } catch (const std::exception& e) {
      std::cerr << "cannot write manifest: " << e.what() << "\n";
    }
  }
  return code;
}

SpectralData solve(const RunConfig& c, double hbar, int k) {
  EigenOptions eo;
  eo.tol = c.solver.tol;
  eo.max_iterations = c.solver.max_iterations;
  return lowest_eigenpairs(c.make_potential(), c.make_grid(), hbar, k, c.solver.tol, c.solver.seed, eo);
}

SpectralData solve(const RunConfig& c) { return solve(c, c.physics.hbar, c.solver.k); }

double resolve_epsilon(const RunConfig& c, const SpectralData& S) {
  if (!c.physics.eta) return c.physics.epsilon;
  return *c.physics.eta * S.omega_split * std::pow(c.physics.hbar, 0.5 * c.grid.dim * c.physics.sigma);
}

SimConfig make_sim(const RunConfig& c, const SpectralData& S, double epsilon) {
  SimConfig sc;
  sc.hbar = c.physics.hbar;
  sc.epsilon = epsilon;
  sc.sigma = c.physics.sigma;
  sc.dim = c.grid.dim;
  sc.time_rescaled = c.physics.time_rescaled;
  const double period = beat_period(S, sc.time_rescaled);
  sc.dt = c.time.dt.value_or(period / c.time.steps_per_period);
  sc.t_final = c.time.t_final.value_or(c.time.periods * period);
  sc.output_stride = c.time.output_stride;
  sc.snapshot_stride = c.time.snapshot_stride;
  return sc;
}

TwoModeState initial_amplitudes(const RunConfig& c) {
  const double s = 1.0 / std::sqrt(2.0);
  const auto& st = c.initial.state;
  if (st == "phi_R") return {1.0, 0.0};
  if (st == "phi_L") return {0.0, 1.0};
  if (st == "phi1") return {s, s};
  if (st == "phi2") return {s, -s};
  if (st == "mix") {
    const double n = std::hypot(c.initial.zeta_R, c.initial.zeta_L);
    if (!(n > 0.0)) throw ConfigError("initial: zeta_R and zeta_L are both zero");
    return {c.initial.zeta_R / n, c.initial.zeta_L / n};
  }
  throw ConfigError("initial.state '" + st + "' has no two-mode counterpart");
}

FieldC initial_field(const RunConfig& c, const SpectralData& S) {
  if (c.initial.state == "phi3") return S.eigenvectors.at(2);
  const TwoModeState a = initial_amplitudes(c);
  FieldC f(S.grid());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = a.c_R * S.phi_R[i] + a.c_L * S.phi_L[i];
  return f;
}

TwoModeParams twomode_params(const RunConfig& c, const SpectralData& S, double epsilon) {
  TwoModeParams p;
  p.omega_split = S.omega_split;
  p.omega_mean = S.omega_mean;
  p.epsilon = epsilon;
  p.sigma = c.physics.sigma;
  p.c_sigma = c_sigma(S, c.physics.sigma,
                      c.solver.c_sigma == "paper_literal" ? CSigmaConvention::paper_literal
                                                          : CSigmaConvention::projected);
  p.time_rescaled = c.physics.time_rescaled;
  p.hbar = c.physics.hbar;
  return p;
}

void write_trajectory(const fs::path& path, const Trajectory& traj) {
  CsvWriter w(path, {"t", "norm", "energy", "re_zeta1", "im_zeta1", "re_zeta2", "im_zeta2", "mu", "pop_R",
                     "pop_L", "h0_gap"});
  for (const auto& r : traj.records) {
    w << r.t << r.norm << r.energy << r.zeta1.real() << r.zeta1.imag() << r.zeta2.real() << r.zeta2.imag()
      << r.mu << r.pop_R << r.pop_L << r.h0_gap;
    w.end_row();
  }
}

void write_twomode(const fs::path& path, const TwoModeTrajectory& tm) {
  CsvWriter w(path, {"tau", "re_cR", "im_cR", "re_cL", "im_cL", "norm2", "invariant_I", "z"});
  for (const auto& r : tm) {
    w << r.tau << r.state.c_R.real() << r.state.c_R.imag() << r.state.c_L.real() << r.state.c_L.imag()
      << r.norm2 << r.invariant << r.z;
    w.end_row();
  }
}

/// Sandwich inequalities at every recorded time.
json sandwich_summary(const Trajectory& traj, const SpectralData& S, double hbar) {
  double min_upper = std::numeric_limits<double>::infinity();
  double min_lower = std::numeric_limits<double>::infinity();
  int bad = 0, small_gap = 0;
  SandwichReport last;
  for (const auto& r : traj.records) {
    ProjectionData pd;
    pd.mu = r.mu;
    pd.pic_norm0 = r.pic_norm0;
    pd.h0_gap = r.h0_gap;
    last = h0_sandwich_check(pd, S, hbar);
    min_upper = std::min(min_upper, last.upper_margin);
    min_lower = std::min(min_lower, last.lower_margin);
    bad += !last.ok();
    small_gap += last.in_small_gap_regime;
  }
  return {{"min_upper", min_upper},
          {"min_lower", min_lower},
          {"relative_gap", last.relative_gap},
          {"lambda_top", last.lambda_top},
          {"violations", bad},
          {"records", traj.records.size()},
          {"small_gap_records", small_gap}};
}

json theorem_json(const TheoremReport& t) {
  return {{"mu_max", t.mu_max},
          {"mu0", t.mu0},
          {"amplification", nullable(t.amplification)},
          {"initial_hypothesis_ok", t.initial_hypothesis_ok},
          {"first_half_max", t.first_half_max},
          {"second_half_max", t.second_half_max},
          {"no_secular_growth", t.no_secular_growth},
          {"x1_bound_ok", t.x1_bound_ok},
          {"eps_scaling_exponent", nullable(t.eps_scaling_exponent)}};
}

json run_json(const SimConfig& sc, const SpectralData& S) {
  return {{"epsilon", sc.epsilon},
          {"eta", S.omega_split > 0 ? effective_eta(sc.epsilon, sc.hbar, sc.sigma, sc.dim, S.omega_split) : 0.0},
          {"dt", sc.dt},
          {"t_final", sc.t_final},
          {"steps", std::llround(sc.t_final / sc.dt)},
          {"omega", S.omega_split},
          {"Omega", S.omega_mean}};
}

}  // namespace

int cmd_spectrum(const Options& o) {
  return guarded("spectrum", o, [](Context& ctx) {
    const auto& c = ctx.cfg;
    const SpectralData S = solve(c);
    {
      CsvWriter w(ctx.artifact("spectrum.csv"), {"k", "lambda", "parity", "residual", "Omega", "omega"});
      for (std::size_t k = 0; k < S.eigenvalues.size(); ++k) {
        w << static_cast<long long>(k + 1) << S.eigenvalues[k] << to_string(S.parities[k]) << S.residuals[k]
          << S.omega_mean << S.omega_split;
        w.end_row();
      }
    }
    if (c.output.eigenvectors) {
      for (std::size_t k = 0; k < S.eigenvectors.size(); ++k) {
        const fs::path stem = ctx.out / ("phi" + std::to_string(k + 1));
        write_snapshot(S.eigenvectors[k], c.physics.hbar, 0.0, stem);
        ctx.manifest->add_artifact(stem.string() + ".bin");
        ctx.manifest->add_artifact(stem.string() + ".json");
      }
    }
    const HypothesisReport h = verify_hypotheses(c.make_potential(), c.make_grid());
    write_json(ctx.artifact("hypotheses.json"), {{"symmetric", h.symmetric},
                                                  {"two_minima", h.two_minima},
                                                  {"above_min_off_minima", h.above_min_off_minima},
                                                  {"hessian_positive", h.hessian_positive},
                                                  {"growth", h.growth},
                                                  {"failures", h.failures}});
    return static_cast<int>(kOk);
  });
}

int cmd_agmon(const Options& o) {
  return guarded("agmon", o, [](Context& ctx) {
    const Potential V = ctx.cfg.make_potential();
    const AgmonResult r = agmon_distance(V, ctx.cfg.solver.agmon_resolution);
    json j = {{"gamma", r.gamma}, {"method", to_string(r.method)}, {"resolution", r.resolution}};
    if (const auto cf = agmon_closed_form(V)) j["closed_form"] = cf->gamma;
    write_json(ctx.artifact("agmon.json"), j);
    if (!r.path.empty()) {
      CsvWriter w(ctx.artifact("agmon_path.csv"), {"x1", "x2"});
      for (const auto& p : r.path) {
        w << p[0] << p[1];
        w.end_row();
      }
    }
    return static_cast<int>(kOk);
  });
}

int cmd_evolve(const Options& o) {
  return guarded("evolve", o, [](Context& ctx) {
    const auto& c = ctx.cfg;
    const SpectralData S = solve(c);
    const SimConfig sc = make_sim(c, S, resolve_epsilon(c, S));
    SimConfig run_cfg = sc;
    if (sc.snapshot_stride > 0) {
      run_cfg.snapshot_dir = ctx.out / "snapshots";
      fs::create_directories(run_cfg.snapshot_dir);
    }
    ObserverSet obs;
    obs.projections = c.output.projections;
    obs.blowup_factor = c.output.blowup_factor;

    Trajectory traj;
    int code = kOk;
    std::string failure;
    try {
      traj = evolve(initial_field(c, S), run_cfg, S, obs);
    } catch (const EvolveBlowUp& e) {
      traj = e.partial;
      failure = e.what();
      code = kBlowUp;
      std::cerr << "blow-up at t = " << e.time_reached << ": " << e.what() << "\n";
    }
    write_trajectory(ctx.artifact("trajectory.csv"), traj);
    for (const auto& s : traj.snapshots) ctx.manifest->add_artifact(s);

    json report = run_json(sc, S);
    if (obs.projections && !traj.records.empty()) {
      report.update(theorem_json(theorem1_monitor(traj, sc, S)));
      if (S.eigenvalues.size() >= 3) report["sandwich_margins"] = sandwich_summary(traj, S, sc.hbar);
    }
    report["blow_up"] = failure.empty() ? json(nullptr) : json(failure);
    write_json(ctx.artifact("report.json"), report);
    return code;
  });
}

int cmd_twomode(const Options& o) {
  return guarded("twomode", o, [](Context& ctx) {
    const auto& c = ctx.cfg;
    const SpectralData S = solve(c);
    const double eps = resolve_epsilon(c, S);
    const SimConfig sc = make_sim(c, S, eps);
    const TwoModeParams p = twomode_params(c, S, eps);
    const double dt = c.twomode.dt.value_or(sc.dt);
    const int stride = c.twomode.stride > 0 ? c.twomode.stride : sc.output_stride;
    const TwoModeTrajectory tm = integrate(initial_amplitudes(c), p, dt, sc.t_final, stride);
    write_twomode(ctx.artifact("twomode.csv"), tm);

    double min_z = 1.0, max_norm_drift = 0.0, max_I_drift = 0.0;
    for (const auto& r : tm) {
      min_z = std::min(min_z, r.z);
      max_norm_drift = std::max(max_norm_drift, std::abs(r.norm2 - tm.front().norm2));
      max_I_drift = std::max(max_I_drift, std::abs(r.invariant - tm.front().invariant));
    }
    json summary = {{"omega", p.omega_split},       {"Omega", p.omega_mean},  {"epsilon", p.epsilon},
                    {"c_sigma", p.c_sigma},         {"eta_ratio", p.epsilon * p.c_sigma / p.omega_split},
                    {"dt", dt},                     {"min_z", min_z},         {"trapped", min_z > 0.0},
                    {"norm_drift", max_norm_drift}, {"invariant_drift", max_I_drift}};
    write_json(ctx.artifact("twomode.json"), summary);

    if (!c.twomode.scan_etas.empty()) {
      ScanOptions so;
      so.periods = c.twomode.scan_periods;
      so.steps_per_period = c.twomode.scan_steps_per_period;
      so.bisection_tol = c.twomode.bisection_tol;
      const ScanTable t = selftrap_scan(p, c.twomode.scan_etas, c.physics.sigma, so);
      CsvWriter w(ctx.artifact("scan.csv"), {"eta", "min_z", "trapped"});
      for (const auto& r : t.rows) {
        w << r.eta << r.min_z << r.trapped;
        w.end_row();
      }
      write_json(ctx.artifact("scan.json"), {{"eta_star", nullable(t.eta_star)},
                                              {"bisection_width", t.bisection_width},
                                              {"monotone", t.monotone}});
    }
    return static_cast<int>(kOk);
  });
}

namespace {

struct CompareRun {
  Trajectory traj;
  TwoModeTrajectory tm;
  CorollaryReport rep;
  SimConfig sc;
};

CompareRun compare_once(const RunConfig& c, const SpectralData& S, double eps) {
  CompareRun r;
  r.sc = make_sim(c, S, eps);
  if (c.twomode.dt && *c.twomode.dt != r.sc.dt)
    throw ConfigError("compare: twomode.dt must equal the evolve step so output times match");
  if (c.twomode.stride > 0 && c.twomode.stride != r.sc.output_stride)
    throw ConfigError("compare: twomode.stride must equal time.output_stride");
  r.traj = evolve(initial_field(c, S), r.sc, S);
  r.tm = integrate(initial_amplitudes(c), twomode_params(c, S, eps), r.sc.dt, r.sc.t_final, r.sc.output_stride);
  r.rep = corollary1_monitor(r.traj, r.tm, S);
  return r;
}

}  // namespace

int cmd_compare(const Options& o) {
  return guarded("compare", o, [](Context& ctx) {
    const auto& c = ctx.cfg;
    const SpectralData S = solve(c);
    const double eps = resolve_epsilon(c, S);
    const CompareRun a = compare_once(c, S, eps);
    write_trajectory(ctx.artifact("trajectory.csv"), a.traj);
    write_twomode(ctx.artifact("twomode.csv"), a.tm);

    std::optional<CompareRun> b;
    if (c.compare.pair_ratio > 1.0) b = compare_once(c, S, eps / c.compare.pair_ratio);

    {
      CsvWriter w(ctx.artifact("compare.csv"), {"t", "error", "error_pair"});
      for (std::size_t i = 0; i < a.rep.times.size(); ++i) {
        w << a.rep.times[i] << a.rep.errors[i] << (b ? b->rep.errors.at(i) : std::nan(""));
        w.end_row();
      }
    }
    json j = run_json(a.sc, S);
    j["e0"] = a.rep.e0;
    j["slope"] = a.rep.slope;
    j["slope_eps_exponent"] = nullptr;
    if (b) {
      j["pair"] = {{"epsilon", b->sc.epsilon}, {"slope", b->rep.slope}, {"e0", b->rep.e0}};
      if (a.sc.epsilon != 0.0 && a.rep.slope > 0.0 && b->rep.slope > 0.0)
        j["slope_eps_exponent"] = slope_eps_exponent(a.sc.epsilon, a.rep.slope, b->sc.epsilon, b->rep.slope);
    }
    if (S.eigenvalues.size() >= 3) j["sandwich_margins"] = sandwich_summary(a.traj, S, a.sc.hbar);
    write_json(ctx.artifact("corollary.json"), j);
    return static_cast<int>(kOk);
  });
}

int cmd_sweep(const Options& o) {
  return guarded("sweep", o, [](Context& ctx) {
    const auto& c = ctx.cfg;
    if (c.sweep.hbars.empty() && c.sweep.epsilons.empty())
      throw ConfigError("sweep: both sweep.hbars and sweep.epsilons are empty");
    const int threads = default_thread_count();
    bool partial = false;

    if (!c.sweep.hbars.empty()) {
      const Potential V = c.make_potential();
      const SweepTable t = splitting_sweep(V, c.make_grid(), c.sweep.hbars, c.solver.tol, c.solver.seed, threads);
      CsvWriter w(ctx.artifact("sweep.csv"), {"hbar", "lambda1", "lambda2", "omega", "Omega", "gamma_fit_slope", "r2"});
      for (const auto& r : t.rows) {
        w << r.hbar << r.lambda1 << r.lambda2 << r.omega << r.Omega << t.slope << t.r2;
        w.end_row();
      }
      json j = {{"slope", t.slope},       {"intercept", t.intercept},
                {"r2", t.r2},             {"r2_power", t.r2_power},
                {"gamma_estimate", -t.slope}, {"exponential_law", t.exponential_law()},
                {"warnings", t.warnings}, {"partial", t.partial()}};
      try {
        const AgmonResult g = agmon_distance(V, c.solver.agmon_resolution);
        j["agmon_gamma"] = g.gamma;
      } catch (const InvalidParameter&) {
        j["agmon_gamma"] = nullptr;
      }
      write_json(ctx.artifact("sweep.json"), j);
      for (const auto& wmsg : t.warnings) std::cerr << "warning: " << wmsg << "\n";
      partial |= t.partial();
    }

    if (!c.sweep.epsilons.empty()) {
      const SpectralData S = solve(c);
      const auto& eps = c.sweep.epsilons;
      std::vector<TheoremReport> reps(eps.size());
      const FieldC psi0 = initial_field(c, S);
      const auto errors = parallel_for_index(eps.size(), threads, [&](std::size_t i) {
        const SimConfig sc = make_sim(c, S, eps[i]);
        reps[i] = theorem1_monitor(evolve(psi0, sc, S), sc, S);
      });
      CsvWriter w(ctx.artifact("eps_sweep.csv"), {"epsilon", "mu_max", "amplification", "no_secular_growth", "failed"});
      std::vector<double> fit_eps, fit_mu;
      for (std::size_t i = 0; i < eps.size(); ++i) {
        const bool failed = static_cast<bool>(errors[i]);
        if (failed) {
          partial = true;
          try {
            std::rethrow_exception(errors[i]);
          } catch (const std::exception& e) {
            std::cerr << "warning: epsilon = " << eps[i] << " failed: " << e.what() << "\n";
          }
        } else if (eps[i] != 0.0 && reps[i].mu_max > 0.0) {
          fit_eps.push_back(eps[i]);
          fit_mu.push_back(reps[i].mu_max);
        }
        w << eps[i] << (failed ? std::nan("") : reps[i].mu_max) << reps[i].amplification.value_or(std::nan(""))
          << (!failed && reps[i].no_secular_growth) << failed;
        w.end_row();
      }
      json j = {{"eps_scaling_exponent", nullptr}};
      if (fit_eps.size() >= 2) j["eps_scaling_exponent"] = eps_scaling_exponent(fit_eps, fit_mu);
      write_json(ctx.artifact("eps_sweep.json"), j);
    }
    return static_cast<int>(partial ? kPartialSweep : kOk);
  });
}

int run(const std::string& command, const Options& o) {
  if (command == "spectrum") return cmd_spectrum(o);
  if (command == "agmon") return cmd_agmon(o);
  if (command == "evolve") return cmd_evolve(o);
  if (command == "twomode") return cmd_twomode(o);
  if (command == "compare") return cmd_compare(o);
  if (command == "sweep") return cmd_sweep(o);
  std::cerr << "unknown command '" << command << "'\n";
  return kConfigError;
}

}  // namespace dwnls::cli
