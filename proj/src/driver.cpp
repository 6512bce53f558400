#include "critmc/driver.hpp"

#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "critmc/reports.hpp"

namespace critmc {

namespace fs = std::filesystem;

namespace {

fs::path resolve_out_dir(const RunConfig& cfg) {
  fs::path dir(cfg.out_dir);
  if (dir.is_relative()) {
    if (const char* root = std::getenv("CRITMC_OUT_ROOT")) {
      dir = fs::path(root) / dir;
    }
  }
  return dir;
}

std::string artifact_header(const std::string& cmd, const RunConfig& cfg) {
  std::ostringstream s;
  s << "# critmc " << cmd << "\n";
  s << "# fingerprint=" << cfg.fingerprint() << " seed=" << cfg.seed << "\n";
  return s.str();
}

EnsembleOptions ensemble_options(const RunConfig& cfg) {
  EnsembleOptions opt;
  opt.seed = cfg.seed;
  opt.replicas = cfg.replicas;
  opt.workers = cfg.workers;
  opt.geometry = cfg.geometry;
  opt.thin_fresh_draw = cfg.thin_fresh_draw;
  return opt;
}

std::uint64_t per_replica(std::uint64_t total, int replicas) {
  return (total + std::uint64_t(replicas) - 1) / std::uint64_t(replicas);
}

double resolved_x0(const RunConfig& cfg) {
  return cfg.x0_auto ? default_x0(cfg.model) : cfg.x0;
}

RatioEnsembleResult ratio_run(const RunConfig& cfg,
                              std::vector<Functional> fns = {}) {
  return run_ratio_ensemble(cfg.model, resolved_x0(cfg),
                            per_replica(cfg.steps, cfg.replicas), fns,
                            ensemble_options(cfg));
}

LadderEnsembleResult ladder_run(const RunConfig& cfg,
                                std::vector<Functional> fns = {}) {
  return run_ladder_ensemble(cfg.model, per_replica(cfg.cycles, cfg.replicas),
                             cfg.burn_in_cycles, cfg.cycle_cap, fns,
                             ensemble_options(cfg));
}

std::string run_diag(const char* name, RunStatus status, std::uint64_t steps) {
  std::ostringstream s;
  s << name << ".steps = " << steps << "\n";
  s << name << ".status = "
    << (status == RunStatus::Complete
            ? "complete"
            : (status == RunStatus::AbortedStateCap ? "aborted_state_cap"
                                                    : "aborted_non_finite"))
    << "\n";
  return s.str();
}

int cmd_validate(const RunConfig& cfg, const fs::path& dir,
                 const std::string& header, std::ostream& log) {
  const ValidationReport rep = validate(cfg.model);
  write_text_artifact(dir / "validation.txt", header, render_validation(rep),
                      cfg.force);
  log << "validate: " << (rep.all_hold() ? "all assumptions hold"
                                         : "FAILED: " + rep.first_failure())
      << "\n";
  return rep.all_hold() ? kExitOk : kExitAssumption;
}

int require_valid(const RunConfig& cfg, std::ostream& log) {
  const ValidationReport rep = validate(cfg.model);
  if (!rep.all_hold()) {
    log << "assumption failed: " << rep.first_failure() << "\n";
    return kExitAssumption;
  }
  return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, const fs::path& dir,
                 const std::string& header, std::ostream& log) {
  std::ostringstream diag;
  int exit = kExitOk;
  const bool want_ratio = cfg.estimator != EstimatorChoice::Ladder;
  const bool want_ladder = cfg.estimator != EstimatorChoice::Ratio;
  if (want_ratio) {
    const RatioEnsembleResult res = ratio_run(cfg);
    write_histogram_csv(dir / "histogram.csv", header, res.merged, cfg.force);
    diag << run_diag("ratio", res.status, res.steps_done);
    if (res.status != RunStatus::Complete) {
      diag << "ratio.partial = true\n";
      exit = kExitRuntime;
    }
  }
  if (want_ladder) {
    const LadderEnsembleResult res = ladder_run(cfg);
    write_histogram_csv(dir / "ladder_histogram.csv", header, res.merged,
                        cfg.force);
    diag << run_diag("ladder", res.status, res.committed_steps);
    diag << "ladder.committed_cycles = " << res.committed_cycles << "\n";
    diag << "ladder.excluded_cycles = " << res.excluded_cycles << "\n";
    diag << "ladder.exclusion_fraction = "
         << format_real(res.exclusion_fraction()) << "\n";
    diag << "ladder.burn_in_stabilized = "
         << (res.burn_in_stabilized ? "true" : "false") << "\n";
    if (res.status != RunStatus::Complete) exit = kExitRuntime;
  }
  write_text_artifact(dir / "run.txt", header, diag.str(), cfg.force);
  log << "simulate: done\n";
  return exit;
}

int cmd_tail(const RunConfig& cfg, const fs::path& dir,
             const std::string& header, std::ostream& log) {
  const bool use_ladder = cfg.estimator == EstimatorChoice::Ladder;
  std::vector<LogHistogram> replicas;
  LogHistogram merged;
  int exit = kExitOk;
  if (use_ladder) {
    LadderEnsembleResult res = ladder_run(cfg);
    if (res.status != RunStatus::Complete) exit = kExitRuntime;
    replicas = std::move(res.replicas);
    merged = std::move(res.merged);
  } else {
    RatioEnsembleResult res = ratio_run(cfg);
    if (res.status != RunStatus::Complete) exit = kExitRuntime;
    replicas = std::move(res.replicas);
    merged = std::move(res.merged);
  }
  write_histogram_csv(dir / "histogram.csv", header, merged, cfg.force);
  const auto grid = cfg.x_grid();
  std::vector<PlateauFit> fits;
  for (std::size_t i = 0; i < cfg.pairs.size(); ++i) {
    const auto [a, b] = cfg.pairs[i];
    const TailProfile profile = tail_profile(replicas, a, b, grid);
    write_tail_profile_csv(dir / ("tail_profile_" + std::to_string(i) + ".csv"),
                           header, profile, cfg.force);
    double wlo = cfg.window_lo, whi = cfg.window_hi;
    if (cfg.window_auto) std::tie(wlo, whi) = default_window(profile);
    fits.push_back(fit_plateau(profile, wlo, whi));
  }
  write_text_artifact(dir / "plateau.txt", header,
                      render_plateau(cfg.pairs, fits), cfg.force);
  log << "tail: " << cfg.pairs.size() << " pair(s) fitted\n";
  return exit;
}

int cmd_constants(const RunConfig& cfg, const fs::path& dir,
                  const std::string& header, std::ostream& log) {
  const ValidationReport vrep = validate(cfg.model);
  const bool letac = cfg.model.kind == ChainKind::Letac;
  const bool affine = cfg.model.kind == ChainKind::Affine;

  // Ratio run carries the affine sum-formula channel; the Letac closed
  // formula rides the ladder cycles.
  std::vector<Functional> ratio_fns;
  if (affine) ratio_fns.push_back(make_tail_ratio_affine());
  RatioEnsembleResult ratio = ratio_run(cfg, ratio_fns);
  int exit = ratio.status == RunStatus::Complete ? kExitOk : kExitRuntime;

  const auto grid = cfg.x_grid();
  const auto [alpha, beta] = cfg.pairs.front();
  const TailProfile profile = tail_profile(ratio.replicas, alpha, beta, grid);
  double wlo = cfg.window_lo, whi = cfg.window_hi;
  if (cfg.window_auto) std::tie(wlo, whi) = default_window(profile);
  const PlateauFit fit = fit_plateau(profile, wlo, whi);

  RandomStream draws(cfg.seed, 0x647261777321ull);
  const DefectGrid defect =
      defect_from_definition(cfg.model, ratio.replicas, alpha, beta, grid,
                             cfg.mc_draws, draws.substream(1));

  ConstantsReport rep;
  rep.sigma2 = vrep.sigma2;
  rep.model_fingerprint = cfg.fingerprint();
  rep.moments = defect_moments(defect);
  rep.d1_plus = crossing_mass_balance(cfg.model, ratio.replicas, cfg.mc_draws,
                                      draws.substream(2));
  rep.c_plus_plateau =
      ScalarEstimate{fit.tail_constant, fit.tail_constant_stderr, 0};
  if (affine) {
    const TailProfile neg = tail_profile(ratio.replicas, alpha, beta, grid,
                                         /*negative_side=*/true);
    try {
      const PlateauFit nfit = fit_plateau(neg, wlo, whi);
      rep.c_minus_plateau =
          ScalarEstimate{nfit.tail_constant, nfit.tail_constant_stderr, 0};
      rep.has_minus = true;
    } catch (const std::exception&) {
      rep.has_minus = false;  // one-sided model
    }
    rep.c_sum = nu_functional_ratio(ratio.batches, 0, 2.0 / vrep.sigma2);
    rep.has_sum = true;
  }
  if (letac) {
    LadderEnsembleResult ladder = ladder_run(cfg, {make_tail_ratio_letac()});
    if (ladder.status != RunStatus::Complete) exit = kExitRuntime;
    rep.c_plus_formula =
        nu_functional_ratio(ladder.batches, 0, 2.0 / vrep.sigma2);
    rep.has_formula = true;
  }
  const PlateauLink link = plateau_identity_check(fit, rep.moments, rep.sigma2);

  write_defect_csv(dir / "psi.csv", header, defect, cfg.force);
  write_text_artifact(dir / "constants.txt", header,
                      render_constants(rep, link, wlo, whi), cfg.force);
  log << "constants: written\n";
  return exit;
}

int cmd_poisson_check(const RunConfig& cfg, const fs::path& dir,
                      const std::string& header, std::ostream& log) {
  RatioEnsembleResult ratio = ratio_run(cfg);
  int exit = ratio.status == RunStatus::Complete ? kExitOk : kExitRuntime;
  const auto grid = cfg.x_grid();
  const auto [alpha, beta] = cfg.pairs.front();
  const TailProfile profile = tail_profile(ratio.replicas, alpha, beta, grid);
  std::vector<double> interior;
  for (double x : grid) {
    if (x >= cfg.window_lo && x <= cfg.window_hi) interior.push_back(x);
  }
  RandomStream draws(cfg.seed, 0x706f6973ull);
  const DefectGrid defect =
      defect_from_definition(cfg.model, ratio.replicas, alpha, beta, interior,
                             cfg.mc_draws, draws.substream(1));
  const ResidualGrid res = poisson_residual(profile, defect, cfg.model,
                                            cfg.mc_draws, draws.substream(2));
  write_residual_csv(dir / "residual.csv", header, res, cfg.force);
  log << "poisson-check: sup|z| = " << format_real(res.sup_z) << "\n";
  return exit;
}

int cmd_kesten(const RunConfig& cfg, const fs::path& dir,
               const std::string& header, std::ostream& log) {
  KestenBaselineReport rep;
  rep.alpha_star_analytic = contractive_tail_index(cfg.model);
  RatioEnsembleResult ratio = ratio_run(cfg);
  int exit = ratio.status == RunStatus::Complete ? kExitOk : kExitRuntime;
  const TailIndexFit fit =
      fit_tail_index(ratio.merged, cfg.kesten_window_lo, cfg.kesten_window_hi);
  rep.alpha_star_fitted = fit.alpha;
  rep.fitted_stderr = fit.stderr_;
  rep.window_lo = cfg.kesten_window_lo;
  rep.window_hi = cfg.kesten_window_hi;
  rep.n_steps = ratio.steps_done;
  write_histogram_csv(dir / "histogram.csv", header, ratio.merged, cfg.force);
  write_text_artifact(dir / "kesten.txt", header, render_kesten(rep), cfg.force);
  log << "kesten-baseline: fitted " << format_real(rep.alpha_star_fitted)
      << " vs analytic " << format_real(rep.alpha_star_analytic) << "\n";
  return exit;
}

}  // namespace

int run_subcommand(const std::string& cmd, const RunConfig& cfg,
                   std::ostream& log) {
  const fs::path dir = resolve_out_dir(cfg);
  const std::string header = artifact_header(cmd, cfg);
  if (cmd == "validate") return cmd_validate(cfg, dir, header, log);

  // Every simulating subcommand validates first and refuses to run a
  // model whose assumptions fail.
  if (const int rc = require_valid(cfg, log); rc != kExitOk) return rc;
  if (cmd == "simulate") return cmd_simulate(cfg, dir, header, log);
  if (cmd == "tail") return cmd_tail(cfg, dir, header, log);
  if (cmd == "constants") return cmd_constants(cfg, dir, header, log);
  if (cmd == "poisson-check") return cmd_poisson_check(cfg, dir, header, log);
  if (cmd == "kesten-baseline") return cmd_kesten(cfg, dir, header, log);
  throw ConfigError("unknown subcommand '" + cmd + "'");
}

}  // namespace critmc
