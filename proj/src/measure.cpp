#include "critmc/measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace critmc {

double iref_mass(const LogHistogram& hist, double lo, double hi) {
  const double m = hist.interval_mass(lo, hi);
  if (!(m > 0.0)) {
    throw std::runtime_error(
        "reference interval has zero occupation (run too short)");
  }
  return m;
}

PathAccumulator::PathAccumulator(const ModelSpec& model,
                                 HistogramGeometry geometry,
                                 std::vector<Functional> functionals,
                                 RandomStream fresh_rng,
                                 std::uint64_t batch_steps,
                                 int thin_fresh_draw, double iref_lo,
                                 double iref_hi)
    : hist(geometry),
      model_(model),
      fns_(std::move(functionals)),
      fresh_rng_(fresh_rng),
      batch_steps_(batch_steps == 0 ? 1 : batch_steps),
      thin_(thin_fresh_draw) {
  const double lr = geometry.log_rho;
  const double plo = std::log(iref_lo) / lr;
  const double phi = std::log(iref_hi) / lr;
  ik0_ = std::int32_t(std::floor(plo));
  ik1_ = std::int32_t(std::ceil(phi)) - 1;
  for (std::int32_t k = ik0_; k <= ik1_; ++k) {
    const double a = std::max(plo, double(k));
    const double b = std::min(phi, double(k) + 1.0);
    ifrac_.push_back(std::max(0.0, b - a));
  }
  cur_.fsum.assign(fns_.size(), 0.0);
  cur_.fexcluded.assign(fns_.size(), 0);
}

void PathAccumulator::on_step(std::uint64_t, const WideReal& x, double s,
                              const Innovation&) {
  const BinCode code = hist.code_of(x);
  hist.record_code(code);
  if (!(code & 1) && code != kNearZeroBin && code != kOverflowPosBin) {
    const std::int32_t k = code >> 1;
    if (k >= ik0_ && k <= ik1_) cur_.iref_mass += ifrac_[k - ik0_];
  }
  for (std::size_t i = 0; i < fns_.size(); ++i) {
    const Functional& f = fns_[i];
    double weight = 1.0;
    if (thin_ > 1 && functional_uses_fresh_draw(f.kind)) {
      if (fresh_rng_.uniform01() * thin_ >= 1.0) continue;
      weight = double(thin_);
    }
    if (auto v = eval_functional(f, x, s, model_, fresh_rng_)) {
      cur_.fsum[i] += weight * *v;
    } else {
      ++cur_.fexcluded[i];
    }
  }
  if (++cur_.steps >= batch_steps_) finalize();
}

void PathAccumulator::finalize() {
  if (cur_.steps == 0) return;
  batches.push_back(cur_);
  cur_ = CycleBatch{};
  cur_.fsum.assign(fns_.size(), 0.0);
  cur_.fexcluded.assign(fns_.size(), 0);
}

RatioRunResult estimate_ratio_run(const ModelSpec& model, double x0,
                                  std::uint64_t n_steps, RandomStream rng,
                                  HistogramGeometry geometry,
                                  std::vector<Functional> functionals,
                                  int n_batches, int thin_fresh_draw) {
  const std::uint64_t batch_steps =
      std::max<std::uint64_t>(1, n_steps / std::uint64_t(std::max(1, n_batches)));
  PathAccumulator acc(model, geometry, std::move(functionals),
                      rng.substream(0x66756e63), batch_steps, thin_fresh_draw);
  SimResult sim = simulate(model, x0, n_steps, rng, kDefaultStateCapExp2, acc);
  acc.finalize();
  return RatioRunResult{std::move(acc.hist), std::move(acc.batches), sim};
}

std::size_t TailProfile::index_of(double x) const {
  std::size_t best = 0;
  double err = HUGE_VAL;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = std::fabs(grid[i].x - x);
    if (d < err) {
      err = d;
      best = i;
    }
  }
  if (err > 1e-9) throw std::invalid_argument("grid point not on profile");
  return best;
}

TailProfile tail_profile(const std::vector<LogHistogram>& replicas,
                         double alpha, double beta,
                         std::span<const double> x_grid, bool negative_side) {
  if (replicas.empty()) throw std::invalid_argument("no replicas");
  if (!(alpha > 0.0 && beta > alpha)) {
    throw std::invalid_argument("need 0 < alpha < beta");
  }
  const auto& geom = replicas.front().geometry();
  if (geom.log_rho > (std::log(beta) - std::log(alpha)) / 8.0) {
    throw std::invalid_argument("bins too coarse for (alpha, beta)");
  }
  TailProfile out;
  out.alpha = alpha;
  out.beta = beta;
  out.negative_side = negative_side;
  const std::size_t R = replicas.size();
  std::vector<double> norms(R);
  for (std::size_t r = 0; r < R; ++r) norms[r] = iref_mass(replicas[r]);
  out.per_replica.assign(R, {});

  const double support_hi = replicas.front().bin_lo(geom.k_max);
  for (double x : x_grid) {
    TailPoint p;
    p.x = x;
    const double u = alpha * std::exp(x);
    const double v = beta * std::exp(x);
    const double lo = negative_side ? -v : u;
    const double hi = negative_side ? -u : v;
    if (v >= support_hi || !(std::isfinite(u) && std::isfinite(v))) {
      p.missing = true;  // interval reaches the clamped boundary bin
      out.grid.push_back(p);
      for (std::size_t r = 0; r < R; ++r) out.per_replica[r].push_back(0.0);
      continue;
    }
    double mean = 0.0;
    std::vector<double> vals(R);
    for (std::size_t r = 0; r < R; ++r) {
      vals[r] = replicas[r].interval_mass(lo, hi) / norms[r];
      mean += vals[r];
      p.hits += replicas[r].interval_hits(lo, hi);
    }
    mean /= double(R);
    p.f_hat = mean;
    if (R >= 2) {
      double ss = 0.0;
      for (double vr : vals) ss += (vr - mean) * (vr - mean);
      p.stderr_ = std::sqrt(ss / double(R - 1) / double(R));
    } else {
      // single replica: Poisson approximation on the raw hits
      p.stderr_ = p.hits > 0 ? mean / std::sqrt(double(p.hits)) : 0.0;
    }
    for (std::size_t r = 0; r < R; ++r) out.per_replica[r].push_back(vals[r]);
    out.grid.push_back(p);
  }
  return out;
}

PlateauFit fit_plateau(const TailProfile& profile, double x_lo, double x_hi) {
  PlateauFit fit;
  fit.window_lo = x_lo;
  fit.window_hi = x_hi;
  fit.x_mid = 0.5 * (x_lo + x_hi);
  double sw = 0, swx = 0, swxx = 0, swy = 0, swxy = 0;
  int n = 0;
  for (const auto& p : profile.grid) {
    if (p.x < x_lo || p.x > x_hi || p.missing || !(p.stderr_ > 0.0)) continue;
    const double w = 1.0 / (p.stderr_ * p.stderr_);
    const double t = p.x - fit.x_mid;
    sw += w;
    swx += w * t;
    swxx += w * t * t;
    swy += w * p.f_hat;
    swxy += w * t * p.f_hat;
    ++n;
  }
  fit.n_points = n;
  if (n < 8) throw std::runtime_error("fit_plateau: fewer than 8 usable points");
  const double det = sw * swxx - swx * swx;
  if (!(det > 0.0)) throw std::runtime_error("fit_plateau: singular fit");
  fit.level = (swxx * swy - swx * swxy) / det;
  fit.slope = (sw * swxy - swx * swy) / det;
  fit.level_stderr = std::sqrt(swxx / det);
  fit.slope_stderr = std::sqrt(sw / det);
  fit.slope_compatible_zero = std::fabs(fit.slope) <= 2.0 * fit.slope_stderr;
  const double lba = std::log(profile.beta / profile.alpha);
  fit.tail_constant = fit.level / lba;
  fit.tail_constant_stderr = fit.level_stderr / lba;
  return fit;
}

std::pair<double, double> default_window(const TailProfile& profile,
                                         std::uint64_t min_hits) {
  std::size_t best_lo = 0, best_len = 0;
  std::size_t i = 0;
  const auto& g = profile.grid;
  while (i < g.size()) {
    if (g[i].missing || g[i].hits < min_hits) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < g.size() && !g[j].missing && g[j].hits >= min_hits) ++j;
    if (j - i >= best_len) {  // ties toward larger x
      best_len = j - i;
      best_lo = i;
    }
    i = j;
  }
  if (best_len == 0) throw std::runtime_error("no window with enough hits");
  return {g[best_lo].x, g[best_lo + best_len - 1].x};
}

double growth_ratio_max(const LogHistogram& hist, double norm, double gamma,
                        std::span<const double> x_grid) {
  double worst = 0.0;
  for (double x : x_grid) {
    if (!(x > 0.0)) continue;
    const double mass = hist.interval_mass(-x, x) / norm;
    worst = std::max(worst, mass / (1.0 + std::pow(x, gamma)));
  }
  return worst;
}

double poly_moment_window(const LogHistogram& hist, double norm, double gamma,
                          double w) {
  const auto& g = hist.geometry();
  double total = double(hist.near_zero());  // integrand ~ 1 near zero
  const std::int32_t k_hi = std::min(
      g.k_max, std::int32_t(std::floor(std::log(w) / g.log_rho)));
  for (std::int32_t k = g.k_min; k <= k_hi; ++k) {
    const double mid = std::exp((double(k) + 0.5) * g.log_rho);
    const double f = std::pow(1.0 + mid, -gamma);
    total += f * double(hist.pos_weight(k) + hist.neg_weight(k));
  }
  return total / norm;
}

ScalarEstimate nu_functional_ratio(const std::vector<CycleBatch>& batches,
                                   std::size_t fn_index, double scale) {
  double fsum = 0.0, iref = 0.0;
  std::vector<double> ratios;
  ScalarEstimate est;
  for (const auto& b : batches) {
    fsum += b.fsum[fn_index];
    iref += b.iref_mass;
    est.excluded += b.fexcluded[fn_index];
    if (b.iref_mass > 0.0) ratios.push_back(b.fsum[fn_index] / b.iref_mass);
  }
  if (!(iref > 0.0)) {
    throw std::runtime_error("functional ratio: empty reference interval");
  }
  est.value = scale * fsum / iref;
  if (ratios.size() >= 2) {
    double mean = 0.0;
    for (double v : ratios) mean += v;
    mean /= double(ratios.size());
    double ss = 0.0;
    for (double v : ratios) ss += (v - mean) * (v - mean);
    est.stderr_ = scale * std::sqrt(ss / double(ratios.size() - 1) /
                                    double(ratios.size()));
  }
  return est;
}

}  // namespace critmc
