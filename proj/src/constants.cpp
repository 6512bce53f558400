#include "critmc/constants.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace critmc {

namespace {

// psi integrand for one mu-draw: indicator mass of the interval preimage
// under s -> a s minus the preimage under the chain map.
double defect_draw(const ModelSpec& model, const LogHistogram& hist,
                   double inv_norm, const Innovation& inn, double L, double U,
                   bool& truncated) {
  const double a = inn.a;
  const double support = hist.bin_lo(hist.geometry().k_max);
  const double lo1 = L / a, hi1 = U / a;
  double t1 = hist.interval_mass(lo1, hi1) * inv_norm;
  double t2 = 0.0;
  double reach = hi1;
  switch (model.kind) {
    case ChainKind::Affine: {
      const double lo2 = (L - inn.b) / a, hi2 = (U - inn.b) / a;
      t2 = hist.interval_mass(lo2, hi2) * inv_norm;
      reach = std::max({reach, std::fabs(lo2), std::fabs(hi2)});
      break;
    }
    case ChainKind::Letac: {
      const double v = inn.b + a * inn.c;  // image of every s <= c
      if (v > L && v <= U) t2 += hist.mass_below(inn.c) * inv_norm;
      const double lo2 = (L - inn.b) / a, hi2 = (U - inn.b) / a;
      if (hi2 > inn.c) {
        t2 += hist.interval_mass(std::max(inn.c, lo2), hi2) * inv_norm;
      }
      reach = std::max({reach, std::fabs(lo2), std::fabs(hi2)});
      break;
    }
    case ChainKind::Extremal: {
      const double d = inn.d;
      if (d > L && d <= U) t2 += hist.mass_below(d / a) * inv_norm;
      if (U > d) {
        t2 += hist.interval_mass(std::max(L, d) / a, U / a) * inv_norm;
      }
      reach = std::max(reach, U / a);
      break;
    }
  }
  if (reach >= support) truncated = true;
  return t1 - t2;
}

void mean_and_spread(const std::vector<std::vector<double>>& rows,
                     const std::vector<double>& single_replica_se,
                     std::vector<double>& mean, std::vector<double>& se) {
  const std::size_t R = rows.size();
  const std::size_t n = rows.empty() ? 0 : rows.front().size();
  mean.assign(n, 0.0);
  se.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double m = 0.0;
    for (const auto& row : rows) m += row[j];
    m /= double(R);
    mean[j] = m;
    if (R >= 2) {
      double ss = 0.0;
      for (const auto& row : rows) ss += (row[j] - m) * (row[j] - m);
      se[j] = std::sqrt(ss / double(R - 1) / double(R));
    } else if (!single_replica_se.empty()) {
      se[j] = single_replica_se[j];
    }
  }
}

}  // namespace

DefectGrid defect_from_definition(const ModelSpec& model,
                                  const std::vector<LogHistogram>& replicas,
                                  double alpha, double beta,
                                  std::span<const double> x_grid,
                                  std::uint64_t draws_per_replica,
                                  RandomStream rng) {
  if (replicas.empty()) throw std::invalid_argument("no replicas");
  DefectGrid out;
  out.alpha = alpha;
  out.beta = beta;
  out.x.assign(x_grid.begin(), x_grid.end());
  out.method = DefectMethod::FromDefinition;
  const std::size_t R = replicas.size();
  const std::size_t n = out.x.size();
  out.per_replica.assign(R, std::vector<double>(n, 0.0));
  std::vector<double> draw_se(n, 0.0);
  std::vector<double> norms(R);
  for (std::size_t r = 0; r < R; ++r) norms[r] = iref_mass(replicas[r]);

  std::uint64_t truncated = 0, total = 0;

#pragma omp parallel for schedule(dynamic) reduction(+ : truncated, total)
  for (std::int64_t j = 0; j < std::int64_t(n); ++j) {
    const double L = alpha * std::exp(out.x[j]);
    const double U = beta * std::exp(out.x[j]);
    for (std::size_t r = 0; r < R; ++r) {
      RandomStream draw_rng =
          rng.substream((std::uint64_t(r) << 32) | std::uint64_t(j));
      const double inv_norm = 1.0 / norms[r];
      double sum = 0.0, sumsq = 0.0;
      for (std::uint64_t d = 0; d < draws_per_replica; ++d) {
        const Innovation inn = sample_innovation(model, draw_rng);
        bool trunc = false;
        const double v =
            defect_draw(model, replicas[r], inv_norm, inn, L, U, trunc);
        sum += v;
        sumsq += v * v;
        if (trunc) ++truncated;
        ++total;
      }
      const double m = sum / double(draws_per_replica);
      out.per_replica[r][j] = m;
      if (R == 1 && draws_per_replica >= 2) {
        const double var =
            std::max(0.0, sumsq / double(draws_per_replica) - m * m);
        draw_se[j] = std::sqrt(var / double(draws_per_replica));
      }
    }
  }
  mean_and_spread(out.per_replica, draw_se, out.psi, out.stderr_);
  out.truncated_fraction = total ? double(truncated) / double(total) : 0.0;
  return out;
}

AveragedGrid average_over_log_a(std::span<const double> g_x,
                                const std::vector<std::vector<double>>& g_per_replica,
                                std::span<const double> eval_x,
                                const ModelSpec& model,
                                std::uint64_t draws_per_replica,
                                RandomStream rng) {
  if (g_x.size() < 2 || g_per_replica.empty()) {
    throw std::invalid_argument("average_over_log_a: degenerate grid");
  }
  const double h = g_x[1] - g_x[0];
  for (std::size_t i = 1; i < g_x.size(); ++i) {
    if (std::fabs(g_x[i] - g_x[i - 1] - h) > 1e-9 * std::max(1.0, std::fabs(h))) {
      throw std::invalid_argument("average_over_log_a: grid must be uniform");
    }
  }
  AveragedGrid out;
  out.x.assign(eval_x.begin(), eval_x.end());
  const std::size_t R = g_per_replica.size();
  const std::size_t n = out.x.size();
  const std::size_t gn = g_x.size();
  out.per_replica.assign(R, std::vector<double>(n, 0.0));
  std::vector<double> draw_se(n, 0.0);
  std::uint64_t clipped = 0, total = 0;

#pragma omp parallel for schedule(dynamic) reduction(+ : clipped, total)
  for (std::int64_t j = 0; j < std::int64_t(n); ++j) {
    for (std::size_t r = 0; r < R; ++r) {
      RandomStream draw_rng =
          rng.substream((std::uint64_t(r) << 32) | std::uint64_t(j));
      const auto& g = g_per_replica[r];
      double sum = 0.0, sumsq = 0.0;
      for (std::uint64_t d = 0; d < draws_per_replica; ++d) {
        const double la = sample_log_a(model.a_law, draw_rng);
        double pos = (out.x[j] - la - g_x[0]) / h;
        if (pos < 0.0) {
          pos = 0.0;
          ++clipped;
        } else if (pos > double(gn - 1)) {
          pos = double(gn - 1);
          ++clipped;
        }
        const std::size_t i0 = std::min(gn - 2, std::size_t(pos));
        const double frac = pos - double(i0);
        const double v = g[i0] * (1.0 - frac) + g[i0 + 1] * frac;
        sum += v;
        sumsq += v * v;
        ++total;
      }
      const double m = sum / double(draws_per_replica);
      out.per_replica[r][j] = m;
      if (R == 1 && draws_per_replica >= 2) {
        const double var =
            std::max(0.0, sumsq / double(draws_per_replica) - m * m);
        draw_se[j] = std::sqrt(var / double(draws_per_replica));
      }
    }
  }
  mean_and_spread(out.per_replica, draw_se, out.value, out.stderr_);
  out.clipped_fraction = total ? double(clipped) / double(total) : 0.0;
  if (out.clipped_fraction > 1e-3) {
    throw std::runtime_error("average_over_log_a: grid too narrow");
  }
  return out;
}

DefectGrid defect_from_residual(const TailProfile& profile,
                                const ModelSpec& model,
                                std::span<const double> eval_x,
                                std::uint64_t draws_per_replica,
                                RandomStream rng) {
  std::vector<double> fx;
  fx.reserve(profile.grid.size());
  for (const auto& p : profile.grid) fx.push_back(p.x);
  const AveragedGrid avg =
      average_over_log_a(fx, profile.per_replica, eval_x, model,
                         draws_per_replica, rng.substream(0x61766721));
  DefectGrid out;
  out.alpha = profile.alpha;
  out.beta = profile.beta;
  out.method = DefectMethod::FromResidual;
  out.x.assign(eval_x.begin(), eval_x.end());
  const std::size_t R = profile.per_replica.size();
  out.per_replica.assign(R, std::vector<double>(out.x.size(), 0.0));
  for (std::size_t j = 0; j < out.x.size(); ++j) {
    const std::size_t fidx = profile.index_of(out.x[j]);
    for (std::size_t r = 0; r < R; ++r) {
      out.per_replica[r][j] =
          avg.per_replica[r][j] - profile.per_replica[r][fidx];
    }
  }
  mean_and_spread(out.per_replica, {}, out.psi, out.stderr_);
  return out;
}

namespace {

double trapezoid_weight(std::span<const double> x, std::size_t j) {
  if (j == 0) return (x[1] - x[0]) / 2.0;
  if (j + 1 == x.size()) return (x[j] - x[j - 1]) / 2.0;
  return (x[j + 1] - x[j - 1]) / 2.0;
}

}  // namespace

DefectMoments defect_moments(const DefectGrid& defect) {
  const std::size_t n = defect.x.size();
  if (n < 3) throw std::invalid_argument("defect grid too short");
  double peak = 0.0;
  for (double v : defect.psi) peak = std::max(peak, std::fabs(v));
  for (std::size_t e : {std::size_t(0), n - 1}) {
    const double excess = std::fabs(defect.psi[e]) - 3.0 * defect.stderr_[e];
    if (excess > 1e-3 * peak) {
      throw std::runtime_error("defect grid boundary carries mass; widen grid");
    }
  }
  DefectMoments m;
  const std::size_t R = defect.per_replica.size();
  auto integrate = [&](const std::vector<double>& psi, double& c1, double& c2) {
    c1 = 0.0;
    c2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double w = trapezoid_weight(defect.x, j);
      c1 += w * psi[j];
      c2 -= w * (defect.x[j] + 1.0) * psi[j];
    }
  };
  integrate(defect.psi, m.c1, m.c2);
  if (R >= 2) {
    std::vector<double> c1r(R), c2r(R);
    for (std::size_t r = 0; r < R; ++r) {
      integrate(defect.per_replica[r], c1r[r], c2r[r]);
    }
    auto spread = [&](const std::vector<double>& v) {
      double mean = 0.0;
      for (double q : v) mean += q;
      mean /= double(R);
      double ss = 0.0;
      for (double q : v) ss += (q - mean) * (q - mean);
      return std::sqrt(ss / double(R - 1) / double(R));
    };
    m.c1_stderr = spread(c1r);
    m.c2_stderr = spread(c2r);
  } else {
    double v1 = 0.0, v2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double w = trapezoid_weight(defect.x, j);
      v1 += w * w * defect.stderr_[j] * defect.stderr_[j];
      v2 += w * w * (defect.x[j] + 1.0) * (defect.x[j] + 1.0) *
            defect.stderr_[j] * defect.stderr_[j];
    }
    m.c1_stderr = std::sqrt(v1);
    m.c2_stderr = std::sqrt(v2);
  }
  return m;
}

ResidualGrid poisson_residual(const TailProfile& profile,
                              const DefectGrid& defect, const ModelSpec& model,
                              std::uint64_t draws_per_replica,
                              RandomStream rng) {
  const std::size_t R = profile.per_replica.size();
  if (R != defect.per_replica.size()) {
    throw std::invalid_argument("poisson_residual: replica count mismatch");
  }
  std::vector<double> fx;
  fx.reserve(profile.grid.size());
  for (const auto& p : profile.grid) fx.push_back(p.x);

  const AveragedGrid avg =
      average_over_log_a(fx, profile.per_replica, defect.x, model,
                         draws_per_replica, rng.substream(0x61766721));

  ResidualGrid out;
  out.x = defect.x;
  out.clipped_fraction = avg.clipped_fraction;
  const std::size_t n = defect.x.size();
  std::vector<std::vector<double>> rows(R, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t fidx = profile.index_of(defect.x[j]);
    for (std::size_t r = 0; r < R; ++r) {
      rows[r][j] = avg.per_replica[r][j] - profile.per_replica[r][fidx] -
                   defect.per_replica[r][j];
    }
  }
  mean_and_spread(rows, {}, out.r, out.stderr_);
  for (std::size_t j = 0; j < n; ++j) {
    out.sup_abs = std::max(out.sup_abs, std::fabs(out.r[j]));
    if (out.stderr_[j] > 0.0) {
      out.sup_z = std::max(out.sup_z, std::fabs(out.r[j]) / out.stderr_[j]);
    }
  }
  return out;
}

std::vector<double> smooth(std::span<const double> g, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("smooth: h must be positive");
  std::vector<double> out(g.size(), 0.0);
  if (g.empty()) return out;
  const double decay = std::exp(-h);
  for (std::size_t j = 0; j + 1 < g.size(); ++j) {
    out[j + 1] = decay * out[j] + (h / 2.0) * (decay * g[j] + g[j + 1]);
  }
  return out;
}

ScalarEstimate crossing_mass_balance(const ModelSpec& model,
                                     const std::vector<LogHistogram>& replicas,
                                     std::uint64_t draws_per_replica,
                                     RandomStream rng) {
  if (model.kind == ChainKind::Extremal) {
    throw std::invalid_argument("crossing_mass_balance: needs a shift law");
  }
  const std::size_t R = replicas.size();
  std::vector<double> vals(R, 0.0);
  for (std::size_t r = 0; r < R; ++r) {
    RandomStream draw_rng = rng.substream(r);
    const double inv_norm = 1.0 / iref_mass(replicas[r]);
    double sum = 0.0;
    for (std::uint64_t d = 0; d < draws_per_replica; ++d) {
      const Innovation inn = sample_innovation(model, draw_rng);
      if (inn.b >= 0.0) {
        sum -= replicas[r].interval_mass(-inn.b / inn.a, 0.0) * inv_norm;
      } else {
        sum += replicas[r].interval_mass(0.0, -inn.b / inn.a) * inv_norm;
      }
    }
    vals[r] = sum / double(draws_per_replica);
  }
  ScalarEstimate est;
  for (double v : vals) est.value += v;
  est.value /= double(R);
  if (R >= 2) {
    double ss = 0.0;
    for (double v : vals) ss += (v - est.value) * (v - est.value);
    est.stderr_ = std::sqrt(ss / double(R - 1) / double(R));
  }
  return est;
}

PlateauLink plateau_identity_check(const PlateauFit& fit,
                                   const DefectMoments& moments,
                                   double sigma2) {
  PlateauLink link;
  link.c1_compatible_zero = std::fabs(moments.c1) <= 3.0 * moments.c1_stderr;
  link.plateau = fit.level;
  link.plateau_stderr = fit.level_stderr;
  link.slope = fit.slope;
  link.slope_stderr = fit.slope_stderr;
  link.predicted = 2.0 * moments.c2 / sigma2;
  link.predicted_stderr = 2.0 * moments.c2_stderr / sigma2;
  link.predicted_slope = 2.0 * moments.c1 / sigma2;
  link.predicted_slope_stderr = 2.0 * moments.c1_stderr / sigma2;
  if (link.c1_compatible_zero) {
    const double se = std::hypot(link.plateau_stderr, link.predicted_stderr);
    link.z = se > 0.0 ? (link.plateau - link.predicted) / se : 0.0;
    link.rel_gap = link.plateau != 0.0
                       ? std::fabs(link.plateau - link.predicted) /
                             std::fabs(link.plateau)
                       : 0.0;
  } else {
    link.used_slope_branch = true;
    const double se = std::hypot(link.slope_stderr, link.predicted_slope_stderr);
    link.slope_z = se > 0.0 ? (link.slope - link.predicted_slope) / se : 0.0;
  }
  return link;
}

}  // namespace critmc
