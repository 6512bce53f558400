#include "critmc/ladder.hpp"

#include <cmath>
#include <stdexcept>

namespace critmc {

LadderSession::LadderSession(const ModelSpec& model, RandomStream chain_rng,
                             LadderOptions opt)
    : model_(model),
      rng_(chain_rng),
      fresh_rng_(chain_rng.substream(0x66726573)),
      opt_(opt) {
  if (model.regime != Regime::Critical) {
    throw std::invalid_argument("ladder: requires the critical regime");
  }
  if (opt_.cycle_cap == 0) {
    throw std::invalid_argument("ladder: cycle cap must be positive");
  }
  double x0 = 0.0;
  if (model.kind == ChainKind::Letac && model.b_law) {
    x0 = model.delta;  // supp nu lies in [delta, inf)
  }
  state_ = WideReal::from_double(x0);
  scratch_.reserve(std::min<std::uint64_t>(opt_.cycle_cap, 1u << 20));
}

bool LadderSession::run_cycle(double& cycle_drop, std::uint64_t& length) {
  scratch_.clear();
  for (auto& v : cycle_fsum_) v = 0.0;
  for (auto& v : cycle_fexcl_) v = 0;

  const int thin = opt_.thin_fresh_draw;
  auto visit = [&](const WideReal& x, double s) {
    scratch_.push_back(bin_code(opt_.geometry, x));
    for (std::size_t i = 0; i < fns_.size(); ++i) {
      const Functional& f = fns_[i];
      double weight = 1.0;
      if (thin > 1 && functional_uses_fresh_draw(f.kind)) {
        if (fresh_rng_.uniform01() * thin >= 1.0) continue;
        weight = double(thin);
      }
      if (auto v = eval_functional(f, x, s, model_, fresh_rng_)) {
        cycle_fsum_[i] += weight * *v;
      } else {
        ++cycle_fexcl_[i];
      }
    }
  };

  WideReal x = state_;
  KahanSum s;
  visit(x, 0.0);  // X_0 itself belongs to the cycle
  for (std::uint64_t n = 1;; ++n) {
    const Innovation inn = sample_innovation(model_, rng_);
    x = apply_step(model_.kind, x, inn);
    s.add(inn.log_a);
    if (!x.is_finite()) {
      status_ = RunStatus::AbortedNonFinite;
      return false;
    }
    if (s.value() < 0.0) {  // strict descent: epoch
      cycle_drop = s.value();
      length = n;
      state_ = x;
      return true;
    }
    if (n >= opt_.cycle_cap) {
      length = n;
      return false;  // cap hit: roll back, restart from the same state
    }
    visit(x, s.value());
  }
}

BurnInResult LadderSession::burn_in(std::uint64_t n_cycles) {
  BurnInResult r;
  fns_.clear();
  cycle_fsum_.clear();
  cycle_fexcl_.clear();
  std::vector<double> drops;
  drops.reserve(n_cycles);
  while (drops.size() < n_cycles) {
    double drop = 0.0;
    std::uint64_t len = 0;
    if (run_cycle(drop, len)) {
      drops.push_back(drop);
      r.steps_used += len;
    } else {
      if (status_ != RunStatus::Complete) break;
      ++r.excluded_cycles;
      r.steps_used += len;
    }
  }
  r.end_state = state_.to_double();
  if (!drops.empty()) {
    double total = 0.0;
    for (double d : drops) total += d;
    r.mean_cycle_drop = total / double(drops.size());
    if (drops.size() >= 4) {
      const std::size_t half = drops.size() / 2;
      double first = 0.0, second = 0.0;
      for (std::size_t i = 0; i < half; ++i) first += drops[i];
      for (std::size_t i = half; i < drops.size(); ++i) second += drops[i];
      first /= double(half);
      second /= double(drops.size() - half);
      const double scale = std::fabs(r.mean_cycle_drop);
      r.mean_stabilized = scale > 0.0 && std::fabs(second - first) <= 0.01 * scale;
    }
  }
  return r;
}

LadderRunResult LadderSession::accumulate(std::uint64_t n_cycles,
                                          const std::vector<Functional>& functionals,
                                          int n_batches) {
  LadderRunResult out{LogHistogram(opt_.geometry)};
  fns_ = functionals;
  cycle_fsum_.assign(fns_.size(), 0.0);
  cycle_fexcl_.assign(fns_.size(), 0);

  // Fraction of each positive bin lying inside the reference interval,
  // for the per-batch normalization channel.
  const double lr = opt_.geometry.log_rho;
  const double plo = std::log(opt_.iref_lo) / lr;
  const double phi = std::log(opt_.iref_hi) / lr;
  const std::int32_t ik0 = std::int32_t(std::floor(plo));
  const std::int32_t ik1 = std::int32_t(std::ceil(phi)) - 1;
  std::vector<double> ifrac;
  for (std::int32_t k = ik0; k <= ik1; ++k) {
    const double a = std::max(plo, double(k));
    const double b = std::min(phi, double(k) + 1.0);
    ifrac.push_back(std::max(0.0, b - a));
  }

  if (n_batches < 1) n_batches = 1;
  const std::uint64_t batch_size =
      (n_cycles + std::uint64_t(n_batches) - 1) / std::uint64_t(n_batches);
  CycleBatch batch;
  batch.fsum.assign(fns_.size(), 0.0);
  batch.fexcluded.assign(fns_.size(), 0);

  auto flush_batch = [&] {
    if (batch.cycles > 0) out.batches.push_back(batch);
    batch = CycleBatch{};
    batch.fsum.assign(fns_.size(), 0.0);
    batch.fexcluded.assign(fns_.size(), 0);
  };

  while (out.committed_cycles < n_cycles) {
    double drop = 0.0;
    std::uint64_t len = 0;
    if (!run_cycle(drop, len)) {
      if (status_ != RunStatus::Complete) break;
      ++out.excluded_cycles;
      out.excluded_steps += len;
      continue;
    }
    for (const BinCode code : scratch_) {
      out.hist.record_code(code);
      if (!(code & 1) && code != kNearZeroBin && code != kOverflowPosBin) {
        const std::int32_t k = code >> 1;
        if (k >= ik0 && k <= ik1) batch.iref_mass += ifrac[k - ik0];
      }
    }
    ++batch.cycles;
    batch.steps += scratch_.size();
    for (std::size_t i = 0; i < fns_.size(); ++i) {
      batch.fsum[i] += cycle_fsum_[i];
      batch.fexcluded[i] += cycle_fexcl_[i];
    }
    ++out.committed_cycles;
    out.committed_steps += scratch_.size();
    out.sum_cycle_drop += drop;
    out.sum_cycle_drop_sq += drop * drop;
    if (batch.cycles >= batch_size) flush_batch();
  }
  flush_batch();
  out.status = status_;
  fns_.clear();
  return out;
}

}  // namespace critmc
