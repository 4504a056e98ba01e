#include "rbcscan/scanning.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <string>

#include "rbcscan/errors.hpp"

namespace rbcscan::scanning {

void ScanConfig::validate() const {
  if (n_cells < 1) throw InvariantError("scan config: n_cells must be >= 1");
  if (!(t_scan_s > 0.0) || !std::isfinite(t_scan_s)) {
    throw InvariantError("scan config: t_scan_s must be positive");
  }
  if (!(t_detect_s >= 0.0) || !std::isfinite(t_detect_s)) {
    throw InvariantError("scan config: t_detect_s must be non-negative");
  }
  if (!(ap >= 0.0 && ap <= 1.0)) throw InvariantError("scan config: ap must lie in [0, 1]");
}

std::string_view to_string(Strategy s) noexcept {
  return s == Strategy::kGuided ? "guided" : "traditional";
}

std::optional<double> SimulationSummary::relative_error() const {
  if (!analytic_time_s || *analytic_time_s == 0.0) return std::nullopt;
  return std::abs(mean_time_s - *analytic_time_s) / *analytic_time_s;
}

double t1_analytic(const ScanConfig& cfg) {
  cfg.validate();
  return (1.0 + static_cast<double>(cfg.n_cells)) * cfg.t_scan_s / 2.0;
}

double t2_analytic(const ScanConfig& cfg) {
  cfg.validate();
  const double n = static_cast<double>(cfg.n_cells);
  return cfg.t_detect_s + cfg.ap * cfg.t_scan_s + (1.0 - cfg.ap) * (1.0 + n / 2.0) * cfg.t_scan_s;
}

Breakeven breakeven_ap(const ScanConfig& cfg) {
  const double n = static_cast<double>(cfg.n_cells);
  const double denom = n * cfg.t_scan_s / 2.0;
  if (!(denom > 0.0)) throw DomainError("breakeven_ap: N * T_s must be positive");
  if (cfg.n_cells < 2) throw DomainError("breakeven_ap: needs at least two cells");
  const double raw =
      (cfg.t_detect_s + (1.0 + n / 2.0) * cfg.t_scan_s - (1.0 + n) * cfg.t_scan_s / 2.0) / denom;
  Breakeven b;
  b.raw_ap = raw;
  b.ap = std::clamp(raw, 0.0, 1.0);
  b.in_range = raw >= 0.0 && raw <= 1.0;
  return b;
}

namespace {

ScanTrialResult make_result(const ScanConfig& cfg, std::size_t cells, bool found, Strategy strategy) {
  const double detect = strategy == Strategy::kGuided ? cfg.t_detect_s : 0.0;
  return {cells, detect + static_cast<double>(cells) * cfg.t_scan_s, found, strategy};
}

void check_cells(const ScanConfig& cfg, std::span<const std::size_t> cells, const char* what) {
  for (std::size_t c : cells) {
    if (c >= cfg.n_cells) {
      throw UsageError(std::string(what) + ": cell " + std::to_string(c) + " out of range");
    }
  }
}

}  // namespace

ScanTrialResult run_episode(const ScanConfig& cfg, std::span<const std::size_t> candidates,
                            std::span<const std::size_t> true_cells, Strategy strategy) {
  // 1-based scan position of each cell: candidates first, then the rest row-major.
  std::size_t best = cfg.n_cells + 1;
  for (std::size_t t : true_cells) {
    std::size_t pos = 0;
    const auto hit = std::find(candidates.begin(), candidates.end(), t);
    if (hit != candidates.end()) {
      pos = static_cast<std::size_t>(hit - candidates.begin()) + 1;
    } else {
      const auto before = static_cast<std::size_t>(
          std::count_if(candidates.begin(), candidates.end(), [t](std::size_t c) { return c < t; }));
      pos = candidates.size() + (t - before) + 1;
    }
    best = std::min(best, pos);
  }
  if (best > cfg.n_cells) return make_result(cfg, cfg.n_cells, false, strategy);
  return make_result(cfg, best, true, strategy);
}

ScanTrialResult traditional_trial(const ScanConfig& cfg, Rng& rng) {
  const std::uint64_t receiver = rng.below(cfg.n_cells);
  return make_result(cfg, static_cast<std::size_t>(receiver) + 1, true, Strategy::kTraditional);
}

ScanTrialResult guided_trial(const ScanConfig& cfg, Rng& rng) {
  const std::uint64_t receiver = rng.below(cfg.n_cells);
  if (rng.bernoulli(cfg.ap)) return make_result(cfg, 1, true, Strategy::kGuided);
  // wrong candidate, uniform over the other cells
  std::uint64_t candidate = rng.below(cfg.n_cells - 1);
  if (candidate >= receiver) ++candidate;
  const std::size_t rank_in_rest = receiver - (candidate < receiver ? 1 : 0);
  return make_result(cfg, rank_in_rest + 2, true, Strategy::kGuided);
}

namespace {

struct Moments {
  std::uint64_t n = 0;
  uint128 sum = 0;
  uint128 sum_sq = 0;
};

Moments run_batch(std::uint64_t seed, std::size_t batch, std::size_t count, const TrialSampler& sampler) {
  Rng rng(stream_seed(seed, batch));
  Moments m;
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t k = sampler(rng).cells_scanned;
    ++m.n;
    m.sum += k;
    m.sum_sq += static_cast<uint128>(k) * k;
  }
  return m;
}

}  // namespace

SimulationSummary simulate(const ScanConfig& cfg, std::uint64_t rng_seed, std::size_t trials,
                           Strategy strategy, const TrialSampler& sampler, const RunOptions& run) {
  cfg.validate();
  if (trials == 0) throw UsageError("simulation needs at least one trial");

  const std::size_t n_batches = (trials + kBatchSize - 1) / kBatchSize;
  auto batch_len = [&](std::size_t b) { return std::min(kBatchSize, trials - b * kBatchSize); };

  std::vector<Moments> parts(n_batches);
  const std::size_t workers = std::clamp<std::size_t>(run.workers, 1, n_batches);
  if (workers == 1) {
    for (std::size_t b = 0; b < n_batches; ++b) parts[b] = run_batch(rng_seed, b, batch_len(b), sampler);
  } else {
    std::vector<std::future<void>> futures;
    for (std::size_t w = 0; w < workers; ++w) {
      futures.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t b = w; b < n_batches; b += workers) {
          parts[b] = run_batch(rng_seed, b, batch_len(b), sampler);
        }
      }));
    }
    for (auto& f : futures) f.get();
  }

  Moments total;
  for (const auto& p : parts) {
    total.n += p.n;
    total.sum += p.sum;
    total.sum_sq += p.sum_sq;
  }

  const auto n = static_cast<long double>(total.n);
  const long double mean_k = static_cast<long double>(total.sum) / n;
  long double var_k = 0.0L;
  if (total.n > 1) {
    // n * sum_sq - sum^2 is exact in 128 bits for any realistic trial count
    const uint128 centered = static_cast<uint128>(total.n) * total.sum_sq - total.sum * total.sum;
    var_k = static_cast<long double>(centered) / (n * (n - 1.0L));
  }

  SimulationSummary s;
  s.trials = trials;
  const double detect = strategy == Strategy::kGuided ? cfg.t_detect_s : 0.0;
  s.mean_time_s = detect + static_cast<double>(mean_k * cfg.t_scan_s);
  s.stderr_s = static_cast<double>(std::sqrt(var_k / n) * cfg.t_scan_s);
  return s;
}

SimulationSummary simulate_traditional(const ScanConfig& cfg, std::uint64_t rng_seed, std::size_t trials,
                                       const RunOptions& run) {
  auto s = simulate(cfg, rng_seed, trials, Strategy::kTraditional,
                    [&cfg](Rng& rng) { return traditional_trial(cfg, rng); }, run);
  s.analytic_time_s = t1_analytic(cfg);
  return s;
}

SimulationSummary simulate_guided(const ScanConfig& cfg, std::uint64_t rng_seed, std::size_t trials,
                                  const RunOptions& run) {
  cfg.validate();
  if (cfg.n_cells < 2) throw UsageError("guided simulation needs at least two cells");
  auto s = simulate(cfg, rng_seed, trials, Strategy::kGuided,
                    [&cfg](Rng& rng) { return guided_trial(cfg, rng); }, run);
  s.analytic_time_s = t2_analytic(cfg);
  return s;
}

SimulationSummary simulate_guided_multi(const ScanConfig& cfg, std::span<const std::size_t> candidate_cells,
                                        std::span<const std::size_t> true_cells, std::uint64_t rng_seed,
                                        std::size_t trials, const RunOptions& run) {
  cfg.validate();
  if (candidate_cells.empty()) throw UsageError("simulate_guided_multi: candidate list is empty");
  if (true_cells.empty()) throw UsageError("simulate_guided_multi: no receiver cells given");
  check_cells(cfg, candidate_cells, "simulate_guided_multi candidates");
  check_cells(cfg, true_cells, "simulate_guided_multi receivers");
  std::vector<std::size_t> sorted(candidate_cells.begin(), candidate_cells.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw UsageError("simulate_guided_multi: duplicate candidate cells");
  }
  return simulate(
      cfg, rng_seed, trials, Strategy::kGuided,
      [&](Rng&) { return run_episode(cfg, candidate_cells, true_cells, Strategy::kGuided); }, run);
}

}  // namespace rbcscan::scanning
