#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rbcscan/rng.hpp"

namespace rbcscan::scanning {

/// Scan-protocol constants: N cells, seconds per cell scan, detector latency,
/// and the probability that the detected candidate cell holds the receiver.
struct ScanConfig {
  std::size_t n_cells = 64;
  double t_scan_s = 2.0;
  double t_detect_s = 0.2;
  double ap = 0.70;

  void validate() const;
  friend bool operator==(const ScanConfig&, const ScanConfig&) = default;
};

enum class Strategy { kTraditional, kGuided };
std::string_view to_string(Strategy s) noexcept;

struct ScanTrialResult {
  std::size_t cells_scanned = 0;
  double elapsed_s = 0.0;
  bool found = false;
  Strategy strategy = Strategy::kTraditional;
};

struct SimulationSummary {
  std::size_t trials = 0;
  double mean_time_s = 0.0;
  double stderr_s = 0.0;
  // Absent when no closed form exists (several candidates or receivers).
  std::optional<double> analytic_time_s;

  std::optional<double> relative_error() const;
};

/// Expected exhaustive-scan time (1 + N) T_s / 2.
double t1_analytic(const ScanConfig& cfg);

/// Expected detection-guided time T_d + AP T_s + (1 - AP)(1 + N/2) T_s.
double t2_analytic(const ScanConfig& cfg);

struct Breakeven {
  double ap = 0.0;        // clamped to [0, 1]
  double raw_ap = 0.0;    // unclamped solution
  bool in_range = true;   // raw_ap within [0, 1]
};

/// AP at which the guided and exhaustive expectations coincide.
Breakeven breakeven_ap(const ScanConfig& cfg);

// ---- single episodes --------------------------------------------------------

/// Deterministic episode: scan `candidates` in order, then every other cell in
/// row-major order, stopping at the first cell in `true_cells`. Detection time
/// is charged once when the strategy is guided.
ScanTrialResult run_episode(const ScanConfig& cfg, std::span<const std::size_t> candidates,
                            std::span<const std::size_t> true_cells, Strategy strategy);

/// Receiver uniform over the N cells, row-major scan.
ScanTrialResult traditional_trial(const ScanConfig& cfg, Rng& rng);

/// Receiver uniform over the N cells; the candidate is the receiver's cell with
/// probability AP and otherwise uniform over the remaining N - 1 cells.
ScanTrialResult guided_trial(const ScanConfig& cfg, Rng& rng);

// ---- Monte Carlo ------------------------------------------------------------

/// Trials per RNG stream. Batch b draws from stream_seed(seed, b).
inline constexpr std::size_t kBatchSize = 1 << 16;

struct RunOptions {
  std::size_t workers = 1;
};

SimulationSummary simulate_traditional(const ScanConfig& cfg, std::uint64_t rng_seed,
                                       std::size_t trials, const RunOptions& run = {});

SimulationSummary simulate_guided(const ScanConfig& cfg, std::uint64_t rng_seed, std::size_t trials,
                                  const RunOptions& run = {});

/// Fixed candidates and receiver cells. Every trial follows the same trace.
SimulationSummary simulate_guided_multi(const ScanConfig& cfg, std::span<const std::size_t> candidate_cells,
                                        std::span<const std::size_t> true_cells, std::uint64_t rng_seed,
                                        std::size_t trials, const RunOptions& run = {});

/// Produces one episode's trial from a per-trial RNG. Must be thread-safe.
using TrialSampler = std::function<ScanTrialResult(Rng&)>;

/// Generic driver: trial i of batch b uses the batch's stream. Summary
/// statistics are accumulated as exact integer moments of cells_scanned,
/// so the result is identical for any worker count.
SimulationSummary simulate(const ScanConfig& cfg, std::uint64_t rng_seed, std::size_t trials,
                           Strategy strategy, const TrialSampler& sampler, const RunOptions& run = {});

}  // namespace rbcscan::scanning
