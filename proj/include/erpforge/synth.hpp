#pragma once

#include <cstdint>

#include "erpforge/types.hpp"

namespace erpforge {

// Jittered two-bump ERP simulator: a positive P300-like bump whose latency
// varies uniformly across trials, preceded by a negative N200-like bump at a
// fixed lead, plus white noise, amplitude variation and linear baseline drift.
struct SimConfig {
  Index n_trials = 50;
  double sampling_rate_hz = 500.0;
  double t_start_ms = -200.0;
  double t_end_ms = 800.0;
  double p300_latency_min_ms = 300.0;
  double p300_latency_max_ms = 500.0;
  double n200_lead_ms = 100.0;
  double noise_scale = 1.0;   // noise standard deviation per sample, microvolts
  double noise_smooth_ms = 0.0;  // Gaussian autocorrelation scale; 0 keeps the noise white
  double amp_jitter = 0.2;    // relative amplitude variation, +-20% by default
  double drift_scale = 0.5;   // drift slope standard deviation, microvolts per second
  std::uint64_t rng_seed = 0;
};

struct SimResult {
  TrialSet trials;
  std::vector<double> true_latencies_ms;  // P300 peak time per trial
  Erp template_erp;                       // noise-free waveform at the mid-range latency
};

SimResult simulate(const SimConfig& config);

struct LatencyScore {
  double correlation;
  double centered_rmse_ms;
};

// Pearson correlation plus RMSE after removing each series' mean.
LatencyScore score_latency_recovery(const std::vector<double>& true_ms,
                                    const std::vector<double>& est_ms);

}  // namespace erpforge
