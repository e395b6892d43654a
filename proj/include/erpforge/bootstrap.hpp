#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "erpforge/alignment.hpp"
#include "erpforge/estimators.hpp"
#include "erpforge/rng.hpp"
#include "erpforge/types.hpp"

namespace erpforge {

// Discrete trial-count distribution with weights proportional to 1/k,
// biasing draws toward few-trial inputs.
struct TrialCountSampler {
  Index n_available = 1;
  Eigen::VectorXd weights;  // normalized; weights[k-1] is the mass of count k
};

TrialCountSampler make_trial_count_sampler(Index n_available);

Index sample_trial_count(const TrialCountSampler& sampler, std::uint64_t rng_seed);
Index sample_trial_count(const TrialCountSampler& sampler, Rng& rng);

// k trials drawn uniformly with replacement; deterministic per seed.
TrialSet bootstrap_sample(const TrialSet& trials, Index k, std::uint64_t rng_seed);

// First k trials in stored order.
TrialSet chronological_prefix(const TrialSet& trials, Index k);

enum class EvalMode { random, chronological };

EvalMode parse_eval_mode(const std::string& name);
const char* to_string(EvalMode mode);

struct BootstrapEvalReport {
  std::vector<Index> k_grid;
  std::vector<double> rmse_per_k;
  std::vector<double> r2_per_k;
  Eigen::MatrixXd per_bootstrap_rmse;  // k_grid.size() x n_bootstraps
  Index n_bootstraps = 0;
  EvalMode mode = EvalMode::random;
};

using Estimator = std::function<Erp(const TrialSet&)>;

// Split-half evaluation: the target is the plain average of the target half;
// for every k the estimator consumes B bootstrap input samples (or the single
// chronological prefix) and the report collects RMSE and R-squared per k.
// Per-sample seeds derive from (seed, k, b), so the grid is reproducible
// independent of evaluation order.
BootstrapEvalReport evaluate_estimator(const SplitHalves& halves, const Estimator& estimator,
                                       const std::vector<Index>& k_grid, Index n_bootstraps,
                                       EvalMode mode, std::uint64_t rng_seed);

enum class EstimatorKind { simple, tanh, dtw, woody, ride, global_template, nearest_neighbor };

EstimatorKind parse_estimator(const std::string& name);
const char* to_string(EstimatorKind kind);

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::simple;
  TanhParams tanh{};
  std::optional<MeasureWindow> window;  // woody alignment window; defaults to the full span
  int woody_max_iters = 20;
  std::optional<RideConfig> ride;
  std::optional<ErpLibrary> library;  // template-based methods
  std::string task;
};

Estimator make_estimator(const EstimatorConfig& config);

}  // namespace erpforge
