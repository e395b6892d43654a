#include "erpforge/bootstrap.hpp"

#include "erpforge/measures.hpp"

namespace erpforge {

TrialCountSampler make_trial_count_sampler(Index n_available) {
  if (n_available < 1) throw Error(ErrorKind::size, "sampler needs at least one trial");
  TrialCountSampler sampler;
  sampler.n_available = n_available;
  sampler.weights.resize(n_available);
  for (Index k = 1; k <= n_available; ++k)
    sampler.weights[k - 1] = 1.0 / static_cast<double>(k);
  sampler.weights /= sampler.weights.sum();
  return sampler;
}

Index sample_trial_count(const TrialCountSampler& sampler, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  double cumulative = 0.0;
  for (Index k = 1; k <= sampler.n_available; ++k) {
    cumulative += sampler.weights[k - 1];
    if (u < cumulative) return k;
  }
  return sampler.n_available;
}

Index sample_trial_count(const TrialCountSampler& sampler, std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  return sample_trial_count(sampler, rng);
}

TrialSet bootstrap_sample(const TrialSet& trials, Index k, std::uint64_t rng_seed) {
  validate(trials);
  if (k < 1) throw Error(ErrorKind::size, "bootstrap sample size must be at least 1");
  Rng rng(rng_seed);
  std::uniform_int_distribution<Index> pick(0, trials.n_trials() - 1);
  TrialSet out = trials;
  out.data.clear();
  out.data.reserve(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i)
    out.data.push_back(trials.data[static_cast<std::size_t>(pick(rng))]);
  return out;
}

TrialSet chronological_prefix(const TrialSet& trials, Index k) {
  validate(trials);
  if (k < 1 || k > trials.n_trials())
    throw Error(ErrorKind::size, "prefix length must lie in [1, n_trials]");
  TrialSet out = trials;
  out.data.assign(trials.data.begin(), trials.data.begin() + k);
  return out;
}

EvalMode parse_eval_mode(const std::string& name) {
  if (name == "random") return EvalMode::random;
  if (name == "chronological") return EvalMode::chronological;
  throw Error(ErrorKind::config, "unknown mode '" + name + "' (use random|chronological)");
}

const char* to_string(EvalMode mode) {
  return mode == EvalMode::random ? "random" : "chronological";
}

BootstrapEvalReport evaluate_estimator(const SplitHalves& halves, const Estimator& estimator,
                                       const std::vector<Index>& k_grid, Index n_bootstraps,
                                       EvalMode mode, std::uint64_t rng_seed) {
  validate(halves.input_half);
  validate(halves.target_half);
  if (k_grid.empty()) throw Error(ErrorKind::size, "k grid must not be empty");
  if (mode == EvalMode::random && n_bootstraps < 1)
    throw Error(ErrorKind::size, "need at least one bootstrap");

  const Erp target = simple_average(halves.target_half);
  const Index b_count = mode == EvalMode::chronological ? 1 : n_bootstraps;

  BootstrapEvalReport report;
  report.k_grid = k_grid;
  report.n_bootstraps = b_count;
  report.mode = mode;
  report.per_bootstrap_rmse.resize(static_cast<Index>(k_grid.size()), b_count);

  for (std::size_t ki = 0; ki < k_grid.size(); ++ki) {
    const Index k = k_grid[ki];
    std::vector<Erp> predictions;
    predictions.reserve(static_cast<std::size_t>(b_count));
    for (Index b = 0; b < b_count; ++b) {
      TrialSet sample =
          mode == EvalMode::chronological
              ? chronological_prefix(halves.input_half, k)
              : bootstrap_sample(halves.input_half, k,
                                 mix_seed(rng_seed, static_cast<std::uint64_t>(k),
                                          static_cast<std::uint64_t>(b)));
      try {
        predictions.push_back(estimator(sample));
      } catch (const Error& e) {
        throw Error(e.kind(), "estimator failed at k=" + std::to_string(k) + ", bootstrap " +
                                  std::to_string(b) + ": " + e.what());
      }
      report.per_bootstrap_rmse(static_cast<Index>(ki), b) =
          rmse({predictions.back()}, target);
    }
    report.rmse_per_k.push_back(rmse(predictions, target));
    report.r2_per_k.push_back(r_squared(predictions, target));
  }
  return report;
}

EstimatorKind parse_estimator(const std::string& name) {
  if (name == "simple") return EstimatorKind::simple;
  if (name == "tanh") return EstimatorKind::tanh;
  if (name == "dtw") return EstimatorKind::dtw;
  if (name == "woody") return EstimatorKind::woody;
  if (name == "ride") return EstimatorKind::ride;
  if (name == "template") return EstimatorKind::global_template;
  if (name == "nn") return EstimatorKind::nearest_neighbor;
  throw Error(ErrorKind::config,
              "unknown estimator '" + name + "' (use simple|tanh|dtw|woody|ride|template|nn)");
}

const char* to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::simple: return "simple";
    case EstimatorKind::tanh: return "tanh";
    case EstimatorKind::dtw: return "dtw";
    case EstimatorKind::woody: return "woody";
    case EstimatorKind::ride: return "ride";
    case EstimatorKind::global_template: return "template";
    case EstimatorKind::nearest_neighbor: return "nn";
  }
  return "?";
}

Estimator make_estimator(const EstimatorConfig& config) {
  switch (config.kind) {
    case EstimatorKind::simple:
      return [](const TrialSet& t) { return simple_average(t); };
    case EstimatorKind::tanh:
      return [params = config.tanh](const TrialSet& t) { return tanh_weighted_average(t, params); };
    case EstimatorKind::dtw:
      return [](const TrialSet& t) { return dtw_average(t); };
    case EstimatorKind::woody:
      return [window = config.window, max_iters = config.woody_max_iters](const TrialSet& t) {
        const MeasureWindow w =
            window.value_or(MeasureWindow{t.axis.t0_ms, t.axis.end_ms(), Polarity::positive});
        return woody_align(t, w, max_iters).aligned_average;
      };
    case EstimatorKind::ride:
      if (!config.ride)
        throw Error(ErrorKind::config, "ride estimator needs component windows");
      return [ride = *config.ride](const TrialSet& t) {
        return ride_decompose(t, ride).reconstruction;
      };
    case EstimatorKind::global_template:
      if (!config.library) throw Error(ErrorKind::config, "template estimator needs a library");
      return [library = *config.library, task = config.task](const TrialSet&) {
        return global_template(library, task);
      };
    case EstimatorKind::nearest_neighbor:
      if (!config.library)
        throw Error(ErrorKind::config, "nearest-neighbor estimator needs a library");
      return [library = *config.library, task = config.task](const TrialSet& t) {
        return nearest_neighbor_template(library, task, simple_average(t));
      };
  }
  throw Error(ErrorKind::config, "unhandled estimator kind");
}

}  // namespace erpforge
