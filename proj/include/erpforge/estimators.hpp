#pragma once

#include <utility>

#include "erpforge/types.hpp"

namespace erpforge {

// Robust tanh weighting (rank-based outlier downweighting).
struct TanhParams {
  double c = 0.1;  // curvature
  double v = 0.0;  // offset
};

struct ErpLibrary {
  struct Entry {
    std::string subject_id;
    std::string task_id;
    Erp erp;
  };
  std::vector<Entry> entries;
};

// Point-wise mean over the trial axis.
Erp simple_average(const TrialSet& trials);

// Weights over ascending-sorted ranks 1..K for one time point: the piecewise
// tanh kappa, clipped at zero and normalized to sum 1.
Eigen::VectorXd tanh_rank_weights(Index n_trials, const TanhParams& params);

Erp tanh_weighted_average(const TrialSet& trials, const TanhParams& params = {});

// Minimal-cost monotone alignment path between reference and signal under
// squared-difference point cost. Steps are limited to (1,1), (1,0) and (0,1)
// in (reference, signal) index space, with endpoints pinned to (0,0) and
// (T-1, T-1). Cost ties prefer the diagonal, then the reference-advancing
// step.
std::vector<std::pair<Index, Index>> dtw_path(const Eigen::VectorXd& reference,
                                              const Eigen::VectorXd& signal);

// Warp a signal onto the reference grid along the DTW path. Path steps that
// do not advance the reference index are dropped, so each reference index
// keeps the first signal value matched to it.
Eigen::VectorXd dtw_warp(const Eigen::VectorXd& reference, const Eigen::VectorXd& signal);

// Average of all trials after warping each one onto the simple average.
// Multi-channel sets are processed per channel.
Erp dtw_average(const TrialSet& trials);

// Mean of all library entries recorded for the task.
Erp global_template(const ErpLibrary& library, const std::string& task);

// Library entry of the task minimizing Frobenius distance to the query;
// ties break toward the lowest entry index.
Erp nearest_neighbor_template(const ErpLibrary& library, const std::string& task,
                              const Erp& query);

}  // namespace erpforge
