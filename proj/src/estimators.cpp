#include "erpforge/estimators.hpp"

#include <algorithm>
#include <cmath>

namespace erpforge {

namespace {

Erp erp_like(const TrialSet& trials) {
  Erp out;
  out.axis = trials.axis;
  out.channel_names = trials.channel_names;
  out.data.setZero(trials.n_channels(), trials.n_samples());
  return out;
}

}  // namespace

Erp simple_average(const TrialSet& trials) {
  validate(trials);
  Erp out = erp_like(trials);
  for (const auto& trial : trials.data) out.data += trial;
  out.data /= static_cast<double>(trials.n_trials());
  return out;
}

Eigen::VectorXd tanh_rank_weights(Index n_trials, const TanhParams& params) {
  if (!(params.c > 0.0)) throw Error(ErrorKind::domain, "tanh curvature c must be positive");
  if (params.v < 0.0) throw Error(ErrorKind::domain, "tanh offset v must be non-negative");
  const double k = static_cast<double>(n_trials);
  Eigen::VectorXd kappa(n_trials);
  for (Index rank = 1; rank <= n_trials; ++rank) {
    const double i = static_cast<double>(rank);
    kappa[rank - 1] = i < k / 2.0 ? std::tanh(params.c * (i + 1.0)) - params.v
                                  : -std::tanh(params.c * (i - k)) + params.v;
  }
  kappa = kappa.cwiseMax(0.0);
  const double total = kappa.sum();
  if (!(total > 0.0))
    throw Error(ErrorKind::degenerate_weights, "all tanh weights clipped to zero");
  return kappa / total;
}

Erp tanh_weighted_average(const TrialSet& trials, const TanhParams& params) {
  validate(trials);
  const Index k = trials.n_trials();
  if (k < 2) throw Error(ErrorKind::size, "tanh weighting needs at least 2 trials");
  const Eigen::VectorXd weights = tanh_rank_weights(k, params);

  Erp out = erp_like(trials);
  std::vector<double> column(static_cast<std::size_t>(k));
  for (Index c = 0; c < out.n_channels(); ++c) {
    for (Index t = 0; t < out.n_samples(); ++t) {
      for (Index i = 0; i < k; ++i) column[static_cast<std::size_t>(i)] = trials.data[i](c, t);
      std::sort(column.begin(), column.end());
      double acc = 0.0;
      for (Index i = 0; i < k; ++i) acc += weights[i] * column[static_cast<std::size_t>(i)];
      out.data(c, t) = acc;
    }
  }
  return out;
}

std::vector<std::pair<Index, Index>> dtw_path(const Eigen::VectorXd& reference,
                                              const Eigen::VectorXd& signal) {
  const Index n = reference.size();
  const Index m = signal.size();
  if (n < 1 || m < 1) throw Error(ErrorKind::size, "DTW inputs must be non-empty");

  auto cost = [&](Index i, Index j) {
    const double d = reference[i] - signal[j];
    return d * d;
  };

  Eigen::MatrixXd acc(n, m);
  acc(0, 0) = cost(0, 0);
  for (Index i = 1; i < n; ++i) acc(i, 0) = cost(i, 0) + acc(i - 1, 0);
  for (Index j = 1; j < m; ++j) acc(0, j) = cost(0, j) + acc(0, j - 1);
  for (Index i = 1; i < n; ++i)
    for (Index j = 1; j < m; ++j)
      acc(i, j) = cost(i, j) + std::min({acc(i - 1, j - 1), acc(i - 1, j), acc(i, j - 1)});

  std::vector<std::pair<Index, Index>> path;
  Index i = n - 1;
  Index j = m - 1;
  path.emplace_back(i, j);
  while (i > 0 || j > 0) {
    if (i == 0) {
      --j;
    } else if (j == 0) {
      --i;
    } else {
      const double diag = acc(i - 1, j - 1);
      const double up = acc(i - 1, j);
      const double left = acc(i, j - 1);
      if (diag <= up && diag <= left) {
        --i;
        --j;
      } else if (up <= left) {
        --i;
      } else {
        --j;
      }
    }
    path.emplace_back(i, j);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

Eigen::VectorXd dtw_warp(const Eigen::VectorXd& reference, const Eigen::VectorXd& signal) {
  const auto path = dtw_path(reference, signal);
  Eigen::VectorXd warped(reference.size());
  Index filled = -1;
  for (const auto& [i, j] : path) {
    if (i > filled) {
      warped[i] = signal[j];
      filled = i;
    }
  }
  return warped;
}

Erp dtw_average(const TrialSet& trials) {
  const Erp reference = simple_average(trials);
  Erp out = erp_like(trials);
  for (Index c = 0; c < out.n_channels(); ++c) {
    const Eigen::VectorXd ref = reference.data.row(c);
    for (const auto& trial : trials.data)
      out.data.row(c) += dtw_warp(ref, trial.row(c)).transpose();
  }
  out.data /= static_cast<double>(trials.n_trials());
  return out;
}

namespace {

std::vector<const ErpLibrary::Entry*> task_entries(const ErpLibrary& library,
                                                   const std::string& task) {
  std::vector<const ErpLibrary::Entry*> out;
  for (const auto& entry : library.entries)
    if (entry.task_id == task) out.push_back(&entry);
  if (out.empty())
    throw Error(ErrorKind::lookup, "library has no entries for task '" + task + "'");
  return out;
}

}  // namespace

Erp global_template(const ErpLibrary& library, const std::string& task) {
  const auto entries = task_entries(library, task);
  Erp out = entries.front()->erp;
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i]->erp.data.rows() != out.data.rows() ||
        entries[i]->erp.data.cols() != out.data.cols())
      throw Error(ErrorKind::shape, "library entries disagree on shape");
    out.data += entries[i]->erp.data;
  }
  out.data /= static_cast<double>(entries.size());
  return out;
}

Erp nearest_neighbor_template(const ErpLibrary& library, const std::string& task,
                              const Erp& query) {
  const auto entries = task_entries(library, task);
  const ErpLibrary::Entry* best = nullptr;
  double best_distance = 0.0;
  for (const auto* entry : entries) {
    if (entry->erp.data.rows() != query.data.rows() ||
        entry->erp.data.cols() != query.data.cols())
      throw Error(ErrorKind::shape, "query shape does not match the library");
    const double distance = (entry->erp.data - query.data).norm();
    if (best == nullptr || distance < best_distance) {
      best = entry;
      best_distance = distance;
    }
  }
  return best->erp;
}

}  // namespace erpforge
