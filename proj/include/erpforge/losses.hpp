#pragma once

#include <cstdint>
#include <functional>

#include "erpforge/rng.hpp"
#include "erpforge/types.hpp"

namespace erpforge {

// Encodings of all subject-task combinations for one realization in one
// latent space; row s * n_tasks + t holds the latent vector of (s, t).
struct LatentBatch {
  Index n_subjects = 0;
  Index n_tasks = 0;
  Eigen::MatrixXd values;

  Index latent_dim() const { return values.cols(); }
  Eigen::RowVectorXd latent(Index subject, Index task) const {
    return values.row(subject * n_tasks + task);
  }
};

void validate(const LatentBatch& batch);

enum class LatentSpace { subject, task };

// Gaussian negative log-likelihood: sum over points of
// squared error / (2 sigma^2) + log sigma.
double gaussian_nll(const Erp& target, const UncertainErp& pred);

struct GaussianNllGrad {
  Eigen::MatrixXd d_mean;
  Eigen::MatrixXd d_sigma;
};

GaussianNllGrad gaussian_nll_grad(const Erp& target, const UncertainErp& pred);

struct AnnealSchedule {
  int target_epoch = 100;
};

// Linear interpolation of the predicted scale from one toward sigma_hat over
// the first target_epoch epochs; constant afterwards.
Eigen::MatrixXd anneal_sigma(const Eigen::MatrixXd& sigma_hat, int epoch,
                             const AnnealSchedule& schedule);

// Softplus parameterization keeping predicted scales strictly positive.
Eigen::MatrixXd softplus_sigma(const Eigen::MatrixXd& raw);

// Similarity matrix aggregated across the non-corresponding axis: in subject
// space entry (i, j) sums cosine similarities over tasks; in task space over
// subjects.
Eigen::MatrixXd aggregate_similarity(const LatentBatch& a, const LatentBatch& b,
                                     LatentSpace space);

// Symmetric temperature-scaled cross entropy over a similarity matrix and its
// transpose. The denominator excludes the positive pair; opting into
// include_positive adds it back for the conventional variant. The temperature
// default is a library choice, not a published value.
double contrastive_loss(const Eigen::MatrixXd& similarity, double temperature = 0.5,
                        bool include_positive = false);

// One random permutation of the non-corresponding axis applied to the whole
// batch: task axis for subject space, subject axis for task space.
LatentBatch permute_latents(const LatentBatch& batch, LatentSpace space, std::uint64_t rng_seed);

using LatentDecoder =
    std::function<std::vector<UncertainErp>(const LatentBatch& subject, const LatentBatch& task)>;

// Reconstruction loss of decoded, axis-permuted latents against the original
// targets, summed over both realizations. The four permutations draw their
// seeds as mix_seed(rng_seed, 0..3) in the order: A subject, A task,
// B subject, B task.
double latent_permutation_loss(const std::vector<Erp>& targets, const LatentDecoder& decode,
                               const LatentBatch& a_subject, const LatentBatch& a_task,
                               const LatentBatch& b_subject, const LatentBatch& b_task,
                               std::uint64_t rng_seed);

// Unweighted total of the three training loss terms.
double total_loss(double reconstruction, double contrastive, double latent_permutation);

// Precision-weighted fusion: mean weighted by inverse variances, combined
// variance the reciprocal of the precision sum.
UncertainErp inverse_variance_combine(const std::vector<UncertainErp>& estimates);

// Rescale a combined estimate's variance of the mean by the number of inputs
// to report the average variance instead.
UncertainErp scale_to_average_variance(const UncertainErp& combined, Index n_estimates);

struct CalibrationPair {
  double predicted_sigma_mean;
  double rmse;
};

// Pearson correlation between predicted uncertainty and realized error.
double calibration_score(const std::vector<CalibrationPair>& pairs);

}  // namespace erpforge
