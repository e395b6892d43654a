#include "erpforge/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace erpforge {

void validate(const LatentBatch& batch) {
  if (batch.n_subjects < 1 || batch.n_tasks < 1)
    throw Error(ErrorKind::size, "latent batch axes must be non-empty");
  if (batch.values.rows() != batch.n_subjects * batch.n_tasks)
    throw Error(ErrorKind::shape, "latent batch rows must equal subjects x tasks");
  if (batch.values.cols() < 1)
    throw Error(ErrorKind::size, "latent dimension must be at least 1");
  if (!batch.values.allFinite())
    throw Error(ErrorKind::domain, "latent values must be finite");
}

namespace {

void check_match(const Erp& target, const UncertainErp& pred) {
  validate(pred);
  if (pred.mean.data.rows() != target.data.rows() || pred.mean.data.cols() != target.data.cols())
    throw Error(ErrorKind::shape, "prediction shape does not match the target");
}

}  // namespace

double gaussian_nll(const Erp& target, const UncertainErp& pred) {
  check_match(target, pred);
  const Eigen::ArrayXXd diff = (target.data - pred.mean.data).array();
  const Eigen::ArrayXXd sigma = pred.sigma.array();
  return (diff.square() / (2.0 * sigma.square()) + sigma.log()).sum();
}

GaussianNllGrad gaussian_nll_grad(const Erp& target, const UncertainErp& pred) {
  check_match(target, pred);
  const Eigen::ArrayXXd diff = (pred.mean.data - target.data).array();
  const Eigen::ArrayXXd sigma = pred.sigma.array();
  GaussianNllGrad grad;
  grad.d_mean = diff / sigma.square();
  grad.d_sigma = -diff.square() / sigma.cube() + sigma.inverse();
  return grad;
}

Eigen::MatrixXd anneal_sigma(const Eigen::MatrixXd& sigma_hat, int epoch,
                             const AnnealSchedule& schedule) {
  if (epoch < 0) throw Error(ErrorKind::domain, "epoch must be non-negative");
  if (schedule.target_epoch < 1)
    throw Error(ErrorKind::config, "anneal target epoch must be at least 1");
  const double fraction =
      std::min(static_cast<double>(epoch) / static_cast<double>(schedule.target_epoch), 1.0);
  return (1.0 + fraction * (sigma_hat.array() - 1.0)).matrix();
}

Eigen::MatrixXd softplus_sigma(const Eigen::MatrixXd& raw) {
  // log(1 + e^x) evaluated stably on both tails, plus a floor keeping the
  // result strictly positive
  return raw.unaryExpr([](double x) {
    const double softplus = x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
    return softplus + 1e-6;
  });
}

namespace {

double cosine_similarity(const Eigen::RowVectorXd& u, const Eigen::RowVectorXd& v) {
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0)
    throw Error(ErrorKind::domain, "cosine similarity of a zero-norm latent vector");
  return u.dot(v) / (nu * nv);
}

}  // namespace

Eigen::MatrixXd aggregate_similarity(const LatentBatch& a, const LatentBatch& b,
                                     LatentSpace space) {
  validate(a);
  validate(b);
  if (a.n_subjects != b.n_subjects || a.n_tasks != b.n_tasks ||
      a.latent_dim() != b.latent_dim())
    throw Error(ErrorKind::shape, "latent batches must share their shape");

  if (space == LatentSpace::subject) {
    Eigen::MatrixXd sim = Eigen::MatrixXd::Zero(a.n_subjects, a.n_subjects);
    for (Index i = 0; i < a.n_subjects; ++i)
      for (Index j = 0; j < a.n_subjects; ++j)
        for (Index t = 0; t < a.n_tasks; ++t)
          sim(i, j) += cosine_similarity(a.latent(i, t), b.latent(j, t));
    return sim;
  }
  Eigen::MatrixXd sim = Eigen::MatrixXd::Zero(a.n_tasks, a.n_tasks);
  for (Index i = 0; i < a.n_tasks; ++i)
    for (Index j = 0; j < a.n_tasks; ++j)
      for (Index s = 0; s < a.n_subjects; ++s)
        sim(i, j) += cosine_similarity(a.latent(s, i), b.latent(s, j));
  return sim;
}

namespace {

// log sum_{i in denominator} exp(scores[i] / tau), stabilized by the maximum
double log_sum_exp(const Eigen::VectorXd& scores, Index skip, double tau,
                   bool include_positive) {
  double peak = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < scores.size(); ++i) {
    if (!include_positive && i == skip) continue;
    peak = std::max(peak, scores[i] / tau);
  }
  double acc = 0.0;
  for (Index i = 0; i < scores.size(); ++i) {
    if (!include_positive && i == skip) continue;
    acc += std::exp(scores[i] / tau - peak);
  }
  return peak + std::log(acc);
}

}  // namespace

double contrastive_loss(const Eigen::MatrixXd& similarity, double temperature,
                        bool include_positive) {
  if (similarity.rows() != similarity.cols())
    throw Error(ErrorKind::shape, "similarity matrix must be square");
  const Index m = similarity.rows();
  if (m < 2) throw Error(ErrorKind::size, "contrastive loss needs at least 2 pairs");
  if (!(temperature > 0.0)) throw Error(ErrorKind::domain, "temperature must be positive");

  double loss = 0.0;
  for (Index i = 0; i < m; ++i) {
    const double positive = similarity(i, i) / temperature;
    loss -= positive - log_sum_exp(similarity.row(i), i, temperature, include_positive);
    loss -= positive - log_sum_exp(similarity.col(i), i, temperature, include_positive);
  }
  return loss / static_cast<double>(m);
}

LatentBatch permute_latents(const LatentBatch& batch, LatentSpace space,
                            std::uint64_t rng_seed) {
  validate(batch);
  const Index axis_len = space == LatentSpace::subject ? batch.n_tasks : batch.n_subjects;
  std::vector<Index> perm(static_cast<std::size_t>(axis_len));
  std::iota(perm.begin(), perm.end(), Index{0});
  Rng rng(rng_seed);
  std::shuffle(perm.begin(), perm.end(), rng);

  LatentBatch out = batch;
  for (Index s = 0; s < batch.n_subjects; ++s) {
    for (Index t = 0; t < batch.n_tasks; ++t) {
      const Index src_s = space == LatentSpace::task ? perm[static_cast<std::size_t>(s)] : s;
      const Index src_t = space == LatentSpace::subject ? perm[static_cast<std::size_t>(t)] : t;
      out.values.row(s * batch.n_tasks + t) = batch.values.row(src_s * batch.n_tasks + src_t);
    }
  }
  return out;
}

double latent_permutation_loss(const std::vector<Erp>& targets, const LatentDecoder& decode,
                               const LatentBatch& a_subject, const LatentBatch& a_task,
                               const LatentBatch& b_subject, const LatentBatch& b_task,
                               std::uint64_t rng_seed) {
  auto reconstruction_loss = [&](const LatentBatch& subject, const LatentBatch& task,
                                 std::uint64_t seed_subject, std::uint64_t seed_task) {
    const std::vector<UncertainErp> decoded =
        decode(permute_latents(subject, LatentSpace::subject, seed_subject),
               permute_latents(task, LatentSpace::task, seed_task));
    if (decoded.size() != targets.size())
      throw Error(ErrorKind::shape, "decoder output count does not match the targets");
    double acc = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i)
      acc += gaussian_nll(targets[i], decoded[i]);
    return acc;
  };
  return reconstruction_loss(a_subject, a_task, mix_seed(rng_seed, 0), mix_seed(rng_seed, 1)) +
         reconstruction_loss(b_subject, b_task, mix_seed(rng_seed, 2), mix_seed(rng_seed, 3));
}

double total_loss(double reconstruction, double contrastive, double latent_permutation) {
  return reconstruction + contrastive + latent_permutation;
}

UncertainErp inverse_variance_combine(const std::vector<UncertainErp>& estimates) {
  if (estimates.empty()) throw Error(ErrorKind::size, "need at least one estimate to combine");
  for (const auto& estimate : estimates) validate(estimate);
  const auto& first = estimates.front();

  Eigen::ArrayXXd precision_sum =
      Eigen::ArrayXXd::Zero(first.sigma.rows(), first.sigma.cols());
  Eigen::ArrayXXd weighted_sum = precision_sum;
  for (const auto& estimate : estimates) {
    if (estimate.sigma.rows() != first.sigma.rows() ||
        estimate.sigma.cols() != first.sigma.cols())
      throw Error(ErrorKind::shape, "estimates must share one shape");
    const Eigen::ArrayXXd precision = estimate.sigma.array().square().inverse();
    precision_sum += precision;
    weighted_sum += precision * estimate.mean.data.array();
  }

  UncertainErp out;
  out.mean = first.mean;
  out.mean.data = (weighted_sum / precision_sum).matrix();
  out.sigma = precision_sum.inverse().sqrt().matrix();
  return out;
}

UncertainErp scale_to_average_variance(const UncertainErp& combined, Index n_estimates) {
  validate(combined);
  if (n_estimates < 1) throw Error(ErrorKind::size, "estimate count must be positive");
  UncertainErp out = combined;
  out.sigma *= std::sqrt(static_cast<double>(n_estimates));
  return out;
}

double calibration_score(const std::vector<CalibrationPair>& pairs) {
  const std::size_t n = pairs.size();
  if (n < 2) throw Error(ErrorKind::size, "calibration needs at least 2 pairs");
  double mean_sigma = 0.0, mean_rmse = 0.0;
  for (const auto& pair : pairs) {
    mean_sigma += pair.predicted_sigma_mean;
    mean_rmse += pair.rmse;
  }
  mean_sigma /= static_cast<double>(n);
  mean_rmse /= static_cast<double>(n);

  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& pair : pairs) {
    const double a = pair.predicted_sigma_mean - mean_sigma;
    const double b = pair.rmse - mean_rmse;
    sxx += a * a;
    syy += b * b;
    sxy += a * b;
  }
  if (sxx <= 0.0 || syy <= 0.0)
    throw Error(ErrorKind::degenerate, "calibration inputs have no variance");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace erpforge
