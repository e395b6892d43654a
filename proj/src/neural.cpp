#include "erpforge/neural.hpp"

#include <cmath>

namespace erpforge {

FeatureMap instance_norm(const FeatureMap& x, const Eigen::VectorXd& gamma,
                         const Eigen::VectorXd& beta, double eps) {
  if (x.cols() < 2) throw Error(ErrorKind::size, "instance norm needs at least 2 time steps");
  if (gamma.size() != x.rows() || beta.size() != x.rows())
    throw Error(ErrorKind::shape, "affine parameters must have one entry per channel");
  if (!(eps > 0.0)) throw Error(ErrorKind::domain, "eps must be positive");

  FeatureMap out(x.rows(), x.cols());
  for (Index c = 0; c < x.rows(); ++c) {
    const double mean = x.row(c).mean();
    const double variance = (x.row(c).array() - mean).square().mean();
    out.row(c) =
        ((x.row(c).array() - mean) / std::sqrt(variance + eps)) * gamma[c] + beta[c];
  }
  return out;
}

FeatureMap glu_gate(const FeatureMap& feature, const FeatureMap& gate,
                    const Eigen::VectorXd& gamma, const Eigen::VectorXd& beta, double eps) {
  if (feature.rows() != gate.rows() || feature.cols() != gate.cols())
    throw Error(ErrorKind::shape, "feature and gate shapes must match");
  const FeatureMap normalized = instance_norm(gate, gamma, beta, eps);
  const Eigen::ArrayXXd logistic = (1.0 + (-normalized.array()).exp()).inverse();
  return (feature.array() * logistic).matrix();
}

FeatureMap linear_resize(const FeatureMap& z, Index target_len) {
  if (target_len < 1) throw Error(ErrorKind::size, "target length must be at least 1");
  const Index source_len = z.cols();
  FeatureMap out(z.rows(), target_len);
  if (target_len == 1) {
    out.col(0) = z.col(0);
    return out;
  }
  // endpoint-aligned grid: target index j maps to j * (Tz-1) / (Tu-1)
  const double scale =
      static_cast<double>(source_len - 1) / static_cast<double>(target_len - 1);
  for (Index j = 0; j < target_len; ++j) {
    const double position = static_cast<double>(j) * scale;
    const Index lower = std::min<Index>(static_cast<Index>(position), source_len - 1);
    const Index upper = std::min<Index>(lower + 1, source_len - 1);
    const double fraction = position - static_cast<double>(lower);
    out.col(j) = (1.0 - fraction) * z.col(lower) + fraction * z.col(upper);
  }
  return out;
}

FeatureMap interp_residual(const FeatureMap& z, const FeatureMap& u) {
  if (z.rows() != u.rows())
    throw Error(ErrorKind::shape, "residual inputs must share the channel count");
  if (z.cols() == u.cols()) return z + u;
  return linear_resize(z, u.cols()) + u;
}

Eigen::VectorXd sinusoidal_count_embedding(Index trial_count, Index dim) {
  if (dim < 2 || dim % 2 != 0)
    throw Error(ErrorKind::config, "embedding dimension must be even and positive");
  if (trial_count < 1) throw Error(ErrorKind::domain, "trial count must be at least 1");

  Eigen::VectorXd embedding(dim);
  const double k = static_cast<double>(trial_count);
  for (Index i = 0; 2 * i < dim; ++i) {
    const double rate =
        std::pow(10000.0, 2.0 * static_cast<double>(i) / static_cast<double>(dim));
    embedding[2 * i] = std::sin(k / rate);
    embedding[2 * i + 1] = std::cos(k / rate);
  }
  return embedding;
}

}  // namespace erpforge
