#pragma once

#include "erpforge/types.hpp"

namespace erpforge {

// Channels x time activation map.
using FeatureMap = Eigen::MatrixXd;

// Affine instance normalization: per channel, statistics over the time axis
// of the single instance.
FeatureMap instance_norm(const FeatureMap& x, const Eigen::VectorXd& gamma,
                         const Eigen::VectorXd& beta, double eps = 1e-5);

// Gated linear unit with the gate path instance-normalized before the
// logistic; the feature path stays linear.
FeatureMap glu_gate(const FeatureMap& feature, const FeatureMap& gate,
                    const Eigen::VectorXd& gamma, const Eigen::VectorXd& beta,
                    double eps = 1e-5);

// Endpoint-aligned piecewise-linear resize along the time axis.
FeatureMap linear_resize(const FeatureMap& z, Index target_len);

// Residual connection across a resolution change: z is linearly interpolated
// to u's length and added element-wise.
FeatureMap interp_residual(const FeatureMap& z, const FeatureMap& u);

// pe[2i] = sin(k / 10000^(2i/dim)), pe[2i+1] = cos(k / 10000^(2i/dim)).
Eigen::VectorXd sinusoidal_count_embedding(Index trial_count, Index dim);

}  // namespace erpforge
