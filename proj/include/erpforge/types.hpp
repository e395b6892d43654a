#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "erpforge/errors.hpp"

namespace erpforge {

using Eigen::Index;

// Uniform time axis in milliseconds relative to stimulus onset.
struct TimeAxis {
  double t0_ms = 0.0;
  double sampling_rate_hz = 1.0;
  Index n_samples = 0;

  double step_ms() const { return 1000.0 / sampling_rate_hz; }
  double time_ms(Index i) const { return t0_ms + static_cast<double>(i) * step_ms(); }
  double end_ms() const { return time_ms(n_samples - 1); }

  Eigen::VectorXd times_ms() const {
    return Eigen::VectorXd::LinSpaced(n_samples, t0_ms, end_ms());
  }

  // Index range [first, first+count) of samples with time in [start_ms, end_ms].
  // Window membership uses a tolerance of 1e-6 sample periods so that windows
  // specified exactly at sample times are stable under round-off.
  std::pair<Index, Index> closed_range(double start_ms, double end_ms) const;
  // Same for the half-open window [start_ms, end_ms).
  std::pair<Index, Index> half_open_range(double start_ms, double end_ms) const;

  friend bool operator==(const TimeAxis& a, const TimeAxis& b) {
    return a.t0_ms == b.t0_ms && a.sampling_rate_hz == b.sampling_rate_hz &&
           a.n_samples == b.n_samples;
  }
};

// Stack of stimulus-locked trials, each channels x samples.
struct TrialSet {
  std::vector<Eigen::MatrixXd> data;
  TimeAxis axis;
  std::vector<std::string> channel_names;
  std::string subject_id;
  std::string task_id;

  Index n_trials() const { return static_cast<Index>(data.size()); }
  Index n_channels() const { return data.empty() ? 0 : data.front().rows(); }
  Index n_samples() const { return data.empty() ? 0 : data.front().cols(); }
};

// Averaged or estimated event-related potential, channels x samples.
struct Erp {
  Eigen::MatrixXd data;
  TimeAxis axis;
  std::vector<std::string> channel_names;

  Index n_channels() const { return data.rows(); }
  Index n_samples() const { return data.cols(); }
};

// Erp with a point-wise standard deviation of the same shape.
struct UncertainErp {
  Erp mean;
  Eigen::MatrixXd sigma;
};

struct SplitHalves {
  TrialSet input_half;
  TrialSet target_half;
};

enum class Polarity { positive, negative };

Polarity parse_polarity(const std::string& name);
const char* to_string(Polarity polarity);

struct MeasureWindow {
  double start_ms = 0.0;
  double end_ms = 0.0;
  Polarity polarity = Polarity::positive;
};

// Throw on violated invariants (dimension mismatches, non-finite values, ...).
void validate(const TimeAxis& axis);
void validate(const TrialSet& trials);
void validate(const Erp& erp);
void validate(const UncertainErp& erp);
void validate(const MeasureWindow& window);

}  // namespace erpforge
