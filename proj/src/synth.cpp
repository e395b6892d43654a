#include "erpforge/synth.hpp"

#include <cmath>

#include "erpforge/rng.hpp"

namespace erpforge {

namespace {

constexpr double kP300AmplitudeUv = 5.0;
constexpr double kP300SigmaMs = 30.0;
constexpr double kN200AmplitudeUv = -3.0;
constexpr double kN200SigmaMs = 20.0;

double gauss_bump(double t_ms, double center_ms, double sigma_ms) {
  const double z = (t_ms - center_ms) / sigma_ms;
  return std::exp(-0.5 * z * z);
}

double waveform(double t_ms, double p300_latency_ms, double n200_lead_ms) {
  return kP300AmplitudeUv * gauss_bump(t_ms, p300_latency_ms, kP300SigmaMs) +
         kN200AmplitudeUv * gauss_bump(t_ms, p300_latency_ms - n200_lead_ms, kN200SigmaMs);
}

}  // namespace

SimResult simulate(const SimConfig& config) {
  if (config.n_trials < 1) throw Error(ErrorKind::size, "simulation needs at least one trial");
  if (!(config.sampling_rate_hz > 0.0))
    throw Error(ErrorKind::domain, "sampling rate must be positive");
  if (!(config.t_start_ms < config.t_end_ms) ||
      !(config.p300_latency_min_ms <= config.p300_latency_max_ms))
    throw Error(ErrorKind::config, "simulation time ranges must be ordered");

  const double step_ms = 1000.0 / config.sampling_rate_hz;
  const Index n_samples =
      static_cast<Index>(std::llround((config.t_end_ms - config.t_start_ms) / step_ms)) + 1;

  SimResult result;
  result.trials.axis = {config.t_start_ms, config.sampling_rate_hz, n_samples};
  result.trials.channel_names = {"Cz"};
  result.trials.subject_id = "sim";
  result.trials.task_id = "P3";
  result.true_latencies_ms.reserve(static_cast<std::size_t>(config.n_trials));

  Rng rng(config.rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Optional band-limiting of the per-sample noise, normalized so that
  // noise_scale stays the marginal standard deviation.
  const double smooth_sigma = config.noise_smooth_ms / step_ms;
  const Index half = config.noise_smooth_ms > 0.0
                         ? static_cast<Index>(std::ceil(4.0 * smooth_sigma))
                         : 0;
  Eigen::VectorXd kernel;
  if (half > 0) {
    kernel.resize(2 * half + 1);
    for (Index i = -half; i <= half; ++i)
      kernel[i + half] = std::exp(-0.5 * static_cast<double>(i * i) / (smooth_sigma * smooth_sigma));
    kernel /= kernel.norm();
  }

  const TimeAxis& axis = result.trials.axis;
  for (Index i = 0; i < config.n_trials; ++i) {
    const double latency = config.p300_latency_min_ms +
                           (config.p300_latency_max_ms - config.p300_latency_min_ms) * unit(rng);
    const double amplitude = 1.0 + config.amp_jitter * (2.0 * unit(rng) - 1.0);
    const double drift_uv_per_s = config.drift_scale * gauss(rng);

    Eigen::VectorXd noise(n_samples);
    if (half > 0) {
      Eigen::VectorXd white(n_samples + 2 * half);
      for (Index t = 0; t < white.size(); ++t) white[t] = gauss(rng);
      for (Index t = 0; t < n_samples; ++t)
        noise[t] = kernel.dot(white.segment(t, 2 * half + 1));
    } else {
      for (Index t = 0; t < n_samples; ++t) noise[t] = gauss(rng);
    }

    Eigen::MatrixXd trial(1, n_samples);
    for (Index t = 0; t < n_samples; ++t) {
      const double time = axis.time_ms(t);
      double value = amplitude * waveform(time, latency, config.n200_lead_ms);
      value += drift_uv_per_s * (time - config.t_start_ms) / 1000.0;
      value += config.noise_scale * noise[t];
      trial(0, t) = value;
    }
    result.trials.data.push_back(std::move(trial));
    result.true_latencies_ms.push_back(latency);
  }

  const double mid_latency =
      0.5 * (config.p300_latency_min_ms + config.p300_latency_max_ms);
  result.template_erp.axis = axis;
  result.template_erp.channel_names = result.trials.channel_names;
  result.template_erp.data.resize(1, n_samples);
  for (Index t = 0; t < n_samples; ++t)
    result.template_erp.data(0, t) = waveform(axis.time_ms(t), mid_latency, config.n200_lead_ms);
  return result;
}

LatencyScore score_latency_recovery(const std::vector<double>& true_ms,
                                    const std::vector<double>& est_ms) {
  const std::size_t n = true_ms.size();
  if (n != est_ms.size()) throw Error(ErrorKind::shape, "latency series lengths differ");
  if (n < 3) throw Error(ErrorKind::size, "latency scoring needs at least 3 trials");

  double mean_true = 0.0, mean_est = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_true += true_ms[i];
    mean_est += est_ms[i];
  }
  mean_true /= static_cast<double>(n);
  mean_est /= static_cast<double>(n);

  double stt = 0.0, see = 0.0, ste = 0.0, centered_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = true_ms[i] - mean_true;
    const double b = est_ms[i] - mean_est;
    stt += a * a;
    see += b * b;
    ste += a * b;
    centered_sq += (a - b) * (a - b);
  }
  if (stt <= 0.0 || see <= 0.0)
    throw Error(ErrorKind::degenerate, "latency series have no variance to correlate");

  return {ste / std::sqrt(stt * see), std::sqrt(centered_sq / static_cast<double>(n))};
}

}  // namespace erpforge
