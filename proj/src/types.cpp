#include "erpforge/types.hpp"

#include <cmath>

namespace erpforge {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::size: return "SizeError";
    case ErrorKind::window: return "WindowError";
    case ErrorKind::channel: return "ChannelError";
    case ErrorKind::degenerate_weights: return "DegenerateWeightsError";
    case ErrorKind::lookup: return "LookupError";
    case ErrorKind::shape: return "ShapeError";
    case ErrorKind::domain: return "DomainError";
    case ErrorKind::config: return "ConfigError";
    case ErrorKind::format: return "FormatError";
    case ErrorKind::degenerate: return "DegenerateError";
  }
  return "Error";
}

Polarity parse_polarity(const std::string& name) {
  if (name == "positive" || name == "pos") return Polarity::positive;
  if (name == "negative" || name == "neg") return Polarity::negative;
  throw Error(ErrorKind::config, "unknown polarity '" + name + "' (use positive|negative)");
}

const char* to_string(Polarity polarity) {
  return polarity == Polarity::positive ? "positive" : "negative";
}

namespace {

std::pair<Index, Index> index_range(const TimeAxis& axis, double start_ms, double end_ms,
                                    bool include_end) {
  const double tol = 1e-6 * axis.step_ms();
  // first sample with time >= start_ms
  double lo = (start_ms - tol - axis.t0_ms) / axis.step_ms();
  Index first = static_cast<Index>(std::ceil(lo));
  // last sample with time <= end_ms (closed) or time < end_ms (half-open)
  double hi = ((include_end ? end_ms + tol : end_ms - tol) - axis.t0_ms) / axis.step_ms();
  Index last = static_cast<Index>(std::floor(hi));
  first = std::max<Index>(first, 0);
  last = std::min<Index>(last, axis.n_samples - 1);
  if (last < first) return {0, 0};
  return {first, last - first + 1};
}

}  // namespace

std::pair<Index, Index> TimeAxis::closed_range(double start_ms, double end_ms) const {
  return index_range(*this, start_ms, end_ms, true);
}

std::pair<Index, Index> TimeAxis::half_open_range(double start_ms, double end_ms) const {
  return index_range(*this, start_ms, end_ms, false);
}

void validate(const TimeAxis& axis) {
  if (!(axis.sampling_rate_hz > 0.0))
    throw Error(ErrorKind::domain, "sampling rate must be positive");
  if (axis.n_samples < 1)
    throw Error(ErrorKind::size, "time axis needs at least one sample");
  if (!std::isfinite(axis.t0_ms) || !std::isfinite(axis.sampling_rate_hz))
    throw Error(ErrorKind::domain, "time axis parameters must be finite");
}

void validate(const TrialSet& trials) {
  validate(trials.axis);
  if (trials.data.empty())
    throw Error(ErrorKind::size, "trial set must contain at least one trial");
  const Index channels = trials.data.front().rows();
  for (const auto& trial : trials.data) {
    if (trial.rows() != channels || trial.cols() != trials.axis.n_samples)
      throw Error(ErrorKind::shape, "all trials must share one channels x samples shape");
    if (!trial.allFinite())
      throw Error(ErrorKind::domain, "trial values must be finite");
  }
  if (static_cast<Index>(trials.channel_names.size()) != channels)
    throw Error(ErrorKind::shape, "channel name count must match channel count");
}

void validate(const Erp& erp) {
  validate(erp.axis);
  if (erp.data.cols() != erp.axis.n_samples)
    throw Error(ErrorKind::shape, "ERP sample count must match its time axis");
  if (static_cast<Index>(erp.channel_names.size()) != erp.data.rows())
    throw Error(ErrorKind::shape, "channel name count must match channel count");
  if (!erp.data.allFinite())
    throw Error(ErrorKind::domain, "ERP values must be finite");
}

void validate(const UncertainErp& erp) {
  validate(erp.mean);
  if (erp.sigma.rows() != erp.mean.data.rows() || erp.sigma.cols() != erp.mean.data.cols())
    throw Error(ErrorKind::shape, "sigma shape must match the mean ERP");
  if (!(erp.sigma.array() > 0.0).all())
    throw Error(ErrorKind::domain, "sigma must be strictly positive everywhere");
}

void validate(const MeasureWindow& window) {
  if (!(window.start_ms < window.end_ms))
    throw Error(ErrorKind::window, "measure window start must precede its end");
}

}  // namespace erpforge
