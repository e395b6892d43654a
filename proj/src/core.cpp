#include "erpforge/core.hpp"

#include <algorithm>
#include <numeric>

#include "erpforge/rng.hpp"

namespace erpforge {

namespace {

Index find_channel(const std::vector<std::string>& names, const std::string& name) {
  for (Index c = 0; c < static_cast<Index>(names.size()); ++c)
    if (names[c] == name) return c;
  std::string available;
  for (const auto& n : names) {
    if (!available.empty()) available += ", ";
    available += n;
  }
  throw Error(ErrorKind::channel, "unknown channel '" + name + "' (available: " + available + ")");
}

TrialSet take_trials(const TrialSet& trials, const std::vector<Index>& indices) {
  TrialSet out;
  out.axis = trials.axis;
  out.channel_names = trials.channel_names;
  out.subject_id = trials.subject_id;
  out.task_id = trials.task_id;
  out.data.reserve(indices.size());
  for (Index i : indices) out.data.push_back(trials.data[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace

SplitHalves split_half(const TrialSet& trials, std::uint64_t rng_seed) {
  validate(trials);
  const Index n = trials.n_trials();
  if (n < 2) throw Error(ErrorKind::size, "split_half needs at least 2 trials");

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(rng_seed);
  std::shuffle(order.begin(), order.end(), rng);

  const Index n_input = (n + 1) / 2;
  std::vector<Index> input(order.begin(), order.begin() + n_input);
  std::vector<Index> target(order.begin() + n_input, order.end());
  std::sort(input.begin(), input.end());
  std::sort(target.begin(), target.end());
  return {take_trials(trials, input), take_trials(trials, target)};
}

TrialSet baseline_correct(const TrialSet& trials, double start_ms, double end_ms) {
  validate(trials);
  const auto [first, count] = trials.axis.half_open_range(start_ms, end_ms);
  if (count < 1)
    throw Error(ErrorKind::window, "baseline window overlaps no samples");

  TrialSet out = trials;
  for (auto& trial : out.data) {
    const Eigen::VectorXd mean = trial.middleCols(first, count).rowwise().mean();
    trial.colwise() -= mean;
  }
  return out;
}

namespace {

template <typename T>
T crop_impl(const T& in, double start_ms, double end_ms) {
  const TimeAxis& axis = in.axis;
  const double tol = 1e-6 * axis.step_ms();
  if (start_ms < axis.t0_ms - tol || end_ms > axis.end_ms() + tol)
    throw Error(ErrorKind::window, "crop span lies outside the time axis");
  const auto [first, count] = axis.closed_range(start_ms, end_ms);
  if (count < 1) throw Error(ErrorKind::window, "crop window retains no samples");

  T out = in;
  out.axis.t0_ms = axis.time_ms(first);
  out.axis.n_samples = count;
  return out;
}

}  // namespace

TrialSet crop(const TrialSet& trials, double start_ms, double end_ms) {
  validate(trials);
  TrialSet out = crop_impl(trials, start_ms, end_ms);
  const auto [first, count] = trials.axis.closed_range(start_ms, end_ms);
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] = trials.data[i].middleCols(first, count).eval();
  return out;
}

Erp crop(const Erp& erp, double start_ms, double end_ms) {
  validate(erp);
  Erp out = crop_impl(erp, start_ms, end_ms);
  const auto [first, count] = erp.axis.closed_range(start_ms, end_ms);
  out.data = erp.data.middleCols(first, count).eval();
  return out;
}

TrialSet select_channel(const TrialSet& trials, const std::string& name) {
  validate(trials);
  const Index c = find_channel(trials.channel_names, name);
  TrialSet out = trials;
  out.channel_names = {name};
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] = trials.data[i].row(c).eval();
  return out;
}

Erp select_channel(const Erp& erp, const std::string& name) {
  validate(erp);
  const Index c = find_channel(erp.channel_names, name);
  Erp out;
  out.axis = erp.axis;
  out.channel_names = {name};
  out.data = erp.data.row(c).eval();
  return out;
}

}  // namespace erpforge
