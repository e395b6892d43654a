#include "erpforge/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace erpforge {

namespace {

// out[t] = x[clamp(t + shift)]; out-of-range samples take the edge value.
Eigen::VectorXd shift_edge_fill(const Eigen::VectorXd& x, int shift) {
  const Index n = x.size();
  Eigen::VectorXd out(n);
  for (Index t = 0; t < n; ++t) {
    const Index src = std::clamp<Index>(t + shift, 0, n - 1);
    out[t] = x[src];
  }
  return out;
}

struct WindowIdx {
  Index first = 0;
  Index count = 0;
};

WindowIdx checked_window(const TimeAxis& axis, const MeasureWindow& window) {
  validate(window);
  const auto [first, count] = axis.closed_range(window.start_ms, window.end_ms);
  if (count < 3) throw Error(ErrorKind::window, "alignment window covers fewer than 3 samples");
  return {first, count};
}

// Pearson correlation between the template segment and the trial segment
// displaced by `shift`, with edge-clamped trial indexing.
double window_correlation(const Eigen::VectorXd& tmpl, const Eigen::VectorXd& x, WindowIdx w,
                          int shift) {
  const Index n = x.size();
  double mt = 0.0, mx = 0.0;
  for (Index k = 0; k < w.count; ++k) {
    mt += tmpl[w.first + k];
    mx += x[std::clamp<Index>(w.first + k + shift, 0, n - 1)];
  }
  mt /= static_cast<double>(w.count);
  mx /= static_cast<double>(w.count);
  double sxy = 0.0, stt = 0.0, sxx = 0.0;
  for (Index k = 0; k < w.count; ++k) {
    const double a = tmpl[w.first + k] - mt;
    const double b = x[std::clamp<Index>(w.first + k + shift, 0, n - 1)] - mx;
    sxy += a * b;
    stt += a * a;
    sxx += b * b;
  }
  if (stt <= 0.0 || sxx <= 0.0) return 0.0;
  return sxy / std::sqrt(stt * sxx);
}

// Shift maximizing the windowed correlation; ties prefer the smaller |shift|.
int best_shift(const Eigen::VectorXd& tmpl, const Eigen::VectorXd& x, WindowIdx w, int bound) {
  int best = 0;
  double best_corr = window_correlation(tmpl, x, w, 0);
  for (int mag = 1; mag <= bound; ++mag) {
    for (int shift : {-mag, mag}) {
      const double corr = window_correlation(tmpl, x, w, shift);
      if (corr > best_corr) {
        best_corr = corr;
        best = shift;
      }
    }
  }
  return best;
}

Eigen::VectorXd mean_of_shifted(const std::vector<Eigen::VectorXd>& xs,
                                const std::vector<int>& shifts) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(xs.front().size());
  for (std::size_t i = 0; i < xs.size(); ++i) acc += shift_edge_fill(xs[i], shifts[i]);
  return acc / static_cast<double>(xs.size());
}

std::vector<Eigen::VectorXd> single_channel_rows(const TrialSet& trials) {
  validate(trials);
  if (trials.n_channels() != 1)
    throw Error(ErrorKind::shape, "alignment operates on a single channel; select one first");
  std::vector<Eigen::VectorXd> rows;
  rows.reserve(trials.data.size());
  for (const auto& trial : trials.data) rows.push_back(trial.row(0).transpose());
  return rows;
}

Erp single_channel_erp(const TrialSet& trials, const Eigen::VectorXd& values) {
  Erp out;
  out.axis = trials.axis;
  out.channel_names = trials.channel_names;
  out.data = values.transpose();
  return out;
}

}  // namespace

AlignmentResult woody_align(const TrialSet& trials, const MeasureWindow& window, int max_iters) {
  const auto xs = single_channel_rows(trials);
  const std::size_t n = xs.size();
  if (n < 2) throw Error(ErrorKind::size, "woody alignment needs at least 2 trials");
  const WindowIdx w = checked_window(trials.axis, window);
  const int bound = static_cast<int>(w.count / 2);

  AlignmentResult result;
  std::vector<int> shifts(n, 0);
  Eigen::VectorXd tmpl = mean_of_shifted(xs, shifts);

  for (int iter = 0; iter < max_iters; ++iter) {
    double update = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const int next = best_shift(tmpl, xs[i], w, bound);
      update += std::abs(next - shifts[i]);
      shifts[i] = next;
    }
    update /= static_cast<double>(n);
    tmpl = mean_of_shifted(xs, shifts);
    result.iterations = iter + 1;
    if (update < 1.0) {
      result.converged = true;
      break;
    }
  }

  double mean_shift = 0.0;
  for (int s : shifts) mean_shift += s;
  const int center = static_cast<int>(std::llround(mean_shift / static_cast<double>(n)));
  for (int& s : shifts) s -= center;

  result.shifts_samples = shifts;
  result.aligned_average = single_channel_erp(trials, mean_of_shifted(xs, shifts));
  return result;
}

const char* to_string(RideComponent component) {
  switch (component) {
    case RideComponent::stimulus: return "S";
    case RideComponent::central: return "C";
    case RideComponent::response: return "R";
  }
  return "?";
}

namespace {

// Point-wise median across trials.
Eigen::VectorXd column_median(const std::vector<Eigen::VectorXd>& xs) {
  const Index t_len = xs.front().size();
  const std::size_t n = xs.size();
  Eigen::VectorXd out(t_len);
  std::vector<double> values(n);
  for (Index t = 0; t < t_len; ++t) {
    for (std::size_t i = 0; i < n; ++i) values[i] = xs[i][t];
    std::sort(values.begin(), values.end());
    out[t] = n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  }
  return out;
}

// Restrict to the window and taper linearly to zero at its edges.
Eigen::VectorXd windowed_taper(const Eigen::VectorXd& x, WindowIdx w, Index taper_samples) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
  const Index taper = std::min<Index>(taper_samples, (w.count - 1) / 2);
  for (Index k = 0; k < w.count; ++k) {
    double weight = 1.0;
    if (taper > 0) {
      weight = std::min({1.0, static_cast<double>(k) / static_cast<double>(taper),
                         static_cast<double>(w.count - 1 - k) / static_cast<double>(taper)});
    }
    out[w.first + k] = weight * x[w.first + k];
  }
  return out;
}

// Component waveform placed at an integer latency; zero-filled outside.
Eigen::VectorXd place_at(const Eigen::VectorXd& tmpl, int latency) {
  const Index n = tmpl.size();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (Index t = 0; t < n; ++t) {
    const Index src = t - latency;
    if (src >= 0 && src < n) out[t] = tmpl[src];
  }
  return out;
}

int median_latency(const std::vector<int>& latencies) {
  std::vector<int> sorted = latencies;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  return n % 2 == 1 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2;
}

constexpr Index kRideTaperSamples = 10;

}  // namespace

RideResult ride_decompose(const TrialSet& trials, const RideConfig& config) {
  const auto xs = single_channel_rows(trials);
  const std::size_t n = xs.size();
  if (n < 2) throw Error(ErrorKind::size, "RIDE needs at least 2 trials");

  struct Component {
    RideComponent id;
    WindowIdx window;
    int bound;
    bool latency_estimated;
    Eigen::VectorXd waveform;
    std::vector<int> latencies;
  };

  std::vector<Component> comps;
  auto add = [&](RideComponent id, const std::optional<MeasureWindow>& window, bool estimated) {
    if (!window) return;
    const WindowIdx w = checked_window(trials.axis, *window);
    comps.push_back({id, w, static_cast<int>(w.count / 2), estimated,
                     Eigen::VectorXd::Zero(trials.n_samples()), std::vector<int>(n, 0)});
  };
  add(RideComponent::stimulus, config.s_window, false);
  add(RideComponent::central, config.c_window, true);
  add(RideComponent::response, config.r_window, true);
  if (comps.empty()) throw Error(ErrorKind::config, "RIDE requires at least one component window");

  const bool any_estimated =
      std::any_of(comps.begin(), comps.end(), [](const Component& c) { return c.latency_estimated; });

  RideResult result;
  std::vector<Eigen::VectorXd> residuals(n), locked(n);
  for (int iter = 0; iter < config.max_outer_iters; ++iter) {
    int delta = 0;
    bool all_estimations_ran = true;
    for (auto& comp : comps) {
      for (std::size_t i = 0; i < n; ++i) {
        residuals[i] = xs[i];
        for (const auto& other : comps) {
          if (&other == &comp) continue;
          residuals[i] -= place_at(other.waveform, other.latencies[i]);
        }
      }
      if (comp.latency_estimated) {
        if (comp.waveform.cwiseAbs().maxCoeff() > 0.0) {
          for (std::size_t i = 0; i < n; ++i) {
            const int next = best_shift(comp.waveform, residuals[i], comp.window, comp.bound);
            delta = std::max(delta, std::abs(next - comp.latencies[i]));
            comp.latencies[i] = next;
          }
        } else {
          all_estimations_ran = false;  // template still empty on the first pass
        }
      }
      for (std::size_t i = 0; i < n; ++i)
        locked[i] = shift_edge_fill(residuals[i], comp.latencies[i]);
      comp.waveform = windowed_taper(column_median(locked), comp.window, kRideTaperSamples);
    }
    result.iterations = iter + 1;
    const bool settled = !any_estimated || (all_estimations_ran && delta < config.latency_tol_samples);
    if (settled) {
      result.converged = true;
      break;
    }
  }

  Eigen::VectorXd reconstruction = Eigen::VectorXd::Zero(trials.n_samples());
  for (const auto& comp : comps) {
    const int med = median_latency(comp.latencies);
    reconstruction += place_at(comp.waveform, med);
    result.components.emplace(comp.id, single_channel_erp(trials, comp.waveform));
    if (comp.latency_estimated) {
      AlignmentResult alignment;
      alignment.shifts_samples = comp.latencies;
      alignment.aligned_average = single_channel_erp(trials, place_at(comp.waveform, med));
      alignment.iterations = result.iterations;
      alignment.converged = result.converged;
      result.alignments.emplace(comp.id, std::move(alignment));
    }
  }
  result.reconstruction = single_channel_erp(trials, reconstruction);
  return result;
}

MeasureWindow woody_window(const std::string& component) {
  if (component == "N170") return {-110.0, 350.0, Polarity::negative};
  if (component == "MMN") return {-125.0, 425.0, Polarity::negative};
  if (component == "N2pc") return {0.0, 475.0, Polarity::negative};
  if (component == "N400") return {100.0, 700.0, Polarity::negative};
  if (component == "P3") return {100.0, 800.0, Polarity::positive};
  if (component == "LRP") return {-300.0, 200.0, Polarity::negative};
  if (component == "ERN") return {-200.0, 300.0, Polarity::negative};
  throw Error(ErrorKind::lookup, "no alignment window table entry for '" + component + "'");
}

RideConfig ride_config(const std::string& component) {
  RideConfig config;
  auto s = [](double a, double b) { return MeasureWindow{a, b, Polarity::positive}; };
  if (component == "N170") {
    config.s_window = s(110, 150);
    config.c_window = s(100, 900);
    config.r_window = s(-300, 300);
  } else if (component == "MMN") {
    config.s_window = s(125, 225);
    config.c_window = s(100, 900);
    config.r_window = s(-300, 300);
  } else if (component == "N2pc") {
    config.s_window = s(200, 275);
    config.c_window = s(100, 900);
    config.r_window = s(-300, 300);
  } else if (component == "N400") {
    config.s_window = s(0, 500);
    config.c_window = s(300, 500);
    config.r_window = s(-300, 300);
  } else if (component == "P3") {
    config.s_window = s(0, 500);
    config.c_window = s(300, 600);
    config.r_window = s(-300, 300);
  } else if (component == "LRP") {
    config.r_window = s(-100, 0);
  } else if (component == "ERN") {
    config.r_window = s(0, 100);
  } else {
    throw Error(ErrorKind::lookup, "no RIDE table entry for '" + component + "'");
  }
  return config;
}

}  // namespace erpforge
