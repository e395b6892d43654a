#pragma once

#include <map>
#include <optional>

#include "erpforge/types.hpp"

namespace erpforge {

struct AlignmentResult {
  std::vector<int> shifts_samples;
  Erp aligned_average;
  int iterations = 0;
  bool converged = false;
};

// Iterative latency correction: each trial is shifted to maximize its
// correlation with the evolving average inside the window; shifts are bounded
// by half the window width and returned mean-centered.
AlignmentResult woody_align(const TrialSet& trials, const MeasureWindow& window,
                            int max_iters = 20);

enum class RideComponent { stimulus, central, response };

const char* to_string(RideComponent component);

struct RideConfig {
  std::optional<MeasureWindow> s_window;
  std::optional<MeasureWindow> c_window;
  std::optional<MeasureWindow> r_window;
  int max_outer_iters = 10;
  int latency_tol_samples = 1;
};

struct RideResult {
  // Component waveforms at latency zero; zero outside their windows.
  std::map<RideComponent, Erp> components;
  // Per-trial latency estimates for the latency-fitted components (C, R).
  std::map<RideComponent, AlignmentResult> alignments;
  // Sum of components, each placed at its median latency.
  Erp reconstruction;
  int iterations = 0;
  bool converged = false;
};

// Residue iteration decomposition into stimulus-locked (S), central (C) and
// response-locked (R) parts. S stays at latency zero; C and R latencies are
// re-estimated per trial by cross-correlation with the evolving component
// template inside its window. Waveforms are point-wise medians of
// latency-locked residuals, tapered to zero at the window edges.
RideResult ride_decompose(const TrialSet& trials, const RideConfig& config);

// Alignment windows per standard component (expanded measurement windows).
MeasureWindow woody_window(const std::string& component);

// Component window table for RIDE; LRP and ERN use an R-only model.
RideConfig ride_config(const std::string& component);

}  // namespace erpforge
