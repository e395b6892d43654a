#pragma once

#include <cstdint>

#include "erpforge/types.hpp"

namespace erpforge {

// Uniform random partition into disjoint halves; with an odd trial count the
// extra trial goes to the input half. Deterministic for a fixed seed; trial
// order inside each half stays chronological.
SplitHalves split_half(const TrialSet& trials, std::uint64_t rng_seed);

// Subtract the per-trial, per-channel mean over the half-open window
// [start_ms, end_ms).
TrialSet baseline_correct(const TrialSet& trials, double start_ms, double end_ms);

// Keep samples with time in the closed window [start_ms, end_ms].
TrialSet crop(const TrialSet& trials, double start_ms, double end_ms);
Erp crop(const Erp& erp, double start_ms, double end_ms);

TrialSet select_channel(const TrialSet& trials, const std::string& name);
Erp select_channel(const Erp& erp, const std::string& name);

}  // namespace erpforge
