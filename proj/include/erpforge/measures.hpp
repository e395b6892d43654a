#pragma once

#include "erpforge/types.hpp"

namespace erpforge {

struct ErpMeasures {
  double peak_latency_ms = 0.0;
  double peak_amplitude = 0.0;   // signed, microvolts
  double mean_amplitude = 0.0;   // microvolts over the window
  double area_latency_50_ms = 0.0;
  double onset_latency_ms = 0.0;
};

// Root mean squared error of B predictions against one target: the squared
// Frobenius error is averaged over predictions and normalized by the number
// of points per ERP.
double rmse(const std::vector<Erp>& preds, const Erp& target);

// Coefficient of determination with the raw (uncentered) target energy in the
// denominator; bounded above by 1, exactly 0 for all-zero predictions.
double r_squared(const std::vector<Erp>& preds, const Erp& target);

// Peak, mean-amplitude, fractional-area and fractional-peak onset measures of
// a single-channel ERP inside a polarity-signed window.
ErpMeasures erp_measures(const Erp& erp, const MeasureWindow& window);

}  // namespace erpforge
