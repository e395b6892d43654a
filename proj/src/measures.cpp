#include "erpforge/measures.hpp"

#include <cmath>

namespace erpforge {

namespace {

double total_squared_error(const std::vector<Erp>& preds, const Erp& target) {
  if (preds.empty()) throw Error(ErrorKind::size, "need at least one prediction");
  double total = 0.0;
  for (const auto& pred : preds) {
    if (pred.data.rows() != target.data.rows() || pred.data.cols() != target.data.cols())
      throw Error(ErrorKind::shape, "prediction shape does not match the target");
    total += (pred.data - target.data).squaredNorm();
  }
  return total;
}

}  // namespace

double rmse(const std::vector<Erp>& preds, const Erp& target) {
  const double total = total_squared_error(preds, target);
  const double points = static_cast<double>(target.data.size());
  return std::sqrt(total / (static_cast<double>(preds.size()) * points));
}

double r_squared(const std::vector<Erp>& preds, const Erp& target) {
  const double target_energy = target.data.squaredNorm();
  if (target_energy == 0.0)
    throw Error(ErrorKind::degenerate, "target ERP is identically zero");
  const double total = total_squared_error(preds, target);
  // Accumulate the denominator the same way the numerator is accumulated, so
  // an all-zero predictor yields a bitwise-equal ratio and exactly zero.
  double denominator = 0.0;
  for (std::size_t b = 0; b < preds.size(); ++b) denominator += target_energy;
  return 1.0 - total / denominator;
}

ErpMeasures erp_measures(const Erp& erp, const MeasureWindow& window) {
  validate(erp);
  if (erp.n_channels() != 1)
    throw Error(ErrorKind::shape, "ERP measures operate on a single channel; select one first");
  validate(window);
  const auto [first, count] = erp.axis.closed_range(window.start_ms, window.end_ms);
  if (count < 3) throw Error(ErrorKind::window, "measure window covers fewer than 3 samples");

  const Eigen::RowVectorXd values = erp.data.row(0).segment(first, count);
  const Eigen::RowVectorXd rectified = window.polarity == Polarity::positive
                                           ? values.cwiseMax(0.0).eval()
                                           : (-values).cwiseMax(0.0).eval();
  const double total_area = rectified.sum();
  if (!(total_area > 0.0))
    throw Error(ErrorKind::degenerate, "no signal of the requested polarity inside the window");

  Index peak = 0;
  rectified.maxCoeff(&peak);

  ErpMeasures out;
  out.peak_latency_ms = erp.axis.time_ms(first + peak);
  out.peak_amplitude = values[peak];
  out.mean_amplitude = values.mean();

  // earliest point where the cumulative rectified area reaches half the total
  double cumulative = 0.0;
  for (Index k = 0; k < count; ++k) {
    cumulative += rectified[k];
    if (cumulative >= 0.5 * total_area) {
      out.area_latency_50_ms = erp.axis.time_ms(first + k);
      break;
    }
  }

  // earliest pre-peak point exceeding half the rectified peak height
  const double half_peak = 0.5 * rectified[peak];
  for (Index k = 0; k <= peak; ++k) {
    if (rectified[k] > half_peak) {
      out.onset_latency_ms = erp.axis.time_ms(first + k);
      break;
    }
  }
  return out;
}

}  // namespace erpforge
