#include "erpforge/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "erpforge/alignment.hpp"
#include "erpforge/bootstrap.hpp"
#include "erpforge/core.hpp"
#include "erpforge/io.hpp"
#include "erpforge/losses.hpp"
#include "erpforge/measures.hpp"
#include "erpforge/synth.hpp"

namespace erpforge {

namespace {

std::string fmt17(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string json_array(const std::vector<double>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += fmt17(values[i]);
  }
  out.push_back(']');
  return out;
}

std::string json_array(const std::vector<Index>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += std::to_string(values[i]);
  }
  out.push_back(']');
  return out;
}

bool has_suffix(const std::string& text, const std::string& suffix) {
  return text.size() >= suffix.size() &&
         text.compare(text.size() - suffix.size(), suffix.size(), suffix) == 0;
}

TrialSet load_trials(const std::string& path) {
  if (path == "-") return read_etb(std::cin);
  if (has_suffix(path, ".csv")) return read_csv(path);
  return read_etb(path);
}

void store_trials(const TrialSet& trials, const std::string& path) {
  if (path != "-" && has_suffix(path, ".csv"))
    write_csv(trials, path);
  else
    write_file_atomic(path, etb_bytes(trials));
}

MeasureWindow parse_window(const std::string& spec, Polarity polarity) {
  const std::size_t comma = spec.find(',');
  if (comma == std::string::npos)
    throw Error(ErrorKind::config, "window must be '<start_ms>,<end_ms>'");
  try {
    MeasureWindow window{std::stod(spec.substr(0, comma)), std::stod(spec.substr(comma + 1)),
                         polarity};
    validate(window);
    return window;
  } catch (const std::invalid_argument&) {
    throw Error(ErrorKind::config, "window must be '<start_ms>,<end_ms>'");
  }
}

std::vector<Index> parse_k_grid(const std::string& spec) {
  std::vector<Index> grid;
  std::stringstream stream(spec);
  std::string token;
  while (std::getline(stream, token, ',')) {
    try {
      const long k = std::stol(token);
      if (k < 1) throw std::invalid_argument("k");
      grid.push_back(static_cast<Index>(k));
    } catch (const std::exception&) {
      throw Error(ErrorKind::config, "k grid must be comma-separated positive integers");
    }
  }
  if (grid.empty()) throw Error(ErrorKind::config, "k grid is empty");
  return grid;
}

// Windowed alignment diagnostics: mean Pearson correlation of the shifted
// trials against the reference, and their residual RMSE.
struct AlignmentQuality {
  double correlation = 0.0;
  double rmse = 0.0;
};

AlignmentQuality alignment_quality(const TrialSet& trials, const std::vector<int>& shifts,
                                   const Erp& reference, const MeasureWindow& window) {
  const auto [first, count] = trials.axis.closed_range(window.start_ms, window.end_ms);
  AlignmentQuality quality;
  if (count < 3) return quality;
  double rss = 0.0;
  for (std::size_t i = 0; i < trials.data.size(); ++i) {
    Eigen::VectorXd aligned(count);
    for (Index k = 0; k < count; ++k) {
      const Index src = std::clamp<Index>(first + k + shifts[i], 0, trials.n_samples() - 1);
      aligned[k] = trials.data[i](0, src);
    }
    const Eigen::VectorXd ref = reference.data.row(0).segment(first, count);
    const Eigen::VectorXd da = aligned.array() - aligned.mean();
    const Eigen::VectorXd dr = ref.array() - ref.mean();
    const double denom = da.norm() * dr.norm();
    if (denom > 0.0) quality.correlation += da.dot(dr) / denom;
    rss += (aligned - ref).squaredNorm();
  }
  quality.correlation /= static_cast<double>(trials.data.size());
  quality.rmse = std::sqrt(rss / static_cast<double>(trials.data.size() * count));
  return quality;
}

std::vector<double> shifts_to_ms(const std::vector<int>& shifts, const TimeAxis& axis) {
  std::vector<double> out;
  out.reserve(shifts.size());
  for (int s : shifts) out.push_back(s * axis.step_ms());
  return out;
}

std::vector<double> read_latency_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::format, "cannot open '" + path + "'");
  nlohmann::json parsed;
  try {
    in >> parsed;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::format, std::string("latency file: ") + e.what());
  }
  if (!parsed.is_array()) throw Error(ErrorKind::format, "latency file must be a JSON array");
  std::vector<double> out;
  for (const auto& value : parsed) out.push_back(value.get<double>());
  return out;
}

struct EstimatorFlags {
  std::string method = "simple";
  std::string window;
  std::string component;
  std::string library_path;
  std::string task;
  double tanh_c = 0.1;
  double tanh_v = 0.0;
  int max_iters = 0;  // 0 keeps the per-method default (woody 20, ride 10)

  void attach(CLI::App* cmd, bool with_method) {
    if (with_method)
      cmd->add_option("--method", method, "simple|tanh|dtw|woody|ride|template|nn")
          ->required();
    cmd->add_option("--window", window, "alignment window '<start_ms>,<end_ms>'");
    cmd->add_option("--component", component,
                    "standard component name (N170, MMN, N2pc, N400, P3, LRP, ERN) "
                    "supplying the published windows");
    cmd->add_option("--library", library_path, "template library manifest (JSON)");
    cmd->add_option("--task", task, "task id for template lookups");
    cmd->add_option("--tanh-c", tanh_c, "tanh weighting curvature");
    cmd->add_option("--tanh-v", tanh_v, "tanh weighting offset");
    cmd->add_option("--max-iters", max_iters,
                    "alignment iteration cap (default: woody 20, ride 10)");
  }

  int woody_iters() const { return max_iters > 0 ? max_iters : 20; }

  EstimatorConfig build(const TrialSet& trials) const {
    EstimatorConfig config;
    config.kind = parse_estimator(method);
    config.tanh = {tanh_c, tanh_v};
    config.woody_max_iters = woody_iters();
    if (!window.empty()) config.window = parse_window(window, Polarity::positive);
    if (config.kind == EstimatorKind::woody && !config.window && !component.empty())
      config.window = woody_window(component);
    if (config.kind == EstimatorKind::ride) {
      if (!component.empty())
        config.ride = ride_config(component);
      else if (config.window) {
        RideConfig ride;
        ride.r_window = config.window;
        config.ride = ride;
      }
      if (config.ride && max_iters > 0) config.ride->max_outer_iters = max_iters;
    }
    if (!library_path.empty()) {
      config.library = read_library(library_path);
      config.task = task.empty() ? trials.task_id : task;
    }
    return config;
  }
};

int cmd_simulate(const SimConfig& config, const std::string& out_path,
                 const std::string& latencies_path) {
  const SimResult result = simulate(config);
  store_trials(result.trials, out_path);
  if (!latencies_path.empty())
    write_file_atomic(latencies_path, json_array(result.true_latencies_ms) + "\n");
  return 0;
}

int cmd_average(const EstimatorFlags& flags, const std::string& in_path,
                const std::string& out_path, const std::string& channel) {
  TrialSet trials = load_trials(in_path);
  if (!channel.empty()) trials = select_channel(trials, channel);
  const EstimatorConfig config = flags.build(trials);

  std::string extra;
  Erp estimate;
  if (config.kind == EstimatorKind::woody) {
    const MeasureWindow window = config.window.value_or(
        MeasureWindow{trials.axis.t0_ms, trials.axis.end_ms(), Polarity::positive});
    const AlignmentResult result = woody_align(trials, window, flags.woody_iters());
    estimate = result.aligned_average;
    const AlignmentQuality quality =
        alignment_quality(trials, result.shifts_samples, estimate, window);
    extra = "\"converged\":" + std::string(result.converged ? "true" : "false") +
            ",\"correlation\":" + fmt17(quality.correlation) +
            ",\"iterations\":" + std::to_string(result.iterations) + ",";
    extra += "\"method\":\"woody\",\"rmse\":" + fmt17(quality.rmse) + ",";
  } else if (config.kind == EstimatorKind::ride) {
    if (!config.ride)
      throw Error(ErrorKind::config, "ride needs --component or --window");
    const RideResult result = ride_decompose(trials, *config.ride);
    estimate = result.reconstruction;
    // report the latency-estimated component, preferring C over R
    const auto it = result.alignments.count(RideComponent::central)
                        ? result.alignments.find(RideComponent::central)
                        : result.alignments.find(RideComponent::response);
    AlignmentQuality quality;
    if (it != result.alignments.end()) {
      const MeasureWindow window = it->first == RideComponent::central
                                       ? *config.ride->c_window
                                       : *config.ride->r_window;
      quality = alignment_quality(trials, it->second.shifts_samples,
                                  result.components.at(it->first), window);
    }
    extra = "\"converged\":" + std::string(result.converged ? "true" : "false") +
            ",\"correlation\":" + fmt17(quality.correlation) +
            ",\"iterations\":" + std::to_string(result.iterations) + ",";
    extra += "\"method\":\"ride\",\"rmse\":" + fmt17(quality.rmse) + ",";
  } else {
    estimate = make_estimator(config)(trials);
    extra = "\"method\":\"" + std::string(to_string(config.kind)) + "\",";
  }

  if (!out_path.empty()) write_erp(estimate, out_path);
  if (out_path != "-")  // the summary shares stdout with '-' output, so skip it there
    std::cout << "{\"channels\":" << estimate.n_channels() << "," << extra
              << "\"samples\":" << estimate.n_samples() << ",\"trials\":" << trials.n_trials()
              << "}\n";
  return 0;
}

int cmd_align(const EstimatorFlags& flags, const std::string& in_path,
              const std::string& out_path, const std::string& report_path,
              const std::string& truth_path, const std::string& channel) {
  TrialSet trials = load_trials(in_path);
  if (!channel.empty()) trials = select_channel(trials, channel);

  std::vector<int> shifts;
  Erp aligned;
  bool converged = false;
  int iterations = 0;
  MeasureWindow window{trials.axis.t0_ms, trials.axis.end_ms(), Polarity::positive};

  const EstimatorKind kind = parse_estimator(flags.method);
  if (kind == EstimatorKind::woody) {
    if (!flags.window.empty())
      window = parse_window(flags.window, Polarity::positive);
    else if (!flags.component.empty())
      window = woody_window(flags.component);
    const AlignmentResult result = woody_align(trials, window, flags.woody_iters());
    shifts = result.shifts_samples;
    aligned = result.aligned_average;
    converged = result.converged;
    iterations = result.iterations;
  } else if (kind == EstimatorKind::ride) {
    EstimatorConfig config = flags.build(trials);
    if (!config.ride) throw Error(ErrorKind::config, "ride needs --component or --window");
    const RideResult result = ride_decompose(trials, *config.ride);
    const auto it = result.alignments.count(RideComponent::central)
                        ? result.alignments.find(RideComponent::central)
                        : result.alignments.find(RideComponent::response);
    if (it == result.alignments.end())
      throw Error(ErrorKind::config, "configuration has no latency-estimated component");
    shifts = it->second.shifts_samples;
    window = it->first == RideComponent::central ? *config.ride->c_window
                                                 : *config.ride->r_window;
    aligned = result.reconstruction;
    converged = result.converged;
    iterations = result.iterations;
  } else {
    throw Error(ErrorKind::config, "align supports --method woody or ride");
  }

  const std::vector<double> est_ms = shifts_to_ms(shifts, trials.axis);
  std::string report = "{";
  if (!truth_path.empty()) {
    const std::vector<double> truth = read_latency_json(truth_path);
    const LatencyScore score = score_latency_recovery(truth, est_ms);
    report += "\"centered_rmse_ms\":" + fmt17(score.centered_rmse_ms) + ",";
    report += "\"converged\":" + std::string(converged ? "true" : "false") + ",";
    report += "\"correlation\":" + fmt17(score.correlation) + ",";
  } else {
    const AlignmentQuality quality = alignment_quality(trials, shifts, aligned, window);
    report += "\"converged\":" + std::string(converged ? "true" : "false") + ",";
    report += "\"correlation\":" + fmt17(quality.correlation) + ",";
    report += "\"residual_rmse\":" + fmt17(quality.rmse) + ",";
  }
  report += "\"iterations\":" + std::to_string(iterations) + ",";
  report += "\"method\":\"" + flags.method + "\",";
  report += "\"shifts_ms\":" + json_array(est_ms) + ",";
  report += "\"shifts_samples\":[";
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    if (i > 0) report.push_back(',');
    report += std::to_string(shifts[i]);
  }
  report += "]}\n";

  if (!out_path.empty()) write_erp(aligned, out_path);
  write_file_atomic(report_path, report);
  return 0;
}

int cmd_eval(const EstimatorFlags& flags, const std::string& estimator_name,
             const std::string& in_path, const std::string& report_path,
             const std::string& channel, const std::string& k_grid_spec, Index n_bootstraps,
             const std::string& mode_name, std::uint64_t seed) {
  TrialSet trials = load_trials(in_path);
  if (!channel.empty()) trials = select_channel(trials, channel);

  EstimatorFlags estimator_flags = flags;
  estimator_flags.method = estimator_name;
  const EstimatorConfig config = estimator_flags.build(trials);
  const std::vector<Index> k_grid = parse_k_grid(k_grid_spec);
  const EvalMode mode = parse_eval_mode(mode_name);

  const SplitHalves halves = split_half(trials, mix_seed(seed, 0xA5));
  const BootstrapEvalReport report =
      evaluate_estimator(halves, make_estimator(config), k_grid, n_bootstraps, mode, seed);

  std::string json = "{";
  json += "\"estimator\":\"" + estimator_name + "\",";
  json += "\"k_grid\":" + json_array(report.k_grid) + ",";
  json += "\"mode\":\"" + std::string(to_string(report.mode)) + "\",";
  json += "\"per_bootstrap\":[";
  for (Index k = 0; k < report.per_bootstrap_rmse.rows(); ++k) {
    if (k > 0) json.push_back(',');
    std::vector<double> row(report.per_bootstrap_rmse.row(k).begin(),
                            report.per_bootstrap_rmse.row(k).end());
    json += json_array(row);
  }
  json += "],";
  json += "\"r2\":" + json_array(report.r2_per_k) + ",";
  json += "\"rmse\":" + json_array(report.rmse_per_k) + ",";
  json += "\"seed\":" + std::to_string(seed);
  json += "}\n";
  write_file_atomic(report_path, json);
  return 0;
}

int cmd_measures(const std::string& in_path, const std::string& out_path,
                 const std::string& window_spec, const std::string& polarity_name,
                 const std::string& component, const std::string& channel) {
  TrialSet trials = load_trials(in_path);
  if (!channel.empty()) trials = select_channel(trials, channel);
  const Erp erp = simple_average(trials);

  MeasureWindow window;
  if (!component.empty()) {
    window = woody_window(component);
    if (!polarity_name.empty()) window.polarity = parse_polarity(polarity_name);
  } else if (!window_spec.empty()) {
    const Polarity polarity =
        polarity_name.empty() ? Polarity::positive : parse_polarity(polarity_name);
    window = parse_window(window_spec, polarity);
  } else {
    throw Error(ErrorKind::config, "measures needs --window or --component");
  }

  const ErpMeasures m = erp_measures(erp, window);
  std::string json = "{";
  json += "\"area_latency_50_ms\":" + fmt17(m.area_latency_50_ms) + ",";
  json += "\"mean_amplitude\":" + fmt17(m.mean_amplitude) + ",";
  json += "\"onset_latency_ms\":" + fmt17(m.onset_latency_ms) + ",";
  json += "\"peak_amplitude\":" + fmt17(m.peak_amplitude) + ",";
  json += "\"peak_latency_ms\":" + fmt17(m.peak_latency_ms);
  json += "}\n";
  write_file_atomic(out_path, json);
  return 0;
}

int cmd_combine(const std::vector<std::string>& inputs, const std::string& out_path,
                bool average_variance) {
  std::vector<UncertainErp> estimates;
  estimates.reserve(inputs.size());
  for (const auto& path : inputs) estimates.push_back(read_uncertain_erp(path));
  UncertainErp combined = inverse_variance_combine(estimates);
  if (average_variance)
    combined = scale_to_average_variance(combined, static_cast<Index>(estimates.size()));
  write_uncertain_erp(combined, out_path);
  return 0;
}

int cmd_convert(const std::string& in_path, const std::string& out_path) {
  store_trials(load_trials(in_path), out_path);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"ERP estimation toolkit: simulation, robust averaging, latency alignment,\n"
               "bootstrap evaluation and signal measures."};
  app.name("erpforge");
  app.require_subcommand(1);

  std::uint64_t seed = 0;

  // simulate
  auto* simulate_cmd = app.add_subcommand("simulate", "generate jittered two-bump trials");
  SimConfig sim_config;
  std::string sim_out = "-";
  std::string sim_latencies;
  std::string sim_latency_range;
  simulate_cmd->add_option("--seed", seed, "rng seed")->envname("ERPFORGE_SEED");
  simulate_cmd->add_option("--out", sim_out, "output file (.etb or .csv; '-' for stdout)");
  simulate_cmd->add_option("--latencies-out", sim_latencies,
                           "write the true latencies as a JSON array");
  simulate_cmd->add_option("--trials", sim_config.n_trials, "number of trials");
  simulate_cmd->add_option("--noise", sim_config.noise_scale, "noise standard deviation");
  simulate_cmd->add_option("--noise-smooth", sim_config.noise_smooth_ms,
                           "noise autocorrelation scale in ms (0 = white)");
  simulate_cmd->add_option("--amp-jitter", sim_config.amp_jitter, "relative amplitude jitter");
  simulate_cmd->add_option("--drift", sim_config.drift_scale, "drift slope sd (uV/s)");
  simulate_cmd->add_option("--latency-range", sim_latency_range,
                           "P300 latency range '<min_ms>,<max_ms>'");

  // average
  auto* average_cmd = app.add_subcommand("average", "estimate an ERP from trials");
  EstimatorFlags average_flags;
  std::string average_in = "-", average_out, average_channel;
  average_flags.attach(average_cmd, true);
  average_cmd->add_option("--in", average_in, "input trials (.etb or .csv; '-' for stdin)");
  average_cmd->add_option("--out", average_out, "output ERP file (.etb)");
  average_cmd->add_option("--channel", average_channel, "restrict to one channel");

  // align
  auto* align_cmd = app.add_subcommand("align", "latency alignment with a full report");
  EstimatorFlags align_flags;
  align_flags.method = "woody";
  std::string align_in = "-", align_out, align_report = "-", align_truth, align_channel;
  align_cmd->add_option("--method", align_flags.method, "woody|ride");
  align_cmd->add_option("--window", align_flags.window, "alignment window '<start>,<end>' ms");
  align_cmd->add_option("--component", align_flags.component, "standard component name");
  align_cmd->add_option("--max-iters", align_flags.max_iters, "iteration cap");
  align_cmd->add_option("--in", align_in, "input trials");
  align_cmd->add_option("--out", align_out, "aligned-average ERP output (.etb)");
  align_cmd->add_option("--report", align_report, "JSON report path ('-' for stdout)");
  align_cmd->add_option("--true-latencies", align_truth,
                        "JSON array of ground-truth latencies (ms) to score against");
  align_cmd->add_option("--channel", align_channel, "restrict to one channel");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "split-half bootstrap evaluation");
  EstimatorFlags eval_flags;
  std::string eval_estimator = "simple", eval_in = "-", eval_report = "-", eval_channel;
  std::string eval_k_grid = "1,2,5,10,20";
  std::string eval_mode = "random";
  Index eval_bootstraps = 200;
  eval_cmd->add_option("--estimator", eval_estimator,
                       "simple|tanh|dtw|woody|ride|template|nn");
  eval_cmd->add_option("--k-grid", eval_k_grid, "comma-separated trial counts");
  eval_cmd->add_option("--bootstraps", eval_bootstraps, "bootstrap samples per k");
  eval_cmd->add_option("--mode", eval_mode, "random|chronological");
  eval_cmd->add_option("--seed", seed, "rng seed")->envname("ERPFORGE_SEED");
  eval_cmd->add_option("--in", eval_in, "input trials");
  eval_cmd->add_option("--report", eval_report, "JSON report path ('-' for stdout)");
  eval_cmd->add_option("--channel", eval_channel, "restrict to one channel");
  eval_flags.attach(eval_cmd, false);

  // measures
  auto* measures_cmd = app.add_subcommand("measures", "ERP signal measures in a window");
  std::string measures_in = "-", measures_out = "-", measures_window, measures_polarity;
  std::string measures_component, measures_channel;
  measures_cmd->add_option("--in", measures_in, "input ERP or trials");
  measures_cmd->add_option("--out", measures_out, "JSON output ('-' for stdout)");
  measures_cmd->add_option("--window", measures_window, "measure window '<start>,<end>' ms");
  measures_cmd->add_option("--polarity", measures_polarity, "positive|negative");
  measures_cmd->add_option("--component", measures_component,
                           "standard component supplying window and polarity");
  measures_cmd->add_option("--channel", measures_channel, "restrict to one channel");

  // combine
  auto* combine_cmd = app.add_subcommand("combine", "inverse-variance ERP fusion");
  std::vector<std::string> combine_inputs;
  std::string combine_out;
  bool combine_average_variance = false;
  combine_cmd->add_option("--inputs", combine_inputs, "uncertain-ERP files (mean+sigma)")
      ->required()
      ->expected(-1);
  combine_cmd->add_option("--out", combine_out, "combined output file")->required();
  combine_cmd->add_flag("--average-variance", combine_average_variance,
                        "rescale the variance of the mean by the estimate count");

  // convert
  auto* convert_cmd = app.add_subcommand("convert", "convert between .etb and .csv");
  std::string convert_in, convert_out;
  convert_cmd->add_option("--in", convert_in, "input file")->required();
  convert_cmd->add_option("--out", convert_out, "output file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (simulate_cmd->parsed()) {
      sim_config.rng_seed = seed;
      if (!sim_latency_range.empty()) {
        const MeasureWindow range = parse_window(sim_latency_range, Polarity::positive);
        sim_config.p300_latency_min_ms = range.start_ms;
        sim_config.p300_latency_max_ms = range.end_ms;
      }
      return cmd_simulate(sim_config, sim_out, sim_latencies);
    }
    if (average_cmd->parsed())
      return cmd_average(average_flags, average_in, average_out, average_channel);
    if (align_cmd->parsed())
      return cmd_align(align_flags, align_in, align_out, align_report, align_truth,
                       align_channel);
    if (eval_cmd->parsed())
      return cmd_eval(eval_flags, eval_estimator, eval_in, eval_report, eval_channel,
                      eval_k_grid, eval_bootstraps, eval_mode, seed);
    if (measures_cmd->parsed())
      return cmd_measures(measures_in, measures_out, measures_window, measures_polarity,
                          measures_component, measures_channel);
    if (combine_cmd->parsed())
      return cmd_combine(combine_inputs, combine_out, combine_average_variance);
    if (convert_cmd->parsed()) return cmd_convert(convert_in, convert_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace erpforge
