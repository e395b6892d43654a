// Acceptance suite: one test case per release criterion, each printing a
// single PASS/FAIL line with its measured numbers.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "erpforge/alignment.hpp"
#include "erpforge/bootstrap.hpp"
#include "erpforge/cli.hpp"
#include "erpforge/core.hpp"
#include "erpforge/io.hpp"
#include "erpforge/losses.hpp"
#include "erpforge/measures.hpp"
#include "erpforge/synth.hpp"

using namespace erpforge;

namespace {

void report(int index, const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d (%s): %s\n", ok ? "PASS" : "FAIL", index, name, detail.c_str());
  std::fflush(stdout);
}

double rmse_to(const Erp& a, const Erp& b) {
  return std::sqrt((a.data - b.data).squaredNorm() / static_cast<double>(a.data.size()));
}

}  // namespace

TEST_CASE("criterion 1: simulated latency-recovery validation") {
  const auto start = std::chrono::steady_clock::now();

  double woody_corr = 0.0, woody_rmse = 0.0, ride_corr = 0.0, ride_rmse = 0.0;
  const int n_seeds = 20;
  for (std::uint64_t seed = 0; seed < n_seeds; ++seed) {
    SimConfig config;
    config.rng_seed = seed;
    const SimResult sim = simulate(config);
    const MeasureWindow window{150.0, 650.0, Polarity::positive};

    const AlignmentResult woody = woody_align(sim.trials, window);
    std::vector<double> woody_ms;
    for (int s : woody.shifts_samples) woody_ms.push_back(s * sim.trials.axis.step_ms());
    const LatencyScore ws = score_latency_recovery(sim.true_latencies_ms, woody_ms);
    woody_corr += ws.correlation;
    woody_rmse += ws.centered_rmse_ms;

    RideConfig ride;
    ride.s_window = MeasureWindow{-100.0, 100.0, Polarity::positive};
    ride.c_window = window;
    const RideResult decomposition = ride_decompose(sim.trials, ride);
    std::vector<double> ride_ms;
    for (int s : decomposition.alignments.at(RideComponent::central).shifts_samples)
      ride_ms.push_back(s * sim.trials.axis.step_ms());
    const LatencyScore rs = score_latency_recovery(sim.true_latencies_ms, ride_ms);
    ride_corr += rs.correlation;
    ride_rmse += rs.centered_rmse_ms;
  }
  woody_corr /= n_seeds;
  woody_rmse /= n_seeds;
  ride_corr /= n_seeds;
  ride_rmse /= n_seeds;

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool ok = woody_corr >= 0.98 && woody_rmse <= 8.0 && ride_corr >= 0.98 &&
                  ride_rmse <= 8.0 && elapsed < 30.0;

  char detail[256];
  std::snprintf(detail, sizeof detail,
                "woody corr %.4f (>=0.98), rmse %.2f ms (<=8); ride corr %.4f, rmse %.2f ms; "
                "%.1f s (<30)",
                woody_corr, woody_rmse, ride_corr, ride_rmse, elapsed);
  report(1, "simulated validation", ok, detail);
  CHECK(ok);
}

TEST_CASE("criterion 2: averaging follows the one-over-sqrt-K law") {
  const Index n_samples = 200;
  TrialSet pool;
  pool.axis = {0.0, 500.0, n_samples};
  pool.channel_names = {"ch0"};
  Eigen::MatrixXd waveform(1, n_samples);
  for (Index t = 0; t < n_samples; ++t) waveform(0, t) = 4.0 * std::sin(0.05 * t);

  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Index pool_size = 4096;
  for (Index i = 0; i < pool_size; ++i) {
    Eigen::MatrixXd trial = waveform;
    for (Index t = 0; t < n_samples; ++t) trial(0, t) += gauss(rng);
    pool.data.push_back(std::move(trial));
  }
  Erp truth;
  truth.axis = pool.axis;
  truth.channel_names = pool.channel_names;
  truth.data = waveform;

  const Index n_bootstraps = 200;
  std::vector<double> log_k, log_rmse;
  for (Index k = 1; k <= 64; k *= 2) {
    std::vector<Erp> estimates;
    estimates.reserve(n_bootstraps);
    for (Index b = 0; b < n_bootstraps; ++b)
      estimates.push_back(simple_average(
          bootstrap_sample(pool, k, mix_seed(11, static_cast<std::uint64_t>(k),
                                             static_cast<std::uint64_t>(b)))));
    log_k.push_back(std::log(static_cast<double>(k)));
    log_rmse.push_back(std::log(rmse(estimates, truth)));
  }

  double mx = 0, my = 0;
  for (std::size_t i = 0; i < log_k.size(); ++i) {
    mx += log_k[i];
    my += log_rmse[i];
  }
  mx /= log_k.size();
  my /= log_k.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < log_k.size(); ++i) {
    sxy += (log_k[i] - mx) * (log_rmse[i] - my);
    sxx += (log_k[i] - mx) * (log_k[i] - mx);
  }
  const double slope = sxy / sxx;
  const bool ok = slope >= -0.6 && slope <= -0.4;

  char detail[128];
  std::snprintf(detail, sizeof detail, "log-log RMSE slope %.4f (target -0.5 +- 0.1), B=200",
                slope);
  report(2, "averaging convergence law", ok, detail);
  CHECK(ok);
}

TEST_CASE("criterion 3: alignment-aware estimators beat plain averaging under jitter") {
  int dtw_wins = 0, woody_wins = 0;
  const int n_seeds = 20;
  for (std::uint64_t seed = 0; seed < n_seeds; ++seed) {
    SimConfig config;
    config.rng_seed = seed;
    config.noise_scale = 0.3;
    config.noise_smooth_ms = 12.0;
    config.p300_latency_min_ms = 350.0;
    config.p300_latency_max_ms = 450.0;
    const SimResult sim = simulate(config);

    const TrialSet trials = crop(baseline_correct(sim.trials, -100.0, 0.0), -100.0, 800.0);
    const Erp truth = crop(sim.template_erp, -100.0, 800.0);

    const double simple_err = rmse_to(simple_average(trials), truth);
    if (rmse_to(dtw_average(trials), truth) < simple_err) ++dtw_wins;
    const Erp woody =
        woody_align(trials, {150.0, 650.0, Polarity::positive}).aligned_average;
    if (rmse_to(woody, truth) < simple_err) ++woody_wins;
  }
  const bool ok = dtw_wins >= 18 && woody_wins >= 18;
  char detail[128];
  std::snprintf(detail, sizeof detail, "K=50: dtw wins %d/20, woody wins %d/20 (>=18 each)",
                dtw_wins, woody_wins);
  report(3, "jitter benefit", ok, detail);
  CHECK(ok);
}

TEST_CASE("criterion 4: metric fixed points are exact") {
  Erp target;
  target.axis = {0.0, 1000.0, 64};
  target.channel_names = {"ch0"};
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> grid(-1024, 1024);
  target.data.resize(1, 64);
  for (Index t = 0; t < 64; ++t) target.data(0, t) = grid(rng) / 1024.0;

  Erp zero = target;
  zero.data.setZero();
  Erp offset = target;
  offset.data.array() += 2.0;

  const bool r2_self = r_squared({target}, target) == 1.0;
  const bool r2_zero = r_squared({zero}, target) == 0.0;
  const bool rmse_offset = rmse({offset}, target) == 2.0;
  const bool ok = r2_self && r2_zero && rmse_offset;

  std::ostringstream detail;
  detail << "R2(target,target)=" << (r2_self ? "1 exactly" : "NOT 1") << ", R2(zero)="
         << (r2_zero ? "0 exactly" : "NOT 0") << ", RMSE(offset 2)="
         << (rmse_offset ? "2 exactly" : "NOT 2");
  report(4, "metric fixed points", ok, detail.str());
  CHECK(ok);
}

TEST_CASE("criterion 5: loss kernels match their oracles") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // gradient check against central finite differences
  bool gradients_ok = true;
  {
    Eigen::MatrixXd target(2, 4), mean(2, 4), sigma(2, 4);
    for (Index c = 0; c < 2; ++c)
      for (Index t = 0; t < 4; ++t) {
        target(c, t) = gauss(rng);
        mean(c, t) = gauss(rng);
        sigma(c, t) = 0.8 + 0.4 * std::abs(gauss(rng));
      }
    Erp target_erp;
    target_erp.axis = {0.0, 1000.0, 4};
    target_erp.channel_names = {"a", "b"};
    target_erp.data = target;
    auto wrap = [&](const Eigen::MatrixXd& m, const Eigen::MatrixXd& s) {
      UncertainErp e;
      e.mean = target_erp;
      e.mean.data = m;
      e.sigma = s;
      return e;
    };
    const GaussianNllGrad grad = gaussian_nll_grad(target_erp, wrap(mean, sigma));
    const double h = 1e-5;
    for (Index c = 0; c < 2 && gradients_ok; ++c)
      for (Index t = 0; t < 4 && gradients_ok; ++t) {
        Eigen::MatrixXd up = mean, down = mean;
        up(c, t) += h;
        down(c, t) -= h;
        const double fd_mean = (gaussian_nll(target_erp, wrap(up, sigma)) -
                                gaussian_nll(target_erp, wrap(down, sigma))) /
                               (2 * h);
        if (std::abs(fd_mean - grad.d_mean(c, t)) / std::max(1e-8, std::abs(grad.d_mean(c, t))) >=
            1e-5)
          gradients_ok = false;
        Eigen::MatrixXd sup = sigma, sdown = sigma;
        sup(c, t) += h;
        sdown(c, t) -= h;
        const double fd_sigma = (gaussian_nll(target_erp, wrap(mean, sup)) -
                                 gaussian_nll(target_erp, wrap(mean, sdown))) /
                                (2 * h);
        if (std::abs(fd_sigma - grad.d_sigma(c, t)) /
                std::max(1e-8, std::abs(grad.d_sigma(c, t))) >=
            1e-5)
          gradients_ok = false;
      }
  }

  // aggregated similarities and the contrastive loss against scalar oracles
  bool oracles_ok = true;
  double worst = 0.0;
  for (int repetition = 0; repetition < 20; ++repetition) {
    auto make_batch = [&](unsigned salt) {
      LatentBatch batch;
      batch.n_subjects = 3;
      batch.n_tasks = 3;
      batch.values.resize(9, 4);
      std::mt19937_64 local(salt * 7919u + repetition);
      std::normal_distribution<double> g(0.0, 1.0);
      for (Index r = 0; r < 9; ++r)
        for (Index c = 0; c < 4; ++c) batch.values(r, c) = g(local);
      return batch;
    };
    const LatentBatch a = make_batch(1);
    const LatentBatch b = make_batch(2);

    for (LatentSpace space : {LatentSpace::subject, LatentSpace::task}) {
      const Eigen::MatrixXd sim = aggregate_similarity(a, b, space);
      for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 3; ++j) {
          double expected = 0.0;
          for (Index axis = 0; axis < 3; ++axis) {
            const Eigen::RowVectorXd u =
                space == LatentSpace::subject ? a.latent(i, axis) : a.latent(axis, i);
            const Eigen::RowVectorXd v =
                space == LatentSpace::subject ? b.latent(j, axis) : b.latent(axis, j);
            expected += u.dot(v) / (u.norm() * v.norm());
          }
          worst = std::max(worst, std::abs(sim(i, j) - expected));
        }

      const double tau = 0.5;
      double expected_loss = 0.0;
      for (Index m = 0; m < 3; ++m) {
        double row_den = 0.0, col_den = 0.0;
        for (Index i = 0; i < 3; ++i) {
          if (i == m) continue;
          row_den += std::exp(sim(m, i) / tau);
          col_den += std::exp(sim(i, m) / tau);
        }
        expected_loss += -std::log(std::exp(sim(m, m) / tau) / row_den) -
                         std::log(std::exp(sim(m, m) / tau) / col_den);
      }
      expected_loss /= 3.0;
      worst = std::max(worst, std::abs(contrastive_loss(sim, tau) - expected_loss));
    }
  }
  oracles_ok = worst < 1e-12;

  // annealing endpoints
  const Eigen::MatrixXd sigma_hat = Eigen::MatrixXd::Constant(2, 3, 2.75);
  const AnnealSchedule schedule{100};
  const bool anneal_ok = anneal_sigma(sigma_hat, 0, schedule) == Eigen::MatrixXd::Ones(2, 3) &&
                         anneal_sigma(sigma_hat, 100, schedule) == sigma_hat;

  const bool ok = gradients_ok && oracles_ok && anneal_ok;
  char detail[192];
  std::snprintf(detail, sizeof detail,
                "gradients %s (rel err < 1e-5); oracle gap %.2e (< 1e-12); anneal endpoints %s",
                gradients_ok ? "match" : "DIVERGE", worst, anneal_ok ? "exact" : "WRONG");
  report(5, "loss kernel correctness", ok, detail);
  CHECK(ok);
}

TEST_CASE("criterion 6: inverse-variance fusion has least variance") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> sig(0.2, 3.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  int violations = 0;
  const int n_inputs = 1000;
  for (int input = 0; input < n_inputs; ++input) {
    const int m = 2 + input % 5;
    std::vector<UncertainErp> estimates;
    for (int i = 0; i < m; ++i) {
      UncertainErp e;
      e.mean.axis = {0.0, 1000.0, 1};
      e.mean.channel_names = {"ch0"};
      e.mean.data = Eigen::MatrixXd::Constant(1, 1, gauss(rng));
      e.sigma = Eigen::MatrixXd::Constant(1, 1, sig(rng));
      estimates.push_back(std::move(e));
    }
    const UncertainErp combined = inverse_variance_combine(estimates);
    const double fused_variance = combined.sigma(0, 0) * combined.sigma(0, 0);

    for (int weighting = 0; weighting < 101; ++weighting) {
      Eigen::VectorXd weights(m);
      for (int i = 0; i < m; ++i) weights[i] = weighting == 0 ? 1.0 : unit(rng);
      weights /= weights.sum();
      double variance = 0.0;
      for (int i = 0; i < m; ++i)
        variance += weights[i] * weights[i] * estimates[static_cast<std::size_t>(i)].sigma(0, 0) *
                    estimates[static_cast<std::size_t>(i)].sigma(0, 0);
      if (fused_variance > variance * (1.0 + 1e-12)) ++violations;
    }
  }
  const bool ok = violations == 0;
  char detail[128];
  std::snprintf(detail, sizeof detail,
                "%d violations over %d inputs x (uniform + 100 random convex weightings)",
                violations, n_inputs);
  report(6, "fusion optimality", ok, detail);
  CHECK(ok);
}

TEST_CASE("criterion 7: trial-count sampler matches the 1/k law") {
  struct Case {
    Index n;
    double critical;  // chi-square 0.99 quantile at n-1 degrees of freedom
  };
  const Case cases[] = {{3, 9.21034}, {10, 21.66599}, {50, 74.91947}};
  bool ok = true;
  std::ostringstream detail;
  for (const Case& c : cases) {
    const TrialCountSampler sampler = make_trial_count_sampler(c.n);
    Rng rng(1234 + static_cast<std::uint64_t>(c.n));
    std::vector<int> counts(static_cast<std::size_t>(c.n), 0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i)
      ++counts[static_cast<std::size_t>(sample_trial_count(sampler, rng) - 1)];
    double chi2 = 0.0;
    for (Index k = 0; k < c.n; ++k) {
      const double expected = draws * sampler.weights[k];
      const double diff = counts[static_cast<std::size_t>(k)] - expected;
      chi2 += diff * diff / expected;
    }
    if (chi2 >= c.critical) ok = false;
    detail << "n=" << c.n << ": chi2 " << std::fixed << chi2 << " < " << c.critical << "; ";
  }
  report(7, "sampler law", ok, detail.str() + "alpha=0.01, 1e5 draws");
  CHECK(ok);
}

TEST_CASE("criterion 8: determinism of reports and the trial format") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "erpforge_acceptance";
  fs::create_directories(dir);

  const std::string sim = (dir / "det_sim.etb").string();
  bool ok = run_cli({"simulate", "--seed", "5", "--out", sim}) == 0;

  auto eval_to = [&](const std::string& report_path) {
    return run_cli({"eval", "--estimator", "simple", "--k-grid", "1,5,10", "--bootstraps",
                    "50", "--mode", "random", "--seed", "11", "--in", sim, "--report",
                    report_path});
  };
  const std::string report_a = (dir / "det_a.json").string();
  const std::string report_b = (dir / "det_b.json").string();
  ok = ok && eval_to(report_a) == 0 && eval_to(report_b) == 0;

  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
  };
  const bool reports_identical = ok && slurp(report_a) == slurp(report_b);

  // ETB round trip at 32-bit precision
  std::mt19937_64 rng(9);
  std::normal_distribution<double> gauss(0.0, 1.0);
  TrialSet trials;
  trials.axis = {-200.0, 500.0, 64};
  trials.channel_names = {"Cz", "Pz"};
  for (Index i = 0; i < 3; ++i) {
    Eigen::MatrixXd trial(2, 64);
    for (Index c = 0; c < 2; ++c)
      for (Index t = 0; t < 64; ++t) trial(c, t) = gauss(rng);
    trials.data.push_back(std::move(trial));
  }
  const TrialSet back = parse_etb(etb_bytes(trials));
  bool lossless = back.axis == trials.axis && back.channel_names == trials.channel_names;
  for (Index i = 0; i < 3 && lossless; ++i)
    for (Index c = 0; c < 2 && lossless; ++c)
      for (Index t = 0; t < 64 && lossless; ++t)
        lossless = back.data[static_cast<std::size_t>(i)](c, t) ==
                   static_cast<double>(
                       static_cast<float>(trials.data[static_cast<std::size_t>(i)](c, t)));

  ok = ok && reports_identical && lossless;
  char detail[160];
  std::snprintf(detail, sizeof detail, "reports byte-identical: %s; ETB 32-bit round trip: %s",
                reports_identical ? "yes" : "NO", lossless ? "lossless" : "LOSSY");
  report(8, "determinism", ok, detail);
  CHECK(ok);
}
