#include <cmath>
#include <random>

#include "doctest.h"
#include "erpforge/estimators.hpp"

using namespace erpforge;

namespace {

TrialSet constant_trials(std::initializer_list<double> levels, Index n_samples = 8) {
  TrialSet t;
  t.axis = {0.0, 1000.0, n_samples};
  t.channel_names = {"ch0"};
  for (double level : levels) t.data.push_back(Eigen::MatrixXd::Constant(1, n_samples, level));
  return t;
}

TrialSet random_trials(Index n_trials, Index n_channels, Index n_samples, unsigned seed) {
  TrialSet t;
  t.axis = {-100.0, 500.0, n_samples};
  for (Index c = 0; c < n_channels; ++c) t.channel_names.push_back("ch" + std::to_string(c));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Index i = 0; i < n_trials; ++i) {
    Eigen::MatrixXd m(n_channels, n_samples);
    for (Index c = 0; c < n_channels; ++c)
      for (Index s = 0; s < n_samples; ++s) m(c, s) = gauss(rng);
    t.data.push_back(std::move(m));
  }
  return t;
}

// Exhaustive minimum over all monotone paths with steps (1,1), (1,0), (0,1).
double brute_force_dtw_cost(const Eigen::VectorXd& ref, const Eigen::VectorXd& sig, Index i,
                            Index j) {
  const double d = ref[i] - sig[j];
  const double here = d * d;
  if (i == 0 && j == 0) return here;
  double best = std::numeric_limits<double>::infinity();
  if (i > 0 && j > 0) best = std::min(best, brute_force_dtw_cost(ref, sig, i - 1, j - 1));
  if (i > 0) best = std::min(best, brute_force_dtw_cost(ref, sig, i - 1, j));
  if (j > 0) best = std::min(best, brute_force_dtw_cost(ref, sig, i, j - 1));
  return here + best;
}

double path_cost(const Eigen::VectorXd& ref, const Eigen::VectorXd& sig,
                 const std::vector<std::pair<Index, Index>>& path) {
  double total = 0.0;
  for (const auto& [i, j] : path) {
    const double d = ref[i] - sig[j];
    total += d * d;
  }
  return total;
}

}  // namespace

TEST_CASE("simple_average basics") {
  auto single = constant_trials({4.5});
  CHECK(simple_average(single).data == single.data[0]);

  CHECK(simple_average(constant_trials({1.0, -1.0})).data.cwiseAbs().maxCoeff() == 0.0);
  CHECK(simple_average(constant_trials({0.0, 2.0, 4.0})).data(0, 0) == doctest::Approx(2.0));
}

TEST_CASE("tanh rank weights match a direct evaluation of the piecewise formula") {
  const TanhParams params{0.1, 0.0};
  for (Index k : {2, 3, 4, 5, 9, 16}) {
    Eigen::VectorXd kappa(k);
    for (Index rank = 1; rank <= k; ++rank) {
      const double i = static_cast<double>(rank);
      double raw = i < static_cast<double>(k) / 2.0 ? std::tanh(params.c * (i + 1.0)) - params.v
                                                    : -std::tanh(params.c * (i - k)) + params.v;
      kappa[rank - 1] = std::max(raw, 0.0);
    }
    Eigen::VectorXd expected = kappa / kappa.sum();
    Eigen::VectorXd got = tanh_rank_weights(k, params);
    CHECK((got - expected).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(got.minCoeff() >= 0.0);
    CHECK(got.sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("tanh kappa for K=4 reproduces the frozen values") {
  const Eigen::VectorXd w = tanh_rank_weights(4, {0.1, 0.0});
  const double norm = 2.0 * std::tanh(0.2) + std::tanh(0.1);
  CHECK(w[0] == doctest::Approx(0.19737532 / norm).epsilon(1e-6));
  CHECK(w[1] == doctest::Approx(0.19737532 / norm).epsilon(1e-6));
  CHECK(w[2] == doctest::Approx(0.09966799 / norm).epsilon(1e-6));
  CHECK(w[3] == 0.0);
}

TEST_CASE("tanh weighting of identical trials returns the common trial") {
  auto trials = random_trials(5, 2, 30, 11);
  for (Index i = 1; i < 5; ++i) trials.data[i] = trials.data[0];
  auto out = tanh_weighted_average(trials);
  CHECK((out.data - trials.data[0]).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("tanh weighting with K=2 keeps the smaller value") {
  auto out = tanh_weighted_average(constant_trials({3.0, 1.0}));
  CHECK(out.data(0, 0) == doctest::Approx(1.0));
  CHECK(out.data(0, 7) == doctest::Approx(1.0));
}

TEST_CASE("tanh weighting rejects a single trial") {
  auto trials = constant_trials({1.0});
  CHECK_THROWS_AS(tanh_weighted_average(trials), Error);
}

TEST_CASE("dtw path matches the exhaustive brute-force optimum on small inputs") {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    Eigen::VectorXd ref(6), sig(6);
    for (Index i = 0; i < 6; ++i) {
      ref[i] = gauss(rng);
      sig[i] = gauss(rng);
    }
    const auto path = dtw_path(ref, sig);
    const double expected = brute_force_dtw_cost(ref, sig, 5, 5);
    CHECK(path_cost(ref, sig, path) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("dtw path satisfies boundary and step conditions") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd ref(40), sig(40);
    for (Index i = 0; i < 40; ++i) {
      ref[i] = gauss(rng);
      sig[i] = gauss(rng);
    }
    const auto path = dtw_path(ref, sig);
    REQUIRE(path.front() == std::pair<Index, Index>{0, 0});
    REQUIRE(path.back() == std::pair<Index, Index>{39, 39});
    for (std::size_t p = 1; p < path.size(); ++p) {
      const Index di = path[p].first - path[p - 1].first;
      const Index dj = path[p].second - path[p - 1].second;
      const bool valid = (di == 1 && dj == 1) || (di == 1 && dj == 0) || (di == 0 && dj == 1);
      REQUIRE(valid);
    }
  }
}

TEST_CASE("dtw_average of identical trials is the common trial") {
  auto trials = random_trials(4, 1, 50, 3);
  for (Index i = 1; i < 4; ++i) trials.data[i] = trials.data[0];
  auto out = dtw_average(trials);
  CHECK((out.data - trials.data[0]).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dtw_average of constant trials is their plain mean") {
  auto out = dtw_average(constant_trials({1.0, 3.0}));
  CHECK((out.data.array() - 2.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("dtw_average concentrates displaced unit pulses") {
  TrialSet trials;
  trials.axis = {0.0, 1000.0, 100};
  trials.channel_names = {"ch0"};
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(1, 100);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(1, 100);
  a(0, 40) = 1.0;
  b(0, 60) = 1.0;
  trials.data = {a, b};

  const Erp mean = simple_average(trials);
  const Erp warped = dtw_average(trials);
  CHECK(warped.n_samples() == 100);
  CHECK(warped.data.maxCoeff() >= mean.data.maxCoeff() - 1e-12);

  // each warped trial peaks where the reference has support
  for (const auto& trial : trials.data) {
    const Eigen::VectorXd w = dtw_warp(mean.data.row(0), trial.row(0));
    Index peak = 0;
    w.maxCoeff(&peak);
    CHECK((peak == 40 || peak == 60));
  }
}

TEST_CASE("dtw_average output length always matches the input length") {
  for (unsigned seed : {1u, 2u, 3u}) {
    auto trials = random_trials(3, 2, 37, seed);
    CHECK(dtw_average(trials).n_samples() == 37);
  }
}

TEST_CASE("averaging estimators are translation equivariant") {
  const double shift = 3.7;
  auto trials = random_trials(6, 1, 40, 19);
  auto shifted = trials;
  for (auto& m : shifted.data) m.array() += shift;

  auto check = [&](auto&& estimator) {
    const Eigen::MatrixXd base = estimator(trials).data;
    const Eigen::MatrixXd moved = estimator(shifted).data;
    CHECK((moved - base).array().abs().maxCoeff() ==
          doctest::Approx(shift).epsilon(1e-9));
    CHECK(((moved - base).array() - shift).abs().maxCoeff() < 1e-9);
  };
  check([](const TrialSet& t) { return simple_average(t); });
  check([](const TrialSet& t) { return tanh_weighted_average(t, {0.1, 0.0}); });
  check([](const TrialSet& t) { return dtw_average(t); });
}

TEST_CASE("simple averaging error shrinks like one over sqrt K") {
  const Index n_samples = 200;
  Eigen::VectorXd waveform(n_samples);
  for (Index t = 0; t < n_samples; ++t) waveform[t] = 4.0 * std::sin(0.05 * t);

  std::mt19937_64 rng(123);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> log_k, log_rmse;
  for (Index k = 1; k <= 64; k *= 2) {
    double mse = 0.0;
    const int reps = 100;
    for (int b = 0; b < reps; ++b) {
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(n_samples);
      for (Index i = 0; i < k; ++i)
        for (Index t = 0; t < n_samples; ++t) acc[t] += waveform[t] + gauss(rng);
      acc /= static_cast<double>(k);
      mse += (acc - waveform).squaredNorm() / n_samples;
    }
    log_k.push_back(std::log(static_cast<double>(k)));
    log_rmse.push_back(0.5 * std::log(mse / reps));
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
  CHECK(slope == doctest::Approx(-0.5).epsilon(0.2));
}

TEST_CASE("global_template averages the task entries and ignores the query side") {
  Erp base;
  base.axis = {0.0, 1000.0, 4};
  base.channel_names = {"ch0"};
  base.data = Eigen::MatrixXd::Constant(1, 4, 1.0);
  Erp neg = base;
  neg.data.setConstant(-1.0);

  ErpLibrary library;
  library.entries.push_back({"s1", "p3", base});
  CHECK(global_template(library, "p3").data == base.data);

  library.entries.push_back({"s2", "p3", neg});
  CHECK(global_template(library, "p3").data.cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(global_template(library, "n170"), Error);
}

TEST_CASE("nearest_neighbor_template picks the closest entry deterministically") {
  Erp proto;
  proto.axis = {0.0, 1000.0, 4};
  proto.channel_names = {"ch0"};
  proto.data = Eigen::MatrixXd::Zero(1, 4);

  auto at_distance = [&](double d) {
    Erp e = proto;
    e.data.setConstant(d / 2.0);  // Frobenius distance of constant c over 4 samples is 2c
    return e;
  };

  ErpLibrary library;
  library.entries.push_back({"s1", "p3", at_distance(3.0)});
  library.entries.push_back({"s2", "p3", at_distance(1.0)});
  library.entries.push_back({"s3", "p3", at_distance(2.0)});

  Erp query = proto;
  CHECK(nearest_neighbor_template(library, "p3", query).data ==
        library.entries[1].erp.data);

  // query equal to an entry comes back unchanged
  CHECK(nearest_neighbor_template(library, "p3", library.entries[2].erp).data ==
        library.entries[2].erp.data);

  // single candidate wins regardless of query
  ErpLibrary one;
  one.entries.push_back({"s9", "p3", at_distance(40.0)});
  CHECK(nearest_neighbor_template(one, "p3", query).data == one.entries[0].erp.data);

  Erp bad = proto;
  bad.data = Eigen::MatrixXd::Zero(1, 5);
  bad.axis.n_samples = 5;
  CHECK_THROWS_AS(nearest_neighbor_template(library, "p3", bad), Error);
}
