#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sigsvdd/eval.hpp"

using namespace sigsvdd;

TEST_CASE("confusion counting") {
  std::vector<double> scores = {1.0, -1.0, 2.0, -2.0};
  std::vector<int> labels = {-1, 1, -1, 1};  // anomalies score high: all correct
  ConfusionMatrix cm = confusion(scores, labels, 0.0);
  CHECK(cm.tp == 2);
  CHECK(cm.tn == 2);
  CHECK(cm.fp == 0);
  CHECK(cm.fn == 0);

  ConfusionMatrix all_pos = confusion(scores, labels, -10.0);
  CHECK(all_pos.tn == 0);
  CHECK(all_pos.fn == 0);

  ConfusionMatrix none = confusion(scores, labels, 1e308);
  CHECK(none.tp == 0);
  CHECK(none.fp == 0);

  CHECK_THROWS_AS(confusion({1.0}, {1, -1}, 0.0), std::invalid_argument);
}

TEST_CASE("aggregation is a field-wise sum") {
  ConfusionMatrix a{1, 2, 3, 4}, b{2, 0, 1, 5};
  ConfusionMatrix s = aggregate({a, b});
  CHECK(s.tp == 3);
  CHECK(s.fp == 2);
  CHECK(s.tn == 4);
  CHECK(s.fn == 9);
  ConfusionMatrix single = aggregate({a});
  CHECK(single.tp == a.tp);
  ConfusionMatrix swapped = aggregate({b, a});
  CHECK(swapped.tp == s.tp);
  CHECK(swapped.fn == s.fn);
  CHECK_THROWS_AS(aggregate({}), std::invalid_argument);
}

TEST_CASE("precision, recall, f1") {
  PrecisionRecallF1 r = precision_recall_f1({1, 1, 0, 1});
  CHECK(r.precision == doctest::Approx(0.5));
  CHECK(r.recall == doctest::Approx(0.5));
  CHECK(r.f1 == doctest::Approx(0.5));

  PrecisionRecallF1 perfect = precision_recall_f1({5, 0, 5, 0});
  CHECK(perfect.precision == 1.0);
  CHECK(perfect.recall == 1.0);
  CHECK(perfect.f1 == 1.0);

  PrecisionRecallF1 degenerate = precision_recall_f1({0, 0, 3, 0});
  CHECK(degenerate.precision == 0.0);
  CHECK(degenerate.recall == 0.0);
  CHECK(degenerate.f1 == 0.0);
}

TEST_CASE("g-mean") {
  CHECK(g_mean({5, 0, 5, 0}) == doctest::Approx(1.0));
  CHECK(g_mean({0, 1, 1, 5}) == doctest::Approx(0.0));
  // sensitivity 0.9, specificity 0.4
  CHECK(g_mean({9, 6, 4, 1}) == doctest::Approx(0.6));
}

TEST_CASE("average precision hand example") {
  std::vector<double> scores = {3.0, 2.0, 1.0};
  std::vector<int> labels = {-1, 1, -1};
  CHECK(au_pr(scores, labels) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));

  std::vector<double> perfect = {5.0, 4.0, 1.0, 0.5};
  std::vector<int> plabels = {-1, -1, 1, 1};
  CHECK(au_pr(perfect, plabels) == doctest::Approx(1.0));

  CHECK_THROWS_AS(au_pr({1.0, 2.0}, {1, 1}), std::invalid_argument);
}

TEST_CASE("average precision matches the exhaustive threshold oracle") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::bernoulli_distribution coin(0.3);
  for (int trial = 0; trial < 30; ++trial) {
    int n = 10 + trial;
    std::vector<double> scores(static_cast<std::size_t>(n));
    std::vector<int> labels(static_cast<std::size_t>(n));
    bool pos = false, neg = false;
    for (int i = 0; i < n; ++i) {
      // quantised scores make ties common
      scores[static_cast<std::size_t>(i)] = std::round(u(rng) * 8.0) / 8.0;
      labels[static_cast<std::size_t>(i)] = coin(rng) ? -1 : 1;
      (labels[static_cast<std::size_t>(i)] == -1 ? pos : neg) = true;
    }
    if (!pos) labels[0] = -1;
    if (!neg) labels[1] = 1;
    CHECK(au_pr(scores, labels) ==
          doctest::Approx(oracle::threshold_sweep_au_pr(scores, labels)).epsilon(1e-12));
  }

  // reversed perfect ranking, checked against the oracle as well
  std::vector<double> reversed = {1.0, 2.0, 3.0, 4.0};
  std::vector<int> rlabels = {-1, -1, 1, 1};
  CHECK(au_pr(reversed, rlabels) ==
        doctest::Approx(oracle::threshold_sweep_au_pr(reversed, rlabels)).epsilon(1e-12));
}

TEST_CASE("average precision is invariant under monotone score transforms") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::bernoulli_distribution coin(0.4);
  std::vector<double> scores(40);
  std::vector<int> labels(40);
  for (int i = 0; i < 40; ++i) {
    scores[static_cast<std::size_t>(i)] = u(rng);
    labels[static_cast<std::size_t>(i)] = coin(rng) ? -1 : 1;
  }
  labels[0] = -1;
  labels[1] = 1;
  double base = au_pr(scores, labels);
  std::vector<double> warped = scores;
  for (double& s : warped) s = std::exp(0.7 * s) + 3.0;
  CHECK(au_pr(warped, labels) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("metrics report aggregates before deriving") {
  std::vector<std::vector<double>> scores = {{1.0, -1.0}, {1.0, -1.0, 1.0}};
  std::vector<std::vector<int>> labels = {{-1, 1}, {-1, 1, 1}};
  MetricsReport rep = metrics_report(scores, labels, 0.0);
  CHECK(rep.per_subset.size() == 2);
  CHECK(rep.aggregate.tp == 2);
  CHECK(rep.aggregate.fp == 1);
  CHECK(rep.aggregate.tn == 2);
  CHECK(rep.prf.precision == doctest::Approx(2.0 / 3.0));
  CHECK(rep.prf.recall == doctest::Approx(1.0));
  CHECK(rep.g_mean == doctest::Approx(std::sqrt(1.0 * 2.0 / 3.0)));
}

TEST_CASE("g-mean and f1 stay within the unit interval") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<long long> u(0, 40);
  for (int trial = 0; trial < 200; ++trial) {
    ConfusionMatrix cm{u(rng), u(rng), u(rng), u(rng)};
    double gm = g_mean(cm);
    PrecisionRecallF1 prf = precision_recall_f1(cm);
    CHECK(gm >= 0.0);
    CHECK(gm <= 1.0);
    CHECK(prf.f1 >= 0.0);
    CHECK(prf.f1 <= 1.0);
  }
}
