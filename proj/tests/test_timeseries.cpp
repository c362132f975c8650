#include <doctest.h>

#include <cmath>
#include <set>

#include "sigsvdd/timeseries.hpp"

using namespace sigsvdd;

namespace {

RawSeries series_1d(std::initializer_list<double> vals) {
  RawSeries s;
  s.values.resize(static_cast<Eigen::Index>(vals.size()), 1);
  Eigen::Index i = 0;
  for (double v : vals) s.values(i++, 0) = v;
  return s;
}

}  // namespace

TEST_CASE("series normalisation") {
  RawSeries s = series_1d({1.0, -5.0, 2.0});
  NormalisedSeries n = normalise_series(s);
  CHECK(n.scale == doctest::Approx(5.0));
  CHECK(n.series.values.cwiseAbs().maxCoeff() == doctest::Approx(1.0));
  CHECK(n.series.values(0, 0) == doctest::Approx(0.2));

  NormalisedSeries twice = normalise_series(n.series);
  CHECK(twice.scale == doctest::Approx(1.0));
  CHECK((twice.series.values - n.series.values).cwiseAbs().maxCoeff() == 0.0);

  RawSeries zeros = series_1d({0.0, 0.0, 0.0});
  NormalisedSeries nz = normalise_series(zeros);
  CHECK(nz.scale == 1.0);
  CHECK(nz.series.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("windowing") {
  RawSeries s = series_1d({0.0, 1.0, 2.0, 3.0, 4.0});
  WindowSet ws = window(s, 3, 1);
  REQUIRE(ws.size() == 3);
  CHECK(ws.origins == std::vector<int>{0, 1, 2});
  CHECK(ws.windows[1].values(0, 0) == doctest::Approx(1.0));
  for (int lab : ws.labels) CHECK(lab == 1);

  RawSeries short_series = series_1d({0.0, 1.0});
  CHECK_THROWS_AS(window(short_series, 3, 1), std::invalid_argument);

  // any-overlap labelling: point label at t = 4 only
  RawSeries labelled = series_1d({0.0, 1.0, 2.0, 3.0, 4.0});
  labelled.point_labels = {0, 0, 0, 0, 1};
  WindowSet lw = window(labelled, 3, 1);
  CHECK(lw.labels == std::vector<int>{1, 1, -1});

  // strided origins increase by the stride
  RawSeries longer = series_1d({0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  WindowSet sw = window(longer, 4, 3);
  CHECK(sw.origins == std::vector<int>{0, 3, 6});
}

TEST_CASE("pseudo-anomaly injection is seeded and pure") {
  RawSeries s = series_1d({0.0, 0.5, 1.0, 0.5, 0.0, 0.5, 1.0, 0.5});
  WindowSet normals = window(s, 4, 2);
  Matrix before = normals.windows[0].values;

  AnomalyInjectionConfig cfg;
  cfg.count = 10;
  cfg.magnitude = 1.0;
  cfg.seed = 5;
  WindowSet a = inject_pseudo_anomalies(normals, cfg);
  WindowSet b = inject_pseudo_anomalies(normals, cfg);
  REQUIRE(a.size() == 10);
  for (int lab : a.labels) CHECK(lab == -1);
  for (int i = 0; i < a.size(); ++i)
    CHECK((a.windows[static_cast<std::size_t>(i)].values -
           b.windows[static_cast<std::size_t>(i)].values)
              .cwiseAbs()
              .maxCoeff() == 0.0);
  // inputs untouched
  CHECK((normals.windows[0].values - before).cwiseAbs().maxCoeff() == 0.0);

  cfg.seed = 6;
  WindowSet c = inject_pseudo_anomalies(normals, cfg);
  bool any_diff = false;
  for (int i = 0; i < a.size() && !any_diff; ++i)
    any_diff = (a.windows[static_cast<std::size_t>(i)].values -
                c.windows[static_cast<std::size_t>(i)].values)
                   .cwiseAbs()
                   .maxCoeff() > 0.0;
  CHECK(any_diff);
}

TEST_CASE("spike injection adds magnitude times the data range at one entry") {
  // two constant windows at 0 and 4: the window-set value range is 4
  WindowSet normals;
  normals.windows.push_back(Path{Matrix::Constant(5, 2, 0.0)});
  normals.windows.push_back(Path{Matrix::Constant(5, 2, 4.0)});
  normals.labels = {1, 1};
  normals.origins = {0, 5};

  AnomalyInjectionConfig cfg;
  cfg.kinds = {AnomalyKind::Spike};
  cfg.count = 6;
  cfg.magnitude = 0.5;
  cfg.seed = 11;
  WindowSet out = inject_pseudo_anomalies(normals, cfg);
  for (const Path& w : out.windows) {
    // identify the base by majority value, then expect exactly one entry
    // differing by magnitude * range = 2
    double base = std::abs(w.values(0, 0)) < 2.0 ? 0.0 : 4.0;
    int differing = 0;
    for (int t = 0; t < w.length(); ++t)
      for (int c = 0; c < w.channels(); ++c)
        if (w.values(t, c) != base) {
          ++differing;
          CHECK(w.values(t, c) - base == doctest::Approx(0.5 * 4.0));
        }
    CHECK(differing == 1);
  }
}

TEST_CASE("train/val split") {
  RawSeries s = series_1d({0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11});
  WindowSet ws = window(s, 3, 1);  // 10 windows
  SplitResult sr = train_val_split(ws, 0.8, 3);
  CHECK(sr.train.size() == 8);
  CHECK(sr.val.size() == 2);

  std::set<int> seen;
  for (int o : sr.train.origins) seen.insert(o);
  for (int o : sr.val.origins) {
    CHECK(seen.count(o) == 0);
    seen.insert(o);
  }
  CHECK(seen.size() == 10);  // union covers everything

  SplitResult again = train_val_split(ws, 0.8, 3);
  CHECK(again.train.origins == sr.train.origins);

  WindowSet tiny;
  tiny.windows.push_back(ws.windows[0]);
  tiny.labels = {1};
  tiny.origins = {0};
  CHECK_THROWS_AS(train_val_split(tiny, 0.8, 1), std::invalid_argument);
  CHECK_THROWS_AS(train_val_split(ws, 1.0, 1), std::invalid_argument);
}

TEST_CASE("synthetic benchmark") {
  RawSeries clean = synthetic_benchmark(3, 600, 2, {});
  CHECK(clean.length() == 600);
  CHECK(clean.channels() == 2);
  for (int lab : clean.point_labels) CHECK(lab == 0);

  std::vector<AnomalySegment> segments = {{200, 220, SegmentKind::LevelShift, 1.5}};
  RawSeries marked = synthetic_benchmark(3, 600, 2, segments);
  for (int t = 0; t < 600; ++t)
    CHECK(marked.point_labels[static_cast<std::size_t>(t)] == (t >= 200 && t < 220 ? 1 : 0));
  // the shifted segment moved, the rest did not
  CHECK((marked.values.middleRows(200, 20) - clean.values.middleRows(200, 20))
            .cwiseAbs()
            .minCoeff() > 1.0);
  CHECK((marked.values.topRows(200) - clean.values.topRows(200)).cwiseAbs().maxCoeff() == 0.0);

  RawSeries other = synthetic_benchmark(4, 600, 2, {});
  CHECK((other.values - clean.values).cwiseAbs().maxCoeff() > 0.0);

  RawSeries same = synthetic_benchmark(3, 600, 2, {});
  CHECK((same.values - clean.values).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(synthetic_benchmark(3, 400, 2, {}), std::invalid_argument);
  CHECK_THROWS_AS(synthetic_benchmark(3, 600, 2, {{590, 610, SegmentKind::LevelShift, 1.0}}),
                  std::invalid_argument);
}

TEST_CASE("frequency-shift segments change the dynamics without relabelling errors") {
  std::vector<AnomalySegment> segments = {{250, 330, SegmentKind::FrequencyShift, 3.0}};
  RawSeries s = synthetic_benchmark(8, 700, 2, segments);
  RawSeries clean = synthetic_benchmark(8, 700, 2, {});
  CHECK((s.values.middleRows(250, 80) - clean.values.middleRows(250, 80)).cwiseAbs().maxCoeff() >
        0.05);
  CHECK((s.values.topRows(250) - clean.values.topRows(250)).cwiseAbs().maxCoeff() == 0.0);
}
