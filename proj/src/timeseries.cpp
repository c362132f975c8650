#include "sigsvdd/timeseries.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace sigsvdd {

const std::vector<AnomalyKind> kAllAnomalyKinds = {
    AnomalyKind::Spike, AnomalyKind::Scale, AnomalyKind::Noise, AnomalyKind::TrendShift,
    AnomalyKind::SegmentShuffle};

NormalisedSeries normalise_series(const RawSeries& s) {
  if (s.length() == 0) throw std::invalid_argument("normalise_series: empty series");
  double m = s.values.cwiseAbs().maxCoeff();
  NormalisedSeries out;
  out.series = s;
  if (m > 0.0) {
    out.series.values /= m;
    out.scale = m;
  }
  return out;
}

WindowSet window(const RawSeries& s, int length, int stride) {
  if (length < 2) throw std::invalid_argument("window: length must be >= 2");
  if (stride < 1) throw std::invalid_argument("window: stride must be >= 1");
  if (s.length() < length) throw std::invalid_argument("window: series shorter than window length");
  if (s.labelled() && static_cast<int>(s.point_labels.size()) != s.length())
    throw std::invalid_argument("window: label length mismatch");
  WindowSet out;
  for (int start = 0; start + length <= s.length(); start += stride) {
    out.windows.push_back(Path{s.values.middleRows(start, length)});
    int lab = 1;
    if (s.labelled())
      for (int t = start; t < start + length; ++t)
        if (s.point_labels[static_cast<std::size_t>(t)] != 0) {
          lab = -1;
          break;
        }
    out.labels.push_back(lab);
    out.origins.push_back(start);
  }
  return out;
}

namespace {

// Segment draw shared by the segment-local transforms: length in
// [max(2, W/10), max(2, W/2)], uniform start.
std::pair<int, int> draw_segment(std::mt19937_64& rng, int W) {
  int lo = std::max(2, W / 10);
  int hi = std::max(2, W / 2);
  int len = std::uniform_int_distribution<int>(lo, hi)(rng);
  len = std::min(len, W);
  int start = std::uniform_int_distribution<int>(0, W - len)(rng);
  return {start, len};
}

}  // namespace

WindowSet inject_pseudo_anomalies(const WindowSet& normals, const AnomalyInjectionConfig& cfg) {
  if (normals.size() == 0) throw std::invalid_argument("inject_pseudo_anomalies: no input windows");
  if (cfg.count < 1) throw std::invalid_argument("inject_pseudo_anomalies: count must be >= 1");
  if (cfg.magnitude <= 0.0) throw std::invalid_argument("inject_pseudo_anomalies: magnitude must be positive");
  if (cfg.kinds.empty()) throw std::invalid_argument("inject_pseudo_anomalies: no kinds selected");

  double vmax = normals.windows.front().values.maxCoeff();
  double vmin = normals.windows.front().values.minCoeff();
  for (const Path& w : normals.windows) {
    vmax = std::max(vmax, w.values.maxCoeff());
    vmin = std::min(vmin, w.values.minCoeff());
  }
  double range = vmax - vmin;
  if (range <= 0.0) range = 1.0;

  std::mt19937_64 rng(cfg.seed);
  WindowSet out;
  for (int c = 0; c < cfg.count; ++c) {
    int base = std::uniform_int_distribution<int>(0, normals.size() - 1)(rng);
    AnomalyKind kind =
        cfg.kinds[std::uniform_int_distribution<std::size_t>(0, cfg.kinds.size() - 1)(rng)];
    Path w = normals.windows[static_cast<std::size_t>(base)];
    const int W = w.length();
    const int d = w.channels();
    switch (kind) {
      case AnomalyKind::Spike: {
        int t = std::uniform_int_distribution<int>(0, W - 1)(rng);
        int ch = std::uniform_int_distribution<int>(0, d - 1)(rng);
        w.values(t, ch) += cfg.magnitude * range;
        break;
      }
      case AnomalyKind::Scale: {
        auto [start, len] = draw_segment(rng, W);
        w.values.middleRows(start, len) *= (1.0 + cfg.magnitude);
        break;
      }
      case AnomalyKind::Noise: {
        auto [start, len] = draw_segment(rng, W);
        std::normal_distribution<double> noise(0.0, cfg.magnitude * range);
        for (int t = start; t < start + len; ++t)
          for (int ch = 0; ch < d; ++ch) w.values(t, ch) += noise(rng);
        break;
      }
      case AnomalyKind::TrendShift: {
        double height = cfg.magnitude * range;
        for (int t = 0; t < W; ++t)
          w.values.row(t).array() += height * static_cast<double>(t) / (W - 1);
        break;
      }
      case AnomalyKind::SegmentShuffle: {
        auto [start, len] = draw_segment(rng, W);
        // Fisher-Yates over the segment's rows
        for (int t = len - 1; t > 0; --t) {
          int u = std::uniform_int_distribution<int>(0, t)(rng);
          w.values.row(start + t).swap(w.values.row(start + u));
        }
        break;
      }
    }
    out.windows.push_back(std::move(w));
    out.labels.push_back(-1);
    out.origins.push_back(normals.origins[static_cast<std::size_t>(base)]);
  }
  return out;
}

SplitResult train_val_split(const WindowSet& normals, double fraction, std::uint64_t seed) {
  if (normals.size() < 2) throw std::invalid_argument("train_val_split: need at least 2 windows");
  if (!(fraction > 0.0 && fraction < 1.0))
    throw std::invalid_argument("train_val_split: fraction must be in (0, 1)");
  const int n = normals.size();
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  int n_train = static_cast<int>(std::ceil(fraction * n));
  n_train = std::min(n_train, n - 1);  // both parts nonempty
  std::vector<int> tr(idx.begin(), idx.begin() + n_train), va(idx.begin() + n_train, idx.end());
  std::sort(tr.begin(), tr.end());
  std::sort(va.begin(), va.end());
  auto take = [&](const std::vector<int>& which) {
    WindowSet s;
    for (int i : which) {
      s.windows.push_back(normals.windows[static_cast<std::size_t>(i)]);
      s.labels.push_back(normals.labels[static_cast<std::size_t>(i)]);
      s.origins.push_back(normals.origins[static_cast<std::size_t>(i)]);
    }
    return s;
  };
  return {take(tr), take(va)};
}

RawSeries synthetic_benchmark(std::uint64_t seed, int T, int d,
                              const std::vector<AnomalySegment>& segments) {
  if (T < 500) throw std::invalid_argument("synthetic_benchmark: T must be >= 500");
  if (d < 1) throw std::invalid_argument("synthetic_benchmark: d must be >= 1");
  for (const auto& seg : segments)
    if (seg.begin < 0 || seg.end > T || seg.begin >= seg.end)
      throw std::invalid_argument("synthetic_benchmark: segment out of range");

  std::mt19937_64 rng(seed);
  // integer cycle counts over a fixed base period make the normal dynamics
  // periodic, so every normal pattern recurs throughout the series
  constexpr double kPeriod = 500.0;
  std::uniform_int_distribution<int> ucycles(1, 6);
  std::uniform_real_distribution<double> uamp(0.4, 1.0), uphase(0.0, 2.0 * 3.14159265358979323846);
  constexpr int kHarmonics = 3;
  std::vector<std::array<double, 3>> params;  // (cycles, amp, phase) per channel x harmonic
  params.reserve(static_cast<std::size_t>(d) * kHarmonics);
  for (int c = 0; c < d; ++c)
    for (int h = 0; h < kHarmonics; ++h)
      params.push_back({static_cast<double>(ucycles(rng)), uamp(rng), uphase(rng)});

  RawSeries s;
  s.values.resize(T, d);
  s.point_labels.assign(static_cast<std::size_t>(T), 0);

  // frequency-shift segments advance the phase clock faster
  std::vector<double> rate(static_cast<std::size_t>(T), 1.0);
  for (const auto& seg : segments) {
    for (int t = seg.begin; t < seg.end; ++t) s.point_labels[static_cast<std::size_t>(t)] = 1;
    if (seg.kind == SegmentKind::FrequencyShift)
      for (int t = seg.begin; t < seg.end; ++t) rate[static_cast<std::size_t>(t)] = 1.0 + seg.magnitude;
  }
  std::vector<double> phase(static_cast<std::size_t>(T), 0.0);
  for (int t = 1; t < T; ++t)
    phase[static_cast<std::size_t>(t)] = phase[static_cast<std::size_t>(t - 1)] + rate[static_cast<std::size_t>(t - 1)];

  const double two_pi = 2.0 * 3.14159265358979323846;
  for (int c = 0; c < d; ++c)
    for (int t = 0; t < T; ++t) {
      double v = 0.0;
      for (int h = 0; h < kHarmonics; ++h) {
        const auto& [f, a, ph] = params[static_cast<std::size_t>(c * kHarmonics + h)];
        v += a * std::sin(two_pi * f * phase[static_cast<std::size_t>(t)] / kPeriod + ph);
      }
      s.values(t, c) = v;
    }
  std::normal_distribution<double> obs_noise(0.0, 0.04);
  for (int t = 0; t < T; ++t)
    for (int c = 0; c < d; ++c) s.values(t, c) += obs_noise(rng);

  std::mt19937_64 rng_anom(seed ^ 0x9E3779B97F4A7C15ull);
  for (const auto& seg : segments) {
    const int len = seg.end - seg.begin;
    switch (seg.kind) {
      case SegmentKind::LevelShift:
        s.values.middleRows(seg.begin, len).array() += seg.magnitude;
        break;
      case SegmentKind::NoiseBurst: {
        std::normal_distribution<double> burst(0.0, seg.magnitude);
        for (int t = seg.begin; t < seg.end; ++t)
          for (int c = 0; c < d; ++c) s.values(t, c) += burst(rng_anom);
        break;
      }
      case SegmentKind::Amplitude: {
        Eigen::RowVectorXd mid = s.values.middleRows(seg.begin, len).colwise().mean();
        for (int t = seg.begin; t < seg.end; ++t)
          s.values.row(t) = mid + (s.values.row(t) - mid) * (1.0 + seg.magnitude);
        break;
      }
      case SegmentKind::FrequencyShift:
        break;  // already applied through the phase clock
      case SegmentKind::Flatline: {
        Eigen::RowVectorXd held = s.values.row(seg.begin);
        for (int t = seg.begin; t < seg.end; ++t) s.values.row(t) = held;
        break;
      }
    }
  }
  return s;
}

}  // namespace sigsvdd
