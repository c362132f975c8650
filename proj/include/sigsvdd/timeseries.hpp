#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sigsvdd/path.hpp"

namespace sigsvdd {

struct RawSeries {
  Matrix values;                 // T x d
  std::vector<int> point_labels; // empty when unlabelled, else length T, values {0, 1}

  int length() const { return static_cast<int>(values.rows()); }
  int channels() const { return static_cast<int>(values.cols()); }
  bool labelled() const { return !point_labels.empty(); }
};

struct NormalisedSeries {
  RawSeries series;
  double scale = 1.0;
};

/// Divides by the global maximum absolute value so the max-magnitude entry
/// becomes 1; an all-zero series is returned unchanged with scale 1.
NormalisedSeries normalise_series(const RawSeries& s);

struct WindowSet {
  std::vector<Path> windows;
  std::vector<int> labels;   // +1 target/normal, -1 anomaly
  std::vector<int> origins;  // start index of each window in the source series

  int size() const { return static_cast<int>(windows.size()); }
};

/// Overlapping windows at offsets 0, stride, 2*stride, ...; a window is
/// labelled -1 iff it covers any anomalous point.
WindowSet window(const RawSeries& s, int length, int stride = 1);

enum class AnomalyKind { Spike, Scale, Noise, TrendShift, SegmentShuffle };

extern const std::vector<AnomalyKind> kAllAnomalyKinds;

struct AnomalyInjectionConfig {
  std::vector<AnomalyKind> kinds = kAllAnomalyKinds;
  double magnitude = 1.0;
  std::uint64_t seed = 0;
  int count = 1;
};

/// Pseudo-anomalies: seeded-random transforms of randomly chosen normal
/// windows, labelled -1. "range" below is the global value range across all
/// input windows (1 when degenerate). Input windows are not modified.
WindowSet inject_pseudo_anomalies(const WindowSet& normals, const AnomalyInjectionConfig& cfg);

struct SplitResult {
  WindowSet train;
  WindowSet val;
};

/// Seeded random partition into ceil(n * fraction) train and the rest.
SplitResult train_val_split(const WindowSet& normals, double fraction, std::uint64_t seed);

enum class SegmentKind { LevelShift, NoiseBurst, Amplitude, FrequencyShift, Flatline };

struct AnomalySegment {
  int begin = 0;
  int end = 0;  // exclusive
  SegmentKind kind = SegmentKind::LevelShift;
  double magnitude = 1.0;
};

/// Smooth per-channel sums of low-frequency sinusoids plus small noise, with
/// labelled anomaly segments applied on top. Deterministic per seed.
RawSeries synthetic_benchmark(std::uint64_t seed, int T, int d,
                              const std::vector<AnomalySegment>& segments);

}  // namespace sigsvdd
