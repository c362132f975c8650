#pragma once

#include <string>

#include "sigsvdd/timeseries.hpp"

namespace sigsvdd {

/// Comma-separated reals, one row per time step, one column per channel,
/// no header.
RawSeries read_series_csv(const std::string& path);

/// One integer (0/1) per line; attaches to `series` and checks the length.
void read_point_labels(const std::string& path, RawSeries& series);

void write_series_csv(const RawSeries& s, const std::string& path);
void write_point_labels(const RawSeries& s, const std::string& path);

}  // namespace sigsvdd
