#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "eitq/signal_synth.hpp"

namespace eitq {

/// Shortest decimal form that parses back to exactly `v`.
std::string format_double(double v);
double parse_double(std::string_view s);

/// Writes via a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

// CSV: header "time_s,value", one row per sample. The sample rate is
// recovered from the time column; the seed is not stored.
std::string series_to_csv(const TimeSeries& series);
TimeSeries series_from_csv(std::string_view text);

// Binary, all fields little-endian:
//   char[8]  magic "EITQTS01"
//   f64      sample_rate (Hz)
//   u64      length (samples)
//   u64      seed
//   f64[length] samples
inline constexpr std::string_view kSeriesMagic = "EITQTS01";
std::string series_to_binary(const TimeSeries& series);
TimeSeries series_from_binary(std::string_view bytes);

void save_series(const std::filesystem::path& path, const TimeSeries& series);
TimeSeries load_series(const std::filesystem::path& path);

}  // namespace eitq
