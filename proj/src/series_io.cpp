#include "eitq/series_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

#include "eitq/errors.hpp"

namespace eitq {
namespace {

template <typename T>
void put_le(std::string& out, T value) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &value, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  char buf[8];
  std::memcpy(buf, &bits, 8);
  out.append(buf, 8);
}

template <typename T>
T get_le(std::string_view in, std::size_t offset) {
  std::uint64_t bits;
  std::memcpy(&bits, in.data() + offset, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  T value;
  std::memcpy(&value, &bits, 8);
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw IoError("format_double failed");
  return std::string(buf, end);
}

double parse_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw ParameterError("not a number: '" + std::string(s) + "'");
  }
  return v;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string series_to_csv(const TimeSeries& series) {
  std::string out = "time_s,value\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out += format_double(static_cast<double>(i) / series.sample_rate);
    out += ',';
    out += format_double(series.samples[i]);
    out += '\n';
  }
  return out;
}

TimeSeries series_from_csv(std::string_view text) {
  TimeSeries s;
  std::vector<double> times;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    if (line.empty()) continue;
    if (header) {
      if (line != "time_s,value") throw ParameterError("series CSV must start with 'time_s,value'");
      header = false;
      continue;
    }
    const std::size_t comma = line.find(',');
    if (comma == std::string_view::npos) throw ParameterError("series CSV row without comma");
    times.push_back(parse_double(line.substr(0, comma)));
    s.samples.push_back(parse_double(line.substr(comma + 1)));
  }
  if (times.size() < 2) throw ParameterError("series CSV needs at least two rows");
  s.sample_rate = static_cast<double>(times.size() - 1) / (times.back() - times.front());
  return s;
}

std::string series_to_binary(const TimeSeries& series) {
  std::string out(kSeriesMagic);
  out.reserve(32 + 8 * series.size());
  put_le(out, series.sample_rate);
  put_le(out, static_cast<std::uint64_t>(series.size()));
  put_le(out, series.seed);
  for (double v : series.samples) put_le(out, v);
  return out;
}

TimeSeries series_from_binary(std::string_view bytes) {
  if (bytes.size() < 32 || bytes.substr(0, 8) != kSeriesMagic) {
    throw ParameterError("not an EITQTS01 series file");
  }
  TimeSeries s;
  s.sample_rate = get_le<double>(bytes, 8);
  const auto n = get_le<std::uint64_t>(bytes, 16);
  s.seed = get_le<std::uint64_t>(bytes, 24);
  if (bytes.size() != 32 + 8 * n) throw ParameterError("series file length does not match header");
  s.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.samples[i] = get_le<double>(bytes, 32 + 8 * i);
  return s;
}

void save_series(const std::filesystem::path& path, const TimeSeries& series) {
  write_file_atomic(path, path.extension() == ".csv" ? series_to_csv(series) : series_to_binary(series));
}

TimeSeries load_series(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  return path.extension() == ".csv" ? series_from_csv(bytes) : series_from_binary(bytes);
}

}  // namespace eitq
