#include "eitq/series_io.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <random>

#include "eitq/errors.hpp"

using namespace eitq;

TEST(series_io, doubles_format_shortest_and_round_trip) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(4e6), "4e+06");
  EXPECT_THROW(parse_double("1.5x"), ParameterError);
}

TEST(series_io, csv_and_binary_round_trip) {
  const auto x = synth_white_noise(2.0, 4e6, 1000, 77);
  const auto from_bin = series_from_binary(series_to_binary(x));
  EXPECT_EQ(from_bin.samples, x.samples);
  EXPECT_EQ(from_bin.sample_rate, x.sample_rate);
  EXPECT_EQ(from_bin.seed, 77u);
  const auto from_csv = series_from_csv(series_to_csv(x));
  EXPECT_EQ(from_csv.samples, x.samples);
  EXPECT_NEAR(from_csv.sample_rate, 4e6, 1e-6);
}

TEST(series_io, binary_layout_is_little_endian_with_header) {
  TimeSeries x{{1.0, -2.0}, 8e3, 0x0102030405060708ull};
  const std::string b = series_to_binary(x);
  ASSERT_EQ(b.size(), 32u + 16u);
  EXPECT_EQ(b.substr(0, 8), "EITQTS01");
  double rate;
  std::memcpy(&rate, b.data() + 8, 8);
  EXPECT_EQ(rate, 8e3);
  EXPECT_EQ(static_cast<unsigned char>(b[16]), 2u);  // length, low byte first
  EXPECT_EQ(static_cast<unsigned char>(b[24]), 0x08u);
  EXPECT_EQ(static_cast<unsigned char>(b[31]), 0x01u);
}

TEST(series_io, malformed_inputs_are_rejected) {
  EXPECT_THROW(series_from_binary("NOTMAGIC" + std::string(24, '\0')), ParameterError);
  TimeSeries x{{1.0}, 1.0, 0};
  std::string b = series_to_binary(x);
  b.pop_back();
  EXPECT_THROW(series_from_binary(b), ParameterError);
  EXPECT_THROW(series_from_csv("t,v\n0,1\n"), ParameterError);
}

TEST(series_io, atomic_write_leaves_no_temporary) {
  const auto dir = std::filesystem::temp_directory_path() / "eitq_series_io_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "x.bin";
  save_series(path, synth_white_noise(1.0, 1e3, 16, 3));
  EXPECT_TRUE(std::filesystem::exists(path));
  EXPECT_FALSE(std::filesystem::exists(dir / "x.bin.tmp"));
  EXPECT_EQ(load_series(path).samples, synth_white_noise(1.0, 1e3, 16, 3).samples);
  EXPECT_THROW(write_file_atomic(dir / "missing" / "y.csv", "z"), IoError);
  std::filesystem::remove_all(dir);
}
