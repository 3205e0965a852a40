#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "segprec/core.hpp"
#include "segprec/io.hpp"
#include "segprec/rng.hpp"

namespace segprec::testing {

inline std::string data_path(const std::string& name) { return std::string(SEGPREC_TEST_DATA) + "/" + name; }

inline MetricSampleSet load_fixture(const std::string& name = "dice_110.csv") {
  std::ifstream in(data_path(name), std::ios::binary);
  return load_samples(in, SampleFormat::csv, "dice");
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

/// Welford one-pass mean / population sd, kept apart from the library path.
struct WelfordOracle {
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t n = 0;

  void add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  double population_sd() const { return std::sqrt(m2 / static_cast<double>(n)); }
  double sample_sd() const { return std::sqrt(m2 / static_cast<double>(n - 1)); }
};

/// Random values in [lo, hi) for property tests.
inline std::vector<double> random_values(Xoshiro256& rng, std::size_t n, double lo = 0.0, double hi = 100.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = lo + (hi - lo) * rng.uniform();
  return v;
}

}  // namespace segprec::testing
