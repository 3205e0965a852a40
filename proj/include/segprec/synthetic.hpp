#pragma once

// Synthetic metric samples for simulation and testing.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "segprec/core.hpp"
#include "segprec/rng.hpp"

namespace segprec {

/// n i.i.d. Normal(mu, sigma) draws from the seeded generator.
inline std::vector<double> normal_sample(std::size_t n, double mu, double sigma, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = mu + sigma * rng.normal();
  return out;
}

/// Affinely rescales values so their mean is mu and population sd is sigma.
/// Requires at least two distinct values.
inline std::vector<double> with_exact_moments(std::vector<double> values, double mu, double sigma) {
  const auto stats = summarize(values, SpreadConvention::population);
  if (!(stats.sigma > 0.0)) throw Error(ErrorKind::DegenerateSpread, "cannot rescale a constant sample");
  for (auto& v : values) v = mu + (v - stats.mu) * (sigma / stats.sigma);
  return values;
}

}  // namespace segprec
