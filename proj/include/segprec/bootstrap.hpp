#pragma once

// Percentile bootstrap of the mean.
//
// M resamples of size n are drawn with replacement; resample m uses its own
// generator seeded from derive_seed(seed, m), so the list of resample means
// does not depend on the number of worker threads. Aggregates are reduced in
// resample order.
//   mu*  = mean of the resample means
//   SEM* = sqrt((1/M) sum (mean_m - mu*)^2)
//   CI*  = [P2.5, P97.5] of the sorted resample means

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "segprec/core.hpp"
#include "segprec/error.hpp"
#include "segprec/parallel.hpp"
#include "segprec/percentile.hpp"
#include "segprec/rng.hpp"

namespace segprec {

inline constexpr std::size_t kDefaultResamples = 15000;
inline constexpr double kLowerQuantile = 0.025;
inline constexpr double kUpperQuantile = 0.975;

struct BootstrapConfig {
  std::size_t resamples = kDefaultResamples;
  std::uint64_t seed = 0;
  PercentileMethod percentile_method = PercentileMethod::linear_interpolation;
  unsigned threads = 0;  // 0 = all hardware threads; does not affect results
};

struct BootstrapEstimate {
  double mu_star = 0.0;
  double sem_star = 0.0;
  double ci_lo_star = 0.0;
  double ci_hi_star = 0.0;
  double width_star = 0.0;
  std::size_t resamples = 0;
  std::uint64_t seed = 0;
  std::size_t n = 0;
};

inline std::vector<double> resample_means(std::span<const double> values, const BootstrapConfig& config) {
  if (values.empty()) throw Error(ErrorKind::EmptySample, "cannot bootstrap an empty sample");
  if (config.resamples < 1) throw Error(ErrorKind::InvalidConfig, "number of resamples must be >= 1");

  const std::size_t n = values.size();
  const double ref = values.front();
  std::vector<double> shifted(n);
  std::transform(values.begin(), values.end(), shifted.begin(), [ref](double v) { return v - ref; });

  std::vector<double> means(config.resamples);
  parallel_for(config.resamples, config.threads, [&](std::size_t m) {
    Xoshiro256 rng(derive_seed(config.seed, m));
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += shifted[rng.below(n)];
    means[m] = ref + sum / static_cast<double>(n);
  });
  return means;
}

inline std::vector<double> resample_means(const MetricSampleSet& samples, const BootstrapConfig& config) {
  return resample_means(samples.values(), config);
}

/// Aggregates a list of resample means into an estimate. `means` is sorted in place.
inline BootstrapEstimate summarize_resample_means(std::vector<double>& means, PercentileMethod method) {
  const auto moments = detail::shifted_moments(means);
  BootstrapEstimate e;
  e.mu_star = moments.mean;
  e.sem_star = std::sqrt(moments.sum_sq_dev / static_cast<double>(means.size()));
  std::sort(means.begin(), means.end());
  e.ci_lo_star = percentile(means, kLowerQuantile, method);
  e.ci_hi_star = percentile(means, kUpperQuantile, method);
  e.width_star = e.ci_hi_star - e.ci_lo_star;
  e.resamples = means.size();
  return e;
}

inline BootstrapEstimate bootstrap_estimate(std::span<const double> values, const BootstrapConfig& config) {
  auto means = resample_means(values, config);
  auto e = summarize_resample_means(means, config.percentile_method);
  e.seed = config.seed;
  e.n = values.size();
  return e;
}

inline BootstrapEstimate bootstrap_estimate(const MetricSampleSet& samples, const BootstrapConfig& config) {
  return bootstrap_estimate(samples.values(), config);
}

inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 24;

/// Exact bootstrap distribution by enumeration, for tiny samples.
///
/// Every one of the n^n equally likely resamples is accounted for: resamples
/// are grouped by how often each index occurs (a multiset), weighted by the
/// multinomial count n! / prod(c_i!). `resamples` in the result is n^n and
/// `seed` is 0.
inline BootstrapEstimate exhaustive_bootstrap(std::span<const double> values,
                                              PercentileMethod method = PercentileMethod::linear_interpolation,
                                              std::uint64_t cap = kDefaultEnumerationCap) {
  const std::size_t n = values.size();
  if (n == 0) throw Error(ErrorKind::EmptySample, "cannot bootstrap an empty sample");

  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (total > cap / n) {
      throw Error(ErrorKind::TooLargeForEnumeration,
                  "n^n resamples exceed the enumeration cap for n = " + std::to_string(n));
    }
    total *= n;
  }
  if (total > cap) {
    throw Error(ErrorKind::TooLargeForEnumeration,
                "n^n resamples exceed the enumeration cap for n = " + std::to_string(n));
  }

  std::vector<std::uint64_t> factorial(n + 1, 1);
  for (std::size_t i = 1; i <= n; ++i) factorial[i] = factorial[i - 1] * i;

  struct Atom {
    long double mean;
    std::uint64_t weight;
  };
  std::vector<Atom> atoms;
  std::vector<std::size_t> counts(n, 0);

  const long double ref = values.front();
  // Depth-first over count vectors (c_0, ..., c_{n-1}) with sum n.
  auto visit = [&](auto&& self, std::size_t index, std::size_t remaining) -> void {
    if (index + 1 == n) {
      counts[index] = remaining;
      long double sum = 0.0L;
      std::uint64_t weight = factorial[n];
      for (std::size_t i = 0; i < n; ++i) {
        sum += static_cast<long double>(counts[i]) * (static_cast<long double>(values[i]) - ref);
        weight /= factorial[counts[i]];
      }
      atoms.push_back({ref + sum / static_cast<long double>(n), weight});
      return;
    }
    for (std::size_t c = 0; c <= remaining; ++c) {
      counts[index] = c;
      self(self, index + 1, remaining - c);
    }
  };
  visit(visit, 0, n);

  long double weighted_sum = 0.0L;
  for (const auto& a : atoms) weighted_sum += a.mean * static_cast<long double>(a.weight);
  const long double mu = weighted_sum / static_cast<long double>(total);
  long double ss = 0.0L;
  for (const auto& a : atoms) ss += static_cast<long double>(a.weight) * (a.mean - mu) * (a.mean - mu);

  std::sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) { return x.mean < y.mean; });

  // Value of the 0-based order statistic `rank` in the expanded list.
  auto order_statistic = [&](std::uint64_t rank) {
    std::uint64_t cumulative = 0;
    for (const auto& a : atoms) {
      cumulative += a.weight;
      if (rank < cumulative) return static_cast<double>(a.mean);
    }
    return static_cast<double>(atoms.back().mean);
  };
  auto quantile = [&](double q) {
    const auto pos = detail::quantile_position(total, q, method);
    const double a = order_statistic(pos.lo);
    if (pos.fraction == 0.0) return a;
    const double b = order_statistic(pos.hi);
    return std::clamp(a + pos.fraction * (b - a), a, b);
  };

  BootstrapEstimate e;
  e.mu_star = static_cast<double>(mu);
  e.sem_star = static_cast<double>(std::sqrt(ss / static_cast<long double>(total)));
  e.ci_lo_star = quantile(kLowerQuantile);
  e.ci_hi_star = quantile(kUpperQuantile);
  e.width_star = e.ci_hi_star - e.ci_lo_star;
  e.resamples = static_cast<std::size_t>(total);
  e.seed = 0;
  e.n = n;
  return e;
}

inline BootstrapEstimate exhaustive_bootstrap(const MetricSampleSet& samples,
                                              PercentileMethod method = PercentileMethod::linear_interpolation,
                                              std::uint64_t cap = kDefaultEnumerationCap) {
  return exhaustive_bootstrap(samples.values(), method, cap);
}

}  // namespace segprec
