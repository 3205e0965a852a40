#pragma once

// Subsampling study: for each size k and each of J draws, a size-k subset is
// drawn without replacement, estimated with both the closed form and the
// bootstrap, and the J per-draw statistics are aggregated as mean +- std
// (population std, divide by J).
//
// Seeds: draw (k, j) uses derive_seed(derive_seed(seed, k), j); its bootstrap
// uses derive_seed(derive_seed(bootstrap.seed, k), j). Adding sizes to K does
// not change the rows already present.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "segprec/bootstrap.hpp"
#include "segprec/core.hpp"
#include "segprec/error.hpp"
#include "segprec/parallel.hpp"
#include "segprec/rng.hpp"

namespace segprec {

/// Positions of k subjects chosen uniformly without replacement, ascending.
inline std::vector<std::size_t> draw_indices(std::size_t n, std::size_t k, std::uint64_t draw_seed) {
  if (k > n) {
    throw Error(ErrorKind::SizeExceedsPopulation,
                "cannot draw " + std::to_string(k) + " subjects from " + std::to_string(n));
  }
  if (k == 0) throw Error(ErrorKind::InvalidConfig, "subsample size must be >= 1");
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  Xoshiro256 rng(draw_seed);
  // Partial Fisher-Yates: the first k slots end up a uniform k-subset.
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

inline MetricSampleSet draw_subsample(const MetricSampleSet& samples, std::size_t k, std::uint64_t draw_seed) {
  const auto idx = draw_indices(samples.size(), k, draw_seed);
  return samples.select(idx);
}

struct SubsampleConfig {
  std::vector<std::size_t> sizes;  // empty: defaults_for(n)
  std::size_t draws = 100;
  BootstrapConfig bootstrap;
  std::uint64_t seed = 0;
  double z = kZ95;
  SpreadConvention convention = SpreadConvention::population;
  unsigned threads = 0;

  /// {10, 20, 30, 50, 100} restricted to k < n, followed by n itself.
  static std::vector<std::size_t> default_sizes(std::size_t n) {
    std::vector<std::size_t> out;
    for (std::size_t k : {10, 20, 30, 50, 100}) {
      if (k < n) out.push_back(k);
    }
    if (n >= 2) out.push_back(n);
    return out;
  }
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

struct SubsampleRow {
  std::size_t k = 0;
  MeanStd mu;
  MeanStd sigma;
  MeanStd sem;
  MeanStd width;
  MeanStd mu_star;
  MeanStd sem_star;
  MeanStd width_star;
};

struct SubsampleReport {
  std::vector<SubsampleRow> rows;
  std::uint64_t seed = 0;
  std::uint64_t bootstrap_seed = 0;
  std::size_t draws = 0;
  std::size_t resamples = 0;
  std::size_t n = 0;
};

/// Population mean and std of a series (shifted two-pass, exact zero for equal entries).
inline MeanStd mean_std(std::span<const double> values) {
  const auto m = detail::shifted_moments(values);
  return {m.mean, std::sqrt(m.sum_sq_dev / static_cast<double>(values.size()))};
}

inline SubsampleReport subsample_study(const MetricSampleSet& samples, const SubsampleConfig& config) {
  const std::size_t n = samples.size();
  if (n < 2) throw Error(ErrorKind::DegenerateSpread, "subsample study needs at least 2 subjects");
  if (config.draws < 1) throw Error(ErrorKind::InvalidConfig, "number of draws must be >= 1");
  if (config.bootstrap.resamples < 1) throw Error(ErrorKind::InvalidConfig, "number of resamples must be >= 1");
  const auto sizes = config.sizes.empty() ? SubsampleConfig::default_sizes(n) : config.sizes;
  for (auto k : sizes) {
    if (k < 2 || k > n) {
      throw Error(ErrorKind::InvalidConfig,
                  "subsample size " + std::to_string(k) + " outside [2, " + std::to_string(n) + "]");
    }
  }

  struct DrawStats {
    GaussianEstimate gauss;
    BootstrapEstimate boot;
  };

  SubsampleReport report;
  report.seed = config.seed;
  report.bootstrap_seed = config.bootstrap.seed;
  report.draws = config.draws;
  report.resamples = config.bootstrap.resamples;
  report.n = n;

  const std::size_t J = config.draws;
  for (auto k : sizes) {
    std::vector<DrawStats> per_draw(J);
    parallel_for(J, config.threads, [&](std::size_t j) {
      const auto idx = draw_indices(n, k, derive_seed(derive_seed(config.seed, k), j));
      std::vector<double> values(k);
      for (std::size_t i = 0; i < k; ++i) values[i] = samples.values()[idx[i]];

      const auto stats = summarize(std::span<const double>(values), config.convention);
      per_draw[j].gauss = gaussian_from_moments(stats.mu, stats.sigma, k, config.z);

      BootstrapConfig boot = config.bootstrap;
      boot.seed = derive_seed(derive_seed(config.bootstrap.seed, k), j);
      boot.threads = 1;
      per_draw[j].boot = bootstrap_estimate(std::span<const double>(values), boot);
    });

    auto column = [&](auto field) {
      std::vector<double> v(J);
      for (std::size_t j = 0; j < J; ++j) v[j] = field(per_draw[j]);
      return mean_std(v);
    };
    SubsampleRow row;
    row.k = k;
    row.mu = column([](const DrawStats& d) { return d.gauss.mu; });
    row.sigma = column([](const DrawStats& d) { return d.gauss.sigma; });
    row.sem = column([](const DrawStats& d) { return d.gauss.sem; });
    row.width = column([](const DrawStats& d) { return d.gauss.width; });
    row.mu_star = column([](const DrawStats& d) { return d.boot.mu_star; });
    row.sem_star = column([](const DrawStats& d) { return d.boot.sem_star; });
    row.width_star = column([](const DrawStats& d) { return d.boot.width_star; });
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace segprec
