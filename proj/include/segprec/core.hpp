#pragma once

// Metric samples and closed-form (Gaussian) precision estimates:
//   SEM = sigma / sqrt(n),  CI = [mu - z*SEM, mu + z*SEM],  w = 2*z*SEM.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "segprec/error.hpp"

namespace segprec {

/// Critical value used by default. The literal 1.96, not the exact quantile.
inline constexpr double kZ95 = 1.96;
/// Exact 0.975 quantile of the standard Normal.
inline constexpr double kZ95Exact = 1.959963984540054;

enum class SpreadConvention {
  population,  // divide by n
  sample,      // divide by n - 1
};

struct Bounds {
  double lo;
  double hi;
};

struct MetricSample {
  std::string subject_id;
  double value = 0.0;
};

/// Validated, ordered collection of per-subject metric values.
class MetricSampleSet {
 public:
  MetricSampleSet() = default;

  MetricSampleSet(std::vector<MetricSample> samples, std::string metric_name,
                  std::optional<Bounds> bounds = std::nullopt)
      : samples_(std::move(samples)), metric_name_(std::move(metric_name)), bounds_(bounds) {
    if (bounds_ && !(bounds_->lo <= bounds_->hi)) {
      throw Error(ErrorKind::InvalidConfig, "bounds must satisfy lo <= hi");
    }
    std::unordered_set<std::string> seen;
    seen.reserve(samples_.size());
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      const auto& s = samples_[i];
      if (s.subject_id.empty()) {
        throw Error(ErrorKind::InvalidSubject,
                    "sample " + std::to_string(i) + " has an empty subject_id");
      }
      if (!std::isfinite(s.value)) {
        throw Error(ErrorKind::NonFiniteValue, "subject '" + s.subject_id + "' has a non-finite value");
      }
      if (bounds_ && (s.value < bounds_->lo || s.value > bounds_->hi)) {
        throw Error(ErrorKind::OutOfBounds, "subject '" + s.subject_id + "' value " +
                                                std::to_string(s.value) + " outside [" +
                                                std::to_string(bounds_->lo) + ", " +
                                                std::to_string(bounds_->hi) + "]");
      }
      if (!seen.insert(s.subject_id).second) {
        throw Error(ErrorKind::DuplicateSubject, "duplicate subject_id '" + s.subject_id + "'");
      }
    }
    values_.reserve(samples_.size());
    for (const auto& s : samples_) values_.push_back(s.value);
  }

  /// Convenience for synthetic data: subjects are named s0001, s0002, ...
  static MetricSampleSet from_values(std::span<const double> values, std::string metric_name = "dice",
                                     std::optional<Bounds> bounds = std::nullopt) {
    std::vector<MetricSample> samples;
    samples.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::string id = std::to_string(i + 1);
      if (id.size() < 4) id.insert(0, 4 - id.size(), '0');
      samples.push_back({"s" + id, values[i]});
    }
    return MetricSampleSet(std::move(samples), std::move(metric_name), bounds);
  }

  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  const std::vector<MetricSample>& samples() const noexcept { return samples_; }
  std::span<const double> values() const noexcept { return values_; }
  const std::string& metric_name() const noexcept { return metric_name_; }
  const std::optional<Bounds>& bounds() const noexcept { return bounds_; }

  /// Subset by position, preserving the order given in `indices`.
  MetricSampleSet select(std::span<const std::size_t> indices) const {
    std::vector<MetricSample> picked;
    picked.reserve(indices.size());
    for (auto i : indices) picked.push_back(samples_.at(i));
    return MetricSampleSet(std::move(picked), metric_name_, bounds_);
  }

 private:
  std::vector<MetricSample> samples_;
  std::vector<double> values_;
  std::string metric_name_;
  std::optional<Bounds> bounds_;
};

/// Default range check for a metric name: Dice is a percentage.
inline std::optional<Bounds> default_bounds(const std::string& metric_name) {
  if (metric_name == "dice") return Bounds{0.0, 100.0};
  return std::nullopt;
}

struct SummaryStats {
  double mu = 0.0;
  double sigma = 0.0;
  std::size_t n = 0;
  SpreadConvention spread_convention = SpreadConvention::population;
};

struct GaussianEstimate {
  double mu = 0.0;
  double sigma = 0.0;
  double sem = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double width = 0.0;
  double z = kZ95;
  std::size_t n = 0;
};

namespace detail {

struct Moments {
  double mean;
  double sum_sq_dev;  // sum of squared deviations from the mean
};

// Shifted-data two-pass moments. Values are taken relative to the first
// element, so identical inputs give exactly zero deviation and the mean is
// reproduced exactly.
inline Moments shifted_moments(std::span<const double> values) {
  const double ref = values.front();
  double shifted_sum = 0.0;
  for (double v : values) shifted_sum += v - ref;
  const double shifted_mean = shifted_sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) {
    const double d = (v - ref) - shifted_mean;
    ss += d * d;
  }
  return {ref + shifted_mean, ss};
}

}  // namespace detail

/// Mean and spread of raw values. Spread needs n >= 2 unless with_spread is false.
inline SummaryStats summarize(std::span<const double> values,
                              SpreadConvention convention = SpreadConvention::population,
                              bool with_spread = true) {
  if (values.empty()) throw Error(ErrorKind::EmptySample, "cannot summarize an empty sample");
  if (with_spread && values.size() < 2) {
    throw Error(ErrorKind::DegenerateSpread, "a spread estimate needs at least 2 values");
  }
  const auto m = detail::shifted_moments(values);
  SummaryStats out;
  out.mu = m.mean;
  out.n = values.size();
  out.spread_convention = convention;
  if (with_spread) {
    const double divisor = convention == SpreadConvention::population
                               ? static_cast<double>(values.size())
                               : static_cast<double>(values.size() - 1);
    out.sigma = std::sqrt(m.sum_sq_dev / divisor);
  }
  return out;
}

inline SummaryStats summarize(const MetricSampleSet& samples,
                              SpreadConvention convention = SpreadConvention::population,
                              bool with_spread = true) {
  return summarize(samples.values(), convention, with_spread);
}

/// Closed-form estimate from already-known moments.
inline GaussianEstimate gaussian_from_moments(double mu, double sigma, std::size_t n, double z = kZ95) {
  if (n == 0) throw Error(ErrorKind::EmptySample, "n must be positive");
  if (!(sigma >= 0.0)) throw Error(ErrorKind::InvalidConfig, "sigma must be non-negative");
  GaussianEstimate e;
  e.mu = mu;
  e.sigma = sigma;
  e.n = n;
  e.z = z;
  e.sem = sigma / std::sqrt(static_cast<double>(n));
  const double half = z * e.sem;
  e.ci_lo = mu - half;
  e.ci_hi = mu + half;
  e.width = 2.0 * half;
  return e;
}

inline GaussianEstimate gaussian_estimate(const MetricSampleSet& samples, double z = kZ95,
                                          SpreadConvention convention = SpreadConvention::population) {
  if (samples.empty()) throw Error(ErrorKind::DegenerateSpread, "gaussian estimate needs n >= 2, got 0");
  if (samples.size() < 2) throw Error(ErrorKind::DegenerateSpread, "gaussian estimate needs n >= 2, got 1");
  if (!(z > 0.0) || !std::isfinite(z)) throw Error(ErrorKind::InvalidConfig, "z must be positive and finite");
  const auto stats = summarize(samples, convention);
  return gaussian_from_moments(stats.mu, stats.sigma, stats.n, z);
}

}  // namespace segprec
