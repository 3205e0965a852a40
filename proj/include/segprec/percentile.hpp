#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>

#include "segprec/error.hpp"

namespace segprec {

enum class PercentileMethod {
  linear_interpolation,  // h = (N-1)q, interpolate between order statistics floor(h), ceil(h)
  nearest_rank,          // 1-based rank ceil(qN), clamped to [1, N]
};

namespace detail {

inline void check_quantile(double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorKind::QOutOfRange, "quantile must lie in [0, 1]");
}

// 0-based (lo, hi, fraction) positions for quantile q over N sorted values.
struct QuantilePosition {
  std::size_t lo;
  std::size_t hi;
  double fraction;
};

template <typename Count>
QuantilePosition quantile_position(Count total, double q, PercentileMethod method) {
  if (method == PercentileMethod::linear_interpolation) {
    const double h = static_cast<double>(total - 1) * q;
    const double fl = std::floor(h);
    const auto lo = static_cast<std::size_t>(fl);
    const auto hi = std::min<std::size_t>(lo + 1, static_cast<std::size_t>(total - 1));
    return {lo, hi, h - fl};
  }
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(total)));
  rank = std::clamp<std::size_t>(rank, 1, static_cast<std::size_t>(total));
  return {rank - 1, rank - 1, 0.0};
}

}  // namespace detail

/// Quantile q of values already sorted ascending.
inline double percentile(std::span<const double> sorted_values, double q,
                         PercentileMethod method = PercentileMethod::linear_interpolation) {
  if (sorted_values.empty()) throw Error(ErrorKind::EmptyList, "percentile of an empty list");
  detail::check_quantile(q);
  const auto pos = detail::quantile_position(sorted_values.size(), q, method);
  const double a = sorted_values[pos.lo];
  if (pos.fraction == 0.0) return a;
  const double b = sorted_values[pos.hi];
  return std::clamp(a + pos.fraction * (b - a), a, b);
}

}  // namespace segprec
