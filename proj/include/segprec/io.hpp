#pragma once

// Sample files, KDE curves and report rendering.
//
// Sample CSV: UTF-8, LF line endings, header "subject_id,value", one subject
// per row, values in shortest round-trip decimal form. Sample JSON: an array of
// {"subject_id": string, "value": number}.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <istream>
#include <iterator>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include <json.hpp>

#include "segprec/bootstrap.hpp"
#include "segprec/core.hpp"
#include "segprec/error.hpp"
#include "segprec/percentile.hpp"
#include "segprec/simulate.hpp"
#include "segprec/subsample.hpp"

namespace segprec {

enum class SampleFormat { csv, json };
enum class ReportFormat { markdown, csv };

namespace detail {

inline std::string_view trim_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

inline std::string shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

inline std::string line_error(std::size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

inline MetricSampleSet load_csv(std::istream& in, const std::string& metric, std::optional<Bounds> bounds) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw Error(ErrorKind::ParseError, "line 1: missing header 'subject_id,value'");
  ++line_no;
  std::string_view header = trim_cr(line);
  if (header.size() >= 3 && header.substr(0, 3) == "\xEF\xBB\xBF") header.remove_prefix(3);
  if (header != "subject_id,value") {
    throw Error(ErrorKind::ParseError, line_error(1, "expected header 'subject_id,value', got '" + std::string(header) + "'"));
  }

  std::vector<MetricSample> samples;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = trim_cr(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos) {
      throw Error(ErrorKind::ParseError, line_error(line_no, "expected exactly 2 fields"));
    }
    const auto id = row.substr(0, comma);
    const auto field = row.substr(comma + 1);
    if (id.empty()) throw Error(ErrorKind::InvalidSubject, line_error(line_no, "empty subject_id"));
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
      throw Error(ErrorKind::ParseError, line_error(line_no, "cannot parse value '" + std::string(field) + "'"));
    }
    if (!std::isfinite(value)) {
      throw Error(ErrorKind::NonFiniteValue,
                  line_error(line_no, "non-finite value '" + std::string(field) + "' for subject '" + std::string(id) + "'"));
    }
    if (bounds && (value < bounds->lo || value > bounds->hi)) {
      throw Error(ErrorKind::OutOfBounds, line_error(line_no, "value " + std::string(field) + " for subject '" +
                                                                  std::string(id) + "' outside [" + shortest(bounds->lo) +
                                                                  ", " + shortest(bounds->hi) + "]"));
    }
    samples.push_back({std::string(id), value});
  }
  return MetricSampleSet(std::move(samples), metric, bounds);
}

inline MetricSampleSet load_json(std::istream& in, const std::string& metric, std::optional<Bounds> bounds) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ParseError, "byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorKind::ParseError, "expected a JSON array of {subject_id, value}");
  std::vector<MetricSample> samples;
  samples.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& item = doc[i];
    const std::string where = "element " + std::to_string(i);
    if (!item.is_object() || !item.contains("subject_id") || !item.contains("value")) {
      throw Error(ErrorKind::ParseError, where + ": expected {subject_id, value}");
    }
    if (!item["subject_id"].is_string()) throw Error(ErrorKind::ParseError, where + ": subject_id must be a string");
    if (!item["value"].is_number()) throw Error(ErrorKind::ParseError, where + ": value must be a number");
    const double value = item["value"].get<double>();
    const auto id = item["subject_id"].get<std::string>();
    if (!std::isfinite(value)) throw Error(ErrorKind::NonFiniteValue, where + ": non-finite value for '" + id + "'");
    samples.push_back({id, value});
  }
  return MetricSampleSet(std::move(samples), metric, bounds);
}

}  // namespace detail

inline MetricSampleSet load_samples(std::istream& in, SampleFormat format, const std::string& metric_name = "dice",
                                    std::optional<Bounds> bounds = std::nullopt, bool use_default_bounds = true) {
  if (!bounds && use_default_bounds) bounds = default_bounds(metric_name);
  return format == SampleFormat::csv ? detail::load_csv(in, metric_name, bounds)
                                     : detail::load_json(in, metric_name, bounds);
}

inline MetricSampleSet load_samples_text(std::string_view text, SampleFormat format,
                                         const std::string& metric_name = "dice") {
  std::istringstream in{std::string(text)};
  return load_samples(in, format, metric_name);
}

inline void save_samples(std::ostream& out, const MetricSampleSet& samples, SampleFormat format) {
  if (format == SampleFormat::csv) {
    out << "subject_id,value\n";
    for (const auto& s : samples.samples()) {
      if (s.subject_id.find_first_of(",\n\r") != std::string::npos) {
        throw Error(ErrorKind::InvalidSubject, "subject_id '" + s.subject_id + "' cannot be written as CSV");
      }
      out << s.subject_id << ',' << detail::shortest(s.value) << '\n';
    }
  } else {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& s : samples.samples()) doc.push_back({{"subject_id", s.subject_id}, {"value", s.value}});
    out << doc.dump(2) << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "failed to write samples");
}

// ---------------------------------------------------------------------------
// KDE

struct KdeCurve {
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth = 0.0;
};

/// 0.9 * min(sd, IQR / 1.34) * n^(-1/5), sd with divisor n - 1. Returns 0 for constant input.
inline double silverman_bandwidth(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double sd = summarize(values, SpreadConvention::sample).sigma;
  const double iqr = percentile(sorted, 0.75) - percentile(sorted, 0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
  return 0.9 * spread * std::pow(static_cast<double>(values.size()), -0.2);
}

/// Gaussian-kernel density on an even grid over [min - 4h, max + 4h].
inline KdeCurve kde(const MetricSampleSet& samples, std::optional<double> bandwidth = std::nullopt,
                    std::size_t grid_points = 512) {
  const auto values = samples.values();
  if (values.size() < 2) throw Error(ErrorKind::DegenerateSpread, "kde needs at least 2 values");
  if (grid_points < 2) throw Error(ErrorKind::InvalidConfig, "kde needs at least 2 grid points");
  double h = 0.0;
  if (bandwidth) {
    if (!(*bandwidth > 0.0) || !std::isfinite(*bandwidth)) throw Error(ErrorKind::InvalidConfig, "bandwidth must be > 0");
    h = *bandwidth;
  } else {
    h = silverman_bandwidth(values);
    if (!(h > 0.0)) throw Error(ErrorKind::DegenerateSpread, "all values are equal; pass an explicit bandwidth");
  }

  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it - 4.0 * h;
  const double hi = *hi_it + 4.0 * h;
  const double step = (hi - lo) / static_cast<double>(grid_points - 1);
  const double norm = 1.0 / (static_cast<double>(values.size()) * h * std::sqrt(2.0 * std::numbers::pi));

  KdeCurve curve;
  curve.bandwidth = h;
  curve.grid.resize(grid_points);
  curve.density.resize(grid_points);
  for (std::size_t g = 0; g < grid_points; ++g) {
    const double x = g + 1 == grid_points ? hi : lo + step * static_cast<double>(g);
    double sum = 0.0;
    for (double v : values) {
      const double u = (x - v) / h;
      sum += std::exp(-0.5 * u * u);
    }
    curve.grid[g] = x;
    curve.density[g] = sum * norm;
  }
  return curve;
}

inline double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double area = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) area += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  return area;
}

inline std::string render_kde_csv(const KdeCurve& curve) {
  std::string out = "# bandwidth=" + detail::shortest(curve.bandwidth) + "\nx,density\n";
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    out += detail::shortest(curve.grid[i]) + ',' + detail::shortest(curve.density[i]) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rendering. Everything is stored in full precision; rounding happens here.

/// Round half away from zero to 2 decimals.
inline double round2(double x) { return std::round(x * 100.0) / 100.0; }

inline std::string fixed2(double x) {
  double r = round2(x);
  if (r == 0.0) r = 0.0;  // no "-0.00"
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", r);
  return buf;
}

/// Compact axis label: 2-decimal rounding with trailing zeros dropped ("2", "10.75").
inline std::string axis_label(double x) {
  std::string s = fixed2(x);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

namespace detail {

inline std::string md_row(const std::vector<std::string>& cells) {
  std::string out = "|";
  for (const auto& c : cells) out += " " + c + " |";
  return out + '\n';
}

inline std::string md_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::string out = md_row(header);
  out += '|';
  for (std::size_t i = 0; i < header.size(); ++i) out += i == 0 ? "---|" : "---:|";
  out += '\n';
  for (const auto& r : rows) out += md_row(r);
  return out;
}

inline std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  auto join = [](const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) line += (i ? "," : "") + cells[i];
    return line + '\n';
  };
  std::string out = join(header);
  for (const auto& r : rows) out += join(r);
  return out;
}

inline std::string interval(double lo, double hi) { return "[" + fixed2(lo) + ", " + fixed2(hi) + "]"; }

inline std::string pm(const MeanStd& v) { return fixed2(v.mean) + " ± " + fixed2(v.std); }

}  // namespace detail

/// Full-test-set table: closed form, and bootstrap columns when available.
inline std::string render_full_set(const GaussianEstimate& g, const std::optional<BootstrapEstimate>& b,
                                   ReportFormat format) {
  if (format == ReportFormat::markdown) {
    std::vector<std::string> header{"n", "mu", "sigma", "SEM", "w"};
    std::vector<std::string> row{"n = " + std::to_string(g.n), fixed2(g.mu), fixed2(g.sigma), fixed2(g.sem),
                                 fixed2(g.width)};
    if (b) {
      header.insert(header.end(), {"mu*", "SEM*", "w*"});
      row.insert(row.end(), {fixed2(b->mu_star), fixed2(b->sem_star), fixed2(b->width_star)});
    }
    header.push_back("CI");
    row.push_back(detail::interval(g.ci_lo, g.ci_hi));
    if (b) {
      header.push_back("CI*");
      row.push_back(detail::interval(b->ci_lo_star, b->ci_hi_star));
    }
    return detail::md_table(header, {row});
  }
  std::vector<std::string> header{"n", "mu", "sigma", "sem", "w"};
  std::vector<std::string> row{std::to_string(g.n), fixed2(g.mu), fixed2(g.sigma), fixed2(g.sem), fixed2(g.width)};
  if (b) {
    header.insert(header.end(), {"mu_star", "sem_star", "w_star"});
    row.insert(row.end(), {fixed2(b->mu_star), fixed2(b->sem_star), fixed2(b->width_star)});
  }
  header.insert(header.end(), {"ci_lo", "ci_hi"});
  row.insert(row.end(), {fixed2(g.ci_lo), fixed2(g.ci_hi)});
  if (b) {
    header.insert(header.end(), {"ci_lo_star", "ci_hi_star"});
    row.insert(row.end(), {fixed2(b->ci_lo_star), fixed2(b->ci_hi_star)});
  }
  return detail::csv_table(header, {row});
}

inline std::string render_report(const GaussianEstimate& g, ReportFormat format) {
  return render_full_set(g, std::nullopt, format);
}

inline std::string render_report(const BootstrapEstimate& b, ReportFormat format) {
  if (format == ReportFormat::markdown) {
    return detail::md_table({"n", "M", "seed", "mu*", "SEM*", "w*", "CI*"},
                            {{"n = " + std::to_string(b.n), std::to_string(b.resamples), std::to_string(b.seed),
                              fixed2(b.mu_star), fixed2(b.sem_star), fixed2(b.width_star),
                              detail::interval(b.ci_lo_star, b.ci_hi_star)}});
  }
  return detail::csv_table({"n", "resamples", "seed", "mu_star", "sem_star", "w_star", "ci_lo_star", "ci_hi_star"},
                           {{std::to_string(b.n), std::to_string(b.resamples), std::to_string(b.seed),
                             fixed2(b.mu_star), fixed2(b.sem_star), fixed2(b.width_star), fixed2(b.ci_lo_star),
                             fixed2(b.ci_hi_star)}});
}

/// Per-size table, "mean ± std" across draws.
inline std::string render_report(const SubsampleReport& report, ReportFormat format) {
  std::vector<std::vector<std::string>> rows;
  if (format == ReportFormat::markdown) {
    for (const auto& r : report.rows) {
      rows.push_back({"k = " + std::to_string(r.k), detail::pm(r.mu), detail::pm(r.sigma), detail::pm(r.sem),
                      detail::pm(r.width), detail::pm(r.mu_star), detail::pm(r.sem_star), detail::pm(r.width_star)});
    }
    return detail::md_table({"k", "mu_k", "sigma_k", "SEM_k", "w_k", "mu*_k", "SEM*_k", "w*_k"}, rows);
  }
  for (const auto& r : report.rows) {
    std::vector<std::string> row{std::to_string(r.k)};
    for (const auto* v : {&r.mu, &r.sigma, &r.sem, &r.width, &r.mu_star, &r.sem_star, &r.width_star}) {
      row.push_back(fixed2(v->mean));
      row.push_back(fixed2(v->std));
    }
    rows.push_back(std::move(row));
  }
  return detail::csv_table({"k", "mu_mean", "mu_std", "sigma_mean", "sigma_std", "sem_mean", "sem_std", "w_mean",
                            "w_std", "mu_star_mean", "mu_star_std", "sem_star_mean", "sem_star_std",
                            "w_star_mean", "w_star_std"},
                           rows);
}

/// sigma across, k down; each sigma contributes a SEM and a w column.
inline std::string render_report(const SimulationGrid& grid, ReportFormat format) {
  std::vector<std::string> header{format == ReportFormat::markdown ? "k \\ sigma" : "k"};
  for (double s : grid.sigma_values) {
    const auto label = axis_label(s);
    if (format == ReportFormat::markdown) {
      header.push_back(label + " SEM");
      header.push_back(label + " w");
    } else {
      header.push_back("sem@" + label);
      header.push_back("w@" + label);
    }
  }
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < grid.k_values.size(); ++i) {
    std::vector<std::string> row{format == ReportFormat::markdown ? "k = " + std::to_string(grid.k_values[i])
                                                                  : std::to_string(grid.k_values[i])};
    for (std::size_t j = 0; j < grid.sigma_values.size(); ++j) {
      row.push_back(fixed2(grid.cell(i, j).sem));
      row.push_back(fixed2(grid.cell(i, j).width));
    }
    rows.push_back(std::move(row));
  }
  return format == ReportFormat::markdown ? detail::md_table(header, rows) : detail::csv_table(header, rows);
}

inline std::string render_report(const PlanResult& plan, ReportFormat format) {
  if (format == ReportFormat::markdown) {
    return detail::md_table({"sigma", "target w", "z", "required n", "achieved w"},
                            {{fixed2(plan.sigma), fixed2(plan.target_width), detail::shortest(plan.z),
                              std::to_string(plan.required_n), fixed2(plan.achieved_width)}});
  }
  return detail::csv_table({"sigma", "target_width", "z", "required_n", "achieved_width"},
                           {{detail::shortest(plan.sigma), detail::shortest(plan.target_width),
                             detail::shortest(plan.z), std::to_string(plan.required_n),
                             detail::shortest(plan.achieved_width)}});
}

}  // namespace segprec
