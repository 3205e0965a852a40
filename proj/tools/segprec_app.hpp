#pragma once

// Command-line front end. run_cli() is kept separate from main() so the
// test suites can drive the tool in-process.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "segprec/bootstrap.hpp"
#include "segprec/core.hpp"
#include "segprec/error.hpp"
#include "segprec/io.hpp"
#include "segprec/metrics.hpp"
#include "segprec/simulate.hpp"
#include "segprec/subsample.hpp"

namespace segprec::cli {

enum ExitCode : int { kOk = 0, kValidation = 2, kData = 3, kInternal = 4 };

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

inline std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

namespace detail {

template <typename T>
T parse_env_number(const std::string& name, const std::string& text) {
  std::istringstream in(text);
  T value{};
  if (!(in >> value) || !in.eof()) {
    throw Error(ErrorKind::InvalidConfig, "environment variable " + name + "='" + text + "' is not a valid number");
  }
  return value;
}

// Flag value wins over the environment variable, which wins over the default.
template <typename T>
T resolve(const std::optional<T>& flag, const EnvLookup& env, const std::string& name, T fallback) {
  if (flag) return *flag;
  if (auto v = env(name)) return parse_env_number<T>(name, *v);
  return fallback;
}

inline std::uint64_t random_seed() {
  std::random_device rd;
  return (std::uint64_t{rd()} << 32) ^ rd();
}

inline std::string to_string(SpreadConvention c) { return c == SpreadConvention::population ? "population" : "sample"; }
inline std::string to_string(PercentileMethod m) {
  return m == PercentileMethod::linear_interpolation ? "linear" : "nearest-rank";
}
inline std::string fmt_z(double z) { return segprec::detail::shortest(z); }

inline MetricSampleSet read_samples(const std::string& path, SampleFormat format, const std::string& metric) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open input '" + path + "'");
  return load_samples(in, format, metric);
}

inline std::set<int> parse_labels(const std::vector<int>& labels) {
  std::set<int> out(labels.begin(), labels.end());
  if (labels.empty()) {
    for (int l = 1; l < 256; ++l) out.insert(l);
  }
  return out;
}

}  // namespace detail

/// Runs one invocation. args excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
                   const EnvLookup& env = process_env) {
  CLI::App app{"segprec: precision (SEM, 95% CI) of per-subject evaluation metrics", "segprec"};
  app.require_subcommand(1);

  // Shared option storage.
  std::string input;
  std::string out_path;
  SampleFormat input_format = SampleFormat::csv;
  ReportFormat report_format = ReportFormat::markdown;
  std::string metric = "dice";
  std::optional<std::uint64_t> seed_flag;
  std::optional<std::size_t> resamples_flag;
  std::optional<unsigned> threads_flag;
  double z = kZ95;
  bool exact_z = false;
  SpreadConvention convention = SpreadConvention::population;
  PercentileMethod method = PercentileMethod::linear_interpolation;
  std::vector<std::size_t> sizes;
  std::size_t draws = 100;
  std::vector<double> sigmas;
  double sigma = 0.0;
  double width = 0.0;
  std::vector<int> labels;
  bool empty_as_100 = false;
  std::string kde_path;
  std::optional<double> bandwidth;

  const std::map<std::string, SampleFormat> format_map{{"csv", SampleFormat::csv}, {"json", SampleFormat::json}};
  const std::map<std::string, ReportFormat> report_map{{"markdown", ReportFormat::markdown},
                                                       {"csv", ReportFormat::csv}};
  const std::map<std::string, SpreadConvention> convention_map{{"population", SpreadConvention::population},
                                                               {"sample", SpreadConvention::sample}};
  const std::map<std::string, PercentileMethod> method_map{{"linear", PercentileMethod::linear_interpolation},
                                                           {"nearest-rank", PercentileMethod::nearest_rank}};

  auto add_output = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_path, "Write the report to this file instead of stdout");
    cmd->add_option("--report", report_format, "Report format: markdown or csv")
        ->transform(CLI::CheckedTransformer(report_map, CLI::ignore_case));
  };
  auto add_input = [&](CLI::App* cmd) {
    cmd->add_option("--input", input, "Per-subject samples (subject_id,value)")->required();
    cmd->add_option("--format", input_format, "Input format: csv or json")
        ->transform(CLI::CheckedTransformer(format_map, CLI::ignore_case));
    cmd->add_option("--metric", metric, "Metric name; 'dice' enforces values in [0, 100]");
  };
  auto add_z = [&](CLI::App* cmd) {
    auto* z_opt = cmd->add_option("--z", z, "Critical value (default 1.96)")->check(CLI::PositiveNumber);
    cmd->add_flag("--exact-z", exact_z, "Use the exact Normal quantile 1.959964 instead of 1.96")->excludes(z_opt);
  };
  auto add_bootstrap = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed_flag, "Master seed (env SEGPREC_SEED); random and echoed when omitted");
    cmd->add_option("--resamples", resamples_flag, "Bootstrap resamples M (env SEGPREC_RESAMPLES, default 15000)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--percentile-method", method, "linear or nearest-rank")
        ->transform(CLI::CheckedTransformer(method_map, CLI::ignore_case));
    cmd->add_option("--threads", threads_flag, "Worker threads, 0 = all (env SEGPREC_THREADS); results do not depend on it");
  };
  auto add_convention = [&](CLI::App* cmd) {
    cmd->add_option("--convention", convention, "Spread divisor: population (n) or sample (n-1)")
        ->transform(CLI::CheckedTransformer(convention_map, CLI::ignore_case));
  };

  auto* estimate = app.add_subcommand("estimate", "Closed-form and bootstrap precision on a full test set");
  add_input(estimate);
  add_z(estimate);
  add_bootstrap(estimate);
  add_convention(estimate);
  add_output(estimate);
  estimate->add_option("--kde", kde_path, "Also write a KDE curve (x,density CSV) to this file");
  estimate->add_option("--bandwidth", bandwidth, "KDE bandwidth (default: Silverman's rule)")->check(CLI::PositiveNumber);

  auto* subsample = app.add_subcommand("subsample", "Repeated size-k subsampling study");
  add_input(subsample);
  add_z(subsample);
  add_bootstrap(subsample);
  add_convention(subsample);
  add_output(subsample);
  subsample->add_option("--sizes", sizes, "Subsample sizes K, comma separated (default 10,20,30,50,100,n)")
      ->delimiter(',');
  subsample->add_option("--draws", draws, "Draws J per size (default 100)")->check(CLI::PositiveNumber);

  auto* simulate = app.add_subcommand("simulate", "Closed-form SEM and CI width over a (k, sigma) grid");
  add_z(simulate);
  add_output(simulate);
  simulate->add_option("--sizes", sizes, "Test-set sizes k, comma separated")->delimiter(',');
  simulate->add_option("--sigmas", sigmas, "Standard deviations, comma separated")->delimiter(',');

  auto* plan = app.add_subcommand("plan", "Smallest test-set size reaching a target CI width");
  add_z(plan);
  add_output(plan);
  plan->add_option("--sigma", sigma, "Expected standard deviation of the metric")->required();
  plan->add_option("--width", width, "Target CI width")->required();

  auto* dice_cmd = app.add_subcommand("dice", "Per-subject Dice (%) from label volumes; emits a samples CSV");
  dice_cmd->add_option("--input", input, "Manifest CSV with header subject_id,pred,gt (paths relative to it)")
      ->required();
  dice_cmd->add_option("--labels", labels, "Labels merged into the foreground (default: all non-zero)")
      ->delimiter(',');
  dice_cmd->add_flag("--empty-as-100", empty_as_100, "Score subjects with both masks empty as 100 instead of failing");
  dice_cmd->add_option("--out", out_path, "Write the samples CSV to this file instead of stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: InvalidArguments: " << e.what() << '\n';
    return kValidation;
  }

  try {
    if (exact_z) z = kZ95Exact;
    const unsigned threads = detail::resolve<unsigned>(threads_flag, env, "SEGPREC_THREADS", 0u);
    std::string text;

    if (estimate->parsed() || subsample->parsed()) {
      const bool seeded = seed_flag.has_value() || env("SEGPREC_SEED").has_value();
      const std::uint64_t effective_seed =
          seeded ? detail::resolve<std::uint64_t>(seed_flag, env, "SEGPREC_SEED", 0) : detail::random_seed();
      const std::size_t resamples =
          detail::resolve<std::size_t>(resamples_flag, env, "SEGPREC_RESAMPLES", kDefaultResamples);
      if (resamples < 1) throw Error(ErrorKind::InvalidConfig, "resamples must be >= 1");
      const auto samples = detail::read_samples(input, input_format, metric);

      BootstrapConfig boot{resamples, effective_seed, method, threads};
      std::ostringstream header;
      header << "# segprec " << (estimate->parsed() ? "estimate" : "subsample") << " input="
             << std::filesystem::path(input).filename().string() << " n=" << samples.size() << " metric=" << metric
             << "\n# seed=" << effective_seed << " resamples=" << resamples << " z=" << detail::fmt_z(z)
             << " convention=" << detail::to_string(convention)
             << " percentile=" << detail::to_string(method) << '\n';

      if (estimate->parsed()) {
        const auto g = gaussian_estimate(samples, z, convention);
        const auto b = bootstrap_estimate(samples, boot);
        text = header.str() + render_full_set(g, b, report_format);
        if (!kde_path.empty()) {
          const auto curve = kde(samples, bandwidth);
          std::ofstream kde_out(kde_path, std::ios::binary);
          if (!kde_out) throw Error(ErrorKind::Io, "cannot create '" + kde_path + "'");
          kde_out << render_kde_csv(curve);
        }
      } else {
        SubsampleConfig config;
        config.sizes = sizes;
        config.draws = draws;
        config.bootstrap = boot;
        config.seed = effective_seed;
        config.z = z;
        config.convention = convention;
        config.threads = threads;
        const auto report = subsample_study(samples, config);
        header << "# draws=" << draws << " sizes=";
        for (std::size_t i = 0; i < report.rows.size(); ++i) header << (i ? "," : "") << report.rows[i].k;
        header << " aggregate=mean±std over draws (std divides by J)\n";
        text = header.str() + render_report(report, report_format);
      }
    } else if (simulate->parsed()) {
      const auto k_axis = sizes.empty() ? default_grid_sizes() : sizes;
      const auto s_axis = sigmas.empty() ? default_grid_sigmas() : sigmas;
      const auto grid = simulate_grid(k_axis, s_axis, z);
      text = "# segprec simulate z=" + detail::fmt_z(z) + '\n' + render_report(grid, report_format);
    } else if (plan->parsed()) {
      const auto result = plan_sample_size(sigma, width, z);
      text = "# segprec plan z=" + detail::fmt_z(z) + '\n' + render_report(result, report_format) +
             "n=" + std::to_string(result.required_n) + '\n';
    } else if (dice_cmd->parsed()) {
      const auto label_set = detail::parse_labels(labels);
      std::ifstream manifest(input, std::ios::binary);
      if (!manifest) throw Error(ErrorKind::Io, "cannot open manifest '" + input + "'");
      const auto base = std::filesystem::path(input).parent_path();
      std::string line;
      std::size_t line_no = 1;
      if (!std::getline(manifest, line) || segprec::detail::trim_cr(line) != "subject_id,pred,gt") {
        throw Error(ErrorKind::ParseError, "line 1: expected manifest header 'subject_id,pred,gt'");
      }
      std::vector<MetricSample> rows;
      while (std::getline(manifest, line)) {
        ++line_no;
        const std::string row(segprec::detail::trim_cr(line));
        if (row.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(row);
        for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
        if (fields.size() != 3) {
          throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": expected subject_id,pred,gt");
        }
        auto resolve_path = [&](const std::string& p) { return (base / p).string(); };
        const auto pred = merge_labels(read_volume_file(resolve_path(fields[1])), label_set);
        const auto gt = merge_labels(read_volume_file(resolve_path(fields[2])), label_set);
        double value = 0.0;
        try {
          value = segprec::dice(pred, gt);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::UndefinedDice || !empty_as_100) {
            throw Error(e.kind(), "subject '" + fields[0] + "': " + e.what());
          }
          value = 100.0;
        }
        rows.push_back({fields[0], value});
      }
      std::ostringstream csv;
      save_samples(csv, MetricSampleSet(std::move(rows), "dice", default_bounds("dice")), SampleFormat::csv);
      text = csv.str();
    }

    if (out_path.empty()) {
      out << text;
    } else {
      std::ofstream file(out_path, std::ios::binary);
      if (!file) throw Error(ErrorKind::Io, "cannot create '" + out_path + "'");
      file << text;
      if (!file) throw Error(ErrorKind::Io, "failed writing '" + out_path + "'");
    }
    return kOk;
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return is_validation_error(e.kind()) ? kValidation : kData;
  } catch (const std::exception& e) {
    err << "error: Internal: " << e.what() << '\n';
    return kInternal;
  }
}

}  // namespace segprec::cli
