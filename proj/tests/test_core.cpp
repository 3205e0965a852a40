#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "segprec/core.hpp"
#include "segprec/io.hpp"
#include "test_support.hpp"

using namespace segprec;
using segprec::testing::random_values;

namespace {

MetricSampleSet make(std::vector<double> v) { return MetricSampleSet::from_values(v, "synthetic"); }

void expect_error(ErrorKind kind, auto&& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected " << to_string(kind);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

}  // namespace

TEST(Summarize, ConstantSample) {
  const auto s = summarize(make({80, 80, 80}));
  EXPECT_EQ(s.mu, 80.0);
  EXPECT_EQ(s.sigma, 0.0);
  EXPECT_EQ(s.n, 3u);
}

TEST(Summarize, ConstantNonRepresentableValueHasExactlyZeroSpread) {
  const auto s = summarize(make(std::vector<double>(110, 80.7)));
  EXPECT_EQ(s.mu, 80.7);
  EXPECT_EQ(s.sigma, 0.0);
}

TEST(Summarize, TwoPointConventions) {
  const auto pop = summarize(make({0, 100}), SpreadConvention::population);
  EXPECT_EQ(pop.mu, 50.0);
  EXPECT_EQ(pop.sigma, 50.0);
  const auto smp = summarize(make({0, 100}), SpreadConvention::sample);
  EXPECT_DOUBLE_EQ(smp.sigma, std::sqrt(5000.0));
  EXPECT_EQ(smp.spread_convention, SpreadConvention::sample);
}

TEST(Summarize, FixtureMatchesOnePassOracle) {
  const auto set = segprec::testing::load_fixture();
  ASSERT_EQ(set.size(), 110u);
  segprec::testing::WelfordOracle oracle;
  for (double v : set.values()) oracle.add(v);

  const auto pop = summarize(set);
  EXPECT_NEAR(pop.mu, oracle.mean, 1e-12 * oracle.mean);
  EXPECT_NEAR(pop.sigma, oracle.population_sd(), 1e-12 * oracle.population_sd());
  const auto smp = summarize(set, SpreadConvention::sample);
  EXPECT_NEAR(smp.sigma, oracle.sample_sd(), 1e-12 * oracle.sample_sd());

  // The fixture was generated with these exact moments.
  EXPECT_NEAR(pop.mu, 80.70, 1e-9);
  EXPECT_NEAR(pop.sigma, 10.75, 1e-9);
}

TEST(Summarize, Errors) {
  expect_error(ErrorKind::EmptySample, [] { summarize(MetricSampleSet{}); });
  expect_error(ErrorKind::DegenerateSpread, [] { summarize(make({5})); });
  EXPECT_EQ(summarize(make({5}), SpreadConvention::population, false).mu, 5.0);
}

TEST(GaussianEstimate, FullTestSetRow) {
  const auto g = gaussian_from_moments(80.70, 10.75, 110);
  EXPECT_EQ(fixed2(g.sem), "1.02");
  EXPECT_EQ(fixed2(g.width), "4.02");

  const auto from_fixture = gaussian_estimate(segprec::testing::load_fixture());
  EXPECT_EQ(fixed2(from_fixture.mu), "80.70");
  EXPECT_EQ(fixed2(from_fixture.sigma), "10.75");
  EXPECT_EQ(fixed2(from_fixture.sem), "1.02");
  EXPECT_EQ(fixed2(from_fixture.width), "4.02");
}

TEST(GaussianEstimate, SigmaFiveHundredSubjects) {
  const auto g = gaussian_from_moments(50.0, 5.0, 100);
  EXPECT_DOUBLE_EQ(g.sem, 0.5);
  EXPECT_DOUBLE_EQ(g.width, 1.96);
}

TEST(GaussianEstimate, ZeroSpread) {
  const auto g = gaussian_estimate(make({72.5, 72.5, 72.5, 72.5}));
  EXPECT_EQ(g.sem, 0.0);
  EXPECT_EQ(g.ci_lo, 72.5);
  EXPECT_EQ(g.ci_hi, 72.5);
  EXPECT_EQ(g.width, 0.0);
}

TEST(GaussianEstimate, DefaultAndExactCriticalValue) {
  const auto set = make({1, 2, 3, 4, 5});
  EXPECT_EQ(gaussian_estimate(set).z, 1.96);
  const auto exact = gaussian_estimate(set, kZ95Exact);
  EXPECT_EQ(exact.z, kZ95Exact);
  EXPECT_DOUBLE_EQ(exact.width, 2 * kZ95Exact * exact.sem);
}

TEST(GaussianEstimate, Errors) {
  expect_error(ErrorKind::DegenerateSpread, [] { gaussian_estimate(make({1})); });
  expect_error(ErrorKind::DegenerateSpread, [] { gaussian_estimate(MetricSampleSet{}); });
  expect_error(ErrorKind::InvalidConfig, [] { gaussian_estimate(make({1, 2}), -1.0); });
}

TEST(GaussianEstimate, Properties) {
  Xoshiro256 rng(20240101);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(60);
    const auto values = random_values(rng, n, 0.0, 100.0);
    const auto base = gaussian_estimate(make(values));

    // width = 2 z sem, interval symmetric about mu
    EXPECT_EQ(base.width, 2.0 * base.z * base.sem);
    EXPECT_EQ(base.sem, base.sigma / std::sqrt(static_cast<double>(n)));
    EXPECT_NEAR(base.ci_hi - base.ci_lo, base.width, 1e-12 * (1 + base.width));
    EXPECT_NEAR(base.mu - base.ci_lo, base.ci_hi - base.mu, 1e-12 * (1 + base.width));

    // shift invariance
    const double c = -50.0 + 100.0 * rng.uniform();
    auto shifted = values;
    for (auto& v : shifted) v += c;
    const auto s = gaussian_estimate(make(shifted));
    const double tol = 1e-9 * (std::abs(base.mu) + std::abs(c) + base.sigma);
    EXPECT_NEAR(s.mu, base.mu + c, tol);
    EXPECT_NEAR(s.ci_lo, base.ci_lo + c, tol);
    EXPECT_NEAR(s.ci_hi, base.ci_hi + c, tol);
    EXPECT_NEAR(s.sigma, base.sigma, tol);
    EXPECT_NEAR(s.sem, base.sem, tol);
    EXPECT_NEAR(s.width, base.width, tol);

    // scale equivariance
    const double k = 0.1 + 5.0 * rng.uniform();
    auto scaled = values;
    for (auto& v : scaled) v *= k;
    const auto sc = gaussian_estimate(make(scaled));
    EXPECT_NEAR(sc.mu, base.mu * k, 1e-9 * std::abs(base.mu * k) + 1e-12);
    EXPECT_NEAR(sc.sigma, base.sigma * k, 1e-9 * base.sigma * k + 1e-12);
    EXPECT_NEAR(sc.sem, base.sem * k, 1e-9 * base.sem * k + 1e-12);
    EXPECT_NEAR(sc.width, base.width * k, 1e-9 * base.width * k + 1e-12);

    // population <= sample spread
    const auto smp = summarize(make(values), SpreadConvention::sample);
    EXPECT_LT(base.sigma, smp.sigma);
  }
}

TEST(GaussianEstimate, SemStrictlyDecreasesInN) {
  for (std::size_t n = 1; n < 2000; ++n) {
    EXPECT_GT(gaussian_from_moments(0, 10.75, n).sem, gaussian_from_moments(0, 10.75, n + 1).sem);
  }
}

TEST(MetricSampleSet, Validation) {
  expect_error(ErrorKind::DuplicateSubject, [] {
    MetricSampleSet({{"a", 1}, {"a", 2}}, "dice");
  });
  expect_error(ErrorKind::NonFiniteValue, [] {
    MetricSampleSet({{"a", std::nan("")}}, "dice");
  });
  expect_error(ErrorKind::NonFiniteValue, [] {
    MetricSampleSet({{"a", INFINITY}}, "dice");
  });
  expect_error(ErrorKind::InvalidSubject, [] { MetricSampleSet({{"", 1}}, "dice"); });
  expect_error(ErrorKind::OutOfBounds, [] {
    MetricSampleSet({{"a", 100.5}}, "dice", default_bounds("dice"));
  });
  EXPECT_NO_THROW(MetricSampleSet({{"a", 100.5}}, "hausdorff", default_bounds("hausdorff")));
  EXPECT_NO_THROW(MetricSampleSet({{"a", 0.0}, {"b", 100.0}}, "dice", default_bounds("dice")));
}
