#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cstring>
#include <set>

#include "segprec/subsample.hpp"
#include "segprec/synthetic.hpp"
#include "test_support.hpp"

using namespace segprec;

namespace {
MetricSampleSet make(std::vector<double> v) { return MetricSampleSet::from_values(v, "synthetic"); }
}  // namespace

TEST(DrawSubsample, FullSizeIsWholeSet) {
  const auto set = segprec::testing::load_fixture();
  const auto sub = draw_subsample(set, set.size(), 17);
  std::set<std::string> a, b;
  for (const auto& s : set.samples()) a.insert(s.subject_id);
  for (const auto& s : sub.samples()) b.insert(s.subject_id);
  EXPECT_EQ(a, b);
}

TEST(DrawSubsample, DistinctSubjects) {
  const auto set = make({1, 2, 3, 4, 5});
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto sub = draw_subsample(set, 3, seed);
    std::set<std::string> ids;
    for (const auto& s : sub.samples()) ids.insert(s.subject_id);
    EXPECT_EQ(ids.size(), 3u);
  }
}

TEST(DrawSubsample, SingleDrawIsUniform) {
  const auto set = make({1, 2, 3, 4});
  std::array<int, 4> counts{};
  constexpr int draws = 10000;
  for (int d = 0; d < draws; ++d) {
    const auto sub = draw_subsample(set, 1, derive_seed(555, d));
    ++counts[static_cast<std::size_t>(sub.values()[0]) - 1];
  }
  for (int c : counts) EXPECT_NEAR(c / double(draws), 0.25, 0.02);
}

TEST(DrawSubsample, Deterministic) {
  const auto set = segprec::testing::load_fixture();
  EXPECT_EQ(draw_indices(set.size(), 20, 8), draw_indices(set.size(), 20, 8));
  EXPECT_NE(draw_indices(set.size(), 20, 8), draw_indices(set.size(), 20, 9));
}

TEST(DrawSubsample, TooLarge) {
  try {
    draw_subsample(make({1, 2, 3}), 4, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SizeExceedsPopulation);
  }
}

TEST(SubsampleStudy, ConstantTestSet) {
  const auto set = make(std::vector<double>(30, 77.7));
  SubsampleConfig cfg;
  cfg.sizes = {2, 10, 30};
  cfg.draws = 10;
  cfg.bootstrap.resamples = 200;
  const auto report = subsample_study(set, cfg);
  ASSERT_EQ(report.rows.size(), 3u);
  for (const auto& r : report.rows) {
    for (const auto* v : {&r.sigma, &r.sem, &r.width, &r.sem_star, &r.width_star}) {
      EXPECT_EQ(v->mean, 0.0);
      EXPECT_EQ(v->std, 0.0);
    }
    EXPECT_EQ(r.mu.mean, 77.7);
  }
}

TEST(SubsampleStudy, FullSizeRowHasZeroDispersion) {
  const auto set = segprec::testing::load_fixture();
  SubsampleConfig cfg;
  cfg.sizes = {set.size()};
  cfg.draws = 25;
  cfg.bootstrap.resamples = 500;
  cfg.seed = 4;
  const auto report = subsample_study(set, cfg);
  const auto& r = report.rows.at(0);
  EXPECT_EQ(r.mu.std, 0.0);
  EXPECT_EQ(r.sigma.std, 0.0);
  EXPECT_EQ(r.sem.std, 0.0);
  EXPECT_EQ(r.width.std, 0.0);
  EXPECT_GT(r.sem_star.std, 0.0);  // bootstrap still varies through resampling
}

TEST(SubsampleStudy, DefaultSizesAndProvenance) {
  EXPECT_EQ(SubsampleConfig::default_sizes(110), (std::vector<std::size_t>{10, 20, 30, 50, 100, 110}));
  EXPECT_EQ(SubsampleConfig::default_sizes(40), (std::vector<std::size_t>{10, 20, 30, 40}));
  SubsampleConfig cfg;
  cfg.draws = 3;
  cfg.bootstrap.resamples = 50;
  cfg.seed = 12;
  const auto report = subsample_study(segprec::testing::load_fixture(), cfg);
  EXPECT_EQ(report.rows.size(), 6u);
  EXPECT_EQ(report.draws, 3u);
  EXPECT_EQ(report.resamples, 50u);
  EXPECT_EQ(report.seed, 12u);
}

TEST(SubsampleStudy, AddingSizesKeepsExistingRows) {
  const auto set = segprec::testing::load_fixture();
  SubsampleConfig cfg;
  cfg.draws = 8;
  cfg.bootstrap.resamples = 100;
  cfg.sizes = {20};
  const auto only = subsample_study(set, cfg);
  cfg.sizes = {10, 20, 50};
  const auto more = subsample_study(set, cfg);
  EXPECT_EQ(std::memcmp(&only.rows[0], &more.rows[1], sizeof(SubsampleRow)), 0);
}

TEST(SubsampleStudy, DeterministicAcrossThreads) {
  const auto set = segprec::testing::load_fixture();
  SubsampleConfig cfg;
  cfg.sizes = {10, 50};
  cfg.draws = 12;
  cfg.bootstrap.resamples = 300;
  cfg.threads = 1;
  const auto a = subsample_study(set, cfg);
  cfg.threads = 4;
  const auto b = subsample_study(set, cfg);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(std::memcmp(&a.rows[i], &b.rows[i], sizeof(SubsampleRow)), 0);
  }
}

TEST(SubsampleStudy, InvalidConfig) {
  const auto set = make({1, 2, 3, 4, 5});
  for (std::vector<std::size_t> sizes : {std::vector<std::size_t>{1}, {6}, {2, 9}}) {
    SubsampleConfig cfg;
    cfg.sizes = sizes;
    try {
      subsample_study(set, cfg);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidConfig);
    }
  }
  SubsampleConfig no_draws;
  no_draws.draws = 0;
  EXPECT_THROW(subsample_study(set, no_draws), Error);
}

TEST(SubsampleStudy, NormalDataTrends) {
  // Smaller J and M than the full study; the full-scale run is in the acceptance suite.
  const auto set = make(with_exact_moments(normal_sample(110, 80.7, 10.75, 3), 80.7, 10.75));
  SubsampleConfig cfg;
  cfg.draws = 100;
  cfg.bootstrap.resamples = 2000;
  cfg.seed = 21;
  const auto report = subsample_study(set, cfg);
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    EXPECT_LT(report.rows[i].sem.mean, report.rows[i - 1].sem.mean);
    EXPECT_LT(report.rows[i].width.mean, report.rows[i - 1].width.mean);
  }
  for (const auto& r : report.rows) EXPECT_LE(std::abs(r.sem.mean - r.sem_star.mean), 0.05) << "k=" << r.k;
}
