// Copyright (c) 2026, The cdgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "cdgcn/eval.h"
#include "support/generators.h"
#include "support/oracles.h"

namespace cdgcn {
namespace {

RttmRecord rec(double onset, double dur, const std::string &spk) { return {"f", onset, dur, spk}; }

TEST(Der, PerfectHypothesis) {
  const std::vector<RttmRecord> ref{rec(0, 4, "a"), rec(3, 2, "b"), rec(6, 1, "a")};
  for (double collar : {0.0, 0.25, 1.0}) {
    const DerBreakdown d = der(ref, ref, collar);
    EXPECT_EQ(d.der_percent, 0.0);
  }
}

TEST(Der, EmptyHypothesisIsAllMiss) {
  const std::vector<RttmRecord> ref{rec(0, 10, "A")};
  const DerBreakdown d = der(ref, {});
  EXPECT_EQ(d.der_percent, 100.0);
  EXPECT_EQ(d.missed_seconds, 10.0);
  EXPECT_EQ(d.false_alarm_seconds, 0.0);
  EXPECT_EQ(d.speaker_error_seconds, 0.0);
}

TEST(Der, HalfCovered) {
  const std::vector<RttmRecord> ref{rec(0, 10, "A")};
  const std::vector<RttmRecord> hyp{rec(0, 5, "X")};
  const DerBreakdown d = der(ref, hyp);
  EXPECT_EQ(d.der_percent, 50.0);
  EXPECT_EQ(d.missed_seconds, 5.0);
  EXPECT_EQ(d.total_reference_seconds, 10.0);
}

TEST(Der, ConfusionAndOverlap) {
  // ref: A 0-4, B 2-6 (overlap 2-4); hyp: X 0-6 only.
  const std::vector<RttmRecord> ref{rec(0, 4, "A"), rec(2, 4, "B")};
  const std::vector<RttmRecord> hyp{rec(0, 6, "X")};
  const DerBreakdown d = der(ref, hyp);
  EXPECT_EQ(d.total_reference_seconds, 8.0);
  EXPECT_EQ(d.missed_seconds, 2.0);
  EXPECT_EQ(d.speaker_error_seconds, 2.0);
  EXPECT_EQ(d.false_alarm_seconds, 0.0);
  EXPECT_EQ(d.der_percent, 50.0);
}

TEST(Der, CollarExcludesBoundaries) {
  const std::vector<RttmRecord> ref{rec(1, 4, "A")};
  const std::vector<RttmRecord> hyp{rec(1.2, 3.6, "X")};
  EXPECT_EQ(der(ref, hyp, 0.25).der_percent, 0.0);
  EXPECT_GT(der(ref, hyp, 0.1).der_percent, 0.0);
}

TEST(Der, ZeroReference) {
  EXPECT_EQ(der({}, {}).der_percent, 0.0);
  EXPECT_TRUE(std::isinf(der({}, std::vector<RttmRecord>{rec(0, 1, "x")}).der_percent));
}

std::vector<RttmRecord> random_records(gen::Rng &rng, int speakers, int count) {
  std::vector<RttmRecord> out;
  for (int i = 0; i < count; ++i) {
    out.push_back(rec(gen::uniform_int(rng, 0, 3000) / 1000.0, gen::uniform_int(rng, 1, 1500) / 1000.0,
                      "s" + std::to_string(gen::uniform_int(rng, 0, speakers - 1))));
  }
  return out;
}

TEST(Der, MatchesFrameOracle) {
  gen::Rng rng(1);
  for (int trial = 0; trial < 60; ++trial) {
    const auto ref = random_records(rng, gen::uniform_int(rng, 1, 4), gen::uniform_int(rng, 1, 8));
    const auto hyp = random_records(rng, gen::uniform_int(rng, 1, 5), gen::uniform_int(rng, 0, 8));
    const int collar_ms = trial % 3 == 0 ? 0 : gen::uniform_int(rng, 1, 200);
    const DerBreakdown d = der(ref, hyp, collar_ms / 1000.0);
    const oracle::FrameDer o = oracle::der(ref, hyp, collar_ms);
    EXPECT_NEAR(d.missed_seconds, o.miss / 1000.0, 1e-9) << trial;
    EXPECT_NEAR(d.false_alarm_seconds, o.fa / 1000.0, 1e-9) << trial;
    EXPECT_NEAR(d.speaker_error_seconds, o.err / 1000.0, 1e-9) << trial;
    EXPECT_NEAR(d.total_reference_seconds, o.total / 1000.0, 1e-9) << trial;
    if (o.total > 0) EXPECT_NEAR(d.der_percent, o.percent(), 1e-9) << trial;
    const double sum = d.missed_seconds + d.false_alarm_seconds + d.speaker_error_seconds;
    if (d.total_reference_seconds > 0) {
      EXPECT_NEAR(d.der_percent, 100.0 * sum / d.total_reference_seconds, 1e-9);
    }
  }
}

TEST(Der, InvariantToRelabeling) {
  gen::Rng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const auto ref = random_records(rng, 3, 6);
    const auto hyp = random_records(rng, 3, 6);
    auto renamed = hyp;
    for (auto &r : renamed) r.speaker = "z" + r.speaker;
    EXPECT_EQ(der(ref, hyp).der_percent, der(ref, renamed).der_percent);
    EXPECT_EQ(der(ref, ref, 0.1).der_percent, 0.0);
  }
}

TEST(Der, ByFileScoresSeparately) {
  // Same speaker name in two files refers to different people.
  const std::vector<RttmRecord> ref{{"a", 0, 2, "s"}, {"b", 0, 2, "s"}};
  const std::vector<RttmRecord> hyp{{"a", 0, 2, "x"}, {"b", 0, 2, "y"}};
  EXPECT_EQ(der_by_file(ref, hyp).der_percent, 0.0);
}

TEST(Assignment, MatchesPermutationOracle) {
  gen::Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int rows = gen::uniform_int(rng, 0, 5), cols = gen::uniform_int(rng, 0, 5);
    std::vector<std::vector<std::int64_t>> w(rows, std::vector<std::int64_t>(cols));
    for (auto &row : w) {
      for (auto &x : row) x = gen::uniform_int(rng, 0, 50);
    }
    const std::vector<int> a = max_weight_assignment(w);
    ASSERT_EQ(static_cast<int>(a.size()), rows);
    std::int64_t total = 0;
    std::vector<int> used;
    for (int r = 0; r < rows; ++r) {
      if (a[r] < 0) continue;
      total += w[r][a[r]];
      used.push_back(a[r]);
    }
    std::sort(used.begin(), used.end());
    EXPECT_EQ(std::adjacent_find(used.begin(), used.end()), used.end());
    EXPECT_EQ(total, oracle::best_assignment_weight(w)) << trial;
  }
}

TEST(SpeakerCountMse, Examples) {
  EXPECT_EQ(speaker_count_mse(std::vector<int>{2, 3}, std::vector<int>{2, 3}), 0.0);
  EXPECT_EQ(speaker_count_mse(std::vector<int>{2, 3}, std::vector<int>{3, 3}), 0.5);
  EXPECT_EQ(speaker_count_mse(std::vector<int>{4}, std::vector<int>{2}), 4.0);
  EXPECT_THROW(speaker_count_mse(std::vector<int>{1}, std::vector<int>{1, 2}),
               std::invalid_argument);
}

TEST(ClipRecords, Intersects) {
  const std::vector<RttmRecord> r{rec(0, 5, "a")};
  const std::vector<TimeRegion> regions{{1, 2}, {4, 7}};
  const auto out = clip_records(r, regions);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].onset_seconds, 1.0);
  EXPECT_EQ(out[1].duration_seconds, 1.0);
}

}  // namespace
}  // namespace cdgcn
