// Copyright (c) 2026, The cdgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "cdgcn/eval.h"
#include "cdgcn/pipeline.h"
#include "cdgcn/synthetic.h"
#include "support/fixtures.h"

namespace cdgcn {
namespace {

const GcnWeights &weights() {
  static const GcnWeights w = fixture::train_weights().weights;
  return w;
}

constexpr Mode kModes[] = {Mode::kRawLeiden, Mode::kKnnLeiden, Mode::kCdgcnNoOsd, Mode::kCdgcn};

SyntheticSession two_speakers() {
  SyntheticConfig cfg;
  cfg.speakers = 2;
  cfg.segments_per_speaker = 20;
  cfg.turns_per_speaker = 3;
  cfg.noise_norm = 0.2;
  cfg.seed = 77;
  return make_synthetic_session(cfg);
}

TEST(Modes, NamesRoundTrip) {
  for (Mode m : kModes) EXPECT_EQ(parse_mode(mode_name(m)), m);
  EXPECT_EQ(mode_name(Mode::kCdgcnNoOsd), "cdgcn_no_osd");
  EXPECT_THROW(parse_mode("ahc"), std::invalid_argument);
}

TEST(Pipeline, TwoSeparatedClustersInEveryMode) {
  const SyntheticSession s = two_speakers();
  const AffinityMatrix aff = cosine_affinity(s.embeddings);
  double min_intra = 1.0, max_inter = -1.0;
  for (int i = 0; i < aff.size(); ++i) {
    for (int j = i + 1; j < aff.size(); ++j) {
      if (s.segment_speaker[i] == s.segment_speaker[j]) {
        min_intra = std::min(min_intra, aff(i, j));
      } else {
        max_inter = std::max(max_inter, aff(i, j));
      }
    }
  }
  ASSERT_GT(min_intra, 0.9);
  ASSERT_LT(max_inter, 0.2);

  const OverlapMask mask{kFrameSeconds, std::vector<bool>(frames_for(s.vad, kFrameSeconds), false)};
  for (Mode m : kModes) {
    const PipelineResult r = run_pipeline(s.embeddings, m, &weights(), &mask, s.vad);
    EXPECT_EQ(r.speaker_count(), 2) << mode_name(m);
    EXPECT_EQ(der(s.reference, r.records).der_percent, 0.0) << mode_name(m);
  }
}

TEST(Pipeline, ZeroMaskMatchesNoOsdBytes) {
  const SyntheticSession s = two_speakers();
  const OverlapMask mask{kFrameSeconds, std::vector<bool>(frames_for(s.vad, kFrameSeconds), false)};
  const auto with = run_pipeline(s.embeddings, Mode::kCdgcn, &weights(), &mask, s.vad);
  const auto without = run_pipeline(s.embeddings, Mode::kCdgcnNoOsd, &weights(), nullptr, s.vad);
  EXPECT_EQ(write_rttm(with.records), write_rttm(without.records));
}

TEST(Pipeline, SingleSegment) {
  EmbeddingSet emb;
  emb.vectors = Eigen::MatrixXd::Ones(1, 32);
  emb.segments = {{1.0, 1.5}};
  for (Mode m : kModes) {
    const OverlapMask mask{kFrameSeconds, std::vector<bool>(300, true)};
    const PipelineResult r = run_pipeline(emb, m, &weights(), &mask, {});
    EXPECT_EQ(r.speaker_count(), 1);
    ASSERT_EQ(r.records.size(), 1u) << mode_name(m);
    EXPECT_EQ(r.records[0].onset_seconds, 1.0);
    EXPECT_EQ(r.records[0].duration_seconds, 1.5);
    EXPECT_EQ(r.records[0].speaker, "spk0");
  }
}

TEST(Pipeline, MissingInputsRejected) {
  const SyntheticSession s = two_speakers();
  EXPECT_THROW(run_pipeline(s.embeddings, Mode::kCdgcnNoOsd, nullptr, nullptr, s.vad),
               std::invalid_argument);
  EXPECT_THROW(run_pipeline(s.embeddings, Mode::kCdgcn, &weights(), nullptr, s.vad),
               std::invalid_argument);
  EXPECT_NO_THROW(run_pipeline(s.embeddings, Mode::kKnnLeiden, nullptr, nullptr, s.vad));
}

TEST(Pipeline, RecordsInsideVadAndDeterministic) {
  SyntheticConfig cfg;
  cfg.speakers = 3;
  cfg.segments_per_speaker = 15;
  cfg.overlap_fraction = 0.15;
  cfg.pair_cosine = 0.3;
  cfg.seed = 5;
  const SyntheticSession s = make_synthetic_session(cfg);
  for (Mode m : kModes) {
    const auto a = run_pipeline(s.embeddings, m, &weights(), &s.oracle_mask, s.vad);
    const auto b = run_pipeline(s.embeddings, m, &weights(), &s.oracle_mask, s.vad);
    EXPECT_EQ(write_rttm(a.records), write_rttm(b.records));
    for (const RttmRecord &r : a.records) {
      bool inside = false;
      for (const TimeRegion &g : s.vad) {
        inside |= r.onset_seconds >= g.start - 1e-9 && r.end_seconds() <= g.end + 1e-9;
      }
      EXPECT_TRUE(inside);
    }
  }
}

TEST(RefineGraph, ThreadCountDoesNotMatter) {
  const SyntheticSession s = two_speakers();
  const AffinityMatrix aff = cosine_affinity(s.embeddings);
  const SpeakerGraph one = refine_graph(aff, s.embeddings, weights(), 10, 1);
  EXPECT_EQ(refine_graph(aff, s.embeddings, weights(), 10, 4), one);
  for (const Edge &e : one.edges) {
    EXPECT_GE(e.weight, 0.0);
    EXPECT_LE(e.weight, 1.0);
  }
}

TEST(TrainingExamples, LabelsFollowSpeakers) {
  const SyntheticSession s = two_speakers();
  const auto ex = make_training_examples(s.embeddings, s.segment_speaker, 5);
  ASSERT_EQ(static_cast<int>(ex.size()), s.embeddings.size());
  for (const TrainingExample &e : ex) {
    ASSERT_EQ(e.labels.size(), 5u);
    for (int k = 0; k < 5; ++k) {
      EXPECT_EQ(e.labels[k], s.segment_speaker[e.sub.members[k + 1]] ==
                                 s.segment_speaker[e.sub.pivot]);
    }
  }
  EXPECT_THROW(make_training_examples(s.embeddings, std::vector<int>{0, 1}, 5),
               std::invalid_argument);
}

TEST(Synthetic, ReproducibleAndConsistent) {
  SyntheticConfig cfg;
  cfg.overlap_fraction = 0.2;
  cfg.pair_cosine = 0.4;
  const SyntheticSession a = make_synthetic_session(cfg);
  const SyntheticSession b = make_synthetic_session(cfg);
  EXPECT_EQ(a.embeddings.vectors, b.embeddings.vectors);
  EXPECT_EQ(a.reference, b.reference);
  EXPECT_EQ(a.embeddings.size(), 200);
  a.embeddings.validate();
  EXPECT_EQ(a.oracle_mask.frames.size(), frames_for(a.vad, kFrameSeconds));
  double overlapped = 0.0, speech = 0.0;
  for (const TimeRegion &r : a.overlap_regions) overlapped += r.end - r.start;
  for (const TimeRegion &r : a.vad) speech += r.end - r.start;
  EXPECT_NEAR(overlapped / speech, 0.2, 0.02);
}

}  // namespace
}  // namespace cdgcn
