// Copyright (c) 2026, The cdgcn Authors
// SPDX-License-Identifier: Apache-2.0

// Synthetic recordings with known speakers: Gaussian embeddings around
// orthonormal speaker centres laid out as alternating speaker turns.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cdgcn/embedding.h"
#include "cdgcn/graph_osd.h"
#include "cdgcn/pipeline.h"
#include "cdgcn/timeline.h"

namespace cdgcn {

struct SyntheticConfig {
  int speakers = 4;
  int segments_per_speaker = 50;
  int turns_per_speaker = 5;
  int dim = 32;
  double noise_norm = 0.25;  // expected norm of the per-segment noise vector
  // Cosine between the centres of speakers 0 and 1; other pairs are orthogonal.
  double pair_cosine = 0.0;
  // Share of speech time where speakers 0 and 1 talk at once, placed in the
  // middle of their turns.
  double overlap_fraction = 0.0;
  // Weight of the overlapping speaker's centre in a fully overlapped segment.
  double overlap_mix = 0.5;
  double gap_seconds = 0.5;
  SegmentationConfig segmentation;
  std::uint64_t seed = 0;
  std::string file_id = "synthetic";
};

struct SyntheticSession {
  EmbeddingSet embeddings;
  std::vector<int> segment_speaker;  // speaker owning the turn of each segment
  std::vector<TimeRegion> vad;       // one region per turn
  std::vector<RttmRecord> reference; // speakers named "ref<index>"
  std::vector<TimeRegion> overlap_regions;
  OverlapMask oracle_mask;
  int speaker_count = 0;
};

SyntheticSession make_synthetic_session(const SyntheticConfig &cfg);

}  // namespace cdgcn
