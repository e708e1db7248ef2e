// Copyright (c) 2026, The cdgcn Authors
// SPDX-License-Identifier: Apache-2.0

// End-to-end clustering of one recording: affinity graph, optional GCN
// refinement, Leiden partition, optional overlap labelling and RTTM output.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cdgcn/embedding.h"
#include "cdgcn/gcn.h"
#include "cdgcn/graph.h"
#include "cdgcn/graph_osd.h"
#include "cdgcn/leiden.h"
#include "cdgcn/timeline.h"

namespace cdgcn {

struct SegmentationConfig {
  double window_seconds = 1.5;
  double shift_seconds = 0.75;

  void validate() const;
};

/// Sliding windows inside each VAD region. Windows start at
/// region.start + n * shift while they fit. If the part of the region after
/// the last full window is at least half a window, one short window from the
/// next start to the region end covers it. Regions shorter than half a
/// window yield a single segment spanning the region.
std::vector<Segment> segment_speech(std::span<const TimeRegion> vad,
                                    const SegmentationConfig &cfg = {});

enum class Mode {
  kRawLeiden,   // Leiden on the fully connected cosine graph
  kKnnLeiden,   // Leiden on the KNN graph
  kCdgcnNoOsd,  // Leiden on the GCN-refined graph
  kCdgcn,       // as above, plus overlap labelling
};

Mode parse_mode(std::string_view name);
std::string_view mode_name(Mode mode);

struct PipelineConfig {
  int knn_k = 300;
  LeidenConfig leiden;
  double frame_duration_seconds = kFrameSeconds;
  std::string file_id = "session";
  // Worker threads for sub-graph inference; 0 uses the hardware count.
  unsigned threads = 0;

  PipelineConfig() { leiden.gamma = 0.6; }
};

struct PipelineResult {
  SpeakerGraph graph;  // graph handed to Leiden
  Partition partition;
  std::vector<std::optional<int>> second;  // filled in cdgcn mode only
  std::vector<int> frame_segment;
  DiarizationTimeline timeline;
  std::vector<RttmRecord> records;

  int speaker_count() const { return partition.community_count(); }
};

/// Runs one recording. `vad` may be empty, in which case the union of the
/// segment spans is used. Throws std::invalid_argument when the selected
/// mode needs weights or a mask that is missing.
PipelineResult run_pipeline(const EmbeddingSet &emb, Mode mode, const GcnWeights *weights,
                            const OverlapMask *mask, std::span<const TimeRegion> vad,
                            const PipelineConfig &cfg = {});

/// The GCN-refined speaker graph: one sub-graph per pivot, linkage
/// prediction, max-merge.
SpeakerGraph refine_graph(const AffinityMatrix &aff, const EmbeddingSet &emb,
                          const GcnWeights &weights, int k, unsigned threads = 0);

/// One training example per pivot with labels 1 where the neighbour shares
/// the pivot's speaker.
std::vector<TrainingExample> make_training_examples(const EmbeddingSet &emb,
                                                    std::span<const int> speaker, int k);

}  // namespace cdgcn
