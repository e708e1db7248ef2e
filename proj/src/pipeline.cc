// Copyright (c) 2026, The cdgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "cdgcn/pipeline.h"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "parallel.h"

namespace cdgcn {

namespace {

constexpr double kSlack = 1e-9;

}  // namespace

void SegmentationConfig::validate() const {
  if (!(shift_seconds > 0.0) || shift_seconds > window_seconds) {
    throw std::invalid_argument("segmentation needs 0 < shift <= window");
  }
}

std::vector<Segment> segment_speech(std::span<const TimeRegion> vad,
                                    const SegmentationConfig &cfg) {
  cfg.validate();
  const double window = cfg.window_seconds;
  const double shift = cfg.shift_seconds;
  std::vector<Segment> segments;
  double previous_end = 0.0;
  for (std::size_t r = 0; r < vad.size(); ++r) {
    const TimeRegion &region = vad[r];
    if (region.start < 0.0 || !(region.end > region.start)) {
      throw std::invalid_argument("VAD region " + std::to_string(r) + " is inverted or empty");
    }
    if (region.start < previous_end) {
      throw std::invalid_argument("VAD region " + std::to_string(r) +
                                  " overlaps or precedes the previous one");
    }
    previous_end = region.end;

    const double length = region.end - region.start;
    if (length < 0.5 * window) {
      segments.push_back({region.start, length});
      continue;
    }
    int full = 0;
    while (region.start + full * shift + window <= region.end + kSlack) {
      segments.push_back({region.start + full * shift, window});
      ++full;
    }
    if (full == 0) {
      segments.push_back({region.start, length});
      continue;
    }
    const double covered = region.start + (full - 1) * shift + window;
    if (region.end - covered >= 0.5 * window - kSlack) {
      const double tail_start = region.start + full * shift;
      segments.push_back({tail_start, region.end - tail_start});
    }
  }
  return segments;
}

Mode parse_mode(std::string_view name) {
  if (name == "raw_leiden") return Mode::kRawLeiden;
  if (name == "knn_leiden") return Mode::kKnnLeiden;
  if (name == "cdgcn_no_osd") return Mode::kCdgcnNoOsd;
  if (name == "cdgcn") return Mode::kCdgcn;
  throw std::invalid_argument("unknown mode \"" + std::string(name) +
                              "\" (raw_leiden|knn_leiden|cdgcn_no_osd|cdgcn)");
}

std::string_view mode_name(Mode mode) {
  switch (mode) {
    case Mode::kRawLeiden: return "raw_leiden";
    case Mode::kKnnLeiden: return "knn_leiden";
    case Mode::kCdgcnNoOsd: return "cdgcn_no_osd";
    case Mode::kCdgcn: return "cdgcn";
  }
  return "unknown";
}

SpeakerGraph refine_graph(const AffinityMatrix &aff, const EmbeddingSet &emb,
                          const GcnWeights &weights, int k, unsigned threads) {
  weights.validate();
  std::vector<RefinedSubGraph> refined(static_cast<std::size_t>(emb.size()));
  detail::parallel_for(refined.size(), threads, [&](std::size_t pivot) {
    const SubGraph sub = build_subgraph(aff, emb, static_cast<int>(pivot), k);
    const std::vector<float> prob = gcn_forward<float>(sub, weights);
    RefinedSubGraph &out = refined[pivot];
    out.pivot = sub.pivot;
    out.neighbors.assign(sub.members.begin() + 1, sub.members.end());
    out.probabilities.reserve(prob.size());
    for (float p : prob) out.probabilities.push_back(std::clamp(static_cast<double>(p), 0.0, 1.0));
  });
  return merge_subgraphs(emb.size(), refined);
}

std::vector<TrainingExample> make_training_examples(const EmbeddingSet &emb,
                                                    std::span<const int> speaker, int k) {
  emb.validate();
  if (speaker.size() != static_cast<std::size_t>(emb.size())) {
    throw std::invalid_argument("need one speaker label per segment");
  }
  const AffinityMatrix aff = cosine_affinity(emb);
  std::vector<TrainingExample> examples;
  examples.reserve(static_cast<std::size_t>(emb.size()));
  for (int pivot = 0; pivot < emb.size(); ++pivot) {
    TrainingExample ex;
    ex.sub = build_subgraph(aff, emb, pivot, k);
    for (std::size_t m = 1; m < ex.sub.members.size(); ++m) {
      ex.labels.push_back(speaker[ex.sub.members[m]] == speaker[pivot] ? 1 : 0);
    }
    examples.push_back(std::move(ex));
  }
  return examples;
}

PipelineResult run_pipeline(const EmbeddingSet &emb, Mode mode, const GcnWeights *weights,
                            const OverlapMask *mask, std::span<const TimeRegion> vad,
                            const PipelineConfig &cfg) {
  emb.validate();
  if (emb.size() == 0) throw std::invalid_argument("recording has no segments");
  const bool uses_gcn = mode == Mode::kCdgcnNoOsd || mode == Mode::kCdgcn;
  if (uses_gcn && weights == nullptr) {
    throw std::invalid_argument(std::string("mode ") + std::string(mode_name(mode)) +
                                " needs GCN weights");
  }
  if (mode == Mode::kCdgcn && mask == nullptr) {
    throw std::invalid_argument("mode cdgcn needs an overlap mask");
  }
  if (cfg.knn_k < 1) throw std::invalid_argument("knn k must be >= 1");

  PipelineResult result;
  const AffinityMatrix aff = cosine_affinity(emb);
  switch (mode) {
    case Mode::kRawLeiden: result.graph = raw_graph(aff); break;
    case Mode::kKnnLeiden: result.graph = knn_graph(aff, cfg.knn_k); break;
    case Mode::kCdgcnNoOsd:
    case Mode::kCdgcn:
      result.graph = refine_graph(aff, emb, *weights, cfg.knn_k, cfg.threads);
      break;
  }
  result.partition = leiden(result.graph, cfg.leiden);

  const std::vector<TimeRegion> regions =
      vad.empty() ? regions_from_segments(emb.segments)
                  : std::vector<TimeRegion>(vad.begin(), vad.end());
  const double dt = cfg.frame_duration_seconds;
  result.frame_segment = attribute_frames(emb.segments, regions, dt, frames_for(regions, dt));
  result.timeline = primary_timeline(result.frame_segment, result.partition.assignment, dt);

  if (mode == Mode::kCdgcn) {
    const BelongingMatrix b = belonging_coefficients(result.graph, result.partition);
    result.second = second_community(b, result.partition.assignment);
    result.timeline = apply_overlap(result.timeline, result.second, result.frame_segment, *mask);
  }
  result.records = timeline_to_rttm(result.timeline, regions, cfg.file_id);
  return result;
}

}  // namespace cdgcn
