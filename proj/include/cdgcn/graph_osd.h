// Copyright (c) 2026, The cdgcn Authors
// SPDX-License-Identifier: Apache-2.0

// Overlap-aware labelling. Every node gets a belonging coefficient per
// community (its summed refined edge weight into that community); the
// strongest community other than its own is its second speaker, emitted only
// in frames an overlap detector marks as overlapped speech.

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cdgcn/graph.h"
#include "cdgcn/leiden.h"
#include "cdgcn/timeline.h"

namespace cdgcn {

/// b(c, i): C x N.
struct BelongingMatrix {
  Eigen::MatrixXd coefficients;

  int community_count() const { return static_cast<int>(coefficients.rows()); }
  int node_count() const { return static_cast<int>(coefficients.cols()); }
  double operator()(int community, int node) const { return coefficients(community, node); }
};

/// Frame-level overlapped-speech flags.
struct OverlapMask {
  double frame_duration_seconds = kFrameSeconds;
  std::vector<bool> frames;

  /// Whether the mask frame holding time `t` is overlapped. Throws
  /// std::out_of_range past the end of the mask.
  bool overlapped_at(double t) const;
  double duration_seconds() const {
    return static_cast<double>(frames.size()) * frame_duration_seconds;
  }
};

BelongingMatrix belonging_coefficients(const SpeakerGraph &graph, const Partition &p);

/// Per node, the community with the largest coefficient excluding its
/// primary one. None when there is no other community or the best
/// coefficient is not positive. Ties go to the smaller label.
std::vector<std::optional<int>> second_community(const BelongingMatrix &b,
                                                 std::span<const int> primary);

/// Adds the second label of the attributed segment to every speech frame
/// flagged by `mask`. `frame_segment` maps timeline frames to nodes (-1 for
/// non-speech).
DiarizationTimeline apply_overlap(const DiarizationTimeline &primary,
                                  std::span<const std::optional<int>> second,
                                  std::span<const int> frame_segment, const OverlapMask &mask);

// Mask text: "frame_duration=<seconds>" then one '0'/'1' per frame;
// whitespace between flags is ignored.
OverlapMask parse_overlap_mask(std::string_view text);
std::string format_overlap_mask(const OverlapMask &mask);
OverlapMask read_overlap_mask(const std::filesystem::path &path);

}  // namespace cdgcn
