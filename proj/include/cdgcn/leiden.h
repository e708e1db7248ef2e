// Copyright (c) 2026, The cdgcn Authors
// SPDX-License-Identifier: Apache-2.0

// Leiden community detection maximizing
//
//   Q = sum_c ( m_c - gamma * K_c^2 / (4 m) )
//
// where m_c is the internal edge weight of community c, K_c the summed
// weighted degree of its nodes and m the total edge weight of the graph.

#pragma once

#include <cstdint>
#include <vector>

#include "cdgcn/graph.h"

namespace cdgcn {

/// Node -> community assignment with cached per-community terms of Q.
/// Labels are contiguous 0..C-1 and no community is empty.
struct Partition {
  std::vector<int> assignment;
  std::vector<double> internal_weight;  // m_c, self-loops included
  std::vector<double> degree;           // K_c
  std::size_t edge_count = 0;
  double total_weight = 0.0;

  int node_count() const { return static_cast<int>(assignment.size()); }
  int community_count() const { return static_cast<int>(degree.size()); }

  /// Relabels `labels` to contiguous ids in order of first appearance and
  /// computes the cached terms from `graph`.
  static Partition from_labels(const SpeakerGraph &graph, std::vector<int> labels);

  /// Members of every community, ordered by node id.
  std::vector<std::vector<int>> communities() const;
};

struct LeidenConfig {
  double gamma = 0.6;
  std::uint64_t seed = 0;
  int max_iterations = 100;
  // Refinement temperature. 0 merges greedily; > 0 samples merges with
  // probability proportional to exp(dQ / theta).
  double theta = 0.0;
  // Independent runs from differently seeded node orders; the partition with
  // the highest Q is kept. Run 0 uses `seed` itself.
  int restarts = 16;
};

inline constexpr double kMinQualityGain = 1e-12;

/// Exact Q from scratch. An edgeless graph (m = 0) has Q = 0. Throws
/// std::invalid_argument when the partition does not cover the graph.
double quality(const SpeakerGraph &graph, const Partition &p, double gamma);

Partition singleton_partition(const SpeakerGraph &graph);

/// Queue-driven greedy node moves. Never decreases Q.
Partition local_move(const SpeakerGraph &graph, const Partition &p, double gamma,
                     std::uint64_t seed);

/// Splits each community of `p` into well-connected sub-communities by
/// merging singletons only within their own community.
Partition refine_partition(const SpeakerGraph &graph, const Partition &p, double gamma,
                           std::uint64_t seed, double theta = 0.0);

struct Aggregation {
  SpeakerGraph graph;                   // one node per refined community
  std::vector<int> community_to_node;   // refined community -> aggregate node
};

/// Collapses each community of `refined` into one node. Internal weight
/// becomes a self-loop so weighted degrees and Q are preserved.
Aggregation aggregate_graph(const SpeakerGraph &graph, const Partition &refined);

Partition leiden(const SpeakerGraph &graph, const LeidenConfig &cfg = {});

}  // namespace cdgcn
