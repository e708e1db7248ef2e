// Copyright (c) 2026, The cdgcn Authors
// SPDX-License-Identifier: Apache-2.0

// Speaker graph construction: cosine affinity, KNN sparsification, pivot
// sub-graphs for the linkage predictor and max-merge of refined sub-graphs.

#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cdgcn/embedding.h"

namespace cdgcn {

/// Dense N x N cosine similarity. Symmetric with unit diagonal.
struct AffinityMatrix {
  Eigen::MatrixXd scores;

  int size() const { return static_cast<int>(scores.rows()); }
  double operator()(int i, int j) const { return scores(i, j); }
};

struct Edge {
  int i = 0;
  int j = 0;
  double weight = 0.0;

  bool operator==(const Edge &) const = default;
};

/// Weighted undirected graph. `edges` holds each unordered pair at most once
/// with i < j, sorted by (i, j). Self-loop weight is stored per node in
/// `self_loops` (empty means all zero) and only appears on graphs produced
/// by community aggregation.
struct SpeakerGraph {
  int node_count = 0;
  std::vector<Edge> edges;
  std::vector<double> self_loops;

  /// Orients every edge to i < j and sorts. Rejects self-loops, duplicate
  /// pairs and out-of-range ids.
  static SpeakerGraph from_edges(int node_count, std::vector<Edge> edges);

  double self_loop(int v) const {
    return self_loops.empty() ? 0.0 : self_loops[static_cast<std::size_t>(v)];
  }

  /// Sum of edge weights plus self-loop weights.
  double total_weight() const;

  /// k_i: incident edge weights, self-loops counted twice.
  std::vector<double> weighted_degrees() const;

  void validate() const;

  bool operator==(const SpeakerGraph &) const = default;
};

/// Compressed neighbour lists for a SpeakerGraph (self-loops excluded).
class Adjacency {
 public:
  explicit Adjacency(const SpeakerGraph &graph);

  int node_count() const { return static_cast<int>(offsets_.size()) - 1; }

  std::span<const int> neighbors(int v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }
  std::span<const double> weights(int v) const {
    return {weights_.data() + offsets_[v], weights_.data() + offsets_[v + 1]};
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<int> targets_;
  std::vector<double> weights_;
};

/// Pivot-centred neighbourhood fed to the linkage predictor.
struct SubGraph {
  int pivot = 0;
  std::vector<int> members;   // pivot first, then neighbours by affinity
  Eigen::MatrixXd features;   // member embeddings minus the pivot embedding
  Eigen::MatrixXd adjacency;  // max(affinity, 0) between members, zero diagonal

  int neighbor_count() const { return static_cast<int>(members.size()) - 1; }
};

/// Linkage probabilities predicted for one pivot sub-graph.
struct RefinedSubGraph {
  int pivot = 0;
  std::vector<int> neighbors;
  std::vector<double> probabilities;
};

AffinityMatrix cosine_affinity(const EmbeddingSet &emb);

/// Indices of the top-min(k, N-1) nodes by affinity to `node`, excluding
/// itself. Ties go to the lower node id.
std::vector<int> top_neighbors(const AffinityMatrix &aff, int node, int k);

/// Union-symmetrized KNN graph keeping the signed affinity as weight.
/// k is clamped to N-1.
SpeakerGraph knn_graph(const AffinityMatrix &aff, int k);

/// The fully connected raw graph (every pair, signed weights).
SpeakerGraph raw_graph(const AffinityMatrix &aff);

SubGraph build_subgraph(const AffinityMatrix &aff, const EmbeddingSet &emb, int pivot, int k);

/// Undirected graph keeping, per unordered pair, the largest probability
/// seen across all refined sub-graphs.
SpeakerGraph merge_subgraphs(int node_count, std::span<const RefinedSubGraph> refined);

}  // namespace cdgcn
