// Copyright (c) 2026, The cdgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "cdgcn/graph.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cdgcn {

namespace {

bool edge_order(const Edge &a, const Edge &b) {
  return a.i != b.i ? a.i < b.i : a.j < b.j;
}

}  // namespace

SpeakerGraph SpeakerGraph::from_edges(int node_count, std::vector<Edge> edges) {
  for (Edge &e : edges) {
    if (e.i > e.j) std::swap(e.i, e.j);
  }
  std::sort(edges.begin(), edges.end(), edge_order);
  SpeakerGraph g;
  g.node_count = node_count;
  g.edges = std::move(edges);
  g.validate();
  return g;
}

double SpeakerGraph::total_weight() const {
  double total = 0.0;
  for (const Edge &e : edges) total += e.weight;
  for (double s : self_loops) total += s;
  return total;
}

std::vector<double> SpeakerGraph::weighted_degrees() const {
  std::vector<double> k(static_cast<std::size_t>(node_count), 0.0);
  for (const Edge &e : edges) {
    k[e.i] += e.weight;
    k[e.j] += e.weight;
  }
  for (std::size_t v = 0; v < self_loops.size(); ++v) k[v] += 2.0 * self_loops[v];
  return k;
}

void SpeakerGraph::validate() const {
  if (node_count < 0) throw std::invalid_argument("negative node count");
  if (!self_loops.empty() && self_loops.size() != static_cast<std::size_t>(node_count)) {
    throw std::invalid_argument("self_loops must be empty or have one entry per node");
  }
  for (std::size_t n = 0; n < edges.size(); ++n) {
    const Edge &e = edges[n];
    if (e.i < 0 || e.j >= node_count || e.i >= e.j) {
      throw std::invalid_argument("edge (" + std::to_string(e.i) + "," + std::to_string(e.j) +
                                  ") is a self-loop, unoriented or out of range");
    }
    if (!std::isfinite(e.weight)) {
      throw std::invalid_argument("edge (" + std::to_string(e.i) + "," + std::to_string(e.j) +
                                  ") has non-finite weight");
    }
    if (n > 0 && !edge_order(edges[n - 1], e)) {
      throw std::invalid_argument("duplicate or unsorted edge (" + std::to_string(e.i) + "," +
                                  std::to_string(e.j) + ")");
    }
  }
}

Adjacency::Adjacency(const SpeakerGraph &graph)
    : offsets_(static_cast<std::size_t>(graph.node_count) + 1, 0) {
  for (const Edge &e : graph.edges) {
    ++offsets_[e.i + 1];
    ++offsets_[e.j + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  targets_.resize(offsets_.back());
  weights_.resize(offsets_.back());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const Edge &e : graph.edges) {
    targets_[cursor[e.i]] = e.j;
    weights_[cursor[e.i]++] = e.weight;
    targets_[cursor[e.j]] = e.i;
    weights_[cursor[e.j]++] = e.weight;
  }
}

AffinityMatrix cosine_affinity(const EmbeddingSet &emb) {
  const int n = emb.size();
  if (static_cast<std::size_t>(n) != emb.segments.size()) {
    throw std::invalid_argument("embedding rows and segments differ in length");
  }
  Eigen::MatrixXd unit = emb.vectors;
  for (int i = 0; i < n; ++i) {
    const double norm = unit.row(i).norm();
    if (!(norm > 0.0)) {
      throw std::invalid_argument("segment " + std::to_string(i) + ": embedding has zero norm");
    }
    unit.row(i) /= norm;
  }
  const Eigen::MatrixXd gram = unit * unit.transpose();

  AffinityMatrix aff;
  aff.scores.resize(n, n);
  for (int i = 0; i < n; ++i) {
    aff.scores(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      const double s = std::clamp(gram(i, j), -1.0, 1.0);
      aff.scores(i, j) = s;
      aff.scores(j, i) = s;
    }
  }
  return aff;
}

std::vector<int> top_neighbors(const AffinityMatrix &aff, int node, int k) {
  const int n = aff.size();
  if (node < 0 || node >= n) {
    throw std::out_of_range("node " + std::to_string(node) + " out of range [0," +
                            std::to_string(n) + ")");
  }
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  const int take = std::min(k, n - 1);

  std::vector<int> others;
  others.reserve(static_cast<std::size_t>(n) - 1);
  for (int j = 0; j < n; ++j) {
    if (j != node) others.push_back(j);
  }
  auto closer = [&](int a, int b) {
    const double sa = aff(node, a), sb = aff(node, b);
    return sa != sb ? sa > sb : a < b;
  };
  std::partial_sort(others.begin(), others.begin() + take, others.end(), closer);
  others.resize(static_cast<std::size_t>(take));
  return others;
}

SpeakerGraph knn_graph(const AffinityMatrix &aff, int k) {
  const int n = aff.size();
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j : top_neighbors(aff, i, k)) {
      edges.push_back({std::min(i, j), std::max(i, j), aff(i, j)});
    }
  }
  std::sort(edges.begin(), edges.end(), edge_order);
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](const Edge &a, const Edge &b) { return a.i == b.i && a.j == b.j; }),
              edges.end());
  SpeakerGraph g;
  g.node_count = n;
  g.edges = std::move(edges);
  return g;
}

SpeakerGraph raw_graph(const AffinityMatrix &aff) {
  SpeakerGraph g;
  g.node_count = aff.size();
  for (int i = 0; i < g.node_count; ++i) {
    for (int j = i + 1; j < g.node_count; ++j) g.edges.push_back({i, j, aff(i, j)});
  }
  return g;
}

SubGraph build_subgraph(const AffinityMatrix &aff, const EmbeddingSet &emb, int pivot, int k) {
  if (aff.size() != emb.size()) {
    throw std::invalid_argument("affinity and embeddings disagree on node count");
  }
  SubGraph sub;
  sub.pivot = pivot;
  sub.members.push_back(pivot);
  const std::vector<int> nn = top_neighbors(aff, pivot, k);
  sub.members.insert(sub.members.end(), nn.begin(), nn.end());

  const int m = static_cast<int>(sub.members.size());
  sub.features.resize(m, emb.dim());
  for (int a = 0; a < m; ++a) {
    sub.features.row(a) = emb.vectors.row(sub.members[a]) - emb.vectors.row(pivot);
  }
  sub.adjacency = Eigen::MatrixXd::Zero(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      const double w = std::max(aff(sub.members[a], sub.members[b]), 0.0);
      sub.adjacency(a, b) = w;
      sub.adjacency(b, a) = w;
    }
  }
  return sub;
}

SpeakerGraph merge_subgraphs(int node_count, std::span<const RefinedSubGraph> refined) {
  std::vector<Edge> edges;
  for (const RefinedSubGraph &r : refined) {
    if (r.neighbors.size() != r.probabilities.size()) {
      throw std::invalid_argument("pivot " + std::to_string(r.pivot) +
                                  ": neighbor and probability counts differ");
    }
    for (std::size_t n = 0; n < r.neighbors.size(); ++n) {
      const double p = r.probabilities[n];
      if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("pivot " + std::to_string(r.pivot) + ": probability " +
                                    std::to_string(p) + " outside [0,1]");
      }
      const int a = r.pivot, b = r.neighbors[n];
      if (a < 0 || b < 0 || a >= node_count || b >= node_count) {
        throw std::out_of_range("pivot " + std::to_string(a) + ": node id out of range");
      }
      if (a == b) continue;
      edges.push_back({std::min(a, b), std::max(a, b), p});
    }
  }
  std::sort(edges.begin(), edges.end(), edge_order);
  std::vector<Edge> merged;
  for (const Edge &e : edges) {
    if (!merged.empty() && merged.back().i == e.i && merged.back().j == e.j) {
      merged.back().weight = std::max(merged.back().weight, e.weight);
    } else {
      merged.push_back(e);
    }
  }
  SpeakerGraph g;
  g.node_count = node_count;
  g.edges = std::move(merged);
  return g;
}

}  // namespace cdgcn
