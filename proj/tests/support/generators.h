// Copyright (c) 2026, The cdgcn Authors
// SPDX-License-Identifier: Apache-2.0

// Seeded random inputs for property tests.

#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "cdgcn/embedding.h"
#include "cdgcn/gcn.h"
#include "cdgcn/graph.h"

namespace cdgcn::gen {

using Rng = std::mt19937_64;

inline double uniform(Rng &rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng &rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Each pair is an edge with probability `density`, weight in [lo, hi].
inline SpeakerGraph graph(Rng &rng, int n, double density, double lo = 0.1, double hi = 1.0) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (uniform(rng, 0.0, 1.0) < density) edges.push_back({i, j, uniform(rng, lo, hi)});
    }
  }
  return SpeakerGraph::from_edges(n, std::move(edges));
}

// Random graph with a spanning path so it is connected.
inline SpeakerGraph connected_graph(Rng &rng, int n, double density, double lo = 0.1,
                                    double hi = 1.0) {
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<char>> used(n, std::vector<char>(n, 0));
  std::vector<Edge> edges;
  for (int t = 0; t + 1 < n; ++t) {
    const int a = std::min(order[t], order[t + 1]), b = std::max(order[t], order[t + 1]);
    used[a][b] = 1;
    edges.push_back({a, b, uniform(rng, lo, hi)});
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!used[i][j] && uniform(rng, 0.0, 1.0) < density) {
        edges.push_back({i, j, uniform(rng, lo, hi)});
      }
    }
  }
  return SpeakerGraph::from_edges(n, std::move(edges));
}

// Cliques of the given sizes with unit weights, consecutive cliques joined
// by one unit bridge.
inline SpeakerGraph cliques(const std::vector<int> &sizes) {
  std::vector<Edge> edges;
  int base = 0;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    for (int i = 0; i < sizes[c]; ++i) {
      for (int j = i + 1; j < sizes[c]; ++j) edges.push_back({base + i, base + j, 1.0});
    }
    if (c + 1 < sizes.size()) edges.push_back({base + sizes[c] - 1, base + sizes[c], 1.0});
    base += sizes[c];
  }
  return SpeakerGraph::from_edges(base, std::move(edges));
}

inline std::vector<int> labels(Rng &rng, int n, int communities) {
  std::vector<int> out(static_cast<std::size_t>(n));
  for (int &l : out) l = uniform_int(rng, 0, communities - 1);
  return out;
}

inline EmbeddingSet embeddings(Rng &rng, int n, int d) {
  std::normal_distribution<double> normal;
  EmbeddingSet emb;
  emb.vectors.resize(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) emb.vectors(i, j) = normal(rng);
    emb.segments.push_back({0.75 * i, 1.5});
  }
  return emb;
}

inline Eigen::MatrixXd symmetric_nonnegative(Rng &rng, int n, double zero_fraction = 0.3) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (uniform(rng, 0.0, 1.0) >= zero_fraction) a(i, j) = a(j, i) = uniform(rng, 0.0, 1.0);
    }
  }
  return a;
}

// A pivot sub-graph over random embeddings.
inline SubGraph subgraph(Rng &rng, int k, int d) {
  const EmbeddingSet emb = embeddings(rng, k + 1, d);
  return build_subgraph(cosine_affinity(emb), emb, 0, k);
}

inline GcnParams<double> params(Rng &rng, int input_dim, int hidden, int layers,
                                double scale = 0.5) {
  GcnParams<double> p;
  auto fill = [&](Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = uniform(rng, -scale, scale);
    return m;
  };
  int width = input_dim;
  for (int l = 0; l < layers; ++l) {
    p.layers.push_back(fill(2 * width, hidden));
    width = hidden;
  }
  p.hidden = fill(width, width);
  p.hidden_bias = fill(width, 1);
  p.output = fill(width, 2);
  p.output_bias = fill(2, 1);
  return p;
}

}  // namespace cdgcn::gen
