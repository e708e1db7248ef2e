// Copyright (c) 2026, The cdgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "cdgcn/leiden.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace cdgcn {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<int> shuffled_nodes(int n, std::uint64_t seed) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

// Sparse accumulator of edge weight from one node into neighbouring
// communities.
class CommunityWeights {
 public:
  explicit CommunityWeights(int capacity)
      : weight_(static_cast<std::size_t>(capacity), 0.0),
        seen_(static_cast<std::size_t>(capacity), 0) {}

  void add(int community, double w) {
    if (!seen_[community]) {
      seen_[community] = 1;
      touched_.push_back(community);
    }
    weight_[community] += w;
  }

  double operator[](int community) const { return weight_[community]; }

  // Touched communities in ascending label order.
  const std::vector<int> &sorted() {
    std::sort(touched_.begin(), touched_.end());
    return touched_;
  }

  void clear() {
    for (int c : touched_) {
      weight_[c] = 0.0;
      seen_[c] = 0;
    }
    touched_.clear();
  }

 private:
  std::vector<double> weight_;
  std::vector<char> seen_;
  std::vector<int> touched_;
};

void check_cover(const SpeakerGraph &graph, const Partition &p) {
  if (p.node_count() != graph.node_count) {
    throw std::invalid_argument("partition covers " + std::to_string(p.node_count()) +
                                " nodes, graph has " + std::to_string(graph.node_count));
  }
}

}  // namespace

Partition Partition::from_labels(const SpeakerGraph &graph, std::vector<int> labels) {
  if (labels.size() != static_cast<std::size_t>(graph.node_count)) {
    throw std::invalid_argument("label count " + std::to_string(labels.size()) +
                                " != node count " + std::to_string(graph.node_count));
  }
  std::unordered_map<int, int> compact;
  for (int &label : labels) {
    auto [it, inserted] = compact.try_emplace(label, static_cast<int>(compact.size()));
    label = it->second;
  }

  Partition p;
  p.assignment = std::move(labels);
  p.internal_weight.assign(compact.size(), 0.0);
  p.degree.assign(compact.size(), 0.0);
  p.edge_count = graph.edges.size();
  p.total_weight = graph.total_weight();
  const std::vector<double> k = graph.weighted_degrees();
  for (int v = 0; v < graph.node_count; ++v) {
    p.degree[p.assignment[v]] += k[v];
    p.internal_weight[p.assignment[v]] += graph.self_loop(v);
  }
  for (const Edge &e : graph.edges) {
    if (p.assignment[e.i] == p.assignment[e.j]) p.internal_weight[p.assignment[e.i]] += e.weight;
  }
  return p;
}

std::vector<std::vector<int>> Partition::communities() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(community_count()));
  for (int v = 0; v < node_count(); ++v) out[assignment[v]].push_back(v);
  return out;
}

double quality(const SpeakerGraph &graph, const Partition &p, double gamma) {
  check_cover(graph, p);
  int communities = 0;
  for (int v = 0; v < graph.node_count; ++v) {
    const int c = p.assignment[v];
    if (c < 0) {
      throw std::invalid_argument("node " + std::to_string(v) + " has negative community label");
    }
    communities = std::max(communities, c + 1);
  }
  const double m = graph.total_weight();
  if (m == 0.0) return 0.0;

  std::vector<double> internal(static_cast<std::size_t>(communities), 0.0);
  std::vector<double> degree(static_cast<std::size_t>(communities), 0.0);
  const std::vector<double> k = graph.weighted_degrees();
  for (int v = 0; v < graph.node_count; ++v) {
    degree[p.assignment[v]] += k[v];
    internal[p.assignment[v]] += graph.self_loop(v);
  }
  for (const Edge &e : graph.edges) {
    if (p.assignment[e.i] == p.assignment[e.j]) internal[p.assignment[e.i]] += e.weight;
  }
  double q = 0.0;
  for (int c = 0; c < communities; ++c) {
    q += internal[c] - gamma * degree[c] * degree[c] / (4.0 * m);
  }
  return q;
}

Partition singleton_partition(const SpeakerGraph &graph) {
  std::vector<int> labels(static_cast<std::size_t>(graph.node_count));
  std::iota(labels.begin(), labels.end(), 0);
  return Partition::from_labels(graph, std::move(labels));
}

Partition local_move(const SpeakerGraph &graph, const Partition &p, double gamma,
                     std::uint64_t seed) {
  check_cover(graph, p);
  const int n = graph.node_count;
  const double m = graph.total_weight();
  if (n == 0 || m == 0.0) return Partition::from_labels(graph, p.assignment);

  const Adjacency adj(graph);
  const std::vector<double> k = graph.weighted_degrees();
  std::vector<int> label = p.assignment;
  std::vector<double> community_degree(static_cast<std::size_t>(n), 0.0);
  std::vector<int> community_size(static_cast<std::size_t>(n), 0);
  for (int v = 0; v < n; ++v) {
    community_degree[label[v]] += k[v];
    ++community_size[label[v]];
  }
  std::set<int> empty;
  for (int c = 0; c < n; ++c) {
    if (community_size[c] == 0) empty.insert(c);
  }

  const std::vector<int> order = shuffled_nodes(n, seed);
  std::deque<int> queue(order.begin(), order.end());
  std::vector<char> queued(static_cast<std::size_t>(n), 1);
  CommunityWeights to(n);
  const double penalty = gamma / (2.0 * m);

  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    queued[v] = 0;

    const int from = label[v];
    const auto nbrs = adj.neighbors(v);
    const auto wts = adj.weights(v);
    for (std::size_t e = 0; e < nbrs.size(); ++e) to.add(label[nbrs[e]], wts[e]);

    community_degree[from] -= k[v];
    --community_size[from];
    auto gain = [&](int c) { return to[c] - penalty * community_degree[c] * k[v]; };
    const double stay = gain(from);

    int best = from;
    double best_gain = -std::numeric_limits<double>::infinity();
    for (int c : to.sorted()) {
      if (c == from) continue;
      const double g = gain(c);
      if (g > best_gain) {
        best_gain = g;
        best = c;
      }
    }
    // Moving into an empty community only differs from staying when the
    // node is not already alone.
    if (community_size[from] > 0 && !empty.empty() && 0.0 > best_gain) {
      best_gain = 0.0;
      best = *empty.begin();
    }

    if (best != from && best_gain - stay > kMinQualityGain) {
      label[v] = best;
      community_degree[best] += k[v];
      if (community_size[best]++ == 0) empty.erase(best);
      if (community_size[from] == 0) empty.insert(from);
      for (int u : nbrs) {
        if (label[u] != best && !queued[u]) {
          queued[u] = 1;
          queue.push_back(u);
        }
      }
    } else {
      community_degree[from] += k[v];
      ++community_size[from];
    }
    to.clear();
  }
  return Partition::from_labels(graph, std::move(label));
}

Partition refine_partition(const SpeakerGraph &graph, const Partition &p, double gamma,
                           std::uint64_t seed, double theta) {
  check_cover(graph, p);
  if (theta < 0.0) throw std::invalid_argument("theta must be >= 0");
  const int n = graph.node_count;
  std::vector<int> refined(static_cast<std::size_t>(n));
  std::iota(refined.begin(), refined.end(), 0);
  const double m = graph.total_weight();
  if (n == 0 || m == 0.0) return Partition::from_labels(graph, std::move(refined));

  const Adjacency adj(graph);
  const std::vector<double> k = graph.weighted_degrees();
  const double penalty = gamma / (2.0 * m);

  // Edge weight from each node into the rest of its own p-community.
  std::vector<double> inside(static_cast<std::size_t>(n), 0.0);
  for (const Edge &e : graph.edges) {
    if (p.assignment[e.i] == p.assignment[e.j]) {
      inside[e.i] += e.weight;
      inside[e.j] += e.weight;
    }
  }

  std::vector<double> sub_degree = k;
  std::vector<double> sub_external = inside;  // E(T, S - T) for refined T within S
  std::vector<int> sub_size(static_cast<std::size_t>(n), 1);

  std::mt19937_64 rng(seed);
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  CommunityWeights to(n);
  std::vector<int> candidates;
  std::vector<double> gains;
  for (const int v : order) {
    const int own = refined[v];
    if (sub_size[own] != 1) continue;
    const double parent_degree = p.degree[p.assignment[v]];
    if (inside[v] < penalty * k[v] * (parent_degree - k[v])) continue;

    const auto nbrs = adj.neighbors(v);
    const auto wts = adj.weights(v);
    for (std::size_t e = 0; e < nbrs.size(); ++e) {
      if (p.assignment[nbrs[e]] == p.assignment[v]) to.add(refined[nbrs[e]], wts[e]);
    }

    candidates.clear();
    gains.clear();
    for (int t : to.sorted()) {
      if (t == own) continue;
      if (sub_external[t] < penalty * sub_degree[t] * (parent_degree - sub_degree[t])) continue;
      candidates.push_back(t);
      gains.push_back(to[t] - penalty * sub_degree[t] * k[v]);
    }

    int target = own;
    if (theta == 0.0) {
      double best = kMinQualityGain;
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (gains[c] > best) {
          best = gains[c];
          target = candidates[c];
        }
      }
    } else {
      // Staying alone (gain 0) competes with every non-negative merge.
      std::vector<int> options{own};
      std::vector<double> logits{0.0};
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (gains[c] >= 0.0) {
          options.push_back(candidates[c]);
          logits.push_back(gains[c] / theta);
        }
      }
      const double top = *std::max_element(logits.begin(), logits.end());
      std::vector<double> weights;
      for (double l : logits) weights.push_back(std::exp(l - top));
      std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
      target = options[pick(rng)];
    }

    if (target != own) {
      const double link = to[target];
      refined[v] = target;
      sub_degree[target] += k[v];
      sub_external[target] += inside[v] - 2.0 * link;
      ++sub_size[target];
      sub_size[own] = 0;
    }
    to.clear();
  }
  return Partition::from_labels(graph, std::move(refined));
}

Aggregation aggregate_graph(const SpeakerGraph &graph, const Partition &refined) {
  check_cover(graph, refined);
  const int communities = refined.community_count();
  Aggregation agg;
  agg.community_to_node.resize(static_cast<std::size_t>(communities));
  std::iota(agg.community_to_node.begin(), agg.community_to_node.end(), 0);

  agg.graph.node_count = communities;
  agg.graph.self_loops.assign(static_cast<std::size_t>(communities), 0.0);
  for (int v = 0; v < graph.node_count; ++v) {
    agg.graph.self_loops[refined.assignment[v]] += graph.self_loop(v);
  }
  std::vector<Edge> cross;
  for (const Edge &e : graph.edges) {
    const int a = refined.assignment[e.i], b = refined.assignment[e.j];
    if (a == b) {
      agg.graph.self_loops[a] += e.weight;
    } else {
      cross.push_back({std::min(a, b), std::max(a, b), e.weight});
    }
  }
  std::sort(cross.begin(), cross.end(),
            [](const Edge &x, const Edge &y) { return x.i != y.i ? x.i < y.i : x.j < y.j; });
  for (const Edge &e : cross) {
    if (!agg.graph.edges.empty() && agg.graph.edges.back().i == e.i &&
        agg.graph.edges.back().j == e.j) {
      agg.graph.edges.back().weight += e.weight;
    } else {
      agg.graph.edges.push_back(e);
    }
  }
  return agg;
}

namespace {

Partition leiden_run(const SpeakerGraph &graph, const LeidenConfig &cfg, std::uint64_t seed) {
  Partition partition = singleton_partition(graph);

  // node_map[v]: node of the current aggregate graph holding original node v.
  std::vector<int> node_map(static_cast<std::size_t>(graph.node_count));
  std::iota(node_map.begin(), node_map.end(), 0);
  SpeakerGraph current = graph;
  double q = quality(current, partition, cfg.gamma);

  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    const std::uint64_t stream = static_cast<std::uint64_t>(iter);
    partition = local_move(current, partition, cfg.gamma, mix_seed(seed, 2 * stream));
    const double moved = quality(current, partition, cfg.gamma);
    if (moved - q < kMinQualityGain) break;
    q = moved;

    const Partition refined = refine_partition(current, partition, cfg.gamma,
                                               mix_seed(seed, 2 * stream + 1), cfg.theta);
    Aggregation agg = aggregate_graph(current, refined);

    std::vector<int> lifted(static_cast<std::size_t>(agg.graph.node_count));
    for (int v = 0; v < current.node_count; ++v) {
      lifted[agg.community_to_node[refined.assignment[v]]] = partition.assignment[v];
    }
    for (int &node : node_map) node = agg.community_to_node[refined.assignment[node]];
    current = std::move(agg.graph);
    partition = Partition::from_labels(current, std::move(lifted));
  }

  std::vector<int> labels(static_cast<std::size_t>(graph.node_count));
  for (int v = 0; v < graph.node_count; ++v) labels[v] = partition.assignment[node_map[v]];
  return Partition::from_labels(graph, std::move(labels));
}

}  // namespace

Partition leiden(const SpeakerGraph &graph, const LeidenConfig &cfg) {
  if (!(cfg.gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  if (cfg.theta < 0.0) throw std::invalid_argument("theta must be >= 0");
  if (cfg.restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  graph.validate();
  if (graph.node_count == 0 || !(graph.total_weight() > 0.0)) return singleton_partition(graph);

  Partition best = leiden_run(graph, cfg, cfg.seed);
  double best_q = quality(graph, best, cfg.gamma);
  for (int r = 1; r < cfg.restarts; ++r) {
    Partition p = leiden_run(graph, cfg, mix_seed(cfg.seed, 0x100000000ULL + r));
    const double q = quality(graph, p, cfg.gamma);
    if (q - best_q > kMinQualityGain) {
      best = std::move(p);
      best_q = q;
    }
  }
  return best;
}

}  // namespace cdgcn
