// Copyright (c) 2026, The cdgcn Authors
// SPDX-License-Identifier: Apache-2.0

// Slow, direct reference implementations used to check the library.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cdgcn/gcn.h"
#include "cdgcn/graph.h"
#include "cdgcn/timeline.h"

namespace cdgcn::oracle {

// Dense symmetric weights with self-loops on the diagonal.
inline Eigen::MatrixXd dense(const SpeakerGraph &g) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(g.node_count, g.node_count);
  for (const Edge &e : g.edges) {
    w(e.i, e.j) += e.weight;
    w(e.j, e.i) += e.weight;
  }
  for (int v = 0; v < g.node_count; ++v) w(v, v) = g.self_loop(v);
  return w;
}

inline double quality(const SpeakerGraph &g, const std::vector<int> &labels, double gamma) {
  const Eigen::MatrixXd w = dense(g);
  const int n = g.node_count;
  double m = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) m += w(i, j);
  }
  if (m == 0.0) return 0.0;
  std::map<int, double> internal, degree;
  for (int i = 0; i < n; ++i) {
    double k = 0.0;
    for (int j = 0; j < n; ++j) k += (i == j ? 2.0 : 1.0) * w(i, j);
    degree[labels[i]] += k;
    for (int j = i; j < n; ++j) {
      if (labels[i] == labels[j]) internal[labels[i]] += w(i, j);
    }
  }
  double q = 0.0;
  for (const auto &[c, kc] : degree) q += internal[c] - gamma * kc * kc / (4.0 * m);
  return q;
}

// Calls fn on every set partition of {0..n-1} as a restricted growth string.
inline void for_each_partition(int n, const std::function<void(const std::vector<int> &)> &fn) {
  std::vector<int> a(static_cast<std::size_t>(n), 0);
  std::vector<int> hi(static_cast<std::size_t>(n), 0);  // max of a[0..i-1]
  if (n == 0) {
    fn(a);
    return;
  }
  while (true) {
    fn(a);
    int i = n - 1;
    while (i > 0 && a[i] == hi[i] + 1) --i;
    if (i == 0) return;
    ++a[i];
    for (int j = i + 1; j < n; ++j) {
      a[j] = 0;
      hi[j] = std::max(hi[j - 1], a[j - 1]);
    }
  }
}

struct BestPartition {
  double quality = -std::numeric_limits<double>::infinity();
  std::vector<int> labels;
};

inline BestPartition best_partition(const SpeakerGraph &g, double gamma) {
  BestPartition best;
  for_each_partition(g.node_count, [&](const std::vector<int> &labels) {
    const double q = quality(g, labels, gamma);
    if (q > best.quality) best = {q, labels};
  });
  return best;
}

inline std::vector<int> top_k(const Eigen::MatrixXd &aff, int node, int k) {
  std::vector<int> ids;
  for (int j = 0; j < aff.rows(); ++j) {
    if (j != node) ids.push_back(j);
  }
  std::stable_sort(ids.begin(), ids.end(),
                   [&](int a, int b) { return aff(node, a) > aff(node, b); });
  ids.resize(std::min<std::size_t>(ids.size(), static_cast<std::size_t>(std::max(k, 0))));
  return ids;
}

// D^-1/2 (A + I) D^-1/2 written as a literal matrix product.
inline Eigen::MatrixXd normalized_adjacency(const Eigen::MatrixXd &a) {
  const Eigen::MatrixXd at = a + Eigen::MatrixXd::Identity(a.rows(), a.cols());
  Eigen::MatrixXd d_inv_sqrt = Eigen::MatrixXd::Zero(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i) d_inv_sqrt(i, i) = 1.0 / std::sqrt(at.row(i).sum());
  return d_inv_sqrt * at * d_inv_sqrt;
}

// Every tensor of the parameter set, flattened in a fixed order.
inline std::vector<double *> parameter_slots(GcnParams<double> &p) {
  std::vector<double *> out;
  auto add = [&](auto &m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) out.push_back(m.data() + i);
  };
  for (auto &w : p.layers) add(w);
  add(p.hidden);
  add(p.hidden_bias);
  add(p.output);
  add(p.output_bias);
  return out;
}

// Central differences of `loss` with respect to every parameter.
inline GcnParams<double> numeric_gradient(const std::function<double(const GcnParams<double> &)> &loss,
                                          const GcnParams<double> &at, double h = 1e-6) {
  GcnParams<double> probe = at;
  GcnParams<double> grad = at.zeros_like();
  std::vector<double *> x = parameter_slots(probe);
  std::vector<double *> g = parameter_slots(grad);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = *x[i];
    *x[i] = saved + h;
    const double up = loss(probe);
    *x[i] = saved - h;
    const double down = loss(probe);
    *x[i] = saved;
    *g[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

inline double relative_error(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

// Maximum total weight over all injective row -> column maps.
inline std::int64_t best_assignment_weight(const std::vector<std::vector<std::int64_t>> &w) {
  const std::size_t rows = w.size();
  const std::size_t cols = rows == 0 ? 0 : w[0].size();
  const std::size_t n = std::max(rows, cols);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::int64_t best = 0;
  do {
    std::int64_t total = 0;
    for (std::size_t r = 0; r < rows; ++r) {
      if (perm[r] < cols) total += w[r][perm[r]];
    }
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline Eigen::MatrixXd belonging(const SpeakerGraph &g, const std::vector<int> &labels,
                                 int communities) {
  const Eigen::MatrixXd w = dense(g);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(communities, g.node_count);
  for (int i = 0; i < g.node_count; ++i) {
    for (int j = 0; j < g.node_count; ++j) {
      b(labels[j], i) += (i == j ? 2.0 : 1.0) * w(i, j);
    }
  }
  return b;
}

inline std::optional<int> second_label(const Eigen::MatrixXd &b, int node, int primary) {
  std::optional<int> best;
  for (int c = 0; c < b.rows(); ++c) {
    if (c == primary || b(c, node) <= 0.0) continue;
    if (!best || b(c, node) > b(*best, node)) best = c;
  }
  return best;
}

struct FrameDer {
  std::int64_t miss = 0, fa = 0, err = 0, total = 0;
  double percent() const {
    const std::int64_t e = miss + fa + err;
    if (total == 0) return e == 0 ? 0.0 : std::numeric_limits<double>::infinity();
    return 100.0 * static_cast<double>(e) / static_cast<double>(total);
  }
};

// Frame-by-frame DER on a 1 ms grid with a brute-force speaker mapping.
// Record times must be whole milliseconds.
inline FrameDer der(const std::vector<RttmRecord> &ref, const std::vector<RttmRecord> &hyp,
                    int collar_ms) {
  auto ms = [](double s) { return static_cast<std::int64_t>(std::llround(s * 1000.0)); };
  std::map<std::string, int> ref_id, hyp_id;
  for (const auto &r : ref) ref_id.try_emplace(r.speaker, static_cast<int>(ref_id.size()));
  for (const auto &r : hyp) hyp_id.try_emplace(r.speaker, static_cast<int>(hyp_id.size()));
  std::int64_t horizon = 0;
  for (const auto *v : {&ref, &hyp}) {
    for (const auto &r : *v) horizon = std::max(horizon, ms(r.end_seconds()) + collar_ms + 1);
  }
  const std::size_t nr = ref_id.size(), nh = hyp_id.size();
  std::vector<std::vector<char>> ra(static_cast<std::size_t>(horizon), std::vector<char>(nr, 0));
  std::vector<std::vector<char>> ha(static_cast<std::size_t>(horizon), std::vector<char>(nh, 0));
  std::vector<char> skip(static_cast<std::size_t>(horizon), 0);
  for (const auto &r : ref) {
    for (std::int64_t t = ms(r.onset_seconds); t < ms(r.end_seconds()); ++t) {
      ra[t][ref_id[r.speaker]] = 1;
    }
    for (std::int64_t b : {ms(r.onset_seconds), ms(r.end_seconds())}) {
      for (std::int64_t t = std::max<std::int64_t>(0, b - collar_ms); t < b + collar_ms; ++t) {
        skip[t] = 1;
      }
    }
  }
  for (const auto &r : hyp) {
    for (std::int64_t t = ms(r.onset_seconds); t < ms(r.end_seconds()); ++t) {
      ha[t][hyp_id[r.speaker]] = 1;
    }
  }
  std::vector<std::vector<std::int64_t>> overlap(nr, std::vector<std::int64_t>(nh, 0));
  for (std::int64_t t = 0; t < horizon; ++t) {
    if (skip[t]) continue;
    for (std::size_t a = 0; a < nr; ++a) {
      for (std::size_t b = 0; b < nh; ++b) overlap[a][b] += ra[t][a] && ha[t][b];
    }
  }
  const std::int64_t correct_total = best_assignment_weight(overlap);
  FrameDer out;
  std::int64_t matched_pairs = 0;
  for (std::int64_t t = 0; t < horizon; ++t) {
    if (skip[t]) continue;
    const std::int64_t r = std::count(ra[t].begin(), ra[t].end(), 1);
    const std::int64_t h = std::count(ha[t].begin(), ha[t].end(), 1);
    out.total += r;
    out.miss += std::max<std::int64_t>(0, r - h);
    out.fa += std::max<std::int64_t>(0, h - r);
    matched_pairs += std::min(r, h);
  }
  out.err = matched_pairs - correct_total;
  return out;
}

}  // namespace cdgcn::oracle
