// Copyright (c) 2026, The cdgcn Authors
// SPDX-License-Identifier: Apache-2.0

// Linkage predictor. A stack of aggregation layers
//
//   H' = ReLU([H || A_hat H] W)
//
// with A_hat the symmetrically normalized sub-graph adjacency (self-loops
// added), followed by a two-layer per-node head and a 2-way softmax. The
// positive-class probability of neighbour k is the predicted linkage between
// the pivot and k.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cdgcn/graph.h"

namespace cdgcn {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Learnable parameters. Layer l maps 2*D(l) -> D(l+1); the head maps
/// D(L) -> hidden -> 2 logits.
template <typename Scalar>
struct GcnParams {
  std::vector<MatrixX<Scalar>> layers;
  MatrixX<Scalar> hidden;
  VectorX<Scalar> hidden_bias;
  MatrixX<Scalar> output;
  VectorX<Scalar> output_bias;

  int input_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.front().rows() / 2); }
  int layer_count() const { return static_cast<int>(layers.size()); }

  /// Throws std::invalid_argument when the dimension chain is broken.
  void validate() const;

  GcnParams zeros_like() const;

  template <typename Other>
  GcnParams<Other> cast() const {
    GcnParams<Other> out;
    for (const auto &w : layers) out.layers.push_back(w.template cast<Other>());
    out.hidden = hidden.template cast<Other>();
    out.hidden_bias = hidden_bias.template cast<Other>();
    out.output = output.template cast<Other>();
    out.output_bias = output_bias.template cast<Other>();
    return out;
  }

  bool operator==(const GcnParams &other) const;
};

using GcnWeights = GcnParams<float>;

struct GcnShape {
  int input_dim = 0;
  int hidden_dim = 32;
  int layers = 4;
};

/// Glorot-uniform weights, zero biases. Head hidden width equals the last
/// layer width.
GcnWeights init_weights(const GcnShape &shape, std::uint64_t seed);

/// A_hat = D^-1/2 (A + I) D^-1/2 with D the row sums of A + I.
template <typename Scalar>
MatrixX<Scalar> normalize_adjacency(const MatrixX<Scalar> &adjacency);

/// ReLU([H || A_hat H] W). Throws std::invalid_argument on shape mismatch.
template <typename Scalar>
MatrixX<Scalar> gcn_layer_forward(const MatrixX<Scalar> &h, const MatrixX<Scalar> &a_hat,
                                  const MatrixX<Scalar> &w);

/// Linkage probabilities for the neighbours of `sub` (pivot excluded), in
/// member order.
template <typename Scalar>
std::vector<Scalar> gcn_forward(const SubGraph &sub, const GcnParams<Scalar> &params);

inline constexpr double kBceEpsilon = 1e-7;

/// Mean binary cross-entropy with predictions clipped into [eps, 1 - eps].
double bce_loss(std::span<const double> pred, std::span<const int> labels);

/// Loss of one sub-graph and, when `grad` is non-null, its gradient with
/// respect to every parameter (same layout as `params`).
double loss_and_gradient(const SubGraph &sub, std::span<const int> labels,
                         const GcnParams<double> &params, GcnParams<double> *grad);

struct TrainingExample {
  SubGraph sub;
  std::vector<int> labels;  // one per neighbour, 1 = same speaker as pivot
};

struct TrainOptions {
  double learning_rate = 1e-2;
  int epochs = 100;
  std::function<void(int epoch, double loss)> on_epoch;
};

struct TrainResult {
  GcnWeights weights;
  std::vector<double> loss_history;  // mean loss before each step, then final
};

/// Full-batch gradient descent on the mean per-example BCE. Runs in double
/// precision and returns float weights. Throws std::runtime_error naming the
/// epoch when the loss becomes non-finite.
TrainResult train(std::span<const TrainingExample> examples, const GcnWeights &init,
                  const TrainOptions &options);

// GCNW binary format, little-endian:
//   "GCNW" u32 L, L x (u32 rows u32 cols f32[rows*cols]),
//   then hidden and output head layers as (u32 rows u32 cols f32[rows*cols] f32[cols]).
std::string serialize_weights(const GcnWeights &w);
GcnWeights parse_weights(const std::string &bytes);

GcnWeights read_weights(const std::filesystem::path &path);
void write_weights(const std::filesystem::path &path, const GcnWeights &w);

}  // namespace cdgcn
