// Copyright (c) 2026, The cdgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "cdgcn/gcn.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "binary_io.h"

namespace cdgcn {

namespace {

std::string dims(Eigen::Index rows, Eigen::Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

template <typename Scalar>
bool same(const MatrixX<Scalar> &a, const MatrixX<Scalar> &b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

template <typename Scalar>
bool same(const VectorX<Scalar> &a, const VectorX<Scalar> &b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

// Positive-class softmax probability from two logits.
template <typename Scalar>
Scalar positive_probability(Scalar negative_logit, Scalar positive_logit) {
  return Scalar(1) / (Scalar(1) + std::exp(negative_logit - positive_logit));
}

// Intermediate activations kept for the backward pass.
struct ForwardTrace {
  MatrixX<double> a_hat;
  std::vector<MatrixX<double>> inputs;   // H(l), l = 0..L
  std::vector<MatrixX<double>> concats;  // [H(l) || A_hat H(l)]
  std::vector<MatrixX<double>> pre;      // concat * W(l)
  MatrixX<double> hidden_pre;
  MatrixX<double> hidden;
  MatrixX<double> logits;
};

ForwardTrace trace_forward(const SubGraph &sub, const GcnParams<double> &params) {
  ForwardTrace t;
  t.a_hat = normalize_adjacency<double>(sub.adjacency);
  t.inputs.push_back(sub.features);
  for (const MatrixX<double> &w : params.layers) {
    const MatrixX<double> &h = t.inputs.back();
    MatrixX<double> concat(h.rows(), 2 * h.cols());
    concat << h, t.a_hat * h;
    t.pre.push_back(concat * w);
    t.concats.push_back(std::move(concat));
    t.inputs.push_back(t.pre.back().cwiseMax(0.0));
  }
  t.hidden_pre = (t.inputs.back() * params.hidden).rowwise() + params.hidden_bias.transpose();
  t.hidden = t.hidden_pre.cwiseMax(0.0);
  t.logits = (t.hidden * params.output).rowwise() + params.output_bias.transpose();
  return t;
}

void check_forward_inputs(const SubGraph &sub, int input_dim) {
  const Eigen::Index m = static_cast<Eigen::Index>(sub.members.size());
  if (sub.features.rows() != m || sub.adjacency.rows() != m || sub.adjacency.cols() != m) {
    throw std::invalid_argument("sub-graph of " + std::to_string(m) + " members has features " +
                                dims(sub.features.rows(), sub.features.cols()) +
                                " and adjacency " +
                                dims(sub.adjacency.rows(), sub.adjacency.cols()));
  }
  if (sub.features.cols() != input_dim) {
    throw std::invalid_argument("feature dimension mismatch: weights expect " +
                                std::to_string(input_dim) + ", sub-graph has " +
                                std::to_string(sub.features.cols()));
  }
}

template <typename Matrix>
void glorot(Matrix &w, std::mt19937_64 &rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = static_cast<float>(dist(rng));
  }
}

void write_matrix(detail::ByteWriter &out, const MatrixX<float> &m) {
  out.u32(static_cast<std::uint32_t>(m.rows()));
  out.u32(static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.f32(m(i, j));
  }
}

MatrixX<float> read_matrix(detail::ByteReader &in) {
  const std::uint32_t rows = in.u32();
  const std::uint32_t cols = in.u32();
  in.need_items(static_cast<std::uint64_t>(rows) * cols, 4);
  MatrixX<float> m(rows, cols);
  for (std::uint32_t i = 0; i < rows; ++i) {
    for (std::uint32_t j = 0; j < cols; ++j) m(i, j) = in.f32();
  }
  return m;
}

VectorX<float> read_vector(detail::ByteReader &in, std::uint32_t size) {
  in.need_items(size, 4);
  VectorX<float> v(size);
  for (std::uint32_t i = 0; i < size; ++i) v(i) = in.f32();
  return v;
}

}  // namespace

template <typename Scalar>
void GcnParams<Scalar>::validate() const {
  if (layers.empty()) throw std::invalid_argument("weights need at least one layer");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto &w = layers[l];
    if (w.rows() == 0 || w.cols() == 0 || w.rows() % 2 != 0) {
      throw std::invalid_argument("layer " + std::to_string(l) + " has shape " +
                                  dims(w.rows(), w.cols()) + ", rows must be even and non-zero");
    }
    if (l + 1 < layers.size() && layers[l + 1].rows() != 2 * w.cols()) {
      throw std::invalid_argument("layer " + std::to_string(l + 1) + " expects " +
                                  std::to_string(2 * w.cols()) + " rows, has " +
                                  std::to_string(layers[l + 1].rows()));
    }
  }
  if (hidden.rows() != layers.back().cols() || hidden_bias.size() != hidden.cols()) {
    throw std::invalid_argument("head hidden layer " + dims(hidden.rows(), hidden.cols()) +
                                " does not follow last layer width " +
                                std::to_string(layers.back().cols()));
  }
  if (output.rows() != hidden.cols() || output.cols() != 2 || output_bias.size() != 2) {
    throw std::invalid_argument("head output layer must be " + std::to_string(hidden.cols()) +
                                "x2, got " + dims(output.rows(), output.cols()));
  }
}

template <typename Scalar>
GcnParams<Scalar> GcnParams<Scalar>::zeros_like() const {
  GcnParams z;
  for (const auto &w : layers) z.layers.push_back(MatrixX<Scalar>::Zero(w.rows(), w.cols()));
  z.hidden = MatrixX<Scalar>::Zero(hidden.rows(), hidden.cols());
  z.hidden_bias = VectorX<Scalar>::Zero(hidden_bias.size());
  z.output = MatrixX<Scalar>::Zero(output.rows(), output.cols());
  z.output_bias = VectorX<Scalar>::Zero(output_bias.size());
  return z;
}

template <typename Scalar>
bool GcnParams<Scalar>::operator==(const GcnParams &other) const {
  if (layers.size() != other.layers.size()) return false;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (!same(layers[l], other.layers[l])) return false;
  }
  return same(hidden, other.hidden) && same(hidden_bias, other.hidden_bias) &&
         same(output, other.output) && same(output_bias, other.output_bias);
}

template struct GcnParams<float>;
template struct GcnParams<double>;

GcnWeights init_weights(const GcnShape &shape, std::uint64_t seed) {
  if (shape.input_dim < 1 || shape.hidden_dim < 1 || shape.layers < 1) {
    throw std::invalid_argument("GCN shape needs positive input_dim, hidden_dim and layers");
  }
  std::mt19937_64 rng(seed);
  GcnWeights w;
  int in = shape.input_dim;
  for (int l = 0; l < shape.layers; ++l) {
    MatrixX<float> layer(2 * in, shape.hidden_dim);
    glorot(layer, rng);
    w.layers.push_back(std::move(layer));
    in = shape.hidden_dim;
  }
  w.hidden.resize(in, in);
  glorot(w.hidden, rng);
  w.hidden_bias = VectorX<float>::Zero(in);
  w.output.resize(in, 2);
  glorot(w.output, rng);
  w.output_bias = VectorX<float>::Zero(2);
  return w;
}

template <typename Scalar>
MatrixX<Scalar> normalize_adjacency(const MatrixX<Scalar> &adjacency) {
  if (adjacency.rows() != adjacency.cols()) {
    throw std::invalid_argument("adjacency must be square, got " +
                                dims(adjacency.rows(), adjacency.cols()));
  }
  if ((adjacency.array() < Scalar(0)).any()) {
    throw std::invalid_argument("adjacency must be non-negative");
  }
  const Eigen::Index n = adjacency.rows();
  MatrixX<Scalar> a = adjacency;
  a.diagonal().array() += Scalar(1);
  const VectorX<Scalar> inv_sqrt = a.rowwise().sum().array().rsqrt();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) *= inv_sqrt(i) * inv_sqrt(j);
  }
  return a;
}

template <typename Scalar>
MatrixX<Scalar> gcn_layer_forward(const MatrixX<Scalar> &h, const MatrixX<Scalar> &a_hat,
                                  const MatrixX<Scalar> &w) {
  if (a_hat.rows() != h.rows() || a_hat.cols() != h.rows()) {
    throw std::invalid_argument("normalized adjacency: expected " + dims(h.rows(), h.rows()) +
                                ", got " + dims(a_hat.rows(), a_hat.cols()));
  }
  if (w.rows() != 2 * h.cols()) {
    throw std::invalid_argument("layer weights: expected " + std::to_string(2 * h.cols()) +
                                " rows, got " + dims(w.rows(), w.cols()));
  }
  MatrixX<Scalar> concat(h.rows(), 2 * h.cols());
  concat << h, a_hat * h;
  return (concat * w).cwiseMax(Scalar(0));
}

template <typename Scalar>
std::vector<Scalar> gcn_forward(const SubGraph &sub, const GcnParams<Scalar> &params) {
  params.validate();
  check_forward_inputs(sub, params.input_dim());

  const MatrixX<Scalar> a_hat = normalize_adjacency<Scalar>(sub.adjacency.cast<Scalar>());
  MatrixX<Scalar> h = sub.features.cast<Scalar>();
  for (const MatrixX<Scalar> &w : params.layers) h = gcn_layer_forward<Scalar>(h, a_hat, w);

  const MatrixX<Scalar> z =
      ((h * params.hidden).rowwise() + params.hidden_bias.transpose()).cwiseMax(Scalar(0));
  const MatrixX<Scalar> logits = (z * params.output).rowwise() + params.output_bias.transpose();

  std::vector<Scalar> probabilities;
  probabilities.reserve(static_cast<std::size_t>(sub.neighbor_count()));
  for (Eigen::Index k = 1; k < logits.rows(); ++k) {
    probabilities.push_back(positive_probability(logits(k, 0), logits(k, 1)));
  }
  return probabilities;
}

template MatrixX<float> normalize_adjacency<float>(const MatrixX<float> &);
template MatrixX<double> normalize_adjacency<double>(const MatrixX<double> &);
template MatrixX<float> gcn_layer_forward<float>(const MatrixX<float> &, const MatrixX<float> &,
                                                 const MatrixX<float> &);
template MatrixX<double> gcn_layer_forward<double>(const MatrixX<double> &,
                                                   const MatrixX<double> &,
                                                   const MatrixX<double> &);
template std::vector<float> gcn_forward<float>(const SubGraph &, const GcnParams<float> &);
template std::vector<double> gcn_forward<double>(const SubGraph &, const GcnParams<double> &);

double bce_loss(std::span<const double> pred, std::span<const int> labels) {
  if (pred.size() != labels.size()) {
    throw std::invalid_argument("bce_loss: " + std::to_string(pred.size()) + " predictions vs " +
                                std::to_string(labels.size()) + " labels");
  }
  if (pred.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const double p = std::clamp(pred[k], kBceEpsilon, 1.0 - kBceEpsilon);
    total -= labels[k] != 0 ? std::log(p) : std::log(1.0 - p);
  }
  return total / static_cast<double>(pred.size());
}

double loss_and_gradient(const SubGraph &sub, std::span<const int> labels,
                         const GcnParams<double> &params, GcnParams<double> *grad) {
  params.validate();
  check_forward_inputs(sub, params.input_dim());
  const std::size_t neighbors = static_cast<std::size_t>(sub.neighbor_count());
  if (labels.size() != neighbors) {
    throw std::invalid_argument("expected " + std::to_string(neighbors) + " labels, got " +
                                std::to_string(labels.size()));
  }
  if (neighbors == 0) {
    if (grad) *grad = params.zeros_like();
    return 0.0;
  }

  const ForwardTrace t = trace_forward(sub, params);
  std::vector<double> pred(neighbors);
  for (std::size_t k = 0; k < neighbors; ++k) {
    pred[k] = positive_probability(t.logits(k + 1, 0), t.logits(k + 1, 1));
  }
  const double loss = bce_loss(pred, labels);
  if (!grad) return loss;

  // dL/dlogit1 = (p - y) / K for unclipped predictions; logit0 gets the
  // negation. The pivot row carries no loss.
  const double scale = 1.0 / static_cast<double>(neighbors);
  MatrixX<double> d_logits = MatrixX<double>::Zero(t.logits.rows(), 2);
  for (std::size_t k = 0; k < neighbors; ++k) {
    const double p = pred[k];
    if (p < kBceEpsilon || p > 1.0 - kBceEpsilon) continue;
    const double g = (p - static_cast<double>(labels[k] != 0)) * scale;
    d_logits(static_cast<Eigen::Index>(k) + 1, 1) = g;
    d_logits(static_cast<Eigen::Index>(k) + 1, 0) = -g;
  }

  GcnParams<double> &g = *grad;
  g = params.zeros_like();
  g.output = t.hidden.transpose() * d_logits;
  g.output_bias = d_logits.colwise().sum().transpose();
  const MatrixX<double> d_hidden_pre =
      (d_logits * params.output.transpose()).cwiseProduct(
          (t.hidden_pre.array() > 0.0).cast<double>().matrix());
  g.hidden = t.inputs.back().transpose() * d_hidden_pre;
  g.hidden_bias = d_hidden_pre.colwise().sum().transpose();

  MatrixX<double> d_h = d_hidden_pre * params.hidden.transpose();
  for (std::size_t l = params.layers.size(); l-- > 0;) {
    const MatrixX<double> d_pre =
        d_h.cwiseProduct((t.pre[l].array() > 0.0).cast<double>().matrix());
    g.layers[l] = t.concats[l].transpose() * d_pre;
    if (l == 0) break;
    const MatrixX<double> d_concat = d_pre * params.layers[l].transpose();
    const Eigen::Index width = t.inputs[l].cols();
    d_h = d_concat.leftCols(width) + t.a_hat.transpose() * d_concat.rightCols(width);
  }
  return loss;
}

TrainResult train(std::span<const TrainingExample> examples, const GcnWeights &init,
                  const TrainOptions &options) {
  if (!(options.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be > 0");
  if (options.epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  init.validate();
  for (const TrainingExample &ex : examples) {
    for (int y : ex.labels) {
      if (y != 0 && y != 1) throw std::invalid_argument("labels must be 0 or 1");
    }
  }

  GcnParams<double> params = init.cast<double>();
  TrainResult result;
  if (options.epochs == 0) {
    result.weights = init;
    return result;
  }

  const double inv_count = examples.empty() ? 0.0 : 1.0 / static_cast<double>(examples.size());
  auto evaluate = [&](GcnParams<double> *grad) {
    double loss = 0.0;
    GcnParams<double> local;
    if (grad) *grad = params.zeros_like();
    for (const TrainingExample &ex : examples) {
      loss += loss_and_gradient(ex.sub, ex.labels, params, grad ? &local : nullptr);
      if (!grad) continue;
      for (std::size_t l = 0; l < local.layers.size(); ++l) grad->layers[l] += local.layers[l];
      grad->hidden += local.hidden;
      grad->hidden_bias += local.hidden_bias;
      grad->output += local.output;
      grad->output_bias += local.output_bias;
    }
    return loss * inv_count;
  };

  GcnParams<double> grad;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    const double loss = evaluate(&grad);
    if (!std::isfinite(loss)) {
      throw std::runtime_error("non-finite training loss at epoch " + std::to_string(epoch));
    }
    result.loss_history.push_back(loss);
    if (options.on_epoch) options.on_epoch(epoch, loss);

    const double step = options.learning_rate * inv_count;
    for (std::size_t l = 0; l < params.layers.size(); ++l) params.layers[l] -= step * grad.layers[l];
    params.hidden -= step * grad.hidden;
    params.hidden_bias -= step * grad.hidden_bias;
    params.output -= step * grad.output;
    params.output_bias -= step * grad.output_bias;
  }
  const double final_loss = evaluate(nullptr);
  if (!std::isfinite(final_loss)) {
    throw std::runtime_error("non-finite training loss at epoch " + std::to_string(options.epochs));
  }
  result.loss_history.push_back(final_loss);
  result.weights = params.cast<float>();
  return result;
}

std::string serialize_weights(const GcnWeights &w) {
  w.validate();
  detail::ByteWriter out;
  out.magic("GCNW");
  out.u32(static_cast<std::uint32_t>(w.layers.size()));
  for (const auto &layer : w.layers) write_matrix(out, layer);
  write_matrix(out, w.hidden);
  for (Eigen::Index i = 0; i < w.hidden_bias.size(); ++i) out.f32(w.hidden_bias(i));
  write_matrix(out, w.output);
  for (Eigen::Index i = 0; i < w.output_bias.size(); ++i) out.f32(w.output_bias(i));
  return out.take();
}

GcnWeights parse_weights(const std::string &bytes) {
  detail::ByteReader in(bytes, "weights file");
  in.expect_magic("GCNW");
  const std::uint32_t layers = in.u32();
  // Each layer header alone takes 8 bytes.
  in.need_items(layers, 8);
  GcnWeights w;
  for (std::uint32_t l = 0; l < layers; ++l) w.layers.push_back(read_matrix(in));
  w.hidden = read_matrix(in);
  w.hidden_bias = read_vector(in, static_cast<std::uint32_t>(w.hidden.cols()));
  w.output = read_matrix(in);
  w.output_bias = read_vector(in, static_cast<std::uint32_t>(w.output.cols()));
  in.expect_end();
  w.validate();
  return w;
}

GcnWeights read_weights(const std::filesystem::path &path) {
  return parse_weights(detail::read_file_bytes(path));
}

void write_weights(const std::filesystem::path &path, const GcnWeights &w) {
  detail::write_file_bytes(path, serialize_weights(w));
}

}  // namespace cdgcn
