// Copyright (c) 2026, The cdgcn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cdgcn {

struct Segment {
  double start_seconds = 0.0;
  double duration_seconds = 0.0;

  double end_seconds() const { return start_seconds + duration_seconds; }
  double center_seconds() const { return start_seconds + 0.5 * duration_seconds; }

  bool operator==(const Segment &) const = default;
};

/// Per-segment speaker embeddings. Row i of `vectors` belongs to
/// `segments[i]`.
struct EmbeddingSet {
  Eigen::MatrixXd vectors;
  std::vector<Segment> segments;

  int size() const { return static_cast<int>(vectors.rows()); }
  int dim() const { return static_cast<int>(vectors.cols()); }

  /// Throws std::invalid_argument naming the first offending segment when
  /// row and segment counts differ, a row is all-zero, a segment has
  /// non-positive duration or start times decrease.
  void validate() const;
};

// EMB1 binary format, little-endian:
//   "EMB1" u32 N u32 D f32[N*D] row-major (f64 start, f64 duration)[N]
std::string serialize_embeddings(const EmbeddingSet &emb);
EmbeddingSet parse_embeddings(const std::string &bytes);

EmbeddingSet read_embeddings(const std::filesystem::path &path);
void write_embeddings(const std::filesystem::path &path,
                      const EmbeddingSet &emb);

}  // namespace cdgcn
