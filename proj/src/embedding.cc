// Copyright (c) 2026, The cdgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "cdgcn/embedding.h"

#include <stdexcept>

#include "binary_io.h"

namespace cdgcn {

void EmbeddingSet::validate() const {
  if (static_cast<std::size_t>(vectors.rows()) != segments.size()) {
    throw std::invalid_argument("embedding rows (" + std::to_string(vectors.rows()) +
                                ") != segment count (" + std::to_string(segments.size()) + ")");
  }
  for (int i = 0; i < size(); ++i) {
    if (!(vectors.row(i).squaredNorm() > 0.0)) {
      throw std::invalid_argument("segment " + std::to_string(i) +
                                  ": embedding has zero norm");
    }
    const Segment &s = segments[i];
    if (!(s.start_seconds >= 0.0) || !(s.duration_seconds > 0.0)) {
      throw std::invalid_argument("segment " + std::to_string(i) +
                                  ": needs start >= 0 and duration > 0");
    }
    if (i > 0 && s.start_seconds < segments[i - 1].start_seconds) {
      throw std::invalid_argument("segment " + std::to_string(i) +
                                  ": start times must be non-decreasing");
    }
  }
}

std::string serialize_embeddings(const EmbeddingSet &emb) {
  detail::ByteWriter w;
  w.magic("EMB1");
  w.u32(static_cast<std::uint32_t>(emb.size()));
  w.u32(static_cast<std::uint32_t>(emb.dim()));
  for (int i = 0; i < emb.size(); ++i) {
    for (int d = 0; d < emb.dim(); ++d) w.f32(static_cast<float>(emb.vectors(i, d)));
  }
  for (const Segment &s : emb.segments) {
    w.f64(s.start_seconds);
    w.f64(s.duration_seconds);
  }
  return w.take();
}

EmbeddingSet parse_embeddings(const std::string &bytes) {
  detail::ByteReader r(bytes, "embedding file");
  r.expect_magic("EMB1");
  const std::uint32_t n = r.u32();
  const std::uint32_t d = r.u32();
  r.need_items(static_cast<std::uint64_t>(n) * d, 4);

  EmbeddingSet emb;
  emb.vectors.resize(n, d);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < d; ++j) emb.vectors(i, j) = r.f32();
  }
  r.need_items(n, 16);
  emb.segments.resize(n);
  for (auto &s : emb.segments) {
    s.start_seconds = r.f64();
    s.duration_seconds = r.f64();
  }
  r.expect_end();
  return emb;
}

EmbeddingSet read_embeddings(const std::filesystem::path &path) {
  return parse_embeddings(detail::read_file_bytes(path));
}

void write_embeddings(const std::filesystem::path &path, const EmbeddingSet &emb) {
  detail::write_file_bytes(path, serialize_embeddings(emb));
}

}  // namespace cdgcn
