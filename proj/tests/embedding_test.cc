// Copyright (c) 2026, The cdgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstring>
#include <filesystem>

#include <gtest/gtest.h>

#include "cdgcn/embedding.h"
#include "support/generators.h"

namespace cdgcn {
namespace {

EmbeddingSet float_exact(gen::Rng &rng, int n, int d) {
  EmbeddingSet emb = gen::embeddings(rng, n, d);
  emb.vectors = emb.vectors.cast<float>().cast<double>();
  return emb;
}

TEST(EmbeddingFormat, Layout) {
  EmbeddingSet emb;
  emb.vectors.resize(1, 2);
  emb.vectors << 1.0, -2.0;
  emb.segments = {{0.5, 1.5}};
  const std::string bytes = serialize_embeddings(emb);
  ASSERT_EQ(bytes.size(), 4u + 4 + 4 + 8 + 16);
  EXPECT_EQ(bytes.substr(0, 4), "EMB1");
  std::uint32_t n = 0, d = 0;
  std::memcpy(&n, bytes.data() + 4, 4);
  std::memcpy(&d, bytes.data() + 8, 4);
  EXPECT_EQ(n, 1u);
  EXPECT_EQ(d, 2u);
  float x = 0;
  std::memcpy(&x, bytes.data() + 16, 4);
  EXPECT_EQ(x, -2.0f);
  double start = 0;
  std::memcpy(&start, bytes.data() + 20, 8);
  EXPECT_EQ(start, 0.5);
}

TEST(EmbeddingFormat, RoundTrip) {
  gen::Rng rng(1);
  const EmbeddingSet emb = float_exact(rng, 17, 9);
  const std::string bytes = serialize_embeddings(emb);
  const EmbeddingSet back = parse_embeddings(bytes);
  EXPECT_EQ(back.vectors, emb.vectors);
  EXPECT_EQ(back.segments, emb.segments);
  EXPECT_EQ(serialize_embeddings(back), bytes);

  const auto path = std::filesystem::temp_directory_path() / "cdgcn_embedding_test.emb";
  write_embeddings(path, emb);
  EXPECT_EQ(read_embeddings(path).vectors, emb.vectors);
  std::filesystem::remove(path);
}

TEST(EmbeddingFormat, Errors) {
  gen::Rng rng(2);
  const std::string bytes = serialize_embeddings(float_exact(rng, 3, 2));
  for (std::size_t cut = 0; cut < bytes.size(); cut += 5) {
    EXPECT_THROW(parse_embeddings(bytes.substr(0, cut)), std::runtime_error) << cut;
  }
  EXPECT_THROW(parse_embeddings(bytes + "x"), std::runtime_error);
  try {
    parse_embeddings("GCNW" + bytes.substr(4));
    FAIL();
  } catch (const std::runtime_error &e) {
    EXPECT_NE(std::string(e.what()).find("EMB1"), std::string::npos) << e.what();
  }
  EXPECT_THROW(read_embeddings("/nonexistent/file.emb"), std::runtime_error);
}

TEST(EmbeddingSet, Validate) {
  gen::Rng rng(3);
  EmbeddingSet emb = gen::embeddings(rng, 4, 3);
  emb.validate();
  EmbeddingSet zero = emb;
  zero.vectors.row(2).setZero();
  EXPECT_THROW(zero.validate(), std::invalid_argument);
  EmbeddingSet unsorted = emb;
  std::swap(unsorted.segments[0], unsorted.segments[3]);
  EXPECT_THROW(unsorted.validate(), std::invalid_argument);
  EmbeddingSet short_segments = emb;
  short_segments.segments.pop_back();
  EXPECT_THROW(short_segments.validate(), std::invalid_argument);
  EmbeddingSet bad_duration = emb;
  bad_duration.segments[1].duration_seconds = 0.0;
  EXPECT_THROW(bad_duration.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace cdgcn
