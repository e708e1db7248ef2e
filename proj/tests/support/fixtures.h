// Copyright (c) 2026, The cdgcn Authors
// SPDX-License-Identifier: Apache-2.0

// Linkage predictor weights trained on small synthetic sessions.

#pragma once

#include <cstdint>
#include <vector>

#include "cdgcn/gcn.h"
#include "cdgcn/pipeline.h"
#include "cdgcn/synthetic.h"

namespace cdgcn::fixture {

struct TrainingRecipe {
  int dim = 32;
  int sessions = 60;
  int segments_per_speaker = 2;
  int epochs = 200;
  double learning_rate = 0.2;
  double overlap_fraction = 0.2;  // used on every other session
  double max_pair_cosine = 0.4;
  std::uint64_t seed = 7;
};

// Many tiny sessions with 2 to 5 speakers. Each has its own random speaker
// centres, so the predictor cannot memorize directions. Half of them contain
// overlapped speech and the first speaker pair is pulled together by 0, half
// or all of `max_pair_cosine`.
inline std::vector<TrainingExample> training_examples(const TrainingRecipe &r) {
  std::vector<TrainingExample> out;
  for (int s = 0; s < r.sessions; ++s) {
    SyntheticConfig cfg;
    cfg.dim = r.dim;
    cfg.speakers = 2 + s % 4;
    cfg.segments_per_speaker = r.segments_per_speaker;
    cfg.turns_per_speaker = 1;
    cfg.overlap_fraction = s % 2 == 1 ? r.overlap_fraction : 0.0;
    cfg.pair_cosine = ((s / 2) % 3) * r.max_pair_cosine / 2;
    cfg.seed = r.seed * 1000003 + static_cast<std::uint64_t>(s);
    const SyntheticSession session = make_synthetic_session(cfg);
    auto batch = make_training_examples(session.embeddings, session.segment_speaker, 300);
    for (auto &ex : batch) out.push_back(std::move(ex));
  }
  return out;
}

inline TrainResult train_weights(const TrainingRecipe &r = {}) {
  TrainOptions opt;
  opt.learning_rate = r.learning_rate;
  opt.epochs = r.epochs;
  return train(training_examples(r), init_weights({r.dim, 32, 4}, r.seed), opt);
}

}  // namespace cdgcn::fixture
