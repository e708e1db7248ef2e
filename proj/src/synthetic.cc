// Copyright (c) 2026, The cdgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "cdgcn/synthetic.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace cdgcn {

namespace {

Eigen::MatrixXd orthonormal_rows(int rows, int dim, std::mt19937_64 &rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd basis(rows, dim);
  for (int r = 0; r < rows; ++r) {
    Eigen::VectorXd v(dim);
    do {
      for (int d = 0; d < dim; ++d) v(d) = normal(rng);
      for (int q = 0; q < r; ++q) v -= v.dot(basis.row(q).transpose()) * basis.row(q).transpose();
    } while (v.norm() < 1e-6);
    basis.row(r) = v.normalized().transpose();
  }
  return basis;
}

double quantize(double seconds) { return std::round(seconds * 100.0) / 100.0; }

struct Turn {
  int speaker;
  TimeRegion span;
  int segments;
  std::optional<TimeRegion> overlap;
};

}  // namespace

SyntheticSession make_synthetic_session(const SyntheticConfig &cfg) {
  if (cfg.speakers < 1 || cfg.segments_per_speaker < 1 || cfg.turns_per_speaker < 1) {
    throw std::invalid_argument("synthetic session needs speakers, segments and turns >= 1");
  }
  if (cfg.dim < cfg.speakers + 1) throw std::invalid_argument("dim must exceed speaker count");
  if (cfg.overlap_fraction < 0.0 || cfg.overlap_fraction >= 1.0) {
    throw std::invalid_argument("overlap fraction must be in [0, 1)");
  }
  cfg.segmentation.validate();
  std::mt19937_64 rng(cfg.seed);

  const Eigen::MatrixXd basis = orthonormal_rows(cfg.speakers + 1, cfg.dim, rng);
  Eigen::MatrixXd centers = basis.topRows(cfg.speakers);
  if (cfg.speakers >= 2) {
    const double rho = std::clamp(cfg.pair_cosine, -1.0, 1.0);
    centers.row(1) = rho * basis.row(0) + std::sqrt(1.0 - rho * rho) * basis.row(1);
  }

  // Turn layout: each round visits every speaker once in shuffled order.
  const double window = cfg.segmentation.window_seconds;
  const double shift = cfg.segmentation.shift_seconds;
  std::vector<Turn> turns;
  std::vector<int> order(static_cast<std::size_t>(cfg.speakers));
  std::iota(order.begin(), order.end(), 0);
  double clock = 0.0;
  for (int round = 0; round < cfg.turns_per_speaker; ++round) {
    std::shuffle(order.begin(), order.end(), rng);
    for (int spk : order) {
      const int base = cfg.segments_per_speaker / cfg.turns_per_speaker;
      const int segments = base + (round < cfg.segments_per_speaker % cfg.turns_per_speaker);
      if (segments == 0) continue;
      const double length = window + (segments - 1) * shift;
      turns.push_back({spk, {clock, clock + length}, segments, std::nullopt});
      clock = quantize(clock + length + cfg.gap_seconds);
    }
  }

  if (cfg.overlap_fraction > 0.0 && cfg.speakers >= 2) {
    double total = 0.0, pair = 0.0;
    for (const Turn &t : turns) {
      total += t.span.end - t.span.start;
      if (t.speaker <= 1) pair += t.span.end - t.span.start;
    }
    for (Turn &t : turns) {
      if (t.speaker > 1) continue;
      const double length = t.span.end - t.span.start;
      const double share = std::min(length, cfg.overlap_fraction * total * length / pair);
      const double mid = 0.5 * (t.span.start + t.span.end);
      t.overlap = TimeRegion{quantize(mid - 0.5 * share), quantize(mid + 0.5 * share)};
    }
  }

  SyntheticSession out;
  out.speaker_count = cfg.speakers;
  std::normal_distribution<double> noise(0.0, cfg.noise_norm / std::sqrt(cfg.dim));
  std::vector<Eigen::VectorXd> rows;
  for (const Turn &t : turns) {
    out.vad.push_back(t.span);
    out.reference.push_back({cfg.file_id, t.span.start, t.span.end - t.span.start,
                             "ref" + std::to_string(t.speaker)});
    const int other = t.speaker == 0 ? 1 : 0;
    if (t.overlap) {
      out.overlap_regions.push_back(*t.overlap);
      out.reference.push_back({cfg.file_id, t.overlap->start,
                               t.overlap->end - t.overlap->start, "ref" + std::to_string(other)});
    }
    const TimeRegion span[] = {t.span};
    for (const Segment &s : segment_speech(span, cfg.segmentation)) {
      Eigen::VectorXd v = centers.row(t.speaker).transpose();
      if (t.overlap) {
        const double inter = std::max(0.0, std::min(s.end_seconds(), t.overlap->end) -
                                               std::max(s.start_seconds, t.overlap->start));
        v += cfg.overlap_mix * (inter / s.duration_seconds) * centers.row(other).transpose();
      }
      for (int d = 0; d < cfg.dim; ++d) v(d) += noise(rng);
      rows.push_back(std::move(v));
      out.embeddings.segments.push_back(s);
      out.segment_speaker.push_back(t.speaker);
    }
  }
  out.embeddings.vectors.resize(static_cast<Eigen::Index>(rows.size()), cfg.dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    // Stored as float32 on disk; keep in-memory values identical to a reload.
    out.embeddings.vectors.row(static_cast<Eigen::Index>(i)) =
        rows[i].cast<float>().cast<double>().transpose();
  }

  std::sort(out.reference.begin(), out.reference.end(),
            [](const RttmRecord &a, const RttmRecord &b) {
              return a.onset_seconds != b.onset_seconds ? a.onset_seconds < b.onset_seconds
                                                        : a.speaker < b.speaker;
            });
  out.oracle_mask.frame_duration_seconds = kFrameSeconds;
  out.oracle_mask.frames.assign(frames_for(out.vad, kFrameSeconds), false);
  for (std::size_t f = 0; f < out.oracle_mask.frames.size(); ++f) {
    const double t = (static_cast<double>(f) + 0.5) * kFrameSeconds;
    for (const TimeRegion &r : out.overlap_regions) {
      if (r.contains(t)) out.oracle_mask.frames[f] = true;
    }
  }
  return out;
}

}  // namespace cdgcn
