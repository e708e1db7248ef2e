// Copyright (c) 2026, The cdgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "cdgcn/eval.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace cdgcn {

namespace {

using Interval = std::pair<std::int64_t, std::int64_t>;  // [first, second) in ms frames

// Frames of 1 ms whose centers fall inside [onset, end).
Interval to_frames(double onset, double end) {
  const auto lo = static_cast<std::int64_t>(std::ceil(onset * 1000.0 - 0.5 - 1e-7));
  const auto hi = static_cast<std::int64_t>(std::ceil(end * 1000.0 - 0.5 - 1e-7));
  return {lo, std::max(lo, hi)};
}

std::vector<Interval> merge(std::vector<Interval> v) {
  std::sort(v.begin(), v.end());
  std::vector<Interval> out;
  for (const Interval &i : v) {
    if (i.first >= i.second) continue;
    if (!out.empty() && i.first <= out.back().second) {
      out.back().second = std::max(out.back().second, i.second);
    } else {
      out.push_back(i);
    }
  }
  return out;
}

struct Tracks {
  std::vector<std::vector<Interval>> by_speaker;

  explicit Tracks(std::span<const RttmRecord> records) {
    std::map<std::string, std::size_t> index;
    std::vector<std::vector<Interval>> raw;
    for (const RttmRecord &r : records) {
      auto [it, inserted] = index.try_emplace(r.speaker, raw.size());
      if (inserted) raw.emplace_back();
      raw[it->second].push_back(to_frames(r.onset_seconds, r.end_seconds()));
    }
    for (auto &v : raw) by_speaker.push_back(merge(std::move(v)));
  }
};

// Walks speaker intervals in increasing time order.
class Cursor {
 public:
  explicit Cursor(const std::vector<std::vector<Interval>> &tracks)
      : tracks_(tracks), pos_(tracks.size(), 0) {}

  void active_at(std::int64_t t, std::vector<int> &out) {
    out.clear();
    for (std::size_t s = 0; s < tracks_.size(); ++s) {
      const auto &v = tracks_[s];
      while (pos_[s] < v.size() && v[pos_[s]].second <= t) ++pos_[s];
      if (pos_[s] < v.size() && v[pos_[s]].first <= t) out.push_back(static_cast<int>(s));
    }
  }

 private:
  const std::vector<std::vector<Interval>> &tracks_;
  std::vector<std::size_t> pos_;
};

struct Piece {
  std::int64_t length;
  std::vector<int> ref;
  std::vector<int> hyp;
};

}  // namespace

std::vector<int> max_weight_assignment(const std::vector<std::vector<std::int64_t>> &weight) {
  const std::size_t rows = weight.size();
  const std::size_t cols = rows == 0 ? 0 : weight.front().size();
  for (const auto &row : weight) {
    if (row.size() != cols) throw std::invalid_argument("assignment matrix must be rectangular");
  }
  std::vector<int> result(rows, -1);
  if (rows == 0 || cols == 0) return result;

  // Hungarian algorithm on costs = -weight, with n <= m.
  const bool transposed = rows > cols;
  const std::size_t n = transposed ? cols : rows;
  const std::size_t m = transposed ? rows : cols;
  auto cost = [&](std::size_t i, std::size_t j) {
    return transposed ? -weight[j - 1][i - 1] : -weight[i - 1][j - 1];
  };
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::int64_t> u(n + 1, 0), v(m + 1, 0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<std::int64_t> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      std::int64_t delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const std::int64_t cur = cost(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] == 0) continue;
    if (transposed) {
      result[j - 1] = static_cast<int>(p[j] - 1);
    } else {
      result[p[j] - 1] = static_cast<int>(j - 1);
    }
  }
  return result;
}

DerBreakdown der(std::span<const RttmRecord> ref, std::span<const RttmRecord> hyp,
                 double collar_seconds) {
  if (collar_seconds < 0.0) throw std::invalid_argument("collar must be >= 0");
  const Tracks ref_tracks(ref);
  const Tracks hyp_tracks(hyp);

  std::vector<Interval> collar;
  if (collar_seconds > 0.0) {
    for (const RttmRecord &r : ref) {
      for (double b : {r.onset_seconds, r.end_seconds()}) {
        collar.push_back(to_frames(b - collar_seconds, b + collar_seconds));
      }
    }
  }
  const std::vector<std::vector<Interval>> collar_track{merge(std::move(collar))};

  std::vector<std::int64_t> cuts;
  for (const auto *tracks : {&ref_tracks.by_speaker, &hyp_tracks.by_speaker, &collar_track}) {
    for (const auto &v : *tracks) {
      for (const Interval &i : v) {
        cuts.push_back(i.first);
        cuts.push_back(i.second);
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  Cursor ref_cursor(ref_tracks.by_speaker), hyp_cursor(hyp_tracks.by_speaker),
      collar_cursor(collar_track);
  std::vector<Piece> pieces;
  std::vector<int> excluded;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const std::int64_t t = cuts[c];
    collar_cursor.active_at(t, excluded);
    Piece piece{cuts[c + 1] - t, {}, {}};
    ref_cursor.active_at(t, piece.ref);
    hyp_cursor.active_at(t, piece.hyp);
    if (!excluded.empty() || (piece.ref.empty() && piece.hyp.empty())) continue;
    pieces.push_back(std::move(piece));
  }

  const std::size_t n_ref = ref_tracks.by_speaker.size();
  const std::size_t n_hyp = hyp_tracks.by_speaker.size();
  std::vector<std::vector<std::int64_t>> overlap(n_ref, std::vector<std::int64_t>(n_hyp, 0));
  for (const Piece &p : pieces) {
    for (int r : p.ref) {
      for (int h : p.hyp) overlap[r][h] += p.length;
    }
  }
  const std::vector<int> mapping = max_weight_assignment(overlap);

  std::int64_t miss = 0, fa = 0, err = 0, total = 0;
  for (const Piece &p : pieces) {
    const auto nr = static_cast<std::int64_t>(p.ref.size());
    const auto nh = static_cast<std::int64_t>(p.hyp.size());
    std::int64_t correct = 0;
    for (int r : p.ref) {
      if (mapping[r] >= 0 && std::find(p.hyp.begin(), p.hyp.end(), mapping[r]) != p.hyp.end()) {
        ++correct;
      }
    }
    total += nr * p.length;
    miss += std::max<std::int64_t>(0, nr - nh) * p.length;
    fa += std::max<std::int64_t>(0, nh - nr) * p.length;
    err += (std::min(nr, nh) - correct) * p.length;
  }

  DerBreakdown out;
  out.missed_seconds = static_cast<double>(miss) / 1000.0;
  out.false_alarm_seconds = static_cast<double>(fa) / 1000.0;
  out.speaker_error_seconds = static_cast<double>(err) / 1000.0;
  out.total_reference_seconds = static_cast<double>(total) / 1000.0;
  const std::int64_t errors = miss + fa + err;
  if (total > 0) {
    out.der_percent = 100.0 * static_cast<double>(errors) / static_cast<double>(total);
  } else {
    out.der_percent = errors == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return out;
}

DerBreakdown der_by_file(std::span<const RttmRecord> ref, std::span<const RttmRecord> hyp,
                         double collar_seconds) {
  std::map<std::string, std::pair<std::vector<RttmRecord>, std::vector<RttmRecord>>> files;
  for (const RttmRecord &r : ref) files[r.file_id].first.push_back(r);
  for (const RttmRecord &r : hyp) files[r.file_id].second.push_back(r);
  DerBreakdown sum;
  for (const auto &[id, pair] : files) {
    const DerBreakdown d = der(pair.first, pair.second, collar_seconds);
    sum.missed_seconds += d.missed_seconds;
    sum.false_alarm_seconds += d.false_alarm_seconds;
    sum.speaker_error_seconds += d.speaker_error_seconds;
    sum.total_reference_seconds += d.total_reference_seconds;
  }
  const double errors = sum.missed_seconds + sum.false_alarm_seconds + sum.speaker_error_seconds;
  if (sum.total_reference_seconds > 0.0) {
    sum.der_percent = 100.0 * errors / sum.total_reference_seconds;
  } else {
    sum.der_percent = errors == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return sum;
}

std::vector<RttmRecord> clip_records(std::span<const RttmRecord> records,
                                     std::span<const TimeRegion> regions) {
  std::vector<RttmRecord> out;
  for (const RttmRecord &r : records) {
    for (const TimeRegion &g : regions) {
      const double lo = std::max(r.onset_seconds, g.start);
      const double hi = std::min(r.end_seconds(), g.end);
      if (hi > lo) out.push_back({r.file_id, lo, hi - lo, r.speaker});
    }
  }
  return out;
}

double speaker_count_mse(std::span<const int> ref_counts, std::span<const int> hyp_counts) {
  if (ref_counts.size() != hyp_counts.size()) {
    throw std::invalid_argument("speaker count lists differ in length (" +
                                std::to_string(ref_counts.size()) + " vs " +
                                std::to_string(hyp_counts.size()) + ")");
  }
  if (ref_counts.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < ref_counts.size(); ++i) {
    const double d = static_cast<double>(hyp_counts[i]) - static_cast<double>(ref_counts[i]);
    total += d * d;
  }
  return total / static_cast<double>(ref_counts.size());
}

}  // namespace cdgcn
