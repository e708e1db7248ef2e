// Copyright (c) 2026, The cdgcn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cdgcn/timeline.h"

namespace cdgcn {

struct DerBreakdown {
  double missed_seconds = 0.0;
  double false_alarm_seconds = 0.0;
  double speaker_error_seconds = 0.0;
  double total_reference_seconds = 0.0;
  double der_percent = 0.0;
};

/// Overlap-aware diarization error rate on a 1 ms grid. Frames within
/// `collar_seconds` of any reference turn boundary are not scored. Speakers
/// are mapped one-to-one to maximize total overlapped time. Records are
/// treated as one recording regardless of file id; see der_by_file.
DerBreakdown der(std::span<const RttmRecord> ref, std::span<const RttmRecord> hyp,
                 double collar_seconds = 0.0);

/// Scores each file id separately (own speaker mapping) and sums the times.
DerBreakdown der_by_file(std::span<const RttmRecord> ref, std::span<const RttmRecord> hyp,
                         double collar_seconds = 0.0);

/// Optimal one-to-one assignment maximizing total weight. `weight` is
/// rows x cols; returns the column for each row, or -1 when unassigned.
std::vector<int> max_weight_assignment(const std::vector<std::vector<std::int64_t>> &weight);

/// Intersects every record with `regions`, dropping empty pieces.
std::vector<RttmRecord> clip_records(std::span<const RttmRecord> records,
                                     std::span<const TimeRegion> regions);

double speaker_count_mse(std::span<const int> ref_counts, std::span<const int> hyp_counts);

}  // namespace cdgcn
