// Copyright (c) 2026, The cdgcn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cdgcn/embedding.h"

namespace cdgcn {

inline constexpr double kFrameSeconds = 0.01;

/// Half-open speech interval [start, end) in seconds.
struct TimeRegion {
  double start = 0.0;
  double end = 0.0;

  bool contains(double t) const { return t >= start && t < end; }
  bool operator==(const TimeRegion &) const = default;
};

/// Up to two speaker labels active in one frame.
class FrameSpeakers {
 public:
  int count() const { return count_; }
  int operator[](int n) const { return speakers_[static_cast<std::size_t>(n)]; }
  bool contains(int speaker) const;

  /// Adds `speaker` unless present. Throws std::logic_error on a third
  /// distinct speaker.
  void add(int speaker);

  bool operator==(const FrameSpeakers &) const = default;

 private:
  std::array<int, 2> speakers_{-1, -1};
  int count_ = 0;
};

struct DiarizationTimeline {
  double frame_duration_seconds = kFrameSeconds;
  std::vector<FrameSpeakers> frames;

  double frame_center(std::size_t f) const {
    return (static_cast<double>(f) + 0.5) * frame_duration_seconds;
  }
};

struct RttmRecord {
  std::string file_id;
  double onset_seconds = 0.0;
  double duration_seconds = 0.0;
  std::string speaker;

  double end_seconds() const { return onset_seconds + duration_seconds; }
  bool operator==(const RttmRecord &) const = default;
};

/// Number of frames needed to cover every region.
std::size_t frames_for(std::span<const TimeRegion> regions, double frame_duration);

/// For each frame: the index of the segment attributed to it, or -1 for
/// non-speech. A frame is speech when its center lies in a VAD region; it is
/// attributed to the segment whose center is nearest, preferring segments
/// that intersect the frame's region. Ties go to the lower segment index.
std::vector<int> attribute_frames(std::span<const Segment> segments,
                                  std::span<const TimeRegion> vad, double frame_duration,
                                  std::size_t frame_count);

/// Primary-speaker timeline: frame f carries the label of the node
/// attributed to it.
DiarizationTimeline primary_timeline(std::span<const int> frame_segment,
                                     std::span<const int> node_label, double frame_duration);

/// Merges contiguous frames of each speaker into records named
/// "spk<label>", clipped to the VAD regions and sorted by onset then speaker.
std::vector<RttmRecord> timeline_to_rttm(const DiarizationTimeline &timeline,
                                         std::span<const TimeRegion> vad,
                                         const std::string &file_id);

/// "SPEAKER <file> 1 <onset> <dur> <NA> <NA> <speaker> <NA> <NA>" per line,
/// times with three decimals.
std::string write_rttm(std::span<const RttmRecord> records);

/// Parses SPEAKER lines; other record types and blank lines are skipped.
/// Throws std::runtime_error("line N: ...") on malformed input.
std::vector<RttmRecord> read_rttm(std::string_view text);

std::vector<RttmRecord> read_rttm_file(const std::filesystem::path &path);

/// VAD text: one "<start> <end>" pair per line, seconds.
std::vector<TimeRegion> parse_vad(std::string_view text);
std::vector<TimeRegion> read_vad_file(const std::filesystem::path &path);

/// Union of the segment spans, merged where they touch or overlap.
std::vector<TimeRegion> regions_from_segments(std::span<const Segment> segments);

}  // namespace cdgcn
