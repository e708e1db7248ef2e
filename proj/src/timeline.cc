// Copyright (c) 2026, The cdgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "cdgcn/timeline.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "binary_io.h"

namespace cdgcn {

namespace {

constexpr double kTimeSlack = 1e-9;

// Frames whose center lies in [start, end).
std::pair<std::size_t, std::size_t> frame_range(const TimeRegion &r, double dt,
                                                std::size_t frame_count) {
  const auto lo = std::ceil(r.start / dt - 0.5 - kTimeSlack);
  const auto hi = std::ceil(r.end / dt - 0.5 - kTimeSlack);
  const auto clamp = [&](double f) {
    return static_cast<std::size_t>(std::clamp(f, 0.0, static_cast<double>(frame_count)));
  };
  return {clamp(lo), clamp(hi)};
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    if (pos == line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
    fields.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return fields;
}

double parse_number(std::string_view field, std::size_t line_no, const char *what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": bad " + what + " \"" +
                             std::string(field) + "\"");
  }
  return v;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn &&fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(line_no, line);
    if (end == text.size()) break;
    pos = end + 1;
  }
}

}  // namespace

bool FrameSpeakers::contains(int speaker) const {
  for (int n = 0; n < count_; ++n) {
    if (speakers_[static_cast<std::size_t>(n)] == speaker) return true;
  }
  return false;
}

void FrameSpeakers::add(int speaker) {
  if (contains(speaker)) return;
  if (count_ == 2) throw std::logic_error("a frame carries at most two speakers");
  speakers_[static_cast<std::size_t>(count_++)] = speaker;
}

std::size_t frames_for(std::span<const TimeRegion> regions, double frame_duration) {
  double end = 0.0;
  for (const TimeRegion &r : regions) end = std::max(end, r.end);
  return static_cast<std::size_t>(std::max(0.0, std::ceil(end / frame_duration - kTimeSlack)));
}

std::vector<int> attribute_frames(std::span<const Segment> segments,
                                  std::span<const TimeRegion> vad, double frame_duration,
                                  std::size_t frame_count) {
  if (!(frame_duration > 0.0)) throw std::invalid_argument("frame duration must be > 0");
  std::vector<int> frame_segment(frame_count, -1);
  if (segments.empty()) return frame_segment;

  std::vector<int> candidates;
  for (const TimeRegion &r : vad) {
    candidates.clear();
    for (std::size_t s = 0; s < segments.size(); ++s) {
      if (segments[s].start_seconds < r.end && segments[s].end_seconds() > r.start) {
        candidates.push_back(static_cast<int>(s));
      }
    }
    if (candidates.empty()) {
      for (std::size_t s = 0; s < segments.size(); ++s) candidates.push_back(static_cast<int>(s));
    }
    const auto [lo, hi] = frame_range(r, frame_duration, frame_count);
    for (std::size_t f = lo; f < hi; ++f) {
      if (frame_segment[f] >= 0) continue;
      const double t = (static_cast<double>(f) + 0.5) * frame_duration;
      int best = -1;
      double best_dist = std::numeric_limits<double>::infinity();
      for (int s : candidates) {
        const double d = std::abs(segments[s].center_seconds() - t);
        if (d < best_dist) {
          best_dist = d;
          best = s;
        }
      }
      frame_segment[f] = best;
    }
  }
  return frame_segment;
}

DiarizationTimeline primary_timeline(std::span<const int> frame_segment,
                                     std::span<const int> node_label, double frame_duration) {
  DiarizationTimeline timeline;
  timeline.frame_duration_seconds = frame_duration;
  timeline.frames.resize(frame_segment.size());
  for (std::size_t f = 0; f < frame_segment.size(); ++f) {
    const int s = frame_segment[f];
    if (s < 0) continue;
    if (static_cast<std::size_t>(s) >= node_label.size()) {
      throw std::out_of_range("frame " + std::to_string(f) + " refers to segment " +
                              std::to_string(s) + " without a label");
    }
    timeline.frames[f].add(node_label[s]);
  }
  return timeline;
}

std::vector<RttmRecord> timeline_to_rttm(const DiarizationTimeline &timeline,
                                         std::span<const TimeRegion> vad,
                                         const std::string &file_id) {
  const double dt = timeline.frame_duration_seconds;
  std::vector<RttmRecord> records;
  std::vector<int> speakers;
  for (const TimeRegion &r : vad) {
    const auto [lo, hi] = frame_range(r, dt, timeline.frames.size());
    speakers.clear();
    for (std::size_t f = lo; f < hi; ++f) {
      for (int n = 0; n < timeline.frames[f].count(); ++n) speakers.push_back(timeline.frames[f][n]);
    }
    std::sort(speakers.begin(), speakers.end());
    speakers.erase(std::unique(speakers.begin(), speakers.end()), speakers.end());

    for (int spk : speakers) {
      std::size_t f = lo;
      while (f < hi) {
        if (!timeline.frames[f].contains(spk)) {
          ++f;
          continue;
        }
        std::size_t run_end = f;
        while (run_end < hi && timeline.frames[run_end].contains(spk)) ++run_end;
        const double onset = std::max(static_cast<double>(f) * dt, r.start);
        const double end = std::min(static_cast<double>(run_end) * dt, r.end);
        const auto onset_ms = static_cast<long long>(std::ceil(onset * 1000.0 - 1e-6));
        const auto end_ms = static_cast<long long>(std::floor(end * 1000.0 + 1e-6));
        if (end_ms > onset_ms) {
          records.push_back({file_id, static_cast<double>(onset_ms) / 1000.0,
                             static_cast<double>(end_ms - onset_ms) / 1000.0,
                             "spk" + std::to_string(spk)});
        }
        f = run_end;
      }
    }
  }
  std::stable_sort(records.begin(), records.end(), [](const RttmRecord &a, const RttmRecord &b) {
    return a.onset_seconds != b.onset_seconds ? a.onset_seconds < b.onset_seconds
                                              : a.speaker < b.speaker;
  });
  return records;
}

std::string write_rttm(std::span<const RttmRecord> records) {
  std::string out;
  char buf[64];
  for (const RttmRecord &r : records) {
    out += "SPEAKER ";
    out += r.file_id;
    std::snprintf(buf, sizeof(buf), " 1 %.3f %.3f <NA> <NA> ", r.onset_seconds,
                  r.duration_seconds);
    out += buf;
    out += r.speaker;
    out += " <NA> <NA>\n";
  }
  return out;
}

std::vector<RttmRecord> read_rttm(std::string_view text) {
  std::vector<RttmRecord> records;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const auto fields = split_fields(line);
    if (fields.empty()) return;
    if (fields.size() != 10) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected 10 fields, got " +
                               std::to_string(fields.size()));
    }
    if (fields[0] != "SPEAKER") return;
    RttmRecord r;
    r.file_id = std::string(fields[1]);
    r.onset_seconds = parse_number(fields[3], line_no, "onset");
    r.duration_seconds = parse_number(fields[4], line_no, "duration");
    r.speaker = std::string(fields[7]);
    if (r.onset_seconds < 0.0 || !(r.duration_seconds > 0.0)) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": onset must be >= 0 and duration > 0");
    }
    records.push_back(std::move(r));
  });
  return records;
}

std::vector<RttmRecord> read_rttm_file(const std::filesystem::path &path) {
  try {
    return read_rttm(detail::read_file_bytes(path));
  } catch (const std::runtime_error &e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

std::vector<TimeRegion> parse_vad(std::string_view text) {
  std::vector<TimeRegion> regions;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const auto fields = split_fields(line);
    if (fields.empty() || fields[0].front() == '#') return;
    if (fields.size() != 2) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected \"<start> <end>\"");
    }
    TimeRegion r{parse_number(fields[0], line_no, "start"), parse_number(fields[1], line_no, "end")};
    if (r.start < 0.0 || !(r.end > r.start)) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": inverted or empty region");
    }
    if (!regions.empty() && r.start < regions.back().end) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": regions must be sorted and non-overlapping");
    }
    regions.push_back(r);
  });
  return regions;
}

std::vector<TimeRegion> read_vad_file(const std::filesystem::path &path) {
  try {
    return parse_vad(detail::read_file_bytes(path));
  } catch (const std::runtime_error &e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

std::vector<TimeRegion> regions_from_segments(std::span<const Segment> segments) {
  std::vector<TimeRegion> spans;
  for (const Segment &s : segments) spans.push_back({s.start_seconds, s.end_seconds()});
  std::sort(spans.begin(), spans.end(),
            [](const TimeRegion &a, const TimeRegion &b) { return a.start < b.start; });
  std::vector<TimeRegion> merged;
  for (const TimeRegion &r : spans) {
    if (!merged.empty() && r.start <= merged.back().end) {
      merged.back().end = std::max(merged.back().end, r.end);
    } else {
      merged.push_back(r);
    }
  }
  return merged;
}

}  // namespace cdgcn
