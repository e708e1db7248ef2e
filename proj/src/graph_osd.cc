// Copyright (c) 2026, The cdgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include "cdgcn/graph_osd.h"

#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "binary_io.h"

namespace cdgcn {

bool OverlapMask::overlapped_at(double t) const {
  const double index = std::floor(t / frame_duration_seconds);
  if (index < 0.0 || index >= static_cast<double>(frames.size())) {
    throw std::out_of_range("overlap mask covers " + std::to_string(duration_seconds()) +
                            " s, time " + std::to_string(t) + " s requested");
  }
  return frames[static_cast<std::size_t>(index)];
}

BelongingMatrix belonging_coefficients(const SpeakerGraph &graph, const Partition &p) {
  if (p.node_count() != graph.node_count) {
    throw std::invalid_argument("partition and graph disagree on node count");
  }
  BelongingMatrix b;
  b.coefficients = Eigen::MatrixXd::Zero(p.community_count(), graph.node_count);
  for (const Edge &e : graph.edges) {
    b.coefficients(p.assignment[e.j], e.i) += e.weight;
    b.coefficients(p.assignment[e.i], e.j) += e.weight;
  }
  for (int v = 0; v < graph.node_count; ++v) {
    b.coefficients(p.assignment[v], v) += 2.0 * graph.self_loop(v);
  }
  return b;
}

std::vector<std::optional<int>> second_community(const BelongingMatrix &b,
                                                 std::span<const int> primary) {
  if (primary.size() != static_cast<std::size_t>(b.node_count())) {
    throw std::invalid_argument("primary labels and belonging matrix disagree on node count");
  }
  std::vector<std::optional<int>> second(primary.size());
  for (int i = 0; i < b.node_count(); ++i) {
    if (primary[i] < 0 || primary[i] >= b.community_count()) {
      throw std::out_of_range("node " + std::to_string(i) + " has primary community " +
                              std::to_string(primary[i]) + " outside the belonging matrix");
    }
    double best = 0.0;
    for (int c = 0; c < b.community_count(); ++c) {
      if (c != primary[i] && b(c, i) > best) {
        best = b(c, i);
        second[i] = c;
      }
    }
  }
  return second;
}

DiarizationTimeline apply_overlap(const DiarizationTimeline &primary,
                                  std::span<const std::optional<int>> second,
                                  std::span<const int> frame_segment, const OverlapMask &mask) {
  if (frame_segment.size() != primary.frames.size()) {
    throw std::invalid_argument("frame attribution and timeline differ in length");
  }
  if (!(mask.frame_duration_seconds > 0.0)) {
    throw std::invalid_argument("overlap mask frame duration must be > 0");
  }
  if (!primary.frames.empty()) mask.overlapped_at(primary.frame_center(primary.frames.size() - 1));
  DiarizationTimeline out = primary;
  for (std::size_t f = 0; f < out.frames.size(); ++f) {
    const int s = frame_segment[f];
    if (s < 0 || out.frames[f].count() == 0) continue;
    if (!second[static_cast<std::size_t>(s)]) continue;
    if (!mask.overlapped_at(out.frame_center(f))) continue;
    out.frames[f].add(*second[static_cast<std::size_t>(s)]);
  }
  return out;
}

OverlapMask parse_overlap_mask(std::string_view text) {
  const std::size_t eol = text.find('\n');
  std::string_view header = text.substr(0, eol);
  while (!header.empty() && std::isspace(static_cast<unsigned char>(header.back()))) {
    header.remove_suffix(1);
  }
  constexpr std::string_view key = "frame_duration=";
  if (header.substr(0, key.size()) != key) {
    throw std::runtime_error("overlap mask: first line must be \"frame_duration=<seconds>\"");
  }
  OverlapMask mask;
  const std::string_view value = header.substr(key.size());
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), mask.frame_duration_seconds);
  if (ec != std::errc() || ptr != value.data() + value.size() ||
      !(mask.frame_duration_seconds > 0.0)) {
    throw std::runtime_error("overlap mask: bad frame duration \"" + std::string(value) + "\"");
  }
  if (eol == std::string_view::npos) return mask;
  for (char c : text.substr(eol + 1)) {
    if (c == '0' || c == '1') {
      mask.frames.push_back(c == '1');
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      throw std::runtime_error(std::string("overlap mask: unexpected character '") + c + "'");
    }
  }
  return mask;
}

std::string format_overlap_mask(const OverlapMask &mask) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), mask.frame_duration_seconds);
  std::string out = "frame_duration=" + std::string(buf, res.ptr) + "\n";
  out.reserve(out.size() + mask.frames.size() + 1);
  for (bool f : mask.frames) out.push_back(f ? '1' : '0');
  out.push_back('\n');
  return out;
}

OverlapMask read_overlap_mask(const std::filesystem::path &path) {
  try {
    return parse_overlap_mask(detail::read_file_bytes(path));
  } catch (const std::runtime_error &e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

}  // namespace cdgcn
