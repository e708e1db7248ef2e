// Copyright (c) 2026, The cdgcn Authors
// SPDX-License-Identifier: Apache-2.0

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cdgcn/embedding.h"
#include "cdgcn/eval.h"
#include "cdgcn/gcn.h"
#include "cdgcn/graph.h"
#include "cdgcn/graph_osd.h"
#include "cdgcn/leiden.h"
#include "cdgcn/pipeline.h"
#include "cdgcn/synthetic.h"
#include "cdgcn/timeline.h"

namespace py = pybind11;
using namespace cdgcn;

namespace {

using Span = std::pair<double, double>;

EmbeddingSet make_embeddings(const Eigen::MatrixXd &vectors, const std::vector<Span> &segments) {
  EmbeddingSet emb;
  emb.vectors = vectors;
  for (const auto &[start, duration] : segments) emb.segments.push_back({start, duration});
  emb.validate();
  return emb;
}

// Affinity and training only look at the vectors; segments are placeholders.
EmbeddingSet unsegmented(const Eigen::MatrixXd &vectors) {
  EmbeddingSet emb;
  emb.vectors = vectors;
  for (int i = 0; i < vectors.rows(); ++i) emb.segments.push_back({0.75 * i, 1.5});
  return emb;
}

std::vector<Span> segment_spans(const std::vector<Segment> &segments) {
  std::vector<Span> out;
  for (const Segment &s : segments) out.emplace_back(s.start_seconds, s.duration_seconds);
  return out;
}

std::vector<TimeRegion> regions(const std::vector<Span> &spans) {
  std::vector<TimeRegion> out;
  for (const auto &[start, end] : spans) out.push_back({start, end});
  return out;
}

std::vector<Span> spans(const std::vector<TimeRegion> &regions) {
  std::vector<Span> out;
  for (const TimeRegion &r : regions) out.emplace_back(r.start, r.end);
  return out;
}

SpeakerGraph graph_from_dense(const Eigen::MatrixXd &w) {
  if (w.rows() != w.cols()) throw std::invalid_argument("adjacency must be square");
  std::vector<Edge> edges;
  for (int i = 0; i < w.rows(); ++i) {
    for (int j = i + 1; j < w.cols(); ++j) {
      if (w(i, j) != 0.0) edges.push_back({i, j, w(i, j)});
    }
  }
  SpeakerGraph g = SpeakerGraph::from_edges(static_cast<int>(w.rows()), std::move(edges));
  if (w.diagonal().cwiseAbs().maxCoeff() > 0.0 && w.rows() > 0) {
    g.self_loops.assign(w.diagonal().data(), w.diagonal().data() + w.rows());
  }
  return g;
}

Eigen::MatrixXd graph_to_dense(const SpeakerGraph &g) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(g.node_count, g.node_count);
  for (const Edge &e : g.edges) w(e.i, e.j) = w(e.j, e.i) = e.weight;
  for (int v = 0; v < g.node_count; ++v) w(v, v) = g.self_loop(v);
  return w;
}

py::dict der_dict(const DerBreakdown &d) {
  py::dict out;
  out["der"] = d.der_percent;
  out["miss"] = d.missed_seconds;
  out["false_alarm"] = d.false_alarm_seconds;
  out["speaker_error"] = d.speaker_error_seconds;
  out["total"] = d.total_reference_seconds;
  return out;
}

}  // namespace

PYBIND11_MODULE(_cdgcn, m) {
  m.doc() = "Speaker clustering on GCN-refined graphs";

  py::class_<GcnWeights>(m, "GcnWeights")
      .def_property_readonly("input_dim", &GcnWeights::input_dim)
      .def_property_readonly("layer_count", &GcnWeights::layer_count)
      .def("to_bytes", [](const GcnWeights &w) { return py::bytes(serialize_weights(w)); })
      .def_static("from_bytes", [](const py::bytes &b) { return parse_weights(std::string(b)); })
      .def("__eq__", &GcnWeights::operator==);

  m.def("read_embeddings", [](const std::filesystem::path &path) {
    const EmbeddingSet emb = read_embeddings(path);
    return std::make_pair(emb.vectors, segment_spans(emb.segments));
  }, py::arg("path"), "Returns (vectors, [(start, duration), ...]).");
  m.def("write_embeddings", [](const std::filesystem::path &path, const Eigen::MatrixXd &vectors,
                               const std::vector<Span> &segments) {
    write_embeddings(path, make_embeddings(vectors, segments));
  }, py::arg("path"), py::arg("vectors"), py::arg("segments"));

  m.def("cosine_affinity", [](const Eigen::MatrixXd &vectors) {
    return cosine_affinity(unsegmented(vectors)).scores;
  }, py::arg("vectors"));
  m.def("knn_graph", [](const Eigen::MatrixXd &affinity, int k) {
    return graph_to_dense(knn_graph({affinity}, k));
  }, py::arg("affinity"), py::arg("k"), "Symmetric KNN union graph as a dense matrix.");
  m.def("normalize_adjacency", &normalize_adjacency<double>, py::arg("adjacency"));

  m.def("quality", [](const Eigen::MatrixXd &adjacency, std::vector<int> labels, double gamma) {
    const SpeakerGraph g = graph_from_dense(adjacency);
    return quality(g, Partition::from_labels(g, std::move(labels)), gamma);
  }, py::arg("adjacency"), py::arg("labels"), py::arg("gamma") = 0.6);
  m.def("leiden", [](const Eigen::MatrixXd &adjacency, double gamma, std::uint64_t seed,
                     int max_iterations, double theta, int restarts) {
    LeidenConfig cfg;
    cfg.gamma = gamma;
    cfg.seed = seed;
    cfg.max_iterations = max_iterations;
    cfg.theta = theta;
    cfg.restarts = restarts;
    return leiden(graph_from_dense(adjacency), cfg).assignment;
  }, py::arg("adjacency"), py::arg("gamma") = 0.6, py::arg("seed") = 0,
     py::arg("max_iterations") = 100, py::arg("theta") = 0.0, py::arg("restarts") = 16);

  m.def("init_weights", [](int input_dim, int hidden_dim, int layers, std::uint64_t seed) {
    return init_weights({input_dim, hidden_dim, layers}, seed);
  }, py::arg("input_dim"), py::arg("hidden_dim") = 32, py::arg("layers") = 4, py::arg("seed") = 0);
  m.def("read_weights", &read_weights, py::arg("path"));
  m.def("write_weights", &write_weights, py::arg("path"), py::arg("weights"));
  m.def("train_gcn", [](const std::vector<std::pair<Eigen::MatrixXd, std::vector<int>>> &sessions,
                        const GcnWeights &init, double learning_rate, int epochs, int k) {
    std::vector<TrainingExample> examples;
    for (const auto &[vectors, speakers] : sessions) {
      for (auto &ex : make_training_examples(unsegmented(vectors), speakers, k)) {
        examples.push_back(std::move(ex));
      }
    }
    TrainOptions opt;
    opt.learning_rate = learning_rate;
    opt.epochs = epochs;
    py::gil_scoped_release release;
    TrainResult r = train(examples, init, opt);
    return std::make_pair(std::move(r.weights), std::move(r.loss_history));
  }, py::arg("sessions"), py::arg("init"), py::arg("learning_rate") = 0.01,
     py::arg("epochs") = 200, py::arg("k") = 300,
     "sessions: [(vectors, speaker_ids), ...]. Returns (weights, loss_history).");

  m.def("run_pipeline", [](const Eigen::MatrixXd &vectors, const std::vector<Span> &segments,
                           const std::string &mode, const GcnWeights *weights,
                           std::optional<std::vector<bool>> mask, const std::vector<Span> &vad,
                           int knn_k, double gamma, std::uint64_t seed, const std::string &file_id) {
    const EmbeddingSet emb = make_embeddings(vectors, segments);
    std::optional<OverlapMask> overlap;
    if (mask) overlap = OverlapMask{kFrameSeconds, std::move(*mask)};
    PipelineConfig cfg;
    cfg.knn_k = knn_k;
    cfg.leiden.gamma = gamma;
    cfg.leiden.seed = seed;
    cfg.file_id = file_id;
    const std::vector<TimeRegion> speech = regions(vad);
    PipelineResult r;
    {
      py::gil_scoped_release release;
      r = run_pipeline(emb, parse_mode(mode), weights, overlap ? &*overlap : nullptr, speech, cfg);
    }
    py::dict out;
    out["speakers"] = r.speaker_count();
    out["labels"] = r.partition.assignment;
    out["second"] = r.second;
    out["rttm"] = write_rttm(r.records);
    return out;
  }, py::arg("vectors"), py::arg("segments"), py::arg("mode") = "cdgcn",
     py::arg("weights") = nullptr, py::arg("mask") = py::none(),
     py::arg("vad") = std::vector<Span>{}, py::arg("knn_k") = 300, py::arg("gamma") = 0.6,
     py::arg("seed") = 0, py::arg("file_id") = "session",
     "Returns {speakers, labels, second, rttm}. mask holds one flag per 10 ms frame.");

  m.def("segment_speech", [](const std::vector<Span> &vad, double window, double shift) {
    return segment_spans(segment_speech(regions(vad), {window, shift}));
  }, py::arg("vad"), py::arg("window") = 1.5, py::arg("shift") = 0.75);

  m.def("der", [](const std::string &ref, const std::string &hyp, double collar, bool by_file) {
    const auto r = read_rttm(ref), h = read_rttm(hyp);
    return der_dict(by_file ? der_by_file(r, h, collar) : der(r, h, collar));
  }, py::arg("ref"), py::arg("hyp"), py::arg("collar") = 0.0, py::arg("by_file") = true,
     "Scores RTTM texts.");
  m.def("speaker_count_mse", [](const std::vector<int> &ref, const std::vector<int> &hyp) {
    return speaker_count_mse(ref, hyp);
  }, py::arg("ref"), py::arg("hyp"));

  m.def("synthetic_session", [](int speakers, int segments_per_speaker, int turns_per_speaker,
                                int dim, double noise_norm, double pair_cosine,
                                double overlap_fraction, std::uint64_t seed,
                                const std::string &file_id) {
    SyntheticConfig cfg;
    cfg.speakers = speakers;
    cfg.segments_per_speaker = segments_per_speaker;
    cfg.turns_per_speaker = turns_per_speaker;
    cfg.dim = dim;
    cfg.noise_norm = noise_norm;
    cfg.pair_cosine = pair_cosine;
    cfg.overlap_fraction = overlap_fraction;
    cfg.seed = seed;
    cfg.file_id = file_id;
    const SyntheticSession s = make_synthetic_session(cfg);
    py::dict out;
    out["vectors"] = s.embeddings.vectors;
    out["segments"] = segment_spans(s.embeddings.segments);
    out["speakers"] = s.segment_speaker;
    out["vad"] = spans(s.vad);
    out["reference"] = write_rttm(s.reference);
    out["overlap_regions"] = spans(s.overlap_regions);
    out["mask"] = s.oracle_mask.frames;
    return out;
  }, py::arg("speakers") = 4, py::arg("segments_per_speaker") = 50,
     py::arg("turns_per_speaker") = 5, py::arg("dim") = 32, py::arg("noise_norm") = 0.25,
     py::arg("pair_cosine") = 0.0, py::arg("overlap_fraction") = 0.0, py::arg("seed") = 0,
     py::arg("file_id") = "synthetic");
}
