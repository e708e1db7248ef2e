// Copyright (c) 2026, The cdgcn Authors
// SPDX-License-Identifier: Apache-2.0

// cdgcn command line: cluster, train-gcn, score, synth.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "cdgcn/embedding.h"
#include "cdgcn/eval.h"
#include "cdgcn/gcn.h"
#include "cdgcn/graph_osd.h"
#include "cdgcn/pipeline.h"
#include "cdgcn/synthetic.h"
#include "cdgcn/timeline.h"

namespace fs = std::filesystem;

namespace {

struct ClusterArgs {
  std::vector<std::string> embeddings;
  std::vector<std::string> vad;
  std::vector<std::string> masks;
  std::vector<std::string> out;
  std::string mode = "cdgcn";
  std::string weights;
  int knn_k = 300;
  double gamma = 0.6;
  std::uint64_t seed = 0;
  unsigned jobs = 0;
};

struct TrainArgs {
  std::string data;
  std::string out;
  double lr = 1e-2;
  int epochs = 200;
  std::uint64_t seed = 0;
  int knn_k = 300;
  int hidden = 32;
  int layers = 4;
};

struct ScoreArgs {
  std::string ref;
  std::string hyp;
  double collar = 0.0;
  bool counts = false;
};

struct SynthArgs {
  std::string out_dir = ".";
  std::string name = "synthetic";
  cdgcn::SyntheticConfig cfg;
};

void write_text(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

// Accepts either zero values or exactly one per recording.
void check_paired(const std::vector<std::string> &values, std::size_t n, const char *flag) {
  if (!values.empty() && values.size() != n) {
    throw std::invalid_argument(std::string(flag) + " given " + std::to_string(values.size()) +
                                " times for " + std::to_string(n) + " recordings");
  }
}

int run_cluster(const ClusterArgs &args) {
  const std::size_t n = args.embeddings.size();
  check_paired(args.vad, n, "--vad");
  check_paired(args.masks, n, "--mask");
  if (args.out.size() != n) {
    throw std::invalid_argument("need one --out per --embeddings");
  }
  const cdgcn::Mode mode = cdgcn::parse_mode(args.mode);
  std::optional<cdgcn::GcnWeights> weights;
  if (!args.weights.empty()) weights = cdgcn::read_weights(args.weights);

  cdgcn::PipelineConfig base;
  base.knn_k = args.knn_k;
  base.leiden.gamma = args.gamma;
  base.leiden.seed = args.seed;
  // Recordings run in parallel; sub-graph inference stays serial inside each.
  base.threads = n > 1 ? 1 : 0;

  std::vector<std::string> errors(n);
  std::vector<std::string> summaries(n);
  auto process = [&](std::size_t r) {
    try {
      const cdgcn::EmbeddingSet emb = cdgcn::read_embeddings(args.embeddings[r]);
      std::vector<cdgcn::TimeRegion> vad;
      if (!args.vad.empty()) vad = cdgcn::read_vad_file(args.vad[r]);
      std::optional<cdgcn::OverlapMask> mask;
      if (!args.masks.empty()) mask = cdgcn::read_overlap_mask(args.masks[r]);
      cdgcn::PipelineConfig cfg = base;
      cfg.file_id = fs::path(args.embeddings[r]).stem().string();
      const cdgcn::PipelineResult result = cdgcn::run_pipeline(
          emb, mode, weights ? &*weights : nullptr, mask ? &*mask : nullptr, vad, cfg);
      write_text(args.out[r], cdgcn::write_rttm(result.records));
      summaries[r] = cfg.file_id + ": " + std::to_string(result.speaker_count()) + " speakers, " +
                     std::to_string(result.records.size()) + " turns";
    } catch (const std::exception &e) {
      errors[r] = args.embeddings[r] + ": " + e.what();
    }
  };

  unsigned jobs = args.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : args.jobs;
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  for (unsigned t = 0; t < std::min<std::size_t>(jobs, n); ++t) {
    pool.emplace_back([&] {
      for (std::size_t r = next++; r < n; r = next++) process(r);
    });
  }
  for (auto &t : pool) t.join();

  for (const std::string &e : errors) {
    if (!e.empty()) throw std::runtime_error(e);
  }
  for (const std::string &s : summaries) std::cout << s << "\n";
  return 0;
}

std::vector<int> read_labels(const fs::path &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<int> labels;
  std::string token;
  while (in >> token) {
    try {
      labels.push_back(std::stoi(token));
    } catch (const std::exception &) {
      throw std::runtime_error(path.string() + ": bad label \"" + token + "\"");
    }
  }
  return labels;
}

int run_train(const TrainArgs &args) {
  std::vector<fs::path> files;
  for (const auto &entry : fs::directory_iterator(args.data)) {
    if (entry.path().extension() == ".emb") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("no .emb files in " + args.data);

  std::vector<cdgcn::TrainingExample> examples;
  int dim = -1;
  for (const fs::path &emb_path : files) {
    fs::path label_path = emb_path;
    label_path.replace_extension(".labels");
    const cdgcn::EmbeddingSet emb = cdgcn::read_embeddings(emb_path);
    if (dim >= 0 && emb.dim() != dim) {
      throw std::runtime_error(emb_path.string() + ": embedding dimension " +
                               std::to_string(emb.dim()) + " differs from " + std::to_string(dim));
    }
    dim = emb.dim();
    auto batch = cdgcn::make_training_examples(emb, read_labels(label_path), args.knn_k);
    std::move(batch.begin(), batch.end(), std::back_inserter(examples));
  }

  const cdgcn::GcnWeights init =
      cdgcn::init_weights({dim, args.hidden, args.layers}, args.seed);
  cdgcn::TrainOptions options;
  options.learning_rate = args.lr;
  options.epochs = args.epochs;
  const int every = std::max(1, args.epochs / 10);
  options.on_epoch = [&](int epoch, double loss) {
    if (epoch % every == 0) std::cerr << "epoch " << epoch << " loss " << loss << "\n";
  };
  const cdgcn::TrainResult result = cdgcn::train(examples, init, options);
  cdgcn::write_weights(args.out, result.weights);
  std::printf("trained on %zu sub-graphs from %zu files, loss %.6f -> %.6f\n", examples.size(),
              files.size(), result.loss_history.empty() ? 0.0 : result.loss_history.front(),
              result.loss_history.empty() ? 0.0 : result.loss_history.back());
  return 0;
}

int run_score(const ScoreArgs &args) {
  const auto ref = cdgcn::read_rttm_file(args.ref);
  const auto hyp = cdgcn::read_rttm_file(args.hyp);
  const cdgcn::DerBreakdown d = cdgcn::der_by_file(ref, hyp, args.collar);
  std::printf("DER=%.2f%% MISS=%.3f FA=%.3f SPKERR=%.3f\n", d.der_percent, d.missed_seconds,
              d.false_alarm_seconds, d.speaker_error_seconds);
  if (args.counts) {
    std::map<std::string, std::pair<std::set<std::string>, std::set<std::string>>> files;
    for (const auto &r : ref) files[r.file_id].first.insert(r.speaker);
    for (const auto &r : hyp) files[r.file_id].second.insert(r.speaker);
    std::vector<int> ref_counts, hyp_counts;
    for (const auto &[id, sets] : files) {
      ref_counts.push_back(static_cast<int>(sets.first.size()));
      hyp_counts.push_back(static_cast<int>(sets.second.size()));
    }
    std::printf("MSE=%.4f\n", cdgcn::speaker_count_mse(ref_counts, hyp_counts));
  }
  return 0;
}

int run_synth(const SynthArgs &args) {
  cdgcn::SyntheticConfig cfg = args.cfg;
  cfg.file_id = args.name;
  const cdgcn::SyntheticSession s = cdgcn::make_synthetic_session(cfg);
  const fs::path dir(args.out_dir);
  fs::create_directories(dir);
  cdgcn::write_embeddings(dir / (args.name + ".emb"), s.embeddings);
  write_text(dir / (args.name + ".rttm"), cdgcn::write_rttm(s.reference));
  write_text(dir / (args.name + ".mask"), cdgcn::format_overlap_mask(s.oracle_mask));
  std::ostringstream vad, labels;
  char buf[64];
  for (const auto &r : s.vad) {
    std::snprintf(buf, sizeof(buf), "%.3f %.3f\n", r.start, r.end);
    vad << buf;
  }
  for (int spk : s.segment_speaker) labels << spk << "\n";
  write_text(dir / (args.name + ".vad"), vad.str());
  write_text(dir / (args.name + ".labels"), labels.str());
  std::printf("%s: %d segments, %d speakers\n", args.name.c_str(), s.embeddings.size(),
              s.speaker_count);
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Graph-based speaker clustering for diarization"};
  app.require_subcommand(1);

  ClusterArgs cluster;
  auto *c = app.add_subcommand("cluster", "Cluster segment embeddings into an RTTM");
  c->add_option("--embeddings", cluster.embeddings, "EMB1 embedding file(s)")->required();
  c->add_option("--mode", cluster.mode, "raw_leiden|knn_leiden|cdgcn_no_osd|cdgcn")
      ->capture_default_str();
  c->add_option("--weights", cluster.weights, "GCNW weights file");
  c->add_option("--mask", cluster.masks, "Overlap mask file(s), one per recording");
  c->add_option("--vad", cluster.vad, "VAD file(s), one per recording");
  c->add_option("--knn-k", cluster.knn_k, "Neighbours per node")->capture_default_str();
  c->add_option("--gamma", cluster.gamma, "Leiden resolution")->capture_default_str();
  c->add_option("--seed", cluster.seed, "Leiden seed")->capture_default_str();
  c->add_option("--jobs", cluster.jobs, "Recordings processed concurrently (0 = all cores)");
  c->add_option("--out", cluster.out, "Output RTTM file(s)")->required();

  TrainArgs train;
  auto *t = app.add_subcommand("train-gcn", "Train the linkage GCN on labelled sessions");
  t->add_option("--data", train.data, "Directory of <name>.emb + <name>.labels")->required();
  t->add_option("--out", train.out, "Output weights file")->required();
  t->add_option("--lr", train.lr, "Learning rate")->capture_default_str();
  t->add_option("--epochs", train.epochs, "Full-batch epochs")->capture_default_str();
  t->add_option("--seed", train.seed, "Weight init seed")->capture_default_str();
  t->add_option("--knn-k", train.knn_k, "Neighbours per sub-graph")->capture_default_str();
  t->add_option("--hidden", train.hidden, "Hidden width")->capture_default_str();
  t->add_option("--layers", train.layers, "Aggregation layers")->capture_default_str();

  ScoreArgs score;
  auto *s = app.add_subcommand("score", "Diarization error rate of a hypothesis RTTM");
  s->add_option("--ref", score.ref, "Reference RTTM")->required();
  s->add_option("--hyp", score.hyp, "Hypothesis RTTM")->required();
  s->add_option("--collar", score.collar, "Collar in seconds")->capture_default_str();
  s->add_flag("--counts", score.counts, "Also report the MSE of per-file speaker counts");

  SynthArgs synth;
  auto *y = app.add_subcommand("synth", "Write a synthetic labelled session");
  y->add_option("--out-dir", synth.out_dir)->capture_default_str();
  y->add_option("--name", synth.name)->capture_default_str();
  y->add_option("--speakers", synth.cfg.speakers)->capture_default_str();
  y->add_option("--segments", synth.cfg.segments_per_speaker, "Segments per speaker")
      ->capture_default_str();
  y->add_option("--turns", synth.cfg.turns_per_speaker, "Turns per speaker")
      ->capture_default_str();
  y->add_option("--dim", synth.cfg.dim)->capture_default_str();
  y->add_option("--noise", synth.cfg.noise_norm)->capture_default_str();
  y->add_option("--pair-cosine", synth.cfg.pair_cosine)->capture_default_str();
  y->add_option("--overlap", synth.cfg.overlap_fraction)->capture_default_str();
  y->add_option("--seed", synth.cfg.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e);
  }

  try {
    if (c->parsed()) return run_cluster(cluster);
    if (t->parsed()) return run_train(train);
    if (s->parsed()) return run_score(score);
    if (y->parsed()) return run_synth(synth);
  } catch (const std::exception &e) {
    std::fprintf(stderr, "cdgcn: error: %s\n", e.what());
    return 1;
  }
  return 1;
}
