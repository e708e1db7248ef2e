# Copyright (c) 2026, The cdgcn Authors
# SPDX-License-Identifier: Apache-2.0

"""Speaker clustering on GCN-refined speaker graphs with Leiden communities."""

from ._cdgcn import (
    GcnWeights,
    cosine_affinity,
    der,
    init_weights,
    knn_graph,
    leiden,
    normalize_adjacency,
    quality,
    read_embeddings,
    read_weights,
    run_pipeline,
    segment_speech,
    speaker_count_mse,
    synthetic_session,
    train_gcn,
    write_embeddings,
    write_weights,
)

MODES = ("raw_leiden", "knn_leiden", "cdgcn_no_osd", "cdgcn")

__all__ = [
    "MODES",
    "GcnWeights",
    "cosine_affinity",
    "der",
    "init_weights",
    "knn_graph",
    "leiden",
    "normalize_adjacency",
    "quality",
    "read_embeddings",
    "read_weights",
    "run_pipeline",
    "segment_speech",
    "speaker_count_mse",
    "synthetic_session",
    "train_gcn",
    "write_embeddings",
    "write_weights",
]
