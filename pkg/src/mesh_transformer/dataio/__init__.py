"""Trajectory files, checkpoints and synthetic dataset generation."""

from .checkpoint import CheckpointMeta, load_checkpoint, save_checkpoint, save_weights_dir
from .dataset import MeshDataset, load_dataset, save_dataset
from .heat import (
    combinatorial_laplacian,
    gen_heat_dataset,
    knn_graph,
    simulate_heat,
    stable_dt,
)
from .mgf import MgfMeta, is_mgf_dir, load_mgf, save_mgf

__all__ = [
    "CheckpointMeta",
    "MeshDataset",
    "MgfMeta",
    "combinatorial_laplacian",
    "gen_heat_dataset",
    "is_mgf_dir",
    "knn_graph",
    "load_checkpoint",
    "load_dataset",
    "load_mgf",
    "save_checkpoint",
    "save_dataset",
    "save_mgf",
    "save_weights_dir",
    "simulate_heat",
    "stable_dt",
]
