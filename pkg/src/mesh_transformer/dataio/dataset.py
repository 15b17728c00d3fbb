"""Collections of trajectories for training and evaluation."""

from __future__ import annotations

import logging
from collections.abc import Iterator, Sequence
from pathlib import Path

import numpy as np

from ..exceptions import DataFormatError
from ..graphcore.trajectory import Trajectory
from ..utils.io import ensure_output_dir
from .mgf import is_mgf_dir, load_mgf, save_mgf

logger = logging.getLogger("mesh-transformer.dataio")


class MeshDataset(Sequence[Trajectory]):
    """Named trajectories with uniform sampling of (trajectory, t) transitions."""

    def __init__(self, trajectories: Sequence[Trajectory], names: Sequence[str] | None = None):
        self.trajectories = list(trajectories)
        self.names = (
            list(names)
            if names is not None
            else [f"traj-{i:04d}" for i in range(len(self.trajectories))]
        )
        if len(self.names) != len(self.trajectories):
            raise DataFormatError("Dataset names and trajectories differ in length")
        self._transitions = np.array(
            [max(t.num_frames - 1, 0) for t in self.trajectories], dtype=np.int64
        )

    def __getitem__(self, index: int) -> Trajectory:  # type: ignore[override]
        return self.trajectories[index]

    def __len__(self) -> int:
        return len(self.trajectories)

    def __iter__(self) -> Iterator[Trajectory]:
        return iter(self.trajectories)

    @property
    def num_samples(self) -> int:
        """Number of (trajectory, t) transitions."""
        return int(self._transitions.sum())

    @property
    def nodes_per_sample(self) -> float:
        """Mean node count per transition."""
        if self.num_samples == 0:
            return 0.0
        nodes = np.array([t.num_nodes for t in self.trajectories], dtype=np.float64)
        return float(np.sum(nodes * self._transitions) / self.num_samples)

    def sample(self, rng: np.random.Generator) -> tuple[Trajectory, int]:
        """A uniformly random transition: trajectory and the index t of its input frame."""
        if self.num_samples == 0:
            raise DataFormatError("Dataset has no transitions to sample")
        flat = int(rng.integers(0, self.num_samples))
        index = int(np.searchsorted(np.cumsum(self._transitions), flat, side="right"))
        offset = flat - int(self._transitions[:index].sum())
        return self.trajectories[index], offset


def load_dataset(path: str | Path) -> MeshDataset:
    """
    Load one MGF directory or a directory of MGF subdirectories (sorted by name).

    Raises:
        DataFormatError: If no trajectory is found
    """
    root = Path(path)
    if is_mgf_dir(root):
        return MeshDataset([load_mgf(root)], [root.name])
    if not root.is_dir():
        raise DataFormatError(f"{root} is not a directory")
    subdirs = sorted(p for p in root.iterdir() if p.is_dir() and is_mgf_dir(p))
    if not subdirs:
        raise DataFormatError(f"No MGF trajectories found under {root}")
    dataset = MeshDataset([load_mgf(p) for p in subdirs], [p.name for p in subdirs])
    logger.info(f"Loaded {len(dataset)} trajectories from {root}")
    return dataset


def save_dataset(
    trajectories: Sequence[Trajectory],
    path: str | Path,
    names: Sequence[str] | None = None,
) -> list[Path]:
    """Write each trajectory to its own MGF subdirectory of ``path``."""
    root = ensure_output_dir(path)
    names = names or [f"traj-{i:04d}" for i in range(len(trajectories))]
    return [save_mgf(traj, root / name) for traj, name in zip(trajectories, names, strict=True)]
