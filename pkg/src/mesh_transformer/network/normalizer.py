"""Running mean/std normalizers for inputs and targets."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

STD_EPSILON = 1e-8


@dataclass
class Normalizer:
    """Per-column mean/std accumulated over every row it has seen."""

    width: int
    count: int = 0
    total: np.ndarray = field(default=None)  # type: ignore[assignment]
    total_sq: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.total is None:
            self.total = np.zeros(self.width)
        if self.total_sq is None:
            self.total_sq = np.zeros(self.width)

    def accumulate(self, rows: np.ndarray) -> None:
        rows = np.asarray(rows, dtype=np.float64).reshape(-1, self.width)
        self.count += rows.shape[0]
        self.total += rows.sum(axis=0)
        self.total_sq += (rows * rows).sum(axis=0)

    @property
    def mean(self) -> np.ndarray:
        if self.count == 0:
            return np.zeros(self.width)
        return self.total / self.count

    @property
    def std(self) -> np.ndarray:
        if self.count == 0:
            return np.ones(self.width)
        variance = np.maximum(self.total_sq / self.count - self.mean**2, 0.0)
        return np.maximum(np.sqrt(variance), STD_EPSILON)

    def normalize(self, x: np.ndarray) -> np.ndarray:
        return (x - self.mean) / self.std

    def denormalize(self, x: np.ndarray) -> np.ndarray:
        return x * self.std + self.mean

    def to_dict(self) -> dict[str, Any]:
        return {
            "width": self.width,
            "count": self.count,
            "total": self.total.tolist(),
            "total_sq": self.total_sq.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Normalizer:
        return cls(
            width=int(data["width"]),
            count=int(data["count"]),
            total=np.asarray(data["total"], dtype=np.float64),
            total_sq=np.asarray(data["total_sq"], dtype=np.float64),
        )

    @classmethod
    def identity(cls, width: int) -> Normalizer:
        return cls(width)
