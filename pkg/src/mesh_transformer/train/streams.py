"""Named, independently seeded random streams."""

import zlib

import numpy as np

STREAM_NAMES = ("init", "noise", "mask", "random-edges", "sampling")


def stream(seed: int, name: str) -> np.random.Generator:
    """Generator for stream ``name``; the same (seed, name) always yields the same draws."""
    return np.random.default_rng([seed, zlib.crc32(name.encode("utf-8"))])


class RandomStreams:
    """One generator per named stream, all derived from a single seed."""

    def __init__(self, seed: int) -> None:
        self.seed = seed
        self._streams = {name: stream(seed, name) for name in STREAM_NAMES}

    def __getitem__(self, name: str) -> np.random.Generator:
        if name not in self._streams:
            self._streams[name] = stream(self.seed, name)
        return self._streams[name]

    @property
    def init(self) -> np.random.Generator:
        return self["init"]

    @property
    def noise(self) -> np.random.Generator:
        return self["noise"]

    @property
    def mask(self) -> np.random.Generator:
        return self["mask"]

    @property
    def random_edges(self) -> np.random.Generator:
        return self["random-edges"]

    @property
    def sampling(self) -> np.random.Generator:
        return self["sampling"]
