"""Hierarchical counter-keyed random streams for reproducible parallel runs.

Every random draw in this package comes from an ``RngStream``: a master seed
plus an ordered path of labels (trial index, step index, draw kind, ...).
The uniforms produced for a given (master_seed, path) are a pure function of
those values, so concurrent trials can draw independently in any order and
still reproduce bit-identical results.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

__all__ = ["RngStream"]


def _encode_label(label: int | str) -> int:
    """Map a path label to a positive integer entropy word.

    NumPy's SeedSequence ignores trailing zero entropy words, so plain label
    values must never encode to 0; integers are shifted by one and strings are
    hashed to a nonzero 64-bit value.
    """
    if isinstance(label, str):
        digest = hashlib.sha256(label.encode("utf-8")).digest()
        return int.from_bytes(digest[:8], "big") | 1
    if label < 0:
        raise ValueError(f"stream labels must be non-negative, got {label}")
    return int(label) + 1


@dataclass(frozen=True)
class RngStream:
    """A reproducible random stream addressed by (master_seed, path).

    ``child(*labels)`` derives a sub-stream; distinct paths give statistically
    independent streams.  The path length is folded into the seed material so
    a stream is never confusable with any of its descendants.
    """

    master_seed: int
    path: tuple[int, ...] = field(default=())

    def child(self, *labels: int | str) -> "RngStream":
        """Derive the sub-stream addressed by appending ``labels`` to the path."""
        encoded = tuple(_encode_label(lab) for lab in labels)
        return RngStream(self.master_seed, self.path + encoded)

    def _seed_sequence(self) -> np.random.SeedSequence:
        words = [self.master_seed & 0xFFFFFFFFFFFFFFFF, len(self.path), *self.path]
        return np.random.SeedSequence(words)

    def generator(self) -> np.random.Generator:
        """A fresh Generator positioned at the start of this stream."""
        return np.random.Generator(np.random.SFC64(self._seed_sequence()))

    def uniforms(self, shape: int | tuple[int, ...]) -> np.ndarray:
        """The stream's field of U[0,1) doubles, laid out in row-major order.

        The value at a given array position is a pure function of
        (master_seed, path, position), independent of evaluation order.
        """
        return self.generator().random(shape)

    def integers(self, low: int, high: int, shape: int | tuple[int, ...] = ()) -> np.ndarray:
        return self.generator().integers(low, high, size=shape)
