"""Feature-embedding container and its binary interchange format.

Layout: magic bytes ``EMB1``, u32 LE row count, u32 LE dimension, then
count x dim little-endian float32 values row-major. Row i of a paired
file aligns with case i of the accompanying case list.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAGIC = b"EMB1"


@dataclass(frozen=True)
class EmbeddingSet:
    features: np.ndarray  # (n, d) float

    def __post_init__(self):
        arr = np.asarray(self.features, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError(f"features must be 2-D, got shape {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("features contain non-finite values")
        object.__setattr__(self, "features", arr)

    @property
    def count(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]


def read_embeddings(path: Path | str) -> EmbeddingSet:
    with open(path, "rb") as fh:
        data = fh.read()
    return embeddings_from_bytes(data)


def embeddings_from_bytes(data: bytes) -> EmbeddingSet:
    if data[:4] != MAGIC:
        raise ValueError(f"bad magic {data[:4]!r}, expected {MAGIC!r}")
    count, dim = struct.unpack_from("<II", data, 4)
    expected = 12 + count * dim * 4
    if len(data) != expected:
        raise ValueError(f"embedding file holds {len(data)} bytes, expected {expected}")
    arr = np.frombuffer(data, dtype="<f4", offset=12).reshape(count, dim)
    return EmbeddingSet(features=arr)


def write_embeddings(emb: EmbeddingSet, path: Path | str) -> None:
    with open(path, "wb") as fh:
        fh.write(embeddings_to_bytes(emb))


def embeddings_to_bytes(emb: EmbeddingSet) -> bytes:
    arr = np.ascontiguousarray(emb.features, dtype="<f4")
    return MAGIC + struct.pack("<II", emb.count, emb.dim) + arr.tobytes()
