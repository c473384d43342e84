"""Document vectors: signed feature hashing plus a precomputed-vector loader.

Hashed vectors are deterministic across processes and platforms: each term
is hashed with BLAKE2b to a fixed 64-bit integer, the low bits pick the
bucket and the high bit picks the sign. Vectors are L2-normalized unless
empty, in which case they stay zero (and downstream treats the document
as unclusterable noise).
"""

from __future__ import annotations

import hashlib
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "VectorLoadError",
    "term_hash",
    "embed_terms",
    "embed_many",
    "load_vectors",
    "cosine_distance",
    "pairwise_cosine_distances",
]


class VectorLoadError(ValueError):
    """A malformed precomputed-vector row, tagged with its 1-based row number."""

    def __init__(self, row_no: int, reason: str) -> None:
        super().__init__(f"row {row_no}: {reason}")
        self.row_no = row_no
        self.reason = reason


def term_hash(term: str) -> int:
    """Stable unsigned 64-bit hash of a term (BLAKE2b, 8-byte digest)."""
    digest = hashlib.blake2b(term.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def embed_terms(terms: Iterable[str], dim: int = 256) -> np.ndarray:
    """Signed hashed bag-of-terms vector, unit length unless no terms."""
    if dim < 2:
        raise ValueError(f"embedding dim must be >= 2, got {dim}")
    vec = np.zeros(dim, dtype=np.float64)
    for term in terms:
        code = term_hash(term)
        sign = -1.0 if code >> 63 else 1.0
        vec[code % dim] += sign
    norm = float(np.linalg.norm(vec))
    if norm > 0.0:
        vec /= norm
    return vec


def embed_many(term_lists: Iterable[Iterable[str]], dim: int = 256) -> np.ndarray:
    """Stack hashed vectors for many documents into an (n, dim) matrix."""
    rows = [embed_terms(terms, dim) for terms in term_lists]
    if not rows:
        return np.zeros((0, dim), dtype=np.float64)
    return np.vstack(rows)


def load_vectors(path: str, expected_dim: int | None = None) -> dict[str, np.ndarray]:
    """Load ``id<TAB>v1,v2,...`` rows; rows re-normalized to unit length.

    Every row must have the same dimension (and match ``expected_dim``
    when given). Duplicate ids, bad floats, and ragged rows raise
    :class:`VectorLoadError` naming the offending 1-based row.
    """
    out: dict[str, np.ndarray] = {}
    dim: int | None = expected_dim
    with open(path, "r", encoding="utf-8") as handle:
        for row_no, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0]:
                raise VectorLoadError(row_no, "expected id<TAB>comma-separated reals")
            row_id, payload = parts
            if row_id in out:
                raise VectorLoadError(row_no, f"duplicate id {row_id!r}")
            try:
                values = np.array([float(x) for x in payload.split(",")], dtype=np.float64)
            except ValueError:
                raise VectorLoadError(row_no, "non-numeric vector component") from None
            if not np.all(np.isfinite(values)):
                raise VectorLoadError(row_no, "non-finite vector component")
            if dim is None:
                dim = values.size
            if values.size != dim:
                raise VectorLoadError(row_no, f"dimension {values.size} != expected {dim}")
            norm = float(np.linalg.norm(values))
            out[row_id] = values / norm if norm > 0.0 else values
    return out


def cosine_distance(u: np.ndarray, v: np.ndarray) -> float:
    """1 - cosine similarity, clamped to [0, 2]; 1.0 if either vector is zero."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 1.0
    return float(np.clip(1.0 - float(np.dot(u, v)) / (nu * nv), 0.0, 2.0))


def pairwise_cosine_distances(vectors: np.ndarray) -> np.ndarray:
    """Symmetric (n, n) cosine-distance matrix with a zero diagonal.

    Zero rows sit at distance 1.0 from everything (and 0 from themselves
    on the diagonal), mirroring :func:`cosine_distance`.
    """
    mat = np.asarray(vectors, dtype=np.float64)
    if mat.ndim != 2:
        raise ValueError("expected an (n, dim) matrix")
    norms = np.linalg.norm(mat, axis=1)
    zero = norms == 0.0
    safe = np.where(zero, 1.0, norms)
    unit = mat / safe[:, None]
    dist = 1.0 - unit @ unit.T
    dist[zero, :] = 1.0
    dist[:, zero] = 1.0
    dist = 0.5 * (dist + dist.T)
    np.fill_diagonal(dist, 0.0)
    return np.clip(dist, 0.0, 2.0)
