"""Embedding-based token matching (CodeBERTScore-style).

The real CodeBERT model is not bundled. Anything that maps an ordered token
list to one unit vector per token can serve as the embedder: a local HTTP
service via :class:`HttpEmbedder`, or the deterministic :class:`HashEmbedder`
used for tests and offline runs.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache
from typing import Protocol, Sequence, runtime_checkable

import httpx
import numpy as np

__all__ = [
    "CodeBertScore",
    "EmbeddingError",
    "EmbeddingProvider",
    "HashEmbedder",
    "HttpEmbedder",
    "codebert_score",
]

_UNIT_TOL = 1e-6


class EmbeddingError(RuntimeError):
    pass


@runtime_checkable
class EmbeddingProvider(Protocol):
    def embed(self, tokens: Sequence[str]) -> np.ndarray:
        """Return a ``(len(tokens), dim)`` array of unit vectors."""
        ...


@dataclass(frozen=True)
class CodeBertScore:
    precision: float
    recall: float
    f1: float


class HashEmbedder:
    """Deterministic pseudo-embeddings seeded by a hash of each token.

    Equal tokens map to equal vectors; distinct tokens map to nearly
    orthogonal ones when ``dim`` is large.
    """

    def __init__(self, dim: int = 256) -> None:
        self.dim = dim
        self._vector = lru_cache(maxsize=65536)(self._make)

    def _make(self, token: str) -> np.ndarray:
        seed = int.from_bytes(hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest(), "little")
        v = np.random.default_rng(seed).standard_normal(self.dim)
        v /= np.linalg.norm(v)
        v.setflags(write=False)
        return v

    def embed(self, tokens: Sequence[str]) -> np.ndarray:
        if not tokens:
            return np.zeros((0, self.dim))
        return np.stack([self._vector(t) for t in tokens])


class HttpEmbedder:
    """Client for an embedding service.

    Request body ``{"tokens": [...]}``; response body ``{"vectors": [[...], ...]}``
    with one unit vector per token.
    """

    def __init__(self, url: str, timeout: float = 30.0, client: httpx.Client | None = None) -> None:
        self.url = url
        self._client = client or httpx.Client(timeout=timeout)

    def embed(self, tokens: Sequence[str]) -> np.ndarray:
        try:
            resp = self._client.post(self.url, json={"tokens": list(tokens)})
            resp.raise_for_status()
            vectors = resp.json()["vectors"]
        except (httpx.HTTPError, KeyError, ValueError) as exc:
            raise EmbeddingError(f"embedding request failed: {exc}") from exc
        return np.asarray(vectors, dtype=float)


def _checked(arr: np.ndarray, n: int, what: str) -> np.ndarray:
    arr = np.asarray(arr, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != n:
        raise EmbeddingError(f"{what}: expected {n} vectors, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise EmbeddingError(f"{what}: non-finite values")
    norms = np.linalg.norm(arr, axis=1)
    if np.any(np.abs(norms - 1.0) > _UNIT_TOL):
        raise EmbeddingError(f"{what}: vectors are not unit-normalized")
    return arr


def codebert_score(
    cand: Sequence[str],
    ref: Sequence[str],
    embedder: EmbeddingProvider,
    beta: float = 1.0,
) -> CodeBertScore:
    """Greedy max-cosine matching of candidate and reference tokens.

    Negative similarities count as no match, which keeps every score in [0, 1].
    """
    if not cand or not ref:
        return CodeBertScore(0.0, 0.0, 0.0)
    c = _checked(embedder.embed(list(cand)), len(cand), "candidate")
    r = _checked(embedder.embed(list(ref)), len(ref), "reference")
    if c.shape[1] != r.shape[1]:
        raise EmbeddingError(f"vector length mismatch: {c.shape[1]} vs {r.shape[1]}")
    sim = np.clip(c @ r.T, 0.0, 1.0)
    p = float(sim.max(axis=1).mean())
    rec = float(sim.max(axis=0).mean())
    if p == 0.0 and rec == 0.0:
        return CodeBertScore(0.0, 0.0, 0.0)
    b2 = beta * beta
    return CodeBertScore(p, rec, (1 + b2) * p * rec / (b2 * p + rec))
