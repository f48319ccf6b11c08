"""Embedding providers: a deterministic offline trigram hasher and a client
for remote embedding services, plus cosine similarity.

The offline embedder feature-hashes character trigrams of the lowercased
text with FNV-1a-64: bucket = hash mod D, sign from the hash's top bit,
then L2 normalization. It is a pure function — byte-identical output across
runs and platforms — which keeps index builds reproducible.
"""

from __future__ import annotations

import json
import math
from typing import Sequence

import numpy as np
import requests

from .errors import DimensionMismatch, RequestTimeout, TransportError

DEFAULT_DIMENSION = 256

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_U64 = 0xFFFFFFFFFFFFFFFF


def fnv1a_64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _U64
    return h


def embed_offline(text: str, dimension: int = DEFAULT_DIMENSION) -> np.ndarray:
    """Trigram feature-hash embedding; the zero vector when no trigram exists."""
    if dimension < 1:
        raise DimensionMismatch(f"dimension must be >= 1, got {dimension}")
    buckets = [0] * dimension
    lowered = text.lower()
    for i in range(len(lowered) - 2):
        h = fnv1a_64(lowered[i : i + 3].encode("utf-8"))
        sign = 1 if (h >> 63) == 0 else -1
        buckets[h % dimension] += sign
    norm_sq = 0
    for v in buckets:
        norm_sq += v * v
    if norm_sq == 0:
        return np.zeros(dimension, dtype=np.float64)
    norm = math.sqrt(norm_sq)
    return np.array([v / norm for v in buckets], dtype=np.float64)


def l2_normalize(values: Sequence[float] | np.ndarray) -> np.ndarray:
    vec = np.asarray(values, dtype=np.float64)
    norm = math.sqrt(float(np.dot(vec, vec)))
    if norm == 0.0:
        return np.zeros(len(vec), dtype=np.float64)
    return vec / norm


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """dot(u,v)/(|u||v|); 0.0 when either vector is zero."""
    if len(u) != len(v):
        raise DimensionMismatch(f"dimensions differ: {len(u)} vs {len(v)}")
    nu = math.sqrt(float(np.dot(u, u)))
    nv = math.sqrt(float(np.dot(v, v)))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v)) / (nu * nv)


class OfflineEmbedder:
    """Deterministic local embedder; the default provider."""

    mode = "offline"

    def __init__(self, dimension: int = DEFAULT_DIMENSION):
        self.dimension = dimension

    def embed(self, text: str) -> np.ndarray:
        return embed_offline(text, self.dimension)

    def embed_many(self, texts: Sequence[str]) -> list[np.ndarray]:
        return [self.embed(t) for t in texts]


class RemoteEmbedder:
    """Client for an embedding HTTP service.

    Wire format: POST {"model": ..., "input": [texts]} ->
    {"data": [{"embedding": [floats]}, ...]}, one entry per input, in order.
    Responses are re-normalized to unit length. Failures surface as typed
    errors and are never silently replaced by the offline embedder.
    """

    mode = "remote"

    def __init__(
        self,
        endpoint_url: str,
        model: str,
        dimension: int = DEFAULT_DIMENSION,
        timeout: float = 30.0,
        session: requests.Session | None = None,
    ):
        self.endpoint_url = endpoint_url
        self.model = model
        self.dimension = dimension
        self.timeout = timeout
        self._session = session or requests.Session()

    def embed(self, text: str) -> np.ndarray:
        return self.embed_many([text])[0]

    def embed_many(self, texts: Sequence[str]) -> list[np.ndarray]:
        payload = {"model": self.model, "input": list(texts)}
        try:
            response = self._session.post(
                self.endpoint_url, json=payload, timeout=self.timeout
            )
        except requests.Timeout as exc:
            raise RequestTimeout(
                f"embedding service timed out after {self.timeout}s", url=self.endpoint_url
            ) from exc
        except requests.RequestException as exc:
            raise TransportError(
                f"embedding service unreachable: {exc}", url=self.endpoint_url
            ) from exc
        if response.status_code != 200:
            raise TransportError(
                f"embedding service returned {response.status_code}",
                url=self.endpoint_url,
                status=response.status_code,
            )
        try:
            data = response.json()["data"]
            vectors = [entry["embedding"] for entry in data]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise TransportError(
                f"malformed embedding response: {exc!r}", url=self.endpoint_url
            ) from exc
        if len(vectors) != len(texts):
            raise DimensionMismatch(
                f"embedding service returned {len(vectors)} vectors for {len(texts)} inputs"
            )
        out = []
        for vec in vectors:
            if len(vec) != self.dimension:
                raise DimensionMismatch(
                    f"embedding has dimension {len(vec)}, expected {self.dimension}"
                )
            out.append(l2_normalize(vec))
        return out


def embed_remote(
    text: str,
    endpoint_url: str,
    model: str,
    timeout: float = 30.0,
    dimension: int = DEFAULT_DIMENSION,
) -> np.ndarray:
    """One-shot convenience wrapper over RemoteEmbedder."""
    return RemoteEmbedder(endpoint_url, model, dimension, timeout).embed(text)
