"""Offline embedder against an independently written reference, cosine
properties, and the remote embedder against a stub HTTP service."""

from __future__ import annotations

import json
import math
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ontoscout.embed import RemoteEmbedder, cosine, embed_offline, embed_remote, fnv1a_64
from ontoscout.errors import DimensionMismatch, RequestTimeout, TransportError


def reference_trigram_embedding(text: str, dimension: int) -> list[float]:
    """Two-pass reference: collect trigram counts first, then hash each
    distinct trigram once and accumulate count * sign."""
    lowered = text.lower()
    counts: dict[str, int] = {}
    for i in range(len(lowered) - 2):
        gram = lowered[i : i + 3]
        counts[gram] = counts.get(gram, 0) + 1
    buckets = [0.0] * dimension
    for gram, count in counts.items():
        h = 0xCBF29CE484222325
        for byte in gram.encode("utf-8"):
            h = ((h ^ byte) * 0x100000001B3) % 2**64
        sign = 1.0 if h < 2**63 else -1.0
        buckets[h % dimension] += sign * count
    norm = math.sqrt(sum(v * v for v in buckets))
    if norm == 0.0:
        return buckets
    return [v / norm for v in buckets]


def test_fnv1a_64_known_vectors():
    # published FNV-1a test vectors
    assert fnv1a_64(b"") == 0xCBF29CE484222325
    assert fnv1a_64(b"a") == 0xAF63DC4C8601EC8C
    assert fnv1a_64(b"foobar") == 0x85944171F73967E8


def test_empty_text_is_zero_vector():
    assert not embed_offline("", 64).any()
    assert not embed_offline("ab", 64).any()  # fewer than 3 chars, no trigram


def test_athlete_club_matches_reference_bucket_for_bucket():
    got = embed_offline("athlete club", 256)
    expected = reference_trigram_embedding("athlete club", 256)
    assert got.tolist() == expected


@pytest.mark.parametrize("text", ["Athlete", "birth place", "The Quick brown FOX", "ααβ unicode"])
@pytest.mark.parametrize("dimension", [8, 256])
def test_matches_reference_across_inputs(text, dimension):
    assert embed_offline(text, dimension).tolist() == reference_trigram_embedding(
        text, dimension
    )


def test_pure_function_byte_identical():
    a = embed_offline("semantic search over links", 256)
    b = embed_offline("semantic search over links", 256)
    assert a.tobytes() == b.tobytes()


@given(st.text(max_size=60))
def test_norm_is_zero_or_one(text):
    vec = embed_offline(text, 64)
    norm = math.sqrt(float(np.dot(vec, vec)))
    assert norm == 0.0 or abs(norm - 1.0) <= 1e-9


def test_case_insensitive():
    assert embed_offline("Athlete Club", 128).tolist() == embed_offline(
        "athlete club", 128
    ).tolist()


def test_cosine_self_is_one():
    u = embed_offline("athlete", 64)
    assert cosine(u, u) == pytest.approx(1.0, abs=1e-12)


def test_cosine_orthogonal_and_zero():
    u = np.zeros(4)
    u[0] = 1.0
    v = np.zeros(4)
    v[1] = 1.0
    assert cosine(u, v) == 0.0
    assert cosine(u, np.zeros(4)) == 0.0


def test_cosine_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        cosine(np.zeros(3), np.zeros(4))


# --- remote embedder against a stub service ---------------------------------


class _StubHandler(BaseHTTPRequestHandler):
    behavior = "ok"
    dimension = 8
    requests_seen: list[dict] = []

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        payload = json.loads(self.rfile.read(length))
        type(self).requests_seen.append(payload)
        if self.behavior == "slow":
            time.sleep(2.0)
        if self.behavior == "error":
            self.send_response(500)
            self.end_headers()
            return
        if self.behavior == "short":
            vectors = [[1.0, 2.0] for _ in payload["input"]]
        else:
            vectors = []
            for _ in payload["input"]:
                vec = [0.0] * self.dimension
                vec[0], vec[1] = 3.0, 4.0
                vectors.append(vec)
        body = json.dumps({"data": [{"embedding": v} for v in vectors]}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


@pytest.fixture()
def stub_server():
    server = ThreadingHTTPServer(("127.0.0.1", 0), _StubHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    url = f"http://127.0.0.1:{server.server_address[1]}/embed"
    yield url
    server.shutdown()
    thread.join(timeout=5)
    _StubHandler.behavior = "ok"
    _StubHandler.requests_seen = []


def test_remote_vectors_are_renormalized(stub_server):
    vec = embed_remote("anything", stub_server, model="m", dimension=8)
    assert vec[0] == pytest.approx(0.6)
    assert vec[1] == pytest.approx(0.8)
    assert math.sqrt(float(np.dot(vec, vec))) == pytest.approx(1.0, abs=1e-9)


def test_remote_sends_declared_wire_format(stub_server):
    embedder = RemoteEmbedder(stub_server, model="test-model", dimension=8)
    embedder.embed_many(["a", "b"])
    payload = _StubHandler.requests_seen[-1]
    assert payload == {"model": "test-model", "input": ["a", "b"]}


def test_remote_wrong_dimension_raises(stub_server):
    _StubHandler.behavior = "short"
    with pytest.raises(DimensionMismatch):
        embed_remote("text", stub_server, model="m", dimension=8)


def test_remote_timeout_raises(stub_server):
    _StubHandler.behavior = "slow"
    with pytest.raises(RequestTimeout):
        embed_remote("text", stub_server, model="m", dimension=8, timeout=0.2)


def test_remote_http_error_raises_transport_error(stub_server):
    _StubHandler.behavior = "error"
    with pytest.raises(TransportError):
        embed_remote("text", stub_server, model="m", dimension=8)


def test_remote_unreachable_raises_transport_error():
    with pytest.raises(TransportError):
        embed_remote("text", "http://127.0.0.1:9/none", model="m", dimension=8, timeout=0.5)
