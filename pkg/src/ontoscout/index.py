"""Exact top-k cosine retrieval over ontology documents, with a versioned
binary persistence format.

Retrieval is a full scan — the index holds one entry per class, link, and
topic, so exactness is cheap and brute-force oracle tests stay meaningful.

File layout (all integers little-endian):
  magic "ONSETIDX" | version u16 | dimension u32 | entry count u32
  per entry: kind byte | key u32+utf8 | text u32+utf8 | dimension × f64
  then zero or more tagged sections: 4-byte tag | u64 length | payload
Floats round-trip bit-exact, so save∘load is the identity.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .embed import cosine
from .errors import DimensionMismatch, DuplicateKey, FormatVersionMismatch, IoError
from .terms import Iri

MAGIC = b"ONSETIDX"
FORMAT_VERSION = 1

KIND_CLASS = "class"
KIND_LINK = "link"
KIND_TOPIC = "topic"
_KIND_BYTES = {KIND_CLASS: 0, KIND_LINK: 1, KIND_TOPIC: 2}
_BYTE_KINDS = {v: k for k, v in _KIND_BYTES.items()}


@dataclass(frozen=True)
class IndexedDocument:
    key: Iri
    kind: str
    text: str
    vector: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.kind not in _KIND_BYTES:
            raise ValueError(f"unknown document kind {self.kind!r}")


class VectorIndex:
    """Append-only until frozen by use; all vectors share one dimension and
    are unit-length or zero."""

    def __init__(self, dimension: int):
        self.dimension = dimension
        self.entries: list[IndexedDocument] = []
        self._seen: set[tuple[str, str]] = set()

    def __len__(self) -> int:
        return len(self.entries)

    def add(self, doc: IndexedDocument) -> None:
        if len(doc.vector) != self.dimension:
            raise DimensionMismatch(
                f"vector has dimension {len(doc.vector)}, index expects {self.dimension}"
            )
        norm = float(np.dot(doc.vector, doc.vector)) ** 0.5
        if norm != 0.0 and abs(norm - 1.0) > 1e-9:
            raise ValueError(f"vector for {doc.key.value} is neither unit nor zero (|v|={norm})")
        key = (doc.kind, doc.key.value)
        if key in self._seen:
            raise DuplicateKey(f"duplicate {doc.kind} entry {doc.key.value}")
        self._seen.add(key)
        self.entries.append(doc)

    def get(self, kind: str, key: Iri) -> IndexedDocument | None:
        for entry in self.entries:
            if entry.kind == kind and entry.key == key:
                return entry
        return None

    def top_k(
        self,
        query: np.ndarray,
        k: int,
        kinds: set[str] | None = None,
    ) -> list[tuple[Iri, float]]:
        """The k best entries by cosine, descending; ties broken by ascending
        key IRI (UTF-8 byte order). Fewer than k when the index is smaller."""
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        if len(query) != self.dimension:
            raise DimensionMismatch(
                f"query has dimension {len(query)}, index expects {self.dimension}"
            )
        scored = [
            (entry.key, cosine(entry.vector, query))
            for entry in self.entries
            if kinds is None or entry.kind in kinds
        ]
        scored.sort(key=lambda pair: (-pair[1], pair[0].value))
        return scored[:k]


def top_k(
    index: VectorIndex, query: np.ndarray, k: int, kinds: set[str] | None = None
) -> list[tuple[Iri, float]]:
    return index.top_k(query, k, kinds)


def _pack_str(value: str) -> bytes:
    raw = value.encode("utf-8")
    return struct.pack("<I", len(raw)) + raw


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, count: int) -> bytes:
        if self.pos + count > len(self.data):
            raise FormatVersionMismatch("index file truncated")
        out = self.data[self.pos : self.pos + count]
        self.pos += count
        return out

    def u8(self) -> int:
        return self.take(1)[0]

    def u16(self) -> int:
        return struct.unpack("<H", self.take(2))[0]

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def u64(self) -> int:
        return struct.unpack("<Q", self.take(8))[0]

    def string(self) -> str:
        return self.take(self.u32()).decode("utf-8")

    def at_end(self) -> bool:
        return self.pos >= len(self.data)


def serialize_index(index: VectorIndex, sections: dict[bytes, bytes] | None = None) -> bytes:
    out = [MAGIC, struct.pack("<H", FORMAT_VERSION), struct.pack("<I", index.dimension)]
    out.append(struct.pack("<I", len(index.entries)))
    for entry in index.entries:
        out.append(bytes([_KIND_BYTES[entry.kind]]))
        out.append(_pack_str(entry.key.value))
        out.append(_pack_str(entry.text))
        out.append(struct.pack(f"<{index.dimension}d", *entry.vector.tolist()))
    for tag, payload in (sections or {}).items():
        if len(tag) != 4:
            raise ValueError(f"section tag must be 4 bytes, got {tag!r}")
        out.append(tag)
        out.append(struct.pack("<Q", len(payload)))
        out.append(payload)
    return b"".join(out)


def deserialize_index(data: bytes) -> tuple[VectorIndex, dict[bytes, bytes]]:
    reader = _Reader(data)
    if reader.take(len(MAGIC)) != MAGIC:
        raise FormatVersionMismatch("not an ontoscout index file (bad magic)")
    version = reader.u16()
    if version != FORMAT_VERSION:
        raise FormatVersionMismatch(f"unsupported index format version {version}")
    dimension = reader.u32()
    count = reader.u32()
    index = VectorIndex(dimension)
    for _ in range(count):
        kind_byte = reader.u8()
        kind = _BYTE_KINDS.get(kind_byte)
        if kind is None:
            raise FormatVersionMismatch(f"unknown entry kind byte {kind_byte}")
        key = Iri(reader.string())
        text = reader.string()
        vector = np.array(
            struct.unpack(f"<{dimension}d", reader.take(8 * dimension)), dtype=np.float64
        )
        index.add(IndexedDocument(key=key, kind=kind, text=text, vector=vector))
    sections: dict[bytes, bytes] = {}
    while not reader.at_end():
        tag = reader.take(4)
        length = reader.u64()
        sections[tag] = reader.take(length)
    return index, sections


def save_index(index: VectorIndex, path: str, sections: dict[bytes, bytes] | None = None) -> None:
    try:
        with open(path, "wb") as fh:
            fh.write(serialize_index(index, sections))
    except OSError as exc:
        raise IoError(f"cannot write index: {exc}", path=str(path)) from exc


def load_index(path: str) -> VectorIndex:
    index, _ = load_index_with_sections(path)
    return index


def load_index_with_sections(path: str) -> tuple[VectorIndex, dict[bytes, bytes]]:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read index: {exc}", path=str(path)) from exc
    return deserialize_index(data)
