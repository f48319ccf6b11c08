"""Index build pipeline and the on-disk exploration artifact.

The build runs parse -> ontology -> documents -> embeddings -> topics ->
counts -> layout and writes a single index file: the vector entries in the
core format plus tagged sections for the topic tree, the ontology, the
layout, and the prevalence map. With the offline embedder and labeler the
output is byte-identical across runs.
"""

from __future__ import annotations

import struct
import time
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from .client import PrevalenceCache, SparqlClient, prevalence as fetch_prevalence
from .config import Config
from .embed import OfflineEmbedder, RemoteEmbedder
from .errors import OntoscoutError
from .index import (
    IndexedDocument,
    KIND_CLASS,
    KIND_LINK,
    KIND_TOPIC,
    VectorIndex,
    _Reader,
    load_index_with_sections,
    save_index,
)
from .layout import MinimapLayout, PackedCircle, pack_hierarchy
from .ontology import IngestStats, OntologyClass, OntologyModel, PropertyDef, build_ontology
from .rdfio import parse_rdf_file
from .store import InstanceStore
from .suggest import link_document
from .terms import Iri
from .topics import (
    ClassDocument,
    OfflineLabeler,
    RemoteLabeler,
    Topic,
    TopicTree,
    class_document,
    cluster_classes,
    ctfidf_keywords,
    default_leaf_count,
    label_topics,
)

SECTION_TOPICS = b"TOPC"
SECTION_ONTOLOGY = b"ONTO"
SECTION_LAYOUT = b"LAYT"
SECTION_PREVALENCE = b"PREV"

TOPIC_KEY_PREFIX = "urn:ontoscout:topic:"


@dataclass
class ExplorationIndex:
    """Everything the service needs, loaded from one file."""

    ontology: OntologyModel
    vectors: VectorIndex
    topics: TopicTree
    layout: MinimapLayout
    prevalence: dict[Iri, int]

    @property
    def dimension(self) -> int:
        return self.vectors.dimension

    def save(self, path: str) -> None:
        sections = {
            SECTION_TOPICS: _pack_topics(self.topics, self.dimension),
            SECTION_ONTOLOGY: _pack_ontology(self.ontology),
            SECTION_LAYOUT: _pack_layout(self.layout),
            SECTION_PREVALENCE: _pack_prevalence(self.prevalence),
        }
        save_index(self.vectors, path, sections)

    @staticmethod
    def load(path: str) -> "ExplorationIndex":
        vectors, sections = load_index_with_sections(path)
        return ExplorationIndex(
            ontology=_unpack_ontology(sections.get(SECTION_ONTOLOGY, b"")),
            vectors=vectors,
            topics=_unpack_topics(sections.get(SECTION_TOPICS, b""), vectors.dimension),
            layout=_unpack_layout(sections.get(SECTION_LAYOUT, b"")),
            prevalence=_unpack_prevalence(sections.get(SECTION_PREVALENCE, b"")),
        )


def _pack_str(value: str) -> bytes:
    raw = value.encode("utf-8")
    return struct.pack("<I", len(raw)) + raw


def _pack_topics(tree: TopicTree, dimension: int) -> bytes:
    out = [struct.pack("<I", len(tree.topics))]
    for tid in sorted(tree.topics):
        topic = tree.topics[tid]
        out.append(struct.pack("<I", tid))
        out.append(_pack_str(topic.label))
        out.append(struct.pack("<B", 1 if topic.parent_topic_id is not None else 0))
        out.append(struct.pack("<I", topic.parent_topic_id or 0))
        out.append(struct.pack("<I", len(topic.keywords)))
        for term, weight in topic.keywords:
            out.append(_pack_str(term))
            out.append(struct.pack("<d", weight))
        members = topic.sorted_members()
        out.append(struct.pack("<I", len(members)))
        for iri in members:
            out.append(_pack_str(iri.value))
        out.append(struct.pack(f"<{dimension}d", *topic.centroid.tolist()))
    return b"".join(out)


def _unpack_topics(data: bytes, dimension: int) -> TopicTree:
    if not data:
        return TopicTree(topics={}, roots=frozenset())
    reader = _Reader(data)
    topics: dict[int, Topic] = {}
    for _ in range(reader.u32()):
        tid = reader.u32()
        label = reader.string()
        has_parent = reader.u8()
        parent = reader.u32()
        keywords = tuple(
            (reader.string(), struct.unpack("<d", reader.take(8))[0])
            for _ in range(reader.u32())
        )
        members = frozenset(Iri(reader.string()) for _ in range(reader.u32()))
        centroid = np.array(
            struct.unpack(f"<{dimension}d", reader.take(8 * dimension)), dtype=np.float64
        )
        topics[tid] = Topic(
            id=tid,
            label=label,
            keywords=keywords,
            member_classes=members,
            parent_topic_id=parent if has_parent else None,
            centroid=centroid,
        )
    roots = frozenset(t.id for t in topics.values() if t.parent_topic_id is None)
    return TopicTree(topics=topics, roots=roots)


def _pack_ontology(model: OntologyModel) -> bytes:
    out = [
        struct.pack(
            "<QQ", model.ingest.triple_count, model.ingest.ignored_count
        ),
        struct.pack("<I", len(model.classes)),
    ]
    for iri in sorted(model.classes, key=lambda i: i.value):
        cls = model.classes[iri]
        out.append(_pack_str(iri.value))
        out.append(_pack_str(cls.label))
        parents = sorted(cls.parents, key=lambda i: i.value)
        out.append(struct.pack("<I", len(parents)))
        for parent in parents:
            out.append(_pack_str(parent.value))
        out.append(struct.pack("<Q", cls.instance_count))
    out.append(struct.pack("<I", len(model.properties)))
    for iri in sorted(model.properties, key=lambda i: i.value):
        prop = model.properties[iri]
        out.append(_pack_str(iri.value))
        out.append(_pack_str(prop.label))
        out.append(struct.pack("<B", 0 if prop.kind == "object" else 1))
        out.append(struct.pack("<B", 1 if prop.domain is not None else 0))
        out.append(_pack_str(prop.domain.value if prop.domain is not None else ""))
        out.append(struct.pack("<B", 1 if prop.range is not None else 0))
        out.append(_pack_str(prop.range.value if prop.range is not None else ""))
        out.append(struct.pack("<Q", prop.prevalence))
    return b"".join(out)


def _unpack_ontology(data: bytes) -> OntologyModel:
    if not data:
        return OntologyModel(classes={}, properties={})
    reader = _Reader(data)
    triple_count, ignored = struct.unpack("<QQ", reader.take(16))
    classes: dict[Iri, OntologyClass] = {}
    for _ in range(reader.u32()):
        iri = Iri(reader.string())
        label = reader.string()
        parents = frozenset(Iri(reader.string()) for _ in range(reader.u32()))
        count = struct.unpack("<Q", reader.take(8))[0]
        classes[iri] = OntologyClass(iri=iri, label=label, parents=parents, instance_count=count)
    properties: dict[Iri, PropertyDef] = {}
    for _ in range(reader.u32()):
        iri = Iri(reader.string())
        label = reader.string()
        kind = "object" if reader.u8() == 0 else "datatype"
        has_domain = reader.u8()
        domain_value = reader.string()
        has_range = reader.u8()
        range_value = reader.string()
        prevalence_count = struct.unpack("<Q", reader.take(8))[0]
        properties[iri] = PropertyDef(
            iri=iri,
            label=label,
            kind=kind,
            domain=Iri(domain_value) if has_domain else None,
            range=Iri(range_value) if has_range else None,
            prevalence=prevalence_count,
        )
    stats = IngestStats(
        class_count=len(classes),
        property_count=len(properties),
        triple_count=triple_count,
        ignored_count=ignored,
    )
    return OntologyModel(classes=classes, properties=properties, ingest=stats)


def _pack_layout(layout: MinimapLayout) -> bytes:
    out = [_pack_str(layout.root_iri.value), struct.pack("<I", len(layout.circles))]
    for iri in sorted(layout.circles, key=lambda i: i.value):
        circle = layout.circles[iri]
        out.append(_pack_str(iri.value))
        out.append(struct.pack("<dddI", circle.x, circle.y, circle.radius, circle.depth))
    return b"".join(out)


def _unpack_layout(data: bytes) -> MinimapLayout:
    if not data:
        return MinimapLayout(circles={}, root_iri=Iri("urn:ontoscout:root"))
    reader = _Reader(data)
    root = Iri(reader.string())
    circles: dict[Iri, PackedCircle] = {}
    for _ in range(reader.u32()):
        iri = Iri(reader.string())
        x, y, radius, depth = struct.unpack("<dddI", reader.take(28))
        circles[iri] = PackedCircle(class_iri=iri, x=x, y=y, radius=radius, depth=depth)
    return MinimapLayout(circles=circles, root_iri=root)


def _pack_prevalence(counts: dict[Iri, int]) -> bytes:
    out = [struct.pack("<I", len(counts))]
    for iri in sorted(counts, key=lambda i: i.value):
        out.append(_pack_str(iri.value))
        out.append(struct.pack("<Q", counts[iri]))
    return b"".join(out)


def _unpack_prevalence(data: bytes) -> dict[Iri, int]:
    if not data:
        return {}
    reader = _Reader(data)
    return {
        Iri(reader.string()): struct.unpack("<Q", reader.take(8))[0]
        for _ in range(reader.u32())
    }


@dataclass
class BuildReport:
    stages: dict[str, float]
    counts: dict[str, Any]
    fallback_labels: tuple[int, ...]
    index_path: str

    def to_payload(self) -> dict[str, Any]:
        return {
            "stages": {name: round(seconds, 6) for name, seconds in self.stages.items()},
            **self.counts,
            "fallbackLabels": list(self.fallback_labels),
            "indexPath": self.index_path,
        }


class BuildFailure(OntoscoutError):
    """Wraps a stage failure so the CLI can name the failing stage."""

    code = "BuildFailure"

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}", stage=stage)
        self.stage = stage
        self.cause = cause


def build_index(config: Config) -> BuildReport:
    """Run the full build; writes the index file and returns the report."""
    stages: dict[str, float] = {}

    def run_stage(name: str, fn: Callable[[], Any]) -> Any:
        started = time.perf_counter()
        try:
            result = fn()
        except OntoscoutError as exc:
            raise BuildFailure(name, exc) from exc
        stages[name] = time.perf_counter() - started
        return result

    try:
        config.validate_for_build()
    except OntoscoutError as exc:
        raise BuildFailure("config", exc) from exc

    ontology_triples = run_stage(
        "parse", lambda: parse_rdf_file(config.ontology_path)
    )
    instance_store: InstanceStore | None = None
    if config.data_path:
        instance_triples = run_stage(
            "parse-instances", lambda: parse_rdf_file(config.data_path)
        )
        instance_store = InstanceStore(instance_triples)

    ontology = run_stage("ontology", lambda: build_ontology(ontology_triples))

    def make_documents():
        class_docs = {
            iri: class_document(ontology.classes[iri], ontology)
            for iri in sorted(ontology.classes, key=lambda i: i.value)
        }
        link_docs = {
            iri: link_document(ontology.properties[iri], ontology)
            for iri in sorted(ontology.properties, key=lambda i: i.value)
        }
        return class_docs, link_docs

    class_docs, link_docs = run_stage("documents", make_documents)

    if config.embedder == "remote":
        embedder = RemoteEmbedder(
            config.embedder_url,
            config.embedder_model or "default",
            config.dimension,
            config.timeout,
        )
    else:
        embedder = OfflineEmbedder(config.dimension)

    def make_embeddings():
        class_keys = sorted(class_docs, key=lambda i: i.value)
        link_keys = sorted(link_docs, key=lambda i: i.value)
        texts = [class_docs[k].text for k in class_keys] + [link_docs[k] for k in link_keys]
        vectors = embedder.embed_many(texts)
        class_vectors = dict(zip(class_keys, vectors[: len(class_keys)]))
        link_vectors = dict(zip(link_keys, vectors[len(class_keys) :]))
        return class_vectors, link_vectors

    class_vectors, link_vectors = run_stage("embeddings", make_embeddings)

    def make_topics():
        leaf_count = config.leaf_count or default_leaf_count(len(ontology.classes))
        skeleton = cluster_classes(class_vectors, leaf_count)
        keyworded = ctfidf_keywords(skeleton, class_docs)
        if config.labeler == "remote":
            labeler = RemoteLabeler(config.labeler_url, config.timeout)
        else:
            labeler = OfflineLabeler()
        return label_topics(keyworded, labeler, ontology)

    labeling = run_stage("topics", make_topics)
    topic_tree = labeling.tree

    def make_counts():
        if instance_store is not None:
            instance_counts = instance_store.instance_counts()
            prevalence_map = {
                iri: instance_store.predicate_count(iri) for iri in ontology.properties
            }
            return instance_counts, prevalence_map
        client = SparqlClient(config.endpoint_url, timeout=config.timeout,
                              max_get_length=config.max_get_length)
        cache = PrevalenceCache()
        prevalence_map = {}
        for iri in sorted(ontology.properties, key=lambda i: i.value):
            count = fetch_prevalence(client, iri, cache)
            if count is not None:
                prevalence_map[iri] = count
        instance_counts = {}
        for iri in sorted(ontology.classes, key=lambda i: i.value):
            rows = client.execute(
                f"SELECT (COUNT(*) AS ?c) WHERE {{ ?s a <{iri.value}> . }}"
            )
            if rows:
                cell = rows[0].get("c")
                if cell is not None and hasattr(cell, "lexical"):
                    instance_counts[iri] = int(cell.lexical)
        return instance_counts, prevalence_map

    instance_counts, prevalence_map = run_stage("counts", make_counts)
    ontology = ontology.with_counts(instance_counts, prevalence_map)

    layout = run_stage("layout", lambda: pack_hierarchy(ontology))

    def write_index():
        vectors = VectorIndex(config.dimension)
        for iri in sorted(class_vectors, key=lambda i: i.value):
            vectors.add(
                IndexedDocument(
                    key=iri, kind=KIND_CLASS, text=class_docs[iri].text,
                    vector=class_vectors[iri],
                )
            )
        for iri in sorted(link_vectors, key=lambda i: i.value):
            vectors.add(
                IndexedDocument(
                    key=iri, kind=KIND_LINK, text=link_docs[iri], vector=link_vectors[iri]
                )
            )
        for tid in sorted(topic_tree.topics):
            topic = topic_tree.topics[tid]
            text = topic.label + ": " + ", ".join(term for term, _ in topic.keywords)
            vectors.add(
                IndexedDocument(
                    key=Iri(f"{TOPIC_KEY_PREFIX}{tid}"),
                    kind=KIND_TOPIC,
                    text=text,
                    vector=topic.centroid,
                )
            )
        artifact = ExplorationIndex(
            ontology=ontology,
            vectors=vectors,
            topics=topic_tree,
            layout=layout,
            prevalence=prevalence_map,
        )
        artifact.save(config.index_path)
        return artifact

    run_stage("write", write_index)

    counts = {
        "classes": len(ontology.classes),
        "properties": len(ontology.properties),
        "ontologyTriples": ontology.ingest.triple_count,
        "ignoredTriples": ontology.ingest.ignored_count,
        "instanceTriples": len(instance_store) if instance_store is not None else None,
        "topics": len(topic_tree.topics),
        "leafTopics": len(topic_tree.leaves()),
        "indexedDocuments": len(class_docs) + len(link_docs) + len(topic_tree.topics),
        "dimension": config.dimension,
    }
    return BuildReport(
        stages=stages,
        counts=counts,
        fallback_labels=labeling.fallback_topic_ids,
        index_path=config.index_path,
    )
