"""Guidance layer: start-link retrieval from selected topics and semantic
search over outgoing links and constraint properties.

Candidates are hard-filtered by the ontology first (domain compatibility,
property kind), then soft-ranked by cosine against the query embedding, so
every suggestion is admissible by construction: feeding one to add_edge or
add_constraint on the queried class never raises a domain violation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable

import numpy as np

from .embed import cosine, l2_normalize
from .errors import UnknownClass, UnknownTopic
from .index import KIND_LINK, VectorIndex
from .ontology import OntologyModel, PropertyDef, TOP_CLASS
from .terms import Iri
from .topics import TopicTree

DEFAULT_START_LINKS = 10
DEFAULT_EXPANSION_LINKS = 20


@dataclass(frozen=True)
class Suggestion:
    property_iri: Iri
    label: str
    score: float
    prevalence: int | None  # None = unknown (distinct from 0)
    domain_class: Iri
    range_class_or_datatype: Iri
    kind: str

    def to_payload(self) -> dict[str, Any]:
        return {
            "propertyIri": self.property_iri.value,
            "label": self.label,
            "score": self.score,
            "prevalence": self.prevalence,
            "domainClass": self.domain_class.value,
            "rangeClassOrDatatype": self.range_class_or_datatype.value,
            "kind": self.kind,
        }


def link_document(prop: PropertyDef, ontology: OntologyModel) -> str:
    """Template embedded for every property (object and datatype kind)."""
    if prop.domain is not None:
        domain_label = ontology.class_label(prop.domain)
    else:
        domain_label = "anything"
    if prop.range is not None:
        range_label = (
            ontology.class_label(prop.range)
            if ontology.has_class(prop.range)
            else prop.range.local_name()
        )
    else:
        range_label = "anything"
    return f"Link: {prop.label}. Connects {domain_label} to {range_label}."


def _suggestion(
    prop: PropertyDef, score: float, prevalence: dict[Iri, int] | None
) -> Suggestion:
    known = None if prevalence is None else prevalence.get(prop.iri)
    return Suggestion(
        property_iri=prop.iri,
        label=prop.label,
        score=score,
        prevalence=known,
        domain_class=prop.domain if prop.domain is not None else TOP_CLASS,
        range_class_or_datatype=prop.range if prop.range is not None else TOP_CLASS,
        kind=prop.kind,
    )


def start_links(
    topic_ids: Iterable[int],
    tree: TopicTree,
    index: VectorIndex,
    ontology: OntologyModel,
    k: int = DEFAULT_START_LINKS,
    prevalence: dict[Iri, int] | None = None,
) -> list[Suggestion]:
    """Object properties ranked against the normalized mean of the selected
    topic centroids. Duplicate topic selections are set-semantic."""
    ids = sorted(set(topic_ids))
    if not ids:
        raise UnknownTopic("at least one topic id is required")
    centroids = [tree.get(tid).centroid for tid in ids]
    query = l2_normalize(np.mean(centroids, axis=0))

    ranked = index.top_k(query, k=len(index) or 1, kinds={KIND_LINK})
    out: list[Suggestion] = []
    for key, score in ranked:
        prop = ontology.properties.get(key)
        if prop is None or prop.kind != "object":
            continue
        out.append(_suggestion(prop, score, prevalence))
        if len(out) == k:
            break
    return out


def _expansion_candidates(
    class_iri: Iri, ontology: OntologyModel, kind: str
) -> list[PropertyDef]:
    if not ontology.has_class(class_iri):
        raise UnknownClass(f"unknown class {class_iri.value}", classIri=class_iri.value)
    out = []
    for iri in sorted(ontology.properties, key=lambda i: i.value):
        prop = ontology.properties[iri]
        if prop.kind != kind:
            continue
        domain = prop.domain if prop.domain is not None else TOP_CLASS
        if ontology.is_descendant_or_self(class_iri, domain):
            out.append(prop)
    return out


def _rank_candidates(
    candidates: list[PropertyDef],
    query_text: str,
    index: VectorIndex,
    embedder,
    k: int,
    prevalence: dict[Iri, int] | None,
) -> list[Suggestion]:
    if not query_text.strip():
        # no query: steer by prevalence (unknown counts sink to the bottom)
        def sort_key(prop: PropertyDef):
            known = None if prevalence is None else prevalence.get(prop.iri)
            return (-(known if known is not None else -1), prop.iri.value)

        ordered = sorted(candidates, key=sort_key)
        return [_suggestion(p, 0.0, prevalence) for p in ordered[:k]]

    query = embedder.embed(query_text)
    scored = []
    for prop in candidates:
        entry = index.get(KIND_LINK, prop.iri)
        if entry is None:
            continue
        scored.append((prop, cosine(query, entry.vector)))
    scored.sort(key=lambda pair: (-pair[1], pair[0].iri.value))
    return [_suggestion(p, s, prevalence) for p, s in scored[:k]]


def search_out_links(
    class_iri: Iri,
    query_text: str,
    ontology: OntologyModel,
    index: VectorIndex,
    embedder,
    k: int = DEFAULT_EXPANSION_LINKS,
    prevalence: dict[Iri, int] | None = None,
) -> list[Suggestion]:
    """Fuzzy search over the object properties leaving a class (its own
    domain, an ancestor's, or no declared domain)."""
    candidates = _expansion_candidates(class_iri, ontology, "object")
    return _rank_candidates(candidates, query_text, index, embedder, k, prevalence)


def search_constraints(
    class_iri: Iri,
    query_text: str,
    ontology: OntologyModel,
    index: VectorIndex,
    embedder,
    k: int = DEFAULT_EXPANSION_LINKS,
    prevalence: dict[Iri, int] | None = None,
) -> list[Suggestion]:
    """Same search over datatype properties (constraint targets)."""
    candidates = _expansion_candidates(class_iri, ontology, "datatype")
    return _rank_candidates(candidates, query_text, index, embedder, k, prevalence)
