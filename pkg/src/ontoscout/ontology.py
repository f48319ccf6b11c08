"""Ontology schema model built from declaration triples.

Recognized vocabulary: rdfs:Class / owl:Class declarations, rdfs:subClassOf,
owl:ObjectProperty / owl:DatatypeProperty / rdf:Property declarations,
rdfs:domain, rdfs:range, and rdfs:label. Everything else is ignored and only
counted in the ingestion report.

The special class owl:Thing is treated as an implicit top class: it resolves
whether or not the ontology declares it, and every class counts as its
descendant. Prototype nodes fall back to it when a property has no declared
domain or range.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

from .errors import CyclicHierarchy
from .terms import (
    OWL_NS,
    OWL_THING,
    RDF_NS,
    RDFS_LABEL,
    RDFS_NS,
    RDFS_SUBCLASSOF,
    RDF_TYPE,
    XSD,
    Iri,
    Literal,
    Triple,
)

_CLASS_TYPES = {RDFS_NS + "Class", OWL_NS + "Class"}
_OBJECT_PROPERTY_TYPES = {OWL_NS + "ObjectProperty"}
_DATATYPE_PROPERTY_TYPES = {OWL_NS + "DatatypeProperty"}
_PLAIN_PROPERTY_TYPE = RDF_NS + "Property"
_DOMAIN = RDFS_NS + "domain"
_RANGE = RDFS_NS + "range"

TOP_CLASS = Iri(OWL_THING)


@dataclass(frozen=True)
class OntologyClass:
    iri: Iri
    label: str
    parents: frozenset[Iri]
    instance_count: int = 0


@dataclass(frozen=True)
class PropertyDef:
    iri: Iri
    label: str
    kind: str  # "object" | "datatype"
    domain: Iri | None
    range: Iri | None
    prevalence: int = 0


@dataclass(frozen=True)
class IngestStats:
    class_count: int
    property_count: int
    triple_count: int
    ignored_count: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "classes": self.class_count,
                "properties": self.property_count,
                "triples": self.triple_count,
                "ignoredTriples": self.ignored_count,
            },
            separators=(",", ":"),
        )


@dataclass(frozen=True)
class OntologyModel:
    classes: dict[Iri, OntologyClass]
    properties: dict[Iri, PropertyDef]
    ingest: IngestStats = field(compare=False, default=IngestStats(0, 0, 0, 0))

    def resolve_class(self, iri: Iri) -> OntologyClass | None:
        cls = self.classes.get(iri)
        if cls is None and iri == TOP_CLASS:
            return OntologyClass(TOP_CLASS, "Thing", frozenset())
        return cls

    def has_class(self, iri: Iri) -> bool:
        return iri in self.classes or iri == TOP_CLASS

    def ancestors(self, iri: Iri) -> frozenset[Iri]:
        """All strict ancestors of a class (never includes the class itself)."""
        out: set[Iri] = set()
        stack = [iri]
        while stack:
            current = self.classes.get(stack.pop())
            if current is None:
                continue
            for parent in current.parents:
                if parent not in out:
                    out.add(parent)
                    stack.append(parent)
        return frozenset(out)

    def is_descendant_or_self(self, iri: Iri, ancestor: Iri) -> bool:
        """Whether ``iri`` is ``ancestor`` or below it; owl:Thing is above all."""
        if ancestor == TOP_CLASS or iri == ancestor:
            return True
        return ancestor in self.ancestors(iri)

    def class_label(self, iri: Iri) -> str:
        cls = self.resolve_class(iri)
        return cls.label if cls is not None else iri.local_name()

    def with_counts(
        self,
        instance_counts: dict[Iri, int] | None = None,
        prevalence: dict[Iri, int] | None = None,
    ) -> "OntologyModel":
        """A copy with instance counts and/or property prevalence filled in."""
        classes = dict(self.classes)
        if instance_counts:
            for iri, count in instance_counts.items():
                cls = classes.get(iri)
                if cls is not None:
                    classes[iri] = OntologyClass(cls.iri, cls.label, cls.parents, count)
        properties = dict(self.properties)
        if prevalence:
            for iri, count in prevalence.items():
                prop = properties.get(iri)
                if prop is not None:
                    properties[iri] = PropertyDef(
                        prop.iri, prop.label, prop.kind, prop.domain, prop.range, count
                    )
        return OntologyModel(classes, properties, self.ingest)


def _check_acyclic(parents: dict[Iri, set[Iri]]) -> None:
    WHITE, GRAY, BLACK = 0, 1, 2
    state: dict[Iri, int] = {iri: WHITE for iri in parents}
    for start in sorted(parents, key=lambda i: i.value):
        if state[start] != WHITE:
            continue
        path: list[Iri] = []
        stack: list[tuple[Iri, Iterable[Iri]]] = [(start, iter(sorted(parents[start], key=lambda i: i.value)))]
        state[start] = GRAY
        path.append(start)
        while stack:
            node, edges = stack[-1]
            advanced = False
            for parent in edges:
                if parent not in parents:
                    continue
                if state[parent] == GRAY:
                    cycle_start = path.index(parent)
                    members = [iri.value for iri in path[cycle_start:]]
                    raise CyclicHierarchy(
                        "subclass hierarchy contains a cycle: " + " -> ".join(members),
                        members=members,
                    )
                if state[parent] == WHITE:
                    state[parent] = GRAY
                    path.append(parent)
                    stack.append((parent, iter(sorted(parents[parent], key=lambda i: i.value))))
                    advanced = True
                    break
            if not advanced:
                state[node] = BLACK
                path.pop()
                stack.pop()


def build_ontology(triples: Iterable[Triple]) -> OntologyModel:
    """Assemble an OntologyModel from declaration triples.

    Deterministic and order-insensitive: any permutation of the input yields
    an equal model. Unknown vocabulary is ignored (counted in ``ingest``).
    Raises CyclicHierarchy when subclass edges form a cycle.
    """
    class_iris: set[Iri] = set()
    object_props: set[Iri] = set()
    datatype_props: set[Iri] = set()
    plain_props: set[Iri] = set()
    parents: dict[Iri, set[Iri]] = {}
    labels: dict[Iri, str] = {}
    domains: dict[Iri, Iri] = {}
    ranges: dict[Iri, Iri] = {}

    total = 0
    used = 0
    for triple in triples:
        total += 1
        s, p, o = triple.subject, triple.predicate, triple.object
        if p.value == RDF_TYPE and isinstance(o, Iri):
            if o.value in _CLASS_TYPES:
                class_iris.add(s)
                used += 1
            elif o.value in _OBJECT_PROPERTY_TYPES:
                object_props.add(s)
                used += 1
            elif o.value in _DATATYPE_PROPERTY_TYPES:
                datatype_props.add(s)
                used += 1
            elif o.value == _PLAIN_PROPERTY_TYPE:
                plain_props.add(s)
                used += 1
        elif p.value == RDFS_SUBCLASSOF and isinstance(o, Iri):
            class_iris.add(s)
            class_iris.add(o)
            parents.setdefault(s, set()).add(o)
            used += 1
        elif p.value == RDFS_LABEL and isinstance(o, Literal):
            # first label wins by ascending lexical form for determinism
            if s not in labels or o.lexical < labels[s]:
                labels[s] = o.lexical
            used += 1
        elif p.value == _DOMAIN and isinstance(o, Iri):
            domains[s] = o
            used += 1
        elif p.value == _RANGE and isinstance(o, Iri):
            ranges[s] = o
            used += 1

    for iri in class_iris:
        parents.setdefault(iri, set())
    # parent references must resolve within the model
    for child, parent_set in parents.items():
        parent_set.intersection_update(class_iris)
    _check_acyclic(parents)

    classes: dict[Iri, OntologyClass] = {}
    for iri in sorted(class_iris, key=lambda i: i.value):
        classes[iri] = OntologyClass(
            iri=iri,
            label=labels.get(iri, iri.local_name()),
            parents=frozenset(parents[iri]),
        )

    def _kind_for(iri: Iri) -> str:
        if iri in datatype_props:
            return "datatype"
        if iri in object_props:
            return "object"
        # rdf:Property: datatype when the range is an XSD datatype, else object
        rng = ranges.get(iri)
        if rng is not None and rng.value.startswith(XSD):
            return "datatype"
        return "object"

    properties: dict[Iri, PropertyDef] = {}
    for iri in sorted(object_props | datatype_props | plain_props, key=lambda i: i.value):
        kind = _kind_for(iri)
        domain = domains.get(iri)
        rng = ranges.get(iri)
        if domain is not None and domain not in classes and domain != TOP_CLASS:
            domain = None
        if kind == "object" and rng is not None and rng not in classes and rng != TOP_CLASS:
            rng = None
        properties[iri] = PropertyDef(
            iri=iri,
            label=labels.get(iri, iri.local_name()),
            kind=kind,
            domain=domain,
            range=rng,
        )

    stats = IngestStats(
        class_count=len(classes),
        property_count=len(properties),
        triple_count=total,
        ignored_count=total - used,
    )
    return OntologyModel(classes, properties, stats)
