"""Circle packing: the forced small cases, sibling/containment invariants on
random hierarchies, determinism, and highlight semantics."""

from __future__ import annotations

import math
import random
import time

import pytest

from ontoscout.errors import UnknownClass
from ontoscout.layout import (
    MinimapLayout,
    VIRTUAL_ROOT_IRI,
    highlight_classes,
    pack_hierarchy,
)
from ontoscout.ontology import OntologyModel, OntologyClass, build_ontology
from ontoscout.proto import PrototypeGraph, ProtoEdge, ProtoNode
from ontoscout.terms import Iri

from .conftest import decl_class, onto


def model_with_counts(model: OntologyModel, counts) -> OntologyModel:
    return model.with_counts(instance_counts={onto(k): v for k, v in counts.items()})


def test_single_class_unit_circle():
    model = build_ontology(decl_class("Solo"))
    layout = pack_hierarchy(model)
    circle = layout.circles[onto("Solo")]
    assert circle.radius == pytest.approx(1.0)
    assert circle.depth == 0
    assert layout.root_iri == onto("Solo")


def test_radius_follows_instance_count():
    model = model_with_counts(build_ontology(decl_class("Solo")), {"Solo": 8})
    layout = pack_hierarchy(model)
    assert layout.circles[onto("Solo")].radius == pytest.approx(3.0)  # sqrt(1+8)


def test_parent_with_one_child_is_concentric_with_padding():
    model = build_ontology(decl_class("Parent") + decl_class("Kid", "Parent"))
    layout = pack_hierarchy(model)
    parent = layout.circles[onto("Parent")]
    kid = layout.circles[onto("Kid")]
    assert parent.radius == pytest.approx(1.1)
    assert kid.radius == pytest.approx(1.0)
    assert (parent.x, parent.y) == pytest.approx((kid.x, kid.y))
    assert parent.depth == 0 and kid.depth == 1


def test_parent_with_two_unit_children():
    model = build_ontology(
        decl_class("Parent") + decl_class("A", "Parent") + decl_class("B", "Parent")
    )
    layout = pack_hierarchy(model)
    a, b = layout.circles[onto("A")], layout.circles[onto("B")]
    parent = layout.circles[onto("Parent")]
    distance = math.hypot(a.x - b.x, a.y - b.y)
    assert distance == pytest.approx(2.0)  # tangent unit circles
    assert parent.radius == pytest.approx(2.2)  # enclosing radius 2 x 1.1


def test_multiple_roots_get_virtual_root():
    model = build_ontology(decl_class("A") + decl_class("B"))
    layout = pack_hierarchy(model)
    assert layout.root_iri == Iri(VIRTUAL_ROOT_IRI)
    assert set(layout.circles) == {onto("A"), onto("B")}


def _random_hierarchy_model(n: int, seed: int) -> OntologyModel:
    """Each class attaches to a random earlier class (or becomes a root)."""
    rng = random.Random(seed)
    classes: dict[Iri, OntologyClass] = {}
    names = [f"C{i:04d}" for i in range(n)]
    for i, name in enumerate(names):
        if i == 0 or rng.random() < 0.03:
            parents = frozenset()
        else:
            parents = frozenset({onto(names[rng.randrange(i)])})
        classes[onto(name)] = OntologyClass(
            iri=onto(name),
            label=name,
            parents=parents,
            instance_count=rng.randint(0, 400),
        )
    return OntologyModel(classes=classes, properties={})


def _check_invariants(model: OntologyModel, layout: MinimapLayout) -> None:
    children: dict[Iri, list[Iri]] = {}
    for iri, cls in model.classes.items():
        if cls.parents:
            parent = min(cls.parents, key=lambda p: p.value)
            children.setdefault(parent, []).append(iri)
    for parent_iri, kids in children.items():
        parent = layout.circles[parent_iri]
        for i, kid_iri in enumerate(kids):
            kid = layout.circles[kid_iri]
            # containment
            dist = math.hypot(kid.x - parent.x, kid.y - parent.y)
            assert dist + kid.radius <= parent.radius + 1e-6 * parent.radius
            assert kid.depth == parent.depth + 1
            # sibling disjointness
            for other_iri in kids[i + 1 :]:
                other = layout.circles[other_iri]
                gap = math.hypot(kid.x - other.x, kid.y - other.y)
                assert gap >= kid.radius + other.radius - 1e-6 * max(kid.radius, other.radius)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_invariants_on_random_hierarchies(seed):
    model = _random_hierarchy_model(200, seed)
    layout = pack_hierarchy(model)
    assert set(layout.circles) == set(model.classes)
    _check_invariants(model, layout)


def test_thousand_class_hierarchy_under_one_second_and_deterministic():
    model = _random_hierarchy_model(1000, 42)
    started = time.perf_counter()
    layout = pack_hierarchy(model)
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    assert len(layout.circles) == 1000
    _check_invariants(model, layout)
    again = pack_hierarchy(model)
    assert layout == again


def test_fixture_layout_deterministic(desk_model, artifact):
    fresh = pack_hierarchy(
        desk_model.with_counts(
            instance_counts={
                iri: cls.instance_count for iri, cls in artifact.ontology.classes.items()
            }
        )
    )
    assert fresh == artifact.layout


def test_multi_parent_class_placed_under_smallest_parent(artifact):
    # TelevisionStation has parents BroadcastNetwork and Organisation;
    # lexicographically smallest is .../BroadcastNetwork
    station = artifact.layout.circles[onto("TelevisionStation")]
    network = artifact.layout.circles[onto("BroadcastNetwork")]
    dist = math.hypot(station.x - network.x, station.y - network.y)
    assert dist + station.radius <= network.radius * (1 + 1e-6)
    assert station.depth == network.depth + 1


def test_highlight_distinct_classes_once(artifact):
    graph = PrototypeGraph(
        nodes=(
            ProtoNode(0, onto("Person")),
            ProtoNode(1, onto("Work")),
            ProtoNode(2, onto("Work")),
        ),
        edges=(
            ProtoEdge(0, 1, onto("author")),
            ProtoEdge(0, 2, onto("author")),
        ),
    )
    highlights = highlight_classes(artifact.layout, graph)
    assert [iri.value for iri, _ in highlights] == [onto("Person").value, onto("Work").value]


def test_highlight_local_hierarchy_shares_ancestor(artifact):
    graph = PrototypeGraph(
        nodes=(ProtoNode(0, onto("Athlete")), ProtoNode(1, onto("Coach"))),
        edges=(ProtoEdge(0, 1, onto("trainer")),),
    )
    highlights = dict(highlight_classes(artifact.layout, graph))
    person = artifact.layout.circles[onto("Person")]
    for circle in highlights.values():
        dist = math.hypot(circle.x - person.x, circle.y - person.y)
        assert dist + circle.radius <= person.radius * (1 + 1e-6)


def test_highlight_unknown_class_raises(artifact):
    graph = PrototypeGraph(nodes=(ProtoNode(0, onto("Ghost")),), edges=())
    with pytest.raises(UnknownClass):
        highlight_classes(artifact.layout, graph)


def test_highlight_skips_top_class(artifact, desk_model):
    from ontoscout.proto import new_graph

    graph = new_graph(onto("relatedTo"), desk_model)  # both nodes owl:Thing
    assert highlight_classes(artifact.layout, graph) == []


def test_layout_payload_sorted_by_iri(artifact):
    payload = artifact.layout.to_payload()
    iris = [c["classIri"] for c in payload["circles"]]
    assert iris == sorted(iris)
