"""match_bgp against three independent oracles: a hand-enumerated binding
table for the canonical four-node flow, a nested-loop join for chains, and
exhaustive enumeration over all IRI assignments for small stores."""

from __future__ import annotations

import random
from collections import Counter
from itertools import product

import pytest

from ontoscout.errors import IncomparableDatatypes, InvalidGraph
from ontoscout.ontology import TOP_CLASS, OntologyModel
from ontoscout.proto import (
    Constraint,
    PrototypeGraph,
    ProtoEdge,
    ProtoNode,
    add_constraint,
    add_edge,
    constraint_variable,
    new_graph,
    node_variable,
)
from ontoscout.sparqlgen import compare_literal
from ontoscout.store import InstanceStore, match_bgp
from ontoscout.terms import Iri, Literal, Triple, RDF_TYPE, XSD_DATE

from .conftest import kg, onto, xsd


def binding_key(binding):
    return frozenset((var, str(term)) for var, term in binding.items())


def as_multiset(bindings):
    return Counter(binding_key(b) for b in bindings)


def exhaustive_match(
    store: InstanceStore,
    ontology: OntologyModel,
    graph: PrototypeGraph,
    subclass_closure: bool,
):
    """Direct enumeration of all |IRIs|^|nodes| assignments."""
    universe = sorted(store.all_iris(), key=lambda i: i.value)
    triple_set = set(store.triples)

    def has_type(instance: Iri, class_iri: Iri) -> bool:
        for t in store.matching(instance, Iri(RDF_TYPE)):
            declared = t.object
            if not isinstance(declared, Iri):
                continue
            if declared == class_iri:
                return True
            if subclass_closure and class_iri in ontology.ancestors(declared):
                return True
        return False

    results = []
    nodes = sorted(graph.nodes, key=lambda n: n.node_id)
    for assignment in product(universe, repeat=len(nodes)):
        mapping = {node.node_id: iri for node, iri in zip(nodes, assignment)}
        ok = True
        for node in nodes:
            if node.class_iri == TOP_CLASS and graph.node_degree(node.node_id) > 0:
                continue
            if not has_type(mapping[node.node_id], node.class_iri):
                ok = False
                break
        if not ok:
            continue
        for edge in graph.edges:
            wanted = Triple(
                mapping[edge.source_node_id], edge.property_iri, mapping[edge.target_node_id]
            )
            if wanted not in triple_set:
                ok = False
                break
        if not ok:
            continue
        per_constraint_values: list[tuple[str, list[Literal]]] = []
        for node in nodes:
            for c_idx, constraint in enumerate(node.constraints):
                values = []
                for t in store.matching(mapping[node.node_id], constraint.property_iri):
                    if not isinstance(t.object, Literal):
                        continue
                    try:
                        passes = compare_literal(t.object, constraint.operator, constraint.operand)
                    except IncomparableDatatypes:
                        passes = False
                    if passes:
                        values.append(t.object)
                per_constraint_values.append(
                    (constraint_variable(node.node_id, c_idx), values)
                )
        if any(not values for _, values in per_constraint_values):
            continue
        base = {node_variable(nid): iri for nid, iri in mapping.items()}
        combos = [[]]
        for var, values in per_constraint_values:
            combos = [prefix + [(var, v)] for prefix in combos for v in values]
        for combo in combos:
            binding = dict(base)
            binding.update(combo)
            results.append(binding)
    return results


@pytest.fixture()
def fig1_graph(desk_model):
    graph = new_graph(onto("author"), desk_model)
    graph = add_edge(graph, desk_model, 0, onto("birthPlace"))
    graph = add_edge(graph, desk_model, 1, onto("previous"))
    return add_constraint(
        graph,
        desk_model,
        0,
        Constraint(onto("birthDate"), ">", Literal("1989-01-01", xsd("date"))),
    )


def test_single_node_no_instances_is_empty(mini_model):
    store = InstanceStore([Triple(kg("x"), Iri(RDF_TYPE), onto("Club"))])
    graph = PrototypeGraph(nodes=(ProtoNode(0, onto("Person")),), edges=())
    assert match_bgp(store, mini_model, graph) == []


def test_fig1_prototype_over_hand_fixture(fig1_store, desk_model, fig1_graph):
    """The ten-triple fixture admits exactly one binding, enumerated by hand:
    alice authored book2 (whose previous work is book1), was born in paris,
    and her birth date 1990-05-01 passes the > 1989-01-01 constraint."""
    expected = {
        "v0": kg("alice"),
        "v1": kg("book2"),
        "v2": kg("paris"),
        "v3": kg("book1"),
        "v0_c0": Literal("1990-05-01", xsd("date")),
    }
    for closure in (False, True):
        result = match_bgp(fig1_store, desk_model, fig1_graph, subclass_closure=closure)
        assert as_multiset(result) == as_multiset([expected])


def test_fig1_matches_exhaustive_enumeration(fig1_store, desk_model, fig1_graph):
    got = match_bgp(fig1_store, desk_model, fig1_graph, subclass_closure=False)
    oracle = exhaustive_match(fig1_store, desk_model, fig1_graph, subclass_closure=False)
    assert as_multiset(got) == as_multiset(oracle)


def _chain_store():
    triples = []
    for i in range(6):
        triples.append(Triple(kg(f"p{i}"), Iri(RDF_TYPE), onto("Person")))
        triples.append(Triple(kg(f"w{i}"), Iri(RDF_TYPE), onto("Work")))
    author = onto("author")
    rng = random.Random(11)
    for i in range(6):
        for j in rng.sample(range(6), 3):
            triples.append(Triple(kg(f"p{i}"), author, kg(f"w{j}")))
    return InstanceStore(triples)


def test_two_node_chain_equals_nested_loop_join(mini_model):
    """Independent oracle: nested loops over the type extents, probing the
    edge triples directly."""
    store = _chain_store()
    graph = PrototypeGraph(
        nodes=(ProtoNode(0, onto("Person")), ProtoNode(1, onto("Work"))),
        edges=(ProtoEdge(0, 1, onto("author")),),
    )
    triple_set = set(store.triples)
    oracle = []
    for person in sorted(store.subjects_of_type(onto("Person")), key=str):
        for work in sorted(store.subjects_of_type(onto("Work")), key=str):
            if Triple(person, onto("author"), work) in triple_set:
                oracle.append({"v0": person, "v1": work})
    got = match_bgp(store, mini_model, graph, subclass_closure=False)
    assert as_multiset(got) == as_multiset(oracle)
    assert len(got) == 18


@pytest.fixture(scope="module")
def permissive_model():
    """Properties without domains/ranges so every random graph validates;
    domain/range enforcement has its own tests."""
    from .conftest import decl_class, decl_property
    from ontoscout.ontology import build_ontology

    triples = (
        decl_class("Person")
        + decl_class("Athlete", "Person")
        + decl_class("Work")
        + decl_class("Club")
        + decl_property("author", "object", None, None)
        + decl_property("team", "object", None, None)
        + decl_property("relatedTo", "object", None, None)
        + decl_property("previous", "object", None, None)
        + decl_property("birthDate", "datatype", None, "date")
    )
    return build_ontology(triples)


def _random_small_case(seed: int):
    rng = random.Random(seed)
    classes = ["Person", "Athlete", "Work", "Club"]
    triples = []
    subjects = []
    for i in range(rng.randint(4, 8)):
        cls = rng.choice(classes)
        subject = kg(f"e{i}")
        subjects.append(subject)
        triples.append(Triple(subject, Iri(RDF_TYPE), onto(cls)))
    for _ in range(rng.randint(4, 14)):
        prop = rng.choice(["author", "team", "relatedTo", "previous"])
        s, o = rng.choice(subjects), rng.choice(subjects)
        if s != o:
            triples.append(Triple(s, onto(prop), o))
    for subject in subjects:
        if rng.random() < 0.5:
            year = rng.randint(1980, 2000)
            triples.append(
                Triple(subject, onto("birthDate"), Literal(f"{year}-06-15", Iri(XSD_DATE)))
            )
    node_count = rng.randint(1, 3)
    nodes = []
    for node_id in range(node_count):
        nodes.append(ProtoNode(node_id, onto(rng.choice(classes + ["Person"]))))
    edges = tuple(
        ProtoEdge(rng.randint(0, nid - 1), nid, onto(rng.choice(["author", "team", "relatedTo"])))
        for nid in range(1, node_count)
    )
    if rng.random() < 0.6:
        constraint = Constraint(
            onto("birthDate"), rng.choice([">", "<", ">=", "<="]),
            Literal(f"{rng.randint(1980, 2000)}-01-01", Iri(XSD_DATE)),
        )
        target = rng.randrange(node_count)
        nodes[target] = ProtoNode(target, nodes[target].class_iri, (constraint,))
    return InstanceStore(triples), PrototypeGraph(nodes=tuple(nodes), edges=edges)


@pytest.mark.parametrize("seed", range(30))
def test_matches_exhaustive_enumeration_on_random_cases(permissive_model, seed):
    store, graph = _random_small_case(seed)
    from ontoscout.proto import validate_graph

    assert not validate_graph(graph, permissive_model)
    for closure in (False, True):
        got = match_bgp(store, permissive_model, graph, subclass_closure=closure)
        oracle = exhaustive_match(store, permissive_model, graph, subclass_closure=closure)
        assert as_multiset(got) == as_multiset(oracle), f"seed={seed} closure={closure}"


def test_subclass_closure_widens_the_match(mini_model):
    store = InstanceStore(
        [
            Triple(kg("a"), Iri(RDF_TYPE), onto("Athlete")),
            Triple(kg("p"), Iri(RDF_TYPE), onto("Person")),
        ]
    )
    graph = PrototypeGraph(nodes=(ProtoNode(0, onto("Person")),), edges=())
    blind = match_bgp(store, mini_model, graph, subclass_closure=False)
    closed = match_bgp(store, mini_model, graph, subclass_closure=True)
    assert {b["v0"] for b in blind} == {kg("p")}
    assert {b["v0"] for b in closed} == {kg("p"), kg("a")}


def test_duplicate_store_triples_match_once(mini_model):
    """The store keeps the multiset but matches like an RDF graph (a set)."""
    triples = [
        Triple(kg("p"), Iri(RDF_TYPE), onto("Person")),
        Triple(kg("w"), Iri(RDF_TYPE), onto("Work")),
        Triple(kg("p"), onto("author"), kg("w")),
        Triple(kg("p"), onto("author"), kg("w")),  # duplicate line
    ]
    store = InstanceStore(triples)
    assert len(store.triples) == 4
    assert store.predicate_count(onto("author")) == 1
    graph = PrototypeGraph(
        nodes=(ProtoNode(0, onto("Person")), ProtoNode(1, onto("Work"))),
        edges=(ProtoEdge(0, 1, onto("author")),),
    )
    assert len(match_bgp(store, mini_model, graph)) == 1


def test_invalid_graph_is_rejected(mini_model):
    broken = PrototypeGraph(
        nodes=(ProtoNode(0, onto("Person")), ProtoNode(1, onto("Work"))),
        edges=(),
    )
    store = InstanceStore([])
    with pytest.raises(InvalidGraph):
        match_bgp(store, mini_model, broken)


def test_two_constraints_on_multivalued_property_cross_product(mini_model):
    """Two bounds become two patterns with separate variables, so two
    matching values yield the full cross product, as in the generated text."""
    store = InstanceStore(
        [
            Triple(kg("p"), Iri(RDF_TYPE), onto("Person")),
            Triple(kg("p"), onto("birthDate"), Literal("1990-01-01", Iri(XSD_DATE))),
            Triple(kg("p"), onto("birthDate"), Literal("1995-01-01", Iri(XSD_DATE))),
        ]
    )
    node = ProtoNode(
        0,
        onto("Person"),
        (
            Constraint(onto("birthDate"), ">", Literal("1980-01-01", Iri(XSD_DATE))),
            Constraint(onto("birthDate"), "<", Literal("2000-01-01", Iri(XSD_DATE))),
        ),
    )
    graph = PrototypeGraph(nodes=(node,), edges=())
    got = match_bgp(store, mini_model, graph)
    assert len(got) == 4  # 2 values for c0 x 2 values for c1
    oracle = exhaustive_match(store, mini_model, graph, subclass_closure=True)
    assert as_multiset(got) == as_multiset(oracle)
