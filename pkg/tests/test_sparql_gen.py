"""SPARQL generation: exact text, escaping, determinism, grammar checking
through the independent subset parser, and typed literal comparison."""

from __future__ import annotations

import random

import pytest

from ontoscout.errors import IncomparableDatatypes, InvalidGraph
from ontoscout.proto import (
    Constraint,
    PrototypeGraph,
    ProtoNode,
    add_constraint,
    add_edge,
    new_graph,
)
from ontoscout.sparqlgen import (
    compare_literal,
    generate_prevalence_count,
    generate_select,
    serialize_literal,
)
from ontoscout.sparqleval import _Filter, _filter_passes, parse_query
from ontoscout.terms import Iri, Literal

from .conftest import onto, xsd
from .oracles import random_valid_graph


def test_single_node_example(mini_model):
    graph = PrototypeGraph(nodes=(ProtoNode(0, onto("Person")),), edges=())
    query = generate_select(graph, mini_model, limit=12)
    assert query.text == (
        "SELECT ?v0 WHERE { ?v0 a <http://example.org/onto/Person> . } LIMIT 12"
    )
    assert query.node_variables == {0: "v0"}


def test_fig1_graph_full_text(mini_model):
    graph = new_graph(onto("author"), mini_model)
    graph = add_edge(graph, mini_model, 0, onto("birthPlace"))
    graph = add_edge(graph, mini_model, 1, onto("previous"))
    graph = add_constraint(
        graph, mini_model, 0,
        Constraint(onto("birthDate"), ">", Literal("1989-01-01", xsd("date"))),
    )
    query = generate_select(graph, mini_model, limit=12)
    O = "http://example.org/onto/"
    X = "http://www.w3.org/2001/XMLSchema#"
    assert query.text == (
        "SELECT ?v0 ?v1 ?v2 ?v3 ?v0_c0 WHERE { "
        f"?v0 a <{O}Person> . "
        f"?v1 a <{O}Work> . "
        f"?v2 a <{O}Place> . "
        f"?v3 a <{O}Work> . "
        f"?v0 <{O}author> ?v1 . "
        f"?v0 <{O}birthPlace> ?v2 . "
        f"?v1 <{O}previous> ?v3 . "
        f"?v0 <{O}birthDate> ?v0_c0 . "
        f'FILTER(?v0_c0 > "1989-01-01"^^<{X}date>) '
        "} LIMIT 12"
    )
    assert query.constraint_variables == {(0, 0): "v0_c0"}


def test_top_class_node_emits_no_type_triple_when_connected(mini_model):
    graph = new_graph(onto("relatedTo"), mini_model)
    query = generate_select(graph, mini_model)
    assert "Thing" not in query.text
    assert query.text.startswith(
        "SELECT ?v0 ?v1 WHERE { ?v0 <http://example.org/onto/relatedTo> ?v1 . }"
    )


def test_isolated_top_class_node_keeps_type_triple(mini_model):
    from ontoscout.ontology import TOP_CLASS

    graph = PrototypeGraph(nodes=(ProtoNode(0, TOP_CLASS),), edges=())
    query = generate_select(graph, mini_model)
    assert "<http://www.w3.org/2002/07/owl#Thing>" in query.text


def test_subclass_closure_mode_emits_property_path(mini_model):
    graph = PrototypeGraph(nodes=(ProtoNode(0, onto("Person")),), edges=())
    query = generate_select(graph, mini_model, subclass_closure=True)
    assert (
        "?v0 a/<http://www.w3.org/2000/01/rdf-schema#subClassOf>* "
        "<http://example.org/onto/Person> ." in query.text
    )
    parsed = parse_query(query.text)
    assert parsed.patterns[0].closure


def test_offset_appended_only_when_positive(mini_model):
    graph = PrototypeGraph(nodes=(ProtoNode(0, onto("Person")),), edges=())
    assert generate_select(graph, mini_model, limit=5).text.endswith("LIMIT 5")
    assert generate_select(graph, mini_model, limit=5, offset=7).text.endswith(
        "LIMIT 5 OFFSET 7"
    )


def test_limit_clamped_to_max(mini_model):
    graph = PrototypeGraph(nodes=(ProtoNode(0, onto("Person")),), edges=())
    assert generate_select(graph, mini_model, limit=10_000).limit == 200
    assert generate_select(graph, mini_model, limit=0).limit == 1
    assert generate_select(graph, mini_model).limit == 12


def test_string_escaping_example(mini_model):
    graph = new_graph(onto("author"), mini_model)
    graph = add_constraint(
        graph, mini_model, 0,
        Constraint(onto("name"), "contains", Literal('he said "hi"')),
    )
    query = generate_select(graph, mini_model)
    assert '"he said \\"hi\\""' in query.text
    parsed = parse_query(query.text)
    filters = [p for p in parsed.patterns if isinstance(p, _Filter)]
    assert filters[0].operand.lexical == 'he said "hi"'


def test_serialize_literal_escapes_controls():
    lit = Literal("a\\b\n\t\r\"")
    assert serialize_literal(lit) == '"a\\\\b\\n\\t\\r\\\""^^<http://www.w3.org/2001/XMLSchema#string>'


def test_invalid_graph_rejected(mini_model):
    broken = PrototypeGraph(
        nodes=(ProtoNode(0, onto("Person")), ProtoNode(1, onto("Work"))), edges=()
    )
    with pytest.raises(InvalidGraph):
        generate_select(broken, mini_model)


def test_deterministic_byte_identical(mini_model):
    rng_a, rng_b = random.Random(4), random.Random(4)
    for _ in range(10):
        graph_a = random_valid_graph(mini_model, rng_a)
        graph_b = random_valid_graph(mini_model, rng_b)
        assert generate_select(graph_a, mini_model).text == generate_select(
            graph_b, mini_model
        ).text


def test_every_generated_query_parses_under_subset_grammar(desk_model):
    rng = random.Random(17)
    for _ in range(40):
        graph = random_valid_graph(desk_model, rng)
        for closure in (False, True):
            query = generate_select(graph, desk_model, subclass_closure=closure)
            parsed = parse_query(query.text)
            projected = set(parsed.projection)
            assert set(query.node_variables.values()) <= projected
            assert set(query.constraint_variables.values()) <= projected


def test_prevalence_count_text():
    query = generate_prevalence_count(onto("author"))
    assert query.text == (
        "SELECT (COUNT(*) AS ?c) WHERE { ?s <http://example.org/onto/author> ?o . }"
    )
    parsed = parse_query(query.text)
    assert parsed.count_var == "c"


def test_prevalence_count_iri_with_reserved_characters():
    iri = Iri("http://ex.org/path?x=1&y=2#frag")
    query = generate_prevalence_count(iri)
    parsed = parse_query(query.text)
    pattern = parsed.patterns[0]
    assert pattern.predicate == iri


# --- compare_literal -----------------------------------------------------------


def lit(lexical, kind=None, lang=None):
    if kind is None and lang is None:
        return Literal(lexical)
    if lang is not None:
        return Literal(lexical, language=lang)
    return Literal(lexical, xsd(kind))


def test_date_comparison():
    assert compare_literal(lit("1990-05-01", "date"), ">", lit("1989-01-01", "date"))
    assert not compare_literal(lit("1988-05-01", "date"), ">", lit("1989-01-01", "date"))


def test_numeric_not_lexical():
    assert not compare_literal(lit("10", "integer"), "<", lit("9", "integer"))
    assert compare_literal(lit("9", "integer"), "<", lit("10", "integer"))


def test_cross_numeric_families_compare_by_value():
    assert compare_literal(lit("2.50", "decimal"), "=", lit("2.5", "decimal"))
    assert compare_literal(lit("3", "integer"), "<", lit("3.5", "decimal"))
    assert compare_literal(lit("2", "integer"), "=", lit("2.0", "double"))


def test_string_bytewise_and_contains():
    assert compare_literal(lit("abc"), "<", lit("abd"))
    assert compare_literal(lit("hello world"), "contains", lit("lo wo"))
    assert not compare_literal(lit("hello"), "contains", lit("xyz"))


def test_equality_across_families_is_inequality():
    assert not compare_literal(lit("5", "integer"), "=", lit("5"))
    assert compare_literal(lit("5", "integer"), "!=", lit("5"))


def test_incomparable_raises():
    with pytest.raises(IncomparableDatatypes):
        compare_literal(lit("5", "integer"), "<", lit("abc"))
    with pytest.raises(IncomparableDatatypes):
        compare_literal(lit("2020-01-01", "date"), "<", lit("2020-01-01T00:00:00", "dateTime"))
    with pytest.raises(IncomparableDatatypes):
        compare_literal(lit("abc"), "contains", lit("5", "integer"))


def _random_literal(rng: random.Random) -> Literal:
    kind = rng.choice(["integer", "decimal", "double", "date", "dateTime", "string"])
    if kind == "integer":
        return lit(str(rng.randint(-50, 50)), "integer")
    if kind == "decimal":
        return lit(f"{rng.randint(-20, 20)}.{rng.randint(0, 99):02d}", "decimal")
    if kind == "double":
        return lit(f"{rng.randint(-9, 9)}.{rng.randint(0, 9)}e{rng.randint(-3, 3)}", "double")
    if kind == "date":
        return lit(f"{rng.randint(1980, 2020)}-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}", "date")
    if kind == "dateTime":
        return lit(
            f"{rng.randint(1980, 2020)}-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}"
            f"T{rng.randint(0, 23):02d}:{rng.randint(0, 59):02d}:{rng.randint(0, 59):02d}",
            "dateTime",
        )
    return lit(rng.choice(["", "a", "ab", "ba", "hello", "héllo", "Zz"]))


def test_differential_verdicts_against_evaluator_filter():
    """compare_literal and the independently written evaluator FILTER agree
    on randomized pairs; a raised incomparability equals row elimination."""
    rng = random.Random(2024)
    operators = ["=", "!=", "<", "<=", ">", ">=", "contains"]
    checked = 0
    for _ in range(600):
        a, b = _random_literal(rng), _random_literal(rng)
        op = rng.choice(operators)
        try:
            expected = compare_literal(a, op, b)
        except IncomparableDatatypes:
            expected = False  # FILTER type error eliminates the row
        got = _filter_passes(a, _Filter(variable="x", operator=op, operand=b))
        assert got == expected, f"{a} {op} {b}"
        checked += 1
    assert checked == 600
