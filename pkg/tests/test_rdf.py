"""Parser and serializer tests, including the independent line-oriented
N-Triples counter used to audit the fixture files."""

from __future__ import annotations

import re
from collections import Counter
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from ontoscout.errors import RdfSyntaxError, UnsupportedFeature
from ontoscout.rdfio import parse_rdf, serialize_ntriples
from ontoscout.terms import Iri, Literal, Triple, RDF_TYPE, XSD_DATE, XSD_DECIMAL, XSD_INTEGER

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

# Independent oracle: one statement per non-comment line ending in '.'.
_NT_STATEMENT = re.compile(r"^\s*(?:<[^>]*>|_:\S+)\s+<[^>]*>\s+.+\.\s*$")


def count_ntriples_statements(text: str) -> int:
    count = 0
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        assert _NT_STATEMENT.match(line), f"not a statement line: {line!r}"
        count += 1
    return count


def test_empty_document_parses_to_empty_multiset():
    assert parse_rdf("", "ntriples") == []
    assert parse_rdf("", "turtle") == []


def test_single_triple_ntriples():
    triples = parse_rdf("<a:s> <a:p> <a:o> .", "ntriples")
    assert triples == [Triple(Iri("a:s"), Iri("a:p"), Iri("a:o"))]


def test_fixture_counts_match_independent_line_counter(manifest):
    for name, expected_key in [("ontology.nt", "ontologyTriples"), ("instances.nt", "instanceTriples")]:
        text = (FIXTURES / "desk" / name).read_text(encoding="utf-8")
        oracle_count = count_ntriples_statements(text)
        parsed = parse_rdf(text, "ntriples")
        assert len(parsed) == oracle_count == manifest[expected_key]


def test_fixture_ontology_has_50_class_declarations():
    text = (FIXTURES / "desk" / "ontology.nt").read_text(encoding="utf-8")
    parsed = parse_rdf(text, "ntriples")
    class_decls = [
        t
        for t in parsed
        if t.predicate.value == RDF_TYPE
        and isinstance(t.object, Iri)
        and t.object.value.endswith("#Class")
    ]
    assert len(class_decls) == 50


def test_turtle_and_ntriples_fixture_serializations_agree():
    ttl = parse_rdf((FIXTURES / "desk" / "ontology.ttl").read_text(), "turtle")
    nt = parse_rdf((FIXTURES / "desk" / "ontology.nt").read_text(), "ntriples")
    assert Counter(ttl) == Counter(nt)


def test_turtle_prefixes_a_keyword_and_lists():
    doc = """
    @prefix ex: <http://ex.org/> .
    PREFIX foo: <http://foo.org/>
    ex:s a ex:Klass ;
        ex:p ex:o1, foo:o2 ;
        ex:q "plain", "tagged"@en, "2020-01-02"^^<http://www.w3.org/2001/XMLSchema#date> .
    """
    triples = parse_rdf(doc, "turtle")
    assert Triple(Iri("http://ex.org/s"), Iri(RDF_TYPE), Iri("http://ex.org/Klass")) in triples
    assert Triple(Iri("http://ex.org/s"), Iri("http://ex.org/p"), Iri("http://foo.org/o2")) in triples
    assert Triple(
        Iri("http://ex.org/s"), Iri("http://ex.org/q"), Literal("tagged", language="en")
    ) in triples
    assert Triple(
        Iri("http://ex.org/s"), Iri("http://ex.org/q"), Literal("2020-01-02", Iri(XSD_DATE))
    ) in triples
    assert len(triples) == 6


def test_turtle_bare_numeric_and_boolean_literals():
    doc = '@prefix ex: <http://ex.org/> . ex:s ex:p 42, 3.5, true .'
    objects = {t.object for t in parse_rdf(doc, "turtle")}
    assert Literal("42", Iri(XSD_INTEGER)) in objects
    assert Literal("3.5", Iri(XSD_DECIMAL)) in objects


def test_blank_nodes_skolemized_in_document_order():
    doc = "_:b <a:p> _:a .\n_:a <a:p> _:b ."
    triples = parse_rdf(doc, "ntriples")
    assert triples[0].subject == Iri("urn:bnode:0")  # _:b seen first
    assert triples[0].object == Iri("urn:bnode:1")
    assert triples[1].subject == Iri("urn:bnode:1")
    assert triples[1].object == Iri("urn:bnode:0")


def test_syntax_error_carries_line_and_column():
    doc = "@prefix ex: <http://ex.org/> .\nex:s ex:p .\n"
    with pytest.raises(RdfSyntaxError) as excinfo:
        parse_rdf(doc, "turtle")
    assert excinfo.value.line == 2
    assert excinfo.value.column >= 1


@pytest.mark.parametrize(
    "doc",
    [
        "@prefix ex: <http://ex.org/> . ex:s ex:p [ ex:q ex:o ] .",
        "@prefix ex: <http://ex.org/> . ex:s ex:p (1 2 3) .",
        "@base <http://ex.org/> .",
        '@prefix ex: <http://ex.org/> . ex:s ex:p """long""" .',
    ],
)
def test_constructs_outside_subset_are_unsupported(doc):
    with pytest.raises(UnsupportedFeature):
        parse_rdf(doc, "turtle")


def test_undeclared_prefix_is_a_syntax_error():
    with pytest.raises(RdfSyntaxError):
        parse_rdf("ex:s ex:p ex:o .", "turtle")


def test_string_escapes_round_trip():
    doc = '<a:s> <a:p> "he said \\"hi\\"\\n\\ttab" .'
    (triple,) = parse_rdf(doc, "ntriples")
    assert isinstance(triple.object, Literal)
    assert triple.object.lexical == 'he said "hi"\n\ttab'
    again = parse_rdf(serialize_ntriples([triple]), "ntriples")
    assert again == [triple]


def test_round_trip_on_fixture_files():
    for name in ["ontology.nt", "instances.nt"]:
        triples = parse_rdf((FIXTURES / "desk" / name).read_text(), "ntriples")
        assert parse_rdf(serialize_ntriples(triples), "ntriples") == triples


_iri_values = st.text(alphabet="abcxyz0189_", min_size=1, max_size=12).map(
    lambda tail: "http://ex.org/" + tail
)
_plain_text = st.text(
    alphabet=st.characters(blacklist_categories=("Cs",), min_codepoint=1),
    max_size=40,
)


@st.composite
def _triples(draw):
    subject = Iri(draw(_iri_values))
    predicate = Iri(draw(_iri_values))
    if draw(st.booleans()):
        obj = Iri(draw(_iri_values))
    else:
        obj = Literal(draw(_plain_text))
    return Triple(subject, predicate, obj)


@given(st.lists(_triples(), max_size=12))
def test_parse_serialize_identity_property(triples):
    assert parse_rdf(serialize_ntriples(triples), "ntriples") == triples
