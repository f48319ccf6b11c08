"""Suggestion layer: link documents, start-link ranking against brute force,
semantic expansion search, and ontology admissibility of every suggestion."""

from __future__ import annotations

import numpy as np
import pytest

from ontoscout.embed import OfflineEmbedder, l2_normalize
from ontoscout.errors import UnknownClass, UnknownTopic
from ontoscout.index import KIND_LINK
from ontoscout.ontology import build_ontology
from ontoscout.proto import Constraint, add_constraint, add_edge, new_graph
from ontoscout.suggest import (
    link_document,
    search_constraints,
    search_out_links,
    start_links,
)
from ontoscout.terms import Literal

from .conftest import decl_class, decl_property, onto, xsd
from .oracles import brute_force_cosine_ranking


def test_link_document_with_domain_and_range():
    triples = (
        decl_class("Patient", label="Patient")
        + decl_class("Disease", label="Disease")
        + decl_property("hasDisease", "object", "Patient", "Disease", label="hasDisease")
    )
    model = build_ontology(triples)
    text = link_document(model.properties[onto("hasDisease")], model)
    assert text == "Link: hasDisease. Connects Patient to Disease."


def test_link_document_defaults_to_anything(mini_model):
    text = link_document(mini_model.properties[onto("relatedTo")], mini_model)
    assert text == "Link: related to. Connects anything to anything."


def test_link_document_datatype_range_local_name(mini_model):
    text = link_document(mini_model.properties[onto("birthDate")], mini_model)
    assert text == "Link: birth date. Connects Person to date."


def test_fixture_link_documents_rederive(desk_model, artifact):
    for iri, prop in desk_model.properties.items():
        entry = artifact.vectors.get(KIND_LINK, iri)
        assert entry is not None
        assert entry.text == link_document(prop, desk_model)


def _link_vectors(artifact):
    return {
        entry.key: entry.vector
        for entry in artifact.vectors.entries
        if entry.kind == KIND_LINK
    }


def test_single_topic_equals_plain_top_k(artifact, desk_model):
    tree = artifact.topics
    topic_id = tree.leaves()[0].id
    suggestions = start_links([topic_id], tree, artifact.vectors, desk_model, k=10)
    centroid = tree.topics[topic_id].centroid
    object_links = {
        key: vec
        for key, vec in _link_vectors(artifact).items()
        if desk_model.properties[key].kind == "object"
    }
    expected = brute_force_cosine_ranking(centroid, object_links, k=10)
    assert [(s.property_iri, pytest.approx(s.score)) for s in suggestions] == [
        (key, pytest.approx(score)) for key, score in expected
    ]


def test_duplicate_topic_selection_is_set_semantic(artifact, desk_model):
    tree = artifact.topics
    topic_id = tree.leaves()[0].id
    once = start_links([topic_id], tree, artifact.vectors, desk_model, k=5)
    twice = start_links([topic_id, topic_id], tree, artifact.vectors, desk_model, k=5)
    assert [(s.property_iri, s.score) for s in once] == [
        (s.property_iri, s.score) for s in twice
    ]


def test_two_topic_mean_ranking_matches_brute_force(artifact, desk_model):
    tree = artifact.topics
    leaves = tree.leaves()
    a, b = leaves[0].id, leaves[-1].id
    suggestions = start_links([a, b], tree, artifact.vectors, desk_model, k=10,
                              prevalence=artifact.prevalence)
    query = l2_normalize(np.mean([tree.topics[a].centroid, tree.topics[b].centroid], axis=0))
    object_links = {
        key: vec
        for key, vec in _link_vectors(artifact).items()
        if desk_model.properties[key].kind == "object"
    }
    expected = brute_force_cosine_ranking(query, object_links, k=10)
    assert [s.property_iri for s in suggestions] == [key for key, _ in expected]
    for suggestion in suggestions:
        assert suggestion.prevalence == artifact.prevalence.get(suggestion.property_iri)


def test_unknown_topic_raises(artifact, desk_model):
    with pytest.raises(UnknownTopic):
        start_links([9999], artifact.topics, artifact.vectors, desk_model)
    with pytest.raises(UnknownTopic):
        start_links([], artifact.topics, artifact.vectors, desk_model)


def test_start_links_only_object_properties(artifact, desk_model):
    tree = artifact.topics
    ids = [leaf.id for leaf in tree.leaves()[:2]]
    for suggestion in start_links(ids, tree, artifact.vectors, desk_model, k=30):
        assert suggestion.kind == "object"


def test_exact_link_document_text_ranks_first(artifact, desk_model):
    embedder = OfflineEmbedder(artifact.dimension)
    prop = desk_model.properties[onto("homePort")]
    text = link_document(prop, desk_model)
    results = search_out_links(
        onto("Ship"), text, desk_model, artifact.vectors, embedder, k=5
    )
    assert results[0].property_iri == onto("homePort")
    assert results[0].score == pytest.approx(1.0, abs=1e-9)


def test_search_out_links_candidates_respect_domain(artifact, desk_model):
    embedder = OfflineEmbedder(artifact.dimension)
    results = search_out_links(
        onto("Patient"), "anything at all", desk_model, artifact.vectors, embedder, k=50
    )
    iris = {s.property_iri for s in results}
    assert onto("hasDisease") in iris
    assert onto("author") in iris  # Person domain, ancestor of Patient
    assert onto("homePort") not in iris  # Ship domain
    assert onto("birthDate") not in iris  # datatype kind


def test_class_without_candidates_gives_empty(artifact):
    model = build_ontology(
        decl_class("Sport", label="Sport")
        + decl_class("Person", label="Person")
        + decl_property("birthDate", "datatype", "Person", "date")
    )
    embedder = OfflineEmbedder(artifact.dimension)
    results = search_constraints(
        onto("Sport"), "anything", model, artifact.vectors, embedder, k=10
    )
    assert results == []
    assert search_out_links(onto("Sport"), "x", model, artifact.vectors, embedder) == []


def test_unknown_class_raises(desk_model, artifact):
    embedder = OfflineEmbedder(artifact.dimension)
    with pytest.raises(UnknownClass):
        search_out_links(onto("Ghost"), "x", desk_model, artifact.vectors, embedder)


def test_empty_query_orders_by_prevalence(desk_model, artifact):
    embedder = OfflineEmbedder(artifact.dimension)
    results = search_out_links(
        onto("Person"), "", desk_model, artifact.vectors, embedder, k=50,
        prevalence=artifact.prevalence,
    )
    known = [s.prevalence for s in results if s.prevalence is not None]
    assert known == sorted(known, reverse=True)


def test_sicknesses_query_surfaces_has_disease(desk_model, artifact):
    embedder = OfflineEmbedder(artifact.dimension)
    results = search_out_links(
        onto("Patient"), "sicknesses", desk_model, artifact.vectors, embedder, k=20
    )
    top3 = [s.property_iri for s in results[:3]]
    assert onto("hasDisease") in top3


def test_constraint_search_birth_on_person(desk_model, artifact):
    embedder = OfflineEmbedder(artifact.dimension)
    results = search_constraints(
        onto("Person"), "birth", desk_model, artifact.vectors, embedder, k=10
    )
    assert results[0].property_iri == onto("birthDate")
    link_vectors = {
        s.property_iri: artifact.vectors.get(KIND_LINK, s.property_iri).vector
        for s in results
    }
    expected = brute_force_cosine_ranking(embedder.embed("birth"), link_vectors, k=10)
    assert [s.property_iri for s in results] == [key for key, _ in expected]


def test_every_suggestion_is_admissible(desk_model, artifact):
    """Feeding any suggestion back into the editing operations never raises
    a domain violation."""
    embedder = OfflineEmbedder(artifact.dimension)
    for class_iri in [onto("Person"), onto("Patient"), onto("Ship"), onto("Work")]:
        graph_seed = None
        for prop in desk_model.properties.values():
            if prop.kind == "object" and prop.domain is None:
                graph_seed = prop
                break
        out = search_out_links(class_iri, "search terms", desk_model, artifact.vectors, embedder, k=50)
        constraints = search_constraints(class_iri, "value", desk_model, artifact.vectors, embedder, k=50)
        base = new_graph(graph_seed, desk_model)
        # replace the root class with the queried class via a fresh graph
        from ontoscout.proto import PrototypeGraph, ProtoNode

        single = PrototypeGraph(nodes=(ProtoNode(0, class_iri),), edges=())
        for suggestion in out:
            add_edge(single, desk_model, 0, suggestion.property_iri)
        for suggestion in constraints:
            prop = desk_model.properties[suggestion.property_iri]
            if prop.range is not None and prop.range.value.endswith("date"):
                operand = Literal("1990-01-01", xsd("date"))
                operator = ">"
            elif prop.range is not None and prop.range.value.endswith(("integer", "decimal")):
                operand = Literal("5", xsd("integer"))
                operator = ">"
            else:
                operand = Literal("x")
                operator = "contains"
            add_constraint(single, desk_model, 0, Constraint(suggestion.property_iri, operator, operand))