"""In-memory triple store and the naive basic-graph-pattern matcher.

The matcher is the correctness oracle for the SPARQL generator: it interprets
a prototype graph directly against the store, joining patterns with the same
semantics the generated query text has. Duplicate triples are kept in the
multiset (they count toward prevalence) but matching is set-based, as over an
RDF graph.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import IncomparableDatatypes, InvalidGraph
from .ontology import OntologyModel, TOP_CLASS
from .proto import PrototypeGraph, constraint_variable, node_variable, validate_graph
from .sparqlgen import compare_literal
from .terms import RDF_TYPE, Iri, Literal, Term, Triple

Binding = dict[str, Term]


@dataclass(frozen=True)
class _Pattern:
    subject: str | Iri  # variable name or constant
    predicate: Iri
    object: str | Iri | Literal


class InstanceStore:
    """Immutable after construction; safe for concurrent readers."""

    def __init__(self, triples: Iterable[Triple]):
        self.triples: tuple[Triple, ...] = tuple(triples)
        unique = list(dict.fromkeys(self.triples))
        self._by_predicate: dict[Iri, list[Triple]] = {}
        self._by_subject_predicate: dict[tuple[Iri, Iri], list[Triple]] = {}
        self._subjects_by_type: dict[Iri, set[Iri]] = {}
        # RDF graph semantics: duplicates in the input collapse for matching
        # and counting, so prevalence agrees with an endpoint's COUNT(*).
        self._predicate_counts: dict[Iri, int] = {}
        for t in unique:
            self._predicate_counts[t.predicate] = self._predicate_counts.get(t.predicate, 0) + 1
        for t in unique:
            self._by_predicate.setdefault(t.predicate, []).append(t)
            self._by_subject_predicate.setdefault((t.subject, t.predicate), []).append(t)
            if t.predicate.value == RDF_TYPE and isinstance(t.object, Iri):
                self._subjects_by_type.setdefault(t.object, set()).add(t.subject)

    def __len__(self) -> int:
        return len(self.triples)

    def predicate_count(self, predicate: Iri) -> int:
        """Distinct-triple count for a predicate (prevalence)."""
        return self._predicate_counts.get(predicate, 0)

    def matching(self, subject: Iri | None, predicate: Iri) -> Sequence[Triple]:
        if subject is not None:
            return self._by_subject_predicate.get((subject, predicate), ())
        return self._by_predicate.get(predicate, ())

    def subjects_of_type(self, class_iri: Iri) -> frozenset[Iri]:
        return frozenset(self._subjects_by_type.get(class_iri, ()))

    def all_subject_iris(self) -> frozenset[Iri]:
        return frozenset(t.subject for t in self.triples)

    def all_iris(self) -> frozenset[Iri]:
        out = set()
        for t in self.triples:
            out.add(t.subject)
            out.add(t.predicate)
            if isinstance(t.object, Iri):
                out.add(t.object)
        return frozenset(out)

    def instance_counts(self) -> dict[Iri, int]:
        """Distinct subjects per exact declared type."""
        return {cls: len(subs) for cls, subs in self._subjects_by_type.items()}


def _descendants_or_self(ontology: OntologyModel, class_iri: Iri) -> frozenset[Iri]:
    out = {class_iri}
    for iri in ontology.classes:
        if class_iri in ontology.ancestors(iri):
            out.add(iri)
    return frozenset(out)


def _type_candidates(
    store: InstanceStore, ontology: OntologyModel, class_iri: Iri, subclass_closure: bool
) -> frozenset[Iri]:
    if not subclass_closure:
        return store.subjects_of_type(class_iri)
    out: set[Iri] = set()
    for cls in _descendants_or_self(ontology, class_iri):
        out.update(store.subjects_of_type(cls))
    return frozenset(out)


def _bfs_plan(graph: PrototypeGraph) -> tuple[list[int], list[tuple[int, int]]]:
    """Node visit order from the root plus the tree-edge index reaching each
    non-root node, honoring edge insertion order."""
    visited = {graph.root_node_id}
    order = [graph.root_node_id]
    reached_via: list[tuple[int, int]] = []  # (edge index, new node id)
    queue = [graph.root_node_id]
    while queue:
        current = queue.pop(0)
        for idx, edge in enumerate(graph.edges):
            if edge.source_node_id == current and edge.target_node_id not in visited:
                other = edge.target_node_id
            elif edge.target_node_id == current and edge.source_node_id not in visited:
                other = edge.source_node_id
            else:
                continue
            visited.add(other)
            order.append(other)
            reached_via.append((idx, other))
            queue.append(other)
    return order, reached_via


def match_bgp(
    store: InstanceStore,
    ontology: OntologyModel,
    graph: PrototypeGraph,
    *,
    subclass_closure: bool = True,
) -> list[Binding]:
    """Every assignment of node variables (and constraint-value variables)
    satisfying the prototype graph. Empty result is a valid outcome.

    Nodes typed owl:Thing carry no type restriction when they touch an edge;
    an isolated owl:Thing node matches only explicitly typed owl:Thing
    instances, mirroring the generated query exactly.
    """
    diagnostics = validate_graph(graph, ontology)
    if diagnostics:
        raise InvalidGraph(
            "graph failed validation", diagnostics=[d.code for d in diagnostics]
        )

    order, reached_via = _bfs_plan(graph)
    nodes_by_id = {node.node_id: node for node in graph.nodes}

    solutions: list[Binding] = [{}]

    def _extend_with_type(sols: list[Binding], node_id: int) -> list[Binding]:
        node = nodes_by_id[node_id]
        var = node_variable(node_id)
        emit_type = node.class_iri != TOP_CLASS or graph.node_degree(node_id) == 0
        if not emit_type:
            return sols
        candidates = _type_candidates(store, ontology, node.class_iri, subclass_closure)
        out = []
        for sol in sols:
            bound = sol.get(var)
            if bound is None:
                for iri in sorted(candidates, key=lambda i: i.value):
                    ext = dict(sol)
                    ext[var] = iri
                    out.append(ext)
            elif bound in candidates:
                out.append(sol)
        return out

    def _extend_with_edge(sols: list[Binding], edge_idx: int) -> list[Binding]:
        edge = graph.edges[edge_idx]
        s_var = node_variable(edge.source_node_id)
        o_var = node_variable(edge.target_node_id)
        out = []
        for sol in sols:
            s_bound = sol.get(s_var)
            o_bound = sol.get(o_var)
            subject = s_bound if isinstance(s_bound, Iri) else None
            for t in store.matching(subject, edge.property_iri):
                if not isinstance(t.object, Iri):
                    continue
                if s_bound is not None and t.subject != s_bound:
                    continue
                if o_bound is not None and t.object != o_bound:
                    continue
                ext = dict(sol)
                ext[s_var] = t.subject
                ext[o_var] = t.object
                out.append(ext)
        return out

    def _extend_with_constraints(sols: list[Binding], node_id: int) -> list[Binding]:
        node = nodes_by_id[node_id]
        var = node_variable(node_id)
        for c_idx, constraint in enumerate(node.constraints):
            c_var = constraint_variable(node_id, c_idx)
            out = []
            for sol in sols:
                subject = sol[var]
                assert isinstance(subject, Iri)
                for t in store.matching(subject, constraint.property_iri):
                    if not isinstance(t.object, Literal):
                        continue
                    try:
                        ok = compare_literal(t.object, constraint.operator, constraint.operand)
                    except IncomparableDatatypes:
                        ok = False
                    if ok:
                        ext = dict(sol)
                        ext[c_var] = t.object
                        out.append(ext)
            sols = out
        return sols

    # Root first, then expand along tree edges in BFS order.
    solutions = _extend_with_type(solutions, graph.root_node_id)
    done_constraints: set[int] = set()
    if graph.node_degree(graph.root_node_id) == 0:
        solutions = _extend_with_constraints(solutions, graph.root_node_id)
        done_constraints.add(graph.root_node_id)
    for edge_idx, new_node in reached_via:
        solutions = _extend_with_edge(solutions, edge_idx)
        solutions = _extend_with_type(solutions, new_node)
    # Remaining (non-tree) edges cannot exist in a tree, so all edges are done.
    for node in graph.nodes:
        if node.node_id not in done_constraints:
            solutions = _extend_with_constraints(solutions, node.node_id)

    return solutions
