"""Compile prototype graphs into SPARQL 1.1 SELECT text.

Generation is deterministic: identical graphs produce byte-identical text.
The projection lists node variables in nodeId order, then constraint-value
variables; WHERE holds type triples in BFS order from the root, then edge
triples in insertion order, then one triple plus FILTER per constraint in
(nodeId, index) order.

Nodes typed owl:Thing emit no type triple when an edge binds them (absent
domain/range means "anything"); an isolated owl:Thing node keeps its type
triple so the query stays grammatical.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, datetime
from decimal import Decimal, InvalidOperation

from .errors import IncomparableDatatypes, InvalidGraph
from .ontology import OntologyModel, TOP_CLASS
from .proto import (
    PrototypeGraph,
    constraint_variable,
    node_variable,
    validate_graph,
)
from .terms import RDFS_SUBCLASSOF, XSD_DATE, Iri, Literal

DEFAULT_LIMIT = 12
MAX_LIMIT = 200


@dataclass(frozen=True)
class GeneratedQuery:
    text: str
    node_variables: dict[int, str]
    constraint_variables: dict[tuple[int, int], str]
    limit: int
    offset: int

    def to_payload(self) -> dict:
        return {
            "text": self.text,
            "variableMap": {
                "nodes": {str(k): v for k, v in sorted(self.node_variables.items())},
                "constraints": [
                    {"nodeId": node_id, "index": index, "variable": var}
                    for (node_id, index), var in sorted(self.constraint_variables.items())
                ],
            },
            "limit": self.limit,
            "offset": self.offset,
        }


def escape_sparql_string(value: str) -> str:
    out = []
    for ch in value:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\r":
            out.append("\\r")
        elif ch == "\t":
            out.append("\\t")
        else:
            out.append(ch)
    return "".join(out)


def serialize_literal(literal: Literal) -> str:
    lex = escape_sparql_string(literal.lexical)
    if literal.language:
        return f'"{lex}"@{literal.language}'
    return f'"{lex}"^^<{literal.datatype.value}>'


def _clamp_limit(limit: int | None) -> int:
    if limit is None:
        return DEFAULT_LIMIT
    return max(1, min(int(limit), MAX_LIMIT))


def _bfs_node_order(graph: PrototypeGraph) -> list[int]:
    visited = {graph.root_node_id}
    order = [graph.root_node_id]
    queue = [graph.root_node_id]
    while queue:
        current = queue.pop(0)
        for edge in graph.edges:
            if edge.source_node_id == current and edge.target_node_id not in visited:
                other = edge.target_node_id
            elif edge.target_node_id == current and edge.source_node_id not in visited:
                other = edge.source_node_id
            else:
                continue
            visited.add(other)
            order.append(other)
            queue.append(other)
    return order


def generate_select(
    graph: PrototypeGraph,
    ontology: OntologyModel,
    limit: int | None = None,
    offset: int = 0,
    *,
    subclass_closure: bool = False,
) -> GeneratedQuery:
    """SELECT query retrieving instances of the prototype graph.

    ``subclass_closure=True`` types nodes through the
    ``a/rdfs:subClassOf*`` property path instead of a bare type triple;
    the matcher oracle must be configured the same way.
    """
    diagnostics = validate_graph(graph, ontology)
    if diagnostics:
        raise InvalidGraph("graph failed validation", diagnostics=[d.code for d in diagnostics])

    node_vars = {node.node_id: node_variable(node.node_id) for node in graph.nodes}
    constraint_vars: dict[tuple[int, int], str] = {}
    for node in graph.nodes:
        for c_idx in range(len(node.constraints)):
            constraint_vars[(node.node_id, c_idx)] = constraint_variable(node.node_id, c_idx)

    projection = [f"?{node_vars[nid]}" for nid in sorted(node_vars)]
    projection += [f"?{var}" for (_, _), var in sorted(constraint_vars.items())]

    type_predicate = (
        f"a/<{RDFS_SUBCLASSOF}>*" if subclass_closure else "a"
    )
    patterns: list[str] = []
    nodes_by_id = {node.node_id: node for node in graph.nodes}
    for node_id in _bfs_node_order(graph):
        node = nodes_by_id[node_id]
        if node.class_iri == TOP_CLASS and graph.node_degree(node_id) > 0:
            continue
        patterns.append(f"?{node_vars[node_id]} {type_predicate} <{node.class_iri.value}> .")
    for edge in graph.edges:
        patterns.append(
            f"?{node_vars[edge.source_node_id]} <{edge.property_iri.value}> "
            f"?{node_vars[edge.target_node_id]} ."
        )
    for node in graph.nodes:
        for c_idx, constraint in enumerate(node.constraints):
            var = constraint_vars[(node.node_id, c_idx)]
            patterns.append(
                f"?{node_vars[node.node_id]} <{constraint.property_iri.value}> ?{var} ."
            )
            operand = serialize_literal(constraint.operand)
            if constraint.operator == "contains":
                patterns.append(f"FILTER(CONTAINS(?{var}, {operand}))")
            else:
                patterns.append(f"FILTER(?{var} {constraint.operator} {operand})")

    effective_limit = _clamp_limit(limit)
    text = (
        "SELECT "
        + " ".join(projection)
        + " WHERE { "
        + " ".join(patterns)
        + " } LIMIT "
        + str(effective_limit)
    )
    if offset:
        text += f" OFFSET {int(offset)}"
    return GeneratedQuery(
        text=text,
        node_variables=node_vars,
        constraint_variables=constraint_vars,
        limit=effective_limit,
        offset=int(offset),
    )


def generate_prevalence_count(property_iri: Iri) -> GeneratedQuery:
    """COUNT(*) over all triples using the property (its prevalence)."""
    text = f"SELECT (COUNT(*) AS ?c) WHERE {{ ?s <{property_iri.value}> ?o . }}"
    return GeneratedQuery(text=text, node_variables={}, constraint_variables={}, limit=1, offset=0)


# --- typed comparison (shared by the matcher oracle and FILTER emission) ----


def _numeric_value(literal: Literal) -> int | Decimal | float:
    lex = literal.lexical
    dt = literal.datatype.value
    try:
        if dt.endswith(("double", "float")):
            return float(lex)
        if "." in lex or "e" in lex.lower():
            return Decimal(lex)
        return int(lex)
    except (ValueError, InvalidOperation):
        raise IncomparableDatatypes(f"{lex!r} is not numeric") from None


def _date_value(literal: Literal) -> date | datetime:
    """Chronological value; dates and dateTimes form separate families."""
    lex = literal.lexical.replace("Z", "+00:00")
    try:
        if literal.datatype.value == XSD_DATE:
            return date.fromisoformat(lex)
        return datetime.fromisoformat(lex)
    except ValueError:
        raise IncomparableDatatypes(
            f"{literal.lexical!r} is outside the supported date/dateTime range"
        ) from None


def compare_literal(a: Literal, operator: str, b: Literal) -> bool:
    """Typed comparison: numeric by value, date/dateTime chronologically,
    strings bytewise; ``contains`` is substring. Raises IncomparableDatatypes
    when the two literals cannot be compared under the operator."""
    if operator == "contains":
        if not (a.is_string() and b.is_string()):
            raise IncomparableDatatypes("contains requires string literals")
        return b.lexical in a.lexical

    if a.is_numeric() and b.is_numeric():
        left, right = _numeric_value(a), _numeric_value(b)
    elif a.is_date() and b.is_date():
        if a.datatype.value != b.datatype.value:
            raise IncomparableDatatypes(
                f"cannot compare {a.datatype.local_name()} with {b.datatype.local_name()}"
            )
        left, right = _date_value(a), _date_value(b)
    elif a.is_string() and b.is_string():
        left, right = a.lexical.encode("utf-8"), b.lexical.encode("utf-8")
    elif operator in ("=", "!="):
        # different value families are simply unequal
        left, right = (a.datatype.value, a.lexical, a.language), (
            b.datatype.value,
            b.lexical,
            b.language,
        )
    else:
        raise IncomparableDatatypes(
            f"cannot compare {a.datatype.value} with {b.datatype.value}"
        )

    try:
        if operator == "=":
            return left == right
        if operator == "!=":
            return left != right
        if operator == "<":
            return left < right
        if operator == "<=":
            return left <= right
        if operator == ">":
            return left > right
        if operator == ">=":
            return left >= right
    except TypeError:
        # e.g. timezone-aware against naive dateTime
        raise IncomparableDatatypes(
            f"cannot order {a.lexical!r} against {b.lexical!r}"
        ) from None
    raise IncomparableDatatypes(f"unknown operator {operator!r}")
