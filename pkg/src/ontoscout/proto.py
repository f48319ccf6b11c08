"""Prototype graph: the query object users build.

A prototype graph is a tree of class-typed nodes joined by object-property
edges, with literal constraints attached to nodes. Graphs are immutable
values; every editing operation returns a fresh graph, so no partially
updated state is ever observable and the HTTP API can stay stateless.

Variable naming (``v{nodeId}`` and ``v{nodeId}_c{index}``) is part of the
public contract shared by the SPARQL generator, the matcher, and instance
assembly.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any

from .errors import (
    DomainViolation,
    DuplicateConstraint,
    InvalidGraph,
    OperatorDatatypeMismatch,
    RangeViolation,
    RootRemoval,
    UnknownElement,
    UnknownNode,
    UnknownProperty,
    WouldDisconnect,
)
from .ontology import OntologyModel, PropertyDef, TOP_CLASS
from .terms import (
    DATE_DATATYPES,
    NUMERIC_DATATYPES,
    STRING_DATATYPES,
    XSD_STRING,
    Iri,
    Literal,
)

ORDERING_OPERATORS = ("<", "<=", ">", ">=")
OPERATORS = ("=", "!=", "<", "<=", ">", ">=", "contains")


def node_variable(node_id: int) -> str:
    return f"v{node_id}"


def constraint_variable(node_id: int, index: int) -> str:
    return f"v{node_id}_c{index}"


@dataclass(frozen=True)
class Constraint:
    property_iri: Iri
    operator: str
    operand: Literal

    def __post_init__(self) -> None:
        if self.operator not in OPERATORS:
            raise OperatorDatatypeMismatch(f"unknown operator {self.operator!r}")
        if self.operator == "contains" and not self.operand.is_string():
            raise OperatorDatatypeMismatch(
                "contains requires a string operand, got "
                + self.operand.datatype.value
            )
        if self.operator in ORDERING_OPERATORS and not (
            self.operand.is_numeric() or self.operand.is_date()
        ):
            raise OperatorDatatypeMismatch(
                f"operator {self.operator!r} requires a numeric or date operand, got "
                + self.operand.datatype.value
            )


@dataclass(frozen=True)
class ProtoNode:
    node_id: int
    class_iri: Iri
    constraints: tuple[Constraint, ...] = ()


@dataclass(frozen=True)
class ProtoEdge:
    source_node_id: int
    target_node_id: int
    property_iri: Iri


@dataclass(frozen=True)
class Diagnostic:
    code: str
    element: dict[str, Any]
    message: str

    def to_payload(self) -> dict[str, Any]:
        return {"code": self.code, "element": self.element, "message": self.message}


@dataclass(frozen=True)
class PrototypeGraph:
    nodes: tuple[ProtoNode, ...]
    edges: tuple[ProtoEdge, ...]
    root_node_id: int = 0

    def node(self, node_id: int) -> ProtoNode:
        for node in self.nodes:
            if node.node_id == node_id:
                return node
        raise UnknownNode(f"no node {node_id}", nodeId=node_id)

    def has_node(self, node_id: int) -> bool:
        return any(n.node_id == node_id for n in self.nodes)

    def node_degree(self, node_id: int) -> int:
        return sum(
            1 for e in self.edges if node_id in (e.source_node_id, e.target_node_id)
        )

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "nodes": [
                {
                    "nodeId": n.node_id,
                    "classIri": n.class_iri.value,
                    "constraints": [
                        {
                            "propertyIri": c.property_iri.value,
                            "operator": c.operator,
                            "operand": {
                                "lexical": c.operand.lexical,
                                "datatypeIri": c.operand.datatype.value,
                                "languageTag": c.operand.language,
                            },
                        }
                        for c in n.constraints
                    ],
                }
                for n in self.nodes
            ],
            "edges": [
                {
                    "sourceNodeId": e.source_node_id,
                    "targetNodeId": e.target_node_id,
                    "propertyIri": e.property_iri.value,
                }
                for e in self.edges
            ],
            "rootNodeId": self.root_node_id,
        }

    @staticmethod
    def from_json_dict(payload: dict[str, Any]) -> "PrototypeGraph":
        try:
            nodes = tuple(
                ProtoNode(
                    node_id=int(n["nodeId"]),
                    class_iri=Iri(n["classIri"]),
                    constraints=tuple(
                        Constraint(
                            property_iri=Iri(c["propertyIri"]),
                            operator=str(c["operator"]),
                            operand=Literal(
                                lexical=str(c["operand"]["lexical"]),
                                datatype=Iri(c["operand"].get("datatypeIri") or XSD_STRING),
                                language=c["operand"].get("languageTag"),
                            ),
                        )
                        for c in n.get("constraints", ())
                    ),
                )
                for n in payload["nodes"]
            )
            edges = tuple(
                ProtoEdge(
                    source_node_id=int(e["sourceNodeId"]),
                    target_node_id=int(e["targetNodeId"]),
                    property_iri=Iri(e["propertyIri"]),
                )
                for e in payload["edges"]
            )
            root = int(payload.get("rootNodeId", 0))
        except (KeyError, TypeError) as exc:
            raise InvalidGraph(f"malformed graph payload: {exc!r}") from None
        return PrototypeGraph(nodes=nodes, edges=edges, root_node_id=root)


def _is_tree(graph: PrototypeGraph) -> bool:
    n = len(graph.nodes)
    if n == 0 or len(graph.edges) != n - 1:
        return False
    ids = {node.node_id for node in graph.nodes}
    if ids != set(range(n)) or graph.root_node_id not in ids:
        return False
    adjacency: dict[int, list[int]] = {i: [] for i in ids}
    for e in graph.edges:
        if e.source_node_id not in ids or e.target_node_id not in ids:
            return False
        if e.source_node_id == e.target_node_id:
            return False
        adjacency[e.source_node_id].append(e.target_node_id)
        adjacency[e.target_node_id].append(e.source_node_id)
    seen = {graph.root_node_id}
    stack = [graph.root_node_id]
    while stack:
        for neighbor in adjacency[stack.pop()]:
            if neighbor not in seen:
                seen.add(neighbor)
                stack.append(neighbor)
    return len(seen) == n


def _effective_domain(prop: PropertyDef) -> Iri:
    return prop.domain if prop.domain is not None else TOP_CLASS


def _effective_range(prop: PropertyDef) -> Iri:
    return prop.range if prop.range is not None else TOP_CLASS


def _resolve_property(
    ontology: OntologyModel, prop: PropertyDef | Iri, *, kind: str
) -> PropertyDef:
    if isinstance(prop, Iri):
        found = ontology.properties.get(prop)
        if found is None:
            raise UnknownProperty(f"unknown property {prop.value}", propertyIri=prop.value)
        prop = found
    if prop.kind != kind:
        raise UnknownProperty(
            f"property {prop.iri.value} is {prop.kind}-kind, expected {kind}",
            propertyIri=prop.iri.value,
        )
    return prop


def new_graph(start_link: PropertyDef | Iri, ontology: OntologyModel) -> PrototypeGraph:
    """Seed a graph from a start link: domain node (root) -> range node."""
    prop = _resolve_property(ontology, start_link, kind="object")
    root_class = _effective_domain(prop)
    target_class = _effective_range(prop)
    nodes = (ProtoNode(0, root_class), ProtoNode(1, target_class))
    edges = (ProtoEdge(0, 1, prop.iri),)
    return PrototypeGraph(nodes=nodes, edges=edges, root_node_id=0)


def add_edge(
    graph: PrototypeGraph,
    ontology: OntologyModel,
    source_node_id: int,
    property_iri: Iri,
    target_class_iri: Iri | None = None,
) -> PrototypeGraph:
    """Expand the graph with a new leaf node reached through an object property.

    The source node's class must sit inside the property's domain and the
    target class inside its range (absent domain/range admit anything).
    """
    if not graph.has_node(source_node_id):
        raise UnknownNode(f"no node {source_node_id}", nodeId=source_node_id)
    prop = _resolve_property(ontology, property_iri, kind="object")
    source = graph.node(source_node_id)
    domain = _effective_domain(prop)
    if not ontology.is_descendant_or_self(source.class_iri, domain):
        raise DomainViolation(
            f"{source.class_iri.value} is outside the domain {domain.value} of {prop.iri.value}",
            propertyIri=prop.iri.value,
            classIri=source.class_iri.value,
            domain=domain.value,
        )
    rng = _effective_range(prop)
    target_class = target_class_iri if target_class_iri is not None else rng
    if not ontology.has_class(target_class):
        raise RangeViolation(
            f"target class {target_class.value} is not in the ontology",
            classIri=target_class.value,
        )
    if not ontology.is_descendant_or_self(target_class, rng):
        raise RangeViolation(
            f"{target_class.value} is outside the range {rng.value} of {prop.iri.value}",
            propertyIri=prop.iri.value,
            classIri=target_class.value,
            range=rng.value,
        )
    new_id = len(graph.nodes)
    return PrototypeGraph(
        nodes=graph.nodes + (ProtoNode(new_id, target_class),),
        edges=graph.edges + (ProtoEdge(source_node_id, new_id, prop.iri),),
        root_node_id=graph.root_node_id,
    )


def add_constraint(
    graph: PrototypeGraph,
    ontology: OntologyModel,
    node_id: int,
    constraint: Constraint,
) -> PrototypeGraph:
    """Attach a literal constraint to a node. Identical constraints are
    rejected; two different bounds on one property are allowed (ANDed)."""
    if not graph.has_node(node_id):
        raise UnknownNode(f"no node {node_id}", nodeId=node_id)
    node = graph.node(node_id)
    prop = _resolve_property(ontology, constraint.property_iri, kind="datatype")
    domain = _effective_domain(prop)
    if not ontology.is_descendant_or_self(node.class_iri, domain):
        raise DomainViolation(
            f"{node.class_iri.value} is outside the domain {domain.value} of {prop.iri.value}",
            propertyIri=prop.iri.value,
            classIri=node.class_iri.value,
            domain=domain.value,
        )
    mismatch = _operator_range_mismatch(constraint, prop)
    if mismatch:
        raise OperatorDatatypeMismatch(mismatch, propertyIri=prop.iri.value)
    if constraint in node.constraints:
        raise DuplicateConstraint(
            "identical constraint already present",
            nodeId=node_id,
            propertyIri=prop.iri.value,
        )
    new_node = replace(node, constraints=node.constraints + (constraint,))
    return PrototypeGraph(
        nodes=tuple(new_node if n.node_id == node_id else n for n in graph.nodes),
        edges=graph.edges,
        root_node_id=graph.root_node_id,
    )


def remove_element(
    graph: PrototypeGraph,
    *,
    node_id: int | None = None,
    edge_index: int | None = None,
    constraint: tuple[int, int] | None = None,
) -> PrototypeGraph:
    """Remove exactly one element.

    Node removal is allowed only for non-root leaves and also removes the
    incident edge; remaining node ids are renumbered to stay dense in
    creation order. Removing a lone edge would always split the tree, so it
    is rejected. Constraint removal takes (nodeId, constraint index).
    """
    chosen = [x for x in (node_id, edge_index, constraint) if x is not None]
    if len(chosen) != 1:
        raise UnknownElement("specify exactly one of node_id, edge_index, constraint")

    if node_id is not None:
        if not graph.has_node(node_id):
            raise UnknownElement(f"no node {node_id}", nodeId=node_id)
        if node_id == graph.root_node_id:
            raise RootRemoval("the root node cannot be removed", nodeId=node_id)
        degree = graph.node_degree(node_id)
        if degree > 1:
            raise WouldDisconnect(
                f"node {node_id} is internal (degree {degree}); removing it would split the tree",
                nodeId=node_id,
            )
        remap = {}
        kept_nodes = []
        for node in graph.nodes:
            if node.node_id == node_id:
                continue
            remap[node.node_id] = len(kept_nodes)
            kept_nodes.append(node)
        renumbered = tuple(
            replace(n, node_id=remap[n.node_id]) for n in kept_nodes
        )
        kept_edges = tuple(
            ProtoEdge(remap[e.source_node_id], remap[e.target_node_id], e.property_iri)
            for e in graph.edges
            if node_id not in (e.source_node_id, e.target_node_id)
        )
        return PrototypeGraph(
            nodes=renumbered,
            edges=kept_edges,
            root_node_id=remap[graph.root_node_id],
        )

    if edge_index is not None:
        if not 0 <= edge_index < len(graph.edges):
            raise UnknownElement(f"no edge {edge_index}", edgeIndex=edge_index)
        raise WouldDisconnect(
            "removing an edge always splits the tree; remove the leaf node instead",
            edgeIndex=edge_index,
        )

    assert constraint is not None
    c_node, c_index = constraint
    if not graph.has_node(c_node):
        raise UnknownElement(f"no node {c_node}", nodeId=c_node)
    node = graph.node(c_node)
    if not 0 <= c_index < len(node.constraints):
        raise UnknownElement(
            f"node {c_node} has no constraint {c_index}", nodeId=c_node, constraintIndex=c_index
        )
    new_node = replace(
        node,
        constraints=node.constraints[:c_index] + node.constraints[c_index + 1 :],
    )
    return PrototypeGraph(
        nodes=tuple(new_node if n.node_id == c_node else n for n in graph.nodes),
        edges=graph.edges,
        root_node_id=graph.root_node_id,
    )


def validate_graph(graph: PrototypeGraph, ontology: OntologyModel) -> list[Diagnostic]:
    """All rule violations as diagnostics; an empty list means valid."""
    diagnostics: list[Diagnostic] = []
    if not _is_tree(graph):
        diagnostics.append(
            Diagnostic(
                code="NotATree",
                element={"nodes": len(graph.nodes), "edges": len(graph.edges)},
                message="edge structure must be a tree spanning all nodes with dense ids",
            )
        )
        return diagnostics

    for node in graph.nodes:
        if not ontology.has_class(node.class_iri):
            diagnostics.append(
                Diagnostic(
                    code="UnknownClass",
                    element={"nodeId": node.node_id, "classIri": node.class_iri.value},
                    message=f"class {node.class_iri.value} is not in the ontology",
                )
            )

    for idx, edge in enumerate(graph.edges):
        prop = ontology.properties.get(edge.property_iri)
        if prop is None or prop.kind != "object":
            diagnostics.append(
                Diagnostic(
                    code="UnknownProperty",
                    element={"edgeIndex": idx, "propertyIri": edge.property_iri.value},
                    message=f"{edge.property_iri.value} is not an object property",
                )
            )
            continue
        source = graph.node(edge.source_node_id)
        target = graph.node(edge.target_node_id)
        if ontology.has_class(source.class_iri) and not ontology.is_descendant_or_self(
            source.class_iri, _effective_domain(prop)
        ):
            diagnostics.append(
                Diagnostic(
                    code="DomainViolation",
                    element={
                        "edgeIndex": idx,
                        "propertyIri": prop.iri.value,
                        "classIri": source.class_iri.value,
                        "domain": _effective_domain(prop).value,
                    },
                    message=(
                        f"{source.class_iri.value} is outside the domain "
                        f"{_effective_domain(prop).value} of {prop.iri.value}"
                    ),
                )
            )
        if ontology.has_class(target.class_iri) and not ontology.is_descendant_or_self(
            target.class_iri, _effective_range(prop)
        ):
            diagnostics.append(
                Diagnostic(
                    code="RangeViolation",
                    element={
                        "edgeIndex": idx,
                        "propertyIri": prop.iri.value,
                        "classIri": target.class_iri.value,
                        "range": _effective_range(prop).value,
                    },
                    message=(
                        f"{target.class_iri.value} is outside the range "
                        f"{_effective_range(prop).value} of {prop.iri.value}"
                    ),
                )
            )

    for node in graph.nodes:
        seen: set[tuple[str, str, str, str | None]] = set()
        for c_idx, constraint in enumerate(node.constraints):
            element = {
                "nodeId": node.node_id,
                "constraintIndex": c_idx,
                "propertyIri": constraint.property_iri.value,
            }
            key = (
                constraint.property_iri.value,
                constraint.operator,
                constraint.operand.lexical,
                constraint.operand.datatype.value,
            )
            if key in seen:
                diagnostics.append(
                    Diagnostic(
                        code="DuplicateConstraint",
                        element=element,
                        message="identical constraint appears twice on the node",
                    )
                )
            seen.add(key)
            prop = ontology.properties.get(constraint.property_iri)
            if prop is None or prop.kind != "datatype":
                diagnostics.append(
                    Diagnostic(
                        code="UnknownProperty",
                        element=element,
                        message=f"{constraint.property_iri.value} is not a datatype property",
                    )
                )
                continue
            if ontology.has_class(node.class_iri) and not ontology.is_descendant_or_self(
                node.class_iri, _effective_domain(prop)
            ):
                diagnostics.append(
                    Diagnostic(
                        code="DomainViolation",
                        element=element,
                        message=(
                            f"{node.class_iri.value} is outside the domain of "
                            f"{prop.iri.value}"
                        ),
                    )
                )
            mismatch = _operator_range_mismatch(constraint, prop)
            if mismatch:
                diagnostics.append(
                    Diagnostic(code="OperatorDatatypeMismatch", element=element, message=mismatch)
                )
    return diagnostics


def _operator_range_mismatch(constraint: Constraint, prop: PropertyDef) -> str | None:
    """Constraint construction already checks operator vs operand; here we
    additionally check the operand against the property's declared range.
    Same-family datatypes (numeric with numeric, date with date, string with
    string) are compatible."""
    declared = prop.range
    if declared is None:
        return None
    operand = constraint.operand
    if declared.value == operand.datatype.value:
        return None
    same_numeric = operand.is_numeric() and declared.value in NUMERIC_DATATYPES
    same_date = operand.is_date() and declared.value in DATE_DATATYPES
    same_string = operand.is_string() and declared.value in STRING_DATATYPES
    if same_numeric or same_date or same_string:
        return None
    return (
        f"operand datatype {operand.datatype.value} does not match "
        f"declared range {declared.value} of {prop.iri.value}"
    )
