"""Hierarchical circle packing of the class hierarchy (the minimap).

Leaves get radius sqrt(1 + instanceCount); siblings are placed by
front-chain packing in deterministic order (descending radius, then
ascending IRI); each parent is the smallest enclosing circle of its children
scaled by 1.1. Classes with multiple parents are placed under their
lexicographically smallest parent so the packing stays a tree; a virtual
root joins forests. The packing itself is planar — ``depth`` carries the
hierarchy level for the UI to extrude as a third axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Iterable

from .errors import UnknownClass
from .ontology import OntologyModel, TOP_CLASS
from .proto import PrototypeGraph
from .terms import Iri

VIRTUAL_ROOT_IRI = "urn:ontoscout:root"

_PAD = 1.1  # parent radius over the enclosing circle of its children


@dataclass(frozen=True)
class PackedCircle:
    class_iri: Iri
    x: float
    y: float
    radius: float
    depth: int

    def to_payload(self) -> dict[str, Any]:
        return {
            "classIri": self.class_iri.value,
            "x": self.x,
            "y": self.y,
            "radius": self.radius,
            "depth": self.depth,
        }


@dataclass(frozen=True)
class MinimapLayout:
    circles: dict[Iri, PackedCircle]
    root_iri: Iri

    def to_payload(self) -> dict[str, Any]:
        return {
            "rootIri": self.root_iri.value,
            "circles": [
                self.circles[iri].to_payload()
                for iri in sorted(self.circles, key=lambda i: i.value)
            ],
        }


class _Circle:
    __slots__ = ("x", "y", "r", "iri")

    def __init__(self, r: float, iri: Iri | None = None):
        self.x = 0.0
        self.y = 0.0
        self.r = r
        self.iri = iri


def _lcg():
    """Deterministic uniform generator for the enclosing-circle shuffle."""
    a, c, m = 1664525, 1013904223, 4294967296
    state = 1

    def rand() -> float:
        nonlocal state
        state = (a * state + c) % m
        return state / m

    return rand


def _shuffle(items: list, rand) -> list:
    m = len(items)
    while m:
        i = int(rand() * m)
        m -= 1
        items[m], items[i] = items[i], items[m]
    return items


class _Enclosure:
    __slots__ = ("x", "y", "r")

    def __init__(self, x: float, y: float, r: float):
        self.x = x
        self.y = y
        self.r = r


def _encloses_not(a, b) -> bool:
    dr = a.r - b.r
    dx, dy = b.x - a.x, b.y - a.y
    return dr < 0 or dr * dr < dx * dx + dy * dy


def _encloses_weak(a, b) -> bool:
    dr = a.r - b.r + max(a.r, b.r, 1.0) * 1e-9
    dx, dy = b.x - a.x, b.y - a.y
    return dr > 0 and dr * dr > dx * dx + dy * dy


def _encloses_weak_all(a, basis) -> bool:
    return all(_encloses_weak(a, b) for b in basis)


def _basis1(a) -> _Enclosure:
    return _Enclosure(a.x, a.y, a.r)


def _basis2(a, b) -> _Enclosure:
    x1, y1, r1 = a.x, a.y, a.r
    x2, y2, r2 = b.x, b.y, b.r
    x21, y21, r21 = x2 - x1, y2 - y1, r2 - r1
    length = math.sqrt(x21 * x21 + y21 * y21)
    return _Enclosure(
        (x1 + x2 + x21 / length * r21) / 2,
        (y1 + y2 + y21 / length * r21) / 2,
        (length + r1 + r2) / 2,
    )


def _basis3(a, b, c) -> _Enclosure:
    x1, y1, r1 = a.x, a.y, a.r
    x2, y2, r2 = b.x, b.y, b.r
    x3, y3, r3 = c.x, c.y, c.r
    a2, a3 = x1 - x2, x1 - x3
    b2, b3 = y1 - y2, y1 - y3
    c2, c3 = r2 - r1, r3 - r1
    d1 = x1 * x1 + y1 * y1 - r1 * r1
    d2 = d1 - x2 * x2 - y2 * y2 + r2 * r2
    d3 = d1 - x3 * x3 - y3 * y3 + r3 * r3
    ab = a3 * b2 - a2 * b3
    xa = (b2 * d3 - b3 * d2) / (ab * 2) - x1
    xb = (b3 * c2 - b2 * c3) / ab
    ya = (a3 * d2 - a2 * d3) / (ab * 2) - y1
    yb = (a2 * c3 - a3 * c2) / ab
    qa = xb * xb + yb * yb - 1
    qb = 2 * (r1 + xa * xb + ya * yb)
    qc = xa * xa + ya * ya - r1 * r1
    if abs(qa) > 1e-6:
        r = -(qb + math.sqrt(qb * qb - 4 * qa * qc)) / (2 * qa)
    else:
        r = -qc / qb
    return _Enclosure(x1 + xa + xb * r, y1 + ya + yb * r, r)


def _enclose_basis(basis) -> _Enclosure:
    if len(basis) == 1:
        return _basis1(basis[0])
    if len(basis) == 2:
        return _basis2(basis[0], basis[1])
    return _basis3(basis[0], basis[1], basis[2])


def _extend_basis(basis, p):
    if _encloses_weak_all(p, basis):
        return [p]
    for member in basis:
        if _encloses_not(p, member) and _encloses_weak_all(_basis2(member, p), basis):
            return [member, p]
    for i in range(len(basis) - 1):
        for j in range(i + 1, len(basis)):
            bi, bj = basis[i], basis[j]
            if (
                _encloses_not(_basis2(bi, bj), p)
                and _encloses_not(_basis2(bi, p), bj)
                and _encloses_not(_basis2(bj, p), bi)
                and _encloses_weak_all(_basis3(bi, bj, p), basis)
            ):
                return [bi, bj, p]
    raise AssertionError("unreachable: enclosing basis extension failed")


def enclose(circles: Iterable, rand=None) -> _Enclosure:
    """Smallest circle enclosing all given circles (move-to-front Welzl)."""
    items = _shuffle(list(circles), rand or _lcg())
    basis: list = []
    best: _Enclosure | None = None
    i = 0
    while i < len(items):
        p = items[i]
        if best is not None and _encloses_weak(best, p):
            i += 1
        else:
            basis = _extend_basis(basis, p)
            best = _enclose_basis(basis)
            i = 0
    assert best is not None
    return best


def _place(b, a, c) -> None:
    """Place c tangent to b and a (front-chain step)."""
    dx, dy = b.x - a.x, b.y - a.y
    d2 = dx * dx + dy * dy
    if d2:
        a2 = (a.r + c.r) ** 2
        b2 = (b.r + c.r) ** 2
        if a2 > b2:
            x = (d2 + b2 - a2) / (2 * d2)
            y = math.sqrt(max(0.0, b2 / d2 - x * x))
            c.x = b.x - x * dx - y * dy
            c.y = b.y - x * dy + y * dx
        else:
            x = (d2 + a2 - b2) / (2 * d2)
            y = math.sqrt(max(0.0, a2 / d2 - x * x))
            c.x = a.x + x * dx - y * dy
            c.y = a.y + x * dy + y * dx
    else:
        c.x = a.x + c.r
        c.y = a.y


def _intersects(a, b) -> bool:
    dr = a.r + b.r - 1e-6
    dx, dy = b.x - a.x, b.y - a.y
    return dr > 0 and dr * dr > dx * dx + dy * dy


class _ChainNode:
    __slots__ = ("circle", "next", "previous")

    def __init__(self, circle):
        self.circle = circle
        self.next = None
        self.previous = None


def _chain_score(node) -> float:
    a, b = node.circle, node.next.circle
    ab = a.r + b.r
    dx = (a.x * b.r + b.x * a.r) / ab
    dy = (a.y * b.r + b.y * a.r) / ab
    return dx * dx + dy * dy


def pack_siblings(circles: list, rand=None) -> float:
    """Mutates circle positions so siblings touch without overlapping,
    centered on their smallest enclosing circle; returns its radius."""
    n = len(circles)
    if n == 0:
        return 0.0
    first = circles[0]
    first.x = first.y = 0.0
    if n == 1:
        return first.r
    second = circles[1]
    first.x, second.x, second.y = -second.r, first.r, 0.0
    if n == 2:
        return first.r + second.r
    third = circles[2]
    _place(second, first, third)

    # Front chain starts as the ring of the first three circles; the anchor
    # pair (a, b) is where the next circle is tried first.
    a, b, c = _ChainNode(first), _ChainNode(second), _ChainNode(third)
    a.next = c.previous = b
    b.next = a.previous = c
    c.next = b.previous = a

    i = 3
    while i < n:
        circle = circles[i]
        _place(a.circle, b.circle, circle)
        node = _ChainNode(circle)

        # Walk the chain both ways from the anchor; the nearest intersecting
        # circle (by chain distance) shortcuts the chain and forces a retry.
        j, k = b.next, a.previous
        sj, sk = b.circle.r, a.circle.r
        retry = False
        while True:
            if sj <= sk:
                if _intersects(j.circle, node.circle):
                    b = j
                    a.next = b
                    b.previous = a
                    retry = True
                    break
                sj += j.circle.r
                j = j.next
            else:
                if _intersects(k.circle, node.circle):
                    a = k
                    a.next = b
                    b.previous = a
                    retry = True
                    break
                sk += k.circle.r
                k = k.previous
            if j is k.next:
                break
        if retry:
            continue

        # Insert the new node between the anchors, then move the anchor to
        # the chain pair whose weighted midpoint is closest to the origin.
        node.previous = a
        node.next = b
        a.next = b.previous = node
        best_node, best = a, _chain_score(a)
        cursor = node.next
        while cursor is not node:
            score = _chain_score(cursor)
            if score < best:
                best_node, best = cursor, score
            cursor = cursor.next
        a = best_node
        b = a.next
        i += 1

    anchor = a
    chain = [anchor.circle]
    cursor = anchor.next
    while cursor is not anchor:
        chain.append(cursor.circle)
        cursor = cursor.next
    enclosure = enclose(chain, rand)
    for circle in circles:
        circle.x -= enclosure.x
        circle.y -= enclosure.y
    return enclosure.r


def _packing_children(ontology: OntologyModel) -> tuple[dict[Iri, list[Iri]], list[Iri]]:
    """Tree-ified hierarchy: each class under its smallest parent IRI."""
    children: dict[Iri, list[Iri]] = {iri: [] for iri in ontology.classes}
    roots: list[Iri] = []
    for iri in sorted(ontology.classes, key=lambda i: i.value):
        cls = ontology.classes[iri]
        if cls.parents:
            parent = min(cls.parents, key=lambda p: p.value)
            children[parent].append(iri)
        else:
            roots.append(iri)
    return children, roots


def pack_hierarchy(ontology: OntologyModel) -> MinimapLayout:
    """Deterministic layout of every class; identical ontologies yield
    identical layouts."""
    children, roots = _packing_children(ontology)
    rand = _lcg()

    if not ontology.classes:
        return MinimapLayout(circles={}, root_iri=Iri(VIRTUAL_ROOT_IRI))

    # Bottom-up: radius of each subtree and child offsets relative to it.
    radius: dict[Iri, float] = {}
    offsets: dict[Iri, tuple[float, float]] = {}
    post_order: list[Iri] = []
    stack = list(reversed(roots))
    visiting: list[Iri] = []
    while stack:
        node = stack.pop()
        visiting.append(node)
        stack.extend(reversed(children[node]))
    for node in reversed(visiting):
        post_order.append(node)
        kids = children[node]
        if not kids:
            count = ontology.classes[node].instance_count
            radius[node] = math.sqrt(1.0 + count)
            continue
        packed = [_Circle(radius[kid], kid) for kid in kids]
        packed.sort(key=lambda c: (-c.r, c.iri.value))
        enclose_r = pack_siblings(packed, rand)
        for circle in packed:
            offsets[circle.iri] = (circle.x, circle.y)
        radius[node] = enclose_r * _PAD

    # Top level: pack the forest roots as siblings of a virtual root.
    top = [_Circle(radius[iri], iri) for iri in roots]
    top.sort(key=lambda c: (-c.r, c.iri.value))
    pack_siblings(top, rand)
    for circle in top:
        offsets[circle.iri] = (circle.x, circle.y)

    circles: dict[Iri, PackedCircle] = {}
    work: list[tuple[Iri, float, float, int]] = []
    for iri in roots:
        ox, oy = offsets[iri]
        work.append((iri, ox, oy, 0))
    while work:
        iri, x, y, depth = work.pop()
        circles[iri] = PackedCircle(class_iri=iri, x=x, y=y, radius=radius[iri], depth=depth)
        for kid in children[iri]:
            ox, oy = offsets[kid]
            work.append((kid, x + ox, y + oy, depth + 1))

    root_iri = roots[0] if len(roots) == 1 else Iri(VIRTUAL_ROOT_IRI)
    return MinimapLayout(circles=circles, root_iri=root_iri)


def highlight_classes(
    layout: MinimapLayout, graph: PrototypeGraph
) -> list[tuple[Iri, PackedCircle]]:
    """The distinct node classes of the graph with their circles, ascending
    IRI. Nodes typed owl:Thing have no region and are skipped unless the
    ontology declares that class explicitly."""
    seen: set[Iri] = set()
    out: list[tuple[Iri, PackedCircle]] = []
    for node in graph.nodes:
        iri = node.class_iri
        if iri in seen:
            continue
        seen.add(iri)
        circle = layout.circles.get(iri)
        if circle is None:
            if iri == TOP_CLASS:
                continue
            raise UnknownClass(f"class {iri.value} is not in the layout", classIri=iri.value)
        out.append((iri, circle))
    out.sort(key=lambda pair: pair[0].value)
    return out
