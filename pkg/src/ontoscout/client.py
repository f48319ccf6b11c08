"""SPARQL 1.1 protocol client, results parsing, prevalence counting with a
write-once cache, and assembly of bindings into result instances for the
small-multiples view.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

import requests

from .errors import (
    EndpointError,
    MalformedResults,
    MissingVariable,
    RequestTimeout,
    TransportError,
)
from .proto import PrototypeGraph, constraint_variable, node_variable
from .sparqlgen import GeneratedQuery, generate_prevalence_count
from .terms import RDFS_LABEL, XSD_STRING, Iri, Literal, Term

Binding = dict[str, Term]

RESULTS_MEDIA_TYPE = "application/sparql-results+json"
# Queries longer than this go via POST (URL length limits).
DEFAULT_MAX_GET_LENGTH = 1500


def parse_results_document(document: Any) -> tuple[list[str], list[Binding]]:
    """Standard SPARQL JSON results -> (head.vars, bindings with typed terms)."""
    if not isinstance(document, dict):
        raise MalformedResults("results document is not a JSON object")
    head = document.get("head")
    results = document.get("results")
    if not isinstance(head, dict) or "vars" not in head:
        raise MalformedResults("results document lacks head.vars")
    if not isinstance(results, dict) or "bindings" not in results:
        raise MalformedResults("results document lacks results.bindings")
    variables = list(head["vars"])
    bindings: list[Binding] = []
    for row in results["bindings"]:
        if not isinstance(row, dict):
            raise MalformedResults("binding row is not an object")
        parsed: Binding = {}
        for var, cell in row.items():
            parsed[var] = _parse_term(cell)
        bindings.append(parsed)
    return variables, bindings


def _parse_term(cell: Any) -> Term:
    if not isinstance(cell, dict) or "type" not in cell or "value" not in cell:
        raise MalformedResults(f"malformed term {cell!r}")
    kind = cell["type"]
    value = cell["value"]
    if kind == "uri":
        return Iri(value)
    if kind == "bnode":
        return Iri(f"urn:bnode:{value}")
    if kind in ("literal", "typed-literal"):
        lang = cell.get("xml:lang")
        datatype = cell.get("datatype")
        if lang:
            return Literal(value, language=lang)
        return Literal(value, Iri(datatype) if datatype else Iri(XSD_STRING))
    raise MalformedResults(f"unknown term type {kind!r}")


class SparqlClient:
    """Shareable client for a SPARQL endpoint; short queries go via GET,
    longer ones via form-encoded POST. Concurrent executes share the
    session's pool, capped at ``connection_cap``."""

    def __init__(
        self,
        endpoint_url: str,
        timeout: float = 30.0,
        max_get_length: int = DEFAULT_MAX_GET_LENGTH,
        bearer_token: str | None = None,
        connection_cap: int = 10,
        session: requests.Session | None = None,
    ):
        self.endpoint_url = endpoint_url
        self.timeout = timeout
        self.max_get_length = max_get_length
        if session is None:
            session = requests.Session()
            adapter = requests.adapters.HTTPAdapter(
                pool_connections=connection_cap,
                pool_maxsize=connection_cap,
                pool_block=True,
            )
            session.mount("http://", adapter)
            session.mount("https://", adapter)
        self._session = session
        self._headers = {"Accept": RESULTS_MEDIA_TYPE}
        if bearer_token:
            self._headers["Authorization"] = f"Bearer {bearer_token}"

    def execute(self, query: GeneratedQuery | str) -> list[Binding]:
        _, bindings = self.execute_with_vars(query)
        return bindings

    def execute_with_vars(self, query: GeneratedQuery | str) -> tuple[list[str], list[Binding]]:
        text = query.text if isinstance(query, GeneratedQuery) else query
        try:
            if len(text) <= self.max_get_length:
                response = self._session.get(
                    self.endpoint_url,
                    params={"query": text},
                    headers=self._headers,
                    timeout=self.timeout,
                )
            else:
                response = self._session.post(
                    self.endpoint_url,
                    data={"query": text},
                    headers=self._headers,
                    timeout=self.timeout,
                )
        except requests.Timeout as exc:
            raise RequestTimeout(
                f"endpoint timed out after {self.timeout}s", url=self.endpoint_url
            ) from exc
        except requests.RequestException as exc:
            raise TransportError(f"endpoint unreachable: {exc}", url=self.endpoint_url) from exc
        if response.status_code != 200:
            raise EndpointError(
                f"endpoint returned {response.status_code}: {response.text[:200]}",
                status=response.status_code,
                url=self.endpoint_url,
            )
        try:
            document = response.json()
        except ValueError as exc:
            raise MalformedResults(f"endpoint response is not JSON: {exc}") from exc
        return parse_results_document(document)

    def fetch_labels(self, iris: Iterable[Iri]) -> dict[Iri, str]:
        """One batched VALUES query; ties on multiple labels resolve to the
        lexicographically smallest."""
        distinct = sorted(set(iris), key=lambda i: i.value)
        if not distinct:
            return {}
        values = " ".join(f"<{iri.value}>" for iri in distinct)
        text = (
            "SELECT ?s ?label WHERE { VALUES ?s { "
            + values
            + " } ?s <"
            + RDFS_LABEL
            + "> ?label . }"
        )
        labels: dict[Iri, str] = {}
        for binding in self.execute(text):
            subject = binding.get("s")
            label = binding.get("label")
            if isinstance(subject, Iri) and isinstance(label, Literal):
                current = labels.get(subject)
                if current is None or label.lexical < current:
                    labels[subject] = label.lexical
        return labels


@dataclass
class PrevalenceCache:
    """Write-once map property IRI -> triple count. Concurrent misses may
    both compute, but the first write wins and later reads agree."""

    built_at: float = field(default_factory=time.time)
    _counts: dict[Iri, int] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock)

    def get(self, property_iri: Iri) -> int | None:
        with self._lock:
            return self._counts.get(property_iri)

    def put_once(self, property_iri: Iri, count: int) -> int:
        with self._lock:
            if property_iri not in self._counts:
                self._counts[property_iri] = count
            return self._counts[property_iri]

    def snapshot(self) -> dict[Iri, int]:
        with self._lock:
            return dict(self._counts)


def prevalence(
    client: SparqlClient, property_iri: Iri, cache: PrevalenceCache
) -> int | None:
    """Cached COUNT(*) for the property; None (unknown) on endpoint failure,
    which is distinct from a genuine zero."""
    cached = cache.get(property_iri)
    if cached is not None:
        return cached
    query = generate_prevalence_count(property_iri)
    try:
        bindings = client.execute(query)
    except (TransportError, EndpointError, RequestTimeout, MalformedResults):
        return None
    count = 0
    if bindings:
        cell = bindings[0].get("c")
        if isinstance(cell, Literal):
            try:
                count = int(cell.lexical)
            except ValueError:
                return None
    return cache.put_once(property_iri, count)


@dataclass(frozen=True)
class ResultInstance:
    """One matched sub-graph, shaped exactly like the prototype graph."""

    node_assignments: dict[int, Iri]
    constraint_values: dict[tuple[int, int], Literal]
    display_labels: dict[Iri, str]

    def to_payload(self) -> dict[str, Any]:
        return {
            "nodeAssignments": {
                str(node_id): iri.value for node_id, iri in sorted(self.node_assignments.items())
            },
            "constraintValues": [
                {
                    "nodeId": node_id,
                    "index": index,
                    "value": {
                        "lexical": lit.lexical,
                        "datatypeIri": lit.datatype.value,
                        "languageTag": lit.language,
                    },
                }
                for (node_id, index), lit in sorted(self.constraint_values.items())
            ],
            "displayLabels": {
                iri.value: label
                for iri, label in sorted(self.display_labels.items(), key=lambda p: p[0].value)
            },
        }


def assemble_instances(
    graph: PrototypeGraph,
    bindings: list[Binding],
    labels: Mapping[Iri, str] | None = None,
) -> list[ResultInstance]:
    """One instance per binding; display labels fall back to IRI local names.
    Raises MissingVariable when a binding lacks a projected node variable."""
    labels = labels or {}
    instances: list[ResultInstance] = []
    for binding in bindings:
        assignments: dict[int, Iri] = {}
        for node in graph.nodes:
            var = node_variable(node.node_id)
            term = binding.get(var)
            if not isinstance(term, Iri):
                raise MissingVariable(
                    f"binding lacks node variable ?{var}", variable=var
                )
            assignments[node.node_id] = term
        constraint_values: dict[tuple[int, int], Literal] = {}
        for node in graph.nodes:
            for c_idx in range(len(node.constraints)):
                var = constraint_variable(node.node_id, c_idx)
                term = binding.get(var)
                if isinstance(term, Literal):
                    constraint_values[(node.node_id, c_idx)] = term
        display: dict[Iri, str] = {}
        for iri in assignments.values():
            display[iri] = labels.get(iri, iri.local_name())
        instances.append(
            ResultInstance(
                node_assignments=assignments,
                constraint_values=constraint_values,
                display_labels=display,
            )
        )
    return instances
