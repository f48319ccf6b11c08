"""Stateless HTTP API over a built exploration index.

All state lives in the immutable index and the write-once prevalence cache;
the prototype graph travels in each request body, so any request sequence
replays identically against a fresh process. Module errors map to ApiError
payloads (400 validation, 404 unknown ids, 502 endpoint failures, 504
timeouts); stack traces never leak. Routes are versioned under /v1.
"""

from __future__ import annotations

from typing import Any

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .client import SparqlClient, assemble_instances
from .config import Config
from .errors import OntoscoutError
from .embed import OfflineEmbedder, RemoteEmbedder
from .index import FORMAT_VERSION
from .layout import highlight_classes
from .pipeline import ExplorationIndex
from .proto import PrototypeGraph, validate_graph
from .sparqlgen import generate_select
from .suggest import (
    DEFAULT_EXPANSION_LINKS,
    DEFAULT_START_LINKS,
    search_constraints,
    search_out_links,
    start_links,
)
from .terms import Iri

API_PREFIX = "/v1"


class StartLinksRequest(BaseModel):
    topicIds: list[int] = Field(min_length=1)
    k: int = DEFAULT_START_LINKS


class LinkSearchRequest(BaseModel):
    classIri: str
    query: str = ""
    k: int = DEFAULT_EXPANSION_LINKS


class GraphRequest(BaseModel):
    graph: dict[str, Any]


class GraphQueryRequest(BaseModel):
    graph: dict[str, Any]
    limit: int | None = None
    offset: int = 0


class ValidationFailed(OntoscoutError):
    """Carries the first diagnostic's code plus the full diagnostic list."""

    http_status = 400

    def __init__(self, code: str, message: str, diagnostics) -> None:
        super().__init__(message, diagnostics=[d.to_payload() for d in diagnostics])
        self.code = code


def _error_response(status: int, code: str, message: str, details: dict) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={
            "httpStatus": status,
            "code": code,
            "message": message,
            "details": details,
        },
    )


def create_app(artifact: ExplorationIndex, config: Config) -> FastAPI:
    app = FastAPI(title="ontoscout", version=__version__, docs_url=None, redoc_url=None)

    if config.cors_origin:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=[config.cors_origin],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    client = SparqlClient(
        config.endpoint_url,
        timeout=config.timeout,
        max_get_length=config.max_get_length,
        bearer_token=config.endpoint_token,
        connection_cap=config.connection_cap,
    )
    if config.embedder == "remote" and config.embedder_url:
        embedder = RemoteEmbedder(
            config.embedder_url,
            config.embedder_model or "default",
            artifact.dimension,
            config.timeout,
        )
    else:
        embedder = OfflineEmbedder(artifact.dimension)

    @app.exception_handler(OntoscoutError)
    async def ontoscout_error_handler(request: Request, exc: OntoscoutError) -> JSONResponse:
        return _error_response(exc.http_status, exc.code, exc.message, exc.details)

    if config.auth_token:

        @app.middleware("http")
        async def require_token(request: Request, call_next):
            if not request.url.path.endswith("/healthz"):
                expected = f"Bearer {config.auth_token}"
                if request.headers.get("authorization") != expected:
                    return _error_response(401, "Unauthorized", "missing or bad token", {})
            return await call_next(request)

    def parse_graph(payload: dict[str, Any]) -> PrototypeGraph:
        return PrototypeGraph.from_json_dict(payload)

    def validated_graph(payload: dict[str, Any]) -> PrototypeGraph:
        graph = parse_graph(payload)
        diagnostics = validate_graph(graph, artifact.ontology)
        if diagnostics:
            first = diagnostics[0]
            raise ValidationFailed(first.code, first.message, diagnostics)
        return graph

    @app.get(f"{API_PREFIX}/healthz")
    def healthz() -> dict[str, Any]:
        return {
            "status": "ok",
            "formatVersion": FORMAT_VERSION,
            "dimension": artifact.dimension,
            "classes": len(artifact.ontology.classes),
            "properties": len(artifact.ontology.properties),
            "topics": len(artifact.topics.topics),
            "indexedDocuments": len(artifact.vectors),
            "endpointUrl": config.endpoint_url,
        }

    @app.get(f"{API_PREFIX}/topics")
    def topics() -> dict[str, Any]:
        payload = []
        for tid in sorted(artifact.topics.topics):
            topic = artifact.topics.topics[tid]
            payload.append(
                {
                    "id": topic.id,
                    "label": topic.label,
                    "keywords": [[term, weight] for term, weight in topic.keywords],
                    "memberClasses": [iri.value for iri in topic.sorted_members()],
                    "parentTopicId": topic.parent_topic_id,
                    "size": len(topic.member_classes),
                }
            )
        return {"topics": payload, "roots": sorted(artifact.topics.roots)}

    @app.post(f"{API_PREFIX}/suggest/start-links")
    def suggest_start_links(request: StartLinksRequest) -> dict[str, Any]:
        suggestions = start_links(
            request.topicIds,
            artifact.topics,
            artifact.vectors,
            artifact.ontology,
            k=request.k,
            prevalence=artifact.prevalence,
        )
        return {"suggestions": [s.to_payload() for s in suggestions]}

    @app.post(f"{API_PREFIX}/suggest/out-links")
    def suggest_out_links(request: LinkSearchRequest) -> dict[str, Any]:
        suggestions = search_out_links(
            Iri(request.classIri),
            request.query,
            artifact.ontology,
            artifact.vectors,
            embedder,
            k=request.k,
            prevalence=artifact.prevalence,
        )
        return {"suggestions": [s.to_payload() for s in suggestions]}

    @app.post(f"{API_PREFIX}/suggest/constraints")
    def suggest_constraints(request: LinkSearchRequest) -> dict[str, Any]:
        suggestions = search_constraints(
            Iri(request.classIri),
            request.query,
            artifact.ontology,
            artifact.vectors,
            embedder,
            k=request.k,
            prevalence=artifact.prevalence,
        )
        return {"suggestions": [s.to_payload() for s in suggestions]}

    @app.post(f"{API_PREFIX}/graph/validate")
    def graph_validate(request: GraphRequest) -> dict[str, Any]:
        graph = parse_graph(request.graph)
        diagnostics = validate_graph(graph, artifact.ontology)
        return {
            "valid": not diagnostics,
            "diagnostics": [d.to_payload() for d in diagnostics],
        }

    @app.post(f"{API_PREFIX}/graph/sparql")
    def graph_sparql(request: GraphQueryRequest) -> dict[str, Any]:
        graph = validated_graph(request.graph)
        query = generate_select(
            graph,
            artifact.ontology,
            limit=request.limit if request.limit is not None else config.default_limit,
            offset=request.offset,
            subclass_closure=config.subclass_closure,
        )
        return query.to_payload()

    @app.post(f"{API_PREFIX}/graph/execute")
    def graph_execute(request: GraphQueryRequest) -> dict[str, Any]:
        graph = validated_graph(request.graph)
        query = generate_select(
            graph,
            artifact.ontology,
            limit=request.limit if request.limit is not None else config.default_limit,
            offset=request.offset,
            subclass_closure=config.subclass_closure,
        )
        bindings = client.execute(query)
        iris = sorted(
            {term for binding in bindings for term in binding.values() if isinstance(term, Iri)},
            key=lambda i: i.value,
        )
        labels = client.fetch_labels(iris) if iris else {}
        instances = assemble_instances(graph, bindings, labels)
        return {
            "query": query.to_payload(),
            "count": len(instances),
            "instances": [instance.to_payload() for instance in instances],
        }

    @app.get(f"{API_PREFIX}/layout/minimap")
    def layout_minimap() -> dict[str, Any]:
        return artifact.layout.to_payload()

    @app.post(f"{API_PREFIX}/layout/highlight")
    def layout_highlight(request: GraphRequest) -> dict[str, Any]:
        graph = parse_graph(request.graph)
        highlights = highlight_classes(artifact.layout, graph)
        return {
            "highlights": [
                {"classIri": iri.value, "circle": circle.to_payload()}
                for iri, circle in highlights
            ]
        }

    return app
