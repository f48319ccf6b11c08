"""A desk-scale SPARQL endpoint serving an InstanceStore over the standard
protocol, backed by the in-process subset evaluator.

Used as the fixture endpoint in tests and for offline demos:

    uvicorn --factory 'ontoscout.localendpoint:app_from_env' --port 3030

with ONTOSCOUT_ENDPOINT_DATA pointing at one or more Turtle/N-Triples files
(path separator ``:``).
"""

from __future__ import annotations

import os

from fastapi import FastAPI, Query, Request, Response

from .errors import OntoscoutError
from .rdfio import parse_rdf_file
from .sparqleval import execute_text
from .store import InstanceStore

RESULTS_MEDIA_TYPE = "application/sparql-results+json"


def create_app(store: InstanceStore) -> FastAPI:
    app = FastAPI(title="ontoscout fixture endpoint", docs_url=None, redoc_url=None)

    def run(query: str) -> Response:
        import json

        try:
            document = execute_text(store, query)
        except OntoscoutError as exc:
            return Response(
                content=json.dumps({"error": exc.message}),
                status_code=400,
                media_type="application/json",
            )
        return Response(
            content=json.dumps(document), media_type=RESULTS_MEDIA_TYPE
        )

    @app.get("/sparql")
    def sparql_get(query: str = Query(...)) -> Response:
        return run(query)

    @app.post("/sparql")
    async def sparql_post(request: Request) -> Response:
        content_type = request.headers.get("content-type", "")
        if content_type.startswith("application/sparql-query"):
            body = await request.body()
            return run(body.decode("utf-8"))
        form = await request.form()
        query = form.get("query")
        if not query:
            return Response(content="missing query parameter", status_code=400)
        return run(str(query))

    return app


def store_from_files(paths: list[str]) -> InstanceStore:
    triples = []
    for path in paths:
        triples.extend(parse_rdf_file(path))
    return InstanceStore(triples)


def app_from_env() -> FastAPI:
    raw = os.environ.get("ONTOSCOUT_ENDPOINT_DATA", "")
    paths = [p for p in raw.split(":") if p]
    if not paths:
        raise RuntimeError("ONTOSCOUT_ENDPOINT_DATA must list at least one RDF file")
    return create_app(store_from_files(paths))
