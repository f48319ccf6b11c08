from __future__ import annotations

import json
import socket
import threading
import time
from pathlib import Path

import pytest
import uvicorn

from ontoscout.config import Config
from ontoscout.ontology import OntologyModel, build_ontology
from ontoscout.pipeline import ExplorationIndex, build_index
from ontoscout.rdfio import parse_rdf_file
from ontoscout.store import InstanceStore
from ontoscout.terms import Iri, Literal, Triple, RDF_TYPE, RDFS_LABEL, RDFS_SUBCLASSOF, XSD

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
ONTO = "http://example.org/onto/"
KG = "http://example.org/kg/"

OWL_CLASS = "http://www.w3.org/2002/07/owl#Class"
OWL_OBJECT = "http://www.w3.org/2002/07/owl#ObjectProperty"
OWL_DATATYPE = "http://www.w3.org/2002/07/owl#DatatypeProperty"
RDFS_DOMAIN = "http://www.w3.org/2000/01/rdf-schema#domain"
RDFS_RANGE = "http://www.w3.org/2000/01/rdf-schema#range"


def onto(local: str) -> Iri:
    return Iri(ONTO + local)


def kg(local: str) -> Iri:
    return Iri(KG + local)


def xsd(name: str) -> Iri:
    return Iri(XSD + name)


def decl_class(local: str, *parents: str, label: str | None = None) -> list[Triple]:
    out = [Triple(onto(local), Iri(RDF_TYPE), Iri(OWL_CLASS))]
    if label is not None:
        out.append(Triple(onto(local), Iri(RDFS_LABEL), Literal(label)))
    for parent in parents:
        out.append(Triple(onto(local), Iri(RDFS_SUBCLASSOF), onto(parent)))
    return out


def decl_property(
    local: str,
    kind: str,
    domain: str | None,
    range_name: str | None,
    label: str | None = None,
) -> list[Triple]:
    decl = OWL_OBJECT if kind == "object" else OWL_DATATYPE
    out = [Triple(onto(local), Iri(RDF_TYPE), Iri(decl))]
    if label is not None:
        out.append(Triple(onto(local), Iri(RDFS_LABEL), Literal(label)))
    if domain:
        out.append(Triple(onto(local), Iri(RDFS_DOMAIN), onto(domain)))
    if range_name:
        target = xsd(range_name) if kind == "datatype" else onto(range_name)
        out.append(Triple(onto(local), Iri(RDFS_RANGE), target))
    return out


@pytest.fixture(scope="session")
def mini_model() -> OntologyModel:
    """Small hand ontology shared by unit tests."""
    triples = (
        decl_class("Person", label="Person")
        + decl_class("Athlete", "Person", label="Athlete")
        + decl_class("Club", label="Club")
        + decl_class("Work", label="Work")
        + decl_class("Place", label="Place")
        + decl_class("Ship", label="Ship")
        + decl_property("author", "object", "Person", "Work", label="author")
        + decl_property("team", "object", "Athlete", "Club", label="team")
        + decl_property("birthPlace", "object", "Person", "Place", label="birth place")
        + decl_property("previous", "object", "Work", "Work", label="previous")
        + decl_property("anchored", "object", "Ship", "Place", label="anchored")
        + decl_property("relatedTo", "object", None, None, label="related to")
        + decl_property("birthDate", "datatype", "Person", "date", label="birth date")
        + decl_property("name", "datatype", None, "string", label="name")
        + decl_property("height", "datatype", "Person", "decimal", label="height")
    )
    return build_ontology(triples)


@pytest.fixture(scope="session")
def desk_ontology_triples() -> list[Triple]:
    return parse_rdf_file(str(FIXTURES / "desk" / "ontology.ttl"))


@pytest.fixture(scope="session")
def desk_model(desk_ontology_triples) -> OntologyModel:
    return build_ontology(desk_ontology_triples)


@pytest.fixture(scope="session")
def desk_instance_triples() -> list[Triple]:
    return parse_rdf_file(str(FIXTURES / "desk" / "instances.nt"))


@pytest.fixture(scope="session")
def desk_store(desk_instance_triples) -> InstanceStore:
    return InstanceStore(desk_instance_triples)


@pytest.fixture(scope="session")
def desk_full_store(desk_ontology_triples, desk_instance_triples) -> InstanceStore:
    """Instances plus ontology triples, as a real endpoint would be loaded."""
    return InstanceStore(desk_instance_triples + desk_ontology_triples)


@pytest.fixture(scope="session")
def manifest() -> dict:
    return json.loads((FIXTURES / "desk" / "manifest.json").read_text())


@pytest.fixture(scope="session")
def fig1_store() -> InstanceStore:
    return InstanceStore(parse_rdf_file(str(FIXTURES / "fig1" / "instances.nt")))


@pytest.fixture(scope="session")
def desk_index_path(tmp_path_factory) -> str:
    path = tmp_path_factory.mktemp("index") / "desk.idx"
    config = Config(
        ontology_path=str(FIXTURES / "desk" / "ontology.ttl"),
        data_path=str(FIXTURES / "desk" / "instances.nt"),
        index_path=str(path),
    )
    build_index(config)
    return str(path)


@pytest.fixture(scope="session")
def artifact(desk_index_path) -> ExplorationIndex:
    return ExplorationIndex.load(desk_index_path)


def free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


class ServerHandle:
    def __init__(self, app, port: int | None = None):
        self.port = port or free_port()
        self.url = f"http://127.0.0.1:{self.port}"
        config = uvicorn.Config(app, host="127.0.0.1", port=self.port, log_level="error")
        self.server = uvicorn.Server(config)
        self.thread = threading.Thread(target=self.server.run, daemon=True)

    def __enter__(self) -> "ServerHandle":
        self.thread.start()
        deadline = time.time() + 10
        while not self.server.started:
            if time.time() > deadline:
                raise RuntimeError("server did not start")
            time.sleep(0.01)
        return self

    def __exit__(self, *exc_info) -> None:
        self.server.should_exit = True
        self.thread.join(timeout=10)


@pytest.fixture(scope="session")
def sparql_endpoint(desk_full_store):
    """HTTP SPARQL endpoint over the desk fixture (evaluator-backed)."""
    from ontoscout.localendpoint import create_app

    with ServerHandle(create_app(desk_full_store)) as handle:
        yield handle.url + "/sparql"
