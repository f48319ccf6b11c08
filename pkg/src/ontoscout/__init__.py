"""ontoscout: exploratory knowledge-graph retrieval.

Guides users from ontology topics to start links, through prototype-graph
construction with semantic search, to SPARQL generation and live instance
results, plus a circle-packing overview of the class hierarchy.
"""

__version__ = "0.1.0"

from .terms import Iri, Literal, Triple  # noqa: F401
from .ontology import OntologyModel, build_ontology  # noqa: F401
from .rdfio import parse_rdf, parse_rdf_file, serialize_ntriples  # noqa: F401
from .proto import (  # noqa: F401
    Constraint,
    PrototypeGraph,
    add_constraint,
    add_edge,
    new_graph,
    remove_element,
    validate_graph,
)
from .sparqlgen import compare_literal, generate_prevalence_count, generate_select  # noqa: F401
from .store import InstanceStore, match_bgp  # noqa: F401
