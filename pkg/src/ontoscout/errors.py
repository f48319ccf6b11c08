"""Exception hierarchy shared by all ontoscout modules.

Every exception carries a machine-readable ``code`` drawn from a closed set;
the HTTP layer maps codes to statuses and never leaks stack traces.
"""

from __future__ import annotations

from typing import Any


class OntoscoutError(Exception):
    """Base class; ``code`` is stable and machine-readable."""

    code = "InternalError"
    http_status = 500

    def __init__(self, message: str, **details: Any) -> None:
        super().__init__(message)
        self.message = message
        self.details = details

    def to_payload(self) -> dict[str, Any]:
        return {"code": self.code, "message": self.message, "details": self.details}


# --- parsing / model construction -----------------------------------------


class RdfSyntaxError(OntoscoutError):
    """Malformed RDF input; carries 1-based line and column."""

    code = "SyntaxError"
    http_status = 400

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"{message} (line {line}, column {column})", line=line, column=column)
        self.line = line
        self.column = column


class UnsupportedFeature(OntoscoutError):
    """Input uses a construct outside the declared Turtle subset."""

    code = "UnsupportedFeature"
    http_status = 400


class InvalidLiteral(OntoscoutError):
    """Literal lexical form does not parse under its datatype grammar."""

    code = "InvalidLiteral"
    http_status = 400


class InvalidIri(OntoscoutError):
    code = "InvalidIri"
    http_status = 400


class CyclicHierarchy(OntoscoutError):
    """Subclass edges form a cycle; details name the cycle members."""

    code = "CyclicHierarchy"
    http_status = 400


# --- embedding / index ------------------------------------------------------


class DimensionMismatch(OntoscoutError):
    code = "DimensionMismatch"
    http_status = 400


class TransportError(OntoscoutError):
    """Network-level failure talking to a remote service."""

    code = "TransportError"
    http_status = 502


class RequestTimeout(OntoscoutError):
    code = "Timeout"
    http_status = 504


class IoError(OntoscoutError):
    code = "IoError"
    http_status = 500


class FormatVersionMismatch(OntoscoutError):
    """Index file magic or version not recognized."""

    code = "FormatVersionMismatch"
    http_status = 500


class DuplicateKey(OntoscoutError):
    code = "DuplicateKey"
    http_status = 400


# --- topic pipeline ---------------------------------------------------------


class ProviderError(OntoscoutError):
    """Labeling provider failed for one topic."""

    code = "ProviderError"
    http_status = 502


class UnknownTopic(OntoscoutError):
    code = "UnknownTopic"
    http_status = 404


# --- prototype graph --------------------------------------------------------


class UnknownClass(OntoscoutError):
    code = "UnknownClass"
    http_status = 404


class UnknownProperty(OntoscoutError):
    code = "UnknownProperty"
    http_status = 404


class UnknownNode(OntoscoutError):
    code = "UnknownNode"
    http_status = 400


class UnknownElement(OntoscoutError):
    code = "UnknownElement"
    http_status = 400


class DomainViolation(OntoscoutError):
    code = "DomainViolation"
    http_status = 400


class RangeViolation(OntoscoutError):
    code = "RangeViolation"
    http_status = 400


class OperatorDatatypeMismatch(OntoscoutError):
    code = "OperatorDatatypeMismatch"
    http_status = 400


class DuplicateConstraint(OntoscoutError):
    code = "DuplicateConstraint"
    http_status = 400


class WouldDisconnect(OntoscoutError):
    code = "WouldDisconnect"
    http_status = 400


class RootRemoval(OntoscoutError):
    code = "RootRemoval"
    http_status = 400


class InvalidGraph(OntoscoutError):
    """Graph failed validation; details carry the diagnostics."""

    code = "InvalidGraph"
    http_status = 400


# --- query generation / execution -------------------------------------------


class IncomparableDatatypes(OntoscoutError):
    code = "IncomparableDatatypes"
    http_status = 400


class EndpointError(OntoscoutError):
    """SPARQL endpoint returned a non-success status."""

    code = "EndpointError"
    http_status = 502


class MalformedResults(OntoscoutError):
    """Endpoint response is not a conforming SPARQL JSON results document."""

    code = "MalformedResults"
    http_status = 502


class MissingVariable(OntoscoutError):
    code = "MissingVariable"
    http_status = 502


class ConfigError(OntoscoutError):
    code = "ConfigError"
    http_status = 400
