"""RDF term model: IRIs, literals, triples, and the datatype lattice used
for constraint checking.

Terms are immutable values, hashable, and safe to share across threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

from .errors import InvalidIri, InvalidLiteral

XSD = "http://www.w3.org/2001/XMLSchema#"
RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
OWL_NS = "http://www.w3.org/2002/07/owl#"

XSD_STRING = XSD + "string"
XSD_INTEGER = XSD + "integer"
XSD_DECIMAL = XSD + "decimal"
XSD_DOUBLE = XSD + "double"
XSD_FLOAT = XSD + "float"
XSD_BOOLEAN = XSD + "boolean"
XSD_DATE = XSD + "date"
XSD_DATETIME = XSD + "dateTime"
RDF_LANGSTRING = RDF_NS + "langString"
RDF_TYPE = RDF_NS + "type"
RDFS_SUBCLASSOF = RDFS_NS + "subClassOf"
RDFS_LABEL = RDFS_NS + "label"
OWL_THING = OWL_NS + "Thing"

NUMERIC_DATATYPES = frozenset(
    {
        XSD_INTEGER,
        XSD_DECIMAL,
        XSD_DOUBLE,
        XSD_FLOAT,
        XSD + "int",
        XSD + "long",
        XSD + "short",
        XSD + "byte",
        XSD + "nonNegativeInteger",
        XSD + "positiveInteger",
    }
)
DATE_DATATYPES = frozenset({XSD_DATE, XSD_DATETIME})
STRING_DATATYPES = frozenset({XSD_STRING, RDF_LANGSTRING})

# Characters excluded from IRIREF by the N-Triples grammar, plus whitespace.
_IRI_BAD_CHARS = re.compile(r'[\x00-\x20<>"{}|^`\\]')
_SCHEME = re.compile(r"^[A-Za-z][A-Za-z0-9+.-]*:")

_INTEGER_LEX = re.compile(r"^[+-]?[0-9]+$")
_DECIMAL_LEX = re.compile(r"^[+-]?(?:[0-9]+\.[0-9]*|\.[0-9]+|[0-9]+)$")
_FLOAT_LEX = re.compile(
    r"^(?:[+-]?(?:[0-9]+\.[0-9]*|\.[0-9]+|[0-9]+)(?:[eE][+-]?[0-9]+)?|[+-]?INF|NaN)$"
)
_BOOLEAN_LEX = re.compile(r"^(?:true|false|0|1)$")
_TZ = r"(?:Z|[+-][0-9]{2}:[0-9]{2})?"
_DATE_LEX = re.compile(r"^-?[0-9]{4,}-[0-9]{2}-[0-9]{2}" + _TZ + "$")
_DATETIME_LEX = re.compile(
    r"^-?[0-9]{4,}-[0-9]{2}-[0-9]{2}T[0-9]{2}:[0-9]{2}:[0-9]{2}(?:\.[0-9]+)?" + _TZ + "$"
)

_LEXICAL_GRAMMARS = {
    XSD_INTEGER: _INTEGER_LEX,
    XSD + "int": _INTEGER_LEX,
    XSD + "long": _INTEGER_LEX,
    XSD + "short": _INTEGER_LEX,
    XSD + "byte": _INTEGER_LEX,
    XSD + "nonNegativeInteger": _INTEGER_LEX,
    XSD + "positiveInteger": _INTEGER_LEX,
    XSD_DECIMAL: _DECIMAL_LEX,
    XSD_DOUBLE: _FLOAT_LEX,
    XSD_FLOAT: _FLOAT_LEX,
    XSD_BOOLEAN: _BOOLEAN_LEX,
    XSD_DATE: _DATE_LEX,
    XSD_DATETIME: _DATETIME_LEX,
}


@dataclass(frozen=True, slots=True)
class Iri:
    """An absolute IRI. Rejects whitespace, angle brackets, and relative refs."""

    value: str

    def __post_init__(self) -> None:
        if not self.value:
            raise InvalidIri("empty IRI")
        if _IRI_BAD_CHARS.search(self.value):
            raise InvalidIri(f"illegal character in IRI: {self.value!r}")
        if not _SCHEME.match(self.value):
            raise InvalidIri(f"IRI is not absolute (no scheme): {self.value!r}")

    def local_name(self) -> str:
        """Substring after the last '#' or '/', used as a fallback label."""
        v = self.value
        for sep in ("#", "/"):
            if sep in v:
                tail = v.rsplit(sep, 1)[1]
                if tail:
                    return tail
        return v

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, slots=True)
class Literal:
    """An RDF literal. Datatype defaults to xsd:string; a language tag forces
    rdf:langString. Numeric/date lexical forms are validated on construction."""

    lexical: str
    datatype: Iri = field(default_factory=lambda: Iri(XSD_STRING))
    language: str | None = None

    def __post_init__(self) -> None:
        if self.language is not None:
            if self.datatype.value not in (RDF_LANGSTRING, XSD_STRING):
                raise InvalidLiteral(
                    f"language tag with non-language datatype {self.datatype.value}"
                )
            if self.datatype.value != RDF_LANGSTRING:
                object.__setattr__(self, "datatype", Iri(RDF_LANGSTRING))
        elif self.datatype.value == RDF_LANGSTRING:
            raise InvalidLiteral("rdf:langString literal requires a language tag")
        grammar = _LEXICAL_GRAMMARS.get(self.datatype.value)
        if grammar is not None and not grammar.match(self.lexical):
            raise InvalidLiteral(
                f"{self.lexical!r} is not a valid {self.datatype.local_name()} literal"
            )

    def is_numeric(self) -> bool:
        return self.datatype.value in NUMERIC_DATATYPES

    def is_date(self) -> bool:
        return self.datatype.value in DATE_DATATYPES

    def is_string(self) -> bool:
        return self.datatype.value in STRING_DATATYPES

    def __str__(self) -> str:
        if self.language:
            return f'"{self.lexical}"@{self.language}'
        if self.datatype.value == XSD_STRING:
            return f'"{self.lexical}"'
        return f'"{self.lexical}"^^<{self.datatype.value}>'


Term = Union[Iri, Literal]


@dataclass(frozen=True, slots=True)
class Triple:
    """Subject and predicate are IRIs; the object may be an IRI or a literal."""

    subject: Iri
    predicate: Iri
    object: Term

    def __str__(self) -> str:
        return f"{self.subject} {self.predicate} {self.object} ."
