"""In-process evaluator for the SPARQL subset this system emits.

Parses query text from scratch (it shares no code or structure with the
generator, which keeps dual-oracle tests meaningful) and evaluates it over
an InstanceStore: SELECT with variable projection or COUNT(*), basic graph
patterns, the ``a/<subClassOf>*`` type path, FILTER comparisons and
CONTAINS, VALUES blocks over one variable, LIMIT and OFFSET.

Solutions are returned in a canonical sorted order so the same query over
the same store always yields byte-identical result documents.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Union

from .errors import MalformedResults
from .store import InstanceStore
from .terms import (
    RDF_TYPE,
    XSD_DATE,
    XSD_DATETIME,
    XSD_INTEGER,
    XSD_STRING,
    Iri,
    Literal,
    Term,
)


class SparqlParseError(MalformedResults):
    """Query text is outside the supported SPARQL subset."""

    code = "SparqlParseError"
    http_status = 400


@dataclass(frozen=True)
class _Var:
    name: str


_TermPattern = Union[_Var, Iri, Literal]


@dataclass(frozen=True)
class _TriplePattern:
    subject: _TermPattern
    predicate: Iri | _Var
    object: _TermPattern
    closure: bool = False  # predicate is the a/subClassOf* path


@dataclass(frozen=True)
class _Filter:
    variable: str
    operator: str  # comparison op or "contains"
    operand: Literal


@dataclass(frozen=True)
class _Values:
    variable: str
    iris: tuple[Iri, ...]


@dataclass(frozen=True)
class ParsedQuery:
    projection: tuple[str, ...]
    count_var: str | None
    patterns: tuple[Union[_TriplePattern, _Filter, _Values], ...]
    limit: int | None
    offset: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<iri><[^<>\s]*>)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<var>\?[A-Za-z_][A-Za-z0-9_]*)
  | (?P<dcaret>\^\^)
  | (?P<langtag>@[A-Za-z]+(?:-[A-Za-z0-9]+)*)
  | (?P<number>[0-9]+)
  | (?P<op><=|>=|!=|=|<|>)
  | (?P<punct>[{}().,*/])
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)

_STRING_UNESCAPES = {
    "t": "\t",
    "b": "\b",
    "n": "\n",
    "r": "\r",
    "f": "\f",
    '"': '"',
    "'": "'",
    "\\": "\\",
}


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise SparqlParseError(f"cannot tokenize query at offset {pos}: {text[pos:pos+20]!r}")
        pos = match.end()
        kind = match.lastgroup
        if kind == "ws":
            continue
        tokens.append((kind, match.group()))
    return tokens


def _unescape(raw: str) -> str:
    body = raw[1:-1]
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\" and i + 1 < len(body):
            nxt = body[i + 1]
            if nxt in _STRING_UNESCAPES:
                out.append(_STRING_UNESCAPES[nxt])
                i += 2
                continue
            if nxt == "u":
                out.append(chr(int(body[i + 2 : i + 6], 16)))
                i += 6
                continue
            if nxt == "U":
                out.append(chr(int(body[i + 2 : i + 10], 16)))
                i += 10
                continue
        out.append(ch)
        i += 1
    return "".join(out)


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> tuple[str, str] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> tuple[str, str]:
        tok = self.peek()
        if tok is None:
            raise SparqlParseError("unexpected end of query")
        self.pos += 1
        return tok

    def expect_word(self, word: str) -> None:
        kind, value = self.take()
        if kind != "word" or value.upper() != word:
            raise SparqlParseError(f"expected {word}, got {value!r}")

    def expect_punct(self, symbol: str) -> None:
        kind, value = self.take()
        if kind != "punct" or value != symbol:
            raise SparqlParseError(f"expected {symbol!r}, got {value!r}")

    def at_word(self, word: str) -> bool:
        tok = self.peek()
        return tok is not None and tok[0] == "word" and tok[1].upper() == word

    def parse(self) -> ParsedQuery:
        self.expect_word("SELECT")
        projection: list[str] = []
        count_var: str | None = None
        tok = self.peek()
        if tok is not None and tok[0] == "punct" and tok[1] == "(":
            self.take()
            self.expect_word("COUNT")
            self.expect_punct("(")
            self.expect_punct("*")
            self.expect_punct(")")
            self.expect_word("AS")
            kind, value = self.take()
            if kind != "var":
                raise SparqlParseError(f"expected variable after AS, got {value!r}")
            count_var = value[1:]
            self.expect_punct(")")
            projection.append(count_var)
        else:
            while True:
                tok = self.peek()
                if tok is None or tok[0] != "var":
                    break
                projection.append(self.take()[1][1:])
            if not projection:
                raise SparqlParseError("SELECT requires at least one variable")
        self.expect_word("WHERE")
        self.expect_punct("{")
        patterns: list[Union[_TriplePattern, _Filter, _Values]] = []
        while True:
            tok = self.peek()
            if tok is None:
                raise SparqlParseError("unterminated WHERE block")
            if tok[0] == "punct" and tok[1] == "}":
                self.take()
                break
            if self.at_word("FILTER"):
                patterns.append(self._parse_filter())
            elif self.at_word("VALUES"):
                patterns.append(self._parse_values())
            else:
                patterns.append(self._parse_triple())
        limit: int | None = None
        offset = 0
        while self.peek() is not None:
            if self.at_word("LIMIT"):
                self.take()
                limit = self._parse_int()
            elif self.at_word("OFFSET"):
                self.take()
                offset = self._parse_int()
            else:
                raise SparqlParseError(f"unexpected trailing token {self.peek()!r}")
        return ParsedQuery(
            projection=tuple(projection),
            count_var=count_var,
            patterns=tuple(patterns),
            limit=limit,
            offset=offset,
        )

    def _parse_int(self) -> int:
        kind, value = self.take()
        if kind != "number":
            raise SparqlParseError(f"expected integer, got {value!r}")
        return int(value)

    def _parse_term(self) -> _TermPattern:
        kind, value = self.take()
        if kind == "var":
            return _Var(value[1:])
        if kind == "iri":
            return Iri(value[1:-1])
        if kind == "string":
            lexical = _unescape(value)
            tok = self.peek()
            if tok is not None and tok[0] == "dcaret":
                self.take()
                dt_kind, dt_value = self.take()
                if dt_kind != "iri":
                    raise SparqlParseError("expected datatype IRI after ^^")
                return Literal(lexical, Iri(dt_value[1:-1]))
            if tok is not None and tok[0] == "langtag":
                self.take()
                return Literal(lexical, language=tok[1][1:])
            return Literal(lexical)
        if kind == "number":
            return Literal(value, Iri(XSD_INTEGER))
        raise SparqlParseError(f"unexpected term {value!r}")

    def _parse_triple(self) -> _TriplePattern:
        subject = self._parse_term()
        if isinstance(subject, Literal):
            raise SparqlParseError("literal subjects are not allowed")
        kind, value = self.take()
        closure = False
        if kind == "word" and value == "a":
            predicate: Iri | _Var = Iri(RDF_TYPE)
            tok = self.peek()
            if tok is not None and tok[0] == "punct" and tok[1] == "/":
                self.take()
                path_kind, path_value = self.take()
                if path_kind != "iri":
                    raise SparqlParseError("expected IRI in type path")
                self.expect_punct("*")
                closure = True
        elif kind == "iri":
            predicate = Iri(value[1:-1])
        elif kind == "var":
            predicate = _Var(value[1:])
        else:
            raise SparqlParseError(f"unexpected predicate {value!r}")
        obj = self._parse_term()
        self.expect_punct(".")
        return _TriplePattern(subject=subject, predicate=predicate, object=obj, closure=closure)

    def _parse_filter(self) -> _Filter:
        self.expect_word("FILTER")
        self.expect_punct("(")
        if self.at_word("CONTAINS"):
            self.take()
            self.expect_punct("(")
            kind, value = self.take()
            if kind != "var":
                raise SparqlParseError("CONTAINS requires a variable first argument")
            variable = value[1:]
            self.expect_punct(",")
            operand = self._parse_term()
            if not isinstance(operand, Literal):
                raise SparqlParseError("CONTAINS requires a literal second argument")
            self.expect_punct(")")
            self.expect_punct(")")
            return _Filter(variable=variable, operator="contains", operand=operand)
        kind, value = self.take()
        if kind != "var":
            raise SparqlParseError("FILTER comparison requires a variable left side")
        variable = value[1:]
        op_kind, op_value = self.take()
        if op_kind != "op":
            raise SparqlParseError(f"expected comparison operator, got {op_value!r}")
        operand = self._parse_term()
        if not isinstance(operand, Literal):
            raise SparqlParseError("FILTER comparison requires a literal right side")
        self.expect_punct(")")
        return _Filter(variable=variable, operator=op_value, operand=operand)

    def _parse_values(self) -> _Values:
        self.expect_word("VALUES")
        kind, value = self.take()
        if kind != "var":
            raise SparqlParseError("VALUES requires a variable")
        variable = value[1:]
        self.expect_punct("{")
        iris = []
        while True:
            tok = self.peek()
            if tok is None:
                raise SparqlParseError("unterminated VALUES block")
            if tok[0] == "punct" and tok[1] == "}":
                self.take()
                break
            if tok[0] != "iri":
                raise SparqlParseError("VALUES entries must be IRIs")
            iris.append(Iri(self.take()[1][1:-1]))
        return _Values(variable=variable, iris=tuple(iris))


def parse_query(text: str) -> ParsedQuery:
    return _Parser(text).parse()


# --- independent literal comparison (tuple-based, no datetime/Decimal) ------


def _eval_numeric(literal: Literal) -> Fraction:
    try:
        lex = literal.lexical.strip().lower()
        if "e" in lex:
            mantissa, exponent = lex.split("e")
            return Fraction(mantissa) * Fraction(10) ** int(exponent)
        return Fraction(lex)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not numeric: {literal.lexical!r}") from None


_DATE_RE = re.compile(r"^(-?\d{4,})-(\d{2})-(\d{2})$")
_DATETIME_RE = re.compile(
    r"^(-?\d{4,})-(\d{2})-(\d{2})T(\d{2}):(\d{2}):(\d{2})(?:\.(\d+))?$"
)


def _eval_date_key(literal: Literal) -> tuple:
    lex = literal.lexical
    if literal.datatype.value == XSD_DATE:
        match = _DATE_RE.match(lex)
        if match is None:
            raise ValueError(f"unsupported date form {lex!r}")
        return (0, int(match.group(1)), int(match.group(2)), int(match.group(3)))
    match = _DATETIME_RE.match(lex)
    if match is None:
        raise ValueError(f"unsupported dateTime form {lex!r}")
    fraction = (match.group(7) or "").ljust(9, "0")[:9]
    return (
        1,
        int(match.group(1)),
        int(match.group(2)),
        int(match.group(3)),
        int(match.group(4)),
        int(match.group(5)),
        int(match.group(6)),
        int(fraction),
    )


def _filter_passes(value: Term, flt: _Filter) -> bool:
    """FILTER semantics: a type error eliminates the row."""
    if not isinstance(value, Literal):
        return False
    operand = flt.operand
    if flt.operator == "contains":
        if not (value.is_string() and operand.is_string()):
            return False
        return operand.lexical in value.lexical
    try:
        if value.is_numeric() and operand.is_numeric():
            left: Any = _eval_numeric(value)
            right: Any = _eval_numeric(operand)
        elif value.is_date() and operand.is_date():
            left = _eval_date_key(value)
            right = _eval_date_key(operand)
            if left[0] != right[0]:
                return False
        elif value.is_string() and operand.is_string():
            left = value.lexical.encode("utf-8")
            right = operand.lexical.encode("utf-8")
        elif flt.operator in ("=", "!="):
            left = (value.datatype.value, value.lexical, value.language)
            right = (operand.datatype.value, operand.lexical, operand.language)
        else:
            return False
    except ValueError:
        return False
    if flt.operator == "=":
        return left == right
    if flt.operator == "!=":
        return left != right
    if flt.operator == "<":
        return left < right
    if flt.operator == "<=":
        return left <= right
    if flt.operator == ">":
        return left > right
    if flt.operator == ">=":
        return left >= right
    return False


# --- evaluation ---------------------------------------------------------------


def _subclass_closure_from_store(store: InstanceStore, target: Iri) -> frozenset[Iri]:
    """Classes C with C subClassOf* target according to the store's triples."""
    from .terms import RDFS_SUBCLASSOF

    children: dict[Iri, set[Iri]] = {}
    for t in store.matching(None, Iri(RDFS_SUBCLASSOF)):
        if isinstance(t.object, Iri):
            children.setdefault(t.object, set()).add(t.subject)
    out = {target}
    stack = [target]
    while stack:
        for child in children.get(stack.pop(), ()):
            if child not in out:
                out.add(child)
                stack.append(child)
    return frozenset(out)


def _match_triple(
    store: InstanceStore, solution: dict[str, Term], pattern: _TriplePattern
) -> list[dict[str, Term]]:
    def resolve(term: _TermPattern) -> Term | None:
        if isinstance(term, _Var):
            return solution.get(term.name)
        return term

    subject = resolve(pattern.subject)
    obj = resolve(pattern.object)

    if pattern.closure:
        assert isinstance(pattern.predicate, Iri)
        target = pattern.object if isinstance(pattern.object, Iri) else obj
        if not isinstance(target, Iri):
            raise SparqlParseError("type path requires a constant class")
        classes = _subclass_closure_from_store(store, target)
        subjects: set[Iri] = set()
        for cls in classes:
            subjects.update(store.subjects_of_type(cls))
        out = []
        for candidate in sorted(subjects, key=lambda i: i.value):
            if isinstance(subject, Iri) and candidate != subject:
                continue
            ext = dict(solution)
            if isinstance(pattern.subject, _Var):
                ext[pattern.subject.name] = candidate
            out.append(ext)
        return out

    if isinstance(pattern.predicate, _Var):
        bound_pred = solution.get(pattern.predicate.name)
        candidates = (
            store.matching(subject if isinstance(subject, Iri) else None, bound_pred)
            if isinstance(bound_pred, Iri)
            else [t for t in dict.fromkeys(store.triples)]
        )
    else:
        candidates = store.matching(
            subject if isinstance(subject, Iri) else None, pattern.predicate
        )

    out = []
    for t in candidates:
        if isinstance(subject, Iri) and t.subject != subject:
            continue
        if isinstance(subject, Literal):
            continue
        if isinstance(pattern.predicate, _Var):
            bound_pred = solution.get(pattern.predicate.name)
            if isinstance(bound_pred, Iri) and t.predicate != bound_pred:
                continue
        if obj is not None and t.object != obj:
            continue
        ext = dict(solution)
        if isinstance(pattern.subject, _Var):
            ext[pattern.subject.name] = t.subject
        if isinstance(pattern.predicate, _Var):
            ext[pattern.predicate.name] = t.predicate
        if isinstance(pattern.object, _Var):
            ext[pattern.object.name] = t.object
        out.append(ext)
    return out


def _canonical_sort_key(solution: dict[str, Term], projection: tuple[str, ...]):
    key = []
    for var in projection:
        term = solution.get(var)
        if term is None:
            key.append(("", "", ""))
        elif isinstance(term, Iri):
            key.append(("iri", term.value, ""))
        else:
            key.append(("lit", term.lexical, term.datatype.value + (term.language or "")))
    return tuple(key)


def evaluate(store: InstanceStore, query: ParsedQuery) -> list[dict[str, Term]]:
    """All solutions, projected, canonically ordered, LIMIT/OFFSET applied."""
    solutions: list[dict[str, Term]] = [{}]
    for pattern in query.patterns:
        if isinstance(pattern, _TriplePattern):
            next_solutions: list[dict[str, Term]] = []
            for solution in solutions:
                next_solutions.extend(_match_triple(store, solution, pattern))
            solutions = next_solutions
        elif isinstance(pattern, _Filter):
            kept = []
            for solution in solutions:
                value = solution.get(pattern.variable)
                if value is not None and _filter_passes(value, pattern):
                    kept.append(solution)
            solutions = kept
        else:
            assert isinstance(pattern, _Values)
            allowed = set(pattern.iris)
            next_solutions = []
            for solution in solutions:
                bound = solution.get(pattern.variable)
                if bound is None:
                    for iri in pattern.iris:
                        ext = dict(solution)
                        ext[pattern.variable] = iri
                        next_solutions.append(ext)
                elif bound in allowed:
                    next_solutions.append(solution)
            solutions = next_solutions

    if query.count_var is not None:
        return [{query.count_var: Literal(str(len(solutions)), Iri(XSD_INTEGER))}]

    projected = [
        {var: sol[var] for var in query.projection if var in sol} for sol in solutions
    ]
    projected.sort(key=lambda sol: _canonical_sort_key(sol, query.projection))
    start = query.offset
    end = None if query.limit is None else start + query.limit
    return projected[start:end]


def term_to_json(term: Term) -> dict[str, str]:
    if isinstance(term, Iri):
        return {"type": "uri", "value": term.value}
    out: dict[str, str] = {"type": "literal", "value": term.lexical}
    if term.language:
        out["xml:lang"] = term.language
    elif term.datatype.value != XSD_STRING:
        out["datatype"] = term.datatype.value
    return out


def results_json(query: ParsedQuery, solutions: list[dict[str, Term]]) -> dict:
    """SPARQL 1.1 Query Results JSON document."""
    return {
        "head": {"vars": list(query.projection)},
        "results": {
            "bindings": [
                {var: term_to_json(term) for var, term in sol.items()} for sol in solutions
            ]
        },
    }


def execute_text(store: InstanceStore, text: str) -> dict:
    """Parse and evaluate a query, returning the standard JSON document."""
    query = parse_query(text)
    return results_json(query, evaluate(store, query))
