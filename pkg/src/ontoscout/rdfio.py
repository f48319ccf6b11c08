"""Turtle / N-Triples ingestion and N-Triples serialization.

The supported Turtle subset: prefix directives, the ``a`` keyword, predicate
and object lists, IRIs, blank node labels, and plain/typed/language-tagged
literals (including bare numeric and boolean tokens). Collections, anonymous
blank nodes, quoted graphs, and ``@base`` are rejected with
:class:`~ontoscout.errors.UnsupportedFeature`.

Blank nodes are skolemized to ``urn:bnode:<n>`` IRIs, numbered in document
order of first occurrence, so parses are deterministic.
"""

from __future__ import annotations

from typing import BinaryIO, Iterable, Union

from .errors import RdfSyntaxError, UnsupportedFeature
from .terms import (
    RDF_TYPE,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
    Iri,
    Literal,
    Term,
    Triple,
)

SKOLEM_PREFIX = "urn:bnode:"

_WORD_CHARS_EXTRA = "_-"
_ESCAPES = {
    "t": "\t",
    "b": "\b",
    "n": "\n",
    "r": "\r",
    "f": "\f",
    '"': '"',
    "'": "'",
    "\\": "\\",
}


class _Token:
    __slots__ = ("kind", "value", "line", "col", "extra")

    def __init__(self, kind: str, value: str, line: int, col: int, extra: str | None = None):
        self.kind = kind
        self.value = value
        self.line = line
        self.col = col
        self.extra = extra


class _Scanner:
    """Character scanner with 1-based line/column tracking."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, message: str, line: int | None = None, col: int | None = None) -> RdfSyntaxError:
        return RdfSyntaxError(message, line if line is not None else self.line,
                              col if col is not None else self.col)

    def peek(self, ahead: int = 0) -> str:
        i = self.pos + ahead
        return self.text[i] if i < len(self.text) else ""

    def advance(self) -> str:
        ch = self.text[self.pos]
        self.pos += 1
        if ch == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return ch

    def at_end(self) -> bool:
        return self.pos >= len(self.text)

    def skip_ws_and_comments(self) -> None:
        while not self.at_end():
            ch = self.peek()
            if ch in " \t\r\n":
                self.advance()
            elif ch == "#":
                while not self.at_end() and self.peek() != "\n":
                    self.advance()
            else:
                return

    def _read_unicode_escape(self, width: int) -> str:
        digits = ""
        for _ in range(width):
            if self.at_end():
                raise self.error("unterminated unicode escape")
            digits += self.advance()
        try:
            return chr(int(digits, 16))
        except ValueError:
            raise self.error(f"bad unicode escape \\u{digits}") from None

    def next_token(self) -> _Token | None:
        self.skip_ws_and_comments()
        if self.at_end():
            return None
        line, col = self.line, self.col
        ch = self.peek()

        if ch == "<":
            return self._lex_iriref(line, col)
        if ch == '"':
            return self._lex_string(line, col)
        if ch == "'":
            raise UnsupportedFeature(
                f"single-quoted literals are outside the supported subset (line {line})"
            )
        if ch in "[](){}":
            self.advance()
            feature = {
                "[": "anonymous blank nodes",
                "]": "anonymous blank nodes",
                "(": "collections",
                ")": "collections",
                "{": "quoted graphs",
                "}": "quoted graphs",
            }[ch]
            raise UnsupportedFeature(f"{feature} are outside the supported subset (line {line})")
        if ch in ".;,":
            # A dot can also start a decimal like .5
            if ch == "." and self.peek(1).isdigit():
                return self._lex_number(line, col)
            self.advance()
            return _Token("punct", ch, line, col)
        if ch == "^":
            self.advance()
            if self.peek() != "^":
                raise self.error("expected '^^'", line, col)
            self.advance()
            return _Token("dcaret", "^^", line, col)
        if ch == "@":
            self.advance()
            word = self._lex_bare_word()
            if word in ("prefix", "base"):
                return _Token("directive", "@" + word, line, col)
            # language tag: letters then optional -subtags
            if not word:
                raise self.error("empty language tag", line, col)
            tag = word
            while self.peek() == "-":
                self.advance()
                sub = self._lex_bare_word(allow_digits=True)
                if not sub:
                    raise self.error("malformed language tag", line, col)
                tag += "-" + sub
            return _Token("langtag", tag, line, col)
        if ch == "_" and self.peek(1) == ":":
            self.advance()
            self.advance()
            label = self._lex_local_name()
            if not label:
                raise self.error("empty blank node label", line, col)
            return _Token("blank", label, line, col)
        if ch.isdigit() or (ch in "+-" and (self.peek(1).isdigit() or self.peek(1) == ".")):
            return self._lex_number(line, col)

        # bare word: keyword or prefixed name
        word = self._lex_bare_word(allow_dots=False)
        if not word and self.peek() == ":":
            word = ""  # default prefix, e.g. ":alice"
        elif not word:
            raise self.error(f"unexpected character {ch!r}", line, col)
        if self.peek() == ":":
            self.advance()
            local = self._lex_local_name()
            return _Token("pname", word + ":" + local, line, col, extra=word + "\x00" + local)
        return _Token("word", word, line, col)

    def _lex_bare_word(self, allow_digits: bool = True, allow_dots: bool = False) -> str:
        out = []
        while not self.at_end():
            ch = self.peek()
            if ch.isalpha() or ch in _WORD_CHARS_EXTRA or (allow_digits and ch.isdigit()):
                out.append(self.advance())
            elif allow_dots and ch == "." and (self.peek(1).isalnum() or self.peek(1) in "_-"):
                out.append(self.advance())
            else:
                break
        return "".join(out)

    def _lex_local_name(self) -> str:
        # PN_LOCAL subset: alphanumerics, '_', '-', and interior dots.
        return self._lex_bare_word(allow_digits=True, allow_dots=True)

    def _lex_iriref(self, line: int, col: int) -> _Token:
        self.advance()  # <
        out = []
        while True:
            if self.at_end():
                raise self.error("unterminated IRI", line, col)
            ch = self.advance()
            if ch == ">":
                return _Token("iriref", "".join(out), line, col)
            if ch == "\\":
                esc = self.advance() if not self.at_end() else ""
                if esc == "u":
                    out.append(self._read_unicode_escape(4))
                elif esc == "U":
                    out.append(self._read_unicode_escape(8))
                else:
                    raise self.error(f"illegal IRI escape \\{esc}", line, col)
            elif ch in ' \t\n\r<"{}|^`':
                raise self.error(f"illegal character {ch!r} in IRI", line, col)
            else:
                out.append(ch)

    def _lex_string(self, line: int, col: int) -> _Token:
        self.advance()  # opening quote
        if self.peek() == '"' and self.peek(1) == '"':
            raise UnsupportedFeature(
                f"triple-quoted literals are outside the supported subset (line {line})"
            )
        out = []
        while True:
            if self.at_end():
                raise self.error("unterminated string literal", line, col)
            ch = self.advance()
            if ch == '"':
                return _Token("string", "".join(out), line, col)
            if ch == "\n":
                raise self.error("newline in single-quoted literal", line, col)
            if ch == "\\":
                esc = self.advance() if not self.at_end() else ""
                if esc in _ESCAPES:
                    out.append(_ESCAPES[esc])
                elif esc == "u":
                    out.append(self._read_unicode_escape(4))
                elif esc == "U":
                    out.append(self._read_unicode_escape(8))
                else:
                    raise self.error(f"illegal string escape \\{esc}", line, col)
            else:
                out.append(ch)

    def _lex_number(self, line: int, col: int) -> _Token:
        out = []
        if self.peek() in "+-":
            out.append(self.advance())
        has_dot = False
        has_exp = False
        while not self.at_end():
            ch = self.peek()
            if ch.isdigit():
                out.append(self.advance())
            elif ch == "." and not has_dot and not has_exp and self.peek(1).isdigit():
                has_dot = True
                out.append(self.advance())
            elif ch in "eE" and not has_exp and (self.peek(1).isdigit() or self.peek(1) in "+-"):
                has_exp = True
                out.append(self.advance())
                if self.peek() in "+-":
                    out.append(self.advance())
            else:
                break
        lexical = "".join(out)
        if has_exp:
            kind = "double"
        elif has_dot:
            kind = "decimal"
        else:
            kind = "integer"
        return _Token("number", lexical, line, col, extra=kind)


class _Skolemizer:
    """Maps blank node labels to fresh urn:bnode IRIs in first-seen order."""

    def __init__(self) -> None:
        self._seen: dict[str, Iri] = {}

    def resolve(self, label: str) -> Iri:
        iri = self._seen.get(label)
        if iri is None:
            iri = Iri(f"{SKOLEM_PREFIX}{len(self._seen)}")
            self._seen[label] = iri
        return iri


def _to_text(data: Union[bytes, str, BinaryIO]) -> str:
    if isinstance(data, str):
        return data
    if isinstance(data, bytes):
        return data.decode("utf-8")
    raw = data.read()
    if isinstance(raw, bytes):
        return raw.decode("utf-8")
    return raw


def parse_rdf(data: Union[bytes, str, BinaryIO], format: str = "turtle") -> list[Triple]:
    """Parse a document into its triples (a multiset, in document order)."""
    text = _to_text(data)
    if format == "turtle":
        return _TurtleParser(text).parse()
    if format == "ntriples":
        return _NTriplesParser(text).parse()
    raise ValueError(f"unknown RDF format: {format!r}")


def parse_rdf_file(path: str, format: str | None = None) -> list[Triple]:
    """Parse a file, inferring the format from the extension when not given."""
    if format is None:
        format = "ntriples" if str(path).endswith(".nt") else "turtle"
    with open(path, "rb") as fh:
        return parse_rdf(fh, format)


class _TurtleParser:
    def __init__(self, text: str):
        self.scanner = _Scanner(text)
        self.prefixes: dict[str, str] = {}
        self.skolem = _Skolemizer()
        self.triples: list[Triple] = []
        self._pushed: _Token | None = None

    def parse(self) -> list[Triple]:
        while True:
            tok = self._next()
            if tok is None:
                return self.triples
            if tok.kind == "directive" or (tok.kind == "word" and tok.value.lower() in ("prefix", "base")):
                self._parse_directive(tok)
            else:
                self._push(tok)
                self._parse_triples()
                self._expect_punct(".")

    def _next(self) -> _Token | None:
        if self._pushed is not None:
            tok, self._pushed = self._pushed, None
            return tok
        return self.scanner.next_token()

    def _push(self, tok: _Token) -> None:
        self._pushed = tok

    def _require(self, what: str) -> _Token:
        tok = self._next()
        if tok is None:
            raise self.scanner.error(f"unexpected end of input, expected {what}")
        return tok

    def _expect_punct(self, value: str) -> None:
        tok = self._require(f"'{value}'")
        if tok.kind != "punct" or tok.value != value:
            raise self.scanner.error(f"expected '{value}', got {tok.value!r}", tok.line, tok.col)

    def _parse_directive(self, tok: _Token) -> None:
        keyword = tok.value.lower().lstrip("@")
        sparql_style = tok.kind == "word"
        if keyword == "base":
            raise UnsupportedFeature(f"@base is outside the supported subset (line {tok.line})")
        ns = self._require("prefix name")
        if ns.kind != "pname" or ns.extra is None or ns.extra.split("\x00", 1)[1] != "":
            raise self.scanner.error("expected prefix declaration like 'ex:'", ns.line, ns.col)
        prefix = ns.extra.split("\x00", 1)[0]
        iri = self._require("IRI")
        if iri.kind != "iriref":
            raise self.scanner.error("expected IRI in prefix declaration", iri.line, iri.col)
        self.prefixes[prefix] = iri.value
        if not sparql_style:
            self._expect_punct(".")

    def _resolve_pname(self, tok: _Token) -> Iri:
        assert tok.extra is not None
        prefix, local = tok.extra.split("\x00", 1)
        base = self.prefixes.get(prefix)
        if base is None:
            raise self.scanner.error(f"undeclared prefix {prefix!r}", tok.line, tok.col)
        return self._iri(base + local, tok)

    def _iri(self, value: str, tok: _Token) -> Iri:
        try:
            return Iri(value)
        except Exception as exc:
            raise self.scanner.error(str(exc), tok.line, tok.col) from None

    def _parse_triples(self) -> None:
        subject = self._parse_subject()
        while True:
            predicate = self._parse_verb()
            self._parse_object_list(subject, predicate)
            tok = self._require("';' or '.'")
            if tok.kind == "punct" and tok.value == ";":
                nxt = self._require("predicate or '.'")
                if nxt.kind == "punct" and nxt.value == ".":
                    self._push(nxt)
                    return
                self._push(nxt)
                continue
            self._push(tok)
            return

    def _parse_subject(self) -> Iri:
        tok = self._require("subject")
        if tok.kind == "iriref":
            return self._iri(tok.value, tok)
        if tok.kind == "pname":
            return self._resolve_pname(tok)
        if tok.kind == "blank":
            return self.skolem.resolve(tok.value)
        raise self.scanner.error(f"expected subject, got {tok.value!r}", tok.line, tok.col)

    def _parse_verb(self) -> Iri:
        tok = self._require("predicate")
        if tok.kind == "word" and tok.value == "a":
            return Iri(RDF_TYPE)
        if tok.kind == "iriref":
            return self._iri(tok.value, tok)
        if tok.kind == "pname":
            return self._resolve_pname(tok)
        raise self.scanner.error(f"expected predicate, got {tok.value!r}", tok.line, tok.col)

    def _parse_object_list(self, subject: Iri, predicate: Iri) -> None:
        while True:
            obj = self._parse_object()
            self.triples.append(Triple(subject, predicate, obj))
            tok = self._require("',', ';' or '.'")
            if tok.kind == "punct" and tok.value == ",":
                continue
            self._push(tok)
            return

    def _parse_object(self) -> Term:
        tok = self._require("object")
        if tok.kind == "iriref":
            return self._iri(tok.value, tok)
        if tok.kind == "pname":
            return self._resolve_pname(tok)
        if tok.kind == "blank":
            return self.skolem.resolve(tok.value)
        if tok.kind == "string":
            return self._finish_literal(tok)
        if tok.kind == "number":
            datatype = {
                "integer": XSD_INTEGER,
                "decimal": XSD_DECIMAL,
                "double": XSD_DOUBLE,
            }[tok.extra or "integer"]
            return Literal(tok.value, Iri(datatype))
        if tok.kind == "word" and tok.value in ("true", "false"):
            return Literal(tok.value, Iri(XSD_BOOLEAN))
        raise self.scanner.error(f"expected object, got {tok.value!r}", tok.line, tok.col)

    def _finish_literal(self, tok: _Token) -> Literal:
        nxt = self._next()
        if nxt is not None and nxt.kind == "langtag":
            return Literal(tok.value, language=nxt.value)
        if nxt is not None and nxt.kind == "dcaret":
            dt_tok = self._require("datatype IRI")
            if dt_tok.kind == "iriref":
                datatype = self._iri(dt_tok.value, dt_tok)
            elif dt_tok.kind == "pname":
                datatype = self._resolve_pname(dt_tok)
            else:
                raise self.scanner.error("expected datatype IRI", dt_tok.line, dt_tok.col)
            try:
                return Literal(tok.value, datatype)
            except Exception as exc:
                raise self.scanner.error(str(exc), tok.line, tok.col) from None
        if nxt is not None:
            self._push(nxt)
        return Literal(tok.value)


class _NTriplesParser:
    """Line-oriented N-Triples; shares the scanner but allows no Turtle sugar."""

    def __init__(self, text: str):
        self.scanner = _Scanner(text)
        self.skolem = _Skolemizer()
        self._pushed: _Token | None = None

    def parse(self) -> list[Triple]:
        triples: list[Triple] = []
        while True:
            tok = self._next()
            if tok is None:
                return triples
            subject = self._term(tok, position="subject")
            pred_tok = self._require("predicate")
            if pred_tok.kind != "iriref":
                raise self.scanner.error("predicate must be an IRI", pred_tok.line, pred_tok.col)
            predicate = Iri(pred_tok.value)
            obj = self._object(self._require("object"))
            end = self._require("'.'")
            if end.kind != "punct" or end.value != ".":
                raise self.scanner.error("expected '.'", end.line, end.col)
            triples.append(Triple(subject, predicate, obj))

    def _next(self) -> _Token | None:
        if self._pushed is not None:
            tok, self._pushed = self._pushed, None
            return tok
        return self.scanner.next_token()

    def _require(self, what: str) -> _Token:
        tok = self._next()
        if tok is None:
            raise self.scanner.error(f"unexpected end of input, expected {what}")
        return tok

    def _term(self, tok: _Token, position: str) -> Iri:
        if tok.kind == "iriref":
            return Iri(tok.value)
        if tok.kind == "blank":
            return self.skolem.resolve(tok.value)
        raise self.scanner.error(
            f"{position} must be an IRI or blank node, got {tok.value!r}", tok.line, tok.col
        )

    def _object(self, tok: _Token) -> Term:
        if tok.kind == "iriref":
            return Iri(tok.value)
        if tok.kind == "blank":
            return self.skolem.resolve(tok.value)
        if tok.kind == "string":
            nxt = self._next()
            if nxt is not None and nxt.kind == "langtag":
                return Literal(tok.value, language=nxt.value)
            if nxt is not None and nxt.kind == "dcaret":
                dt = self._require("datatype IRI")
                if dt.kind != "iriref":
                    raise self.scanner.error("expected datatype IRI", dt.line, dt.col)
                return Literal(tok.value, Iri(dt.value))
            if nxt is not None:
                self._pushed = nxt
            return Literal(tok.value)
        raise self.scanner.error(f"bad object term {tok.value!r}", tok.line, tok.col)


def escape_ntriples_string(value: str) -> str:
    out = []
    for ch in value:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\r":
            out.append("\\r")
        elif ch == "\t":
            out.append("\\t")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


def serialize_term(term: Term) -> str:
    if isinstance(term, Iri):
        return f"<{term.value}>"
    lex = escape_ntriples_string(term.lexical)
    if term.language:
        return f'"{lex}"@{term.language}'
    if term.datatype.value == XSD_STRING:
        return f'"{lex}"'
    return f'"{lex}"^^<{term.datatype.value}>'


def serialize_ntriples(triples: Iterable[Triple]) -> str:
    """Serialize triples one per line; parse_rdf of the output is the identity."""
    return "".join(
        f"{serialize_term(t.subject)} {serialize_term(t.predicate)} {serialize_term(t.object)} .\n"
        for t in triples
    )
