"""Triple model, Turtle-subset parser/serializer and blank-node isomorphism.

Supported Turtle: ``@prefix``/``PREFIX``, ``a``, ``,`` object lists, ``;``
predicate lists, ``[ ... ]`` anonymous blank nodes, ``_:label`` blank nodes,
quoted literals (short and long form) with ``@lang`` or ``^^datatype``, and
absolute IRIs in angle brackets. Collections, ``@base`` and numeric/boolean
shorthand are rejected with a :class:`TurtleSyntaxError`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, NamedTuple, Optional, Union

__all__ = [
    "IRI",
    "BNode",
    "Literal",
    "Term",
    "Triple",
    "Graph",
    "RDFError",
    "TurtleSyntaxError",
    "UndefinedPrefixError",
    "ResourceLimitError",
    "parse_turtle",
    "serialize_turtle",
    "graph_isomorphic",
    "RDF",
    "RDFS",
    "OWL",
    "SKOS",
    "XSD",
    "DCT",
]


class RDFError(ValueError):
    """Base class for errors raised by the RDF layer."""


class TurtleSyntaxError(RDFError):
    def __init__(self, message: str, line: int, column: int, token: str = ""):
        self.line = line
        self.column = column
        self.token = token
        where = f"line {line}, column {column}"
        if token:
            where += f", near {token!r}"
        super().__init__(f"{message} ({where})")


class UndefinedPrefixError(TurtleSyntaxError):
    def __init__(self, prefix: str, line: int, column: int):
        self.prefix = prefix
        super().__init__(f"undefined prefix {prefix!r}", line, column, prefix + ":")


class ResourceLimitError(RDFError):
    """Raised when an exact search would exceed its configured bound."""


_SCHEME = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")


@dataclass(frozen=True, order=True)
class IRI:
    value: str

    def __post_init__(self) -> None:
        if not self.value or not _SCHEME.match(self.value):
            raise RDFError(f"not an absolute IRI: {self.value!r}")

    def __str__(self) -> str:
        return self.value

    def __repr__(self) -> str:
        return f"IRI({self.value!r})"


@dataclass(frozen=True, order=True)
class BNode:
    label: str

    def __str__(self) -> str:
        return f"_:{self.label}"


@dataclass(frozen=True)
class Literal:
    lexical: str
    datatype: Optional[IRI] = None
    lang: Optional[str] = None

    def __post_init__(self) -> None:
        if self.datatype is not None and self.lang is not None:
            raise RDFError("a literal cannot carry both a datatype and a language tag")

    def __str__(self) -> str:
        return self.lexical


Term = Union[IRI, BNode, Literal]

_KIND_ORDER = {IRI: 0, BNode: 1, Literal: 2}


def term_key(t: Term) -> tuple:
    """Sort key: IRIs, then blank nodes, then literals; lexically within a kind."""
    if isinstance(t, IRI):
        return (0, t.value, "", "")
    if isinstance(t, BNode):
        return (1, t.label, "", "")
    return (2, t.lexical, t.datatype.value if t.datatype else "", t.lang or "")


class Triple(NamedTuple):
    subject: Union[IRI, BNode]
    predicate: IRI
    object: Term


class _NS:
    def __init__(self, base: str):
        self.base = base

    def __getattr__(self, name: str) -> IRI:
        if name.startswith("__"):
            raise AttributeError(name)
        return IRI(self.base + name)

    def __getitem__(self, name: str) -> IRI:
        return IRI(self.base + name)


RDF = _NS("http://www.w3.org/1999/02/22-rdf-syntax-ns#")
RDFS = _NS("http://www.w3.org/2000/01/rdf-schema#")
OWL = _NS("http://www.w3.org/2002/07/owl#")
SKOS = _NS("http://www.w3.org/2004/02/skos/core#")
XSD = _NS("http://www.w3.org/2001/XMLSchema#")
DCT = _NS("http://purl.org/dc/terms/")


class Graph:
    """Immutable set of triples plus a prefix map.

    Lookups by subject/predicate/object are indexed at construction.
    """

    __slots__ = ("_triples", "_prefixes", "_spo", "_pos")

    def __init__(self, triples: Iterable[Triple] = (), prefixes: Optional[Mapping[str, str]] = None):
        ts = frozenset(Triple(*t) for t in triples)
        for t in ts:
            if not isinstance(t.predicate, IRI):
                raise RDFError(f"predicate must be an IRI: {t.predicate!r}")
            if isinstance(t.subject, Literal):
                raise RDFError(f"subject cannot be a literal: {t.subject!r}")
        self._triples = ts
        self._prefixes = dict(prefixes or {})
        spo: dict = {}
        pos: dict = {}
        for s, p, o in ts:
            spo.setdefault(s, {}).setdefault(p, set()).add(o)
            pos.setdefault(p, {}).setdefault(o, set()).add(s)
        self._spo = spo
        self._pos = pos

    @property
    def triples(self) -> frozenset:
        return self._triples

    @property
    def prefixes(self) -> dict:
        return dict(self._prefixes)

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def __contains__(self, t) -> bool:
        return Triple(*t) in self._triples

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._triples == other._triples

    def __hash__(self) -> int:
        return hash(self._triples)

    def __repr__(self) -> str:
        return f"<Graph {len(self)} triples, {len(self._prefixes)} prefixes>"

    def subjects(self, predicate: IRI, obj: Optional[Term] = None) -> set:
        by_o = self._pos.get(predicate, {})
        if obj is not None:
            return set(by_o.get(obj, ()))
        out: set = set()
        for subs in by_o.values():
            out |= subs
        return out

    def objects(self, subject, predicate: IRI) -> set:
        return set(self._spo.get(subject, {}).get(predicate, ()))

    def value(self, subject, predicate: IRI) -> Optional[Term]:
        objs = self._spo.get(subject, {}).get(predicate)
        if not objs:
            return None
        return min(objs, key=term_key)

    def predicate_objects(self, subject) -> Iterator[tuple]:
        for p, objs in self._spo.get(subject, {}).items():
            for o in objs:
                yield p, o

    def all_subjects(self) -> set:
        return set(self._spo)

    def has_predicate(self, predicate: IRI) -> bool:
        return predicate in self._pos

    def union(self, other: "Graph") -> "Graph":
        prefixes = dict(other._prefixes)
        prefixes.update(self._prefixes)
        return Graph(self._triples | other._triples, prefixes)

    def with_prefixes(self, prefixes: Mapping[str, str]) -> "Graph":
        return Graph(self._triples, prefixes)

    def expand(self, qname: str) -> IRI:
        """Expand ``prefix:local`` (or ``<iri>`` / an absolute IRI) against the prefix map."""
        if qname.startswith("<") and qname.endswith(">"):
            return IRI(qname[1:-1])
        prefix, sep, local = qname.partition(":")
        if sep and prefix in self._prefixes:
            return IRI(self._prefixes[prefix] + local)
        if sep and "://" in qname:
            return IRI(qname)
        raise UndefinedPrefixError(prefix, 0, 0)

    def compact(self, iri: IRI) -> str:
        """``prefix:local`` when a declared namespace covers ``iri``, else ``<iri>``."""
        return _Namer(self._prefixes).iri(iri)


# ---------------------------------------------------------------------------
# Tokenizer

class _Tok(NamedTuple):
    kind: str  # IRI PNAME BNODE STRING LANG DTYPE PUNCT A PREFIX EOF
    value: object
    line: int
    col: int
    text: str


_PN_PREFIX_CHARS = re.compile(r"[A-Za-z0-9_\-.·À-￿]*")
_PN_LOCAL_CHARS = re.compile(r"(?:[A-Za-z0-9_\-.:·À-￿]|%[0-9A-Fa-f]{2}|\\[_~.\-!$&'()*+,;=/?#@%])*")
_LANG = re.compile(r"[A-Za-z]+(?:-[A-Za-z0-9]+)*")
_ESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.line_start = 0

    def _err(self, msg: str, token: str = "", pos: Optional[int] = None) -> TurtleSyntaxError:
        line, col = self._where(self.pos if pos is None else pos)
        return TurtleSyntaxError(msg, line, col, token)

    def _where(self, pos: int) -> tuple:
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def tokens(self) -> Iterator[_Tok]:
        text = self.text
        n = len(text)
        while True:
            # whitespace and comments
            while self.pos < n:
                ch = text[self.pos]
                if ch in " \t\r\n﻿":
                    self.pos += 1
                elif ch == "#":
                    nl = text.find("\n", self.pos)
                    self.pos = n if nl < 0 else nl
                else:
                    break
            if self.pos >= n:
                line, col = self._where(self.pos)
                yield _Tok("EOF", None, line, col, "")
                return
            start = self.pos
            line, col = self._where(start)
            ch = text[start]
            if ch == "<":
                end = text.find(">", start + 1)
                if end < 0:
                    raise self._err("unterminated IRI", text[start:start + 20])
                value = text[start + 1:end]
                if any(c in value for c in ' <"{}|^`\n'):
                    raise self._err("illegal character in IRI", text[start:end + 1])
                value = _unescape_uchars(value)
                if not _SCHEME.match(value):
                    raise self._err("relative IRIs are not supported", text[start:end + 1])
                self.pos = end + 1
                yield _Tok("IRI", IRI(value), line, col, text[start:self.pos])
            elif ch in "\"'":
                value = self._string()
                yield _Tok("STRING", value, line, col, text[start:self.pos])
            elif ch == "@":
                m = _LANG.match(text, start + 1)
                if not m:
                    raise self._err("bad directive or language tag", text[start:start + 10])
                word = m.group(0)
                self.pos = m.end()
                if word == "prefix":
                    yield _Tok("PREFIX", "@prefix", line, col, "@prefix")
                elif word == "base":
                    raise TurtleSyntaxError("@base is not supported", line, col, "@base")
                else:
                    yield _Tok("LANG", word, line, col, "@" + word)
            elif ch == "^":
                if text.startswith("^^", start):
                    self.pos = start + 2
                    yield _Tok("DTYPE", "^^", line, col, "^^")
                else:
                    raise self._err("unexpected character", ch)
            elif ch in ".;,[]":
                self.pos = start + 1
                yield _Tok("PUNCT", ch, line, col, ch)
            elif ch in "()":
                raise self._err("collections are not supported", ch)
            elif ch == "_" and text.startswith("_:", start):
                m = _PN_LOCAL_CHARS.match(text, start + 2)
                label = m.group(0).rstrip(".") if m else ""
                if not label:
                    raise self._err("empty blank node label", "_:")
                self.pos = start + 2 + len(label)
                yield _Tok("BNODE", label, line, col, text[start:self.pos])
            elif ch.isdigit() or ch in "+-":
                m = re.match(r"[+\-0-9.eE]+", text[start:])
                raise self._err("numeric literals are not supported", m.group(0) if m else ch)
            elif ch.isalpha() or ch == ":" or ch == "_":
                m = _PN_PREFIX_CHARS.match(text, start)
                prefix = m.group(0) if ch != ":" else ""
                after = start + len(prefix)
                if after < n and text[after] == ":":
                    prefix = prefix
                    lm = _PN_LOCAL_CHARS.match(text, after + 1)
                    local = lm.group(0)
                    while local.endswith(".") and not local.endswith("\\."):
                        local = local[:-1]
                    self.pos = after + 1 + len(local)
                    yield _Tok("PNAME", (prefix, _unescape_local(local)), line, col, text[start:self.pos])
                else:
                    word = prefix.rstrip(".")
                    self.pos = start + len(word)
                    if word == "a":
                        yield _Tok("A", "a", line, col, "a")
                    elif word.upper() == "PREFIX":
                        yield _Tok("PREFIX", "PREFIX", line, col, word)
                    elif word in ("true", "false"):
                        raise TurtleSyntaxError("boolean literals are not supported", line, col, word)
                    elif word.upper() == "BASE":
                        raise TurtleSyntaxError("BASE is not supported", line, col, word)
                    else:
                        raise TurtleSyntaxError("unexpected token", line, col, word or ch)
            else:
                raise self._err("unexpected character", ch)

    def _string(self) -> str:
        text = self.text
        q = text[self.pos]
        start = self.pos
        if text.startswith(q * 3, self.pos):
            delim = q * 3
            self.pos += 3
            long = True
        else:
            delim = q
            self.pos += 1
            long = False
        out = []
        n = len(text)
        while True:
            if self.pos >= n:
                raise self._err("unterminated string", text[start:start + 20], start)
            if text.startswith(delim, self.pos):
                self.pos += len(delim)
                return "".join(out)
            c = text[self.pos]
            if c == "\\":
                nxt = text[self.pos + 1:self.pos + 2]
                if nxt in _ESCAPES:
                    out.append(_ESCAPES[nxt])
                    self.pos += 2
                elif nxt == "u":
                    out.append(chr(int(text[self.pos + 2:self.pos + 6], 16)))
                    self.pos += 6
                elif nxt == "U":
                    out.append(chr(int(text[self.pos + 2:self.pos + 10], 16)))
                    self.pos += 10
                else:
                    raise self._err("bad escape sequence", text[self.pos:self.pos + 2])
                continue
            if not long and c in "\r\n":
                raise self._err("newline in short string", text[start:self.pos])
            out.append(c)
            self.pos += 1


def _unescape_uchars(s: str) -> str:
    if "\\" not in s:
        return s
    return re.sub(
        r"\\u([0-9A-Fa-f]{4})|\\U([0-9A-Fa-f]{8})",
        lambda m: chr(int(m.group(1) or m.group(2), 16)),
        s,
    )


def _unescape_local(s: str) -> str:
    return re.sub(r"\\(.)", r"\1", s) if "\\" in s else s


# ---------------------------------------------------------------------------
# Parser

class _Parser:
    def __init__(self, text: str):
        self.toks = list(_Lexer(text).tokens())
        self.i = 0
        self.prefixes: dict = {}
        self.triples: list = []
        self.bnode_labels: dict = {}
        self.counter = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def _err(self, msg: str, tok: Optional[_Tok] = None) -> TurtleSyntaxError:
        t = tok or self.tok
        return TurtleSyntaxError(msg, t.line, t.col, t.text or "<end of input>")

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str, value=None) -> _Tok:
        t = self.tok
        if t.kind != kind or (value is not None and t.value != value):
            want = value if value is not None else kind
            raise self._err(f"expected {want!r}")
        return self.advance()

    def fresh(self) -> BNode:
        b = BNode(f"b{self.counter}")
        self.counter += 1
        return b

    def parse(self) -> Graph:
        while self.tok.kind != "EOF":
            if self.tok.kind == "PREFIX":
                self.directive()
            else:
                self.statement()
        return Graph(self.triples, self.prefixes)

    def directive(self) -> None:
        kw = self.advance()
        t = self.expect("PNAME")
        prefix, local = t.value
        if local:
            raise self._err("prefix declaration must end with ':'", t)
        iri = self.expect("IRI").value
        self.prefixes[prefix] = iri.value
        if kw.value == "@prefix":
            self.expect("PUNCT", ".")

    def statement(self) -> None:
        if self.tok.kind == "PUNCT" and self.tok.value == "[":
            subj = self.blank_property_list()
            if not (self.tok.kind == "PUNCT" and self.tok.value == "."):
                self.predicate_object_list(subj)
        else:
            subj = self.subject()
            self.predicate_object_list(subj)
        self.expect("PUNCT", ".")

    def subject(self):
        t = self.tok
        if t.kind in ("IRI", "PNAME"):
            return self.iri()
        if t.kind == "BNODE":
            return self.labelled_bnode()
        raise self._err("expected subject")

    def iri(self) -> IRI:
        t = self.advance()
        if t.kind == "IRI":
            return t.value
        if t.kind == "PNAME":
            prefix, local = t.value
            if prefix not in self.prefixes:
                raise UndefinedPrefixError(prefix, t.line, t.col)
            try:
                return IRI(self.prefixes[prefix] + local)
            except RDFError as exc:
                raise self._err(str(exc), t) from None
        raise self._err("expected IRI", t)

    def labelled_bnode(self) -> BNode:
        label = self.advance().value
        if label not in self.bnode_labels:
            self.bnode_labels[label] = self.fresh()
        return self.bnode_labels[label]

    def verb(self) -> IRI:
        if self.tok.kind == "A":
            self.advance()
            return RDF.type
        if self.tok.kind in ("IRI", "PNAME"):
            return self.iri()
        raise self._err("expected predicate")

    def predicate_object_list(self, subj) -> None:
        while True:
            pred = self.verb()
            self.object_list(subj, pred)
            if not (self.tok.kind == "PUNCT" and self.tok.value == ";"):
                return
            while self.tok.kind == "PUNCT" and self.tok.value == ";":
                self.advance()
            if self.tok.kind == "PUNCT" and self.tok.value in ".]":
                return

    def object_list(self, subj, pred) -> None:
        while True:
            obj = self.object()
            self.triples.append(Triple(subj, pred, obj))
            if self.tok.kind == "PUNCT" and self.tok.value == ",":
                self.advance()
                continue
            return

    def object(self) -> Term:
        t = self.tok
        if t.kind in ("IRI", "PNAME"):
            return self.iri()
        if t.kind == "BNODE":
            return self.labelled_bnode()
        if t.kind == "PUNCT" and t.value == "[":
            return self.blank_property_list()
        if t.kind == "STRING":
            return self.literal()
        raise self._err("expected object")

    def blank_property_list(self) -> BNode:
        self.expect("PUNCT", "[")
        b = self.fresh()
        if not (self.tok.kind == "PUNCT" and self.tok.value == "]"):
            self.predicate_object_list(b)
        self.expect("PUNCT", "]")
        return b

    def literal(self) -> Literal:
        lex = self.advance().value
        if self.tok.kind == "LANG":
            return Literal(lex, lang=self.advance().value)
        if self.tok.kind == "DTYPE":
            self.advance()
            if self.tok.kind not in ("IRI", "PNAME"):
                raise self._err("expected datatype IRI")
            return Literal(lex, datatype=self.iri())
        return Literal(lex)


def parse_turtle(text: str) -> Graph:
    """Parse a Turtle-subset document into a :class:`Graph`.

    Blank nodes (labelled or bracketed) are relabelled ``b0, b1, ...`` in
    order of first appearance.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Serializer

_OUT_LOCAL = re.compile(r"^(?:[A-Za-z0-9_](?:[A-Za-z0-9_\-.]*[A-Za-z0-9_\-])?)?$")
_OUT_PREFIX = re.compile(r"^(?:[A-Za-z](?:[A-Za-z0-9_\-.]*[A-Za-z0-9_\-])?)?$")


def _escape(s: str) -> str:
    return (
        s.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )


class _Namer:
    def __init__(self, prefixes: Mapping[str, str]):
        usable = [(p, ns) for p, ns in prefixes.items() if _OUT_PREFIX.match(p)]
        # longest namespace first; shortest label, then alphabetical, on ties
        self.order = sorted(usable, key=lambda pn: (-len(pn[1]), len(pn[0]), pn[0]))

    def iri(self, iri: IRI) -> str:
        v = iri.value
        for prefix, ns in self.order:
            if v.startswith(ns):
                local = v[len(ns):]
                if _OUT_LOCAL.match(local):
                    return f"{prefix}:{local}"
        return f"<{v}>"

    def term(self, t: Term) -> str:
        if isinstance(t, IRI):
            return self.iri(t)
        if isinstance(t, BNode):
            return f"_:{t.label}"
        out = f'"{_escape(t.lexical)}"'
        if t.lang:
            out += "@" + t.lang
        elif t.datatype is not None:
            out += "^^" + self.iri(t.datatype)
        return out


def serialize_turtle(g: Graph) -> str:
    """Deterministic Turtle rendering of ``g`` (LF line endings)."""
    prefixes = g.prefixes
    namer = _Namer(prefixes)
    lines = [f"@prefix {p}: <{ns}> ." for p, ns in sorted(prefixes.items())]
    by_subject: dict = {}
    for s, p, o in g:
        by_subject.setdefault(s, {}).setdefault(p, []).append(o)
    blocks = []
    for s in sorted(by_subject, key=term_key):
        preds = by_subject[s]
        parts = []
        for p in sorted(preds, key=term_key):
            verb = "a" if p == RDF.type else namer.iri(p)
            objs = ", ".join(namer.term(o) for o in sorted(preds[p], key=term_key))
            parts.append(f"    {verb} {objs}")
        blocks.append(namer.term(s) + "\n" + " ;\n".join(parts) + " .")
    out = "\n".join(lines)
    if blocks:
        out += ("\n\n" if lines else "") + "\n\n".join(blocks)
    return out + "\n" if out else ""


# ---------------------------------------------------------------------------
# Isomorphism

def _bnodes(g: Graph) -> set:
    out = set()
    for s, _, o in g:
        if isinstance(s, BNode):
            out.add(s)
        if isinstance(o, BNode):
            out.add(o)
    return out


def _refine(graphs: list) -> list:
    """Colour refinement over blank nodes, shared palette across ``graphs``."""
    adj = []
    colours = []
    for g in graphs:
        edges: dict = {}
        for s, p, o in g:
            if isinstance(s, BNode):
                edges.setdefault(s, []).append(("out", p, o))
            if isinstance(o, BNode):
                edges.setdefault(o, []).append(("in", p, s))
        adj.append(edges)
        colours.append({b: 0 for b in _bnodes(g)})
    n_classes = 1
    while True:
        sigs = []
        for edges, col in zip(adj, colours):
            sig = {}
            for b in col:
                items = []
                for d, p, other in edges.get(b, ()):
                    ref = ("b", col[other]) if isinstance(other, BNode) else ("t", term_key(other))
                    items.append((d, p.value, ref))
                sig[b] = (col[b], tuple(sorted(items)))
            sigs.append(sig)
        palette = {s: i for i, s in enumerate(sorted({v for sig in sigs for v in sig.values()}))}
        colours = [{b: palette[v] for b, v in sig.items()} for sig in sigs]
        if len(palette) == n_classes:
            return colours
        n_classes = len(palette)


def graph_isomorphic(a: Graph, b: Graph, max_bnodes: int = 64) -> bool:
    """True iff a blank-node bijection maps ``a``'s triples onto ``b``'s."""
    if len(a) != len(b):
        return False
    ba, bb = _bnodes(a), _bnodes(b)
    if len(ba) != len(bb):
        return False
    if max(len(ba), len(bb)) > max_bnodes:
        raise ResourceLimitError(f"{len(ba)} blank nodes exceeds the bound of {max_bnodes}")
    ground_a = {t for t in a if not isinstance(t.subject, BNode) and not isinstance(t.object, BNode)}
    ground_b = {t for t in b if not isinstance(t.subject, BNode) and not isinstance(t.object, BNode)}
    if ground_a != ground_b:
        return False
    if not ba:
        return True
    ca, cb = _refine([a, b])
    if sorted(ca.values()) != sorted(cb.values()):
        return False
    rest_a = [t for t in a if t not in ground_a]
    target = frozenset(t for t in b if t not in ground_b)
    by_colour: dict = {}
    for node, c in cb.items():
        by_colour.setdefault(c, []).append(node)
    order = sorted(ba, key=lambda n: (len(by_colour[ca[n]]), ca[n], n.label))
    touching: dict = {n: [] for n in ba}
    for t in rest_a:
        for n in (t.subject, t.object):
            if isinstance(n, BNode):
                touching[n].append(t)

    mapping: dict = {}
    used: set = set()

    def image(t: Triple):
        s = mapping.get(t.subject, t.subject) if isinstance(t.subject, BNode) else t.subject
        o = mapping.get(t.object, t.object) if isinstance(t.object, BNode) else t.object
        if (isinstance(t.subject, BNode) and t.subject not in mapping) or (
            isinstance(t.object, BNode) and t.object not in mapping
        ):
            return None
        return Triple(s, t.predicate, o)

    def consistent(n: BNode) -> bool:
        for t in touching[n]:
            img = image(t)
            if img is not None and img not in target:
                return False
        return True

    def search(k: int) -> bool:
        if k == len(order):
            return frozenset(image(t) for t in rest_a) == target
        n = order[k]
        for cand in by_colour[ca[n]]:
            if cand in used:
                continue
            mapping[n] = cand
            used.add(cand)
            if consistent(n) and search(k + 1):
                return True
            del mapping[n]
            used.discard(cand)
        return False

    return search(0)
