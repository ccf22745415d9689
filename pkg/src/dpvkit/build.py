"""Build vocabularies from CSV sheets, diff releases and emit a search index."""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from .query import ancestors
from .rdf import DCT, IRI, OWL, RDF, RDFS, SKOS, XSD, Graph, Literal, RDFError, Triple
from .registry import ExtensionDescriptor, Registry, default_registry, versioned_iri
from .semantics import render, to_owl2
from .vocab import VS, ConceptGraph, SemanticsMode, load_vocabulary

__all__ = [
    "SourceRow",
    "VocabSnapshot",
    "BuildResult",
    "DiffReport",
    "BuildError",
    "SheetFormatError",
    "DuplicateTermError",
    "UnresolvedParentError",
    "NameMismatchError",
    "read_sheet",
    "build",
    "diff",
    "emit_index",
    "changelog",
    "write_outputs",
]

HEADER = ("term", "type", "parent", "top_concept", "definition", "status", "range")


class BuildError(RDFError):
    pass


class SheetFormatError(BuildError):
    pass


class DuplicateTermError(BuildError):
    pass


class UnresolvedParentError(BuildError):
    def __init__(self, row: int, term: str, name: str, column: str = "parent"):
        super().__init__(f"row {row} ({term}): cannot resolve {column} {name!r}")
        self.row = row
        self.term = term
        self.name = name


class NameMismatchError(BuildError):
    pass


@dataclass(frozen=True)
class SourceRow:
    term: str
    type: str
    parent: Optional[str] = None
    top_concept: Optional[str] = None
    definition: str = ""
    status: str = "accepted"
    range: Optional[str] = None
    label: Optional[str] = None
    line: int = 0


def _split_camel(term: str) -> str:
    return re.sub(r"(?<=[a-z0-9])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])", " ", term)


def read_sheet(source: Union[str, Path, io.TextIOBase]) -> list:
    """Parse a CSV sheet; ``source`` is a path or an open text stream."""
    if isinstance(source, (str, Path)):
        with open(source, newline="", encoding="utf-8") as fh:
            return read_sheet(fh)
    reader = csv.DictReader(source)
    if reader.fieldnames is None:
        return []
    missing = [h for h in HEADER if h not in reader.fieldnames]
    if missing:
        raise SheetFormatError(f"sheet header lacks columns {missing}")
    rows = []
    for n, rec in enumerate(reader, start=2):
        get = lambda k: (rec.get(k) or "").strip() or None  # noqa: E731
        kind = get("type")
        if kind not in ("class", "property"):
            raise SheetFormatError(f"row {n}: type must be 'class' or 'property', got {kind!r}")
        status = get("status") or "accepted"
        if status not in ("accepted", "deprecated"):
            raise SheetFormatError(f"row {n}: status must be 'accepted' or 'deprecated', got {status!r}")
        term = get("term")
        if not term:
            raise SheetFormatError(f"row {n}: empty term")
        rows.append(
            SourceRow(
                term=term,
                type=kind,
                parent=get("parent"),
                top_concept=get("top_concept"),
                definition=get("definition") or "",
                status=status,
                range=get("range"),
                label=get("label"),
                line=n,
            )
        )
    return rows


@dataclass(frozen=True)
class VocabSnapshot:
    name: str
    version: str
    concept_graph: ConceptGraph

    def iris(self) -> frozenset:
        return frozenset(self.concept_graph.concepts) | frozenset(self.concept_graph.properties)


@dataclass(frozen=True)
class BuildResult:
    snapshot: VocabSnapshot
    skos: Graph
    owl: Graph


class _Resolver:
    def __init__(self, rows: list, namespace: str, registry: Registry):
        self.ns = namespace
        self.prefixes = registry.prefixes()
        self.tops = registry.top_concepts()
        self.kinds = {r.term: r.type for r in rows}

    def iri(self, term: str) -> IRI:
        return IRI(self.ns + term)

    def name(self, row: SourceRow, name: str, column: str, kind: str) -> IRI:
        """Resolve a sheet-local or qualified name; it must be defined in the
        sheet or be a registered top concept."""
        if ":" in name:
            prefix, _, local = name.partition(":")
            base = self.prefixes.get(prefix)
            if base is None:
                raise UnresolvedParentError(row.line, row.term, name, column)
            target = IRI(base + local)
            if base == self.ns and self.kinds.get(local) == kind:
                return target
            if kind == "class" and target in self.tops:
                return target
            raise UnresolvedParentError(row.line, row.term, name, column)
        if self.kinds.get(name) != kind:
            raise UnresolvedParentError(row.line, row.term, name, column)
        return self.iri(name)


def _check_rows(rows: list) -> None:
    seen: dict = {}
    for r in rows:
        if r.term in seen:
            raise DuplicateTermError(f"row {r.line}: term {r.term!r} already defined on row {seen[r.term]}")
        seen[r.term] = r.line


def build(
    rows: list,
    extension: ExtensionDescriptor,
    version: str,
    registry: Optional[Registry] = None,
) -> BuildResult:
    """Serialize sheet rows into an RDFS+SKOS graph and, via conversion, an OWL2 graph."""
    registry = registry or default_registry()
    _check_rows(rows)
    ns = registry.namespace(extension.short_name)
    version_iri = versioned_iri(registry, extension.short_name, version)
    res = _Resolver(rows, ns, registry)

    triples = []
    ontology = IRI(ns.rstrip("#"))
    triples += [
        Triple(ontology, RDF.type, OWL.Ontology),
        Triple(ontology, OWL.versionIRI, version_iri),
        Triple(ontology, OWL.versionInfo, Literal(version)),
    ]
    if extension.title:
        triples.append(Triple(ontology, DCT.title, Literal(extension.title, lang="en")))
    roots = set()
    for r in rows:
        s = res.iri(r.term)
        label = r.label or _split_camel(r.term)
        triples += [
            Triple(s, SKOS.prefLabel, Literal(label, lang="en")),
            Triple(s, VS.term_status, Literal(r.status, lang="en")),
        ]
        if r.definition:
            triples.append(Triple(s, SKOS.definition, Literal(r.definition, lang="en")))
        if r.type == "class":
            triples += [Triple(s, RDF.type, RDFS.Class), Triple(s, RDF.type, SKOS.Concept)]
            if r.range:
                raise SheetFormatError(f"row {r.line}: only properties take a range")
            if r.parent:
                triples.append(Triple(s, SKOS.broader, res.name(r, r.parent, "parent", "class")))
            if r.top_concept:
                top = res.name(r, r.top_concept, "top_concept", "class")
                if top != s:
                    triples.append(Triple(s, RDF.type, top))
            if not r.parent and not r.top_concept:
                roots.add(s)
        else:
            triples.append(Triple(s, RDF.type, RDF.Property))
            if r.parent:
                triples.append(Triple(s, RDFS.subPropertyOf, res.name(r, r.parent, "parent", "property")))
            if r.top_concept:
                raise SheetFormatError(f"row {r.line}: properties take no top_concept")
            if r.range:
                triples.append(Triple(s, RDFS.range, res.name(r, r.range, "range", "class")))

    prefixes = {
        "dct": DCT.base,
        "owl": OWL.base,
        "rdf": RDF.base,
        "rdfs": RDFS.base,
        "skos": SKOS.base,
        "vs": VS.base,
        "xsd": XSD.base,
    }
    used = {t.value for tr in triples for t in tr if isinstance(t, IRI)}
    for prefix, base in registry.prefixes().items():
        if any(u.startswith(base) for u in used):
            prefixes[prefix] = base
    if extension.prefix:
        prefixes[extension.prefix] = ns
    raw = Graph(triples, prefixes)
    tops = registry.top_concepts() | roots
    cg = load_vocabulary(raw, SemanticsMode.RDFS_SKOS, tops)
    skos = render(cg, SemanticsMode.RDFS_SKOS)
    cg = load_vocabulary(skos, SemanticsMode.RDFS_SKOS, tops)
    owl = to_owl2(cg).source
    return BuildResult(VocabSnapshot(extension.short_name, version, cg), skos, owl)


@dataclass(frozen=True)
class DiffReport:
    added: frozenset
    removed: frozenset
    retained: frozenset
    counts: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "added": sorted(i.value for i in self.added),
            "removed": sorted(i.value for i in self.removed),
            "retained": sorted(i.value for i in self.retained),
            "counts": self.counts,
        }


def _counts(s: VocabSnapshot) -> dict:
    cg = s.concept_graph
    return {"total": len(s.iris()), "classes": len(cg.concepts), "properties": len(cg.properties)}


def diff(old: VocabSnapshot, new: VocabSnapshot) -> DiffReport:
    if old.name != new.name:
        raise NameMismatchError(f"cannot diff {old.name!r} against {new.name!r}")
    a, b = old.iris(), new.iris()
    return DiffReport(
        added=b - a,
        removed=a - b,
        retained=a & b,
        counts={"old": _counts(old), "new": _counts(new)},
    )


def changelog(old: VocabSnapshot, new: VocabSnapshot) -> dict:
    report = diff(old, new)
    out = {"name": new.name, "old_version": old.version, "new_version": new.version}
    out.update(report.to_json())
    return out


def _primary_family(cg: ConceptGraph, iri: IRI, chain: list) -> Optional[IRI]:
    if iri in cg.top:
        return iri
    return next((a for a in chain if a in cg.top), None)


def emit_index(s: VocabSnapshot) -> dict:
    """Search index: every concept with its family and ancestor chain, grouped
    by primary family (the nearest top concept); unreachable concepts form an
    ``unassigned`` group."""
    cg = s.concept_graph
    groups: dict = {}
    for iri in sorted(cg.concepts):
        c = cg.concepts[iri]
        chain = ancestors(cg, iri)
        fam = _primary_family(cg, iri, chain)
        groups.setdefault(fam.value if fam else None, []).append(
            {
                "iri": iri.value,
                "label": c.label,
                "definition": c.definition,
                "status": c.status,
                "top_concepts": sorted(t.value for t in c.top_concepts),
                "ancestors": [a.value for a in chain],
            }
        )
    ordered = [{"top_concept": k, "concepts": groups[k]} for k in sorted(k for k in groups if k is not None)]
    if None in groups:
        ordered.append({"top_concept": "unassigned", "concepts": groups[None]})
    return {
        "name": s.name,
        "version": s.version,
        "mode": cg.mode.value,
        "concept_count": len(cg.concepts),
        "groups": ordered,
    }


def write_outputs(
    result: BuildResult,
    out_dir: Union[str, Path],
    previous: Optional[VocabSnapshot] = None,
) -> dict:
    """Write the Turtle files, index and (when ``previous`` is given) changelog."""
    from .rdf import serialize_turtle

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    snap = result.snapshot
    stem = (snap.name.replace("/", "-") or "dpv") + "-" + snap.version
    paths = {
        "skos": out / f"{stem}-skos.ttl",
        "owl": out / f"{stem}-owl.ttl",
        "index": out / "index.json",
    }
    paths["skos"].write_text(serialize_turtle(result.skos), "utf-8")
    paths["owl"].write_text(serialize_turtle(result.owl), "utf-8")
    paths["index"].write_text(json.dumps(emit_index(snap), indent=2) + "\n", "utf-8")
    if previous is not None:
        paths["changelog"] = out / "changelog.json"
        paths["changelog"].write_text(json.dumps(changelog(previous, snap), indent=2) + "\n", "utf-8")
    return {k: str(v) for k, v in paths.items()}
