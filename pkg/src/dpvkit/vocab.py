"""Concept-graph view over an RDF graph in either SKOS or OWL2 serialization."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Optional

from .rdf import DCT, IRI, OWL, RDF, RDFS, SKOS, Graph, Literal, RDFError, _NS, term_key

__all__ = [
    "SemanticsMode",
    "Concept",
    "HierarchyEdge",
    "ConceptGraph",
    "Diagnostic",
    "VocabError",
    "CycleError",
    "DanglingEdgeError",
    "MixedModeError",
    "UnknownConceptError",
    "load_vocabulary",
    "detect_mode",
    "validate_wellformed",
    "VS",
    "DPV",
]


VS = _NS("http://www.w3.org/2003/06/sw-vocab-status/ns#")
DPV = _NS("https://w3id.org/dpv#")


class VocabError(RDFError):
    pass


class CycleError(VocabError):
    def __init__(self, cycle: list):
        self.cycle = cycle
        super().__init__("hierarchy cycle: " + " -> ".join(str(c) for c in cycle))


class DanglingEdgeError(VocabError):
    def __init__(self, iri: IRI, other: IRI):
        self.iri = iri
        super().__init__(f"hierarchy edge from {other} refers to unknown concept {iri}")


class MixedModeError(VocabError):
    pass


class UnknownConceptError(VocabError, KeyError):
    def __init__(self, iri, what: str = "concept"):
        self.iri = iri
        VocabError.__init__(self, f"unknown {what}: {iri}")

    def __str__(self) -> str:
        return self.args[0]


class SemanticsMode(str, enum.Enum):
    RDFS_SKOS = "rdfs-skos"
    OWL2 = "owl2"

    @classmethod
    def parse(cls, value: str) -> "SemanticsMode":
        aliases = {"skos": cls.RDFS_SKOS, "rdfs-skos": cls.RDFS_SKOS, "owl": cls.OWL2, "owl2": cls.OWL2}
        try:
            return aliases[value.lower()]
        except KeyError:
            raise ValueError(f"unknown semantics mode {value!r}") from None

    @property
    def relation(self) -> str:
        return "broader" if self is SemanticsMode.RDFS_SKOS else "subclass-of"


@dataclass(frozen=True)
class Concept:
    iri: IRI
    label: Optional[str] = None
    definition: Optional[str] = None
    top_concepts: frozenset = frozenset()
    status: str = "accepted"

    @property
    def deprecated(self) -> bool:
        return self.status == "deprecated"


@dataclass(frozen=True, order=True)
class HierarchyEdge:
    child: IRI
    parent: IRI
    relation: str


@dataclass(frozen=True, eq=False)
class Diagnostic:
    code: str
    path: str
    message: str
    severity: str = "error"

    def to_json(self) -> dict:
        return {"code": self.code, "path": self.path, "message": self.message}

    def _key(self) -> tuple:
        return (self.code, self.path, self.message, self.severity)

    def __eq__(self, other) -> bool:
        return isinstance(other, Diagnostic) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())


@dataclass(frozen=True, eq=False)
class ConceptGraph:
    """A loaded vocabulary.

    ``properties`` maps property IRIs to the top concept naming their range.
    ``categories`` maps a concept to non-top concepts it is typed by (e.g.
    a personal-data concept asserted to be sensitive).
    """

    mode: SemanticsMode
    concepts: Mapping
    edges: frozenset
    properties: Mapping = field(default_factory=dict)
    top: frozenset = frozenset()
    categories: Mapping = field(default_factory=dict)
    source: Graph = field(default_factory=Graph)
    _parents: dict = field(default_factory=dict, repr=False, compare=False)
    _ancestors: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "concepts", MappingProxyType(dict(self.concepts)))
        object.__setattr__(self, "properties", MappingProxyType(dict(self.properties)))
        object.__setattr__(self, "categories", MappingProxyType({k: frozenset(v) for k, v in self.categories.items()}))
        parents: dict = {c: [] for c in self.concepts}
        for e in self.edges:
            parents[e.child].append(e.parent)
        for c in parents:
            parents[c].sort()
        object.__setattr__(self, "_parents", parents)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConceptGraph):
            return NotImplemented
        return (
            self.mode == other.mode
            and dict(self.concepts) == dict(other.concepts)
            and self.edges == other.edges
            and dict(self.properties) == dict(other.properties)
            and self.top == other.top
            and dict(self.categories) == dict(other.categories)
        )

    __hash__ = None  # type: ignore[assignment]

    def __len__(self) -> int:
        return len(self.concepts)

    def __contains__(self, iri) -> bool:
        return iri in self.concepts

    def parents(self, iri: IRI) -> list:
        try:
            return list(self._parents[iri])
        except KeyError:
            raise UnknownConceptError(iri) from None

    def concept(self, iri: IRI) -> Concept:
        try:
            return self.concepts[iri]
        except KeyError:
            raise UnknownConceptError(iri) from None

    def edge_pairs(self) -> frozenset:
        return frozenset((e.child, e.parent) for e in self.edges)

    def expand(self, name: str) -> IRI:
        return self.source.expand(name)


_LABEL_PREDS = (SKOS.prefLabel, RDFS.label)
_DEFINITION_PREDS = (SKOS.definition, DCT.description, RDFS.comment)


def detect_mode(g: Graph) -> SemanticsMode:
    """Guess the serialization of ``g``: OWL2 if it uses classes/subclassing."""
    if g.has_predicate(RDFS.subClassOf) or g.subjects(RDF.type, OWL.Class):
        return SemanticsMode.OWL2
    return SemanticsMode.RDFS_SKOS


def _pick_text(g: Graph, s, preds) -> Optional[str]:
    for p in preds:
        lits = [o for o in g.objects(s, p) if isinstance(o, Literal)]
        if lits:
            en = [l for l in lits if (l.lang or "").startswith("en")]
            return min(en or lits, key=term_key).lexical
    return None


def _status(g: Graph, s) -> str:
    for o in g.objects(s, VS.term_status):
        if isinstance(o, Literal) and o.lexical.strip().lower() == "deprecated":
            return "deprecated"
    for o in g.objects(s, OWL.deprecated):
        if isinstance(o, Literal) and o.lexical.strip().lower() in ("true", "1"):
            return "deprecated"
    return "accepted"


def _topological(nodes: Iterable, parents: dict) -> list:
    """Parents-before-children order; raises CycleError on a cycle."""
    order: list = []
    state: dict = {}
    for root in sorted(nodes):
        if root in state:
            continue
        stack = [(root, iter(parents.get(root, ())))]
        state[root] = 1
        path = [root]
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                path.pop()
                state[node] = 2
                order.append(node)
                continue
            st = state.get(nxt)
            if st == 1:
                i = path.index(nxt)
                raise CycleError(path[i:] + [nxt])
            if st is None:
                state[nxt] = 1
                path.append(nxt)
                stack.append((nxt, iter(parents.get(nxt, ()))))
    return order


def _closure_bits(order: list, parents: dict) -> tuple:
    """Ancestor sets as int bitsets, computed in topological order."""
    index = {c: i for i, c in enumerate(order)}
    bits: dict = {}
    for c in order:
        acc = 0
        for p in parents.get(c, ()):
            acc |= bits[p] | (1 << index[p])
        bits[c] = acc
    return index, bits


def load_vocabulary(
    g: Graph,
    mode: SemanticsMode | str = SemanticsMode.RDFS_SKOS,
    top_concepts: Optional[Iterable[IRI]] = None,
) -> ConceptGraph:
    """Interpret ``g`` as a vocabulary in the given serialization.

    ``top_concepts`` defaults to the top concepts of the bundled registry.
    In SKOS mode a concept typed directly by a top concept gets an implicit
    broader edge to it, unless that top concept is already reachable.
    """
    mode = SemanticsMode.parse(mode) if isinstance(mode, str) else mode
    if top_concepts is None:
        from .registry import default_registry

        top_concepts = default_registry().top_concepts()
    declared_top = frozenset(top_concepts)

    has_skos = g.has_predicate(SKOS.broader) or g.has_predicate(SKOS.narrower)
    has_owl = g.has_predicate(RDFS.subClassOf)
    if has_skos and has_owl:
        raise MixedModeError("document mixes skos:broader/narrower and rdfs:subClassOf hierarchies")

    typed: dict = {}
    explicit: set = set()
    if mode is SemanticsMode.RDFS_SKOS:
        members = set(s for s in g.subjects(RDF.type, SKOS.Concept) if isinstance(s, IRI))
        for tc in declared_top:
            members |= {s for s in g.subjects(RDF.type, tc) if isinstance(s, IRI)}
        for s, p, o in g:
            if not (isinstance(s, IRI) and isinstance(o, IRI)):
                continue
            if p == SKOS.broader:
                explicit.add((s, o))
            elif p == SKOS.narrower:
                explicit.add((o, s))
    else:
        members = set(s for s in g.subjects(RDF.type, OWL.Class) if isinstance(s, IRI))
        for s, p, o in g:
            if p == RDFS.subClassOf and isinstance(s, IRI) and isinstance(o, IRI):
                explicit.add((s, o))
    # declared top concepts referenced as a type or edge target join the concept set
    referenced = {o for _, o in explicit} | {c for c in declared_top if g.subjects(RDF.type, c)}
    members |= referenced & declared_top

    for child, parent in sorted(explicit):
        if child not in members:
            raise DanglingEdgeError(child, parent)
        if parent not in members:
            raise DanglingEdgeError(parent, child)

    parents: dict = {c: set() for c in members}
    for child, parent in explicit:
        parents[child].add(parent)

    categories: dict = {}
    for c in members:
        types = {o for o in g.objects(c, RDF.type) if o in members and o != c}
        if mode is SemanticsMode.RDFS_SKOS:
            typed[c] = sorted(t for t in types if t in declared_top)
        cats = {t for t in types if t not in declared_top}
        if cats:
            categories[c] = cats

    if mode is SemanticsMode.RDFS_SKOS and typed:
        # top-concept typing becomes a membership edge unless already implied
        with_typing = {c: sorted(parents[c] | set(typed.get(c, ()))) for c in members}
        order = _topological(members, with_typing)
        index = {c: i for i, c in enumerate(order)}
        bits: dict = {}
        for c in order:
            acc = 0
            for p in parents[c]:
                acc |= bits[p] | (1 << index[p])
            tops = typed.get(c, ())
            for tc in tops:
                implied = acc
                for other in tops:
                    if other != tc:
                        implied |= bits[other] | (1 << index[other])
                if not (implied >> index[tc]) & 1:
                    parents[c].add(tc)
            for p in parents[c]:
                acc |= bits[p] | (1 << index[p])
            bits[c] = acc

    relation = mode.relation
    edges = frozenset(HierarchyEdge(c, p, relation) for c, ps in parents.items() for p in ps)
    order = _topological(members, {c: sorted(ps) for c, ps in parents.items()})
    index, bits = _closure_bits(order, parents)

    concepts = {}
    for c in members:
        anc = bits[c] | (1 << index[c])
        fam = frozenset(t for t in declared_top if t in index and (anc >> index[t]) & 1)
        concepts[c] = Concept(
            iri=c,
            label=_pick_text(g, c, _LABEL_PREDS),
            definition=_pick_text(g, c, _DEFINITION_PREDS),
            top_concepts=fam,
            status=_status(g, c),
        )

    properties = {}
    for prop in sorted(s for s in g.subjects(RDFS.range) if isinstance(s, IRI)):
        for rng in sorted(g.objects(prop, RDFS.range), key=term_key):
            if rng in declared_top and rng in members:
                properties[prop] = rng
                break

    return ConceptGraph(
        mode=mode,
        concepts=concepts,
        edges=edges,
        properties=properties,
        top=frozenset(declared_top & members),
        categories=categories,
        source=g,
    )


def validate_wellformed(cg: ConceptGraph) -> list:
    """Orphans, duplicate labels within a family, and deprecated parents."""
    diags = []
    for iri in sorted(cg.concepts):
        c = cg.concepts[iri]
        if iri not in cg.top and not c.top_concepts:
            diags.append(Diagnostic("orphan-concept", str(iri), f"{iri} has no path to any top concept", "warning"))
    seen: dict = {}
    for iri in sorted(cg.concepts):
        c = cg.concepts[iri]
        if not c.label:
            continue
        for fam in sorted(c.top_concepts):
            key = (fam, c.label.strip().casefold())
            if key in seen:
                diags.append(
                    Diagnostic(
                        "duplicate-label",
                        str(iri),
                        f"label {c.label!r} of {iri} duplicates {seen[key]} in family {fam}",
                        "warning",
                    )
                )
            else:
                seen[key] = iri
    for e in sorted(cg.edges):
        if cg.concepts[e.parent].deprecated:
            diags.append(
                Diagnostic("deprecated-parent", str(e.child), f"{e.child} has deprecated parent {e.parent}", "warning")
            )
    return diags
