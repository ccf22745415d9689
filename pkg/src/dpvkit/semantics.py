"""Conversion between the RDFS+SKOS and OWL2 renderings of a vocabulary,
and diagnostics for usage patterns that only break under OWL2.

Only typing and hierarchy triples are rewritten; labels, definitions and any
other statements pass through unchanged. Punning is never produced.
"""

from __future__ import annotations

from .query import in_range
from .rdf import IRI, OWL, RDF, RDFS, SKOS, Graph, Triple
from .vocab import (
    ConceptGraph,
    Diagnostic,
    HierarchyEdge,
    SemanticsMode,
    VocabError,
    load_vocabulary,
)

__all__ = [
    "UnknownFamilyError",
    "to_owl2",
    "to_rdfs_skos",
    "convert",
    "render",
    "diagnose_owl2_usage",
    "diagnose_usage",
]


class UnknownFamilyError(VocabError):
    pass


_STRUCTURAL_TYPES = {OWL.Class, RDFS.Class, SKOS.Concept, RDF.Property, OWL.ObjectProperty}


def _owned(cg: ConceptGraph, t: Triple) -> bool:
    """Whether ``t`` encodes typing/hierarchy that a conversion re-renders."""
    s, p, o = t
    if s in cg.concepts:
        if p == RDF.type and (o in (SKOS.Concept, RDFS.Class, OWL.Class) or o in cg.top):
            return True
        if p in (SKOS.broader, RDFS.subClassOf) and o in cg.concepts:
            return True
    if p == SKOS.narrower and o in cg.concepts and s in cg.concepts:
        return True
    if s in cg.properties and p == RDF.type and o in (RDF.Property, OWL.ObjectProperty):
        return True
    return False


def render(cg: ConceptGraph, mode: SemanticsMode) -> Graph:
    """Graph carrying ``cg`` in ``mode``: re-rendered typing/hierarchy plus pass-through triples."""
    out = {t for t in cg.source if not _owned(cg, t)}
    for iri, concept in cg.concepts.items():
        if mode is SemanticsMode.RDFS_SKOS:
            out.add(Triple(iri, RDF.type, SKOS.Concept))
            out.add(Triple(iri, RDF.type, RDFS.Class))
            for fam in concept.top_concepts:
                if fam != iri:
                    out.add(Triple(iri, RDF.type, fam))
        else:
            out.add(Triple(iri, RDF.type, OWL.Class))
    pred = SKOS.broader if mode is SemanticsMode.RDFS_SKOS else RDFS.subClassOf
    for e in cg.edges:
        out.add(Triple(e.child, pred, e.parent))
    ptype = RDF.Property if mode is SemanticsMode.RDFS_SKOS else OWL.ObjectProperty
    for prop in cg.properties:
        out.add(Triple(prop, RDF.type, ptype))
    prefixes = cg.source.prefixes
    if mode is SemanticsMode.OWL2:
        prefixes.setdefault("owl", str(OWL.base))
        prefixes.setdefault("rdfs", str(RDFS.base))
    else:
        prefixes.setdefault("skos", str(SKOS.base))
        prefixes.setdefault("rdfs", str(RDFS.base))
    return Graph(out, prefixes)


def _relabel(cg: ConceptGraph, mode: SemanticsMode) -> ConceptGraph:
    return ConceptGraph(
        mode=mode,
        concepts=cg.concepts,
        edges=frozenset(HierarchyEdge(e.child, e.parent, mode.relation) for e in cg.edges),
        properties=cg.properties,
        top=cg.top,
        categories=cg.categories,
        source=render(cg, mode),
    )


def to_owl2(cg: ConceptGraph) -> ConceptGraph:
    if cg.mode is not SemanticsMode.RDFS_SKOS:
        raise ValueError(f"to_owl2 expects an rdfs-skos vocabulary, got {cg.mode.value}")
    return _relabel(cg, SemanticsMode.OWL2)


def to_rdfs_skos(cg: ConceptGraph) -> ConceptGraph:
    if cg.mode is not SemanticsMode.OWL2:
        raise ValueError(f"to_rdfs_skos expects an owl2 vocabulary, got {cg.mode.value}")
    for iri in sorted(cg.concepts):
        if iri not in cg.top and not cg.concepts[iri].top_concepts:
            raise UnknownFamilyError(f"class {iri} reaches no declared top concept")
    return _relabel(cg, SemanticsMode.RDFS_SKOS)


def convert(cg: ConceptGraph, mode: SemanticsMode) -> ConceptGraph:
    if cg.mode is mode:
        return cg
    return to_owl2(cg) if mode is SemanticsMode.OWL2 else to_rdfs_skos(cg)


def diagnose_owl2_usage(vocab: ConceptGraph, usage: Graph) -> list:
    """Flag class-as-object and subclass-of-instance uses under OWL2 semantics.

    With an rdfs-skos ``vocab`` its concepts are instances, so using them as
    property values is never flagged.
    """
    classes = set(usage.subjects(RDF.type, OWL.Class))
    if vocab.mode is SemanticsMode.OWL2:
        classes |= set(vocab.concepts)
    else:
        classes -= set(vocab.concepts)
    instances = set()
    for s, p, o in usage:
        if p == RDF.type and o not in _STRUCTURAL_TYPES and s not in classes:
            instances.add(s)
    if vocab.mode is SemanticsMode.RDFS_SKOS:
        instances |= set(vocab.concepts)

    name = vocab.source.union(usage).compact
    diags = []
    for t in sorted(usage, key=lambda t: (str(t.subject), t.predicate.value, str(t.object))):
        s, p, o = t
        if p in vocab.properties and o in classes and o not in instances:
            diags.append(
                Diagnostic(
                    "class-as-object",
                    str(s),
                    f"{name(o)} is a class, not an instance of {name(vocab.properties[p])}, so it cannot be a value of {name(p)}",
                    "warning",
                )
            )
        elif p == RDFS.subClassOf and o in instances:
            diags.append(
                Diagnostic(
                    "subclass-of-instance",
                    str(s),
                    f"{name(s)} is declared a subclass of {name(o)}, which is an instance",
                    "warning",
                )
            )
    return diags


def diagnose_usage(vocab: ConceptGraph, usage: Graph) -> list:
    """Mode-aware check of a use-case graph against ``vocab``.

    OWL2 vocabularies get :func:`diagnose_owl2_usage`; SKOS vocabularies are
    merged with the usage graph, reloaded, and every ranged property value is
    range-checked.
    """
    if vocab.mode is SemanticsMode.OWL2:
        return diagnose_owl2_usage(vocab, usage)
    diags = diagnose_owl2_usage(vocab, usage)
    try:
        merged = load_vocabulary(vocab.source.union(usage), SemanticsMode.RDFS_SKOS, vocab.top)
    except VocabError as exc:
        return diags + [Diagnostic("usage-structure", "", str(exc), "warning")]
    name = merged.source.compact
    for s, p, o in sorted(usage, key=lambda t: (str(t.subject), t.predicate.value, str(t.object))):
        if p not in merged.properties or not isinstance(o, IRI):
            continue
        if o not in merged.concepts:
            diags.append(Diagnostic("unknown-concept", str(s), f"{name(o)} (value of {name(p)}) is not a known concept", "warning"))
        elif not in_range(merged, p, o):
            diags.append(
                Diagnostic("range-mismatch", str(s), f"{name(o)} is not within the range {name(merged.properties[p])} of {name(p)}", "warning")
            )
    return diags
