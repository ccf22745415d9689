"""Hierarchy queries over a loaded vocabulary.

All queries follow hierarchy edges irrespective of their relation label, so
a vocabulary answers identically in its SKOS and OWL2 renderings.
"""

from __future__ import annotations

from .rdf import IRI
from .vocab import ConceptGraph, UnknownConceptError

__all__ = ["ancestors", "is_a", "in_range", "categorize"]


def _check(cg: ConceptGraph, c: IRI) -> None:
    if c not in cg.concepts:
        raise UnknownConceptError(c)


def ancestors(cg: ConceptGraph, c: IRI) -> list:
    """Breadth-first ancestors of ``c``, nearest first, ties broken lexically."""
    _check(cg, c)
    cached = cg._ancestors.get(c)
    if cached is not None:
        return list(cached)
    parents = cg._parents
    seen = {c}
    out = []
    frontier = [c]
    while frontier:
        layer = set()
        for node in frontier:
            for p in parents[node]:
                if p not in seen:
                    layer.add(p)
        frontier = sorted(layer)
        seen |= layer
        out.extend(frontier)
    cg._ancestors[c] = tuple(out)
    return out


def is_a(cg: ConceptGraph, c: IRI, family: IRI) -> bool:
    _check(cg, c)
    _check(cg, family)
    return c == family or family in ancestors(cg, c)


def in_range(cg: ConceptGraph, prop: IRI, obj: IRI) -> bool:
    try:
        rng = cg.properties[prop]
    except KeyError:
        raise UnknownConceptError(prop, "property") from None
    return is_a(cg, obj, rng)


def categorize(cg: ConceptGraph, c: IRI, marker: IRI) -> bool:
    """Whether ``c`` falls under ``marker`` by hierarchy or by an asserted category.

    A concept typed by a category (``pd:Health a dpv:SpecialCategoryPersonalData``)
    counts, as does any concept whose ancestor carries such a typing.
    """
    _check(cg, marker)
    if is_a(cg, c, marker):
        return True
    for node in [c, *ancestors(cg, c)]:
        for cat in cg.categories.get(node, ()):
            if cat in cg.concepts and is_a(cg, cat, marker):
                return True
    return False
