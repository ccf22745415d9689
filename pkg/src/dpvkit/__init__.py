"""Toolkit for the Data Privacy Vocabulary (DPV): Turtle I/O, dual SKOS/OWL2
semantics, taxonomy queries, consent records, namespaces and vocabulary builds."""

from __future__ import annotations

__version__ = "0.1.0"

from .rdf import (  # noqa: E402
    IRI,
    BNode,
    Graph,
    Literal,
    Triple,
    graph_isomorphic,
    parse_turtle,
    serialize_turtle,
)
from .vocab import (  # noqa: E402
    Concept,
    ConceptGraph,
    Diagnostic,
    SemanticsMode,
    load_vocabulary,
    validate_wellformed,
)
from .query import ancestors, categorize, in_range, is_a  # noqa: E402
from .semantics import convert, diagnose_owl2_usage, diagnose_usage, to_owl2, to_rdfs_skos  # noqa: E402
from .records import (  # noqa: E402
    ConsentEvent,
    ConsentRecord,
    append_event,
    extract_record,
    record_to_graph,
    validate_record,
)
from .registry import default_registry, jurisdiction_of, resolve, versioned_iri  # noqa: E402
from .build import build, diff, emit_index, read_sheet  # noqa: E402
from .io import load_vocab_dir, read_graph  # noqa: E402
