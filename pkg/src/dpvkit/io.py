"""File helpers: reading Turtle files and vocabulary directories."""

from __future__ import annotations

from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Union

from .rdf import Graph, parse_turtle
from .vocab import ConceptGraph, SemanticsMode, detect_mode, load_vocabulary

__all__ = ["bundled_path", "read_graph", "read_graphs", "load_vocab_dir"]

PathLike = Union[str, Path]


def bundled_path(*parts: str) -> Path:
    """Filesystem path of a file shipped in ``dpvkit/data``."""
    return Path(str(resources.files("dpvkit.data").joinpath(*parts)))


def read_graph(path: PathLike) -> Graph:
    return parse_turtle(Path(path).read_text("utf-8"))


def read_graphs(paths: Iterable[PathLike]) -> Graph:
    out = Graph()
    for p in paths:
        out = out.union(read_graph(p))
    return out


def _turtle_files(path: Path) -> list:
    if path.is_dir():
        return sorted(path.glob("*.ttl"))
    return [path]


def load_vocab_dir(
    path: Optional[PathLike] = None,
    mode: Union[SemanticsMode, str, None] = None,
    top_concepts=None,
) -> ConceptGraph:
    """Load every ``*.ttl`` in a directory (or a single file) as one vocabulary.

    ``path`` defaults to the bundled fixture vocabulary; ``mode`` is detected
    from the content when omitted.
    """
    root = Path(path) if path is not None else bundled_path("vocab")
    files = _turtle_files(root)
    if not files:
        raise FileNotFoundError(f"no .ttl files under {root}")
    g = read_graphs(files)
    if mode is None:
        mode = detect_mode(g)
    return load_vocabulary(g, mode, top_concepts)
