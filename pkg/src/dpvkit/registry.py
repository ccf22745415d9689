"""Versioned namespaces and extension paths under the DPV root IRI.

Resolution is offline: the registry is loaded from a JSON manifest (the
bundled default lists the published extensions) and never dereferences IRIs.
"""

from __future__ import annotations

import functools
import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import NamedTuple, Optional, Union

import jsonschema

from .rdf import IRI, RDFError

__all__ = [
    "ExtensionDescriptor",
    "Registry",
    "Resolution",
    "RegistryError",
    "UnknownExtensionError",
    "UnknownVersionError",
    "UnresolvableIRIError",
    "load_manifest",
    "default_registry",
    "versioned_iri",
    "resolve",
    "jurisdiction_of",
]

_VERSION = re.compile(r"^\d+(?:\.\d+)*$")
_LEGAL = re.compile(r"^legal/([^/]+)(?:/([^/]+))?$")


class RegistryError(RDFError):
    pass


class UnknownExtensionError(RegistryError, KeyError):
    def __str__(self) -> str:
        return self.args[0]


class UnknownVersionError(RegistryError):
    pass


class UnresolvableIRIError(RegistryError):
    pass


@dataclass(frozen=True)
class ExtensionDescriptor:
    short_name: str
    base_path: str
    versions: tuple
    prefix: str = ""
    title: str = ""
    jurisdiction: Optional[str] = None
    top_concepts: frozenset = frozenset()

    def __post_init__(self) -> None:
        if any(_VERSION.match(seg) for seg in self.short_name.split("/") if seg):
            raise RegistryError(f"extension name {self.short_name!r} contains a version segment")
        m = _LEGAL.match(self.base_path)
        if m:
            code = m.group(1)
            if code != code.lower():
                raise RegistryError(f"jurisdiction code in {self.base_path!r} must be lowercase")
            if self.jurisdiction is None:
                object.__setattr__(self, "jurisdiction", code)
            elif self.jurisdiction != code:
                raise RegistryError(
                    f"{self.short_name!r}: jurisdiction {self.jurisdiction!r} disagrees with path {self.base_path!r}"
                )
        elif self.jurisdiction is not None:
            raise RegistryError(f"{self.short_name!r}: only legal/<code> extensions carry a jurisdiction")

    @property
    def is_core(self) -> bool:
        return self.base_path == ""


class Resolution(NamedTuple):
    extension: ExtensionDescriptor
    version: str
    local_name: str
    versioned: bool


@dataclass(frozen=True)
class Registry:
    root: str
    extensions: dict
    latest: str
    _by_path: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "root", self.root.rstrip("/"))
        by_path = {}
        for ext in self.extensions.values():
            if ext.base_path in by_path:
                raise RegistryError(f"duplicate extension path {ext.base_path!r}")
            by_path[ext.base_path] = ext
        object.__setattr__(self, "_by_path", by_path)

    def extension(self, name: str) -> ExtensionDescriptor:
        try:
            return self.extensions[name]
        except KeyError:
            raise UnknownExtensionError(f"unknown extension {name!r}") from None

    def by_prefix(self, prefix: str) -> Optional[ExtensionDescriptor]:
        for ext in self.extensions.values():
            if ext.prefix == prefix:
                return ext
        return None

    def versions(self) -> set:
        return {v for ext in self.extensions.values() for v in ext.versions}

    def top_concepts(self) -> frozenset:
        out: set = set()
        for ext in self.extensions.values():
            out |= ext.top_concepts
        return frozenset(out)

    def namespace(self, extension: str, version: Optional[str] = None) -> str:
        """Concept namespace (``...#``), versioned when ``version`` is given."""
        base = versioned_iri(self, extension, version).value if version else self._unversioned(extension)
        return base + "#"

    def prefixes(self) -> dict:
        return {ext.prefix: self.namespace(ext.short_name) for ext in self.extensions.values() if ext.prefix}

    def _unversioned(self, extension: str) -> str:
        ext = self.extension(extension)
        return self.root + ("/" + ext.base_path if ext.base_path else "")


def versioned_iri(reg: Registry, extension: str, version: str) -> IRI:
    ext = reg.extension(extension)
    if version not in ext.versions:
        raise UnknownVersionError(f"extension {extension!r} has no version {version!r}")
    out = reg.root + "/" + version
    if not ext.is_core:
        out += "/" + ext.base_path
    return IRI(out)


def resolve(reg: Registry, iri: Union[IRI, str]) -> Resolution:
    """Split an IRI under the root into (extension, version, local name).

    Unversioned IRIs resolve to the registry's latest version. Both ``#Name``
    and ``/Name`` local names are accepted.
    """
    value = iri.value if isinstance(iri, IRI) else iri
    root = reg.root
    if not value.startswith(root) or value[len(root):len(root) + 1] not in ("", "/", "#"):
        raise UnresolvableIRIError(f"{value} is not under {root}")
    rest = value[len(root):]
    path, _, fragment = rest.partition("#")
    segments = [s for s in path.split("/") if s]
    version = None
    if segments and _VERSION.match(segments[0]):
        version = segments.pop(0)
    if len(segments) > 1 and segments[0] == "legal" and "legal/" + segments[1].lower() in reg._by_path:
        # jurisdiction codes are registered lowercase; accept `legal/IE` too
        segments[1] = segments[1].lower()
    local = fragment
    joined = "/".join(segments)
    ext = reg._by_path.get(joined)
    if ext is None and not fragment and segments:
        # slash form: the last segment is the local name
        ext = reg._by_path.get("/".join(segments[:-1]))
        local = segments[-1]
    if ext is None:
        raise UnresolvableIRIError(f"no registered extension for path {joined!r} in {value}")
    if version is None:
        return Resolution(ext, reg.latest, local, False)
    if version not in ext.versions:
        raise UnresolvableIRIError(f"extension {ext.short_name!r} has no version {version!r}")
    return Resolution(ext, version, local, True)


def jurisdiction_of(reg: Registry, extension: str) -> Optional[str]:
    return reg.extension(extension).jurisdiction


@functools.lru_cache(maxsize=None)
def _schema() -> dict:
    return json.loads(resources.files("dpvkit.data").joinpath("manifest.schema.json").read_text("utf-8"))


def _expand(name: str, prefixes: dict) -> IRI:
    if "://" in name:
        return IRI(name)
    prefix, sep, local = name.partition(":")
    if not sep or prefix not in prefixes:
        raise RegistryError(f"cannot expand {name!r}: unknown prefix")
    return IRI(prefixes[prefix] + local)


def registry_from_dict(doc: dict) -> Registry:
    try:
        jsonschema.validate(doc, _schema())
    except jsonschema.ValidationError as exc:
        raise RegistryError(f"invalid manifest: {exc.message}") from None
    root = doc.get("root", "https://w3id.org/dpv").rstrip("/")
    entries = doc["extensions"]
    prefixes = {
        e["prefix"]: root + ("/" + e.get("base_path", e["short_name"]) if e.get("base_path", e["short_name"]) else "") + "#"
        for e in entries
        if e.get("prefix")
    }
    extensions = {}
    for e in entries:
        name = e["short_name"]
        if name in extensions:
            raise RegistryError(f"duplicate extension {name!r}")
        extensions[name] = ExtensionDescriptor(
            short_name=name,
            base_path=e.get("base_path", name),
            versions=tuple(e["versions"]),
            prefix=e.get("prefix", ""),
            title=e.get("title", ""),
            jurisdiction=e.get("jurisdiction"),
            top_concepts=frozenset(_expand(t, prefixes) for t in e.get("top_concepts", ())),
        )
    latest = doc["latest"]
    for ext in extensions.values():
        if latest not in ext.versions:
            raise RegistryError(f"latest version {latest!r} missing from extension {ext.short_name!r}")
    return Registry(root=root, extensions=extensions, latest=latest)


def load_manifest(path: Union[str, Path]) -> Registry:
    return registry_from_dict(json.loads(Path(path).read_text("utf-8")))


@functools.lru_cache(maxsize=None)
def default_registry() -> Registry:
    doc = json.loads(resources.files("dpvkit.data").joinpath("manifest.json").read_text("utf-8"))
    return registry_from_dict(doc)
