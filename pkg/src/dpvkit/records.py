"""ISO/IEC TS 27560-shaped consent records expressed with DPV terms."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from datetime import datetime, timedelta, timezone
from importlib import resources
from pathlib import Path
from typing import Optional, Union

from .query import in_range, is_a
from .rdf import DCT, IRI, RDF, XSD, BNode, Graph, Literal, RDFError, Triple, term_key
from .vocab import DPV, ConceptGraph, Diagnostic

__all__ = [
    "StorageCondition",
    "ProcessDescription",
    "ConsentEvent",
    "ConsentRecord",
    "BlankTree",
    "Residue",
    "RecordPolicy",
    "RecordError",
    "MissingRecordError",
    "AmbiguousRecordError",
    "OutOfOrderEventError",
    "extract_record",
    "record_to_graph",
    "validate_record",
    "append_event",
    "latest_event",
    "validation_report",
    "parse_timestamp",
    "is_duration",
]


class RecordError(RDFError):
    pass


class MissingRecordError(RecordError):
    pass


class AmbiguousRecordError(RecordError):
    pass


class OutOfOrderEventError(RecordError):
    pass


_DURATION = re.compile(
    r"^-?P(?=\d|T\d)(?:\d+Y)?(?:\d+M)?(?:\d+W)?(?:\d+D)?(?:T(?=\d)(?:\d+H)?(?:\d+M)?(?:\d+(?:\.\d+)?S)?)?$"
)
_DATETIME = re.compile(
    r"^(-?\d{4,})-(\d{2})-(\d{2})T(\d{2}):(\d{2}):(\d{2})(\.\d+)?(Z|[+-]\d{2}:\d{2})?$"
)


def is_duration(value: str) -> bool:
    return bool(_DURATION.match(value))


def parse_timestamp(value: str) -> datetime:
    """Parse an xsd:dateTime lexical form.

    Zoned values are normalised to naive UTC; unzoned values are taken as-is.
    """
    m = _DATETIME.match(value)
    if not m:
        raise ValueError(f"not an ISO 8601 date-time: {value!r}")
    y, mo, d, h, mi, s, frac, tz = m.groups()
    micro = int(round(float(frac) * 1_000_000)) if frac else 0
    dt = datetime(int(y), int(mo), int(d), int(h), int(mi), int(s), min(micro, 999_999))
    if tz:
        if tz == "Z":
            offset = timedelta(0)
        else:
            sign = 1 if tz[0] == "+" else -1
            offset = sign * timedelta(hours=int(tz[1:3]), minutes=int(tz[4:6]))
        dt = (dt.replace(tzinfo=timezone(offset))).astimezone(timezone.utc).replace(tzinfo=None)
    return dt


@dataclass(frozen=True)
class BlankTree:
    """Label-free rendering of a nested blank node: sorted (predicate, value) pairs."""

    pairs: tuple


@dataclass(frozen=True)
class Residue:
    """A statement the record model does not interpret, kept for re-serialization.

    ``path`` names the owning node (``record``, ``processes[0]``,
    ``processes[0].storage``, ``events[1]``) or ``graph`` for statements not
    attached to the record, in which case ``subject`` is set.
    """

    path: str
    predicate: Optional[IRI]
    value: object
    subject: object = None


def _value_key(v) -> tuple:
    if isinstance(v, BlankTree):
        return (3, tuple((p.value, _value_key(o)) for p, o in v.pairs))
    if v is None:
        return (4,)
    return term_key(v)


def _residue_key(r: Residue) -> tuple:
    return (r.path, r.predicate.value if r.predicate else "", _value_key(r.value), _value_key(r.subject))


@dataclass(frozen=True)
class StorageCondition:
    location: Optional[IRI] = None
    duration: Optional[str] = None
    residue: tuple = ()


@dataclass(frozen=True)
class ProcessDescription:
    title: Optional[str] = None
    title_lang: Optional[str] = None
    purpose: frozenset = frozenset()
    legal_basis: frozenset = frozenset()
    personal_data: frozenset = frozenset()
    controller: Optional[IRI] = None
    processing: frozenset = frozenset()
    storage: Optional[StorageCondition] = None
    jurisdiction: Optional[IRI] = None
    recipients: frozenset = frozenset()
    node: Optional[IRI] = None
    residue: tuple = ()


@dataclass(frozen=True)
class ConsentEvent:
    status: IRI
    timestamp: str
    expression: Optional[IRI] = None
    duration: Optional[str] = None
    entity: Optional[str] = None
    node: Optional[IRI] = None
    residue: tuple = ()

    def when(self) -> datetime:
        return parse_timestamp(self.timestamp)


@dataclass(frozen=True)
class ConsentRecord:
    iri: Optional[IRI]
    identifier: Optional[str] = None
    data_subject: Optional[str] = None
    schema_version: Optional[str] = None
    notice: Optional[IRI] = None
    processes: tuple = ()
    current_status: Optional[IRI] = None
    events: tuple = ()
    residue: tuple = ()
    prefixes: dict = field(default_factory=dict, compare=False, repr=False)


# DPV consent-status concepts; used to tell the status type of an event from
# its consent-type (expression) when no vocabulary is supplied.
CONSENT_STATUSES = frozenset(
    IRI("https://w3id.org/dpv#" + n)
    for n in (
        "ConsentGiven",
        "ConsentWithdrawn",
        "ConsentRefused",
        "ConsentRequested",
        "ConsentRequestDeferred",
        "ConsentExpired",
        "ConsentInvalidated",
        "ConsentRevoked",
        "ConsentUnknown",
        "RenewedConsentGiven",
    )
)

STANDARD_PREFIXES = {
    "dct": "http://purl.org/dc/terms/",
    "dpv": "https://w3id.org/dpv#",
    "eu-gdpr": "https://w3id.org/dpv/legal/eu/gdpr#",
    "loc": "https://w3id.org/dpv/loc#",
    "pd": "https://w3id.org/dpv/pd#",
    "xsd": "http://www.w3.org/2001/XMLSchema#",
}


class _Extractor:
    def __init__(self, g: Graph, vocab: Optional[ConceptGraph]):
        self.g = g
        self.vocab = vocab
        self.used: set = set()
        self.nodes: dict = {}  # consumed node -> path
        self.refs: dict = {}
        for t in g:
            if isinstance(t.object, BNode):
                self.refs[t.object] = self.refs.get(t.object, 0) + 1

    def many(self, s, p) -> list:
        objs = sorted(self.g.objects(s, p), key=term_key)
        out = []
        for o in objs:
            if isinstance(o, IRI):
                self.used.add(Triple(s, p, o))
                out.append(o)
        return out

    def one_iri(self, s, p) -> Optional[IRI]:
        for o in sorted(self.g.objects(s, p), key=term_key):
            if isinstance(o, IRI):
                self.used.add(Triple(s, p, o))
                return o
        return None

    def one_text(self, s, p, datatypes=(None, XSD.string)) -> Optional[Literal]:
        for o in sorted(self.g.objects(s, p), key=term_key):
            if isinstance(o, Literal) and (o.lang is None and o.datatype in datatypes):
                self.used.add(Triple(s, p, o))
                return o
        return None

    def one_literal(self, s, p) -> Optional[Literal]:
        for o in sorted(self.g.objects(s, p), key=term_key):
            if isinstance(o, Literal):
                self.used.add(Triple(s, p, o))
                return o
        return None

    def node_children(self, s, p) -> list:
        out = []
        for o in sorted(self.g.objects(s, p), key=term_key):
            if isinstance(o, (IRI, BNode)):
                self.used.add(Triple(s, p, o))
                out.append(o)
        return out

    def storage(self, node) -> StorageCondition:
        loc = self.one_iri(node, DPV.hasLocation)
        dur = self.one_text(node, DPV.hasDuration, (None, XSD.duration))
        return StorageCondition(location=loc, duration=dur.lexical if dur else None)

    def process(self, node) -> ProcessDescription:
        if Triple(node, RDF.type, DPV.Process) in self.g:
            self.used.add(Triple(node, RDF.type, DPV.Process))
        title = self.one_literal(node, DCT.title)
        storages = self.node_children(node, DPV.hasStorageCondition)
        storage_node = storages[0] if storages else None
        for extra in storages[1:]:
            self.used.discard(Triple(node, DPV.hasStorageCondition, extra))
        return ProcessDescription(
            title=title.lexical if title else None,
            title_lang=title.lang if title else None,
            purpose=frozenset(self.many(node, DPV.hasPurpose)),
            legal_basis=frozenset(self.many(node, DPV.hasLegalBasis)),
            personal_data=frozenset(self.many(node, DPV.hasPersonalData)),
            controller=self.one_iri(node, DPV.hasDataController),
            processing=frozenset(self.many(node, DPV.hasProcessing)),
            storage=self.storage(storage_node) if storage_node is not None else None,
            jurisdiction=self.one_iri(node, DPV.hasJurisdiction),
            recipients=frozenset(self.many(node, DPV.hasRecipient)),
            node=node if isinstance(node, IRI) else None,
        ), storage_node

    def event(self, node) -> Optional[ConsentEvent]:
        types = sorted((o for o in self.g.objects(node, RDF.type) if isinstance(o, IRI)), key=term_key)
        status = None
        if self.vocab is not None and DPV.ConsentStatus in self.vocab.concepts:
            for t in types:
                if t in self.vocab.concepts and is_a(self.vocab, t, DPV.ConsentStatus):
                    status = t
                    break
        if status is None:
            status = next((t for t in types if t in CONSENT_STATUSES), None)
        if status is None:
            return None
        self.used.add(Triple(node, RDF.type, status))
        expression = next((t for t in types if t != status and t.value.endswith("Consent")), None)
        if expression is not None:
            self.used.add(Triple(node, RDF.type, expression))
        ts = self.one_text(node, DPV.isIndicatedAtTime, (None, XSD.dateTime))
        dur = self.one_text(node, DPV.hasDuration, (None, XSD.duration))
        entity = self.one_text(node, DPV.hasEntity)
        return ConsentEvent(
            status=status,
            timestamp=ts.lexical if ts else "",
            expression=expression,
            duration=dur.lexical if dur else None,
            entity=entity.lexical if entity else None,
            node=node if isinstance(node, IRI) else None,
        )

    # residue -------------------------------------------------------------

    def tree(self, o, stack=()):
        # shared or cyclic blank nodes keep their label
        if not isinstance(o, BNode) or o in self.nodes or o in stack or self.refs.get(o, 0) > 1:
            return o
        pairs = []
        for p, v in sorted(self.g.predicate_objects(o), key=lambda pv: (pv[0].value, term_key(pv[1]))):
            self.used.add(Triple(o, p, v))
            pairs.append((p, self.tree(v, stack + (o,))))
        pairs.sort(key=lambda pv: (pv[0].value, _value_key(pv[1])))
        return BlankTree(tuple(pairs))

    def residue_for(self, node, path: str) -> tuple:
        out = []
        for p, o in self.g.predicate_objects(node):
            t = Triple(node, p, o)
            if t in self.used:
                continue
            self.used.add(t)
            out.append(Residue(path, p, self.tree(o)))
        return tuple(sorted(out, key=_residue_key))


def extract_record(g: Graph, vocab: Optional[ConceptGraph] = None) -> ConsentRecord:
    """Read the single ``dpv:ConsentRecord`` in ``g`` into a :class:`ConsentRecord`.

    Statements that do not map onto a record field are kept as residue so the
    record can be written back without loss.
    """
    subjects = sorted(g.subjects(RDF.type, DPV.ConsentRecord), key=term_key)
    if not subjects:
        raise MissingRecordError("no subject typed dpv:ConsentRecord")
    if len(subjects) > 1:
        raise AmbiguousRecordError(
            "more than one dpv:ConsentRecord: " + ", ".join(str(s) for s in subjects)
        )
    rec = subjects[0]
    ex = _Extractor(g, vocab)
    ex.used.add(Triple(rec, RDF.type, DPV.ConsentRecord))
    ex.nodes[rec] = "record"

    version = ex.one_literal(rec, DCT.hasVersion)
    identifier = ex.one_text(rec, DPV.hasIdentifier)
    subject = ex.one_text(rec, DPV.hasDataSubject)
    notice = ex.one_iri(rec, DPV.hasNotice)
    status = ex.one_iri(rec, DPV.hasConsentStatus)

    raw_processes = []
    for node in ex.node_children(rec, DPV.hasProcess):
        proc, storage_node = ex.process(node)
        raw_processes.append((proc, node, storage_node))

    raw_events = []
    for node in sorted(g.objects(rec, DCT.hasPart), key=term_key):
        if not isinstance(node, (IRI, BNode)):
            continue
        evt = ex.event(node)
        if evt is None:
            continue
        ex.used.add(Triple(rec, DCT.hasPart, node))
        raw_events.append((evt, node))

    raw_processes.sort(key=lambda r: _process_key(r[0]))
    raw_events.sort(key=lambda r: _event_key(r[0]))
    for i, (_, node, snode) in enumerate(raw_processes):
        ex.nodes[node] = f"processes[{i}]"
        if snode is not None:
            ex.nodes[snode] = f"processes[{i}].storage"
    for i, (_, node) in enumerate(raw_events):
        ex.nodes[node] = f"events[{i}]"

    processes = []
    for i, (proc, node, snode) in enumerate(raw_processes):
        storage = proc.storage
        if snode is not None:
            storage = replace(storage, residue=ex.residue_for(snode, f"processes[{i}].storage"))
        processes.append(replace(proc, storage=storage, residue=ex.residue_for(node, f"processes[{i}]")))
    events = [replace(evt, residue=ex.residue_for(node, f"events[{i}]")) for i, (evt, node) in enumerate(raw_events)]
    residue = list(ex.residue_for(rec, "record"))

    ordered = sorted(g, key=lambda t: (term_key(t.subject), t.predicate.value, term_key(t.object)))
    # roots first so singly-referenced blank nodes are folded into their referrer
    for roots_only in (True, False):
        for t in ordered:
            if t in ex.used:
                continue
            if roots_only and isinstance(t.subject, BNode) and ex.refs.get(t.subject, 0) == 1:
                continue
            ex.used.add(t)
            residue.append(Residue("graph", t.predicate, ex.tree(t.object), subject=t.subject))

    return ConsentRecord(
        iri=rec if isinstance(rec, IRI) else None,
        identifier=identifier.lexical if identifier else None,
        data_subject=subject.lexical if subject else None,
        schema_version=version.lexical if version else None,
        notice=notice,
        processes=tuple(processes),
        current_status=status,
        events=tuple(events),
        residue=tuple(sorted(residue, key=_residue_key)),
        prefixes=g.prefixes,
    )


def _iris(xs) -> tuple:
    return tuple(sorted(x.value for x in xs))


def _process_key(p: ProcessDescription) -> tuple:
    return (
        p.node.value if p.node else "",
        p.title or "",
        _iris(p.purpose),
        _iris(p.legal_basis),
        _iris(p.personal_data),
        _iris(p.processing),
        p.controller.value if p.controller else "",
    )


def _event_key(e: ConsentEvent) -> tuple:
    try:
        when = (0, parse_timestamp(e.timestamp))
    except ValueError:
        when = (1, datetime.min)
    return (when, e.timestamp, e.status.value, e.entity or "", e.node.value if e.node else "")


# ---------------------------------------------------------------------------
# Writing


class _Writer:
    def __init__(self):
        self.triples: list = []
        self.n = 0

    def fresh(self) -> BNode:
        b = BNode(f"r{self.n}")
        self.n += 1
        return b

    def add(self, s, p, o) -> None:
        self.triples.append(Triple(s, p, o))

    def value(self, v):
        if isinstance(v, BlankTree):
            b = self.fresh()
            for p, o in v.pairs:
                self.add(b, p, self.value(o))
            return b
        return v

    def residue(self, node, entries) -> None:
        for r in entries:
            self.add(node, r.predicate, self.value(r.value))


def record_to_graph(r: ConsentRecord) -> Graph:
    w = _Writer()
    rec = r.iri if r.iri is not None else w.fresh()
    w.add(rec, RDF.type, DPV.ConsentRecord)
    if r.schema_version is not None:
        w.add(rec, DCT.hasVersion, Literal(r.schema_version))
    if r.identifier is not None:
        w.add(rec, DPV.hasIdentifier, Literal(r.identifier))
    if r.data_subject is not None:
        w.add(rec, DPV.hasDataSubject, Literal(r.data_subject))
    if r.notice is not None:
        w.add(rec, DPV.hasNotice, r.notice)
    for proc in r.processes:
        node = proc.node if proc.node is not None else w.fresh()
        w.add(rec, DPV.hasProcess, node)
        w.add(node, RDF.type, DPV.Process)
        if proc.title is not None:
            w.add(node, DCT.title, Literal(proc.title, lang=proc.title_lang))
        for pred, vals in (
            (DPV.hasPurpose, proc.purpose),
            (DPV.hasLegalBasis, proc.legal_basis),
            (DPV.hasPersonalData, proc.personal_data),
            (DPV.hasProcessing, proc.processing),
            (DPV.hasRecipient, proc.recipients),
        ):
            for v in sorted(vals):
                w.add(node, pred, v)
        if proc.controller is not None:
            w.add(node, DPV.hasDataController, proc.controller)
        if proc.jurisdiction is not None:
            w.add(node, DPV.hasJurisdiction, proc.jurisdiction)
        if proc.storage is not None:
            snode = w.fresh()
            w.add(node, DPV.hasStorageCondition, snode)
            if proc.storage.location is not None:
                w.add(snode, DPV.hasLocation, proc.storage.location)
            if proc.storage.duration is not None:
                w.add(snode, DPV.hasDuration, Literal(proc.storage.duration, datatype=XSD.duration))
            w.residue(snode, proc.storage.residue)
        w.residue(node, proc.residue)
    if r.current_status is not None:
        w.add(rec, DPV.hasConsentStatus, r.current_status)
    for evt in r.events:
        node = evt.node if evt.node is not None else w.fresh()
        w.add(rec, DCT.hasPart, node)
        w.add(node, RDF.type, evt.status)
        if evt.expression is not None:
            w.add(node, RDF.type, evt.expression)
        if evt.timestamp:
            w.add(node, DPV.isIndicatedAtTime, Literal(evt.timestamp, datatype=XSD.dateTime))
        if evt.duration is not None:
            w.add(node, DPV.hasDuration, Literal(evt.duration, datatype=XSD.duration))
        if evt.entity is not None:
            w.add(node, DPV.hasEntity, Literal(evt.entity))
        w.residue(node, evt.residue)
    for res in r.residue:
        if res.path == "record":
            w.add(rec, res.predicate, w.value(res.value))
        else:
            w.add(w.value(res.subject), res.predicate, w.value(res.value))
    prefixes = dict(STANDARD_PREFIXES)
    prefixes.update(r.prefixes)
    return Graph(w.triples, prefixes)


def latest_event(events) -> Optional[ConsentEvent]:
    """Event with the greatest timestamp; among equal timestamps the later one in sequence."""
    if not events:
        return None
    return max(enumerate(events), key=lambda ie: (_event_key(ie[1])[0], ie[0]))[1]


def append_event(r: ConsentRecord, e: ConsentEvent) -> ConsentRecord:
    """Return a copy of ``r`` with ``e`` appended and the current status moved to ``e.status``."""
    when = e.when()
    latest = max((ev.when() for ev in r.events), default=None)
    if latest is not None and when < latest:
        raise OutOfOrderEventError(f"event at {e.timestamp} precedes the latest recorded event")
    return replace(r, events=r.events + (e,), current_status=e.status)


# ---------------------------------------------------------------------------
# Validation


@dataclass(frozen=True)
class RecordPolicy:
    """Which fields make a record structurally valid, and which process
    fields must be non-empty at the complete level."""

    required: tuple = ("identifier", "data_subject", "processes", "status")
    process_required: tuple = ("purpose", "legal_basis", "personal_data", "processing")

    @classmethod
    def load(cls, path: Union[str, Path, None] = None) -> "RecordPolicy":
        if path is None:
            text = resources.files("dpvkit.data").joinpath("record-policy.json").read_text("utf-8")
        else:
            text = Path(path).read_text("utf-8")
        doc = json.loads(text)
        known = {"identifier", "data_subject", "processes", "status", "notice", "schema_version", "events"}
        unknown = set(doc.get("required", ())) - known
        if unknown:
            raise ValueError(f"unknown required record fields: {sorted(unknown)}")
        return cls(
            required=tuple(doc.get("required", cls.required)),
            process_required=tuple(doc.get("process_required", cls.process_required)),
        )


_PROCESS_PROPS = {
    "purpose": DPV.hasPurpose,
    "legal_basis": DPV.hasLegalBasis,
    "personal_data": DPV.hasPersonalData,
    "processing": DPV.hasProcessing,
}


def _structural(r: ConsentRecord, policy: RecordPolicy) -> list:
    out = []
    checks = {
        "identifier": (r.identifier, "identifier", "missing-identifier", "record has no dpv:hasIdentifier"),
        "data_subject": (r.data_subject, "data_subject", "missing-data-subject", "record has no dpv:hasDataSubject"),
        "processes": (r.processes, "processes", "missing-process", "record describes no dpv:hasProcess"),
        "status": (r.current_status, "current_status", "missing-status", "record has no dpv:hasConsentStatus"),
        "notice": (r.notice, "notice", "missing-notice", "record has no dpv:hasNotice"),
        "schema_version": (r.schema_version, "schema_version", "missing-version", "record has no dct:hasVersion"),
        "events": (r.events, "events", "missing-events", "record has no consent events"),
    }
    for name in policy.required:
        value, path, code, message = checks[name]
        if not value:
            out.append(Diagnostic(code, path, message))
    for i, evt in enumerate(r.events):
        if not evt.timestamp:
            out.append(Diagnostic("missing-timestamp", f"events[{i}].timestamp", "event has no dpv:isIndicatedAtTime"))
        else:
            try:
                parse_timestamp(evt.timestamp)
            except ValueError:
                out.append(
                    Diagnostic("invalid-timestamp", f"events[{i}].timestamp", f"{evt.timestamp!r} is not an ISO 8601 date-time")
                )
        if evt.duration is not None and not is_duration(evt.duration):
            out.append(Diagnostic("invalid-duration", f"events[{i}].duration", f"{evt.duration!r} is not an ISO 8601 duration"))
    for i, proc in enumerate(r.processes):
        if proc.storage is not None and proc.storage.duration is not None and not is_duration(proc.storage.duration):
            out.append(
                Diagnostic(
                    "invalid-duration",
                    f"processes[{i}].storage.duration",
                    f"{proc.storage.duration!r} is not an ISO 8601 duration",
                )
            )
    if r.events and r.current_status is not None:
        latest = latest_event(r.events)
        if latest.status != r.current_status:
            out.append(
                Diagnostic(
                    "status-mismatch",
                    "current_status",
                    f"current status {r.current_status} differs from latest event status {latest.status}",
                )
            )
    return out


def _range_check(cg: ConceptGraph, prop: IRI, value: IRI, path: str) -> Optional[Diagnostic]:
    name = cg.source.compact(prop)
    if prop not in cg.properties:
        return Diagnostic("undeclared-property", path, f"vocabulary declares no range for {name}")
    if value not in cg.concepts:
        return Diagnostic("unknown-concept", path, f"{cg.source.compact(value)} (value of {name}) is not a known concept")
    if not in_range(cg, prop, value):
        return Diagnostic(
            "range-mismatch",
            path,
            f"{cg.source.compact(value)} is not within the range {cg.source.compact(cg.properties[prop])} of {name}",
        )
    return None


def _complete(r: ConsentRecord, cg: ConceptGraph, policy: RecordPolicy) -> list:
    out = []
    for i, proc in enumerate(r.processes):
        for fieldname in policy.process_required:
            if not getattr(proc, fieldname):
                out.append(
                    Diagnostic("empty-field", f"processes[{i}].{fieldname}", f"process has no {fieldname.replace('_', ' ')}")
                )
        for fieldname, prop in _PROCESS_PROPS.items():
            for v in sorted(getattr(proc, fieldname)):
                d = _range_check(cg, prop, v, f"processes[{i}].{fieldname}")
                if d:
                    out.append(d)
        if proc.storage is not None and proc.storage.location is not None and DPV.hasLocation in cg.properties:
            d = _range_check(cg, DPV.hasLocation, proc.storage.location, f"processes[{i}].storage.location")
            if d:
                out.append(d)
        if proc.jurisdiction is not None and DPV.hasJurisdiction in cg.properties:
            d = _range_check(cg, DPV.hasJurisdiction, proc.jurisdiction, f"processes[{i}].jurisdiction")
            if d:
                out.append(d)
    if r.current_status is not None:
        d = _range_check(cg, DPV.hasConsentStatus, r.current_status, "current_status")
        if d:
            out.append(d)
    for i, evt in enumerate(r.events):
        d = _range_check(cg, DPV.hasConsentStatus, evt.status, f"events[{i}].status")
        if d:
            out.append(d)
        if evt.expression is not None:
            path = f"events[{i}].expression"
            if evt.expression not in cg.concepts:
                out.append(Diagnostic("unknown-concept", path, f"{cg.source.compact(evt.expression)} is not a known concept"))
            elif DPV.Consent in cg.concepts and not is_a(cg, evt.expression, DPV.Consent):
                out.append(
                    Diagnostic("range-mismatch", path, f"{cg.source.compact(evt.expression)} is not a kind of dpv:Consent")
                )
    return out


def validate_record(
    r: ConsentRecord,
    cg: ConceptGraph,
    level: str = "complete",
    policy: Optional[RecordPolicy] = None,
) -> list:
    """Diagnostics for ``r``; an empty list means valid at ``level``.

    ``structural`` checks required fields and internal consistency;
    ``complete`` adds per-process non-emptiness and vocabulary range checks.
    """
    if level not in ("structural", "complete"):
        raise ValueError(f"unknown validation level {level!r}")
    policy = policy or RecordPolicy()
    diags = _structural(r, policy)
    if level == "complete":
        diags += _complete(r, cg, policy)
    return diags


def validation_report(r: ConsentRecord, level: str, diagnostics: list) -> dict:
    return {
        "record": r.iri.value if r.iri else None,
        "level": level,
        "diagnostics": [d.to_json() for d in diagnostics],
    }
