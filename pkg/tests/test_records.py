from __future__ import annotations

import json
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpvkit.io import bundled_path, load_vocab_dir
from dpvkit.rdf import IRI, Literal, Triple, Graph, parse_turtle, serialize_turtle
from dpvkit.records import (
    AmbiguousRecordError,
    BlankTree,
    ConsentEvent,
    MissingRecordError,
    OutOfOrderEventError,
    RecordPolicy,
    append_event,
    extract_record,
    is_duration,
    parse_timestamp,
    record_to_graph,
    validate_record,
    validation_report,
)
from dpvkit.vocab import DPV

EX = "https://example.com/"
PD = "https://w3id.org/dpv/pd#"
LOC = "https://w3id.org/dpv/loc#"
GDPR = "https://w3id.org/dpv/legal/eu/gdpr#"
GOLDEN = bundled_path("records", "consent-record.ttl").read_text("utf-8")


@pytest.fixture(scope="module")
def cg():
    return load_vocab_dir()


@pytest.fixture(scope="module")
def record(cg):
    return extract_record(parse_turtle(GOLDEN), cg)


def test_golden_fields(record):
    assert record.iri == IRI(EX + "63ded36f-4acd-4f3c-991e-6cb636698523")
    assert record.identifier == "63ded36f-4acd-4f3c-991e-6cb636698523"
    assert record.data_subject == "96121fde-199f-4848-8942-4436e270513a"
    assert record.schema_version == "ISO-27560"
    assert record.notice == IRI(EX + "notice")
    (p,) = record.processes
    assert p.title == "Send Newsletters with Seasonal Offers"
    assert p.purpose == {DPV.Marketing}
    assert p.legal_basis == {DPV.Consent, IRI(GDPR + "A6-1-a")}
    assert p.personal_data == {IRI(PD + "Email")}
    assert p.processing == {DPV.Collect, DPV.Store}
    assert p.controller == IRI(EX + "Acme")
    assert (p.storage.location, p.storage.duration) == (IRI(LOC + "IE"), "P1Y")
    assert p.jurisdiction == IRI(LOC + "EU")
    assert p.recipients == {IRI(EX + "Beta"), IRI(EX + "Epsilon")}
    assert record.current_status == DPV.ConsentGiven
    (e,) = record.events
    assert (e.status, e.expression) == (DPV.ConsentGiven, DPV.ExplicitlyExpressedConsent)
    assert (e.timestamp, e.duration, e.entity) == ("2021-05-28T12:24:00", "P1Y", "96121fde-199f-4848-8942-4436e270513a")
    assert record.residue == ()


def test_golden_is_valid(record, cg):
    assert validate_record(record, cg, "complete") == []
    assert validate_record(record, cg, "structural") == []


def test_extraction_without_vocab_uses_known_statuses(record):
    assert extract_record(parse_turtle(GOLDEN)) == record


def test_without_event_block(cg):
    start = GOLDEN.index("    dct:hasPart [")
    text = GOLDEN[:start].rstrip().rstrip(";") + " .\n"
    r = extract_record(parse_turtle(text), cg)
    assert r.events == () and r.residue == ()


def test_round_trip_identity(record, cg):
    again = extract_record(parse_turtle(serialize_turtle(record_to_graph(record))), cg)
    assert again == record


def test_residue_preserved(cg):
    extra = GOLDEN.replace(
        'dct:hasVersion "ISO-27560" ;',
        'dct:hasVersion "ISO-27560" ;\n    ex:note [ ex:by ex:Alice ; ex:weight "3" ] ;\n    ex:flag "x"@en ;',
    ).replace("dpv:hasEntity", 'ex:channel ex:Web ;\n        dpv:hasEntity') + "\nex:Acme ex:country loc:IE .\n"
    g = parse_turtle(extra)
    r = extract_record(g, cg)
    paths = sorted((res.path, res.predicate.value.rsplit("/", 1)[1]) for res in r.residue)
    assert paths == [("graph", "country"), ("record", "flag"), ("record", "note")]
    note = next(res for res in r.residue if res.predicate == IRI(EX + "note"))
    assert isinstance(note.value, BlankTree)
    assert [res.predicate for res in r.events[0].residue] == [IRI(EX + "channel")]
    out = record_to_graph(r)
    assert len(out) == len(g)
    assert extract_record(parse_turtle(serialize_turtle(out)), cg) == r


def test_missing_and_ambiguous():
    with pytest.raises(MissingRecordError):
        extract_record(Graph())
    two = GOLDEN + "\n:other a dpv:ConsentRecord .\n"
    with pytest.raises(AmbiguousRecordError):
        extract_record(parse_turtle(two))


def test_wrong_purpose_gives_one_range_diagnostic(record, cg):
    p = replace(record.processes[0], purpose=frozenset({IRI(PD + "Email")}))
    diags = validate_record(replace(record, processes=(p,)), cg, "complete")
    assert [d.code for d in diags] == ["range-mismatch"]
    assert "dpv:hasPurpose" in diags[0].message
    assert diags[0].path == "processes[0].purpose"


def test_missing_identifier_one_structural_diagnostic(record, cg):
    diags = validate_record(replace(record, identifier=None), cg, "structural")
    assert [(d.code, d.path) for d in diags] == [("missing-identifier", "identifier")]


def test_complete_level_checks(record, cg):
    p = replace(
        record.processes[0],
        processing=frozenset(),
        legal_basis=frozenset({IRI(EX + "Unknown")}),
        storage=replace(record.processes[0].storage, location=DPV.Marketing),
    )
    diags = validate_record(replace(record, processes=(p,)), cg, "complete")
    assert sorted((d.code, d.path) for d in diags) == [
        ("empty-field", "processes[0].processing"),
        ("range-mismatch", "processes[0].storage.location"),
        ("unknown-concept", "processes[0].legal_basis"),
    ]


def test_structural_consistency_checks(record, cg):
    bad_event = replace(record.events[0], timestamp="28/05/2021", duration="1 year")
    r = replace(record, events=(bad_event,), current_status=DPV.ConsentWithdrawn)
    codes = sorted(d.code for d in validate_record(r, cg, "structural"))
    assert codes == ["invalid-duration", "invalid-timestamp", "status-mismatch"]


def test_policy_configurable(record, cg, tmp_path):
    path = tmp_path / "policy.json"
    path.write_text(json.dumps({"required": ["identifier", "notice"]}))
    policy = RecordPolicy.load(path)
    r = replace(record, notice=None, data_subject=None)
    assert [d.code for d in validate_record(r, cg, "structural", policy)] == ["missing-notice"]
    path.write_text(json.dumps({"required": ["shoe_size"]}))
    with pytest.raises(ValueError):
        RecordPolicy.load(path)


def test_monotone(record, cg):
    r = replace(record, identifier=None, data_subject=None, processes=(replace(record.processes[0], purpose=frozenset()),))
    structural = validate_record(r, cg, "structural")
    complete = validate_record(r, cg, "complete")
    assert set(structural) <= set(complete) and len(complete) > len(structural)


def test_report_shape(record, cg):
    report = validation_report(record, "complete", validate_record(record, cg))
    assert list(report) == ["record", "level", "diagnostics"]
    assert report["diagnostics"] == []


def test_append_withdrawal(record):
    e = ConsentEvent(status=DPV.ConsentWithdrawn, timestamp="2022-01-01T00:00:00")
    r2 = append_event(record, e)
    assert r2.current_status == DPV.ConsentWithdrawn
    assert r2.events[-1] == e and len(record.events) == 1
    assert record.current_status == DPV.ConsentGiven


def test_append_to_empty(record):
    empty = replace(record, events=(), current_status=None)
    e = ConsentEvent(status=DPV.ConsentGiven, timestamp="2020-01-01T00:00:00Z")
    assert append_event(empty, e).current_status == DPV.ConsentGiven


def test_append_out_of_order(record):
    with pytest.raises(OutOfOrderEventError):
        append_event(record, ConsentEvent(status=DPV.ConsentWithdrawn, timestamp="2020-01-01T00:00:00"))


def test_events_ordered_by_timestamp(cg):
    text = GOLDEN.replace(
        'dpv:hasEntity "96121fde-199f-4848-8942-4436e270513a" ] .',
        'dpv:hasEntity "96121fde-199f-4848-8942-4436e270513a" ],\n'
        '    [ a dpv:ConsentWithdrawn ; dpv:isIndicatedAtTime "2022-02-01T09:00:00+01:00"^^xsd:dateTime ] ,\n'
        '    [ a dpv:ConsentRequested ; dpv:isIndicatedAtTime "2021-05-28T12:00:00"^^xsd:dateTime ] .',
    ).replace("dpv:hasConsentStatus dpv:ConsentGiven", "dpv:hasConsentStatus dpv:ConsentWithdrawn")
    r = extract_record(parse_turtle(text), cg)
    assert [e.status for e in r.events] == [DPV.ConsentRequested, DPV.ConsentGiven, DPV.ConsentWithdrawn]
    assert validate_record(r, cg) == []
    assert extract_record(parse_turtle(serialize_turtle(record_to_graph(r))), cg) == r


@settings(max_examples=60, deadline=None)
@given(st.lists(st.datetimes(), min_size=1, max_size=6))
def test_current_status_follows_latest_event(times):
    statuses = [DPV.ConsentGiven, DPV.ConsentWithdrawn, DPV.ConsentRefused]
    r = extract_record(parse_turtle(GOLDEN))
    r = replace(r, events=(), current_status=None)
    for i, t in enumerate(sorted(times)):
        r = append_event(r, ConsentEvent(status=statuses[i % 3], timestamp=t.isoformat(timespec="seconds")))
    top = max(e.when() for e in r.events)
    latest = [e for e in r.events if e.when() == top][-1]
    assert r.current_status == latest.status
    assert validate_record(r, load_vocab_dir(), "structural") == []


def test_timestamp_and_duration_grammar():
    assert parse_timestamp("2021-05-28T12:24:00").hour == 12
    assert parse_timestamp("2021-05-28T12:24:00Z") == parse_timestamp("2021-05-28T13:24:00+01:00")
    assert parse_timestamp("2021-05-28T12:24:00.5").microsecond == 500000
    with pytest.raises(ValueError):
        parse_timestamp("2021-05-28")
    for ok in ("P1Y", "PT5M", "P1Y2M3DT4H5M6.5S", "P2W", "-P1D"):
        assert is_duration(ok)
    for bad in ("P", "PT", "1Y", "P1S", "P1YT"):
        assert not is_duration(bad)


def test_record_graph_uses_literal_types(record):
    g = record_to_graph(record)
    assert any(o == Literal("P1Y", datatype=IRI("http://www.w3.org/2001/XMLSchema#duration")) for *_, o in g)
    assert Triple(record.iri, DPV.hasConsentStatus, DPV.ConsentGiven) in g
