from __future__ import annotations

import io
import json
import random

import pytest

from dpvkit.build import (
    DiffReport,
    DuplicateTermError,
    NameMismatchError,
    SheetFormatError,
    SourceRow,
    UnresolvedParentError,
    VocabSnapshot,
    build,
    changelog,
    diff,
    emit_index,
    read_sheet,
    write_outputs,
)
from dpvkit.io import bundled_path, load_vocab_dir
from dpvkit.query import ancestors
from dpvkit.rdf import IRI, OWL, RDF, RDFS, SKOS, Graph, Literal, Triple, graph_isomorphic, serialize_turtle
from dpvkit.registry import default_registry
from dpvkit.semantics import to_owl2, to_rdfs_skos
from dpvkit.vocab import DPV, VS, load_vocabulary

EX = "https://example.com/"


@pytest.fixture(scope="module")
def core():
    return default_registry().extension("")


def sheet(text: str) -> list:
    return read_sheet(io.StringIO(text))


HEAD = "term,type,parent,top_concept,definition,status,range\n"


def expected_example_graphs() -> tuple:
    """Hand-built expectation for the three-row example sheet."""
    onto = IRI("https://w3id.org/dpv")
    header = [
        Triple(onto, RDF.type, OWL.Ontology),
        Triple(onto, OWL.versionIRI, IRI("https://w3id.org/dpv/2.0")),
        Triple(onto, OWL.versionInfo, Literal("2.0")),
        Triple(onto, IRI("http://purl.org/dc/terms/title"), Literal("Data Privacy Vocabulary", lang="en")),
    ]
    rows = [
        (DPV.Purpose, "Purpose", "Why personal data is processed", None),
        (DPV.Marketing, "Marketing", "Promoting products or services", DPV.Purpose),
        (DPV.DirectMarketing, "Direct Marketing", "Marketing communicated directly to individuals", DPV.Marketing),
    ]
    shared, skos, owl = list(header), [], []
    for iri, label, definition, parent in rows:
        shared += [
            Triple(iri, SKOS.prefLabel, Literal(label, lang="en")),
            Triple(iri, SKOS.definition, Literal(definition, lang="en")),
            Triple(iri, VS.term_status, Literal("accepted", lang="en")),
        ]
        skos += [Triple(iri, RDF.type, RDFS.Class), Triple(iri, RDF.type, SKOS.Concept)]
        owl.append(Triple(iri, RDF.type, OWL.Class))
        if parent is not None:
            skos += [Triple(iri, SKOS.broader, parent), Triple(iri, RDF.type, DPV.Purpose)]
            owl.append(Triple(iri, RDFS.subClassOf, parent))
    return Graph(shared + skos), Graph(shared + owl)


def test_example_sheet_matches_hand_built(core):
    res = build(read_sheet(bundled_path("sheets", "example.csv")), core, "2.0")
    want_skos, want_owl = expected_example_graphs()
    assert graph_isomorphic(res.skos, want_skos)
    assert graph_isomorphic(res.owl, want_owl)
    cg = res.snapshot.concept_graph
    assert len(cg) == 3 and len(cg.edges) == 2


def test_build_is_byte_identical(core):
    rows = read_sheet(bundled_path("sheets", "example.csv"))
    a, b = build(rows, core, "2.0"), build(list(rows), core, "2.0")
    assert serialize_turtle(a.skos) == serialize_turtle(b.skos)
    assert serialize_turtle(a.owl) == serialize_turtle(b.owl)


def test_campaign_sheet_equals_fixtures(core):
    res = build(read_sheet(bundled_path("sheets", "campaign.csv")), core, "2.0")
    assert load_vocabulary(res.skos) == load_vocab_dir(bundled_path("campaign", "vocab-skos.ttl"))
    assert load_vocabulary(res.owl, "owl2") == load_vocab_dir(bundled_path("campaign", "vocab-owl.ttl"))
    assert dict(res.snapshot.concept_graph.properties) == {DPV.hasPurpose: DPV.Purpose}


def test_cross_serialization_consistency(core):
    res = build(read_sheet(bundled_path("sheets", "campaign.csv")), core, "2.0")
    skos = load_vocabulary(res.skos)
    owl = load_vocabulary(res.owl, "owl2")
    assert to_owl2(skos) == owl and to_rdfs_skos(owl) == skos


def test_empty_sheet(core):
    res = build(sheet(HEAD), core, "2.0")
    assert len(res.snapshot.concept_graph) == 0
    assert not res.skos.subjects(RDF.type, SKOS.Concept)
    assert not res.owl.subjects(RDF.type, OWL.Class)


def test_unresolved_parent_names_row(core):
    with pytest.raises(UnresolvedParentError) as info:
        build(sheet(HEAD + "A,class,Ghost,,d,accepted,\n"), core, "2.0")
    assert info.value.row == 2 and "Ghost" in str(info.value)
    with pytest.raises(UnresolvedParentError):
        build(sheet(HEAD + "p,property,A,,d,accepted,\nA,class,,,d,accepted,\n"), core, "2.0")


def test_duplicate_term(core):
    with pytest.raises(DuplicateTermError):
        build(sheet(HEAD + "A,class,,,d,accepted,\nA,class,,,e,accepted,\n"), core, "2.0")


def test_sheet_format_errors():
    with pytest.raises(SheetFormatError):
        sheet("term,type\nA,class\n")
    with pytest.raises(SheetFormatError):
        sheet(HEAD + "A,concept,,,d,accepted,\n")
    with pytest.raises(SheetFormatError):
        sheet(HEAD + "A,class,,,d,retired,\n")


def test_extension_sheet_with_qualified_top():
    reg = default_registry()
    rows = sheet(
        HEAD
        + "Contact,class,dpv:PersonalData,dpv:PersonalData,Contact data,accepted,\n"
        + "Email,class,Contact,dpv:PersonalData,Email data,accepted,\n"
        + "Legacy,class,Contact,dpv:PersonalData,Old,deprecated,\n"
    )
    res = build(rows, reg.extension("pd"), "2.0")
    email = IRI("https://w3id.org/dpv/pd#Email")
    cg = res.snapshot.concept_graph
    assert ancestors(cg, email) == [IRI("https://w3id.org/dpv/pd#Contact"), DPV.PersonalData]
    assert cg.concept(IRI("https://w3id.org/dpv/pd#Legacy")).deprecated
    assert (IRI("https://w3id.org/dpv/pd"), OWL.versionIRI, IRI("https://w3id.org/dpv/2.0/pd")) in res.skos
    with pytest.raises(Exception):
        build(rows, reg.extension("pd"), "3.0")


def test_label_column_overrides_split():
    rows = sheet("term,type,parent,top_concept,definition,status,range,label\nAI,class,,,d,accepted,,Artificial Intelligence\n")
    assert rows[0].label == "Artificial Intelligence"
    assert SourceRow("X", "class").status == "accepted"


# -- diff ----------------------------------------------------------------------------


def synthetic(names: list, version: str) -> VocabSnapshot:
    csv = HEAD + "Root,class,,,r,accepted,\n" + "".join(f"{n},class,Root,Root,d,accepted,\n" for n in names)
    res = build(sheet(csv), default_registry().extension("risk"), version)
    return res.snapshot


def test_diff_identity():
    s = synthetic(["A", "B"], "2.0")
    d = diff(s, s)
    assert d.added == set() and d.removed == set() and len(d.retained) == 3


def test_synthetic_diff_counts():
    old_names = [f"C{i}" for i in range(9)]
    new_names = old_names[2:] + [f"N{i}" for i in range(5)]
    old, new = synthetic(old_names, "1.0"), synthetic(new_names, "2.0")
    d = diff(old, new)
    assert (len(d.added), len(d.removed), len(d.retained)) == (5, 2, 8)
    assert d.counts["old"]["total"] == 10 and d.counts["new"]["total"] == 13
    assert len(d.added) + len(d.retained) == d.counts["new"]["total"]
    assert diff(new, old).added == d.removed


def test_diff_name_mismatch():
    a = synthetic(["A"], "2.0")
    b = VocabSnapshot("pd", "2.0", a.concept_graph)
    with pytest.raises(NameMismatchError):
        diff(a, b)


def test_changelog_stable_order():
    old, new = synthetic(["A"], "1.0"), synthetic(["B"], "2.0")
    log = changelog(old, new)
    assert list(log) == ["name", "old_version", "new_version", "added", "removed", "retained", "counts"]
    assert log["added"] == ["https://w3id.org/dpv/risk#B"]
    assert isinstance(diff(old, new), DiffReport)


# -- index ---------------------------------------------------------------------------


def test_index_empty():
    snap = VocabSnapshot("", "2.0", load_vocabulary(Graph()))
    idx = emit_index(snap)
    assert idx["groups"] == [] and idx["concept_count"] == 0 and idx["version"] == "2.0"


def test_index_fixture_partition_and_chain():
    cg = load_vocab_dir()
    idx = emit_index(VocabSnapshot("", "2.0", cg))
    listed = [c["iri"] for g in idx["groups"] for c in g["concepts"]]
    assert sorted(listed) == sorted(c.value for c in cg.concepts)
    assert len(listed) == len(set(listed))
    entry = next(c for g in idx["groups"] for c in g["concepts"] if c["iri"] == EX + "CampaignA")
    assert entry["ancestors"][-1] == DPV.Purpose.value
    for g in idx["groups"]:
        iris = [c["iri"] for c in g["concepts"]]
        assert iris == sorted(iris)


def test_index_orphans_unassigned():
    g = Graph([Triple(IRI(EX + "Lonely"), RDF.type, SKOS.Concept)])
    idx = emit_index(VocabSnapshot("", "2.0", load_vocabulary(g)))
    assert idx["groups"][-1]["top_concept"] == "unassigned"


def test_write_outputs(tmp_path, core):
    res = build(read_sheet(bundled_path("sheets", "campaign.csv")), core, "2.0")
    prev = build(read_sheet(bundled_path("sheets", "example.csv")), core, "2.0").snapshot
    paths = write_outputs(res, tmp_path, prev)
    assert sorted(p.name for p in tmp_path.iterdir()) == ["changelog.json", "dpv-2.0-owl.ttl", "dpv-2.0-skos.ttl", "index.json"]
    log = json.loads((tmp_path / "changelog.json").read_text())
    assert log["added"] == [DPV.hasPurpose.value]
    assert set(paths) == {"skos", "owl", "index", "changelog"}


def test_random_sheets_deterministic(core):
    rng = random.Random(3)
    lines = [HEAD, "Purpose,class,,,p,accepted,\n"]
    names = ["Purpose"]
    for i in range(30):
        parent = rng.choice(names)
        lines.append(f"T{i},class,{parent},Purpose,d{i},accepted,\n")
        names.append(f"T{i}")
    rows = sheet("".join(lines))
    shuffled = rows[:]
    rng.shuffle(shuffled)
    assert serialize_turtle(build(rows, core, "2.0").skos) == serialize_turtle(build(shuffled, core, "2.0").skos)
