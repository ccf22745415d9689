from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpvkit.io import load_vocab_dir
from dpvkit.query import ancestors, categorize, in_range, is_a
from dpvkit.rdf import IRI
from dpvkit.semantics import to_owl2
from dpvkit.vocab import DPV, UnknownConceptError, load_vocabulary

import generators as gen

EX = "https://example.com/"
PD = "https://w3id.org/dpv/pd#"


@pytest.fixture(scope="module")
def cg():
    return load_vocab_dir()


def test_ancestors_campaign_b(cg):
    assert ancestors(cg, IRI(EX + "CampaignB")) == [
        IRI(EX + "CampaignA"),
        DPV.DirectMarketing,
        DPV.Marketing,
        DPV.Purpose,
    ]


def test_ancestors_of_top_is_empty(cg):
    assert ancestors(cg, DPV.Purpose) == []


def test_ancestors_unknown(cg):
    with pytest.raises(UnknownConceptError) as info:
        ancestors(cg, IRI(EX + "Nope"))
    assert "Nope" in str(info.value)


def test_is_a_examples(cg):
    assert is_a(cg, IRI(EX + "SummerSaleOffers"), DPV.Marketing)
    assert is_a(cg, DPV.Marketing, DPV.Marketing)
    assert not is_a(cg, IRI(PD + "Email"), DPV.Purpose)


def test_in_range_examples(cg):
    assert in_range(cg, DPV.hasPurpose, DPV.Marketing)
    assert not in_range(cg, DPV.hasPurpose, IRI(PD + "Email"))
    assert in_range(cg, DPV.hasPersonalData, IRI(PD + "Email"))
    with pytest.raises(UnknownConceptError):
        in_range(cg, DPV.hasNothing, DPV.Marketing)


def test_categorize_examples(cg):
    sensitive = DPV.SensitivePersonalData
    assert categorize(cg, IRI(PD + "Health"), sensitive)
    assert categorize(cg, IRI(PD + "MedicalHealth"), sensitive)
    assert categorize(cg, sensitive, sensitive)
    assert not categorize(cg, IRI(PD + "Email"), sensitive)
    with pytest.raises(UnknownConceptError):
        categorize(cg, IRI(PD + "Email"), IRI(EX + "Nope"))


def test_is_a_antisymmetric_on_fixture(cg):
    for a in cg.concepts:
        for b in ancestors(cg, a):
            assert not is_a(cg, b, a)


@pytest.mark.parametrize("seed", range(20))
def test_ancestors_match_oracle(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 120)
    nodes, edges, tops = gen.random_dag(rng, n, rng.randint(n - 1, 2 * n), roots=rng.randint(1, 3))
    cg = load_vocabulary(gen.dag_graph(nodes, edges), top_concepts=tops)
    dist = gen.closure_oracle(nodes, edges)
    for c in nodes:
        assert ancestors(cg, c) == gen.bfs_order_oracle(dist[c])


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_is_a_reflexive_transitive_and_mode_invariant(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 40)
    nodes, edges, tops = gen.random_dag(rng, n, rng.randint(n - 1, 2 * n), roots=2)
    cg = load_vocabulary(gen.dag_graph(nodes, edges), top_concepts=tops)
    owl = to_owl2(cg)
    for a in nodes:
        assert is_a(cg, a, a)
        assert ancestors(cg, a) == ancestors(owl, a)
        for b in ancestors(cg, a):
            for c in ancestors(cg, b):
                assert is_a(cg, a, c)
