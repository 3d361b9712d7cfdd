import pytest

from polarhecke.catalog import (
    CatalogEntry,
    load_catalog,
    run_all,
    run_entry,
    select,
    truncated_polynomial_algebra,
)
from polarhecke.algebra import generator_min_polys, is_semisimple
from polarhecke.poly import cyclotomic_factorization, from_roots, pmul

ENTRIES = load_catalog()


def test_filters():
    assert [e.id for e in select(ENTRIES, "3.1")] == ["ex3.1-n2", "ex3.1-n3"]
    assert len(select(ENTRIES, "3.6")) == 3
    sym = select(ENTRIES, "symspace")
    assert sym and all("symspace" in e.tags for e in sym)
    assert len(select(ENTRIES, None)) == len(ENTRIES)
    assert select(ENTRIES, "ex3.5-n4")[0].params == {"n": 4}
    assert select(ENTRIES, "nothing-matches") == []


def test_factored_relations_expand():
    e = select(ENTRIES, "ex3.4-n3")[0]
    r = e.relation_set().polys
    assert list(r.values()) == [from_roots((1, 2), (-1, 1))]
    g = select(ENTRIES, "ex3.6-n2")[0]
    assert g.expected["min_polys"]["tau"] == pmul((-1, 0, 1), (-1, 0, 1))


def test_entry_round_trip():
    for e in ENTRIES:
        assert CatalogEntry.from_dict(e.to_dict()).to_dict() == e.to_dict()


@pytest.mark.parametrize("entry", [e for e in ENTRIES if e.expected.get("commutative")], ids=lambda e: e.id)
def test_commutative_entries_against_truncated_ring(entry):
    (r,) = entry.relation_set().polys.values()
    alg = truncated_polynomial_algebra(r)
    assert alg.dim == len(r) - 1
    assert generator_min_polys(alg) == [tuple(r)]
    # C[z]/(R) is semisimple iff R is squarefree
    squarefree = all(e == 1 for _, e in cyclotomic_factorization(r))
    assert is_semisimple(alg)[0] == squarefree == entry.expected["semisimple"]


def test_run_entry_reports_failures():
    e = select(ENTRIES, "ex3.2-n3")[0]
    bad = CatalogEntry.from_dict({**e.to_dict(), "expected": {**e.expected, "dim": 4}})
    res = run_entry(bad, track=False)
    assert not res["pass"]
    assert any(not c["pass"] and "dim" in c["check"] for c in res["checks"])


def test_run_all_examples():
    summary = run_all("example", track=True)
    assert summary["failed"] == 0
    assert summary["passed"] == summary["total"] == len(select(ENTRIES, "example"))


def test_run_all_subset_timing():
    summary = run_all("3.1")
    assert summary["total"] == 2 and summary["passed"] == 2
    assert summary["seconds"] < 60
