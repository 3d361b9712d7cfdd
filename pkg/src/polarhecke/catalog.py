"""Bundled worked examples with their expected algebras, run as checks.

Each entry pairs a group, its braid presentation and per-generator relation
polynomials with the expected dimension, minimal polynomials and flags.  The
expected data are stored verbatim (as factorizations) in
``data/catalog.json``; symmetric-space entries are generated from the bundled
restricted root data.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from .algebra import (
    TABLE_LIMIT,
    FinDimAlgebra,
    build_quotient_algebra,
    check_associativity,
    compare_algebras,
    generator_min_polys,
    is_semisimple,
)
from .braid import BraidPresentation, RelationSet, presentation_for
from .groups import ReflectionGroupSpec, enumerate_group
from .hecke import group_algebra, hecke_algebra
from .poly import as_int_tuple, cyclotomic_factorization, pformat, pmul, ppow

__all__ = [
    "CatalogError",
    "CatalogEntry",
    "load_catalog",
    "truncated_polynomial_algebra",
    "run_entry",
    "run_all",
    "select",
]


class CatalogError(RuntimeError):
    """A build failed while running an entry; the message names the entry."""


def _expand(spec) -> tuple[int, ...]:
    """Coefficient list from {"factors": [[coeffs, mult], ...]} or a plain list."""
    if isinstance(spec, dict):
        out: tuple = (1,)
        for coeffs, mult in spec["factors"]:
            out = pmul(out, ppow(tuple(coeffs), int(mult)))
        return as_int_tuple(out)
    return as_int_tuple(tuple(Fraction(c) for c in spec))


@dataclass
class CatalogEntry:
    id: str
    title: str
    group: ReflectionGroupSpec
    relations: dict  # generator name -> coefficients (constant first)
    expected: dict
    example: str = ""
    params: dict = field(default_factory=dict)
    model: dict | None = None
    citation: str = ""
    tags: tuple = ()
    datum: object = None  # RestrictedRootDatum for symmetric-space entries

    @property
    def presentation(self) -> BraidPresentation:
        return presentation_for(self.group)

    def relation_set(self) -> RelationSet:
        pres = self.presentation
        missing = [g for g in pres.generators if g not in self.relations]
        if missing:
            raise ValueError(f"{self.id}: no relation for generators {missing}")
        return RelationSet.from_generator_polys(pres, [self.relations[g] for g in pres.generators])

    def expected_min_polys(self) -> dict:
        return dict(self.expected["min_polys"])

    @classmethod
    def from_dict(cls, d: dict) -> "CatalogEntry":
        exp = dict(d["expected"])
        exp["min_polys"] = {g: _expand(p) for g, p in exp["min_polys"].items()}
        return cls(
            id=d["id"],
            title=d.get("title", ""),
            group=ReflectionGroupSpec.from_dict(d["group"]),
            relations={g: _expand(p) for g, p in d["relations"].items()},
            expected=exp,
            example=d.get("example", ""),
            params=dict(d.get("params", {})),
            model=d.get("model"),
            citation=d.get("citation", ""),
            tags=tuple(d.get("tags", ())),
        )

    def to_dict(self) -> dict:
        exp = dict(self.expected)
        exp["min_polys"] = {g: list(p) for g, p in exp["min_polys"].items()}
        out = {
            "id": self.id,
            "title": self.title,
            "example": self.example,
            "params": self.params,
            "group": self.group.to_dict(),
            "relations": {g: list(p) for g, p in self.relations.items()},
            "expected": exp,
            "citation": self.citation,
            "tags": list(self.tags),
        }
        if self.model is not None:
            out["model"] = self.model
        return out


def _symspace_entries() -> list[CatalogEntry]:
    from .symspace import GROUP_ALGEBRA, bundled_data, classify_hybrid, relation_for, s_values

    out = []
    for datum in bundled_data():
        pres = presentation_for(datum.weyl)
        rel = {g: relation_for(s) for g, s in zip(pres.generators, s_values(datum))}
        order = enumerate_group(datum.weyl).order
        cls_ = datum.expected_class or classify_hybrid(datum)
        out.append(
            CatalogEntry(
                id=f"symspace-{datum.name}",
                title=f"Symmetric space {datum.name}",
                group=datum.weyl,
                relations=rel,
                expected={
                    "dim": order,
                    "min_polys": dict(rel),
                    "semisimple": cls_ == GROUP_ALGEBRA,
                    "hybrid_class": cls_,
                    "hecke_oracle": datum.weyl.is_coxeter,
                },
                citation=f"symmetric-space recipe, s = {s_values(datum)}",
                tags=("symspace",),
                datum=datum,
            )
        )
    return out


def load_catalog(include_symspace: bool = True) -> list[CatalogEntry]:
    text = resources.files("polarhecke.data").joinpath("catalog.json").read_text()
    entries = [CatalogEntry.from_dict(d) for d in json.loads(text)]
    if include_symspace:
        entries.extend(_symspace_entries())
    return entries


def select(entries: list[CatalogEntry], filt: str | None) -> list[CatalogEntry]:
    """Entries whose example number, id or tags match ``filt``."""
    if not filt:
        return list(entries)
    out = []
    for e in entries:
        if filt == e.example or filt in e.tags or e.id == filt or e.id.startswith(filt) or f"ex{filt}" in e.id:
            out.append(e)
    return out


def truncated_polynomial_algebra(poly) -> FinDimAlgebra:
    """C[z]/(R) on the basis 1, z, ..., z^(k-1), z acting by the companion matrix."""
    p = [Fraction(c) for c in poly]
    k = len(p) - 1
    cols = []
    for j in range(k):
        if j < k - 1:
            cols.append({j + 1: Fraction(1)})
        else:
            cols.append({i: -p[i] for i in range(k) if p[i]})
    parents = [None] + [(0, {j - 1: Fraction(1)}) for j in range(1, k)]
    alg = FinDimAlgebra(
        basis=[(0,) * j for j in range(k)],
        gens=[cols],
        names=("z",),
        parents=parents,
        metadata={"model": "truncated polynomial algebra"},
    )
    alg.relation_polys = [tuple(p)]
    return alg


# -- running -------------------------------------------------------------------


def _check(checks: list, name: str, expected, computed, passed: bool | None = None) -> None:
    ok = (expected == computed) if passed is None else passed
    checks.append({"check": name, "expected": expected, "computed": computed, "pass": bool(ok)})


def _fmt(p) -> str:
    return pformat(p)


def run_entry(entry: CatalogEntry, track: bool = True, dim_cap: int = 1000) -> dict:
    """Build everything for one entry and compare against its expectations."""
    checks: list = []
    timings: dict = {}
    t0 = time.perf_counter()
    try:
        group = enumerate_group(entry.group)
        timings["group"] = time.perf_counter() - t0
        pres = entry.presentation
        rels = entry.relation_set()
        t1 = time.perf_counter()
        alg = build_quotient_algebra(pres, rels, dim_cap=dim_cap)
        timings["algebra"] = time.perf_counter() - t1
    except Exception as exc:  # attach the entry id to build failures
        raise CatalogError(f"{entry.id}: {type(exc).__name__}: {exc}") from exc
    exp = entry.expected
    _check(checks, "expected dim equals |W|", exp["dim"], group.order)
    _check(checks, "dim A", exp["dim"], alg.dim)

    mins = generator_min_polys(alg)
    exp_mins = entry.expected_min_polys()
    for g, name in enumerate(pres.generators):
        _check(checks, f"min poly of {name}", _fmt(exp_mins[name]), _fmt(as_int_tuple(mins[g])))

    # degree of R equals the order of the generator as a reflection
    refl = {r.index: r for r in group.reflections}
    for g, name in enumerate(pres.generators):
        r = refl.get(group.generator_index[g])
        order = r.order if r is not None else None
        _check(checks, f"deg R({name}) = n_sigma", len(exp_mins[name]) - 1, order)
        _check(checks, f"{name} is a primitive reflection", True, bool(r is not None and r.primitive))

    for g, name in enumerate(pres.generators):
        fac = cyclotomic_factorization(mins[g])
        _check(checks, f"R({name}) is a product of cyclotomic polynomials", True, fac is not None)

    t2 = time.perf_counter()
    assoc = check_associativity(alg)
    _check(checks, f"associativity ({assoc['method']})", True, assoc["passed"])

    if exp.get("semisimple") is not None and alg.dim <= TABLE_LIMIT:
        ss, rad = is_semisimple(alg)
        _check(checks, "semisimple", exp["semisimple"], ss)
    if exp.get("commutative"):
        _check(checks, "commutative", True, alg.is_commutative())
        ref = truncated_polynomial_algebra(exp_mins[pres.generators[0]])
        cmp = compare_algebras(alg, ref)
        _check(checks, "isomorphic to C[z]/(R)", "isomorphic", cmp["verdict"])
    if exp.get("hecke_oracle") and entry.group.is_coxeter:
        polys = [exp_mins[g] for g in pres.generators]
        if exp.get("hybrid_class") == "GroupAlgebra":
            ref = group_algebra(group)
            label = "isomorphic to C[W]"
        else:
            ref = hecke_algebra(group, polys)
            label = "isomorphic to the T_w model"
        _check(checks, label, "isomorphic", compare_algebras(alg, ref)["verdict"])
    timings["invariants"] = time.perf_counter() - t2

    if entry.datum is not None:
        _symspace_checks(entry, alg, checks)

    if track and entry.model is not None and exp.get("stable", True):
        t3 = time.perf_counter()
        _tracker_checks(entry, group, checks)
        timings["tracker"] = time.perf_counter() - t3

    timings["total"] = time.perf_counter() - t0
    return {
        "id": entry.id,
        "title": entry.title,
        "citation": entry.citation,
        "dim": alg.dim,
        "min_polys": {name: list(as_int_tuple(mins[g])) for g, name in enumerate(pres.generators)},
        "checks": checks,
        "pass": all(c["pass"] for c in checks),
        "timings": timings,
    }


def _symspace_checks(entry: CatalogEntry, alg, checks: list) -> None:
    from .symspace import classify_hybrid, model_for, s_values, s_values_oracle, twisted_holonomy

    datum = entry.datum
    _check(checks, "hybrid class", entry.expected["hybrid_class"], classify_hybrid(datum))
    if datum.model is not None:
        res = s_values_oracle(model_for(datum.model), datum.weyl)
        _check(checks, "s values (oracle)", s_values(datum), list(res.s))
    tw = twisted_holonomy(alg, datum)
    _check(checks, "twisted generators satisfy the braid relations", True, tw["braid_relations_hold"])


def _tracker_checks(entry: CatalogEntry, group, checks: list) -> None:
    from .monodromy.model import PolarModel
    from .monodromy.tracker import (
        braid_generator_loop,
        carousel_report,
        critical_points,
        expected_wall_permutation,
        permutation_closure,
        right_regular_action,
        track_loop,
    )

    model = PolarModel.from_dict(entry.model)
    model.validate()
    crit = critical_points(model)
    _check(checks, "tracker |Z| = |W|", group.order, crit.size)
    perms = []
    for k in range(len(model.walls)):
        res = track_loop(model, braid_generator_loop(model, wall=k), crit)
        perms.append(res.permutation)
        _check(checks, f"wall {k} loop permutation", expected_wall_permutation(model, k), res.permutation)
    _check(
        checks,
        "wall loops generate the W action on labels",
        True,
        permutation_closure(perms) == right_regular_action(model),
    )
    for k in range(len(model.walls)):
        rep = carousel_report(model, k)
        _check(checks, f"carousel at wall {k}", [rep["n_sigma"]] * rep["expected_clusters"], rep["cluster_sizes"], rep["ok"])


def run_all(filt: str | None = None, track: bool = True, entries: list[CatalogEntry] | None = None) -> dict:
    entries = load_catalog() if entries is None else entries
    chosen = select(entries, filt)
    t0 = time.perf_counter()
    results = []
    for e in chosen:
        try:
            results.append(run_entry(e, track=track))
        except CatalogError as exc:
            results.append({"id": e.id, "title": e.title, "pass": False, "error": str(exc), "checks": []})
    passed = sum(1 for r in results if r["pass"])
    return {
        "filter": filt,
        "entries": results,
        "passed": passed,
        "failed": len(results) - passed,
        "total": len(results),
        "seconds": time.perf_counter() - t0,
    }
