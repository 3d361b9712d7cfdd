"""One test per acceptance criterion; each records a single pass/fail line.

Expected values are written out from closed forms here and compared with
what the package computes along a second, independent route where one
exists.
"""

import math
import time
import numpy as np
import sympy

from polarhecke.algebra import (
    TABLE_LIMIT,
    build_quotient_algebra,
    check_associativity,
    compare_algebras,
    generator_min_polys,
    is_semisimple,
    opposite_algebra,
)
from polarhecke.braid import RelationSet, presentation_for
from polarhecke.catalog import load_catalog, run_entry
from polarhecke.groups import ReflectionGroupSpec, enumerate_group
from polarhecke.hecke import group_algebra
from polarhecke.monodromy import (
    braid_generator_loop,
    carousel_report,
    critical_points,
    normal_crossings,
    quadric,
    symmetric_matrices,
    track_loop,
)
from polarhecke.monodromy.tracker import compose, permutation_closure, random_loop, right_regular_action
from polarhecke.poly import cyclotomic_factorization, from_roots, inflate, pmul
from polarhecke.rankone import RankOneDatum, carousel_matrix
from polarhecke.symspace import (
    build_symmetric_space_algebra,
    bundled_data,
    model_for,
    relation_for,
    s_values,
    s_values_oracle,
)

z = sympy.Symbol("z")
SPLIT = (-1, 0, 1)  # z^2 - 1
DOUBLE = (1, -2, 1)  # (z - 1)^2


def example_cases():
    """(label, group spec, relation per generator) written from the closed forms."""
    cases = []
    for n in (2, 3, 4):
        rel = DOUBLE if n % 2 == 0 else SPLIT
        cases.append((f"3.1 n={n}", ReflectionGroupSpec.cyclic(2), [rel]))
    for ex in ("3.2", "3.3"):
        for n in (2, 3, 4):
            cases.append((f"{ex} n={n}", ReflectionGroupSpec.cyclic(n), [from_roots((1, n))]))
    for n in (2, 3, 4):
        rel = from_roots((1, math.ceil(n / 2)), (-1, n // 2))
        cases.append((f"3.4 n={n}", ReflectionGroupSpec.cyclic(n), [rel]))
    for n in (2, 3, 4):
        cases.append((f"3.5 n={n}", ReflectionGroupSpec.coxeter("A", n - 1), [DOUBLE] * (n - 1)))
    for n in (1, 2, 3):
        cases.append((f"3.6 n={n}", ReflectionGroupSpec.imprimitive(4, n), [pmul(SPLIT, SPLIT)] + [SPLIT] * (n - 1)))
    cases.append(("3.7", ReflectionGroupSpec.cyclic(3), [from_roots((1, 3))]))
    return cases


def build(spec, per_gen, dim_cap=1000):
    pres = presentation_for(spec)
    return build_quotient_algebra(pres, RelationSet.from_generator_polys(pres, per_gen), dim_cap=dim_cap)


def squarefree(poly) -> bool:
    p = sympy.Poly(list(reversed(poly)), z)
    return sympy.degree(sympy.gcd(p, p.diff(z)), z) == 0


def sympy_cyclotomic(poly) -> bool:
    """Every factor over Q is one of sympy's cyclotomic polynomials."""
    _, factors = sympy.factor_list(sympy.Poly(list(reversed(poly)), z).as_expr())
    for f, _ in factors:
        deg = sympy.degree(f, z)
        # phi(d) = deg forces d <= 2 deg^2
        if not any(
            sympy.totient(d) == deg and sympy.expand(f - sympy.cyclotomic_poly(d, z)) == 0
            for d in range(1, 2 * deg * deg + 3)
        ):
            return False
    return True


def test_criterion_1_catalog_exactness(acceptance):
    failures = []
    slowest = 0.0
    t_all = time.perf_counter()
    for label, spec, per_gen in example_cases():
        t0 = time.perf_counter()
        alg = build(spec, per_gen)
        order = enumerate_group(spec).order
        if alg.dim != order:
            failures.append(f"{label}: dim {alg.dim} != |W| {order}")
        if generator_min_polys(alg) != [tuple(p) for p in per_gen]:
            failures.append(f"{label}: min polys {generator_min_polys(alg)}")
        slowest = max(slowest, time.perf_counter() - t0)
    # second route: the bundled catalog entries run through the catalog runner
    entries = [e for e in load_catalog() if "example" in e.tags]
    for e in entries:
        t0 = time.perf_counter()
        res = run_entry(e, track=False)
        if not res["pass"]:
            failures.append(f"catalog {e.id}: " + ", ".join(c["check"] for c in res["checks"] if not c["pass"]))
        slowest = max(slowest, time.perf_counter() - t0)
    total = time.perf_counter() - t_all
    ok = not failures and slowest < 60 and total < 600
    acceptance(
        1,
        "catalog exactness",
        ok,
        f"{len(example_cases())} closed-form cases + {len(entries)} catalog entries, slowest {slowest:.1f}s, total {total:.1f}s"
        + ("; " + "; ".join(failures) if failures else ""),
    )
    assert ok, failures


def test_criterion_2_dimension_law(acceptance):
    pairs = []
    for label, spec, per_gen in example_cases():
        pairs.append((label, spec, per_gen))
    for e in load_catalog():
        pres = e.presentation
        pairs.append((e.id, e.group, e.relation_set().for_generators(pres)))
    for d in bundled_data():
        pairs.append((d.name, d.weyl, [relation_for(s) for s in s_values(d)]))
    failures = []
    largest = 0
    # closed-form orders of the families involved
    def closed_order(spec):
        f, n, m = spec.family, spec.rank, spec.m
        if f == "cyclic":
            return m
        if f == "imprimitive":
            return m ** n * math.factorial(n)
        if f == "A":
            return math.factorial(n + 1)
        if f == "B":
            return 2 ** n * math.factorial(n)
        if f == "I":
            return 2 * m
        raise AssertionError(f)

    for label, spec, per_gen in pairs:
        alg = build(spec, per_gen)
        order = enumerate_group(spec).order
        largest = max(largest, order)
        if not (alg.dim == order == closed_order(spec)):
            failures.append(f"{label}: dim {alg.dim}, |W| {order}")
    ok = not failures and largest == 384
    acceptance(2, "dim A = |W|", ok, f"{len(pairs)} group/relation pairs, largest |W| = {largest}" + ("; " + "; ".join(failures) if failures else ""))
    assert ok, failures


def rank_one_data():
    out = []
    for n in range(1, 13):
        for m in [d for d in range(1, n + 1) if n % d == 0]:
            k = n // m
            for a in range(k + 1):
                out.append(RankOneDatum(orbit=0, n=n, m=m, rtilde=from_roots((1, a), (-1, k - a))))
            # a non-cyclotomic R~ as well: the inflation law does not depend on it
            out.append(RankOneDatum(orbit=0, n=n, m=m, rtilde=tuple([2] + [0] * (k - 1) + [1]) if k > 0 else (1,)))
        out.append(RankOneDatum(orbit=0, n=n, m=n, rtilde=(-1, 1), kind="global"))
    return out


def test_criterion_3_rank_one_inflation(acceptance):
    failures = []
    slowest = 0.0
    data = rank_one_data()
    for d in data:
        t0 = time.perf_counter()
        mat, mp = carousel_matrix(d)
        expected = inflate(d.rtilde, d.m)
        # independent route: sympy minimal polynomial via charpoly and a cyclic vector
        M = sympy.Matrix(mat)
        cp = M.charpoly(z).as_expr()
        Mm = M ** d.m
        acc = sympy.zeros(d.n)
        for k, c in enumerate(d.rtilde):
            acc += c * Mm ** k
        cyclic = sympy.Matrix.hstack(*[M ** j * sympy.eye(d.n)[:, 0] for j in range(d.n)]).rank() == d.n
        sym_ok = cyclic and acc == sympy.zeros(d.n) and sympy.expand(cp - sympy.Poly(list(reversed(expected)), z).as_expr()) == 0
        dt = time.perf_counter() - t0
        slowest = max(slowest, dt)
        if mp != expected or not sym_ok or dt >= 1.0:
            failures.append(f"n={d.n} m={d.m} R~={d.rtilde}")
    ok = not failures
    acceptance(3, "rank-one inflation", ok, f"{len(data)} data with n <= 12, slowest {slowest:.2f}s" + ("; " + "; ".join(failures[:5]) if failures else ""))
    assert ok, failures


def test_criterion_4_cyclotomic(acceptance):
    polys = {}
    for label, spec, per_gen in example_cases():
        alg = build(spec, per_gen)
        for i, p in enumerate(generator_min_polys(alg)):
            polys[f"{label} gen {i}"] = p
    for e in load_catalog():
        for k, p in e.relation_set().polys.items():
            polys[f"{e.id} orbit {k}"] = p
    for d in bundled_data():
        for i, s in enumerate(s_values(d)):
            polys[f"{d.name} node {i}"] = relation_for(s)
    for d in rank_one_data():
        if d.rtilde[0] in (1, -1) and cyclotomic_factorization(d.rtilde) is not None:
            polys[f"inflation n={d.n} m={d.m} {d.rtilde}"] = inflate(d.rtilde, d.m)
    failures = [k for k, p in polys.items() if cyclotomic_factorization(p) is None or not sympy_cyclotomic(p)]
    ok = not failures
    acceptance(4, "relations are cyclotomic", ok, f"{len(polys)} relation polynomials, factored here and by sympy" + ("; " + "; ".join(failures[:5]) if failures else ""))
    assert ok, failures


def test_criterion_5_symmetric_spaces(acceptance):
    t0 = time.perf_counter()
    failures = []
    data = {d.name: d for d in bundled_data()}
    for n in (2, 3, 4):
        d = data[f"sl({n},R)"]
        alg = build_symmetric_space_algebra(d)
        semi, rad = is_semisimple(alg)
        if alg.dim != math.factorial(n) or semi or any(p != DOUBLE for p in generator_min_polys(alg)):
            failures.append(f"sl({n},R): dim {alg.dim}, semisimple {semi}")
    d = data["sl2+sl2 (group case)"]
    alg = build_symmetric_space_algebra(d)
    cmp = compare_algebras(alg, group_algebra(enumerate_group(d.weyl)))
    if not is_semisimple(alg)[0] or any(p != SPLIT for p in generator_min_polys(alg)):
        failures.append("group case: not semisimple with z^2 - 1")
    if not (cmp["invariants_match"] and cmp["verdict"] == "isomorphic"):
        failures.append(f"group case vs C[W]: {cmp['verdict']}")
    checked = 0
    for d in data.values():
        if d.model is None:
            continue
        checked += 1
        if s_values_oracle(model_for(d.model), d.weyl).s != s_values(d):
            failures.append(f"{d.name}: oracle s differs")
    total = time.perf_counter() - t0
    ok = not failures and checked == len(data) and total < 120
    acceptance(5, "symmetric-space recipe", ok, f"sl(n,R) n<=4, group case, oracle on {checked} models, {total:.1f}s" + ("; " + "; ".join(failures) if failures else ""))
    assert ok, failures


def test_criterion_6_tracker(acceptance):
    t0 = time.perf_counter()
    failures = []
    expectations = [(quadric(2), [2]), (normal_crossings(3), [3]), (symmetric_matrices(3), [2, 2, 2])]
    pairs_checked = 0
    for model, sizes in expectations:
        crit = critical_points(model)
        if crit.size != model.group.order or crit.residual > 1e-12:
            failures.append(f"{model.name}: |Z| = {crit.size}")
        # (c) wall loops generate the W action; also at halved step sizes
        perms, perms_fine = [], []
        for k in range(len(model.walls)):
            loop = braid_generator_loop(model, wall=k)
            a = track_loop(model, loop, crit, step_tol=1e-10, match_radius=1e-6)
            b = track_loop(model, loop, crit, step_tol=1e-10, match_radius=1e-6, h0=0.005, h_max=0.01)
            if a.max_residual > 1e-10 or b.max_residual > 1e-10:
                failures.append(f"{model.name}: residual {max(a.max_residual, b.max_residual):.2g}")
            perms.append(a.permutation)
            perms_fine.append(b.permutation)
        if perms != perms_fine:
            failures.append(f"{model.name}: step size changes a wall permutation")
        if permutation_closure(perms) != right_regular_action(model):
            failures.append(f"{model.name}: wall loops do not generate the W action")
        # (b) homomorphism on 10 random loop pairs, each run at two step sizes
        rng = np.random.default_rng(1234)
        for _ in range(10):
            g1, g2 = random_loop(model, rng), random_loop(model, rng)
            runs = []
            for h in ({}, {"h0": 0.005, "h_max": 0.01}):
                p1 = track_loop(model, g1, crit, **h).permutation
                p2 = track_loop(model, g2, crit, **h).permutation
                p12 = track_loop(model, g1 * g2, crit, **h).permutation
                runs.append((p1, p2, p12))
                if p12 != compose(p2, p1):
                    failures.append(f"{model.name}: homomorphism fails")
            if runs[0] != runs[1]:
                failures.append(f"{model.name}: step size changes a random-loop permutation")
            pairs_checked += 1
        # (d) carousel at every wall
        for k in range(len(model.walls)):
            rep = carousel_report(model, wall=k)
            if rep["cluster_sizes"] != sizes or not rep["ok"]:
                failures.append(f"{model.name} wall {k}: clusters {rep['cluster_sizes']}")
    total = time.perf_counter() - t0
    ok = not failures and total < 300
    acceptance(6, "tracker properties", ok, f"3 models, {pairs_checked} random pairs, {total:.1f}s" + ("; " + "; ".join(failures) if failures else ""))
    assert ok, failures


def test_criterion_7_algebra_properties(acceptance):
    failures = []
    triples_entries = bimodule_entries = commutative_checked = opposite_checked = 0
    algebras = []
    for e in load_catalog():
        pres = e.presentation
        algebras.append((e.id, build_quotient_algebra(pres, e.relation_set(), dim_cap=1000), e))
    for label, alg, e in algebras:
        if alg.dim <= TABLE_LIMIT:
            res = check_associativity(alg, triples_limit=TABLE_LIMIT)
            triples_entries += 1
            if res["method"] != "all-triples" or not res["passed"]:
                failures.append(f"{label}: associativity")
        else:
            res = check_associativity(alg)
            bimodule_entries += 1
            if not res["passed"]:
                failures.append(f"{label}: associativity (bimodule)")
        if alg.is_commutative():
            # commuting generators: a tensor product of C[z]/(R), reduced iff every R is
            commutative_checked += 1
            if is_semisimple(alg)[0] != all(squarefree(r) for r in e.relation_set().polys.values()):
                failures.append(f"{label}: semisimplicity verdict")
        if alg.dim <= TABLE_LIMIT:
            op = opposite_algebra(alg)
            opop = opposite_algebra(op)
            opposite_checked += 1
            if op.dim != alg.dim or is_semisimple(op)[1] != is_semisimple(alg)[1]:
                failures.append(f"{label}: opposite changes dim or radical")
            if opop.table() != alg.table():
                failures.append(f"{label}: opposite is not an involution")
    ok = not failures
    acceptance(
        7,
        "algebra property suite",
        ok,
        f"all-triples on {triples_entries} entries, bimodule on {bimodule_entries} (dim > {TABLE_LIMIT}), "
        f"{commutative_checked} commutative verdicts, {opposite_checked} opposite checks"
        + ("; " + "; ".join(failures) if failures else ""),
    )
    assert ok, failures
