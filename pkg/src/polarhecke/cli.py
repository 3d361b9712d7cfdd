"""Command-line interface: ``polarhecke <command> INPUT [options]``.

INPUT is a JSON file, literal JSON text, or a report written earlier by this
tool (its echoed input and options are reused).  Exit codes: 0 all checks
pass, 1 mathematical mismatch, 2 input error, 3 resource cap.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import report as rep
from .report import EXIT_CAP, EXIT_INPUT, EXIT_MISMATCH, EXIT_OK


class InputError(ValueError):
    pass


class CapError(RuntimeError):
    pass


# -- input handling ------------------------------------------------------------


def _load(text_or_path: str):
    if text_or_path == "-":
        text, where = sys.stdin.read(), "<stdin>"
    elif text_or_path.lstrip().startswith(("{", "[")):
        text, where = text_or_path, "<inline>"
    else:
        path = Path(text_or_path)
        if not path.is_file():
            raise InputError(f"no such input file: {text_or_path}")
        text, where = path.read_text(), str(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{where}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _check(checks: list, name: str, expected, computed, passed=None) -> None:
    ok = (expected == computed) if passed is None else passed
    checks.append({"check": name, "expected": expected, "computed": computed, "pass": bool(ok)})


# -- commands ----------------------------------------------------------------------


def cmd_group(payload, opts) -> tuple:
    from .groups import (
        ReflectionGroupSpec,
        enumerate_group,
        hyperplane_stabilizer_orders,
        invariant_degrees,
        rank_of_action,
    )

    spec = ReflectionGroupSpec.from_dict(payload.get("group", payload))
    grp = enumerate_group(spec, order_cap=opts["order_cap"])
    refl = grp.reflections
    degrees = invariant_degrees(grp)
    stab = hyperplane_stabilizer_orders(grp)
    results = {
        "group": spec.to_dict(),
        "label": spec.label,
        "order": grp.order,
        "dim": grp.dim,
        "rank": rank_of_action(grp),
        "reflections": len(refl),
        "primitive_reflections": sum(1 for r in refl if r.primitive),
        "hyperplane_orbits": {str(k): v for k, v in sorted(stab.items())},
        "generator_orbits": grp.generator_orbits(),
        "degrees": degrees,
    }
    checks: list = []
    prod = 1
    for d in degrees:
        prod *= d
    _check(checks, "product of degrees = |W|", grp.order, prod)
    _check(checks, "sum (d_i - 1) = #reflections", len(refl), sum(d - 1 for d in degrees))
    exp = payload.get("expected", {}) if "group" in payload else {}
    if "order" in exp:
        _check(checks, "order", exp["order"], grp.order)
    if "degrees" in exp:
        _check(checks, "degrees", sorted(exp["degrees"]), degrees)
    return results, checks


def _presentation(payload, spec):
    from .braid import BraidPresentation, presentation_for

    if "presentation" in payload:
        return BraidPresentation.from_dict(payload["presentation"])
    return presentation_for(spec)


def cmd_algebra(payload, opts) -> tuple:
    from .algebra import (
        TABLE_LIMIT,
        build_quotient_algebra,
        center_dim,
        check_associativity,
        generator_min_polys,
        is_semisimple,
    )
    from .braid import RelationSet
    from .groups import ReflectionGroupSpec, enumerate_group
    from .poly import as_int_tuple, cyclotomic_factorization, pformat

    if "group" not in payload:
        raise InputError("algebra input needs a 'group' spec")
    spec = ReflectionGroupSpec.from_dict(payload["group"])
    pres = _presentation(payload, spec)
    rels = RelationSet.from_dict(payload.get("relations", payload), pres)
    alg = build_quotient_algebra(pres, rels, dim_cap=opts["dim_cap"])
    grp = enumerate_group(spec)
    results: dict = {"dim": alg.dim, "group_order": grp.order, "generators": list(pres.generators)}
    checks: list = []
    _check(checks, "dim A = |W|", grp.order, alg.dim)
    mins = [as_int_tuple(p) for p in generator_min_polys(alg)]
    if opts["min_polys"] or "expected" in payload:
        results["min_polys"] = {g: list(p) for g, p in zip(pres.generators, mins)}
        results["min_polys_text"] = {g: pformat(p) for g, p in zip(pres.generators, mins)}
    for g, p in zip(pres.generators, mins):
        _check(checks, f"R({g}) is a product of cyclotomic polynomials", True, cyclotomic_factorization(p) is not None)
    if opts["semisimple"]:
        if alg.dim > TABLE_LIMIT:
            results["semisimple"] = None
            results["semisimple_note"] = f"trace form skipped above dimension {TABLE_LIMIT}"
        else:
            ss, rad = is_semisimple(alg)
            results["semisimple"] = ss
            results["radical_dim"] = rad
    if opts["center"]:
        results["center_dim"] = center_dim(alg)
    if opts["associativity"]:
        a = check_associativity(alg)
        results["associativity"] = a
        _check(checks, f"associativity ({a['method']})", True, a["passed"])
    exp = payload.get("expected", {})
    if "dim" in exp:
        _check(checks, "expected dim", exp["dim"], alg.dim)
    if "min_polys" in exp:
        from .catalog import _expand

        for g, p in zip(pres.generators, mins):
            if g in exp["min_polys"]:
                _check(checks, f"expected min poly of {g}", list(_expand(exp["min_polys"][g])), list(p))
    if "semisimple" in exp and results.get("semisimple") is not None:
        _check(checks, "expected semisimple", exp["semisimple"], results["semisimple"])
    return results, checks


def cmd_rankone(payload, opts) -> tuple:
    from .rankone import RankOneDatum, carousel_matrix, inflate_relation, roots_of_unity_check

    items = payload.get("data", payload) if isinstance(payload, dict) else payload
    if isinstance(items, dict):
        items = [items]
    results, checks = [], []
    for d in items:
        datum = RankOneDatum.from_dict(d)
        _, mp = carousel_matrix(datum)
        R = inflate_relation(datum)
        roots_ok, orders = roots_of_unity_check(R)
        results.append({"datum": datum.to_dict(), "R": list(R), "carousel_min_poly": list(mp), "root_orders": orders})
        _check(checks, f"carousel min poly = R~(z^m) for n={datum.n}, m={datum.m}", list(R), list(mp))
        _check(checks, f"roots of R are roots of unity (n={datum.n}, m={datum.m})", True, roots_ok)
    return results, checks


def cmd_symspace(payload, opts) -> tuple:
    from .algebra import TABLE_LIMIT, generator_min_polys, is_semisimple
    from .poly import as_int_tuple
    from .symspace import (
        GROUP_ALGEBRA,
        RestrictedRootDatum,
        build_symmetric_space_algebra,
        bundled_data,
        classify_hybrid,
        model_for,
        relation_for,
        s_values,
        s_values_oracle,
        twisted_holonomy,
    )

    if payload == "bundled" or (isinstance(payload, dict) and payload.get("bundled")):
        data = bundled_data()
    else:
        items = payload if isinstance(payload, list) else [payload]
        data = [RestrictedRootDatum.from_dict(d) for d in items]
    results, checks = [], []
    for datum in data:
        s = s_values(datum)
        cls_ = classify_hybrid(datum)
        alg = build_symmetric_space_algebra(datum, dim_cap=opts["dim_cap"])
        from .groups import enumerate_group

        order = enumerate_group(datum.weyl).order
        mins = [list(as_int_tuple(p)) for p in generator_min_polys(alg)]
        rec = {"name": datum.name, "s": s, "class": cls_, "dim": alg.dim, "min_polys": mins}
        _check(checks, f"{datum.name}: dim = |W|", order, alg.dim)
        _check(checks, f"{datum.name}: min polys", [list(relation_for(x)) for x in s], mins)
        if datum.expected_class:
            _check(checks, f"{datum.name}: class", datum.expected_class, cls_)
        if alg.dim <= TABLE_LIMIT:
            ss, rad = is_semisimple(alg)
            rec["semisimple"] = ss
            rec["radical_dim"] = rad
            _check(checks, f"{datum.name}: semisimple iff all s even", cls_ == GROUP_ALGEBRA, ss)
        if datum.model is not None and not opts["no_oracle"]:
            res = s_values_oracle(model_for(datum.model), datum.weyl)
            rec["oracle_s"] = list(res.s)
            _check(checks, f"{datum.name}: s = oracle", s, list(res.s))
        tw = twisted_holonomy(alg, datum)
        rec["twist_signs"] = tw["signs"]
        _check(checks, f"{datum.name}: twisted braid relations", True, tw["braid_relations_hold"])
        results.append(rec)
    return results, checks


TRACK_OPTIONS = ("newton_tol", "step_tol", "match_radius", "gap_ratio", "h0", "h_max", "max_steps")


def cmd_track(payload, opts) -> tuple:
    import numpy as np

    from .monodromy.model import PolarModel
    from .monodromy.tracker import (
        DEFAULTS,
        LoopSpec,
        braid_generator_loop,
        carousel_report,
        compose,
        critical_points,
        expected_wall_permutation,
        full_turn_loop,
        identity_loop,
        permutation_closure,
        random_loop,
        right_regular_action,
        track_loop,
    )

    model = PolarModel.from_dict(payload.get("model", payload))
    if not model.stable:
        raise InputError("nonstable models are outside the tracker's scope")
    info = model.validate()
    saved = dict(DEFAULTS)
    for k in TRACK_OPTIONS:
        if opts.get(k) is not None:
            DEFAULTS[k] = opts[k]
    try:
        kw = {"backend": opts["backend"]}
        tk = {k: DEFAULTS[k] for k in ("step_tol", "match_radius", "h0", "h_max", "max_steps")}
        crit = critical_points(model, backend=opts["backend"])
        grp = model.group
        results: dict = {"model": model.name, "check": info, "critical_set": crit.to_dict(), "loops": {}}
        checks: list = []
        _check(checks, "|Z| = |W|", grp.order, crit.size)
        loops = opts["loop"] or ["all"]
        want = set(loops)
        if "all" in want:
            want = {"identity", "walls", "carousel", "random"} | ({"full-turn"} if model.rank == 1 else set())

        def run(name, loop):
            res = track_loop(model, loop, crit, **kw, **tk)
            results["loops"][name] = res.to_dict()
            return res.permutation

        if "identity" in want:
            _check(checks, "identity loop", list(range(crit.size)), run("identity", identity_loop(model)))
        if "full-turn" in want:
            p = run("full-turn", full_turn_loop(model))
            _check(checks, "full turn acts by an element of W", True, tuple(p) in right_regular_action(model))
        if "walls" in want or "random" in want:
            perms = []
            for k in range(len(model.walls)):
                p = run(f"wall-{k}", braid_generator_loop(model, wall=k))
                perms.append(p)
                _check(checks, f"wall {k}: permutation w -> w sigma", expected_wall_permutation(model, k), p)
            if perms:
                _check(checks, "wall loops generate the W action", True, permutation_closure(perms) == right_regular_action(model))
        for k, d in enumerate(payload.get("loops", []) if isinstance(payload, dict) else []):
            run(f"custom-{k}", LoopSpec.from_dict(d))
        if "random" in want and model.walls:
            rng = np.random.default_rng(opts["seed"])
            bad = 0
            for _ in range(opts["random_pairs"]):
                g1, g2 = random_loop(model, rng), random_loop(model, rng)
                p1 = track_loop(model, g1, crit, **kw, **tk).permutation
                p2 = track_loop(model, g2, crit, **kw, **tk).permutation
                p12 = track_loop(model, g1 * g2, crit, **kw, **tk).permutation
                bad += p12 != compose(p2, p1)
            results["homomorphism_pairs"] = opts["random_pairs"]
            _check(checks, "perm(g1 * g2) = perm(g2) o perm(g1)", 0, bad)
        if "carousel" in want:
            table = []
            for k in range(len(model.walls)):
                r = carousel_report(model, k, backend=opts["backend"], gap_ratio=DEFAULTS["gap_ratio"], **tk)
                table.append(r)
                _check(checks, f"carousel at wall {k}", [r["n_sigma"]] * r["expected_clusters"], r["cluster_sizes"], r["ok"])
            results["carousel"] = table
        steps = [s for v in results["loops"].values() for s in v["steps"]]
        results["residuals"] = {
            "max_step_residual": max((v["max_residual"] for v in results["loops"].values()), default=0.0),
            "min_abs_det": min((v["min_abs_det"] for v in results["loops"].values()), default=None),
            "total_steps": sum(steps),
        }
    finally:
        DEFAULTS.clear()
        DEFAULTS.update(saved)
    return results, checks


def cmd_catalog(payload, opts) -> tuple:
    from .catalog import run_all

    summary = run_all(opts["filter"], track=not opts["no_track"])
    checks = [
        {"check": e["id"], "expected": True, "computed": e["pass"], "pass": e["pass"]} for e in summary["entries"]
    ]
    for e in summary["entries"]:
        e.pop("timings", None)
    summary.pop("seconds", None)
    return summary, checks


COMMANDS = {
    "group": cmd_group,
    "algebra": cmd_algebra,
    "rankone": cmd_rankone,
    "symspace": cmd_symspace,
    "track": cmd_track,
    "catalog": cmd_catalog,
}


# -- argument parsing --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    from .monodromy.tracker import DEFAULTS

    p = argparse.ArgumentParser(prog="polarhecke", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"polarhecke {rep.__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, needs_input=True):
        if needs_input:
            sp.add_argument("input", help="JSON file, literal JSON, '-' for stdin, or an earlier report")
        sp.add_argument("--out", help="write the report here instead of stdout")
        return sp

    g = common(sub.add_parser("group", help="enumerate a reflection group, reflections and degrees"))
    g.add_argument("--order-cap", type=int, default=20000)

    a = common(sub.add_parser("algebra", help="build the quotient algebra of a braid group"))
    a.add_argument("--dim-cap", type=int, default=1000)
    a.add_argument("--min-polys", action="store_true", help="report generator minimal polynomials")
    a.add_argument("--semisimple", action="store_true", help="trace-form semisimplicity test")
    a.add_argument("--center", action="store_true", help="report the dimension of the center")
    a.add_argument("--associativity", action="store_true", help="exact associativity check")

    common(sub.add_parser("rankone", help="carousel matrix check for rank-one data"))

    s = common(sub.add_parser("symspace", help="symmetric-space recipe ('bundled' runs the shipped data)"))
    s.add_argument("--dim-cap", type=int, default=1000)
    s.add_argument("--no-oracle", action="store_true", help="skip the Lie-algebra recomputation of s")

    t = common(sub.add_parser("track", help="track loops on a polar model"))
    t.add_argument(
        "--loop",
        action="append",
        choices=["all", "identity", "full-turn", "walls", "carousel", "random"],
        help="loops to run (repeatable, default all)",
    )
    t.add_argument("--backend", choices=["cython", "python"], default=None)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--random-pairs", type=int, default=10)
    for k in TRACK_OPTIONS:
        typ = int if k == "max_steps" else float
        t.add_argument("--" + k.replace("_", "-"), type=typ, default=DEFAULTS[k])

    c = common(sub.add_parser("catalog", help="run the bundled examples"), needs_input=False)
    c.add_argument("--filter", default=None, help="example number (e.g. 3.1), id prefix or tag")
    c.add_argument("--no-track", action="store_true", help="skip tracker checks")
    return p


_NON_OPTIONS = {"command", "input", "out"}


def _caps():
    from .algebra import DimensionCapExceeded
    from .cyclotomic import ConductorLimitError
    from .groups import GroupOrderExceeded

    return (DimensionCapExceeded, GroupOrderExceeded, ConductorLimitError, CapError)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    command = args.command
    opts = {k: v for k, v in vars(args).items() if k not in _NON_OPTIONS}
    payload = None
    results, checks, message = None, [], ""
    t0 = time.perf_counter()
    try:
        if command != "catalog":
            if args.input.strip() == "bundled":
                payload = "bundled"
            else:
                payload = _load(args.input)
            if rep.is_report(payload):
                if payload["command"]["name"] != command:
                    raise InputError(f"report was produced by '{payload['command']['name']}', not '{command}'")
                opts.update(payload["command"]["options"])
                payload = payload["input"]
        results, checks = COMMANDS[command](payload, opts)
        code = EXIT_OK if all(c["pass"] for c in checks) else EXIT_MISMATCH
        if code:
            message = "failed: " + ", ".join(c["check"] for c in checks if not c["pass"])
    except _caps() as exc:
        code, message = EXIT_CAP, f"resource cap: {exc}"
    except Exception as exc:
        from .monodromy.tracker import TrackingError

        if isinstance(exc, TrackingError):
            code = EXIT_CAP if exc.kind == "step_cap" else EXIT_MISMATCH
            message = f"tracking failed ({exc.kind}): {exc}"
        elif isinstance(exc, (InputError, ValueError, KeyError, TypeError)):
            code, message = EXIT_INPUT, f"input error: {exc}"
        else:
            raise
    timings = {"seconds": time.perf_counter() - t0}
    report = rep.make_report(command, opts, payload, results, checks, timings, code, message)
    text = rep.dumps(report)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if message:
        print(f"polarhecke {command}: {message}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
