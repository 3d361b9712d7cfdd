"""Explicit polar models: invariants f on V, a Cartan subspace c and W on c.

Polynomials are sparse dicts ``{exponent tuple: CycNum}``.  Everything that
defines a model is exact; only the tracker works in floating point, on the
restriction F = f|_c written in coordinates a of c (v = sum a_k c_k).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..cyclotomic import CycNum
from ..groups import ReflectionGroup, ReflectionGroupSpec, enumerate_group

__all__ = [
    "ModelError",
    "PolarModel",
    "Wall",
    "restrict_to_cartan",
    "quadric",
    "normal_crossings",
    "symmetric_matrices",
    "determinant",
    "symmetric_determinant",
    "builtin_model",
    "BUILTIN_MODELS",
]

ZERO = CycNum(0)
ONE = CycNum(1)


class ModelError(ValueError):
    """Ill-formed or inconsistent polar model."""


# -- sparse polynomials ------------------------------------------------------


def _padd(p: dict, q: dict) -> dict:
    out = dict(p)
    for e, c in q.items():
        s = out.get(e, ZERO) + c
        if s:
            out[e] = s
        else:
            out.pop(e, None)
    return out


def _pmul(p: dict, q: dict) -> dict:
    out: dict = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            s = out.get(e, ZERO) + c1 * c2
            if s:
                out[e] = s
            else:
                out.pop(e, None)
    return out


def _linear(coeffs, nvars: int) -> dict:
    out = {}
    for k, c in enumerate(coeffs):
        if c:
            e = [0] * nvars
            e[k] = 1
            out[tuple(e)] = c
    return out


def _substitute(poly: dict, forms: list[dict], nvars: int) -> dict:
    """poly(x) with x_i replaced by the polynomial forms[i]."""
    out: dict = {}
    cache: dict = {}
    one = {(0,) * nvars: ONE}
    for exps, coef in poly.items():
        term = {(0,) * nvars: coef}
        for i, e in enumerate(exps):
            if e == 0:
                continue
            key = (i, e)
            if key not in cache:
                pw = one
                for _ in range(e):
                    pw = _pmul(pw, forms[i])
                cache[key] = pw
            term = _pmul(term, cache[key])
        out = _padd(out, term)
    return out


def _as_cyc(x) -> CycNum:
    if isinstance(x, CycNum):
        return x
    if isinstance(x, float):
        raise ModelError(f"floating-point coefficient {x!r}; use exact values")
    if isinstance(x, str):
        return CycNum.parse(x)
    return CycNum(x)


def restrict_to_cartan(poly: dict, basis: list[list[CycNum]]) -> dict:
    """f(sum_k a_k c_k) as a polynomial in the coordinates a."""
    r = len(basis)
    d = len(basis[0])
    forms = [_linear([basis[k][i] for k in range(r)], r) for i in range(d)]
    return _substitute(poly, forms, r)


# -- model -------------------------------------------------------------------


@dataclass(frozen=True)
class Wall:
    """A wall c_sigma: the generator sigma of W fixing it and a point v1 on it."""

    orbit: int
    generator: int
    v1: tuple


@dataclass
class PolarModel:
    name: str
    d: int
    invariants: list  # list of sparse dicts over V
    cartan_basis: list  # r vectors in V
    weyl: ReflectionGroupSpec
    l: tuple  # coefficient vector of the functional on V
    basepoint: tuple  # v0 in c coordinates
    walls: list = field(default_factory=list)
    stable: bool = True
    _group: ReflectionGroup | None = field(default=None, repr=False)
    _restricted: list | None = field(default=None, repr=False)

    def __post_init__(self):
        self.invariants = [{tuple(e): _as_cyc(c) for e, c in p.items() if _as_cyc(c)} for p in self.invariants]
        self.cartan_basis = [[_as_cyc(x) for x in v] for v in self.cartan_basis]
        self.l = tuple(_as_cyc(x) for x in self.l)
        self.basepoint = tuple(_as_cyc(x) for x in self.basepoint)
        self.walls = [w if isinstance(w, Wall) else Wall(int(w["orbit"]), int(w["generator"]), tuple(_as_cyc(x) for x in w["v1"])) for w in self.walls]
        r = self.rank
        if any(len(v) != self.d for v in self.cartan_basis):
            raise ModelError("Cartan basis vectors must have length d")
        if len(self.invariants) != r:
            raise ModelError(f"{len(self.invariants)} invariants for a Cartan subspace of dimension {r}")
        for p in self.invariants:
            if any(len(e) != self.d for e in p):
                raise ModelError("invariant exponent vectors must have length d")
        if len(self.l) != self.d:
            raise ModelError("l must have d coefficients")
        if len(self.basepoint) != r:
            raise ModelError("basepoint must be given in Cartan coordinates")
        gens = self.weyl.generator_matrices()
        if any(len(g) != r for g in gens):
            raise ModelError("Weyl generators must act on c")
        for w in self.walls:
            if not 0 <= w.generator < len(gens) or len(w.v1) != r:
                raise ModelError(f"bad wall {w}")

    @property
    def rank(self) -> int:
        return len(self.cartan_basis)

    @property
    def group(self) -> ReflectionGroup:
        if self._group is None:
            self._group = enumerate_group(self.weyl)
        return self._group

    @property
    def restricted(self) -> list[dict]:
        """F_i = f_i restricted to c, in Cartan coordinates."""
        if self._restricted is None:
            self._restricted = [restrict_to_cartan(p, self.cartan_basis) for p in self.invariants]
        return self._restricted

    # -- exact checks

    def check_invariance(self) -> bool:
        """Exact test that every F_i is fixed by every generator of W."""
        r = self.rank
        for g in self.weyl.generator_matrices():
            forms = [_linear(list(g[k]), r) for k in range(r)]
            for p in self.restricted:
                if _substitute(p, forms, r) != p:
                    return False
        return True

    def l_on_cartan(self) -> list[CycNum]:
        """Coefficients of l restricted to c."""
        return [sum((self.l[i] * v[i] for i in range(self.d)), ZERO) for v in self.cartan_basis]

    # -- numerics

    def packed_system(self):
        """(coef, exps, eq_start) arrays for the tracking kernel."""
        coef, exps, start = [], [], [0]
        for p in self.restricted:
            for e, c in sorted(p.items()):
                coef.append(complex(c))
                exps.append(e)
            start.append(len(coef))
        return (
            np.array(coef, dtype=complex),
            np.array(exps, dtype=np.int64).reshape(len(coef), self.rank),
            np.array(start, dtype=np.int64),
        )

    def evaluate(self, a):
        from ._tracker_py import eval_system

        return eval_system(*self.packed_system(), np.asarray(a, dtype=complex))

    def basepoint_numeric(self) -> np.ndarray:
        return np.array([complex(x) for x in self.basepoint])

    def jacobian_condition(self) -> float:
        _, jac = self.evaluate(self.basepoint_numeric())
        if abs(np.linalg.det(jac)) == 0:
            return math.inf
        return float(np.linalg.cond(jac))

    def validate(self) -> dict:
        """Run the model checks; raises ModelError on failure."""
        if not self.check_invariance():
            raise ModelError(f"{self.name}: invariants are not W-invariant on c")
        cond = self.jacobian_condition()
        if not math.isfinite(cond) or cond > 1e10:
            raise ModelError(f"{self.name}: Jacobian singular at the basepoint (cond {cond:.3g})")
        return {"w_invariant": True, "jacobian_condition": cond}

    # -- io

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "d": self.d,
            "invariants": [
                [{"coef": str(c), "exps": list(e)} for e, c in sorted(p.items())] for p in self.invariants
            ],
            "cartan_basis": [[str(x) for x in v] for v in self.cartan_basis],
            "weyl": self.weyl.to_dict(),
            "l": [str(x) for x in self.l],
            "basepoint_v0": [str(x) for x in self.basepoint],
            "walls": [
                {"orbit": w.orbit, "generator": w.generator, "v1": [str(x) for x in w.v1]} for w in self.walls
            ],
            "stable": self.stable,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PolarModel":
        if "builtin" in d:
            return builtin_model(d["builtin"], **{k: v for k, v in d.items() if k != "builtin"})
        try:
            invariants = [{tuple(t["exps"]): t["coef"] for t in p} for p in d["invariants"]]
            return cls(
                name=d.get("name", "model"),
                d=int(d["d"]),
                invariants=invariants,
                cartan_basis=d["cartan_basis"],
                weyl=ReflectionGroupSpec.from_dict(d["weyl"]),
                l=d["l"],
                basepoint=d["basepoint_v0"],
                walls=d.get("walls", []),
                stable=bool(d.get("stable", True)),
            )
        except KeyError as exc:
            raise ModelError(f"model file missing field {exc}") from None


# -- builders ----------------------------------------------------------------


def _unit(d: int, i: int) -> list[int]:
    v = [0] * d
    v[i] = 1
    return v


def quadric(n: int = 2) -> PolarModel:
    """f = x_1^2 + ... + x_n^2 under SO_n, c = span(e_1), W = Z/2."""
    if n < 1:
        raise ModelError("quadric needs n >= 1")
    f = {tuple(2 * x for x in _unit(n, i)): 1 for i in range(n)}
    return PolarModel(
        name=f"quadric(n={n})",
        d=n,
        invariants=[f],
        cartan_basis=[_unit(n, 0)],
        weyl=ReflectionGroupSpec.cyclic(2),
        l=_unit(n, 0),
        basepoint=[1],
        walls=[{"orbit": 0, "generator": 0, "v1": [0]}],
    )


def normal_crossings(n: int = 3) -> PolarModel:
    """f = x_1 ... x_n under the diagonal torus, c = C(1, ..., 1), W = Z/n."""
    if n < 1:
        raise ModelError("normal crossings needs n >= 1")
    return PolarModel(
        name=f"normal_crossings(n={n})",
        d=n,
        invariants=[{(1,) * n: 1}],
        cartan_basis=[[1] * n],
        weyl=ReflectionGroupSpec.cyclic(n),
        l=_unit(n, 0),
        basepoint=[1],
        walls=[{"orbit": 0, "generator": 0, "v1": [0]}],
    )


def _sym_index(n: int) -> dict:
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    return {p: k for k, p in enumerate(pairs)}


def _principal_minor_sum(n: int, k: int, idx: dict) -> dict:
    """Sum of the k x k principal minors of the generic symmetric matrix."""
    d = len(idx)
    out: dict = {}

    def entry(i, j):
        return {tuple(_unit(d, idx[(min(i, j), max(i, j))])): ONE}

    for rows in itertools.combinations(range(n), k):
        for perm in itertools.permutations(range(k)):
            inv = sum(1 for a in range(k) for b in range(a + 1, k) if perm[a] > perm[b])
            term = {(0,) * d: CycNum(-1 if inv % 2 else 1)}
            for a in range(k):
                term = _pmul(term, entry(rows[a], rows[perm[a]]))
            out = _padd(out, term)
    return out


def symmetric_matrices(n: int = 3) -> PolarModel:
    """Symmetric n x n matrices under SO_n; f = characteristic-polynomial coefficients.

    c is the diagonal, W = Sigma_n by coordinate permutations.  The basepoint
    lies in the chamber x_1 > ... > x_n and the walls are its facets.
    """
    if n < 2:
        raise ModelError("symmetric matrices need n >= 2")
    idx = _sym_index(n)
    d = len(idx)
    invariants = [_principal_minor_sum(n, k, idx) for k in range(1, n + 1)]
    basis = [_unit(d, idx[(i, i)]) for i in range(n)]
    gens = []
    for k in range(n - 1):
        m = [[int(i == j) for j in range(n)] for i in range(n)]
        m[k][k] = m[k + 1][k + 1] = 0
        m[k][k + 1] = m[k + 1][k] = 1
        gens.append(m)
    v0 = [Fraction(n - 1 - 2 * i, n - 1) for i in range(n)]
    walls = []
    for k in range(n - 1):
        v1 = list(v0)
        v1[k] = v1[k + 1] = (v0[k] + v0[k + 1]) / 2
        walls.append({"orbit": 0, "generator": k, "v1": v1})
    lvec = [0] * d
    for i in range(n):
        lvec[idx[(i, i)]] = 2 ** (i + 1) - 1
    return PolarModel(
        name=f"symmetric_matrices(n={n})",
        d=d,
        invariants=invariants,
        cartan_basis=basis,
        weyl=ReflectionGroupSpec.explicit(gens),
        l=lvec,
        basepoint=v0,
        walls=walls,
    )


def _scalar_line_model(name: str, n: int, d: int, det: dict, diag: list[int]) -> PolarModel:
    ident = [0] * d
    for k in diag:
        ident[k] = 1
    return PolarModel(
        name=name,
        d=d,
        invariants=[det],
        cartan_basis=[ident],
        weyl=ReflectionGroupSpec.cyclic(n),
        l=_unit(d, diag[0]),
        basepoint=[1],
        walls=[{"orbit": 0, "generator": 0, "v1": [0]}],
    )


def determinant(n: int = 2) -> PolarModel:
    """det on n x n matrices under SL_n (left multiplication), c = scalars, W = Z/n."""
    if n < 1:
        raise ModelError("determinant needs n >= 1")
    d = n * n
    det: dict = {}
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
        e = [0] * d
        for i in range(n):
            e[i * n + perm[i]] += 1
        det = _padd(det, {tuple(e): CycNum(-1 if inv % 2 else 1)})
    return _scalar_line_model(f"determinant(n={n})", n, d, det, [i * n + i for i in range(n)])


def symmetric_determinant(n: int = 2) -> PolarModel:
    """det on symmetric n x n matrices under SL_n (x -> g x g^t), c = scalars, W = Z/n."""
    if n < 1:
        raise ModelError("symmetric determinant needs n >= 1")
    idx = _sym_index(n)
    det = _principal_minor_sum(n, n, idx)
    return _scalar_line_model(f"symmetric_determinant(n={n})", n, len(idx), det, [idx[(i, i)] for i in range(n)])


BUILTIN_MODELS = {
    "quadric": quadric,
    "normal_crossings": normal_crossings,
    "determinant": determinant,
    "symmetric_determinant": symmetric_determinant,
    "symmetric_matrices": symmetric_matrices,
}


def builtin_model(name: str, **params) -> PolarModel:
    try:
        builder = BUILTIN_MODELS[name]
    except KeyError:
        raise ModelError(f"unknown builtin model {name!r}; choose from {sorted(BUILTIN_MODELS)}") from None
    return builder(**{k: int(v) for k, v in params.items()})
