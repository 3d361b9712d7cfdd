"""Symmetric spaces: s(i), the sign recipe, and an exact Lie-theoretic oracle.

A :class:`RestrictedRootDatum` carries the small Weyl group and, per simple
reflection, the multiplicities m(alpha_i) and m(2 alpha_i); the number
s(i) = m(alpha_i) + m(2 alpha_i) fixes the relation
(z - 1)(z + (-1)^s(i)) of the i-th braid generator.

An :class:`InvolutionModel` is an explicit Lie algebra (structure constants
over Q) with an involution theta and a Cartan subspace c of the (-1)
eigenspace.  ``s_values_oracle`` computes s(i) directly as
dim z_{g+}(wall_i) - dim z_{g+}(c), finding the walls from the restricted
roots (joint eigenspaces of ad(c)).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from . import linalg
from .algebra import FinDimAlgebra, build_quotient_algebra, generator_min_polys
from .braid import RelationSet, presentation_for
from .groups import ReflectionGroupSpec, coxeter_matrix
from .poly import pmul

__all__ = [
    "RestrictedRootDatum",
    "InvolutionModel",
    "ModelError",
    "s_values",
    "s_values_oracle",
    "restricted_roots",
    "relation_for",
    "build_symmetric_space_algebra",
    "rho_twist",
    "twisted_holonomy",
    "classify_hybrid",
    "bundled_data",
    "model_for",
    "sl_real_model",
    "su_model",
    "so_model",
    "group_case_model",
]

GROUP_ALGEBRA = "GroupAlgebra"
HECKE_MINUS_ONE = "HeckeMinusOne"
HYBRID = "Hybrid"


class ModelError(ValueError):
    """An involution model violates its invariants."""


# -- data ------------------------------------------------------------------


@dataclass(frozen=True)
class RestrictedRootDatum:
    name: str
    weyl: ReflectionGroupSpec
    nodes: tuple[tuple[int, int], ...]  # (m_alpha, m_2alpha) per simple reflection
    model: dict | None = None
    expected_class: str | None = None

    def __post_init__(self):
        if not self.weyl.is_coxeter:
            raise ValueError("restricted Weyl groups are Coxeter groups")
        if len(self.nodes) != self.weyl.rank:
            raise ValueError(f"{self.name}: {len(self.nodes)} nodes for rank {self.weyl.rank}")
        for ma, m2a in self.nodes:
            if ma < 0 or m2a < 0 or ma + m2a < 1:
                raise ValueError(f"{self.name}: bad multiplicities ({ma}, {m2a})")
        pres = presentation_for(self.weyl)
        s = s_values(self)
        for i, o in enumerate(pres.orbits()):
            if s[i] != s[o]:
                raise ValueError(f"{self.name}: s differs on conjugate simple reflections {o} and {i}")

    @property
    def rank(self) -> int:
        return self.weyl.rank

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "weyl": self.weyl.to_dict(),
            "nodes": [{"m_alpha": a, "m_2alpha": b} for a, b in self.nodes],
        }
        if self.model is not None:
            d["model"] = self.model
        if self.expected_class is not None:
            d["expected_class"] = self.expected_class
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RestrictedRootDatum":
        try:
            nodes = tuple((int(n["m_alpha"]), int(n.get("m_2alpha", 0))) for n in d["nodes"])
            return cls(
                name=str(d["name"]),
                weyl=ReflectionGroupSpec.from_dict(d["weyl"]),
                nodes=nodes,
                model=d.get("model"),
                expected_class=d.get("expected_class"),
            )
        except KeyError as exc:
            raise ValueError(f"restricted root datum is missing {exc}") from None


def s_values(datum: RestrictedRootDatum) -> list[int]:
    return [a + b for a, b in datum.nodes]


def relation_for(s: int) -> tuple[int, ...]:
    """(z - 1)(z + (-1)^s), constant term first."""
    return pmul((-1, 1), ((-1) ** s, 1))


def classify_hybrid(datum: RestrictedRootDatum) -> str:
    parities = {s % 2 for s in s_values(datum)}
    if parities == {0}:
        return GROUP_ALGEBRA
    if parities == {1}:
        return HECKE_MINUS_ONE
    return HYBRID


def build_symmetric_space_algebra(datum: RestrictedRootDatum, dim_cap: int = 1000) -> FinDimAlgebra:
    pres = presentation_for(datum.weyl)
    rels = RelationSet.from_generator_polys(pres, [relation_for(s) for s in s_values(datum)])
    alg = build_quotient_algebra(pres, rels, dim_cap=dim_cap)
    alg.metadata["datum"] = datum.name
    return alg


def rho_twist(datum: RestrictedRootDatum) -> list[int]:
    """Signs (-1)^(s(i) - 1) of the twist sigma_i -> +-sigma_i."""
    return [(-1) ** (s - 1) for s in s_values(datum)]


def twisted_holonomy(alg: FinDimAlgebra, datum: RestrictedRootDatum) -> dict:
    """Apply the twist to the generators of the opposite algebra and check them.

    In A^op the generators act by right multiplication; scaled by the twist
    signs they must still satisfy every braid relation, and each satisfies
    the same quadratic relation as the untwisted generator.
    """
    from .linalg import krylov_min_poly, vadd

    signs = rho_twist(datum)
    pres = presentation_for(datum.weyl)
    right = [alg.right_columns(g) for g in range(alg.ngens)]

    def op(g, v):
        out: dict = {}
        for j, c in v.items():
            vadd(out, right[g][j], c * signs[g])
        return out

    def word(w, v):
        # in A^op the word u = a b ... acts as R_a after R_b after ...
        for x in reversed(w):
            v = op(x, v)
        return v

    braid_ok = all(
        word(u, {j: Fraction(1)}) == word(v, {j: Fraction(1)}) for u, v in pres.relations for j in range(alg.dim)
    )
    polys = [tuple(krylov_min_poly(lambda v, g=g: op(g, v), alg.unit())) for g in range(alg.ngens)]
    return {
        "signs": signs,
        "braid_relations_hold": braid_ok,
        "twisted_min_polys": polys,
        "same_as_untwisted": polys == generator_min_polys(alg),
    }


# -- involution models -------------------------------------------------------


@dataclass
class InvolutionModel:
    """Lie algebra with involution and Cartan subspace, all over Q.

    ``brackets[i][j]`` are the coordinates of [b_i, b_j]; ``theta`` has the
    image of b_j in column j; ``cartan`` lists coordinate vectors of a basis
    of c.
    """

    name: str
    brackets: list
    theta: list
    cartan: list
    basis_matrices: list | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return len(self.theta)

    def bracket(self, x: list, y: list) -> list:
        out = [Fraction(0)] * self.dim
        for i, a in enumerate(x):
            if not a:
                continue
            for j, b in enumerate(y):
                if b:
                    c = a * b
                    for k, t in enumerate(self.brackets[i][j]):
                        if t:
                            out[k] += c * t
        return out

    def ad(self, x: list) -> list:
        cols = [self.bracket(x, _unit(self.dim, j)) for j in range(self.dim)]
        return [[cols[j][i] for j in range(self.dim)] for i in range(self.dim)]

    def apply_theta(self, x: list) -> list:
        return linalg.matvec(self.theta, x)

    def eigenspace(self, sign: int) -> list:
        n = self.dim
        shifted = [[self.theta[i][j] - (sign if i == j else 0) for j in range(n)] for i in range(n)]
        return linalg.nullspace(shifted, n)

    def validate(self) -> None:
        n = self.dim
        sq = linalg.matmul(self.theta, self.theta)
        if sq != linalg.identity(n):
            raise ModelError(f"{self.name}: theta^2 != id")
        for i in range(n):
            for j in range(i + 1, n):
                lhs = self.apply_theta(self.brackets[i][j])
                rhs = self.bracket(self.apply_theta(_unit(n, i)), self.apply_theta(_unit(n, j)))
                if lhs != rhs:
                    raise ModelError(f"{self.name}: theta is not a Lie algebra automorphism")
        for h in self.cartan:
            if self.apply_theta(h) != [-x for x in h]:
                raise ModelError(f"{self.name}: c is not inside the (-1)-eigenspace")
        for a, b in itertools.combinations(self.cartan, 2):
            if any(self.bracket(a, b)):
                raise ModelError(f"{self.name}: c is not abelian")
        if linalg.rank(self.cartan) != len(self.cartan):
            raise ModelError(f"{self.name}: c basis is dependent")
        if _centralizer_dim(self, self.eigenspace(-1), self.cartan) != len(self.cartan):
            raise ModelError(f"{self.name}: c is not maximal abelian in g-")

    def to_dict(self) -> dict:
        consts = []
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                for k, c in enumerate(self.brackets[i][j]):
                    if c:
                        consts.append([i, j, k, str(c)])
        return {
            "name": self.name,
            "dim": self.dim,
            "structure_constants": consts,
            "theta": [[str(x) for x in row] for row in self.theta],
            "cartan_subspace": [[str(x) for x in v] for v in self.cartan],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "InvolutionModel":
        n = int(d["dim"])
        br = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for i, j, k, c in d["structure_constants"]:
            c = Fraction(c)
            br[i][j][k] += c
            br[j][i][k] -= c
        theta = [[Fraction(x) for x in row] for row in d["theta"]]
        cartan = [[Fraction(x) for x in v] for v in d["cartan_subspace"]]
        return cls(str(d.get("name", "")), br, theta, cartan)


def _unit(n: int, j: int) -> list:
    return [Fraction(int(i == j)) for i in range(n)]


def _centralizer_dim(model: InvolutionModel, space: list, elements: list) -> int:
    """dim {x in span(space) : [x, h] = 0 for every h in elements}."""
    if not elements:
        return len(space)
    rows = []
    for h in elements:
        adh = model.ad(h)
        cols = [linalg.matvec(adh, p) for p in space]
        rows.extend([[cols[k][i] for k in range(len(space))] for i in range(model.dim)])
    rows = [r for r in rows if any(r)]
    if not rows:
        return len(space)
    return len(space) - linalg.rank(rows)


@dataclass(frozen=True)
class Root:
    values: tuple  # alpha(c_k) for the basis c_k of c
    multiplicity: int


def restricted_roots(model: InvolutionModel) -> list[Root]:
    """Nonzero joint eigenvalues of ad(c) on g with their multiplicities."""
    import sympy

    n, r = model.dim, len(model.cartan)
    ads = [model.ad(h) for h in model.cartan]
    for attempt in range(8):
        weights = [Fraction(1 + attempt, 1) * Fraction(13) ** k for k in range(r)]
        generic = [sum((w * a[i][j] for w, a in zip(weights, ads)), Fraction(0)) for i in range(n) for j in range(n)]
        generic = [generic[i * n:(i + 1) * n] for i in range(n)]
        cp = linalg.charpoly(generic)
        x = sympy.Symbol("x")
        poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(cp)], x)
        roots = poly.ground_roots()
        if sum(roots.values()) != n:
            raise ModelError(f"{model.name}: ad(c) is not split over Q")
        out = []
        ok = True
        for mu in roots:
            if mu == 0:
                continue
            mu = Fraction(int(mu.p), int(mu.q))
            space = linalg.nullspace([[generic[i][j] - (mu if i == j else 0) for j in range(n)] for i in range(n)])
            v = space[0]
            piv = next(i for i, t in enumerate(v) if t)
            alpha = tuple(linalg.matvec(a, v)[piv] / v[piv] for a in ads)
            stacked = [
                [a[i][j] - (al if i == j else 0) for j in range(n)] for a, al in zip(ads, alpha) for i in range(n)
            ]
            if n - linalg.rank(stacked) != len(space):
                ok = False
                break
            out.append(Root(alpha, len(space)))
        if ok:
            return sorted(out, key=lambda rt: rt.values)
    raise ModelError(f"{model.name}: could not separate the restricted roots")


def _killing_on_c(model: InvolutionModel) -> list:
    ads = [model.ad(h) for h in model.cartan]
    return [[_trace(linalg.matmul(a, b)) for b in ads] for a in ads]


def _trace(m) -> Fraction:
    return sum((m[i][i] for i in range(len(m))), Fraction(0))


@dataclass
class OracleResult:
    s: list
    multiplicities: list  # (m_alpha, m_2alpha) per node
    weyl: ReflectionGroupSpec
    simple_roots: list
    root_lengths: list
    centralizer_c: int


def _identify(cm: list[list[int]]) -> list[ReflectionGroupSpec]:
    r = len(cm)
    cands = [ReflectionGroupSpec.coxeter("A", r)]
    if r >= 2:
        cands += [ReflectionGroupSpec.coxeter("B", r), ReflectionGroupSpec.coxeter("D", r)]
    if r == 2:
        cands += [ReflectionGroupSpec.coxeter("I", 2, m) for m in (2, 4, 6)]
    if r == 4:
        cands.append(ReflectionGroupSpec.coxeter("F", 4))
    return cands


def s_values_oracle(model: InvolutionModel, weyl: ReflectionGroupSpec | None = None) -> OracleResult:
    """s(i) = dim z_{g+}(ker alpha_i) - dim z_{g+}(c) for the simple roots alpha_i.

    Nodes are put in the order whose Coxeter matrix matches ``weyl`` (or
    the first matching standard type), preferring shorter roots first.
    """
    model.validate()
    roots = restricted_roots(model)
    r = len(model.cartan)
    gram = _killing_on_c(model)
    ginv = linalg.inverse(gram)

    def ip(a, b):
        return sum((a[i] * ginv[i][j] * b[j] for i in range(r) for j in range(r)), Fraction(0))

    # positive system from a generic functional on c*
    for scale in range(1, 20):
        b = [Fraction(1, scale * 7 ** k + 1) for k in range(r)]
        vals = [ip(rt.values, b) for rt in roots]
        if all(vals):
            break
    positive = [rt for rt, v in zip(roots, vals) if v > 0]
    pos_set = {rt.values: rt for rt in positive}
    sums = {tuple(x + y for x, y in zip(a.values, c.values)) for a in positive for c in positive}
    simple = [rt for rt in positive if rt.values not in sums]
    if len(simple) != r:
        raise ModelError(f"{model.name}: found {len(simple)} simple roots for rank {r}")

    def cm_of(order):
        m = [[1] * r for _ in range(r)]
        for i, j in itertools.combinations(range(r), 2):
            a, c = order[i].values, order[j].values
            q = 4 * ip(a, c) ** 2 / (ip(a, a) * ip(c, c))
            k = {0: 2, 1: 3, 2: 4, 3: 6}.get(q)
            if k is None:
                raise ModelError(f"{model.name}: simple roots at an unexpected angle")
            m[i][j] = m[j][i] = k
        return m

    best = None
    for order in itertools.permutations(simple):
        cm = cm_of(list(order))
        specs = [weyl] if weyl is not None else _identify(cm)
        for spec in specs:
            if coxeter_matrix(spec) == cm:
                key = (tuple(ip(a.values, a.values) for a in order), tuple(a.values for a in order))
                if best is None or key < best[0]:
                    best = (key, list(order), spec)
                break
    if best is None:
        raise ModelError(f"{model.name}: simple roots do not match the expected Weyl group")
    _, order, spec = best

    gplus = model.eigenspace(1)
    base = _centralizer_dim(model, gplus, model.cartan)
    s_list, mults = [], []
    for a in order:
        wall_coords = linalg.nullspace([list(a.values)], r)
        wall = [
            [sum((t[k] * model.cartan[k][i] for k in range(r)), Fraction(0)) for i in range(model.dim)]
            for t in wall_coords
        ]
        s_list.append(_centralizer_dim(model, gplus, wall) - base)
        double = pos_set.get(tuple(2 * x for x in a.values))
        mults.append((a.multiplicity, double.multiplicity if double else 0))
    return OracleResult(
        s=s_list,
        multiplicities=mults,
        weyl=spec,
        simple_roots=[a.values for a in order],
        root_lengths=[ip(a.values, a.values) for a in order],
        centralizer_c=base,
    )


# -- matrix models -----------------------------------------------------------


def _e(n: int, i: int, j: int) -> list:
    m = [[Fraction(0)] * n for _ in range(n)]
    m[i][j] = Fraction(1)
    return m


def _lin(*terms) -> list:
    n = len(terms[0][1])
    out = [[Fraction(0)] * n for _ in range(n)]
    for c, m in terms:
        for i in range(n):
            for j in range(n):
                if m[i][j]:
                    out[i][j] += c * m[i][j]
    return out


def _sl_basis(n: int) -> list:
    basis = [_e(n, i, j) for i in range(n) for j in range(n) if i != j]
    basis += [_lin((1, _e(n, k, k)), (-1, _e(n, k + 1, k + 1))) for k in range(n - 1)]
    return basis


def _transpose(m):
    return [list(r) for r in zip(*m)]


def _from_matrices(name, basis, theta_fn, cartan_mats) -> InvolutionModel:
    flat = [[x for row in b for x in row] for b in basis]
    _, piv = linalg.rref(flat)
    if len(piv) != len(basis):
        raise ModelError(f"{name}: basis matrices are dependent")
    square = [[flat[k][p] for k in range(len(basis))] for p in piv]
    inv = linalg.inverse(square)

    def coords(m):
        v = [x for row in m for x in row]
        x = linalg.matvec(inv, [v[p] for p in piv])
        back = [sum((x[k] * flat[k][i] for k in range(len(basis))), Fraction(0)) for i in range(len(v))]
        if back != v:
            raise ModelError(f"{name}: matrix outside the span of the basis")
        return x

    def br(a, b):
        return _lin((1, linalg.matmul(a, b)), (-1, linalg.matmul(b, a)))

    n = len(basis)
    brackets = [[coords(br(basis[i], basis[j])) for j in range(n)] for i in range(n)]
    tcols = [coords(theta_fn(b)) for b in basis]
    theta = [[tcols[j][i] for j in range(n)] for i in range(n)]
    cartan = [coords(h) for h in cartan_mats]
    return InvolutionModel(name, brackets, theta, cartan, basis)


def sl_real_model(n: int) -> InvolutionModel:
    """sl(n, R) with theta(X) = -X^T; c = diagonal traceless matrices."""
    basis = _sl_basis(n)
    cart = basis[n * (n - 1):]
    return _from_matrices(f"sl({n},R)", basis, lambda x: _lin((-1, _transpose(x))), cart)


def _ipq(p: int, q: int) -> list:
    n = p + q
    return [[Fraction((1 if i < p else -1) if i == j else 0) for j in range(n)] for i in range(n)]


def su_model(p: int, q: int) -> InvolutionModel:
    """su(p, q) through its complexification sl(p+q); theta = Ad(I_pq)."""
    n = p + q
    j = _ipq(p, q)
    cart = [_lin((1, _e(n, i, p + i)), (1, _e(n, p + i, i))) for i in range(min(p, q))]
    return _from_matrices(
        f"su({p},{q})", _sl_basis(n), lambda x: linalg.matmul(linalg.matmul(j, x), j), cart
    )


def so_model(p: int, q: int) -> InvolutionModel:
    """so(p, q) = {X : X^T J + J X = 0}, theta(X) = -X^T."""
    n = p + q
    basis = []
    for a in range(n):
        for b in range(a + 1, n):
            same = (a < p) == (b < p)
            basis.append(_lin((1, _e(n, a, b)), (-1 if same else 1, _e(n, b, a))))
    cart = [_lin((1, _e(n, i, p + i)), (1, _e(n, p + i, i))) for i in range(min(p, q))]
    return _from_matrices(f"so({p},{q})", basis, lambda x: _lin((-1, _transpose(x))), cart)


def group_case_model() -> InvolutionModel:
    """sl2 + sl2 (block diagonal in gl4) with the swap involution."""

    def block(m, first):
        out = [[Fraction(0)] * 4 for _ in range(4)]
        off = 0 if first else 2
        for i in range(2):
            for j in range(2):
                out[off + i][off + j] = m[i][j]
        return out

    sl2 = _sl_basis(2)
    basis = [block(m, True) for m in sl2] + [block(m, False) for m in sl2]

    def swap(x):
        a = [row[:2] for row in x[:2]]
        b = [row[2:] for row in x[2:]]
        return _lin((1, block(b, True)), (1, block(a, False)))

    h = sl2[2]
    cart = [_lin((1, block(h, True)), (-1, block(h, False)))]
    return _from_matrices("sl2+sl2 (group case)", basis, swap, cart)


_BUILDERS = {
    "sl": lambda d: sl_real_model(int(d["n"])),
    "su": lambda d: su_model(int(d["p"]), int(d["q"])),
    "so": lambda d: so_model(int(d["p"]), int(d["q"])),
    "group_sl2": lambda d: group_case_model(),
}


def model_for(spec: dict) -> InvolutionModel:
    """Build a bundled model from {"kind": ..., params} or an explicit model dict."""
    if "structure_constants" in spec:
        return InvolutionModel.from_dict(spec)
    kind = spec.get("kind")
    if kind not in _BUILDERS:
        raise ValueError(f"unknown model kind {kind!r}")
    return _BUILDERS[kind](spec)


def bundled_data() -> list[RestrictedRootDatum]:
    text = resources.files("polarhecke.data").joinpath("restricted_roots.json").read_text()
    return [RestrictedRootDatum.from_dict(d) for d in json.loads(text)]
