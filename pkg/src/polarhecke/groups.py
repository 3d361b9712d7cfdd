"""Finite complex reflection groups: construction, enumeration, reflections.

Groups are given by a :class:`ReflectionGroupSpec` and enumerated into a
:class:`ReflectionGroup` whose elements are exact matrices over
:class:`~polarhecke.cyclotomic.CycNum`, stored as tuples of row tuples.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg
from .cyclotomic import CycNum, is_root_of_unity, root_of_unity

__all__ = [
    "GroupOrderExceeded",
    "ReflectionGroupSpec",
    "ReflectionGroup",
    "Reflection",
    "coxeter_matrix",
    "enumerate_group",
    "find_reflections",
    "molien_series",
    "invariant_degrees",
    "rank_of_action",
    "COXETER_FAMILIES",
]

COXETER_FAMILIES = ("A", "B", "C", "D", "I", "H", "F")

ONE = CycNum(1)
ZERO = CycNum(0)

Matrix = tuple  # tuple of row tuples of CycNum


class GroupOrderExceeded(RuntimeError):
    """Enumeration produced more elements than the order cap allows."""


# -- specs -------------------------------------------------------------------


@dataclass(frozen=True)
class ReflectionGroupSpec:
    """Abstract description of W.

    ``family`` is one of the Coxeter letters (``A B C D I H F``), ``"cyclic"``
    (Z/m acting on C^1 by zeta_m), ``"imprimitive"`` (G(m, 1, rank)) or
    ``"explicit"`` (``generators`` given as matrices).  For ``I`` the bond
    label is ``m`` and the rank is 2.
    """

    family: str
    rank: int = 1
    m: int | None = None
    generators: tuple | None = None

    def __post_init__(self):
        fam = self.family
        if fam not in COXETER_FAMILIES + ("cyclic", "imprimitive", "explicit"):
            raise ValueError(f"unknown family {fam!r}")
        if fam == "explicit":
            if not self.generators:
                raise ValueError("explicit family needs generators")
            return
        if fam == "cyclic":
            if self.m is None or self.m < 1:
                raise ValueError("cyclic family needs m >= 1")
            return
        if fam == "imprimitive":
            if self.m is None or self.m < 2 or self.rank < 1:
                raise ValueError("G(m,1,n) needs m >= 2 and rank >= 1")
            return
        if self.rank < 1:
            raise ValueError("rank must be positive")
        if fam == "I" and (self.rank != 2 or self.m is None or self.m < 2):
            raise ValueError("I2(m) needs rank 2 and m >= 2")
        if fam in ("B", "C") and self.rank < 2:
            raise ValueError("B_n needs n >= 2")
        if fam == "D" and self.rank < 2:
            raise ValueError("D_n needs n >= 2")
        if fam == "H" and self.rank not in (2, 3, 4):
            raise ValueError("H_n exists for n = 2, 3, 4")
        if fam == "F" and self.rank != 4:
            raise ValueError("F_n exists only for n = 4")

    # constructors for readability
    @classmethod
    def coxeter(cls, family: str, rank: int, m: int | None = None) -> "ReflectionGroupSpec":
        return cls(family=family, rank=rank, m=m)

    @classmethod
    def cyclic(cls, n: int) -> "ReflectionGroupSpec":
        return cls(family="cyclic", rank=1, m=n)

    @classmethod
    def imprimitive(cls, m: int, n: int) -> "ReflectionGroupSpec":
        return cls(family="imprimitive", rank=n, m=m)

    @classmethod
    def explicit(cls, gens) -> "ReflectionGroupSpec":
        mats = tuple(_as_matrix(g) for g in gens)
        return cls(family="explicit", rank=len(mats[0]), generators=mats)

    @property
    def is_coxeter(self) -> bool:
        return self.family in COXETER_FAMILIES

    @property
    def label(self) -> str:
        f = self.family
        if f == "I":
            return f"I2({self.m})"
        if f == "cyclic":
            return f"Z/{self.m}"
        if f == "imprimitive":
            return f"G({self.m},1,{self.rank})"
        if f == "explicit":
            return f"explicit[{len(self.generators)} gens, dim {self.rank}]"
        return f"{f}{self.rank}"

    def to_dict(self) -> dict:
        d: dict = {"family": self.family, "rank": self.rank}
        if self.m is not None:
            d["m"] = self.m
        if self.generators is not None:
            d["generators"] = [[[str(x) for x in row] for row in g] for g in self.generators]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ReflectionGroupSpec":
        if not isinstance(d, dict) or "family" not in d:
            raise ValueError("group spec needs a 'family' field")
        fam = d["family"]
        if fam == "explicit":
            return cls.explicit(d.get("generators") or [])
        if fam == "cyclic":
            return cls.cyclic(int(d.get("m", d.get("rank", 0))))
        return cls(family=fam, rank=int(d.get("rank", 1)), m=None if d.get("m") is None else int(d["m"]))

    def generator_matrices(self) -> list[Matrix]:
        f = self.family
        if f == "explicit":
            return list(self.generators)
        if f == "cyclic":
            return [((root_of_unity(self.m),),)]
        if f == "imprimitive":
            n = self.rank
            tau = _diag([root_of_unity(self.m)] + [ONE] * (n - 1))
            return [tau] + [_swap(n, i - 1, i) for i in range(1, n)]
        return _cartan_realization(coxeter_matrix(self))


def _entry(x) -> CycNum:
    if isinstance(x, CycNum):
        return x
    if isinstance(x, float):
        raise ValueError(f"floating-point entry {x!r}; use exact rationals or CycNum strings")
    return CycNum(x)


def _as_matrix(g) -> Matrix:
    rows = tuple(tuple(_entry(x) for x in row) for row in g)
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ValueError("generator matrices must be square")
    return rows


def _diag(entries) -> Matrix:
    n = len(entries)
    return tuple(tuple(entries[i] if i == j else ZERO for j in range(n)) for i in range(n))


def _swap(n: int, a: int, b: int) -> Matrix:
    perm = list(range(n))
    perm[a], perm[b] = b, a
    return tuple(tuple(ONE if perm[i] == j else ZERO for j in range(n)) for i in range(n))


def coxeter_matrix(spec: ReflectionGroupSpec) -> list[list[int]]:
    """Coxeter matrix with the node conventions used throughout the package.

    A_n: chain.  B_n: the 4-bond joins nodes 0 and 1.  D_n: nodes 0 and 1
    both attach to node 2.  F4: 3-4-3 chain.  H_n: the 5-bond joins nodes
    0 and 1.
    """
    f, r = spec.family, spec.rank
    m = [[1 if i == j else 2 for j in range(r)] for i in range(r)]

    def bond(i, j, k):
        m[i][j] = m[j][i] = k

    if f == "A":
        for i in range(r - 1):
            bond(i, i + 1, 3)
    elif f in ("B", "C"):
        bond(0, 1, 4)
        for i in range(1, r - 1):
            bond(i, i + 1, 3)
    elif f == "D":
        if r >= 3:
            bond(0, 2, 3)
            bond(1, 2, 3)
        for i in range(2, r - 1):
            bond(i, i + 1, 3)
    elif f == "I":
        bond(0, 1, spec.m)
    elif f == "H":
        bond(0, 1, 5)
        for i in range(1, r - 1):
            bond(i, i + 1, 3)
    elif f == "F":
        bond(0, 1, 3)
        bond(1, 2, 4)
        bond(2, 3, 3)
    else:
        raise ValueError(f"{spec.label} is not a Coxeter type")
    return m


def _cartan_realization(cm: list[list[int]]) -> list[Matrix]:
    """Reflections s_i(a_j) = a_j - A_ij a_i in the basis of simple roots.

    Crystallographic bonds use an integer Cartan matrix, so Weyl groups stay
    over Q; other bonds use 2cos(pi/m) = zeta_2m + zeta_2m^-1.
    """
    r = len(cm)
    a = [[CycNum(2) if i == j else ZERO for j in range(r)] for i in range(r)]
    for i in range(r):
        for j in range(i + 1, r):
            k = cm[i][j]
            if k == 2:
                continue
            if k == 3:
                a[i][j] = a[j][i] = CycNum(-1)
            elif k == 4:
                a[i][j], a[j][i] = CycNum(-2), CycNum(-1)
            elif k == 6:
                a[i][j], a[j][i] = CycNum(-3), CycNum(-1)
            else:
                c = root_of_unity(2 * k) + root_of_unity(2 * k, -1)
                a[i][j] = a[j][i] = -c
    gens = []
    for i in range(r):
        rows = [[ONE if p == q else ZERO for q in range(r)] for p in range(r)]
        for j in range(r):
            # column j is the image of a_j
            rows[i][j] = rows[i][j] - a[i][j]
        gens.append(tuple(tuple(row) for row in rows))
    return gens


# -- group ------------------------------------------------------------------


def _mul(a: Matrix, b: Matrix) -> Matrix:
    bt = tuple(zip(*b))
    out = []
    for row in a:
        nz = [(k, x) for k, x in enumerate(row) if x]
        out_row = []
        for col in bt:
            s = ZERO
            for k, x in nz:
                y = col[k]
                if y:
                    s = s + x * y
            out_row.append(s)
        out.append(tuple(out_row))
    return tuple(out)


def _key(g: Matrix) -> tuple:
    return tuple(x.sort_key() for row in g for x in row)


@dataclass(frozen=True)
class Reflection:
    index: int
    hyperplane: tuple  # basis of the fixed hyperplane (row tuples)
    root_form: tuple  # normalized linear form alpha with H = ker(alpha)
    eigenvalue: CycNum
    order: int
    primitive: bool
    orbit: int


@dataclass
class ReflectionGroup:
    spec: ReflectionGroupSpec
    dim: int
    elements: list
    generators: list
    generator_index: list
    identity_index: int
    _index: dict = field(repr=False, default_factory=dict)
    _reflections: list | None = field(repr=False, default=None)

    @property
    def order(self) -> int:
        return len(self.elements)

    def index_of(self, g: Matrix) -> int:
        return self._index[_key(g)]

    def multiply(self, i: int, j: int) -> int:
        return self.index_of(_mul(self.elements[i], self.elements[j]))

    def inverse_index(self, i: int) -> int:
        g = self.elements[i]
        for j, h in enumerate(self.elements):
            if _mul(g, h) == self.elements[self.identity_index]:
                return j
        raise AssertionError("inverse missing from a closed group")

    @property
    def reflections(self) -> list[Reflection]:
        if self._reflections is None:
            self._reflections = find_reflections(self)
        return self._reflections

    def generator_orbits(self) -> list[int | None]:
        """Hyperplane-orbit id of each generator (None if not a reflection)."""
        by_index = {r.index: r.orbit for r in self.reflections}
        return [by_index.get(i) for i in self.generator_index]

    def complex_matrices(self):
        import numpy as np

        return [np.array([[complex(x) for x in row] for row in g]) for g in self.elements]


def enumerate_group(spec: ReflectionGroupSpec, order_cap: int = 20000) -> ReflectionGroup:
    """All elements by orbit closure of the identity under the generators.

    Elements are returned sorted by their canonical entry tuples.
    """
    gens = [_as_matrix(g) for g in spec.generator_matrices()]
    r = len(gens[0])
    for g in gens:
        if len(g) != r:
            raise ValueError("generators have different sizes")
        if not linalg.det([list(row) for row in g]):
            raise ValueError("non-invertible generator")
    ident = _diag([ONE] * r)
    seen = {_key(ident): ident}
    queue = deque([ident])
    while queue:
        h = queue.popleft()
        for g in gens:
            x = _mul(g, h)
            k = _key(x)
            if k not in seen:
                seen[k] = x
                if len(seen) > order_cap:
                    raise GroupOrderExceeded(
                        f"{spec.label}: more than {order_cap} elements (infinite or too large)"
                    )
                queue.append(x)
    keys = sorted(seen)
    elements = [seen[k] for k in keys]
    index = {k: i for i, k in enumerate(keys)}
    return ReflectionGroup(
        spec=spec,
        dim=r,
        elements=elements,
        generators=gens,
        generator_index=[index[_key(g)] for g in gens],
        identity_index=index[_key(ident)],
        _index=index,
    )


# -- reflections -----------------------------------------------------------


def _minus_identity(g: Matrix) -> list[list]:
    return [[x - ONE if i == j else x for j, x in enumerate(row)] for i, row in enumerate(g)]


def _normalize_form(row) -> tuple:
    lead = next(x for x in row if x)
    inv = lead.inv()
    return tuple(x * inv for x in row)


def find_reflections(group: ReflectionGroup) -> list[Reflection]:
    """Every element with a codimension-one fixed space, classified.

    A reflection s with hyperplane H is primitive when its eigenvalue is
    exp(2 pi i / n_H), where n_H is the order of the cyclic pointwise
    stabilizer of H; equivalently s generates that stabilizer and rotates
    by the smallest positive angle.
    """
    raw = []
    for idx, g in enumerate(group.elements):
        if idx == group.identity_index:
            continue
        m = _minus_identity(g)
        if linalg.rank(m) != 1:
            continue
        form = _normalize_form(next(row for row in m if any(row)))
        det = linalg.det([list(row) for row in g])
        raw.append((idx, form, det))
    stab: dict = {}
    for idx, form, _ in raw:
        stab[form] = stab.get(form, 1) + 1
    # hyperplane orbits: alpha -> alpha g^-1  for generators g
    ginv = [linalg.inverse([list(row) for row in g]) for g in group.generators]
    forms = sorted(stab, key=lambda f: tuple(x.sort_key() for x in f))
    parent = {f: f for f in forms}

    def find(f):
        while parent[f] != f:
            parent[f] = parent[parent[f]]
            f = parent[f]
        return f

    for f in forms:
        for gi in ginv:
            img = _normalize_form([sum((f[k] * gi[k][j] for k in range(group.dim)), ZERO) for j in range(group.dim)])
            a, b = find(f), find(img)
            if a != b:
                parent[max(a, b, key=_fkey)] = min(a, b, key=_fkey)
    # orbit ids in order of the smallest element index carrying the orbit
    first: dict = {}
    for idx, form, _ in raw:
        root = find(form)
        first.setdefault(root, idx)
    orbit_id = {root: k for k, root in enumerate(sorted(first, key=first.get))}
    out = []
    for idx, form, det in raw:
        n_h = stab[form]
        order = is_root_of_unity(det)
        if order is None:
            raise ValueError("reflection eigenvalue is not a root of unity")
        hyper = tuple(tuple(_entry(x) for x in v) for v in linalg.nullspace(_minus_identity(group.elements[idx])))
        out.append(
            Reflection(
                index=idx,
                hyperplane=hyper,
                root_form=form,
                eigenvalue=det,
                order=order,
                primitive=(order == n_h and det == root_of_unity(n_h)),
                orbit=orbit_id[find(form)],
            )
        )
    return out


def _fkey(f) -> tuple:
    return tuple(x.sort_key() for x in f)


def hyperplane_stabilizer_orders(group: ReflectionGroup) -> dict[int, int]:
    """Orbit id -> n_H (pointwise stabilizer order of any hyperplane in it)."""
    counts: dict = {}
    orbit_of: dict = {}
    for r in group.reflections:
        counts[r.root_form] = counts.get(r.root_form, 1) + 1
        orbit_of[r.root_form] = r.orbit
    out: dict[int, int] = {}
    for form, n in counts.items():
        o = orbit_of[form]
        if out.setdefault(o, n) != n:
            raise AssertionError("stabilizer order varies inside an orbit")
    return out


# -- invariants ----------------------------------------------------------------


def _series_inverse(den: list, precision: int) -> list:
    """Power series 1/den to the given number of terms; den[0] must be 1."""
    out = [ZERO] * precision
    out[0] = ONE
    for k in range(1, precision):
        s = ZERO
        for j in range(1, min(k, len(den) - 1) + 1):
            if den[j]:
                s = s + den[j] * out[k - j]
        out[k] = -s
    return out


def molien_series(group: ReflectionGroup, precision: int | None = None) -> list[Fraction]:
    """Coefficients of (1/|W|) sum_g 1/det(1 - t g), through t^(precision-1).

    The default precision (number of reflections + 2) reaches the largest
    degree of a reflection group.
    """
    if precision is None:
        precision = len(group.reflections) + 2
    cache: dict = {}
    total = [ZERO] * precision
    for g in group.elements:
        cp = tuple(linalg.charpoly([list(row) for row in g]))
        series = cache.get(cp)
        if series is None:
            # det(1 - t g) = t^r charpoly(1/t): reverse the coefficients
            den = [_entry(x) for x in reversed(cp)]
            series = _series_inverse(den, precision)
            cache[cp] = series
        total = [a + b for a, b in zip(total, series)]
    out = []
    for c in total:
        c = c / group.order
        if not c.is_rational():
            raise AssertionError("Molien coefficient is not rational")
        out.append(c.to_fraction())
    return out


def invariant_degrees(group: ReflectionGroup, precision: int | None = None) -> list[int]:
    """Degrees d_1 <= ... <= d_r of basic invariants, from the Molien series.

    Peels off factors 1/(1 - t^d) at the lowest surviving positive degree;
    raises ValueError when the series is not of that product form, i.e. the
    group does not act as a reflection group on this space.
    """
    series = molien_series(group, precision)
    prec = len(series)
    s = list(series)
    degrees: list[int] = []
    while True:
        k = next((i for i in range(1, prec) if s[i]), None)
        if k is None:
            break
        c = s[k]
        if c < 0 or c.denominator != 1 or len(degrees) + c > group.dim:
            raise ValueError("Molien series is not a product of 1/(1 - t^d) factors")
        for _ in range(int(c)):
            degrees.append(k)
            # multiply by (1 - t^k)
            s = [s[i] - (s[i - k] if i >= k else 0) for i in range(prec)]
    if len(degrees) != group.dim:
        raise ValueError(f"found {len(degrees)} degrees for a rank-{group.dim} action")
    prod = 1
    for d in degrees:
        prod *= d
    if prod != group.order:
        raise ValueError(f"product of degrees {prod} != |W| = {group.order}")
    if sum(d - 1 for d in degrees) != len(group.reflections):
        raise ValueError("sum (d_i - 1) differs from the number of reflections")
    return sorted(degrees)


def rank_of_action(group: ReflectionGroup) -> int:
    """dim c minus the dimension of the common fixed space of W."""
    rows = [row for g in group.generators for row in _minus_identity(g)]
    return linalg.rank(rows)
