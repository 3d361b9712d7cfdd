"""Braid presentations, relation polynomials, and noncommutative polynomials."""

from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

from .cyclotomic import CycNum
from .groups import ReflectionGroupSpec, coxeter_matrix
from .poly import trim

__all__ = [
    "BraidPresentation",
    "RelationSet",
    "NCPoly",
    "presentation_for",
    "artin_presentation",
    "ConflictingRelationWarning",
]


class ConflictingRelationWarning(UserWarning):
    """Per-generator relation data disagrees inside one hyperplane orbit."""


def _alternating(a: int, b: int, length: int) -> tuple[int, ...]:
    return tuple((a, b)[k % 2] for k in range(length))


@dataclass(frozen=True)
class BraidPresentation:
    """Generators sigma_i and positive braid relations u = v.

    Words are tuples of generator indices read as products left to right.
    """

    generators: tuple[str, ...]
    relations: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    name: str = ""

    def __post_init__(self):
        if not self.generators:
            raise ValueError("a presentation needs at least one generator")
        n = len(self.generators)
        for u, v in self.relations:
            if not u or not v:
                raise ValueError("braid relation words must be nonempty")
            if any(not 0 <= x < n for x in u + v):
                raise ValueError("relation uses an unknown generator")

    @property
    def ngens(self) -> int:
        return len(self.generators)

    def orbits(self) -> list[int]:
        """Orbit label of each generator: the least generator conjugate to it.

        Two generators are conjugate in B_W when an odd-length alternating
        relation aba... = bab... joins them; orbits are the connected
        components of that relation.
        """
        parent = list(range(self.ngens))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in self.relations:
            if len(u) == len(v) and len(u) % 2 == 1 and len(set(u)) == 2:
                a, b = u[0], u[1]
                if u == _alternating(a, b, len(u)) and v == _alternating(b, a, len(u)):
                    ra, rb = find(a), find(b)
                    parent[max(ra, rb)] = min(ra, rb)
        return [find(i) for i in range(self.ngens)]

    def permuted(self, perm: list[int]) -> "BraidPresentation":
        """Relabel: old generator i becomes new generator perm[i]."""
        gens = [""] * self.ngens
        for i, p in enumerate(perm):
            gens[p] = self.generators[i]
        rels = tuple((tuple(perm[x] for x in u), tuple(perm[x] for x in v)) for u, v in self.relations)
        return BraidPresentation(tuple(gens), rels, self.name)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "generators": list(self.generators),
            "braid_relations": [[list(u), list(v)] for u, v in self.relations],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BraidPresentation":
        gens = d.get("generators")
        if isinstance(gens, int):
            gens = [f"s{i}" for i in range(gens)]
        if not gens:
            raise ValueError("presentation needs 'generators'")
        names = [str(g) for g in gens]
        lookup = {g: i for i, g in enumerate(names)}

        def word(w):
            out = []
            for x in w:
                if isinstance(x, str):
                    if x not in lookup:
                        raise ValueError(f"unknown generator {x!r}")
                    out.append(lookup[x])
                else:
                    out.append(int(x))
            return tuple(out)

        rels = tuple((word(u), word(v)) for u, v in d.get("braid_relations", []))
        return cls(tuple(names), rels, str(d.get("name", "")))

    def digest(self) -> str:
        blob = json.dumps([list(self.generators), [[list(u), list(v)] for u, v in self.relations]])
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def artin_presentation(cm: list[list[int]], names: list[str] | None = None, name: str = "") -> BraidPresentation:
    r = len(cm)
    rels = []
    for i in range(r):
        for j in range(i + 1, r):
            m = cm[i][j]
            rels.append((_alternating(i, j, m), _alternating(j, i, m)))
    names = names or [f"s{i}" for i in range(r)]
    return BraidPresentation(tuple(names), tuple(rels), name)


def presentation_for(spec: ReflectionGroupSpec) -> BraidPresentation:
    """Braid presentation whose generators match ``spec.generator_matrices()``."""
    if spec.is_coxeter:
        return artin_presentation(coxeter_matrix(spec), name=spec.label)
    if spec.family == "cyclic":
        return BraidPresentation(("z",), (), spec.label)
    if spec.family == "imprimitive":
        n = spec.rank
        names = ["tau"] + [f"s{i}" for i in range(1, n)]
        rels = []
        if n >= 2:
            rels.append(((0, 1, 0, 1), (1, 0, 1, 0)))
        for j in range(2, n):
            rels.append(((0, j), (j, 0)))
        for i in range(1, n):
            for j in range(i + 1, n):
                m = 3 if j == i + 1 else 2
                rels.append((_alternating(i, j, m), _alternating(j, i, m)))
        return BraidPresentation(tuple(names), tuple(rels), spec.label)
    raise ValueError("explicit groups need a user-supplied braid presentation")


# -- relation sets ---------------------------------------------------------


def _int_poly(coeffs) -> tuple[int, ...]:
    out = []
    for c in coeffs:
        f = Fraction(c) if not isinstance(c, CycNum) else c.to_fraction()
        if f.denominator != 1:
            raise ValueError(f"relation coefficient {f} is not an integer")
        out.append(int(f))
    return trim(out)


@dataclass(frozen=True)
class RelationSet:
    """Orbit label -> monic integer polynomial R (coefficients, constant first).

    ``source`` optionally records rank-one data per orbit as
    ``{orbit: {"n": .., "m": .., "Rtilde": [..], "type": ..}}``.
    """

    polys: dict
    source: dict = field(default_factory=dict)

    def __post_init__(self):
        polys = {}
        for orbit, p in self.polys.items():
            p = _int_poly(p)
            if not p or p[-1] != 1:
                raise ValueError(f"R for orbit {orbit} must be monic")
            if p[0] == 0:
                raise ValueError(f"R for orbit {orbit} has zero constant term (generator not invertible)")
            polys[orbit] = p
        object.__setattr__(self, "polys", polys)

    @classmethod
    def uniform(cls, pres: BraidPresentation, poly) -> "RelationSet":
        return cls({o: tuple(poly) for o in sorted(set(pres.orbits()))})

    @classmethod
    def from_generator_polys(cls, pres: BraidPresentation, per_gen: list) -> "RelationSet":
        """Collapse per-generator data to orbits; warns on disagreement and keeps the first."""
        orbits = pres.orbits()
        polys: dict = {}
        for g, p in enumerate(per_gen):
            p = _int_poly(p)
            o = orbits[g]
            if o in polys and polys[o] != p:
                warnings.warn(
                    f"generators {o} and {g} are conjugate but were given different relations; using the first",
                    ConflictingRelationWarning,
                    stacklevel=2,
                )
                continue
            polys.setdefault(o, p)
        return cls(polys)

    def for_generators(self, pres: BraidPresentation) -> list[tuple[int, ...]]:
        out = []
        for g, o in enumerate(pres.orbits()):
            if o not in self.polys:
                raise ValueError(f"no relation given for orbit of generator {pres.generators[g]}")
            out.append(self.polys[o])
        return out

    def degree(self, orbit) -> int:
        return len(self.polys[orbit]) - 1

    def to_dict(self) -> dict:
        d = {"R": {str(k): list(v) for k, v in sorted(self.polys.items())}}
        if self.source:
            d["rank_one"] = {str(k): v for k, v in self.source.items()}
        return d

    @classmethod
    def from_dict(cls, d, pres: BraidPresentation) -> "RelationSet":
        """Accepts {"R": {orbit: coeffs}}, {"R": [coeffs per generator]} or a single list."""
        r = d.get("R") if isinstance(d, dict) else d
        if r is None:
            raise ValueError("relation data needs 'R'")
        if isinstance(r, dict):
            lookup = {name: i for i, name in enumerate(pres.generators)}
            orbits = pres.orbits()
            polys = {}
            for k, v in r.items():
                g = lookup[k] if k in lookup else int(k)
                polys[orbits[g]] = v
            return cls(polys)
        if r and all(isinstance(x, (int, str)) and not isinstance(x, bool) for x in r):
            return cls.uniform(pres, [Fraction(x) for x in r])
        return cls.from_generator_polys(pres, r)


# -- noncommutative polynomials --------------------------------------------


def _free_reduce(word) -> tuple[int, ...]:
    out: list[int] = []
    for x in word:
        if out and out[-1] == ~x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def _word_key(word) -> tuple:
    # deglex with generator order, a letter before its inverse
    return (len(word), tuple((x if x >= 0 else ~x, x < 0) for x in word))


class NCPoly:
    """Linear combination of words in the generators and their inverses.

    Letter ``i >= 0`` is sigma_i, letter ``~i`` (= -i-1) its inverse.  Terms
    are kept freely reduced, merged, and sorted deglex.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        acc: dict = {}
        for word, c in (terms.items() if isinstance(terms, dict) else (terms or [])):
            w = _free_reduce(word)
            acc[w] = acc.get(w, 0) + c
        self.terms = tuple(sorted(((w, c) for w, c in acc.items() if c), key=lambda t: _word_key(t[0])))

    @classmethod
    def word(cls, word, coeff=1) -> "NCPoly":
        return cls([(tuple(word), coeff)])

    @classmethod
    def gen(cls, i: int) -> "NCPoly":
        return cls.word((i,))

    @classmethod
    def one(cls) -> "NCPoly":
        return cls.word(())

    def __add__(self, other):
        other = _as_ncpoly(other)
        return NCPoly(list(self.terms) + list(other.terms))

    __radd__ = __add__

    def __neg__(self):
        return NCPoly([(w, -c) for w, c in self.terms])

    def __sub__(self, other):
        return self + (-_as_ncpoly(other))

    def __rsub__(self, other):
        return _as_ncpoly(other) - self

    def __mul__(self, other):
        other = _as_ncpoly(other)
        return NCPoly([(u + v, a * b) for u, a in self.terms for v, b in other.terms])

    def __rmul__(self, other):
        return _as_ncpoly(other) * self

    def __pow__(self, k: int):
        out = NCPoly.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, NCPoly):
            try:
                other = _as_ncpoly(other)
            except TypeError:
                return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __repr__(self):
        return f"NCPoly({self.format()})"

    def format(self, names=None) -> str:
        if not self.terms:
            return "0"
        parts = []
        for w, c in self.terms:
            body = "*".join(_letter_name(x, names) for x in w) or "1"
            parts.append(body if c == 1 else f"({c})*{body}")
        return " + ".join(parts)

    def is_positive(self) -> bool:
        return all(x >= 0 for w, _ in self.terms for x in w)

    @classmethod
    def univariate(cls, gen: int, coeffs) -> "NCPoly":
        """sum_k coeffs[k] * sigma_gen^k."""
        return cls([((gen,) * k, c) for k, c in enumerate(coeffs) if c])


def _letter_name(x: int, names) -> str:
    i = x if x >= 0 else ~x
    base = names[i] if names else f"s{i}"
    return base if x >= 0 else f"{base}^-1"


def _as_ncpoly(x) -> NCPoly:
    if isinstance(x, NCPoly):
        return x
    if isinstance(x, (int, Fraction, CycNum)):
        return NCPoly.word((), x)
    raise TypeError(f"cannot convert {type(x).__name__} to NCPoly")
