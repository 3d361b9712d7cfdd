"""Rank-one reduction of relation polynomials.

A primitive reflection of order n with slice datum (m, R~) has relation
R(z) = R~(z^m).  The carousel block matrix below realises the monodromy on
m copies of the slice: identity blocks on the subdiagonal and the companion
matrix of R~ in the top-right corner; its minimal polynomial is R~(z^m).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cyclotomic import totient
from .linalg import matrix_min_poly
from .poly import as_int_tuple, cyclotomic_factorization, inflate, trim

__all__ = [
    "RankOneDatum",
    "inflate_relation",
    "companion_matrix",
    "carousel_matrix",
    "roots_of_unity_check",
]


@dataclass(frozen=True)
class RankOneDatum:
    """Slice data of one hyperplane orbit.

    ``rtilde`` holds integer coefficients, constant term first.
    ``kind`` is ``"local"`` or ``"global"``.
    """

    orbit: int
    n: int
    m: int
    rtilde: tuple[int, ...]
    kind: str = "local"

    def __post_init__(self):
        r = as_int_tuple(trim(self.rtilde))
        object.__setattr__(self, "rtilde", r)
        if self.n < 1 or self.m < 1 or self.n % self.m:
            raise ValueError(f"m = {self.m} must be a positive divisor of n = {self.n}")
        if not r or r[-1] != 1:
            raise ValueError("R~ must be monic")
        if len(r) - 1 != self.n // self.m:
            raise ValueError(f"deg R~ = {len(r) - 1} but n/m = {self.n // self.m}")
        if self.kind not in ("local", "global"):
            raise ValueError("kind must be 'local' or 'global'")
        if self.kind == "global" and (self.m != self.n or r != (-1, 1)):
            raise ValueError("global type forces m = n and R~ = w - 1")

    def to_dict(self) -> dict:
        return {"orbit": self.orbit, "n": self.n, "m": self.m, "Rtilde": list(self.rtilde), "type": self.kind}

    @classmethod
    def from_dict(cls, d: dict) -> "RankOneDatum":
        return cls(
            orbit=int(d.get("orbit", 0)),
            n=int(d["n"]),
            m=int(d["m"]),
            rtilde=tuple(d["Rtilde"]),
            kind=d.get("type", "local"),
        )


def inflate_relation(datum: RankOneDatum) -> tuple[int, ...]:
    """R(z) = R~(z^m)."""
    return inflate(datum.rtilde, datum.m)


def companion_matrix(p) -> list[list[Fraction]]:
    """Companion matrix of the monic p (constant first): ones below the diagonal."""
    p = [Fraction(c) for c in p]
    k = len(p) - 1
    mat = [[Fraction(0)] * k for _ in range(k)]
    for i in range(1, k):
        mat[i][i - 1] = Fraction(1)
    for i in range(k):
        mat[i][k - 1] = -p[i]
    return mat


def carousel_matrix(datum: RankOneDatum) -> tuple[list[list[Fraction]], tuple]:
    """The m x m block matrix and its exact minimal polynomial."""
    c = companion_matrix(datum.rtilde)
    k = len(c)
    size = datum.m * k
    mat = [[Fraction(0)] * size for _ in range(size)]
    if datum.m == 1:
        mat = [row[:] for row in c]
    else:
        for b in range(1, datum.m):
            for i in range(k):
                mat[b * k + i][(b - 1) * k + i] = Fraction(1)
        top = (datum.m - 1) * k
        for i in range(k):
            for j in range(k):
                mat[i][top + j] = c[i][j]
    return mat, as_int_tuple(matrix_min_poly(mat))


def roots_of_unity_check(poly) -> tuple[bool, list[int]]:
    """(all roots are roots of unity?, root orders with multiplicity)."""
    fac = cyclotomic_factorization(poly)
    if fac is None:
        return False, []
    orders: list[int] = []
    for d, e in fac:
        orders.extend([d] * (totient(d) * e))
    return True, sorted(orders)
