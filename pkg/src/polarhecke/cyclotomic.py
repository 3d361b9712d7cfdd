"""Exact arithmetic in cyclotomic fields Q(zeta_N).

An element is stored in the power basis ``1, z, ..., z^(phi(N)-1)`` of
``Q(zeta_N)`` reduced modulo the N-th cyclotomic polynomial, where ``N`` is
always the smallest conductor whose field contains the element.  With that
normalisation two elements are equal exactly when their conductors and
coefficient tuples agree, so ``__eq__`` and ``__hash__`` are tuple comparisons.

>>> i = root_of_unity(4)
>>> i * i
CycNum('-1')
>>> one = CycNum(1)
>>> w = root_of_unity(3)
>>> one + w + w * w
CycNum('0')
"""

from __future__ import annotations

import cmath
import math
import re
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

__all__ = [
    "CycNum",
    "ConductorLimitError",
    "root_of_unity",
    "is_root_of_unity",
    "complex_embedding",
    "MAX_CONDUCTOR",
    "totient",
    "cyclotomic_poly",
]

#: Largest conductor accepted.  Keeps phi(N) (the coefficient count) small.
MAX_CONDUCTOR = 120


class ConductorLimitError(ArithmeticError):
    """Raised when an operation would need a field beyond ``MAX_CONDUCTOR``."""


def totient(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, constant term first."""
    # z^n - 1 = prod_{d | n} Phi_d(z)
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _exact_div_int(num, cyclotomic_poly(d))
    return tuple(num)


def _exact_div_int(num: list[int], den: tuple[int, ...]) -> list[int]:
    num = list(num)
    dn = len(den) - 1
    out = [0] * (len(num) - dn)
    for k in range(len(num) - 1 - dn, -1, -1):
        c = num[k + dn]  # den is monic
        out[k] = c
        if c:
            for j, dj in enumerate(den):
                num[k + j] -= c * dj
    assert not any(num[:dn]), "inexact division"
    return out


@lru_cache(maxsize=None)
def _power_table(n: int) -> tuple[tuple[int, ...], ...]:
    """Coordinates of zeta_n^k (0 <= k < n) in the reduced power basis."""
    phi = totient(n)
    mod = cyclotomic_poly(n)
    rows = []
    cur = [0] * phi
    cur[0] = 1
    for _ in range(n):
        rows.append(tuple(cur))
        # multiply by z and reduce with z^phi = -sum mod[j] z^j
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for j in range(phi):
                cur[j] -= top * mod[j]
    return tuple(rows)


def _normal_conductor(n: int) -> int:
    if n % 4 == 2:
        return n // 2
    return n


@lru_cache(maxsize=None)
def _subfield_projector(n: int, m: int):
    """Data for testing membership of Q(zeta_m) inside Q(zeta_n), m | n.

    Returns the embedded basis rows, a set of pivot columns on which those
    rows are independent, and the inverse of that square block.
    """
    from .linalg import inverse, rref

    table = _power_table(n)
    step = n // m
    basis = [[Fraction(x) for x in table[(step * k) % n]] for k in range(totient(m))]
    _, piv_cols = rref([row[:] for row in basis])
    block = [[basis[k][c] for c in piv_cols] for k in range(len(basis))]
    return basis, tuple(piv_cols), inverse(block)


class CycNum:
    """An element of Q(zeta_N) with exact rational coefficients.

    ``CycNum(x)`` accepts ints, Fractions and strings in the report format
    ``"c0 + c1*z(N)^1 + ..."``.  ``CycNum.from_coeffs(N, coeffs)`` builds an
    element from power-basis coordinates (any length; it is reduced).
    """

    __slots__ = ("N", "coeffs", "_hash")

    def __init__(self, value=0):
        if isinstance(value, CycNum):
            self.N, self.coeffs = value.N, value.coeffs
        elif isinstance(value, str):
            other = CycNum.parse(value)
            self.N, self.coeffs = other.N, other.coeffs
        elif isinstance(value, (int, Fraction, Rational)):
            self.N, self.coeffs = 1, (Fraction(value),)
        else:
            raise TypeError(f"cannot build CycNum from {type(value).__name__}")
        self._hash = None

    @classmethod
    def _raw(cls, n: int, coeffs: tuple) -> "CycNum":
        obj = object.__new__(cls)
        obj.N = n
        obj.coeffs = coeffs
        obj._hash = None
        return obj

    @classmethod
    def from_coeffs(cls, n: int, coeffs) -> "CycNum":
        """Element sum_k coeffs[k] * zeta_n^k (exponents taken mod n)."""
        if n < 1:
            raise ValueError("conductor must be positive")
        _check_conductor(n)
        table = _power_table(n)
        acc = [Fraction(0)] * totient(n)
        for k, c in enumerate(coeffs):
            if c:
                row = table[k % n]
                c = Fraction(c)
                for j, x in enumerate(row):
                    if x:
                        acc[j] += c * x
        return _canonical(n, acc)

    # -- parsing / printing -------------------------------------------------

    _TERM = re.compile(r"^\s*([+-]?\s*[0-9]+(?:/[0-9]+)?)?\s*\*?\s*(?:z\((\d+)\)(?:\^(\d+))?)?\s*$")

    @classmethod
    def parse(cls, text: str) -> "CycNum":
        """Inverse of ``str``; also accepts plain rationals like ``'-3/4'``."""
        text = text.strip()
        if not text:
            raise ValueError("empty CycNum literal")
        total = CycNum(0)
        for part in re.split(r"\s\+\s", text):
            m = cls._TERM.match(part)
            if not m or (m.group(1) is None and m.group(2) is None):
                raise ValueError(f"bad CycNum term {part!r}")
            coef = Fraction(m.group(1).replace(" ", "")) if m.group(1) else Fraction(1)
            if m.group(2) is not None:
                n = int(m.group(2))
                k = int(m.group(3)) if m.group(3) is not None else 1
                total = total + coef * root_of_unity(n, k)
            else:
                total = total + coef
        return total

    def __str__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            if k == 0:
                terms.append(str(c))
            else:
                terms.append(f"{c}*z({self.N})^{k}")
        return " + ".join(terms) if terms else "0"

    def __repr__(self) -> str:
        return f"CycNum({str(self)!r})"

    # -- predicates ---------------------------------------------------------

    def is_rational(self) -> bool:
        return self.N == 1

    def to_fraction(self) -> Fraction:
        if self.N != 1:
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, CycNum):
            return self.N == other.N and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.N == 1 and self.coeffs[0] == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            if self.N == 1:
                self._hash = hash(self.coeffs[0])
            else:
                self._hash = hash((self.N, self.coeffs))
        return self._hash

    def sort_key(self) -> tuple:
        return (self.N, self.coeffs)

    # -- arithmetic ---------------------------------------------------------

    def _lift(self, n: int) -> list[Fraction]:
        """Coordinates of self in Q(zeta_n), where self.N divides n."""
        if self.N == n:
            return list(self.coeffs)
        table = _power_table(n)
        step = n // self.N
        acc = [Fraction(0)] * totient(n)
        for k, c in enumerate(self.coeffs):
            if c:
                row = table[(k * step) % n]
                for j, x in enumerate(row):
                    if x:
                        acc[j] += c * x
        return acc

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if self.N == 1 and other.N == 1:
            return CycNum._raw(1, (self.coeffs[0] + other.coeffs[0],))
        n = _lcm_conductor(self.N, other.N)
        a, b = self._lift(n), other._lift(n)
        return _canonical(n, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return CycNum._raw(self.N, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if self.N == 1 and other.N == 1:
            return CycNum._raw(1, (self.coeffs[0] * other.coeffs[0],))
        if other.N == 1:
            c = other.coeffs[0]
            return _canonical(self.N, [x * c for x in self.coeffs]) if c else CycNum(0)
        if self.N == 1:
            return other * self
        n = _lcm_conductor(self.N, other.N)
        a, b = self._lift(n), other._lift(n)
        table = _power_table(n)
        acc = [Fraction(0)] * totient(n)
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                if y:
                    c = x * y
                    for k, t in enumerate(table[(i + j) % n]):
                        if t:
                            acc[k] += c * t
        return _canonical(n, acc)

    __rmul__ = __mul__

    def inv(self) -> "CycNum":
        if not self:
            raise ZeroDivisionError("inverse of zero CycNum")
        if self.N == 1:
            return CycNum._raw(1, (1 / self.coeffs[0],))
        from .linalg import solve

        n = self.N
        phi = totient(n)
        # columns: coordinates of self * zeta^j
        cols = []
        for j in range(phi):
            cols.append((self * root_of_unity(n, j))._lift(n))
        mat = [[cols[j][i] for j in range(phi)] for i in range(phi)]
        rhs = [Fraction(1)] + [Fraction(0)] * (phi - 1)
        x = solve(mat, rhs)
        return CycNum.from_coeffs(n, x)

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inv()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inv()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inv() ** (-k)
        result, base = CycNum(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> "CycNum":
        """Complex conjugate (zeta -> zeta^-1)."""
        if self.N == 1:
            return self
        n = self.N
        out = [Fraction(0)] * n
        for k, c in enumerate(self.coeffs):
            out[(-k) % n] = c
        return CycNum.from_coeffs(n, out)

    def __complex__(self) -> complex:
        return complex_embedding(self)


def _coerce(x):
    if isinstance(x, CycNum):
        return x
    if isinstance(x, (int, Fraction)):
        return CycNum._raw(1, (Fraction(x),))
    return NotImplemented


def _check_conductor(n: int) -> None:
    if _normal_conductor(n) > MAX_CONDUCTOR:
        raise ConductorLimitError(f"conductor {n} exceeds limit {MAX_CONDUCTOR}")


def _lcm_conductor(a: int, b: int) -> int:
    n = a * b // math.gcd(a, b)
    if n > MAX_CONDUCTOR:
        raise ConductorLimitError(f"conductor {n} exceeds limit {MAX_CONDUCTOR}")
    return n


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def _canonical(n: int, coeffs: list) -> CycNum:
    """Reduce the coordinates (in Q(zeta_n)) to the minimal conductor."""
    if n == 1:
        return CycNum._raw(1, (Fraction(coeffs[0]),))
    if not any(coeffs[1:]):
        return CycNum._raw(1, (Fraction(coeffs[0]),))
    for m in _divisors(n):
        if m == n:
            break
        if m % 4 == 2:
            continue
        basis, piv, inv = _subfield_projector(n, m)
        vp = [coeffs[c] for c in piv]
        x = [sum((vp[i] * inv[i][k] for i in range(len(vp))), Fraction(0)) for k in range(len(basis))]
        ok = True
        for j in range(len(coeffs)):
            s = sum((x[k] * basis[k][j] for k in range(len(basis)) if x[k]), Fraction(0))
            if s != coeffs[j]:
                ok = False
                break
        if ok:
            if m == 1:
                return CycNum._raw(1, (x[0],))
            return CycNum._raw(m, tuple(x))
    if n % 4 == 2:
        # Q(zeta_n) = Q(zeta_{n/2}); unreachable for canonical inputs
        raise AssertionError("conductor congruent to 2 mod 4 survived reduction")
    return CycNum._raw(n, tuple(Fraction(c) for c in coeffs))


def root_of_unity(n: int, k: int = 1) -> CycNum:
    """zeta_n^k with zeta_n = exp(2 pi i / n)."""
    if n < 1:
        raise ValueError("order must be positive")
    k %= n
    g = math.gcd(k, n)
    n, k = n // g, k // g
    if n == 1:
        return CycNum(1)
    if n == 2:
        return CycNum(-1)
    if n % 4 == 2:
        # zeta_{2m} = -zeta_m^{(m+1)/2} for odd m
        m = n // 2
        base = root_of_unity(m, (k * (m + 1) // 2) % m if k else 0)
        return -base if k % 2 else base
    _check_conductor(n)
    coeffs = [0] * (k + 1)
    coeffs[k] = 1
    return CycNum.from_coeffs(n, coeffs)


def is_root_of_unity(a: CycNum) -> int | None:
    """Multiplicative order of ``a`` if it is a root of unity, else None."""
    a = CycNum(a) if not isinstance(a, CycNum) else a
    if not a:
        raise ValueError("zero is not a unit")
    bound = a.N if a.N % 2 == 0 else 2 * a.N
    for k in _divisors(bound):
        if a ** k == 1:
            return k
    return None


def complex_embedding(a) -> complex:
    """Evaluate at zeta_N = exp(2 pi i / N)."""
    if not isinstance(a, CycNum):
        return complex(a)
    if a.N == 1:
        return complex(float(a.coeffs[0]))
    total = 0j
    for k, c in enumerate(a.coeffs):
        if c:
            total += float(c) * cmath.exp(2j * math.pi * k / a.N)
    return total
