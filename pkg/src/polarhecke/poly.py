"""Dense univariate polynomials as coefficient tuples, constant term first.

Only field operations are used, so coefficients can be ints, Fractions or
CycNums.  Polynomials are always trimmed (no trailing zeros); the zero
polynomial is ``()``.
"""

from __future__ import annotations

from fractions import Fraction

from .cyclotomic import cyclotomic_poly, totient

__all__ = [
    "trim",
    "padd",
    "psub",
    "pmul",
    "ppow",
    "pdivmod",
    "pgcd",
    "plcm",
    "monic",
    "peval",
    "inflate",
    "cyclotomic_factorization",
    "pformat",
    "pformat_factored",
    "from_roots",
    "as_int_tuple",
]


def trim(p) -> tuple:
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return tuple(p)


def padd(a, b) -> tuple:
    n = max(len(a), len(b))
    return trim((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))


def psub(a, b) -> tuple:
    return padd(a, tuple(-x for x in b))


def pmul(a, b) -> tuple:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = out[i + j] + x * y
    return trim(out)


def ppow(a, k: int) -> tuple:
    out: tuple = (1,)
    for _ in range(k):
        out = pmul(out, a)
    return out


def pdivmod(a, b) -> tuple[tuple, tuple]:
    b = trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(trim(a))
    lead = b[-1]
    db = len(b) - 1
    if len(a) - 1 < db:
        return (), tuple(a)
    q = [0] * (len(a) - db)
    for k in range(len(a) - 1 - db, -1, -1):
        c = a[k + db]
        if c:
            if isinstance(c, int) and isinstance(lead, int):
                c = c // lead if c % lead == 0 else Fraction(c, lead)
            else:
                c = c / lead
            q[k] = c
            for j, y in enumerate(b):
                if y:
                    a[k + j] = a[k + j] - c * y
    return trim(q), trim(a[:db])


def monic(p) -> tuple:
    p = trim(p)
    if not p:
        return p
    lead = p[-1]
    if lead == 1:
        return p
    return tuple(Fraction(x) / lead if isinstance(x, int) else x / lead for x in p)


def pgcd(a, b) -> tuple:
    a, b = trim(a), trim(b)
    while b:
        a, b = b, pdivmod(a, b)[1]
    return monic(a)


def plcm(a, b) -> tuple:
    g = pgcd(a, b)
    q, r = pdivmod(pmul(a, b), g)
    assert not r
    return monic(q)


def peval(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def inflate(p, m: int) -> tuple:
    """p(z^m)."""
    out = [0] * ((len(p) - 1) * m + 1) if p else []
    for k, c in enumerate(p):
        out[k * m] = c
    return trim(out)


def from_roots(*factors: tuple[int, int]) -> tuple:
    """Product of (z - root)^mult for (root, mult) pairs with integer roots."""
    out: tuple = (1,)
    for root, mult in factors:
        out = pmul(out, ppow((-root, 1), mult))
    return out


def as_int_tuple(p) -> tuple[int, ...]:
    """Coefficients as ints; raises if some coefficient is not integral."""
    out = []
    for c in p:
        f = Fraction(c) if not hasattr(c, "to_fraction") else c.to_fraction()
        if f.denominator != 1:
            raise ValueError(f"non-integer coefficient {f}")
        out.append(int(f))
    return tuple(out)


def cyclotomic_factorization(p) -> list[tuple[int, int]] | None:
    """Write a monic rational polynomial as prod Phi_d^e.

    Returns [(d, e), ...] sorted by d, or None when some irreducible factor
    is not cyclotomic.  Trial division by Phi_d for phi(d) <= deg p.
    """
    p = monic(trim(p))
    if not p:
        raise ValueError("zero polynomial")
    deg = len(p) - 1
    factors = []
    # phi(d) >= sqrt(d / 2), so d <= 2 deg^2 covers every candidate
    d = 1
    while len(p) > 1 and d <= max(2, 2 * deg * deg):
        if totient(d) <= len(p) - 1:
            phi_d = cyclotomic_poly(d)
            e = 0
            while True:
                q, r = pdivmod(p, phi_d)
                if r:
                    break
                p, e = q, e + 1
            if e:
                factors.append((d, e))
        d += 1
    if len(p) > 1:
        return None
    return factors


def pformat(p, var: str = "z") -> str:
    """Human-readable form, e.g. ``'z^2 - 2*z + 1'``."""
    p = trim(p)
    if not p:
        return "0"
    parts = []
    for k in range(len(p) - 1, -1, -1):
        c = p[k]
        if not c:
            continue
        neg = (c < 0) if isinstance(c, (int, Fraction)) else False
        mag = -c if neg else c
        if k == 0:
            body = str(mag)
        else:
            mono = var if k == 1 else f"{var}^{k}"
            body = mono if mag == 1 else f"{mag}*{mono}"
        if not parts:
            parts.append(f"-{body}" if neg else body)
        else:
            parts.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(parts)


def pformat_factored(p, var: str = "z") -> str:
    """Cyclotomic factorisation when available, e.g. ``'(z - 1)^2*(z + 1)'``."""
    fac = cyclotomic_factorization(p)
    if fac is None:
        return pformat(p, var)
    pieces = []
    for d, e in fac:
        body = f"({pformat(cyclotomic_poly(d), var)})"
        pieces.append(body if e == 1 else f"{body}^{e}")
    return "*".join(pieces) if pieces else "1"
