"""Exact linear algebra over Q and Q(zeta_N).

Dense helpers work on lists of lists and only use field operations, so the
entries may be ``Fraction`` or :class:`~polarhecke.cyclotomic.CycNum`.  Large
rational problems (trace forms, centres of algebras of dimension in the
hundreds) go through sympy's sparse ``DomainMatrix`` over QQ instead.

Sparse vectors are plain ``dict[int, coeff]`` with zero entries removed.
"""

from __future__ import annotations

from fractions import Fraction

__all__ = [
    "rref",
    "rank",
    "nullspace",
    "solve",
    "inverse",
    "matmul",
    "matvec",
    "identity",
    "charpoly",
    "det",
    "rank_qq",
    "nullspace_dim_qq",
    "vadd",
    "vscale",
    "krylov_min_poly",
    "matrix_min_poly",
]

# Above this many rows*cols, rational problems are handed to sympy.
_SYMPY_THRESHOLD = 40 * 40


def identity(n: int, one=Fraction(1), zero=Fraction(0)) -> list[list]:
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def matmul(a: list[list], b: list[list]) -> list[list]:
    bt = list(zip(*b))
    out = []
    for row in a:
        nz = [(k, x) for k, x in enumerate(row) if x]
        out.append([_dot_nz(nz, col) for col in bt])
    return out


def _dot_nz(nz, col):
    s = 0
    for k, x in nz:
        y = col[k]
        if y:
            s = x * y + s
    return s if not isinstance(s, int) else Fraction(s)


def matvec(a: list[list], v: list) -> list:
    return [_dot_nz([(k, x) for k, x in enumerate(row) if x], v) for row in a]


def rref(rows: list[list]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form (in place on a copy) and pivot columns."""
    m = [list(r) for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv if x else x for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                pr = m[r]
                m[i] = [x - f * y if y else x for x, y in zip(m[i], pr)]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows: list[list]) -> int:
    if rows and _all_rational(rows) and len(rows) * len(rows[0]) > _SYMPY_THRESHOLD:
        return rank_qq(rows)
    return len(rref(rows)[1])


def nullspace(rows: list[list], ncols: int | None = None) -> list[list]:
    """Basis of {x : rows @ x = 0}; each basis vector has a 1 at a free column."""
    if not rows:
        if ncols is None:
            raise ValueError("need ncols for an empty matrix")
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    ncols = len(rows[0])
    red, piv = rref(rows)
    zero = Fraction(0)
    free = [c for c in range(ncols) if c not in set(piv)]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = Fraction(1)
        for i, p in enumerate(piv):
            if red[i][f]:
                v[p] = -red[i][f]
        basis.append(v)
    return basis


def solve(a: list[list], b: list) -> list:
    """Solve a x = b for square nonsingular a."""
    n = len(a)
    aug = [list(a[i]) + [b[i]] for i in range(n)]
    red, piv = rref(aug)
    if len(piv) < n or piv[-1] == n:
        raise ZeroDivisionError("singular system")
    return [red[i][n] for i in range(n)]


def inverse(a: list[list]) -> list[list]:
    n = len(a)
    one, zero = Fraction(1), Fraction(0)
    aug = [list(a[i]) + [one if i == j else zero for j in range(n)] for i in range(n)]
    red, piv = rref(aug)
    if len(piv) < n or piv[n - 1] != n - 1:
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in red]


def det(a: list[list]):
    """Determinant by elimination (field entries)."""
    m = [list(r) for r in a]
    n = len(m)
    result = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c]), None)
        if p is None:
            return Fraction(0) * result
        if p != c:
            m[c], m[p] = m[p], m[c]
            result = -result
        piv = m[c][c]
        result = result * piv
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] / piv
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return result


def charpoly(a: list[list]) -> list:
    """Coefficients of det(t I - a), constant term first (Faddeev-LeVerrier)."""
    n = len(a)
    coeffs = [None] * (n + 1)
    coeffs[n] = Fraction(1)
    m = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{n-k+1} I
        if k == 1:
            m = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        else:
            m = matmul(a, m)
            c = coeffs[n - k + 1]
            for i in range(n):
                m[i][i] = m[i][i] + c
        am = matmul(a, m)
        tr = sum((am[i][i] for i in range(n)), Fraction(0))
        coeffs[n - k] = -tr / k
    return coeffs


def _all_rational(rows) -> bool:
    for r in rows:
        for x in r:
            if not isinstance(x, (int, Fraction)):
                if getattr(x, "N", None) != 1:
                    return False
    return True


def _to_qq(x):
    from sympy import QQ

    if isinstance(x, Fraction):
        return QQ(x.numerator, x.denominator)
    if isinstance(x, int):
        return QQ(x)
    f = x.to_fraction()
    return QQ(f.numerator, f.denominator)


def _domain_matrix(rows, ncols=None):
    from sympy import QQ
    from sympy.polys.matrices import DomainMatrix

    nrows = len(rows)
    ncols = len(rows[0]) if ncols is None else ncols
    data = {}
    for i, r in enumerate(rows):
        items = r.items() if isinstance(r, dict) else enumerate(r)
        d = {j: _to_qq(x) for j, x in items if x}
        if d:
            data[i] = d
    return DomainMatrix(data, (nrows, ncols), QQ)


def rank_qq(rows, ncols: int | None = None) -> int:
    """Exact rank of a rational matrix; rows may be dense lists or sparse dicts."""
    if not rows:
        return 0
    return _domain_matrix(rows, ncols).rank()


def nullspace_dim_qq(rows, ncols: int) -> int:
    if not rows:
        return ncols
    return ncols - rank_qq(rows, ncols)


# -- sparse vectors ---------------------------------------------------------


def vadd(acc: dict, v: dict, c=1) -> dict:
    """acc += c * v (in place); returns acc."""
    for k, x in v.items():
        y = acc.get(k, 0) + c * x
        if y:
            acc[k] = y
        else:
            acc.pop(k, None)
    return acc


def vscale(v: dict, c) -> dict:
    if not c:
        return {}
    return {k: c * x for k, x in v.items()}


# -- minimal polynomials ----------------------------------------------------


def krylov_min_poly(apply, v0: dict) -> list:
    """Monic minimal polynomial of the vector ``v0`` under a linear map.

    ``apply`` maps a sparse vector to a sparse vector.  Returns coefficients
    constant term first.  The Krylov sequence v0, A v0, ... is reduced
    against an echelon basis until the first dependency appears.
    """
    # echelon rows: pivot -> (vector, combination expressing it in Krylov terms)
    echelon: list[tuple[int, dict, dict]] = []
    v = dict(v0)
    k = 0
    while True:
        comb = {k: Fraction(1)}
        w = dict(v)
        for piv, row, rcomb in echelon:
            c = w.get(piv)
            if c:
                vadd(w, row, -c)
                vadd(comb, rcomb, -c)
        if not w:
            # A^k v0 = -sum_{j<k} comb[j] A^j v0  ->  poly = sum comb[j] t^j
            return [comb.get(j, Fraction(0)) for j in range(k + 1)]
        piv = min(w)
        c = w[piv]
        inv = 1 / c
        echelon.append((piv, vscale(w, inv), vscale(comb, inv)))
        v = apply(v)
        k += 1


def matrix_min_poly(a: list[list]) -> list:
    """Minimal polynomial of a dense square matrix: lcm of the local ones."""
    from .poly import plcm

    n = len(a)
    cols = [{i: a[i][j] for i in range(n) if a[i][j]} for j in range(n)]

    def apply(v):
        out: dict = {}
        for j, x in v.items():
            vadd(out, cols[j], x)
        return out

    result = [Fraction(1)]
    for j in range(n):
        local = krylov_min_poly(apply, {j: Fraction(1)})
        result = plcm(result, local)
        if len(result) - 1 == n:
            break
    return result
