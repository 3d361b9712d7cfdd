import sympy
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from polarhecke.cyclotomic import cyclotomic_poly
from polarhecke.poly import inflate, pmul, ppow
from polarhecke.rankone import (
    RankOneDatum,
    carousel_matrix,
    companion_matrix,
    inflate_relation,
    roots_of_unity_check,
)

z = sympy.Symbol("z")


@st.composite
def data(draw):
    n = draw(st.integers(min_value=1, max_value=12))
    m = draw(st.sampled_from([d for d in range(1, n + 1) if n % d == 0]))
    k = n // m
    low = draw(st.lists(st.integers(min_value=-3, max_value=3), min_size=k, max_size=k))
    return RankOneDatum(orbit=0, n=n, m=m, rtilde=tuple(low) + (1,))


def sym_poly(p):
    return sympy.Poly(list(reversed(p)), z)


@given(data())
def test_carousel_min_poly_is_inflated_relation(datum):
    mat, mp = carousel_matrix(datum)
    assert mp == inflate_relation(datum) == inflate(datum.rtilde, datum.m)
    # independent check with sympy: R~(M^m) = 0 and degree is n
    M = sympy.Matrix(mat)
    assert M.shape == (datum.n, datum.n)
    Mm = M ** datum.m
    acc = sympy.zeros(datum.n)
    for k, c in enumerate(datum.rtilde):
        acc += c * Mm ** k
    assert acc == sympy.zeros(datum.n)
    # charpoly equals R(z) and is the minimal polynomial: degree n, cyclic vector e_0
    assert M.charpoly(z).as_expr().expand() == sym_poly(mp).as_expr().expand()
    krylov = sympy.Matrix.hstack(*[M ** j * sympy.eye(datum.n)[:, 0] for j in range(datum.n)])
    assert krylov.rank() == datum.n


@given(st.integers(min_value=1, max_value=12))
def test_global_type(n):
    d = RankOneDatum(orbit=0, n=n, m=n, rtilde=(-1, 1), kind="global")
    assert inflate_relation(d) == (-1,) + (0,) * (n - 1) + (1,)
    ok, orders = roots_of_unity_check(inflate_relation(d))
    assert ok and sorted(orders) == sorted(j for d_ in range(1, n + 1) if n % d_ == 0 for j in [d_] * int(sympy.totient(d_)))


def test_companion_matrix():
    c = companion_matrix((-1, 0, 1))
    assert sympy.Matrix(c).charpoly(z).as_expr() == z ** 2 - 1


@given(st.lists(st.sampled_from([1, 2, 3, 4, 6]), min_size=1, max_size=3))
def test_roots_of_unity_check(ds):
    p = (1,)
    for d in ds:
        p = pmul(p, cyclotomic_poly(d))
    ok, orders = roots_of_unity_check(p)
    assert ok
    roots = sympy.Poly(list(reversed(p)), z).all_roots()
    numeric = sorted(min(k for k in range(1, 13) if abs(complex(r) ** k - 1) < 1e-9) for r in roots)
    assert sorted(orders) == numeric


def test_non_unit_roots():
    assert roots_of_unity_check((-2, 1)) == (False, [])
    assert roots_of_unity_check(ppow((1, 1), 2))[0]


def test_validation():
    with pytest.raises(ValueError):
        RankOneDatum(orbit=0, n=4, m=3, rtilde=(-1, 1))
    with pytest.raises(ValueError):
        RankOneDatum(orbit=0, n=4, m=2, rtilde=(-1, 1))
    with pytest.raises(ValueError):
        RankOneDatum(orbit=0, n=2, m=1, rtilde=(-1, 0, 2))
    with pytest.raises(ValueError):
        RankOneDatum(orbit=0, n=2, m=1, rtilde=(-1, 0, 1), kind="global")
    d = RankOneDatum(orbit=1, n=6, m=2, rtilde=(1, 1, 0, 1))
    assert RankOneDatum.from_dict(d.to_dict()) == d
