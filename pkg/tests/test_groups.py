import cmath
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from polarhecke.groups import (
    GroupOrderExceeded,
    ReflectionGroupSpec,
    coxeter_matrix,
    enumerate_group,
    hyperplane_stabilizer_orders,
    invariant_degrees,
    rank_of_action,
)

C = ReflectionGroupSpec.coxeter

# (spec, order, degrees) from the closed-form classification tables
TABLE = [
    (C("A", 1), 2, [2]),
    (C("A", 2), 6, [2, 3]),
    (C("A", 3), 24, [2, 3, 4]),
    (C("A", 4), 120, [2, 3, 4, 5]),
    (C("B", 2), 8, [2, 4]),
    (C("B", 3), 48, [2, 4, 6]),
    (C("D", 4), 192, [2, 4, 4, 6]),
    (C("I", 2, 5), 10, [2, 5]),
    (C("I", 2, 6), 12, [2, 6]),
    (C("H", 3), 120, [2, 6, 10]),
    (ReflectionGroupSpec.cyclic(5), 5, [5]),
    (ReflectionGroupSpec.imprimitive(3, 2), 18, [3, 6]),
    (ReflectionGroupSpec.imprimitive(4, 2), 32, [4, 8]),
    (ReflectionGroupSpec.imprimitive(2, 3), 48, [2, 4, 6]),
]


@pytest.mark.parametrize("spec,order,degrees", TABLE, ids=[t[0].label for t in TABLE])
def test_order_and_degrees(spec, order, degrees):
    g = enumerate_group(spec)
    assert g.order == order
    assert invariant_degrees(g) == degrees
    assert math.prod(degrees) == g.order
    assert sum(d - 1 for d in degrees) == len(g.reflections)
    assert rank_of_action(g) == len(degrees)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_closed_form_order_formulas(n):
    assert enumerate_group(C("A", n)).order == math.factorial(n + 1)
    if n >= 2:
        assert enumerate_group(C("B", n)).order == 2 ** n * math.factorial(n)
        assert enumerate_group(C("D", n)).order == 2 ** (n - 1) * math.factorial(n)
    if n <= 3:
        for m in (2, 3):
            assert enumerate_group(ReflectionGroupSpec.imprimitive(m, n)).order == m ** n * math.factorial(n)


def test_f4_order():
    assert enumerate_group(C("F", 4)).order == 1152


def test_generated_group_honours_coxeter_matrix():
    # order of s_i s_j computed directly from matrices, independent of the table
    for spec in [C("A", 3), C("B", 3), C("H", 3), C("I", 2, 7)]:
        g = enumerate_group(spec)
        cm = coxeter_matrix(spec)
        gi = g.generator_index
        for i in range(spec.rank):
            for j in range(spec.rank):
                x = g.multiply(gi[i], gi[j])
                k, y = 1, x
                while y != g.identity_index:
                    y, k = g.multiply(y, x), k + 1
                assert k == cm[i][j]


def test_reflections_and_primitivity():
    # G(4,1,2): tau^k on either coordinate line (k = 1, 2, 3) plus the
    # four transposition-type reflections (i j) twisted by i^a
    g = enumerate_group(ReflectionGroupSpec.imprimitive(4, 2))
    orders = sorted(r.order for r in g.reflections)
    assert orders == [2] * 6 + [4] * 4
    nh = hyperplane_stabilizer_orders(g)
    assert sorted(nh.values()) == [2, 4]
    prim = [r for r in g.reflections if r.primitive]
    # primitive: eigenvalue exp(2 pi i / n_H), one per hyperplane
    assert len(prim) == len({r.root_form for r in g.reflections})
    for r in prim:
        assert r.order == nh[r.orbit]
        assert abs(complex(r.eigenvalue) - cmath.exp(2j * math.pi / r.order)) < 1e-12


def test_orbits_of_generators():
    assert len(set(enumerate_group(C("A", 3)).generator_orbits())) == 1
    assert len(set(enumerate_group(C("B", 3)).generator_orbits())) == 2
    assert len(set(enumerate_group(C("I", 2, 6)).generator_orbits())) == 2
    assert len(set(enumerate_group(C("I", 2, 5)).generator_orbits())) == 1


@given(st.integers(min_value=2, max_value=12))
def test_cyclic_is_rank_one(m):
    g = enumerate_group(ReflectionGroupSpec.cyclic(m))
    assert g.order == m
    assert invariant_degrees(g) == [m]
    assert hyperplane_stabilizer_orders(g) == {g.reflections[0].orbit: m}


def test_spec_round_trip_and_errors():
    for spec, _, _ in TABLE:
        assert ReflectionGroupSpec.from_dict(spec.to_dict()) == spec
    ex = ReflectionGroupSpec.explicit([[[0, 1], [1, 0]]])
    assert ReflectionGroupSpec.from_dict(ex.to_dict()) == ex
    with pytest.raises(ValueError):
        ReflectionGroupSpec("Q", 2)
    with pytest.raises(ValueError):
        C("H", 5)
    with pytest.raises(ValueError):
        ReflectionGroupSpec.from_dict({"rank": 2})
    with pytest.raises(GroupOrderExceeded):
        enumerate_group(C("A", 4), order_cap=50)


def test_non_reflection_action_rejected():
    # scalar -1 on C^2 is not generated by reflections
    g = enumerate_group(ReflectionGroupSpec.explicit([[[-1, 0], [0, -1]]]))
    with pytest.raises(ValueError):
        invariant_degrees(g)
