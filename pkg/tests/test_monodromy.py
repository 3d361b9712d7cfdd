import cmath
import math

import numpy as np
import pytest

from polarhecke.monodromy import (
    LoopSpec,
    ModelError,
    PolarModel,
    Segment,
    TrackingError,
    available_backends,
    braid_generator_loop,
    builtin_model,
    carousel_report,
    critical_points,
    full_turn_loop,
    identity_loop,
    normal_crossings,
    quadric,
    symmetric_matrices,
    track_loop,
)
from polarhecke.monodromy import kernel
from polarhecke.monodromy.tracker import (
    compose,
    cycle_type,
    expected_wall_permutation,
    permutation_closure,
    random_loop,
    right_regular_action,
    single_linkage_clusters,
    small_circle_loop,
)

BACKENDS = available_backends()


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


def model_cases():
    return [quadric(2), quadric(3), normal_crossings(3), symmetric_matrices(2), symmetric_matrices(3)]


def test_backends_available():
    assert "python" in BACKENDS
    assert kernel.backend_name() in BACKENDS


# -- critical points against closed-form solutions ---------------------------


def test_critical_points_quadric():
    crit = critical_points(quadric(3), np.array([1.0 + 0j]))
    assert sorted(crit.points[:, 0].real.round(12)) == [-1.0, 1.0]
    assert sorted(crit.values.real.round(12)) == [-1.0, 1.0]
    assert crit.residual <= 1e-12


def test_critical_points_normal_crossings():
    crit = critical_points(normal_crossings(3), np.array([1.0 + 0j]))
    omega = cmath.exp(2j * math.pi / 3)
    expected = [omega ** k for k in range(3)]
    for p in crit.points:
        # the Cartan coordinate a gives the diagonal point (a, a, a) with a^3 = 1
        assert min(abs(p[0] - e) for e in expected) < 1e-12
    assert len({complex(round(p[0].real, 9), round(p[0].imag, 9)) for p in crit.points}) == 3


def test_critical_points_symmetric_2x2():
    m = symmetric_matrices(2)
    crit = critical_points(m, np.array([0.0 + 0j, -1.0 + 0j]))
    pts = sorted(tuple(np.round(p.real, 12)) for p in crit.points)
    assert pts == [(-1.0, 1.0), (1.0, -1.0)]
    assert crit.residual <= 1e-12


def test_critical_point_errors():
    with pytest.raises(TrackingError) as exc:
        critical_points(quadric(2), np.array([0j]))
    assert exc.value.kind in ("orbit", "newton")


# -- closed-form loop examples --------------------------------------------------


def test_full_turns(backend):
    assert track_loop(quadric(2), full_turn_loop(quadric(2)), backend=backend).permutation == [1, 0]
    res = track_loop(normal_crossings(3), full_turn_loop(normal_crossings(3)), backend=backend)
    assert cycle_type(res.permutation) == [3]
    two = track_loop(quadric(2), full_turn_loop(quadric(2), turns=2), backend=backend)
    assert two.permutation == [0, 1]
    with pytest.raises(ValueError):
        full_turn_loop(symmetric_matrices(3))


@pytest.mark.parametrize("model", model_cases(), ids=lambda m: m.name)
def test_identity_loop(model, backend):
    res = track_loop(model, identity_loop(model), backend=backend)
    assert res.permutation == list(range(model.group.order))


@pytest.mark.parametrize("model", model_cases(), ids=lambda m: m.name)
def test_wall_loops_match_exact_action(model, backend):
    crit = critical_points(model, backend=backend)
    assert crit.size == model.group.order
    perms = []
    for k, wall in enumerate(model.walls):
        res = track_loop(model, braid_generator_loop(model, wall=k), crit, backend=backend)
        assert res.permutation == expected_wall_permutation(model, k)
        assert res.max_residual <= 1e-10
        assert res.extra["margin_ok"]
        order = math.lcm(*cycle_type(res.permutation))
        g = model.group
        s = g.generator_index[wall.generator]
        ns, x = 1, s
        while x != g.identity_index:
            x, ns = g.multiply(x, s), ns + 1
        assert ns % order == 0
        perms.append(res.permutation)
    assert permutation_closure(perms) == right_regular_action(model)
    assert len(permutation_closure(perms)) == model.group.order


def test_quadric_wall_loop_is_a_half_turn(backend):
    m = quadric(2)
    loop = braid_generator_loop(m)
    assert loop.tag == "wall-half-turn"
    assert track_loop(m, loop, backend=backend).permutation == [1, 0]
    # composing with an honest half-turn of lambda back gives a full turn
    assert track_loop(m, loop * loop, backend=backend).permutation == [0, 1]


def test_cyclic_normal_crossings_wall_loop(backend):
    m = normal_crossings(3)
    res = track_loop(m, braid_generator_loop(m), backend=backend)
    assert cycle_type(res.permutation) == [3]


@pytest.mark.parametrize("model", [quadric(2), normal_crossings(3), symmetric_matrices(3)], ids=lambda m: m.name)
def test_homomorphism_on_random_pairs(model, backend):
    rng = np.random.default_rng(20261014)
    crit = critical_points(model, backend=backend)
    for _ in range(4):
        g1, g2 = random_loop(model, rng), random_loop(model, rng)
        p1 = track_loop(model, g1, crit, backend=backend).permutation
        p2 = track_loop(model, g2, crit, backend=backend).permutation
        p12 = track_loop(model, g1 * g2, crit, backend=backend).permutation
        assert p12 == compose(p2, p1)


def test_inverse_loop(backend):
    m = symmetric_matrices(3)
    crit = critical_points(m, backend=backend)
    loop = braid_generator_loop(m, wall=0)
    p = track_loop(m, loop, crit, backend=backend).permutation
    q = track_loop(m, loop.inverse(), crit, backend=backend).permutation
    assert compose(q, p) == list(range(len(p)))


def test_small_circle_is_trivial(backend):
    m = symmetric_matrices(3)
    res = track_loop(m, small_circle_loop(m, [1.0, 0.3j, -0.2], 0.05), backend=backend)
    assert res.permutation == list(range(6))


@pytest.mark.parametrize("model", [quadric(2), normal_crossings(3), symmetric_matrices(3)], ids=lambda m: m.name)
def test_halved_steps_change_nothing(model, backend):
    crit = critical_points(model, backend=backend)
    rng = np.random.default_rng(7)
    loops = [braid_generator_loop(model, wall=k) for k in range(len(model.walls))] + [random_loop(model, rng) for _ in range(3)]
    for loop in loops:
        a = track_loop(model, loop, crit, backend=backend)
        b = track_loop(model, loop, crit, backend=backend, h0=0.005, h_max=0.01)
        assert a.permutation == b.permutation
        assert sum(b.steps) >= sum(a.steps)


def test_backends_agree():
    if len(BACKENDS) < 2:
        pytest.skip("compiled kernel not built")
    m = symmetric_matrices(3)
    runs = {be: track_loop(m, braid_generator_loop(m, wall=1), backend=be) for be in BACKENDS}
    perms = {be: r.permutation for be, r in runs.items()}
    assert len({tuple(p) for p in perms.values()}) == 1
    steps = {be: tuple(r.steps) for be, r in runs.items()}
    assert len(set(steps.values())) == 1
    ends = [r.endpoints for r in runs.values()]
    assert np.allclose(ends[0], ends[1], atol=1e-12)


def test_workers_give_same_result():
    m = symmetric_matrices(3)
    loop = braid_generator_loop(m, wall=0)
    assert track_loop(m, loop, workers=3).permutation == track_loop(m, loop).permutation


# -- carousel -------------------------------------------------------------------


@pytest.mark.parametrize(
    "model,sizes",
    [(quadric(2), [2]), (normal_crossings(3), [3]), (symmetric_matrices(3), [2, 2, 2])],
    ids=lambda x: getattr(x, "name", str(x)),
)
def test_carousel(model, sizes, backend):
    for wall in range(len(model.walls)):
        rep = carousel_report(model, wall=wall, backend=backend)
        assert rep["cluster_sizes"] == sizes
        assert rep["expected_clusters"] == len(sizes)
        assert all(rep["cyclic_in_each_cluster"])
        assert rep["ok"]
        if len(sizes) > 1:
            assert rep["gap_ratio"] >= 5


def test_single_linkage():
    vals = [0, 0.01, 10, 10.02, 20 + 0.01j, 20]
    clusters, ratio = single_linkage_clusters(vals)
    assert clusters == [[0, 1], [2, 3], [4, 5]] and ratio > 5
    clusters, _ = single_linkage_clusters([0, 1, 2, 3])
    assert clusters == [[0, 1, 2, 3]]
    assert single_linkage_clusters([1j]) == ([[0]], math.inf)


def test_carousel_without_gap_raises():
    with pytest.raises(TrackingError) as exc:
        carousel_report(symmetric_matrices(3), wall=0, eps=0.8)
    assert exc.value.kind == "cluster"


# -- errors and data ----------------------------------------------------------


def test_step_cap(backend):
    m = symmetric_matrices(3)
    with pytest.raises(TrackingError) as exc:
        track_loop(m, braid_generator_loop(m), backend=backend, max_steps=5)
    assert exc.value.kind == "step_cap"


def test_open_loop_rejected():
    m = quadric(2)
    lam = m.evaluate(m.basepoint_numeric())[0]
    loop = LoopSpec([Segment("Q", "line", lam, np.array([0.5 + 0j]))], lam)
    with pytest.raises(ValueError):
        track_loop(m, loop)
    with pytest.raises(TypeError):
        track_loop(m, identity_loop(m), not_an_option=1)
    with pytest.raises(ValueError):
        LoopSpec([], lam, tag="bogus")


def test_loop_through_discriminant_fails(backend):
    # straight line from lambda through 0 and back sits on the discriminant
    m = quadric(2)
    lam = m.evaluate(m.basepoint_numeric())[0]
    loop = LoopSpec([Segment("Q", "line", lam, -2 * lam), Segment("Q", "line", -lam, 2 * lam)], lam)
    with pytest.raises(TrackingError) as exc:
        track_loop(m, loop, backend=backend)
    assert exc.value.kind in ("singular", "step_cap", "no_match")


def test_nonstable_model_rejected():
    d = quadric(2).to_dict()
    d["stable"] = False
    with pytest.raises(ValueError):
        carousel_report(PolarModel.from_dict(d))


def test_model_round_trip_and_validation():
    for m in model_cases() + [builtin_model("determinant", n=3), builtin_model("symmetric_determinant", n=3)]:
        again = PolarModel.from_dict(m.to_dict())
        assert again.to_dict() == m.to_dict()
        assert m.validate()["w_invariant"]
        assert m.check_invariance()
    d = quadric(2).to_dict()
    d["invariants"] = [[{"coef": "1", "exps": [1, 0]}]]
    with pytest.raises(ModelError):
        PolarModel.from_dict(d).validate()
    d = quadric(2).to_dict()
    del d["weyl"]
    with pytest.raises(ModelError):
        PolarModel.from_dict(d)
    with pytest.raises(ModelError):
        PolarModel.from_dict({**quadric(2).to_dict(), "l": ["1"]})


def test_loop_serialisation(backend):
    m = symmetric_matrices(3)
    loop = braid_generator_loop(m, wall=1)
    again = LoopSpec.from_dict(loop.to_dict())
    assert track_loop(m, again, backend=backend).permutation == expected_wall_permutation(m, 1)


def test_pure_python_fallback_selected_at_import():
    import os
    import subprocess
    import sys

    env = dict(os.environ, POLARHECKE_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from polarhecke.monodromy import backend_name, available_backends; print(backend_name(), available_backends())"],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    ).stdout
    assert out.startswith("python ['python']")
