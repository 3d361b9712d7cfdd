"""Critical points, loop lifting and carousel clusters on explicit polar models.

The covering F = f|_c : c^reg -> Q^reg has fibre Z = W.e_0 over each regular
value.  Loops in Q^reg are lifted point by point with the kernel from
``kernel``; the endpoints are matched back to Z to give a permutation of the
labels w (the point e_w = w e_0).
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..cyclotomic import CycNum
from . import kernel
from ._tracker_py import SEG_ARC, SEG_LINE, SPACE_C, SPACE_Q, STATUS_OK, STATUS_STEP_CAP
from .model import PolarModel

__all__ = [
    "TrackingError",
    "CriticalSet",
    "Segment",
    "LoopSpec",
    "TrackResult",
    "critical_points",
    "track_loop",
    "identity_loop",
    "full_turn_loop",
    "braid_generator_loop",
    "small_circle_loop",
    "random_loop",
    "wall_permutation",
    "expected_wall_permutation",
    "compose",
    "permutation_closure",
    "right_regular_action",
    "cycle_type",
    "single_linkage_clusters",
    "carousel_report",
    "DEFAULTS",
]

DEFAULTS = {
    "newton_tol": 1e-12,
    "step_tol": 1e-10,
    "match_radius": 1e-6,
    "separation": 1e-8,
    "gap_ratio": 5.0,
    "max_steps": 100000,
    "h0": 0.01,
    "h_max": 0.02,
    "det_floor": 1e-10,
}


class TrackingError(RuntimeError):
    """Numerical failure; ``kind`` is one of
    newton, orbit, step_cap, singular, ambiguous, no_match, cluster."""

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


def _cvec(v) -> np.ndarray:
    return np.array([complex(x) for x in v], dtype=complex)


def _enc(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex)]


def _dec(v) -> np.ndarray:
    return np.array([complex(x[0], x[1]) if isinstance(x, (list, tuple)) else complex(x) for x in v])


# -- critical points ---------------------------------------------------------


@dataclass
class CriticalSet:
    lam: np.ndarray
    points: np.ndarray  # row w is e_w = w e_0, rows indexed by group element index
    values: np.ndarray  # l(e_w)
    residual: float
    min_separation: float

    @property
    def size(self) -> int:
        return len(self.points)

    def to_dict(self) -> dict:
        return {
            "lambda": _enc(self.lam),
            "points": [_enc(p) for p in self.points],
            "critical_values": _enc(self.values),
            "max_residual": self.residual,
            "min_separation": self.min_separation,
        }


def _newton(model: PolarModel, packed, a, lam, tol, iters=50):
    from ._tracker_py import eval_system

    a = np.array(a, dtype=complex)
    for _ in range(iters):
        f, jac = eval_system(*packed, a)
        res = np.linalg.norm(f - lam)
        if res <= tol:
            return a, res
        try:
            a = a - np.linalg.solve(jac, f - lam)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(a)):
            break
    f, _ = eval_system(*packed, a)
    return a, float(np.linalg.norm(f - lam))


def critical_points(model: PolarModel, lam=None, seeds=None, tol: float | None = None, backend=None) -> CriticalSet:
    """All |W| solutions of F(a) = lam, by Newton from a seed plus W-orbit completion.

    Without ``lam`` the fibre through the model basepoint is used.  A seed
    that Newton cannot pull onto the fibre is continued along the segment
    from F(seed) to lam.
    """
    from ._tracker_py import eval_system

    tol = DEFAULTS["newton_tol"] if tol is None else tol
    packed = model.packed_system()
    if seeds is None:
        seeds = [model.basepoint_numeric()]
    seeds = [np.asarray(s, dtype=complex) for s in seeds]
    if lam is None:
        lam = eval_system(*packed, seeds[0])[0]
    lam = np.asarray(lam, dtype=complex)
    # tolerances are relative for small lambda
    scale = min(1.0, float(np.linalg.norm(lam)))
    e0, res = _newton(model, packed, seeds[0], lam, tol * scale)
    if res > tol * scale:
        f_seed = eval_system(*packed, seeds[0])[0]
        seg = Segment("Q", "line", f_seed, lam - f_seed)
        end, _, _, _, status = _run_segment(packed, seeds[0], seg, backend, DEFAULTS)
        if status != STATUS_OK:
            raise TrackingError("newton", "Newton diverged and continuation from the seed failed")
        e0, res = _newton(model, packed, end, lam, tol * scale)
        if res > tol * scale:
            raise TrackingError("newton", f"Newton residual {res:.3g} above {tol:g}")
    mats = model.group.complex_matrices()
    points = np.array([m @ e0 for m in mats])
    worst = 0.0
    for k, p in enumerate(points):
        q, r = _newton(model, packed, p, lam, tol * scale, iters=3)
        points[k] = q
        worst = max(worst, r)
        _, jac = eval_system(*packed, q)
        if abs(np.linalg.det(jac)) <= DEFAULTS["det_floor"]:
            raise TrackingError("orbit", "singular Jacobian on the fibre: lambda is not a regular value")
    if worst > tol * scale:
        raise TrackingError("newton", f"orbit residual {worst:.3g} above {tol:g}")
    sep = math.inf
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            sep = min(sep, float(np.linalg.norm(points[i] - points[j])))
    if len(points) > 1 and sep <= DEFAULTS["separation"]:
        raise TrackingError("orbit", f"orbit points collide (separation {sep:.3g}); lambda too close to the discriminant")
    lc = _cvec(model.l_on_cartan())
    return CriticalSet(lam=lam, points=points, values=points @ lc, residual=worst, min_separation=sep)


# -- loops -------------------------------------------------------------------


@dataclass
class Segment:
    """One piece of a loop.

    ``space`` is "Q" (the path is given directly in Q) or "c" (the path is
    F applied to a path in c).  ``kind`` "line" means p(t) = c + t d;
    "arc" means p(t) = c + exp(i(theta0 + t dtheta)) d.  For arcs, ``turns``
    keeps the exact rotation dtheta / 2 pi.
    """

    space: str
    kind: str
    c: np.ndarray
    d: np.ndarray
    theta0: float = 0.0
    dtheta: float = 0.0
    turns: Fraction | None = None

    def __post_init__(self):
        if self.space not in ("Q", "c") or self.kind not in ("line", "arc"):
            raise ValueError(f"bad segment {self.space}/{self.kind}")
        self.c = np.asarray(self.c, dtype=complex)
        self.d = np.asarray(self.d, dtype=complex)

    def point(self, t: float) -> np.ndarray:
        if self.kind == "line":
            return self.c + t * self.d
        return self.c + cmath.exp(1j * (self.theta0 + t * self.dtheta)) * self.d

    def q_point(self, packed, t: float) -> np.ndarray:
        from ._tracker_py import eval_system

        p = self.point(t)
        return p if self.space == "Q" else eval_system(*packed, p)[0]

    def reversed(self) -> "Segment":
        if self.kind == "line":
            return Segment(self.space, "line", self.c + self.d, -self.d)
        return Segment(
            self.space,
            "arc",
            self.c,
            self.d,
            self.theta0 + self.dtheta,
            -self.dtheta,
            None if self.turns is None else -self.turns,
        )

    def to_dict(self) -> dict:
        out = {
            "space": self.space,
            "kind": self.kind,
            "c": _enc(self.c),
            "d": _enc(self.d),
            "theta0": self.theta0,
            "dtheta": self.dtheta,
        }
        if self.turns is not None:
            out["turns"] = str(self.turns)
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "Segment":
        turns = d.get("turns")
        dtheta = float(d.get("dtheta", 0.0))
        if turns is not None:
            turns = Fraction(turns)
            dtheta = 2 * math.pi * float(turns)
        return cls(d["space"], d["kind"], _dec(d["c"]), _dec(d["d"]), float(d.get("theta0", 0.0)), dtheta, turns)


@dataclass
class LoopSpec:
    segments: list
    basepoint: np.ndarray
    tag: str = "custom"
    orbit: int | None = None
    wall: int | None = None

    def __post_init__(self):
        if self.tag not in ("full-turn", "wall-half-turn", "custom"):
            raise ValueError(f"unknown loop tag {self.tag!r}")
        self.basepoint = np.asarray(self.basepoint, dtype=complex)

    def __mul__(self, other: "LoopSpec") -> "LoopSpec":
        """gamma1 * gamma2: first gamma1, then gamma2."""
        if np.linalg.norm(self.basepoint - other.basepoint) > 1e-12 * (1 + np.linalg.norm(self.basepoint)):
            raise ValueError("loops have different basepoints")
        return LoopSpec(self.segments + other.segments, self.basepoint, "custom")

    def inverse(self) -> "LoopSpec":
        return LoopSpec([s.reversed() for s in reversed(self.segments)], self.basepoint, self.tag, self.orbit, self.wall)

    def closure_error(self, model: PolarModel) -> float:
        """Largest mismatch between consecutive segment endpoints (and at lam)."""
        packed = model.packed_system()
        prev = self.basepoint
        worst = 0.0
        for s in self.segments:
            worst = max(worst, float(np.linalg.norm(s.q_point(packed, 0.0) - prev)))
            prev = s.q_point(packed, 1.0)
        return max(worst, float(np.linalg.norm(prev - self.basepoint)))

    def to_dict(self) -> dict:
        out = {"tag": self.tag, "basepoint": _enc(self.basepoint), "segments": [s.to_dict() for s in self.segments]}
        if self.orbit is not None:
            out["orbit"] = self.orbit
        if self.wall is not None:
            out["wall"] = self.wall
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "LoopSpec":
        return cls(
            [Segment.from_dict(s) for s in d["segments"]],
            _dec(d["basepoint"]),
            d.get("tag", "custom"),
            d.get("orbit"),
            d.get("wall"),
        )


def _base_lambda(model: PolarModel) -> np.ndarray:
    return model.evaluate(model.basepoint_numeric())[0]


def identity_loop(model: PolarModel) -> LoopSpec:
    lam = _base_lambda(model)
    return LoopSpec([Segment("Q", "line", lam, np.zeros_like(lam))], lam, "custom")


def full_turn_loop(model: PolarModel, turns: int = 1) -> LoopSpec:
    """lam * exp(2 pi i t) for one-dimensional Q (a loop around the origin)."""
    if model.rank != 1:
        raise ValueError("full-turn loops are defined for one-dimensional quotients")
    lam = _base_lambda(model)
    seg = Segment("Q", "arc", np.zeros(1), lam, 0.0, 2 * math.pi * turns, Fraction(turns))
    return LoopSpec([seg], lam, "full-turn")


def _reflection_data(model: PolarModel, wall_index: int):
    """(matrix, eigenvalue turns, oriented unit normal) for the wall's generator."""
    wall = model.walls[wall_index]
    g = model.weyl.generator_matrices()[wall.generator]
    r = model.rank
    minus = [[g[i][j] - (CycNum(1) if i == j else CycNum(0)) for j in range(r)] for i in range(r)]
    col = next((j for j in range(r) if any(minus[i][j] for i in range(r))), None)
    row = next((i for i in range(r) if any(minus[i])), None)
    if col is None:
        raise ValueError("wall generator is the identity")
    nu = _cvec([minus[i][col] for i in range(r)])
    alpha = _cvec(minus[row])
    mat = np.array([[complex(x) for x in rw] for rw in g])
    det = complex(np.linalg.det(mat))
    turns = Fraction(cmath.phase(det) / (2 * math.pi)).limit_denominator(1000)
    if turns <= 0:
        turns += 1
    v1 = _cvec(wall.v1)
    b = model.basepoint_numeric()
    ratio = (alpha @ (b - v1)) / (alpha @ nu)
    if abs(ratio) < 1e-14:
        raise ValueError("basepoint lies on the wall")
    nu = nu * (ratio / abs(ratio))
    nu = nu / np.linalg.norm(nu)
    return mat, turns, nu, v1


def braid_generator_loop(model: PolarModel, wall: int | None = None, orbit: int | None = None, delta: float = 0.25) -> LoopSpec:
    """F-image of b -> v1 + delta nu, a counterclockwise turn by arg(zeta) about
    the wall, then sigma applied to the first piece backwards."""
    if wall is None:
        choices = [k for k, w in enumerate(model.walls) if orbit is None or w.orbit == orbit]
        if not choices:
            raise ValueError(f"no wall with orbit {orbit}")
        wall = choices[0]
    mat, turns, nu, v1 = _reflection_data(model, wall)
    b = model.basepoint_numeric()
    p = v1 + delta * nu
    seg1 = Segment("c", "line", b, p - b)
    seg2 = Segment("c", "arc", v1, delta * nu, 0.0, 2 * math.pi * float(turns), turns)
    sp, sb = mat @ p, mat @ b
    seg3 = Segment("c", "line", sp, sb - sp)
    return LoopSpec([seg1, seg2, seg3], _base_lambda(model), "wall-half-turn", model.walls[wall].orbit, wall)


def small_circle_loop(model: PolarModel, direction, radius: float) -> LoopSpec:
    """lam + radius u (exp(2 pi i t) - 1) for a unit vector u in Q."""
    lam = _base_lambda(model)
    u = np.asarray(direction, dtype=complex)
    u = u / np.linalg.norm(u)
    seg = Segment("Q", "arc", lam - radius * u, radius * u, 0.0, 2 * math.pi, Fraction(1))
    return LoopSpec([seg], lam, "custom")


def random_loop(model: PolarModel, rng: np.random.Generator, max_length: int = 3, circle_radius: float = 0.05) -> LoopSpec:
    """A random word in the wall loops and their inverses, sometimes with a small circle."""
    gens = [braid_generator_loop(model, wall=k) for k in range(len(model.walls))]
    pieces = []
    for _ in range(int(rng.integers(1, max_length + 1))):
        g = gens[int(rng.integers(len(gens)))]
        pieces.append(g if rng.random() < 0.5 else g.inverse())
    if rng.random() < 0.3:
        r = model.rank
        u = rng.normal(size=r) + 1j * rng.normal(size=r)
        pieces.insert(int(rng.integers(len(pieces) + 1)), small_circle_loop(model, u, circle_radius))
    out = pieces[0]
    for p in pieces[1:]:
        out = out * p
    return LoopSpec(out.segments, out.basepoint, "custom")


# -- tracking ----------------------------------------------------------------


def _run_segment(packed, a, seg: Segment, backend, opts):
    return kernel.track_segment(
        packed[0],
        packed[1],
        packed[2],
        a,
        SEG_LINE if seg.kind == "line" else SEG_ARC,
        SPACE_Q if seg.space == "Q" else SPACE_C,
        seg.c,
        seg.d,
        float(seg.theta0),
        float(seg.dtheta),
        h0=opts["h0"],
        h_max=opts["h_max"],
        tol=opts["step_tol"],
        max_steps=int(opts["max_steps"]),
        backend=backend,
    )


@dataclass
class TrackResult:
    permutation: list  # permutation[w] = label reached from e_w
    steps: list
    min_det: float
    max_residual: float
    endpoints: np.ndarray
    backend: str
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "permutation": list(self.permutation),
            "steps": list(self.steps),
            "min_abs_det": self.min_det,
            "max_residual": self.max_residual,
            "backend": self.backend,
        }


def _track_one(packed, start, segments, backend, opts):
    a = start
    steps = 0
    min_det = math.inf
    max_res = 0.0
    for seg in segments:
        left = dict(opts)
        left["max_steps"] = int(opts["max_steps"]) - steps
        a, n, md, mr, status = _run_segment(packed, a, seg, backend, left)
        steps += int(n)
        min_det = min(min_det, md)
        max_res = max(max_res, mr)
        if status == STATUS_STEP_CAP:
            raise TrackingError("step_cap", f"step cap of {opts['max_steps']} steps exceeded")
        if status != STATUS_OK:
            raise TrackingError("singular", "step size underflow: path runs into the discriminant")
    return np.asarray(a), steps, min_det, max_res


def track_loop(
    model: PolarModel,
    loop: LoopSpec,
    crit: CriticalSet | None = None,
    backend: str | None = None,
    workers: int = 1,
    **options,
) -> TrackResult:
    """Lift ``loop`` from every e_w and match the endpoints back to Z."""
    opts = dict(DEFAULTS)
    unknown = set(options) - set(opts)
    if unknown:
        raise TypeError(f"unknown tracking options {sorted(unknown)}")
    opts.update(options)
    if crit is None:
        crit = critical_points(model, loop.basepoint, backend=backend)
    if np.linalg.norm(crit.lam - loop.basepoint) > 1e-9 * (1 + np.linalg.norm(crit.lam)):
        raise ValueError("critical set and loop have different basepoints")
    if loop.closure_error(model) > 1e-9 * (1 + np.linalg.norm(loop.basepoint)):
        raise ValueError("loop is not closed")
    packed = model.packed_system()

    def job(k):
        return _track_one(packed, crit.points[k], loop.segments, backend, opts)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(job, range(crit.size)))
    else:
        runs = [job(k) for k in range(crit.size)]
    radius = opts["match_radius"]
    perm = []
    for k, (end, _, _, _) in enumerate(runs):
        dist = np.linalg.norm(crit.points - end[None, :], axis=1)
        close = np.nonzero(dist <= radius)[0]
        if len(close) == 0:
            raise TrackingError("no_match", f"lift from label {k} ended {dist.min():.3g} away from Z")
        if len(close) > 1:
            raise TrackingError("ambiguous", f"lift from label {k} matches {len(close)} points")
        perm.append(int(close[0]))
    if sorted(perm) != list(range(crit.size)):
        raise TrackingError("ambiguous", "endpoint matching is not a bijection")
    min_det = min(r[2] for r in runs)
    return TrackResult(
        permutation=perm,
        steps=[r[1] for r in runs],
        min_det=min_det,
        max_residual=max(r[3] for r in runs),
        endpoints=np.array([r[0] for r in runs]),
        backend=kernel.get_backend(backend).BACKEND,
        extra={"margin_ok": bool(min_det > opts["det_floor"])},
    )


# -- permutations ------------------------------------------------------------


def compose(p2, p1) -> list:
    """p2 after p1."""
    return [p2[p1[i]] for i in range(len(p1))]


def permutation_closure(gens) -> set:
    gens = [tuple(g) for g in gens]
    if not gens:
        return set()
    ident = tuple(range(len(gens[0])))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = tuple(compose(g, p))
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    return seen


def right_regular_action(model: PolarModel) -> set:
    """{w -> w u : u in W} on the labels of Z."""
    grp = model.group
    return {tuple(grp.multiply(w, u) for w in range(grp.order)) for u in range(grp.order)}


def expected_wall_permutation(model: PolarModel, wall: int) -> list:
    """Exact label permutation w -> w sigma of a wall-half-turn loop."""
    grp = model.group
    s = grp.generator_index[model.walls[wall].generator]
    return [grp.multiply(w, s) for w in range(grp.order)]


def wall_permutation(model: PolarModel, wall: int, crit: CriticalSet | None = None, **kw) -> TrackResult:
    return track_loop(model, braid_generator_loop(model, wall=wall), crit, **kw)


def cycle_type(perm) -> list[int]:
    seen = set()
    out = []
    for i in range(len(perm)):
        if i in seen:
            continue
        n, j = 0, i
        while j not in seen:
            seen.add(j)
            j = perm[j]
            n += 1
        out.append(n)
    return sorted(out)


# -- carousel ----------------------------------------------------------------


def single_linkage_clusters(values, gap_ratio: float | None = None) -> tuple[list[list[int]], float]:
    """Cut the single-linkage tree at its largest relative gap.

    The tree is cut only when consecutive merge heights jump by at least
    ``gap_ratio``; otherwise all points form one cluster.  Returns
    (clusters, largest jump).
    """
    gap_ratio = DEFAULTS["gap_ratio"] if gap_ratio is None else gap_ratio
    pts = np.asarray(values, dtype=complex)
    n = len(pts)
    if n == 1:
        return [[0]], math.inf
    edges = sorted((abs(pts[i] - pts[j]), i, j) for i in range(n) for j in range(i + 1, n))
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    mst = []
    for w, i, j in edges:
        a, b = find(i), find(j)
        if a != b:
            parent[a] = b
            mst.append((w, i, j))
    best, cut = 0.0, None
    for k in range(len(mst) - 1):
        lo, hi = mst[k][0], mst[k + 1][0]
        ratio = math.inf if lo == 0 else hi / lo
        if ratio > best:
            best, cut = ratio, k
    if cut is None or best < gap_ratio:
        return [list(range(n))], best
    parent = list(range(n))
    for w, i, j in mst[: cut + 1]:
        parent[find(i)] = find(j)
    groups: dict = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values()), best


def _auto_eps(model: PolarModel, v1: np.ndarray) -> float:
    """Distance from the wall small against the spread of l over W.v1."""
    lc = _cvec(model.l_on_cartan())
    vals = np.array([m @ v1 for m in model.group.complex_matrices()]) @ lc
    gaps = [abs(a - b) for i, a in enumerate(vals) for b in vals[i + 1 :] if abs(a - b) > 1e-9]
    if not gaps:
        return 1e-2
    return min(5e-2, min(gaps) / (50 * float(np.linalg.norm(lc))))


def carousel_report(model: PolarModel, wall: int = 0, eps: float | None = None, backend: str | None = None, **options) -> dict:
    """Cluster l(Z) for lam = F(v), v = v1 + eps nu near the wall, and track the
    local wall loop around v1 to see sigma cycle each cluster.

    Without ``eps`` the distance is chosen from the separation of l(W.v1).
    """
    if not model.stable:
        raise ValueError("carousel analysis needs a stable model")
    mat, turns, nu, v1 = _reflection_data(model, wall)
    grp = model.group
    s_index = grp.generator_index[model.walls[wall].generator]
    n_sigma = 1
    x = s_index
    while x != grp.identity_index:
        x = grp.multiply(x, s_index)
        n_sigma += 1
    if eps is None:
        eps = _auto_eps(model, v1)
    v = v1 + eps * nu
    lam = model.evaluate(v)[0]
    crit = critical_points(model, lam, seeds=[v], backend=backend)
    clusters, ratio = single_linkage_clusters(crit.values, options.pop("gap_ratio", None))
    expected_count = grp.order // n_sigma
    if len(clusters) == 1 and expected_count > 1:
        raise TrackingError("cluster", f"no clustering gap found (largest jump {ratio:.3g}); move v closer to the wall")
    loop = LoopSpec([Segment("c", "arc", v1, eps * nu, 0.0, 2 * math.pi * float(turns), turns)], lam, "wall-half-turn", model.walls[wall].orbit, wall)
    res = track_loop(model, loop, crit, backend=backend, **options)
    perm = res.permutation
    cyclic = []
    for cl in clusters:
        members = set(cl)
        stays = all(perm[i] in members for i in cl)
        orbit_len = 0
        j = cl[0]
        while True:
            j = perm[j]
            orbit_len += 1
            if j == cl[0]:
                break
        cyclic.append(stays and orbit_len == len(cl))
    return {
        "wall": wall,
        "orbit": model.walls[wall].orbit,
        "n_sigma": n_sigma,
        "eps": float(eps),
        "lambda": _enc(lam),
        "clusters": clusters,
        "cluster_sizes": sorted(len(c) for c in clusters),
        "gap_ratio": float(ratio) if math.isfinite(ratio) else None,
        "expected_clusters": expected_count,
        "critical_values": _enc(crit.values),
        "permutation": perm,
        "cycle_type": cycle_type(perm),
        "cyclic_in_each_cluster": cyclic,
        "ok": len(clusters) == expected_count and all(len(c) == n_sigma for c in clusters) and all(cyclic),
        "tracking": res.to_dict(),
    }
