"""Independent models of W-indexed algebras, used as oracles.

``hecke_algebra`` builds the algebra with basis T_w and the multiplication
rule T_s T_w = T_sw when l(sw) > l(w), and T_s T_w = a T_w + b T_sw
otherwise, which realises T_s^2 = a T_s + b.  ``group_algebra`` is the plain
group algebra C[W].  Both are assembled straight from the enumerated group,
with no braid relations involved.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction

from .algebra import FinDimAlgebra
from .groups import ReflectionGroup

__all__ = ["hecke_algebra", "group_algebra", "coxeter_lengths", "quadratic_parameters"]


def _bfs_words(group: ReflectionGroup) -> tuple[list[int], dict[int, tuple[int, ...]]]:
    """Elements in BFS order from 1 under left multiplication, with words."""
    start = group.identity_index
    order = [start]
    words = {start: ()}
    queue = deque([start])
    while queue:
        w = queue.popleft()
        for s, gi in enumerate(group.generator_index):
            x = group.multiply(gi, w)
            if x not in words:
                words[x] = (s,) + words[w]
                order.append(x)
                queue.append(x)
    return order, words


def coxeter_lengths(group: ReflectionGroup) -> dict[int, int]:
    _, words = _bfs_words(group)
    return {k: len(w) for k, w in words.items()}


def quadratic_parameters(poly) -> tuple[Fraction, Fraction]:
    """(a, b) with z^2 - a z - b equal to the monic quadratic ``poly``."""
    c0, c1, c2 = (Fraction(c) for c in poly)
    if c2 != 1:
        raise ValueError("quadratic relation must be monic")
    return -c1, -c0


def _assemble(group: ReflectionGroup, column) -> FinDimAlgebra:
    order, words = _bfs_words(group)
    pos = {w: k for k, w in enumerate(order)}
    gens = []
    for s, gi in enumerate(group.generator_index):
        cols = []
        for w in order:
            cols.append({pos[x]: c for x, c in column(s, gi, w).items() if c})
        gens.append(cols)
    parents = [None]
    for w in order[1:]:
        word = words[w]
        parents.append((word[0], {pos[_suffix_element(group, word)]: Fraction(1)}))
    return FinDimAlgebra(
        basis=[words[w] for w in order],
        gens=gens,
        names=tuple(f"s{i}" for i in range(len(group.generator_index))),
        parents=parents,
        metadata={"group": group.spec.label},
    )


def _suffix_element(group: ReflectionGroup, word) -> int:
    x = group.identity_index
    for s in reversed(word[1:]):
        x = group.multiply(group.generator_index[s], x)
    return x


def group_algebra(group: ReflectionGroup) -> FinDimAlgebra:
    """C[W] with generators the given generators of W acting on the left."""
    alg = _assemble(group, lambda s, gi, w: {group.multiply(gi, w): Fraction(1)})
    alg.metadata["model"] = "group algebra"
    return alg


def hecke_algebra(group: ReflectionGroup, relations: list) -> FinDimAlgebra:
    """Iwahori-Hecke type algebra of a Coxeter group for T_s^2 = a_s T_s + b_s.

    ``relations[s]`` is the monic quadratic (constant first) for generator s.
    """
    if not group.spec.is_coxeter:
        raise ValueError("the T_w basis rule needs a Coxeter group")
    length = coxeter_lengths(group)
    params = [quadratic_parameters(p) for p in relations]

    def column(s, gi, w):
        sw = group.multiply(gi, w)
        if length[sw] > length[w]:
            return {sw: Fraction(1)}
        a, b = params[s]
        out = {w: a}
        out[sw] = out.get(sw, 0) + b
        return out

    alg = _assemble(group, column)
    alg.metadata["model"] = "hecke T_w basis"
    alg.relation_polys = [tuple(p) for p in relations]
    return alg
