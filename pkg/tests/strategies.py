"""Random generators for braids, filtered complexes and knot packages."""

from __future__ import annotations

import random
from fractions import Fraction

from knotfloer import lattice as la
from knotfloer.braid import BraidWord, closure_info
from knotfloer.floer import FloerGenerator, KnotFloerData
from knotfloer.homalg import FilteredComplex, GradedComplex


# ---------------------------------------------------------------- braids


def random_knot_braid(rng: random.Random, max_strands: int = 5, max_letters: int = 12) -> BraidWord:
    """Uniform-ish knot braid; the letter count has the parity a knot needs."""
    while True:
        n = rng.randint(2, max_strands)
        lo = n - 1
        if lo > max_letters:
            continue
        length = rng.randrange(lo, max_letters + 1, 2)
        letters = tuple(rng.choice((1, -1)) * rng.randint(1, n - 1) for _ in range(length))
        b = BraidWord(n, letters)
        if closure_info(b).is_knot:
            return b


# ---------------------------------------------------------------- filtered complexes


def _conjugate(D: la.Matrix, n: int, i: int, j: int, c: int) -> la.Matrix:
    """Boundary in the basis where ``e_i`` is replaced by ``e_i + c e_j``."""
    E = la.identity(n)
    E[j][i] = c
    Einv = la.identity(n)
    Einv[j][i] = -c
    return la.matmul(la.matmul(Einv, D, n, n), E, n, n)


def random_filtered_complex(rng: random.Random, max_gens: int = 12) -> FilteredComplex:
    """Sum of elementary pieces, then filtration-preserving unimodular mixing.

    Pieces are single generators and pairs ``x -> c*y``.  Both directions
    and periodic gradings are produced.
    """
    direction = rng.choice(("increasing", "decreasing"))
    if direction == "increasing":
        period, step = 0, rng.choice((1, 2))
    else:
        step = rng.choice((1, 2))
        period = rng.choice((0, 2 * step, 4 * step)) if step > 1 else rng.choice((0, 2, 4))
    target = rng.randint(1, max_gens)
    degs: list[int] = []
    levels: list[int] = []
    edges: list[tuple[int, int, int]] = []

    def level_for(deg: int, above: int | None = None, below: int | None = None) -> int:
        while True:
            if direction == "increasing":
                lv = step * rng.randint(-3, 3)
            else:
                lv = deg + step * rng.randint(-2, 2)
            if above is not None and lv < above:
                continue
            if below is not None and lv > below:
                continue
            return lv

    while len(degs) < target:
        d = rng.randint(-2, 3)
        if len(degs) + 2 <= target and rng.random() < 0.6:
            ls = level_for(d)
            if direction == "increasing":
                lt = level_for(d - 1, below=ls)
            else:
                lt = level_for(d - 1, above=ls - 1)
            s = len(degs)
            degs += [d, d - 1]
            levels += [ls, lt]
            edges.append((s, s + 1, rng.choice((1, 1, 1, 2, 3, -1, -2))))
        else:
            degs.append(d)
            levels.append(level_for(d))
    n = len(degs)
    D = la.zeros(n, n)
    for s, t, c in edges:
        D[t][s] = c
    reduced = [d % period if period else d for d in degs]
    for _ in range(rng.randint(0, 2 * n)):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j or reduced[i] != reduced[j]:
            continue
        # e_i + c e_j stays in the filtration step of e_i
        if direction == "increasing" and levels[j] > levels[i]:
            continue
        if direction == "decreasing" and levels[j] < levels[i]:
            continue
        D = _conjugate(D, n, i, j, rng.choice((1, -1, 2)))
    perm = list(range(n))
    rng.shuffle(perm)
    gens = tuple((f"x{k}", degs[perm[k]]) for k in range(n))
    boundary = tuple(tuple(D[perm[t]][perm[s]] for s in range(n)) for t in range(n))
    cx = GradedComplex(gens, boundary, period=period)
    return FilteredComplex(cx, tuple(levels[perm[k]] for k in range(n)), direction, step)


def degree_of(fc: FilteredComplex, bidegree: tuple[int, int]) -> int:
    p, q = bidegree
    return q if fc.direction == "decreasing" else p + q


# ---------------------------------------------------------------- knot packages


def random_package(rng: random.Random, name: str = "K", *, allow_d: bool = True,
                   allow_delta: bool = True, max_pieces: int = 4) -> KnotFloerData:
    """A package satisfying every stated boundary and special-map relation.

    ``special_d`` lives on maslov-1 generators outside the image of the
    boundary and ``special_delta`` on maslov -1 generators that are cycles,
    which is exactly what the two composite relations allow.  A random
    grading-preserving change of basis hides the block structure.
    """
    N = rng.randint(1, 3)
    alpha = Fraction(rng.randint(1, 6), rng.randint(1, 4))
    mu: list[int] = []
    edges: list[tuple[int, int, int]] = []
    d_ok: list[bool] = []
    delta_ok: list[bool] = []
    for _ in range(rng.randint(0, max_pieces)):
        m = rng.choice((-2, -1, -1, 0, 1, 1, 2))
        if rng.random() < 0.5:
            s = len(mu)
            mu += [m, m - 1]
            edges.append((s, s + 1, rng.choice((1, -1, 2))))
            d_ok += [m == 1, False]
            delta_ok += [False, m - 1 == -1]
        else:
            mu.append(m)
            d_ok.append(m == 1)
            delta_ok.append(m == -1)
    n = len(mu)
    B = la.zeros(n, n)
    for s, t, c in edges:
        B[t][s] = c
    d = [rng.choice((0, 1, -1, 2)) if allow_d and d_ok[i] else 0 for i in range(n)]
    delta = [rng.choice((0, 1, -1, 2)) if allow_delta and delta_ok[i] else 0 for i in range(n)]
    # grading-preserving change of basis: B -> E^-1 B E, d -> d E, delta -> E^-1 delta
    for _ in range(rng.randint(0, 2 * n)):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j or mu[i] != mu[j]:
            continue
        c = rng.choice((1, -1))
        B = _conjugate(B, n, i, j, c)
        d[i] += c * d[j]
        delta[j] -= c * delta[i]
    period = 2 * alpha * N
    gens = tuple(FloerGenerator(f"{name.lower()}{k}", period * Fraction(k + 1, n + 1), mu[k])
                 for k in range(n))
    return KnotFloerData(name, None, N, alpha, gens, tuple(map(tuple, B)),
                         tuple(d), tuple(delta))


def random_d2(c, rng: random.Random, d1: la.Matrix) -> la.Matrix | None:
    """Random nonzero second differential compatible with ``d1``, if one exists.

    Unknowns are the entries allowed by the (p,q) -> (p-2,q+1) rule; the
    linear conditions ``d1 D + D d1 = 0`` are solved over the integers with
    a saturated kernel basis.
    """
    gens = c.strata_generators
    n = len(gens)
    slots = [(t, s) for s in range(n) for t in range(n)
             if gens[t].level == gens[s].level - 2 and gens[t].q == gens[s].q + 1]
    if not slots:
        return None
    rows = []
    for i in range(n):
        for j in range(n):
            row = []
            for (t, s) in slots:
                # coefficient of D[t][s] in (d1 D + D d1)[i][j]
                v = 0
                if s == j:
                    v += d1[i][t]
                if t == i:
                    v += d1[s][j]
                row.append(v)
            if any(row):
                rows.append(row)
    K = la.kernel_basis(rows, len(slots)) if rows else la.identity(len(slots))
    basis = la.columns(K) if K else []
    if not basis:
        return None
    coeffs = [rng.choice((-1, 0, 1, 2)) for _ in basis]
    if not any(coeffs):
        coeffs[0] = 1
    D = la.zeros(n, n)
    for c_, vec in zip(coeffs, basis):
        for (t, s), x in zip(slots, vec):
            D[t][s] += c_ * x
    return D
