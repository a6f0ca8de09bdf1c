"""Traceless SU(2) representations of a closed braid, found numerically.

A traceless element of SU(2) is a pure unit quaternion, i.e. a point of the
2-sphere.  A representation of the closure of a braid on ``n`` strands is a
tuple of ``n`` unit vectors fixed by the braid's action; conjugation acts by a
simultaneous rotation.

The solver runs random-restart Levenberg-Marquardt on the fixed-point
residual, keeps irreducible solutions, quotients by rotations and groups the
survivors into isolated classes and one-parameter circles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.optimize import least_squares

from .braid import BraidError, BraidWord, closure_info, connected_sum, split_connected_sum

# ---------------------------------------------------------------- action


def reflect(a: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Rotation by pi about the unit axis ``a``, applied to ``w``."""
    return 2.0 * np.dot(a, w) * a - w


def braid_action(b: BraidWord, v) -> np.ndarray:
    V = np.array(v, dtype=float)
    if V.shape != (b.strands, 3):
        raise ValueError(f"expected {b.strands} vectors in R^3, got shape {V.shape}")
    for e in b.letters:
        i = abs(e) - 1
        a, w = V[i].copy(), V[i + 1].copy()
        if e > 0:
            V[i], V[i + 1] = reflect(a, w), a
        else:
            V[i], V[i + 1] = w, reflect(w, a)
    return V


def _action_with_jacobian(letters: tuple[int, ...], V: np.ndarray):
    """Action and its derivative ``J[k, :, j, :] = d out_k / d in_j`` (ambient)."""
    n = V.shape[0]
    V = V.copy()
    J = np.zeros((n, 3, n, 3))
    for k in range(n):
        J[k, :, k, :] = np.eye(3)
    for e in letters:
        i = abs(e) - 1
        if e > 0:
            a, w, Ja, Jw = V[i].copy(), V[i + 1].copy(), J[i].copy(), J[i + 1].copy()
        else:
            a, w, Ja, Jw = V[i + 1].copy(), V[i].copy(), J[i + 1].copy(), J[i].copy()
        # d(2(a.w)a - w) = 2(da.w + a.dw) a + 2(a.w) da - dw
        aw = float(np.dot(a, w))
        dot = np.einsum("c,cjd->jd", w, Ja) + np.einsum("c,cjd->jd", a, Jw)
        Jr = 2.0 * np.einsum("c,jd->cjd", a, dot) + 2.0 * aw * Ja - Jw
        r = 2.0 * aw * a - w
        if e > 0:
            V[i], V[i + 1], J[i], J[i + 1] = r, a, Jr, Ja
        else:
            V[i], V[i + 1], J[i], J[i + 1] = a, r, Ja, Jr
    return V, J


def quaternion_product(V) -> np.ndarray:
    """Product ``X_1 ... X_n`` of the pure quaternions with axes ``V`` as (w, x, y, z)."""
    q = np.array([1.0, 0.0, 0.0, 0.0])
    for v in np.asarray(V, dtype=float):
        w1, x1 = q[0], q[1:]
        q = np.concatenate([[-np.dot(x1, v)], w1 * v + np.cross(x1, v)])
    return q


# ---------------------------------------------------------------- gauge


def canonical_rotation(V: np.ndarray) -> np.ndarray:
    """Rotation sending ``V[0]`` to e3 and the first non-parallel vector into the
    xz-plane with positive x."""
    v1 = V[0] / np.linalg.norm(V[0])
    z = np.array([0.0, 0.0, 1.0])
    c = float(np.dot(v1, z))
    axis = np.cross(v1, z)
    s = np.linalg.norm(axis)
    if s < 1e-15:
        Q = np.eye(3) if c > 0 else np.diag([1.0, -1.0, -1.0])
    else:
        k = axis / s
        K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
        Q = np.eye(3) + s * K + (1 - c) * K @ K
    W = V @ Q.T
    for w in W[1:]:
        rho = math.hypot(w[0], w[1])
        if rho > 1e-6:
            ct, st = w[0] / rho, w[1] / rho
            Rz = np.array([[ct, st, 0.0], [-st, ct, 0.0], [0.0, 0.0, 1.0]])
            return Rz @ Q
    return Q


def canonical_form(V) -> np.ndarray:
    V = np.asarray(V, dtype=float)
    return V @ canonical_rotation(V).T


def fingerprint(V) -> tuple[float, ...]:
    """Rotation-invariant signature: inner products then triple products,
    both in index order, rounded to 6 decimals."""
    V = np.asarray(V, dtype=float)
    n = len(V)
    dots = [float(np.dot(V[i], V[j])) for i, j in combinations(range(n), 2)]
    triples = [float(np.linalg.det(V[[i, j, k]])) for i, j, k in combinations(range(n), 3)]
    return tuple(round(x, 6) + 0.0 for x in dots + triples)


def is_reducible(V, tol: float = 1e-8) -> bool:
    V = np.asarray(V, dtype=float)
    G = np.abs(V @ V.T)
    return bool(np.all(1.0 - G <= tol))


# ---------------------------------------------------------------- data


@dataclass
class SolverConfig:
    restarts: int = 2000
    seed: int = 0
    tol: float = 1e-10
    rank_tol: float = 1e-6
    reducible_tol: float = 1e-8
    batches: int = 2
    dedup_tol: float = 1e-6
    circle_min_points: int = 10
    trace_step: float = 0.05
    trace_max_steps: int = 4000

    @classmethod
    def from_mapping(cls, doc: dict) -> SolverConfig:
        known = {f for f in cls.__dataclass_fields__}
        extra = set(doc) - known
        if extra:
            raise ValueError(f"unknown solver options: {sorted(extra)}")
        return cls(**doc)


@dataclass
class RepPoint:
    vectors: np.ndarray
    residual: float
    fingerprint: tuple[float, ...] = ()

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=float)
        if not self.fingerprint:
            self.fingerprint = fingerprint(self.vectors)

    @property
    def canonical(self) -> np.ndarray:
        return canonical_form(self.vectors)


@dataclass
class RepStratum:
    kind: str  # isolated | circle | unclassified
    samples: list[RepPoint]
    tangent_dim: int
    curve: np.ndarray | None = field(default=None, repr=False)  # traced canonical points

    @property
    def fingerprint(self) -> tuple[float, ...]:
        return self.samples[0].fingerprint


@dataclass
class StrataResult:
    strata: list[RepStratum]
    stable: bool
    batch_counts: list[dict[str, int]]
    config: SolverConfig
    attempts: int = 0
    converged: int = 0

    def counts(self) -> dict[str, int]:
        return stratum_counts(self.strata)


def stratum_counts(strata: list[RepStratum]) -> dict[str, int]:
    out: dict[str, int] = {}
    for s in strata:
        out[s.kind] = out.get(s.kind, 0) + 1
    return out


# ---------------------------------------------------------------- linearization


def _tangent_basis(V: np.ndarray) -> np.ndarray:
    """Columns span T(S^2)^n at V inside R^{3n}."""
    n = len(V)
    B = np.zeros((3 * n, 2 * n))
    for i, v in enumerate(V):
        helper = np.array([1.0, 0.0, 0.0]) if abs(v[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        t1 = np.cross(v, helper)
        t1 /= np.linalg.norm(t1)
        t2 = np.cross(v, t1)
        B[3 * i:3 * i + 3, 2 * i] = t1
        B[3 * i:3 * i + 3, 2 * i + 1] = t2
    return B


def _gauge_directions(V: np.ndarray) -> np.ndarray:
    n = len(V)
    G = np.zeros((3 * n, 3))
    for k in range(3):
        w = np.zeros(3)
        w[k] = 1.0
        G[:, k] = np.cross(w, V).reshape(-1)
    return G


def linearization(b: BraidWord, V: np.ndarray) -> np.ndarray:
    """Derivative of ``action - id`` on T(S^2)^n at a fixed point, in a tangent basis."""
    n = b.strands
    _, J = _action_with_jacobian(b.letters, V)
    B = _tangent_basis(V)
    D = J.reshape(3 * n, 3 * n) - np.eye(3 * n)
    return B.T @ D @ B


def kernel_dimension(b: BraidWord, V: np.ndarray, rank_tol: float = 1e-6) -> int:
    s = np.linalg.svd(linearization(b, V), compute_uv=False)
    return int(np.sum(s < rank_tol))


def tangent_dimension(b: BraidWord, V: np.ndarray, rank_tol: float = 1e-6) -> int:
    """Kernel dimension modulo the three rotation directions."""
    return kernel_dimension(b, V, rank_tol) - 3


def _family_direction(b: BraidWord, V: np.ndarray, rank_tol: float) -> np.ndarray | None:
    """Unit ambient vector along the fixed set, orthogonal to rotations."""
    L = linearization(b, V)
    _, s, Wt = np.linalg.svd(L)
    null = Wt[s < rank_tol] if len(s) else Wt[:0]
    B = _tangent_basis(V)
    K = B @ null.T  # ambient kernel vectors
    G = _gauge_directions(V)
    Qg, _ = np.linalg.qr(G)
    K = K - Qg @ (Qg.T @ K)
    if K.shape[1] == 0:
        return None
    U, sv, _ = np.linalg.svd(K, full_matrices=False)
    if sv[0] < 1e-8:
        return None
    return U[:, 0]


# ---------------------------------------------------------------- solver


class _Problem:
    def __init__(self, b: BraidWord):
        self.b = b
        self.n = b.strands

    def residual(self, u: np.ndarray) -> np.ndarray:
        U = u.reshape(self.n, 3)
        norms = np.linalg.norm(U, axis=1)
        V = U / norms[:, None]
        out = braid_action(self.b, V) - V
        return np.concatenate([out.reshape(-1), norms - 1.0])

    def jacobian(self, u: np.ndarray) -> np.ndarray:
        n = self.n
        U = u.reshape(n, 3)
        norms = np.linalg.norm(U, axis=1)
        V = U / norms[:, None]
        _, J = _action_with_jacobian(self.b.letters, V)
        D = J.reshape(3 * n, 3 * n) - np.eye(3 * n)
        # normalization map u -> v, block diagonal
        N = np.zeros((3 * n, 3 * n))
        top = np.zeros((n, 3 * n))
        for i in range(n):
            v = V[i]
            N[3 * i:3 * i + 3, 3 * i:3 * i + 3] = (np.eye(3) - np.outer(v, v)) / norms[i]
            top[i, 3 * i:3 * i + 3] = v
        return np.vstack([D @ N, top])

    def solve(self, u0: np.ndarray):
        sol = least_squares(self.residual, u0, jac=self.jacobian, method="lm",
                            xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=200)
        U = sol.x.reshape(self.n, 3)
        V = U / np.linalg.norm(U, axis=1)[:, None]
        res = float(np.linalg.norm(braid_action(self.b, V) - V))
        return V, res


def _correct(b: BraidWord, V0: np.ndarray, constraints: np.ndarray) -> tuple[np.ndarray, float]:
    """Newton-type correction back onto the fixed set, moving orthogonally to
    the rows of ``constraints`` (ambient vectors)."""
    n = b.strands
    prob = _Problem(b)
    base = V0.reshape(-1).copy()

    def fun(u):
        return np.concatenate([prob.residual(u), constraints @ (u - base)])

    def jac(u):
        return np.vstack([prob.jacobian(u), constraints])

    sol = least_squares(fun, base, jac=jac, method="lm", xtol=1e-15, ftol=1e-15,
                        gtol=1e-15, max_nfev=100)
    U = sol.x.reshape(n, 3)
    V = U / np.linalg.norm(U, axis=1)[:, None]
    return V, float(np.linalg.norm(braid_action(b, V) - V))


def _segment_distance(P: np.ndarray, A: np.ndarray, B: np.ndarray) -> float:
    p, a, d = P.reshape(-1), A.reshape(-1), (B - A).reshape(-1)
    dd = float(np.dot(d, d))
    t = 0.0 if dd == 0 else min(1.0, max(0.0, float(np.dot(p - a, d)) / dd))
    return float(np.linalg.norm(p - a - t * d))


def distance_to_loop(P: np.ndarray, curve: np.ndarray) -> float:
    """Distance from ``P`` to the closed polyline through ``curve``."""
    k = len(curve)
    return min(_segment_distance(P, curve[i], curve[(i + 1) % k]) for i in range(k))


def trace_family(b: BraidWord, V0: np.ndarray, cfg: SolverConfig) -> np.ndarray | None:
    """Follow a one-parameter family of fixed points through ``V0``.

    Returns the canonical forms of the traced points when the family closes
    up into a loop, else ``None``.
    """
    start = canonical_form(V0)
    pts = [start]
    V = V0.copy()
    prev = None
    h = cfg.trace_step
    for step in range(cfg.trace_max_steps):
        t = _family_direction(b, V, cfg.rank_tol)
        if t is None:
            return None
        if prev is not None and float(np.dot(t, prev)) < 0:
            t = -t
        Vp = V + h * t.reshape(-1, 3)
        Vp /= np.linalg.norm(Vp, axis=1)[:, None]
        cons = np.vstack([t, _gauge_directions(V).T])
        V, res = _correct(b, Vp, cons)
        if res > 1e3 * cfg.tol and res > 1e-8:
            return None
        prev = t
        C = canonical_form(V)
        if step >= 3 and _segment_distance(start, pts[-1], C) < 0.25 * h:
            return np.array(pts)
        pts.append(C)
    return None


def _run_batch(prob: _Problem, rng: np.random.Generator, count: int, cfg: SolverConfig):
    accepted = []
    for _ in range(count):
        u0 = rng.standard_normal(3 * prob.n)
        V, res = prob.solve(u0)
        if res < cfg.tol and not is_reducible(V, cfg.reducible_tol):
            accepted.append(RepPoint(V, res))
    return accepted


def _classify(b: BraidWord, points: list[RepPoint], cfg: SolverConfig) -> list[RepStratum]:
    strata: list[RepStratum] = []
    canon_cache = [p.canonical for p in points]

    def near_curve(C, curve):
        return distance_to_loop(C, curve) < 0.25 * cfg.trace_step

    pending = list(range(len(points)))
    while pending:
        k = pending.pop(0)
        p, C = points[k], canon_cache[k]
        dim = tangent_dimension(b, p.vectors, cfg.rank_tol)
        if dim == 0:
            members = [k] + [j for j in pending
                             if np.linalg.norm(canon_cache[j] - C) < cfg.dedup_tol]
            pending = [j for j in pending if j not in members]
            strata.append(RepStratum("isolated", [points[j] for j in members], 0))
            continue
        curve = trace_family(b, p.vectors, cfg) if dim == 1 else None
        if curve is None:
            members = [k] + [j for j in pending
                             if np.linalg.norm(canon_cache[j] - C) < cfg.dedup_tol]
            pending = [j for j in pending if j not in members]
            strata.append(RepStratum("unclassified", [points[j] for j in members], dim))
            continue
        members = [k] + [j for j in pending if near_curve(canon_cache[j], curve)]
        pending = [j for j in pending if j not in members]
        samples = [points[j] for j in members]
        distinct = _distinct(samples, cfg.dedup_tol)
        kind = "circle" if len(distinct) >= cfg.circle_min_points else "unclassified"
        strata.append(RepStratum(kind, distinct, 1, curve))
    strata.sort(key=lambda s: s.fingerprint)
    return strata


def _distinct(points: list[RepPoint], tol: float) -> list[RepPoint]:
    out: list[RepPoint] = []
    seen: list[np.ndarray] = []
    for p in points:
        C = p.canonical
        if all(np.linalg.norm(C - S) >= tol for S in seen):
            out.append(p)
            seen.append(C)
    return out


def enumerate_strata(b: BraidWord, cfg: SolverConfig | None = None) -> StrataResult:
    """Full enumeration with a stability report across independent seed batches."""
    cfg = cfg or SolverConfig()
    info = closure_info(b)
    if not info.is_knot:
        raise BraidError(f"closure has {info.components} components, expected a knot")
    prob = _Problem(b)
    seeds = np.random.SeedSequence(cfg.seed).spawn(max(1, cfg.batches))
    sizes = [cfg.restarts // len(seeds) + (i < cfg.restarts % len(seeds)) for i in range(len(seeds))]
    batches = [_run_batch(prob, np.random.default_rng(s), m, cfg) for s, m in zip(seeds, sizes)]
    batch_counts = [stratum_counts(_classify(b, pts, cfg)) if pts else {} for pts in batches]
    everything = [p for pts in batches for p in pts]
    strata = _classify(b, everything, cfg) if everything else []
    stable = all(c == batch_counts[0] for c in batch_counts)
    return StrataResult(strata, stable, batch_counts, cfg, cfg.restarts, len(everything))


def find_strata(b: BraidWord, cfg: SolverConfig | None = None) -> list[RepStratum]:
    return enumerate_strata(b, cfg).strata


# ---------------------------------------------------------------- composites


def _rotation_taking(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Some rotation with ``R u = v`` for unit vectors."""
    c = float(np.dot(u, v))
    axis = np.cross(u, v)
    s = np.linalg.norm(axis)
    if s < 1e-15:
        if c > 0:
            return np.eye(3)
        perp = np.cross(u, [1.0, 0.0, 0.0])
        if np.linalg.norm(perp) < 1e-8:
            perp = np.cross(u, [0.0, 1.0, 0.0])
        perp /= np.linalg.norm(perp)
        return 2.0 * np.outer(perp, perp) - np.eye(3)
    k = axis / s
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + s * K + (1 - c) * K @ K


def _rotation_about(axis: np.ndarray, theta: float) -> np.ndarray:
    k = axis / np.linalg.norm(axis)
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + math.sin(theta) * K + (1 - math.cos(theta)) * K @ K


def _strands_of(strata: list[RepStratum], given: int | None, label: str) -> int:
    if given is not None:
        return given
    for s in strata:
        return len(s.samples[0].vectors)
    raise ValueError(f"{label} strand count is needed to build witnesses")


def glue(left: np.ndarray, right: np.ndarray, theta: float = 0.0) -> np.ndarray:
    """Representation of the composite braid built from one of each factor.

    The right factor is rotated so its first meridian matches the left
    factor's last one, then turned by ``theta`` about that common axis.
    """
    axis = left[-1]
    R = _rotation_about(axis, theta) @ _rotation_taking(right[0], axis)
    return np.vstack([left, right[1:] @ R.T])


def compose_strata(s1: list[RepStratum], s2: list[RepStratum], *,
                   left_strands: int | None = None, right_strands: int | None = None,
                   circle_samples: int = 12) -> list[RepStratum]:
    """Predicted strata of the connected sum, with synthesized witnesses."""
    out: list[RepStratum] = []
    if not s1 and not s2:
        return out
    n = _strands_of(s1, left_strands, "left") if s1 or s2 else 0
    m = _strands_of(s2, right_strands, "right") if s1 or s2 else 0
    for st in s1:
        pts = []
        for p in st.samples[:circle_samples]:
            V = p.vectors
            W = np.vstack([V, np.repeat(V[-1:], m - 1, axis=0)])
            pts.append(RepPoint(W, p.residual))
        out.append(RepStratum(st.kind, pts, st.tangent_dim))
    for st in s2:
        pts = []
        for p in st.samples[:circle_samples]:
            U = p.vectors
            W = np.vstack([np.repeat(U[:1], n, axis=0), U[1:]])
            pts.append(RepPoint(W, p.residual))
        out.append(RepStratum(st.kind, pts, st.tangent_dim))
    for a in s1:
        for c in s2:
            V, U = a.samples[0].vectors, c.samples[0].vectors
            pts = [RepPoint(glue(V, U, 2 * math.pi * k / circle_samples), 0.0)
                   for k in range(circle_samples)]
            dim = a.tangent_dim + c.tangent_dim + 1
            kind = "circle" if dim == 1 else "unclassified"
            out.append(RepStratum(kind, pts, dim))
    out.sort(key=lambda s: s.fingerprint)
    return out


def compare_strata(predicted: list[RepStratum], found: list[RepStratum],
                   tol: float = 1e-5, loop_tol: float = 0.0125) -> list[str]:
    """Human-readable differences; empty when every stratum is matched one-to-one."""
    diffs = []
    unmatched = list(range(len(found)))
    for p in predicted:
        hit = None
        for j in unmatched:
            f = found[j]
            if f.kind != p.kind or f.tangent_dim != p.tangent_dim:
                continue
            if p.kind == "isolated":
                C = p.samples[0].canonical
                if any(np.linalg.norm(C - q.canonical) < tol for q in f.samples):
                    hit = j
            elif f.curve is not None:
                # every predicted sample must sit on the traced loop
                if all(distance_to_loop(q.canonical, f.curve) < loop_tol for q in p.samples):
                    hit = j
            if hit is not None:
                break
        if hit is None:
            diffs.append(f"predicted {p.kind} stratum (dim {p.tangent_dim}) not found")
        else:
            unmatched.remove(hit)
    for j in unmatched:
        diffs.append(f"found {found[j].kind} stratum (dim {found[j].tangent_dim}) not predicted")
    return diffs


def predict_composite(b: BraidWord, cfg: SolverConfig | None = None):
    """Split ``b`` as a connected sum, enumerate each factor and glue.

    Returns ``(factors, predicted strata)`` or ``None`` when ``b`` does not
    split.
    """
    parts = split_connected_sum(b)
    if parts is None:
        return None
    b1, b2 = parts
    s1 = find_strata(b1, cfg)
    s2 = find_strata(b2, cfg)
    predicted = compose_strata(s1, s2, left_strands=b1.strands, right_strands=b2.strands)
    # b may be a cyclic rotation of the glued word; move witnesses across
    glued = connected_sum(b1, b2).letters
    word = b.letters
    start = next(k for k in range(len(word)) if word[k:] + word[:k] == glued)
    head = BraidWord(b.strands, word[start:])
    for st in predicted:
        st.samples = [RepPoint(braid_action(head, p.vectors), p.residual) for p in st.samples]
    return parts, predicted


def dihedral_count_check(det: int) -> int:
    """Number of binary dihedral traceless classes, ``(det - 1) / 2``.

    Exact for two-bridge knots and a lower bound in general; only used as a
    sanity alarm for the numerical solver.
    """
    if det < 1 or det % 2 == 0:
        raise ValueError(f"determinant must be a positive odd integer, got {det}")
    return (det - 1) // 2
