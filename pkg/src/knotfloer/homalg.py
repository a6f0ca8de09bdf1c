"""Graded chain complexes over Z, their homology, and a spectral-sequence engine.

Boundary matrices use the ``M[target][source]`` convention over the full
generator list, so a complex is a single square integer matrix plus degrees.

Both filtration directions run through one engine.  Internally every
generator gets a *key*: its level for a decreasing filtration, minus its
level for an increasing one.  With ``F_K`` spanned by generators of key at
least ``K`` the filtration is decreasing in ``K`` either way, and

* ``drift`` is 1 when the boundary may lower the level by one
  (decreasing case, ``d F_n`` inside ``F_{n-1}``) and 0 otherwise,
* ``Z^r_K = {x in F_K : dx in F_(K - drift + step*r)}``,
* ``E^r_K = Z^r_K / (Z^(r-1)_(K+step) + d Z^(r-1)_(K + drift - step*(r-1)))``,
* ``d_r`` moves the key by ``step*r - drift``.

For a decreasing step-``s`` filtration this is ``(n, j) -> (n + s*r - 1, j - 1)``;
for an increasing step-1 filtration it is ``(p, q) -> (p - r, q + r - 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal

from . import lattice as la

Direction = Literal["increasing", "decreasing"]


@dataclass(frozen=True)
class Group:
    """A finitely generated abelian group ``Z^free_rank + sum Z/t``."""

    free_rank: int
    torsion: tuple[int, ...] = ()

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion


@dataclass(frozen=True)
class GradedComplex:
    generators: tuple[tuple[str, int], ...]
    boundary: tuple[tuple[int, ...], ...]
    period: int = 0  # 0 for Z-graded, otherwise degrees live in Z/period

    def __post_init__(self):
        gens = tuple((str(i), int(d)) for i, d in self.generators)
        if self.period < 0:
            raise ValueError("period must be nonnegative")
        if self.period:
            gens = tuple((i, d % self.period) for i, d in gens)
        object.__setattr__(self, "generators", gens)
        n = len(gens)
        B = tuple(tuple(int(x) for x in row) for row in self.boundary) if n else ()
        if len(B) != n or any(len(row) != n for row in B):
            raise ValueError(f"boundary must be {n}x{n}")
        object.__setattr__(self, "boundary", B)
        if len({i for i, _ in gens}) != n:
            raise ValueError("generator ids must be unique")

    @classmethod
    def build(cls, degrees: dict[str, int], edges: dict[tuple[str, str], int], period: int = 0):
        """Convenience constructor; ``edges[(source, target)]`` is a coefficient."""
        ids = list(degrees)
        pos = {g: k for k, g in enumerate(ids)}
        M = [[0] * len(ids) for _ in ids]
        for (s, t), c in edges.items():
            M[pos[t]][pos[s]] += c
        return cls(tuple((g, degrees[g]) for g in ids), tuple(map(tuple, M)), period)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(i for i, _ in self.generators)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(d for _, d in self.generators)

    def __len__(self) -> int:
        return len(self.generators)

    def lower(self, d: int) -> int:
        return (d - 1) % self.period if self.period else d - 1

    def raise_(self, d: int) -> int:
        return (d + 1) % self.period if self.period else d + 1

    @cached_property
    def by_degree(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for k, d in enumerate(self.degrees):
            out.setdefault(d, []).append(k)
        return out

    def block(self, source_degree: int) -> la.Matrix:
        """The boundary restricted to ``C_d -> C_(d-1)``."""
        src = self.by_degree.get(source_degree, [])
        tgt = self.by_degree.get(self.lower(source_degree), [])
        return [[self.boundary[t][s] for s in src] for t in tgt]


@dataclass(frozen=True)
class FilteredComplex:
    complex: GradedComplex
    levels: tuple[int, ...]
    direction: Direction
    step: int = 1

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(int(x) for x in self.levels))
        if len(self.levels) != len(self.complex):
            raise ValueError("one level per generator")
        if self.direction not in ("increasing", "decreasing"):
            raise ValueError(f"unknown direction {self.direction!r}")
        if self.step < 1:
            raise ValueError("step must be positive")
        if self.direction == "increasing" and self.complex.period:
            raise ValueError("an increasing filtration needs a Z-graded complex")

    @property
    def drift(self) -> int:
        return 1 if self.direction == "decreasing" else 0

    def key(self, k: int) -> int:
        return self.levels[k] if self.direction == "decreasing" else -self.levels[k]

    def bidegree(self, degree: int, key: int) -> tuple[int, int]:
        if self.direction == "decreasing":
            return key, degree
        level = -key
        return level, degree - level

    def exponent(self, bidegree: tuple[int, int]) -> int:
        """Exponent of t for this bidegree in a Poincare-Laurent polynomial."""
        p, q = bidegree
        return p if self.direction == "decreasing" else p + q

    def exponent_shift(self, r: int) -> int:
        """Change of the t-exponent along ``d_r``."""
        return self.step * r - 1 if self.direction == "decreasing" else -1


@dataclass(frozen=True)
class Violation:
    kind: str  # degree | boundary_squared | filtration | level
    source: str | None
    target: str | None
    message: str


def _complex_violations(c: GradedComplex) -> list[Violation]:
    out = []
    ids, deg = c.ids, c.degrees
    n = len(c)
    for s in range(n):
        for t in range(n):
            if c.boundary[t][s] and deg[t] != c.lower(deg[s]):
                out.append(Violation("degree", ids[s], ids[t],
                                     f"d{ids[s]} has a component on {ids[t]} of degree {deg[t]}, "
                                     f"expected {c.lower(deg[s])}"))
                return out
    M = [list(r) for r in c.boundary]
    sq = la.matmul(M, M, n, n) if n else []
    for s in range(n):
        for t in range(n):
            if sq[t][s]:
                out.append(Violation("boundary_squared", ids[s], ids[t],
                                     f"dd{ids[s]} has coefficient {sq[t][s]} on {ids[t]}"))
                return out
    return out


def validate(obj: GradedComplex | FilteredComplex) -> list[Violation]:
    """Every structural problem found, first offender per kind; empty means ok."""
    if isinstance(obj, GradedComplex):
        return _complex_violations(obj)
    fc = obj
    c = fc.complex
    out = _complex_violations(c)
    ids, deg = c.ids, c.degrees
    for k, lv in enumerate(fc.levels):
        if fc.direction == "decreasing":
            bad = (lv - deg[k]) % fc.step or (c.period and c.period % fc.step)
        else:
            bad = lv % fc.step
        if bad:
            out.append(Violation("level", ids[k], None,
                                 f"level {lv} of {ids[k]} is off the step-{fc.step} progression"))
            break
    for s in range(len(c)):
        for t in range(len(c)):
            if not c.boundary[t][s]:
                continue
            ls, lt = fc.levels[s], fc.levels[t]
            ok = lt <= ls if fc.direction == "increasing" else lt >= ls - 1
            if not ok:
                out.append(Violation("filtration", ids[s], ids[t],
                                     f"d{ids[s]} (level {ls}) hits {ids[t]} at level {lt}"))
                return out
    return out


class ComplexError(ValueError):
    def __init__(self, violations: list[Violation]):
        super().__init__("; ".join(f"{v.kind}: {v.message}" for v in violations))
        self.violations = violations


def homology(c: GradedComplex) -> dict[int, Group]:
    """Homology per degree via Smith forms of the boundary blocks."""
    out = {}
    for d, gens in sorted(c.by_degree.items()):
        n_d = len(gens)
        out_rank = la.rank(c.block(d), len(c.by_degree.get(c.lower(d), [])), n_d)
        up = c.raise_(d)
        snf_in = la.smith_normal_form(c.block(up), n_d, len(c.by_degree.get(up, [])))
        tors = tuple(x for x in snf_in.diagonal if x > 1)
        out[d] = Group(n_d - out_rank - snf_in.rank, tors)
    return out


@dataclass
class Differential:
    target: tuple[int, int]
    matrix: la.Matrix  # target free rank x source free rank

    def is_zero(self) -> bool:
        return la.is_zero(self.matrix)


@dataclass
class Page:
    r: int
    table: dict[tuple[int, int], Group]
    differentials: dict[tuple[int, int], Differential] = field(default_factory=dict)
    filtration: FilteredComplex | None = field(default=None, repr=False, compare=False)

    def free_table(self) -> dict[tuple[int, int], int]:
        return {b: g.free_rank for b, g in self.table.items() if g.free_rank}

    def nonzero(self) -> dict[tuple[int, int], Group]:
        return {b: g for b, g in self.table.items() if not g.is_zero()}

    def differentials_vanish(self) -> bool:
        return all(d.is_zero() for d in self.differentials.values())

    def image_ranks(self) -> dict[tuple[int, int], int]:
        """Rank of ``d_r`` leaving each bidegree."""
        out = {}
        for b, d in self.differentials.items():
            rk = la.rank(d.matrix, len(d.matrix), self.table[b].free_rank)
            if rk:
                out[b] = rk
        return out


class SpectralSequence:
    """Page computations for one filtered complex, cached by ``(r, degree, key)``."""

    def __init__(self, fc: FilteredComplex, check: bool = True):
        if check:
            bad = validate(fc)
            if bad:
                raise ComplexError(bad)
        self.fc = fc
        self.c = fc.complex
        self.step = fc.step
        self.drift = fc.drift
        self._keys = {d: {fc.key(k) for k in ks} for d, ks in self.c.by_degree.items()}
        self._local = {}
        for d, ks in self.c.by_degree.items():
            for pos, k in enumerate(ks):
                self._local[k] = pos
        self._z: dict = {}
        self._e: dict = {}
        allkeys = [fc.key(k) for k in range(len(self.c))]
        self.span = max(allkeys) - min(allkeys) if allkeys else 0

    @property
    def last_page(self) -> int:
        """Past this index every ``d_r`` leaves the range of keys."""
        return (self.span + self.drift) // self.step + 1

    def _cycles(self, r: int, d: int, K: int) -> list[list[int]]:
        """Basis (ambient vectors in degree ``d``) of ``Z^r_K``."""
        memo = (r, d, K)
        if memo in self._z:
            return self._z[memo]
        src = self.c.by_degree.get(d, [])
        tgt = self.c.by_degree.get(self.c.lower(d), [])
        cols = [k for k in src if self.fc.key(k) >= K]
        bound = K - self.drift + self.step * r
        rows = [t for t in tgt if self.fc.key(t) < bound]
        A = [[self.c.boundary[t][s] for s in cols] for t in rows]
        ker = la.kernel_basis(A, len(cols))
        basis = []
        for vec in la.columns(ker) if cols else []:
            amb = [0] * len(src)
            for k, x in zip(cols, vec):
                amb[self._local[k]] = x
            basis.append(amb)
        self._z[memo] = basis
        return basis

    def _apply(self, d: int, v: list[int]) -> list[int]:
        src = self.c.by_degree.get(d, [])
        tgt = self.c.by_degree.get(self.c.lower(d), [])
        return [sum(self.c.boundary[t][s] * x for s, x in zip(src, v) if x) for t in tgt]

    def _term(self, r: int, d: int, K: int):
        memo = (r, d, K)
        if memo in self._e:
            return self._e[memo]
        Z = self._cycles(r, d, K)
        dim = len(self.c.by_degree.get(d, []))
        den = list(self._cycles(r - 1, d, K + self.step))
        up = self.c.raise_(d)
        for z in self._cycles(r - 1, up, K + self.drift - self.step * (r - 1)):
            den.append(self._apply(up, z))
        Zm = la.from_columns(Z, dim)
        coords = la.lattice_coordinates(Zm, dim, den)
        q = la.quotient(len(Z), coords)
        lifts = [la.matvec(Zm, c) if Z else [] for c in q.free_lifts]
        self._e[memo] = (Zm, q, lifts)
        return self._e[memo]

    def group(self, r: int, d: int, K: int) -> Group:
        _, q, _ = self._term(r, d, K)
        return Group(q.free_rank, tuple(q.torsion))

    def differential(self, r: int, d: int, K: int) -> tuple[int, int, la.Matrix]:
        _, _, lifts = self._term(r, d, K)
        td, tK = self.c.lower(d), K - self.drift + self.step * r
        Zt, qt, _ = self._term(r, td, tK)
        dim_t = len(self.c.by_degree.get(td, []))
        cols = []
        for x in lifts:
            y = self._apply(d, x)
            (c,) = la.lattice_coordinates(Zt, dim_t, [y])
            cols.append(qt.free_coords(c))
        M = [[cols[j][i] for j in range(len(cols))] for i in range(qt.free_rank)]
        return td, tK, M

    def page(self, r: int) -> Page:
        table, diffs = {}, {}
        for d, keys in self._keys.items():
            for K in sorted(keys):
                b = self.fc.bidegree(d, K)
                g = self.group(r, d, K)
                table[b] = g
                if g.free_rank:
                    td, tK, M = self.differential(r, d, K)
                    diffs[b] = Differential(self.fc.bidegree(td, tK), M)
        return Page(r, table, diffs, self.fc)


def page(fc: FilteredComplex, r: int) -> Page:
    return SpectralSequence(fc).page(r)


def pages(fc: FilteredComplex, upto: int | None = None) -> list[Page]:
    ss = SpectralSequence(fc)
    last = ss.last_page if upto is None else upto
    return [ss.page(r) for r in range(last + 1)]


class ConvergenceError(AssertionError):
    pass


def converged_at(seq: list[Page]) -> int:
    """Smallest r after which every page equals the last and every d vanishes."""
    final = seq[-1].nonzero()
    at = len(seq) - 1
    for p in reversed(seq):
        if p.nonzero() == final and p.differentials_vanish():
            at = p.r
        else:
            break
    return at


def limit(fc: FilteredComplex) -> tuple[Page, int]:
    """The stable page and the first index from which nothing changes.

    Also checks the stable page against the homology of the underlying
    complex, degree by degree on free ranks.
    """
    ss = SpectralSequence(fc)
    seq = [ss.page(r) for r in range(ss.last_page + 1)]
    inf = seq[-1]
    if not inf.differentials_vanish():
        raise ConvergenceError("nonzero differential on the final page")
    H = homology(fc.complex)
    per_degree: dict[int, int] = {}
    for d, keys in ss._keys.items():
        per_degree[d] = sum(inf.table[fc.bidegree(d, K)].free_rank for K in keys)
    for d, g in H.items():
        if per_degree.get(d, 0) != g.free_rank:
            raise ConvergenceError(
                f"degree {d}: stable page has rank {per_degree.get(d, 0)}, homology {g.free_rank}"
            )
    return inf, converged_at(seq)


def euler_characteristic(p: Page) -> int:
    """Alternating sum of free ranks by total degree."""
    fc = p.filtration
    total = 0
    for (a, b), g in p.table.items():
        if fc is not None and fc.direction == "decreasing":
            deg = b
        else:
            deg = a + b
        total += (-1) ** (deg % 2) * g.free_rank
    return total
