"""Floer chain data for braid closures and for connected sums.

Holomorphic-curve counts are not computed here.  A knot package carries them
as integer matrices (boundary map, the two maps to and from the reducible
class) and everything downstream is exact algebra on top of those inputs:
grading lifts from action windows, the period-2N filtered complex, the
composite complex of a connected sum with its first differential, both
spectral sequences and the Euler characteristic bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import floor, gcd

from . import lattice as la
from .braid import BraidWord, connected_sum, format_braid, parse_braid
from .homalg import (
    ComplexError,
    FilteredComplex,
    GradedComplex,
    Page,
    SpectralSequence,
    converged_at,
    euler_characteristic,
    homology,
    validate,
)
from .invariants import signature

# Names under which broken package invariants are reported.  The two
# relation families keep the labels users look for in the literature.
BOUNDARY_RELATION = "Lemma 2.6"
SPECIAL_RELATION = "Lemma 4.2"
ACTION_WINDOW = "action window"
SPECIAL_SUPPORT = "special map support"
SCHEMA = "schema"


class DataInvariantError(ValueError):
    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant} violated: {message}")
        self.invariant = invariant


class LiftError(ValueError):
    pass


class D1Error(ValueError):
    """The assembled first differential does not square to zero."""

    def __init__(self, relation: str, message: str):
        super().__init__(f"d1 does not square to zero ({relation}): {message}")
        self.relation = relation


class PluginError(ValueError):
    pass


class StructureError(AssertionError):
    pass


# ---------------------------------------------------------------- packages


@dataclass(frozen=True)
class FloerGenerator:
    id: str
    action: Fraction
    maslov_lift: int


@dataclass(frozen=True)
class KnotFloerData:
    name: str
    braid: BraidWord | None
    chern_N: int
    alpha: Fraction
    generators: tuple[FloerGenerator, ...]
    boundary_Z: tuple[tuple[int, ...], ...]
    special_d: tuple[int, ...]
    special_delta: tuple[int, ...]
    boundary_high: tuple[tuple[int, ...], ...] | None = None
    illustrative: bool = False

    def __post_init__(self):
        n = len(self.generators)
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        for name in ("boundary_Z", "boundary_high"):
            M = getattr(self, name)
            if M is None:
                continue
            M = tuple(tuple(int(x) for x in row) for row in M)
            if len(M) != n or any(len(r) != n for r in M):
                raise DataInvariantError(SCHEMA, f"{name} must be {n}x{n}")
            object.__setattr__(self, name, M)
        for name in ("special_d", "special_delta"):
            v = tuple(int(x) for x in getattr(self, name))
            if len(v) != n:
                raise DataInvariantError(SCHEMA, f"{name} must have {n} entries")
            object.__setattr__(self, name, v)

    @property
    def ids(self) -> list[str]:
        return [g.id for g in self.generators]

    @property
    def maslov(self) -> list[int]:
        return [g.maslov_lift for g in self.generators]

    @property
    def action_period(self) -> Fraction:
        return 2 * self.alpha * self.chern_N

    def full_boundary(self) -> list[list[int]]:
        n = len(self.generators)
        M = [list(r) for r in self.boundary_Z]
        if self.boundary_high is not None:
            for t in range(n):
                for s in range(n):
                    M[t][s] += self.boundary_high[t][s]
        return M


def validate_knot_data(k: KnotFloerData) -> None:
    """Raise :class:`DataInvariantError` naming the first broken invariant."""
    n = len(k.generators)
    ids = k.ids
    mu = k.maslov
    if k.chern_N < 1:
        raise DataInvariantError(SCHEMA, "chern_N must be a positive integer")
    if k.alpha < 0:
        raise DataInvariantError(SCHEMA, "alpha must be nonnegative")
    if len(set(ids)) != n:
        raise DataInvariantError(SCHEMA, "generator ids must be unique")
    period = k.action_period
    for g in k.generators:
        if period == 0:
            if g.action != 0:
                raise DataInvariantError(ACTION_WINDOW, f"{g.id}: alpha = 0 forces action 0")
        elif not (0 <= g.action < period):
            raise DataInvariantError(
                ACTION_WINDOW, f"{g.id}: action {g.action} outside [0, {period})")
    B = k.boundary_Z
    for s in range(n):
        for t in range(n):
            if B[t][s] and mu[t] != mu[s] - 1:
                raise DataInvariantError(
                    BOUNDARY_RELATION,
                    f"boundary from {ids[s]} (maslov {mu[s]}) to {ids[t]} (maslov {mu[t]}) "
                    "does not lower the grading by one")
    if k.boundary_high is not None:
        step = 2 * k.chern_N
        for s in range(n):
            for t in range(n):
                if not k.boundary_high[t][s]:
                    continue
                shift = mu[t] - mu[s] + 1
                if shift <= 0 or shift % step:
                    raise DataInvariantError(
                        BOUNDARY_RELATION,
                        f"cross-window component {ids[s]} -> {ids[t]} changes the lift by "
                        f"{mu[t] - mu[s]}, expected -1 + {step}k with k >= 1")
    for label, M in (("boundary", [list(r) for r in B]), ("full boundary", k.full_boundary())):
        sq = la.matmul(M, M, n, n) if n else []
        for s in range(n):
            for t in range(n):
                if sq[t][s]:
                    raise DataInvariantError(
                        BOUNDARY_RELATION,
                        f"{label} squared sends {ids[s]} to {sq[t][s]}*{ids[t]}")
    for i in range(n):
        if k.special_d[i] and mu[i] != 1:
            raise DataInvariantError(
                SPECIAL_SUPPORT, f"special_d is nonzero on {ids[i]} of maslov {mu[i]} != 1")
        if k.special_delta[i] and mu[i] != -1:
            raise DataInvariantError(
                SPECIAL_SUPPORT, f"special_delta hits {ids[i]} of maslov {mu[i]} != -1")
    for s in range(n):
        val = sum(k.special_d[t] * B[t][s] for t in range(n))
        if val:
            raise DataInvariantError(
                SPECIAL_RELATION, f"special_d after boundary is {val} on {ids[s]}")
    for t in range(n):
        val = sum(B[t][s] * k.special_delta[s] for s in range(n))
        if val:
            raise DataInvariantError(
                SPECIAL_RELATION, f"boundary after special_delta is {val} on {ids[t]}")


def _parse_fraction(x, what: str) -> Fraction:
    try:
        return Fraction(x) if not isinstance(x, float) else Fraction(x).limit_denominator()
    except (TypeError, ValueError, ZeroDivisionError):
        raise DataInvariantError(SCHEMA, f"{what}: {x!r} is not a rational number") from None


def load_knot_data(document: dict) -> KnotFloerData:
    """Build and validate a package from a knot-data document."""
    try:
        version = document["schema_version"]
        knot = document["knot"]
        fl = document["floer"]
    except (KeyError, TypeError) as exc:
        raise DataInvariantError(SCHEMA, f"missing field {exc}") from None
    if str(version) != "1":
        raise DataInvariantError(SCHEMA, f"unsupported schema_version {version!r}")
    try:
        braid = parse_braid(knot["braid"]) if knot.get("braid") else None
        gens = tuple(
            FloerGenerator(str(g["id"]), _parse_fraction(g["action"], "action"),
                           int(g["maslov_lift"]))
            for g in fl["generators"])
        n = len(gens)
        zero = [[0] * n for _ in range(n)]
        k = KnotFloerData(
            name=str(knot["name"]),
            braid=braid,
            chern_N=int(fl["chern_N"]),
            alpha=_parse_fraction(fl["alpha"], "alpha"),
            generators=gens,
            boundary_Z=fl.get("boundary_Z") or zero,
            special_d=fl.get("special_d") or [0] * n,
            special_delta=fl.get("special_delta") or [0] * n,
            boundary_high=fl.get("boundary_high"),
            illustrative=bool(fl.get("illustrative", False)),
        )
    except (KeyError, TypeError) as exc:
        raise DataInvariantError(SCHEMA, f"bad or missing field {exc}") from None
    validate_knot_data(k)
    return k


def knot_document(k: KnotFloerData, provenance: dict | None = None) -> dict:
    fl = {
        "chern_N": k.chern_N,
        "alpha": str(k.alpha),
        "illustrative": k.illustrative,
        "generators": [
            {"id": g.id, "action": str(g.action), "maslov_lift": g.maslov_lift}
            for g in k.generators
        ],
        "boundary_Z": [list(r) for r in k.boundary_Z],
        "special_d": list(k.special_d),
        "special_delta": list(k.special_delta),
    }
    if k.boundary_high is not None:
        fl["boundary_high"] = [list(r) for r in k.boundary_high]
    return {
        "schema_version": "1",
        "knot": {"name": k.name, "braid": format_braid(k.braid) if k.braid else None},
        "floer": fl,
        "provenance": dict(provenance or {}),
    }


# ---------------------------------------------------------------- lifting


def window_lifts(k: KnotFloerData, r) -> list[int]:
    """Integer gradings of the action representatives in ``(r, r + 2 alpha N)``."""
    r = Fraction(r)
    period = k.action_period
    if period == 0:
        return k.maslov
    out = []
    for g in k.generators:
        if (r - g.action) % period == 0:
            raise LiftError(f"r = {r} collides with the action of {g.id} modulo {period}")
        deck = floor((r - g.action) / period) + 1
        out.append(g.maslov_lift + 2 * k.chern_N * deck)
    return out


def lift_window(k: KnotFloerData, r) -> GradedComplex:
    """Z-graded complex for the window starting at ``r``.

    Its boundary keeps exactly the components of the full boundary that lower
    the lifted grading by one.
    """
    lifts = window_lifts(k, r)
    full = k.full_boundary()
    n = len(lifts)
    M = [[full[t][s] if lifts[t] == lifts[s] - 1 else 0 for s in range(n)] for t in range(n)]
    return GradedComplex(tuple(zip(k.ids, lifts)), tuple(map(tuple, M)))


@dataclass
class SpectralResult:
    pages: list[Page]
    e_infinity: Page
    converged_at: int
    filtration: FilteredComplex


def thmA_filtration(k: KnotFloerData, r=0) -> FilteredComplex:
    lifts = window_lifts(k, r)
    period = 2 * k.chern_N
    full = k.full_boundary()
    c = GradedComplex(tuple(zip(k.ids, lifts)), tuple(map(tuple, full)), period=period)
    fc = FilteredComplex(c, tuple(lifts), "decreasing", period)
    bad = validate(fc)
    if bad:
        raise ComplexError(bad)
    return fc


def thmA_spectral(k: KnotFloerData, r=0) -> SpectralResult:
    """Period-2N filtered complex of one knot and its spectral sequence.

    The first page is checked against the homology of the lifted window.
    """
    fc = thmA_filtration(k, r)
    ss = SpectralSequence(fc)
    seq = [ss.page(i) for i in range(max(ss.last_page, 1) + 1)]
    H = homology(lift_window(k, r))
    e1 = seq[1]
    for n, g in H.items():
        got = e1.table.get((n, n % fc.step))
        if got is None or got.free_rank != g.free_rank or tuple(got.torsion) != tuple(g.torsion):
            raise StructureError(f"page 1 at lift {n} is {got}, lifted homology is {g}")
    return SpectralResult(seq, seq[-1], converged_at(seq), fc)


# ---------------------------------------------------------------- composites

LEFT, RIGHT, CIRCLE0, CIRCLE1 = "left*s", "s*right", "circle0", "circle1"


@dataclass(frozen=True)
class CompositeGenerator:
    id: str
    origin: str
    maslov: int
    left: int | None  # generator index in the left package
    right: int | None

    @property
    def level(self) -> int:
        return self.maslov - 1 if self.origin == CIRCLE1 else self.maslov

    @property
    def q(self) -> int:
        return self.maslov - self.level


@dataclass(frozen=True)
class CompositeFloerData:
    left: KnotFloerData
    right: KnotFloerData
    chern_N: int
    alpha: Fraction
    strata_generators: tuple[CompositeGenerator, ...]
    left_lifts: tuple[int, ...]
    right_lifts: tuple[int, ...]

    @property
    def braid(self) -> BraidWord | None:
        if self.left.braid is None or self.right.braid is None:
            return None
        return connected_sum(self.left.braid, self.right.braid)

    @property
    def name(self) -> str:
        return f"{self.left.name} # {self.right.name}"

    def index(self) -> dict[tuple[str, int | None, int | None], int]:
        return {(g.origin, g.left, g.right): k for k, g in enumerate(self.strata_generators)}


def compose(k1: KnotFloerData, k2: KnotFloerData, r1=None, r2=None) -> CompositeFloerData:
    """Generators of the connected-sum complex with their gradings."""
    validate_knot_data(k1)
    validate_knot_data(k2)
    mu1 = window_lifts(k1, r1) if r1 is not None else k1.maslov
    mu2 = window_lifts(k2, r2) if r2 is not None else k2.maslov
    gens: list[CompositeGenerator] = []
    for i, g in enumerate(k1.generators):
        gens.append(CompositeGenerator(f"{g.id}*s", LEFT, mu1[i], i, None))
    for j, g in enumerate(k2.generators):
        gens.append(CompositeGenerator(f"s*{g.id}", RIGHT, mu2[j], None, j))
    for i, a in enumerate(k1.generators):
        for j, b in enumerate(k2.generators):
            m = mu1[i] + mu2[j]
            gens.append(CompositeGenerator(f"({a.id}*{b.id})0", CIRCLE0, m, i, j))
            gens.append(CompositeGenerator(f"({a.id}*{b.id})1", CIRCLE1, m + 1, i, j))
    N = gcd(k1.chern_N, k2.chern_N)
    alpha = (k1.alpha * k1.chern_N + k2.alpha * k2.chern_N) / N
    return CompositeFloerData(k1, k2, N, alpha, tuple(gens), tuple(mu1), tuple(mu2))


def assemble_d1(c: CompositeFloerData) -> list[list[int]]:
    """First differential of the composite complex, ``M[target][source]``.

    Maps on the right factor carry the sign ``(-1)^maslov(left factor)``,
    with the reducible class in degree 0.  The circle's own Morse
    differential is zero.
    """
    k1, k2 = c.left, c.right
    mu1 = c.left_lifts
    pos = c.index()
    n = len(c.strata_generators)
    M = [[0] * n for _ in range(n)]
    B1, B2 = k1.boundary_Z, k2.boundary_Z
    n1, n2 = len(k1.generators), len(k2.generators)

    def add(src, tgt, coeff):
        if coeff:
            M[pos[tgt]][pos[src]] += coeff

    for i in range(n1):
        src = (LEFT, i, None)
        for t in range(n1):
            add(src, (LEFT, t, None), B1[t][i])
        sign = (-1) ** (mu1[i] % 2)
        for t in range(n2):
            add(src, (CIRCLE0, i, t), sign * k2.special_delta[t])
    for j in range(n2):
        src = (RIGHT, None, j)
        for t in range(n2):
            add(src, (RIGHT, None, t), B2[t][j])
        for h in range(n1):
            add(src, (CIRCLE0, h, j), k1.special_delta[h])
    for i in range(n1):
        sign = (-1) ** (mu1[i] % 2)
        for j in range(n2):
            for kind in (CIRCLE0, CIRCLE1):
                src = (kind, i, j)
                for t in range(n1):
                    add(src, (kind, t, j), B1[t][i])
                for t in range(n2):
                    add(src, (kind, i, t), sign * B2[t][j])
            src = (CIRCLE0, i, j)
            add(src, (RIGHT, None, j), k1.special_d[i])
            add(src, (LEFT, i, None), sign * k2.special_d[j])
    return M


def _explain_d1_failure(c: CompositeFloerData) -> tuple[str, str]:
    k1, k2 = c.left, c.right
    for label, k in (("left", k1), ("right", k2)):
        if any(k.special_d) and any(k.special_delta):
            return ("special_delta after special_d",
                    f"the {label} package has both special maps nonzero, so their "
                    "composite through the reducible class is nonzero")
    if any(k1.special_d) and any(k2.special_delta):
        return ("left special_d against right special_delta",
                "paths through a circle generator do not cancel")
    if any(k1.special_delta) and any(k2.special_d):
        return ("left special_delta against right special_d",
                "paths through a circle generator do not cancel")
    return (SPECIAL_RELATION, "inputs violate the boundary relations")


def build_d1(c: CompositeFloerData) -> list[list[int]]:
    """Assemble ``d1`` and check that it has degree -1 and squares to zero."""
    M = assemble_d1(c)
    gens = c.strata_generators
    n = len(gens)
    for s in range(n):
        for t in range(n):
            if M[t][s] and gens[t].maslov != gens[s].maslov - 1:
                raise D1Error("degree", f"{gens[s].id} -> {gens[t].id}")
    sq = la.matmul(M, M, n, n) if n else []
    if not la.is_zero(sq):
        relation, why = _explain_d1_failure(c)
        s, t = next((s, t) for s in range(n) for t in range(n) if sq[t][s])
        raise D1Error(relation, f"d1^2 sends {gens[s].id} to {sq[t][s]}*{gens[t].id}; {why}")
    return M


def thmB_filtration(c: CompositeFloerData, d2=None) -> FilteredComplex:
    gens = c.strata_generators
    n = len(gens)
    d1 = build_d1(c)
    total = [row[:] for row in d1]
    if d2 is not None:
        d2 = [list(map(int, row)) for row in d2]
        if len(d2) != n or any(len(r) != n for r in d2):
            raise PluginError(f"d2 must be {n}x{n}")
        for s in range(n):
            for t in range(n):
                if not d2[t][s]:
                    continue
                a, b = gens[s], gens[t]
                if b.level != a.level - 2 or b.q != a.q + 1:
                    raise PluginError(
                        f"d2 component {a.id} -> {b.id} goes from (p,q)=({a.level},{a.q}) "
                        f"to ({b.level},{b.q}), expected ({a.level - 2},{a.q + 1})")
                total[t][s] += d2[t][s]
        sq = la.matmul(total, total, n, n)
        if not la.is_zero(sq):
            raise PluginError("d1 d2 + d2 d1 is not zero")
    cx = GradedComplex(tuple((g.id, g.maslov) for g in gens), tuple(map(tuple, total)))
    return FilteredComplex(cx, tuple(g.level for g in gens), "increasing", 1)


def thmB_spectral(c: CompositeFloerData, d2=None) -> SpectralResult:
    """Maslov-filtered spectral sequence of a composite.

    Asserts the two-row shape, vanishing of every differential from page 3
    on, and that page 3 is already the limit.
    """
    fc = thmB_filtration(c, d2)
    ss = SpectralSequence(fc)
    last = max(ss.last_page, 3)
    seq = [ss.page(i) for i in range(last + 1)]
    for p in seq:
        for (pp, q), g in p.table.items():
            if q not in (0, 1) and not g.is_zero():
                raise StructureError(f"page {p.r} has a class at (p,q) = ({pp},{q})")
        if p.r >= 3 and not p.differentials_vanish():
            raise StructureError(f"page {p.r} has a nonzero differential")
    if seq[3].nonzero() != seq[-1].nonzero():
        raise StructureError("page 3 differs from the limit")
    return SpectralResult(seq, seq[-1], converged_at(seq), fc)


# ---------------------------------------------------------------- polynomials


@dataclass(frozen=True)
class LaurentPoly:
    coefficients: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "coefficients",
                           {int(e): int(c) for e, c in self.coefficients.items() if c})

    @classmethod
    def monomial(cls, exponent: int, coeff: int = 1) -> LaurentPoly:
        return cls({exponent: coeff})

    def __add__(self, other: LaurentPoly) -> LaurentPoly:
        out = dict(self.coefficients)
        for e, c in other.coefficients.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly(out)

    def __neg__(self) -> LaurentPoly:
        return LaurentPoly({e: -c for e, c in self.coefficients.items()})

    def __sub__(self, other: LaurentPoly) -> LaurentPoly:
        return self + (-other)

    def __mul__(self, other: LaurentPoly) -> LaurentPoly:
        out: dict[int, int] = {}
        for e1, c1 in self.coefficients.items():
            for e2, c2 in other.coefficients.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        return LaurentPoly(out)

    def __call__(self, x) -> Fraction | int:
        x = Fraction(x)
        val = sum(c * x ** e for e, c in self.coefficients.items())
        return int(val) if Fraction(val).denominator == 1 else val

    def __bool__(self) -> bool:
        return bool(self.coefficients)

    def __str__(self) -> str:
        if not self.coefficients:
            return "0"
        terms = []
        for e in sorted(self.coefficients):
            c = self.coefficients[e]
            mono = "" if e == 0 else ("t" if e == 1 else f"t^{e}")
            if mono and abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}{mono}"
            terms.append(("-" if c < 0 else "+", body))
        s = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        for sign, body in terms[1:]:
            s += f" {sign} {body}"
        return s


def laurent(p: Page) -> LaurentPoly:
    """Generating function of free ranks of a page."""
    fc = p.filtration
    out: dict[int, int] = {}
    for b, g in p.table.items():
        if g.free_rank:
            e = fc.exponent(b)
            out[e] = out.get(e, 0) + g.free_rank
    return LaurentPoly(out)


def image_poly(p: Page) -> LaurentPoly:
    """Ranks of the page differential, placed at the source bidegree."""
    fc = p.filtration
    out: dict[int, int] = {}
    for b, rk in p.image_ranks().items():
        e = fc.exponent(b)
        out[e] = out.get(e, 0) + rk
    return LaurentPoly(out)


def euler(poly: LaurentPoly) -> int:
    return int(poly(-1))


# ---------------------------------------------------------------- identities


@dataclass
class IdentityCheck:
    name: str
    passed: bool
    detail: str


@dataclass
class IdentityReport:
    checks: list[IdentityCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def by_name(self) -> dict[str, IdentityCheck]:
        return {c.name: c for c in self.checks}


def recursion_holds(pages: list[Page]) -> list[tuple[int, bool, str]]:
    """``P(E^r) = (1 + t^shift) P(B^r) + P(E^(r+1))`` for consecutive pages."""
    out = []
    for a, b in zip(pages, pages[1:]):
        fc = a.filtration
        factor = LaurentPoly.monomial(0) + LaurentPoly.monomial(fc.exponent_shift(a.r))
        rhs = factor * image_poly(a) + laurent(b)
        lhs = laurent(a)
        ok = (lhs - rhs).coefficients == {}
        out.append((a.r, ok, f"P(E^{a.r}) = {lhs}; (1+t^{fc.exponent_shift(a.r)})"
                             f"({image_poly(a)}) + ({laurent(b)})"))
    return out


def check_identities(subject: KnotFloerData | CompositeFloerData, result: SpectralResult,
                     r=0) -> IdentityReport:
    """Exact checks of the page identities; failures are entries, not exceptions."""
    checks: list[IdentityCheck] = []
    rec = recursion_holds(result.pages)
    bad = [r_ for r_, ok, _ in rec if not ok]
    checks.append(IdentityCheck(
        "poincare-laurent recursion", not bad,
        "all pages" if not bad else "fails on pages " + ", ".join(map(str, bad))))

    chis = [euler_characteristic(p) for p in result.pages]
    checks.append(IdentityCheck(
        "euler characteristic constant across pages", len(set(chis)) <= 1,
        f"chi per page: {chis}"))
    chi1 = chis[1] if len(chis) > 1 else (chis[0] if chis else 0)

    if isinstance(subject, CompositeFloerData):
        parts = []
        for k in (subject.left, subject.right):
            res = thmA_spectral(k, r)
            parts.append(euler_characteristic(res.pages[1]))
        checks.append(IdentityCheck(
            "euler characteristic additive under connected sum", chi1 == sum(parts),
            f"chi(E1) = {chi1}, factors {parts[0]} + {parts[1]}"))
    braid = subject.braid
    if braid is not None:
        sig = signature(braid)
        ok = 2 * chi1 == sig and 2 * chis[-1] == sig
        checks.append(IdentityCheck(
            "euler characteristic equals half the signature", ok,
            f"chi(E1) = {chi1}, chi(Einf) = {chis[-1]}, signature/2 = {Fraction(sig, 2)}"))
    return IdentityReport(checks)
