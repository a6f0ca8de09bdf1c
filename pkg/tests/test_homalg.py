from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from knotfloer.homalg import (
    ComplexError,
    FilteredComplex,
    GradedComplex,
    Group,
    SpectralSequence,
    converged_at,
    euler_characteristic,
    homology,
    limit,
    pages,
    validate,
)

from oracles import rational_rank, smith_invariants
from strategies import degree_of, random_filtered_complex

seeds = st.integers(0, 2**32 - 1)


def two_step(coeff: int) -> FilteredComplex:
    c = GradedComplex.build({"x": 1, "y": 0}, {("x", "y"): coeff})
    return FilteredComplex(c, (1, 0), "increasing")


class TestHomology:
    def test_circle_cells(self):
        c = GradedComplex.build({"e": 1, "v": 0}, {})
        assert homology(c) == {0: Group(1), 1: Group(1)}

    def test_torsion(self):
        c = GradedComplex.build({"x": 1, "y": 0}, {("x", "y"): 2})
        assert homology(c) == {0: Group(0, (2,)), 1: Group(0)}

    def test_periodic_degrees_wrap(self):
        c = GradedComplex.build({"a": 0, "b": 1}, {("a", "b"): 1, ("b", "a"): 0}, period=2)
        assert c.lower(0) == 1
        assert homology(c) == {0: Group(0), 1: Group(0)}

    @given(seeds)
    @settings(max_examples=80, deadline=None)
    def test_matches_smith_oracle(self, seed):
        c = random_filtered_complex(random.Random(seed)).complex
        H = homology(c)
        for d, gens in c.by_degree.items():
            up = c.raise_(d)
            n_up = len(c.by_degree.get(up, []))
            into = c.block(up)
            free = len(gens) - rational_rank(c.block(d), len(gens)) - rational_rank(into, n_up)
            assert H[d].free_rank == free
            assert list(H[d].torsion) == [x for x in smith_invariants(into, n_up) if x > 1]


class TestValidate:
    def test_degree_violation(self):
        c = GradedComplex.build({"x": 2, "y": 0}, {("x", "y"): 1})
        assert [v.kind for v in validate(c)] == ["degree"]

    def test_square_violation(self):
        c = GradedComplex.build({"x": 2, "y": 1, "z": 0}, {("x", "y"): 1, ("y", "z"): 1})
        assert "boundary_squared" in [v.kind for v in validate(c)]

    def test_increasing_filtration_violation(self):
        c = GradedComplex.build({"x": 1, "y": 0}, {("x", "y"): 1})
        fc = FilteredComplex(c, (0, 1), "increasing")
        assert [v.kind for v in validate(fc)] == ["filtration"]
        with pytest.raises(ComplexError):
            SpectralSequence(fc)

    def test_decreasing_level_progression(self):
        c = GradedComplex.build({"x": 1}, {}, period=4)
        fc = FilteredComplex(c, (2,), "decreasing", step=2)
        assert [v.kind for v in validate(fc)] == ["level"]

    def test_increasing_needs_integer_grading(self):
        c = GradedComplex.build({"x": 1}, {}, period=2)
        with pytest.raises(ValueError):
            FilteredComplex(c, (0,), "increasing")


class TestPages:
    def test_unit_differential_kills_both(self):
        seq = pages(two_step(1))
        assert seq[1].free_table() == {(1, 0): 1, (0, 0): 1}
        assert seq[1].differentials[(1, 0)].target == (0, 0)
        assert seq[1].differentials[(1, 0)].matrix == [[1]]
        assert seq[2].nonzero() == {}
        assert converged_at(seq) == 2

    def test_multiplication_by_two_leaves_torsion(self):
        seq = pages(two_step(2))
        assert seq[2].nonzero() == {(0, 0): Group(0, (2,))}

    def test_decreasing_higher_differential(self):
        # step 2: a boundary raising the level by 1 shows up on page 1
        c = GradedComplex.build({"x": 1, "y": 0}, {("x", "y"): 1}, period=2)
        fc = FilteredComplex(c, (1, 2), "decreasing", step=2)
        seq = pages(fc)
        assert seq[0].differentials_vanish()
        d = seq[1].differentials[(1, 1)]
        assert d.target == (2, 0) and d.matrix == [[1]]
        assert seq[2].nonzero() == {}

    def test_associated_graded_on_page_zero(self):
        rng = random.Random(11)
        for _ in range(20):
            fc = random_filtered_complex(rng)
            p0 = pages(fc, 0)[0]
            assert sum(g.free_rank for g in p0.table.values()) == len(fc.complex)

    @given(seeds)
    @settings(max_examples=80, deadline=None)
    def test_limit_and_euler(self, seed):
        fc = random_filtered_complex(random.Random(seed))
        einf, at = limit(fc)
        seq = pages(fc)
        assert len({euler_characteristic(p) for p in seq}) == 1
        for p in seq[at:]:
            assert p.differentials_vanish()
            assert p.nonzero() == einf.nonzero()
        H = homology(fc.complex)
        ranks: dict[int, int] = {}
        for b, g in einf.table.items():
            ranks[degree_of(fc, b)] = ranks.get(degree_of(fc, b), 0) + g.free_rank
        assert all(ranks.get(d, 0) == g.free_rank for d, g in H.items())

    @given(seeds)
    @settings(max_examples=60, deadline=None)
    def test_each_page_is_homology_of_previous(self, seed):
        # free rank of E^(r+1) = free rank of E^r minus twice the rank of d_r
        fc = random_filtered_complex(random.Random(seed))
        seq = pages(fc)
        for a, b in zip(seq, seq[1:]):
            lost = 2 * sum(a.image_ranks().values())
            assert sum(g.free_rank for g in a.table.values()) - lost == \
                sum(g.free_rank for g in b.table.values())


def test_step_four_crossing_differential():
    # x at level 0 hits y at level 3 = 0 + 4*1 - 1, degrees mod 4
    c = GradedComplex.build({"x": 0, "y": 3}, {("x", "y"): 1}, period=4)
    fc = FilteredComplex(c, (0, 3), "decreasing", step=4)
    seq = pages(fc)
    assert seq[0].differentials_vanish()
    assert seq[1].differentials[(0, 0)].target == (3, 3)
    assert seq[2].nonzero() == {}


def test_zero_boundary_converges_immediately():
    c = GradedComplex.build({"a": 0, "b": 1, "c": 1}, {})
    fc = FilteredComplex(c, (0, 2, 5), "increasing")
    seq = pages(fc)
    assert all(p.nonzero() == seq[0].nonzero() for p in seq)
    assert limit(fc)[1] == 0


@given(seeds)
@settings(max_examples=60, deadline=None)
def test_free_ranks_never_grow(seed):
    fc = random_filtered_complex(random.Random(seed))
    seq = pages(fc)
    for a, b in zip(seq, seq[1:]):
        for bideg, g in b.table.items():
            assert g.free_rank <= a.table[bideg].free_rank
