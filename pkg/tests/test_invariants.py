from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from knotfloer.braid import BraidError, BraidWord, connected_sum, markov_conjugate, markov_stabilize, parse_braid
from knotfloer.invariants import congruence_inertia, determinant, integer_det, seifert_matrix, signature

from oracles import alexander_at_minus_one, float_signature
from strategies import random_knot_braid


@st.composite
def knot_braids(draw, max_strands=5, max_letters=12):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_knot_braid(random.Random(seed), max_strands, max_letters)


# Standard table values: torus knots and small twist knots.
KNOWN = [
    ("s1", 0, 1),
    ("s1^3", -2, 3),
    ("s1^-3", 2, 3),
    ("s1^5", -4, 5),
    ("s1 s2^-1 s1 s2^-1", 0, 5),
    ("s1^3 s2^3", -4, 9),
    ("s1^3 s2^-3", 0, 9),
    ("s1 s2 s1 s2 s1 s2 s1 s2", -6, 3),  # T(3,4)
    ("s1 s2 s1 s2 s1 s2 s1 s2 s1 s2", -8, 1),  # T(3,5)
]


@pytest.mark.parametrize("word,sig,det", KNOWN)
def test_known_values(word, sig, det):
    b = parse_braid(word)
    assert signature(b) == sig
    assert determinant(b) == det


def test_trefoil_seifert_matrix():
    V = seifert_matrix(parse_braid("s1^3"))
    assert V.entries == ((-1, 1), (0, -1))


def test_links_rejected():
    with pytest.raises(BraidError):
        signature(parse_braid("s1^2"))


def test_inertia_of_small_forms():
    assert congruence_inertia([[0, 1], [1, 0]]) == (1, 1, 0)
    assert congruence_inertia([[2, 1], [1, 2]]) == (2, 0, 0)
    assert congruence_inertia([[1, 1], [1, 1]]) == (1, 0, 1)
    assert congruence_inertia([]) == (0, 0, 0)


@given(st.lists(st.lists(st.integers(-5, 5), min_size=4, max_size=4), min_size=4, max_size=4))
def test_bareiss_matches_float_det(M):
    import numpy as np
    assert integer_det(M) == round(np.linalg.det(np.array(M, dtype=float)))


@given(knot_braids())
@settings(max_examples=60, deadline=None)
def test_determinant_matches_alexander_oracle(b):
    assert determinant(b) == abs(alexander_at_minus_one(b.strands, b.letters))


@given(knot_braids())
@settings(max_examples=60, deadline=None)
def test_signature_sign_agrees_with_alexander_oracle(b):
    # Conway-normalized Alexander polynomial at -1 has sign (-1)^(signature/2)
    val = alexander_at_minus_one(b.strands, b.letters)
    assert (val > 0) == (signature(b) % 4 == 0)


@given(knot_braids())
@settings(max_examples=60, deadline=None)
def test_exact_and_float_signature_agree(b):
    assert signature(b) == float_signature(seifert_matrix(b).symmetrized())


@given(knot_braids())
@settings(max_examples=60, deadline=None)
def test_signature_even_and_mirror_negates(b):
    s = signature(b)
    assert s % 2 == 0
    assert signature(b.mirror()) == -s
    assert abs(s) <= seifert_matrix(b).size


@given(knot_braids(), knot_braids())
@settings(max_examples=40, deadline=None)
def test_additive_under_connected_sum(b1, b2):
    b = connected_sum(b1, b2)
    assert signature(b) == signature(b1) + signature(b2)
    assert determinant(b) == determinant(b1) * determinant(b2)


@given(knot_braids(), st.lists(st.integers(1, 4), max_size=4), st.booleans())
@settings(max_examples=60, deadline=None)
def test_markov_invariance(b, xs, stab):
    x = BraidWord(b.strands, tuple(e for e in xs if e < b.strands))
    c = markov_conjugate(b, x)
    if stab:
        c = markov_stabilize(c)
    assert signature(c) == signature(b)
    assert determinant(c) == determinant(b)
