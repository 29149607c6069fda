from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from defcalc import s3rep
from defcalc.errors import BudgetExceeded, NotAUnit, PreconditionError
from defcalc.matgroup import (
    ElementaryAbelianGroup,
    FiniteMatrixGroup,
    GammaElement,
    Mat2,
    build_sigma,
    conj_act,
    conj_act_arrays,
    enumerate_gamma,
    evaluate_word,
    first_order_coords_arrays,
    from_first_order_coords_arrays,
    gamma_array,
    mat_inv_arrays,
    mat_mul_arrays,
    random_gamma_arrays,
    subgroup_closure,
)
from defcalc.ring import RingSpec

DUAL = RingSpec(5, 1, ("e",), 2)
CUBIC = RingSpec(5, 1, ("x",), 3)
Z25 = RingSpec(5, 2)


@pytest.mark.parametrize("spec", [RingSpec(5), DUAL, Z25])
def test_gamma_enumeration_matches_closed_form(spec):
    arr = gamma_array(spec)
    assert len(arr) == spec.gamma_order
    assert len(np.unique(arr.reshape(len(arr), -1), axis=0)) == spec.gamma_order
    assert sum(1 for _ in enumerate_gamma(spec)) == spec.gamma_order


def test_gamma_budget():
    with pytest.raises(BudgetExceeded):
        gamma_array(CUBIC, budget=1000)


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_sigma_is_a_homomorphism(p):
    for spec in (RingSpec(p), RingSpec(p, 1, ("e",), 2), RingSpec(p, 2)):
        sigma = build_sigma(spec)
        assert sigma.multiplicativity_failures() == []
        assert sigma[s3rep.IDENTITY] == Mat2.identity(spec)


@pytest.mark.parametrize("p", [2, 3])
def test_sigma_rejects_small_primes(p):
    with pytest.raises(PreconditionError):
        build_sigma(RingSpec(p))


def test_sigma_reduces_to_standard_rep():
    std = s3rep.standard_rep(5)
    sigma = build_sigma(DUAL)
    for a in s3rep.ELEMENTS:
        assert np.array_equal(np.array(sigma[a].residue()).reshape(2, 2), std[a] % 5)


def test_worked_conjugation():
    R = RingSpec(5, 1, ("X1", "X2", "X3", "X4"), 2)
    x1, x2, x3, x4 = R.gens
    X = Mat2(1 + x1, x2, x3, 1 + x4)
    assert X.det() == 1 + x1 + x4
    got = conj_act(s3rep.TRANSPOSITION, X, build_sigma(R))
    assert got == Mat2(1 + x4, x3, x2, 1 + x1)


def test_gamma_membership():
    e = DUAL.gen("e")
    GammaElement(1 + e, e, 0 * e, DUAL.one)
    with pytest.raises(ValueError):
        GammaElement(DUAL(2), e, e, DUAL.one)
    assert Mat2(1 + e, e, e, DUAL.one) == GammaElement(1 + e, e, e, DUAL.one)


def test_singular_matrix_has_no_inverse():
    one = DUAL.one
    with pytest.raises(NotAUnit):
        Mat2(one, one, one, one).inverse()


def gamma_pairs(spec):
    def build(seed):
        rng = np.random.default_rng(seed)
        return random_gamma_arrays(spec, rng, 2)

    return st.integers(0, 10_000).map(build)


@settings(max_examples=40, deadline=None)
@given(gamma_pairs(CUBIC))
def test_batched_ops_match_scalar(pair):
    g, h = (Mat2.from_array(CUBIC, a) for a in pair)
    assert Mat2.from_array(CUBIC, mat_mul_arrays(CUBIC, pair[0], pair[1])) == g * h
    assert Mat2.from_array(CUBIC, mat_inv_arrays(CUBIC, pair[:1])[0]) == g.inverse()
    assert g * g.inverse() == Mat2.identity(CUBIC)
    sigma = build_sigma(CUBIC)
    for a in s3rep.ELEMENTS:
        batched = conj_act_arrays(CUBIC, a, pair[0], sigma)
        assert Mat2.from_array(CUBIC, batched) == conj_act(a, g, sigma)


def test_conjugation_is_an_action():
    sigma = build_sigma(CUBIC)
    g = Mat2.from_array(CUBIC, random_gamma_arrays(CUBIC, np.random.default_rng(3), 1)[0])
    for a in s3rep.ELEMENTS:
        for b in s3rep.ELEMENTS:
            assert conj_act(a, conj_act(b, g, sigma), sigma) == conj_act(a * b, g, sigma)


def test_closure_examples():
    e = DUAL.gen("e")
    G = subgroup_closure([Mat2(DUAL.one, e, 0 * e, DUAL.one)], DUAL)
    assert isinstance(G, ElementaryAbelianGroup) and G.order == 5
    H = subgroup_closure([Mat2.from_ints(Z25, ((1, 5), (0, 1)))], Z25)
    assert H.order == 5
    x = CUBIC.gen("x")
    K = subgroup_closure([Mat2(CUBIC.one, x, 0 * x, CUBIC.one)], CUBIC)
    assert isinstance(K, FiniteMatrixGroup) and K.order == 5


def test_bfs_closure_words_evaluate_back():
    x = CUBIC.gen("x")
    gens = [Mat2(CUBIC.one, x, 0 * x, CUBIC.one), Mat2(CUBIC.one, 0 * x, x, CUBIC.one)]
    G = subgroup_closure(gens, CUBIC)
    assert isinstance(G, FiniteMatrixGroup) and G.is_closed()
    for g in list(G)[:50]:
        assert evaluate_word(G.word(g), gens, CUBIC) == g


def test_elementary_abelian_closure_agrees_with_bfs():
    e = DUAL.gen("e")
    gens = [Mat2(DUAL.one, e, 0 * e, DUAL.one), Mat2(1 + e, 0 * e, 0 * e, 1 - e)]
    lazy = subgroup_closure(gens, DUAL)
    assert isinstance(lazy, ElementaryAbelianGroup)
    materialized = {g.key() for g in lazy.elements()}
    assert len(materialized) == lazy.order == 25
    assert all(g in lazy for g in lazy.elements())


def test_first_order_coordinates_round_trip():
    for spec in (DUAL, Z25):
        G = gamma_array(spec)
        coords = first_order_coords_arrays(spec, G)
        assert np.array_equal(from_first_order_coords_arrays(spec, coords), G)
