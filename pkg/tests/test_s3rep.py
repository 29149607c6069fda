from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from defcalc import s3rep
from defcalc.errors import PreconditionError

PRIMES = [5, 7, 11, 13]


def test_group_structure():
    els = s3rep.ELEMENTS
    assert len(set(els)) == 6
    for a, b, c in itertools.product(els, repeat=3):
        assert (a * b) * c == a * (b * c)
    s, t = s3rep.TRANSPOSITION, s3rep.THREE_CYCLE
    assert s * s == s3rep.IDENTITY and t * t * t == s3rep.IDENTITY
    assert s(1) == 2 and t(1) == 2 and t(3) == 1
    assert [g.order for g in els] == [1, 2, 2, 2, 3, 3]
    assert str(s) == "(1 2)" and str(t) == "(1 2 3)"


@pytest.mark.parametrize("p", PRIMES)
def test_irreducibles_are_homomorphisms(p):
    for rho in s3rep.irreducibles(p) + (s3rep.adjoint_rep(s3rep.standard_rep(p)),):
        assert rho.is_homomorphism()


@pytest.mark.parametrize("p", [5, 7, 11])
def test_adjoint_decomposition(p):
    ad = s3rep.adjoint_rep(s3rep.standard_rep(p))
    assert s3rep.decompose(ad) == (1, 1, 1)


@pytest.mark.parametrize("p", PRIMES)
def test_characters(p):
    triv, sign, std = s3rep.irreducibles(p)
    assert std.character().signed() == (2, 0, -1)
    assert sign.character().signed() == (1, -1, 1)
    ad = s3rep.adjoint_rep(std)
    assert ad.character().values == tuple(v % p for v in (4, 0, 1))
    for a, b in itertools.combinations_with_replacement((triv, sign, std), 2):
        expected = 1 if a is b else 0
        assert s3rep.char_inner_product(a.character(), b.character()) == expected
        assert s3rep.equivariant_hom_dim(a, b) == expected


@pytest.mark.parametrize("p", [2, 3, 4, 9])
def test_small_or_composite_primes_rejected(p):
    with pytest.raises(PreconditionError):
        s3rep.check_p(p)


def test_decompose_refuses_dimension_at_least_p():
    big = s3rep.assemble(5, (2, 2, 1))
    with pytest.raises(PreconditionError):
        s3rep.decompose(big)


@settings(max_examples=60, deadline=None)
@given(
    st.sampled_from([7, 11, 13]),
    st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2)),
    st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2)),
)
def test_hom_dimension_is_bilinear_in_multiplicities(p, m, n):
    M, N = s3rep.assemble(p, m), s3rep.assemble(p, n)
    assert s3rep.equivariant_hom_dim(M, N) == sum(a * b for a, b in zip(m, n))


@pytest.mark.parametrize("p", [5, 7])
def test_intertwiners_commute(p):
    std = s3rep.standard_rep(p)
    ad = s3rep.adjoint_rep(std)
    for T in s3rep.intertwiners(std, ad):
        T = T.reshape(ad.dim, std.dim)
        for g in s3rep.ELEMENTS:
            assert not np.any((T @ std[g] - ad[g] @ T) % p)


def test_dual_and_tensor():
    p = 7
    std = s3rep.standard_rep(p)
    assert s3rep.decompose(s3rep.dual_rep(std)) == (0, 0, 1)
    assert s3rep.decompose(s3rep.tensor_rep(std, std)) == (1, 1, 1)
    assert s3rep.tensor_rep(std, std).is_homomorphism()


def test_rep_by_name():
    assert s3rep.rep_by_name("ad", 5).dim == 4
    with pytest.raises(KeyError):
        s3rep.rep_by_name("nope", 5)
