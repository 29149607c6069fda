from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from defcalc.parser import RingSpecExpr, SpecSyntaxError, parse_ring, parse_ring_spec
from defcalc.ring import RingSpec


def test_examples():
    assert parse_ring("F5[e]/m^2") == RingSpec(5, 1, ("e",), 2)
    assert parse_ring("Z/5^2") == RingSpec(5, 2)
    big = parse_ring("F5[x1,x2,x3,x4,y1,y2,y3,y4]/m^2")
    assert big.nvars == 8 and big.N == 2 and big.k == 1


def test_whitespace_is_ignored():
    assert parse_ring_spec(" Z / 7 ^ 3 [ a , b ] / m ^ 4 ") == parse_ring_spec("Z/7^3[a,b]/m^4")


@pytest.mark.parametrize(
    "text,position",
    [
        ("", 0),
        ("G5", 0),
        ("F4", 1),
        ("F5[e]", 5),
        ("F5[e,e]/m^2", 5),
        ("F5[]/m^2", 3),
        ("F5[e]/n^2", 5),
        ("F5[e]/m^0", 8),
        ("Z/5", 3),
        ("Z/5^", 4),
        ("F5 x", 3),
        ("F5[1e]/m^2", 3),
    ],
)
def test_positioned_errors(text, position):
    with pytest.raises(SpecSyntaxError) as info:
        parse_ring_spec(text)
    assert info.value.position == position
    assert "^" in str(info.value)


def test_primes_two_and_three_are_accepted_by_the_parser():
    assert parse_ring("F3").p == 3
    assert parse_ring("F2[t]/m^2").p == 2


idents = st.from_regex(r"[A-Za-z_][A-Za-z0-9_]{0,3}", fullmatch=True)


@st.composite
def exprs(draw):
    kind = draw(st.sampled_from(["F", "Z"]))
    p = draw(st.sampled_from([2, 3, 5, 7, 11]))
    k = 1 if kind == "F" else draw(st.integers(1, 3))
    names = tuple(draw(st.lists(idents, max_size=4, unique=True)))
    trunc = draw(st.integers(1, 5)) if names else draw(st.one_of(st.none(), st.integers(1, 5)))
    return RingSpecExpr(kind, p, k, names, trunc)


@settings(max_examples=300, deadline=None)
@given(exprs())
def test_round_trip(expr):
    assert parse_ring_spec(str(expr)) == expr
    assert str(parse_ring_spec(str(expr))) == str(expr)


@settings(max_examples=300, deadline=None)
@given(st.text(alphabet="FZ/^[],m0123456789xe _", max_size=20))
def test_garbage_never_crashes(text):
    try:
        parse_ring_spec(text)
    except SpecSyntaxError as exc:
        assert 0 <= exc.position <= len(text)
