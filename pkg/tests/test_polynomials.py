from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from derham.polynomials import DegreeCapExceeded, RationalPoly

F = Fraction


def test_canonical_form():
    p = RationalPoly(2, {(1, 0): F(1), (0, 1): F(-1)})
    q = RationalPoly(2, {(0, 1): F(-1), (1, 0): F(1), (2, 2): F(0)})
    assert p == q
    assert (p - p).is_zero()
    assert not RationalPoly.zero(3)


def test_degrees():
    p = RationalPoly(3, {(2, 0, 1): F(1), (0, 3, 0): F(2)})
    assert p.total_degree() == 3
    assert p.partial_degrees() == (2, 3, 1)
    assert RationalPoly.zero(3).total_degree() == -1


def test_arithmetic_and_diff():
    x = RationalPoly.variable(2, 0)
    y = RationalPoly.variable(2, 1)
    p = (x + y) ** 3
    assert p.diff(0) == 3 * (x + y) ** 2
    assert p.eval_exact([F(1), F(2)]) == 27
    assert (p * 0).is_zero()


def test_integrate_01():
    x = RationalPoly.variable(2, 0)
    y = RationalPoly.variable(2, 1)
    p = x * x * y
    out = p.definite_integral_01(0)
    assert out == y * F(1, 3)


def test_substitute_affine():
    x = RationalPoly.variable(1, 0)
    p = x ** 2 + 2 * x
    g = RationalPoly(1, {(1,): F(2), (0,): F(1)})  # 2t + 1
    got = p.substitute({0: g})
    t = RationalPoly.variable(1, 0)
    assert got == (2 * t + 1) ** 2 + 2 * (2 * t + 1)


def test_degree_cap():
    x = RationalPoly.variable(1, 0)
    p = x ** 9
    with pytest.raises(DegreeCapExceeded):
        p.substitute({0: x ** 2}, cap=16)


def test_shift_vars():
    p = RationalPoly(2, {(1, 2): F(3)})
    q = p.shift_vars(1, 4)
    assert q.terms == {(0, 1, 2, 0): F(3)}


def test_eval_array_matches_exact(nprng):
    p = RationalPoly(2, {(2, 1): F(1, 3), (0, 0): F(-2), (1, 0): F(5, 7)})
    pts = nprng.uniform(-2, 2, size=(40, 2))
    got = p.eval_array(pts)
    want = [float(p.eval_exact([F(x).limit_denominator(10**8),
                                F(y).limit_denominator(10**8)]))
            for x, y in pts]
    assert np.allclose(got, want, rtol=1e-9)


coeff = st.fractions(min_value=-5, max_value=5, max_denominator=8)


@st.composite
def poly(draw, nvars=2, max_deg=4):
    terms = {}
    for _ in range(draw(st.integers(0, 5))):
        alpha = tuple(draw(st.integers(0, max_deg)) for _ in range(nvars))
        terms[alpha] = draw(coeff)
    return RationalPoly(nvars, terms)


@given(poly(), poly(), poly())
@settings(max_examples=50, deadline=None)
def test_ring_axioms(p, q, r):
    assert p + q == q + p
    assert p * q == q * p
    assert p * (q + r) == p * q + p * r
    assert (p - p).is_zero()


@given(poly(), poly())
@settings(max_examples=50, deadline=None)
def test_diff_leibniz(p, q):
    assert (p * q).diff(0) == p.diff(0) * q + p * q.diff(0)
