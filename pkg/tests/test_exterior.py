from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from derham.exterior import (DimensionError, ExtElement, all_blades, contract,
                             hodge_star, hodge_star_inverse, inner, merge_sign,
                             wedge)

F = Fraction


def basis(n, blade):
    return ExtElement(n, len(blade), {tuple(blade): F(1)})


def test_blade_validation():
    with pytest.raises(DimensionError):
        ExtElement(3, 2, {(2, 1): F(1)})
    with pytest.raises(DimensionError):
        ExtElement(3, 2, {(1, 4): F(1)})
    with pytest.raises(DimensionError):
        ExtElement(3, 1, {(1, 2): F(1)})


def test_merge_sign_examples():
    assert merge_sign((1,), (2,)) == (1, (1, 2))
    assert merge_sign((2,), (1,)) == (-1, (1, 2))
    assert merge_sign((1,), (1,)) == (0, None)
    assert merge_sign((2, 4), (1, 3)) == (-1, (1, 2, 3, 4))


def test_wedge_examples():
    dx1, dx2, dx3 = (basis(3, (i,)) for i in (1, 2, 3))
    assert wedge(dx1, dx1).is_zero()
    assert wedge(dx2, dx1) == -basis(3, (1, 2))
    assert wedge(dx1 + dx2, dx3) == basis(3, (1, 3)) + basis(3, (2, 3))


def test_wedge_degree_overflow_is_zero():
    u = basis(2, (1, 2))
    out = wedge(u, basis(2, (1,)))
    assert out.is_zero() and out.degree == 3


def test_contraction_examples():
    a = ExtElement.vector(3, [F(2), F(3), F(5)])
    assert contract(a, basis(3, (1, 2))) == ExtElement(
        3, 1, {(2,): F(2), (1,): F(-3)})
    # scalar contracts to zero
    assert contract(a, ExtElement.scalar(3, F(7))).is_zero()
    # volume form: a1 dx23 - a2 dx13 + a3 dx12
    out = contract(a, basis(3, (1, 2, 3)))
    assert out == ExtElement(3, 2, {(2, 3): F(2), (1, 3): F(-3), (1, 2): F(5)})


def test_contract_requires_degree_one():
    with pytest.raises(DimensionError):
        contract(basis(3, (1, 2)), basis(3, (1, 2, 3)))


def test_inner_orthonormal():
    assert inner(basis(3, (1, 2)), basis(3, (1, 2))) == 1
    assert inner(basis(3, (1, 2)), basis(3, (1, 3))) == 0
    with pytest.raises(DimensionError):
        inner(basis(3, (1,)), basis(3, (1, 2)))


def test_hodge_examples():
    assert hodge_star(basis(3, (1,))) == basis(3, (2, 3))
    assert hodge_star(basis(2, ())) == basis(2, (1, 2))
    # normalization b ^ star b = volume, every blade, n <= 6
    for n in range(1, 7):
        vol = basis(n, tuple(range(1, n + 1)))
        for l in range(0, n + 1):
            for b in all_blades(n, l):
                e = basis(n, b)
                assert wedge(e, hodge_star(e)) == vol


small_fraction = st.fractions(min_value=-4, max_value=4, max_denominator=6)


@st.composite
def element(draw, n=None, degree=None):
    n = n if n is not None else draw(st.integers(2, 6))
    l = degree if degree is not None else draw(st.integers(0, n))
    blades = all_blades(n, l)
    coeffs = {b: draw(small_fraction) for b in blades}
    return ExtElement(n, l, coeffs)


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_star_star_identity(data):
    u = data.draw(element())
    got = hodge_star(hodge_star(u))
    want = u if (u.degree * (u.n - u.degree)) % 2 == 0 else -u
    assert got == want
    assert hodge_star_inverse(hodge_star(u)) == u


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_star_wedge_identity(data):
    n = data.draw(st.integers(2, 6))
    u = data.draw(element(n=n))
    a = data.draw(element(n=n, degree=1))
    lhs = hodge_star(wedge(a, u))
    rhs = contract(a, hodge_star(u))
    if u.degree % 2:
        rhs = -rhs
    assert lhs == rhs


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_star_preserves_inner(data):
    n = data.draw(st.integers(2, 6))
    l = data.draw(st.integers(0, n))
    u = data.draw(element(n=n, degree=l))
    v = data.draw(element(n=n, degree=l))
    ip = inner(u, v)
    assert inner(hodge_star(u), hodge_star(v)) == ip
    assert hodge_star(wedge(u, hodge_star(v))).coeffs.get((), F(0)) == ip


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_adjunction(data):
    n = data.draw(st.integers(2, 6))
    l = data.draw(st.integers(0, n - 1))
    u = data.draw(element(n=n, degree=l))
    w = data.draw(element(n=n, degree=l + 1))
    a = data.draw(element(n=n, degree=1))
    assert inner(w, wedge(a, u)) == inner(u, contract(a, w))


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_contraction_antiderivation(data):
    n = data.draw(st.integers(2, 5))
    l = data.draw(st.integers(0, n))
    m = data.draw(st.integers(0, n - l))
    u = data.draw(element(n=n, degree=l))
    v = data.draw(element(n=n, degree=m))
    a = data.draw(element(n=n, degree=1))
    lhs = contract(a, wedge(u, v))
    second = wedge(u, contract(a, v))
    rhs = wedge(contract(a, u), v) + (second if l % 2 == 0 else -second)
    assert lhs == rhs


def test_r3_vector_correspondence(rng):
    # a ^ u <-> a x u and a .| u <-> a . u for 1-forms u in R^3
    for _ in range(30):
        a = [F(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(3)]
        u = [F(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(3)]
        av, uv = ExtElement.vector(3, a), ExtElement.vector(3, u)
        cross = [a[1] * u[2] - a[2] * u[1],
                 a[2] * u[0] - a[0] * u[2],
                 a[0] * u[1] - a[1] * u[0]]
        w = wedge(av, uv)
        assert [w.coeffs.get((2, 3), F(0)), -w.coeffs.get((1, 3), F(0)),
                w.coeffs.get((1, 2), F(0))] == cross
        assert inner(av, uv) == sum(x * y for x, y in zip(a, u))
        # 2-form side: a ^ u2 = a . u2 (volume part), a .| u2 = -a x u2
        u2 = ExtElement(3, 2, {(2, 3): u[0], (1, 3): -u[1], (1, 2): u[2]})
        assert wedge(av, u2).coeffs.get((1, 2, 3), F(0)) == \
            sum(x * y for x, y in zip(a, u))
        c = contract(av, u2)
        assert [c.coeffs.get((i,), F(0)) for i in (1, 2, 3)] == \
            [-v for v in cross]
