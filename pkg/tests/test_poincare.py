from fractions import Fraction

import pytest

from derham.bumps import make_tensor_bump
from derham.exterior import all_blades
from derham.forms import (PolyForm, exterior_d, q_complex_3d, qspace_membership)
from derham.poincare import (ClosednessError, PoincareContext,
                             QSpaceConditionError, check_qspace_preservation,
                             homotopy_defect_R, poincare_R,
                             poincare_unregularized,
                             poincare_unregularized_symbolic, starlike_solve,
                             verify_family_conditions, _apply_moments)
from derham.forms import QSpaceSpec, substitute_coeffs
from derham.polynomials import RationalPoly
from derham.suites import random_poly_form

F = Fraction


@pytest.fixture
def ctx2(bump2):
    return PoincareContext(bump2)


def test_worked_closed_form_r1(ctx2):
    u = PolyForm.monomial(2, (1,), (1, 0))
    got = poincare_R(ctx2, u)
    want = PolyForm(2, 0, {(): RationalPoly(2, {(2, 0): F(1, 2),
                                                (0, 0): F(-1, 10)})})
    assert got == want
    assert exterior_d(got) == u  # du = 0, so d R u = u


def test_worked_closed_form_r2(ctx2):
    v = PolyForm.monomial(2, (1, 2), (0, 0))
    got = poincare_R(ctx2, v)
    want = PolyForm(2, 1, {(2,): RationalPoly(2, {(1, 0): F(1, 2)}),
                           (1,): RationalPoly(2, {(0, 1): F(-1, 2)})})
    assert got == want
    assert exterior_d(got) == v


def test_linearity_and_zero(ctx2):
    z = poincare_R(ctx2, PolyForm.zero(2, 1))
    assert z.is_zero()
    u = PolyForm.monomial(2, (1,), (1, 1))
    v = PolyForm.monomial(2, (2,), (0, 2))
    lhs = poincare_R(ctx2, u + v.scale(F(3, 2)))
    assert lhs == poincare_R(ctx2, u) + poincare_R(ctx2, v).scale(F(3, 2))


def test_degree_bounds(ctx2):
    with pytest.raises(ValueError):
        poincare_R(ctx2, PolyForm.from_scalar(2, RationalPoly.constant(2, 1)))
    cap = make_tensor_bump(2, [0, 0], 1, 1, moment_cap=2)
    ctx = PoincareContext(cap)
    with pytest.raises(RuntimeError):
        poincare_R(ctx, PolyForm.monomial(2, (1,), (4, 0)))


def test_context_ball_validation(bump2):
    with pytest.raises(ValueError):
        PoincareContext(bump2, ball_center=[0, 0], ball_radius2=1)  # box corner sticks out
    PoincareContext(bump2, ball_center=[0, 0], ball_radius2=2)


def test_homotopy_identity_exact(rng):
    for n in (2, 3):
        th = make_tensor_bump(n, [0] * n, 1, 1)
        ctx = PoincareContext(th)
        for l in range(0, n + 1):
            for _ in range(5):
                u = random_poly_form(rng, n, l, 4)
                assert homotopy_defect_R(ctx, u).is_zero()


def test_homotopy_endpoint_l0(ctx2, bump2):
    # R1 du = u - (theta, u) for the 0-form u = x1
    u = PolyForm.from_scalar(2, RationalPoly.variable(2, 0))
    out = poincare_R(ctx2, exterior_d(u))
    assert out == u  # (theta, x1) = 0 for the centered bump
    assert homotopy_defect_R(ctx2, u).is_zero()


def test_unregularized_curl_example():
    # n=3, l=2, u = dx2^dx3, a = 0: R_a u = (x2 dx3 - x3 dx2)/2 = -x cross u/2
    u = PolyForm.monomial(3, (2, 3), (0, 0, 0))
    got = poincare_unregularized(u, [0, 0, 0])
    want = PolyForm(3, 1, {(3,): RationalPoly(3, {(0, 1, 0): F(1, 2)}),
                           (2,): RationalPoly(3, {(0, 0, 1): F(-1, 2)})})
    assert got == want


def test_unregularized_gradient_case(rng):
    # J_a(d u0) = u0 - u0(a)
    for _ in range(6):
        n = rng.randint(2, 3)
        from derham.suites import random_poly
        u0 = random_poly(rng, n, 3)
        a = [F(rng.randint(-2, 2), rng.randint(1, 3)) for _ in range(n)]
        du0 = PolyForm(n, 1, {(i + 1,): u0.diff(i) for i in range(n)})
        got = poincare_unregularized(du0, a)
        want = PolyForm(n, 0, {(): u0 - RationalPoly.constant(n, u0.eval_exact(a))})
        assert got == want


def test_unregularized_vanishes_at_base_point(rng):
    for _ in range(5):
        u = random_poly_form(rng, 3, 2, 2)
        a = [F(rng.randint(-2, 2), rng.randint(1, 3)) for _ in range(3)]
        assert poincare_unregularized(u, a).as_ext_element(a).is_zero()


def test_averaging_consistency(rng, bump2):
    ctx = PoincareContext(bump2)
    for _ in range(5):
        l = rng.randint(1, 2)
        u = random_poly_form(rng, 2, l, 3)
        sym = poincare_unregularized_symbolic(u)
        assert _apply_moments(sym, bump2) == poincare_R(ctx, u)
        a = [F(rng.randint(-2, 2), rng.randint(1, 3)) for _ in range(2)]
        subs = {0: RationalPoly.variable(2, 0), 1: RationalPoly.variable(2, 1),
                2: RationalPoly.constant(2, a[0]), 3: RationalPoly.constant(2, a[1])}
        assert substitute_coeffs(sym, subs, 2) == poincare_unregularized(u, a)


def test_output_degree_growth(ctx2, rng):
    hit = False
    for _ in range(8):
        u = random_poly_form(rng, 2, 1, 3)
        img = poincare_R(ctx2, u)
        assert img.max_total_degree() <= u.max_total_degree() + 1
        hit = hit or img.max_total_degree() == u.max_total_degree() + 1
    assert hit


def test_qspace_preservation():
    th = make_tensor_bump(3, [0, 0, 0], 1, 1)
    ctx = PoincareContext(th)
    for p in (1, 2):
        specs = q_complex_3d(p)
        for l in (1, 2, 3):
            out = check_qspace_preservation(ctx, specs, l)
            assert out["all_preserved"], out
            assert out["count"] > 0


def test_qspace_condition_diagnostic():
    # a family violating Koszul closure: the target space is too small
    bad = [QSpaceSpec(2, 0, {(): (0, 0)}),
           QSpaceSpec(2, 1, {(1,): (1, 1), (2,): (1, 1)})]
    with pytest.raises(QSpaceConditionError):
        verify_family_conditions(bad, 1)


def test_starlike_solve(ctx2, rng):
    u = PolyForm.monomial(2, (1,), (1, 0))
    v = starlike_solve(ctx2, u)
    assert exterior_d(v) == u
    # top degree: the condition du = 0 is automatic
    top = random_poly_form(rng, 2, 2, 3)
    v2 = starlike_solve(ctx2, top)
    assert exterior_d(v2) == top
    # non-closed input is rejected with the exact residual
    with pytest.raises(ClosednessError) as err:
        starlike_solve(ctx2, PolyForm.monomial(2, (1,), (0, 1)))
    assert err.value.residual == PolyForm(
        2, 2, {(1, 2): RationalPoly.constant(2, -1)})


def test_extended_operators(ctx2, bump2):
    from derham.poincare import extended_R
    one = PolyForm.from_scalar(2, RationalPoly.constant(2, 1))
    assert extended_R(ctx2, one) == 1
    a1 = PolyForm.from_scalar(2, RationalPoly.variable(2, 0))
    assert extended_R(ctx2, a1) == 0
    z = extended_R(ctx2, PolyForm.zero(2, 3))
    assert z.is_zero()
