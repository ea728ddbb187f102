from fractions import Fraction

import numpy as np
import pytest

from derham.bogovskii import (BogovskiiContext, SingularEvaluationError,
                              adjoint_pairings, bogovskii_T, fd_exterior_d,
                              homotopy_residual_T, integrate_form, kernel_G,
                              kernel_G_homogeneous, poincare_R_numeric,
                              weak_singularity_scan)
from derham.bumps import make_tensor_bump
from derham.forms import PolyForm
from derham.poincare import PoincareContext, poincare_R
from derham.polynomials import RationalPoly
from derham.sampled import (poly_bump_form, poly_plateau_form,
                            random_poly_bump_form, star_theta_form,
                            zero_mean_volume_form)

F = Fraction


@pytest.fixture
def ctx2(bump2_smooth):
    return BogovskiiContext(bump2_smooth, outer_points=12, inner_points=12,
                            inner_panels=2)


def test_T_zero_outside_starlike_hull(ctx2, nprng):
    u = random_poly_bump_form(2, 1, nprng, center=[1.6, 0.2], radius=0.35)
    # points on the far side of the bump, outside conv(supp u, B)
    for x in ([-2.0, 0.0], [0.0, 2.5], [1.6, -2.2], [3.5, 1.5]):
        val = bogovskii_T(ctx2, u, np.asarray(x))
        assert np.all(val == 0.0)


def test_T_zero_input(ctx2):
    z = poly_bump_form(2, 1, [0, 0], 0.4, {})
    assert np.all(bogovskii_T(ctx2, z, np.array([0.1, 0.2])) == 0.0)


def test_homotopy_l0_exactness(ctx2, nprng):
    # T1 du = u: with exact ray clipping the quadrature is near machine
    u = random_poly_bump_form(2, 0, nprng, center=[0.2, 0.1], radius=0.7)
    out = homotopy_residual_T(ctx2, u, nprng.uniform(-0.4, 0.4, size=(12, 2)))
    assert out["max_residual"] < 1e-10


def test_homotopy_middle_degree(ctx2, nprng):
    u = random_poly_bump_form(2, 1, nprng, center=[0.1, -0.1], radius=0.7)
    out = homotopy_residual_T(ctx2, u, nprng.uniform(-0.4, 0.4, size=(8, 2)))
    assert out["max_residual"] < 5e-4


def test_homotopy_top_degree_zero_mean(ctx2, nprng):
    u = zero_mean_volume_form(2, [0.3, 0.2], [-0.25, -0.15], 0.45)
    out = homotopy_residual_T(ctx2, u, nprng.uniform(-0.35, 0.35, size=(8, 2)))
    assert out["max_residual"] < 5e-4


def test_homotopy_star_theta(ctx2, bump2_smooth, nprng):
    # u = star theta: d T_n u = u - (int u) star theta = 0
    st = star_theta_form(bump2_smooth)
    out = homotopy_residual_T(ctx2, st, nprng.uniform(-0.2, 0.2, size=(6, 2)))
    assert out["max_residual"] < 5e-4


def test_homotopy_3d(nprng):
    th = make_tensor_bump(3, [0, 0, 0], F(1, 2), 4)
    ctx = BogovskiiContext(th, outer_points=8, inner_points=12, inner_panels=1)
    pts = nprng.uniform(-0.35, 0.35, size=(4, 3))
    for l in (1, 2):
        u = random_poly_bump_form(3, l, nprng, center=[0.1, 0.0, 0.05],
                                  radius=0.7)
        out = homotopy_residual_T(ctx, u, pts)
        assert out["max_residual"] < 5e-4, (l, out["max_residual"])


def test_quadrature_convergence_order(nprng):
    # doubling the points per axis shrinks the residual by at least 4x
    th = make_tensor_bump(2, [0, 0], F(1, 2), 4)
    u = random_poly_bump_form(2, 0, nprng, center=[0.15, 0.05], radius=0.6,
                              k=2, poly_degree=4)
    pts = nprng.uniform(-0.35, 0.35, size=(10, 2))
    res = []
    for p in (3, 6, 12):
        ctx = BogovskiiContext(th, outer_points=p, inner_points=max(3, p // 2),
                               inner_panels=1)
        res.append(homotopy_residual_T(ctx, u, pts)["max_residual"])
    assert res[0] / res[1] >= 4.0
    assert res[1] / res[2] >= 4.0


def test_numeric_R_matches_exact_on_plateau(nprng):
    th = make_tensor_bump(2, [0, 0], F(1, 5), 3)
    bctx = BogovskiiContext(th, outer_points=14, inner_points=14)
    pctx = PoincareContext(th)
    comp = {(1,): RationalPoly(2, {(1, 0): F(1), (0, 1): F(-2)}),
            (2,): RationalPoly(2, {(1, 1): F(1)})}
    u_sampled = poly_plateau_form(2, 1, [0, 0], 0.8, 1.1, comp)
    exact = poincare_R(pctx, PolyForm(2, 1, comp)).coeffs[()]
    for _ in range(5):
        x = nprng.uniform(-0.3, 0.3, 2)
        num = poincare_R_numeric(bctx, u_sampled, x)[0]
        assert abs(num - float(exact.eval_array(x[None, :])[0])) < 1e-12


def test_adjoint_duality(bump2_smooth, nprng):
    ctx = BogovskiiContext(bump2_smooth, outer_points=12, inner_points=12,
                           inner_panels=2, pair_points=20)
    for l in (0, 1):
        u = random_poly_bump_form(2, l, nprng, center=[0.1, 0.0], radius=0.6)
        v = random_poly_bump_form(2, l + 1, nprng, center=[-0.05, 0.1], radius=0.6)
        lhs, rhs = adjoint_pairings(ctx, u, v)
        assert abs(lhs - rhs) <= 1e-5 * max(abs(lhs), 1e-10), (l, lhs, rhs)


def test_adjoint_zero_input(bump2_smooth):
    ctx = BogovskiiContext(bump2_smooth, outer_points=8, inner_points=8)
    z = poly_bump_form(2, 0, [0, 0], 0.4, {})
    v = poly_bump_form(2, 1, [0, 0], 0.4,
                       {(1,): RationalPoly.constant(2, 1)})
    lhs, rhs = adjoint_pairings(ctx, z, v)
    assert lhs == 0.0 and rhs == 0.0


def test_kernel_consistency(bump2_smooth, nprng):
    worst = 0.0
    used = 0
    while used < 25:
        x = nprng.uniform(-0.45, 0.45, 2)
        y = nprng.uniform(-2, 2, 2)
        if np.linalg.norm(x - y) < 1e-3:
            continue
        l = int(nprng.integers(1, 3))
        a = kernel_G(l, x, y, bump2_smooth)
        if a == 0.0:
            continue
        b = kernel_G_homogeneous(l, x, y, bump2_smooth)
        worst = max(worst, abs(a - b) / abs(a))
        used += 1
    assert worst < 1e-8


def test_kernel_empty_ray(bump2_smooth):
    # the ray from x away from y never meets supp theta
    assert kernel_G(1, np.array([3.0, 0.0]), np.array([2.0, 0.0]),
                    bump2_smooth) == 0.0


def test_kernel_singular_floor(bump2_smooth):
    x = np.array([0.1, 0.1])
    with pytest.raises(SingularEvaluationError):
        kernel_G(1, x, x + 1e-14, bump2_smooth)


def test_weak_singularity_bound(bump2_smooth):
    x0 = np.array([0.2, -0.1])
    dirs = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [-1.0, 0.7]])
    coarse = weak_singularity_scan(bump2_smooth, 2, x0, dirs,
                                   np.geomspace(1e-4, 0.5, 12))
    fine = weak_singularity_scan(bump2_smooth, 2, x0, dirs,
                                 np.geomspace(1e-4, 0.5, 24))
    assert fine["fitted_constant"] > 0
    drift = abs(fine["fitted_constant"] - coarse["fitted_constant"]) \
        / coarse["fitted_constant"]
    assert drift < 0.1


def test_fd_exterior_d_on_known_field():
    # d of the 1-form (x2, -x1) is -2 dx1^dx2
    def field(x):
        return np.array([x[1], -x[0]])

    out = fd_exterior_d(field, 2, 1, np.array([0.3, 0.4]), 1e-5)
    assert abs(out[0] + 2.0) < 1e-9

    out5 = fd_exterior_d(field, 2, 1, np.array([0.3, 0.4]), 1e-3, stencil=5)
    assert abs(out5[0] + 2.0) < 1e-9


def test_integrate_form(nprng):
    u = poly_bump_form(2, 0, [0.1, 0.2], 0.5, {(): RationalPoly.constant(2, 1)},
                       k=4)
    total = integrate_form(u, p=24, panels=2)[0]
    # mass of (1 - |x|^2/R^2)^k over the ball = pi R^2 / (k+1)
    want = np.pi * 0.25 / 5
    assert abs(total - want) < 1e-8
