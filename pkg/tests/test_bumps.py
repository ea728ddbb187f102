import math
from fractions import Fraction

import numpy as np
import pytest
import scipy.integrate as si

from derham.bumps import (bump_norm_1d, bump_weight_integral,
                          centered_unit_moment, cos_bump_transform,
                          cos_bump_transform_deriv, make_radial_bump,
                          make_tensor_bump)

F = Fraction


def bump1d(c, r, k):
    ck = float(bump_norm_1d(k)) / r
    return lambda s: ck * max(0.0, 1 - ((s - c) / r) ** 2) ** k


def test_normalization_constants():
    assert bump_norm_1d(1) == F(3, 4)
    assert bump_weight_integral(0, 1) == F(4, 3)
    assert bump_weight_integral(2, 1) == F(4, 15)
    for k in range(1, 7):
        assert centered_unit_moment(0, k) == 1
        assert centered_unit_moment(3, k) == 0


def test_invalid_parameters():
    with pytest.raises(ValueError):
        make_tensor_bump(2, [0, 0], 0, 1)
    with pytest.raises(ValueError):
        make_tensor_bump(2, [0, 0], -1, 2)
    with pytest.raises(ValueError):
        make_tensor_bump(2, [0, 0], 1, 0)
    with pytest.raises(ValueError):
        make_tensor_bump(2, [0], 1, 1)


def test_reference_moments(bump2):
    assert bump2.moment((0, 0)) == 1
    assert bump2.moment((2, 0)) == F(1, 5)
    assert bump2.moment((1, 0)) == 0
    assert bump2.moment((3, 4)) == 0  # odd component
    shifted = make_tensor_bump(2, [F(1, 3), F(-2, 7)], F(1, 2), 2)
    assert shifted.moment((1, 0)) == F(1, 3)
    assert shifted.moment((0, 1)) == F(-2, 7)


def test_moment_cap():
    th = make_tensor_bump(2, [0, 0], 1, 2, moment_cap=4)
    with pytest.raises(RuntimeError):
        th.moment((3, 2))


def test_moments_vs_quadrature():
    th = make_tensor_bump(2, [F(1, 5), F(-1, 7)], F(3, 4), 4)
    worst = 0.0
    for a1 in range(0, 7):
        for a2 in range(0, 7 - a1):
            exact = float(th.moment((a1, a2)))
            num = 1.0
            for i, m in enumerate((a1, a2)):
                c, r = float(th.center[i]), float(th.r)
                val, _ = si.quad(lambda s: s ** m * bump1d(c, r, th.k)(s),
                                 c - r, c + r, limit=200)
                num *= val
            worst = max(worst, abs(exact - num) / max(abs(exact), 1e-18))
    assert worst < 1e-10


def test_eval_support_and_mass(bump2_smooth, nprng):
    th = bump2_smooth
    pts = nprng.uniform(-2, 2, size=(500, 2))
    vals = th.eval(pts)
    d = np.linalg.norm(pts - th._center_f, axis=1)
    assert np.all(vals[d > th.support_radius] == 0.0)
    lo, hi = th.support_box()
    outside_box = pts[np.any((pts < lo) | (pts > hi), axis=1)]
    assert np.all(th.eval(outside_box) == 0.0)
    mass, _ = si.dblquad(lambda y, x: th.eval(np.array([x, y])),
                         lo[0], hi[0], lo[1], hi[1], epsabs=1e-12)
    assert abs(mass - 1.0) < 1e-10


def test_cos_transform_recursion_vs_quadrature():
    for k in (1, 2, 4, 6):
        for w in (0.0, 1e-4, 0.3, 0.5001, 2.0, 17.0, 123.0):
            want, _ = si.quad(lambda t: (1 - t * t) ** k, -1, 1,
                              weight="cos", wvar=w, limit=400)
            got = cos_bump_transform(k, w)
            assert abs(got - want) < 1e-12 * max(1, abs(want) * 1e2) + 1e-13
    # derivative identity
    for k in (1, 3):
        for w in (0.2, 1.5, 9.0):
            h = 1e-6
            fd = (cos_bump_transform(k, w + h) - cos_bump_transform(k, w - h)) / (2 * h)
            assert abs(cos_bump_transform_deriv(k, w) - fd) < 1e-8


def test_fourier_matches_quadrature(nprng):
    th = make_tensor_bump(2, [F(1, 5), F(-1, 7)], F(3, 4), 4)
    worst = 0.0
    for _ in range(20):
        xi = nprng.uniform(-50, 50, size=2)
        got = th.fourier(xi)
        want = 1.0 + 0.0j
        for i in range(2):
            c, r = float(th.center[i]), float(th.r)
            f = bump1d(c, r, th.k)
            re, _ = si.quad(f, c - r, c + r, weight="cos", wvar=float(xi[i]), limit=300)
            im, _ = si.quad(f, c - r, c + r, weight="sin", wvar=float(xi[i]), limit=300)
            want *= re - 1j * im
        worst = max(worst, abs(got - want))
    assert worst < 1e-9


def test_fourier_at_zero_and_gradient(bump2_smooth, nprng):
    th = bump2_smooth
    assert abs(th.fourier(np.zeros(2)) - 1.0) < 1e-15
    # gradient vs finite differences of the closed form
    for _ in range(10):
        xi = nprng.uniform(-20, 20, size=2)
        g = th.fourier_grad(xi)
        h = 1e-6
        for j in range(2):
            e = np.zeros(2)
            e[j] = h
            fd = (th.fourier(xi + e) - th.fourier(xi - e)) / (2 * h)
            assert abs(g[j] - fd) < 1e-7


def test_radial_bump():
    rad = make_radial_bump(2, [0, 0], F(4, 5), 3)
    C = rad.normalization()
    R = float(rad.r)
    mass, _ = si.quad(lambda rho: rho * C * (1 - (rho / R) ** 2) ** rad.k,
                      0, R, epsabs=1e-14)
    assert abs(2 * math.pi * mass - 1.0) < 1e-12
    # closed-form moments against polar quadrature
    for alpha in ((2, 0), (2, 2), (4, 0)):
        got = rad.moment(alpha)
        ang, _ = si.quad(lambda p: math.cos(p) ** alpha[0] * math.sin(p) ** alpha[1],
                         0, 2 * math.pi, epsabs=1e-14)
        radial, _ = si.quad(
            lambda rho: rho ** (sum(alpha) + 1) * C * (1 - (rho / R) ** 2) ** rad.k,
            0, R, epsabs=1e-15)
        assert abs(got - ang * radial) < 1e-9 * abs(ang * radial)
    assert rad.moment((1, 0)) == 0.0
    with pytest.raises(NotImplementedError):
        rad.fourier(np.zeros(2))
