from fractions import Fraction

import numpy as np
import pytest

from derham.exterior import all_blades
from derham.polynomials import RationalPoly
from derham.sampled import (SampledForm, contraction_table, poly_bump_form,
                            poly_plateau_form, random_poly_bump_form,
                            scale_and_add, smoothstep, star_theta_form,
                            wedge1_table, zero_mean_volume_form)

F = Fraction


def test_smoothstep_endpoints():
    v, d = smoothstep(4, np.array([-2.0, -1.0, 0.0, 1.0, 3.0]))
    assert np.allclose(v, [0, 0, 0.5, 1, 1])
    assert d[0] == 0 and d[-1] == 0 and d[2] > 0
    # C^{k-1} contact: derivative vanishes at the edges
    v_eps, d_eps = smoothstep(4, np.array([-1.0 + 1e-9, 1.0 - 1e-9]))
    assert np.all(np.abs(d_eps) < 1e-30)


def test_poly_bump_form_support_and_derivative(nprng):
    u = random_poly_bump_form(2, 1, nprng, center=[0.2, -0.1], radius=0.5)
    pts = nprng.uniform(-1, 1, size=(200, 2))
    vals = u.eval(pts)
    d = np.linalg.norm(pts - u.support_center, axis=1)
    assert np.all(vals[d > u.support_radius] == 0.0)
    assert u.derivative is not None  # construction FD spot check already ran


def test_derivative_spot_check_catches_mismatch(nprng):
    good = random_poly_bump_form(2, 0, nprng, center=[0, 0], radius=0.5)
    wrong = SampledForm(2, 1, lambda p: 3.14 * np.ones((p.shape[0], 2)),
                        [0, 0], 0.5, check_derivative=False)
    with pytest.raises(ValueError):
        SampledForm(2, 0, good.evaluator, [0, 0], 0.5, derivative=wrong)


def test_plateau_form_equals_polynomial_inside(nprng):
    p = RationalPoly(2, {(1, 0): F(2), (0, 1): F(-1)})
    u = poly_plateau_form(2, 0, [0, 0], 0.5, 0.9, {(): p})
    pts = nprng.uniform(-0.3, 0.3, size=(50, 2))
    assert np.allclose(u.eval(pts)[:, 0], p.eval_array(pts), atol=1e-14)
    far = np.array([[0.95, 0.0], [0.7, 0.7]])
    assert np.all(u.eval(far) == 0.0)


def test_star_of_sampled_form(nprng):
    u = random_poly_bump_form(2, 1, nprng, center=[0, 0], radius=0.6)
    su = u.star()
    pts = nprng.uniform(-0.5, 0.5, size=(20, 2))
    uv = u.eval(pts)
    sv = su.eval(pts)
    # star dx1 = dx2, star dx2 = -dx1
    assert np.allclose(sv[:, 1], uv[:, 0])
    assert np.allclose(sv[:, 0], -uv[:, 1])


def test_zero_mean_volume_form(nprng):
    u = zero_mean_volume_form(2, [0.3, 0.2], [-0.25, -0.15], 0.45)
    from derham.bogovskii import integrate_form
    total = integrate_form(u, p=20, panels=2)[0]
    assert abs(total) < 1e-12


def test_star_theta_form(bump2_smooth, nprng):
    st = star_theta_form(bump2_smooth)
    pts = nprng.uniform(-0.6, 0.6, size=(50, 2))
    assert np.allclose(st.eval(pts)[:, 0], bump2_smooth.eval(pts))


def test_tables_are_consistent():
    # contraction then wedge tables reproduce the exact algebra on floats
    from derham.exterior import ExtElement, contract, wedge
    n, l = 3, 2
    ct = contraction_table(n, l)
    wt = wedge1_table(n, l - 1)
    rng = np.random.default_rng(5)
    v = rng.normal(size=(4, n))
    coeffs = rng.normal(size=(4, len(all_blades(n, l))))
    from derham.sampled import apply_contraction, apply_wedge1
    out = apply_contraction(ct, v, coeffs, len(all_blades(n, l - 1)))
    for row in range(4):
        a = ExtElement.vector(n, [F(x).limit_denominator(10 ** 6) for x in v[row]])
        u = ExtElement(n, l, {b: F(c).limit_denominator(10 ** 6)
                              for b, c in zip(all_blades(n, l), coeffs[row])})
        want = contract(a, u)
        got = {b: out[row, i] for i, b in enumerate(all_blades(n, l - 1))}
        for b, val in got.items():
            assert abs(val - float(want.coeffs.get(b, F(0)))) < 1e-9
