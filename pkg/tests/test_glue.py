import numpy as np
import pytest

from derham.bogovskii import BogovskiiContext, bogovskii_T, poincare_R_numeric
from derham.glue import (Box, BoxUnionDomain, commutation_residual, composite_R,
                         composite_T, cut_form, homotopy_residual_composite,
                         l_domain_cover, locality_check_R, remainder_K,
                         remainder_L, single_box_cover, support_check_T,
                         u_domain_cover)
from derham.sampled import random_poly_bump_form


@pytest.fixture(scope="module")
def lcover():
    return l_domain_cover()


@pytest.fixture(scope="module")
def lpoints(lcover):
    rng = np.random.default_rng(7)
    return np.concatenate([
        lcover.sample_interior(4, rng),
        np.array([0.62, 0.62]) + rng.uniform(-0.2, 0.2, size=(4, 2)),
    ])


def fixture_form(l, seed=3):
    rng = np.random.default_rng(seed)
    return random_poly_bump_form(2, l, rng, center=[0.62, 0.62], radius=0.33,
                                 label=f"u{l}")


def test_box_union_geometry():
    dom = BoxUnionDomain([Box((0.0, 0.0), (2.0, 1.0)),
                          Box((0.0, 0.0), (1.0, 2.0))])
    pts = np.array([[0.5, 0.5], [1.5, 0.5], [0.5, 1.5], [1.5, 1.5],
                    [-0.1, 0.5]])
    assert list(dom.contains(pts)) == [True, True, True, False, False]
    d = dom.interior_distance(pts)
    assert d[0] > 0 and d[3] < 0
    assert abs(dom.diameter() - np.hypot(2, 2)) < 1e-12


def test_partition_exactness(lcover):
    rep = lcover.partition_report()
    assert rep["sum_defect"] <= 1e-12
    assert rep["subordinate"], rep["subordinate_violation"]
    assert rep["coverage"]
    assert all(rep["starlike"].values())


def test_u_domain_partition():
    ctx = u_domain_cover()
    rep = ctx.partition_report()
    assert rep["sum_defect"] <= 1e-12
    assert rep["subordinate"], rep["subordinate_violation"]
    assert rep["coverage"]
    assert all(rep["starlike"].values())
    assert len(ctx.pieces) == 5  # three boxes plus two corner pieces


def test_flat_partition_degeneration(nprng):
    single = single_box_cover(Box((0.0, 0.0), (1.0, 1.0)))
    c0 = single.contexts[0]
    plain = BogovskiiContext(single.pieces[0].theta,
                             outer_points=c0.outer_points,
                             outer_points_near=c0.outer_points_near,
                             inner_points=c0.inner_points,
                             inner_panels=c0.inner_panels)
    u = random_poly_bump_form(2, 1, nprng, center=[0.5, 0.5], radius=0.3)
    for _ in range(5):
        x = nprng.uniform(0.25, 0.75, 2)
        assert np.max(np.abs(composite_T(single, u, x)
                             - bogovskii_T(plain, u, x))) < 1e-10
        assert np.max(np.abs(composite_R(single, u, x)
                             - poincare_R_numeric(plain, u, x))) < 1e-10
        assert np.max(np.abs(remainder_K(single, u, x))) < 1e-12
        assert np.max(np.abs(remainder_L(single, u, x))) < 1e-12


@pytest.mark.parametrize("l", [0, 1, 2])
@pytest.mark.parametrize("side", ["R", "T"])
def test_homotopy_with_remainder(lcover, lpoints, l, side):
    u = fixture_form(l)
    out = homotopy_residual_composite(lcover, u, lpoints, side)
    assert out["max_residual"] <= 1e-4, (l, side, out["max_residual"])


@pytest.mark.parametrize("which", ["K", "L"])
def test_commutation(lcover, which):
    pts = np.array([[0.80, 0.73], [0.55, 0.35], [0.3, 0.5]])
    for l in (0, 1):
        u = fixture_form(l)
        out = commutation_residual(lcover, u, pts, which)
        assert out["max_residual"] <= 1e-3, (l, which, out["max_residual"])
    # top degree: both sides vanish identically
    u = fixture_form(2)
    out = commutation_residual(lcover, u, pts, which)
    assert out["max_residual"] == 0.0


def test_support_of_composite_T(lcover):
    u = fixture_form(1)
    outside = np.array([[1.5, 1.4], [2.4, 0.5], [-0.4, 1.0], [1.15, 1.15],
                        [0.5, 2.3], [1.02, 1.6]])
    out = support_check_T(lcover, u, outside)
    assert out["max_value"] <= 1e-9 * out["sup_norm"]


def test_locality_of_composite_R(lcover, lpoints):
    rng = np.random.default_rng(9)
    u_out = random_poly_bump_form(2, 1, rng, center=[1.6, 1.45], radius=0.4)
    out = locality_check_R(lcover, u_out, lpoints)
    assert out["max_value"] <= 1e-9 * out["sup_norm"]


def test_cut_form_derivative(lcover, nprng):
    u = fixture_form(1)
    cu = cut_form(u, lcover.chis[0])
    pts = nprng.uniform(0.4, 0.9, size=(5, 2))
    h = 1e-5
    from derham.sampled import wedge1_table, apply_wedge1
    # FD of the cut form against its attached exact derivative
    d_exact = cu.derivative.eval(pts)
    grad = np.zeros((5, 2, 2))
    for i in range(2):
        e = np.zeros(2)
        e[i] = h
        grad[:, i, :] = (cu.eval(pts + e) - cu.eval(pts - e)) / (2 * h)
    table = wedge1_table(2, 1)
    d_fd = np.zeros((5, 1))
    for out_idx, i, in_idx, sign in table:
        d_fd[:, out_idx] += sign * grad[:, i, in_idx]
    assert np.max(np.abs(d_exact - d_fd)) < 1e-6 * max(1.0, np.max(np.abs(d_exact)))
