import numpy as np
import pytest
import scipy.integrate as si

from derham.symbol import (SymbolProbe, apply_K_direct, apply_K_split,
                           decay_scan, k1hat, k1hat_at_zero, k1hat_xigrid,
                           kernel_k_batch, smooth_part_k0)
from derham.bumps import make_tensor_bump
from fractions import Fraction as F


def test_spot_value_at_zero_frequency(bump2_smooth, nprng):
    for _ in range(5):
        x = nprng.uniform(-2, 2, 2)
        for l in (1, 2):
            for j in (1, 2):
                got = k1hat_at_zero(bump2_smooth, l, j, x)
                want = -x[j - 1] * (2 ** l - 1) / l
                assert abs(got - want) < 1e-10


def test_k1hat_against_quad_oracle(bump2_smooth):
    def oracle(x, xi, l, j):
        def part(t, which):
            txi = t * xi
            thh = bump2_smooth.fourier(txi[None, :])[0]
            dth = bump2_smooth.fourier_grad(txi[None, :])[0, j - 1]
            val = ((1 + t) ** (l - 1) * np.exp(1j * t * np.dot(xi, x))
                   * (1j * dth - x[j - 1] * thh))
            return val.real if which == 0 else val.imag
        re = si.quad(lambda t: part(t, 0), 0, 1, limit=600)[0]
        im = si.quad(lambda t: part(t, 1), 0, 1, limit=600)[0]
        return re + 1j * im

    x = np.array([1.1, -0.7])
    for xi in (np.array([3.0, -2.0]), np.array([40.0, 13.0]),
               np.array([0.01, 0.02]), np.array([300.0, 1.0])):
        got = k1hat(bump2_smooth, 2, 2, x, xi)
        assert abs(got - oracle(x, xi, 2, 2)) < 1e-9


def test_k1hat_xigrid_matches_pointwise(bump2_smooth, nprng):
    x = np.array([0.4, -0.2])
    Xi = nprng.uniform(-30, 30, size=(12, 2))
    batch = k1hat_xigrid(bump2_smooth, 1, 1, x, Xi)
    for i, xi in enumerate(Xi):
        single = k1hat(bump2_smooth, 1, 1, x, xi)
        assert abs(batch[i] - single) < 1e-10


def test_decay_scan_plateaus(bump2_smooth):
    probe = SymbolProbe(bump2_smooth, l=1, j=1, x_points=3, directions=4,
                        xi_points=20, xi_max=1e3)
    out = decay_scan(probe)
    assert out["all_plateau"], out["verdicts"]
    # E0 levels are positive and finite
    assert all(np.isfinite(r["E0"]) and r["E0"] > 0 for r in out["rows"])


def test_probe_validation(bump2_smooth):
    with pytest.raises(ValueError):
        SymbolProbe(bump2_smooth, l=5, j=1)
    with pytest.raises(ValueError):
        SymbolProbe(bump2_smooth, l=1, j=0)
    with pytest.raises(ValueError):
        SymbolProbe(bump2_smooth, l=1, j=1, xi_points=1)


def test_kernel_split(bump2_smooth, nprng):
    x = np.array([0.2, -0.1])
    Z = nprng.uniform(-1.5, 1.5, size=(25, 2))
    full = kernel_k_batch(bump2_smooth, 2, 1, x, Z, s_range="full")
    k0 = kernel_k_batch(bump2_smooth, 2, 1, x, Z, s_range="smooth")
    k1 = kernel_k_batch(bump2_smooth, 2, 1, x, Z, s_range="rough")
    scale = max(np.max(np.abs(full)), 1e-30)
    assert np.max(np.abs(full - k0 - k1)) / scale < 1e-12


def test_k0_vanishes_off_segment(bump2_smooth):
    # segment x .. x+z misses supp theta entirely
    x = np.array([2.0, 2.0])
    z = np.array([0.5, 0.0])
    assert smooth_part_k0(bump2_smooth, 1, 1, x, z) == 0.0


def test_k1_support_bound(bump2_smooth, nprng):
    # k1(x, z) = 0 for |z| >= |x| + radius of supp theta
    eps = bump2_smooth.support_radius
    for _ in range(20):
        x = nprng.uniform(-1, 1, 2)
        z = nprng.uniform(-1, 1, 2)
        z = z / np.linalg.norm(z) * (np.linalg.norm(x) + eps + 0.05)
        val = kernel_k_batch(bump2_smooth, 2, 1, x, z[None, :], s_range="rough")
        assert val[0] == 0.0


@pytest.mark.slow
def test_operator_vs_symbol_representation(bump2_smooth):
    u = make_tensor_bump(2, [F(1, 10), F(-1, 20)], F(7, 20), 4)
    for x in (np.array([0.15, 0.05]), np.array([-0.1, 0.12])):
        direct = apply_K_direct(bump2_smooth, 1, 1, u, x, p=16)
        split = apply_K_split(bump2_smooth, 1, 1, u, x, xi_radius=60.0)
        rel = abs(direct - split["total"]) / max(abs(direct), 1e-30)
        assert rel < 1e-3, (x, direct, split)
