import numpy as np
import pytest

from derham.quadrature import (QuadratureError, QuadratureRule, adaptive_gl,
                               clip_ray_ball, clip_ray_box, duffy_box_nodes,
                               gl_interval, gl_intervals, tensor_box_nodes)


def test_gl_exact_for_polynomials():
    for p in (2, 5, 9):
        nodes, w = gl_interval(-0.7, 1.3, p)
        m = 2 * p - 1
        got = np.sum(w * nodes ** m)
        want = (1.3 ** (m + 1) - (-0.7) ** (m + 1)) / (m + 1)
        assert abs(got - want) < 1e-13 * max(1, abs(want))


def test_gl_intervals_batch_and_panels():
    a = np.array([0.0, 1.0, 2.0])
    b = np.array([1.0, 1.0, 4.0])   # middle interval degenerate
    nodes, w = gl_intervals(a, b, 6, panels=3)
    vals = (w * nodes ** 2).sum(axis=1)
    assert abs(vals[0] - 1 / 3) < 1e-14
    assert vals[1] == 0.0
    assert abs(vals[2] - (64 - 8) / 3) < 1e-12


def test_tensor_box():
    nodes, w = tensor_box_nodes([-1, 0], [1, 2], 8, panels=2)
    got = np.sum(w * np.cos(nodes[:, 0]) * nodes[:, 1])
    want = 2 * np.sin(1) * 2.0
    assert abs(got - want) < 1e-12


def test_duffy_absorbs_weak_singularity():
    lo, hi = np.array([-1.0, -1.0]), np.array([1.0, 1.0])
    x0 = np.array([0.25, -0.4])
    nodes, w = duffy_box_nodes(lo, hi, x0, 16)
    r = np.linalg.norm(nodes - x0, axis=1)
    got = np.sum(w / r)
    # oracle: polar integration of 1/r = integral of rho_max(angle)
    import scipy.integrate as si

    def rho_max(phi):
        c, s = np.cos(phi), np.sin(phi)
        ts = []
        for d, o in ((c, x0[0]), (s, x0[1])):
            if abs(d) > 1e-14:
                ts.extend(t for t in ((-1 - o) / d, (1 - o) / d) if t > 0)
        return min(ts)

    want = si.quad(rho_max, 0, 2 * np.pi, limit=400)[0]
    assert abs(got - want) < 1e-8


def test_duffy_outside_anchor():
    lo, hi = np.array([0.0, 0.0]), np.array([1.0, 1.0])
    nodes, w = duffy_box_nodes(lo, hi, np.array([3.0, -2.0]), 10)
    assert abs(w.sum() - 1.0) < 1e-12
    got = np.sum(w * nodes[:, 0] * nodes[:, 1])
    assert abs(got - 0.25) < 1e-12


def test_duffy_3d():
    lo, hi = -np.ones(3), np.ones(3)
    x0 = np.array([0.2, 0.1, -0.3])
    n1, w1 = duffy_box_nodes(lo, hi, x0, 8)
    n2, w2 = duffy_box_nodes(lo, hi, x0, 14)
    v1 = np.sum(w1 / np.linalg.norm(n1 - x0, axis=1) ** 2)
    v2 = np.sum(w2 / np.linalg.norm(n2 - x0, axis=1) ** 2)
    assert abs(v1 - v2) / abs(v2) < 1e-7
    assert abs(w1.sum() - 8.0) < 1e-12


def test_clip_ray_box():
    t0, t1 = clip_ray_box(np.array([[0.0, 0.0]]), np.array([[1.0, 0.0]]),
                          [-1, -1], [1, 1])
    assert t0[0] == -1 and t1[0] == 1
    # parallel ray outside the slab is empty
    t0, t1 = clip_ray_box(np.array([[0.0, 5.0]]), np.array([[1.0, 0.0]]),
                          [-1, -1], [1, 1])
    assert t0[0] > t1[0]


def test_clip_ray_ball():
    t0, t1 = clip_ray_ball(np.array([[0.0, 0.0]]), np.array([[1.0, 0.0]]),
                           [3.0, 0.0], 1.0)
    assert np.allclose([t0[0], t1[0]], [2.0, 4.0])
    t0, t1 = clip_ray_ball(np.array([[0.0, 0.0]]), np.array([[0.0, 1.0]]),
                           [3.0, 0.0], 1.0)
    assert t0[0] > t1[0]
    # degenerate direction: inside -> full line, outside -> empty
    t0, t1 = clip_ray_ball(np.array([[3.0, 0.5]]), np.zeros((1, 2)),
                           [3.0, 0.0], 1.0)
    assert np.isinf(t0[0]) and t0[0] < 0 and np.isinf(t1[0]) and t1[0] > 0
    t0, t1 = clip_ray_ball(np.array([[9.0, 0.0]]), np.zeros((1, 2)),
                           [3.0, 0.0], 1.0)
    assert t0[0] > t1[0]


def test_adaptive_gl():
    rule = QuadratureRule(points=8, max_depth=40, abs_tol=1e-11, rel_tol=1e-11)
    got = adaptive_gl(lambda x: np.abs(x) ** 1.5, -1.0, 2.0, rule)
    want = (1.0 + 2.0 ** 2.5) / 2.5
    assert abs(got - want) < 1e-9
    with pytest.raises(QuadratureError):
        adaptive_gl(lambda x: np.abs(x - 0.1) ** -0.9, 0.0, 1.0,
                    QuadratureRule(points=4, max_depth=3))
