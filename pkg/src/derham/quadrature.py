"""Gauss-Legendre quadrature building blocks for the integral operators.

Everything here is vectorized over batches of rays / boxes.  Two pieces do
the heavy lifting:

  * exact clipping of rays against boxes and balls, so compactly supported
    integrands are integrated only over the interval where they live;
  * a corner-split Duffy scheme for box integrals whose integrand has a
    weak (integrable) singularity at a prescribed point: the box is split
    at the point into orthants, each orthant into pyramids, and the Duffy
    map's Jacobian xi^{n-1} absorbs the singularity.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Callable, Tuple

import numpy as np


@dataclass(frozen=True)
class QuadratureRule:
    """Tensor Gauss-Legendre configuration with adaptive refinement limits."""
    points: int = 16
    max_depth: int = 8
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10


class QuadratureError(RuntimeError):
    """Adaptive refinement hit the depth cap; carries the last two estimates."""

    def __init__(self, message, last=None, previous=None):
        super().__init__(message)
        self.last = last
        self.previous = previous


@lru_cache(maxsize=None)
def gl_rule(p: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(p)
    return x, w


def gl_interval(a: float, b: float, p: int):
    x, w = gl_rule(p)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * x, half * w


@lru_cache(maxsize=None)
def _unit_panel_rule(p: int, panels: int):
    """Composite GL rule on [0, 1] with equal panels."""
    x, w = gl_rule(p)
    xs, ws = [], []
    for i in range(panels):
        a, b = i / panels, (i + 1) / panels
        xs.append(0.5 * (a + b) + 0.5 * (b - a) * x)
        ws.append(0.5 * (b - a) * w)
    return np.concatenate(xs), np.concatenate(ws)


def gl_intervals(a: np.ndarray, b: np.ndarray, p: int, panels: int = 1):
    """Composite GL nodes on a batch of intervals: (m,) -> (m, p*panels).

    Degenerate intervals (b <= a) get zero weights.  Multiple panels keep
    accuracy when the integrand has interior kinks of finite smoothness.
    """
    x01, w01 = _unit_panel_rule(p, panels)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    span = np.clip(b - a, 0.0, None)
    nodes = a[:, None] + span[:, None] * x01[None, :]
    weights = span[:, None] * w01[None, :]
    return nodes, weights


def gl_panels(a: float, b: float, panels: int, p: int):
    """Composite GL on [a, b] with equal panels; returns flat nodes/weights."""
    edges = np.linspace(a, b, panels + 1)
    ns, ws = [], []
    for i in range(panels):
        n_i, w_i = gl_interval(edges[i], edges[i + 1], p)
        ns.append(n_i)
        ws.append(w_i)
    return np.concatenate(ns), np.concatenate(ws)


def adaptive_gl(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                rule: QuadratureRule) -> float:
    """Adaptive 1D integration by interval bisection.

    ``f`` maps an array of nodes to an array of values.  The local error
    estimate compares one panel against its two halves.
    """
    p = rule.points

    def panel(lo, hi):
        x, w = gl_interval(lo, hi, p)
        return float(np.dot(w, f(x)))

    def recurse(lo, hi, whole, depth):
        mid = 0.5 * (lo + hi)
        left = panel(lo, mid)
        right = panel(mid, hi)
        refined = left + right
        err = abs(refined - whole)
        if err <= rule.abs_tol + rule.rel_tol * abs(refined):
            return refined
        if depth >= rule.max_depth:
            raise QuadratureError(
                f"adaptive quadrature failed to converge on [{lo}, {hi}]",
                last=refined, previous=whole)
        return (recurse(lo, mid, left, depth + 1)
                + recurse(mid, hi, right, depth + 1))

    if b <= a:
        return 0.0
    return recurse(a, b, panel(a, b), 0)


# -- tensor boxes --------------------------------------------------------------

def tensor_box_nodes(lo, hi, p: int, panels: int = 1):
    """Tensor-product GL nodes over an axis-aligned box: (m, n) and (m,)."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    n = lo.size
    axis_nodes, axis_weights = [], []
    for i in range(n):
        x, w = gl_panels(lo[i], hi[i], panels, p)
        axis_nodes.append(x)
        axis_weights.append(w)
    grids = np.meshgrid(*axis_nodes, indexing="ij")
    wgrids = np.meshgrid(*axis_weights, indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=1)
    weights = np.ones(nodes.shape[0])
    for wg in wgrids:
        weights = weights * wg.ravel()
    return nodes, weights


def duffy_box_nodes(lo, hi, x0, p: int):
    """Quadrature over a box for integrands weakly singular at ``x0``.

    The box is split at clip(x0, box) into up to 2^n orthants; each orthant
    is covered by n Duffy pyramids whose Jacobian xi^{n-1} regularizes
    singularities up to |a - x0|^{-(n-1)}.  Works for x0 inside or outside
    the box (outside, the split point sits on the boundary and the scheme
    degenerates gracefully to plain mapped GL).
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    n = lo.size
    s = np.clip(x0, lo, hi)
    x, w = gl_rule(p)
    xi = 0.5 * (x + 1.0)      # GL on [0,1]
    wi = 0.5 * w
    all_nodes, all_weights = [], []
    for signs in product((-1, 1), repeat=n):
        ends = np.where(np.array(signs) > 0, hi, lo)
        L = ends - s                      # signed extents
        if np.any(np.abs(L) < 1e-300):
            continue
        vol = np.prod(np.abs(L))
        for lead in range(n):
            # u_lead = xi, u_j = xi * eta_j; Jacobian xi^{n-1}
            shape = [p] * n
            grids = np.meshgrid(*([xi] * n), indexing="ij")
            wgrids = np.meshgrid(*([wi] * n), indexing="ij")
            xg = grids[lead]
            coords = []
            for j in range(n):
                if j == lead:
                    coords.append(s[j] + L[j] * xg)
                else:
                    coords.append(s[j] + L[j] * xg * grids[j])
            nodes = np.stack([c.ravel() for c in coords], axis=1)
            weight = np.ones(shape)
            for wg in wgrids:
                weight = weight * wg
            weight = weight * xg ** (n - 1) * vol
            all_nodes.append(nodes)
            all_weights.append(weight.ravel())
    if not all_nodes:
        return np.zeros((0, n)), np.zeros(0)
    return np.concatenate(all_nodes), np.concatenate(all_weights)


# -- ray clipping ---------------------------------------------------------------

def clip_ray_box(origin: np.ndarray, direction: np.ndarray, lo, hi):
    """Parameter interval where origin + t*direction lies in the box.

    origin, direction: (m, n).  Returns (t0, t1) with t0 > t1 marking empty
    intersections.  The ray is treated as the full line; callers intersect
    with their own parameter range.
    """
    origin = np.atleast_2d(np.asarray(origin, dtype=float))
    direction = np.atleast_2d(np.asarray(direction, dtype=float))
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    m, n = origin.shape
    t0 = np.full(m, -np.inf)
    t1 = np.full(m, np.inf)
    for i in range(n):
        d = direction[:, i]
        o = origin[:, i]
        nonzero = np.abs(d) > 1e-300
        with np.errstate(divide="ignore", invalid="ignore"):
            ta = (lo[i] - o) / d
            tb = (hi[i] - o) / d
        tlo = np.minimum(ta, tb)
        thi = np.maximum(ta, tb)
        t0 = np.where(nonzero, np.maximum(t0, tlo), t0)
        t1 = np.where(nonzero, np.minimum(t1, thi), t1)
        # parallel ray outside the slab: empty
        outside = (~nonzero) & ((o < lo[i]) | (o > hi[i]))
        t0 = np.where(outside, np.inf, t0)
        t1 = np.where(outside, -np.inf, t1)
    return t0, t1


def clip_ray_ball(origin: np.ndarray, direction: np.ndarray, center, radius: float):
    """Parameter interval where origin + t*direction lies in the ball.

    Returns (t0, t1); empty intersections are marked by t0 > t1.
    Directions of near-zero norm yield the full line if the origin is
    inside, else empty (callers must handle the degenerate ray).
    """
    origin = np.atleast_2d(np.asarray(origin, dtype=float))
    direction = np.atleast_2d(np.asarray(direction, dtype=float))
    center = np.asarray(center, dtype=float)
    oc = origin - center
    a = np.sum(direction * direction, axis=1)
    b = 2.0 * np.sum(oc * direction, axis=1)
    c = np.sum(oc * oc, axis=1) - radius * radius
    m = origin.shape[0]
    t0 = np.full(m, np.inf)
    t1 = np.full(m, -np.inf)
    tiny = a < 1e-300
    disc = b * b - 4.0 * a * c
    ok = (~tiny) & (disc > 0.0)
    sq = np.sqrt(np.where(ok, disc, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        r0 = (-b - sq) / (2.0 * a)
        r1 = (-b + sq) / (2.0 * a)
    t0 = np.where(ok, r0, t0)
    t1 = np.where(ok, r1, t1)
    inside = tiny & (c < 0.0)
    t0 = np.where(inside, -np.inf, t0)
    t1 = np.where(inside, np.inf, t1)
    return t0, t1
