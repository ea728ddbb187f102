"""Numeric Bogovskii-type operators T_l and their Poincare counterparts.

Both operators share one quadrature layout:

  * outer integral over supp(theta): corner-split Duffy nodes anchored at
    the evaluation point x, absorbing the weak |x-a|^{1-l} singularity;
  * inner ray integral: the ray a + t(x-a) is clipped exactly against the
    support ball of u, then integrated in the arclength variable
    rho = t |x-a|, which keeps the integrand polynomially tame for every
    separation |x-a| (equivalent to the 1/t substitution plus support
    truncation, but better conditioned).

Because the clipping is exact, T_l u evaluates to exactly zero at any x
outside the starlike hull of supp(u) with respect to B.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .bumps import ThetaBump
from .exterior import all_blades
from .quadrature import (QuadratureRule, QuadratureError, adaptive_gl,
                         clip_ray_ball, clip_ray_box, duffy_box_nodes,
                         gl_intervals, gl_interval, gl_rule, tensor_box_nodes)
from .sampled import (SampledForm, apply_contraction, apply_wedge1,
                      contraction_table, star_table, wedge1_table)


class SingularEvaluationError(ValueError):
    """Kernel evaluation requested below the separation floor."""


@dataclass
class BogovskiiContext:
    """Quadrature configuration around a fixed smoothing bump."""
    theta: ThetaBump
    outer_points: int = 12       # Duffy GL points per axis for the a-integral
    outer_points_near: int = 0   # boost when x sits near/inside supp(theta)
    inner_points: int = 16       # GL points per panel for the ray integral
    inner_panels: int = 1        # equal panels for the ray integral
    pair_points: int = 24        # GL points per axis for L2 pairings
    fd_step: float = 1e-4        # relative FD step for d(T u)
    fd_stencil: int = 3          # 3 or 5 point central stencils
    sing_floor: float = 1e-12
    kernel_rule: QuadratureRule = field(default_factory=lambda: QuadratureRule(points=20))

    @property
    def n(self) -> int:
        return self.theta.n

    def _outer_nodes(self, x: np.ndarray):
        lo, hi = self.theta.support_box()
        p = self.outer_points
        if self.outer_points_near:
            # near the singular point the Duffy integrand is rougher
            margin = 0.25 * float(np.min(hi - lo))
            if np.all(x > lo - margin) and np.all(x < hi + margin):
                p = max(p, self.outer_points_near)
        nodes, weights = duffy_box_nodes(lo, hi, x, p)
        tv = self.theta.eval(nodes)
        keep = tv != 0.0
        return nodes[keep], weights[keep] * tv[keep]


# -- inner ray integrals -----------------------------------------------------------

def _ray_inner(u: SampledForm, a_nodes: np.ndarray, x: np.ndarray, l: int,
               p: int, mode: str, panels: int = 1) -> np.ndarray:
    """int t^{l-1} u(a + t(x-a)) dt over the clipped parameter range.

    mode "poincare": t in [0, 1];  mode "bogovskii": t in [1, inf).
    Returns (m, nblades) values of the inner integral for each a-node.
    """
    m = a_nodes.shape[0]
    nb = len(u.blades)
    out = np.zeros((m, nb))
    if m == 0:
        return out
    v = x[None, :] - a_nodes
    vnorm = np.linalg.norm(v, axis=1)
    ok = vnorm > 1e-13
    t0, t1 = clip_ray_ball(a_nodes, v, u.support_center, u.support_radius)
    if mode == "poincare":
        t_lo = np.maximum(t0, 0.0)
        t_hi = np.minimum(t1, 1.0)
    elif mode == "bogovskii":
        t_lo = np.maximum(t0, 1.0)
        t_hi = t1
    else:
        raise ValueError(mode)
    ok &= np.isfinite(t_lo) & np.isfinite(t_hi) & (t_hi > t_lo)
    if not np.any(ok):
        return out
    idx = np.nonzero(ok)[0]
    vn = vnorm[idx]
    rho_lo = t_lo[idx] * vn
    rho_hi = t_hi[idx] * vn
    rho, w_rho = gl_intervals(rho_lo, rho_hi, p, panels)  # (mk, p*panels)
    vhat = v[idx] / vn[:, None]
    pts = a_nodes[idx][:, None, :] + rho[:, :, None] * vhat[:, None, :]
    vals = u.eval(pts.reshape(-1, u.n)).reshape(len(idx), rho.shape[1], nb)
    integrand = vals * (rho ** (l - 1) * w_rho)[:, :, None]
    out[idx] = integrand.sum(axis=1) / (vn ** l)[:, None]
    return out


def bogovskii_T(ctx: BogovskiiContext, u: SampledForm, x: np.ndarray) -> np.ndarray:
    """T_l u(x) = -int theta(a) (x-a) ⌟ int_1^inf t^{l-1} u(a+t(x-a)) dt da.

    Returns the (l-1)-form coefficients at x in canonical blade order.
    """
    l = u.degree
    if not 1 <= l <= u.n:
        raise ValueError(f"degree {l} outside 1..n")
    x = np.asarray(x, dtype=float)
    a_nodes, w = ctx._outer_nodes(x)
    inner = _ray_inner(u, a_nodes, x, l, ctx.inner_points, "bogovskii",
                       ctx.inner_panels)
    table = contraction_table(u.n, l)
    nb_out = len(all_blades(u.n, l - 1))
    v = x[None, :] - a_nodes
    contracted = apply_contraction(table, v, inner, nb_out)
    return -(w[:, None] * contracted).sum(axis=0)


def poincare_R_numeric(ctx: BogovskiiContext, u: SampledForm, x: np.ndarray) -> np.ndarray:
    """R_l u(x) by quadrature on sampled data (same layout, t in [0,1])."""
    l = u.degree
    if not 1 <= l <= u.n:
        raise ValueError(f"degree {l} outside 1..n")
    x = np.asarray(x, dtype=float)
    a_nodes, w = ctx._outer_nodes(x)
    inner = _ray_inner(u, a_nodes, x, l, ctx.inner_points, "poincare",
                       ctx.inner_panels)
    table = contraction_table(u.n, l)
    nb_out = len(all_blades(u.n, l - 1))
    v = x[None, :] - a_nodes
    contracted = apply_contraction(table, v, inner, nb_out)
    return (w[:, None] * contracted).sum(axis=0)


def eval_batch(op, ctx, u, points: np.ndarray) -> np.ndarray:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    return np.stack([op(ctx, u, xi) for xi in points])


# -- finite-difference exterior derivative -----------------------------------------

def fd_exterior_d(value_fn, n: int, l: int, x: np.ndarray, h: float,
                  stencil: int = 3) -> np.ndarray:
    """d of an l-form-valued function of x, by central differences.

    ``value_fn`` maps a point to (nblades_l,) coefficients.
    """
    table = wedge1_table(n, l)
    nb_out = len(all_blades(n, l + 1))
    grad = np.zeros((n, len(all_blades(n, l))))
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        if stencil == 3:
            grad[i] = (value_fn(x + e) - value_fn(x - e)) / (2 * h)
        elif stencil == 5:
            grad[i] = (-value_fn(x + 2 * e) + 8 * value_fn(x + e)
                       - 8 * value_fn(x - e) + value_fn(x - 2 * e)) / (12 * h)
        else:
            raise ValueError("stencil must be 3 or 5")
    out = np.zeros(nb_out)
    for out_idx, i, in_idx, sign in table:
        out[out_idx] += sign * grad[i, in_idx]
    return out


# -- integrals over supports ---------------------------------------------------------

def integrate_form(u: SampledForm, p: int = 24, panels: int = 2) -> np.ndarray:
    """Componentwise integral of u over its support box."""
    lo = u.support_center - u.support_radius
    hi = u.support_center + u.support_radius
    nodes, w = tensor_box_nodes(lo, hi, p, panels=panels)
    vals = u.eval(nodes)
    return (w[:, None] * vals).sum(axis=0)


def pair_theta_scalar(theta: ThetaBump, u: SampledForm, p: int = 24,
                      panels: int = 1) -> float:
    """(theta, u) = int theta(a) u(a) da for a scalar sampled form."""
    if u.degree != 0:
        raise ValueError("scalar pairing needs a 0-form")
    lo, hi = theta.support_box()
    nodes, w = tensor_box_nodes(lo, hi, p, panels=panels)
    vals = u.eval(nodes)[:, 0]
    return float(np.sum(w * theta.eval(nodes) * vals))


def l2_pairing(f_vals_fn, g_vals_fn, lo, hi, p: int = 24, panels: int = 2) -> float:
    """int <f(x), g(x)> dx over a box, both given as (m,)->(m, nb) evaluators."""
    nodes, w = tensor_box_nodes(np.asarray(lo, float), np.asarray(hi, float),
                                p, panels=panels)
    fv = f_vals_fn(nodes)
    gv = g_vals_fn(nodes)
    return float(np.sum(w * np.sum(fv * gv, axis=1)))


# -- homotopy verification ------------------------------------------------------------

def homotopy_residual_T(ctx: BogovskiiContext, u: SampledForm,
                        points: np.ndarray) -> dict:
    """Pointwise residual of d T_l u + T_{l+1} du = u (endpoint cases included).

    Returns a report with the max absolute residual over the sample points.
    ``u.derivative`` must be present for l < n.
    """
    n, l = u.n, u.degree
    points = np.atleast_2d(np.asarray(points, dtype=float))
    scale = 2.0 * u.support_radius
    h = ctx.fd_step * scale
    residuals = []
    if l == n:
        total = integrate_form(u, p=ctx.pair_points)[0]
    for x in points:
        if l == 0:
            rhs = bogovskii_T(ctx, u.derivative, x)
            res = rhs - u.eval(x)
        elif l < n:
            dT = fd_exterior_d(lambda z: bogovskii_T(ctx, u, z), n, l - 1, x,
                               h, ctx.fd_stencil)
            res = dT + bogovskii_T(ctx, u.derivative, x) - u.eval(x)
        else:
            dT = fd_exterior_d(lambda z: bogovskii_T(ctx, u, z), n, l - 1, x,
                               h, ctx.fd_stencil)
            res = dT - u.eval(x) + total * ctx.theta.eval(x)
        residuals.append(np.max(np.abs(res)) if np.size(res) else 0.0)
    residuals = np.asarray(residuals)
    return {
        "l": l,
        "n": n,
        "points": points.shape[0],
        "max_residual": float(residuals.max()),
        "mean_residual": float(residuals.mean()),
        "fd_step": h,
        "residuals": residuals,
    }


# -- duality ---------------------------------------------------------------------------

def apply_Q(ctx: BogovskiiContext, u: SampledForm, x: np.ndarray) -> np.ndarray:
    """Q_l u(x) through star duality: star Q_l u = (-1)^{l-1} R_{n-l}(star u)."""
    n, l = u.n, u.degree
    if not 0 <= l <= n - 1:
        raise ValueError("Q_l is defined for 0 <= l <= n-1")
    su = u.star()
    r_val = poincare_R_numeric(ctx, su, x)        # degree n-l-1 coefficients
    m = n - l - 1
    sign = (-1) ** ((l - 1) % 2) * (-1) ** ((m * (n - m)) % 2)
    table = star_table(n, m)
    nb_out = len(all_blades(n, n - m))
    out = np.zeros(nb_out)
    for out_idx, in_idx, s in table:
        out[out_idx] = s * r_val[in_idx]
    return sign * out


def adjoint_pairings(ctx: BogovskiiContext, u: SampledForm, v: SampledForm,
                     p: Optional[int] = None) -> Tuple[float, float]:
    """Both sides of (v, Q_l u) = (T_{l+1} v, u), by tensor quadrature.

    u has degree l, v degree l+1; both compactly supported.
    """
    if v.degree != u.degree + 1:
        raise ValueError("need deg v = deg u + 1")
    p = p or ctx.pair_points
    lo_v = v.support_center - v.support_radius
    hi_v = v.support_center + v.support_radius

    def q_vals(nodes):
        return np.stack([apply_Q(ctx, u, x) for x in nodes])

    lhs = l2_pairing(v.eval, q_vals, lo_v, hi_v, p)
    lo_u = u.support_center - u.support_radius
    hi_u = u.support_center + u.support_radius

    def t_vals(nodes):
        return np.stack([bogovskii_T(ctx, v, x) for x in nodes])

    rhs = l2_pairing(t_vals, u.eval, lo_u, hi_u, p)
    return lhs, rhs


# -- the kernel G_l ----------------------------------------------------------------------

def kernel_G(l: int, x: np.ndarray, y: np.ndarray, theta: ThetaBump,
             rule: Optional[QuadratureRule] = None,
             sing_floor: float = 1e-12) -> float:
    """G_l(x,y) = int_1^inf (t-1)^{n-l} t^{l-1} theta(y + t(x-y)) dt.

    The ray is clipped exactly against the support box of theta, after
    which the integrand is a polynomial and plain GL is exact.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = theta.n
    sep = np.linalg.norm(x - y)
    if sep < sing_floor:
        raise SingularEvaluationError(
            f"|x-y| = {sep:.3e} below the floor {sing_floor:g}")
    rule = rule or QuadratureRule(points=24)
    lo, hi = theta.support_box()
    d = (x - y)[None, :]
    t0, t1 = clip_ray_box(y[None, :], d, lo, hi)
    t_lo = max(float(t0[0]), 1.0)
    t_hi = float(t1[0])
    if not np.isfinite(t_hi) or t_hi <= t_lo:
        return 0.0
    nodes, w = gl_interval(t_lo, t_hi, rule.points)
    pts = y[None, :] + nodes[:, None] * d
    vals = (nodes - 1.0) ** (n - l) * nodes ** (l - 1) * theta.eval(pts)
    return float(np.sum(w * vals))


def kernel_G_homogeneous(l: int, x: np.ndarray, y: np.ndarray, theta: ThetaBump,
                         rule: Optional[QuadratureRule] = None,
                         sing_floor: float = 1e-12) -> float:
    """The same kernel as a finite sum of homogeneous ray integrals:

    G_l(x,y) = sum_k C(l-1,k) |x-y|^{k-n} int_0^inf r^{n-k-1} theta(x + r w) dr
    with w = (x-y)/|x-y|.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = theta.n
    sep = np.linalg.norm(x - y)
    if sep < sing_floor:
        raise SingularEvaluationError(
            f"|x-y| = {sep:.3e} below the floor {sing_floor:g}")
    rule = rule or QuadratureRule(points=24)
    omega = (x - y) / sep
    lo, hi = theta.support_box()
    r0, r1 = clip_ray_box(x[None, :], omega[None, :], lo, hi)
    r_lo = max(float(r0[0]), 0.0)
    r_hi = float(r1[0])
    if not np.isfinite(r_hi) or r_hi <= r_lo:
        return 0.0
    nodes, w = gl_interval(r_lo, r_hi, rule.points)
    pts = x[None, :] + nodes[:, None] * omega[None, :]
    tv = theta.eval(pts)
    total = 0.0
    for k in range(l):
        ray = float(np.sum(w * nodes ** (n - k - 1) * tv))
        total += math.comb(l - 1, k) * sep ** (k - n) * ray
    return total


def weak_singularity_scan(theta: ThetaBump, l: int, x: np.ndarray,
                          directions: np.ndarray, distances: np.ndarray,
                          rule: Optional[QuadratureRule] = None) -> dict:
    """Exhibit |G_l(x,y)(x-y)| <= C(x) |x-y|^{-n+1} on shrinking separations.

    Returns per-sample |G| |x-y|^n (which the bound says stays bounded) and
    the fitted constant C(x) = max over the scan.
    """
    x = np.asarray(x, dtype=float)
    rows = []
    for w in directions:
        w = np.asarray(w, dtype=float)
        w = w / np.linalg.norm(w)
        for r in distances:
            y = x - r * w
            g = kernel_G(l, x, y, theta, rule)
            rows.append({"distance": float(r), "direction": w.tolist(),
                         "scaled": abs(g) * r ** theta.n})
    fitted = max(row["scaled"] for row in rows)
    return {"l": l, "x": x.tolist(), "fitted_constant": fitted, "rows": rows}
