"""Sampled differential forms: the numeric carrier for the integral operators.

A ``SampledForm`` packages a vectorized coefficient evaluator (points of
shape (m, n) -> blade coefficients of shape (m, nblades), blades in the
canonical increasing order), a support ball outside of which the evaluator
is exactly zero, and optionally the exact exterior derivative as another
evaluator.  Fixtures are polynomial-times-bump so that derivative
evaluators exist in closed form.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .exterior import all_blades, merge_sign
from .polynomials import RationalPoly


# -- blade index tables ----------------------------------------------------------

def blade_index(n: int, l: int) -> Dict[tuple, int]:
    return {b: i for i, b in enumerate(all_blades(n, l))}


def contraction_table(n: int, l: int) -> List[tuple]:
    """Entries (out_idx, axis_j, in_idx, sign) expanding v ⌟ (l-form)."""
    out_index = blade_index(n, l - 1)
    entries = []
    for in_idx, blade in enumerate(all_blades(n, l)):
        for k, j in enumerate(blade):
            sub = blade[:k] + blade[k + 1:]
            entries.append((out_index[sub], j - 1, in_idx, 1 if k % 2 == 0 else -1))
    return entries


def wedge1_table(n: int, l: int) -> List[tuple]:
    """Entries (out_idx, axis_i, in_idx, sign) expanding (1-form) ^ (l-form)."""
    out_index = blade_index(n, l + 1)
    entries = []
    for in_idx, blade in enumerate(all_blades(n, l)):
        for i in range(1, n + 1):
            sign, merged = merge_sign((i,), blade)
            if sign == 0:
                continue
            entries.append((out_index[merged], i - 1, in_idx, sign))
    return entries


def star_table(n: int, l: int) -> List[tuple]:
    """Entries (out_idx, in_idx, sign) for the Hodge star on coefficients."""
    from .exterior import complement_sign
    out_index = blade_index(n, n - l)
    entries = []
    for in_idx, blade in enumerate(all_blades(n, l)):
        sign, comp = complement_sign(blade, n)
        entries.append((out_index[comp], in_idx, sign))
    return entries


def apply_contraction(table, v: np.ndarray, coeffs: np.ndarray, nblades_out: int):
    """v: (m, n) vector field values; coeffs: (m, nblades_in)."""
    m = coeffs.shape[0]
    out = np.zeros((m, nblades_out))
    for out_idx, j, in_idx, sign in table:
        out[:, out_idx] += sign * v[:, j] * coeffs[:, in_idx]
    return out


def apply_wedge1(table, v: np.ndarray, coeffs: np.ndarray, nblades_out: int):
    m = coeffs.shape[0]
    out = np.zeros((m, nblades_out))
    for out_idx, i, in_idx, sign in table:
        out[:, out_idx] += sign * v[:, i] * coeffs[:, in_idx]
    return out


# -- sampled forms ------------------------------------------------------------------

class SampledForm:
    """An l-form known through a vectorized coefficient evaluator."""

    def __init__(self, n: int, degree: int,
                 evaluator: Callable[[np.ndarray], np.ndarray],
                 support_center: Sequence, support_radius: float,
                 smoothness: int = 4,
                 derivative: Optional["SampledForm"] = None,
                 check_derivative: bool = True,
                 label: str = ""):
        self.n = n
        self.degree = degree
        self.blades = all_blades(n, degree)
        self.evaluator = evaluator
        self.support_center = np.asarray(support_center, dtype=float)
        self.support_radius = float(support_radius)
        self.smoothness = smoothness
        self.derivative = derivative
        self.label = label
        self._sup_norm: Optional[float] = None
        if derivative is not None and check_derivative:
            self._spot_check_derivative()

    def eval(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        single = points.ndim == 1
        if single:
            points = points[None, :]
        vals = self.evaluator(points)
        vals = np.asarray(vals, dtype=float)
        if vals.shape != (points.shape[0], len(self.blades)):
            raise ValueError(
                f"evaluator returned shape {vals.shape}, expected "
                f"{(points.shape[0], len(self.blades))}")
        return vals[0] if single else vals

    def sup_norm(self, grid: int = 9) -> float:
        """Max |coefficient| over a grid covering the support box (cached)."""
        if self._sup_norm is None:
            axes = [np.linspace(c - self.support_radius, c + self.support_radius, grid)
                    for c in self.support_center]
            pts = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
            vals = self.eval(pts)
            self._sup_norm = float(np.max(np.abs(vals))) if vals.size else 0.0
        return self._sup_norm

    def _spot_check_derivative(self, h: float = 1e-5, tol: float = 1e-6):
        # FD spot check of the supplied derivative evaluator at a few
        # interior points (relative tolerance on the pair scale).
        rng = np.random.default_rng(1234)
        pts = (self.support_center[None, :]
               + 0.4 * self.support_radius * rng.uniform(-1, 1, size=(4, self.n)))
        d_exact = self.derivative.eval(pts)
        table = wedge1_table(self.n, self.degree)
        nb_out = len(all_blades(self.n, self.degree + 1))
        if nb_out == 0:
            return
        m = pts.shape[0]
        grad = np.zeros((m, self.n, len(self.blades)))
        for i in range(self.n):
            e = np.zeros(self.n)
            e[i] = h
            grad[:, i, :] = (self.eval(pts + e) - self.eval(pts - e)) / (2 * h)
        d_fd = np.zeros((m, nb_out))
        for out_idx, i, in_idx, sign in table:
            d_fd[:, out_idx] += sign * grad[:, i, in_idx]
        scale = max(np.max(np.abs(d_exact)), np.max(np.abs(d_fd)), 1e-30)
        rel = np.max(np.abs(d_exact - d_fd)) / scale
        if rel > max(tol, 50 * h * h):
            raise ValueError(
                f"derivative evaluator disagrees with finite differences "
                f"(relative deviation {rel:.2e})")

    def star(self) -> "SampledForm":
        """Pointwise Hodge star (algebraic on coefficient columns)."""
        table = star_table(self.n, self.degree)
        nb_out = len(all_blades(self.n, self.n - self.degree))

        def ev(points, _table=table, _nb=nb_out, _base=self.evaluator):
            vals = np.asarray(_base(points), dtype=float)
            out = np.zeros((vals.shape[0], _nb))
            for out_idx, in_idx, sign in _table:
                out[:, out_idx] = sign * vals[:, in_idx]
            return out

        return SampledForm(self.n, self.n - self.degree, ev,
                           self.support_center, self.support_radius,
                           smoothness=self.smoothness,
                           label=f"star({self.label})")

    def __repr__(self):
        return (f"SampledForm(n={self.n}, l={self.degree}, "
                f"support=B({self.support_center.tolist()}, {self.support_radius:g}), "
                f"label={self.label!r})")


def scale_and_add(forms_and_weights, label="") -> SampledForm:
    """Float-linear combination of sampled forms of equal (n, degree)."""
    forms = [f for f, _ in forms_and_weights]
    weights = [float(w) for _, w in forms_and_weights]
    f0 = forms[0]
    if any(f.n != f0.n or f.degree != f0.degree for f in forms):
        raise ValueError("mismatched forms in combination")
    centers = np.stack([f.support_center for f in forms])
    # smallest simple enclosing ball: center of mass, radius by max reach
    center = centers.mean(axis=0)
    radius = max(np.linalg.norm(f.support_center - center) + f.support_radius
                 for f in forms)

    def ev(points, _forms=forms, _w=weights):
        return sum(w * f.eval(points) for f, w in zip(_forms, _w))

    deriv = None
    if all(f.derivative is not None for f in forms):
        deriv = scale_and_add(
            [(f.derivative, w) for f, w in zip(forms, weights)],
            label=f"d({label})")
    return SampledForm(f0.n, f0.degree, ev, center, radius,
                       smoothness=min(f.smoothness for f in forms),
                       derivative=deriv, check_derivative=False, label=label)


# -- fixtures: polynomial times radial bump -----------------------------------------

def _radial_profile(points, center, radius, k):
    """(1 - q)^k with q = |x-c|^2/R^2, and its radial factor for the gradient."""
    d = points - center[None, :]
    q = np.sum(d * d, axis=1) / radius ** 2
    inside = q < 1.0
    base = np.where(inside, 1.0 - q, 0.0)
    val = base ** k
    # d/dx_i profile = -(2k/R^2) (x_i - c_i) (1-q)^{k-1}
    dcoef = np.where(inside, -(2.0 * k / radius ** 2) * base ** (k - 1), 0.0)
    return val, dcoef, d


def poly_bump_form(n: int, degree: int, center: Sequence, radius: float,
                   components: Dict[tuple, RationalPoly], k: int = 4,
                   label: str = "") -> SampledForm:
    """u = sum_I p_I(x) B(x) dx_I with B the radial bump (1-|x-c|^2/R^2)_+^k.

    The exterior derivative is attached in closed form.
    """
    center = np.asarray([float(c) for c in center])
    radius = float(radius)
    blades = all_blades(n, degree)
    bindex = {b: i for i, b in enumerate(blades)}
    comp: Dict[int, RationalPoly] = {}
    for b, p in components.items():
        b = tuple(b)
        if b not in bindex:
            raise ValueError(f"blade {b} invalid for degree {degree}")
        comp[bindex[b]] = p

    polys = comp  # index -> RationalPoly
    dpolys = {i: [p.diff(ax) for ax in range(n)] for i, p in polys.items()}

    def ev(points):
        m = points.shape[0]
        val, _, _ = _radial_profile(points, center, radius, k)
        out = np.zeros((m, len(blades)))
        for i, p in polys.items():
            out[:, i] = p.eval_array(points) * val
        return out

    deriv = None
    if degree < n:
        table = wedge1_table(n, degree)
        nb_out = len(all_blades(n, degree + 1))

        def dev(points):
            m = points.shape[0]
            val, dcoef, d = _radial_profile(points, center, radius, k)
            grad = np.zeros((m, n, len(blades)))
            for i, p in polys.items():
                pv = p.eval_array(points)
                for ax in range(n):
                    grad[:, ax, i] = (dpolys[i][ax].eval_array(points) * val
                                      + pv * dcoef * d[:, ax])
            out = np.zeros((m, nb_out))
            for out_idx, ax, in_idx, sign in table:
                out[:, out_idx] += sign * grad[:, ax, in_idx]
            return out

        deriv = SampledForm(n, degree + 1, dev, center, radius,
                            smoothness=k - 1, check_derivative=False,
                            label=f"d({label})")
    return SampledForm(n, degree, ev, center, radius, smoothness=k,
                       derivative=deriv, label=label)


def random_poly_bump_form(n: int, degree: int, rng, center=None, radius=0.8,
                          k: int = 4, poly_degree: int = 2,
                          label: str = "") -> SampledForm:
    """Random fixture with small integer polynomial parts."""
    if center is None:
        center = rng.uniform(-0.3, 0.3, size=n)
    components = {}
    for b in all_blades(n, degree):
        terms = {}
        for _ in range(3):
            alpha = tuple(int(rng.integers(0, poly_degree + 1)) for _ in range(n))
            if sum(alpha) > poly_degree:
                continue
            terms[alpha] = Fraction(int(rng.integers(-3, 4)))
        p = RationalPoly(n, terms)
        if not p:
            p = RationalPoly.constant(n, int(rng.integers(1, 3)))
        components[b] = p
    return poly_bump_form(n, degree, center, radius, components, k=k, label=label)


def smoothstep_coeffs(k: int):
    """Coefficients of S(t) = int_{-1}^{t} c_k (1-s^2)^k ds on [-1, 1].

    S is the C^{k-1} ramp with S(-1) = 0, S(1) = 1; returned as a float
    coefficient array for ascending powers of t.
    """
    from .bumps import bump_norm_1d
    ck = bump_norm_1d(k)
    # expand (1-s^2)^k and integrate monomially
    coeffs = [Fraction(0)] * (2 * k + 2)
    for j in range(k + 1):
        c = ck * (-1) ** j * math.comb(k, j)
        coeffs[2 * j + 1] = c / (2 * j + 1)
    const = -sum(c * (-1) ** i for i, c in enumerate(coeffs))
    coeffs[0] = const
    return np.array([float(c) for c in coeffs])


def smoothstep(k: int, t: np.ndarray):
    """Ramp value and derivative: 0 below -1, 1 above 1, polynomial between."""
    from .bumps import bump_norm_1d
    t = np.asarray(t, dtype=float)
    tc = np.clip(t, -1.0, 1.0)
    coeffs = smoothstep_coeffs(k)
    val = np.polynomial.polynomial.polyval(tc, coeffs)
    val = np.where(t <= -1.0, 0.0, np.where(t >= 1.0, 1.0, val))
    dval = np.where((t > -1.0) & (t < 1.0),
                    float(bump_norm_1d(k)) * (1.0 - tc * tc) ** k, 0.0)
    return val, dval


def poly_plateau_form(n: int, degree: int, center: Sequence, r_flat: float,
                      r_outer: float, components: Dict[tuple, RationalPoly],
                      k: int = 4, label: str = "") -> SampledForm:
    """u = sum_I p_I(x) P(x) dx_I with a plateau profile P.

    P = 1 on the ball |x-c| <= r_flat and 0 outside |x-c| >= r_outer, with a
    C^{k-1} ramp in |x-c|^2 between; on the plateau u equals the bare
    polynomial form, which makes exact operators usable as cross-oracles.
    """
    center = np.asarray([float(c) for c in center])
    q0, q1 = float(r_flat) ** 2, float(r_outer) ** 2
    blades = all_blades(n, degree)
    bindex = {b: i for i, b in enumerate(blades)}
    polys = {bindex[tuple(b)]: p for b, p in components.items()}
    dpolys = {i: [p.diff(ax) for ax in range(n)] for i, p in polys.items()}

    def profile(points):
        d = points - center[None, :]
        q = np.sum(d * d, axis=1)
        tau = (2.0 * q - q0 - q1) / (q1 - q0)
        s, ds = smoothstep(k, tau)
        val = 1.0 - s
        # dP/dx_i = -S'(tau) * (2/(q1-q0)) * 2 (x_i - c_i)
        dcoef = -ds * (4.0 / (q1 - q0))
        return val, dcoef, d

    def ev(points):
        m = points.shape[0]
        val, _, _ = profile(points)
        out = np.zeros((m, len(blades)))
        for i, p in polys.items():
            out[:, i] = p.eval_array(points) * val
        return out

    deriv = None
    if degree < n:
        table = wedge1_table(n, degree)
        nb_out = len(all_blades(n, degree + 1))

        def dev(points):
            m = points.shape[0]
            val, dcoef, d = profile(points)
            grad = np.zeros((m, n, len(blades)))
            for i, p in polys.items():
                pv = p.eval_array(points)
                for ax in range(n):
                    grad[:, ax, i] = (dpolys[i][ax].eval_array(points) * val
                                      + pv * dcoef * d[:, ax])
            out = np.zeros((m, nb_out))
            for out_idx, ax, in_idx, sign in table:
                out[:, out_idx] += sign * grad[:, ax, in_idx]
            return out

        deriv = SampledForm(n, degree + 1, dev, center, r_outer,
                            smoothness=k - 1, check_derivative=False,
                            label=f"d({label})")
    return SampledForm(n, degree, ev, center, r_outer, smoothness=k,
                       derivative=deriv, label=label)


def star_theta_form(theta) -> SampledForm:
    """The n-form (star theta)(x) = theta(x) dx_1^...^dx_n."""
    n = theta.n

    def ev(points, _theta=theta):
        return _theta.eval(points)[:, None]

    return SampledForm(n, n, ev, [float(c) for c in theta.center],
                       theta.support_radius, smoothness=theta.k,
                       label="star_theta")


def zero_mean_volume_form(n: int, c1, c2, radius: float, k: int = 4) -> SampledForm:
    """phi dx_1^...^dx_n with phi = bump(c1) - bump(c2), so int phi = 0."""
    b1 = poly_bump_form(n, n, c1, radius,
                        {tuple(range(1, n + 1)): RationalPoly.constant(n, 1)}, k=k)
    b2 = poly_bump_form(n, n, c2, radius,
                        {tuple(range(1, n + 1)): RationalPoly.constant(n, 1)}, k=k)
    return scale_and_add([(b1, 1.0), (b2, -1.0)], label="zero_mean_volume")
