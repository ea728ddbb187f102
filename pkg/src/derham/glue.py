"""Composite operators on box-union domains covered by starlike pieces.

A cover is a list of starlike pieces (axis-aligned boxes, plus one
ball-intersection piece per reentrant corner), each carrying a ball B_i, a
smoothing bump theta_i supported in B_i, and a partition function chi_i.
The partition functions are built from polynomial smoothsteps composed
with affine/diagonal/squared-distance coordinates, so they have exact
gradients and sum to the global cutoff exactly (to 1 in a neighborhood of
the closed domain).

The composite operators are

    R_l u = sum chi_i R_{l,i} u          T_l u = sum T_{l,i}(chi_i u)

with remainders

    K_l u = -sum (d chi_i) ^ R_{l,i} u   (K_0 u = sum (theta_i, u) chi_i)
    L_l u = sum T_{l+1,i}((d chi_i) ^ u) (L_n u = sum (int chi_i u) star theta_i)

satisfying d R_l u + R_{l+1} du = u - K_l u and d T_l u + T_{l+1} du =
u - L_l u wherever the partition sums to one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .bumps import ThetaBump, make_tensor_bump
from .bogovskii import (BogovskiiContext, bogovskii_T, fd_exterior_d,
                        integrate_form, pair_theta_scalar, poincare_R_numeric)
from .exterior import all_blades
from .sampled import (SampledForm, apply_wedge1, smoothstep, wedge1_table)


# -- geometry ---------------------------------------------------------------------

@dataclass(frozen=True)
class Box:
    lo: tuple
    hi: tuple

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise ValueError("box corner dimensions differ")
        if any(l >= h for l, h in zip(self.lo, self.hi)):
            raise ValueError("box has empty extent")

    @property
    def n(self):
        return len(self.lo)

    def arrays(self):
        return np.asarray(self.lo, float), np.asarray(self.hi, float)

    def contains(self, points: np.ndarray, margin: float = 0.0) -> np.ndarray:
        lo, hi = self.arrays()
        points = np.atleast_2d(points)
        return np.all((points >= lo - margin) & (points <= hi + margin), axis=1)

    def interior_distance(self, points: np.ndarray) -> np.ndarray:
        """Signed distance into the box: positive inside, negative outside."""
        lo, hi = self.arrays()
        points = np.atleast_2d(points)
        return np.min(np.minimum(points - lo, hi - points), axis=1)

    def center(self):
        lo, hi = self.arrays()
        return 0.5 * (lo + hi)


class BoxUnionDomain:
    """A bounded domain given as a union of axis-aligned boxes."""

    def __init__(self, boxes: Sequence[Box]):
        if not boxes:
            raise ValueError("need at least one box")
        self.boxes = list(boxes)
        self.n = boxes[0].n
        if any(b.n != self.n for b in boxes):
            raise ValueError("mixed dimensions")

    def bounding_box(self) -> Box:
        lo = np.min(np.stack([b.arrays()[0] for b in self.boxes]), axis=0)
        hi = np.max(np.stack([b.arrays()[1] for b in self.boxes]), axis=0)
        return Box(tuple(lo), tuple(hi))

    def diameter(self) -> float:
        lo, hi = self.bounding_box().arrays()
        return float(np.linalg.norm(hi - lo))

    def contains(self, points: np.ndarray, margin: float = 0.0) -> np.ndarray:
        points = np.atleast_2d(points)
        out = np.zeros(points.shape[0], dtype=bool)
        for b in self.boxes:
            out |= b.contains(points, margin)
        return out

    def interior_distance(self, points: np.ndarray) -> np.ndarray:
        """Lower bound for the distance to the boundary (exact for one box)."""
        points = np.atleast_2d(points)
        d = np.full(points.shape[0], -np.inf)
        for b in self.boxes:
            d = np.maximum(d, b.interior_distance(points))
        return d

    def interior_grid(self, margin: float, per_axis: int = 24) -> np.ndarray:
        lo, hi = self.bounding_box().arrays()
        axes = [np.linspace(lo[i], hi[i], per_axis) for i in range(self.n)]
        pts = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
        return pts[self.interior_distance(pts) >= margin]


# -- smooth partition functions ------------------------------------------------------

class SmoothFunc:
    """Scalar function with values and gradients on point batches."""

    def eval(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def grad(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class ConstFunc(SmoothFunc):
    def __init__(self, c: float, n: int):
        self.c = float(c)
        self.n = n

    def eval(self, points):
        return np.full(np.atleast_2d(points).shape[0], self.c)

    def grad(self, points):
        return np.zeros_like(np.atleast_2d(points))


class RampFunc(SmoothFunc):
    """smoothstep((2s - s0 - s1)/(s1 - s0)) of an inner coordinate s(x).

    The inner coordinate is given by a value/gradient callable pair.
    """

    def __init__(self, coord_val, coord_grad, s0: float, s1: float, k: int = 4):
        if not s1 > s0:
            raise ValueError("need s1 > s0")
        self.coord_val = coord_val
        self.coord_grad = coord_grad
        self.s0, self.s1, self.k = float(s0), float(s1), k

    def eval(self, points):
        s = self.coord_val(np.atleast_2d(points))
        tau = (2.0 * s - self.s0 - self.s1) / (self.s1 - self.s0)
        return smoothstep(self.k, tau)[0]

    def grad(self, points):
        points = np.atleast_2d(points)
        s = self.coord_val(points)
        tau = (2.0 * s - self.s0 - self.s1) / (self.s1 - self.s0)
        dval = smoothstep(self.k, tau)[1] * (2.0 / (self.s1 - self.s0))
        return dval[:, None] * self.coord_grad(points)


def affine_ramp(w: Sequence[float], b: float, s0: float, s1: float, k: int = 4):
    """Ramp of the affine coordinate <w, x> + b."""
    w = np.asarray(w, float)

    def val(points):
        return points @ w + b

    def grad(points):
        return np.broadcast_to(w, points.shape).copy()

    return RampFunc(val, grad, s0, s1, k)


def radial_plateau(center: Sequence[float], r_flat: float, r_outer: float, k: int = 4):
    """1 inside |x-c| <= r_flat, 0 outside r_outer; smooth in |x-c|^2."""
    center = np.asarray(center, float)

    def val(points):
        d = points - center
        return np.sum(d * d, axis=1)

    def grad(points):
        return 2.0 * (points - center)

    return ComplementFunc(RampFunc(val, grad, r_flat ** 2, r_outer ** 2, k))


class ComplementFunc(SmoothFunc):
    def __init__(self, f: SmoothFunc):
        self.f = f

    def eval(self, points):
        return 1.0 - self.f.eval(points)

    def grad(self, points):
        return -self.f.grad(points)


class ProductFunc(SmoothFunc):
    def __init__(self, *factors: SmoothFunc):
        self.factors = factors

    def eval(self, points):
        out = np.ones(np.atleast_2d(points).shape[0])
        for f in self.factors:
            out = out * f.eval(points)
        return out

    def grad(self, points):
        points = np.atleast_2d(points)
        vals = [f.eval(points) for f in self.factors]
        grads = [f.grad(points) for f in self.factors]
        out = np.zeros_like(points)
        for i in range(len(self.factors)):
            rest = np.ones(points.shape[0])
            for j, v in enumerate(vals):
                if j != i:
                    rest = rest * v
            out += rest[:, None] * grads[i]
        return out


def box_plateau(box: Box, inner: float, outer: float, k: int = 4) -> SmoothFunc:
    """1 on box dilated by ``inner``, 0 outside box dilated by ``outer``."""
    lo, hi = box.arrays()
    factors = []
    for i in range(box.n):
        e = np.zeros(box.n)
        e[i] = 1.0
        rise = affine_ramp(e, 0.0, lo[i] - outer, lo[i] - inner, k)
        fall = ComplementFunc(affine_ramp(e, 0.0, hi[i] + inner, hi[i] + outer, k))
        factors.extend([rise, fall])
    return ProductFunc(*factors)


# -- starlike pieces --------------------------------------------------------------------

class StarlikePiece:
    """A cover piece: a box, or a ball intersected with the domain.

    Carries the ball B (center, radius) with respect to which the piece is
    starlike and the smoothing bump theta supported inside B.
    """

    def __init__(self, geometry, ball_center: Sequence[float], ball_radius: float,
                 theta: ThetaBump, domain: Optional[BoxUnionDomain] = None,
                 name: str = ""):
        self.geometry = geometry          # Box | ("ball", center, radius)
        self.ball_center = np.asarray(ball_center, float)
        self.ball_radius = float(ball_radius)
        self.theta = theta
        self.domain = domain
        self.name = name
        if theta.support_radius > self.ball_radius + 1e-12:
            raise ValueError(
                f"piece {name!r}: supp(theta) ball radius {theta.support_radius:.4f} "
                f"exceeds B radius {ball_radius:.4f}")
        bc = np.asarray([float(c) for c in theta.center])
        if np.linalg.norm(bc - self.ball_center) + theta.support_radius \
                > self.ball_radius + 1e-12:
            raise ValueError(f"piece {name!r}: supp(theta) not inside B")

    def contains(self, points: np.ndarray, margin: float = 0.0) -> np.ndarray:
        points = np.atleast_2d(points)
        if isinstance(self.geometry, Box):
            return self.geometry.contains(points, margin)
        kind, center, radius = self.geometry
        inside_ball = np.linalg.norm(points - np.asarray(center, float),
                                     axis=1) <= radius + margin
        return inside_ball & self.domain.contains(points, margin)

    def sample_points(self, count: int, rng) -> np.ndarray:
        if isinstance(self.geometry, Box):
            lo, hi = self.geometry.arrays()
        else:
            _, center, radius = self.geometry
            center = np.asarray(center, float)
            lo, hi = center - radius, center + radius
        pts = []
        while len(pts) < count:
            cand = rng.uniform(lo, hi, size=(4 * count, len(lo)))
            keep = self.contains(cand)
            pts.extend(cand[keep][: count - len(pts)])
        return np.asarray(pts)

    def starlike_check(self, rng, piece_samples: int = 40, ball_samples: int = 8,
                       segment_samples: int = 16) -> bool:
        """Sampled check: segments from piece points to B stay in the piece."""
        xs = self.sample_points(piece_samples, rng)
        n = self.ball_center.size
        raw = rng.normal(size=(ball_samples, n))
        raw = raw / np.linalg.norm(raw, axis=1, keepdims=True)
        bs = self.ball_center + 0.9 * self.ball_radius * \
            raw * rng.uniform(0, 1, size=(ball_samples, 1)) ** (1.0 / n)
        ts = np.linspace(0.0, 1.0, segment_samples)
        for x in xs:
            for b in bs:
                seg = x[None, :] + ts[:, None] * (b - x)[None, :]
                if not np.all(self.contains(seg, margin=1e-9)):
                    return False
        return True


# -- the cover --------------------------------------------------------------------------

class CoverContext:
    """A domain, its starlike pieces, and the subordinate partition."""

    def __init__(self, domain: BoxUnionDomain, pieces: List[StarlikePiece],
                 chis: List[SmoothFunc], interior_margin_frac: float = 0.05,
                 outer_points: int = 12, outer_points_near: int = 28,
                 inner_points: int = 10, inner_panels: int = 6,
                 pair_points: int = 20, fd_step: float = 1e-4):
        if len(pieces) != len(chis):
            raise ValueError("one partition function per piece")
        self.domain = domain
        self.pieces = pieces
        self.chis = chis
        self.interior_margin_frac = interior_margin_frac
        self.contexts = [
            BogovskiiContext(p.theta, outer_points=outer_points,
                             outer_points_near=outer_points_near,
                             inner_points=inner_points, inner_panels=inner_panels,
                             pair_points=pair_points, fd_step=fd_step)
            for p in pieces
        ]
        self.fd_step = fd_step
        self._pair_cache: Dict[tuple, float] = {}

    @property
    def n(self):
        return self.domain.n

    def interior_margin(self) -> float:
        return self.interior_margin_frac * self.domain.diameter()

    def sample_interior(self, count: int, rng, margin: Optional[float] = None
                        ) -> np.ndarray:
        margin = self.interior_margin() if margin is None else margin
        grid = self.domain.interior_grid(margin, per_axis=32)
        if len(grid) == 0:
            raise ValueError("no interior points at this margin")
        idx = rng.choice(len(grid), size=min(count, len(grid)), replace=False)
        return grid[idx]

    # -- partition diagnostics ------------------------------------------------

    def partition_report(self, per_axis: int = 28, collar: float = 0.02) -> dict:
        """Sum-to-one over a neighborhood of the closed domain, subordination
        of each chi restricted to the domain, and piece starlikeness/coverage."""
        lo, hi = self.domain.bounding_box().arrays()
        pad = collar
        axes = [np.linspace(lo[i] - pad, hi[i] + pad, per_axis)
                for i in range(self.n)]
        pts = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
        near = self.domain.interior_distance(pts) >= -collar
        near_pts = pts[near]
        total = np.zeros(near_pts.shape[0])
        for chi in self.chis:
            total += chi.eval(near_pts)
        sum_defect = float(np.max(np.abs(total - 1.0))) if len(near_pts) else 0.0

        inside = self.domain.contains(pts) & (self.domain.interior_distance(pts) > 1e-9)
        in_pts = pts[inside]
        subordinate = True
        worst = None
        for piece, chi in zip(self.pieces, self.chis):
            vals = np.abs(chi.eval(in_pts))
            mask = vals > 1e-13
            if np.any(mask & ~piece.contains(in_pts, margin=1e-9)):
                subordinate = False
                bad = in_pts[mask & ~piece.contains(in_pts, margin=1e-9)][0]
                worst = {"piece": piece.name, "point": bad.tolist()}
        covered = np.zeros(in_pts.shape[0], dtype=bool)
        for piece in self.pieces:
            covered |= piece.contains(in_pts, margin=1e-9)
        rng = np.random.default_rng(7)
        starlike = {p.name: p.starlike_check(rng) for p in self.pieces}
        return {
            "sum_defect": sum_defect,
            "subordinate": subordinate,
            "subordinate_violation": worst,
            "coverage": bool(np.all(covered)),
            "starlike": starlike,
        }

    # -- cached pairings --------------------------------------------------------

    def _theta_pair(self, i: int, u: SampledForm) -> float:
        key = ("theta", i, id(u))
        if key not in self._pair_cache:
            self._pair_cache[key] = pair_theta_scalar(
                self.pieces[i].theta, u, p=self.contexts[i].pair_points,
                panels=4)
        return self._pair_cache[key]

    def _chi_integral(self, i: int, u: SampledForm) -> float:
        # cached one-time integrals; generous panel count because the
        # integrand carries the partition kinks and feeds L_n pointwise
        key = ("int", i, id(u))
        if key not in self._pair_cache:
            cut = cut_form(u, self.chis[i])
            self._pair_cache[key] = float(integrate_form(cut, p=12, panels=10)[0])
        return self._pair_cache[key]


def cut_form(u: SampledForm, chi: SmoothFunc) -> SampledForm:
    """chi * u with the exact derivative d(chi u) = dchi ^ u + chi du."""

    def ev(points, _u=u, _chi=chi):
        return _chi.eval(points)[:, None] * _u.eval(points)

    deriv = None
    if u.degree < u.n and u.derivative is not None:
        table = wedge1_table(u.n, u.degree)
        nb_out = len(all_blades(u.n, u.degree + 1))

        def dev(points, _u=u, _chi=chi, _table=table, _nb=nb_out):
            vals = _u.eval(points)
            out = apply_wedge1(_table, _chi.grad(points), vals, _nb)
            out += _chi.eval(points)[:, None] * _u.derivative.eval(points)
            return out

        deriv = SampledForm(u.n, u.degree + 1, dev, u.support_center,
                            u.support_radius, smoothness=min(u.smoothness, 3),
                            check_derivative=False, label=f"d(chi*{u.label})")
    return SampledForm(u.n, u.degree, ev, u.support_center, u.support_radius,
                       smoothness=min(u.smoothness, 3), derivative=deriv,
                       check_derivative=False, label=f"chi*{u.label}")


def wedge_dchi_form(u: SampledForm, chi: SmoothFunc) -> SampledForm:
    """(d chi) ^ u as a sampled (l+1)-form."""
    table = wedge1_table(u.n, u.degree)
    nb_out = len(all_blades(u.n, u.degree + 1))

    def ev(points, _u=u, _chi=chi, _table=table, _nb=nb_out):
        return apply_wedge1(_table, _chi.grad(points), _u.eval(points), _nb)

    return SampledForm(u.n, u.degree + 1, ev, u.support_center,
                       u.support_radius, smoothness=min(u.smoothness, 3),
                       check_derivative=False, label=f"dchi^{u.label}")


# -- composite operators -------------------------------------------------------------

def composite_R(ctx: CoverContext, u: SampledForm, x: np.ndarray) -> np.ndarray:
    """R_l u(x) = sum chi_i(x) R_{l,i} u(x)."""
    x = np.asarray(x, float)
    nb_out = len(all_blades(u.n, u.degree - 1))
    out = np.zeros(nb_out)
    for piece, chi, bctx in zip(ctx.pieces, ctx.chis, ctx.contexts):
        c = float(chi.eval(x[None, :])[0])
        if c == 0.0:
            continue
        out += c * poincare_R_numeric(bctx, u, x)
    return out


def composite_T(ctx: CoverContext, u: SampledForm, x: np.ndarray) -> np.ndarray:
    """T_l u(x) = sum T_{l,i}(chi_i u)(x)."""
    x = np.asarray(x, float)
    nb_out = len(all_blades(u.n, u.degree - 1))
    out = np.zeros(nb_out)
    for chi, bctx in zip(ctx.chis, ctx.contexts):
        out += bogovskii_T(bctx, cut_form(u, chi), x)
    return out


def remainder_K(ctx: CoverContext, u: SampledForm, x: np.ndarray) -> np.ndarray:
    """K_l u = -sum (dchi_i) ^ R_{l,i} u;  K_0 u = sum (theta_i, u) chi_i."""
    x = np.asarray(x, float)
    l = u.degree
    if l == 0:
        val = 0.0
        for i, chi in enumerate(ctx.chis):
            c = float(chi.eval(x[None, :])[0])
            if c != 0.0:
                val += ctx._theta_pair(i, u) * c
        return np.array([val])
    if l > u.n:
        return np.zeros(0)
    table = wedge1_table(u.n, l - 1)
    nb_out = len(all_blades(u.n, l))
    out = np.zeros(nb_out)
    for i, (piece, chi, bctx) in enumerate(zip(ctx.pieces, ctx.chis, ctx.contexts)):
        g = chi.grad(x[None, :])
        if not np.any(g):
            continue
        r_val = poincare_R_numeric(bctx, u, x)
        out -= apply_wedge1(table, g, r_val[None, :], nb_out)[0]
    return out


def remainder_L(ctx: CoverContext, u: SampledForm, x: np.ndarray) -> np.ndarray:
    """L_l u = sum T_{l+1,i}((dchi_i) ^ u);  L_n u = sum (int chi_i u) star theta_i."""
    x = np.asarray(x, float)
    l = u.degree
    n = u.n
    if l == n:
        val = 0.0
        for i, piece in enumerate(ctx.pieces):
            w = ctx._chi_integral(i, u)
            if w != 0.0:
                val += w * float(piece.theta.eval(x[None, :])[0])
        return np.array([val])
    nb_out = len(all_blades(n, l))
    out = np.zeros(nb_out)
    for chi, bctx in zip(ctx.chis, ctx.contexts):
        out += bogovskii_T(bctx, wedge_dchi_form(u, chi), x)
    return out


# -- verification drivers ---------------------------------------------------------------

def homotopy_residual_composite(ctx: CoverContext, u: SampledForm,
                                points: np.ndarray, side: str) -> dict:
    """Residual of the homotopy-with-remainder relation at sample points.

    side "R": d R_l u + R_{l+1} du + K_l u - u   (l = 0: R_1 du + K_0 u - u)
    side "T": d T_l u + T_{l+1} du + L_l u - u   (mirrored endpoints)
    """
    n, l = u.n, u.degree
    points = np.atleast_2d(np.asarray(points, float))
    apply_op = composite_R if side == "R" else composite_T
    remainder = remainder_K if side == "R" else remainder_L
    h = ctx.fd_step * ctx.domain.diameter()
    residuals = []
    for x in points:
        if l == 0:
            res = apply_op(ctx, u.derivative, x) + remainder(ctx, u, x) - u.eval(x)
        elif l < n:
            dOp = fd_exterior_d(lambda z: apply_op(ctx, u, z), n, l - 1, x, h)
            res = dOp + apply_op(ctx, u.derivative, x) + remainder(ctx, u, x) - u.eval(x)
        else:
            dOp = fd_exterior_d(lambda z: apply_op(ctx, u, z), n, l - 1, x, h)
            res = dOp + remainder(ctx, u, x) - u.eval(x)
        residuals.append(float(np.max(np.abs(res))) if np.size(res) else 0.0)
    residuals = np.asarray(residuals)
    return {"side": side, "l": l, "points": points.shape[0],
            "max_residual": float(residuals.max()),
            "mean_residual": float(residuals.mean()),
            "residuals": residuals}


def commutation_residual(ctx: CoverContext, u: SampledForm, points: np.ndarray,
                         which: str) -> dict:
    """Residual of d K_l u = K_{l+1} du (which="K") or d L_l u = L_{l+1} du."""
    n, l = u.n, u.degree
    points = np.atleast_2d(np.asarray(points, float))
    rem = remainder_K if which == "K" else remainder_L
    h = ctx.fd_step * ctx.domain.diameter()
    residuals = []
    for x in points:
        if l == n:
            # d of a top form vanishes and the (n+1)-remainder is zero
            residuals.append(0.0)
            continue
        dRem = fd_exterior_d(lambda z: rem(ctx, u, z), n, l, x, h)
        rhs = rem(ctx, u.derivative, x)
        residuals.append(float(np.max(np.abs(dRem - rhs))))
    residuals = np.asarray(residuals)
    return {"which": which, "l": l, "max_residual": float(residuals.max()),
            "residuals": residuals}


def support_check_T(ctx: CoverContext, u: SampledForm,
                    outside_points: np.ndarray) -> dict:
    """sup |T_l u| over points outside the closed domain (should vanish)."""
    vals = [float(np.max(np.abs(composite_T(ctx, u, x))))
            for x in np.atleast_2d(outside_points)]
    return {"max_value": max(vals), "sup_norm": u.sup_norm(), "values": vals}


def locality_check_R(ctx: CoverContext, u_outside: SampledForm,
                     interior_points: np.ndarray) -> dict:
    """R_l u at interior points for u vanishing on the domain (should vanish)."""
    vals = [float(np.max(np.abs(composite_R(ctx, u_outside, x))))
            for x in np.atleast_2d(interior_points)]
    return {"max_value": max(vals), "sup_norm": u_outside.sup_norm(),
            "values": vals}


# -- cover builders ------------------------------------------------------------------------

def _piece_bump(center, radius, k=4) -> ThetaBump:
    """Tensor bump whose support ball fits inside radius around center."""
    n = len(center)
    r = radius * 0.95 / math.sqrt(n)
    from fractions import Fraction
    cr = [Fraction(float(c)).limit_denominator(10 ** 6) for c in center]
    return make_tensor_bump(n, cr, Fraction(float(r)).limit_denominator(10 ** 6), k)


def _box_piece(box: Box, name: str, ball_frac: float = 0.35, k: int = 4
               ) -> StarlikePiece:
    lo, hi = box.arrays()
    radius = ball_frac * float(np.min(hi - lo)) / 2.0 * 2.0
    center = box.center()
    radius = min(radius, 0.45 * float(np.min(hi - lo)))
    theta = _piece_bump(center, radius, k)
    return StarlikePiece(box, center, radius, theta, name=name)


def single_box_cover(box: Box, k: int = 4, collar: float = 0.04,
                     **ctx_kwargs) -> CoverContext:
    """One-piece cover with a flat partition: chi = 1 near the closed box."""
    domain = BoxUnionDomain([box])
    piece = _box_piece(box, "box", k=k)
    scale = float(np.min(np.asarray(box.hi) - np.asarray(box.lo)))
    chi = box_plateau(box, inner=collar * scale, outer=2 * collar * scale, k=k)
    return CoverContext(domain, [piece], [chi], **ctx_kwargs)


@dataclass(frozen=True)
class ReentrantCorner:
    """A reentrant corner with the outward quadrant direction signs."""
    point: tuple
    sigma: tuple  # components +-1; the quadrant {sigma*(x-point) > 0} is outside


def staircase_cover(base: Box, columns: Sequence[Tuple[Box, ReentrantCorner]],
                    ramp_width: float = 0.12, diag_slope: float = 1.5,
                    corner_flat: float = 0.24, corner_support: float = 0.36,
                    corner_piece_radius: float = 0.42,
                    k: int = 4, cutoff_collar: float = 0.05,
                    **ctx_kwargs) -> CoverContext:
    """Cover of base ∪ columns with one ball piece per reentrant corner.

    Each column is peeled off with a diagonal ramp near its corner, the
    corner ball takes over a plateau around the corner point, and the base
    box absorbs the remainder; the partition sums exactly to a compactly
    supported cutoff that equals 1 near the closed domain.
    """
    n = base.n
    if n != 2:
        raise NotImplementedError("staircase covers are built for n = 2")
    domain = BoxUnionDomain([base] + [c[0] for c in columns])
    pieces: List[StarlikePiece] = []
    chis: List[SmoothFunc] = []
    remaining: SmoothFunc = ConstFunc(1.0, n)
    for idx, (col_box, corner) in enumerate(columns):
        c = np.asarray(corner.point, float)
        sig = np.asarray(corner.sigma, float)
        # corner ball piece, starlike w.r.t. a ball in the inward quadrant
        bc = c - sig * (0.5 * corner_piece_radius)
        ball_r = 0.15 * corner_piece_radius
        thetaE = _piece_bump(bc, ball_r, k)
        pieceE = StarlikePiece(("ball", tuple(c), corner_piece_radius), bc,
                               ball_r, thetaE, domain=domain,
                               name=f"corner{idx}")
        chiE = radial_plateau(c, corner_flat, corner_support, k)
        # diagonal coordinate, positive on the column side of the corner;
        # the slope keeps this corner's transition band out of the other
        # boxes while the corner plateau covers the band crossing
        w = np.array([-diag_slope * sig[0], sig[1]])
        coord_b = -float(w @ c)
        f = affine_ramp(w, coord_b, -ramp_width, ramp_width, k)
        one_minus_E = ComplementFunc(chiE)
        chi_col = ProductFunc(remaining, one_minus_E, f)
        chi_corner = ProductFunc(remaining, chiE)
        pieces.append(_box_piece(col_box, f"column{idx}", k=k))
        chis.append(chi_col)
        pieces.append(pieceE)
        chis.append(chi_corner)
        remaining = ProductFunc(remaining, one_minus_E, ComplementFunc(f))
    pieces.append(_box_piece(base, "base", k=k))
    scale = domain.diameter()
    cutoff = box_plateau(domain.bounding_box(), cutoff_collar * scale,
                         2 * cutoff_collar * scale, k)
    chis = [ProductFunc(chi, cutoff) for chi in chis]
    chis.append(ProductFunc(remaining, cutoff))
    return CoverContext(domain, pieces, chis, **ctx_kwargs)


def l_domain_cover(width: float = 2.0, height: float = 2.0, thickness: float = 1.0,
                   **kwargs) -> CoverContext:
    """The L = ([0,w] x [0,t]) ∪ ([0,t] x [0,h]) with its reentrant corner."""
    bar = Box((0.0, 0.0), (width, thickness))
    col = Box((0.0, 0.0), (thickness, height))
    corner = ReentrantCorner((thickness, thickness), (1, 1))
    return staircase_cover(bar, [(col, corner)], **kwargs)


def u_domain_cover(width: float = 3.0, height: float = 2.0, thickness: float = 1.0,
                   **kwargs) -> CoverContext:
    """The U: a bar with two columns, two reentrant corners."""
    bar = Box((0.0, 0.0), (width, thickness))
    left = Box((0.0, 0.0), (thickness, height))
    right = Box((width - thickness, 0.0), (width, height))
    c_left = ReentrantCorner((thickness, thickness), (1, 1))
    c_right = ReentrantCorner((width - thickness, thickness), (-1, 1))
    return staircase_cover(bar, [(left, c_left), (right, c_right)], **kwargs)
