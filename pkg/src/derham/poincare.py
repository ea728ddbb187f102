"""Regularized Poincare-type operators on polynomial forms, computed exactly.

The path integral

    R_l u(x) = int theta(a) (x-a) ⌟ int_0^1 t^{l-1} u(a + t(x-a)) dt da

is evaluated symbolically: the coefficient ring is extended by the base
point a and the dilation parameter t, the t-integral is done monomially
over [0,1], and the a-integral is replaced by the exact moment table of
theta.  Everything stays in exact rational arithmetic, so the homotopy
identities are decidable equalities.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Optional, Sequence

from .bumps import ThetaBump, theta_pair
from .forms import (PolyForm, QSpaceSpec, exterior_d, contract_with, koszul,
                    qspace_membership, substitute_coeffs)
from .polynomials import RationalPoly


class ClosednessError(ValueError):
    """Input form is not closed; carries the exact residual du."""

    def __init__(self, residual: PolyForm):
        super().__init__("input form is not closed: du != 0")
        self.residual = residual


class PoincareContext:
    """A fixed smoothing bump theta with its containing ball B."""

    def __init__(self, theta: ThetaBump, ball_center: Optional[Sequence] = None,
                 ball_radius2=None):
        self.theta = theta
        if ball_center is None:
            ball_center = theta.center
            # smallest ball around the center containing the support:
            # radius^2 = n r^2 (tensor box corner) or r^2 (radial)
            ball_radius2 = (theta.r ** 2 * theta.n if theta.kind == "tensor"
                            else theta.r ** 2)
        self.ball_center = tuple(Fraction(c) for c in ball_center)
        self.ball_radius2 = Fraction(ball_radius2)
        self._check_support_in_ball()
        self._monomial_cache: Dict[tuple, PolyForm] = {}

    def _check_support_in_ball(self):
        th = self.theta
        # farthest support point from the ball center, per axis
        worst = Fraction(0)
        for i in range(th.n):
            d = abs(th.center[i] - self.ball_center[i]) + th.r
            worst += d * d
        if worst > self.ball_radius2:
            raise ValueError("support of theta is not contained in the ball B")

    @property
    def n(self) -> int:
        return self.theta.n


# -- symbolic ray integral -----------------------------------------------------
#
# Extended ring layout: variables 0..n-1 = x, n..2n-1 = a, 2n = t.

def _ext_ring_subs(n: int):
    nv = 2 * n + 1
    subs = {}
    for i in range(n):
        x_i = RationalPoly.variable(nv, i)
        a_i = RationalPoly.variable(nv, n + i)
        t = RationalPoly.variable(nv, 2 * n)
        subs[i] = a_i + t * x_i - t * a_i
    return subs, nv


def _ray_contracted_integrand(u: PolyForm) -> PolyForm:
    """(x-a) ⌟ [t^{l-1} u(a + t(x-a))] over the extended ring."""
    n, l = u.n, u.degree
    if u.nvars != n:
        raise ValueError("poincare operators act on forms over the spatial ring")
    subs, nv = _ext_ring_subs(n)
    lifted = substitute_coeffs(u, subs, nv)
    t_pow = RationalPoly.monomial(nv, (0,) * (2 * n) + (l - 1,))
    lifted = lifted.map_coeffs(lambda p: p * t_pow)
    components = [
        RationalPoly.variable(nv, j) - RationalPoly.variable(nv, n + j)
        for j in range(n)
    ]
    return contract_with(components, lifted)


def _integrate_t(u: PolyForm) -> PolyForm:
    n = u.n
    return u.map_coeffs(lambda p: p.definite_integral_01(2 * n))


def _strip_params(u: PolyForm) -> PolyForm:
    """Drop the (now exponent-zero) parameter variables, back to the spatial ring."""
    n = u.n
    out = {}
    for b, p in u.coeffs.items():
        terms = {}
        for alpha, c in p.terms.items():
            if any(alpha[n:]):
                raise ValueError("parameter variables still present")
            terms[alpha[:n]] = c
        out[b] = RationalPoly(n, terms)
    return PolyForm(u.n, u.degree, out, nvars=n)


def _apply_moments(u: PolyForm, theta: ThetaBump) -> PolyForm:
    """Replace each a-monomial by its theta-moment; result over the spatial ring."""
    n = u.n
    out: Dict[tuple, RationalPoly] = {}
    for b, p in u.coeffs.items():
        terms: Dict[tuple, Fraction] = {}
        for alpha, c in p.terms.items():
            beta = alpha[n:2 * n]
            m = theta.moment(beta)
            if not m:
                continue
            xa = alpha[:n]
            s = terms.get(xa, Fraction(0)) + c * m
            if s:
                terms[xa] = s
            else:
                del terms[xa]
        q = RationalPoly(n, terms)
        if q:
            out[b] = q
    return PolyForm(u.n, u.degree, out, nvars=n)


def poincare_unregularized_symbolic(u: PolyForm) -> PolyForm:
    """R_a u with a symbolic base point: an (l-1)-form over the (x, a) ring.

    Variables 0..n-1 are x, n..2n-1 are a; t is integrated out.
    """
    if not 1 <= u.degree <= u.n:
        raise ValueError(f"degree {u.degree} outside 1..n")
    return _integrate_t(_ray_contracted_integrand(u))


def poincare_unregularized(u: PolyForm, a: Sequence) -> PolyForm:
    """Base-point path integral R_a u for a concrete rational point a.

    Computed by direct substitution in the (x, t) ring, independently of
    the symbolic-a path.
    """
    n, l = u.n, u.degree
    if not 1 <= l <= n:
        raise ValueError(f"degree {l} outside 1..n")
    a = [Fraction(v) for v in a]
    if len(a) != n:
        raise ValueError("base point needs n components")
    nv = n + 1  # x vars plus t
    subs = {}
    for i in range(n):
        x_i = RationalPoly.variable(nv, i)
        t = RationalPoly.variable(nv, n)
        subs[i] = RationalPoly.constant(nv, a[i]) + t * x_i - t * RationalPoly.constant(nv, a[i])
    lifted = substitute_coeffs(u, subs, nv)
    t_pow = RationalPoly.monomial(nv, (0,) * n + (l - 1,))
    lifted = lifted.map_coeffs(lambda p: p * t_pow)
    components = [
        RationalPoly.variable(nv, j) - RationalPoly.constant(nv, a[j])
        for j in range(n)
    ]
    contracted = contract_with(components, lifted)
    integrated = contracted.map_coeffs(lambda p: p.definite_integral_01(n))
    return _strip_params(integrated)


def poincare_R(ctx: PoincareContext, u: PolyForm) -> PolyForm:
    """Exact regularized Poincare operator R_l on a polynomial l-form.

    Decomposes u into monomial forms and caches the monomial images, so
    batches of forms over a fixed bump cost one symbolic integral per
    distinct monomial.
    """
    n, l = u.n, u.degree
    if n != ctx.n:
        raise ValueError("dimension mismatch with context")
    if not 1 <= l <= n:
        raise ValueError(f"degree {l} outside 1..n; got l={l}")
    needed = u.max_total_degree() + 1
    if needed > ctx.theta.moment_cap:
        raise RuntimeError(
            f"moment cap {ctx.theta.moment_cap} too small: need order {needed}")
    result = PolyForm.zero(n, l - 1)
    cache = ctx._monomial_cache
    for blade, p in u.coeffs.items():
        for alpha, c in p.terms.items():
            key = (l, blade, alpha)
            img = cache.get(key)
            if img is None:
                mono = PolyForm.monomial(n, blade, alpha)
                img = _apply_moments(
                    poincare_unregularized_symbolic(mono), ctx.theta)
                cache[key] = img
            result = result + img.scale(c)
    return result


def extended_R(ctx: PoincareContext, u: PolyForm):
    """Endpoint operators: R_0 u = (theta, u) for 0-forms, R_{n+1} = 0."""
    if u.degree == 0:
        return theta_pair(ctx.theta, u)
    if u.degree == ctx.n + 1:
        return PolyForm.zero(ctx.n, ctx.n)
    raise ValueError("extended_R handles degrees 0 and n+1 only")


def homotopy_defect_R(ctx: PoincareContext, u: PolyForm) -> PolyForm:
    """d R_l u + R_{l+1} du - u, with the endpoint conventions.

    For l = 0 this is R_1 du - u + (theta, u); for l = n it is d R_n u - u.
    The defect is the exact zero form whenever the homotopy identity holds.
    """
    n, l = ctx.n, u.degree
    if l == 0:
        c = theta_pair(ctx.theta, u)
        defect = poincare_R(ctx, exterior_d(u)) - u
        return defect + PolyForm.from_scalar(n, RationalPoly.constant(n, c))
    if l == n:
        return exterior_d(poincare_R(ctx, u)) - u
    return exterior_d(poincare_R(ctx, u)) + poincare_R(ctx, exterior_d(u)) - u


def starlike_solve(ctx: PoincareContext, u: PolyForm) -> PolyForm:
    """Solve dv = u exactly for a closed polynomial l-form u (v = R_l u)."""
    du = exterior_d(u)
    if not du.is_zero():
        raise ClosednessError(du)
    return poincare_R(ctx, u)


# -- polynomial-space preservation ------------------------------------------------

class QSpaceConditionError(ValueError):
    """The supplied space family fails the structural conditions."""


def verify_family_conditions(specs: Sequence[QSpaceSpec], l: int,
                             rng=None, samples: int = 8) -> None:
    """Check conditions on (P(Λ^{l-1}), P(Λ^l)) needed for preservation.

    Condition 1 (dilation/translation invariance of P(Λ^l)) is checked on
    random rational dilations/translations of every basis monomial;
    condition 2 (Koszul closure into P(Λ^{l-1})) is checked exactly on the
    monomial basis.  Raises QSpaceConditionError with a diagnostic.
    """
    import random
    rng = rng or random.Random(0)
    spec_l = specs[l]
    spec_lm1 = specs[l - 1]
    for blade, alpha in spec_l.monomial_basis():
        mono = PolyForm.monomial(spec_l.n, blade, alpha)
        kz = koszul(mono)
        if not qspace_membership(kz, spec_lm1):
            raise QSpaceConditionError(
                f"condition 2 fails: x ⌟ (x^{alpha} dx_{blade}) leaves the "
                f"degree-{l - 1} space")
        for _ in range(samples):
            t = Fraction(rng.randint(-3, 3), rng.randint(1, 4))
            a = [Fraction(rng.randint(-2, 2), rng.randint(1, 3))
                 for _ in range(spec_l.n)]
            subs = {
                i: RationalPoly.constant(spec_l.n, a[i])
                + RationalPoly.variable(spec_l.n, i) * t
                for i in range(spec_l.n)
            }
            moved = substitute_coeffs(mono, subs, spec_l.n)
            if not qspace_membership(moved, spec_l):
                raise QSpaceConditionError(
                    f"condition 1 fails: x -> {t}x + a moves x^{alpha} dx_{blade} "
                    f"out of the degree-{l} space")


def check_qspace_preservation(ctx: PoincareContext, specs: Sequence[QSpaceSpec],
                              l: int, verify_conditions: bool = True) -> dict:
    """Assert R_l maps the degree-l space into the degree-(l-1) space.

    Runs over the full monomial spanning set; returns a report dict with
    one record per monomial and an overall verdict.
    """
    if not 1 <= l <= ctx.n:
        raise ValueError("l outside 1..n")
    if verify_conditions:
        verify_family_conditions(specs, l)
    spec_l = specs[l]
    spec_lm1 = specs[l - 1]
    records = []
    all_ok = True
    for blade, alpha in spec_l.monomial_basis():
        mono = PolyForm.monomial(spec_l.n, blade, alpha)
        img = poincare_R(ctx, mono)
        ok = qspace_membership(img, spec_lm1)
        all_ok = all_ok and ok
        records.append({
            "blade": list(blade),
            "alpha": list(alpha),
            "preserved": ok,
            "image_degrees": {
                "".join(map(str, b)): list(p.partial_degrees())
                for b, p in sorted(img.coeffs.items())
            },
        })
    return {"l": l, "count": len(records), "all_preserved": all_ok,
            "records": records}
