"""Verification suites: one driver per module, emitting residual reports.

Each suite builds deterministic fixtures from its seed, runs the module's
identity/property checks, and records achieved residuals against the
configured tolerances.  ``run_suite`` dispatches by name; the CLI and the
service are thin wrappers around it.
"""

from __future__ import annotations

import math
import random
import time
from fractions import Fraction
from typing import Callable, Dict, Optional

import numpy as np

from . import bogovskii as bg
from . import glue as gl
from . import symbol as sy
from .bumps import ThetaBump, make_tensor_bump, make_radial_bump, theta_pair
from .exterior import ExtElement, all_blades, contract, hodge_star, inner, wedge
from .forms import (PolyForm, coderivative, exterior_d, hodge_star as form_star,
                    koszul, pullback_dilation, q_complex_3d, qspace_membership,
                    wedge as form_wedge)
from .poincare import (PoincareContext, check_qspace_preservation,
                       homotopy_defect_R, poincare_R, poincare_unregularized,
                       poincare_unregularized_symbolic, starlike_solve)
from .polynomials import RationalPoly
from .reports import CheckRecord, Report
from .sampled import (poly_bump_form, poly_plateau_form, random_poly_bump_form,
                      star_theta_form, zero_mean_volume_form)
from .util import parallel_map


def _random_fraction(rng: random.Random, num: int = 4, den: int = 3) -> Fraction:
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


def random_ext_element(rng: random.Random, n: int, l: int) -> ExtElement:
    coeffs = {b: _random_fraction(rng) for b in all_blades(n, l)}
    return ExtElement(n, l, coeffs)


def random_poly(rng: random.Random, n: int, degree: int, terms: int = 4,
                nvars: Optional[int] = None) -> RationalPoly:
    nvars = nvars or n
    t = {}
    for _ in range(terms):
        alpha = [0] * nvars
        budget = rng.randint(0, degree)
        for _ in range(budget):
            alpha[rng.randrange(n)] += 1
        t[tuple(alpha)] = _random_fraction(rng)
    return RationalPoly(nvars, t)


def random_poly_form(rng: random.Random, n: int, l: int, degree: int,
                     terms: int = 3) -> PolyForm:
    coeffs = {b: random_poly(rng, n, degree, terms) for b in all_blades(n, l)}
    return PolyForm(n, l, coeffs)


def default_bump(n: int, k: int = 1) -> ThetaBump:
    return make_tensor_bump(n, [0] * n, 1, k)


# -- exterior algebra -----------------------------------------------------------------

def suite_algebra(config: dict) -> Report:
    seed = int(config.get("seed", 0))
    n_max = int(config.get("n", 4))
    rng = random.Random(seed)
    rep = Report("algebra", seed, config)

    for n in range(1, n_max + 1):
        bad = 0
        for l in range(0, n + 1):
            for b in all_blades(n, l):
                e = ExtElement(n, l, {b: Fraction(1)})
                ss = hodge_star(hodge_star(e))
                want = e if (l * (n - l)) % 2 == 0 else -e
                bad += ss != want
                sb = hodge_star(e)
                vol = wedge(e, sb)
                want_vol = ExtElement(n, n, {tuple(range(1, n + 1)): Fraction(1)})
                bad += vol != want_vol
        rep.add(CheckRecord.from_flag(
            f"starstar-n{n}", f"star(star(b)) sign and b^star(b)=vol, all blades, n={n}",
            bad == 0, {"violations": bad}))

    for n in range(1, n_max + 1):
        bad = 0
        for l in range(0, n + 1):
            for b in all_blades(n, l):
                u = ExtElement(n, l, {b: Fraction(1)})
                for i in range(1, n + 1):
                    a = ExtElement(n, 1, {(i,): Fraction(1)})
                    lhs = hodge_star(wedge(a, u))
                    rhs = contract(a, hodge_star(u))
                    if l % 2:
                        rhs = -rhs
                    bad += lhs != rhs
        rep.add(CheckRecord.from_flag(
            f"starwedge-n{n}", f"star(a^u) = (-1)^l a .| star(u), exhaustive, n={n}",
            bad == 0, {"violations": bad}))

    for n in range(1, n_max + 1):
        bad = 0
        for l in range(0, n + 1):
            for bu in all_blades(n, l):
                for bv in all_blades(n, l):
                    u = ExtElement(n, l, {bu: Fraction(1)})
                    v = ExtElement(n, l, {bv: Fraction(1)})
                    ip = inner(u, v)
                    bad += ip != (1 if bu == bv else 0)
                    bad += inner(hodge_star(u), hodge_star(v)) != ip
                    sval = hodge_star(wedge(u, hodge_star(v)))
                    bad += sval.coeffs.get((), Fraction(0)) != ip
        rep.add(CheckRecord.from_flag(
            f"starprod-n{n}", f"<u,v> = star(u^star v) = <star u,star v>, n={n}",
            bad == 0, {"violations": bad}))

    for n in range(1, n_max + 1):
        bad = 0
        for l in range(0, n):
            for bu in all_blades(n, l):
                for bw in all_blades(n, l + 1):
                    for i in range(1, n + 1):
                        a = ExtElement(n, 1, {(i,): Fraction(1)})
                        u = ExtElement(n, l, {bu: Fraction(1)})
                        w = ExtElement(n, l + 1, {bw: Fraction(1)})
                        bad += inner(w, wedge(a, u)) != inner(u, contract(a, w))
        rep.add(CheckRecord.from_flag(
            f"adjunction-n{n}", f"<w, a^u> = <u, a .| w> over all blade triples, n={n}",
            bad == 0, {"violations": bad}))

    # randomized identities up to n = 6
    bad = 0
    for trial in range(60):
        n = rng.randint(2, 6)
        l = rng.randint(0, n)
        u = random_ext_element(rng, n, l)
        ss = hodge_star(hodge_star(u))
        want = u if (l * (n - l)) % 2 == 0 else -u
        bad += ss != want
        m = rng.randint(0, n - l)
        v = random_ext_element(rng, n, m)
        a = random_ext_element(rng, n, 1)
        lhs = contract(a, wedge(u, v))
        rhs = wedge(contract(a, u), v) + (wedge(u, contract(a, v)) if l % 2 == 0
                                          else -wedge(u, contract(a, v)))
        if l == 0:
            rhs = wedge(u, contract(a, v))
        bad += lhs != rhs
        w = random_ext_element(rng, n, min(l + 1, n))
        if w.degree == l + 1:
            bad += inner(w, wedge(a, u)) != inner(u, contract(a, w))
    rep.add(CheckRecord.from_flag(
        "random-n6", "antiderivation + duality on random elements, n <= 6",
        bad == 0, {"violations": bad}))

    # R^3 correspondence with classical vector algebra
    bad = 0
    for trial in range(25):
        a = [_random_fraction(rng) for _ in range(3)]
        u = [_random_fraction(rng) for _ in range(3)]
        av = ExtElement.vector(3, a)
        uv = ExtElement.vector(3, u)
        cross = [a[1] * u[2] - a[2] * u[1],
                 a[2] * u[0] - a[0] * u[2],
                 a[0] * u[1] - a[1] * u[0]]
        dot = a[0] * u[0] + a[1] * u[1] + a[2] * u[2]
        w = wedge(av, uv)
        # Lambda^2 <-> R^3: dx2^dx3 -> e1, dx3^dx1 -> e2 (= -dx1^dx3), dx1^dx2 -> e3
        as_vec = [w.coeffs.get((2, 3), Fraction(0)),
                  -w.coeffs.get((1, 3), Fraction(0)),
                  w.coeffs.get((1, 2), Fraction(0))]
        bad += as_vec != cross
        bad += inner(av, uv) != dot
        w2 = ExtElement(3, 2, {(2, 3): u[0], (1, 3): -u[1], (1, 2): u[2]})
        c2 = contract(av, w2)
        minus_cross = [-c for c in cross]
        got = [c2.coeffs.get(((i,)), Fraction(0)) for i in range(1, 4)]
        bad += got != minus_cross
        bad += wedge(av, w2).coeffs.get((1, 2, 3), Fraction(0)) != dot
    rep.add(CheckRecord.from_flag(
        "r3-vector-algebra", "wedge/contraction match cross and dot products in R^3",
        bad == 0, {"violations": bad}))
    return rep


# -- polynomial forms ------------------------------------------------------------------

def suite_forms(config: dict) -> Report:
    seed = int(config.get("seed", 0))
    n_max = int(config.get("n", 4))
    degree = int(config.get("degree", 4))
    rng = random.Random(seed)
    rep = Report("forms", seed, config)

    bad = 0
    for n in range(1, n_max + 1):
        for l in range(0, n + 1):
            for _ in range(6):
                u = random_poly_form(rng, n, l, degree)
                bad += not exterior_d(exterior_d(u)).is_zero()
                bad += not coderivative(coderivative(u)).is_zero()
                ls = form_star(exterior_d(u))
                rs = coderivative(form_star(u))
                if (l - 1) % 2:
                    rs = -rs
                bad += ls != rs
    rep.add(CheckRecord.from_flag(
        "dd-deltadelta", "d(d u) = 0, delta(delta u) = 0, star d = +/- delta star",
        bad == 0, {"violations": bad}))

    bad = 0
    for _ in range(30):
        n = rng.randint(2, n_max)
        l = rng.randint(0, n)
        m = rng.randint(0, n - l)
        u = random_poly_form(rng, n, l, 3)
        v = random_poly_form(rng, n, m, 3)
        lhs = exterior_d(form_wedge(u, v))
        rhs = form_wedge(exterior_d(u), v)
        uv = form_wedge(u, exterior_d(v))
        rhs = rhs + (uv if l % 2 == 0 else -uv)
        bad += lhs != rhs
    rep.add(CheckRecord.from_flag(
        "leibniz", "d(u^v) = du^v + (-1)^l u^dv on random pairs",
        bad == 0, {"violations": bad}))

    # koszul: repeated contraction and the homogeneous identity
    bad = 0
    for _ in range(20):
        n = rng.randint(2, n_max)
        l = rng.randint(1, n)
        u = random_poly_form(rng, n, l, 3)
        bad += not koszul(koszul(u)).is_zero()
        # homogeneous monomial: (d kappa + kappa d) u = (l + deg) u
        alpha = tuple(rng.randint(0, 2) for _ in range(n))
        mono = PolyForm.monomial(n, all_blades(n, l)[rng.randrange(len(all_blades(n, l)))], alpha)
        lhs = exterior_d(koszul(mono)) + koszul(exterior_d(mono))
        bad += lhs != mono.scale(Fraction(l + sum(alpha)))
    rep.add(CheckRecord.from_flag(
        "koszul", "x .| (x .| u) = 0 and (d k + k d) = (l + deg) on monomials",
        bad == 0, {"violations": bad}))

    # Cartan identity as a polynomial identity in (x, t)
    bad = 0
    for _ in range(12):
        n = rng.randint(2, min(3, n_max))
        l = rng.randint(0, n)
        base = random_poly_form(rng, n, l, 2)
        a = [_random_fraction(rng, 2, 2) for _ in range(n)]
        bad += not _cartan_defect(base, a).is_zero()
    rep.add(CheckRecord.from_flag(
        "cartan", "d/dt F_t^* u = d(t^{l-1} X .| u(F_t)) + t^l X .| du(F_t) in Q[x,t]",
        bad == 0, {"violations": bad}))

    # pullback endpoints
    bad = 0
    for _ in range(10):
        n = rng.randint(2, n_max)
        l = rng.randint(0, n)
        u = random_poly_form(rng, n, l, 3)
        a = [_random_fraction(rng, 2, 2) for _ in range(n)]
        bad += pullback_dilation(u, a, 1) != u
        if l >= 1:
            bad += not pullback_dilation(u, a, 0).is_zero()
    rep.add(CheckRecord.from_flag(
        "pullback-endpoints", "F_1^* = id and F_0^* = 0 on positive-degree forms",
        bad == 0, {"violations": bad}))

    # Q-complex structure (subcomplex + Koszul closure) and membership examples
    bad = 0
    for p in (1, 2, 3):
        specs = q_complex_3d(p)
        for l in range(0, 4):
            for blade, alpha in specs[l].monomial_basis():
                mono = PolyForm.monomial(3, blade, alpha)
                if l < 3:
                    bad += not qspace_membership(exterior_d(mono), specs[l + 1])
                if l >= 1:
                    bad += not qspace_membership(koszul(mono), specs[l - 1])
    rep.add(CheckRecord.from_flag(
        "q-complex", "tensor-degree spaces form a subcomplex closed under x .|",
        bad == 0, {"violations": bad}))

    p = 2
    specs = q_complex_3d(p)
    u_in = PolyForm.monomial(3, (2,), (p, 0, 0))
    u_out = PolyForm.monomial(3, (2,), (0, p, 0))
    zero = PolyForm.zero(3, 1)
    ok = (qspace_membership(u_in, specs[1]) and not qspace_membership(u_out, specs[1])
          and qspace_membership(zero, specs[1]))
    rep.add(CheckRecord.from_flag(
        "q-membership", "x1^p dx2 admitted; x2^p dx2 rejected; zero admitted",
        ok))

    # theta pairing examples
    th = default_bump(2, k=1)
    ok = (theta_pair(th, PolyForm.from_scalar(2, RationalPoly.constant(2, 1))) == 1
          and theta_pair(th, PolyForm.from_scalar(2, RationalPoly.variable(2, 0))) == 0
          and theta_pair(th, PolyForm.from_scalar(2, RationalPoly.monomial(2, (2, 0)))) == Fraction(1, 5))
    rep.add(CheckRecord.from_flag(
        "theta-pair", "(theta, 1) = 1, odd moment 0, (theta, a1^2) = 1/5 for k=1",
        ok))
    return rep


def _cartan_defect(base: PolyForm, a) -> PolyForm:
    """LHS - RHS of the dilation-flow Cartan identity over Q[x, t]."""
    n = base.n
    nv = n + 1  # t is the last variable
    t = RationalPoly.variable(nv, n)
    subs = {}
    for i in range(n):
        ai = RationalPoly.constant(nv, Fraction(a[i]))
        xi = RationalPoly.variable(nv, i)
        subs[i] = ai + t * (xi - ai)
    for i in range(n, nv):
        subs[i] = RationalPoly.variable(nv, i)
    from .forms import substitute_coeffs, contract_with
    l = base.degree
    lifted = base.map_coeffs(lambda p: p.shift_vars(0, nv))
    pulled = substitute_coeffs(lifted, subs, nv)           # u(a + t(x-a))
    tl = RationalPoly.monomial(nv, (0,) * n + (l,))
    lhs = pulled.map_coeffs(lambda p: (p * tl).diff(n))     # d/dt [t^l u(F_t)]
    X = [RationalPoly.variable(nv, i) - RationalPoly.constant(nv, Fraction(a[i]))
         for i in range(n)]
    tl1 = RationalPoly.monomial(nv, (0,) * n + (l - 1,)) if l >= 1 else None
    term1 = PolyForm.zero(n, l, nvars=nv)
    if l >= 1:
        term1 = exterior_d(contract_with(X, pulled).map_coeffs(lambda p: p * tl1))
    dlift = substitute_coeffs(
        exterior_d(base).map_coeffs(lambda p: p.shift_vars(0, nv)), subs, nv)
    term2 = contract_with(X, dlift).map_coeffs(lambda p: p * tl)
    return lhs - term1 - term2


# -- smoothing bumps ----------------------------------------------------------------------

def suite_bump(config: dict) -> Report:
    import scipy.integrate as si

    seed = int(config.get("seed", 0))
    rng = np.random.default_rng(seed)
    rep = Report("bump", seed, config)

    # normalization constants
    from .bumps import bump_norm_1d
    ok = bump_norm_1d(1) == Fraction(3, 4)
    th = make_tensor_bump(2, [0, 0], 1, 1)
    ok = ok and th.moment((0, 0)) == 1 and th.moment((2, 0)) == Fraction(1, 5)
    th_shift = make_tensor_bump(2, [Fraction(1, 3), 0], Fraction(1, 2), 2)
    ok = ok and th_shift.moment((1, 0)) == Fraction(1, 3)
    rep.add(CheckRecord.from_flag(
        "moments-exact", "c_1 = 3/4, M_0 = 1, M_(2,0) = 1/5, shifted first moment",
        ok))

    # exact moments vs adaptive quadrature, |alpha| <= 6
    th = make_tensor_bump(2, [Fraction(1, 5), Fraction(-1, 7)], Fraction(3, 4), 4)
    worst = 0.0
    for a1 in range(0, 7):
        for a2 in range(0, 7 - a1):
            exact = float(th.moment((a1, a2)))
            num = 1.0
            for i, m in enumerate((a1, a2)):
                c = float(th.center[i])
                r = float(th.r)
                val, _ = si.quad(
                    lambda s, i=i, m=m: s ** m * float(bump_norm_1d(th.k)) / r
                    * max(0.0, 1 - ((s - c) / r) ** 2) ** th.k,
                    c - r, c + r, limit=200)
                num *= val
            scale = max(abs(exact), 1e-18)
            worst = max(worst, abs(exact - num) / scale)
    rep.add(CheckRecord.from_residual(
        "moment-oracle", "exact moments vs adaptive quadrature, |alpha| <= 6",
        worst, 1e-10))

    # Fourier transform vs oscillatory quadrature oracle
    worst = 0.0
    for _ in range(20):
        xi = rng.uniform(-50, 50, size=2)
        got = th.fourier(xi)
        want = 1.0 + 0.0j
        for i in range(2):
            c, r, k = float(th.center[i]), float(th.r), th.k
            f = lambda s, i=i: float(bump_norm_1d(k)) / r * max(0.0, 1 - ((s - c) / r) ** 2) ** k
            re, _ = si.quad(f, c - r, c + r, weight="cos", wvar=float(xi[i]), limit=200)
            im, _ = si.quad(f, c - r, c + r, weight="sin", wvar=float(xi[i]), limit=200)
            want *= re - 1j * im
        worst = max(worst, abs(got - want))
    rep.add(CheckRecord.from_residual(
        "fourier-oracle", "closed-form transform vs quadrature, |xi| <= 50",
        worst, 1e-9))
    rep.add(CheckRecord.from_residual(
        "fourier-at-zero", "hat(theta)(0) = 1",
        abs(th.fourier(np.zeros(2)) - 1.0), 1e-15))

    # support: exact zero outside the ball
    pts = rng.uniform(-3, 3, size=(200, 2))
    d = np.linalg.norm(pts - th._center_f, axis=1)
    outside = pts[d > th.support_radius]
    vals = th.eval(outside)
    rep.add(CheckRecord.from_residual(
        "support", "eval vanishes outside the declared support ball",
        float(np.max(np.abs(vals))) if len(vals) else 0.0, 0.0))

    # radial bump unit mass by quadrature (polar factorization, centered bump)
    rad = make_radial_bump(2, [0, 0], Fraction(4, 5), 3)
    C = rad.normalization()
    R = float(rad.r)
    radial_mass, _ = si.quad(
        lambda rho: rho * C * (1 - (rho / R) ** 2) ** rad.k, 0.0, R,
        epsabs=1e-14, limit=200)
    rep.add(CheckRecord.from_residual(
        "radial-mass", "radial bump integrates to 1 (quadrature)",
        abs(2 * math.pi * radial_mass - 1.0), 1e-12))

    # radial moments vs quadrature, int x^a y^b theta = angular * radial factor
    worst = 0.0
    for alpha in ((2, 0), (0, 2), (2, 2), (4, 0)):
        got = rad.moment(alpha)
        ang, _ = si.quad(lambda p: math.cos(p) ** alpha[0] * math.sin(p) ** alpha[1],
                         0.0, 2 * math.pi, epsabs=1e-14, limit=200)
        radial, _ = si.quad(
            lambda rho: rho ** (sum(alpha) + 1) * C * (1 - (rho / R) ** 2) ** rad.k,
            0.0, R, epsabs=1e-15, limit=200)
        num = ang * radial
        worst = max(worst, abs(got - num) / max(abs(num), 1e-18))
    rep.add(CheckRecord.from_residual(
        "radial-moments", "closed-form radial moments vs quadrature",
        worst, 1e-9))
    return rep


# -- Poincare operators -----------------------------------------------------------------------

def suite_poincare(config: dict) -> Report:
    seed = int(config.get("seed", 0))
    n_list = config.get("n_list") or [int(config.get("n", 2))]
    degree = int(config.get("degree", 4))
    count = int(config.get("count", 20))
    rng = random.Random(seed)
    rep = Report("poincare", seed, config)

    # worked closed forms for the centered k=1 bump on [-1,1]^2
    th = default_bump(2, k=1)
    ctx = PoincareContext(th)
    u = PolyForm.monomial(2, (1,), (1, 0))
    got = poincare_R(ctx, u)
    want = PolyForm(2, 0, {(): RationalPoly(2, {(2, 0): Fraction(1, 2),
                                                (0, 0): Fraction(-1, 10)})})
    ok1 = got == want and exterior_d(got) == u
    v = PolyForm.monomial(2, (1, 2), (0, 0))
    got2 = poincare_R(ctx, v)
    want2 = PolyForm(2, 1, {(2,): RationalPoly(2, {(1, 0): Fraction(1, 2)}),
                            (1,): RationalPoly(2, {(0, 1): Fraction(-1, 2)})})
    ok2 = got2 == want2 and exterior_d(got2) == v
    rep.add(CheckRecord.from_flag(
        "worked-closed-forms",
        "R1(x1 dx1) = x1^2/2 - 1/10 and R2(dx1^dx2) = (x1 dx2 - x2 dx1)/2",
        ok1 and ok2))

    # exact homotopy identity
    for n in n_list:
        thn = default_bump(n, k=1)
        ctxn = PoincareContext(thn)
        bad = 0
        for l in range(0, n + 1):
            for _ in range(count):
                u = random_poly_form(rng, n, l, degree)
                if not homotopy_defect_R(ctxn, u).is_zero():
                    bad += 1
        rep.add(CheckRecord.from_flag(
            f"homotopy-n{n}",
            f"d R u + R du = u exactly, l = 0..{n}, {count} forms each, n={n}",
            bad == 0, {"violations": bad, "degree": degree}))

    # unregularized operator: curl example and gradient case
    w = PolyForm.monomial(3, (2, 3), (0, 0, 0))
    ra = poincare_unregularized(w, [0, 0, 0])
    want = PolyForm(3, 1, {(3,): RationalPoly(3, {(0, 1, 0): Fraction(1, 2)}),
                           (2,): RationalPoly(3, {(0, 0, 1): Fraction(-1, 2)})})
    ok = ra == want
    rng2 = random.Random(seed + 1)
    for _ in range(5):
        n = rng2.randint(2, 3)
        u0 = random_poly(rng2, n, 3)
        a = [_random_fraction(rng2, 2, 2) for _ in range(n)]
        du0 = PolyForm(n, 1, {(i + 1,): u0.diff(i) for i in range(n)})
        got = poincare_unregularized(du0, a)
        shift = u0.eval_exact(a)
        want_p = u0 - RationalPoly.constant(n, shift)
        ok = ok and got == PolyForm(n, 0, {(): want_p})
        # vanishing at the base point for l >= 2
        if n == 3:
            u2 = random_poly_form(rng2, 3, 2, 2)
            val = poincare_unregularized(u2, a).as_ext_element(a)
            ok = ok and val.is_zero()
    rep.add(CheckRecord.from_flag(
        "unregularized",
        "path integral: curl case, gradient case u0 - u0(a), vanishing at a",
        ok))

    # averaging consistency: symbolic base point + moments == fused operator
    bad = 0
    for _ in range(8):
        n = rng.randint(2, 3)
        l = rng.randint(1, n)
        u = random_poly_form(rng, n, l, 3)
        thn = default_bump(n, k=2)
        ctxn = PoincareContext(thn)
        sym = poincare_unregularized_symbolic(u)
        from .poincare import _apply_moments
        bad += _apply_moments(sym, thn) != poincare_R(ctxn, u)
        # and the symbolic form specializes to the direct numeric-a path
        a = [_random_fraction(rng, 2, 2) for _ in range(n)]
        subs = {}
        for i in range(2 * n):
            if i < n:
                subs[i] = RationalPoly.variable(n, i)
            else:
                subs[i] = RationalPoly.constant(n, a[i - n])
        from .forms import substitute_coeffs
        specialized = substitute_coeffs(sym, subs, n)
        bad += specialized != poincare_unregularized(u, a)
    rep.add(CheckRecord.from_flag(
        "averaging", "moment-contraction of the symbolic base point matches R",
        bad == 0, {"violations": bad}))

    # degree behavior: deg R_l u <= deg u + 1, with equality somewhere
    bad = 0
    hit_equality = False
    for _ in range(10):
        n = rng.randint(2, 3)
        l = rng.randint(1, n)
        u = random_poly_form(rng, n, l, 3)
        th2 = default_bump(n, k=1)
        img = poincare_R(PoincareContext(th2), u)
        if img.max_total_degree() > u.max_total_degree() + 1:
            bad += 1
        if img.max_total_degree() == u.max_total_degree() + 1:
            hit_equality = True
    rep.add(CheckRecord.from_flag(
        "degree-bound", "deg(R u) <= deg(u) + 1 with generic equality",
        bad == 0 and hit_equality, {"violations": bad}))

    # polynomial space preservation
    th3 = default_bump(3, k=1)
    ctx3 = PoincareContext(th3)
    for p in (1, 2, 3):
        specs = q_complex_3d(p)
        ok = True
        total = 0
        for l in (1, 2, 3):
            out = check_qspace_preservation(ctx3, specs, l)
            ok = ok and out["all_preserved"]
            total += out["count"]
        rep.add(CheckRecord.from_flag(
            f"q-preservation-p{p}",
            f"R_l maps the order-{p} spaces into the next lower ones, l=1..3",
            ok, {"monomials": total}))

    # starlike solve: accept closed forms, reject non-closed with residual
    u = PolyForm.monomial(2, (1,), (1, 0))
    sol = starlike_solve(ctx, u)
    ok = exterior_d(sol) == u
    vtop = random_poly_form(rng, 2, 2, 3)
    sol2 = starlike_solve(ctx, vtop)
    ok = ok and exterior_d(sol2) == vtop
    from .poincare import ClosednessError
    try:
        starlike_solve(ctx, PolyForm.monomial(2, (1,), (0, 1)))
        ok = False
    except ClosednessError as err:
        want = PolyForm(2, 2, {(1, 2): RationalPoly.constant(2, -1)})
        ok = ok and err.residual == want
    rep.add(CheckRecord.from_flag(
        "starlike-solve", "dv = u solved exactly for closed u; non-closed rejected",
        ok))
    return rep


# -- Bogovskii operators -------------------------------------------------------------------------

def suite_bogovskii(config: dict) -> Report:
    seed = int(config.get("seed", 0))
    n_list = config.get("n_list") or [int(config.get("n", 2))]
    points = int(config.get("points", 25))
    rng = np.random.default_rng(seed)
    rep = Report("bogovskii", seed, config)

    for n in n_list:
        th = make_tensor_bump(n, [0] * n, Fraction(1, 2), 4)
        ctx = bg.BogovskiiContext(th, outer_points=12 if n == 2 else 8,
                                  inner_points=12, inner_panels=2)
        interior = rng.uniform(-0.4, 0.4, size=(points, n))
        for l in range(0, n + 1):
            if l == n:
                u = zero_mean_volume_form(n, [0.3] + [0.2] * (n - 1),
                                          [-0.25] + [-0.15] * (n - 1), 0.45, k=4)
            else:
                u = random_poly_bump_form(n, l, rng, center=[0.1] * n, radius=0.7,
                                          label=f"u{l}")
            out = bg.homotopy_residual_T(ctx, u, interior)
            rep.add(CheckRecord.from_residual(
                f"homotopy-n{n}-l{l}",
                f"d T u + T du = u (endpoint form), n={n}, l={l}, "
                f"{points} interior points",
                out["max_residual"], 5e-4, {"mean": out["mean_residual"]}))
        # l=n with u = star theta: residual (int u) star theta cancels
        st = star_theta_form(th)
        out = bg.homotopy_residual_T(ctx, st, interior * 0.5)
        rep.add(CheckRecord.from_residual(
            f"homotopy-n{n}-startheta", f"d T_n (star theta) = 0, n={n}",
            out["max_residual"], 5e-4))

    # support: exact vanishing outside the starlike hull
    n = 2
    th = make_tensor_bump(n, [0, 0], Fraction(1, 2), 4)
    ctx = bg.BogovskiiContext(th)
    u = random_poly_bump_form(n, 1, rng, center=[1.6, 0.2], radius=0.35, label="usup")
    vals = []
    for _ in range(40):
        x = rng.uniform(-4, 4, size=n)
        if _outside_capsule(x, np.array([1.6, 0.2]), 0.35,
                            np.zeros(n), th.support_radius, margin=0.05):
            vals.append(float(np.max(np.abs(bg.bogovskii_T(ctx, u, x)))))
    rep.add(CheckRecord.from_residual(
        "support-hull", f"T u = 0 outside the starlike hull ({len(vals)} points)",
        max(vals) if vals else 0.0, 1e-9 * u.sup_norm()))

    # duality
    worst = 0.0
    pairs = int(config.get("pairs", 4))
    for i in range(pairs):
        l = int(rng.integers(0, 2))
        u = random_poly_bump_form(2, l, rng, center=rng.uniform(-0.15, 0.15, 2),
                                  radius=0.6, label=f"ud{i}")
        v = random_poly_bump_form(2, l + 1, rng, center=rng.uniform(-0.15, 0.15, 2),
                                  radius=0.6, label=f"vd{i}")
        ctx2 = bg.BogovskiiContext(th, outer_points=12, inner_points=12,
                                   inner_panels=2, pair_points=20)
        lhs, rhs = bg.adjoint_pairings(ctx2, u, v)
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), 1e-30))
    rep.add(CheckRecord.from_residual(
        "duality", f"(v, Q u) = (T v, u) on {pairs} fixture pairs",
        worst, 1e-5))

    # numeric R vs exact R on a plateau fixture
    th_small = make_tensor_bump(2, [0, 0], Fraction(1, 5), 3)
    bctx = bg.BogovskiiContext(th_small, outer_points=14, inner_points=14)
    pctx = PoincareContext(th_small)
    comp = {(1,): RationalPoly(2, {(1, 0): Fraction(1), (0, 1): Fraction(-2)}),
            (2,): RationalPoly(2, {(1, 1): Fraction(1)})}
    u_s = poly_plateau_form(2, 1, [0, 0], 0.8, 1.1, comp, k=4)
    u_p = PolyForm(2, 1, comp)
    exact = poincare_R(pctx, u_p).coeffs[()]
    worst = 0.0
    for x in (np.array([0.25, 0.1]), np.array([-0.3, 0.2]), np.array([0.0, -0.35]),
              np.array([0.15, 0.3]), np.array([-0.2, -0.15])):
        num = bg.poincare_R_numeric(bctx, u_s, x)[0]
        worst = max(worst, abs(num - float(exact.eval_array(x[None, :])[0])))
    rep.add(CheckRecord.from_residual(
        "numeric-vs-exact-R", "sampled-data R matches the exact operator on a "
        "plateau fixture", worst, 1e-10))

    # quadrature convergence: doubling points reduces the FD-free residual 4x
    th = make_tensor_bump(2, [0, 0], Fraction(1, 2), 4)
    u0 = random_poly_bump_form(2, 0, rng, center=[0.15, 0.05], radius=0.6,
                               k=2, poly_degree=4, label="uconv")
    pts = rng.uniform(-0.35, 0.35, size=(10, 2))
    res = []
    for p in (3, 6, 12):
        ctxc = bg.BogovskiiContext(th, outer_points=p, inner_points=max(3, p // 2),
                                   inner_panels=1)
        res.append(bg.homotopy_residual_T(ctxc, u0, pts)["max_residual"])
    ratio1 = res[0] / max(res[1], 1e-300)
    ratio2 = res[1] / max(res[2], 1e-300)
    rep.add(CheckRecord.from_flag(
        "convergence", "doubling quadrature points shrinks the T1 du = u "
        "residual by at least 4x",
        ratio1 >= 4.0 and ratio2 >= 4.0,
        {"residuals": res, "ratios": [ratio1, ratio2]}))
    return rep


def _outside_capsule(x, c1, r1, c2, r2, margin=0.0) -> bool:
    """x outside conv(B(c1,r1) U B(c2,r2)) dilated by margin."""
    lam = np.linspace(0.0, 1.0, 129)
    centers = lam[:, None] * c1[None, :] + (1 - lam)[:, None] * c2[None, :]
    radii = lam * r1 + (1 - lam) * r2
    d = np.linalg.norm(x[None, :] - centers, axis=1) - radii
    return bool(np.min(d) > margin)


# -- kernel suite -----------------------------------------------------------------------------------

def suite_kernel(config: dict) -> Report:
    seed = int(config.get("seed", 0))
    rng = np.random.default_rng(seed)
    rep = Report("kernel", seed, config)
    pairs = int(config.get("pairs", 50))

    for n in (2, 3):
        th = make_tensor_bump(n, [0] * n, Fraction(1, 2), 4)
        worst = 0.0
        used = 0
        while used < pairs:
            x = rng.uniform(-0.45, 0.45, n)
            y = rng.uniform(-2, 2, n)
            if np.linalg.norm(x - y) < 1e-3:
                continue
            l = int(rng.integers(1, n + 1))
            a = bg.kernel_G(l, x, y, th)
            if a == 0.0:
                continue
            b = bg.kernel_G_homogeneous(l, x, y, th)
            worst = max(worst, abs(a - b) / abs(a))
            used += 1
        rep.add(CheckRecord.from_residual(
            f"g-consistency-n{n}",
            f"direct kernel vs homogeneous expansion at {pairs} admissible pairs",
            worst, 1e-8))

    # ray missing the support: exact zero (the ray leaves x moving away
    # from the box, since it points from y through x outward)
    th = make_tensor_bump(2, [0, 0], Fraction(1, 2), 4)
    x = np.array([3.0, 0.0])
    y = np.array([2.0, 0.0])
    rep.add(CheckRecord.from_residual(
        "g-empty-ray", "kernel vanishes when the ray misses supp theta",
        abs(bg.kernel_G(1, x, y, th)), 0.0))

    # weak singularity: |G(x,y)(x-y)| <= C(x)|x-y|^{-n+1}, stable fit
    x0 = np.array([0.2, -0.1])
    dirs = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [-1.0, 0.7]])
    coarse = bg.weak_singularity_scan(th, 2, x0, dirs,
                                      np.geomspace(1e-4, 0.5, 12))
    fine = bg.weak_singularity_scan(th, 2, x0, dirs,
                                    np.geomspace(1e-4, 0.5, 24))
    drift = abs(fine["fitted_constant"] - coarse["fitted_constant"]) \
        / coarse["fitted_constant"]
    rep.add(CheckRecord.from_residual(
        "weak-singularity",
        "fitted constant of |G||x-y|^n stable under grid refinement",
        drift, 0.1, {"coarse": coarse["fitted_constant"],
                     "fine": fine["fitted_constant"]}))

    # singular floor raises
    try:
        bg.kernel_G(1, x0, x0 + 1e-14, th)
        ok = False
    except bg.SingularEvaluationError:
        ok = True
    rep.add(CheckRecord.from_flag(
        "singular-floor", "evaluation below the separation floor is rejected", ok))
    return rep


# -- symbol suite --------------------------------------------------------------------------------------

def suite_symbol(config: dict) -> Report:
    seed = int(config.get("seed", 0))
    rep = Report("symbol", seed, config)
    n = int(config.get("n", 2))
    l_values = config.get("l_list") or [int(config.get("l", 1))]
    th = make_tensor_bump(n, [0] * n, Fraction(1, 2), 4)

    worst = 0.0
    rng = np.random.default_rng(seed)
    for _ in range(10):
        x = rng.uniform(-2, 2, n)
        for l in range(1, n + 1):
            for j in range(1, n + 1):
                got = sy.k1hat_at_zero(th, l, j, x)
                want = -x[j - 1] * (2 ** l - 1) / l
                worst = max(worst, abs(got - want))
    rep.add(CheckRecord.from_residual(
        "spot-zero", "k1hat(x, 0) = -x_j (2^l - 1)/l", worst, 1e-10))

    for l in l_values:
        probe = sy.SymbolProbe(th, l=l, j=1, x_points=int(config.get("x_points", 3)),
                               directions=int(config.get("directions", 8)),
                               xi_points=int(config.get("xi_points", 40)),
                               xi_max=float(config.get("xi_max", 1e3)))
        scan = sy.decay_scan(probe)
        growth = max(v["growth_last_decade"] for v in scan["verdicts"])
        rep.add(CheckRecord.from_residual(
            f"decay-plateau-l{l}",
            f"E0 and E1 running sup plateau over |xi| up to {probe.xi_max:g}, l={l}",
            growth, 0.01,
            {"verdicts": scan["verdicts"], "note": scan["smoothness_note"]}))

    # kernel split consistency
    rng = np.random.default_rng(seed + 1)
    x = np.array([0.2, -0.1]) if n == 2 else rng.uniform(-0.3, 0.3, n)
    Z = rng.uniform(-1.5, 1.5, size=(30, n))
    k_full = sy.kernel_k_batch(th, min(2, n), 1, x, Z, s_range="full")
    k0 = sy.kernel_k_batch(th, min(2, n), 1, x, Z, s_range="smooth")
    k1 = sy.kernel_k_batch(th, min(2, n), 1, x, Z, s_range="rough")
    scale = max(np.max(np.abs(k_full)), 1e-30)
    rep.add(CheckRecord.from_residual(
        "k0-k1-split", "k = k0 + k1 at 30 displacement samples",
        float(np.max(np.abs(k_full - k0 - k1)) / scale), 1e-8))

    # bounded smooth part on a compact set
    vals = [abs(sy.smooth_part_k0(th, 1, 1, x, z)) for z in Z]
    rep.add(CheckRecord.from_flag(
        "k0-bounded", "smooth part finite on a compact displacement grid",
        all(math.isfinite(v) for v in vals), {"sup": max(vals)}))

    if config.get("operator_consistency", False):
        u = make_tensor_bump(2, [Fraction(1, 10), Fraction(-1, 20)],
                             Fraction(7, 20), 4)
        worst = 0.0
        pts = [np.array([0.15, 0.05]), np.array([-0.1, 0.12]),
               np.array([0.05, -0.18]), np.array([0.22, 0.2]),
               np.array([-0.15, -0.05])]
        for x in pts:
            direct = sy.apply_K_direct(th, 1, 1, u, x, p=16)
            split = sy.apply_K_split(th, 1, 1, u, x, xi_radius=60.0)
            worst = max(worst, abs(direct - split["total"]) / max(abs(direct), 1e-30))
        rep.add(CheckRecord.from_residual(
            "operator-vs-symbol",
            "kernel quadrature vs k0-convolution + inverse transform of k1hat",
            worst, 1e-3))
    return rep


# -- glue suite -----------------------------------------------------------------------------------------

def suite_glue(config: dict) -> Report:
    seed = int(config.get("seed", 0))
    rng = np.random.default_rng(seed)
    rep = Report("glue", seed, config)

    ctx = gl.l_domain_cover()
    part = ctx.partition_report()
    rep.add(CheckRecord.from_residual(
        "partition-sum", "sum chi_i = 1 near the closed L-domain",
        part["sum_defect"], 1e-12))
    rep.add(CheckRecord.from_flag(
        "partition-subordinate", "chi_i vanish outside their pieces (inside the domain)",
        part["subordinate"], part.get("subordinate_violation") or {}))
    rep.add(CheckRecord.from_flag(
        "coverage", "pieces cover the domain", part["coverage"]))
    rep.add(CheckRecord.from_flag(
        "starlike", "sampled starlike check per piece",
        all(part["starlike"].values()), part["starlike"]))

    # single-piece flat partition degenerates to the plain operators
    box = gl.Box((0.0, 0.0), (1.0, 1.0))
    single = gl.single_box_cover(box)
    theta0 = single.pieces[0].theta
    plain = bg.BogovskiiContext(theta0, outer_points=single.contexts[0].outer_points,
                                outer_points_near=single.contexts[0].outer_points_near,
                                inner_points=single.contexts[0].inner_points,
                                inner_panels=single.contexts[0].inner_panels)
    u = random_poly_bump_form(2, 1, rng, center=[0.5, 0.5], radius=0.3, label="usingle")
    worst = 0.0
    for _ in range(6):
        x = rng.uniform(0.2, 0.8, 2)
        worst = max(worst, float(np.max(np.abs(
            gl.composite_T(single, u, x) - bg.bogovskii_T(plain, u, x)))))
        worst = max(worst, float(np.max(np.abs(
            gl.composite_R(single, u, x) - bg.poincare_R_numeric(plain, u, x)))))
        worst = max(worst, float(np.max(np.abs(gl.remainder_K(single, u, x)))))
        worst = max(worst, float(np.max(np.abs(gl.remainder_L(single, u, x)))))
    rep.add(CheckRecord.from_residual(
        "flat-degeneration",
        "one flat piece: composite operators match the single-bump operators, "
        "K and L vanish on the domain", worst, 1e-10))

    # L-domain homotopies with remainder; sample points mix generic interior
    # locations with points inside the fixture support so the residual is
    # exercised where the forms actually live
    n_pts = int(config.get("points", 6))
    pts = np.concatenate([
        ctx.sample_interior(n_pts, rng),
        np.array([0.62, 0.62]) + rng.uniform(-0.2, 0.2, size=(n_pts, 2)),
    ])
    fixtures = {
        l: random_poly_bump_form(2, l, rng, center=[0.62, 0.62], radius=0.33,
                                 label=f"uL{l}")
        for l in (0, 1, 2)
    }
    for l, u in fixtures.items():
        for side in ("R", "T"):
            out = gl.homotopy_residual_composite(ctx, u, pts, side)
            rep.add(CheckRecord.from_residual(
                f"homotopy-{side}-l{l}",
                f"{side}-side homotopy with remainder on the L-domain, l={l}",
                out["max_residual"], 1e-4))
    # commutation points include locations inside the ramp band, where the
    # partition gradients (hence K itself) are nonzero
    comm_pts = np.concatenate([
        pts[n_pts - 1: n_pts + 1],
        np.array([[0.80, 0.73], [0.55, 0.35]]),
    ])
    for l, u in fixtures.items():
        for which in ("K", "L"):
            out = gl.commutation_residual(ctx, u, comm_pts, which)
            rep.add(CheckRecord.from_residual(
                f"commutation-{which}-l{l}",
                f"d {which} u = {which} du on the L-domain, l={l}",
                out["max_residual"], 1e-3))

    # support and locality
    outside = np.array([[1.5, 1.4], [2.4, 0.5], [-0.4, 1.0], [1.15, 1.15],
                        [0.5, 2.3], [1.02, 1.6]])
    out = gl.support_check_T(ctx, fixtures[1], outside)
    rep.add(CheckRecord.from_residual(
        "support-T", "composite T vanishes outside the closed domain",
        out["max_value"], 1e-9 * out["sup_norm"]))
    u_out = random_poly_bump_form(2, 1, rng, center=[1.6, 1.45], radius=0.4,
                                  label="uoutside")
    out = gl.locality_check_R(ctx, u_out, pts)
    rep.add(CheckRecord.from_residual(
        "locality-R", "composite R vanishes on the domain for data vanishing there",
        out["max_value"], 1e-9 * out["sup_norm"]))

    # three-box U-domain: partition diagnostics + one homotopy spot check
    if config.get("u_domain", True):
        uctx = gl.u_domain_cover()
        upart = uctx.partition_report()
        rep.add(CheckRecord.from_residual(
            "u-partition-sum", "sum chi_i = 1 near the closed U-domain",
            upart["sum_defect"], 1e-12))
        rep.add(CheckRecord.from_flag(
            "u-subordinate-coverage-starlike",
            "U-domain pieces subordinate, covering, starlike",
            upart["subordinate"] and upart["coverage"]
            and all(upart["starlike"].values())))
        uu = random_poly_bump_form(2, 1, rng, center=[0.6, 0.6], radius=0.3,
                                   label="uU")
        upts = np.concatenate([
            uctx.sample_interior(3, rng),
            np.array([0.6, 0.6]) + rng.uniform(-0.18, 0.18, size=(3, 2)),
        ])
        out = gl.homotopy_residual_composite(uctx, uu, upts, "T")
        rep.add(CheckRecord.from_residual(
            "u-homotopy-T-l1", "T-side homotopy with remainder on the U-domain",
            out["max_residual"], 1e-4))
    return rep


SUITES: Dict[str, Callable[[dict], Report]] = {
    "algebra": suite_algebra,
    "forms": suite_forms,
    "bump": suite_bump,
    "poincare": suite_poincare,
    "bogovskii": suite_bogovskii,
    "kernel": suite_kernel,
    "symbol": suite_symbol,
    "glue": suite_glue,
}


def run_suite(name: str, config: Optional[dict] = None) -> Report:
    """Run one verification suite by name, timing it into the report."""
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    config = dict(config or {})
    t0 = time.time()
    rep = SUITES[name](config)
    rep.elapsed_s = time.time() - t0
    return rep
