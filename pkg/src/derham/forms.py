"""Differential forms with exact rational-polynomial coefficients.

A ``PolyForm`` of degree l in dimension n maps degree-l blades to
``RationalPoly`` coefficients.  The coefficient ring may carry extra
parameter variables beyond the n spatial ones (used internally for the
symbolic base point and dilation parameter of the path integrals);
``exterior_d`` and ``koszul`` always act on the first n variables.
"""

from __future__ import annotations

import json
from fractions import Fraction
from itertools import combinations, product
from typing import Dict, Mapping, Sequence

from .exterior import (Blade, DimensionError, ExtElement, all_blades,
                       check_blade, complement_sign, contract_blade,
                       merge_sign, MAX_DIMENSION)
from .polynomials import RationalPoly


class PolyForm:
    """An l-form whose blade coefficients are exact rational polynomials."""

    __slots__ = ("n", "degree", "nvars", "coeffs")

    def __init__(self, n: int, degree: int,
                 coeffs: Mapping[Blade, RationalPoly] | None = None,
                 nvars: int | None = None, max_dim: int = MAX_DIMENSION):
        if n < 1 or n > max_dim:
            raise DimensionError(f"dimension {n} outside 1..{max_dim}")
        self.n = n
        self.degree = degree
        self.nvars = nvars if nvars is not None else n
        if self.nvars < n:
            raise ValueError("coefficient ring needs at least n variables")
        clean: Dict[Blade, RationalPoly] = {}
        if coeffs and 0 <= degree <= n:
            for b, p in coeffs.items():
                b = check_blade(b, n)
                if len(b) != degree:
                    raise DimensionError(f"blade {b} has wrong degree, expected {degree}")
                if not isinstance(p, RationalPoly):
                    p = RationalPoly.constant(self.nvars, p)
                if p.nvars != self.nvars:
                    raise ValueError("coefficient ring size mismatch")
                if p:
                    clean[b] = p
        self.coeffs = clean

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, n: int, degree: int, nvars: int | None = None) -> "PolyForm":
        return cls(n, degree, nvars=nvars)

    @classmethod
    def from_scalar(cls, n: int, p: RationalPoly) -> "PolyForm":
        return cls(n, 0, {(): p}, nvars=p.nvars)

    @classmethod
    def monomial(cls, n: int, blade: Sequence[int], alpha: Sequence[int],
                 c=1) -> "PolyForm":
        blade = tuple(blade)
        return cls(n, len(blade),
                   {blade: RationalPoly.monomial(n, alpha, c)})

    @classmethod
    def volume(cls, n: int, p: RationalPoly | int = 1) -> "PolyForm":
        if not isinstance(p, RationalPoly):
            p = RationalPoly.constant(n, p)
        return cls(n, n, {tuple(range(1, n + 1)): p}, nvars=p.nvars)

    # -- basics --------------------------------------------------------------

    def __bool__(self):
        return bool(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, PolyForm):
            return NotImplemented
        return (self.n == other.n and self.degree == other.degree
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.n, self.degree, frozenset(self.coeffs.items())))

    def __add__(self, other: "PolyForm") -> "PolyForm":
        self._check(other)
        out = dict(self.coeffs)
        for b, p in other.coeffs.items():
            s = out.get(b)
            s = p if s is None else s + p
            if s:
                out[b] = s
            else:
                out.pop(b, None)
        return self._raw(self.n, self.degree, out, self.nvars)

    def __neg__(self):
        return self._raw(self.n, self.degree,
                         {b: -p for b, p in self.coeffs.items()}, self.nvars)

    def __sub__(self, other: "PolyForm") -> "PolyForm":
        return self + (-other)

    def scale(self, c) -> "PolyForm":
        out = {}
        for b, p in self.coeffs.items():
            q = p * c
            if q:
                out[b] = q
        return self._raw(self.n, self.degree, out, self.nvars)

    __mul__ = scale
    __rmul__ = scale

    def _check(self, other):
        if other.n != self.n or other.degree != self.degree or other.nvars != self.nvars:
            raise DimensionError("form mismatch")

    @classmethod
    def _raw(cls, n, degree, coeffs, nvars):
        f = cls.__new__(cls)
        f.n = n
        f.degree = degree
        f.nvars = nvars
        f.coeffs = coeffs
        return f

    def max_total_degree(self) -> int:
        if not self.coeffs:
            return -1
        return max(p.total_degree() for p in self.coeffs.values())

    def map_coeffs(self, fn) -> "PolyForm":
        out = {}
        nvars = None
        for b, p in self.coeffs.items():
            q = fn(p)
            nvars = q.nvars
            if q:
                out[b] = q
        return self._raw(self.n, self.degree, out,
                         nvars if nvars is not None else self.nvars)

    def as_ext_element(self, point: Sequence) -> ExtElement:
        """Evaluate coefficients at an exact rational point."""
        return ExtElement(self.n, self.degree,
                          {b: p.eval_exact(point) for b, p in self.coeffs.items()})

    def __repr__(self):
        if not self.coeffs:
            return f"0 (degree {self.degree}, n={self.n})"
        bits = []
        for b in sorted(self.coeffs):
            name = "^".join(f"dx{i}" for i in b) if b else ""
            sep = " " if name else ""
            bits.append(f"({self.coeffs[b]}){sep}{name}")
        return " + ".join(bits)


# -- algebra -----------------------------------------------------------------

def wedge(u: PolyForm, v: PolyForm) -> PolyForm:
    if u.n != v.n or u.nvars != v.nvars:
        raise DimensionError("dimension mismatch in wedge")
    deg = u.degree + v.degree
    out: Dict[Blade, RationalPoly] = {}
    if deg <= u.n:
        for b1, p1 in u.coeffs.items():
            for b2, p2 in v.coeffs.items():
                sign, merged = merge_sign(b1, b2)
                if sign == 0:
                    continue
                q = p1 * p2
                if sign < 0:
                    q = -q
                s = out.get(merged)
                s = q if s is None else s + q
                if s:
                    out[merged] = s
                else:
                    del out[merged]
    return PolyForm._raw(u.n, deg, out, u.nvars)


def contract_with(components: Sequence[RationalPoly], u: PolyForm) -> PolyForm:
    """Contraction a ⌟ u where a has polynomial components (one per axis)."""
    if len(components) != u.n:
        raise DimensionError("contraction vector needs n components")
    if u.degree == 0:
        return PolyForm(u.n, -1, nvars=u.nvars)
    acomp = {(j + 1,): components[j] for j in range(u.n) if components[j]}
    out: Dict[Blade, RationalPoly] = {}
    for blade, p in u.coeffs.items():
        for factor, sub in contract_blade(acomp, blade):
            q = factor * p
            s = out.get(sub)
            s = q if s is None else s + q
            if s:
                out[sub] = s
            else:
                del out[sub]
    return PolyForm._raw(u.n, u.degree - 1, out, u.nvars)


def exterior_d(u: PolyForm) -> PolyForm:
    """Exterior derivative: du = sum_i d_i(coeff) dx_i ^ blade."""
    if u.degree >= u.n:
        return PolyForm(u.n, u.degree + 1, nvars=u.nvars)
    out: Dict[Blade, RationalPoly] = {}
    for blade, p in u.coeffs.items():
        for i in range(1, u.n + 1):
            dp = p.diff(i - 1)
            if not dp:
                continue
            sign, merged = merge_sign((i,), blade)
            if sign == 0:
                continue
            if sign < 0:
                dp = -dp
            s = out.get(merged)
            s = dp if s is None else s + dp
            if s:
                out[merged] = s
            else:
                del out[merged]
    return PolyForm._raw(u.n, u.degree + 1, out, u.nvars)


def koszul(u: PolyForm) -> PolyForm:
    """Koszul operator x ⌟ u (contraction with the position vector)."""
    xs = [RationalPoly.variable(u.nvars, j) for j in range(u.n)]
    return contract_with(xs, u)


def hodge_star(u: PolyForm) -> PolyForm:
    out: Dict[Blade, RationalPoly] = {}
    for b, p in u.coeffs.items():
        sign, comp = complement_sign(b, u.n)
        out[comp] = p if sign > 0 else -p
    return PolyForm._raw(u.n, u.n - u.degree, out, u.nvars)


def coderivative(u: PolyForm) -> PolyForm:
    """Co-derivative, fixed by star(delta u) = (-1)^l d(star u) on l-forms.

    Equivalently delta = (-1)^{n(l+1)+1} star d star.
    """
    l, n = u.degree, u.n
    w = hodge_star(exterior_d(hodge_star(u)))
    if (n * (l + 1) + 1) % 2:
        return -w
    return w


def pullback_dilation(u: PolyForm, a: Sequence, t) -> PolyForm:
    """Dilation pullback: (F_t^* u)(x) = t^l u(a + t(x - a)).

    ``a`` is an exact rational point, ``t`` an exact rational.
    """
    t = Fraction(t)
    a = [Fraction(v) for v in a]
    if len(a) != u.n:
        raise DimensionError("base point needs n components")
    if u.degree >= 1 and t == 0:
        return PolyForm(u.n, u.degree, nvars=u.nvars)
    subs = {}
    for i in range(u.nvars):
        if i < u.n:
            # x_i -> a_i + t*(x_i - a_i)
            subs[i] = (RationalPoly.constant(u.nvars, a[i] * (1 - t))
                       + RationalPoly.variable(u.nvars, i) * t)
        else:
            subs[i] = RationalPoly.variable(u.nvars, i)
    factor = t ** u.degree
    out = {}
    for b, p in u.coeffs.items():
        q = p.substitute(subs) * factor
        if q:
            out[b] = q
    return PolyForm._raw(u.n, u.degree, out, u.nvars)


def substitute_coeffs(u: PolyForm, subs, nvars_out: int) -> PolyForm:
    """Apply a coefficient-ring substitution to every blade coefficient."""
    out = {}
    for b, p in u.coeffs.items():
        q = p.substitute(subs)
        if q:
            out[b] = q
    return PolyForm._raw(u.n, u.degree, out, nvars_out)


# -- Q-space membership --------------------------------------------------------

class QSpaceSpec:
    """Per-blade partial-degree bounds for a space of polynomial l-forms.

    A bound of -1 in every variable marks the zero space for that blade;
    a blade absent from ``bounds`` also means the zero space.
    """

    def __init__(self, n: int, degree: int, bounds: Mapping[Blade, Sequence[int]]):
        self.n = n
        self.degree = degree
        self.bounds: Dict[Blade, tuple] = {}
        for b, bd in bounds.items():
            b = check_blade(b, n)
            if len(b) != degree:
                raise DimensionError("bound blade has wrong degree")
            bd = tuple(int(v) for v in bd)
            if len(bd) != n:
                raise ValueError("need one degree bound per variable")
            if any(v < -1 for v in bd):
                raise ValueError("degree bounds must be >= -1")
            self.bounds[b] = bd

    def admits(self, blade: Blade, p: RationalPoly) -> bool:
        bd = self.bounds.get(tuple(blade))
        if bd is None:
            return p.is_zero()
        if any(v == -1 for v in bd):
            return p.is_zero()
        return all(p.partial_degree(i) <= bd[i] for i in range(self.n))

    def monomial_basis(self):
        """Yield (blade, alpha) spanning the space."""
        for b, bd in sorted(self.bounds.items()):
            if any(v == -1 for v in bd):
                continue
            for alpha in product(*(range(v + 1) for v in bd)):
                yield b, alpha

    def __repr__(self):
        return f"QSpaceSpec(n={self.n}, l={self.degree}, bounds={self.bounds})"


def qspace_membership(u: PolyForm, spec: QSpaceSpec) -> bool:
    """True iff every blade coefficient respects its partial-degree bounds."""
    if u.n != spec.n:
        raise DimensionError("dimension mismatch")
    if u.degree != spec.degree:
        return u.is_zero()
    for b, p in u.coeffs.items():
        if not spec.admits(b, p):
            return False
    return True


def q_complex_3d(p: int) -> list:
    """The tensor-product polynomial complex on R^3 for a given order p.

    Degrees per component: Lambda^0 = Q^{p,p,p}; Lambda^1 components drop
    one degree in their own direction; Lambda^2 components drop one degree
    in the two complementary directions; Lambda^3 = Q^{p-1,p-1,p-1}.
    """
    if p < 1:
        raise ValueError("order p must be >= 1")
    specs = [
        QSpaceSpec(3, 0, {(): (p, p, p)}),
        QSpaceSpec(3, 1, {
            (1,): (p - 1, p, p),
            (2,): (p, p - 1, p),
            (3,): (p, p, p - 1),
        }),
        QSpaceSpec(3, 2, {
            (2, 3): (p, p - 1, p - 1),
            (1, 3): (p - 1, p, p - 1),
            (1, 2): (p - 1, p - 1, p),
        }),
        QSpaceSpec(3, 3, {(1, 2, 3): (p - 1, p - 1, p - 1)}),
    ]
    return specs


# -- serialization -------------------------------------------------------------

def form_to_dict(u: PolyForm) -> dict:
    """JSON-ready dict: {n, l, terms:[{blade, monomials:[{alpha, num, den}]}]}."""
    terms = []
    for b in sorted(u.coeffs):
        p = u.coeffs[b]
        monos = [
            {"alpha": list(alpha), "num": c.numerator, "den": c.denominator}
            for alpha, c in sorted(p.terms.items())
        ]
        terms.append({"blade": list(b), "monomials": monos})
    return {"n": u.n, "l": u.degree, "terms": terms}


def form_from_dict(data: Mapping) -> PolyForm:
    n = int(data["n"])
    l = int(data["l"])
    coeffs: Dict[Blade, RationalPoly] = {}
    for term in data.get("terms", []):
        blade = tuple(int(i) for i in term["blade"])
        terms = {}
        for m in term["monomials"]:
            alpha = tuple(int(e) for e in m["alpha"])
            terms[alpha] = Fraction(int(m["num"]), int(m["den"]))
        coeffs[blade] = RationalPoly(n, terms)
    return PolyForm(n, l, coeffs)


def form_to_json(u: PolyForm) -> str:
    return json.dumps(form_to_dict(u), sort_keys=True)


def form_from_json(text: str) -> PolyForm:
    return form_from_dict(json.loads(text))
