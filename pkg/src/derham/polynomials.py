"""Sparse multivariate polynomials with exact rational coefficients.

Terms are stored as a dict mapping exponent tuples to ``Fraction``
coefficients; zero coefficients are never stored, so structural equality
of the dicts is exact polynomial equality.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

Scalar = Union[int, Fraction]

#: Guard against runaway growth during substitution / composition.
DEFAULT_DEGREE_CAP = 16


class DegreeCapExceeded(RuntimeError):
    """Raised when a polynomial operation would exceed the degree cap."""


def _coerce(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"expected exact rational coefficient, got {type(c).__name__}")


class RationalPoly:
    """A polynomial in ``nvars`` variables over the rationals.

    Immutable by convention: no method mutates ``self``; all arithmetic
    returns fresh instances.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[tuple, Scalar] | None = None):
        if nvars < 0:
            raise ValueError("nvars must be nonnegative")
        self.nvars = nvars
        clean: dict[tuple, Fraction] = {}
        if terms:
            for alpha, c in terms.items():
                alpha = tuple(int(e) for e in alpha)
                if len(alpha) != nvars:
                    raise ValueError(f"exponent {alpha} has wrong length for nvars={nvars}")
                if any(e < 0 for e in alpha):
                    raise ValueError(f"negative exponent in {alpha}")
                c = _coerce(c)
                if c:
                    clean[alpha] = clean.get(alpha, Fraction(0)) + c
                    if not clean[alpha]:
                        del clean[alpha]
        self.terms = clean

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "RationalPoly":
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, c) -> "RationalPoly":
        c = _coerce(c)
        if not c:
            return cls(nvars)
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "RationalPoly":
        if not 0 <= i < nvars:
            raise ValueError(f"variable index {i} out of range for nvars={nvars}")
        alpha = tuple(1 if j == i else 0 for j in range(nvars))
        return cls(nvars, {alpha: 1})

    @classmethod
    def monomial(cls, nvars: int, alpha: Sequence[int], c=1) -> "RationalPoly":
        return cls(nvars, {tuple(alpha): c})

    # -- predicates ------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if isinstance(other, RationalPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == RationalPoly.constant(self.nvars, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    # -- degrees ---------------------------------------------------------

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(a) for a in self.terms)

    def partial_degree(self, i: int) -> int:
        """Degree in variable ``i``; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(a[i] for a in self.terms)

    def partial_degrees(self) -> tuple:
        return tuple(self.partial_degree(i) for i in range(self.nvars))

    # -- ring operations -------------------------------------------------

    def __add__(self, other) -> "RationalPoly":
        other = self._wrap(other)
        if other is NotImplemented:
            return NotImplemented
        terms = dict(self.terms)
        for alpha, c in other.terms.items():
            s = terms.get(alpha, Fraction(0)) + c
            if s:
                terms[alpha] = s
            else:
                terms.pop(alpha, None)
        return self._raw(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self) -> "RationalPoly":
        return self._raw(self.nvars, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other) -> "RationalPoly":
        other = self._wrap(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "RationalPoly":
        return self._wrap(other) - self

    def __mul__(self, other) -> "RationalPoly":
        if isinstance(other, (int, Fraction)):
            c = _coerce(other)
            if not c:
                return RationalPoly(self.nvars)
            return self._raw(self.nvars, {a: k * c for a, k in self.terms.items()})
        if not isinstance(other, RationalPoly):
            return NotImplemented
        if other.nvars != self.nvars:
            raise ValueError("nvars mismatch in product")
        out: dict[tuple, Fraction] = {}
        for a1, c1 in self.terms.items():
            for a2, c2 in other.terms.items():
                a = tuple(e1 + e2 for e1, e2 in zip(a1, a2))
                s = out.get(a, Fraction(0)) + c1 * c2
                if s:
                    out[a] = s
                else:
                    del out[a]
        return self._raw(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, m: int) -> "RationalPoly":
        if not isinstance(m, int) or m < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = RationalPoly.constant(self.nvars, 1)
        base = self
        while m:
            if m & 1:
                result = result * base
            base = base * base if m > 1 else base
            m >>= 1
        return result

    def _wrap(self, other):
        if isinstance(other, RationalPoly):
            if other.nvars != self.nvars:
                raise ValueError("nvars mismatch")
            return other
        if isinstance(other, (int, Fraction)):
            return RationalPoly.constant(self.nvars, other)
        return NotImplemented

    @classmethod
    def _raw(cls, nvars: int, terms: dict) -> "RationalPoly":
        # internal fast path: terms already canonical
        p = cls.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        return p

    # -- calculus --------------------------------------------------------

    def diff(self, i: int) -> "RationalPoly":
        out: dict[tuple, Fraction] = {}
        for alpha, c in self.terms.items():
            e = alpha[i]
            if e == 0:
                continue
            beta = alpha[:i] + (e - 1,) + alpha[i + 1:]
            s = out.get(beta, Fraction(0)) + c * e
            if s:
                out[beta] = s
            else:
                del out[beta]
        return self._raw(self.nvars, out)

    def integrate_var(self, i: int) -> "RationalPoly":
        """Antiderivative in variable ``i`` (no constant)."""
        out = {}
        for alpha, c in self.terms.items():
            e = alpha[i]
            beta = alpha[:i] + (e + 1,) + alpha[i + 1:]
            out[beta] = c / (e + 1)
        return self._raw(self.nvars, out)

    def definite_integral_01(self, i: int) -> "RationalPoly":
        """Integrate variable ``i`` over [0,1]; the variable is kept (exponent 0)."""
        out: dict[tuple, Fraction] = {}
        for alpha, c in self.terms.items():
            beta = alpha[:i] + (0,) + alpha[i + 1:]
            s = out.get(beta, Fraction(0)) + c / (alpha[i] + 1)
            if s:
                out[beta] = s
            else:
                del out[beta]
        return self._raw(self.nvars, out)

    # -- substitution & evaluation ----------------------------------------

    def substitute(self, subs: Mapping[int, "RationalPoly"],
                   cap: int = DEFAULT_DEGREE_CAP) -> "RationalPoly":
        """Substitute polynomials for variables.

        ``subs`` maps variable index -> replacement polynomial (all sharing
        one ring, which becomes the ring of the result).  Unsubstituted
        variables must not appear in ``self``.  Powers of each replacement
        are memoized, which controls the intermediate blowup; results whose
        total degree would exceed ``cap`` raise ``DegreeCapExceeded``.
        """
        if not self.terms:
            target = next(iter(subs.values())).nvars if subs else self.nvars
            return RationalPoly(target)
        target = next(iter(subs.values())).nvars if subs else self.nvars
        max_deg = max(
            sum(a) * max((g.total_degree() for g in subs.values()), default=1)
            for a in self.terms
        )
        if max_deg > cap:
            raise DegreeCapExceeded(
                f"substitution would reach total degree {max_deg} > cap {cap}")
        powers: dict[int, list[RationalPoly]] = {
            i: [RationalPoly.constant(target, 1)] for i in subs
        }
        acc = RationalPoly(target)
        for alpha, c in self.terms.items():
            term = RationalPoly.constant(target, c)
            for i, e in enumerate(alpha):
                if e == 0:
                    continue
                if i not in subs:
                    raise ValueError(f"variable {i} appears but has no substitution")
                plist = powers[i]
                while len(plist) <= e:
                    plist.append(plist[-1] * subs[i])
                term = term * plist[e]
            acc = acc + term
        return acc

    def shift_vars(self, offset: int, new_nvars: int) -> "RationalPoly":
        """Re-embed into a ring with ``new_nvars`` variables at ``offset``."""
        if offset < 0 or offset + self.nvars > new_nvars:
            raise ValueError("shift out of range")
        out = {}
        for alpha, c in self.terms.items():
            beta = (0,) * offset + alpha + (0,) * (new_nvars - offset - self.nvars)
            out[beta] = c
        return self._raw(new_nvars, out)

    def eval_exact(self, point: Sequence) -> Fraction:
        point = [_coerce(p) for p in point]
        total = Fraction(0)
        for alpha, c in self.terms.items():
            v = c
            for x, e in zip(point, alpha):
                if e:
                    v *= x ** e
            total += v
        return total

    def eval_array(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at float points of shape (m, nvars); returns shape (m,)."""
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            points = points[None, :]
        m = points.shape[0]
        out = np.zeros(m)
        maxdeg = [self.partial_degree(i) for i in range(self.nvars)]
        # power tables per variable
        pows = []
        for i in range(self.nvars):
            d = max(maxdeg[i], 0)
            tbl = np.ones((d + 1, m))
            for e in range(1, d + 1):
                tbl[e] = tbl[e - 1] * points[:, i]
            pows.append(tbl)
        for alpha, c in self.terms.items():
            v = np.full(m, float(c))
            for i, e in enumerate(alpha):
                if e:
                    v = v * pows[i][e]
            out += v
        return out

    # -- misc --------------------------------------------------------------

    def map_coeffs(self, fn) -> "RationalPoly":
        out = {}
        for alpha, c in self.terms.items():
            v = _coerce(fn(c))
            if v:
                out[alpha] = v
        return self._raw(self.nvars, out)

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for alpha in sorted(self.terms, key=lambda a: (sum(a), a), reverse=True):
            c = self.terms[alpha]
            mono = "*".join(
                f"x{i}" if e == 1 else f"x{i}^{e}"
                for i, e in enumerate(alpha) if e
            )
            if mono:
                bits.append(f"{c}*{mono}" if c != 1 else mono)
            else:
                bits.append(str(c))
        return " + ".join(bits)
