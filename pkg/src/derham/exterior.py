"""Exact arithmetic in the exterior algebra of R^n.

Blades are tuples of strictly increasing indices in 1..n; an element of
degree l is a sparse map from blades to coefficients.  Coefficients may be
any commutative ring supporting +, -, *, bool (Fraction, float, complex,
RationalPoly); identity tests in the suite run over Fraction.

Sign conventions fixed here and tested exhaustively:
  * wedge computes the permutation sign by counted transpositions;
  * the Hodge star satisfies b ^ star(b) = dx_1^...^dx_n for every blade b.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, Sequence, Tuple

#: Blades live in dimension <= MAX_DIMENSION unless explicitly overridden.
MAX_DIMENSION = 8

Blade = Tuple[int, ...]


class DimensionError(ValueError):
    """Contract violation: mismatched or out-of-range dimensions/degrees."""


def check_blade(indices: Sequence[int], n: int) -> Blade:
    b = tuple(int(i) for i in indices)
    if any(i < 1 or i > n for i in b):
        raise DimensionError(f"blade {b} has indices outside 1..{n}")
    if any(b[i] >= b[i + 1] for i in range(len(b) - 1)):
        raise DimensionError(f"blade {b} is not strictly increasing")
    return b


def all_blades(n: int, l: int) -> list:
    """All degree-l blades in dimension n (empty list if l outside 0..n)."""
    if l < 0 or l > n:
        return []
    return [tuple(c) for c in combinations(range(1, n + 1), l)]


def merge_sign(b1: Blade, b2: Blade):
    """Merge two increasing index tuples.

    Returns (sign, merged) where sign is the parity of the shuffle putting
    b1+b2 into increasing order, or (0, None) if they share an index.
    """
    if not b1:
        return 1, b2
    if not b2:
        return 1, b1
    i, j = 0, 0
    sign = 1
    out = []
    while i < len(b1) and j < len(b2):
        if b1[i] == b2[j]:
            return 0, None
        if b1[i] < b2[j]:
            out.append(b1[i])
            i += 1
        else:
            # b2[j] jumps over the remaining len(b1)-i factors of b1
            if (len(b1) - i) % 2:
                sign = -sign
            out.append(b2[j])
            j += 1
    out.extend(b1[i:])
    out.extend(b2[j:])
    return sign, tuple(out)


def complement_sign(b: Blade, n: int):
    """Return (sign, complement) with dx_b ^ dx_comp = sign * volume form."""
    comp = tuple(i for i in range(1, n + 1) if i not in b)
    sign, merged = merge_sign(b, comp)
    assert merged == tuple(range(1, n + 1))
    return sign, comp


class ExtElement:
    """Sparse element of Lambda^l over a generic scalar ring."""

    __slots__ = ("n", "degree", "coeffs")

    def __init__(self, n: int, degree: int, coeffs: Dict[Blade, object] | None = None,
                 max_dim: int = MAX_DIMENSION):
        if n < 1 or n > max_dim:
            raise DimensionError(f"dimension {n} outside 1..{max_dim}")
        self.n = n
        self.degree = degree
        clean: Dict[Blade, object] = {}
        if coeffs and 0 <= degree <= n:
            for b, c in coeffs.items():
                b = check_blade(b, n)
                if len(b) != degree:
                    raise DimensionError(f"blade {b} has degree {len(b)}, expected {degree}")
                if c:
                    clean[b] = c
        self.coeffs = clean

    @classmethod
    def zero(cls, n: int, degree: int) -> "ExtElement":
        return cls(n, degree)

    @classmethod
    def scalar(cls, n: int, c) -> "ExtElement":
        return cls(n, 0, {(): c})

    @classmethod
    def vector(cls, n: int, components: Sequence) -> "ExtElement":
        if len(components) != n:
            raise DimensionError("vector needs n components")
        return cls(n, 1, {(i + 1,): c for i, c in enumerate(components)})

    def __bool__(self):
        return bool(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, ExtElement):
            return NotImplemented
        return (self.n == other.n and self.degree == other.degree
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.n, self.degree, frozenset(self.coeffs.items())))

    def __add__(self, other: "ExtElement") -> "ExtElement":
        self._check_same(other)
        out = dict(self.coeffs)
        for b, c in other.coeffs.items():
            s = out.get(b)
            s = c if s is None else s + c
            if s:
                out[b] = s
            else:
                out.pop(b, None)
        return self._raw(self.n, self.degree, out)

    def __neg__(self):
        return self._raw(self.n, self.degree, {b: -c for b, c in self.coeffs.items()})

    def __sub__(self, other: "ExtElement") -> "ExtElement":
        return self + (-other)

    def scale(self, c) -> "ExtElement":
        if not c:
            return ExtElement(self.n, self.degree)
        return self._raw(self.n, self.degree,
                         {b: v * c for b, v in self.coeffs.items() if v * c})

    __mul__ = scale
    __rmul__ = scale

    def _check_same(self, other, same_degree=True):
        if not isinstance(other, ExtElement) or other.n != self.n:
            raise DimensionError("dimension mismatch")
        if same_degree and other.degree != self.degree:
            raise DimensionError(
                f"degree mismatch: {self.degree} vs {other.degree}")

    @classmethod
    def _raw(cls, n, degree, coeffs):
        el = cls.__new__(cls)
        el.n = n
        el.degree = degree
        el.coeffs = coeffs
        return el

    def __repr__(self):
        if not self.coeffs:
            return f"0 (Lambda^{self.degree}, n={self.n})"
        bits = []
        for b in sorted(self.coeffs):
            name = "^".join(f"dx{i}" for i in b) if b else "1"
            bits.append(f"({self.coeffs[b]})*{name}")
        return " + ".join(bits)


def wedge(u: ExtElement, v: ExtElement) -> ExtElement:
    """Exterior product; result degree deg(u)+deg(v) (zero beyond n)."""
    if u.n != v.n:
        raise DimensionError("dimension mismatch in wedge")
    deg = u.degree + v.degree
    if deg > u.n:
        return ExtElement(u.n, deg)  # Lambda^{deg} = {0} beyond top degree
    out: Dict[Blade, object] = {}
    for b1, c1 in u.coeffs.items():
        for b2, c2 in v.coeffs.items():
            sign, merged = merge_sign(b1, b2)
            if sign == 0:
                continue
            c = c1 * c2
            if sign < 0:
                c = -c
            s = out.get(merged)
            s = c if s is None else s + c
            if s:
                out[merged] = s
            else:
                del out[merged]
    return ExtElement._raw(u.n, deg, out)


def contract_blade(a_coeffs: Dict[Blade, object], blade: Blade):
    """Expand a ⌟ dx_blade: yields (coefficient, sub-blade) pairs.

    a_coeffs maps 1-blades (j,) to the j-th component of a.
    """
    for k, j in enumerate(blade):
        aj = a_coeffs.get((j,))
        if not aj:
            continue
        sub = blade[:k] + blade[k + 1:]
        yield (aj if k % 2 == 0 else -aj), sub


def contract(a: ExtElement, u: ExtElement) -> ExtElement:
    """Interior product a ⌟ u for a vector (degree-1 element) a."""
    if a.n != u.n:
        raise DimensionError("dimension mismatch in contraction")
    if a.degree != 1:
        raise DimensionError("contraction requires a degree-1 first argument")
    if u.degree == 0:
        return ExtElement(u.n, -1)  # Lambda^{-1} = {0}
    out: Dict[Blade, object] = {}
    for blade, c in u.coeffs.items():
        for factor, sub in contract_blade(a.coeffs, blade):
            v = factor * c
            s = out.get(sub)
            s = v if s is None else s + v
            if s:
                out[sub] = s
            else:
                del out[sub]
    return ExtElement._raw(u.n, u.degree - 1, out)


def inner(u: ExtElement, v: ExtElement):
    """Euclidean inner product; the blades form an orthonormal set."""
    if u.n != v.n:
        raise DimensionError("dimension mismatch in inner product")
    if u.degree != v.degree:
        raise DimensionError("degree mismatch in inner product")
    total = None
    for b, c in u.coeffs.items():
        d = v.coeffs.get(b)
        if d is None:
            continue
        t = c * d
        total = t if total is None else total + t
    if total is None:
        return Fraction(0)
    return total


def hodge_star(u: ExtElement) -> ExtElement:
    """Hodge star, normalized by b ^ star(b) = dx_1^...^dx_n."""
    out: Dict[Blade, object] = {}
    for b, c in u.coeffs.items():
        sign, comp = complement_sign(b, u.n)
        out[comp] = c if sign > 0 else -c
    return ExtElement._raw(u.n, u.n - u.degree, out)


def hodge_star_inverse(u: ExtElement) -> ExtElement:
    """Inverse star: star^{-1} = (-1)^{l(n-l)} star on degree-l elements."""
    w = hodge_star(u)
    if (u.degree * (u.n - u.degree)) % 2:
        return -w
    return w


def star_blade(b: Blade, n: int):
    """(sign, complement) of the Hodge star on a single blade."""
    return complement_sign(b, n)
