"""Smoothing bumps: normalized compactly supported kernels with exact moments.

The reference family is the tensor-product bump

    theta(x) = prod_i c_k r^{-1} (1 - ((x_i - x0_i)/r)^2)_+^k

which is C^{k-1}, has exact rational moments, and a closed-form Fourier
transform built from half-integer Bessel functions.  A radial variant
(1 - |x - x0|^2/r^2)_+^k is provided for cross-checks; its normalization
involves pi so its moments are reported as floats.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Sequence, Tuple

import numpy as np
from scipy.special import spherical_jn

from .forms import PolyForm
from .polynomials import RationalPoly

#: Moments above this total order raise unless the cap is lifted.
DEFAULT_MOMENT_CAP = 16


@lru_cache(maxsize=None)
def bump_weight_integral(m: int, k: int) -> Fraction:
    """Exact value of int_{-1}^{1} t^m (1-t^2)^k dt."""
    if m % 2:
        return Fraction(0)
    total = Fraction(0)
    for j in range(k + 1):
        total += Fraction((-1) ** j * math.comb(k, j) * 2, m + 2 * j + 1)
    return total


@lru_cache(maxsize=None)
def bump_norm_1d(k: int) -> Fraction:
    """c_k = 1 / int_{-1}^1 (1-t^2)^k dt, so the 1D bump has unit mass."""
    return 1 / bump_weight_integral(0, k)


@lru_cache(maxsize=None)
def centered_unit_moment(m: int, k: int) -> Fraction:
    """mu_m = c_k int_{-1}^1 t^m (1-t^2)^k dt (centered bump, r = 1)."""
    return bump_norm_1d(k) * bump_weight_integral(m, k)


def cos_bump_transform(k: int, w: np.ndarray) -> np.ndarray:
    """I_k(w) = int_{-1}^{1} (1-t^2)^k cos(w t) dt, vectorized and stable.

    Equals k! 2^{k+1} j_k(w) / w^k with j_k the spherical Bessel function;
    a power series takes over for small |w| where the quotient cancels.
    """
    w = np.asarray(w, dtype=float)
    shape = w.shape
    aw = np.abs(w).ravel()
    out = np.empty_like(aw)
    small = aw <= 0.5
    if np.any(small):
        ws = aw[small]
        acc = np.zeros_like(ws)
        w2 = ws * ws
        powm = np.ones_like(ws)
        fact = 1.0
        for m in range(0, 24):
            if m > 0:
                powm = powm * w2
                fact *= (2 * m - 1) * (2 * m)
            beta = float(bump_weight_integral(2 * m, k))
            term = ((-1) ** m) * beta * powm / fact
            acc += term
            if np.all(np.abs(term) < 1e-18):
                break
        out[small] = acc
    big = ~small
    if np.any(big):
        wb = aw[big]
        out[big] = math.factorial(k) * 2.0 ** (k + 1) * spherical_jn(k, wb) / wb ** k
    out = out.reshape(shape)
    return out if shape else float(out)


def cos_bump_transform_deriv(k: int, w: np.ndarray) -> np.ndarray:
    """d/dw I_k(w) = -w I_{k+1}(w) / (2(k+1))."""
    w = np.asarray(w, dtype=float)
    return -w * cos_bump_transform(k + 1, w) / (2.0 * (k + 1))


class ThetaBump:
    """A normalized smoothing function with recorded support ball.

    kind "tensor": exact rational normalization and moments.
    kind "radial": closed-form float moments (gamma ratios), unit mass to
    floating precision; used only for cross-checks.
    """

    def __init__(self, n: int, center: Sequence, r, k: int, kind: str = "tensor",
                 moment_cap: int = DEFAULT_MOMENT_CAP):
        if kind not in ("tensor", "radial"):
            raise ValueError(f"unknown bump kind {kind!r}")
        if k < 1:
            raise ValueError("smoothness exponent k must be >= 1")
        r = Fraction(r)
        if r <= 0:
            raise ValueError("radius must be positive")
        center = tuple(Fraction(c) for c in center)
        if len(center) != n:
            raise ValueError("center needs n components")
        self.n = n
        self.kind = kind
        self.center = center
        self.r = r
        self.k = k
        self.moment_cap = moment_cap
        self._moments: Dict[tuple, Fraction] = {}
        self._axis_moments: Dict[Tuple[int, int], Fraction] = {}
        self._lock = threading.Lock()
        self._center_f = np.array([float(c) for c in center])
        self._r_f = float(r)

    # -- geometry -----------------------------------------------------------

    @property
    def support_radius(self) -> float:
        """Radius of the recorded support ball around the center."""
        if self.kind == "tensor":
            return self._r_f * math.sqrt(self.n)
        return self._r_f

    def support_box(self) -> tuple:
        """Axis-aligned bounding box of the support: (lows, highs)."""
        lo = self._center_f - self._r_f
        hi = self._center_f + self._r_f
        return lo, hi

    # -- normalization --------------------------------------------------------

    def normalization(self):
        """Unit-mass scaling constant: exact Fraction (tensor) or float (radial)."""
        if self.kind == "tensor":
            return (bump_norm_1d(self.k) / self.r) ** self.n
        # radial: 1 / (r^n * pi^{n/2} Gamma(k+1)/Gamma(k+1+n/2))
        vol = math.pi ** (self.n / 2) * math.gamma(self.k + 1) / math.gamma(self.k + 1 + self.n / 2)
        return 1.0 / (self._r_f ** self.n * vol)

    # -- moments ----------------------------------------------------------------

    def axis_moment(self, i: int, m: int) -> Fraction:
        """Exact int theta_i(s) s^m ds for the i-th 1D tensor factor."""
        key = (i, m)
        with self._lock:
            cached = self._axis_moments.get(key)
        if cached is not None:
            return cached
        x0, r, k = self.center[i], self.r, self.k
        total = Fraction(0)
        for j in range(m + 1):
            mu = centered_unit_moment(j, k)
            if mu:
                total += math.comb(m, j) * x0 ** (m - j) * r ** j * mu
        with self._lock:
            self._axis_moments[key] = total
        return total

    def moment(self, alpha: Sequence[int]):
        """M_alpha = int theta(a) a^alpha da.

        Exact Fraction for the tensor kind; float (gamma-ratio closed form)
        for the radial kind.  Orders above the cap raise RuntimeError.
        """
        alpha = tuple(int(e) for e in alpha)
        if len(alpha) != self.n:
            raise ValueError("multi-index needs n entries")
        if sum(alpha) > self.moment_cap:
            raise RuntimeError(
                f"moment order {sum(alpha)} exceeds cap {self.moment_cap}; "
                f"raise moment_cap on the bump to go higher")
        if self.kind == "radial":
            return self._radial_moment(alpha)
        with self._lock:
            cached = self._moments.get(alpha)
        if cached is not None:
            return cached
        total = Fraction(1)
        for i, m in enumerate(alpha):
            total *= self.axis_moment(i, m)
            if not total:
                break
        with self._lock:
            self._moments[alpha] = total
        return total

    def _radial_moment(self, alpha: tuple) -> float:
        # Dirichlet-type closed form for centered even moments; the shift
        # is handled by binomial expansion per axis via the multinomial
        # structure of (x0 + r y)^alpha over the unit-ball measure.
        def centered(beta: tuple) -> float:
            if any(b % 2 for b in beta):
                return 0.0
            num = math.prod(math.gamma((b + 1) / 2) for b in beta)
            num *= math.gamma(self.k + 1 + self.n / 2)
            den = math.gamma(1 / 2) ** self.n * math.gamma(self.k + 1 + (self.n + sum(beta)) / 2)
            return num / den

        total = 0.0
        ranges = [range(a + 1) for a in alpha]
        from itertools import product as iproduct
        for beta in iproduct(*ranges):
            w = math.prod(math.comb(a, b) for a, b in zip(alpha, beta))
            shift = math.prod(float(c) ** (a - b) for c, a, b in zip(self.center, alpha, beta))
            total += w * shift * (self._r_f ** sum(beta)) * centered(beta)
        return total

    def moment_table(self, max_order: int) -> Dict[tuple, Fraction]:
        """All moments with |alpha| <= max_order."""
        from itertools import product as iproduct
        table = {}
        for alpha in iproduct(*(range(max_order + 1) for _ in range(self.n))):
            if sum(alpha) <= max_order:
                table[alpha] = self.moment(alpha)
        return table

    # -- pointwise evaluation -----------------------------------------------------

    def eval(self, points: np.ndarray) -> np.ndarray:
        """theta at float points of shape (m, n); exact zero off the support."""
        points = np.asarray(points, dtype=float)
        single = points.ndim == 1
        if single:
            points = points[None, :]
        u = (points - self._center_f) / self._r_f
        if self.kind == "tensor":
            c = float(bump_norm_1d(self.k)) / self._r_f
            inside = np.abs(u) < 1.0
            vals = np.where(inside, (1.0 - u * u) ** self.k, 0.0)
            out = (c ** self.n) * np.prod(vals, axis=1)
            out[~inside.all(axis=1)] = 0.0
        else:
            q = np.sum(u * u, axis=1)
            out = np.where(q < 1.0, (1.0 - q) ** self.k, 0.0) * self.normalization()
        return out[0] if single else out

    # -- Fourier transform ---------------------------------------------------------

    def fourier(self, xi: np.ndarray) -> np.ndarray:
        """hat(theta)(xi) = int e^{-i<xi,x>} theta(x) dx, closed form (tensor only)."""
        if self.kind != "tensor":
            raise NotImplementedError("closed-form transform exists for the tensor kind only")
        xi = np.asarray(xi, dtype=float)
        single = xi.ndim == 1
        if single:
            xi = xi[None, :]
        ck = float(bump_norm_1d(self.k))
        out = np.ones(xi.shape[0], dtype=complex)
        for i in range(self.n):
            w = self._r_f * xi[:, i]
            phase = np.exp(-1j * xi[:, i] * float(self.center[i]))
            out = out * phase * (ck * cos_bump_transform(self.k, w))
        return out[0] if single else out

    def fourier_grad(self, xi: np.ndarray) -> np.ndarray:
        """All partials (d/dxi_j) hat(theta)(xi); shape (m, n) complex."""
        if self.kind != "tensor":
            raise NotImplementedError
        xi = np.asarray(xi, dtype=float)
        single = xi.ndim == 1
        if single:
            xi = xi[None, :]
        ck = float(bump_norm_1d(self.k))
        m = xi.shape[0]
        factors = np.empty((m, self.n), dtype=complex)
        dfactors = np.empty((m, self.n), dtype=complex)
        for i in range(self.n):
            w = self._r_f * xi[:, i]
            x0 = float(self.center[i])
            phase = np.exp(-1j * xi[:, i] * x0)
            base = ck * cos_bump_transform(self.k, w)
            dbase = ck * self._r_f * cos_bump_transform_deriv(self.k, w)
            factors[:, i] = phase * base
            dfactors[:, i] = phase * (dbase - 1j * x0 * base)
        out = np.empty((m, self.n), dtype=complex)
        for j in range(self.n):
            prod = np.ones(m, dtype=complex)
            for i in range(self.n):
                prod = prod * (dfactors[:, i] if i == j else factors[:, i])
            out[:, j] = prod
        return out[0] if single else out

    def __repr__(self):
        return (f"ThetaBump(kind={self.kind!r}, n={self.n}, center={self.center}, "
                f"r={self.r}, k={self.k})")


def make_tensor_bump(n: int, center: Sequence, r, k: int,
                     moment_cap: int = DEFAULT_MOMENT_CAP) -> ThetaBump:
    """Normalized tensor-product bump; C^{k-1}, unit mass, exact moments."""
    return ThetaBump(n, center, r, k, kind="tensor", moment_cap=moment_cap)


def make_radial_bump(n: int, center: Sequence, r, k: int) -> ThetaBump:
    """Radial bump (1-|x-x0|^2/r^2)_+^k for numeric cross-checks."""
    return ThetaBump(n, center, r, k, kind="radial")


def theta_pair(theta: ThetaBump, u: PolyForm):
    """(theta, u) = int theta(a) u(a) da for a 0-form u, via the moment table."""
    if u.degree != 0:
        raise ValueError("theta pairing is defined for 0-forms")
    if u.n != theta.n:
        raise ValueError("dimension mismatch")
    p = u.coeffs.get((), None)
    if p is None:
        return Fraction(0)
    if p.nvars != u.n:
        raise ValueError("pairing needs a pure spatial coefficient ring")
    total = Fraction(0) if theta.kind == "tensor" else 0.0
    for alpha, c in p.terms.items():
        total += c * theta.moment(alpha)
    return total


def bump_poly_1d(k: int) -> RationalPoly:
    """The unnormalized 1D bump (1-t^2)^k as an exact polynomial in one variable."""
    t = RationalPoly.variable(1, 0)
    one = RationalPoly.constant(1, 1)
    return (one - t * t) ** k
