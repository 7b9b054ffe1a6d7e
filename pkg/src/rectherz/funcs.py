"""Test-function corpus: pointwise evaluation and exact rectangle integrals.

Every function variant is a frozen dataclass with a closed-form pointwise
evaluator and, where tractable, a closed-form integral of |f|^p over
axis-aligned symmetric rectangles.  Variants that cannot integrate a given
(p, rectangle) combination exactly raise :class:`NeedsOracle` so callers can
fall back to the grid oracle.

Conventions:
  * points are arrays of shape (n,) or batches (N, n);
  * 1D pieces live on half-open intervals [lo, hi); values outside all
    pieces are 0;
  * the staircase cross uses the closed-right band convention: band k along
    an axis is {t : k-1 < |t| <= k} with band 1 extending down to 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import numpy.polynomial.polynomial as npoly

from .errors import DimensionMismatch, NeedsOracle, NotIntegrable

__all__ = [
    "Rect",
    "rect",
    "IntegralResult",
    "FunctionSpec",
    "Constant",
    "TensorPiecewise1D",
    "Piece",
    "RadialPowerTail",
    "StaircaseCross",
    "IndicatorHalfSpace",
    "AxisScaled",
    "LinearCombo",
    "evaluate",
    "rect_integral_abs_p",
    "rect_integral_signed",
    "scaled",
    "support_box",
    "spec_to_obj",
    "spec_from_obj",
]

_ROOT_IMAG_TOL = 1e-9


@dataclass(frozen=True)
class Rect:
    """Axis-aligned symmetric rectangle given by half-widths (R_1, ..., R_n)."""

    half_widths: tuple[float, ...]

    def __post_init__(self):
        hw = tuple(float(h) for h in self.half_widths)
        object.__setattr__(self, "half_widths", hw)
        if not hw:
            raise ValueError("Rect needs at least one half-width")
        if any(not math.isfinite(h) or h <= 0 for h in hw):
            raise ValueError(f"half-widths must be positive and finite, got {hw}")

    @property
    def dim(self) -> int:
        return len(self.half_widths)

    @property
    def volume(self) -> float:
        return math.prod(2.0 * h for h in self.half_widths)

    @property
    def normalizer_literal(self) -> float:
        """Product R_1 * ... * R_n (the half-width normalizer)."""
        return math.prod(self.half_widths)

    def contains(self, other: "Rect") -> bool:
        return other.dim == self.dim and all(
            a <= b for a, b in zip(other.half_widths, self.half_widths)
        )


def rect(*half_widths: float) -> Rect:
    return Rect(tuple(half_widths))


@dataclass(frozen=True)
class IntegralResult:
    """Integral value with exactness flag and a certified absolute error bound."""

    value: float
    error_bound: float = 0.0
    exact: bool = True

    def __float__(self) -> float:
        return self.value


# ---------------------------------------------------------------------------
# 1D piece algebra (polynomials and powers of |x|)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Piece:
    """One 1D piece on [lo, hi): either a polynomial or c*|x|**a."""

    lo: float
    hi: float
    poly: tuple[float, ...] | None = None
    power: tuple[float, float] | None = None  # (coef, exponent)

    def __post_init__(self):
        if (self.poly is None) == (self.power is None):
            raise ValueError("piece needs exactly one of poly or power")
        if not self.lo < self.hi:
            raise ValueError(f"piece interval [{self.lo}, {self.hi}) is empty")
        if self.poly is not None:
            object.__setattr__(self, "poly", tuple(float(c) for c in self.poly))
        if self.power is not None:
            c, a = self.power
            object.__setattr__(self, "power", (float(c), float(a)))
            if a < 0 and self.lo < 0 < self.hi:
                raise ValueError("negative-exponent power piece must not contain 0")

    def eval(self, x: np.ndarray) -> np.ndarray:
        if self.poly is not None:
            return npoly.polyval(x, np.asarray(self.poly))
        c, a = self.power
        ax = np.abs(x)
        out = np.zeros_like(ax)
        mask = ax > 0
        out[mask] = c * ax[mask] ** a
        if a == 0:
            out[~mask] = c
        return out

    def is_constant(self) -> bool:
        return (self.poly is not None and len(self.poly) <= 1) or (
            self.power is not None and self.power[1] == 0.0
        )


def _real_roots_in(coeffs: Sequence[float], lo: float, hi: float) -> list[float]:
    c = np.trim_zeros(np.asarray(coeffs, float), "b")
    if c.size <= 1:
        return []
    roots = npoly.polyroots(c)
    out = []
    for r in roots:
        if abs(r.imag) <= _ROOT_IMAG_TOL * (1.0 + abs(r.real)):
            x = float(r.real)
            if lo < x < hi:
                out.append(x)
    return sorted(set(out))


def _monomial_of(coeffs: Sequence[float]) -> tuple[int, float] | None:
    """Return (degree, coef) when the polynomial has a single term, else None."""
    nz = [(k, c) for k, c in enumerate(coeffs) if c != 0.0]
    if not nz:
        return (0, 0.0)
    if len(nz) == 1:
        return nz[0]
    return None


def _abs_power_integral(s: float, lo: float, hi: float) -> float:
    """Integral of |x|**s over [lo, hi], splitting at 0; exact closed form."""
    if lo > hi:
        return 0.0
    if lo < 0 < hi:
        return _abs_power_integral(s, 0.0, -lo) + _abs_power_integral(s, 0.0, hi)
    a, b = sorted((abs(lo), abs(hi)))
    if a == b:
        return 0.0
    if s <= -1.0 and a == 0.0:
        raise NotIntegrable(f"|x|^{s} is not integrable at 0")
    if s == -1.0:
        return math.log(b / a)
    return (b ** (s + 1.0) - a ** (s + 1.0)) / (s + 1.0)


def _poly_abs_p_integral(coeffs: Sequence[float], p: float, lo: float, hi: float) -> float:
    """Exact integral of |q(x)|^p over [lo, hi]; raises NeedsOracle when p is
    not an integer and q is not a monomial."""
    if lo >= hi:
        return 0.0
    mono = _monomial_of(coeffs)
    if p == int(p):
        ip = int(p)
        cuts = [lo] + _real_roots_in(coeffs, lo, hi) + [hi]
        qp = npoly.polypow(np.asarray(coeffs, float), ip)
        anti = npoly.polyint(qp)
        total = 0.0
        for a, b in zip(cuts[:-1], cuts[1:]):
            mid = float(npoly.polyval(0.5 * (a + b), np.asarray(coeffs, float)))
            sgn = 1.0 if mid >= 0 else -1.0
            seg = npoly.polyval(b, anti) - npoly.polyval(a, anti)
            total += (sgn ** ip) * seg
        return float(total)
    if mono is not None:
        k, c = mono
        if c == 0.0:
            return 0.0
        return abs(c) ** p * _abs_power_integral(k * p, lo, hi)
    raise NeedsOracle(f"|poly|^{p} with non-integer exponent has no closed form")


def _piece_abs_p_integral(piece: Piece, p: float, lo: float, hi: float) -> float:
    a, b = max(lo, piece.lo), min(hi, piece.hi)
    if a >= b:
        return 0.0
    if piece.poly is not None:
        return _poly_abs_p_integral(piece.poly, p, a, b)
    c, ex = piece.power
    return abs(c) ** p * _abs_power_integral(ex * p, a, b)


def _piece_signed_integral(piece: Piece, lo: float, hi: float) -> float:
    a, b = max(lo, piece.lo), min(hi, piece.hi)
    if a >= b:
        return 0.0
    if piece.poly is not None:
        anti = npoly.polyint(np.asarray(piece.poly, float))
        return float(npoly.polyval(b, anti) - npoly.polyval(a, anti))
    c, ex = piece.power
    return c * _abs_power_integral(ex, a, b)


def _poly_range_on(coeffs: Sequence[float], lo: float, hi: float) -> tuple[float, float]:
    c = np.asarray(coeffs, float)
    xs = [lo, hi]
    if c.size > 1:
        xs += _real_roots_in(npoly.polyder(c), lo, hi)
    vals = [float(npoly.polyval(x, c)) for x in xs]
    return min(vals), max(vals)


def _piece_range_on(piece: Piece, lo: float, hi: float) -> tuple[float, float]:
    a, b = max(lo, piece.lo), min(hi, piece.hi)
    if a >= b:
        return (0.0, 0.0)
    if piece.poly is not None:
        return _poly_range_on(piece.poly, a, b)
    c, ex = piece.power
    lo_a, hi_a = sorted((abs(a), abs(b)))
    if a < 0 < b:
        lo_a = 0.0
    if ex >= 0:
        ends = (c * lo_a ** ex, c * hi_a ** ex)
    else:
        # lo_a > 0 is guaranteed by the Piece validator
        ends = (c * lo_a ** ex, c * hi_a ** ex)
    return (min(ends), max(ends))


def _axis_pieces_integral_abs_p(pieces: Iterable[Piece], p: float, half: float) -> float:
    return math.fsum(_piece_abs_p_integral(pc, p, -half, half) for pc in pieces)


def _axis_pieces_integral_signed(pieces: Iterable[Piece], half: float) -> float:
    return math.fsum(_piece_signed_integral(pc, -half, half) for pc in pieces)


def _interval_product(r1: tuple[float, float], r2: tuple[float, float]) -> tuple[float, float]:
    cands = [r1[0] * r2[0], r1[0] * r2[1], r1[1] * r2[0], r1[1] * r2[1]]
    return (min(cands), max(cands))


# ---------------------------------------------------------------------------
# Function specs
# ---------------------------------------------------------------------------


class FunctionSpec:
    """Base class for closed-form test functions on R^n."""

    dim: int  # provided by each variant (field or property)

    # -- evaluation --------------------------------------------------------

    def evaluate(self, x: Sequence[float]) -> float:
        x = np.atleast_1d(np.asarray(x, float))
        if x.shape != (self.dim,):
            raise DimensionMismatch(f"point of dim {x.shape} for function of dim {self.dim}")
        return float(self._eval(x[None, :])[0])

    def evaluate_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, float)
        if X.ndim < 1 or X.shape[-1] != self.dim:
            raise DimensionMismatch(f"batch of shape {X.shape} for function of dim {self.dim}")
        flat = X.reshape(-1, self.dim)
        return self._eval(flat).reshape(X.shape[:-1])

    def _eval(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    # -- exact integration (raise NeedsOracle when unavailable) ------------

    def rect_integral_abs_p(self, p: float, r: Rect, quad_tol: float = 1e-10) -> IntegralResult:
        raise NeedsOracle(f"{type(self).__name__} has no exact |f|^p integral")

    def rect_integral_signed(self, r: Rect, quad_tol: float = 1e-10) -> IntegralResult:
        raise NeedsOracle(f"{type(self).__name__} has no exact signed integral")

    # -- structure hooks used by norm/operator machinery -------------------

    def is_nonnegative(self) -> bool | None:
        """True if provably f >= 0 everywhere, None when unknown."""
        return None

    def abs_bound_on_box(self, corner: Sequence[float]) -> float:
        """Certified sup of |f| over the box [-c_1,c_1] x ... x [-c_n,c_n]."""
        raise TailUnknown(type(self).__name__)

    def pwc_cuts(self, r: Rect) -> list[np.ndarray] | None:
        """Per-axis cut points strictly inside r when f is piecewise constant
        on the induced cell grid; None otherwise."""
        return None

    def tensor_factors(self, r: Rect) -> list[list[Piece]] | None:
        """Per-axis 1D pieces when f factors as a tensor product on r."""
        return None

    def axes_even(self) -> tuple[bool, ...]:
        return tuple(False for _ in range(self.dim))

    def value_range(self, r: Rect) -> tuple[float, float]:
        b = self.abs_bound_on_box(r.half_widths)
        return (-b, b)

    def _check_rect(self, r: Rect) -> None:
        if r.dim != self.dim:
            raise DimensionMismatch(f"rect of dim {r.dim} for function of dim {self.dim}")


class TailUnknown(NeedsOracle):
    pass


@dataclass(frozen=True)
class Constant(FunctionSpec):
    value: float
    dim: int = 1

    def _eval(self, X):
        return np.full(X.shape[0], float(self.value))

    def rect_integral_abs_p(self, p, r, quad_tol=1e-10):
        self._check_rect(r)
        return IntegralResult(abs(self.value) ** p * r.volume)

    def rect_integral_signed(self, r, quad_tol=1e-10):
        self._check_rect(r)
        return IntegralResult(self.value * r.volume)

    def is_nonnegative(self):
        return self.value >= 0

    def abs_bound_on_box(self, corner):
        return abs(self.value)

    def pwc_cuts(self, r):
        return [np.empty(0) for _ in range(self.dim)]

    def tensor_factors(self, r):
        H = max(r.half_widths)
        first = [Piece(-H - 1.0, H + 1.0, poly=(float(self.value),))]
        rest = [[Piece(-H - 1.0, H + 1.0, poly=(1.0,))] for _ in range(self.dim - 1)]
        return [first] + rest

    def axes_even(self):
        return tuple(True for _ in range(self.dim))

    def value_range(self, r):
        return (float(self.value), float(self.value))


@dataclass(frozen=True)
class TensorPiecewise1D(FunctionSpec):
    """Product f(x) = g_1(x_1) * ... * g_n(x_n) of 1D piecewise formulas."""

    axes: tuple[tuple[Piece, ...], ...]

    def __post_init__(self):
        axes = tuple(tuple(p for p in ax) for ax in self.axes)
        object.__setattr__(self, "axes", axes)
        for ax in axes:
            for a, b in zip(ax[:-1], ax[1:]):
                if a.hi > b.lo:
                    raise ValueError("pieces must be sorted and non-overlapping")

    @property
    def dim(self) -> int:
        return len(self.axes)

    def _axis_eval(self, i: int, x: np.ndarray) -> np.ndarray:
        out = np.zeros_like(x)
        for pc in self.axes[i]:
            mask = (x >= pc.lo) & (x < pc.hi)
            if mask.any():
                out[mask] = pc.eval(x[mask])
        return out

    def _eval(self, X):
        out = np.ones(X.shape[0])
        for i in range(self.dim):
            out *= self._axis_eval(i, X[:, i])
        return out

    def rect_integral_abs_p(self, p, r, quad_tol=1e-10):
        self._check_rect(r)
        total = 1.0
        for ax, h in zip(self.axes, r.half_widths):
            total *= _axis_pieces_integral_abs_p(ax, p, h)
        return IntegralResult(total)

    def rect_integral_signed(self, r, quad_tol=1e-10):
        self._check_rect(r)
        total = 1.0
        for ax, h in zip(self.axes, r.half_widths):
            total *= _axis_pieces_integral_signed(ax, h)
        return IntegralResult(total)

    def is_nonnegative(self):
        lo, hi = self._range_full()
        return True if lo >= 0 else None

    def _axis_range(self, i: int, half: float) -> tuple[float, float]:
        lo, hi = None, None
        covered_lo, covered_hi = half, -half
        for pc in self.axes[i]:
            a, b = _piece_range_on(pc, -half, half)
            lo = a if lo is None else min(lo, a)
            hi = b if hi is None else max(hi, b)
            covered_lo = min(covered_lo, max(pc.lo, -half))
            covered_hi = max(covered_hi, min(pc.hi, half))
        if lo is None:
            return (0.0, 0.0)
        if covered_lo > -half or covered_hi < half:
            lo, hi = min(lo, 0.0), max(hi, 0.0)
        return (lo, hi)

    def _range_full(self) -> tuple[float, float]:
        H = max(max(abs(pc.lo), abs(pc.hi)) for ax in self.axes for pc in ax)
        rng = self._axis_range(0, H)
        for i in range(1, self.dim):
            rng = _interval_product(rng, self._axis_range(i, H))
        return rng

    def abs_bound_on_box(self, corner):
        out = 1.0
        for i, c in enumerate(corner):
            lo, hi = self._axis_range(i, float(c))
            out *= max(abs(lo), abs(hi))
        return out

    def pwc_cuts(self, r):
        cuts = []
        for ax, h in zip(self.axes, r.half_widths):
            if not all(pc.is_constant() for pc in ax):
                return None
            pts = set()
            for pc in ax:
                for e in (pc.lo, pc.hi):
                    if -h < e < h:
                        pts.add(float(e))
            cuts.append(np.array(sorted(pts)))
        return cuts

    def tensor_factors(self, r):
        return [list(ax) for ax in self.axes]

    def axes_even(self):
        # conservative: an axis is even when its pieces mirror exactly
        flags = []
        for ax in self.axes:
            mirrored = {(-pc.hi, -pc.lo, pc.poly, pc.power) for pc in ax}
            direct = {(pc.lo, pc.hi, pc.poly, pc.power) for pc in ax}
            even = mirrored == direct and all(
                pc.power is not None or _is_even_poly(pc.poly) for pc in ax
            )
            flags.append(even)
        return tuple(flags)

    def value_range(self, r):
        rng = self._axis_range(0, r.half_widths[0])
        for i in range(1, self.dim):
            rng = _interval_product(rng, self._axis_range(i, r.half_widths[i]))
        return rng


def _is_even_poly(coeffs) -> bool:
    return coeffs is not None and all(c == 0 for c in coeffs[1::2])


@dataclass(frozen=True)
class RadialPowerTail(FunctionSpec):
    """f(x) = |x|^a for |x| > cutoff, 0 otherwise."""

    exponent: float
    dim: int = 1
    cutoff: float = 1.0

    def __post_init__(self):
        if self.cutoff <= 0:
            raise ValueError("cutoff must be positive")

    def _eval(self, X):
        rr = np.sqrt(np.sum(X * X, axis=1))
        out = np.zeros_like(rr)
        mask = rr > self.cutoff
        out[mask] = rr[mask] ** self.exponent
        return out

    def _radial_partial(self, s: float, rho: float) -> float:
        """Integral of r^s * r^(n-1) dr from cutoff to rho (0 when rho <= cutoff)."""
        if rho <= self.cutoff:
            return 0.0
        t = s + self.dim
        if t == 0.0:
            return math.log(rho / self.cutoff)
        return (rho ** t - self.cutoff ** t) / t

    def rect_integral_abs_p(self, p, r, quad_tol=1e-10):
        return self._rect_integral_pow(self.exponent * p, r, quad_tol)

    def rect_integral_signed(self, r, quad_tol=1e-10):
        return self._rect_integral_pow(self.exponent, r, quad_tol)

    def _rect_integral_pow(self, s: float, r: Rect, quad_tol: float) -> IntegralResult:
        self._check_rect(r)
        if self.dim == 1:
            R = r.half_widths[0]
            return IntegralResult(2.0 * self._radial_partial(s - 0.0, R) if R > self.cutoff else 0.0)
        from scipy import integrate as _si

        if self.dim == 2:
            R1, R2 = r.half_widths

            def profile(theta):
                rho = min(R1 / math.cos(theta) if math.cos(theta) > 0 else math.inf,
                          R2 / math.sin(theta) if math.sin(theta) > 0 else math.inf)
                return self._radial_partial(s, rho)

            split = math.atan2(R2, R1)
            val, err = _si.quad(profile, 0.0, 0.5 * math.pi, points=[split],
                                epsabs=quad_tol / 8.0, epsrel=1e-12, limit=200)
            return IntegralResult(4.0 * val, error_bound=4.0 * err, exact=False)

        R1, R2, R3 = r.half_widths

        def profile3(theta, phi):
            sp, cp = math.sin(phi), math.cos(phi)
            ct, st = math.cos(theta), math.sin(theta)
            rho = math.inf
            if sp * ct > 0:
                rho = min(rho, R1 / (sp * ct))
            if sp * st > 0:
                rho = min(rho, R2 / (sp * st))
            if cp > 0:
                rho = min(rho, R3 / cp)
            return self._radial_partial(s, rho) * sp

        val, err = _si.dblquad(profile3, 0.0, 0.5 * math.pi,
                               0.0, 0.5 * math.pi,
                               epsabs=quad_tol / 16.0, epsrel=1e-11)
        return IntegralResult(8.0 * val, error_bound=8.0 * err, exact=False)

    def is_nonnegative(self):
        return True

    def abs_bound_on_box(self, corner):
        if self.exponent < 0:
            return self.cutoff ** self.exponent
        rr = math.sqrt(sum(float(c) ** 2 for c in corner))
        return rr ** self.exponent if rr > self.cutoff else 0.0

    def axes_even(self):
        return tuple(True for _ in range(self.dim))

    def value_range(self, r):
        return (0.0, self.abs_bound_on_box(r.half_widths))


@dataclass(frozen=True)
class StaircaseCross(FunctionSpec):
    """Cross-supported staircase on R^2: value k^(1/p_root) on the k-th band.

    Band k along an axis is {t : k-1 < |t| <= k} (band 1 extends to 0); the
    function lives on the cross ([-1,1] x R) u (R x [-1,1]) and vanishes off
    it.  ``max_band`` truncates the staircase to a bounded-support variant.
    """

    p_root: float = 1.0
    max_band: int | None = None

    def __post_init__(self):
        if self.p_root < 1:
            raise ValueError("p_root must be >= 1")
        if self.max_band is not None and self.max_band < 1:
            raise ValueError("max_band must be >= 1")

    @property
    def dim(self) -> int:
        return 2

    def _eval(self, X):
        a1, a2 = np.abs(X[:, 0]), np.abs(X[:, 1])
        on_cross = (a1 <= 1.0) | (a2 <= 1.0)
        band = np.maximum(np.ceil(np.maximum(a1, a2)), 1.0)
        vals = band ** (1.0 / self.p_root)
        if self.max_band is not None:
            on_cross &= band <= self.max_band
        return np.where(on_cross, vals, 0.0)

    def _line_integral(self, half: float, vexp: float) -> float:
        """Integral over [-half, half] of band_value(t)^(p) with band value
        k^vexp, counting band overlaps exactly."""
        parts = [min(half, 1.0)]
        top = math.ceil(half)
        if self.max_band is not None:
            top = min(top, self.max_band)
        for k in range(2, top + 1):
            ov = min(half, float(k)) - (k - 1.0)
            if ov > 0:
                parts.append(ov * float(k) ** vexp)
        return 2.0 * math.fsum(parts)

    def _integral(self, vexp: float, r: Rect) -> float:
        R1, R2 = r.half_widths
        c1, c2 = min(R1, 1.0), min(R2, 1.0)
        arm_v = 2.0 * c1 * self._line_integral(R2, vexp)
        arm_h = 2.0 * c2 * self._line_integral(R1, vexp)
        center = 4.0 * c1 * c2
        return arm_v + arm_h - center

    def rect_integral_abs_p(self, p, r, quad_tol=1e-10):
        self._check_rect(r)
        return IntegralResult(self._integral(p / self.p_root, r))

    def rect_integral_signed(self, r, quad_tol=1e-10):
        self._check_rect(r)
        return IntegralResult(self._integral(1.0 / self.p_root, r))

    def is_nonnegative(self):
        return True

    def abs_bound_on_box(self, corner):
        k = max(1, math.ceil(max(float(c) for c in corner)))
        if self.max_band is not None:
            k = min(k, self.max_band)
        return float(k) ** (1.0 / self.p_root)

    def pwc_cuts(self, r):
        cuts = []
        for h in r.half_widths:
            ks = np.arange(1.0, math.ceil(h))
            ks = ks[ks < h]
            cuts.append(np.concatenate([-ks[::-1], ks]))
        return cuts

    def axes_even(self):
        return (True, True)

    def value_range(self, r):
        return (0.0, self.abs_bound_on_box(r.half_widths))


@dataclass(frozen=True)
class IndicatorHalfSpace(FunctionSpec):
    """Indicator of the half-space {x_axis > 0}."""

    axis: int = 0
    dim: int = 1

    def __post_init__(self):
        if not 0 <= self.axis < self.dim:
            raise ValueError(f"axis {self.axis} out of range for dim {self.dim}")

    def _eval(self, X):
        return (X[:, self.axis] > 0.0).astype(float)

    def rect_integral_abs_p(self, p, r, quad_tol=1e-10):
        self._check_rect(r)
        return IntegralResult(0.5 * r.volume)

    def rect_integral_signed(self, r, quad_tol=1e-10):
        return self.rect_integral_abs_p(1.0, r)

    def is_nonnegative(self):
        return True

    def abs_bound_on_box(self, corner):
        return 1.0

    def pwc_cuts(self, r):
        cuts = [np.empty(0) for _ in range(self.dim)]
        cuts[self.axis] = np.array([0.0])
        return cuts

    def tensor_factors(self, r):
        H = max(r.half_widths)
        full = [Piece(-H - 1.0, H + 1.0, poly=(1.0,))]
        half = [Piece(0.0, H + 1.0, poly=(1.0,))]
        return [half if i == self.axis else list(full) for i in range(self.dim)]

    def axes_even(self):
        return tuple(i != self.axis for i in range(self.dim))

    def value_range(self, r):
        return (0.0, 1.0)


@dataclass(frozen=True)
class AxisScaled(FunctionSpec):
    """f(x) = inner(t_1 x_1, ..., t_n x_n) with per-axis scales t in (0, 1]."""

    inner: FunctionSpec
    scales: tuple[float, ...]

    def __post_init__(self):
        sc = tuple(float(t) for t in self.scales)
        object.__setattr__(self, "scales", sc)
        if len(sc) != self.inner.dim:
            raise DimensionMismatch("scales length must match inner dimension")
        if any(not 0 < t <= 1 for t in sc):
            raise ValueError("scales must lie in (0, 1]")

    @property
    def dim(self) -> int:
        return self.inner.dim

    def _eval(self, X):
        return self.inner._eval(X * np.asarray(self.scales))

    def _scaled_rect(self, r: Rect) -> Rect:
        return Rect(tuple(t * h for t, h in zip(self.scales, r.half_widths)))

    def _jac(self) -> float:
        return math.prod(self.scales)

    def rect_integral_abs_p(self, p, r, quad_tol=1e-10):
        self._check_rect(r)
        inner = self.inner.rect_integral_abs_p(p, self._scaled_rect(r), quad_tol)
        j = self._jac()
        return IntegralResult(inner.value / j, inner.error_bound / j, inner.exact)

    def rect_integral_signed(self, r, quad_tol=1e-10):
        self._check_rect(r)
        inner = self.inner.rect_integral_signed(self._scaled_rect(r), quad_tol)
        j = self._jac()
        return IntegralResult(inner.value / j, inner.error_bound / j, inner.exact)

    def is_nonnegative(self):
        return self.inner.is_nonnegative()

    def abs_bound_on_box(self, corner):
        return self.inner.abs_bound_on_box([t * abs(float(c)) for t, c in zip(self.scales, corner)])

    def pwc_cuts(self, r):
        inner = self.inner.pwc_cuts(self._scaled_rect(r))
        if inner is None:
            return None
        return [c / t for c, t in zip(inner, self.scales)]

    def tensor_factors(self, r):
        inner = self.inner.tensor_factors(self._scaled_rect(r))
        if inner is None:
            return None
        return [[_scale_piece(pc, t) for pc in ax] for ax, t in zip(inner, self.scales)]

    def axes_even(self):
        return self.inner.axes_even()

    def value_range(self, r):
        return self.inner.value_range(self._scaled_rect(r))


def _scale_piece(piece: Piece, t: float) -> Piece:
    """Piece for x -> piece(t*x)."""
    if piece.poly is not None:
        coeffs = tuple(c * t ** k for k, c in enumerate(piece.poly))
        return Piece(piece.lo / t, piece.hi / t, poly=coeffs)
    c, a = piece.power
    return Piece(piece.lo / t, piece.hi / t, power=(c * t ** a, a))


@dataclass(frozen=True)
class LinearCombo(FunctionSpec):
    """Finite linear combination sum_i c_i f_i with matching dimensions."""

    terms: tuple[tuple[float, FunctionSpec], ...]

    def __post_init__(self):
        terms = tuple((float(c), f) for c, f in self.terms)
        object.__setattr__(self, "terms", terms)
        if not terms:
            raise ValueError("LinearCombo needs at least one term")
        d = terms[0][1].dim
        if any(f.dim != d for _, f in terms):
            raise DimensionMismatch("all terms must share one dimension")

    @property
    def dim(self) -> int:
        return self.terms[0][1].dim

    def _eval(self, X):
        out = np.zeros(X.shape[0])
        for c, f in self.terms:
            out += c * f._eval(X)
        return out

    def rect_integral_signed(self, r, quad_tol=1e-10):
        self._check_rect(r)
        vals, errs, exact = [], [], True
        for c, f in self.terms:
            res = f.rect_integral_signed(r, quad_tol)
            vals.append(c * res.value)
            errs.append(abs(c) * res.error_bound)
            exact &= res.exact
        return IntegralResult(math.fsum(vals), math.fsum(errs), exact)

    def rect_integral_abs_p(self, p, r, quad_tol=1e-10):
        self._check_rect(r)
        if len(self.terms) == 1:
            c, f = self.terms[0]
            res = f.rect_integral_abs_p(p, r, quad_tol)
            s = abs(c) ** p
            return IntegralResult(s * res.value, s * res.error_bound, res.exact)
        cuts = self.pwc_cuts(r)
        if cuts is not None:
            return IntegralResult(_pwc_cell_integral_abs_p(self, p, r, cuts))
        if p == 1.0 and all(c >= 0 and f.is_nonnegative() for c, f in self.terms):
            vals, errs, exact = [], [], True
            for c, f in self.terms:
                res = f.rect_integral_abs_p(1.0, r, quad_tol)
                vals.append(c * res.value)
                errs.append(c * res.error_bound)
                exact &= res.exact
            return IntegralResult(math.fsum(vals), math.fsum(errs), exact)
        if p == 2.0:
            factors = [f.tensor_factors(r) for _, f in self.terms]
            if all(fx is not None for fx in factors):
                return IntegralResult(_gram_integral(self, factors, r))
        raise NeedsOracle("no exact route for |combo|^p on this rectangle")

    def is_nonnegative(self):
        if all(c >= 0 and f.is_nonnegative() for c, f in self.terms):
            return True
        return None

    def abs_bound_on_box(self, corner):
        return math.fsum(abs(c) * f.abs_bound_on_box(corner) for c, f in self.terms)

    def pwc_cuts(self, r):
        per_axis = [set() for _ in range(self.dim)]
        for _, f in self.terms:
            cuts = f.pwc_cuts(r)
            if cuts is None:
                return None
            for i, c in enumerate(cuts):
                per_axis[i].update(float(v) for v in c)
        return [np.array(sorted(s)) for s in per_axis]

    def axes_even(self):
        flags = [f.axes_even() for _, f in self.terms]
        return tuple(all(fl[i] for fl in flags) for i in range(self.dim))

    def value_range(self, r):
        cuts = self.pwc_cuts(r)
        if cuts is not None:
            vals = _pwc_cell_values(self, r, cuts)[0]
            return (float(vals.min()), float(vals.max()))
        lo = hi = 0.0
        for c, f in self.terms:
            a, b = f.value_range(r)
            a, b = sorted((c * a, c * b))
            lo, hi = lo + a, hi + b
        return (lo, hi)


# ---------------------------------------------------------------------------
# Piecewise-constant cell machinery and tensor Gram products
# ---------------------------------------------------------------------------


def _cell_edges(r: Rect, cuts: list[np.ndarray]) -> list[np.ndarray]:
    edges = []
    for h, c in zip(r.half_widths, cuts):
        inner = np.asarray(c, float)
        inner = inner[(inner > -h) & (inner < h)]
        edges.append(np.concatenate([[-h], np.unique(inner), [h]]))
    return edges


def _pwc_cell_values(f: FunctionSpec, r: Rect, cuts: list[np.ndarray]):
    edges = _cell_edges(r, cuts)
    centers = [0.5 * (e[1:] + e[:-1]) for e in edges]
    widths = [np.diff(e) for e in edges]
    mesh = np.meshgrid(*centers, indexing="ij")
    pts = np.stack([m.reshape(-1) for m in mesh], axis=-1)
    vals = f.evaluate_batch(pts).reshape([len(c) for c in centers])
    return vals, widths


def _pwc_cell_integral_abs_p(f: FunctionSpec, p: float, r: Rect, cuts: list[np.ndarray]) -> float:
    vals, widths = _pwc_cell_values(f, r, cuts)
    mass = np.abs(vals) ** p
    for ax, w in enumerate(widths):
        shape = [1] * len(widths)
        shape[ax] = len(w)
        mass = mass * w.reshape(shape)
    return float(np.sum(mass))


def _pieces_product_integral(pa: list[Piece], pb: list[Piece], half: float) -> float:
    """Exact integral over [-half, half] of (sum of pieces A)(sum of pieces B)."""
    total = []
    for a in pa:
        for b in pb:
            lo = max(a.lo, b.lo, -half)
            hi = min(a.hi, b.hi, half)
            if lo >= hi:
                continue
            total.append(_product_piece_integral(a, b, lo, hi))
    return math.fsum(total)


def _product_piece_integral(a: Piece, b: Piece, lo: float, hi: float) -> float:
    if a.poly is not None and b.poly is not None:
        prod = npoly.polymul(np.asarray(a.poly), np.asarray(b.poly))
        anti = npoly.polyint(prod)
        return float(npoly.polyval(hi, anti) - npoly.polyval(lo, anti))
    if a.power is not None and b.power is not None:
        (c1, e1), (c2, e2) = a.power, b.power
        return c1 * c2 * _abs_power_integral(e1 + e2, lo, hi)
    poly_pc, pow_pc = (a, b) if a.poly is not None else (b, a)
    c, e = pow_pc.power
    out = []
    for seg_lo, seg_hi in ((lo, min(hi, 0.0)), (max(lo, 0.0), hi)):
        if seg_lo >= seg_hi:
            continue
        neg = seg_hi <= 0.0
        for k, ck in enumerate(poly_pc.poly):
            if ck == 0.0:
                continue
            sgn = (-1.0) ** k if neg else 1.0
            out.append(sgn * ck * c * _abs_power_integral(e + k, seg_lo, seg_hi))
    return math.fsum(out)


def _gram_integral(combo: LinearCombo, factors: list[list[list[Piece]]], r: Rect) -> float:
    coefs = [c for c, _ in combo.terms]
    k = len(coefs)
    total = []
    for i in range(k):
        for j in range(k):
            prod = coefs[i] * coefs[j]
            for ax in range(combo.dim):
                prod *= _pieces_product_integral(factors[i][ax], factors[j][ax], r.half_widths[ax])
            total.append(prod)
    return math.fsum(total)


# ---------------------------------------------------------------------------
# Module-level operation wrappers
# ---------------------------------------------------------------------------


def evaluate(f: FunctionSpec, x: Sequence[float]) -> float:
    """Pointwise value of the spec at x."""
    return f.evaluate(x)


def rect_integral_abs_p(f: FunctionSpec, p: float, r: Rect, quad_tol: float = 1e-10) -> IntegralResult:
    """Integral of |f|^p over the symmetric rectangle r.

    Exact (closed form) for piecewise-constant and tensor-piecewise specs and
    their scalings/combinations; quadrature-backed with a reported error bound
    for radial power tails in dimension >= 2.  Raises :class:`NeedsOracle`
    for unsupported variant/exponent combinations.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    return f.rect_integral_abs_p(p, r, quad_tol)


def rect_integral_signed(f: FunctionSpec, r: Rect, quad_tol: float = 1e-10) -> IntegralResult:
    """Integral of f itself over r (used for rectangle averages)."""
    return f.rect_integral_signed(r, quad_tol)


def support_box(f: FunctionSpec) -> tuple[float, ...] | None:
    """Per-axis half-extents of a bounding box of the support, or None when
    the support is unbounded."""
    if isinstance(f, TensorPiecewise1D):
        return tuple(max(max(abs(pc.lo), abs(pc.hi)) for pc in ax) for ax in f.axes)
    if isinstance(f, StaircaseCross) and f.max_band is not None:
        return (float(f.max_band), float(f.max_band))
    if isinstance(f, AxisScaled):
        inner = support_box(f.inner)
        if inner is None:
            return None
        return tuple(b / t for b, t in zip(inner, f.scales))
    if isinstance(f, LinearCombo):
        boxes = [support_box(g) for _, g in f.terms]
        if any(b is None for b in boxes):
            return None
        return tuple(max(b[i] for b in boxes) for i in range(f.dim))
    if isinstance(f, Constant) and f.value == 0.0:
        return tuple(0.0 for _ in range(f.dim))
    return None


def scaled(f: FunctionSpec, scales: Sequence[float]) -> FunctionSpec:
    """f(t o x) with structure-preserving simplification where possible."""
    sc = tuple(float(t) for t in scales)
    if all(t == 1.0 for t in sc):
        return f
    if isinstance(f, Constant):
        return f
    if isinstance(f, IndicatorHalfSpace):
        return f
    if isinstance(f, TensorPiecewise1D):
        return TensorPiecewise1D(tuple(
            tuple(_scale_piece(pc, t) for pc in ax) for ax, t in zip(f.axes, sc)
        ))
    if isinstance(f, RadialPowerTail) and len(set(sc)) == 1:
        t = sc[0]
        return LinearCombo(((t ** f.exponent,
                             RadialPowerTail(f.exponent, f.dim, f.cutoff / t)),))
    if isinstance(f, LinearCombo):
        return LinearCombo(tuple((c, scaled(g, sc)) for c, g in f.terms))
    if isinstance(f, AxisScaled):
        merged = tuple(a * b for a, b in zip(f.scales, sc))
        return scaled(f.inner, merged)
    return AxisScaled(f, sc)


# ---------------------------------------------------------------------------
# JSON encoding
# ---------------------------------------------------------------------------


def _piece_to_obj(pc: Piece) -> dict:
    if pc.poly is not None:
        return {"lo": pc.lo, "hi": pc.hi, "poly": list(pc.poly)}
    c, a = pc.power
    return {"lo": pc.lo, "hi": pc.hi, "power": {"coef": c, "exponent": a}}


def _piece_from_obj(obj: dict) -> Piece:
    if "poly" in obj:
        return Piece(obj["lo"], obj["hi"], poly=tuple(obj["poly"]))
    pw = obj["power"]
    return Piece(obj["lo"], obj["hi"], power=(pw["coef"], pw["exponent"]))


def spec_to_obj(f: FunctionSpec) -> dict:
    """Canonical JSON-ready encoding (variant tag + numeric fields)."""
    if isinstance(f, Constant):
        return {"kind": "constant", "value": f.value, "dim": f.dim}
    if isinstance(f, TensorPiecewise1D):
        return {"kind": "tensor_piecewise",
                "axes": [[_piece_to_obj(pc) for pc in ax] for ax in f.axes]}
    if isinstance(f, RadialPowerTail):
        return {"kind": "radial_power_tail", "exponent": f.exponent,
                "dim": f.dim, "cutoff": f.cutoff}
    if isinstance(f, StaircaseCross):
        out = {"kind": "staircase_cross", "p_root": f.p_root}
        if f.max_band is not None:
            out["max_band"] = f.max_band
        return out
    if isinstance(f, IndicatorHalfSpace):
        return {"kind": "indicator_halfspace", "axis": f.axis, "dim": f.dim}
    if isinstance(f, AxisScaled):
        return {"kind": "axis_scaled", "inner": spec_to_obj(f.inner),
                "scales": list(f.scales)}
    if isinstance(f, LinearCombo):
        return {"kind": "linear_combo",
                "terms": [[c, spec_to_obj(g)] for c, g in f.terms]}
    raise TypeError(f"unknown spec type {type(f).__name__}")


def spec_from_obj(obj: dict) -> FunctionSpec:
    kind = obj.get("kind")
    if kind == "constant":
        return Constant(float(obj["value"]), int(obj["dim"]))
    if kind == "tensor_piecewise":
        return TensorPiecewise1D(tuple(
            tuple(_piece_from_obj(pc) for pc in ax) for ax in obj["axes"]
        ))
    if kind == "radial_power_tail":
        return RadialPowerTail(float(obj["exponent"]), int(obj["dim"]),
                               float(obj.get("cutoff", 1.0)))
    if kind == "staircase_cross":
        return StaircaseCross(float(obj["p_root"]), obj.get("max_band"))
    if kind == "indicator_halfspace":
        return IndicatorHalfSpace(int(obj["axis"]), int(obj["dim"]))
    if kind == "axis_scaled":
        return AxisScaled(spec_from_obj(obj["inner"]), tuple(obj["scales"]))
    if kind == "linear_combo":
        return LinearCombo(tuple((float(c), spec_from_obj(g)) for c, g in obj["terms"]))
    raise ValueError(f"unknown function kind {kind!r}")
