"""Rectangular Herz-type norms with certified-lower-bound suprema.

Five norms are computed: the rectangular sup-average norm, its dyadic-shell
characterization, the ball-average norm, the centered oscillation norms
(against the rectangle average and against the best constant), and the
classical annulus-weighted Herz norm.

Every supremum over uncountably many rectangles/radii is reported as a
certified lower bound over an explicit log-spaced candidate set, together
with a convergence heuristic (the objective must be nonincreasing across the
last two octaves along every axis).

Normalizer conventions: the rectangle average can divide the integral either
by the half-width product R_1...R_n (``literal``) or by the volume
2^n R_1...R_n (``volume``).  The two differ by the constant factor 2^(n/p);
``volume`` is the default used by every norm here.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from . import oracle
from .errors import BudgetExceeded, NeedsOracle
from .funcs import (
    FunctionSpec,
    IntegralResult,
    LinearCombo,
    Piece,
    Rect,
    _axis_pieces_integral_abs_p,
    _axis_pieces_integral_signed,
    _pieces_product_integral,
)

__all__ = [
    "NormParams",
    "HerzParams",
    "NormEstimate",
    "rect_avg_p",
    "bp_rect_norm",
    "bp_dyadic_norm",
    "dyadic_term",
    "bp_ball_norm",
    "ball_average",
    "cmo_norm",
    "cmo_star_norm",
    "herz_norm",
    "literal_from_volume",
    "estimate_to_obj",
]

_GRAM_MAX_TERMS = 160


@dataclass(frozen=True)
class NormParams:
    """Exponent, variant and truncation controls for the sup-norms."""

    p: float = 1.0
    variant: str = "inhomogeneous"  # half-widths >= 1; "homogeneous": > 0
    j_max: int = 6
    j_min: int = 20  # homogeneous truncation: smallest half-width 2^-j_min
    per_octave: int = 4
    normalizer: str = "volume"  # or "literal"
    quad_tol: float = 1e-9
    ball_tol: float = 1e-3
    budget: int = oracle.DEFAULT_BUDGET
    cmo_search_tol: float = 1e-10

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("p must be >= 1")
        if self.variant not in ("inhomogeneous", "homogeneous"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.normalizer not in ("volume", "literal"):
            raise ValueError(f"unknown normalizer {self.normalizer!r}")
        if self.j_max < 1:
            raise ValueError("j_max must be >= 1")

    def low_octave(self) -> int:
        return 0 if self.variant == "inhomogeneous" else -self.j_min


@dataclass(frozen=True)
class HerzParams:
    """Annulus weight exponent alpha, outer exponent q, shell truncation."""

    alpha: float
    q: float = math.inf
    k_max: int = 12

    def __post_init__(self):
        if not (self.q >= 1):
            raise ValueError("q must be >= 1 (math.inf allowed)")


@dataclass(frozen=True)
class NormEstimate:
    """A certified lower bound of a norm with its attaining parameter."""

    value: float
    attained_at: tuple | float | int | None
    converged: bool
    error_bound: float = 0.0
    note: str = ""


def estimate_to_obj(est: NormEstimate) -> dict:
    at = est.attained_at
    if isinstance(at, tuple):
        at = list(at)
    return {
        "value": est.value,
        "attained_at": at,
        "converged": est.converged,
        "error_bound": est.error_bound,
        "note": est.note,
    }


def literal_from_volume(value: float, n: int, p: float) -> float:
    """Convert a volume-normalized average norm to the literal half-width form."""
    return value * 2.0 ** (n / p)


def _normalizer(r: Rect, convention: str) -> float:
    return r.volume if convention == "volume" else r.normalizer_literal


# ---------------------------------------------------------------------------
# Cached integrals and candidate grids
# ---------------------------------------------------------------------------


@lru_cache(maxsize=200_000)
def _cached_integral(f: FunctionSpec, p: float, half_widths: tuple, tol: float,
                     budget: int) -> IntegralResult:
    return oracle.integral_with_fallback(f, p, Rect(half_widths), tol, budget)


def _candidates(params: NormParams, n: int) -> list[np.ndarray]:
    arr = oracle.log_spaced(params.low_octave(), params.j_max, params.per_octave)
    return [arr.copy() for _ in range(n)]


# ---------------------------------------------------------------------------
# Piecewise-constant field with prefix sums (exact, O(1) per candidate rect)
# ---------------------------------------------------------------------------


class _PwcField:
    def __init__(self, f: FunctionSpec, rmax: Rect, cuts: list[np.ndarray],
                 axes_cands: Sequence[np.ndarray]):
        self.f = f
        self.n = f.dim
        edges = []
        for h, c, cands in zip(rmax.half_widths, cuts, axes_cands):
            pts = np.concatenate([c, cands, -np.asarray(cands), [-h, h]])
            pts = pts[(pts >= -h) & (pts <= h)]
            edges.append(np.unique(pts))
        self.edges = edges
        centers = [0.5 * (e[1:] + e[:-1]) for e in edges]
        self.widths = [np.diff(e) for e in edges]
        mesh = np.meshgrid(*centers, indexing="ij")
        pts = np.stack([m.reshape(-1) for m in mesh], axis=-1)
        self.values = f.evaluate_batch(pts).reshape([len(c) for c in centers])
        self._mass_prefix: dict[float, np.ndarray] = {}
        self._signed_prefix: np.ndarray | None = None

    def _weighted(self, arr: np.ndarray) -> np.ndarray:
        out = arr
        for ax, w in enumerate(self.widths):
            shape = [1] * self.n
            shape[ax] = len(w)
            out = out * w.reshape(shape)
        return out

    @staticmethod
    def _prefix(arr: np.ndarray) -> np.ndarray:
        out = arr
        for ax in range(arr.ndim):
            out = np.cumsum(out, axis=ax)
        return np.pad(out, [(1, 0)] * arr.ndim)

    def _mass(self, p: float) -> np.ndarray:
        if p not in self._mass_prefix:
            self._mass_prefix[p] = self._prefix(self._weighted(np.abs(self.values) ** p))
        return self._mass_prefix[p]

    def _signed(self) -> np.ndarray:
        if self._signed_prefix is None:
            self._signed_prefix = self._prefix(self._weighted(self.values))
        return self._signed_prefix

    def indices(self, r: Rect) -> list[tuple[int, int]]:
        out = []
        for e, h in zip(self.edges, r.half_widths):
            lo = int(np.searchsorted(e, -h))
            hi = int(np.searchsorted(e, h))
            if not (e[lo] == -h and e[hi] == h):
                raise KeyError(f"rect half-width {h} not aligned with field edges")
            out.append((lo, hi))
        return out

    @staticmethod
    def _box_sum(prefix: np.ndarray, idx: list[tuple[int, int]]) -> float:
        total = 0.0
        for corner in itertools.product((0, 1), repeat=len(idx)):
            pos = tuple(idx[i][1] if c == 0 else idx[i][0] for i, c in enumerate(corner))
            total += (-1.0) ** sum(corner) * prefix[pos]
        return float(total)

    def abs_mass(self, r: Rect, p: float) -> float:
        return self._box_sum(self._mass(p), self.indices(r))

    def signed_sum(self, r: Rect) -> float:
        return self._box_sum(self._signed(), self.indices(r))

    def _slice(self, r: Rect):
        idx = self.indices(r)
        sl = tuple(slice(lo, hi) for lo, hi in idx)
        vals = self.values[sl]
        w = np.ones_like(vals)
        for ax, (lo, hi) in enumerate(idx):
            shape = [1] * self.n
            shape[ax] = hi - lo
            w = w * self.widths[ax][lo:hi].reshape(shape)
        return vals, w

    def dev_mass(self, r: Rect, a: float, p: float) -> float:
        vals, w = self._slice(r)
        return float(np.sum(np.abs(vals - a) ** p * w))

    def weighted_median(self, r: Rect) -> float:
        vals, w = self._slice(r)
        v = vals.reshape(-1)
        ww = w.reshape(-1)
        order = np.argsort(v, kind="stable")
        cum = np.cumsum(ww[order])
        k = int(np.searchsorted(cum, 0.5 * cum[-1]))
        return float(v[order][min(k, len(v) - 1)])

    def value_range(self, r: Rect) -> tuple[float, float]:
        vals, _ = self._slice(r)
        return float(vals.min()), float(vals.max())


# ---------------------------------------------------------------------------
# Tensor-product objective tables (exact per-axis 1D integrals)
# ---------------------------------------------------------------------------


def _tensor_terms(f: FunctionSpec, rmax: Rect):
    """Decompose f as sum_i c_i * tensor_i, or None."""
    if isinstance(f, LinearCombo):
        out = []
        for c, g in f.terms:
            fx = g.tensor_factors(rmax)
            if fx is None:
                return None
            out.append((c, fx))
        return out
    fx = f.tensor_factors(rmax)
    return None if fx is None else [(1.0, fx)]


class _TensorObjective:
    """Per-axis integral tables over the candidate grids.

    Supports: a single tensor term at any p with closed-form axis integrals;
    nonnegative combinations at p=1; arbitrary combinations at p=2 via the
    per-axis Gram matrices of the factors.
    """

    def __init__(self, terms, p: float, axes_cands: Sequence[np.ndarray]):
        self.p = p
        self.coefs = np.array([c for c, _ in terms])
        self.mode = None
        k = len(terms)
        if k == 1:
            self.mode = "single"
            self.tables = []
            for ax, cands in enumerate(axes_cands):
                tab = {}
                for R in cands:
                    tab[float(R)] = _axis_pieces_integral_abs_p(terms[0][1][ax], p, float(R))
                self.tables.append(tab)
        elif p == 1.0:
            self.mode = "p1"
            self.tables = []
            for ax, cands in enumerate(axes_cands):
                tab = {}
                for R in cands:
                    tab[float(R)] = np.array([
                        _axis_pieces_integral_signed(fx[ax], float(R)) for _, fx in terms
                    ])
                self.tables.append(tab)
        elif p == 2.0 and k <= _GRAM_MAX_TERMS:
            self.mode = "p2"
            self.tables = []
            for ax, cands in enumerate(axes_cands):
                tab = {}
                for R in cands:
                    G = np.empty((k, k))
                    for i in range(k):
                        for j in range(i, k):
                            v = _pieces_product_integral(terms[i][1][ax], terms[j][1][ax], float(R))
                            G[i, j] = G[j, i] = v
                    tab[float(R)] = G
                self.tables.append(tab)
        else:
            raise NeedsOracle("no tensor table route for this (terms, p)")

    def integral(self, r: Rect) -> float:
        if self.mode == "single":
            out = abs(self.coefs[0]) ** self.p
            for ax, h in enumerate(r.half_widths):
                out *= self.tables[ax][float(h)]
            return out
        if self.mode == "p1":
            prod = None
            for ax, h in enumerate(r.half_widths):
                col = self.tables[ax][float(h)]
                prod = col.copy() if prod is None else prod * col
            return float(np.dot(self.coefs, prod))
        G = None
        for ax, h in enumerate(r.half_widths):
            M = self.tables[ax][float(h)]
            G = M.copy() if G is None else G * M
        return float(self.coefs @ G @ self.coefs)


# ---------------------------------------------------------------------------
# Rectangle average and the sup norms
# ---------------------------------------------------------------------------


def rect_avg_p(f: FunctionSpec, p: float, r: Rect, normalizer: str = "literal",
               quad_tol: float = 1e-9, budget: int = oracle.DEFAULT_BUDGET) -> float:
    """Normalized L^p average of f over the rectangle r.

    The ``literal`` form divides the integral by R_1...R_n exactly as the
    norm definition is displayed; the ``volume`` form divides by |r|.
    """
    res = _cached_integral(f, p, r.half_widths, quad_tol, budget)
    return (max(res.value, 0.0) / _normalizer(r, normalizer)) ** (1.0 / p)


def _build_objective(f: FunctionSpec, params: NormParams,
                     axes_cands: Sequence[np.ndarray]):
    """Return (objective(rect) -> norm value, error_bound_fn, strategy name)."""
    p = params.p
    rmax = Rect(tuple(float(a[-1]) for a in axes_cands))
    cuts = f.pwc_cuts(rmax)
    if cuts is not None:
        field = _PwcField(f, rmax, cuts, axes_cands)

        def obj(r: Rect) -> float:
            return (field.abs_mass(r, p) / _normalizer(r, params.normalizer)) ** (1.0 / p)

        return obj, lambda: 0.0, "pwc"

    terms = _tensor_terms(f, rmax)
    if terms is not None:
        nonneg = all(c >= 0 and g.is_nonnegative() for c, g in
                     (f.terms if isinstance(f, LinearCombo) else [(1.0, f)]))
        if len(terms) == 1 or (p == 1.0 and nonneg) or p == 2.0:
            try:
                tables = _TensorObjective(terms, p, axes_cands)

                def obj(r: Rect) -> float:
                    return (max(tables.integral(r), 0.0)
                            / _normalizer(r, params.normalizer)) ** (1.0 / p)

                return obj, lambda: 0.0, "tensor"
            except NeedsOracle:
                pass

    bounds: list[float] = []

    def obj(r: Rect) -> float:
        res = _cached_integral(f, p, r.half_widths, params.quad_tol, params.budget)
        bounds.append(res.error_bound)
        return (max(res.value, 0.0) / _normalizer(r, params.normalizer)) ** (1.0 / p)

    return obj, lambda: max(bounds, default=0.0), "generic"


def bp_rect_norm(f: FunctionSpec, params: NormParams) -> NormEstimate:
    """Sup of normalized rectangle averages over the candidate grid."""
    axes = _candidates(params, f.dim)
    objective, bound_fn, strategy = _build_objective(f, params, axes)
    res = oracle.grid_sup_search(objective, axes, params.budget)
    note = f"strategy={strategy}; normalizer={params.normalizer}"
    if res.note:
        note += "; " + res.note
    return NormEstimate(res.value, res.argmax.half_widths, res.converged,
                        bound_fn(), note)


def _shell_bounds(j: int, low: int) -> tuple[float, float | None]:
    """(outer, inner) half-widths of the 1D dyadic shell at index j; inner is
    None at the lowest index, which contributes the full interval."""
    hi = 2.0 ** j
    lo = None if j == low else 2.0 ** (j - 1)
    return hi, lo


def dyadic_term(f: FunctionSpec, p: float, index: tuple[int, ...],
                params: NormParams) -> float:
    """The dyadic objective 2^(-(j_1+...+j_n)/p) * ||f restricted to the
    product shell||_p, with shell integrals by inclusion-exclusion over
    rectangles."""
    low = params.low_octave()
    bounds = [_shell_bounds(j, low) for j in index]
    subtract_axes = [i for i, (_, lo) in enumerate(bounds) if lo is not None]
    total = 0.0
    for subset in itertools.chain.from_iterable(
            itertools.combinations(subtract_axes, k) for k in range(len(subtract_axes) + 1)):
        hw = tuple(bounds[i][1] if i in subset else bounds[i][0] for i in range(len(index)))
        res = _cached_integral(f, p, hw, params.quad_tol, params.budget)
        total += (-1.0) ** len(subset) * res.value
    total = max(total, 0.0)
    return 2.0 ** (-sum(index) / p) * total ** (1.0 / p)


def bp_dyadic_norm(f: FunctionSpec, params: NormParams) -> NormEstimate:
    """Sup of the dyadic-shell objective over indices up to the truncation."""
    low = params.low_octave()
    n = f.dim
    ranges = [range(low, params.j_max + 1)] * n
    shape = tuple(params.j_max + 1 - low for _ in range(n))
    values = np.empty(shape)
    best, best_idx = -math.inf, None
    for idx in itertools.product(*ranges):
        v = dyadic_term(f, params.p, idx, params)
        pos = tuple(j - low for j in idx)
        values[pos] = v
        if v > best:
            best, best_idx = v, idx
    axes = [2.0 ** np.arange(low, params.j_max + 1)] * n
    converged, note = oracle._octave_convergence(values, axes)
    return NormEstimate(best, best_idx, converged, 0.0, note)


def ball_average(f: FunctionSpec, p: float, radius: float, tol: float = 1e-3,
                 budget: int = oracle.DEFAULT_BUDGET) -> tuple[float, float]:
    """Volume-normalized ball average (value, error bound on the value)."""
    n = f.dim
    vol = oracle.ball_volume(n, radius)
    if n == 1:
        res = oracle.integral_with_fallback(f, p, Rect((radius,)), tol * vol, budget)
        return (max(res.value, 0.0) / vol) ** (1.0 / p), res.error_bound / vol
    prev = None
    cells = 128
    while cells <= 8192:
        g = oracle.GridSpec((cells,) * n, Rect((radius,) * n))
        try:
            est = oracle.ball_integral(f, p, radius, g, budget)
        except BudgetExceeded:
            if prev is None:
                raise
            break
        val = (max(est.value, 0.0) / vol) ** (1.0 / p)
        if prev is not None and abs(val - prev) <= tol:
            return val, abs(val - prev)
        prev = val
        cells *= 2
    return prev, tol


def bp_ball_norm(f: FunctionSpec, p: float, params: NormParams | None = None) -> NormEstimate:
    """Sup of volume-normalized ball averages over log-spaced radii >= 1
    (or >= 2^-j_min for the homogeneous variant)."""
    params = params or NormParams(p=p)
    radii = oracle.log_spaced(params.low_octave(), params.j_max, params.per_octave)
    best, best_r, bound = -math.inf, None, 0.0
    values = np.empty(len(radii))
    for i, R in enumerate(radii):
        val, err = ball_average(f, p, float(R), params.ball_tol, params.budget)
        values[i] = val
        bound = max(bound, err)
        if val > best:
            best, best_r = val, float(R)
    converged, note = oracle._octave_convergence(values, [radii])
    return NormEstimate(best, best_r, converged, bound, note)


# ---------------------------------------------------------------------------
# Centered oscillation norms
# ---------------------------------------------------------------------------


def _dev_integral(f: FunctionSpec, a: float, p: float, r: Rect,
                  quad_tol: float, budget: int) -> float:
    """Integral of |f - a|^p over r, exact where a route exists."""
    if a == 0.0:
        return _cached_integral(f, p, r.half_widths, quad_tol, budget).value
    if p == 2.0:
        try:
            sq = f.rect_integral_abs_p(2.0, r, quad_tol).value
            mean = f.rect_integral_signed(r, quad_tol).value
            return sq - 2.0 * a * mean + a * a * r.volume
        except NeedsOracle:
            pass
    if p == 1.0 and f.dim == 1:
        factors = f.tensor_factors(r)
        if factors is not None:
            shifted = _shift_pieces(factors[0], a, r.half_widths[0])
            if shifted is not None:
                return _axis_pieces_integral_abs_p(shifted, 1.0, r.half_widths[0])
    fn = lambda pts: np.abs(f.evaluate_batch(pts) - a) ** p
    prev = None
    cells = 64
    for _ in range(7):
        g = oracle.GridSpec((cells,) * r.dim, r)
        if g.total_cells > budget:
            break
        val = oracle.riemann_integral_fn(fn, g, budget)
        if prev is not None and abs(val - prev) <= quad_tol * max(1.0, abs(val)):
            return val
        prev = val
        cells *= 2
    if prev is None:
        raise BudgetExceeded(64 ** r.dim, budget)
    return prev


def _shift_pieces(pieces: list[Piece], a: float, half: float) -> list[Piece] | None:
    """Pieces of x -> f(x) - a on [-half, half], gaps becoming constant -a."""
    out = []
    covered = [(-half, half)]
    for pc in pieces:
        if pc.poly is None:
            return None
        coeffs = list(pc.poly)
        coeffs[0] -= a
        out.append(Piece(pc.lo, pc.hi, poly=tuple(coeffs)))
    spans = sorted((pc.lo, pc.hi) for pc in pieces)
    cursor = -half
    for lo, hi in spans:
        if lo > cursor:
            out.append(Piece(cursor, lo, poly=(-a,)))
        cursor = max(cursor, hi)
    if cursor < half:
        out.append(Piece(cursor, half, poly=(-a,)))
    return out


def _ternary_min(fn: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    while hi - lo > tol:
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if fn(m1) <= fn(m2):
            hi = m2
        else:
            lo = m1
    return 0.5 * (lo + hi)


def _cmo_engine(f: FunctionSpec, params: NormParams, axes: Sequence[np.ndarray]):
    rmax = Rect(tuple(float(a[-1]) for a in axes))
    cuts = f.pwc_cuts(rmax)
    field = _PwcField(f, rmax, cuts, axes) if cuts is not None else None

    def mean_of(r: Rect) -> float:
        if field is not None:
            return field.signed_sum(r) / r.volume
        return f.rect_integral_signed(r, params.quad_tol).value / r.volume

    def dev_of(r: Rect, a: float) -> float:
        if field is not None:
            return field.dev_mass(r, a, params.p)
        return _dev_integral(f, a, params.p, r, params.quad_tol, params.budget)

    def range_of(r: Rect) -> tuple[float, float]:
        if field is not None:
            return field.value_range(r)
        return f.value_range(r)

    def median_of(r: Rect) -> float | None:
        return field.weighted_median(r) if field is not None else None

    return mean_of, dev_of, range_of, median_of


def cmo_norm(f: FunctionSpec, params: NormParams) -> NormEstimate:
    """Sup over rectangles of the p-oscillation around the rectangle average."""
    axes = _candidates(params, f.dim)
    mean_of, dev_of, _, _ = _cmo_engine(f, params, axes)

    def objective(r: Rect) -> float:
        a = mean_of(r)
        return (max(dev_of(r, a), 0.0) / _normalizer(r, params.normalizer)) ** (1.0 / params.p)

    res = oracle.grid_sup_search(objective, axes, params.budget)
    return NormEstimate(res.value, res.argmax.half_widths, res.converged, 0.0,
                        f"normalizer={params.normalizer}" + ("; " + res.note if res.note else ""))


def cmo_star_norm(f: FunctionSpec, params: NormParams) -> NormEstimate:
    """Sup over rectangles of the best-constant p-oscillation.

    The inner infimum is solved per rectangle: mean for p=2, a weighted median
    for p=1 on piecewise-constant specs, otherwise ternary search on the
    convex map a -> deviation.
    """
    axes = _candidates(params, f.dim)
    mean_of, dev_of, range_of, median_of = _cmo_engine(f, params, axes)
    p = params.p

    def objective(r: Rect) -> float:
        if p == 2.0:
            a = mean_of(r)
        elif p == 1.0 and median_of(r) is not None:
            a = median_of(r)
        else:
            lo, hi = range_of(r)
            if hi - lo <= params.cmo_search_tol:
                a = 0.5 * (lo + hi)
            else:
                a = _ternary_min(lambda t: dev_of(r, t), lo, hi, params.cmo_search_tol)
        return (max(dev_of(r, a), 0.0) / _normalizer(r, params.normalizer)) ** (1.0 / p)

    res = oracle.grid_sup_search(objective, axes, params.budget)
    return NormEstimate(res.value, res.argmax.half_widths, res.converged, 0.0,
                        f"normalizer={params.normalizer}" + ("; " + res.note if res.note else ""))


# ---------------------------------------------------------------------------
# Classical Herz norm on ball annuli
# ---------------------------------------------------------------------------


def _shell_mass(f: FunctionSpec, p: float, k: int, ball_tol: float, budget: int) -> tuple[float, float]:
    """Integral of |f|^p over the annulus B(2^k) \\ B(2^(k-1)) (ball B(1) at k=0)."""
    n = f.dim
    if n == 1:
        outer = _cached_integral(f, p, (2.0 ** k,), 1e-12, budget)
        if k == 0:
            return max(outer.value, 0.0), outer.error_bound
        inner = _cached_integral(f, p, (2.0 ** (k - 1),), 1e-12, budget)
        return max(outer.value - inner.value, 0.0), outer.error_bound + inner.error_bound
    tol = ball_tol * oracle.ball_volume(n, 2.0 ** k)
    outer = oracle.refine_ball_average(f, p, 2.0 ** k, tol, budget=budget)
    if k == 0:
        return max(outer.value, 0.0), outer.error_bound
    inner = oracle.refine_ball_average(f, p, 2.0 ** (k - 1), tol, budget=budget)
    return max(outer.value - inner.value, 0.0), outer.error_bound + inner.error_bound


def _support_note(f: FunctionSpec, p: float, hp: HerzParams) -> tuple[bool, str]:
    from .funcs import RadialPowerTail, support_box

    box = support_box(f)
    if box is not None:
        radius = math.sqrt(sum(b * b for b in box))
        k0 = max(0, math.ceil(math.log2(radius))) if radius > 0 else 0
        if k0 + 1 <= hp.k_max:
            return True, f"tail exact: support inside ball of radius {radius:.6g}"
    if isinstance(f, RadialPowerTail):
        ratio_log = f.dim * hp.alpha + (f.dim + f.exponent * p) / p
        if ratio_log < 0:
            return True, f"tail decays geometrically (log2 ratio {ratio_log:.3g})"
        return False, f"tail does not decay (log2 ratio {ratio_log:.3g})"
    return False, f"truncated at k_max={hp.k_max}"


def herz_norm(f: FunctionSpec, p: float, hp: HerzParams,
              ball_tol: float = 1e-3, budget: int = oracle.DEFAULT_BUDGET) -> NormEstimate:
    """Truncated Herz norm on dyadic ball annuli.

    q = inf takes the sup of 2^(nk*alpha) ||f restricted to shell k||_p over
    k <= k_max; finite q sums the q-th powers.
    """
    n = f.dim
    terms, bound = [], 0.0
    for k in range(hp.k_max + 1):
        mass, err = _shell_mass(f, p, k, ball_tol, budget)
        terms.append(2.0 ** (n * k * hp.alpha) * mass ** (1.0 / p))
        bound += err
    converged, note = _support_note(f, p, hp)
    if math.isinf(hp.q):
        arr = np.array(terms)
        k_best = int(arr.argmax())
        return NormEstimate(float(arr[k_best]), k_best, converged, bound, note)
    total = math.fsum(t ** hp.q for t in terms) ** (1.0 / hp.q)
    return NormEstimate(total, None, converged, bound, note)
