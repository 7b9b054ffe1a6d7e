"""Brute-force grid integration and sup search used to validate exact paths.

All routines are deterministic: midpoint rules on uniform grids, fixed
chunking, and first-candidate tie-breaking in argmax scans.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import BudgetExceeded, NeedsOracle
from .funcs import FunctionSpec, IntegralResult, Rect

__all__ = [
    "GridSpec",
    "OracleEstimate",
    "SupSearchResult",
    "riemann_integral",
    "ball_integral",
    "ball_volume",
    "grid_sup_search",
    "log_spaced",
    "refine_riemann",
    "refine_ball_average",
    "integral_with_fallback",
]

DEFAULT_BUDGET = 10 ** 8
_CHUNK_ROWS = 1 << 8  # rows of the leading axis per evaluation slab


@dataclass(frozen=True)
class GridSpec:
    """Uniform midpoint grid: cells per axis over a bounding rectangle."""

    cells: tuple[int, ...]
    rect: Rect

    def __post_init__(self):
        cells = tuple(int(c) for c in self.cells)
        object.__setattr__(self, "cells", cells)
        if len(cells) != self.rect.dim:
            raise ValueError("cells/rect dimension mismatch")
        if any(c < 2 for c in cells):
            raise ValueError("need at least 2 cells per axis")

    @property
    def total_cells(self) -> int:
        return math.prod(self.cells)

    def check_budget(self, budget: int) -> None:
        if self.total_cells > budget:
            raise BudgetExceeded(self.total_cells, budget)

    def centers(self) -> list[np.ndarray]:
        out = []
        for c, h in zip(self.cells, self.rect.half_widths):
            edges = np.linspace(-h, h, c + 1)
            out.append(0.5 * (edges[1:] + edges[:-1]))
        return out

    @property
    def cell_volume(self) -> float:
        return math.prod(2.0 * h / c for c, h in zip(self.cells, self.rect.half_widths))


@dataclass(frozen=True)
class OracleEstimate:
    value: float
    error_bound: float


def _sum_over_grid(g: GridSpec, integrand: Callable[[np.ndarray], np.ndarray]) -> float:
    """Chunked midpoint sum; integrand maps (N, n) points to (N,) values."""
    centers = g.centers()
    lead = centers[0]
    rest = centers[1:]
    partials = []
    for start in range(0, len(lead), _CHUNK_ROWS):
        block = lead[start:start + _CHUNK_ROWS]
        mesh = np.meshgrid(block, *rest, indexing="ij")
        pts = np.stack([m.reshape(-1) for m in mesh], axis=-1)
        partials.append(float(np.sum(integrand(pts))))
    return math.fsum(partials) * g.cell_volume


def riemann_integral(f: FunctionSpec, p: float, r: Rect, g: GridSpec,
                     budget: int = DEFAULT_BUDGET) -> float:
    """Midpoint-rule approximation of the integral of |f|^p over r.

    Exact when f is piecewise constant on cells aligned with g.
    """
    if g.rect != r:
        g = GridSpec(g.cells, r)
    g.check_budget(budget)
    return _sum_over_grid(g, lambda pts: np.abs(f.evaluate_batch(pts)) ** p)


def riemann_integral_fn(fn: Callable[[np.ndarray], np.ndarray], g: GridSpec,
                        budget: int = DEFAULT_BUDGET) -> float:
    """Midpoint sum of an arbitrary vectorized integrand over g's rectangle."""
    g.check_budget(budget)
    return _sum_over_grid(g, fn)


def ball_volume(n: int, radius: float) -> float:
    if n == 1:
        return 2.0 * radius
    if n == 2:
        return math.pi * radius ** 2
    if n == 3:
        return 4.0 * math.pi * radius ** 3 / 3.0
    raise ValueError("dimensions 1..3 only")


def ball_integral(f: FunctionSpec, p: float, radius: float, g: GridSpec,
                  budget: int = DEFAULT_BUDGET) -> OracleEstimate:
    """Midpoint sum of |f|^p over cells whose centers lie in the ball.

    The error estimate is the total volume of boundary-straddling cells times
    the largest sampled |f|^p on them.
    """
    n = f.dim
    cube = Rect(tuple(radius for _ in range(n)))
    if g.rect != cube:
        g = GridSpec(g.cells, cube)

    even = f.axes_even()
    fold = [c % 2 == 0 and ev for c, ev in zip(g.cells, even)]
    eff_cells = tuple(c // 2 if fl else c for c, fl in zip(g.cells, fold))
    if math.prod(eff_cells) > budget:
        raise BudgetExceeded(math.prod(eff_cells), budget)

    axes = []
    for c, h, fl in zip(g.cells, cube.half_widths, fold):
        edges = np.linspace(-h, h, c + 1)
        centers = 0.5 * (edges[1:] + edges[:-1])
        axes.append(centers[centers > 0] if fl else centers)
    mult = float(np.prod([2.0 if fl else 1.0 for fl in fold]))

    half_diag = 0.5 * math.sqrt(sum((2.0 * h / c) ** 2 for c, h in zip(g.cells, cube.half_widths)))
    vol = g.cell_volume

    lead, rest = axes[0], axes[1:]
    inner_parts, boundary_vol, boundary_max = [], 0.0, 0.0
    for start in range(0, len(lead), _CHUNK_ROWS):
        block = lead[start:start + _CHUNK_ROWS]
        mesh = np.meshgrid(block, *rest, indexing="ij")
        pts = np.stack([m.reshape(-1) for m in mesh], axis=-1)
        dist = np.sqrt(np.sum(pts * pts, axis=1))
        inside = dist <= radius
        straddle = np.abs(dist - radius) <= half_diag
        vals = np.abs(f.evaluate_batch(pts)) ** p
        inner_parts.append(float(np.sum(vals[inside])))
        boundary_vol += float(np.count_nonzero(straddle)) * vol
        if straddle.any():
            boundary_max = max(boundary_max, float(vals[straddle].max()))
    value = mult * math.fsum(inner_parts) * vol
    return OracleEstimate(value, mult * boundary_vol * boundary_max)


@dataclass(frozen=True)
class SupSearchResult:
    value: float
    argmax: Rect
    converged: bool
    note: str = ""


def log_spaced(lo_octave: int, hi_octave: int, per_octave: int = 4) -> np.ndarray:
    """Dyadic candidates 2^j plus (per_octave - 1) intermediate points per octave."""
    ms = np.arange(lo_octave * per_octave, hi_octave * per_octave + 1)
    return 2.0 ** (ms / per_octave)


def _octave_convergence(values: np.ndarray, axes: Sequence[np.ndarray]):
    """Check that the objective is nonincreasing across the top two octaves
    along every axis; report per-axis growth when it is not."""
    converged = True
    notes = []
    for ax, cand in enumerate(axes):
        if len(cand) < 2:
            continue
        # group candidates into octaves (2^(j-1), 2^j]
        oct_idx = np.ceil(np.log2(cand) - 1e-12).astype(int)
        top = oct_idx.max()
        if top == oct_idx.min():
            continue
        sel_top = oct_idx == top
        sel_prev = oct_idx == top - 1
        other = tuple(i for i in range(values.ndim) if i != ax)
        proj = values.max(axis=other) if other else values
        top_max = float(proj[sel_top].max())
        prev_max = float(proj[sel_prev].max())
        if top_max > prev_max * (1.0 + 1e-12) + 1e-300:
            converged = False
            ratio = top_max / prev_max if prev_max > 0 else math.inf
            notes.append(f"axis {ax}: top-octave max grew {ratio:.3g}x over previous octave")
    return converged, "; ".join(notes)


def grid_sup_search(objective: Callable[[Rect], float],
                    axes_candidates: Sequence[np.ndarray],
                    budget: int = DEFAULT_BUDGET) -> SupSearchResult:
    """Maximize objective over the candidate product grid.

    Returns a certified lower bound on the true sup: the best value over the
    explicit candidate set.  Ties resolve to the first candidate in
    lexicographic scan order.
    """
    axes = [np.asarray(a, float) for a in axes_candidates]
    total = math.prod(len(a) for a in axes)
    if total > budget:
        raise BudgetExceeded(total, budget)
    values = np.empty(tuple(len(a) for a in axes))
    best = -math.inf
    best_idx = None
    for idx in np.ndindex(values.shape):
        r = Rect(tuple(axes[i][j] for i, j in enumerate(idx)))
        v = float(objective(r))
        values[idx] = v
        if v > best:
            best, best_idx = v, idx
    converged, note = _octave_convergence(values, axes)
    arg = Rect(tuple(axes[i][j] for i, j in enumerate(best_idx)))
    return SupSearchResult(best, arg, converged, note)


def refine_riemann(f: FunctionSpec, p: float, r: Rect, tol: float,
                   start_cells: int = 32, max_doublings: int = 8,
                   budget: int = DEFAULT_BUDGET) -> IntegralResult:
    """Refine midpoint grids (doubling per axis) until two successive values
    agree within tol; returns the last value with the observed gap as bound."""
    prev = None
    cells = start_cells
    for _ in range(max_doublings + 1):
        g = GridSpec(tuple(cells for _ in range(r.dim)), r)
        if g.total_cells > budget:
            if prev is None:
                raise BudgetExceeded(g.total_cells, budget)
            break
        val = riemann_integral(f, p, r, g, budget)
        if prev is not None and abs(val - prev) <= tol:
            return IntegralResult(val, abs(val - prev), exact=False)
        prev = val
        cells *= 2
    return IntegralResult(prev, math.inf if prev is None else tol * 2 ** max_doublings,
                          exact=False)


def refine_ball_average(f: FunctionSpec, p: float, radius: float, tol: float,
                        start_cells: int = 128, max_doublings: int = 5,
                        budget: int = DEFAULT_BUDGET) -> OracleEstimate:
    """Ball integral refined until two successive grids agree within tol
    (absolute, on the integral scaled to the requested tolerance)."""
    n = f.dim
    prev = None
    cells = start_cells
    est = None
    for _ in range(max_doublings + 1):
        g = GridSpec(tuple(cells for _ in range(n)), Rect(tuple(radius for _ in range(n))))
        try:
            est = ball_integral(f, p, radius, g, budget)
        except BudgetExceeded:
            if prev is None:
                raise
            break
        if prev is not None and abs(est.value - prev) <= tol:
            return OracleEstimate(est.value, abs(est.value - prev))
        prev = est.value
        cells *= 2
    return OracleEstimate(prev, est.error_bound if est is not None else math.inf)


def integral_with_fallback(f: FunctionSpec, p: float, r: Rect, tol: float = 1e-9,
                           budget: int = DEFAULT_BUDGET) -> IntegralResult:
    """Exact integral when a closed form exists, else oracle grid refinement."""
    try:
        return f.rect_integral_abs_p(p, r, quad_tol=tol)
    except NeedsOracle:
        return refine_riemann(f, p, r, tol, budget=budget)
