"""Hardy-type averaging operators: discrete, grid-discrete and continuous.

Each evaluator reports values with a certified error budget: series are
truncated using the weight's tail bound against a per-point sup bound on the
function, and quadrature error estimates are checked against the requested
tolerance.

``pushforward_*`` build closed-form function specs for the transformed
function where the structure allows it (finite weighted combinations of
axis-scaled copies for the discrete operators; eigenfunction cases for the
continuous one), so that norms of transformed functions can reuse the exact
integration paths.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy import integrate as _si

from .errors import DimensionMismatch, QuadratureError, TailBoundError
from .funcs import (
    AxisScaled,
    Constant,
    FunctionSpec,
    IndicatorHalfSpace,
    LinearCombo,
    RadialPowerTail,
    TensorPiecewise1D,
    scaled,
)
from .weights import ContinuousWeight, DiscreteWeight, GridWeight

__all__ = [
    "apply_discrete",
    "discrete_truncation",
    "apply_grid_discrete",
    "grid_truncation",
    "apply_continuous",
    "hardy_classic",
    "pushforward_discrete",
    "pushforward_grid",
    "pushforward_continuous",
    "global_abs_bound",
]

_HUGE = 1e18


def global_abs_bound(f: FunctionSpec) -> float:
    """Certified sup of |f| over all of R^n (may be inf for unbounded specs)."""
    try:
        b = f.abs_bound_on_box(tuple(_HUGE for _ in range(f.dim)))
    except Exception as exc:  # pragma: no cover - defensive
        raise TailBoundError(f"no global bound for {type(f).__name__}: {exc}")
    return float(b)


def _segment_bound(f: FunctionSpec, x: np.ndarray) -> float:
    """Sup of |f| over the contraction segment {t o x : t in (0,1]^n}."""
    return float(f.abs_bound_on_box(tuple(abs(float(v)) for v in x)))


def _check_point(f: FunctionSpec, x) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, float))
    if x.shape != (f.dim,):
        raise DimensionMismatch(f"point {x.shape} for operator on dim {f.dim}")
    return x


def discrete_truncation(f: FunctionSpec, w: DiscreteWeight, x, tol: float) -> tuple[int, float]:
    """Truncation index K and the certified tail bound for the series at x."""
    x = _check_point(f, x)
    bound = _segment_bound(f, x)
    if not math.isfinite(bound):
        raise TailBoundError("function unbounded on the contraction segment")
    return w.truncation_for(tol, bound)


def apply_discrete(f: FunctionSpec, w: DiscreteWeight, x, tol: float = 1e-8) -> float:
    """sum_k phi(r_k) f(r_k x), truncated so the tail bound is below tol."""
    x = _check_point(f, x)
    K, _ = discrete_truncation(f, w, x, tol)
    rv, ph = w.arrays(K)
    pts = rv[:, None] * x[None, :]
    vals = f.evaluate_batch(pts)
    return float(math.fsum(ph * vals))


def grid_truncation(f: FunctionSpec, w: GridWeight, x, tol: float) -> tuple[tuple[int, ...], float]:
    x = _check_point(f, x)
    bound = _segment_bound(f, x)
    if not math.isfinite(bound):
        raise TailBoundError("function unbounded on the contraction segment")
    return w.truncation_for(tol, bound)


def apply_grid_discrete(f: FunctionSpec, w: GridWeight, x, tol: float = 1e-8) -> float:
    """Multi-index sum of Phi(r_k) f(r_k1 x_1, ..., r_kn x_n) below tail tol."""
    x = _check_point(f, x)
    if w.dim != f.dim:
        raise DimensionMismatch("weight/function dimension mismatch")
    Ks, _ = grid_truncation(f, w, x, tol)
    r_arrays, phi = w.term_values(Ks)
    mesh = np.meshgrid(*[r * xi for r, xi in zip(r_arrays, x)], indexing="ij")
    pts = np.stack([m.reshape(-1) for m in mesh], axis=-1)
    vals = f.evaluate_batch(pts).reshape(phi.shape)
    return float(np.sum(phi * vals))


# ---------------------------------------------------------------------------
# Continuous operator
# ---------------------------------------------------------------------------


def _axis_quad_points(pieces, xi: float) -> list[float]:
    """t-values in (0,1) where t*xi crosses a piece boundary."""
    pts = set()
    if xi == 0.0:
        return []
    for pc in pieces:
        for b in (pc.lo, pc.hi):
            t = b / xi
            if 0.0 < t < 1.0:
                pts.add(t)
    return sorted(pts)


def _quad(fn, points, epsabs):
    val, err = _si.quad(fn, 0.0, 1.0, points=points or None,
                        epsabs=epsabs, epsrel=1e-12, limit=200)
    return val, err


def apply_continuous(f: FunctionSpec, w: ContinuousWeight, x, tol: float = 1e-8) -> float:
    """Integral over the unit cube of f(t_1 x_1, ..., t_n x_n) phi(t) dt.

    Separable functions use per-axis adaptive quadrature (a product of 1D
    integrals); other specs use nested adaptive quadrature with the error
    budget split across axes.  Raises QuadratureError when the achieved
    error estimate exceeds tol.
    """
    x = _check_point(f, x)
    n = f.dim
    if getattr(w, "dim", n) != n:
        raise DimensionMismatch("weight/function dimension mismatch")
    from .funcs import Rect

    rmax = Rect(tuple(max(abs(float(v)), 1.0) for v in x))
    factors = f.tensor_factors(rmax)
    if factors is not None:
        vals, errs = [], []
        for i in range(n):
            pieces = factors[i]
            dens = w.axis_density(i)
            xi = float(x[i])

            def fn(t, pieces=pieces, dens=dens, xi=xi):
                tx = np.array([t * xi])
                g = 0.0
                for pc in pieces:
                    if pc.lo <= tx[0] < pc.hi:
                        g = float(pc.eval(tx)[0])
                        break
                return g * float(dens(np.array([t]))[0])

            pts = sorted(set(_axis_quad_points(pieces, xi)) | set(w.axis_breaks(i)))
            val, err = _quad(fn, pts, max(tol * 1e-3, 1e-14))
            vals.append(val)
            errs.append(err)
        total = math.prod(vals)
        bound = 0.0
        for i in range(n):
            bound += errs[i] * math.prod(abs(vals[j]) + errs[j] for j in range(n) if j != i)
        if bound > tol:
            raise QuadratureError(f"achieved bound {bound:.3g} exceeds tol {tol:.3g}", bound)
        return float(total)

    # nested adaptive quadrature
    budget = tol / max(1, n)
    err_total = 0.0

    def level(i: int, tvals: list[float]) -> float:
        nonlocal err_total
        if i == n:
            pt = np.array(tvals) * x
            dens = 1.0
            for j in range(n):
                dens *= float(w.axis_density(j)(np.array([tvals[j]]))[0])
            return f.evaluate(pt) * dens

        def fn(t):
            return level(i + 1, tvals + [t])

        pts = []
        if isinstance(f, RadialPowerTail) and i == n - 1:
            # kink where |t o x| crosses the cutoff along the last axis
            fixed = sum((tvals[j] * x[j]) ** 2 for j in range(n - 1))
            rem = f.cutoff ** 2 - fixed
            if rem > 0 and x[i] != 0:
                t = math.sqrt(rem) / abs(x[i])
                if 0 < t < 1:
                    pts = [t]
        val, err = _quad(fn, pts, max(budget * 1e-2, 1e-13))
        if i == 0:
            err_total = err
        return val

    val = level(0, [])
    if err_total > tol:
        raise QuadratureError(f"achieved bound {err_total:.3g} exceeds tol {tol:.3g}", err_total)
    return float(val)


def hardy_classic(f: FunctionSpec, x: float, tol: float = 1e-8) -> float:
    """Classical Hardy average F(x)/x with F(x) the integral of f over [0, x].

    Defined for one-dimensional specs and x > 0; cross-checked against the
    continuous operator with unit density.
    """
    if f.dim != 1:
        raise DimensionMismatch("hardy_classic needs a 1D function")
    x = float(x)
    if x <= 0:
        raise ValueError("x must be positive")

    pts = []
    from .funcs import Rect

    factors = f.tensor_factors(Rect((max(x, 1.0),)))
    if factors is not None:
        pts = [b for pc in factors[0] for b in (pc.lo, pc.hi) if 0.0 < b < x]
    if isinstance(f, RadialPowerTail) and 0.0 < f.cutoff < x:
        pts = [f.cutoff]

    val, err = _si.quad(lambda t: f.evaluate([t]), 0.0, x, points=sorted(set(pts)) or None,
                        epsabs=max(tol * x * 1e-2, 1e-14), epsrel=1e-12, limit=200)
    if err > tol * x:
        raise QuadratureError(f"achieved bound {err:.3g} exceeds tol {tol * x:.3g}", err)
    avg = val / x
    from .weights import ConstantDensity

    other = apply_continuous(f, ConstantDensity(1.0, 1), [x], tol)
    if abs(avg - other) > 2.0 * tol:
        raise QuadratureError(
            f"hardy average {avg!r} disagrees with averaging operator {other!r}")
    return avg


# ---------------------------------------------------------------------------
# Closed-form pushforwards
# ---------------------------------------------------------------------------


def pushforward_discrete(f: FunctionSpec, w: DiscreteWeight,
                         tol: float = 1e-9) -> tuple[FunctionSpec, float]:
    """Truncated weighted sum of axis-scaled copies, with its tail bound in
    the sup norm (tail mass times the global bound of f)."""
    bound = global_abs_bound(f)
    if not math.isfinite(bound):
        raise TailBoundError("function unbounded; discrete pushforward needs sup |f| < inf")
    K, tail = w.truncation_for(tol, bound)
    rv, ph = w.arrays(K)
    terms = tuple(
        (float(c), scaled(f, tuple(float(r) for _ in range(f.dim))))
        for c, r in zip(ph, rv)
    )
    return LinearCombo(terms), tail


def pushforward_grid(f: FunctionSpec, w: GridWeight,
                     tol: float = 1e-9) -> tuple[FunctionSpec, float]:
    bound = global_abs_bound(f)
    if not math.isfinite(bound):
        raise TailBoundError("function unbounded; grid pushforward needs sup |f| < inf")
    Ks, tail = w.truncation_for(tol, bound)
    r_arrays, phi = w.term_values(Ks)
    terms = []
    for idx in np.ndindex(phi.shape):
        c = float(phi[idx])
        if c == 0.0:
            continue
        sc = tuple(float(r_arrays[i][idx[i]]) for i in range(f.dim))
        terms.append((c, scaled(f, sc)))
    return LinearCombo(tuple(terms)), tail


def pushforward_continuous(f: FunctionSpec, w: ContinuousWeight) -> FunctionSpec | None:
    """Exact transform under the continuous operator when it has closed form.

    Constants and half-space indicators are eigenfunctions (eigenvalue = the
    weight mass, since the average is scale-invariant along rays); the
    structure lifts through axis scalings and linear combinations.
    """
    mass = w.mass()
    if mass.diverges:
        return None
    m = mass.value
    if isinstance(f, Constant):
        return Constant(f.value * m, f.dim)
    if isinstance(f, IndicatorHalfSpace):
        return LinearCombo(((m, f),))
    if isinstance(f, LinearCombo):
        parts = []
        for c, g in f.terms:
            pg = pushforward_continuous(g, w)
            if pg is None:
                return None
            parts.append((c, pg))
        return LinearCombo(tuple(parts))
    if isinstance(f, AxisScaled):
        inner = pushforward_continuous(f.inner, w)
        if inner is None:
            return None
        return scaled(inner, f.scales)
    return None
