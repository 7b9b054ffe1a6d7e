"""Weight families for the averaging operators.

Weights are closed-form families (not raw numeric arrays) so that series
masses, L^p-weighted sums and truncation tails all carry certified values;
arbitrary arrays are admitted only as finite (explicit) weights.

Discrete weights pair a strictly decreasing contraction sequence r_k in
(0,1] with positive mass values phi(r_k); grid weights do the same per axis
with a multi-index mass; continuous weights are positive densities on the
unit cube.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import TailBoundError
from .funcs import Piece, _piece_signed_integral, _product_piece_integral

__all__ = [
    "SeriesSum",
    "GeometricR",
    "ExplicitR",
    "GeometricPhi",
    "PowerOfRPhi",
    "ExplicitPhi",
    "DiscreteWeight",
    "ProductGeometricPhi",
    "DiagonalPhi",
    "ExplicitGridPhi",
    "GridWeight",
    "ConstantDensity",
    "SeparablePower",
    "SeparablePiecewisePoly",
    "weight_to_obj",
    "weight_from_obj",
]

_SPOT_CHECK_K = 40


@dataclass(frozen=True)
class SeriesSum:
    """Value of a weighted series with divergence and exactness flags."""

    value: float
    diverges: bool = False
    exact: bool = True
    note: str = ""

    def __float__(self) -> float:
        return self.value


def _geometric_sum(first: float, q: float) -> SeriesSum:
    """sum_{k>=1} first * q^(k-1); diverges when q >= 1."""
    if q >= 1.0:
        return SeriesSum(math.inf, diverges=True, note=f"ratio {q:.6g} >= 1")
    return SeriesSum(first / (1.0 - q))


def _power_tail_integral(u: float, a: float) -> float:
    """Exact integral of t^(-a) over [u, 1] (inf when divergent at u = 0)."""
    s = -a
    if s == -1.0:
        return math.inf if u <= 0.0 else -math.log(u)
    if u <= 0.0:
        return math.inf if s < -1.0 else 1.0 / (s + 1.0)
    return (1.0 - u ** (s + 1.0)) / (s + 1.0)


# ---------------------------------------------------------------------------
# Discrete weights
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeometricR:
    """r_k = ratio^k for k >= 1."""

    ratio: float

    def __post_init__(self):
        if not 0.0 < self.ratio < 1.0:
            raise ValueError("geometric ratio must be in (0, 1)")

    def value(self, k: int) -> float:
        return self.ratio ** k

    def values(self, K: int) -> np.ndarray:
        return self.ratio ** np.arange(1, K + 1, dtype=float)


@dataclass(frozen=True)
class ExplicitR:
    values_list: tuple[float, ...]

    def __post_init__(self):
        v = tuple(float(x) for x in self.values_list)
        object.__setattr__(self, "values_list", v)
        if not v:
            raise ValueError("explicit r sequence is empty")
        if any(not 0.0 < x <= 1.0 for x in v):
            raise ValueError("r values must lie in (0, 1]")
        if any(b >= a for a, b in zip(v[:-1], v[1:])):
            raise ValueError("r must be strictly decreasing")

    def value(self, k: int) -> float:
        return self.values_list[k - 1]

    def values(self, K: int) -> np.ndarray:
        return np.asarray(self.values_list[:K])


@dataclass(frozen=True)
class GeometricPhi:
    """phi_k = coef * ratio^k."""

    coef: float
    ratio: float

    def __post_init__(self):
        if self.coef <= 0 or not 0.0 < self.ratio < 1.0:
            raise ValueError("geometric phi needs coef > 0 and ratio in (0, 1)")


@dataclass(frozen=True)
class PowerOfRPhi:
    """phi_k = coef * r_k^exponent."""

    coef: float
    exponent: float

    def __post_init__(self):
        if self.coef <= 0:
            raise ValueError("power phi needs coef > 0")


@dataclass(frozen=True)
class ExplicitPhi:
    values_list: tuple[float, ...]

    def __post_init__(self):
        v = tuple(float(x) for x in self.values_list)
        object.__setattr__(self, "values_list", v)
        if any(x <= 0 for x in v):
            raise ValueError("phi values must be positive")


@dataclass(frozen=True)
class DiscreteWeight:
    """Contraction sequence r_k with masses phi(r_k) and a certified tail."""

    r: GeometricR | ExplicitR
    phi: GeometricPhi | PowerOfRPhi | ExplicitPhi

    def __post_init__(self):
        K = self.finite_length()
        sample = range(1, (K or _SPOT_CHECK_K) + 1)
        rv = [self.r_value(k) for k in sample]
        if any(b >= a for a, b in zip(rv[:-1], rv[1:])):
            raise ValueError("r must be strictly decreasing")
        if any(self.phi_value(k) <= 0 for k in sample):
            raise ValueError("phi must be positive")
        if isinstance(self.phi, ExplicitPhi) and isinstance(self.r, ExplicitR):
            if len(self.phi.values_list) != len(self.r.values_list):
                raise ValueError("explicit r and phi lengths differ")

    def finite_length(self) -> int | None:
        k = None
        if isinstance(self.r, ExplicitR):
            k = len(self.r.values_list)
        if isinstance(self.phi, ExplicitPhi):
            k2 = len(self.phi.values_list)
            k = k2 if k is None else min(k, k2)
        return k

    def r_value(self, k: int) -> float:
        return self.r.value(k)

    def phi_value(self, k: int) -> float:
        if isinstance(self.phi, GeometricPhi):
            return self.phi.coef * self.phi.ratio ** k
        if isinstance(self.phi, PowerOfRPhi):
            return self.phi.coef * self.r_value(k) ** self.phi.exponent
        return self.phi.values_list[k - 1]

    def arrays(self, K: int) -> tuple[np.ndarray, np.ndarray]:
        rv = self.r.values(K)
        if isinstance(self.phi, GeometricPhi):
            ph = self.phi.coef * self.phi.ratio ** np.arange(1, K + 1, dtype=float)
        elif isinstance(self.phi, PowerOfRPhi):
            ph = self.phi.coef * rv ** self.phi.exponent
        else:
            ph = np.asarray(self.phi.values_list[:K])
        return rv, ph

    def _term_ratio(self, beta: float) -> tuple[float, float] | None:
        """(first term, common ratio) of a_k = phi_k * r_k^(-beta) when it is
        geometric in k; None for explicit families."""
        if isinstance(self.r, ExplicitR):
            return None
        rho = self.r.ratio
        if isinstance(self.phi, GeometricPhi):
            q = self.phi.ratio * rho ** (-beta)
            return (self.phi.coef * q, q)
        if isinstance(self.phi, PowerOfRPhi):
            q = rho ** (self.phi.exponent - beta)
            return (self.phi.coef * q, q)
        return None

    def power_term(self, beta: float, k: int) -> float:
        """phi(r_k) * r_k^(-beta), computed without intermediate overflow."""
        fr = self._term_ratio(beta)
        if fr is not None:
            first, q = fr
            return first * q ** (k - 1)
        return self.phi_value(k) * self.r_value(k) ** (-beta)

    def weighted_power_sum(self, beta: float) -> SeriesSum:
        """sum_k phi(r_k) * r_k^(-beta), exact for the closed-form families."""
        K = self.finite_length()
        if K is not None:
            rv, ph = self.arrays(K)
            return SeriesSum(float(math.fsum(ph * rv ** (-beta))))
        fr = self._term_ratio(beta)
        if fr is None:
            raise TailBoundError("no closed form for this weight family")
        return _geometric_sum(*fr)

    def mass(self) -> SeriesSum:
        return self.weighted_power_sum(0.0)

    def tail_mass(self, K: int) -> float:
        """Certified bound on sum_{k>K} phi(r_k)."""
        fin = self.finite_length()
        if fin is not None:
            return 0.0 if K >= fin else float(math.fsum(self.arrays(fin)[1][K:]))
        first, q = self._term_ratio(0.0)
        if q >= 1.0:
            return math.inf
        return first * q ** K / (1.0 - q)

    def truncation_for(self, tol: float, sup_bound: float) -> tuple[int, float]:
        """Smallest K with tail_mass(K) * sup_bound < tol, plus that bound."""
        fin = self.finite_length()
        if fin is not None:
            return fin, 0.0
        if sup_bound == 0.0:
            return 1, 0.0
        first, q = self._term_ratio(0.0)
        if q >= 1.0:
            raise TailBoundError("weight mass diverges; no truncation exists")
        target = tol / sup_bound
        K = 1
        while first * q ** K / (1.0 - q) >= target:
            K += 1
            if K > 10_000_000:
                raise TailBoundError("truncation index exceeds 1e7")
        return K, self.tail_mass(K) * sup_bound


# ---------------------------------------------------------------------------
# Grid weights
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProductGeometricPhi:
    """Phi(k_1,...,k_n) = coef * prod_i ratios_i^(k_i)."""

    coef: float
    ratios: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "ratios", tuple(float(x) for x in self.ratios))
        if self.coef <= 0 or any(not 0 < x < 1 for x in self.ratios):
            raise ValueError("product-geometric phi needs coef > 0, ratios in (0,1)")


@dataclass(frozen=True)
class DiagonalPhi:
    """Phi supported on the diagonal k_1 = ... = k_n with 1D weight values."""

    weight: DiscreteWeight


@dataclass(frozen=True)
class ExplicitGridPhi:
    values_list: tuple  # nested tuples, one level per axis

    def array(self) -> np.ndarray:
        a = np.asarray(self.values_list, float)
        if (a <= 0).any():
            raise ValueError("grid phi values must be positive")
        return a


@dataclass(frozen=True)
class GridWeight:
    """Per-axis contraction sequences with a multi-index mass function."""

    axes: tuple[GeometricR | ExplicitR, ...]
    phi: ProductGeometricPhi | DiagonalPhi | ExplicitGridPhi

    def __post_init__(self):
        n = len(self.axes)
        if n < 1:
            raise ValueError("grid weight needs at least one axis")
        if isinstance(self.phi, ProductGeometricPhi) and len(self.phi.ratios) != n:
            raise ValueError("phi ratios length must match axes")
        if isinstance(self.phi, DiagonalPhi):
            if any(ax != self.axes[0] for ax in self.axes):
                raise ValueError("diagonal phi requires identical axis sequences")
            if self.axes[0] != self.phi.weight.r:
                raise ValueError("diagonal phi axis sequence must match its weight")

    @property
    def dim(self) -> int:
        return len(self.axes)

    def mass(self) -> SeriesSum:
        return self.weighted_sum(0.0)

    def weighted_sum(self, beta_per_axis: float) -> SeriesSum:
        """sum over multi-indices of Phi * prod_i r_i^(-beta_per_axis)."""
        if isinstance(self.phi, ProductGeometricPhi):
            total = self.phi.coef
            for ax, th in zip(self.axes, self.phi.ratios):
                if isinstance(ax, ExplicitR):
                    rv = np.asarray(ax.values_list)
                    ks = np.arange(1, len(rv) + 1, dtype=float)
                    total *= float(np.sum(th ** ks * rv ** (-beta_per_axis)))
                else:
                    part = _geometric_sum(th * ax.ratio ** (-beta_per_axis),
                                          th * ax.ratio ** (-beta_per_axis))
                    if part.diverges:
                        return SeriesSum(math.inf, diverges=True, note=part.note)
                    total *= part.value
            return SeriesSum(total)
        if isinstance(self.phi, DiagonalPhi):
            return self.phi.weight.weighted_power_sum(self.dim * beta_per_axis)
        arr = self.phi.array()
        total = 0.0
        for idx, v in np.ndenumerate(arr):
            term = v
            for i, k in enumerate(idx):
                term *= self.axes[i].value(k + 1) ** (-beta_per_axis)
            total += term
        return SeriesSum(float(total))

    def lp_sum(self, p: float) -> SeriesSum:
        return self.weighted_sum(1.0 / p)

    def truncation_for(self, tol: float, sup_bound: float) -> tuple[tuple[int, ...], float]:
        """Per-axis truncation indices with a certified residual-mass bound."""
        if isinstance(self.phi, ExplicitGridPhi):
            return tuple(self.phi.array().shape), 0.0
        if isinstance(self.phi, DiagonalPhi):
            K, bound = self.phi.weight.truncation_for(tol, sup_bound)
            return tuple(K for _ in range(self.dim)), bound
        if sup_bound == 0.0:
            return tuple(1 for _ in range(self.dim)), 0.0
        mass = self.mass()
        if mass.diverges:
            raise TailBoundError("grid weight mass diverges")
        # union bound: residual <= sum_i tail_i(K) * prod_{j != i} full_j
        Ks = []
        for ax, th in zip(self.axes, self.phi.ratios):
            if isinstance(ax, ExplicitR):
                Ks.append(len(ax.values_list))
                continue
            full = th / (1.0 - th)
            others = mass.value / (self.phi.coef * full) if full > 0 else 1.0
            target = tol / (self.dim * sup_bound * self.phi.coef * max(others, 1e-300))
            K = 1
            while th ** K * full >= target and K < 10_000_000:
                K += 1
            Ks.append(K)
        residual = mass.value - self.truncated_mass(tuple(Ks))
        return tuple(Ks), max(residual, 0.0) * sup_bound

    def truncated_mass(self, Ks: tuple[int, ...]) -> float:
        if isinstance(self.phi, ProductGeometricPhi):
            total = self.phi.coef
            for ax, th, K in zip(self.axes, self.phi.ratios, Ks):
                total *= float(math.fsum(th ** k for k in range(1, K + 1)))
            return total
        if isinstance(self.phi, DiagonalPhi):
            rv, ph = self.phi.weight.arrays(min(Ks))
            return float(math.fsum(ph))
        return float(self.phi.array().sum())

    def term_values(self, Ks: tuple[int, ...]):
        """(list of per-axis r arrays, Phi array) truncated to the index box."""
        r_arrays = [ax.values(K) for ax, K in zip(self.axes, Ks)]
        if isinstance(self.phi, ProductGeometricPhi):
            phi = np.full(Ks, self.phi.coef)
            for i, (th, K) in enumerate(zip(self.phi.ratios, Ks)):
                shape = [1] * self.dim
                shape[i] = K
                phi = phi * (th ** np.arange(1, K + 1, dtype=float)).reshape(shape)
            return r_arrays, phi
        if isinstance(self.phi, DiagonalPhi):
            K = min(Ks)
            phi = np.zeros(tuple(K for _ in range(self.dim)))
            _, ph = self.phi.weight.arrays(K)
            idx = np.arange(K)
            phi[tuple(idx for _ in range(self.dim))] = ph
            return [a[:K] for a in r_arrays], phi
        arr = self.phi.array()
        return [a[:s] for a, s in zip(r_arrays, arr.shape)], arr


# ---------------------------------------------------------------------------
# Continuous weights (densities on the unit cube)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstantDensity:
    value: float
    dim: int = 1

    def __post_init__(self):
        if self.value <= 0:
            raise ValueError("density must be positive")

    def mass(self) -> SeriesSum:
        return SeriesSum(self.value)

    def lp_integral(self, p: float) -> SeriesSum:
        if p == 1.0:
            return SeriesSum(math.inf, diverges=True, note="t^-1 not integrable at 0")
        return SeriesSum(self.value * (p / (p - 1.0)) ** self.dim)

    def axis_density(self, i: int) -> Callable[[np.ndarray], np.ndarray]:
        c = self.value if i == 0 else 1.0
        return lambda t: np.full_like(np.asarray(t, float), c)

    def axis_breaks(self, i: int) -> list[float]:
        return []

    def axis_tail_integral(self, i: int, u: float, a: float) -> float:
        """Exact integral of t^(-a) * g_i(t) over [u, 1]."""
        c = self.value if i == 0 else 1.0
        return c * _power_tail_integral(u, a)


@dataclass(frozen=True)
class SeparablePower:
    """phi(t) = coef * prod_i t_i^(exponents_i), exponents > -1."""

    coef: float
    exponents: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(float(b) for b in self.exponents))
        if self.coef <= 0:
            raise ValueError("coef must be positive")
        if any(b <= -1 for b in self.exponents):
            raise ValueError("exponents must exceed -1 for an integrable density")

    @property
    def dim(self) -> int:
        return len(self.exponents)

    def mass(self) -> SeriesSum:
        return SeriesSum(self.coef * math.prod(1.0 / (b + 1.0) for b in self.exponents))

    def lp_integral(self, p: float) -> SeriesSum:
        total = self.coef
        for b in self.exponents:
            s = b - 1.0 / p
            if s <= -1.0:
                return SeriesSum(math.inf, diverges=True,
                                 note=f"t^{s:.4g} not integrable at 0")
            total *= 1.0 / (s + 1.0)
        return SeriesSum(total)

    def axis_density(self, i: int) -> Callable[[np.ndarray], np.ndarray]:
        c = self.coef if i == 0 else 1.0
        b = self.exponents[i]

        def g(t):
            t = np.asarray(t, float)
            out = np.zeros_like(t)
            mask = t > 0
            out[mask] = c * t[mask] ** b
            if b == 0:
                out[~mask] = c
            return out

        return g

    def axis_breaks(self, i: int) -> list[float]:
        return []

    def axis_tail_integral(self, i: int, u: float, a: float) -> float:
        c = self.coef if i == 0 else 1.0
        return c * _power_tail_integral(u, a - self.exponents[i])


@dataclass(frozen=True)
class SeparablePiecewisePoly:
    """phi(t) = prod_i g_i(t_i) with 1D piecewise polynomials on [0, 1]."""

    axes: tuple[tuple[Piece, ...], ...]

    def __post_init__(self):
        for ax in self.axes:
            for pc in ax:
                if pc.lo < 0.0 or pc.hi > 1.0 + 1e-12:
                    raise ValueError("density pieces must live inside [0, 1]")
        for i in range(len(self.axes)):
            ts = np.linspace(1e-3, 1 - 1e-3, 17)
            if (self.axis_density(i)(ts) < 0).any():
                raise ValueError("density must be nonnegative on (0, 1)")

    @property
    def dim(self) -> int:
        return len(self.axes)

    def mass(self) -> SeriesSum:
        total = 1.0
        for ax in self.axes:
            total *= math.fsum(_piece_signed_integral(pc, 0.0, 1.0) for pc in ax)
        return SeriesSum(total)

    def lp_integral(self, p: float) -> SeriesSum:
        from .errors import NotIntegrable

        total = 1.0
        tpow = Piece(0.0, 1.0, power=(1.0, -1.0 / p)) if p > 1.0 else None
        for ax in self.axes:
            try:
                if p == 1.0:
                    part = math.fsum(
                        _product_piece_integral(pc, Piece(1e-300, 1.0, power=(1.0, -1.0)),
                                                max(pc.lo, 0.0), min(pc.hi, 1.0))
                        if pc.lo > 0 else _raise_if_positive_at_zero(pc)
                        for pc in ax)
                else:
                    part = math.fsum(
                        _product_piece_integral(pc, tpow, max(pc.lo, 0.0), min(pc.hi, 1.0))
                        for pc in ax)
            except NotIntegrable as exc:
                return SeriesSum(math.inf, diverges=True, note=str(exc))
            total *= part
        return SeriesSum(total)

    def axis_density(self, i: int) -> Callable[[np.ndarray], np.ndarray]:
        pieces = self.axes[i]

        def g(t):
            t = np.asarray(t, float)
            out = np.zeros_like(t)
            for pc in pieces:
                mask = (t >= pc.lo) & (t < pc.hi) | ((t == pc.hi) & (pc.hi == 1.0))
                if mask.any():
                    out[mask] = pc.eval(t[mask])
            return out

        return g

    def axis_breaks(self, i: int) -> list[float]:
        pts = set()
        for pc in self.axes[i]:
            for e in (pc.lo, pc.hi):
                if 0.0 < e < 1.0:
                    pts.add(float(e))
        return sorted(pts)

    def axis_tail_integral(self, i: int, u: float, a: float) -> float:
        total = 0.0
        tp = Piece(1e-300 if a > 0 else -2.0, 2.0, power=(1.0, -a))
        for pc in self.axes[i]:
            lo, hi = max(pc.lo, u), min(pc.hi, 1.0)
            if lo < hi:
                total += _product_piece_integral(pc, tp, lo, hi)
        return total


def _raise_if_positive_at_zero(pc: Piece):
    from .errors import NotIntegrable

    val = float(pc.eval(np.array([1e-9]))[0])
    if val > 0:
        raise NotIntegrable("density positive at 0 makes t^-1 weight divergent")
    return _product_piece_integral(pc, Piece(1e-300, 1.0, power=(1.0, -1.0)),
                                   max(pc.lo, 1e-300), min(pc.hi, 1.0))


ContinuousWeight = ConstantDensity | SeparablePower | SeparablePiecewisePoly


# ---------------------------------------------------------------------------
# JSON encoding
# ---------------------------------------------------------------------------


def _r_to_obj(r) -> dict:
    if isinstance(r, GeometricR):
        return {"family": "geometric", "ratio": r.ratio}
    return {"family": "explicit", "values": list(r.values_list)}


def _r_from_obj(obj) -> GeometricR | ExplicitR:
    if obj["family"] == "geometric":
        return GeometricR(float(obj["ratio"]))
    if obj["family"] == "explicit":
        return ExplicitR(tuple(obj["values"]))
    raise ValueError(f"unknown r family {obj['family']!r}")


def weight_to_obj(w) -> dict:
    if isinstance(w, DiscreteWeight):
        if isinstance(w.phi, GeometricPhi):
            phi = {"family": "geometric", "coef": w.phi.coef, "ratio": w.phi.ratio}
        elif isinstance(w.phi, PowerOfRPhi):
            phi = {"family": "power_of_r", "coef": w.phi.coef, "exponent": w.phi.exponent}
        else:
            phi = {"family": "explicit", "values": list(w.phi.values_list)}
        return {"kind": "discrete", "r": _r_to_obj(w.r), "phi": phi}
    if isinstance(w, GridWeight):
        if isinstance(w.phi, ProductGeometricPhi):
            phi = {"family": "product_geometric", "coef": w.phi.coef,
                   "ratios": list(w.phi.ratios)}
        elif isinstance(w.phi, DiagonalPhi):
            phi = {"family": "diagonal", "weight": weight_to_obj(w.phi.weight)}
        else:
            phi = {"family": "explicit", "values": _nested_list(w.phi.values_list)}
        return {"kind": "grid", "axes": [_r_to_obj(ax) for ax in w.axes], "phi": phi}
    if isinstance(w, ConstantDensity):
        return {"kind": "continuous", "family": "constant", "value": w.value, "dim": w.dim}
    if isinstance(w, SeparablePower):
        return {"kind": "continuous", "family": "separable_power", "coef": w.coef,
                "exponents": list(w.exponents)}
    if isinstance(w, SeparablePiecewisePoly):
        from .funcs import _piece_to_obj

        return {"kind": "continuous", "family": "separable_piecewise",
                "axes": [[_piece_to_obj(pc) for pc in ax] for ax in w.axes]}
    raise TypeError(f"unknown weight type {type(w).__name__}")


def _nested_list(x):
    if isinstance(x, (tuple, list)):
        return [_nested_list(v) for v in x]
    return x


def _nested_tuple(x):
    if isinstance(x, (tuple, list)):
        return tuple(_nested_tuple(v) for v in x)
    return float(x)


def weight_from_obj(obj: dict):
    kind = obj.get("kind")
    if kind == "discrete":
        ph = obj["phi"]
        if ph["family"] == "geometric":
            phi = GeometricPhi(float(ph["coef"]), float(ph["ratio"]))
        elif ph["family"] == "power_of_r":
            phi = PowerOfRPhi(float(ph["coef"]), float(ph["exponent"]))
        elif ph["family"] == "explicit":
            phi = ExplicitPhi(tuple(ph["values"]))
        else:
            raise ValueError(f"unknown phi family {ph['family']!r}")
        return DiscreteWeight(_r_from_obj(obj["r"]), phi)
    if kind == "grid":
        axes = tuple(_r_from_obj(a) for a in obj["axes"])
        ph = obj["phi"]
        if ph["family"] == "product_geometric":
            phi = ProductGeometricPhi(float(ph["coef"]), tuple(ph["ratios"]))
        elif ph["family"] == "diagonal":
            phi = DiagonalPhi(weight_from_obj(ph["weight"]))
        elif ph["family"] == "explicit":
            phi = ExplicitGridPhi(_nested_tuple(ph["values"]))
        else:
            raise ValueError(f"unknown grid phi family {ph['family']!r}")
        return GridWeight(axes, phi)
    if kind == "continuous":
        fam = obj["family"]
        if fam == "constant":
            return ConstantDensity(float(obj["value"]), int(obj["dim"]))
        if fam == "separable_power":
            return SeparablePower(float(obj["coef"]), tuple(obj["exponents"]))
        if fam == "separable_piecewise":
            from .funcs import _piece_from_obj

            return SeparablePiecewisePoly(tuple(
                tuple(_piece_from_obj(pc) for pc in ax) for ax in obj["axes"]
            ))
        raise ValueError(f"unknown continuous family {fam!r}")
    raise ValueError(f"unknown weight kind {kind!r}")
