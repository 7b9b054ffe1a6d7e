"""Standard test-function corpora for the verification experiments.

Three corpora are provided:

* ``dyadic_corpus`` — ten varied functions (constants, indicators, tensor
  pieces, a truncated staircase/ladder, power tails) used for the norm
  equivalence sandwiches;
* ``attainment_corpus`` — members whose sup-norm estimate is attained
  exactly on the candidate grid, so operator-norm ratios can be compared at
  tight tolerances;
* ``cmo_corpus`` — members with closed-form transforms under the continuous
  averaging operator and exactly computable oscillation norms.
"""

from __future__ import annotations

from .funcs import (
    AxisScaled,
    Constant,
    FunctionSpec,
    IndicatorHalfSpace,
    LinearCombo,
    Piece,
    RadialPowerTail,
    StaircaseCross,
    TensorPiecewise1D,
)

__all__ = ["dyadic_corpus", "attainment_corpus", "cmo_corpus", "hat", "unit_box", "ladder"]


def hat(n: int) -> TensorPiecewise1D:
    """Tensor hat: product of (1 - |x_i|) on [-1, 1]^n."""
    ax = (Piece(-1.0, 0.0, poly=(1.0, 1.0)), Piece(0.0, 1.0, poly=(1.0, -1.0)))
    return TensorPiecewise1D(tuple(ax for _ in range(n)))


def unit_box(n: int) -> TensorPiecewise1D:
    """Indicator of [-1, 1]^n."""
    ax = (Piece(-1.0, 1.0, poly=(1.0,)),)
    return TensorPiecewise1D(tuple(ax for _ in range(n)))


def bump(n: int) -> TensorPiecewise1D:
    """Tensor bump: product of (1 - (x_i/2)^2) on [-2, 2]^n."""
    ax = (Piece(-2.0, 2.0, poly=(1.0, 0.0, -0.25)),)
    return TensorPiecewise1D(tuple(ax for _ in range(n)))


def ladder(p: float, max_step: int = 8) -> TensorPiecewise1D:
    """1D analogue of the truncated staircase: value k^(1/p) on the k-th band."""
    pieces = []
    for k in range(max_step, 0, -1):
        pieces.append(Piece(float(-k), float(-k + 1), poly=(float(k) ** (1.0 / p),)))
    for k in range(1, max_step + 1):
        pieces.append(Piece(float(k - 1), float(k), poly=(float(k) ** (1.0 / p),)))
    return TensorPiecewise1D((tuple(pieces),))


def _staircase_member(n: int, p: float, max_band: int = 8) -> FunctionSpec:
    return StaircaseCross(p_root=p, max_band=max_band) if n == 2 else ladder(p, max_band)


def dyadic_corpus(n: int, p: float) -> list[tuple[str, FunctionSpec]]:
    tail_exp = -(n / p)
    return [
        ("const_one", Constant(1.0, n)),
        ("const_075", Constant(0.75, n)),
        ("indicator_x", IndicatorHalfSpace(0, n)),
        ("unit_box", unit_box(n)),
        ("hat", hat(n)),
        ("bump2", bump(n)),
        ("stair8", _staircase_member(n, p)),
        ("tail_eps05", RadialPowerTail(tail_exp - 0.5, n)),
        ("tail_eps01", RadialPowerTail(tail_exp - 0.1, n)),
        ("combo_const_hat", LinearCombo(((0.5, Constant(1.0, n)), (1.25, hat(n))))),
    ]


def attainment_corpus(n: int, p: float,
                      homogeneous: bool = False) -> list[tuple[str, FunctionSpec]]:
    """Members whose candidate-grid norm estimate equals the true norm.

    Constants and half-space indicators have constant objectives; functions
    supported in the unit box attain the inhomogeneous sup at half-widths
    (1, ..., 1); the truncated staircase attains it at (1, max_band) with a
    dyadic max_band.  The hat is excluded for p = 2 (its transforms have too
    many terms for the exact quadratic route) and in the homogeneous variant
    (its sup is only approached as the rectangles shrink).
    """
    members: list[tuple[str, FunctionSpec]] = [
        ("const_one", Constant(1.0, n)),
        ("const_075", Constant(0.75, n)),
        ("indicator_x", IndicatorHalfSpace(0, n)),
        ("unit_box", unit_box(n)),
        ("stair8", _staircase_member(n, p)),
        ("combo_ind_const",
         LinearCombo(((1.5, IndicatorHalfSpace(0, n)), (0.25, Constant(1.0, n))))),
    ]
    if p == 1.0 and not homogeneous:
        members.insert(4, ("hat", hat(n)))
    return members


def cmo_corpus(n: int) -> list[tuple[str, FunctionSpec]]:
    members: list[tuple[str, FunctionSpec]] = [
        ("const_two", Constant(2.0, n)),
        ("indicator_x", IndicatorHalfSpace(0, n)),
        ("combo_ind_const",
         LinearCombo(((1.5, IndicatorHalfSpace(0, n)), (0.25, Constant(1.0, n))))),
        ("scaled_ind", AxisScaled(IndicatorHalfSpace(0, n), tuple(0.5 for _ in range(n)))),
    ]
    if n >= 2:
        members.insert(2, ("indicator_y", IndicatorHalfSpace(1, n)))
        members.append(("combo_ind_ind",
                        LinearCombo(((1.0, IndicatorHalfSpace(0, n)),
                                     (1.0, IndicatorHalfSpace(1, n))))))
    return members
