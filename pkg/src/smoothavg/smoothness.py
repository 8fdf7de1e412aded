"""Worst-case smoothness constants of averaging kernels.

The operator norm of f -> D(f * u) on l2(Z), for a difference operator D
with symbol s(xi), equals the sup over the circle of |s(xi)| * |uhat(xi)|.
With x = cos xi this becomes a weighted polynomial sup on [-1, 1]:

* first difference:  M(u) = sqrt(2 max (1 - x) p_u(x)^2),
  sharp lower bound 2/(2n+1), attained only by the box kernel;
* second difference: L(u) = 2 max (1 - x) |p_u(x)|,
  sharp lower bound 4/(n+1)^2, attained (among kernels with nonnegative
  Fourier transform) only by the triangle kernel.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .chebyshev import ChebPoly, cheb_mul, mul_one_minus_x, sup_abs
from .kernel import (
    DiscreteKernel,
    Sequence,
    apply_stencil,
    box_kernel,
    convolve,
    has_nonneg_fourier,
    l2_norm,
    symbol,
    triangle_kernel,
)

__all__ = [
    "SmoothnessReport",
    "OperatorSymbol",
    "DegenerateOperator",
    "BoundViolated",
    "HypothesisViolated",
    "GRAD_STENCIL",
    "LAPLACIAN_STENCIL",
    "first_deriv_constant",
    "laplacian_constant",
    "operator_constant",
    "ratio_witness",
    "verify_theorem1",
    "verify_theorem2",
]

# Equality-case tolerances: double-precision Chebyshev arithmetic keeps
# errors below 1e-11 for n <= 30, so 1e-10 separates exact extremizers
# from near misses.
GAP_TOL = 1e-10
COEFF_TOL = 1e-10
BOUND_SLACK = 1e-11

GRAD_STENCIL = (-1.0, 1.0)
LAPLACIAN_STENCIL = (1.0, -2.0, 1.0)


class DegenerateOperator(ValueError):
    """Operator stencil is identically zero."""


class BoundViolated(AssertionError):
    """Computed constant fell below the proven sharp bound (solver bug)."""

    def __init__(self, kernel: DiscreteKernel, constant: float, bound: float):
        self.kernel = kernel
        self.constant = constant
        self.bound = bound
        super().__init__(
            f"constant {constant!r} < sharp bound {bound!r} for kernel half {kernel.half.tolist()}"
        )


class HypothesisViolated(ValueError):
    """Kernel's Fourier transform goes negative; carries a witness frequency."""

    def __init__(self, kernel: DiscreteKernel, witness_x: float):
        self.kernel = kernel
        self.witness_x = witness_x
        self.witness_xi = math.acos(max(-1.0, min(1.0, witness_x)))
        super().__init__(
            f"Fourier transform is negative near xi = {self.witness_xi:.6f} (x = {witness_x:.6f})"
        )


@dataclass(frozen=True)
class SmoothnessReport:
    """Computed operator-norm constant with its sharp-bound bookkeeping."""

    constant: float
    arg_x: float
    sharp_bound: float
    gap: float
    is_extremal: bool

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class OperatorSymbol:
    """Difference operator (D f)(k) = sum_i taps[i] f(k + offset + i).

    ``magnitude_squared_cheb`` holds |s(xi)|^2 in the variable x = cos xi,
    computed analytically from the tap autocorrelation.  The constants
    below use the convention sup sqrt(|s|^2) * |uhat|, so the first and
    second differences are special cases.
    """

    taps: np.ndarray
    offset: int = 0

    def __post_init__(self):
        t = np.atleast_1d(np.asarray(self.taps, dtype=float)).copy()
        if t.ndim != 1 or t.size == 0:
            raise ValueError("taps must be a nonempty 1-d real sequence")
        if not np.any(t):
            raise DegenerateOperator("all stencil taps are zero")
        t.setflags(write=False)
        object.__setattr__(self, "taps", t)
        object.__setattr__(self, "offset", int(self.offset))

    @property
    def magnitude_squared_cheb(self) -> ChebPoly:
        # |s(xi)|^2 = r(0) + 2 sum_m r(m) cos(m xi), r = tap autocorrelation
        t = self.taps
        r = np.correlate(t, t, mode="full")[t.size - 1 :]
        c = np.concatenate([[r[0]], 2.0 * r[1:]])
        return ChebPoly(c)


def _weighted_sup(u: DiscreteKernel, weight: ChebPoly) -> tuple[float, float]:
    """sup over [-1,1] of weight(x) * p_u(x)^2 and one maximizer."""
    p = symbol(u)
    q = cheb_mul(weight, cheb_mul(p, p))
    val, x = sup_abs(q)
    return max(val, 0.0), x


def _matches(u: DiscreteKernel, reference: DiscreteKernel, tol: float = COEFF_TOL) -> bool:
    if u.n != reference.n:
        return False
    return bool(np.max(np.abs(u.half - reference.half)) <= tol)


def first_deriv_constant(u: DiscreteKernel) -> SmoothnessReport:
    """M(u) = sqrt(2 max (1-x) p_u(x)^2), sharp bound 2/(2n+1).

    The inner polynomial is nonnegative, so its sup_abs is its signed sup.
    """
    p = symbol(u)
    q = mul_one_minus_x(cheb_mul(p, p))
    val, x = sup_abs(q)
    constant = math.sqrt(2.0 * max(val, 0.0))
    bound = 2.0 / (2 * u.n + 1)
    gap = constant - bound
    extremal = gap <= GAP_TOL and _matches(u, box_kernel(u.n))
    return SmoothnessReport(constant, x, bound, gap, extremal)


def laplacian_constant(u: DiscreteKernel) -> SmoothnessReport:
    """L(u) = 2 max (1-x) |p_u(x)|, sharp bound 4/(n+1)^2.

    Uses |p_u| so the value is the true operator norm even when uhat
    changes sign; the bound (and the extremal flag) are meaningful under
    the nonnegative-transform hypothesis, which verify_theorem2 enforces.
    """
    q = mul_one_minus_x(symbol(u))
    val, x = sup_abs(q)
    constant = 2.0 * val
    bound = 4.0 / (u.n + 1) ** 2
    gap = constant - bound
    extremal = gap <= GAP_TOL and _matches(u, triangle_kernel(u.n))
    return SmoothnessReport(constant, x, bound, gap, extremal)


def operator_constant(u: DiscreteKernel, s: OperatorSymbol) -> SmoothnessReport:
    """sup over the circle of |s(xi)| * |uhat(xi)| for a general stencil.

    Computed as sqrt(sup |s|^2(x) * p_u(x)^2).  No sharp lower bound is
    known beyond the first- and second-difference cases, so the trivial
    bound 0 is reported and the extremal flag stays False.
    """
    val, x = _weighted_sup(u, s.magnitude_squared_cheb)
    constant = math.sqrt(val)
    return SmoothnessReport(constant, x, 0.0, constant, False)


def ratio_witness(u: DiscreteKernel, operator: OperatorSymbol, N: int) -> tuple[Sequence, float]:
    """Near-extremizing input: a hard-truncated cosine at the worst frequency.

    f(k) = cos(xi* k) for |k| <= N, where cos(xi*) maximizes the operator
    symbol times uhat.  Returns (f, ||D(f*u)|| / ||f||); the ratio can
    never exceed the operator norm.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    rep = operator_constant(u, operator)
    xi_star = math.acos(max(-1.0, min(1.0, rep.arg_x)))
    k = np.arange(-N, N + 1)
    f = Sequence(-N, np.cos(xi_star * k))
    smoothed = convolve(f, u)
    derived = apply_stencil(smoothed, operator.taps, operator.offset)
    return f, l2_norm(derived) / l2_norm(f)


def verify_theorem1(u: DiscreteKernel) -> SmoothnessReport:
    """Check M(u) >= 2/(2n+1), equality exactly at the box kernel."""
    rep = first_deriv_constant(u)
    if rep.constant < rep.sharp_bound - BOUND_SLACK:
        raise BoundViolated(u, rep.constant, rep.sharp_bound)
    return rep


def verify_theorem2(u: DiscreteKernel) -> SmoothnessReport:
    """Check L(u) >= 4/(n+1)^2 for kernels with nonnegative transform.

    Equality holds exactly at the triangle kernel; kernels whose transform
    goes negative are rejected with a witness frequency.
    """
    ok, witness = has_nonneg_fourier(u, tol=1e-12)
    if not ok:
        raise HypothesisViolated(u, witness)
    rep = laplacian_constant(u)
    if rep.constant < rep.sharp_bound - BOUND_SLACK:
        raise BoundViolated(u, rep.constant, rep.sharp_bound)
    return rep
