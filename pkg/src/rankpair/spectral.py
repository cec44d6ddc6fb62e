"""Spectral-side analytics on correlation sequences.

Everything here is post-certificate: exact rationals cross the boundary
once, are rounded to doubles, and feed standard positive-kernel density
estimates, summability reports, and the chaos-coefficient transform for
the Gaussian / Poisson suspension layer.  Certificates never depend on
this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .correlation import CorrelationSequence, CoverageError, Interval, _abs_interval


@dataclass
class DensityEstimate:
    """Spectral density values on a uniform angle grid."""

    grid_size: int
    values: np.ndarray
    order: int
    exact: bool
    rho0: float

    @property
    def thetas(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.grid_size) / self.grid_size

    def grid_mean(self) -> float:
        return float(np.mean(self.values))

    def min_value(self) -> float:
        return float(np.min(self.values))


def _midpoints(seq: CorrelationSequence, ns) -> dict[int, float]:
    return {n: float(seq.midpoint(n)) for n in ns}


def fejer_density(seq: CorrelationSequence, order: int, grid: int) -> DensityEstimate:
    """Non-negative kernel estimate of the spectral density from lags < order."""
    if order < 1 or grid < 1:
        raise ValueError("order and grid must be positive")
    if not seq.covers(0, order - 1):
        raise CoverageError(f"sequence must cover [0, {order - 1}]")
    rho = _midpoints(seq, range(order))
    thetas = 2.0 * np.pi * np.arange(grid) / grid
    values = np.full(grid, rho[0])
    for n in range(1, order):
        values += 2.0 * (1.0 - n / order) * rho[n] * np.cos(n * thetas)
    return DensityEstimate(
        grid_size=grid, values=values, order=order, exact=False, rho0=rho[0]
    )


def trig_polynomial_density(seq: CorrelationSequence, grid: int) -> DensityEstimate:
    """Exact trigonometric-polynomial density of a finitely supported sequence.

    Uses every entry of the sequence; only meaningful when the sequence's
    support window genuinely exhausts the correlations (the planned pairs'
    product sequences on their horizon, for instance).
    """
    support = seq.support()
    rho0 = float(seq.midpoint(0)) if 0 in seq.entries else 0.0
    thetas = 2.0 * np.pi * np.arange(grid) / grid
    values = np.full(grid, rho0)
    for n in support:
        if n > 0:
            values += 2.0 * float(seq.midpoint(n)) * np.cos(n * thetas)
    return DensityEstimate(
        grid_size=grid, values=values,
        order=(max(support) + 1) if support else 1,
        exact=True, rho0=rho0,
    )


@dataclass
class SummabilityReport:
    l1: Interval
    l2: Interval
    support: list[int]


def summability_report(
    seq: CorrelationSequence, interval: tuple[int, int]
) -> SummabilityReport:
    """Exact interval bounds for the absolute and squared sums over a lag range."""
    lo, hi = interval
    if not seq.covers(lo, hi):
        raise CoverageError(f"interval [{lo}, {hi}] not covered")
    l1 = [Fraction(0), Fraction(0)]
    l2 = [Fraction(0), Fraction(0)]
    support = []
    for n in range(lo, hi + 1):
        a, b = _abs_interval(seq.entry(n))
        l1[0] += a
        l1[1] += b
        l2[0] += a * a
        l2[1] += b * b
        if b != 0:
            support.append(n)
    return SummabilityReport(l1=(l1[0], l1[1]), l2=(l2[0], l2[1]), support=support)


@dataclass
class ChaosCoefficients:
    """Truncated Fock-space coefficient sequence with certified tails."""

    sequence: CorrelationSequence
    chaos_cap: int
    tails: dict[int, Fraction]


def _exp_partial(x: Fraction, cap: int) -> Fraction:
    total = Fraction(0)
    term = Fraction(1)
    for k in range(1, cap + 1):
        term = term * x / k
        total += term
    return total


def _exp_tail_bound(x_abs: Fraction, cap: int) -> Fraction:
    # geometric domination of the remaining series terms
    if x_abs >= cap + 2:
        raise ValueError("tail bound needs |rho| < cap + 2")
    lead = x_abs ** (cap + 1) / math.factorial(cap + 1)
    return lead / (1 - x_abs / (cap + 2))


def chaos_exp_coefficients(seq: CorrelationSequence, chaos_cap: int) -> ChaosCoefficients:
    """Coefficients of the truncated exponential of the spectral measure.

    The k-fold convolution power of the base measure has coefficients
    ``rho(n)^k``, so the order-``K`` truncation of the Fock exponential has
    coefficients ``sum_{k=1..K} rho(n)^k / k!``.  Requires ``rho(0) = 1``.
    """
    if chaos_cap < 1:
        raise ValueError("chaos_cap must be at least 1")
    if 0 not in seq.entries or seq.entry(0) != (Fraction(1), Fraction(1)):
        raise ValueError("input must be normalized: rho(0) must be exactly 1")
    entries = {}
    tails = {}
    for n, (a, b) in seq.entries.items():
        lo = _exp_partial(a, chaos_cap)
        hi = _exp_partial(b, chaos_cap)
        entries[n] = (min(lo, hi), max(lo, hi))
        tails[n] = _exp_tail_bound(max(abs(a), abs(b)), chaos_cap)
    out = CorrelationSequence(
        entries=entries,
        norm_sq=_exp_partial(Fraction(1), chaos_cap),
        subject=f"chaos<= {chaos_cap} of ({seq.subject})",
    )
    return ChaosCoefficients(sequence=out, chaos_cap=chaos_cap, tails=tails)
