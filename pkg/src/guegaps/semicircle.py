"""Semicircle law: density, CDF, quantiles, and gap renormalisation.

The local spacing predicted by the semicircle law at bulk index i of an
N-by-N matrix is sqrt(2/N) / rho(q_{i/N}), where q_p is the p-quantile of
the semicircle density rho(x) = 2*sqrt(1-x^2)/pi.  Dividing the raw gap
by that scale gives the renormalised gap, which is O(1) in the bulk with
mean tending to 1.  Indices are 1-based to match the ordered-eigenvalue
convention lambda_1 <= ... <= lambda_N.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .eigen import Spectrum

QUANTILE_TOL = 1e-12
QUANTILE_MAX_STEPS = 200
EDGE_DENSITY_FLOOR = 1e-8


class EdgeProximityError(ValueError):
    """Requested index is too close to the spectral edge for a gap scale."""


@dataclass(frozen=True)
class GapObservations:
    """Pooled renormalised-gap observations with provenance."""

    big_n: int
    index_range: tuple[int, int]
    values: np.ndarray = field(repr=False)
    provenance: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", v)
        i_lo, i_hi = self.index_range
        if not (1 <= i_lo <= i_hi <= self.big_n - 1):
            raise ValueError("index_range must satisfy 1 <= i_lo <= i_hi <= N-1")


def sc_density(x: float) -> float:
    """Semicircle density 2*sqrt(max(1-x^2, 0))/pi."""
    return 2.0 * np.sqrt(max(1.0 - x * x, 0.0)) / np.pi


def sc_cdf(x: float) -> float:
    """Semicircle CDF, clamped to [0, 1] outside the support."""
    if x <= -1.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    return 0.5 + (x * np.sqrt(1.0 - x * x) + np.arcsin(x)) / np.pi


def sc_quantile(p: float) -> float:
    """Solve sc_cdf(q) = p to 1e-12 by safeguarded Newton on [-1, 1].

    Newton uses the density as derivative; whenever a step leaves the
    current bracket (which happens near the edges where the density
    degenerates) the step is replaced by bisection.
    """
    if not 0.0 < p < 1.0:
        raise ValueError("quantile level must lie in (0, 1)")
    lo, hi = -1.0, 1.0
    x = 2.0 * p - 1.0  # crude but bracketed start
    for _ in range(QUANTILE_MAX_STEPS):
        f = sc_cdf(x) - p
        if abs(f) <= QUANTILE_TOL:
            return x
        if f > 0:
            hi = x
        else:
            lo = x
        d = sc_density(x)
        if d > 0:
            step = x - f / d
        else:
            step = x
        if lo < step < hi:
            x = step
        else:
            x = 0.5 * (lo + hi)
        if hi - lo <= np.finfo(float).eps * 2.0:
            return x
    raise RuntimeError("quantile iteration failed to converge")  # pragma: no cover


def gap_scale(i: int, big_n: int) -> float:
    """Predicted spacing sqrt(2/N) / rho(q_{i/N}) at 1-based bulk index i."""
    if not 1 <= i <= big_n - 1:
        raise ValueError(f"index i={i} out of range [1, {big_n - 1}]")
    rho = sc_density(sc_quantile(i / big_n))
    if rho < EDGE_DENSITY_FLOOR:
        raise EdgeProximityError(
            f"density {rho:.3e} at quantile {i}/{big_n} is below {EDGE_DENSITY_FLOOR:.0e}"
        )
    return np.sqrt(2.0 / big_n) / rho


def renormalize_gaps(
    spec: Spectrum, i_lo: int, i_hi: int, provenance: str = ""
) -> GapObservations:
    """Renormalised gaps (lambda_{i+1} - lambda_i) / S(i, N) for i in [i_lo, i_hi]."""
    big_n = spec.n
    if not (1 <= i_lo <= i_hi <= big_n - 1):
        raise ValueError("need 1 <= i_lo <= i_hi <= N-1")
    idx = np.arange(i_lo, i_hi + 1)
    scales = np.array([gap_scale(int(i), big_n) for i in idx])
    raw = spec.values[idx] - spec.values[idx - 1]
    return GapObservations(
        big_n=big_n,
        index_range=(i_lo, i_hi),
        values=raw / scales,
        provenance=provenance,
    )
