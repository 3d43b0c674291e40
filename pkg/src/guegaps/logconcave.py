"""Certificates for unit-mean log-concave random variables on [0, inf).

Such variables are dominated in the convex order by the standard
exponential, which yields the bounds checked here: P(X >= h) <= e^(1-h),
E[X^p] <= p!, P(X <= h) <= 2h, and P(X >= 1) >= 1/e.  A separate bound for
centred log-concave variables with unit second moment, P(|X| > t) <= e^(1-t),
covers standardized sums.  Samples are mean-normalised (or RMS-normalised
for the centred bound) before checking, so the certificates apply exactly to
the normalised variable; the raw sample mean is reported separately by the
experiment layer.

Verdicts are three-way.  "holds": the empirical value satisfies the bound
outright.  "violated-within-noise": it exceeds the bound by at most three
Monte Carlo standard errors, which a one-sided asymptotic bound is allowed
to do at finite N.  "violated": it exceeds the bound beyond that slack.
A report passes iff it is not "violated".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

VERDICT_HOLDS = "holds"
VERDICT_WITHIN_NOISE = "violated-within-noise"
VERDICT_VIOLATED = "violated"

NOISE_SIGMAS = 3.0
DIAGNOSTIC_MIN_SAMPLE = 10**4
DIAGNOSTIC_MIN_BIN_COUNT = 25
DIAGNOSTIC_MIN_BINS = 5
_MAX_HISTOGRAM_BINS = 10**6


@dataclass(frozen=True)
class EmpiricalSample:
    """Flat multiset of real observations plus provenance metadata."""

    values: np.ndarray = field(repr=False)
    metadata: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("sample must be a nonempty 1-d array")
        if not np.all(np.isfinite(v)):
            raise ValueError("sample contains non-finite values")
        object.__setattr__(self, "values", v)

    @property
    def size(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class BoundReport:
    """Outcome of one empirical-vs-bound comparison."""

    bound_name: str
    param: float
    empirical_value: float
    bound_value: float
    mc_stderr: float
    verdict: str

    @classmethod
    def against_upper(cls, name, param, empirical, bound, stderr) -> "BoundReport":
        if empirical <= bound:
            verdict = VERDICT_HOLDS
        elif empirical <= bound + NOISE_SIGMAS * stderr:
            verdict = VERDICT_WITHIN_NOISE
        else:
            verdict = VERDICT_VIOLATED
        return cls(name, param, empirical, bound, stderr, verdict)

    @classmethod
    def against_lower(cls, name, param, empirical, bound, stderr) -> "BoundReport":
        if empirical >= bound:
            verdict = VERDICT_HOLDS
        elif empirical >= bound - NOISE_SIGMAS * stderr:
            verdict = VERDICT_WITHIN_NOISE
        else:
            verdict = VERDICT_VIOLATED
        return cls(name, param, empirical, bound, stderr, verdict)

    @property
    def passed(self) -> bool:
        return self.verdict != VERDICT_VIOLATED

    def csv_row(self) -> str:
        return (
            f"{self.bound_name},{self.param:.17g},{self.empirical_value:.17g},"
            f"{self.bound_value:.17g},{self.mc_stderr:.17g},{self.verdict}"
        )


def exp_upper_tail_bound(h: float) -> float:
    """Exponential-law upper tail e^(1-h); may exceed 1 for h < 1."""
    if h <= 0:
        raise ValueError("h must be positive")
    return math.exp(1.0 - h)


def call_option_integral(h: float) -> float:
    """Quadrature of the hinge payoff (x - (h-1))_+ against e^(-x) dx.

    Equals e^(1-h) in closed form; computed independently by adaptive
    quadrature on [h-1, h+60] so the two routes can be cross-checked.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    a = h - 1.0
    val, _ = integrate.quad(
        lambda x: (x - a) * math.exp(-x), a, h + 60.0, epsabs=1e-13, epsrel=1e-13
    )
    return val


def put_option_integral(h: float) -> float:
    """(1/h) * integral_0^{2h} (2h - x) e^(-x) dx = (2h - 1 + e^(-2h)) / h.

    Uses expm1 so small h does not lose the leading 2h^2 behaviour to
    cancellation.  Always <= min(2h, 2).
    """
    if h <= 0:
        raise ValueError("h must be positive")
    return (2.0 * h + math.expm1(-2.0 * h)) / h


def _mean_normalised(s: EmpiricalSample) -> np.ndarray:
    mean = float(np.mean(s.values))
    if mean <= 0:
        raise ValueError("sample mean must be positive for mean normalisation")
    return s.values / mean


def _binomial_stderr(p_hat: float, n: int) -> float:
    return math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / n)


def _check_sample(s: EmpiricalSample):
    if s.size < 2:
        raise ValueError("sample too small: need at least 2 observations")


def verify_upper_tail(s: EmpiricalSample, h_grid) -> list[BoundReport]:
    """Empirical P(X/mean >= h) against min(1, e^(1-h)) for each h."""
    _check_sample(s)
    x = _mean_normalised(s)
    n = x.size
    reports = []
    for h in h_grid:
        p_hat = float(np.mean(x >= h))
        bound = min(1.0, exp_upper_tail_bound(h))
        reports.append(
            BoundReport.against_upper("upper_tail", h, p_hat, bound, _binomial_stderr(p_hat, n))
        )
    return reports


def verify_lower_tail(s: EmpiricalSample, h_grid) -> list[BoundReport]:
    """Empirical P(X/mean <= h) against 2h for each h."""
    _check_sample(s)
    x = _mean_normalised(s)
    n = x.size
    reports = []
    for h in h_grid:
        if h <= 0:
            raise ValueError("h must be positive")
        p_hat = float(np.mean(x <= h))
        reports.append(
            BoundReport.against_upper("lower_tail", h, p_hat, 2.0 * h, _binomial_stderr(p_hat, n))
        )
    return reports


def verify_moments(s: EmpiricalSample, p_list) -> list[BoundReport]:
    """Empirical E[(X/mean)^p] against p! for each p >= 1."""
    _check_sample(s)
    x = _mean_normalised(s)
    n = x.size
    reports = []
    for p in p_list:
        if p < 1:
            raise ValueError("moment order must be >= 1")
        y = x**p
        m_hat = float(np.mean(y))
        stderr = float(np.std(y, ddof=1)) / math.sqrt(n)
        reports.append(
            BoundReport.against_upper("moment", p, m_hat, float(math.factorial(int(p))), stderr)
        )
    return reports


def verify_gruenbaum(s: EmpiricalSample) -> BoundReport:
    """Empirical P(X >= mean) against the lower bound 1/e."""
    _check_sample(s)
    x = _mean_normalised(s)
    p_hat = float(np.mean(x >= 1.0))
    return BoundReport.against_lower(
        "gruenbaum", 1.0, p_hat, 1.0 / math.e, _binomial_stderr(p_hat, x.size)
    )


def verify_lv_tail(s: EmpiricalSample, t_grid) -> list[BoundReport]:
    """Centred-variable tail: P(|X/rms| > t) against e^(1-t).

    The sample is interpreted as already centred; it is divided by its
    empirical root-mean-square so the unit-second-moment hypothesis holds
    by construction.
    """
    _check_sample(s)
    rms = float(np.sqrt(np.mean(s.values**2)))
    if rms <= 0:
        raise ValueError("sample RMS must be positive")
    x = np.abs(s.values) / rms
    n = x.size
    reports = []
    for t in t_grid:
        if t <= 0:
            raise ValueError("t must be positive")
        p_hat = float(np.mean(x > t))
        reports.append(
            BoundReport.against_upper(
                "lv_tail", t, p_hat, math.exp(1.0 - t), _binomial_stderr(p_hat, n)
            )
        )
    return reports


@dataclass(frozen=True)
class LogConcavityReport:
    """Histogram-curvature diagnostic outcome."""

    consistent: bool
    bin_width: float
    num_bins: int
    num_qualifying: int
    violations: list  # (left edge, second difference, 3*noise threshold)

    @property
    def verdict(self) -> str:
        return "consistent with log-concave" if self.consistent else "not consistent"


def logconcavity_diagnostic(s: EmpiricalSample) -> LogConcavityReport:
    """Check that histogram log-counts have no significantly convex kink.

    Freedman-Diaconis bins; only bins with count >= 25 enter.  Second
    differences of log-counts are taken along the ordered sequence of
    qualifying bins (crossing excluded stretches, so a valley whose floor
    falls under the count threshold is still seen as a convex kink between
    its shoulders).  A bin is flagged when its second difference exceeds
    three times the Poisson noise scale sqrt(1/c_prev + 4/c + 1/c_next).
    This is a consistency heuristic, not a hypothesis test.
    """
    v = s.values
    if v.size < DIAGNOSTIC_MIN_SAMPLE:
        raise ValueError(
            f"sample too small: diagnostic needs >= {DIAGNOSTIC_MIN_SAMPLE} observations"
        )
    q25, q75 = np.percentile(v, [25.0, 75.0])
    iqr = float(q75 - q25)
    if iqr <= 0:
        raise ValueError("sample interquartile range is zero; cannot bin")
    width = 2.0 * iqr / v.size ** (1.0 / 3.0)
    lo, hi = float(np.min(v)), float(np.max(v))
    num_bins = max(1, int(np.ceil((hi - lo) / width)))
    if num_bins > _MAX_HISTOGRAM_BINS:
        raise ValueError("sample range too wide for Freedman-Diaconis binning")
    counts, edges = np.histogram(v, bins=num_bins, range=(lo, lo + num_bins * width))

    qual = np.nonzero(counts >= DIAGNOSTIC_MIN_BIN_COUNT)[0]
    if qual.size < DIAGNOSTIC_MIN_BINS:
        raise ValueError(
            f"only {qual.size} bins reach count >= {DIAGNOSTIC_MIN_BIN_COUNT}; "
            f"need >= {DIAGNOSTIC_MIN_BINS}"
        )
    c = counts[qual].astype(np.float64)
    logs = np.log(c)
    second = logs[2:] - 2.0 * logs[1:-1] + logs[:-2]
    noise = np.sqrt(1.0 / c[:-2] + 4.0 / c[1:-1] + 1.0 / c[2:])
    bad = np.nonzero(second > NOISE_SIGMAS * noise)[0]
    violations = [
        (float(edges[qual[j + 1]]), float(second[j]), float(NOISE_SIGMAS * noise[j]))
        for j in bad
    ]
    return LogConcavityReport(
        consistent=len(violations) == 0,
        bin_width=width,
        num_bins=num_bins,
        num_qualifying=int(qual.size),
        violations=violations,
    )
