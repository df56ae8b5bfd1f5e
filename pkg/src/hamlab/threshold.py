"""Root-solve for the minimum-degree-2 threshold and the window bounds.

The threshold probability p0 is the unique root in [0, 1] of

    sum_v (1 - p)^{d(v)} * log n = 1,

which exists because the left side is n log n at p = 0, zero at p = 1, and
strictly decreasing in between. All powers are evaluated in the log domain
to survive d near n and p near log n / n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .exceptions import InvalidParameterError
from .hostgraph import HostGraph, min_degree_floor

RESIDUAL_TOL = 1e-9
MAX_BISECT = 200


@dataclass
class DegreeProfile:
    """Multiset of host degrees; everything the threshold equation needs."""

    degrees: np.ndarray
    n: int
    m: int

    @classmethod
    def from_degrees(cls, degrees: Iterable[int]) -> "DegreeProfile":
        arr = np.asarray(sorted(degrees), dtype=np.int64)
        n = int(arr.size)
        if n == 0:
            raise InvalidParameterError("empty degree profile")
        if arr.min() < 1 or arr.max() > n - 1:
            raise InvalidParameterError("degrees must lie in [1, n-1]")
        total = int(arr.sum())
        if total % 2 != 0:
            raise InvalidParameterError("degree sum must be even")
        return cls(arr, n, total // 2)

    @classmethod
    def from_host(cls, g: HostGraph) -> "DegreeProfile":
        return cls.from_degrees(g.degrees.tolist())

    @classmethod
    def regular(cls, n: int, d: int) -> "DegreeProfile":
        if (n * d) % 2 != 0:
            raise InvalidParameterError("n*d must be even")
        return cls.from_degrees([d] * n)

    def min_degree(self) -> int:
        return int(self.degrees[0])


@dataclass
class ThresholdSolution:
    p0: float
    residual: float
    T: int
    T_prime: int
    omega: float

    def to_dict(self) -> dict:
        return {"p0": self.p0, "residual": self.residual, "T": self.T,
                "T_prime": self.T_prime, "omega": self.omega}


def survival_sum(profile: DegreeProfile, p: float) -> float:
    """sum_v (1-p)^{d(v)}, computed as exp(d * log1p(-p))."""
    if p >= 1.0:
        return 0.0
    if p <= 0.0:
        return float(profile.n)
    return float(np.exp(profile.degrees * math.log1p(-p)).sum())


def threshold_lhs(profile: DegreeProfile, p: float) -> float:
    return survival_sum(profile, p) * math.log(profile.n)


def solve_p0(profile: DegreeProfile, omega: Optional[float] = None) -> ThresholdSolution:
    """Bisection on [0, 1]; monotonicity guarantees existence and uniqueness.

    Iterates until the bracket is at machine scale, then checks the residual
    against the pinned tolerance. T and T' are the window endpoints
    (p0 -/+ omega/n) * m rounded to the nearest step and clamped to [0, m].
    """
    if profile.n < 3:
        raise InvalidParameterError("need n >= 3")
    if omega is None:
        from .process import default_omega
        omega = default_omega(profile.n)
    lo, hi = 0.0, 1.0
    for _ in range(MAX_BISECT):
        mid = 0.5 * (lo + hi)
        if threshold_lhs(profile, mid) >= 1.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-16 * max(hi, 1e-300):
            break
    p0 = 0.5 * (lo + hi)
    residual = abs(threshold_lhs(profile, p0) - 1.0)
    m = profile.m
    T = min(max(int(round((p0 - omega / profile.n) * m)), 0), m)
    T_prime = min(max(int(round((p0 + omega / profile.n) * m)), 0), m)
    return ThresholdSolution(p0, residual, T, T_prime, omega)


def regular_closed_form(n: int, d: int) -> float:
    """For d-regular profiles the equation inverts to 1 - (n log n)^(-1/d)."""
    return 1.0 - (n * math.log(n)) ** (-1.0 / d)


def expected_low_degree_count(profile: DegreeProfile, p: float) -> float:
    """Exact E[#vertices of degree < 2 in the Bernoulli subgraph].

    Per vertex: (1-p)^d + d p (1-p)^(d-1), the isolated and degree-one
    binomial terms without any asymptotic simplification.
    """
    if not 0 <= p <= 1:
        raise InvalidParameterError(f"need 0 <= p <= 1, got {p}")
    if p >= 1.0:
        return 0.0
    if p <= 0.0:
        return float(profile.n)
    d = profile.degrees.astype(np.float64)
    log1m = math.log1p(-p)
    iso = np.exp(d * log1m)
    one = d * p * np.exp((d - 1) * log1m)
    return float((iso + one).sum())


def check_window_bounds(profile: DegreeProfile, omega: float) -> tuple[bool, bool]:
    """Evaluate the survival sum at p0 -/+ omega/n against e^{+/-omega/2} / log n.

    Returns (below_ok, above_ok): the lower-window sum should be at least
    e^{omega/2}/log n and the upper-window sum at most e^{-omega/2}/log n.
    Comparisons carry a 1e-9 relative slack so the degenerate omega = 0 case
    reports equality instead of tripping on the solver residual.
    """
    if omega < 0:
        raise InvalidParameterError(f"need omega >= 0, got {omega}")
    sol = solve_p0(profile, omega)
    n = profile.n
    p_below = sol.p0 - omega / n
    p_above = sol.p0 + omega / n
    if not (0 < p_below < 1 and 0 < p_above < 1):
        raise InvalidParameterError(
            f"window endpoints {p_below}, {p_above} fall outside (0, 1)")
    log_n = math.log(n)
    below_ok = survival_sum(profile, p_below) >= math.exp(omega / 2) / log_n * (1 - 1e-9)
    above_ok = survival_sum(profile, p_above) <= math.exp(-omega / 2) / log_n * (1 + 1e-9)
    return below_ok, above_ok


def corollary_probability(beta: float, c: float) -> float:
    """Limit probability e^{-e^{-beta c}} for regular Dirac hosts."""
    if not 0.5 < beta <= 1:
        raise InvalidParameterError(f"need 1/2 < beta <= 1, got {beta}")
    return math.exp(-math.exp(-beta * c))


def p_from_c(n: int, beta: float, c: float) -> float:
    """Sweep parametrization p = (log n + log log n + c) / (beta n)."""
    if n < 3:
        raise InvalidParameterError("need n >= 3 for log log n")
    p = (math.log(n) + math.log(math.log(n)) + c) / (beta * n)
    if not 0 < p < 1:
        raise InvalidParameterError(f"p={p} outside (0, 1) for n={n}, beta={beta}, c={c}")
    return p


def dirac_profile_bounds_ok(profile: DegreeProfile) -> bool:
    """log n / n <= p0 <= 2 log n / n, as guaranteed for min degree >= n/2."""
    sol = solve_p0(profile)
    n = profile.n
    return math.log(n) / n <= sol.p0 <= 2 * math.log(n) / n
