"""Worst-case iteration-count formulas and the post-run audit.

The audit-side bound uses run statistics: with every iteration decreasing
the objective by at least ``delta_d * gamma_ell`` (smallest improving-cost
magnitude times smallest longest-step), an optimal run needs at most
``ceil((z0 - z*) / (delta_d * gamma_ell))`` iterations.

The a-priori bounds use the Assumption-style constants ``delta <= x_i <=
gamma`` on all basic feasible solution components.  Those constants are
not computable from instance data in general, so they are always caller
supplied.  All logarithms are natural logarithms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .lp_core import LPError


class DomainError(LPError):
    """Bound formula evaluated outside its domain."""


def _ceil(value) -> int:
    return math.ceil(value)


def iteration_bound_gap(z0, z_star, delta_d, gamma_ell) -> int:
    """ceil((z0 - z*) / (delta_d * gamma_ell)); 0 when the gap is closed."""
    denom = delta_d * gamma_ell
    if denom <= 0:
        raise DomainError("delta_d * gamma_ell must be positive")
    gap = z0 - z_star
    if gap <= 0:
        return 0
    return _ceil(gap / denom)


def iteration_bound_initial_costs(gamma_d0, x_star_l1, delta_d, gamma_ell) -> int:
    """ceil(gamma_d0 * ||x*||_1 / (delta_d * gamma_ell)).

    Upper-bounds the gap-based bound when all inputs come from one run,
    since z0 - z* <= gamma_d0 * ||x*||_1.
    """
    denom = delta_d * gamma_ell
    if denom <= 0:
        raise DomainError("delta_d * gamma_ell must be positive")
    num = gamma_d0 * x_star_l1
    if num <= 0:
        return 0
    return _ceil(num / denom)


def iteration_bound_range_ratio(m: int, n: int, gamma, delta) -> int:
    """(n - m) * ceil(t * ln t) with t = m * gamma / delta.

    ``gamma``/``delta`` bound all basic-solution components from above and
    below.  When t <= 1 the log term is non-positive and the value is
    clamped at n - m.
    """
    if n <= m:
        raise DomainError("need n > m")
    if delta <= 0 or gamma < delta:
        raise DomainError("need gamma >= delta > 0")
    ratio = m * gamma / delta
    if ratio <= 1:
        return n - m
    t = float(ratio) * math.log(float(ratio))
    return (n - m) * _ceil(t)


def iteration_bound_unimodular(m: int, n: int, b_l1) -> int:
    """Bound for a totally unimodular A with integral b: basic solutions
    are integral (delta >= 1) and bounded by ||b||_1 (gamma <= ||b||_1)."""
    if b_l1 < 1:
        raise DomainError("need ||b||_1 >= 1")
    return iteration_bound_range_ratio(m, n, b_l1, 1)


def iteration_bound_unimodular_rhs(m: int, n: int) -> int:
    """Unimodular bound when b is itself unimodular: gamma <= m."""
    return iteration_bound_range_ratio(m, n, m, 1)


def iteration_bound_discounted_mdp(m: int, n: int, theta) -> int:
    """Bound for discounted Markov decision problems: delta >= 1 and
    gamma <= m / (1 - theta) for discount rate theta < 1."""
    if not 0 <= theta < 1:
        raise DomainError("need 0 <= theta < 1")
    return iteration_bound_range_ratio(m, n, m / (1 - theta), 1)


def dantzig_cube_bound(m: int) -> int:
    """ceil((2 m ln 2) 2^m): the range-ratio bound specialized to the
    unit-cost Klee-Minty cube under Dantzig's rule, whose effective
    range product is 2^m over two optimal nonbasic scenarios."""
    if m < 1:
        raise DomainError("need m >= 1")
    return _ceil(2 * m * math.log(2) * (2 ** m))


@dataclass(frozen=True)
class AuditReport:
    iterations: int
    bound: int
    passed: bool
    z0: float
    z_star: float
    delta_d: float
    gamma_ell: float


def audit_run(result, lp, z_star) -> AuditReport:
    """Check an optimal run against its own gap-based iteration bound."""
    z0 = result.trackers.per_iteration_obj[0] if result.trackers.per_iteration_obj \
        else float(result.z)
    if result.iterations == 0:
        return AuditReport(0, 0, True, z0, float(z_star), 0.0, 0.0)
    delta_d = result.trackers.delta_d
    gamma_ell = result.trackers.gamma_ell
    bound = iteration_bound_gap(z0, float(z_star), delta_d, gamma_ell)
    return AuditReport(result.iterations, bound, result.iterations <= bound,
                       z0, float(z_star), delta_d, gamma_ell)
