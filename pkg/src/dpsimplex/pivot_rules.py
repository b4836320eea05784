"""Entering-variable rules and the ratio test.

All selection functions work on positions into the sorted nonbasic index
vector N, so "lowest position" and "lowest global column index" coincide.
Every tie is broken toward the lowest index, which keeps runs reproducible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .lp_core import Basis, StandardFormLP, Tolerances


@dataclass(frozen=True)
class RatioResult:
    """Outcome of a ratio test along one entering column.

    ``leaving_row`` is a row position into the basis (None when the column
    certifies an improving ray), ``step`` the admissible increase of the
    entering variable (math.inf on a ray).
    """

    leaving_row: Optional[int]
    step: object

    @property
    def is_unbounded(self) -> bool:
        return self.leaving_row is None


UNBOUNDED = RatioResult(None, math.inf)


class EnteringChoice(NamedTuple):
    """The two entering picks of a double iteration (global column ids)."""

    j1: int
    j2: Optional[int]
    step_j1: object
    step_j2: object


class CandidateSteps(NamedTuple):
    """Ratio-test data for every improving nonbasic column.

    positions: N-positions with reduced cost below the improvement
    threshold; columns: the corresponding A_B^{-1} A_j, one per candidate;
    ratios: the RatioResult per candidate.
    """

    positions: list
    columns: np.ndarray
    ratios: list


def dantzig_entering(cbar_N: np.ndarray, tol: Tolerances) -> Optional[int]:
    """Position of the most negative reduced cost, or None at optimality.

    Ties go to the lowest position (= lowest global index for sorted N).
    """
    if len(cbar_N) == 0:
        return None
    if cbar_N.dtype != object:
        pos = int(np.argmin(cbar_N))
    else:
        pos = min(range(len(cbar_N)), key=lambda p: (cbar_N[p], p))
    return pos if tol.is_improving(cbar_N[pos]) else None


def ratio_test(b_bar: np.ndarray, column: np.ndarray, tol: Tolerances) -> RatioResult:
    """Smallest b_bar[i]/column[i] over rows with a usable positive pivot.

    Ties pick the lowest row; no usable row means the column is an
    improving ray (UNBOUNDED).  Steps are clamped at zero so a slightly
    negative basic value yields a degenerate rather than negative step.
    """
    if column.dtype != object:
        thresholds = tol.eps_ratio * (1.0 + np.abs(column))
        mask = column > thresholds
        if not mask.any():
            return UNBOUNDED
        ratios = np.full(len(column), np.inf)
        ratios[mask] = b_bar[mask] / column[mask]
        row = int(np.argmin(ratios))
        return RatioResult(row, max(float(ratios[row]), 0.0))
    best_row = None
    best = None
    for i, a in enumerate(column):
        if tol.is_pivot(a):
            r = b_bar[i] / a
            if best is None or r < best:
                best, best_row = r, i
    if best_row is None:
        return UNBOUNDED
    if best < 0:
        best = type(best)(0)
    return RatioResult(best_row, best)


def candidate_steps(lp: StandardFormLP, basis: Basis, b_bar: np.ndarray,
                    cbar_N: np.ndarray, tol: Tolerances) -> CandidateSteps:
    """Ratio tests for every improving candidate column, solved in one batch."""
    positions = [p for p in range(len(cbar_N)) if tol.is_improving(cbar_N[p])]
    if not positions:
        return CandidateSteps([], np.empty((lp.m, 0)), [])
    cols = lp.A[:, [basis.nonbasic[p] for p in positions]]
    abar = basis.solve_columns(cols)
    ratios = [ratio_test(b_bar, abar[:, k], tol) for k in range(len(positions))]
    return CandidateSteps(positions, abar, ratios)


def longest_step_entering(lp: StandardFormLP, basis: Basis, b_bar: np.ndarray,
                          cbar_N: np.ndarray, tol: Tolerances,
                          exclude: Optional[int] = None,
                          candidates: Optional[CandidateSteps] = None):
    """The improving candidate whose ratio-test step is largest.

    Returns (position, step) or None if no candidate.  An unbounded step
    (math.inf) always wins; ties go to the lowest position.  ``exclude``
    drops one position from consideration, which implements the
    second-largest-step fallback when the longest step coincides with the
    most negative pick.
    """
    cand = candidates or candidate_steps(lp, basis, b_bar, cbar_N, tol)
    best = None
    for pos, ratio in zip(cand.positions, cand.ratios):
        if pos == exclude:
            continue
        if best is None or ratio.step > best[1]:
            best = (pos, ratio.step)
    return best


def two_most_negative(cbar_N: np.ndarray, tol: Tolerances):
    """Positions of the two most negative reduced costs.

    Returns (j1_pos, j2_pos) with j2_pos None when only one candidate is
    negative, or None at optimality.  Ties go to the lowest position.
    """
    improving = [p for p in range(len(cbar_N)) if tol.is_improving(cbar_N[p])]
    if not improving:
        return None
    improving.sort(key=lambda p: (cbar_N[p], p))
    if len(improving) == 1:
        return improving[0], None
    return improving[0], improving[1]
