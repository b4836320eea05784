"""Simplex iteration engines.

Four pivot rules share one loop:

* ``DANTZIG`` -- classic single pivot on the most negative reduced cost.
* ``LONGEST_STEP`` -- single pivot on the candidate with the largest
  ratio-test step.
* ``DOUBLE`` -- the double-pivot rule: first entering variable by
  Dantzig's rule, second by longest step (second-largest when they
  coincide), values of both resolved exactly by the two-variable
  sub-problem; applies a two-column basis exchange when the winning
  vertex has two positive coordinates, a single exchange otherwise.
* ``TWO_MOST_NEGATIVE`` -- compound variant that enters the two most
  negative reduced-cost columns in sequence within one iteration (the
  second only if it still improves after the first exchange).

Every iteration records the statistics that feed the iteration-bound
audit: the smallest improving-cost magnitude and the longest available
step.  A stall guard switches to Bland least-index pivots whenever the
objective fails to decrease for a window of iterations, which rules out
cycling on degenerate instances, and restores the configured rule as soon
as strict progress resumes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .lp_core import (
    LPError,
    SingularBasis,
    StandardFormLP,
    Tolerances,
    assemble_point,
    basic_solution,
    check_feasible_start,
    default_tolerances,
    factor_basis,
    reduced_costs,
)
from .pivot_rules import (
    CandidateSteps,
    RatioResult,
    candidate_steps,
    dantzig_entering,
    ratio_test,
    two_most_negative,
)
from .two_dim import TwoDimLP, Vertex2D, partition_rows, rank_vertices


class UnboundedDirection(LPError):
    """An entering column with negative reduced cost has no blocking row."""

    def __init__(self, entering: int):
        super().__init__(f"column {entering + 1} certifies an improving ray")
        self.entering = entering


class PivotRule(Enum):
    DANTZIG = "dantzig"
    LONGEST_STEP = "longest-step"
    DOUBLE = "double"
    TWO_MOST_NEGATIVE = "two-most-negative"


class Status(Enum):
    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration-limit"
    NUMERICAL_FAILURE = "numerical-failure"


@dataclass(frozen=True)
class SolveLimits:
    max_iterations: int = 1_000_000
    stall_window: int = 50

    def __post_init__(self):
        if self.max_iterations < 1 or self.stall_window < 1:
            raise ValueError("limits must be >= 1")


@dataclass
class TrackerStats:
    """Run statistics feeding the iteration-bound audit.

    gamma_d0: largest improving-cost magnitude at the first iteration;
    delta_d: smallest improving-cost magnitude over all iterations;
    gamma_ell: smallest over iterations of the longest candidate step.
    All values are recorded as floats even under the rational backend.
    """

    gamma_d0: Optional[float] = None
    delta_d: Optional[float] = None
    gamma_ell: Optional[float] = None
    per_iteration_obj: list = field(default_factory=list)
    double_steps: list = field(default_factory=list)
    degenerate: bool = False


@dataclass(frozen=True)
class IterationRecord:
    k: int
    z: float
    branch: str
    entering: tuple
    leaving: tuple
    steps: tuple
    dec_achieved: Optional[float] = None
    dec_dantzig: Optional[float] = None
    dec_longest: Optional[float] = None


@dataclass(eq=False)
class SolveResult:
    status: Status
    x: np.ndarray
    z: object
    iterations: int
    single_pivots: int
    double_pivots: int
    trackers: TrackerStats
    basis: tuple
    trace: Optional[list] = None


@dataclass(eq=False)
class Iterate:
    """A basic feasible solution with its factorization and reduced costs."""

    basis: object
    xB: np.ndarray
    z: object
    cbarN: np.ndarray


def make_iterate(lp: StandardFormLP, basis, tol: Optional[Tolerances] = None) -> Iterate:
    """Build the full iterate state for a basis (or basis index list)."""
    tol = tol or default_tolerances(lp.backend)
    if not hasattr(basis, "solve"):
        basis = factor_basis(lp, basis, tol)
    xB = basic_solution(lp, basis)
    cB = lp.c[list(basis.basic)]
    z = cB.dot(xB)
    cbarN = reduced_costs(lp, basis)
    return Iterate(basis, xB, z, cbarN)


@dataclass(frozen=True)
class _StepInfo:
    entering: int
    leaving: int
    step: object
    row: int


def single_pivot_step(lp: StandardFormLP, it: Iterate, enter_pos: int,
                      tol: Optional[Tolerances] = None,
                      column: Optional[np.ndarray] = None,
                      ratio: Optional[RatioResult] = None):
    """One standard exchange: enter the nonbasic at position ``enter_pos``.

    Returns (new iterate, step info).  Raises UnboundedDirection when the
    entering column has no blocking row.  A zero step (degenerate pivot)
    is legal and still exchanges the basis.
    """
    tol = tol or default_tolerances(lp.backend)
    entering = it.basis.nonbasic[enter_pos]
    if column is None:
        column = it.basis.solve(lp.A[:, entering])
    if ratio is None:
        ratio = ratio_test(it.xB, column, tol)
    if ratio.is_unbounded:
        raise UnboundedDirection(entering)
    row = ratio.leaving_row
    leaving = it.basis.basic[row]
    new_basic = list(it.basis.basic)
    new_basic[row] = entering
    new_it = make_iterate(lp, new_basic, tol)
    return new_it, _StepInfo(entering, leaving, ratio.step, row)


@dataclass(eq=False)
class _Outcome:
    iterate: Iterate
    kind: str                   # 'single' | 'double'
    branch: str                 # trace label
    entering: tuple
    leaving: tuple
    steps: tuple
    dec_dantzig: Optional[float] = None
    dec_longest: Optional[float] = None


def _single_outcome(lp, it, pos, tol, branch, column=None, ratio=None) -> _Outcome:
    new_it, info = single_pivot_step(lp, it, pos, tol, column=column, ratio=ratio)
    return _Outcome(new_it, "single", branch, (info.entering,), (info.leaving,),
                    (float(info.step),))


def _double_step(lp: StandardFormLP, it: Iterate, cand: CandidateSteps,
                 tol: Tolerances) -> _Outcome:
    """One iteration of the double-pivot rule (two or more candidates)."""
    p1 = dantzig_entering(it.cbarN, tol)
    i1 = cand.positions.index(p1)
    r1 = cand.ratios[i1]
    j1 = it.basis.nonbasic[p1]
    if r1.is_unbounded:
        raise UnboundedDirection(j1)

    p2 = None
    best_step = None
    for pos, ratio in zip(cand.positions, cand.ratios):
        if pos == p1:
            continue
        if best_step is None or ratio.step > best_step:
            p2, best_step = pos, ratio.step
    i2 = cand.positions.index(p2)
    r2 = cand.ratios[i2]
    j2 = it.basis.nonbasic[p2]
    if r2.is_unbounded:
        raise UnboundedDirection(j2)

    cbar1 = it.cbarN[p1]
    cbar2 = it.cbarN[p2]
    col1 = cand.columns[:, i1]
    col2 = cand.columns[:, i2]
    zero = cbar1 * 0
    special1 = Vertex2D(r1.step, zero, (r1.leaving_row,), cbar1 * r1.step)
    special2 = Vertex2D(zero, r2.step, (r2.leaving_row,), cbar2 * r2.step)
    dec_dantzig = -float(cbar1 * r1.step)
    dec_longest = -float(cbar2 * r2.step)

    sub = TwoDimLP(col1, col2, it.xB, cbar1, cbar2)
    part = partition_rows(sub, tol)
    vertices = rank_vertices(sub, part, special1, special2, tol, prune=True)

    for v in vertices:
        x1_active = v.x1 > 0 and not tol.is_zero_level(v.x1)
        x2_active = v.x2 > 0 and not tol.is_zero_level(v.x2)
        try:
            if x1_active and x2_active:
                if len(v.binding) != 2:
                    continue
                ra, rb = v.binding
                leave_a, leave_b = it.basis.basic[ra], it.basis.basic[rb]
                new_basic = list(it.basis.basic)
                new_basic[ra] = j1
                new_basic[rb] = j2
                new_it = make_iterate(lp, new_basic, tol)
                out = _Outcome(new_it, "double", "double", (j1, j2),
                               (leave_a, leave_b), (float(v.x1), float(v.x2)))
            elif x2_active:
                out = _single_outcome(lp, it, p2, tol, "double",
                                      column=col2, ratio=r2)
            else:
                # x1-only vertex, or the origin: degenerate single on j1
                out = _single_outcome(lp, it, p1, tol, "double",
                                      column=col1, ratio=r1)
        except SingularBasis:
            continue
        out.dec_dantzig = dec_dantzig
        out.dec_longest = dec_longest
        return out
    # every vertex failed to factor: plain Dantzig pivot as last resort
    out = _single_outcome(lp, it, p1, tol, "double", column=col1, ratio=r1)
    out.dec_dantzig = dec_dantzig
    out.dec_longest = dec_longest
    return out


def _two_most_negative_step(lp: StandardFormLP, it: Iterate, cand: CandidateSteps,
                            tol: Tolerances) -> _Outcome:
    """Compound iteration entering the two most negative columns in turn.

    The second column enters only if its reduced cost is still improving
    after the first exchange.
    """
    p1, p2 = two_most_negative(it.cbarN, tol)
    j2 = it.basis.nonbasic[p2]
    i1 = cand.positions.index(p1)
    mid_it, info1 = single_pivot_step(lp, it, p1, tol,
                                      column=cand.columns[:, i1],
                                      ratio=cand.ratios[i1])
    p2_mid = mid_it.basis.nonbasic.index(j2)
    if not tol.is_improving(mid_it.cbarN[p2_mid]):
        return _Outcome(mid_it, "single", "two-most-negative",
                        (info1.entering,), (info1.leaving,), (float(info1.step),))
    new_it, info2 = single_pivot_step(lp, mid_it, p2_mid, tol)
    return _Outcome(new_it, "double", "two-most-negative",
                    (info1.entering, info2.entering),
                    (info1.leaving, info2.leaving),
                    (float(info1.step), float(info2.step)))


def _bland_step(lp: StandardFormLP, it: Iterate, tol: Tolerances) -> _Outcome:
    """Least-index entering, ratio ties broken by least basic variable index."""
    enter_pos = None
    for p in range(len(it.cbarN)):
        if tol.is_improving(it.cbarN[p]):
            enter_pos = p
            break
    entering = it.basis.nonbasic[enter_pos]
    column = it.basis.solve(lp.A[:, entering])
    base = ratio_test(it.xB, column, tol)
    if base.is_unbounded:
        raise UnboundedDirection(entering)
    row = base.leaving_row
    slack = tol.eps_ratio * (1 + abs(float(base.step)))
    for i in range(len(column)):
        if tol.is_pivot(column[i]):
            r = it.xB[i] / column[i]
            if r <= base.step + slack and it.basis.basic[i] < it.basis.basic[row]:
                row = i
    leaving = it.basis.basic[row]
    new_basic = list(it.basis.basic)
    new_basic[row] = entering
    new_it = make_iterate(lp, new_basic, tol)
    return _Outcome(new_it, "single", "bland", (entering,), (leaving,),
                    (float(max(it.xB[row] / column[row], 0)),))


def _result(status, lp, it, iterations, singles, doubles, trackers, trace):
    return SolveResult(
        status=status,
        x=assemble_point(lp, it.basis, it.xB),
        z=it.z,
        iterations=iterations,
        single_pivots=singles,
        double_pivots=doubles,
        trackers=trackers,
        basis=it.basis.basic,
        trace=trace,
    )


def solve(lp: StandardFormLP, initial_basis, rule: PivotRule = PivotRule.DOUBLE,
          limits: Optional[SolveLimits] = None,
          tol: Optional[Tolerances] = None,
          record_trace: bool = False) -> SolveResult:
    """Run the selected pivot rule from a feasible starting basis.

    Raises InfeasibleStart when the initial basic solution has a negative
    component, and SingularBasis when the initial columns cannot be
    factored.  Unboundedness, iteration limits and mid-run factorization
    failures are reported through ``SolveResult.status``.
    """
    tol = tol or default_tolerances(lp.backend)
    limits = limits or SolveLimits()
    it = make_iterate(lp, list(initial_basis), tol)
    check_feasible_start(lp, it.basis, it.xB, tol)

    trackers = TrackerStats()
    trace: Optional[list] = [] if record_trace else None
    singles = doubles = 0
    bland_mode = False
    no_improve = 0

    for k in range(limits.max_iterations + 1):
        trackers.per_iteration_obj.append(float(it.z))
        cand = candidate_steps(lp, it.basis, it.xB, it.cbarN, tol)
        if not cand.positions:
            return _result(Status.OPTIMAL, lp, it, k, singles, doubles,
                           trackers, trace)
        if k >= limits.max_iterations:
            return _result(Status.ITERATION_LIMIT, lp, it, k, singles,
                           doubles, trackers, trace)

        delta_k = min(float(-it.cbarN[p]) for p in cand.positions)
        gamma_k = max(float(r.step) for r in cand.ratios)
        if k == 0:
            trackers.gamma_d0 = max(float(-it.cbarN[p]) for p in cand.positions)
        trackers.delta_d = delta_k if trackers.delta_d is None \
            else min(trackers.delta_d, delta_k)
        trackers.gamma_ell = gamma_k if trackers.gamma_ell is None \
            else min(trackers.gamma_ell, gamma_k)

        z_before = it.z
        try:
            if bland_mode:
                out = _bland_step(lp, it, tol)
            elif rule is PivotRule.DANTZIG or len(cand.positions) == 1:
                pos = dantzig_entering(it.cbarN, tol)
                i = cand.positions.index(pos)
                out = _single_outcome(lp, it, pos, tol, "single",
                                      column=cand.columns[:, i],
                                      ratio=cand.ratios[i])
            elif rule is PivotRule.LONGEST_STEP:
                best = max(range(len(cand.positions)),
                           key=lambda i: (cand.ratios[i].step, -i))
                out = _single_outcome(lp, it, cand.positions[best], tol,
                                      "single", column=cand.columns[:, best],
                                      ratio=cand.ratios[best])
            elif rule is PivotRule.DOUBLE:
                out = _double_step(lp, it, cand, tol)
            else:
                out = _two_most_negative_step(lp, it, cand, tol)
        except UnboundedDirection:
            return _result(Status.UNBOUNDED, lp, it, k, singles, doubles,
                           trackers, trace)
        except SingularBasis:
            return _result(Status.NUMERICAL_FAILURE, lp, it, k, singles,
                           doubles, trackers, trace)

        it = out.iterate
        if out.kind == "double":
            doubles += 1
        else:
            singles += 1
        dec = float(z_before) - float(it.z)
        if out.dec_dantzig is not None:
            trackers.double_steps.append(
                (k, dec, out.dec_dantzig, out.dec_longest))
        if trace is not None:
            trace.append(IterationRecord(
                k, float(z_before), out.branch, out.entering, out.leaving,
                out.steps, dec, out.dec_dantzig, out.dec_longest))

        if tol.decreased(it.z, z_before):
            no_improve = 0
            bland_mode = False
        else:
            trackers.degenerate = True
            no_improve += 1
            if no_improve >= limits.stall_window:
                bland_mode = True

    raise AssertionError("unreachable")
