"""Exact solution of the two-variable sub-problem.

A double iteration reduces the choice of the next vertex to

    min  cost1*x1 + cost2*x2
    s.t. col1*x1 + col2*x2 <= rhs,  x1, x2 >= 0,

whose optimum sits on a vertex of a planar polygon.  We enumerate vertices
as intersections of constraint pairs, after pruning rows that provably
cannot be binding, and compare against the two single-pivot axis vertices
and the origin.

Pruning is a heuristic filter over pair enumeration only: every enumerated
vertex is re-checked for feasibility against the full row set, so a pruned
row can never admit an infeasible winner.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .lp_core import LPError, Tolerances
from .pivot_rules import ratio_test


class UnboundedSubproblem(LPError):
    """A negative-cost direction of the sub-problem has no blocking row."""


@dataclass(frozen=True, eq=False)
class TwoDimLP:
    """Data of the two-variable sub-problem.

    col1/col2 are the entering columns mapped through the basis inverse,
    rhs the current basic solution, cost1/cost2 the (negative) reduced
    costs of the two entering candidates.
    """

    col1: np.ndarray
    col2: np.ndarray
    rhs: np.ndarray
    cost1: object
    cost2: object

    @property
    def m(self) -> int:
        return len(self.rhs)


@dataclass(frozen=True)
class Vertex2D:
    """A candidate vertex of the sub-problem polygon.

    ``binding`` lists the original row indices active at the vertex: two
    for a pair intersection, one for an axis (single-pivot) vertex, none
    for the origin.
    """

    x1: object
    x2: object
    binding: tuple
    obj: object


@dataclass(frozen=True)
class RowPartition:
    """Rows split by sign pattern of (col1, col2).

    pos_rows can block an entering step (some entry positive); nonpos_rows
    can never block for x >= 0.  degenerate_rows are pos rows whose rhs is
    at zero level; they bypass normalization-based pruning.
    """

    pos_rows: tuple
    nonpos_rows: tuple
    degenerate_rows: tuple


def partition_rows(p: TwoDimLP, tol: Tolerances) -> RowPartition:
    pos, nonpos, degen = [], [], []
    for i in range(p.m):
        if tol.is_pivot(p.col1[i]) or tol.is_pivot(p.col2[i]):
            pos.append(i)
            if tol.is_zero_level(p.rhs[i]):
                degen.append(i)
        else:
            nonpos.append(i)
    return RowPartition(tuple(pos), tuple(nonpos), tuple(degen))


# ---------------------------------------------------------------------------
# pruning

def _sign(a, tol: Tolerances) -> int:
    if tol.is_pivot(a):
        return 1
    if tol.is_pivot(-a):
        return -1
    return 0


def prune_redundant(rows, tol: Tolerances):
    """Filter normalized rows ``(index, a1, a2)`` with a1*x1 + a2*x2 <= 1.

    Returns the indices of a superset of the rows that can be binding at
    the sub-problem optimum.  Rows are split by coefficient signs into five
    categories, each with its own quick dominance test; rows matching no
    category (both coefficients at zero level after normalization, which
    only happens for extreme scale ratios) are kept unconditionally.
    """
    cat1, cat2, cat3, cat4, cat5, kept = [], [], [], [], [], []
    for idx, a1, a2 in rows:
        s1, s2 = _sign(a1, tol), _sign(a2, tol)
        if s1 > 0 and s2 > 0:
            cat1.append((idx, a1, a2))
        elif s1 > 0 and s2 < 0:
            cat2.append((idx, a1, a2))
        elif s1 < 0 and s2 > 0:
            cat3.append((idx, a1, a2))
        elif s1 > 0:
            cat4.append((idx, a1, a2))
        elif s2 > 0:
            cat5.append((idx, a1, a2))
        else:
            kept.append(idx)

    kept.extend(_prune_both_positive(cat1, tol))
    kept.extend(_prune_sweep(cat2, key_col=1, slope_col=2))
    kept.extend(_prune_sweep(cat3, key_col=2, slope_col=1))
    if cat4:
        kept.append(max(cat4, key=lambda r: (r[1], -r[0]))[0])
    if cat5:
        kept.append(max(cat5, key=lambda r: (r[2], -r[0]))[0])
    return sorted(kept)


def _prune_both_positive(rows, tol: Tolerances):
    # Keep the two extreme-intercept rows, then every row violated at
    # their intersection.  Any row satisfied there is dominated inside the
    # box the two extremes cut out of the quadrant.
    if len(rows) <= 1:
        return [r[0] for r in rows]
    row_i = max(rows, key=lambda r: (r[1], -r[0]))  # smallest x1 intercept
    row_j = max(rows, key=lambda r: (r[2], -r[0]))  # smallest x2 intercept
    if row_i[0] == row_j[0]:
        return [row_i[0]]
    _, a11, a12 = row_i
    _, a21, a22 = row_j
    det = a11 * a22 - a12 * a21
    scale = max(1, abs(a11), abs(a12), abs(a21), abs(a22))
    if tol.is_singular_pivot(det, scale):
        return [r[0] for r in rows]  # near-parallel extremes: keep all
    x1 = (a22 - a12) / det
    x2 = (a11 - a21) / det
    kept = [row_i[0], row_j[0]]
    for idx, a1, a2 in rows:
        if idx in (row_i[0], row_j[0]):
            continue
        if not tol.within_rhs(a1 * x1 + a2 * x2, 1):
            kept.append(idx)
    return kept


def _prune_sweep(rows, key_col: int, slope_col: int):
    # Sort by intercept 1/a_key ascending; keep a row only if its
    # |a_key/a_slope| is no smaller than every earlier survivor's.  A later
    # row failing that is dominated pointwise by an earlier one.
    if len(rows) <= 1:
        return [r[0] for r in rows]
    decorated = []
    for row in rows:
        a_key = row[key_col]
        a_slope = row[slope_col]
        decorated.append((1 / a_key, abs(a_key / a_slope), row[0]))
    decorated.sort(key=lambda t: (t[0], t[2]))
    kept = []
    running_max = None
    for _, s2, idx in decorated:
        if running_max is None or s2 >= running_max:
            kept.append(idx)
            running_max = s2
    return kept


# ---------------------------------------------------------------------------
# vertex enumeration and selection

def _feasible(p: TwoDimLP, pos_rows, x1, x2, tol: Tolerances) -> bool:
    if not (tol.is_nonnegative(x1) and tol.is_nonnegative(x2)):
        return False
    for i in pos_rows:
        if not tol.within_rhs(p.col1[i] * x1 + p.col2[i] * x2, p.rhs[i]):
            return False
    return True


def enumerate_vertices(p: TwoDimLP, kept_rows, special1: Optional[Vertex2D],
                       special2: Optional[Vertex2D], tol: Tolerances,
                       pos_rows=None) -> list:
    """All feasible candidate vertices.

    Pairs are drawn from ``kept_rows`` only, but feasibility is checked
    against every positive row, so pruning can only shrink the candidate
    set, never admit an infeasible point.  The origin is always included.
    """
    if pos_rows is None:
        pos_rows = partition_rows(p, tol).pos_rows
    vertices = []
    zero = p.cost1 * 0
    vertices.append(Vertex2D(zero, zero, (), zero))
    for special in (special1, special2):
        if special is not None and _feasible(p, pos_rows, special.x1, special.x2, tol):
            vertices.append(special)
    for i1, i2 in itertools.combinations(sorted(kept_rows), 2):
        a11, a12, b1 = p.col1[i1], p.col2[i1], p.rhs[i1]
        a21, a22, b2 = p.col1[i2], p.col2[i2], p.rhs[i2]
        det = a11 * a22 - a12 * a21
        scale = max(1, abs(a11), abs(a12), abs(a21), abs(a22))
        if tol.is_singular_pivot(det, scale):
            continue
        x1 = (b1 * a22 - b2 * a12) / det
        x2 = (a11 * b2 - a21 * b1) / det
        if _feasible(p, pos_rows, x1, x2, tol):
            obj = p.cost1 * x1 + p.cost2 * x2
            vertices.append(Vertex2D(x1, x2, (i1, i2), obj))
    return vertices


def _selection_key(v: Vertex2D):
    # minimize objective; prefer fewer binding rows, then the
    # lexicographically smaller binding set, then larger x1
    return (v.obj, len(v.binding), v.binding, -v.x1)


def _axis_vertex(p: TwoDimLP, which: int, tol: Tolerances) -> Optional[Vertex2D]:
    col = p.col1 if which == 1 else p.col2
    cost = p.cost1 if which == 1 else p.cost2
    r = ratio_test(p.rhs, col, tol)
    if r.is_unbounded:
        return None
    zero = cost * 0
    if which == 1:
        return Vertex2D(r.step, zero, (r.leaving_row,), cost * r.step)
    return Vertex2D(zero, r.step, (r.leaving_row,), cost * r.step)


def rank_vertices(p: TwoDimLP, partition: Optional[RowPartition] = None,
                  special1: Optional[Vertex2D] = None,
                  special2: Optional[Vertex2D] = None,
                  tol: Optional[Tolerances] = None,
                  prune: bool = True) -> list:
    """All feasible candidate vertices, best first.

    Raises UnboundedSubproblem when either negative-cost direction has no
    blocking positive row.  The axis vertices are computed from ratio
    tests when not supplied.
    """
    tol = tol or Tolerances()
    part = partition or partition_rows(p, tol)
    pos = part.pos_rows
    if not any(tol.is_pivot(p.col1[i]) for i in pos):
        raise UnboundedSubproblem("x1 direction has no blocking row")
    if not any(tol.is_pivot(p.col2[i]) for i in pos):
        raise UnboundedSubproblem("x2 direction has no blocking row")
    if special1 is None:
        special1 = _axis_vertex(p, 1, tol)
    if special2 is None:
        special2 = _axis_vertex(p, 2, tol)

    if prune:
        normalized = []
        for i in pos:
            if i in part.degenerate_rows:
                continue
            r = p.rhs[i]
            normalized.append((i, p.col1[i] / r, p.col2[i] / r))
        kept = set(prune_redundant(normalized, tol))
        kept.update(part.degenerate_rows)
    else:
        kept = set(pos)

    vertices = enumerate_vertices(p, kept, special1, special2, tol, pos_rows=pos)
    vertices.sort(key=_selection_key)
    return vertices


def solve_2d(p: TwoDimLP, partition: Optional[RowPartition] = None,
             special1: Optional[Vertex2D] = None,
             special2: Optional[Vertex2D] = None,
             tol: Optional[Tolerances] = None,
             prune: bool = True) -> Vertex2D:
    """The feasible vertex minimizing cost1*x1 + cost2*x2.

    Ties resolve toward fewer binding rows, then the lexicographically
    smaller binding set, then larger x1.  By construction the winner is
    at least as good as either axis vertex.
    """
    return rank_vertices(p, partition, special1, special2, tol, prune)[0]
