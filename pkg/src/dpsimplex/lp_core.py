"""Dense linear-algebra substrate for the solver.

Instance types (standard-form and inequality-form LPs), basis management
with LU factorizations, and the basic-solution / reduced-cost kernels that
every pivot rule builds on.

Two scalar backends are supported everywhere:

* ``"double"``   -- IEEE-754 float64; arrays have dtype ``float64``.
* ``"rational"`` -- exact arithmetic with :class:`fractions.Fraction`;
  arrays have dtype ``object``.

The rational backend exists because some benchmark families grow
coefficients like ``100**(m-1)`` past what float64 can store.  All
tolerance tests are relative (scaled by ``1 + |value|``) and collapse to
exact comparisons under the rational backend, where every epsilon is 0.

Indices are 0-based internally; user-facing text (CLI output, traces)
is 1-based.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.linalg import lu_factor, lu_solve

DOUBLE = "double"
RATIONAL = "rational"


class LPError(Exception):
    """Base class for solver errors."""


class SingularBasis(LPError):
    """The selected basis columns are (numerically) rank deficient."""


class InfeasibleStart(LPError):
    """The supplied initial basis is not primal feasible."""


# ---------------------------------------------------------------------------
# backends

def backend_of(array: np.ndarray) -> str:
    """Return the scalar backend a numpy array belongs to."""
    return RATIONAL if array.dtype == object else DOUBLE


def _to_fraction(value) -> Fraction:
    # Fraction(float) is the exact binary value, which is what keeps
    # double -> rational conversions faithful.
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, (float, np.floating)):
        return Fraction(float(value))
    return Fraction(value)


def _to_float(value) -> float:
    # May raise OverflowError for huge exact integers; callers that
    # generate such data translate this into their own error type.
    return float(value)


def coerce_vector(values: Sequence, backend: str) -> np.ndarray:
    """Build a 1-D backend array from arbitrary numeric values."""
    if backend == RATIONAL:
        out = np.empty(len(values), dtype=object)
        for i, v in enumerate(values):
            out[i] = _to_fraction(v)
        return out
    return np.asarray([_to_float(v) for v in values], dtype=float)


def coerce_matrix(rows: Sequence[Sequence], backend: str) -> np.ndarray:
    """Build a 2-D backend array from nested numeric values."""
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    if backend == RATIONAL:
        out = np.empty((nrows, ncols), dtype=object)
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                out[i, j] = _to_fraction(v)
        return out
    return np.asarray([[_to_float(v) for v in row] for row in rows], dtype=float)


def zeros_vector(n: int, backend: str) -> np.ndarray:
    if backend == RATIONAL:
        out = np.empty(n, dtype=object)
        out[:] = Fraction(0)
        return out
    return np.zeros(n, dtype=float)


# ---------------------------------------------------------------------------
# tolerances

@dataclass(frozen=True)
class Tolerances:
    """Relative comparison thresholds.

    Each test scales its epsilon by ``1 + |compared value|`` so the same
    settings work for coefficients of size 1e-3 and 1e+198.  ``exact()``
    returns all-zero thresholds for the rational backend, under which
    every test degenerates to the exact comparison.
    """

    eps_cost: float = 1e-9
    eps_ratio: float = 1e-9
    eps_feas: float = 1e-7
    eps_sing: float = 1e-12

    @classmethod
    def exact(cls) -> "Tolerances":
        return cls(0.0, 0.0, 0.0, 0.0)

    # reduced-cost sign tests
    def is_improving(self, reduced_cost) -> bool:
        return reduced_cost < -self.eps_cost * (1 + abs(reduced_cost))

    # ratio-test pivot eligibility
    def is_pivot(self, entry) -> bool:
        return entry > self.eps_ratio * (1 + abs(entry))

    # primal feasibility
    def is_nonnegative(self, value) -> bool:
        return value >= -self.eps_feas * (1 + abs(value))

    def within_rhs(self, lhs, rhs) -> bool:
        return lhs <= rhs + self.eps_feas * (1 + abs(rhs))

    def is_zero_level(self, value) -> bool:
        return abs(value) <= self.eps_feas * (1 + abs(value))

    def is_singular_pivot(self, pivot, scale) -> bool:
        return abs(pivot) <= self.eps_sing * scale

    def decreased(self, z_new, z_old) -> bool:
        return z_new < z_old - self.eps_cost * (1 + abs(z_old))


def default_tolerances(backend: str) -> Tolerances:
    return Tolerances.exact() if backend == RATIONAL else Tolerances()


# ---------------------------------------------------------------------------
# instance types

@dataclass(frozen=True, eq=False)
class StandardFormLP:
    """min c'x  subject to  Ax = b, x >= 0, with A dense m-by-n, m < n."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        m, n = self.A.shape
        if not (1 <= m < n):
            raise ValueError(f"need 1 <= m < n, got m={m}, n={n}")
        if self.b.shape != (m,):
            raise ValueError("b must have length m")
        if self.c.shape != (n,):
            raise ValueError("c must have length n")

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def backend(self) -> str:
        return backend_of(self.A)


@dataclass(frozen=True, eq=False)
class InequalityLP:
    """min c'x  subject to  Ax <= b, x >= 0, with A dense m-by-d."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        m, d = self.A.shape
        if self.b.shape != (m,):
            raise ValueError("b must have length m")
        if self.c.shape != (d,):
            raise ValueError("c must have length d")

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def d(self) -> int:
        return self.A.shape[1]

    @property
    def backend(self) -> str:
        return backend_of(self.A)


def to_backend(lp, backend: str):
    """Convert an LP between scalar backends.

    double -> rational is exact (binary expansion); rational -> double is
    correctly rounded and raises OverflowError past float range.
    """
    cls = type(lp)
    return cls(
        A=coerce_matrix(lp.A.tolist(), backend),
        b=coerce_vector(lp.b.tolist(), backend),
        c=coerce_vector(lp.c.tolist(), backend),
    )


# ---------------------------------------------------------------------------
# factorizations

class _FloatLU:
    def __init__(self, AB: np.ndarray, tol: Tolerances):
        scale = max(1.0, float(np.max(np.abs(AB))) if AB.size else 1.0)
        with np.errstate(all="ignore"):
            lu, piv = lu_factor(AB, check_finite=False)
        diag = np.abs(np.diag(lu))
        if diag.size and tol.is_singular_pivot(float(diag.min()), scale):
            raise SingularBasis("basis matrix is numerically singular")
        self._lu = (lu, piv)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return lu_solve(self._lu, rhs, check_finite=False)

    def solve_transpose(self, rhs: np.ndarray) -> np.ndarray:
        return lu_solve(self._lu, rhs, trans=1, check_finite=False)


class _ExactLU:
    """LU with partial pivoting over Fraction entries.

    Row-permuted Doolittle: P A = L U with unit lower L stored below the
    diagonal of ``lu`` and U on/above it.
    """

    def __init__(self, AB: np.ndarray, tol: Tolerances):
        n = AB.shape[0]
        lu = [[AB[i, j] for j in range(n)] for i in range(n)]
        perm = list(range(n))
        for k in range(n):
            pivot_row = max(range(k, n), key=lambda i: abs(lu[i][k]))
            if lu[pivot_row][k] == 0:
                raise SingularBasis("basis matrix is singular")
            if pivot_row != k:
                lu[k], lu[pivot_row] = lu[pivot_row], lu[k]
                perm[k], perm[pivot_row] = perm[pivot_row], perm[k]
            pivot = lu[k][k]
            row_k = lu[k]
            for i in range(k + 1, n):
                if lu[i][k] == 0:
                    continue
                f = lu[i][k] / pivot
                lu[i][k] = f
                row_i = lu[i]
                for j in range(k + 1, n):
                    if row_k[j]:
                        row_i[j] = row_i[j] - f * row_k[j]
        self._lu = lu
        self._perm = perm
        self._n = n

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        lu, perm, n = self._lu, self._perm, self._n
        y = [rhs[perm[i]] for i in range(n)]
        for i in range(1, n):
            row = lu[i]
            acc = y[i]
            for j in range(i):
                if row[j]:
                    acc = acc - row[j] * y[j]
            y[i] = acc
        for i in range(n - 1, -1, -1):
            row = lu[i]
            acc = y[i]
            for j in range(i + 1, n):
                if row[j]:
                    acc = acc - row[j] * y[j]
            y[i] = acc / row[i]
        out = np.empty(n, dtype=object)
        out[:] = y
        return out

    def solve_transpose(self, rhs: np.ndarray) -> np.ndarray:
        # A_B = P^T L U, so A_B^T x = v  <=>  U^T w = v, L^T u = w, x = P^T u.
        lu, perm, n = self._lu, self._perm, self._n
        w = list(rhs)
        for i in range(n):
            acc = w[i]
            for j in range(i):
                if lu[j][i]:
                    acc = acc - lu[j][i] * w[j]
            w[i] = acc / lu[i][i]
        for i in range(n - 1, -1, -1):
            acc = w[i]
            for j in range(i + 1, n):
                if lu[j][i]:
                    acc = acc - lu[j][i] * w[j]
            w[i] = acc
        out = np.empty(n, dtype=object)
        for i in range(n):
            out[perm[i]] = w[i]
        return out


class Basis:
    """An ordered basic index set plus a factorization of A_B.

    ``basic[i]`` pairs with row i of every solve, so the leaving row of a
    ratio test directly names the leaving variable.  ``nonbasic`` is kept
    sorted ascending.
    """

    __slots__ = ("basic", "nonbasic", "_fact", "_float")

    def __init__(self, basic, nonbasic, factorization, is_float: bool):
        self.basic = tuple(basic)
        self.nonbasic = tuple(nonbasic)
        self._fact = factorization
        self._float = is_float

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve A_B y = rhs."""
        return self._fact.solve(rhs)

    def solve_transpose(self, rhs: np.ndarray) -> np.ndarray:
        """Solve A_B' y = rhs."""
        return self._fact.solve_transpose(rhs)

    def solve_columns(self, columns: np.ndarray) -> np.ndarray:
        """Solve A_B Y = M for a matrix of right-hand-side columns."""
        if self._float:
            return self._fact.solve(columns)
        out = np.empty(columns.shape, dtype=object)
        for j in range(columns.shape[1]):
            out[:, j] = self._fact.solve(columns[:, j])
        return out


def factor_basis(lp: StandardFormLP, basic: Sequence[int],
                 tol: Tolerances | None = None) -> Basis:
    """Factor the basis columns ``basic`` of ``lp``.

    Raises SingularBasis if the columns are rank deficient (which includes
    repeated indices).  The complement index set is returned sorted.
    """
    m, n = lp.m, lp.n
    basic = [int(i) for i in basic]
    if len(basic) != m:
        raise ValueError(f"basis must have {m} indices, got {len(basic)}")
    for i in basic:
        if not 0 <= i < n:
            raise ValueError(f"basis index {i} out of range")
    if len(set(basic)) != m:
        raise SingularBasis("repeated column index in basis")
    tol = tol or default_tolerances(lp.backend)
    AB = lp.A[:, basic]
    if lp.backend == DOUBLE:
        fact = _FloatLU(AB, tol)
        is_float = True
    else:
        fact = _ExactLU(AB, tol)
        is_float = False
    nonbasic = sorted(set(range(n)) - set(basic))
    return Basis(basic, nonbasic, fact, is_float)


# ---------------------------------------------------------------------------
# kernels

def basic_solution(lp: StandardFormLP, basis: Basis) -> np.ndarray:
    """The basic variable values x_B = A_B^{-1} b, ordered like ``basis.basic``."""
    return basis.solve(lp.b)


def reduced_costs(lp: StandardFormLP, basis: Basis) -> np.ndarray:
    """c_N - A_N' A_B^{-T} c_B, ordered like ``basis.nonbasic``."""
    cB = lp.c[list(basis.basic)]
    y = basis.solve_transpose(cB)
    AN = lp.A[:, list(basis.nonbasic)]
    cN = lp.c[list(basis.nonbasic)]
    return cN - AN.T.dot(y)


def objective(lp: StandardFormLP, x: np.ndarray):
    """c'x for a full-length point x."""
    if len(x) != lp.n:
        raise ValueError("x must have length n")
    return lp.c.dot(x)


def assemble_point(lp: StandardFormLP, basis: Basis, xB: np.ndarray) -> np.ndarray:
    """Scatter basic values into a full-length point (nonbasics are 0)."""
    x = zeros_vector(lp.n, lp.backend)
    for pos, j in enumerate(basis.basic):
        x[j] = xB[pos]
    return x


def residual_norm(lp: StandardFormLP, x: np.ndarray) -> float:
    """Max-norm of Ax - b, as a float (diagnostics only)."""
    r = lp.A.dot(x) - lp.b
    return max((abs(float(v)) for v in r), default=0.0)


def check_feasible_start(lp: StandardFormLP, basis: Basis,
                         xB: np.ndarray, tol: Tolerances) -> None:
    for v in xB:
        if not tol.is_nonnegative(v):
            raise InfeasibleStart(
                f"initial basis is infeasible (component {v} < 0)")
