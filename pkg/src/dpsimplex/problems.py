"""Instance generators, standard-form conversion, known optima, file I/O.

Three Klee-Minty cube variants (the classic worst cases for single-pivot
rules), the unit-cost cube in explicit standard form, and seeded random
dense instances for benchmarking.

Random instances follow a fixed, documented recipe so benchmark tables are
reproducible: the generator is numpy's PCG64 seeded with the 64-bit seed,
and draws happen in this order:

1. M: m*m entries, row-major, uniform on [-1, 1] (``rng.uniform``),
2. b: m entries, uniform on (0, 1] (computed as ``1 - rng.random()``),
3. c1: m entries, uniform on [-1, 1].

The instance is min (c1, 0)'x s.t. [M | I]x = b, x >= 0 with the identity
columns as the feasible starting basis (b > 0 keeps the start
nondegenerate).
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from .lp_core import (
    DOUBLE,
    RATIONAL,
    InequalityLP,
    LPError,
    StandardFormLP,
    coerce_matrix,
    coerce_vector,
)


class ParseError(LPError):
    """Malformed LP file; carries the offending 1-based line number."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class Overflow(LPError, OverflowError):
    """Instance coefficients exceed float64 range (use the rational backend)."""


class KleeMintyVariant(Enum):
    V1 = 1
    V2 = 2
    V3 = 3


@dataclass(frozen=True, eq=False)
class KnownOptimum:
    """Closed-form optimizer (original variables) and optimal value."""

    x_star: np.ndarray
    z_star: object


@dataclass(frozen=True)
class RandomSpec:
    m: int
    seed: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")


def _convert_rows(rows, backend):
    try:
        return coerce_matrix(rows, backend)
    except OverflowError as e:
        raise Overflow(str(e)) from e


def _convert_vec(values, backend):
    try:
        return coerce_vector(values, backend)
    except OverflowError as e:
        raise Overflow(str(e)) from e


def klee_minty(variant: KleeMintyVariant, m: int, backend: str = DOUBLE) -> InequalityLP:
    """One of the three Klee-Minty cube variants, in inequality form.

    V1: lower-triangular powers of 2, rhs 5^i, costs -2^(m-i).
    V2: rows 2*sum 10^(i-j) x_j + x_i <= 100^(i-1), costs -10^(m-i).
    V3: rows 2*sum x_j + x_i <= 2^i - 1, unit costs.

    Coefficients are built exactly in integers and converted per backend;
    V2 overflows float64 for large m, in which case Overflow is raised and
    the rational backend must be used.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    variant = KleeMintyVariant(variant)
    rows = [[0] * m for _ in range(m)]
    if variant is KleeMintyVariant.V1:
        for i in range(m):
            for j in range(i):
                rows[i][j] = 2 ** (i - j + 1)
            rows[i][i] = 1
        b = [5 ** (i + 1) for i in range(m)]
        c = [-(2 ** (m - 1 - j)) for j in range(m)]
    elif variant is KleeMintyVariant.V2:
        for i in range(m):
            for j in range(i):
                rows[i][j] = 2 * 10 ** (i - j)
            rows[i][i] = 1
        b = [100 ** i for i in range(m)]
        c = [-(10 ** (m - 1 - j)) for j in range(m)]
    else:
        for i in range(m):
            for j in range(i):
                rows[i][j] = 2
            rows[i][i] = 1
        b = [2 ** (i + 1) - 1 for i in range(m)]
        c = [-1] * m
    return InequalityLP(_convert_rows(rows, backend), _convert_vec(b, backend),
                        _convert_vec(c, backend))


def to_standard_form(p: InequalityLP):
    """Append slack columns: A <- [A | I], c <- (c, 0).

    Returns (standard LP, slack basis indices).  The slack basis is
    feasible iff b >= 0; the engine raises InfeasibleStart otherwise.
    """
    m, d = p.m, p.d
    backend = p.backend
    one = Fraction(1) if backend == RATIONAL else 1.0
    zero = Fraction(0) if backend == RATIONAL else 0.0
    A = np.empty((m, d + m), dtype=p.A.dtype)
    A[:, :d] = p.A
    A[:, d:] = zero
    for i in range(m):
        A[i, d + i] = one
    c = np.empty(d + m, dtype=p.c.dtype)
    c[:d] = p.c
    c[d:] = zero
    return StandardFormLP(A, p.b.copy(), c), list(range(d, d + m))


def km_standard(m: int, backend: str = DOUBLE):
    """The unit-cost cube in explicit standard form, plus its slack basis.

    Identical to ``to_standard_form(klee_minty(V3, m))``.  The slack start
    is x = (0,...,0, 1, 3, ..., 2^m - 1): the slack of row k must absorb
    the whole rhs 2^k - 1 for the start to be feasible.
    """
    return to_standard_form(klee_minty(KleeMintyVariant.V3, m, backend))


def known_optimum(variant: KleeMintyVariant, m: int, backend: str = DOUBLE) -> KnownOptimum:
    """Closed-form optimum of a cube variant (original variables)."""
    variant = KleeMintyVariant(variant)
    if variant is KleeMintyVariant.V1:
        last = 5 ** m
    elif variant is KleeMintyVariant.V2:
        last = 10 ** (2 * (m - 1))
    else:
        last = 2 ** m - 1
    x = [0] * (m - 1) + [last]
    x_star = _convert_vec(x, backend)
    return KnownOptimum(x_star, -x_star[-1])


def random_lp(spec: RandomSpec):
    """Seeded random dense instance; see the module docstring for the recipe.

    Returns (standard LP, identity basis indices) on the double backend.
    """
    m = spec.m
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    M = rng.uniform(-1.0, 1.0, size=(m, m))
    b = 1.0 - rng.random(m)
    c1 = rng.uniform(-1.0, 1.0, size=m)
    A = np.hstack([M, np.eye(m)])
    c = np.concatenate([c1, np.zeros(m)])
    return StandardFormLP(A, b, c), list(range(m, 2 * m))


# ---------------------------------------------------------------------------
# plain-text file format
#
#   # comment (anywhere; rest of line ignored)
#   m n
#   c_1 ... c_n
#   b_1 ... b_m
#   a_11 ... a_1n        (m rows)
#
# Tokens are decimal or p/q rational literals.  Rational round-trips are
# bit exact.

def _parse_scalar(token: str, lineno: int):
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise ParseError(lineno, f"bad number {token!r}") from None


def read_lp(path, backend: str = DOUBLE) -> StandardFormLP:
    """Parse a standard-form LP file."""
    logical = []  # (lineno, tokens)
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.split("#", 1)[0].strip()
            if text:
                logical.append((lineno, text.split()))
    if not logical:
        raise ParseError(1, "empty file")

    lineno, tokens = logical[0]
    if len(tokens) != 2:
        raise ParseError(lineno, "expected dimension line 'm n'")
    try:
        m, n = int(tokens[0]), int(tokens[1])
    except ValueError:
        raise ParseError(lineno, "dimensions must be integers") from None
    if not 1 <= m < n:
        raise ParseError(lineno, f"need 1 <= m < n, got m={m} n={n}")
    if len(logical) != 3 + m:
        raise ParseError(lineno, f"expected {2 + m} data lines after dimensions, "
                                 f"got {len(logical) - 1}")

    def vector(entry, want, what):
        ln, toks = entry
        if len(toks) != want:
            raise ParseError(ln, f"{what} needs {want} numbers, got {len(toks)}")
        return [_parse_scalar(t, ln) for t in toks]

    c = vector(logical[1], n, "cost row")
    b = vector(logical[2], m, "rhs row")
    rows = [vector(logical[3 + i], n, f"matrix row {i + 1}") for i in range(m)]
    return StandardFormLP(_convert_rows(rows, backend), _convert_vec(b, backend),
                          _convert_vec(c, backend))


def _format_scalar(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    return repr(float(v))


def write_lp(lp: StandardFormLP, path) -> None:
    """Write a standard-form LP file; read_lp(write_lp(lp)) is exact under
    the rational backend and bit-faithful for float64."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{lp.m} {lp.n}\n")
        fh.write(" ".join(_format_scalar(v) for v in lp.c) + "\n")
        fh.write(" ".join(_format_scalar(v) for v in lp.b) + "\n")
        for i in range(lp.m):
            fh.write(" ".join(_format_scalar(v) for v in lp.A[i]) + "\n")
