"""Dense two-phase simplex for the tiny LPs used by the polytope module.

Solves   min c.x   s.t.  A x = b,  x >= 0   with A at most a few dozen rows
and columns.  Phase 1 minimizes the sum of one artificial variable per row;
a positive phase-1 optimum certifies infeasibility.  Bland's rule is used
throughout, so the iteration cannot cycle; redundant equality rows are
detected after phase 1 and dropped.

Problem sizes here are fixed and tiny (<= 25 variables, <= 40 constraints),
which is why a self-contained dense tableau is preferred over an external
solver dependency.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LpNumericalFailure

#: pivot elements smaller than this are treated as zero
PIVOT_TOL = 1e-10
#: feasibility threshold on the phase-1 objective
FEAS_TOL = 1e-9

_MAX_ITER = 5000


@dataclass(frozen=True)
class SimplexResult:
    status: str  # "optimal" | "infeasible"
    x: np.ndarray | None
    objective: float | None
    phase1_objective: float


def _pivot(tableau: np.ndarray, row: int, col: int) -> None:
    tableau[row] /= tableau[row, col]
    for r in range(tableau.shape[0]):
        if r != row and tableau[r, col] != 0.0:
            tableau[r] -= tableau[r, col] * tableau[row]


def _iterate(tableau: np.ndarray, basis: list[int], ncols: int) -> None:
    """Run Bland-rule simplex iterations on a tableau with cost in the last row."""
    m = tableau.shape[0] - 1
    for _ in range(_MAX_ITER):
        cost = tableau[-1, :ncols]
        entering = -1
        for j in range(ncols):
            if cost[j] < -PIVOT_TOL:
                entering = j
                break
        if entering < 0:
            return
        # ratio test; Bland tie-break on the basis variable index
        leaving = -1
        best = np.inf
        for i in range(m):
            a = tableau[i, entering]
            if a > PIVOT_TOL:
                ratio = tableau[i, -1] / a
                if ratio < best - PIVOT_TOL or (
                    abs(ratio - best) <= PIVOT_TOL
                    and (leaving < 0 or basis[i] < basis[leaving])
                ):
                    best = ratio
                    leaving = i
        if leaving < 0:
            raise LpNumericalFailure("LP is unbounded (not expected for these problems)")
        _pivot(tableau, leaving, entering)
        basis[leaving] = entering
    raise LpNumericalFailure(f"simplex did not converge within {_MAX_ITER} iterations")


def solve_lp(c, A, b) -> SimplexResult:
    """Minimize ``c.x`` subject to ``A x = b`` and ``x >= 0``."""
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    c = np.array(c, dtype=float)
    m, n = A.shape
    if b.shape != (m,) or c.shape != (n,):
        raise LpNumericalFailure("inconsistent LP dimensions")

    # b >= 0 so artificials give a feasible phase-1 start
    neg = b < 0
    A = A.copy()
    b = b.copy()
    A[neg] *= -1.0
    b[neg] *= -1.0

    # phase-1 tableau: columns [x | artificials | rhs]
    width = n + m
    tableau = np.zeros((m + 1, width + 1))
    tableau[:m, :n] = A
    tableau[:m, n:width] = np.eye(m)
    tableau[:m, -1] = b
    basis = list(range(n, width))
    # reduced costs of min(sum of artificials) given the artificial basis
    tableau[-1, :] = -tableau[:m].sum(axis=0)
    tableau[-1, n:width] = 0.0

    _iterate(tableau, basis, width)
    phase1 = -tableau[-1, -1]
    if phase1 > FEAS_TOL:
        return SimplexResult("infeasible", None, None, float(phase1))

    # drive artificials out of the basis; drop rows that prove redundant
    keep_rows = []
    for i in range(m):
        if basis[i] >= n:
            pivot_col = -1
            for j in range(n):
                if abs(tableau[i, j]) > PIVOT_TOL:
                    pivot_col = j
                    break
            if pivot_col < 0:
                continue  # redundant constraint
            _pivot(tableau, i, pivot_col)
            basis[i] = pivot_col
        keep_rows.append(i)

    rows = keep_rows + [m]
    tableau = tableau[rows][:, list(range(n)) + [width]]
    basis = [basis[i] for i in keep_rows]
    m2 = len(basis)

    # phase-2 cost row: c reduced over the current basis
    tableau[-1, :n] = c
    tableau[-1, -1] = 0.0
    for i in range(m2):
        cb = c[basis[i]]
        if cb != 0.0:
            tableau[-1] -= cb * tableau[i]

    _iterate(tableau, basis, n)

    x = np.zeros(n)
    for i in range(m2):
        x[basis[i]] = tableau[i, -1]
    return SimplexResult("optimal", x, float(c @ x), float(phase1))
