"""Dense two-phase simplex with Bland's rule.

Every linear program in this package is tiny (tens of rows and columns), and
two of its consumers need things general-purpose wrappers do not expose in a
stable way: basic solutions with an explicit basis, and the phase-1 duals of
an infeasible system (the decomposition master prices columns against those
duals and uses them as a Farkas certificate). A small tableau implementation
keeps both under our control.

Conventions
-----------
Problems are given as  A x = b, x >= 0  (rows with negative b are flipped
internally; reported duals are for the caller's row orientation). Bland's
rule is used for both the entering and leaving choices, so the iteration
count is finite even on degenerate problems. The identity columns appended
for artificials (or slacks) double as a running copy of B^-1, which is where
the dual vector is read from.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RC_TOL = 1e-9  # reduced-cost threshold for optimality
PIVOT_TOL = 1e-10  # smallest acceptable pivot magnitude
RATIO_TIE_TOL = 1e-12


class SimplexError(RuntimeError):
    pass


class UnboundedProblemError(SimplexError):
    pass


class InfeasibleProblemError(SimplexError):
    pass


@dataclass
class SimplexResult:
    x: np.ndarray
    objective: float
    duals: np.ndarray
    basis: np.ndarray
    iterations: int
    residual: float  # phase-1 objective; 0 (to tolerance) iff feasible

    @property
    def feasible(self) -> bool:
        return self.residual <= RC_TOL


def _iterate(
    tab: np.ndarray,
    basis: np.ndarray,
    cost: np.ndarray,
    allowed: np.ndarray,
    max_iter: int,
) -> int:
    """Run simplex pivots in place until optimal; return iteration count."""
    m = tab.shape[0]
    ncols = tab.shape[1] - 1
    for it in range(max_iter):
        rc = cost - cost[basis] @ tab[:, :ncols]
        entering = -1
        for j in range(ncols):
            if allowed[j] and rc[j] < -RC_TOL:
                entering = j
                break
        if entering < 0:
            return it

        col = tab[:, entering]
        rhs = tab[:, -1]
        best_ratio = np.inf
        leave = -1
        for i in range(m):
            if col[i] > PIVOT_TOL:
                ratio = rhs[i] / col[i]
                if ratio < best_ratio - RATIO_TIE_TOL:
                    best_ratio = ratio
                    leave = i
                elif ratio < best_ratio + RATIO_TIE_TOL and basis[i] < basis[leave]:
                    leave = i
        if leave < 0:
            raise UnboundedProblemError("objective is unbounded")

        piv = tab[leave, entering]
        tab[leave, :] /= piv
        for i in range(m):
            if i != leave and tab[i, entering] != 0.0:
                tab[i, :] -= tab[i, entering] * tab[leave, :]
        basis[leave] = entering
    raise SimplexError(f"iteration limit reached ({max_iter})")


def solve_feasibility(A: np.ndarray, b: np.ndarray, max_iter: int = 20000) -> SimplexResult:
    """Phase 1 only: minimize the total artificial mass of A x = b, x >= 0.

    Always returns (never raises on infeasibility): `residual` is the optimal
    artificial mass, zero to tolerance iff the system is feasible, and
    `duals` are the phase-1 duals y with y . b == residual, which certify
    infeasibility whenever the residual is positive.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = A.shape

    signs = np.where(b < 0.0, -1.0, 1.0)
    tab = np.empty((m, n + m + 1))
    tab[:, :n] = A * signs[:, None]
    tab[:, n : n + m] = np.eye(m)
    tab[:, -1] = b * signs

    basis = np.arange(n, n + m)
    cost = np.concatenate([np.zeros(n), np.ones(m)])
    allowed = np.ones(n + m, dtype=bool)

    iters = _iterate(tab, basis, cost, allowed, max_iter)

    x = np.zeros(n)
    in_n = basis < n
    x[basis[in_n]] = tab[in_n, -1]
    residual = float(tab[~in_n, -1].sum())
    # artificial identity columns now hold B^-1, so y = c_B B^-1 falls out
    duals = cost[basis] @ tab[:, n : n + m] * signs
    return SimplexResult(
        x=x,
        objective=residual,
        duals=duals,
        basis=basis.copy(),
        iterations=iters,
        residual=max(0.0, residual),
    )


def solve_max_inequalities(
    w: np.ndarray, A: np.ndarray, b: np.ndarray, max_iter: int = 20000
) -> SimplexResult:
    """Maximize w . x subject to A x <= b, x >= 0, where b >= 0.

    The nonnegative right-hand side means the slack basis is feasible and no
    phase 1 is needed. Returned duals are the usual nonnegative prices of the
    <= rows (dual objective duals . b >= primal optimum, equal at optimality).
    """
    w = np.asarray(w, dtype=float)
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = A.shape
    if np.any(b < 0.0):
        raise ValueError("right-hand side must be nonnegative")

    tab = np.empty((m, n + m + 1))
    tab[:, :n] = A
    tab[:, n : n + m] = np.eye(m)
    tab[:, -1] = b

    basis = np.arange(n, n + m)
    cost = np.concatenate([-w, np.zeros(m)])  # minimize -w . x
    allowed = np.ones(n + m, dtype=bool)

    iters = _iterate(tab, basis, cost, allowed, max_iter)

    x = np.zeros(n)
    in_n = basis < n
    x[basis[in_n]] = tab[in_n, -1]
    duals = -(cost[basis] @ tab[:, n : n + m])
    return SimplexResult(
        x=x,
        objective=float(w @ x),
        duals=duals,
        basis=basis.copy(),
        iterations=iters,
        residual=0.0,
    )
