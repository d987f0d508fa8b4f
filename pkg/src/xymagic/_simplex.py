"""Dense two-phase primal simplex with Bland's rule.

Solves min c.x subject to A x = b, x >= 0 for the small, dense equality
systems produced by the robustness linear program (at most 16 rows and
120 columns).  Bland's smallest-index pivot rule guarantees termination
on these highly degenerate problems, and the basis system is re-solved
from scratch every iteration (m <= 16, so refactorization is cheaper
than it is risky).  Determinism of the reached vertex follows from the
fixed pivot rule.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_PIVOT_TOL = 1e-11
_FEAS_TOL = 1e-9


class SimplexError(RuntimeError):
    pass


class InfeasibleError(SimplexError):
    """Phase 1 terminated with positive artificial weight."""


class IterationLimitError(SimplexError):
    """Pivot limit exceeded before reaching optimality."""


@dataclass
class SimplexSolution:
    x: np.ndarray
    value: float
    iterations: int
    gap: float  # |primal - dual| at the final basis


def _pivot_loop(a, b, c, basis, max_iter):
    m, n = a.shape
    iterations = 0
    while True:
        bmat = a[:, basis]
        x_b = np.linalg.solve(bmat, b)
        y = np.linalg.solve(bmat.T, c[basis])
        reduced = c - y @ a
        entering = -1
        for j in range(n):
            if j not in basis and reduced[j] < -_PIVOT_TOL:
                entering = j
                break
        if entering < 0:
            return basis, x_b, y, iterations
        direction = np.linalg.solve(bmat, a[:, entering])
        best_ratio = None
        leaving_pos = -1
        for i in range(m):
            if direction[i] > _PIVOT_TOL:
                ratio = max(x_b[i], 0.0) / direction[i]
                if (
                    best_ratio is None
                    or ratio < best_ratio - _PIVOT_TOL
                    or (abs(ratio - best_ratio) <= _PIVOT_TOL
                        and basis[i] < basis[leaving_pos])
                ):
                    best_ratio = ratio
                    leaving_pos = i
        if leaving_pos < 0:
            raise SimplexError("objective unbounded below")
        basis[leaving_pos] = entering
        iterations += 1
        if iterations > max_iter:
            raise IterationLimitError(f"no optimum after {max_iter} pivots")


def solve_standard_form(a, b, c, max_iter=50000) -> SimplexSolution:
    """Minimize c.x over {A x = b, x >= 0}; A must have full row rank
    after redundant rows are dropped in phase 1."""
    a = np.asarray(a, dtype=float).copy()
    b = np.asarray(b, dtype=float).copy()
    c = np.asarray(c, dtype=float)
    m, n = a.shape
    flip = b < 0
    a[flip] *= -1.0
    b[flip] *= -1.0

    # Phase 1: artificial identity basis.
    a1 = np.hstack([a, np.eye(m)])
    c1 = np.concatenate([np.zeros(n), np.ones(m)])
    basis = list(range(n, n + m))
    basis, x_b, _, it1 = _pivot_loop(a1, b, c1, basis, max_iter)
    if float(c1[basis] @ x_b) > _FEAS_TOL * max(1.0, float(np.abs(b).max())):
        raise InfeasibleError("equality system has no nonnegative solution")

    # Drive leftover artificials out of the basis; rows whose artificial
    # admits no pivot are redundant and dropped afterwards (the artificial
    # stays in the basis until then so intermediate solves stay regular).
    redundant = set()
    for pos in range(m):
        if basis[pos] >= n:
            bmat = a1[:, basis]
            row = np.linalg.solve(bmat.T, np.eye(m)[pos])
            candidates = row @ a1[:, :n]
            pivot_col = -1
            for j in range(n):
                if j not in basis and abs(candidates[j]) > 1e-8:
                    pivot_col = j
                    break
            if pivot_col >= 0:
                basis[pos] = pivot_col
            else:
                redundant.add(pos)
    if redundant:
        rows = [i for i in range(m) if i not in redundant]
        a = a[rows]
        b = b[rows]
        basis = [bv for pos, bv in enumerate(basis) if pos not in redundant]
    basis, x_b, y, it2 = _pivot_loop(a, b, c, basis, max_iter)

    x = np.zeros(n)
    x[basis] = np.maximum(x_b, 0.0)
    primal = float(c @ x)
    dual = float(y @ b)
    return SimplexSolution(x=x, value=primal, iterations=it1 + it2,
                           gap=abs(primal - dual))
