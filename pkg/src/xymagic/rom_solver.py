"""Robustness of magic by L1-minimizing linear program.

The robustness R(rho) is the optimum of

    min sum_k |X_k|  - 1    subject to   A X = B,  sum_k X_k = 1,

where the columns of A are the Pauli coefficient vectors of the pure
stabilizer states and B is the coefficient vector of rho (the identity
row of A carries the normalization constraint).  The signed weights are
split as X = P - Q with P, Q >= 0 and the resulting standard-form LP is
solved with a deterministic Bland-rule simplex; the optimal value is
certified through the dual solution of the final basis.

For a single qubit with <sigma_y> = 0 the optimum has the closed form
max(|<sigma_x>| + |<sigma_z>| - 1, 0) (a four-vertex decomposition over
|0>, |1>, |+>, |->), which serves as an independent oracle for the LP.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._simplex import solve_standard_form
from .quantum_state import PauliVector, partial_trace, tensor_product
from .stabilizer_polytope import StabilizerPolytope

_CERT_TOL = 1e-9


class RomSolverError(RuntimeError):
    """The LP terminated in a state that violates the solution contract."""


@dataclass(frozen=True)
class RomResult:
    """Optimal robustness with its pseudomixture weights and diagnostics.

    The optimal weights are not unique; only `value` is contract-bearing.
    `weights` is whichever vertex the deterministic pivot rule reached.
    """

    value: float
    weights: np.ndarray
    objective_gap: float
    iterations: int


@lru_cache(maxsize=8)
def _split_matrix(polytope: StabilizerPolytope):
    a = polytope.a_matrix
    return np.hstack([a, -a])


def rom_lp(state: PauliVector, polytope: StabilizerPolytope) -> RomResult:
    """Solve the robustness LP for `state` over `polytope`.

    Valid states always admit a feasible decomposition (the stabilizer
    states span), so infeasibility is reported as an internal error.
    The returned value is certified optimal: duality gap, weight
    normalization and the reproduction residual A w = B are all checked
    to 1e-9.
    """
    if state.n_qubits != polytope.n_qubits:
        raise ValueError("state and polytope qubit counts differ")
    k = polytope.n_states
    a_split = _split_matrix(polytope)
    sol = solve_standard_form(a_split, state.coeffs, np.ones(2 * k))
    weights = sol.x[:k] - sol.x[k:]
    value = sol.value - 1.0
    if value < -_CERT_TOL:
        raise RomSolverError(f"negative robustness {value} breaks the LP contract")
    value = max(value, 0.0)
    if sol.gap > _CERT_TOL:
        raise RomSolverError(f"duality gap {sol.gap} exceeds certificate tolerance")
    if abs(weights.sum() - 1.0) > _CERT_TOL:
        raise RomSolverError(f"weights sum to {weights.sum()}, expected 1")
    residual = float(np.abs(polytope.a_matrix @ weights - state.coeffs).max())
    if residual > _CERT_TOL:
        raise RomSolverError(f"decomposition residual {residual} exceeds 1e-9")
    if abs(np.abs(weights).sum() - 1.0 - value) > _CERT_TOL:
        raise RomSolverError("objective does not match sum |weights| - 1")
    return RomResult(value=value, weights=weights, objective_gap=sol.gap,
                     iterations=sol.iterations)


def rom_closed_form(bloch_x: float, bloch_z: float) -> float:
    """max(|x| + |z| - 1, 0) for a qubit with Bloch vector (x, 0, z).

    The absolute values extend the positive-quadrant four-state
    decomposition to the whole disc: sign flips of Bloch components are
    themselves stabilizer (Pauli) rotations of the octahedron.
    """
    if bloch_x**2 + bloch_z**2 > 1.0 + 1e-9:
        raise ValueError(
            f"Bloch vector ({bloch_x}, {bloch_z}) lies outside the unit disc"
        )
    return max(abs(bloch_x) + abs(bloch_z) - 1.0, 0.0)


def log_robustness(state: PauliVector, polytope: StabilizerPolytope) -> float:
    """log2(1 + R); base 2 so that the H state carries exactly 1/2."""
    return math.log2(1.0 + rom_lp(state, polytope).value)


def global_magic(joint: PauliVector, polytope: StabilizerPolytope) -> float:
    """Correlated share of the magic of a two-qubit state.

    Q = log2(1 + R(rho_12)) - log2(1 + R(rho_1 x rho_2)); zero for any
    product state, may in principle be negative, and is never clipped.
    """
    if joint.n_qubits != 2:
        raise ValueError("global_magic expects a two-qubit state")
    product = tensor_product(partial_trace(joint, 0), partial_trace(joint, 1))
    return log_robustness(joint, polytope) - log_robustness(product, polytope)
