"""Enumeration of pure stabilizer states and the expectation matrix A.

Pure stabilizer states on n qubits have exact Pauli coefficients in
{0, +1, -1}, so the orbit of |0...0> under the generating gates
(Hadamard, phase, CNOT) can be enumerated with integer arithmetic and
deduplicated without any floating-point ambiguity.  Conjugation by a
Clifford gate acts on the coefficient vector as a signed permutation,
which we precompute once per gate from the dense matrices.

The resulting polytope (6 states for one qubit, the octahedron; 60 for
two qubits) is the feasible-vertex set of the robustness linear program
and is built once and cached per qubit count.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .quantum_state import PauliVector, pauli_matrices

STABILIZER_COUNTS = {1: 6, 2: 60}  # 2^n * prod_{k<=n} (2^k + 1)

_H = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
_S = np.array([[1.0, 0.0], [0.0, 1.0j]])
_CNOT01 = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=float
)
_CNOT10 = np.array(
    [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=float
)


class MembershipError(RuntimeError):
    """The feasibility solve failed for a reason other than infeasibility."""


def _generator_unitaries(n_qubits):
    if n_qubits == 1:
        return [_H, _S]
    eye = np.eye(2)
    return [
        np.kron(_H, eye),
        np.kron(eye, _H),
        np.kron(_S, eye),
        np.kron(eye, _S),
        _CNOT01,
        _CNOT10,
    ]


def _conjugation_action(unitary, n_qubits):
    """Integer matrix M with (U rho U^dag) coefficients = M @ coefficients.

    M[a, b] = 2^-n Tr(sigma^a U sigma^b U^dag); for Clifford U this is a
    signed permutation, so rounding to int is exact.
    """
    mats = pauli_matrices(n_qubits)
    dim = 2**n_qubits
    m = np.empty((len(mats), len(mats)))
    for b, sb in enumerate(mats):
        conj = unitary @ sb @ unitary.conj().T
        for a, sa in enumerate(mats):
            m[a, b] = np.trace(sa @ conj).real / dim
    m_int = np.rint(m).astype(np.int64)
    if not np.allclose(m, m_int, atol=1e-12):
        raise RuntimeError("generator action is not a signed permutation")
    return m_int


def _zero_state_coeffs(n_qubits):
    """|0...0> coefficients: 1 on every all-{I,Z} string, 0 elsewhere."""
    if n_qubits == 1:
        return np.array([1, 0, 0, 1], dtype=np.int64)
    c = np.zeros(16, dtype=np.int64)
    for idx in (0, 3, 12, 15):  # II, IZ, ZI, ZZ
        c[idx] = 1
    return c


@dataclass(frozen=True, eq=False)
class StabilizerPolytope:
    """Pure stabilizer states S_k plus A[a, k] = Tr(sigma^a S_k).

    states are in a deterministic canonical order (sorted by coefficient
    vector); the A matrix columns follow the same order.
    """

    n_qubits: int
    states: tuple
    a_matrix: np.ndarray

    @property
    def n_states(self):
        return len(self.states)

    def generator_actions(self):
        """Signed-permutation matrices of the generating gates (for closure checks)."""
        return [_conjugation_action(u, self.n_qubits) for u in _generator_unitaries(self.n_qubits)]

    def to_json(self) -> str:
        return json.dumps(
            [{"n": s.n_qubits, "coeffs": list(map(float, s.coeffs))} for s in self.states]
        )


def _orbit(n_qubits):
    actions = [_conjugation_action(u, n_qubits) for u in _generator_unitaries(n_qubits)]
    start = _zero_state_coeffs(n_qubits)
    seen = {tuple(start)}
    frontier = [start]
    while frontier:
        nxt = []
        for c in frontier:
            for m in actions:
                image = m @ c
                key = tuple(image)
                if key not in seen:
                    seen.add(key)
                    nxt.append(image)
        frontier = nxt
    return sorted(seen)


@functools.lru_cache(maxsize=None)
def enumerate_polytope(n_qubits: int) -> StabilizerPolytope:
    """Enumerate all pure stabilizer states for n_qubits in {1, 2}.

    Breadth-first closure of |0...0> under Hadamard, phase and (for two
    qubits) both CNOT orientations, with exact integer deduplication.
    The orbit is complete: 6 states for n=1, 60 for n=2.
    """
    if n_qubits not in (1, 2):
        raise ValueError(f"stabilizer enumeration supports n in {{1, 2}}, got {n_qubits}")
    vectors = _orbit(n_qubits)
    if len(vectors) != STABILIZER_COUNTS[n_qubits]:
        raise RuntimeError(
            f"orbit produced {len(vectors)} states, expected {STABILIZER_COUNTS[n_qubits]}"
        )
    states = tuple(
        PauliVector(n_qubits, np.array(v, dtype=float)) for v in vectors
    )
    a_matrix = np.array([s.coeffs for s in states]).T
    return StabilizerPolytope(n_qubits=n_qubits, states=states, a_matrix=a_matrix)


def membership(state: PauliVector, polytope: StabilizerPolytope,
               tol: float = 1e-9) -> bool:
    """True iff `state` lies in the convex hull of the polytope vertices.

    Solved as a feasibility linear program (exists x >= 0 with A x = b;
    the identity row enforces sum x = 1).  Solver failures raise
    MembershipError and are never reported as non-membership.
    """
    if state.n_qubits != polytope.n_qubits:
        raise ValueError("state and polytope qubit counts differ")
    res = linprog(
        c=np.zeros(polytope.n_states),
        A_eq=polytope.a_matrix,
        b_eq=state.coeffs,
        bounds=(0, None),
        method="highs",
        options={
            "primal_feasibility_tolerance": tol,
            "dual_feasibility_tolerance": tol,
        },
    )
    if res.status == 0:
        return True
    if res.status == 2:
        return False
    raise MembershipError(f"feasibility solve failed: status {res.status}: {res.message}")
