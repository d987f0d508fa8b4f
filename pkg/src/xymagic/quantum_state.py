"""Density matrices of one and two qubits stored in the Pauli basis.

A state is a real coefficient vector c with c[a] = Tr(sigma^a rho), the
Pauli strings ordered lexicographically with I < X < Y < Z (for two
qubits: II, IX, IY, IZ, XI, ..., ZZ).  The matrix is recovered as
rho = 2^-n sum_a c[a] sigma^a and is only reconstructed explicitly for
eigenvalue and fidelity checks; everything else (tensor products,
partial traces, purities, the robustness linear program) works directly
on the coefficients.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

DEFAULT_POSITIVITY_TOL = 1e-9

PAULI_LABELS = "IXYZ"

SIGMA = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


def pauli_strings(n_qubits):
    """All n-qubit Pauli labels in the canonical (lexicographic) order."""
    labels = [""]
    for _ in range(n_qubits):
        labels = [s + p for s in labels for p in PAULI_LABELS]
    return labels


def pauli_matrices(n_qubits):
    """Dense 2^n x 2^n Pauli matrices in canonical order."""
    mats = []
    for label in pauli_strings(n_qubits):
        m = np.array([[1.0 + 0.0j]])
        for ch in label:
            m = np.kron(m, SIGMA[ch])
        mats.append(m)
    return mats


_PAULI_CACHE = {1: pauli_matrices(1), 2: pauli_matrices(2)}


class StateValidationError(ValueError):
    """Coefficient vector does not describe a physical density matrix."""


@dataclass(frozen=True, eq=False)
class PauliVector:
    """Immutable n-qubit state (n = 1 or 2) as real Pauli coefficients.

    coeffs[0] is the identity coefficient and must equal 1 (unit trace).
    Construction validates hermiticity bounds: the reconstructed matrix
    must have min eigenvalue >= -positivity_tol and purity <= 1 + 1e-9.
    Failing states raise StateValidationError instead of being clipped,
    so upstream correlator bugs surface immediately.
    """

    n_qubits: int
    coeffs: np.ndarray
    positivity_tol: float = field(default=DEFAULT_POSITIVITY_TOL, compare=False)

    def __post_init__(self):
        if self.n_qubits not in (1, 2):
            raise StateValidationError(f"n_qubits must be 1 or 2, got {self.n_qubits}")
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != (4**self.n_qubits,):
            raise StateValidationError(
                f"expected {4**self.n_qubits} coefficients, got shape {c.shape}"
            )
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)
        if c[0] != 1.0:
            raise StateValidationError(f"identity coefficient must be 1, got {c[0]!r}")
        p = self.purity()
        if p > 1.0 + 1e-9:
            raise StateValidationError(f"purity {p} exceeds 1")
        lam_min = float(np.linalg.eigvalsh(self.to_matrix()).min())
        if lam_min < -self.positivity_tol:
            raise StateValidationError(
                f"reconstructed matrix has eigenvalue {lam_min} < -{self.positivity_tol}"
            )

    def to_matrix(self):
        """Reconstruct the dense density matrix (complex 2^n x 2^n)."""
        mats = _PAULI_CACHE[self.n_qubits]
        dim = 2**self.n_qubits
        rho = np.zeros((dim, dim), dtype=complex)
        for c, sigma in zip(self.coeffs, mats):
            if c != 0.0:
                rho += c * sigma
        return rho / dim

    def purity(self):
        return float(np.dot(self.coeffs, self.coeffs)) / 2**self.n_qubits

    def bloch(self):
        """Bloch vector (x, y, z); single-qubit states only."""
        if self.n_qubits != 1:
            raise ValueError("bloch() is defined for single-qubit states")
        return tuple(float(v) for v in self.coeffs[1:])

    def to_json(self) -> str:
        return json.dumps({"n": self.n_qubits, "coeffs": list(map(float, self.coeffs))})

    @classmethod
    def from_json(cls, text: str, positivity_tol: float = DEFAULT_POSITIVITY_TOL):
        data = json.loads(text)
        return cls(data["n"], np.array(data["coeffs"], dtype=float), positivity_tol)

    @classmethod
    def from_bloch(cls, x, y, z, positivity_tol: float = DEFAULT_POSITIVITY_TOL):
        return cls(1, np.array([1.0, x, y, z]), positivity_tol)


def computational_zero():
    """|0><0|, Bloch vector (0, 0, 1)."""
    return PauliVector.from_bloch(0.0, 0.0, 1.0)


def maximally_mixed(n_qubits=1):
    c = np.zeros(4**n_qubits)
    c[0] = 1.0
    return PauliVector(n_qubits, c)


def h_state():
    """Single-qubit state with Bloch vector (1/sqrt2, 0, 1/sqrt2).

    The most magical qubit state confined to an equatorial plane of the
    Bloch sphere; its robustness of magic is sqrt(2) - 1.
    """
    s = 1.0 / np.sqrt(2.0)
    return PauliVector.from_bloch(s, 0.0, s)


def bell_state():
    """(|00> + |11>)/sqrt2 as a PauliVector (XX = 1, YY = -1, ZZ = 1)."""
    c = np.zeros(16)
    c[0] = 1.0
    c[5] = 1.0   # XX
    c[10] = -1.0  # YY
    c[15] = 1.0  # ZZ
    return PauliVector(2, c)


def tensor_product(a: PauliVector, b: PauliVector) -> PauliVector:
    """Product state a (x) b; coefficient (alpha,beta) = a[alpha] * b[beta]."""
    if a.n_qubits != 1 or b.n_qubits != 1:
        raise ValueError("tensor_product expects two single-qubit states")
    return PauliVector(2, np.kron(a.coeffs, b.coeffs),
                       positivity_tol=max(a.positivity_tol, b.positivity_tol))


def partial_trace(ab: PauliVector, keep: int) -> PauliVector:
    """Reduce a two-qubit state to qubit `keep` (0 = first, 1 = second).

    The kept qubit's Pauli coefficients are the one-sided entries of the
    joint vector (alpha-I for the first qubit, I-alpha for the second),
    so the operation is exact and trace preserving.
    """
    if ab.n_qubits != 2:
        raise ValueError("partial_trace expects a two-qubit state")
    if keep not in (0, 1):
        raise ValueError("keep must be 0 (first qubit) or 1 (second qubit)")
    c = ab.coeffs.reshape(4, 4)
    reduced = c[:, 0] if keep == 0 else c[0, :]
    return PauliVector(1, reduced.copy(), positivity_tol=ab.positivity_tol)


def purity(state: PauliVector) -> float:
    """Tr(rho^2) = 2^-n sum_a c[a]^2."""
    return state.purity()


def _psd_sqrt(mat, tol):
    vals, vecs = np.linalg.eigh(mat)
    if vals.min() < -tol:
        raise StateValidationError(
            f"matrix is not PSD within tolerance (min eigenvalue {vals.min()})"
        )
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def fidelity(a: PauliVector, b: PauliVector) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2 in [0, 1].

    For a pure `a` this reduces to <psi|b|psi>.  Raises if either
    reconstructed matrix fails the PSD check beyond its tolerance.
    """
    if a.n_qubits != b.n_qubits:
        raise ValueError("fidelity requires states on the same number of qubits")
    tol = max(a.positivity_tol, b.positivity_tol)
    sa = _psd_sqrt(a.to_matrix(), tol)
    inner = sa @ b.to_matrix() @ sa
    vals = np.linalg.eigvalsh(inner)
    if vals.min() < -tol:
        raise StateValidationError(
            f"fidelity kernel is not PSD within tolerance (min eigenvalue {vals.min()})"
        )
    f = float(np.sqrt(np.clip(vals, 0.0, None)).sum()) ** 2
    return min(f, 1.0)
