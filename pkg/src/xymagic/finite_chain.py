"""Sparse exact diagonalization of finite open XY chains.

Desk-scale stand-in for matrix-product-state methods:

    H = -J sum_{i<N} [ (1+g)/2 sx_i sx_{i+1} + (1-g)/2 sy_i sy_{i+1} ]
        - h sum_i sz_i - b sum_i sx_i,        (units of h, lam = J/h)

with the lowest eigenvectors found by implicitly restarted Lanczos on a
matrix-free operator.  The Hamiltonian is never stored: basis state s
encodes sz_i = +1 as bit_i(s) = 0, the combined bond term acts as a
bit-pair flip with coefficient matrix [[-J g, -J], [-J, -J g]] (the xx
and yy flips share the same index permutation), and the longitudinal
field is a sum of single-bit flips.  Memory stays O(2^N) for vectors
only, so N = 20 fits comfortably.

The symmetry-broken branch of the ordered phase comes in two routes:
an explicit field b > 0 (ground_state), or, since no unbiased field can
beat the parity splitting of a short chain, the x-maximizing
combination of the lowest parity pair (broken_pair_state).  ground_state
also falls back to the pair combination when the splitting drops below
10x the eigensolver tolerance, so the branch stays well defined for a
vanishing field deep in the ordered phase.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as spla

from .quantum_state import PauliVector

try:  # optional accelerator; the numpy path below is the reference
    from ._chain_kernel import apply_chain

    _HAVE_KERNEL = True
except ImportError:  # pragma: no cover - numba missing
    _HAVE_KERNEL = False

DEFAULT_SB_FIELD = 1e-6
DEFAULT_EIG_TOL = 1e-10


class EigensolverError(RuntimeError):
    """Iterative diagonalization failed to reach the residual tolerance."""


@dataclass(frozen=True)
class FiniteChainSpec:
    n_sites: int
    lam: float
    gamma: float
    sb_field: float = DEFAULT_SB_FIELD
    eig_tol: float = DEFAULT_EIG_TOL

    def __post_init__(self):
        if not 4 <= self.n_sites <= 20:
            raise ValueError(f"n_sites must be in [4, 20], got {self.n_sites}")
        if not self.lam >= 0.0:
            raise ValueError(f"lam must be >= 0, got {self.lam}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must be in [0, 1], got {self.gamma}")
        if not 0.0 <= self.sb_field < 0.1:
            raise ValueError("sb_field must be a small nonnegative field")
        if not self.eig_tol > 0.0:
            raise ValueError("eig_tol must be positive")


def central_site(n_sites: int) -> int:
    """0-based index of the central site (ties resolve to the left)."""
    return (n_sites - 1) // 2


def central_pair(n_sites: int, r: int) -> tuple[int, int]:
    """0-based pair of sites at distance r, symmetric about the center."""
    if r < 1 or r >= n_sites:
        raise ValueError(f"pair distance {r} does not fit in {n_sites} sites")
    first = (n_sites - 1 - r) // 2
    return first, first + r


class _ChainOperator:
    """Matrix-free H application via bit-reshaped axis flips."""

    def __init__(self, spec: FiniteChainSpec):
        self.spec = spec
        n = spec.n_sites
        dim = 1 << n
        idx = np.arange(dim, dtype=np.int64)
        diag = np.zeros(dim)
        for i in range(n):
            diag -= 1.0 - 2.0 * ((idx >> i) & 1)  # -h sum sz
        self.diag = diag
        # bond coefficient over (bit_{i+1}, bit_i): equal-bit pairs couple
        # via -J*g (xx - yy share), unequal via -J (xx + yy share)
        j = spec.lam
        self.bond_coef = np.array([[-j * spec.gamma, -j], [-j, -j * spec.gamma]])
        self.dim = dim

    def matvec(self, v):
        spec = self.spec
        n = spec.n_sites
        v = np.ascontiguousarray(v.reshape(self.dim), dtype=float)
        if _HAVE_KERNEL:
            return apply_chain(v, np.empty_like(v), self.diag, n, spec.lam,
                               spec.gamma, spec.sb_field)
        out = self.diag * v
        coef = self.bond_coef[None, :, :, None]
        for i in range(n - 1):
            shape = (1 << (n - 2 - i), 2, 2, 1 << i)
            block = v.reshape(shape)
            np.add(out.reshape(shape), coef * block[:, ::-1, ::-1, :],
                   out=out.reshape(shape))
        if spec.sb_field != 0.0:
            b = spec.sb_field
            for i in range(n):
                shape = (1 << (n - 1 - i), 2, 1 << i)
                block = v.reshape(shape)
                np.add(out.reshape(shape), (-b) * block[:, ::-1, :],
                       out=out.reshape(shape))
        return out

    def as_linear_operator(self):
        return spla.LinearOperator((self.dim, self.dim), matvec=self.matvec,
                                   dtype=float)


@dataclass(frozen=True, eq=False)
class FiniteChainState:
    """Ground-state handle: eigenvector plus convergence diagnostics."""

    spec: FiniteChainSpec
    vector: np.ndarray
    energy: float
    residual: float
    gap: float


def _x_expectation(vector, n, site):
    shape = (1 << (n - 1 - site), 2, 1 << site)
    block = vector.reshape(shape)
    return float(np.vdot(block, block[:, ::-1, :]).real)


def ground_state(spec: FiniteChainSpec, v0: np.ndarray | None = None) -> FiniteChainState:
    """Lowest eigenvector of the open chain with residual <= eig_tol.

    `v0` warm-starts the Lanczos iteration (useful when sweeping lam).
    Near-degenerate lowest pairs (gap < 10 * eig_tol) are resolved by
    maximizing the central <sigma_x> inside the two-dimensional lowest
    invariant subspace.
    """
    op = _ChainOperator(spec)
    lin = op.as_linear_operator()
    try:
        vals, vecs = spla.eigsh(
            lin, k=2, which="SA", tol=spec.eig_tol * 1e-2,
            v0=v0, ncv=min(max(20, 2 * 2 + 10), op.dim - 1),
            maxiter=200000,
        )
    except spla.ArpackNoConvergence as exc:
        raise EigensolverError(f"Lanczos did not converge: {exc}") from exc
    order = np.argsort(vals)
    vals = vals[order]
    vecs = vecs[:, order]
    gap = float(vals[1] - vals[0])
    if gap < 10.0 * spec.eig_tol:
        # pick the broken-branch combination inside span{v0, v1}
        c = central_site(spec.n_sites)
        n = spec.n_sites
        x00 = _x_expectation(vecs[:, 0], n, c)
        x11 = _x_expectation(vecs[:, 1], n, c)
        shape = (1 << (n - 1 - c), 2, 1 << c)
        b0 = vecs[:, 0].reshape(shape)
        b1 = vecs[:, 1].reshape(shape)
        x01 = float(np.vdot(b0, b1[:, ::-1, :]).real)
        xmat = np.array([[x00, x01], [x01, x11]])
        w, u = np.linalg.eigh(xmat)
        combo = u[:, np.argmax(w)]
        vector = combo[0] * vecs[:, 0] + combo[1] * vecs[:, 1]
        energy = float(combo @ (np.diag(vals) @ combo))
    else:
        vector = vecs[:, 0]
        energy = float(vals[0])
    vector = vector / np.linalg.norm(vector)
    if _x_expectation(vector, spec.n_sites, central_site(spec.n_sites)) < 0.0:
        vector = -vector  # sign of the vector itself is free; flip for reproducibility
    residual = float(np.linalg.norm(op.matvec(vector) - energy * vector))
    if residual > spec.eig_tol:
        raise EigensolverError(
            f"ground-state residual {residual:.3e} exceeds eig_tol {spec.eig_tol:.3e}"
        )
    return FiniteChainState(spec=spec, vector=vector, energy=energy,
                            residual=residual, gap=gap)


def _pauli_expectation(vector, n, ops: dict[int, str]) -> float:
    """<P> for a Pauli string given as {site: 'X'|'Y'|'Z'} on a real vector."""
    n_y = sum(1 for p in ops.values() if p == "Y")
    if n_y % 2 == 1:
        return 0.0  # purely imaginary matrix elements; zero on real states
    mask = 0
    for site, p in ops.items():
        if p in ("X", "Y"):
            mask |= 1 << site
    dim = 1 << n
    idx = np.arange(dim, dtype=np.int64)
    sign = np.ones(dim)
    for site, p in ops.items():
        if p in ("Y", "Z"):
            sign *= 1.0 - 2.0 * ((idx >> site) & 1)
    phase = (-1.0) ** ((n_y // 2) % 2)
    if mask:
        flipped = vector[idx ^ mask]
    else:
        flipped = vector
    return phase * float(np.dot(vector * sign, flipped))


def reduced_density(state: FiniteChainState, sites) -> PauliVector:
    """Exact one- or two-site reduced density matrix of the eigenvector.

    `sites` is a single 0-based index or a pair (i, j) with i < j; the
    returned PauliVector is validated with positivity tolerance 1e-10.
    """
    n = state.spec.n_sites
    if isinstance(sites, (int, np.integer)):
        sites = (int(sites),)
    else:
        sites = tuple(int(s) for s in sites)
    if any(not 0 <= s < n for s in sites):
        raise ValueError(f"sites {sites} outside chain of {n} sites")
    if len(sites) == 1:
        (i,) = sites
        c = np.array([
            1.0,
            _pauli_expectation(state.vector, n, {i: "X"}),
            _pauli_expectation(state.vector, n, {i: "Y"}),
            _pauli_expectation(state.vector, n, {i: "Z"}),
        ])
        return PauliVector(1, c, positivity_tol=1e-10)
    if len(sites) != 2 or sites[0] == sites[1]:
        raise ValueError("sites must be one index or two distinct indices")
    i, j = sites
    labels = "IXYZ"
    c = np.empty(16)
    for a, pa in enumerate(labels):
        for b, pb in enumerate(labels):
            ops = {}
            if pa != "I":
                ops[i] = pa
            if pb != "I":
                ops[j] = pb
            if not ops:
                c[4 * a + b] = 1.0
            else:
                c[4 * a + b] = _pauli_expectation(state.vector, n, ops)
    return PauliVector(2, c, positivity_tol=1e-10)


def broken_pair_state(spec: FiniteChainSpec, v0=None) -> FiniteChainState:
    """Symmetry-broken surrogate from the two lowest eigenvectors.

    Open chains of desk-scale length cannot be polarized by a weak
    longitudinal field (the parity splitting decays only as lam^-N), so
    the broken branch is built directly as the equal-weight combination
    of the quasi-degenerate pair, signed to make the central <sigma_x>
    positive.  At sb_field = 0 the two states have definite phase-flip
    parity, the diagonal matrix elements of sigma_x vanish, and the
    combination's central magnetization equals the standard finite-size
    estimator |<0|sigma_x|1>|: exponentially close to the spontaneous
    magnetization in the ordered phase, decaying as a power of the
    length at and below the transition.
    """
    op = _ChainOperator(spec)
    lin = op.as_linear_operator()
    try:
        vals, vecs = spla.eigsh(
            lin, k=2, which="SA", tol=spec.eig_tol * 1e-2,
            v0=v0, ncv=min(20, op.dim - 1), maxiter=200000,
        )
    except spla.ArpackNoConvergence as exc:
        raise EigensolverError(f"Lanczos did not converge: {exc}") from exc
    order = np.argsort(vals)
    vals = vals[order]
    vecs = vecs[:, order]
    c = central_site(spec.n_sites)
    n = spec.n_sites
    x00 = _x_expectation(vecs[:, 0], n, c)
    x11 = _x_expectation(vecs[:, 1], n, c)
    shape = (1 << (n - 1 - c), 2, 1 << c)
    x01 = float(np.vdot(vecs[:, 0].reshape(shape),
                        vecs[:, 1].reshape(shape)[:, ::-1, :]).real)
    xmat = np.array([[x00, x01], [x01, x11]])
    w, u = np.linalg.eigh(xmat)
    combo = u[:, np.argmax(w)]
    vector = combo[0] * vecs[:, 0] + combo[1] * vecs[:, 1]
    vector /= np.linalg.norm(vector)
    if _x_expectation(vector, n, c) < 0.0:
        vector = -vector
    energy = float(combo @ (vals * combo))
    residual = float(np.linalg.norm(op.matvec(vector) - energy * vector))
    gap = float(vals[1] - vals[0])
    # the combination is only an eigenvector up to the pair splitting
    if residual > max(spec.eig_tol, gap):
        raise EigensolverError(
            f"pair-combination residual {residual:.3e} exceeds the splitting"
        )
    return FiniteChainState(spec=spec, vector=vector, energy=energy,
                            residual=residual, gap=gap)


def magnetization_profile(n_sites, gamma, lam_values, *, sb_field=DEFAULT_SB_FIELD,
                          eig_tol=DEFAULT_EIG_TOL, pair_distance=None,
                          method="field"):
    """Warm-started sweep over lam: central-site <sx>, <sz> (and the central
    pair state when pair_distance is given).

    method 'field' diagonalizes the Hamiltonian including sb_field;
    method 'pair' sets the field to zero and builds the broken branch
    from the two lowest eigenvectors (see broken_pair_state).  Returns a
    dict with arrays 'sx', 'sz' and, if requested, a list of two-site
    PauliVectors under 'pair'; consecutive diagonalizations reuse the
    previous eigenvector as the Lanczos starting vector.
    """
    if method not in ("field", "pair"):
        raise ValueError(f"unknown method {method!r}")
    site = central_site(n_sites)
    sx = np.empty(len(lam_values))
    sz = np.empty(len(lam_values))
    pairs = [] if pair_distance is not None else None
    v0 = None
    for k, lam in enumerate(lam_values):
        if method == "pair":
            spec = FiniteChainSpec(n_sites=n_sites, lam=float(lam), gamma=gamma,
                                   sb_field=0.0, eig_tol=eig_tol)
            gs = broken_pair_state(spec, v0=v0)
        else:
            spec = FiniteChainSpec(n_sites=n_sites, lam=float(lam), gamma=gamma,
                                   sb_field=sb_field, eig_tol=eig_tol)
            gs = ground_state(spec, v0=v0)
        v0 = gs.vector
        rdm = reduced_density(gs, site)
        sx[k] = rdm.coeffs[1]
        sz[k] = rdm.coeffs[3]
        if pairs is not None:
            pairs.append(reduced_density(gs, central_pair(n_sites, pair_distance)))
    out = {"lam": np.asarray(lam_values, dtype=float), "sx": sx, "sz": sz}
    if pairs is not None:
        out["pair"] = pairs
    return out


def order_parameter_derivative_peak(n_sites, gamma, lam_grid, *,
                                    sb_field=DEFAULT_SB_FIELD,
                                    eig_tol=DEFAULT_EIG_TOL,
                                    n_refine=2, refine_points=11,
                                    method="field") -> float:
    """Finite-size critical point: argmax of d<sx>/dlam at the central site.

    The centered-difference derivative is maximized on the given grid and
    the argmax is re-resolved on n_refine successively finer grids.  A
    peak landing on a grid boundary raises ValueError (grid too narrow).
    """
    grid = np.asarray(lam_grid, dtype=float)
    if grid.size < 5:
        raise ValueError("lam_grid needs at least 5 points")
    for level in range(n_refine + 1):
        prof = magnetization_profile(n_sites, gamma, grid, sb_field=sb_field,
                                     eig_tol=eig_tol, method=method)
        deriv = np.gradient(prof["sx"], grid)
        k = int(np.argmax(deriv))
        if k == 0 or k == grid.size - 1:
            raise ValueError(
                f"derivative peak at grid boundary (lam = {grid[k]}); widen the grid"
            )
        if level == n_refine:
            # parabolic vertex through the three points around the argmax
            x0, x1, x2 = grid[k - 1:k + 2]
            y0, y1, y2 = deriv[k - 1:k + 2]
            denom = (y0 - 2.0 * y1 + y2)
            if denom < 0.0:
                shift = 0.5 * (y0 - y2) / denom
                return float(x1 + shift * (x1 - x0))
            return float(x1)
        grid = np.linspace(grid[k - 1], grid[k + 1], refine_points)
    raise AssertionError("unreachable")
