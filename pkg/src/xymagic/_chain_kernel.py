"""Numba-compiled fused application of the open-chain Hamiltonian.

One pass over the basis: bond (i, i+1) couples s to s ^ (11 << i) with
coefficient -J*g when the two bits agree (the xx and yy flips add) and
-J when they differ (they cancel to the hopping amplitude), the
transverse field is diagonal, and the symmetry-breaking field is a sum
of single-bit flips.  Equivalent to the numpy reference path in
finite_chain._ChainOperator.matvec; kept separate so the package works
without numba.
"""

from numba import njit, prange


@njit(parallel=True, fastmath=True, cache=True)
def apply_chain(v, out, diag, n, lam, gamma, sb):
    dim = v.shape[0]
    c_same = -lam * gamma
    c_diff = -lam
    for s in prange(dim):
        acc = diag[s] * v[s]
        for i in range(n - 1):
            if ((s >> i) & 1) == ((s >> (i + 1)) & 1):
                acc += c_same * v[s ^ (3 << i)]
            else:
                acc += c_diff * v[s ^ (3 << i)]
        if sb != 0.0:
            for i in range(n):
                acc -= sb * v[s ^ (1 << i)]
        out[s] = acc
    return out
