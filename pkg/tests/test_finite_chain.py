import numpy as np
import pytest

from xymagic.finite_chain import (
    FiniteChainSpec,
    _ChainOperator,
    broken_pair_state,
    central_pair,
    central_site,
    ground_state,
    magnetization_profile,
    order_parameter_derivative_peak,
    reduced_density,
)
from xymagic.quantum_state import partial_trace
from xymagic.xy_correlators import ChainParams, transverse_magnetization

SX = np.array([[0.0, 1.0], [1.0, 0.0]])
SY = np.array([[0.0, -1.0j], [1.0j, 0.0]])
SZ = np.array([[1.0, 0.0], [0.0, -1.0]])
EYE = np.eye(2)


def site_operator(op, site, n):
    # bit `site` is the least significant; numpy kron builds MSB first
    m = np.array([[1.0 + 0.0j]])
    for k in range(n - 1, -1, -1):
        m = np.kron(m, op if k == site else EYE)
    return m


def dense_hamiltonian(spec: FiniteChainSpec):
    n = spec.n_sites
    h = np.zeros((2**n, 2**n), dtype=complex)
    for i in range(n - 1):
        h -= spec.lam * (1 + spec.gamma) / 2 * (
            site_operator(SX, i, n) @ site_operator(SX, i + 1, n))
        h -= spec.lam * (1 - spec.gamma) / 2 * (
            site_operator(SY, i, n) @ site_operator(SY, i + 1, n))
    for i in range(n):
        h -= site_operator(SZ, i, n)
        h -= spec.sb_field * site_operator(SX, i, n)
    assert np.abs(h.imag).max() < 1e-12
    return h.real


class TestOperator:
    @pytest.mark.parametrize("n,lam,gamma,sb", [
        (4, 1.3, 1.0, 1e-3),
        (5, 0.7, 0.5, 0.0),
        (6, 2.0, 0.0, 1e-2),
    ])
    def test_matvec_matches_dense(self, n, lam, gamma, sb):
        spec = FiniteChainSpec(n_sites=n, lam=lam, gamma=gamma, sb_field=sb)
        h = dense_hamiltonian(spec)
        rng = np.random.default_rng(0)
        v = rng.standard_normal(2**n)
        got = _ChainOperator(spec).matvec(v)
        assert np.abs(got - h @ v).max() < 1e-12


class TestGroundState:
    def test_two_site_chain_matches_dense_diagonalization(self):
        for lam in (0.4, 1.0, 1.7):
            spec = FiniteChainSpec(n_sites=4, lam=lam, gamma=1.0, sb_field=1e-6)
            gs = ground_state(spec)
            evals = np.linalg.eigvalsh(dense_hamiltonian(spec))
            assert gs.energy == pytest.approx(evals[0], abs=1e-10)

    def test_field_only_chain_is_fully_polarized(self):
        spec = FiniteChainSpec(n_sites=8, lam=0.0, gamma=1.0, sb_field=1e-6)
        gs = ground_state(spec)
        assert gs.energy == pytest.approx(-8.0, abs=1e-9)
        rdm = reduced_density(gs, central_site(8))
        assert rdm.coeffs[3] == pytest.approx(1.0, abs=1e-9)

    def test_ordered_phase_selects_positive_branch(self):
        spec = FiniteChainSpec(n_sites=10, lam=2.0, gamma=1.0, sb_field=1e-6)
        gs = ground_state(spec)
        rdm = reduced_density(gs, central_site(10))
        assert rdm.coeffs[1] > 0.0

    @pytest.mark.parametrize("n", [6, 8, 10])
    def test_energies_match_dense_to_tolerance(self, n):
        spec = FiniteChainSpec(n_sites=n, lam=1.2, gamma=0.6, sb_field=1e-5)
        gs = ground_state(spec)
        evals = np.linalg.eigvalsh(dense_hamiltonian(spec))
        assert abs(gs.energy - evals[0]) < 1e-9
        assert gs.gap == pytest.approx(evals[1] - evals[0], abs=1e-7)

    def test_residual_reported_and_small(self):
        spec = FiniteChainSpec(n_sites=8, lam=1.0, gamma=1.0, sb_field=1e-6,
                               eig_tol=1e-9)
        gs = ground_state(spec)
        assert gs.residual <= 1e-9

    def test_warm_start_agrees_with_cold_start(self):
        cold = ground_state(FiniteChainSpec(n_sites=8, lam=1.1, gamma=1.0))
        seed = ground_state(FiniteChainSpec(n_sites=8, lam=1.0, gamma=1.0))
        warm = ground_state(FiniteChainSpec(n_sites=8, lam=1.1, gamma=1.0),
                            v0=seed.vector)
        assert warm.energy == pytest.approx(cold.energy, abs=1e-10)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            FiniteChainSpec(n_sites=2, lam=1.0, gamma=1.0)
        with pytest.raises(ValueError):
            FiniteChainSpec(n_sites=24, lam=1.0, gamma=1.0)
        with pytest.raises(ValueError):
            FiniteChainSpec(n_sites=8, lam=1.0, gamma=1.5)


class TestReducedDensity:
    def test_single_site_against_dense_partial_trace(self):
        spec = FiniteChainSpec(n_sites=8, lam=1.5, gamma=1.0, sb_field=1e-4)
        gs = ground_state(spec)
        evals, evecs = np.linalg.eigh(dense_hamiltonian(spec))
        v = evecs[:, 0]
        c = central_site(8)
        blk = v.reshape(2 ** (8 - 1 - c), 2, 2**c)
        rho = np.einsum("aib,ajb->ij", blk, blk)
        rdm = reduced_density(gs, c)
        assert rdm.coeffs[1] == pytest.approx(abs(2 * rho[0, 1]), abs=1e-8)
        assert rdm.coeffs[3] == pytest.approx(rho[0, 0] - rho[1, 1], abs=1e-8)

    def test_two_site_cross_correlator_is_nonzero(self):
        # the xz cross moment has no closed correlator form; check it exists
        spec = FiniteChainSpec(n_sites=12, lam=1.5, gamma=1.0, sb_field=1e-3)
        gs = ground_state(spec)
        pair = reduced_density(gs, central_pair(12, 1))
        labels = ["II", "IX", "IY", "IZ", "XI", "XX", "XY", "XZ",
                  "YI", "YX", "YY", "YZ", "ZI", "ZX", "ZY", "ZZ"]
        by_label = dict(zip(labels, pair.coeffs))
        assert abs(by_label["XZ"]) > 1e-4
        assert abs(by_label["ZX"]) > 1e-4

    def test_two_site_against_dense_oracle(self):
        spec = FiniteChainSpec(n_sites=8, lam=1.5, gamma=1.0, sb_field=1e-3)
        gs = ground_state(spec)
        evals, evecs = np.linalg.eigh(dense_hamiltonian(spec))
        v = evecs[:, 0]
        i, j = central_pair(8, 1)
        pair = reduced_density(gs, (i, j))
        from xymagic.quantum_state import pauli_matrices

        rho_full = np.outer(v, v)
        mats = pauli_matrices(2)
        labels2 = [a + b for a in "IXYZ" for b in "IXYZ"]
        for idx, lbl in enumerate(labels2):
            op_j = {"I": EYE, "X": SX, "Y": SY, "Z": SZ}[lbl[1]]
            op_i = {"I": EYE, "X": SX, "Y": SY, "Z": SZ}[lbl[0]]
            full = site_operator(op_i, i, 8) @ site_operator(op_j, j, 8)
            expect = np.trace(full @ rho_full).real
            assert pair.coeffs[idx] == pytest.approx(expect, abs=1e-8), lbl

    def test_marginal_consistency(self):
        spec = FiniteChainSpec(n_sites=10, lam=0.9, gamma=0.7, sb_field=1e-6)
        gs = ground_state(spec)
        i, j = central_pair(10, 2)
        pair = reduced_density(gs, (i, j))
        single_i = reduced_density(gs, i)
        assert np.abs(partial_trace(pair, 0).coeffs - single_i.coeffs).max() < 1e-10

    def test_free_chain_central_site(self):
        spec = FiniteChainSpec(n_sites=8, lam=0.0, gamma=1.0, sb_field=0.0)
        gs = ground_state(spec)
        rdm = reduced_density(gs, central_site(8))
        assert np.allclose(rdm.coeffs, [1, 0, 0, 1], atol=1e-10)

    def test_site_bounds_checked(self):
        spec = FiniteChainSpec(n_sites=6, lam=1.0, gamma=1.0)
        gs = ground_state(spec)
        with pytest.raises(ValueError):
            reduced_density(gs, 6)
        with pytest.raises(ValueError):
            reduced_density(gs, (1, 1))


class TestCentralPlacement:
    def test_central_site_convention(self):
        assert central_site(8) == 3
        assert central_site(9) == 4

    def test_central_pair_symmetric(self):
        assert central_pair(16, 1) == (7, 8)
        assert central_pair(16, 5) == (5, 10)
        assert central_pair(12, 2) == (4, 6)
        with pytest.raises(ValueError):
            central_pair(8, 8)


class TestBulkAgreement:
    def test_central_sz_matches_infinite_chain(self):
        # boundary effects at the center are suppressed at this size
        spec = FiniteChainSpec(n_sites=16, lam=0.5, gamma=1.0, sb_field=1e-6,
                               eig_tol=1e-9)
        gs = ground_state(spec)
        sz_fin = reduced_density(gs, central_site(16)).coeffs[3]
        sz_inf = transverse_magnetization(ChainParams(lam=0.5, gamma=1.0))
        assert sz_fin == pytest.approx(sz_inf, abs=1e-3)

    def test_sb_field_insensitivity_away_from_critical_window(self):
        from xymagic.rom_solver import rom_closed_form

        roms = []
        for sb in (1e-6, 5e-7):
            spec = FiniteChainSpec(n_sites=10, lam=1.3, gamma=1.0, sb_field=sb)
            rdm = reduced_density(ground_state(spec), central_site(10))
            roms.append(rom_closed_form(rdm.coeffs[1], rdm.coeffs[3]))
        assert abs(roms[0] - roms[1]) < 1e-4


class TestBrokenPairState:
    def test_matches_spontaneous_magnetization_deep_in_order(self):
        from xymagic.xy_correlators import order_parameter

        spec = FiniteChainSpec(n_sites=12, lam=2.5, gamma=1.0, sb_field=0.0)
        st = broken_pair_state(spec)
        sx = reduced_density(st, central_site(12)).coeffs[1]
        m = order_parameter(ChainParams(lam=2.5, gamma=1.0))
        assert sx == pytest.approx(m, abs=0.02)

    def test_positive_branch(self):
        spec = FiniteChainSpec(n_sites=10, lam=1.4, gamma=0.8, sb_field=0.0)
        st = broken_pair_state(spec)
        assert reduced_density(st, central_site(10)).coeffs[1] > 0.0


class TestDerivativePeak:
    def test_small_chain_peak_is_interior_and_below_critical(self):
        grid = np.linspace(0.7, 1.15, 19)
        lam_c = order_parameter_derivative_peak(8, 1.0, grid, method="pair",
                                                sb_field=0.0, eig_tol=1e-8,
                                                n_refine=1)
        assert 0.7 < lam_c < 1.1

    def test_boundary_peak_raises(self):
        grid = np.linspace(1.3, 1.6, 7)
        with pytest.raises(ValueError):
            order_parameter_derivative_peak(8, 1.0, grid, method="pair",
                                            sb_field=0.0, n_refine=0)

    def test_profile_contains_requested_observables(self):
        prof = magnetization_profile(6, 1.0, [0.8, 1.0, 1.2], pair_distance=2,
                                     sb_field=0.0, method="pair")
        assert set(prof) == {"lam", "sx", "sz", "pair"}
        assert len(prof["pair"]) == 3
