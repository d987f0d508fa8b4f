import numpy as np
import pytest

from xymagic.quantum_state import (
    PauliVector,
    StateValidationError,
    bell_state,
    computational_zero,
    fidelity,
    h_state,
    maximally_mixed,
    partial_trace,
    pauli_matrices,
    purity,
    tensor_product,
)


def random_single_qubit_states(count, seed=0):
    rng = np.random.default_rng(seed)
    states = []
    for _ in range(count):
        v = rng.standard_normal(3)
        v *= rng.uniform() ** (1 / 3) / np.linalg.norm(v)
        states.append(PauliVector.from_bloch(*v))
    return states


def random_two_qubit_state(rng):
    # Ginibre construction, then project onto Pauli coefficients
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    mats = pauli_matrices(2)
    coeffs = np.array([np.trace(m @ rho).real for m in mats])
    coeffs /= coeffs[0]
    coeffs[0] = 1.0  # the identity coefficient is exact by contract
    return PauliVector(2, coeffs)


class TestInvariants:
    def test_identity_coefficient_must_be_one(self):
        with pytest.raises(StateValidationError):
            PauliVector(1, np.array([0.9, 0.0, 0.0, 0.0]))

    def test_bloch_vector_outside_sphere_rejected(self):
        with pytest.raises(StateValidationError):
            PauliVector.from_bloch(0.9, 0.0, 0.9)

    def test_positivity_tolerance_is_configurable(self):
        # Bell-diagonal state with min eigenvalue (1 - 3c)/4 = -5e-6
        c = (1.0 + 2e-5) / 3.0
        coeffs = np.zeros(16)
        coeffs[0] = 1.0
        coeffs[5] = coeffs[10] = coeffs[15] = c
        with pytest.raises(StateValidationError):
            PauliVector(2, coeffs, positivity_tol=1e-9)
        PauliVector(2, coeffs, positivity_tol=1e-4)

    def test_wrong_length_rejected(self):
        with pytest.raises(StateValidationError):
            PauliVector(2, np.zeros(4))

    def test_purity_bounds_on_random_states(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            st = random_two_qubit_state(rng)
            assert 0.25 - 1e-12 <= st.purity() <= 1.0 + 1e-9


class TestTensorProduct:
    def test_maximally_mixed_pair(self):
        joint = tensor_product(maximally_mixed(1), maximally_mixed(1))
        expected = np.zeros(16)
        expected[0] = 1.0
        assert np.array_equal(joint.coeffs, expected)

    def test_computational_basis_pair(self):
        joint = tensor_product(computational_zero(), computational_zero())
        # nonzero entries: II, IZ, ZI, ZZ
        expected = np.zeros(16)
        for idx in (0, 3, 12, 15):
            expected[idx] = 1.0
        assert np.array_equal(joint.coeffs, expected)

    def test_h_pair_against_matrix_kron_oracle(self):
        h = h_state()
        joint = tensor_product(h, h)
        rho = np.kron(h.to_matrix(), h.to_matrix())
        mats = pauli_matrices(2)
        oracle = np.array([np.trace(m @ rho).real for m in mats])
        assert np.allclose(joint.coeffs, oracle, atol=1e-12)
        s = 0.5
        r = 1 / np.sqrt(2)
        labels = ["II", "IX", "IY", "IZ", "XI", "XX", "XY", "XZ",
                  "YI", "YX", "YY", "YZ", "ZI", "ZX", "ZY", "ZZ"]
        by_label = dict(zip(labels, joint.coeffs))
        for lbl in ("XX", "XZ", "ZX", "ZZ"):
            assert by_label[lbl] == pytest.approx(s, abs=1e-12)
        for lbl in ("IX", "IZ", "XI", "ZI"):
            assert by_label[lbl] == pytest.approx(r, abs=1e-12)

    def test_purity_is_multiplicative(self):
        for a, b in zip(random_single_qubit_states(20, seed=2),
                        random_single_qubit_states(20, seed=3)):
            joint = tensor_product(a, b)
            assert joint.purity() == pytest.approx(a.purity() * b.purity(), abs=1e-12)


class TestPartialTrace:
    def test_round_trip_is_identity_on_each_factor(self):
        for a, b in zip(random_single_qubit_states(20, seed=4),
                        random_single_qubit_states(20, seed=5)):
            joint = tensor_product(a, b)
            assert np.array_equal(partial_trace(joint, 0).coeffs, a.coeffs)
            assert np.array_equal(partial_trace(joint, 1).coeffs, b.coeffs)

    def test_bell_marginals_are_maximally_mixed(self):
        bell = bell_state()
        for keep in (0, 1):
            assert np.array_equal(partial_trace(bell, keep).coeffs,
                                  maximally_mixed(1).coeffs)

    def test_against_dense_matrix_trace_oracle(self):
        rng = np.random.default_rng(6)
        mats1 = pauli_matrices(1)
        for _ in range(20):
            st = random_two_qubit_state(rng)
            rho = st.to_matrix().reshape(2, 2, 2, 2)
            rho_first = np.einsum("ikjk->ij", rho)
            oracle = np.array([np.trace(m @ rho_first).real for m in mats1])
            assert np.allclose(partial_trace(st, 0).coeffs, oracle, atol=1e-12)

    def test_trace_preserving(self):
        rng = np.random.default_rng(7)
        st = random_two_qubit_state(rng)
        assert partial_trace(st, 0).coeffs[0] == 1.0


class TestFidelityPurity:
    def test_self_fidelity_is_one(self):
        for st in random_single_qubit_states(10, seed=8):
            assert fidelity(st, st) == pytest.approx(1.0, abs=1e-9)

    def test_pure_versus_mixed_reduces_to_overlap(self):
        assert fidelity(computational_zero(), maximally_mixed(1)) == pytest.approx(0.5, abs=1e-12)

    def test_purity_of_maximally_mixed(self):
        assert purity(maximally_mixed(1)) == pytest.approx(0.5, abs=1e-15)
        assert purity(maximally_mixed(2)) == pytest.approx(0.25, abs=1e-15)

    def test_fidelity_symmetric_on_random_pairs(self):
        a_states = random_single_qubit_states(10, seed=9)
        b_states = random_single_qubit_states(10, seed=10)
        for a, b in zip(a_states, b_states):
            assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-10)


class TestSerialization:
    def test_json_round_trip(self):
        st = h_state()
        again = PauliVector.from_json(st.to_json())
        assert again.n_qubits == 1
        assert np.allclose(again.coeffs, st.coeffs)

    def test_json_shape(self):
        import json

        payload = json.loads(bell_state().to_json())
        assert payload["n"] == 2
        assert len(payload["coeffs"]) == 16
