import numpy as np
import pytest
from scipy.optimize import linprog

from xymagic.quantum_state import (
    PauliVector,
    bell_state,
    computational_zero,
    h_state,
    maximally_mixed,
    partial_trace,
    tensor_product,
)
from xymagic.rom_solver import (
    global_magic,
    log_robustness,
    rom_closed_form,
    rom_lp,
)
from xymagic.stabilizer_polytope import enumerate_polytope, membership

SQRT2 = np.sqrt(2.0)


@pytest.fixture(scope="module")
def poly1():
    return enumerate_polytope(1)


@pytest.fixture(scope="module")
def poly2():
    return enumerate_polytope(2)


def random_disc_states(count, seed):
    """Single-qubit states with <sigma_y> = 0, uniform over the x-z disc."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        ang = rng.uniform(0.0, 2.0 * np.pi)
        rad = np.sqrt(rng.uniform())
        out.append((rad * np.cos(ang), rad * np.sin(ang)))
    return out


def linprog_rom(state, polytope):
    """Independent route: HiGHS on the same split formulation."""
    k = polytope.n_states
    a = np.hstack([polytope.a_matrix, -polytope.a_matrix])
    res = linprog(np.ones(2 * k), A_eq=a, b_eq=state.coeffs, bounds=(0, None),
                  method="highs")
    assert res.status == 0
    return res.fun - 1.0


class TestClosedForm:
    def test_pole_state(self):
        assert rom_closed_form(0.0, 1.0) == 0.0

    def test_h_state_value(self):
        assert rom_closed_form(1 / SQRT2, 1 / SQRT2) == pytest.approx(SQRT2 - 1, abs=1e-15)

    def test_plain_arithmetic(self):
        assert rom_closed_form(0.3, 0.4) == 0.0
        assert rom_closed_form(0.8, 0.6) == pytest.approx(0.4, abs=1e-15)

    def test_sign_symmetric(self):
        assert rom_closed_form(-0.8, 0.6) == pytest.approx(0.4, abs=1e-15)
        assert rom_closed_form(0.8, -0.6) == pytest.approx(0.4, abs=1e-15)

    def test_rejects_outside_disc(self):
        with pytest.raises(ValueError):
            rom_closed_form(0.9, 0.9)


class TestRomLp:
    def test_stabilizer_vertex_has_zero_robustness(self, poly1):
        assert rom_lp(computational_zero(), poly1).value == 0.0

    def test_h_state(self, poly1):
        res = rom_lp(h_state(), poly1)
        assert res.value == pytest.approx(SQRT2 - 1, abs=1e-9)

    def test_h_pair(self, poly2):
        res = rom_lp(tensor_product(h_state(), h_state()), poly2)
        assert res.value == pytest.approx((3 * SQRT2 - 2) / 3, abs=1e-9)

    def test_result_contract_fields(self, poly2):
        st = tensor_product(h_state(), h_state())
        res = rom_lp(st, poly2)
        assert abs(np.abs(res.weights).sum() - 1.0 - res.value) < 1e-9
        assert abs(res.weights.sum() - 1.0) < 1e-9
        assert np.abs(poly2.a_matrix @ res.weights - st.coeffs).max() < 1e-9
        assert res.objective_gap < 1e-9
        assert res.iterations > 0

    def test_matches_closed_form_on_disc_states(self, poly1):
        worst = 0.0
        for bx, bz in random_disc_states(300, seed=11):
            lp = rom_lp(PauliVector.from_bloch(bx, 0.0, bz), poly1).value
            worst = max(worst, abs(lp - rom_closed_form(bx, bz)))
        assert worst < 1e-8

    def test_matches_external_solver_on_general_states(self, poly1):
        rng = np.random.default_rng(12)
        for _ in range(25):
            v = rng.standard_normal(3)
            v *= rng.uniform() ** (1 / 3) / np.linalg.norm(v)
            st = PauliVector.from_bloch(*v)
            mine = rom_lp(st, poly1).value
            theirs = linprog_rom(st, poly1)
            assert mine == pytest.approx(theirs, abs=1e-8)

    def test_matches_external_solver_two_qubit(self, poly2):
        rng = np.random.default_rng(13)
        from tests.test_quantum_state import random_two_qubit_state

        for _ in range(10):
            st = random_two_qubit_state(rng)
            assert rom_lp(st, poly2).value == pytest.approx(
                linprog_rom(st, poly2), abs=1e-8
            )

    def test_zero_iff_membership(self, poly1):
        for bx, bz in random_disc_states(100, seed=14):
            st = PauliVector.from_bloch(bx, 0.0, bz)
            is_zero = rom_lp(st, poly1).value <= 1e-9
            assert is_zero == membership(st, poly1)

    def test_pauli_frame_flip_invariance(self, poly1):
        rng = np.random.default_rng(15)
        for _ in range(25):
            v = rng.standard_normal(3)
            v *= rng.uniform() ** (1 / 3) / np.linalg.norm(v)
            base = rom_lp(PauliVector.from_bloch(*v), poly1).value
            for signs in ((-1, 1, 1), (1, -1, 1), (1, 1, -1), (-1, -1, -1)):
                flipped = PauliVector.from_bloch(*(s * c for s, c in zip(signs, v)))
                assert rom_lp(flipped, poly1).value == pytest.approx(base, abs=1e-9)

    def test_convexity_on_random_pairs(self, poly1):
        rng = np.random.default_rng(16)
        for _ in range(20):
            v1 = rng.standard_normal(3)
            v1 *= rng.uniform() ** (1 / 3) / np.linalg.norm(v1)
            v2 = rng.standard_normal(3)
            v2 *= rng.uniform() ** (1 / 3) / np.linalg.norm(v2)
            p = rng.uniform()
            mix = PauliVector.from_bloch(*(p * np.array(v1) + (1 - p) * np.array(v2)))
            r_mix = rom_lp(mix, poly1).value
            bound = (p * rom_lp(PauliVector.from_bloch(*v1), poly1).value
                     + (1 - p) * rom_lp(PauliVector.from_bloch(*v2), poly1).value)
            assert r_mix <= bound + 1e-8

    def test_submultiplicativity_of_one_plus_rom(self, poly1, poly2):
        rng = np.random.default_rng(17)
        for _ in range(10):
            v1 = rng.standard_normal(3)
            v1 *= rng.uniform() ** (1 / 3) / np.linalg.norm(v1)
            v2 = rng.standard_normal(3)
            v2 *= rng.uniform() ** (1 / 3) / np.linalg.norm(v2)
            a = PauliVector.from_bloch(*v1)
            b = PauliVector.from_bloch(*v2)
            joint = rom_lp(tensor_product(a, b), poly2).value
            bound = (1 + rom_lp(a, poly1).value) * (1 + rom_lp(b, poly1).value) - 1
            assert joint <= bound + 1e-8

    def test_dimension_mismatch_rejected(self, poly2):
        with pytest.raises(ValueError):
            rom_lp(h_state(), poly2)


class TestLogRobustnessAndGlobalMagic:
    def test_stabilizer_state_has_zero_log_robustness(self, poly1):
        assert log_robustness(computational_zero(), poly1) == 0.0

    def test_h_state_carries_half_a_bit(self, poly1):
        assert log_robustness(h_state(), poly1) == pytest.approx(0.5, abs=1e-9)

    def test_h_pair_log_value(self, poly2):
        expected = np.log2(1 + (3 * SQRT2 - 2) / 3)
        joint = tensor_product(h_state(), h_state())
        assert log_robustness(joint, poly2) == pytest.approx(expected, abs=1e-9)

    def test_product_states_have_zero_global_magic(self, poly2):
        rng = np.random.default_rng(18)
        for _ in range(10):
            v1 = rng.standard_normal(3)
            v1 *= rng.uniform() ** (1 / 3) / np.linalg.norm(v1)
            v2 = rng.standard_normal(3)
            v2 *= rng.uniform() ** (1 / 3) / np.linalg.norm(v2)
            joint = tensor_product(PauliVector.from_bloch(*v1),
                                   PauliVector.from_bloch(*v2))
            assert global_magic(joint, poly2) == pytest.approx(0.0, abs=1e-9)

    def test_bell_state_has_zero_global_magic(self, poly2):
        assert global_magic(bell_state(), poly2) == pytest.approx(0.0, abs=1e-9)

    def test_marginal_decomposition_consistency(self, poly2):
        joint = bell_state()
        prod = tensor_product(partial_trace(joint, 0), partial_trace(joint, 1))
        assert np.array_equal(prod.coeffs, tensor_product(maximally_mixed(1),
                                                          maximally_mixed(1)).coeffs)
