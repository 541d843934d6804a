import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from adiafactor import _kernels
from adiafactor.compiler import synthesize
from adiafactor.hamiltonians import DiagonalHamiltonian, Model, problem_diagonal, problem_polynomial, to_pauli
from adiafactor.instances import TABLE_NUMBERS, Instance
from adiafactor.simulator import (
    MixerSpec,
    apply_circuit,
    apply_mixer,
    apply_phase_separator,
    apply_rx_all,
    expectation,
    initial_state,
    run_ansatz,
)

from reference import align_phase, mixer_unitary

angles = st.floats(-2 * math.pi, 2 * math.pi, allow_nan=False)


def random_state(n, seed):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return psi / np.linalg.norm(psi)


class TestInitialState:
    def test_plus(self):
        np.testing.assert_allclose(initial_state(2, "plus"), [0.5] * 4)

    def test_alternating(self):
        np.testing.assert_allclose(initial_state(2, "alternating"), [0.5, 0.5, -0.5, -0.5])

    def test_alternating_matches_kron(self):
        plus = np.array([1, 1]) / math.sqrt(2)
        minus = np.array([1, -1]) / math.sqrt(2)
        for n in range(1, 7):
            # kron puts qubit n (most significant bit) first
            factors = [plus if k % 2 == 1 else minus for k in range(1, n + 1)]
            ref = factors[-1]
            for f in reversed(factors[:-1]):
                ref = np.kron(ref, f)
            np.testing.assert_allclose(initial_state(n, "alternating"), ref, atol=1e-15)

    @pytest.mark.parametrize("n", [2, 4, 6])
    def test_alternating_has_zero_mixer_energy(self, n):
        psi = initial_state(n, "alternating")
        h = sum(np.real(np.vdot(psi, apply_rx_all(psi, math.pi / 2, [k]) * 1j)) for k in range(1, n + 1))
        assert abs(h) < 1e-12

    def test_bad_pattern(self):
        with pytest.raises(ValueError):
            initial_state(3, "minus")


class TestPhaseSeparator:
    d = problem_diagonal(Instance.from_number(25), "qubo")

    def test_identity_at_zero(self):
        psi = random_state(4, 0)
        np.testing.assert_array_equal(apply_phase_separator(psi, self.d, 0.0), psi)

    @pytest.mark.parametrize("N", TABLE_NUMBERS)
    @pytest.mark.parametrize("model", list(Model))
    def test_two_pi_periodic(self, N, model):
        inst = Instance.from_number(N)
        d = problem_diagonal(inst, model)
        psi = random_state(inst.n, N)
        np.testing.assert_allclose(
            apply_phase_separator(psi, d, 0.3 + 2 * math.pi),
            apply_phase_separator(psi, d, 0.3),
            atol=1e-9,
        )

    def test_solution_phase_unchanged(self):
        psi = random_state(4, 1)
        out = apply_phase_separator(psi, self.d, 1.234)
        assert out[10] == psi[10]

    def test_populations_preserved(self):
        psi = random_state(4, 2)
        out = apply_phase_separator(psi, self.d, 0.77)
        np.testing.assert_allclose(np.abs(out) ** 2, np.abs(psi) ** 2, rtol=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            apply_phase_separator(np.ones(8, complex), self.d, 0.1)


class TestMixer:
    def test_identity_at_zero(self):
        psi = random_state(3, 0)
        np.testing.assert_allclose(apply_mixer(psi, 0.0), psi, atol=0)

    def test_rabi_flip(self):
        psi = np.zeros(8, complex)
        psi[0] = 1
        out = apply_mixer(psi, math.pi / 2)
        assert abs(out[7] - (-1j) ** 3) < 1e-12
        assert abs(abs(out[7]) - 1) < 1e-12

    @given(angles)
    def test_plus_invariant(self, beta):
        psi = initial_state(4, "plus")
        out = apply_mixer(psi, beta)
        np.testing.assert_allclose(align_phase(psi, out), psi, atol=1e-12)

    @given(angles, st.floats(0.1, 3.0))
    @settings(max_examples=30)
    def test_matches_dense(self, beta, omega):
        psi = random_state(4, 5)
        ref = mixer_unitary(beta * omega, 4) @ psi
        np.testing.assert_allclose(apply_mixer(psi, beta, MixerSpec(omega)), ref, atol=1e-12)

    def test_qubit_order_irrelevant(self):
        psi = random_state(5, 3)
        a = apply_rx_all(psi, 0.4, [1, 2, 3, 4, 5])
        b = apply_rx_all(psi, 0.4, [5, 3, 1, 4, 2])
        np.testing.assert_allclose(a, b, atol=1e-12)

    def test_omega_validation(self):
        with pytest.raises(ValueError):
            MixerSpec(0.0)


class TestAnsatz:
    inst = Instance.from_number(35)

    def test_zero_layers(self):
        np.testing.assert_array_equal(run_ansatz(self.inst, "qubo", [], []), initial_state(5, "alternating"))

    def test_zero_angles(self):
        np.testing.assert_allclose(run_ansatz(self.inst, "pubo", [0.0], [0.0]), initial_state(5, "plus"))

    @given(st.lists(st.tuples(angles, angles), min_size=1, max_size=4), st.sampled_from(["qubo", "pubo"]))
    @settings(max_examples=30, deadline=None)
    def test_norm(self, params, model):
        g, b = zip(*params)
        psi = run_ansatz(self.inst, model, g, b)
        assert abs(np.linalg.norm(psi) - 1) < 1e-12

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            run_ansatz(self.inst, "qubo", [0.1], [])

    @pytest.mark.parametrize("N", TABLE_NUMBERS)
    @pytest.mark.parametrize("model", list(Model))
    def test_matches_gate_circuits(self, N, model):
        inst = Instance.from_number(N)
        pauli = to_pauli(problem_polynomial(inst, model))
        rng = np.random.default_rng(N)
        for pattern in ("plus", "alternating"):
            g, b = rng.uniform(-math.pi, math.pi, (2, 3))
            ref = run_ansatz(inst, model, g, b, pattern)
            out = apply_circuit(initial_state(inst.n, pattern), synthesize(pauli, g, b))
            np.testing.assert_allclose(align_phase(ref, out), ref, atol=1e-10)

    @pytest.mark.parametrize("N", [15, 25, 87, 143])
    @pytest.mark.parametrize("model", list(Model))
    def test_fused_kernel_matches(self, N, model):
        inst = Instance.from_number(N)
        d = problem_diagonal(inst, model).energies
        rng = np.random.default_rng(7)
        for pattern in ("plus", "alternating"):
            x = rng.uniform(-math.pi, math.pi, 6)
            ref = run_ansatz(inst, model, x[:3], x[3:], pattern, MixerSpec(1.3))
            out = _kernels.evolve(initial_state(inst.n, pattern), d, x, 1.3)
            np.testing.assert_allclose(out, ref, atol=1e-12)


class TestExpectation:
    inst = Instance.from_number(25)

    @pytest.mark.parametrize(
        "model,absolute,expected", [("qubo", False, 9.0), ("qubo", True, 14.5), ("pubo", False, 266.0)]
    )
    def test_uniform(self, model, absolute, expected):
        d = problem_diagonal(self.inst, model)
        if absolute:
            d = DiagonalHamiltonian(np.abs(d.energies), d.model)
        assert expectation(initial_state(4, "plus"), d) == pytest.approx(expected, abs=1e-12)

    def test_mismatch(self):
        with pytest.raises(ValueError):
            expectation(np.ones(8, complex), problem_diagonal(self.inst, "qubo"))
