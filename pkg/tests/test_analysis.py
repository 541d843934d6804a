import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from adiafactor.analysis import (
    confidence,
    fidelity,
    near_zero_density,
    population_report,
    spectrum_report,
)
from adiafactor.hamiltonians import DiagonalHamiltonian, Model, problem_diagonal
from adiafactor.instances import TABLE_NUMBERS, Instance, bitstring
from adiafactor.simulator import initial_state, run_ansatz


def basis_state(n, b):
    psi = np.zeros(2**n, complex)
    psi[b] = 1
    return psi


class TestFidelity:
    def test_solution_state(self):
        inst = Instance.from_number(25)
        assert fidelity(basis_state(4, 10), inst) == 1.0

    @pytest.mark.parametrize("N", TABLE_NUMBERS)
    def test_uniform(self, N):
        inst = Instance.from_number(N)
        assert fidelity(initial_state(inst.n, "plus"), inst) == pytest.approx(len(inst.solutions) / inst.dim, abs=1e-15)

    def test_degenerate_sum(self):
        inst = Instance.from_number(35)
        psi = np.zeros(32, complex)
        psi[[14, 11]] = 1 / math.sqrt(2)
        assert fidelity(psi, inst) == pytest.approx(1.0)
        assert fidelity(initial_state(5, "plus"), inst) == pytest.approx(2 / 32)

    def test_global_phase(self):
        inst = Instance.from_number(143)
        psi = run_ansatz(inst, "qubo", [0.01, 0.02], [0.3, 0.1])
        assert fidelity(psi * np.exp(0.7j), inst) == pytest.approx(fidelity(psi, inst), abs=1e-15)


class TestConfidence:
    def test_uniform(self):
        assert confidence(np.full(16, 1 / 16)) == pytest.approx(0.0, abs=1e-15)

    def test_delta(self):
        p = np.zeros(16)
        p[3] = 1
        assert confidence(p) == 1.0

    def test_two_peaks(self):
        p = np.zeros(16)
        p[:2] = 0.5
        assert confidence(p) == pytest.approx(0.75, abs=1e-15)

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            confidence(np.full(4, 0.3))
        with pytest.raises(ValueError):
            confidence(np.array([1.5, -0.5]))

    def test_global_phase(self):
        psi = run_ansatz(Instance.from_number(35), "pubo", [0.01], [0.4])
        for phase in (1, np.exp(1.1j)):
            q = np.abs(psi * phase) ** 2
            assert confidence(q / q.sum()) == pytest.approx(confidence(np.abs(psi) ** 2), abs=1e-14)

    @given(st.lists(st.floats(0, 1), min_size=8, max_size=8).filter(lambda v: sum(v) > 0.01))
    def test_range(self, w):
        p = np.array(w) / sum(w)
        assert 0 <= confidence(p) <= 1


class TestPopulationReport:
    def test_solution_state(self):
        inst = Instance.from_number(25)
        rep = population_report(basis_state(4, 10), 1, inst)
        assert rep.as_rows() == [("0101", 1.0), ("Others", 0.0)]
        assert rep.solution_first

    def test_uniform(self):
        rep = population_report(initial_state(4, "plus"), 4)
        assert [e.probability for e in rep.entries] == pytest.approx([1 / 16] * 4)
        assert rep.others == pytest.approx(12 / 16)
        # ties resolved by basis index
        assert [e.index for e in rep.entries] == [0, 1, 2, 3]

    @pytest.mark.parametrize("k", [1, 3, 10, 256])
    def test_sums_to_one(self, k):
        inst = Instance.from_number(119)
        psi = run_ansatz(inst, "qubo", [0.003, -0.01], [0.5, 0.9])
        rep = population_report(psi, k, inst)
        assert sum(p for _, p in rep.as_rows()) == pytest.approx(1.0, abs=1e-10)
        probs = [e.probability for e in rep.entries]
        assert probs == sorted(probs, reverse=True)

    def test_solution_rank(self):
        inst = Instance.from_number(25)
        psi = np.zeros(16, complex)
        psi[[0, 3, 10]] = np.sqrt([0.5, 0.3, 0.2])
        rep = population_report(psi, 2, inst)
        assert rep.solution_rank == 3 and not rep.solution_first
        assert [e.is_solution for e in rep.entries] == [False, False]

    def test_top_k_validation(self):
        with pytest.raises(ValueError):
            population_report(initial_state(2), 0)


class TestSpectrum:
    inst = Instance.from_number(25)

    def test_qubo_emax(self):
        rep = spectrum_report(problem_diagonal(self.inst, "qubo"), self.inst)
        assert rep.e_max == 24
        assert rep.energies[0] == 24 and rep.energies[15] == -24
        assert rep.normalized[0] == rep.normalized[15] == 1.0

    def test_pubo_emax(self):
        assert spectrum_report(problem_diagonal(self.inst, "pubo"), self.inst).e_max == 576

    @pytest.mark.parametrize("N", TABLE_NUMBERS)
    @pytest.mark.parametrize("model", list(Model))
    def test_solutions_zero_and_sorted_view(self, N, model):
        inst = Instance.from_number(N)
        rep = spectrum_report(problem_diagonal(inst, model), inst)
        assert set(np.flatnonzero(rep.normalized == 0)) == inst.solutions
        assert np.all((rep.normalized >= 0) & (rep.normalized <= 1))
        assert sorted(rep.order) == list(range(inst.dim))
        np.testing.assert_array_equal(np.sort(rep.normalized), rep.normalized[rep.order])
        # stable ties: equal values appear in ascending index order
        vals = rep.normalized[rep.order]
        for a, b, va, vb in zip(rep.order, rep.order[1:], vals, vals[1:]):
            if va == vb:
                assert a < b
        rows = list(rep.rows())
        assert [r[1] for r in rows] == [bitstring(b, inst.n) for b in range(inst.dim)]
        assert {r[0] for r in rows if r[5]} == inst.solutions

    def test_all_zero_rejected(self):
        with pytest.raises(ValueError):
            spectrum_report(DiagonalHamiltonian(np.zeros(16), Model.QUBO), self.inst)


def brute_density(energies, delta):
    e_max = max(abs(e) for e in energies)
    return sum(1 for e in energies if abs(e) / e_max < delta) / len(energies)


class TestNearZeroDensity:
    def test_delta_one(self):
        d = problem_diagonal(Instance.from_number(25), "qubo")
        assert near_zero_density(d, 1.0) == 14 / 16
        assert near_zero_density(d, 1.5) == 14 / 16

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            near_zero_density(problem_diagonal(Instance.from_number(25), "qubo"), 0.0)

    @pytest.mark.parametrize("N", [119, 143])
    @pytest.mark.parametrize("delta", [0.01, 0.02, 0.05, 0.1])
    def test_pubo_denser(self, N, delta):
        inst = Instance.from_number(N)
        pubo = near_zero_density(problem_diagonal(inst, "pubo"), delta)
        qubo = near_zero_density(problem_diagonal(inst, "qubo"), delta)
        assert pubo == brute_density(list(problem_diagonal(inst, "pubo").energies), delta)
        assert qubo == brute_density(list(problem_diagonal(inst, "qubo").energies), delta)
        assert pubo > qubo

    @pytest.mark.parametrize("N", TABLE_NUMBERS)
    def test_monotone_in_delta(self, N):
        d = problem_diagonal(Instance.from_number(N), "pubo")
        vals = [near_zero_density(d, x) for x in np.linspace(0.001, 1, 60)]
        assert vals == sorted(vals)
