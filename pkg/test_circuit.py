import math
import unittest

import numpy as np
from numpy.testing import assert_allclose

import circuit
from circuit import CircuitError, CircuitLayout, DataAmplitudes, StateVector
from gates import IDENTITY, X_GATE, GateAngles, gate_from_angles, gate_from_entries, gate_from_root


def random_layout(rng, n):
    gs = [gate_from_angles(GateAngles(*rng.uniform(-math.pi, math.pi, size=2))) for _ in range(2 * n)]
    return CircuitLayout(n, tuple(gs[:n]), tuple(gs[n:]))


class TestLayout(unittest.TestCase):
    def test_gate_counts_checked(self):
        with self.assertRaises(CircuitError):
            CircuitLayout(2, (IDENTITY,), (IDENTITY, IDENTITY))
        with self.assertRaises(CircuitError):
            CircuitLayout(0, (), ())
        with self.assertRaises(CircuitError):
            CircuitLayout(circuit.MAX_QUBITS + 1, (IDENTITY,) * 13, (IDENTITY,) * 13)

    def test_gate_order(self):
        layout = CircuitLayout(1, (X_GATE,), (IDENTITY,))
        self.assertEqual(layout.gates, (X_GATE, IDENTITY))

    def test_json_round_trip(self):
        layout = random_layout(np.random.default_rng(3), 3)
        self.assertEqual(CircuitLayout.from_dict(layout.to_dict()), layout)

    def test_malformed_json(self):
        with self.assertRaises(ValueError):
            CircuitLayout.from_dict({"n": 1, "data_gates": [{"a": [1, 0], "b": [0, 0]}]})


class TestSimulateFull(unittest.TestCase):
    def test_identity_data_gate_never_fires_control(self):
        layout = CircuitLayout(1, (IDENTITY,), (gate_from_root(3),))
        sv = circuit.simulate_full(layout)
        assert_allclose(sv.amplitudes, [1, 0, 0, 0], atol=1e-15)

    def test_x_gates(self):
        sv = circuit.simulate_full(CircuitLayout(1, (X_GATE,), (X_GATE,)))
        assert_allclose(sv.amplitudes, [0, 0, 0, 1], atol=1e-15)

    def test_matches_dense_oracle(self):
        layout = CircuitLayout.uniform(3, gate_from_root(2))
        sv = circuit.simulate_full(layout)
        initial = np.zeros(16, dtype=complex)
        initial[0] = 1
        assert_allclose(sv.amplitudes, circuit.dense_unitary(layout) @ initial, atol=1e-12)

    def test_dense_oracle_random(self):
        rng = np.random.default_rng(8)
        for n in (1, 2, 4):
            layout = random_layout(rng, n)
            initial = np.zeros(2 ** (n + 1), dtype=complex)
            initial[0] = 1
            assert_allclose(circuit.simulate_full(layout).amplitudes,
                            circuit.dense_unitary(layout) @ initial, atol=1e-12)

    def test_norm_preserved(self):
        sv = circuit.simulate_full(random_layout(np.random.default_rng(1), 5))
        self.assertAlmostEqual(sv.norm_squared(), 1.0, places=12)

    def test_non_unitary_rejected_unless_permissive(self):
        bad = gate_from_entries(1, 1)
        layout = CircuitLayout(1, (bad,), (IDENTITY,))
        with self.assertRaises(CircuitError):
            circuit.simulate_full(layout)
        sv = circuit.simulate_full(layout, permissive=True)
        assert_allclose(sv.amplitudes, [1, 0, 1, 0])

    def test_trace_records_gate_order(self):
        calls = []
        circuit.simulate_full(CircuitLayout.uniform(2, gate_from_root(2)),
                              trace=lambda kind, qubits: calls.append((kind, qubits)))
        self.assertEqual(calls, [("single", (0,)), ("single", (1,)),
                                 ("controlled", (0, 2)), ("controlled", (1, 2))])


class TestAmplitudeViews(unittest.TestCase):
    def test_summed_ground_state(self):
        values = circuit.summed_ancilla_amplitudes(StateVector(2, [1, 0, 0, 0])).values
        assert_allclose(values, [1, 0])

    def test_summed_branches(self):
        values = circuit.summed_ancilla_amplitudes(StateVector(2, [0, 0, 0.5, 0.5])).values
        assert_allclose(values, [0, 1])

    def test_closed_form_matches_simulation(self):
        rng = np.random.default_rng(21)
        for k in range(60):
            layout = random_layout(rng, 1 + k % 6)
            summed = circuit.summed_ancilla_amplitudes(circuit.simulate_full(layout)).values
            assert_allclose(circuit.closed_form_amplitudes(layout).values, summed, atol=1e-12)

    def test_identity_data_gates(self):
        layout = CircuitLayout(3, (IDENTITY,) * 3, (gate_from_root(2), X_GATE, gate_from_root(5)))
        assert_allclose(circuit.closed_form_amplitudes(layout).values, [1, 0, 0, 0, 0, 0, 0, 0], atol=1e-15)

    def test_single_qubit_root_gates(self):
        values = circuit.closed_form_amplitudes(CircuitLayout.uniform(1, gate_from_root(2))).values
        assert_allclose(values, [(1 + 1j) / 2, (1 - 1j) / 2], atol=1e-15)

    def test_top_index_expansion(self):
        # a_111 = c2 c4 c6 (c7 + c8)(c9 + c10)(c11 + c12) with K_i = [[c_{2i-1}, c_{2i}], ...]
        rng = np.random.default_rng(4)
        c = rng.normal(size=12) + 1j * rng.normal(size=12)
        gs = [gate_from_entries(c[2 * i], c[2 * i + 1]) for i in range(6)]
        layout = CircuitLayout(3, tuple(gs[:3]), tuple(gs[3:]))
        expected = c[1] * c[3] * c[5] * (c[6] + c[7]) * (c[8] + c[9]) * (c[10] + c[11])
        self.assertAlmostEqual(abs(circuit.closed_form_amplitudes(layout).values[7] - expected), 0.0, places=12)
        summed = circuit.summed_ancilla_amplitudes(circuit.simulate_full(layout, permissive=True)).values
        self.assertAlmostEqual(abs(summed[7] - expected), 0.0, places=12)

    def test_marginal_probabilities(self):
        assert_allclose(circuit.marginal_probabilities(StateVector(2, [1, 0, 0, 0])), [1, 0])
        assert_allclose(circuit.marginal_probabilities(StateVector(2, [0.5, 0.5, 0.5, -0.5])), [0.5, 0.5])
        sv = circuit.simulate_full(random_layout(np.random.default_rng(2), 4))
        self.assertAlmostEqual(float(circuit.marginal_probabilities(sv).sum()), 1.0, places=10)

    def test_ancilla_branches(self):
        sv = circuit.simulate_full(CircuitLayout(1, (X_GATE,), (gate_from_root(2),)))
        p0, p1 = circuit.ancilla_branch_probabilities(sv)
        self.assertAlmostEqual(p0, 0.5)
        self.assertAlmostEqual(p1, 0.5)

    def test_containers_are_read_only(self):
        amps = DataAmplitudes(1, [1, 0])
        with self.assertRaises(ValueError):
            amps.values[0] = 2
        with self.assertRaises(CircuitError):
            DataAmplitudes(2, [1, 0])


if __name__ == '__main__':
    unittest.main()
