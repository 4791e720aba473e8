import cmath
import unittest

import numpy as np
from numpy.testing import assert_allclose

import metrics
from circuit import DataAmplitudes
from distributions import DECREASING_COMPLEX_3
from equations import TargetState
from metrics import MetricsError

PRINTED_PREPARED = [0.2826, 0.2080, 0.1477, 0.1105, 0.0937, 0.0683, 0.0491, 0.0361]


class TestProbabilities(unittest.TestCase):
    def test_root_gate_pair(self):
        assert_allclose(metrics.probabilities([(1 + 1j) / 2, (1 - 1j) / 2]), [0.5, 0.5])

    def test_basis_state(self):
        assert_allclose(metrics.probabilities([1, 0]), [1, 0])

    def test_worked_example_target(self):
        assert_allclose(metrics.probabilities(DECREASING_COMPLEX_3), PRINTED_PREPARED, atol=5e-4)


class TestRelativeError(unittest.TestCase):
    def test_identical(self):
        self.assertEqual(metrics.relative_error([0.25, 0.75], [0.25, 0.75]), 0.0)

    def test_hand_value(self):
        self.assertAlmostEqual(metrics.relative_error([0.5, 0.5], [0.4, 0.6]), 0.2)

    def test_zero_prepared_entries_are_skipped(self):
        self.assertAlmostEqual(metrics.relative_error([0.5, 0.0, 0.5], [0.5, 0.3, 0.5]), 0.0)

    def test_rejections(self):
        with self.assertRaises(MetricsError):
            metrics.relative_error([0.5, 0.5], [1.0])
        with self.assertRaises(MetricsError):
            metrics.relative_error([0.0, 0.0], [0.5, 0.5])


class TestFidelity(unittest.TestCase):
    def test_identical(self):
        a = np.array([0.6, 0.8j])
        self.assertAlmostEqual(metrics.fidelity(a, a), 1.0)

    def test_orthogonal(self):
        self.assertEqual(metrics.fidelity([1, 0], [0, 1]), 0.0)

    def test_global_phase_invariance(self):
        a = np.array([0.6, 0.8j])
        self.assertAlmostEqual(metrics.fidelity(a, cmath.exp(0.7j) * a), 1.0)

    def test_zero_vector(self):
        with self.assertRaises(MetricsError):
            metrics.fidelity([0, 0], [1, 0])


class TestCompare(unittest.TestCase):
    def test_perfect_match(self):
        amps = np.array([0.6, 0.8j])
        report = metrics.compare(TargetState(1, amps), DataAmplitudes(1, amps))
        self.assertEqual(report.relative_error, 0.0)
        self.assertAlmostEqual(report.fidelity, 1.0)
        self.assertEqual(report.zero_support_leakage, 0.0)
        self.assertEqual(report.max_abs_amp_diff, 0.0)

    def test_prime_state_leakage(self):
        prime = np.zeros(8)
        prime[[2, 3, 5, 7]] = 0.5
        acquired = np.array([0.0, 0.0, 0.5, 0.5, 0.0, 0.5, 0.219, 0.45])
        report = metrics.compare(TargetState(3, prime), DataAmplitudes(3, acquired))
        self.assertAlmostEqual(report.zero_support_leakage, 0.219 ** 2)
        self.assertGreater(report.relative_error, 0.0)

    def test_dimension_mismatch(self):
        with self.assertRaises(MetricsError):
            metrics.compare(TargetState(1, np.array([1, 0])), DataAmplitudes(2, [1, 0, 0, 0]))

    def test_random_pair_ranges(self):
        rng = np.random.default_rng(1)
        a = TargetState.from_amplitudes(rng.normal(size=8) + 1j * rng.normal(size=8), normalize=True)
        b = DataAmplitudes(3, rng.normal(size=8) + 1j * rng.normal(size=8))
        report = metrics.compare(a, b)
        self.assertTrue(0.0 <= report.fidelity <= 1.0 + 1e-12)
        self.assertGreaterEqual(report.relative_error, 0.0)
        self.assertTrue(np.isfinite(report.max_abs_amp_diff))

    def test_zero_acquired_has_zero_fidelity(self):
        report = metrics.compare(TargetState(1, np.array([1, 0])), DataAmplitudes(1, [0, 0]))
        self.assertEqual(report.fidelity, 0.0)
        self.assertEqual(report.relative_error, 1.0)

    def test_frame_and_dict(self):
        amps = np.array([0.6, 0.8j])
        report = metrics.compare(TargetState(1, amps), DataAmplitudes(1, [0.8, 0.6]))
        df = report.to_frame()
        self.assertEqual(list(df.columns), ["index", "prepared", "acquired"])
        assert_allclose(df["acquired"], [0.64, 0.36])
        payload = report.to_dict()
        self.assertAlmostEqual(payload["relative_error"], (0.28 / 0.36 + 0.28 / 0.64) / 2)


if __name__ == '__main__':
    unittest.main()
