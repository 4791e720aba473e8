import math
import unittest

import numpy as np
from numpy.testing import assert_allclose

import equations
from circuit import CircuitLayout, closed_form_amplitudes
from equations import ParamKind, Parametrization, ResidualSystem, SystemDefinitionError, TargetState
from gates import IDENTITY, GateAngles, gate_from_angles, gate_from_root

ANGLES = Parametrization(ParamKind.ANGLES)
ENTRIES = Parametrization(ParamKind.ENTRIES)


def random_layout(rng, n):
    gs = [gate_from_angles(GateAngles(*rng.uniform(-math.pi, math.pi, size=2))) for _ in range(2 * n)]
    return CircuitLayout(n, tuple(gs[:n]), tuple(gs[n:]))


def random_target(rng, n):
    return TargetState.from_amplitudes(rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n), normalize=True)


class TestTargetState(unittest.TestCase):
    def test_valid(self):
        t = TargetState(1, np.array([1, 0]))
        self.assertEqual(t.n, 1)
        self.assertAlmostEqual(t.norm_squared, 1.0)

    def test_sub_normalized_is_allowed(self):
        TargetState(2, np.array([0.5, 0.5, 0.5, 0]))

    def test_rejections(self):
        cases = [
            (1, [1, 0, 0]),
            (1, [0, 0]),
            (1, [1, 1]),
            (1, [float("nan"), 0]),
        ]
        for n, amps in cases:
            with self.subTest(amps=amps):
                with self.assertRaises(SystemDefinitionError):
                    TargetState(n, np.array(amps, dtype=complex))

    def test_from_amplitudes(self):
        t = TargetState.from_amplitudes([3, 4], normalize=True)
        assert_allclose(t.amplitudes, [0.6, 0.8])
        with self.assertRaises(SystemDefinitionError):
            TargetState.from_amplitudes([1, 0, 0])
        with self.assertRaises(SystemDefinitionError):
            TargetState.from_amplitudes([0, 0], normalize=True)


class TestParametrization(unittest.TestCase):
    def test_counts(self):
        self.assertEqual(ANGLES.parameter_count(3), 12)
        self.assertEqual(ENTRIES.parameter_count(3), 24)
        self.assertEqual(ResidualSystem(TargetState(3, np.eye(8)[0]), ANGLES).residual_count, 16)
        self.assertEqual(ResidualSystem(TargetState(3, np.eye(8)[0]), ENTRIES).residual_count, 28)

    def test_zero_weight_drops_unitarity_rows(self):
        system = ResidualSystem(TargetState(1, np.array([1, 0])), Parametrization(ParamKind.ENTRIES, 0.0))
        self.assertEqual(system.residual_count, 4)

    def test_rejections(self):
        with self.assertRaises(SystemDefinitionError):
            Parametrization("polar")
        with self.assertRaises(SystemDefinitionError):
            Parametrization(ParamKind.ENTRIES, -1.0)


class TestDecode(unittest.TestCase):
    def test_zero_angles(self):
        layout = equations.decode(np.zeros(4), ANGLES, 1)
        self.assertEqual(layout.gates, (IDENTITY, IDENTITY))

    def test_identity_entries(self):
        layout = equations.decode([1, 0, 0, 0, 1, 0, 0, 0], ENTRIES, 1)
        self.assertEqual(layout.gates, (IDENTITY, IDENTITY))

    def test_root_gate_angles(self):
        q = math.pi / 4
        layout = equations.decode([q, -q, q, -q], ANGLES, 1)
        root = gate_from_root(2)
        for g in layout.gates:
            assert_allclose(g.matrix, root.matrix, atol=1e-15)

    def test_length_checked(self):
        with self.assertRaises(SystemDefinitionError):
            equations.decode(np.zeros(5), ANGLES, 1)
        with self.assertRaises(SystemDefinitionError):
            equations.decode([float("inf"), 0, 0, 0], ANGLES, 1)

    def test_encode_inverts_decode(self):
        rng = np.random.default_rng(6)
        layout = random_layout(rng, 3)
        for param in (ANGLES, ENTRIES):
            back = equations.decode(equations.encode(layout, param), param, 3)
            for g, h in zip(layout.gates, back.gates):
                assert_allclose(h.matrix, g.matrix, atol=1e-12)


class TestResiduals(unittest.TestCase):
    def test_exact_parameters_give_zero(self):
        system = ResidualSystem(TargetState(1, np.array([1, 0])), ANGLES)
        self.assertEqual(float(np.max(np.abs(system.residuals(np.zeros(4))))), 0.0)

    def test_self_consistency(self):
        rng = np.random.default_rng(12)
        for param in (ANGLES, ENTRIES):
            layout = random_layout(rng, 3)
            target = TargetState(3, closed_form_amplitudes(layout).values)
            system = ResidualSystem(target, param)
            r = system.residuals(equations.encode(layout, param))
            self.assertLessEqual(float(np.linalg.norm(r)), 1e-14)

    def test_interleaved_layout(self):
        target = TargetState(1, np.array([0.6, 0.8j]))
        r = ResidualSystem(target, ANGLES).residuals(np.zeros(4))
        assert_allclose(r, [0.4, 0.0, 0.0, -0.8], atol=1e-15)

    def test_unitarity_rows(self):
        target = TargetState(1, np.array([1, 0]))
        system = ResidualSystem(target, Parametrization(ParamKind.ENTRIES, 2.0))
        r = system.residuals([1, 0, 1, 0, 1, 0, 0, 0])
        # gate 1 = (1, 1): d_norm 1, d_orth 2; gate 2 = identity
        assert_allclose(r[4:], [2.0, 4.0, 0.0, 0.0])


class TestJacobians(unittest.TestCase):
    def test_analytic_matches_finite_difference(self):
        rng = np.random.default_rng(17)
        for n in (1, 2, 3):
            target = random_target(rng, n)
            for param in (ANGLES, ENTRIES):
                system = ResidualSystem(target, param)
                for _ in range(5):
                    p = rng.uniform(-math.pi, math.pi, size=system.parameter_count)
                    with self.subTest(n=n, kind=param.kind):
                        assert_allclose(equations.jacobian_analytic(p, system),
                                        equations.jacobian_fd(p, system), atol=1e-6)

    def test_shape(self):
        system = ResidualSystem(random_target(np.random.default_rng(0), 2), ENTRIES)
        jac = system.jacobian(np.ones(system.parameter_count))
        self.assertEqual(jac.shape, (system.residual_count, system.parameter_count))

    def test_identity_point_is_stationary_in_theta_for_ground_amplitude(self):
        system = ResidualSystem(TargetState(1, np.array([1, 0])), ANGLES)
        jac = system.jacobian(np.zeros(4))
        # Re(a_0) = cos γ_1 cos θ_1 has zero slope in both at the origin
        self.assertEqual(jac[0, 0], 0.0)
        self.assertEqual(jac[0, 1], 0.0)

    def test_entry_derivative_of_ground_amplitude(self):
        rng = np.random.default_rng(9)
        system = ResidualSystem(random_target(rng, 2), ENTRIES)
        p = rng.normal(size=system.parameter_count)
        a2 = complex(p[4], p[5])
        jac = equations.jacobian_analytic(p, system)
        # ∂Re(a_00)/∂Re(a_1) = Re(a_2)
        self.assertAlmostEqual(jac[0, 0], a2.real, places=12)

    def test_finite_difference_step_refinement(self):
        rng = np.random.default_rng(30)
        system = ResidualSystem(random_target(rng, 2), ANGLES)
        p = rng.uniform(-1, 1, size=system.parameter_count)
        coarse = equations.jacobian_fd(p, system, step=1e-4)
        fine = equations.jacobian_fd(p, system, step=1e-5)
        self.assertLess(float(np.max(np.abs(coarse - fine))), 1e-7)

    def test_bad_step(self):
        system = ResidualSystem(TargetState(1, np.array([1, 0])), ANGLES)
        with self.assertRaises(SystemDefinitionError):
            equations.jacobian_fd(np.zeros(4), system, step=0.0)


if __name__ == '__main__':
    unittest.main()
