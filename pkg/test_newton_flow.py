#!/usr/bin/env python3
"""
Newton flow tests
=================

Closed-form flows, the exponential residual law and the four stop statuses.
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.optimize import brentq

from dsm_solver.core import InsufficientDataError, NonlinearProblem, SingularJacobianError
from dsm_solver.flow import PIStepController, check_residual_law, newton_direction, solve_dsm
from dsm_solver.models import FlowConfig, SolveStatus, Trajectory, TrajectoryPoint
from dsm_solver.problems import build_problem, get_descriptor


def square_problem():
    return NonlinearProblem(name="square", dimension=1, func=lambda u: u**2, jac=lambda u: np.diag(2 * u))


class TestNewtonDirection:
    def test_identity(self, identity):
        assert_allclose(newton_direction(identity, [2.0], [1.0]), [1.0])

    def test_exp_cancels(self, exp_problem):
        assert_allclose(newton_direction(exp_problem, [5.0], [0.0]), [1.0], rtol=1e-14)

    def test_cubic(self, cubic):
        assert_allclose(newton_direction(cubic, [1.0], [0.0]), [0.5], rtol=1e-14)

    def test_singular_jacobian_carries_point_and_pivot(self):
        with pytest.raises(SingularJacobianError) as info:
            newton_direction(square_problem(), [0.0], [1.0])
        assert info.value.pivot == 0.0
        assert_allclose(info.value.u, [0.0])


class TestSolveDSM:
    def test_identity_converges_along_closed_form(self, identity):
        result = solve_dsm(identity, [2.0], [1.0], FlowConfig(residual_tol=1e-10))
        assert result.status is SolveStatus.CONVERGED
        assert_allclose(result.u_final, [1.0], atol=1e-8)

        traj = result.trajectory
        exact = 1.0 + np.exp(-traj.times)
        assert np.max(np.abs(traj.states[:, 0] - exact)) <= 1e-7

    def test_cubic_converges_to_bisection_root(self, cubic):
        root = brentq(lambda u: u + u**3 - 2.0, 0.0, 2.0, xtol=1e-15)
        result = solve_dsm(cubic, [0.0], [2.0])
        assert result.status is SolveStatus.CONVERGED
        assert_allclose(result.u_final, [1.0], atol=1e-8)
        assert_allclose(result.u_final, [root], atol=1e-8)

    def test_exp_counterexample_escapes(self, exp_problem):
        result = solve_dsm(exp_problem, [0.0], [0.0], FlowConfig(escape_radius=10.0))
        assert result.status is SolveStatus.ESCAPED_BALL

        traj = result.trajectory
        # the flow reduces to u' = -1
        assert_allclose(traj.states[:, 0], -traj.times, atol=1e-8)
        late = traj.times >= 1.0
        assert np.all(np.abs(traj.states[late, 0]) >= 0.99 * traj.times[late])

    def test_linear_flow_oracle(self):
        problem = build_problem("linear_spd")
        A = np.array([[2.0, 1.0], [1.0, 2.0]])
        u0, f = np.array([1.5, -0.5]), np.array([1.0, 1.0])
        result = solve_dsm(problem, u0, f)
        assert result.converged

        limit = np.linalg.solve(A, f)
        traj = result.trajectory
        exact = limit + np.exp(-traj.times)[:, None] * (u0 - limit)
        assert np.max(np.linalg.norm(traj.states - exact, axis=1)) <= 1e-7

    def test_converged_residual_rechecked_independently(self, cubic):
        result = solve_dsm(cubic, [3.0], [2.0])
        assert result.converged
        g = np.linalg.norm(cubic.evaluate(result.u_final) - 2.0)
        assert g <= 1e-10

    def test_residual_monotone_on_accepted_steps(self, cubic):
        traj = solve_dsm(cubic, [-1.5], [4.0]).trajectory
        assert np.all(np.diff(traj.residuals) < 0)

    def test_horizon_reached(self, identity):
        result = solve_dsm(identity, [2.0], [1.0], FlowConfig(t_max=1.0))
        assert result.status is SolveStatus.HORIZON_REACHED
        assert result.trajectory.points[-1].t == pytest.approx(1.0)

    def test_singular_start(self):
        result = solve_dsm(square_problem(), [0.0], [1.0])
        assert result.status is SolveStatus.SINGULAR_JACOBIAN
        assert result.trajectory.points[0].velocity_norm == np.inf

    def test_already_converged(self, identity):
        result = solve_dsm(identity, [1.0], [1.0])
        assert result.status is SolveStatus.CONVERGED
        assert result.steps == 0
        assert len(result.trajectory) == 1

    def test_initial_point_not_an_accepted_step(self, identity):
        traj = solve_dsm(identity, [2.0], [1.0]).trajectory
        assert not traj.points[0].step_accepted
        assert all(p.step_accepted for p in traj.points[1:])
        assert np.all(np.diff(traj.times) > 0)

    def test_dimension_mismatch_raises(self, identity):
        with pytest.raises(ValueError):
            solve_dsm(identity, [1.0, 2.0], [1.0])


class TestResidualLaw:
    def test_identity(self, identity):
        traj = solve_dsm(identity, [2.0], [1.0]).trajectory
        slope, deviation, passed = check_residual_law(traj, slope_tol=1e-5)
        assert slope == pytest.approx(-1.0, abs=1e-6)
        assert passed

    def test_counterexample_residual_still_decays(self, exp_problem):
        traj = solve_dsm(exp_problem, [0.0], [0.0], FlowConfig(escape_radius=10.0)).trajectory
        slope, _, passed = check_residual_law(traj, slope_tol=1e-6)
        assert slope == pytest.approx(-1.0, abs=1e-6)
        assert passed

    def test_synthetic_exact_law(self):
        traj = Trajectory()
        for t in np.linspace(0.0, 3.0, 31):
            traj.append(TrajectoryPoint(float(t), np.array([0.0]), 3.0 * np.exp(-t), 0.0, t > 0))
        slope, deviation, passed = check_residual_law(traj)
        assert slope == pytest.approx(-1.0, abs=1e-12)
        assert deviation <= 1e-12
        assert passed

    def test_too_few_points(self):
        traj = Trajectory()
        for t in range(5):
            traj.append(TrajectoryPoint(float(t), np.array([0.0]), np.exp(-t), 0.0, t > 0))
        with pytest.raises(InsufficientDataError):
            check_residual_law(traj)

    def test_zero_residual_truncates_fit(self):
        traj = Trajectory()
        for t in range(4):
            traj.append(TrajectoryPoint(float(t), np.array([0.0]), np.exp(-t), 0.0, t > 0))
        traj.append(TrajectoryPoint(4.0, np.array([0.0]), 0.0, 0.0, True))
        for t in range(5, 20):
            traj.append(TrajectoryPoint(float(t), np.array([0.0]), np.exp(-t), 0.0, True))
        with pytest.raises(InsufficientDataError):
            check_residual_law(traj)

    @pytest.mark.parametrize("name", ["identity", "linear_spd", "scalar_exp",
                                      "monotone_cubic", "trig_perturbed", "coupled_2d"])
    def test_law_across_the_suite(self, name):
        descriptor = get_descriptor(name)
        problem = descriptor.build()
        rng = np.random.default_rng(2024)
        n = problem.dimension
        for _ in range(5):
            if name == "scalar_exp":
                u0, f = rng.uniform(-1.0, 1.0, n), rng.uniform(0.5, 2.0, n)
            elif name == "coupled_2d":
                u0 = rng.uniform(-0.2, 0.2, n)
                f = problem.evaluate(rng.uniform(-0.2, 0.2, n))
            else:
                u0, f = rng.uniform(-2.0, 2.0, n), rng.uniform(-3.0, 3.0, n)
            result = solve_dsm(problem, u0, f)
            assert result.converged
            slope, _, _ = check_residual_law(result.trajectory)
            assert slope == pytest.approx(-1.0, abs=1e-5)

    @pytest.mark.parametrize("name,u0,f", [
        ("identity", [0.0], [3.0]),
        ("linear_spd", [0.0, 0.0], [3.0, -1.0]),
        ("scalar_exp", [1.0], [0.5]),
        ("monotone_cubic", [-1.5], [2.0]),
        ("trig_perturbed", [2.0], [-1.5]),
        ("coupled_2d", [-0.2, 0.1], [0.327, 0.327]),
    ])
    def test_pointwise_law_while_resolved(self, name, u0, f):
        """|ln g(t) + t - ln g(0)| <= 100 rk_rel_tol wherever g >= 1e-2 g(0)"""
        config = FlowConfig()
        traj = solve_dsm(get_descriptor(name).build(dimension=len(u0)), u0, f, config).trajectory
        resolved = traj.residuals >= 1e-2 * traj.g0
        assert np.count_nonzero(resolved) > 10
        deviation = np.abs(np.log(traj.residuals[resolved]) + traj.times[resolved] - np.log(traj.g0))
        assert np.max(deviation) <= 100 * config.rk_rel_tol


class TestStepController:
    def test_rejection_never_grows(self):
        controller = PIStepController()
        assert controller.reject(1.5) <= 1.0
        assert controller.reject(1e6) == controller.min_factor

    def test_acceptance_is_clipped(self):
        controller = PIStepController()
        assert controller.accept(1e-30) == controller.max_factor
