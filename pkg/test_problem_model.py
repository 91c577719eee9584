#!/usr/bin/env python3
"""
Problem model tests
===================

Residual evaluation, finite-difference Jacobians, validation helpers and
the settings layer.
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from dsm_solver.config import DSMSettings, validate_settings
from dsm_solver.core import (
    Ball,
    ContractViolation,
    EvaluationError,
    NonlinearProblem,
    evaluate_residual,
    finite_difference_jacobian,
    product_problem,
)
from dsm_solver.core.utils import inputs_digest, iter_ball_samples
from dsm_solver.models import FlowConfig
from dsm_solver.problems import build_problem


def fd_only(name, func, dimension=1):
    return NonlinearProblem(name=name, dimension=dimension, func=func)


class TestEvaluateResidual:
    def test_identity(self, identity):
        residual, g = evaluate_residual(identity, [3.0], [1.0])
        assert_array_equal(residual, [2.0])
        assert g == 2.0

    def test_exp_at_zero(self, exp_problem):
        residual, g = evaluate_residual(exp_problem, [0.0], [0.0])
        assert_array_equal(residual, [1.0])
        assert g == 1.0

    def test_cubic_root(self, cubic):
        residual, g = evaluate_residual(cubic, [1.0], [2.0])
        assert_array_equal(residual, [0.0])
        assert g == 0.0

    def test_zero_when_f_is_image(self):
        problem = build_problem("coupled_2d")
        u = np.array([0.3, -0.2])
        _, g = evaluate_residual(problem, u, problem.evaluate(u))
        assert g == 0.0

    def test_dimension_mismatch(self, identity):
        with pytest.raises(ContractViolation):
            evaluate_residual(identity, [1.0, 2.0], [1.0])

    def test_non_finite_output_names_component(self):
        problem = fd_only("log", lambda u: np.array([1.0, np.log(u[1])]), dimension=2)
        with pytest.raises(EvaluationError) as info:
            evaluate_residual(problem, [1.0, -1.0], [0.0, 0.0])
        assert info.value.component == 1

    def test_non_finite_input_rejected(self, identity):
        with pytest.raises(ContractViolation):
            evaluate_residual(identity, [np.nan], [0.0])


class TestFiniteDifferenceJacobian:
    def test_identity(self):
        problem = fd_only("id", lambda u: u.copy(), dimension=3)
        jac = finite_difference_jacobian(problem, np.array([0.4, -1.0, 2.5]), 1e-6)
        assert_allclose(jac, np.eye(3), atol=1e-9)

    def test_exp(self):
        jac = finite_difference_jacobian(fd_only("exp", np.exp), np.array([0.0]), 1e-6)
        assert_allclose(jac, [[1.0]], atol=1e-9)

    def test_cubic(self):
        jac = finite_difference_jacobian(fd_only("cubic", lambda u: u + u**3), np.array([2.0]), 1e-6)
        assert_allclose(jac, [[13.0]], atol=1e-6)

    @pytest.mark.parametrize("h", [1e-8, 1e-6, 1e-4])
    def test_linear_map_is_exact_at_origin(self, h):
        A = np.array([[2.0, 1.0], [1.0, 2.0]])
        problem = fd_only("linear", lambda u: A @ u, dimension=2)
        jac = finite_difference_jacobian(problem, np.zeros(2), h)
        assert_allclose(jac, A, atol=1e-9 * np.linalg.norm(A, 2))

    @pytest.mark.parametrize("h", [1e-6, 1e-4])
    def test_linear_map_away_from_origin(self, h):
        A = np.array([[2.0, 1.0], [1.0, 2.0]])
        problem = fd_only("linear", lambda u: A @ u, dimension=2)
        jac = finite_difference_jacobian(problem, np.array([0.3, -0.7]), h)
        assert_allclose(jac, A, atol=1e-9 * np.linalg.norm(A, 2))

    def test_deterministic(self, cubic):
        u = np.array([0.7])
        assert_array_equal(finite_difference_jacobian(cubic, u, 1e-6),
                           finite_difference_jacobian(cubic, u, 1e-6))

    def test_fallback_used_without_analytic_jacobian(self):
        problem = fd_only("cubic", lambda u: u + u**3)
        assert not problem.has_analytic_jacobian
        assert_allclose(problem.jacobian([1.0]), [[4.0]], rtol=1e-8)

    def test_probe_failure_is_evaluation_error(self):
        problem = fd_only("sqrt", np.sqrt)
        with pytest.raises(EvaluationError):
            finite_difference_jacobian(problem, np.array([0.0]), 1e-6)

    def test_nonpositive_step(self, identity):
        with pytest.raises(ContractViolation):
            finite_difference_jacobian(identity, np.array([1.0]), 0.0)


class TestBallAndSampling:
    def test_negative_radius(self):
        with pytest.raises(ContractViolation):
            Ball([0.0], -1.0)

    def test_samples_start_at_center_and_stay_inside(self):
        ball = Ball([1.0, -2.0, 0.5], 0.75)
        samples = list(iter_ball_samples(ball, 200, seed=3))
        assert_array_equal(samples[0], ball.center)
        assert all(ball.contains(u, atol=1e-12) for u in samples)

    def test_sample_prefix_is_stable(self):
        ball = Ball([0.0, 0.0], 1.0)
        short = list(iter_ball_samples(ball, 10, seed=5))
        long = list(iter_ball_samples(ball, 50, seed=5))
        for a, b in zip(short, long):
            assert_array_equal(a, b)


class TestProductProblem:
    def test_block_structure(self, cubic):
        pair = product_problem(cubic)
        assert pair.dimension == 2
        assert_allclose(pair.evaluate([1.0, 2.0]), [2.0, 10.0])
        assert_allclose(pair.jacobian([1.0, 2.0]), [[4.0, 0.0], [0.0, 13.0]])


class TestConfiguration:
    def test_defaults_are_consistent(self):
        assert validate_settings(DSMSettings()) == []

    def test_seed_from_environment(self, monkeypatch):
        monkeypatch.setenv("DSM_SEED", "11")
        assert DSMSettings().seed == 11

    def test_flow_config_from_settings_ignores_unset_overrides(self):
        config = FlowConfig.from_settings(DSMSettings(), t_max=5.0, escape_radius=None)
        assert config.t_max == 5.0
        assert config.escape_radius is None
        assert config.max_step == 0.1

    def test_step_bounds_validated(self):
        with pytest.raises(ValueError):
            FlowConfig(min_step=1.0, max_step=0.1)

    def test_loose_tolerance_reported(self):
        issues = validate_settings(DSMSettings(rk_rel_tol=1e-4))
        assert any("RK_REL_TOL" in issue for issue in issues)


def test_inputs_digest_is_canonical():
    first = inputs_digest(R=1.0, u0=np.array([0.0, 1.0]))
    second = inputs_digest(u0=[0.0, 1.0], R=1.0)
    assert first["sha256"] == second["sha256"]
