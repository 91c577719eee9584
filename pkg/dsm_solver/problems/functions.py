"""Maps and analytic Jacobians of the built-in problems.

All maps act on float vectors of any length unless noted; the componentwise
maps have diagonal Jacobians.
"""
import numpy as np

# fixed SPD matrix of the linear problem, eigenvalues 1 and 3
SPD_MATRIX = np.array([[2.0, 1.0], [1.0, 2.0]])


def identity(u):
    return u.copy()


def identity_jacobian(u):
    return np.eye(u.size)


def linear_spd(u):
    return SPD_MATRIX @ u


def linear_spd_jacobian(u):
    return SPD_MATRIX.copy()


def scalar_exp(u):
    return np.exp(u)


def scalar_exp_jacobian(u):
    return np.diag(np.exp(u))


def monotone_cubic(u):
    return u + u**3


def monotone_cubic_jacobian(u):
    return np.diag(1.0 + 3.0 * u**2)


def trig_perturbed(u):
    return u + 0.5 * np.sin(u)


def trig_perturbed_jacobian(u):
    return np.diag(1.0 + 0.5 * np.cos(u))


def coupled_2d(u):
    return np.array([u[0] + u[1] ** 3, u[1] + u[0] ** 3])


def coupled_2d_jacobian(u):
    return np.array([[1.0, 3.0 * u[1] ** 2], [3.0 * u[0] ** 2, 1.0]])
