"""Full constrained dynamics in the shape coordinates (alpha, phi1, phi2).

The group coordinates are eliminated through the rolling constraints, which
leaves the reduced Euler-Lagrange equations

    M(alpha) (alpha_dd, phi1_dd, phi2_dd)^T = F + (0, tau1, tau2)^T

with the mass matrix and force vector derived once from the constrained
Lagrangian (see docs/derivation_notes.md for the closed forms).  The group
rates are reconstructed kinematically, s_dot = -A(theta) r_dot, so every
trajectory of this module satisfies the constraints identically.

Everything here is scalar ``math`` code on purpose: these functions sit in
the innermost integration loop.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import cos, sin

import numpy as np

from .model import Controls, FullState, Params, h_const, f_of_alpha

__all__ = [
    "FullRhs",
    "SingularMassMatrixError",
    "mass_matrix",
    "force_vector",
    "full_rhs",
    "reconstruct_group_rates",
    "momenta_from_full",
    "accelerations_q6",
    "solve3",
]


class SingularMassMatrixError(RuntimeError):
    """Raised when the 3x3 constrained mass matrix cannot be inverted.

    Unreachable for a valid :class:`~wipdyn.model.Params`, whose construction
    already checks positivity of the shape-space mass.
    """


@dataclass(frozen=True)
class FullRhs:
    """Accelerations of the shape coordinates plus reconstructed group rates."""

    alpha_ddot: float
    phi1_ddot: float
    phi2_ddot: float
    x_dot: float
    y_dot: float
    theta_dot: float


def solve3(A, rhs):
    """Solve a 3x3 linear system by Gaussian elimination with partial pivoting.

    A is a list of three row-lists and rhs a list of three floats; both are
    consumed destructively.  Raises :class:`SingularMassMatrixError` on a
    vanishing pivot.
    """
    for col in range(3):
        piv = col
        best = abs(A[col][col])
        for row in range(col + 1, 3):
            mag = abs(A[row][col])
            if mag > best:
                best, piv = mag, row
        if best <= 1e-300:
            raise SingularMassMatrixError("singular mass matrix")
        if piv != col:
            A[col], A[piv] = A[piv], A[col]
            rhs[col], rhs[piv] = rhs[piv], rhs[col]
        inv = 1.0 / A[col][col]
        for row in range(col + 1, 3):
            fac = A[row][col] * inv
            if fac != 0.0:
                for k in range(col + 1, 3):
                    A[row][k] -= fac * A[col][k]
                rhs[row] -= fac * rhs[col]
    x2 = rhs[2] / A[2][2]
    x1 = (rhs[1] - A[1][2] * x2) / A[1][1]
    x0 = (rhs[0] - A[0][1] * x1 - A[0][2] * x2) / A[0][0]
    return [x0, x1, x2]


def _coeffs(alpha: float, p: Params):
    """Mass-matrix entries of the constrained Lagrangian at a tilt angle."""
    sa, ca = sin(alpha), cos(alpha)
    m_t = p.m_b + 2.0 * p.m_W
    i_th = (2.0 * p.I_Wzz + p.I_Bz * ca * ca + 2.0 * p.m_W * p.d * p.d
            + (p.I_Bxx + p.m_b * p.b * p.b) * sa * sa)
    rr_dd = p.r * p.r / (p.d * p.d)
    a1 = 0.25 * m_t * p.r * p.r + i_th * rr_dd + p.I_Wyy
    a3 = 0.25 * m_t * p.r * p.r - i_th * rr_dd
    k = 0.5 * p.r * p.m_b * p.b * ca
    c = p.m_b * p.b * p.b + p.I_Byy
    return sa, ca, a1, a3, k, c, rr_dd


def mass_matrix(alpha: float, p: Params) -> np.ndarray:
    """Constrained mass matrix M(alpha) in coordinates (alpha, phi1, phi2)."""
    _, _, a1, a3, k, c, _ = _coeffs(alpha, p)
    return np.array([[c, k, k], [k, a1, a3], [k, a3, a1]])


def force_vector(alpha: float, alpha_dot: float, phi1_dot: float, phi2_dot: float,
                 tau1: float, tau2: float, p: Params) -> np.ndarray:
    """Right-hand side F + (0, tau1, tau2) of the reduced Euler-Lagrange system.

    Collects the dL_c/dalpha term, the Coriolis terms and the curvature
    forcing -(dL/ds_dot) B r_dot; the tilt equation is unactuated.
    """
    sa = sin(alpha)
    ithp = (p.I_Bxx + p.m_b * p.b * p.b - p.I_Bz) * sin(2.0 * alpha)
    rr_dd = p.r * p.r / (p.d * p.d)
    mbb = p.m_b * p.b
    th_d = p.r / p.d * (phi2_dot - phi1_dot)
    curv = mbb * (p.r * p.r / p.d) * sa * th_d
    cor = rr_dd * ithp * alpha_dot * (phi2_dot - phi1_dot)
    quad = 0.5 * p.r * mbb * sa * alpha_dot * alpha_dot
    f_alpha = 0.5 * ithp * rr_dd * (phi2_dot - phi1_dot) ** 2 + mbb * p.g * sa
    f_1 = tau1 + curv * phi2_dot + cor + quad
    f_2 = tau2 - curv * phi1_dot - cor + quad
    return np.array([f_alpha, f_1, f_2])


def _accelerations(alpha, alpha_dot, phi1_dot, phi2_dot, tau1, tau2, p: Params):
    """Scalar core: solve M(alpha) a = F for (alpha_dd, phi1_dd, phi2_dd)."""
    sa, ca, a1, a3, k, c, rr_dd = _coeffs(alpha, p)
    ithp = (p.I_Bxx + p.m_b * p.b * p.b - p.I_Bz) * 2.0 * sa * ca
    mbb = p.m_b * p.b
    dphi = phi2_dot - phi1_dot
    th_d = p.r / p.d * dphi
    curv = mbb * (p.r * p.r / p.d) * sa * th_d
    cor = rr_dd * ithp * alpha_dot * dphi
    quad = 0.5 * p.r * mbb * sa * alpha_dot * alpha_dot
    f_alpha = 0.5 * ithp * rr_dd * dphi * dphi + mbb * p.g * sa
    f_1 = tau1 + curv * phi2_dot + cor + quad
    f_2 = tau2 - curv * phi1_dot - cor + quad
    return solve3([[c, k, k], [k, a1, a3], [k, a3, a1]], [f_alpha, f_1, f_2])


def reconstruct_group_rates(state: FullState, p: Params) -> tuple[float, float, float]:
    """Group rates from the rolling constraints, s_dot = -A(theta) r_dot."""
    v = 0.5 * p.r * (state.phi1_dot + state.phi2_dot)
    return (v * cos(state.theta), v * sin(state.theta),
            p.r / p.d * (state.phi2_dot - state.phi1_dot))


def full_rhs(state: FullState, controls: Controls, p: Params) -> FullRhs:
    """Accelerations of the full model plus reconstructed group rates."""
    add, f1dd, f2dd = _accelerations(state.alpha, state.alpha_dot,
                                     state.phi1_dot, state.phi2_dot,
                                     controls.tau1, controls.tau2, p)
    xd, yd, thd = reconstruct_group_rates(state, p)
    return FullRhs(add, f1dd, f2dd, xd, yd, thd)


def momenta_from_full(state: FullState, p: Params) -> tuple[float, float]:
    """Nonholonomic momenta (p1, p2) of a constrained full state.

    p1 = h phi_dot + r m_b b cos(alpha) alpha_dot with phi_dot the mean wheel
    rate; p2 = f(alpha) theta_dot with theta_dot taken from the wheel rates
    (enforced representation).
    """
    phi_dot = 0.5 * (state.phi1_dot + state.phi2_dot)
    theta_dot = p.r / p.d * (state.phi2_dot - state.phi1_dot)
    p1 = h_const(p) * phi_dot + p.r * p.m_b * p.b * cos(state.alpha) * state.alpha_dot
    p2 = float(f_of_alpha(state.alpha, p)) * theta_dot
    return float(p1), float(p2)


def accelerations_q6(state: FullState, controls: Controls, p: Params) -> np.ndarray:
    """All six coordinate accelerations, for comparison with the oracle.

    (x_dd, y_dd, theta_dd) follow by differentiating the reconstruction.
    """
    add, f1dd, f2dd = _accelerations(state.alpha, state.alpha_dot,
                                     state.phi1_dot, state.phi2_dot,
                                     controls.tau1, controls.tau2, p)
    th = state.theta
    s_rate = state.phi1_dot + state.phi2_dot
    s_acc = f1dd + f2dd
    th_d = p.r / p.d * (state.phi2_dot - state.phi1_dot)
    xdd = 0.5 * p.r * (-sin(th) * th_d * s_rate + cos(th) * s_acc)
    ydd = 0.5 * p.r * (cos(th) * th_d * s_rate + sin(th) * s_acc)
    thdd = p.r / p.d * (f2dd - f1dd)
    return np.array([xdd, ydd, thdd, add, f1dd, f2dd])
