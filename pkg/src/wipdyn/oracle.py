"""Independent ground truth: Lagrange-d'Alembert dynamics via multipliers.

Nothing in this module reuses the analytic mass matrix or force terms of the
dynamics modules.  The accelerations are obtained from the unconstrained
Lagrangian alone by solving the saddle system

    [ M(q)  C(q)^T ] [ q_dd ]   [ Q(q, q_dot) + tau ]
    [ C(q)  0      ] [ -lam ] = [ -C_dot q_dot      ]

with M = d2L/dq_dot2, Q = dL/dq - (d2L/dq_dot dq) q_dot, every Lagrangian
derivative taken by central finite differences.  C(q) holds the three rolling
constraint rows (two planar rows plus the yaw row); the yaw row is part of
the rolling constraint set and must be imposed -- with only the two planar
rows the wheel-difference momentum is conserved on its own and the yaw
relation is not preserved, which describes a different mechanical system.

Step-size policy (reproducible; see also the step-sweep test):

* velocity directions use an O(1) step scaled by coordinate magnitude --
  the Lagrangian is exactly quadratic in the velocities, so the central
  second-difference has no truncation error and a large step minimises
  round-off;
* position directions use a relative step of 1e-6 scaled by coordinate
  magnitude (floored at 1), the usual central-difference compromise.

This is deliberately not performance-tuned; it exists solely as referee.
"""

from __future__ import annotations

import numpy as np

from .model import Params, lagrangian_full

__all__ = [
    "ConstraintViolationError",
    "constraint_matrix",
    "constraint_rate_term",
    "velocity_hessian",
    "mixed_hessian",
    "mixed_hessian_times",
    "position_gradient",
    "lagrange_dalembert_rhs",
    "lagrange_dalembert_full",
]

DEFAULT_POS_STEP = 1e-6
DEFAULT_VEL_STEP = 1.0


class ConstraintViolationError(ValueError):
    """Input velocities do not satisfy the rolling constraints."""


def constraint_matrix(q: np.ndarray, p: Params) -> np.ndarray:
    """C(q) with admissible velocities C(q) q_dot = 0; shape (3, 6).

    Rows: the two planar rolling rows and the yaw row
    theta_dot - (r/d)(phi2_dot - phi1_dot) = 0.
    """
    th = q[2]
    c, s = np.cos(th), np.sin(th)
    hr = 0.5 * p.r
    return np.array([
        [1.0, 0.0, 0.0, 0.0, -hr * c, -hr * c],
        [0.0, 1.0, 0.0, 0.0, -hr * s, -hr * s],
        [0.0, 0.0, 1.0, 0.0, p.r / p.d, -p.r / p.d],
    ])


def constraint_rate_term(q: np.ndarray, q_dot: np.ndarray, p: Params) -> np.ndarray:
    """C_dot q_dot; C depends on the configuration only through theta."""
    th, thd = q[2], q_dot[2]
    s_rate = q_dot[4] + q_dot[5]
    hr = 0.5 * p.r
    return np.array([hr * np.sin(th) * thd * s_rate,
                     -hr * np.cos(th) * thd * s_rate,
                     0.0])


def _steps(z: np.ndarray, rel: float) -> np.ndarray:
    return rel * np.maximum(1.0, np.abs(z))


def velocity_hessian(f, q, q_dot, vel_step: float = DEFAULT_VEL_STEP) -> np.ndarray:
    """Symmetric d2f/dq_dot2 by the four-point central formula.

    f(Q, QD) must accept stacked (N, n) arrays and return (N,).
    """
    q = np.asarray(q, float)
    qd = np.asarray(q_dot, float)
    n = qd.size
    hs = _steps(qd, vel_step)
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    pert = np.zeros((4 * len(pairs), n))
    for k, (i, j) in enumerate(pairs):
        for m, (si, sj) in enumerate(((1, 1), (1, -1), (-1, 1), (-1, -1))):
            row = pert[4 * k + m]
            row[i] += si * hs[i]
            row[j] += sj * hs[j]
    vals = f(np.broadcast_to(q, (pert.shape[0], n)), qd + pert)
    H = np.empty((n, n))
    for k, (i, j) in enumerate(pairs):
        a, b, c, d = vals[4 * k:4 * k + 4]
        H[i, j] = H[j, i] = (a - b - c + d) / (4.0 * hs[i] * hs[j])
    return H


def mixed_hessian(f, q, q_dot, pos_step: float = DEFAULT_POS_STEP,
                  vel_step: float = DEFAULT_VEL_STEP) -> np.ndarray:
    """K[i, j] = d2f/(dq_dot_i dq_j) by four-point central differences."""
    q = np.asarray(q, float)
    qd = np.asarray(q_dot, float)
    n = qd.size
    hv = _steps(qd, vel_step)
    hq = _steps(q, pos_step)
    nn = n * n
    Qs = np.broadcast_to(q, (4 * nn, n)).copy()
    QDs = np.broadcast_to(qd, (4 * nn, n)).copy()
    k = 0
    for i in range(n):
        for j in range(n):
            for si, sj in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
                QDs[k, i] += si * hv[i]
                Qs[k, j] += sj * hq[j]
                k += 1
    vals = f(Qs, QDs)
    K = np.empty((n, n))
    k = 0
    for i in range(n):
        for j in range(n):
            a, b, c, d = vals[k:k + 4]
            K[i, j] = (a - b - c + d) / (4.0 * hv[i] * hq[j])
            k += 4
    return K


def mixed_hessian_times(f, q, q_dot, vec, pos_step: float = DEFAULT_POS_STEP,
                        vel_step: float = DEFAULT_VEL_STEP) -> np.ndarray:
    """(d2f/dq_dot dq) vec without assembling the full mixed Hessian.

    The contraction is a directional derivative along vec in configuration
    space, so one four-point difference per velocity slot suffices.
    """
    q = np.asarray(q, float)
    qd = np.asarray(q_dot, float)
    vec = np.asarray(vec, float)
    n = qd.size
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        return np.zeros(n)
    u = vec / norm
    hd = pos_step * max(1.0, float(np.max(np.abs(q))))
    hv = _steps(qd, vel_step)
    Qs = np.empty((4 * n, n))
    QDs = np.empty((4 * n, n))
    k = 0
    for i in range(n):
        for si, sj in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            QDs[k] = qd
            QDs[k, i] += si * hv[i]
            Qs[k] = q + (sj * hd) * u
            k += 1
    vals = f(Qs, QDs)
    out = np.empty(n)
    for i in range(n):
        a, b, c, d = vals[4 * i:4 * i + 4]
        out[i] = (a - b - c + d) / (4.0 * hv[i] * hd)
    return out * norm


def position_gradient(f, q, q_dot, pos_step: float = DEFAULT_POS_STEP) -> np.ndarray:
    """df/dq by central differences."""
    q = np.asarray(q, float)
    qd = np.asarray(q_dot, float)
    n = q.size
    hq = _steps(q, pos_step)
    Qs = np.broadcast_to(q, (2 * n, n)).copy()
    for i in range(n):
        Qs[2 * i, i] += hq[i]
        Qs[2 * i + 1, i] -= hq[i]
    vals = f(Qs, np.broadcast_to(qd, (2 * n, n)))
    return (vals[0::2] - vals[1::2]) / (2.0 * hq)


def lagrange_dalembert_full(q, q_dot, tau, p: Params,
                            pos_step: float = DEFAULT_POS_STEP,
                            vel_step: float = DEFAULT_VEL_STEP,
                            check_constraints: bool = True):
    """Accelerations and multipliers of the constrained system.

    tau is the 6-vector of generalized forces (wheel torques sit in the last
    two slots).  With check_constraints, inputs with |C q_dot| > 1e-10 are
    rejected; integrators disable the check because Runge-Kutta stage states
    sit O(dt^2) off the constraint manifold (C q_dot is a first integral of
    the returned field, so the drift stays at truncation level).

    Returns (q_dd, lam).  Raises numpy.linalg.LinAlgError if the saddle
    matrix is rank deficient.
    """
    q = np.asarray(q, float)
    qd = np.asarray(q_dot, float)
    tau = np.asarray(tau, float)
    C = constraint_matrix(q, p)
    if check_constraints:
        viol = np.max(np.abs(C @ qd))
        if viol > 1e-10:
            raise ConstraintViolationError(
                f"velocities violate the rolling constraints by {viol:.3e}")

    def f(Q, QD):
        return lagrangian_full(Q, QD, p)

    M = velocity_hessian(f, q, qd, vel_step)
    grad_q = position_gradient(f, q, qd, pos_step)
    Q_vec = grad_q - mixed_hessian_times(f, q, qd, qd, pos_step, vel_step)

    m = C.shape[0]
    saddle = np.zeros((6 + m, 6 + m))
    saddle[:6, :6] = M
    saddle[:6, 6:] = C.T
    saddle[6:, :6] = C
    rhs = np.concatenate([Q_vec + tau, -constraint_rate_term(q, qd, p)])
    sol = np.linalg.solve(saddle, rhs)
    return sol[:6], -sol[6:]


def lagrange_dalembert_rhs(q, q_dot, tau, p: Params,
                           pos_step: float = DEFAULT_POS_STEP,
                           vel_step: float = DEFAULT_VEL_STEP,
                           check_constraints: bool = True) -> np.ndarray:
    """Accelerations q_dd of the constrained system (see the sibling above)."""
    qdd, _ = lagrange_dalembert_full(q, q_dot, tau, p, pos_step, vel_step,
                                     check_constraints)
    return qdd
