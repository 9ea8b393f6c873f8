"""Time integration of the three models under a torque profile.

Fixed-step classical Runge-Kutta only: cross-model comparisons then live on
identical grids and every run is bit-for-bit deterministic.  The reduced
model integrates its group coordinates as ordinary ODE components (no exact
exponential update); the O(dt^4) error that costs is covered by the
comparison tolerances.

simulate() is pure per call.  Independent scenarios may be run concurrently
map-style; outputs are deterministic per scenario and no state is shared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import dynamics_full as dfull
from . import oracle as _oracle
from .model import (FullState, Params, ReducedState, f_of_alpha, h_const,
                    reduced_energy, total_energy)
from .dynamics_reduced import _shape_accel, momentum_rhs

__all__ = [
    "SimulationError",
    "TorqueProfile",
    "Trajectory",
    "u_from_tau",
    "tau_from_u",
    "rk4_step",
    "simulate",
    "n_samples",
]

MODELS = ("full", "reduced", "oracle")


class SimulationError(RuntimeError):
    """Integration failure; carries the failing timestamp in .t."""

    def __init__(self, message: str, t: float):
        super().__init__(f"{message} (t = {t:.6g} s)")
        self.t = t


def u_from_tau(tau1: float, tau2: float, p: Params) -> tuple[float, float]:
    """Generalized forces (u1, u2) conjugate to the rolling and yaw directions.

    u1 = tau1 + tau2 and u2 = (d / 2r)(tau2 - tau1).  These are the forcings
    that enter the momentum equations additively; the pairing of the wheel
    torques with the symmetry generators fixes them (see
    docs/derivation_notes.md) and the power identity
    u1 phi_dot + u2 theta_dot = tau1 phi1_dot + tau2 phi2_dot checks them.
    """
    return tau1 + tau2, p.d / (2.0 * p.r) * (tau2 - tau1)


def tau_from_u(u1: float, u2: float, p: Params) -> tuple[float, float]:
    """Wheel torques producing the generalized forces (u1, u2)."""
    delta = 2.0 * p.r / p.d * u2
    return 0.5 * (u1 - delta), 0.5 * (u1 + delta)


@dataclass(frozen=True)
class TorqueProfile:
    """Piecewise-constant wheel torques.

    segments: ordered (t_start, tau1, tau2) triples with strictly increasing
    start times.  Torque lookup is left-closed: the segment starting at
    t_start applies on [t_start, t_next); before the first start time the
    torque is zero.
    """

    segments: tuple[tuple[float, float, float], ...] = ()

    def __post_init__(self):
        segs = tuple((float(t), float(a), float(b)) for t, a, b in self.segments)
        object.__setattr__(self, "segments", segs)
        prev = -math.inf
        for t, a, b in segs:
            if not (math.isfinite(t) and math.isfinite(a) and math.isfinite(b)):
                raise ValueError("torque segments must be finite")
            if t <= prev:
                raise ValueError("segment start times must be strictly increasing")
            prev = t

    @classmethod
    def zero(cls) -> "TorqueProfile":
        return cls(())

    @classmethod
    def constant(cls, tau1: float, tau2: float, t_start: float = 0.0) -> "TorqueProfile":
        return cls(((t_start, tau1, tau2),))

    def tau_at(self, t: float) -> tuple[float, float]:
        tau1 = tau2 = 0.0
        for ts, a, b in self.segments:
            if t >= ts:
                tau1, tau2 = a, b
            else:
                break
        return tau1, tau2

    def u_at(self, t: float, p: Params) -> tuple[float, float]:
        return u_from_tau(*self.tau_at(t), p)


def rk4_step(rhs, y: np.ndarray, t: float, dt: float) -> np.ndarray:
    """One classical fourth-order Runge-Kutta step.

    rhs(t, y) -> dy/dt.  Raises ValueError if any stage derivative is not
    finite; dt must be positive.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * dt, y + (0.5 * dt) * k1)
    k3 = rhs(t + 0.5 * dt, y + (0.5 * dt) * k2)
    k4 = rhs(t + dt, y + dt * k3)
    out = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.isfinite(out).all():
        raise ValueError("non-finite derivative in RK4 step")
    return out


def n_samples(T: float, dt: float) -> int:
    """Samples on the uniform grid: floor(T/dt) + 1 (tolerant of rounding)."""
    return int(math.floor(T / dt + 1e-9)) + 1


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled run of one model plus per-sample diagnostics.

    states holds the raw integrator state (rows = samples); the layout
    depends on the model:

    * full:    (x, y, theta, alpha, phi1, phi2, alpha_dot, phi1_dot, phi2_dot)
    * reduced: (x, y, theta, phi, alpha, alpha_dot, p1, p2)
    * oracle:  (x, y, theta, alpha, phi1, phi2) + the six velocities

    Diagnostics: total energy, nonholonomic momenta and the three rolling
    constraint residuals at every sample.
    """

    model: str
    t: np.ndarray
    states: np.ndarray
    energy: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    residuals: np.ndarray

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0]) if len(self.t) > 1 else 0.0

    def __len__(self) -> int:
        return len(self.t)

    def reduced_series(self, p: Params) -> np.ndarray:
        """Shared observables (x, y, theta, phi, alpha, alpha_dot, p1, p2), (N, 8)."""
        Y = self.states
        if self.model == "reduced":
            return Y.copy()
        cols = [Y[:, 0], Y[:, 1], Y[:, 2], 0.5 * (Y[:, 4] + Y[:, 5]), Y[:, 3]]
        cols.append(Y[:, 6] if self.model == "full" else Y[:, 9])
        return np.stack(cols + [self.p1, self.p2], axis=1)


REDUCED_VARIABLES = ("x", "y", "theta", "phi", "alpha", "alpha_dot", "p1", "p2")


def _full_ode(profile: TorqueProfile, p: Params):
    accel = dfull._accelerations
    r, d = p.r, p.d
    tau_at = profile.tau_at

    def rhs(t, y):
        tau1, tau2 = tau_at(t)
        ald, f1d, f2d = y[6], y[7], y[8]
        add, f1dd, f2dd = accel(y[3], ald, f1d, f2d, tau1, tau2, p)
        th = y[2]
        v = 0.5 * r * (f1d + f2d)
        return np.array([v * math.cos(th), v * math.sin(th), r / d * (f2d - f1d),
                         ald, f1d, f2d, add, f1dd, f2dd])

    return rhs


def _reduced_ode(profile: TorqueProfile, p: Params):
    h = h_const(p)
    mbbr = p.m_b * p.b * p.r
    r = p.r
    tau_at = profile.tau_at
    d_2r = p.d / (2.0 * p.r)

    def rhs(t, y):
        tau1, tau2 = tau_at(t)
        u1, u2 = tau1 + tau2, d_2r * (tau2 - tau1)
        th, al, ald, p1, p2 = y[2], y[4], y[5], y[6], y[7]
        xi4 = (p1 - mbbr * math.cos(al) * ald) / h
        xi1 = r * xi4
        xi3 = p2 / float(f_of_alpha(al, p))
        p1d, p2d = momentum_rhs(al, ald, p1, p2, u1, u2, p)
        add = _shape_accel(al, ald, p2, u1, p)
        return np.array([xi1 * math.cos(th), xi1 * math.sin(th), xi3, xi4,
                         ald, add, p1d, p2d])

    return rhs


def _oracle_ode(profile: TorqueProfile, p: Params):
    tau_at = profile.tau_at

    def rhs(t, y):
        tau = np.zeros(6)
        tau[4], tau[5] = tau_at(t)
        qdd = _oracle.lagrange_dalembert_rhs(y[:6], y[6:], tau, p,
                                             check_constraints=False)
        return np.concatenate([y[6:], qdd])

    return rhs


def _initial_vector(model: str, initial, p: Params) -> np.ndarray:
    if model == "reduced":
        if not isinstance(initial, ReducedState):
            raise TypeError("reduced model requires a ReducedState initial condition")
        s = initial
        return np.array([s.x, s.y, s.theta, s.phi, s.alpha, s.alpha_dot, s.p1, s.p2])
    if not isinstance(initial, FullState):
        raise TypeError(f"{model} model requires a FullState initial condition")
    s = initial
    res = _state_residuals(s, p)
    if max(res) > 1e-9:
        raise ValueError(f"initial state violates the rolling constraints by {max(res):.3e}")
    if model == "full":
        return np.array([s.x, s.y, s.theta, s.alpha, s.phi1, s.phi2,
                         s.alpha_dot, s.phi1_dot, s.phi2_dot])
    return np.concatenate([s.q, s.q_dot])


def _state_residuals(s: FullState, p: Params) -> tuple[float, float, float]:
    v = 0.5 * p.r * (s.phi1_dot + s.phi2_dot)
    return (abs(s.x_dot - v * math.cos(s.theta)),
            abs(s.y_dot - v * math.sin(s.theta)),
            abs(s.theta_dot - p.r / p.d * (s.phi2_dot - s.phi1_dot)))


def _diagnostics(model: str, Y: np.ndarray, p: Params):
    if model == "reduced":
        energy = reduced_energy((Y[:, 4], Y[:, 5], Y[:, 6], Y[:, 7]), p)
        return energy, Y[:, 6].copy(), Y[:, 7].copy(), np.zeros((len(Y), 3))
    if model == "full":
        th, al = Y[:, 2], Y[:, 3]
        ald, f1d, f2d = Y[:, 6], Y[:, 7], Y[:, 8]
        v = 0.5 * p.r * (f1d + f2d)
        qd = np.stack([v * np.cos(th), v * np.sin(th), p.r / p.d * (f2d - f1d),
                       ald, f1d, f2d], axis=1)
        q = np.concatenate([Y[:, :6]], axis=1)
        res = np.zeros((len(Y), 3))
    else:
        q, qd = Y[:, :6], Y[:, 6:]
        th = q[:, 2]
        al = q[:, 3]
        ald, f1d, f2d = qd[:, 3], qd[:, 4], qd[:, 5]
        v = 0.5 * p.r * (f1d + f2d)
        res = np.stack([np.abs(qd[:, 0] - v * np.cos(th)),
                        np.abs(qd[:, 1] - v * np.sin(th)),
                        np.abs(qd[:, 2] - p.r / p.d * (f2d - f1d))], axis=1)
    energy = total_energy((q, qd), p)
    phi_dot = 0.5 * (f1d + f2d)
    theta_dot = p.r / p.d * (f2d - f1d)
    p1 = h_const(p) * phi_dot + p.r * p.m_b * p.b * np.cos(al) * ald
    p2 = f_of_alpha(al, p) * theta_dot
    return energy, p1, p2, res


def simulate(model: str, initial, profile: TorqueProfile,
             T: float, dt: float, p: Params) -> Trajectory:
    """Integrate the chosen model and return its diagnosed trajectory.

    The initial state must satisfy the rolling constraints for the full and
    oracle models; T >= 0 (T = 0 gives a single-sample trajectory) and
    dt > 0.  RHS failures are re-raised as SimulationError with the failing
    timestamp.
    """
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if T < 0.0:
        raise ValueError("T must be non-negative")
    y = _initial_vector(model, initial, p)
    steps = n_samples(T, dt) - 1
    Y = np.empty((steps + 1, y.size))
    Y[0] = y
    rhs = {"full": _full_ode, "reduced": _reduced_ode, "oracle": _oracle_ode}[model](profile, p)
    t = 0.0
    # overflow in a diverging run is detected and raised; silence the warnings
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(steps):
            try:
                y = rk4_step(rhs, y, t, dt)
            except Exception as exc:
                raise SimulationError(str(exc), t) from exc
            t = (k + 1) * dt
            Y[k + 1] = y
    energy, p1, p2, res = _diagnostics(model, Y, p)
    return Trajectory(model=model, t=np.arange(steps + 1) * dt, states=Y,
                      energy=np.asarray(energy, float), p1=np.asarray(p1, float),
                      p2=np.asarray(p2, float), residuals=res)
