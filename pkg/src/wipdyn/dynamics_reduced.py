"""Symmetry-reduced dynamics: momenta, shape and group reconstruction.

State: group element (x, y, theta, phi), shape (alpha, alpha_dot) and the
nonholonomic momenta (p1, p2).  The evolution is

    p1_dot = m_b r b sin(alpha) p2^2 / f(alpha)^2 + u1
    p2_dot = -(m_b b r sin(alpha) p2 / (f(alpha) h)) (p1 - m_b b r cos(alpha) alpha_dot) + u2
    m(alpha) alpha_dd = -(m_b b r)^2 sin(2 alpha)/(2h) alpha_dot^2
                        + (h f'(alpha) - (m_b b r)^2 sin(2 alpha)) / (2 h f(alpha)^2) p2^2
                        + m_b g b sin(alpha) - (m_b b r cos(alpha)/h) u1
    g^-1 g_dot = xi = -A(alpha) alpha_dot + Gamma(alpha) p

where u1 and u2 are the generalized forces conjugate to the rolling and yaw
symmetry directions (see wipdyn.sim.u_from_tau).  The u1 reaction term in the
tilt equation comes from eliminating the wheel acceleration through p1_dot;
dropping it breaks equivalence with the full model whenever torque is applied.

Trajectories of this system reproduce the full model exactly (it is the same
mechanical system in different coordinates); that equivalence is the central
cross-check of the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import cos, sin

from .model import (Controls, FullState, Params, ReducedState, f_of_alpha,
                    f_prime, h_const, shape_mass)
from .dynamics_full import momenta_from_full

__all__ = [
    "ReducedRhs",
    "momentum_rhs",
    "shape_rhs",
    "reduced_rhs",
    "full_to_reduced",
    "reduced_to_full",
]


@dataclass(frozen=True)
class ReducedRhs:
    """Momentum rates, shape acceleration and group rates."""

    p1_dot: float
    p2_dot: float
    alpha_ddot: float
    x_dot: float
    y_dot: float
    theta_dot: float
    phi_dot: float


def momentum_rhs(alpha: float, alpha_dot: float, p1: float, p2: float,
                 u1: float, u2: float, p: Params) -> tuple[float, float]:
    """Nonholonomic momentum dynamics (p1_dot, p2_dot)."""
    sa = sin(alpha)
    fa = float(f_of_alpha(alpha, p))
    mbbr = p.m_b * p.b * p.r
    p1_dot = mbbr * sa * p2 * p2 / (fa * fa) + u1
    p2_dot = -(mbbr * sa * p2 / (fa * h_const(p))) * (p1 - mbbr * cos(alpha) * alpha_dot) + u2
    return p1_dot, p2_dot


def _shape_accel(alpha, alpha_dot, p2, u1, p: Params) -> float:
    sa, ca = sin(alpha), cos(alpha)
    h = h_const(p)
    fa = float(f_of_alpha(alpha, p))
    fap = float(f_prime(alpha, p))
    mbbr = p.m_b * p.b * p.r
    m_al = p.m_b * p.b * p.b + p.I_Byy - (mbbr * ca) ** 2 / h
    if m_al <= 0.0:
        raise ValueError(f"non-positive shape mass m(alpha) = {m_al} at alpha = {alpha}")
    xi3 = p2 / fa
    num = (-(mbbr * mbbr) * sa * ca / h * alpha_dot * alpha_dot
           + 0.5 * (fap - 2.0 * mbbr * mbbr * sa * ca / h) * xi3 * xi3
           + p.m_b * p.g * p.b * sa
           - mbbr * ca / h * u1)
    return num / m_al


def shape_rhs(alpha: float, alpha_dot: float, p2: float, p: Params) -> float:
    """Unforced tilt acceleration alpha_dd(alpha, alpha_dot, p2).

    Raises ValueError on a non-positive shape mass (unreachable for a valid
    :class:`~wipdyn.model.Params`).
    """
    return _shape_accel(alpha, alpha_dot, p2, 0.0, p)


def reduced_rhs(state: ReducedState, u1: float, u2: float, p: Params) -> ReducedRhs:
    """Complete reduced right-hand side including group reconstruction.

    The group rates follow from xi = -A(alpha) alpha_dot + Gamma(alpha) p by
    left translation: x_dot = xi1 cos(theta), y_dot = xi1 sin(theta),
    theta_dot = xi3, phi_dot = xi4 (xi2 is identically zero).
    """
    al, ald = state.alpha, state.alpha_dot
    h = h_const(p)
    kappa = p.m_b * p.b * p.r * cos(al)
    xi4 = (state.p1 - kappa * ald) / h
    xi1 = p.r * xi4
    xi3 = state.p2 / float(f_of_alpha(al, p))
    p1_dot, p2_dot = momentum_rhs(al, ald, state.p1, state.p2, u1, u2, p)
    alpha_dd = _shape_accel(al, ald, state.p2, u1, p)
    return ReducedRhs(p1_dot, p2_dot, alpha_dd,
                      xi1 * cos(state.theta), xi1 * sin(state.theta), xi3, xi4)


def full_to_reduced(state: FullState, p: Params) -> ReducedState:
    """Change of representation: mean wheel angle and nonholonomic momenta."""
    p1, p2 = momenta_from_full(state, p)
    return ReducedState(x=state.x, y=state.y, theta=state.theta,
                        phi=0.5 * (state.phi1 + state.phi2),
                        alpha=state.alpha, alpha_dot=state.alpha_dot,
                        p1=p1, p2=p2)


def reduced_to_full(state: ReducedState, p: Params,
                    phi1_0: float = 0.0, phi2_0: float = 0.0,
                    theta_0: float = 0.0) -> FullState:
    """Inverse change of representation.

    The wheel difference is recovered from the integrated yaw relation
    phi2 - phi1 = (d/r)(theta - theta_0) + (phi2_0 - phi1_0); the velocities
    come from the body velocity of the reduced state, so the result satisfies
    the rolling constraints exactly.
    """
    delta = p.d / p.r * (state.theta - theta_0) + (phi2_0 - phi1_0)
    phi1 = state.phi - 0.5 * delta
    phi2 = state.phi + 0.5 * delta
    kappa = p.m_b * p.b * p.r * cos(state.alpha)
    phi_dot = (state.p1 - kappa * state.alpha_dot) / h_const(p)
    theta_dot = state.p2 / float(f_of_alpha(state.alpha, p))
    half = 0.5 * p.d / p.r * theta_dot
    return FullState.constrained(state.x, state.y, state.theta, state.alpha,
                                 phi1, phi2, state.alpha_dot,
                                 phi_dot - half, phi_dot + half, p)
