"""Mean-field replicator dynamics against a myopic best-responding inspector.

The crime rate p follows

    dp/dt = omega*beta * p*(1-p) * (l - lam*q_hat(p)*(l+f))

where q_hat(p) maximises the inspector's instantaneous payoff. Functions
taking ``p`` accept floats or numpy arrays unless noted.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from ._ode import n_steps, rk4_step
from .core import (
    AssumptionError,
    CostFunction,
    GameParams,
    IntegrationError,
    require_cost,
)

ESCAPE_TOL = 1e-12


class Stability(enum.Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    SADDLE = "Saddle"
    DEGENERATE = "Degenerate"

    @classmethod
    def from_derivative(cls, d: float, degenerate_tol: float = 0.0) -> "Stability":
        if abs(d) <= degenerate_tol:
            return cls.DEGENERATE
        return cls.STABLE if d < 0 else cls.UNSTABLE


@dataclass(frozen=True)
class FixedPoint:
    """Equilibrium location with its linear stability data.

    ``derivative`` holds dj/dp for one-dimensional systems or the pair of
    Jacobian eigenvalues for planar ones.
    """

    p_star: float
    q_star: float
    classification: Stability
    derivative: float | tuple[complex, complex]

    def __post_init__(self):
        d = self.derivative
        if isinstance(d, tuple):
            re = [complex(e).real for e in d]
            if self.classification is Stability.STABLE and not all(x < 0 for x in re):
                raise ValueError("Stable fixed point needs negative real parts")
        elif self.classification is Stability.STABLE and not d < 0:
            raise ValueError("Stable fixed point needs a negative derivative")
        elif self.classification is Stability.UNSTABLE and not d > 0:
            raise ValueError("Unstable fixed point needs a positive derivative")


@dataclass(frozen=True)
class Trajectory:
    """Sampled path (t, p, q).

    ``halted`` marks a path cut short because it reached the boundary of
    the unit square.
    """

    t: np.ndarray
    p: np.ndarray
    q: np.ndarray
    dt: float
    integrator: str = "rk4"
    halted: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not (len(self.t) == len(self.p) == len(self.q)):
            raise ValueError("t, p and q must have equal length")
        if len(self.t) > 1 and not np.all(np.diff(self.t) > 0):
            raise ValueError("trajectory times must be strictly increasing")
        for name in ("p", "q"):
            v = getattr(self, name)
            if np.any(v < 0) or np.any(v > 1):
                raise ValueError(f"trajectory {name} leaves [0, 1]")

    def __len__(self):
        return len(self.t)

    @property
    def final(self) -> tuple[float, float]:
        return float(self.p[-1]), float(self.q[-1])


# ----------------------------------------------------------------------
# payoffs
# ----------------------------------------------------------------------


def _check_prob(name, x):
    if np.any(np.asarray(x) < 0) or np.any(np.asarray(x) > 1):
        raise ValueError(f"{name} must lie in [0, 1], got {x}")


def payoff_complier(params: GameParams) -> float:
    return params.r


def payoff_violator(params: GameParams, q):
    _check_prob("q", q)
    lq = params.lam * q
    return params.r + (1 - lq) * params.l - lq * params.f


def inspector_payoff(params: GameParams, cost: CostFunction, p, q):
    """Expected inspector payoff; escaped violators cost l with probability 1 - lam*q."""
    _check_prob("p", p)
    _check_prob("q", q)
    n, lam = params.N, params.lam
    return -cost.value(q) + n * p * lam * q * params.f - n * p * (1 - lam * q) * params.l


# ----------------------------------------------------------------------
# inspector best response
# ----------------------------------------------------------------------


def best_response_q(params: GameParams, cost: CostFunction, p):
    """Enforcement level solving F'(q) = N*p*lam*(l+f), clamped to [0, 1]."""
    return cost.marginal_inverse(params.gain * p)


def best_response_slope(params: GameParams, cost: CostFunction, p):
    """d q_hat / dp = N*lam*(l+f) / F''(q_hat(p)), valid below p_bar."""
    return params.gain / cost.d2(best_response_q(params, cost, p))


def p_bar(params: GameParams, cost: CostFunction) -> float:
    """Smallest crime rate at which the inspector inspects everyone."""
    return min(max(float(cost.d1(1.0)) / params.gain, 0.0), 1.0)


# ----------------------------------------------------------------------
# vector field and integration
# ----------------------------------------------------------------------


def replicator_rhs(params: GameParams, cost: CostFunction, p):
    q = best_response_q(params, cost, p)
    return params.kappa * p * (1 - p) * (params.l - params.lam * q * (params.l + params.f))


def _clip_unit(x: float, tol: float = ESCAPE_TOL) -> float:
    if x < 0.0:
        if x < -tol:
            raise IntegrationError(f"state {x!r} left [0, 1] beyond roundoff")
        return 0.0
    if x > 1.0:
        if x > 1.0 + tol:
            raise IntegrationError(f"state {x!r} left [0, 1] beyond roundoff")
        return 1.0
    return x


def integrate_scalar(rhs, p0: float, t_end: float, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """RK4 for a scalar field on [0, 1]; returns sample times and states."""
    n = n_steps(t_end, dt)
    p = np.empty(n + 1)
    x = float(p0)
    p[0] = x
    for i in range(1, n + 1):
        x = _clip_unit(rk4_step(rhs, x, dt))
        p[i] = x
    return dt * np.arange(n + 1), p


def integrate(params: GameParams, cost: CostFunction, p0: float, t_end: float, dt: float) -> Trajectory:
    """RK4 path of the replicator equation with q recorded as q_hat(p)."""
    params.check_step(dt)
    _check_prob("p0", p0)
    require_cost(cost, params)

    def rhs(x):
        return replicator_rhs(params, cost, x)

    t, p = integrate_scalar(rhs, p0, t_end, dt)
    q = np.asarray(best_response_q(params, cost, p), dtype=float)
    return Trajectory(t, p, q, dt, "rk4")


# ----------------------------------------------------------------------
# fixed points
# ----------------------------------------------------------------------


def interior_equilibrium(params: GameParams, cost: CostFunction) -> FixedPoint:
    """The unique interior rest point and its linear stability."""
    require_cost(cost, params)
    lam, l, f = params.lam, params.l, params.f
    q_star = l / (lam * (l + f))
    p_star = float(cost.d1(q_star)) / params.gain
    if not 0 < p_star < 1:
        raise AssumptionError(f"(A2): interior crime rate p*={p_star} outside (0,1)", ["(A2)"])
    slope = params.gain / float(cost.d2(q_star))
    djdp = -params.kappa * lam * slope * p_star * (1 - p_star) * (l + f)
    return FixedPoint(p_star, q_star, Stability.from_derivative(djdp), djdp)


def boundary_derivatives(params: GameParams, cost: CostFunction) -> tuple[float, float]:
    """dj/dp at p = 0 and at p = 1."""
    lam, l, f = params.lam, params.l, params.f
    q0 = float(best_response_q(params, cost, 0.0))
    q1 = float(best_response_q(params, cost, 1.0))
    d0 = params.kappa * (l - lam * q0 * (l + f))
    d1 = -params.kappa * (l - lam * q1 * (l + f))
    return d0, d1


def classify_all_fixed_points(params: GameParams, cost: CostFunction) -> list[FixedPoint]:
    """Boundary and interior rest points, ordered by p."""
    interior = interior_equilibrium(params, cost)
    d0, d1 = boundary_derivatives(params, cost)
    q0 = float(best_response_q(params, cost, 0.0))
    q1 = float(best_response_q(params, cost, 1.0))
    return [
        FixedPoint(0.0, q0, Stability.from_derivative(d0), d0),
        interior,
        FixedPoint(1.0, q1, Stability.from_derivative(d1), d1),
    ]


def numeric_derivative(func, x: float, h: float = 1e-6) -> float:
    """Central difference, falling back to one-sided at the ends of [0, 1]."""
    lo, hi = max(x - h, 0.0), min(x + h, 1.0)
    return (func(hi) - func(lo)) / (hi - lo)


__all__ = [
    "Stability",
    "FixedPoint",
    "Trajectory",
    "payoff_complier",
    "payoff_violator",
    "inspector_payoff",
    "best_response_q",
    "best_response_slope",
    "p_bar",
    "replicator_rhs",
    "integrate",
    "integrate_scalar",
    "interior_equilibrium",
    "boundary_derivatives",
    "classify_all_fixed_points",
    "numeric_derivative",
]
