"""Phase plane of the forward-looking inspector.

After the costate is eliminated, optimal paths solve the planar system

    dp/dt = omega*beta * p*(1-p) * (l - lam*q*(l+f))
    dq/dt = delta * (F'(q) - N*p*lam*(l+f)) / F''(q)

whose interior rest point is a saddle under (A1)/(A2). The saddle path is
its stable manifold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._ode import n_steps, rk4_step
from .core import AssumptionError, CostFunction, GameParams, require_cost
from .dynamics import Stability, Trajectory, interior_equilibrium

SADDLE_EPS = 1e-7
BELOW = "below"
ABOVE = "above"


@dataclass(frozen=True)
class PhasePoint:
    p: float
    q: float

    def __post_init__(self):
        if not (0 <= self.p <= 1 and 0 <= self.q <= 1):
            raise ValueError(f"phase point outside the unit square: ({self.p}, {self.q})")


@dataclass(frozen=True)
class SaddleAnalysis:
    p_star: float
    q_star: float
    jacobian: np.ndarray
    eigenvalues: tuple[complex, complex]
    eigenvectors: np.ndarray  # columns pair with eigenvalues
    det: float
    trace: float
    classification: Stability

    @property
    def stable_eigenvalue(self) -> float:
        return float(min(e.real for e in self.eigenvalues))

    @property
    def unstable_eigenvalue(self) -> float:
        return float(max(e.real for e in self.eigenvalues))

    def eigenvector(self, which: str) -> np.ndarray:
        """Unit eigenvector for the ``"stable"`` or ``"unstable"`` eigenvalue."""
        re = [e.real for e in self.eigenvalues]
        idx = int(np.argmin(re)) if which == "stable" else int(np.argmax(re))
        v = np.real(self.eigenvectors[:, idx])
        return v / np.linalg.norm(v)


def _require_delta(params: GameParams) -> float:
    if params.delta is None:
        raise AssumptionError("the forward-looking inspector needs a discount rate delta", ["delta > 0"])
    return params.delta


def _field(params: GameParams, cost: CostFunction):
    """Vector field on stacked state arrays y = (p, q)."""
    k, l, lam, lf, gain = params.kappa, params.l, params.lam, params.l + params.f, params.gain
    delta = _require_delta(params)

    def rhs(y):
        p, q = y[0], y[1]
        dp = k * p * (1 - p) * (l - lam * q * lf)
        dq = delta * (cost.d1(q) - gain * p) / cost.d2(q)
        return np.array([dp, dq])

    return rhs


def vector_field(params: GameParams, cost: CostFunction, point: PhasePoint) -> tuple[float, float]:
    dp, dq = _field(params, cost)(np.array([point.p, point.q]))
    return float(dp), float(dq)


@dataclass(frozen=True)
class Nullclines:
    p_dot_zero: np.ndarray  # rows (p, q)
    q_dot_zero: np.ndarray
    intersection: tuple[float, float]


def nullclines(params: GameParams, cost: CostFunction, grid: int = 201) -> Nullclines:
    """Sampled nullclines and their interior intersection.

    dp/dt vanishes on p = 0, p = 1 and the line q = l/(lam(l+f)); dq/dt
    vanishes on the curve p = F'(q)/(N lam (l+f)), kept where it lies in
    the unit square.
    """
    if grid < 100:
        raise ValueError(f"grid must be >= 100, got {grid}")
    s = np.linspace(0.0, 1.0, grid)
    q_line = params.l / (params.lam * (params.l + params.f))
    p_rows = np.concatenate(
        [
            np.column_stack([np.zeros(grid), s]),
            np.column_stack([np.ones(grid), s]),
            np.column_stack([s, np.full(grid, q_line)]),
        ]
    )
    p_of_q = np.asarray(cost.d1(s), dtype=float) / params.gain
    keep = (p_of_q >= 0) & (p_of_q <= 1)
    q_rows = np.column_stack([p_of_q[keep], s[keep]])
    p_star = float(cost.d1(q_line)) / params.gain
    return Nullclines(p_rows, q_rows, (p_star, q_line))


def jacobian(params: GameParams, cost: CostFunction, p: float, q: float) -> np.ndarray:
    """Analytic Jacobian of the phase-plane field at (p, q)."""
    delta = _require_delta(params)
    k, l, lam, lf, gain = params.kappa, params.l, params.lam, params.l + params.f, params.gain
    d1, d2 = float(cost.d1(q)), float(cost.d2(q))
    # d3 by central difference; it drops out at the rest point where F' = gain*p
    h = 1e-6
    d3 = (float(cost.d2(min(q + h, 1.0))) - float(cost.d2(max(q - h, 0.0)))) / (min(q + h, 1.0) - max(q - h, 0.0))
    return np.array(
        [
            [k * (1 - 2 * p) * (l - lam * q * lf), -k * p * (1 - p) * lam * lf],
            [-delta * gain / d2, delta * (1 - (d1 - gain * p) * d3 / d2**2)],
        ]
    )


def saddle_analysis(params: GameParams, cost: CostFunction) -> SaddleAnalysis:
    """Linearisation at the interior rest point.

    At the rest point the Jacobian reduces to
    [[0, -omega*beta*p*(1-p)*lam*(l+f)], [-delta*N*lam*(l+f)/F''(q), delta]].
    """
    delta = _require_delta(params)
    require_cost(cost, params)
    fp = interior_equilibrium(params, cost)
    p, q = fp.p_star, fp.q_star
    lf = params.l + params.f
    a = np.array(
        [
            [0.0, -params.kappa * p * (1 - p) * params.lam * lf],
            [-delta * params.gain / float(cost.d2(q)), delta],
        ]
    )
    det = float(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0])
    trace = float(a[0, 0] + a[1, 1])
    disc = trace * trace - 4 * det
    if disc >= 0:
        root = math.sqrt(disc)
        eigs = ((trace - root) / 2, (trace + root) / 2)
        vecs = np.array([[a[0, 1], a[0, 1]], [eigs[0] - a[0, 0], eigs[1] - a[0, 0]]], dtype=float)
        vecs = vecs / np.linalg.norm(vecs, axis=0)
        eigs = (complex(eigs[0]), complex(eigs[1]))
    else:
        w, vecs = np.linalg.eig(a)
        eigs = (complex(w[0]), complex(w[1]))
    if det < 0:
        cls = Stability.SADDLE
    elif det > 0 and trace < 0:
        cls = Stability.STABLE
    elif det > 0 and trace > 0:
        cls = Stability.UNSTABLE
    else:
        cls = Stability.DEGENERATE
    return SaddleAnalysis(p, q, a, eigs, vecs, det, trace, cls)


def _inside(y) -> bool:
    return 0.0 <= y[0] <= 1.0 and 0.0 <= y[1] <= 1.0


def _march(rhs, y0, dt: float, n: int, stop=None):
    """RK4 steps from ``y0``; halts before leaving the unit square."""
    ys = [np.asarray(y0, dtype=float)]
    halted = False
    y = ys[0]
    for _ in range(n):
        y_new = rk4_step(rhs, y, dt)
        if not _inside(y_new):
            halted = True
            break
        ys.append(y_new)
        y = y_new
        if stop is not None and stop(ys):
            break
    arr = np.array(ys)
    return dt * np.arange(len(arr)), arr, halted


def integrate_phase(
    params: GameParams, cost: CostFunction, start: PhasePoint, t_end: float, dt: float
) -> Trajectory:
    """RK4 path of the phase-plane field, cut short at the boundary of the unit square."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    t, y, halted = _march(_field(params, cost), [start.p, start.q], dt, n_steps(t_end, dt))
    return Trajectory(t, y[:, 0], y[:, 1], dt, "rk4", halted)


def saddle_path(
    params: GameParams,
    cost: CostFunction,
    side: str = BELOW,
    arc_length: float = 0.05,
    *,
    eps: float = SADDLE_EPS,
    dt: float | None = None,
) -> Trajectory:
    """One branch of the stable manifold of the saddle.

    Built by integrating the reversed field from the rest point displaced
    by ``eps`` along the stable eigenvector. Samples are ordered outward
    from the rest point; ``t`` is the elapsed reversed time, so the point
    at time ``t`` returns to the rest point after flowing forward for
    about ``t``. The branch stops at ``arc_length`` or at the edge of the
    unit square.
    """
    if side not in (BELOW, ABOVE):
        raise ValueError(f"side must be {BELOW!r} or {ABOVE!r}")
    sa = saddle_analysis(params, cost)
    if sa.classification is not Stability.SADDLE:
        raise AssumptionError("rest point is not a saddle", ["(A2)"])
    v = sa.eigenvector("stable")
    if (v[0] > 0) == (side == BELOW):
        v = -v
    y0 = np.array([sa.p_star, sa.q_star]) + eps * v
    if dt is None:
        dt = 0.05 / sa.unstable_eigenvalue
    forward = _field(params, cost)

    def backward(y):
        return -forward(y)

    def far_enough(ys):
        far_enough.length += float(np.linalg.norm(ys[-1] - ys[-2]))
        return far_enough.length >= arc_length

    far_enough.length = 0.0
    max_steps = int(200 / (abs(sa.stable_eigenvalue) * dt)) + 10
    t, y, halted = _march(backward, y0, dt, max_steps, far_enough)
    return Trajectory(t, y[:, 0], y[:, 1], dt, "rk4-reversed", halted, {"eps": eps})


def closest_approach(
    params: GameParams, cost: CostFunction, start: PhasePoint, t_end: float, dt: float
) -> float:
    """Smallest distance to the interior rest point along a forward orbit.

    The orbit is abandoned once it has moved ten times farther out than
    its closest approach so far.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    fp = interior_equilibrium(params, cost)
    centre = np.array([fp.p_star, fp.q_star])
    best = [float(np.hypot(start.p - fp.p_star, start.q - fp.q_star))]

    def receding(ys):
        d = float(np.linalg.norm(ys[-1] - centre))
        best[0] = min(best[0], d)
        return d > 10 * best[0] and d > 1e-3

    _march(_field(params, cost), [start.p, start.q], dt, n_steps(t_end, dt), receding)
    return best[0]
