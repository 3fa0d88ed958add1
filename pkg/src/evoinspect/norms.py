"""Replicator dynamics with a social-norm disutility on violating.

With norm g the crime rate follows

    dp/dt = omega*beta * p*(1-p) * (W(p) - g(p)),   W(p) = l - lam*q_hat(p)*(l+f)

and interior rest points solve W(p) = g(p). A sigmoid g can cross the
decreasing W several times, which gives coexisting stable crime rates
and hysteresis when the fine f is swept up and down.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._ode import rk4_step
from .core import (
    AssumptionError,
    CostFunction,
    GameParams,
    IntegrationError,
    NormFunction,
    QuadraticCost,
    check_cost,
    require_cost,
)
from .dynamics import ESCAPE_TOL, FixedPoint, Stability

DEGENERATE_SLOPE = 1e-8
FD_STEP = 1e-6

INCREASING = "increasing"
DECREASING = "decreasing"


@dataclass(frozen=True)
class _Model:
    """Everything the norm dynamics need at one value of the fine."""

    l: float
    lam: float
    f: float
    kappa: float
    gain: float
    cost: CostFunction
    norm: NormFunction

    @classmethod
    def of(cls, params: GameParams, cost: CostFunction, norm: NormFunction, f: float | None = None):
        f = params.f if f is None else f
        gain = params.N * params.lam * (params.l + f)
        return cls(params.l, params.lam, f, params.kappa, gain, cost, norm)

    def q_hat(self, p):
        return self.cost.marginal_inverse(self.gain * p)

    def W(self, p):
        return self.l - self.lam * self.q_hat(p) * (self.l + self.f)

    def D(self, p):
        return self.W(p) - self.norm.g(p)

    def rhs(self, p):
        return self.kappa * p * (1 - p) * self.D(p)


@dataclass(frozen=True)
class EquilibriumSet:
    """Rest points of the norm dynamics sorted by p, boundaries included."""

    points: tuple[FixedPoint, ...]

    @property
    def interior(self) -> list[FixedPoint]:
        return [fp for fp in self.points if 0.0 < fp.p_star < 1.0]

    @property
    def stable(self) -> list[FixedPoint]:
        return [fp for fp in self.points if fp.classification is Stability.STABLE]

    def pattern(self) -> list[str]:
        return [fp.classification.value for fp in self.interior]

    def __len__(self):
        return len(self.points)


def W(params: GameParams, cost: CostFunction, p):
    """Net criminal advantage l - lam*q_hat(p)*(l+f) before the norm."""
    return _Model.of(params, cost, NormFunction()).W(p)


def norm_replicator_rhs(params: GameParams, cost: CostFunction, norm: NormFunction, p):
    return _Model.of(params, cost, norm).rhs(p)


def _bisect_sign_change(func, a: float, b: float, tol: float) -> float:
    fa = func(a)
    while b - a > tol:
        mid = 0.5 * (a + b)
        fm = func(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (fa > 0):
            a, fa = mid, fm
        else:
            b = mid
    return 0.5 * (a + b)


def _interior_roots(model: _Model, scan_points: int, tol: float) -> list[float]:
    grid = np.linspace(0.0, 1.0, scan_points + 1)
    d = np.asarray(model.D(grid), dtype=float)
    sign = np.sign(d)
    roots = []
    for i in range(1, scan_points):
        if sign[i] == 0.0:
            roots.append(float(grid[i]))
    for i in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
        a, b = float(grid[i]), float(grid[i + 1])
        roots.append(_bisect_sign_change(lambda x: float(model.D(x)), a, b, tol))
    return sorted(r for r in roots if 0.0 < r < 1.0)


def _equilibria(model: _Model, scan_points: int, tol: float = 1e-12) -> EquilibriumSet:
    k = model.kappa
    points = []
    d0 = k * float(model.D(0.0))
    points.append(FixedPoint(0.0, float(model.q_hat(0.0)), Stability.from_derivative(d0), d0))
    for r in _interior_roots(model, scan_points, tol):
        slope = (float(model.D(r + FD_STEP)) - float(model.D(r - FD_STEP))) / (2 * FD_STEP)
        cls = Stability.from_derivative(slope, DEGENERATE_SLOPE)
        djdp = k * r * (1 - r) * slope
        points.append(FixedPoint(r, float(model.q_hat(r)), cls, djdp))
    d1 = -k * float(model.D(1.0))
    points.append(FixedPoint(1.0, float(model.q_hat(1.0)), Stability.from_derivative(d1), d1))
    return EquilibriumSet(tuple(points))


def find_equilibria(
    params: GameParams, cost: CostFunction, norm: NormFunction, scan_points: int = 10_000
) -> EquilibriumSet:
    """All rest points of the norm dynamics by grid scan plus bisection.

    Interior roots of D = W - g are classified by the sign of a central
    difference of D; slopes below 1e-8 in magnitude are reported as
    Degenerate. Boundary points carry the exact derivative of the full
    right-hand side, which is positive at both ends when (A1) and (A3)
    hold.
    """
    if scan_points < 1000:
        raise ValueError(f"scan_points must be >= 1000, got {scan_points}")
    require_cost(cost, params)
    if norm.m >= params.l:
        raise AssumptionError(f"(A3): g(0)={norm.m} must be < l={params.l}", ["(A3)"])
    return _equilibria(_Model.of(params, cost, norm), scan_points)


# ----------------------------------------------------------------------
# integration
# ----------------------------------------------------------------------


def flow_many(rhs, p0, t_end: float, dt: float) -> np.ndarray:
    """RK4 end states for an array of initial crime rates."""
    x = np.array(p0, dtype=float)
    for _ in range(int(round(t_end / dt))):
        x = rk4_step(rhs, x, dt)
        if np.any(x < -ESCAPE_TOL) or np.any(x > 1 + ESCAPE_TOL):
            raise IntegrationError("norm dynamics left [0, 1]")
        np.clip(x, 0.0, 1.0, out=x)
    return x


def _settle(model: _Model, p0: float, targets: Sequence[float], dt: float, max_time: float = 1e7) -> float:
    """Integrate from ``p0`` until the state sits on one of ``targets``."""
    x = float(p0)
    t = 0.0
    chunk = 1000
    while t < max_time:
        for _ in range(chunk):
            x = min(max(rk4_step(model.rhs, x, dt), 0.0), 1.0)
        t += chunk * dt
        nearest = min(targets, key=lambda r: abs(r - x))
        if abs(nearest - x) < 1e-6:
            return nearest
    raise IntegrationError(f"no stable state reached from p={p0} at f={model.f}")


# ----------------------------------------------------------------------
# bifurcation in the fine
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class BranchPoint:
    f: float
    p_star: float
    stability: Stability
    jump: bool = False


@dataclass(frozen=True)
class BifurcationBranch:
    direction: str
    points: tuple[BranchPoint, ...]

    def __post_init__(self):
        f = np.array([pt.f for pt in self.points])
        steps = np.diff(f)
        if self.direction == INCREASING and np.any(steps <= 0):
            raise ValueError("increasing branch needs strictly increasing f")
        if self.direction == DECREASING and np.any(steps >= 0):
            raise ValueError("decreasing branch needs strictly decreasing f")

    @property
    def f(self) -> np.ndarray:
        return np.array([pt.f for pt in self.points])

    @property
    def p(self) -> np.ndarray:
        return np.array([pt.p_star for pt in self.points])

    @property
    def jumps(self) -> list[float]:
        """Fine values at which the followed state snapped to another branch."""
        return [pt.f for pt in self.points if pt.jump]


_FOLLOWABLE = (Stability.STABLE, Stability.DEGENERATE)


def linear_response_family(params: GameParams) -> Callable[[float], CostFunction]:
    """alpha(f) = N*lam*(l+f)/2, so that q_hat(p) = p at every fine."""
    return lambda f: QuadraticCost(params.N * params.lam * (params.l + f) / 2.0)


def fixed_alpha_family(alpha: float) -> Callable[[float], CostFunction]:
    cost = QuadraticCost(alpha)
    return lambda f: cost


def _basin(eqs: EquilibriumSet, idx: int) -> tuple[float, float]:
    pts = eqs.points
    lo = pts[idx - 1].p_star if idx > 0 else pts[idx].p_star
    hi = pts[idx + 1].p_star if idx + 1 < len(pts) else pts[idx].p_star
    return lo, hi


def bifurcation_sweep(
    params_base: GameParams,
    cost_family: Callable[[float], CostFunction],
    norm: NormFunction,
    f_values: Sequence[float],
    direction: str,
    *,
    p_init: float | None = None,
    scan_points: int = 10_000,
) -> BifurcationBranch:
    """Follow a stable crime rate while the fine moves through ``f_values``.

    The sweep starts from the stable state nearest ``p_init`` (by default
    full compliance for a decreasing sweep and full crime for an
    increasing one, i.e. the history each direction is meant to undo). At
    each new fine the state stays on its branch while a stable root is
    left inside the old basin of attraction; otherwise the branch has
    folded away, a jump is recorded and the state is whatever the norm
    dynamics reach from the old crime rate.

    Fines below the (A1) threshold are allowed: there the boundary p = 1
    is itself stable and can be the followed state.
    """
    f_values = [float(f) for f in f_values]
    if direction not in (INCREASING, DECREASING):
        raise ValueError(f"direction must be {INCREASING!r} or {DECREASING!r}")
    if p_init is None:
        p_init = 1.0 if direction == INCREASING else 0.0
    if norm.m >= params_base.l:
        raise AssumptionError(f"(A3): g(0)={norm.m} must be < l={params_base.l}", ["(A3)"])

    out: list[BranchPoint] = []
    prev_p = p_init
    prev_basin: tuple[float, float] | None = None
    for f in f_values:
        cost = cost_family(f)
        model = _Model.of(params_base, cost, norm, f)
        check_cost(cost, model.gain).raise_if_failed(f"cost function at f={f:g}")
        eqs = _equilibria(model, scan_points)
        # degenerate rest points (e.g. p = 1 exactly at the (A1) threshold) attract from one side
        stable_idx = [i for i, fp in enumerate(eqs.points) if fp.classification in _FOLLOWABLE]
        if not stable_idx:
            raise AssumptionError(f"no stable equilibrium at f={f:g}", ["stable root"])
        nearest = min(stable_idx, key=lambda i: abs(eqs.points[i].p_star - prev_p))
        jump = False
        if prev_basin is not None:
            lo, hi = prev_basin
            if not lo <= eqs.points[nearest].p_star <= hi:
                jump = True
                targets = [eqs.points[i].p_star for i in stable_idx]
                dt = 0.5 / (params_base.beta * (params_base.l + f))
                reached = _settle(model, prev_p, targets, dt)
                nearest = next(i for i in stable_idx if eqs.points[i].p_star == reached)
        fp = eqs.points[nearest]
        out.append(BranchPoint(f, fp.p_star, fp.classification, jump))
        prev_p = fp.p_star
        prev_basin = _basin(eqs, nearest)
    return BifurcationBranch(direction, tuple(out))


@dataclass(frozen=True)
class HysteresisReport:
    intervals: tuple[tuple[float, float, float], ...]  # (f_lo, f_hi, max gap inside)
    max_gap: float

    @property
    def empty(self) -> bool:
        return not self.intervals

    def contains(self, f: float) -> bool:
        return any(lo <= f <= hi for lo, hi, _ in self.intervals)


def detect_hysteresis(up: BifurcationBranch, down: BifurcationBranch, gap_tol: float) -> HysteresisReport:
    """Fine values where the two sweep directions disagree by more than ``gap_tol``."""
    fu, pu = up.f, up.p
    order = np.argsort(down.f)
    fd, pd = down.f[order], down.p[order]
    ou = np.argsort(fu)
    fu, pu = fu[ou], pu[ou]
    if fu.shape != fd.shape or not np.array_equal(fu, fd):
        raise ValueError("branches must share the same grid of fines")
    gap = np.abs(pu - pd)
    intervals = []
    start = None
    for i, g in enumerate(gap):
        if g > gap_tol and start is None:
            start = i
        if start is not None and (g <= gap_tol or i == len(gap) - 1):
            end = i if g > gap_tol else i - 1
            intervals.append((float(fu[start]), float(fu[end]), float(gap[start : end + 1].max())))
            start = None
    return HysteresisReport(tuple(intervals), float(gap.max()) if len(gap) else 0.0)
