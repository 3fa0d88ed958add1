"""Agent-based imitation dynamics, a finite-population check of the replicator limit.

Each period of length dt a fraction omega of the agents, drawn without
replacement, update. An updater meets one other agent chosen uniformly,
never itself. If the partner plays the other strategy and that strategy
earns strictly more at the current enforcement level, the updater copies
it with probability min(1, beta * payoff_gap * dt).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import CostFunction, GameParams
from .dynamics import Trajectory, best_response_q


@dataclass
class AgentPopulation:
    """Strategies (True = Violate) plus the generator that drives them."""

    violators: np.ndarray
    rng: np.random.Generator
    period: int = 0

    def __post_init__(self):
        self.violators = np.asarray(self.violators, dtype=bool)
        if self.violators.ndim != 1 or len(self.violators) < 2:
            raise ValueError("population needs at least 2 agents")

    @property
    def N(self) -> int:
        return len(self.violators)

    @property
    def count(self) -> int:
        return int(np.count_nonzero(self.violators))

    @property
    def fraction(self) -> float:
        return self.count / self.N


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def init_population(N: int, p0: float, seed) -> AgentPopulation:
    """Exactly round(N*p0) violators at seeded random positions."""
    if N < 2:
        raise ValueError(f"N must be >= 2, got {N}")
    if not 0 <= p0 <= 1:
        raise ValueError(f"p0 must lie in [0, 1], got {p0}")
    rng = _as_rng(seed)
    v = np.zeros(N, dtype=bool)
    v[rng.permutation(N)[: int(round(N * p0))]] = True
    return AgentPopulation(v, rng)


def payoff_gap(params: GameParams, q: float) -> float:
    """pi_V - pi_C at enforcement q."""
    return params.l - params.lam * q * (params.l + params.f)


def _updaters(params: GameParams, n: int) -> int:
    return int(round(params.omega * n))


def step(pop: AgentPopulation, params: GameParams, q: float, dt: float) -> AgentPopulation:
    """One synchronous imitation round; returns a new population sharing the generator."""
    params.check_step(dt)
    if not 0 <= q <= 1:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    n = pop.N
    rng = pop.rng
    k = _updaters(params, n)
    who = rng.choice(n, size=k, replace=False)
    partner = (who + rng.integers(1, n, size=k)) % n
    u = rng.random(k)
    gap = payoff_gap(params, q)
    new = pop.violators.copy()
    if gap != 0:
        prob = min(1.0, params.beta * abs(gap) * dt)
        mine, theirs = pop.violators[who], pop.violators[partner]
        # only the strictly better strategy spreads
        better = theirs if gap > 0 else ~theirs
        switch = (mine != theirs) & better & (u < prob)
        new[who[switch]] = theirs[switch]
    return AgentPopulation(new, rng, pop.period + 1)


def expected_drift(params: GameParams, p: float, q: float, dt: float, N: int) -> float:
    """Exact one-step expected change of the crime fraction at fraction p.

    Tends to omega*beta*p*(1-p)*(pi_V - pi_C)*dt for large N.
    """
    gap = payoff_gap(params, q)
    prob = min(1.0, params.beta * abs(gap) * dt)
    share = _updaters(params, N) / N
    meet = p * (1 - p) * N / (N - 1)
    return float(np.sign(gap)) * share * meet * prob


def drift_sample(pop: AgentPopulation, params: GameParams, q: float, dt: float, samples: int) -> np.ndarray:
    """Changes of the crime fraction over ``samples`` independent single steps from ``pop``."""
    base = pop.fraction
    return np.array([step(pop, params, q, dt).fraction - base for _ in range(samples)])


@dataclass(frozen=True)
class EnsembleResult:
    t: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    q_mean: np.ndarray
    replicates: int
    dt: float
    params: GameParams
    paths: np.ndarray = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        if np.any(self.std < 0):
            raise ValueError("std must be nonnegative")
        if np.any(self.mean < 0) or np.any(self.mean > 1):
            raise ValueError("ensemble means must lie in [0, 1]")


def run_ensemble(
    params: GameParams,
    cost: CostFunction,
    p0: float,
    t_end: float,
    dt: float,
    replicates: int,
    seed,
) -> EnsembleResult:
    """Independent seeded populations of size N against the myopic inspector.

    Replicate i uses ``SeedSequence(seed).spawn(replicates)[i]``. Each period
    the inspector plays q_hat of the realized crime fraction.
    """
    params.check_step(dt)
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    periods = int(round(t_end / dt))
    children = np.random.SeedSequence(seed).spawn(replicates)
    frac = np.empty((replicates, periods + 1))
    qs = np.empty((replicates, periods + 1))
    for i, child in enumerate(children):
        pop = init_population(params.N, p0, np.random.default_rng(child))
        for j in range(periods + 1):
            x = pop.fraction
            q = float(best_response_q(params, cost, x))
            frac[i, j], qs[i, j] = x, q
            if j < periods:
                pop = step(pop, params, q, dt)
    t = dt * np.arange(periods + 1)
    std = frac.std(axis=0) if replicates > 1 else np.zeros(periods + 1)
    return EnsembleResult(t, frac.mean(axis=0), std, qs.mean(axis=0), replicates, dt, params, frac)


@dataclass(frozen=True)
class MeanFieldGap:
    max_gap: float
    mean_gap: float
    terminal_gap: float


def compare_to_meanfield(ens: EnsembleResult, traj: Trajectory) -> MeanFieldGap:
    """|ensemble mean - ODE p| over the shared time grid."""
    if len(ens.t) != len(traj.t) or not np.allclose(ens.t, traj.t, rtol=0, atol=1e-9 * max(ens.dt, 1.0)):
        raise ValueError("ensemble and trajectory must share dt and horizon")
    gap = np.abs(ens.mean - traj.p)
    return MeanFieldGap(float(gap.max()), float(gap.mean()), float(gap[-1]))
