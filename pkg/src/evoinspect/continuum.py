"""Inspection with a continuous crime level l in [0, l_m].

The fine is proportional to the crime, f = sigma*l. Equilibria only pin
down the mean crime level, so any distribution with the right mean is an
equilibrium. Distributions are carried as weights on ``B`` equally spaced
atoms spanning [0, l_m], both ends included.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import A4, AssumptionError, CostFunction, check_cost

DEFAULT_BINS = 256
FEASIBILITY = "L* <= l_m"


class InfeasibleEquilibriumError(AssumptionError):
    """The equilibrium mean crime level exceeds the maximum crime level."""


@dataclass(frozen=True)
class ContinuumParams:
    c: float
    sigma: float
    l_m: float
    lam: float
    r: float = 1.0
    N: int = 1000

    def __post_init__(self):
        bad = []
        if not self.c > 0:
            bad.append("c > 0")
        if not 0 < self.sigma < 1:
            bad.append("sigma in (0,1)")
        if not self.l_m > 0:
            bad.append("l_m > 0")
        if not 0 < self.lam < 1:
            bad.append("lambda in (0,1)")
        if not self.r > 0:
            bad.append("r > 0")
        if not self.N >= 2:
            bad.append("N >= 2")
        if bad:
            raise AssumptionError(f"invalid continuum parameters: {', '.join(bad)}", bad)
        k = self.lam * (self.sigma + 1)
        if not (self.l_m > self.c / k and k > 1):
            raise AssumptionError(
                f"{A4} requires l_m > c/(lambda(sigma+1)) = {self.c / k:g} and "
                f"lambda(sigma+1) = {k:g} > 1",
                [A4],
            )

    @property
    def detection(self) -> float:
        """lambda*(sigma+1), the expected loss per unit crime under inspection."""
        return self.lam * (self.sigma + 1)


def single_equilibrium(cp: ContinuumParams) -> tuple[float, float]:
    """(l*, q*) for one individual facing one inspector."""
    return cp.c / cp.detection, 1.0 / cp.detection


def individual_expected_payoff(cp: ContinuumParams, l, q):
    """E[U_I(l, q)] = r + (1 - lam*q)*l - lam*q*sigma*l."""
    return cp.r + (1 - cp.lam * q) * l - cp.lam * q * cp.sigma * l


def individual_payoff_slope(cp: ContinuumParams, q: float) -> float:
    if not 0 <= q <= 1:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    return 1 - cp.lam * q * (cp.sigma + 1)


def inspector_payoffs(cp: ContinuumParams, mean_crime: float) -> tuple[float, float]:
    """Single-individual game: expected payoffs of (Inspect, Not inspect)."""
    inspect = -cp.c + (cp.lam * cp.sigma - (1 - cp.lam)) * mean_crime
    return inspect, -mean_crime


def population_inspector_payoff(cp: ContinuumParams, cost: CostFunction, q, mean_crime: float):
    n, lam = cp.N, cp.lam
    return -cost.value(q) + lam * q * n * cp.sigma * mean_crime - (1 - lam * q) * n * mean_crime


def _require_convex(cost: CostFunction) -> None:
    # the F' bound of the binary game has no counterpart here
    rep = check_cost(cost, math.inf)
    rep.raise_if_failed("cost function")


def population_equilibrium(cp: ContinuumParams, cost: CostFunction) -> tuple[float, float]:
    """(L*, q*) for a population of N individuals.

    Raises InfeasibleEquilibriumError when L* > l_m, since no distribution
    on [0, l_m] can have that mean.
    """
    _require_convex(cost)
    q_star = 1.0 / cp.detection
    l_star = float(cost.d1(q_star)) / (cp.N * cp.detection)
    if l_star > cp.l_m:
        raise InfeasibleEquilibriumError(
            f"infeasible equilibrium: L*={l_star:g} exceeds l_m={cp.l_m:g}", [FEASIBILITY]
        )
    return l_star, q_star


def foc_residual(cp: ContinuumParams, cost: CostFunction, mean_crime: float) -> float:
    """F'(q*) - N*lam*(sigma+1)*mean, zero at the population equilibrium."""
    return float(cost.d1(1.0 / cp.detection)) - cp.N * cp.detection * mean_crime


# ----------------------------------------------------------------------
# distributions
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class CrimeDistribution:
    """Weights on the atoms linspace(0, l_m, B)."""

    weights: np.ndarray
    l_m: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or len(w) < 2:
            raise ValueError("weights must be a 1-d array with at least 2 entries")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {w.sum()!r}")
        if not self.l_m > 0:
            raise ValueError("l_m must be positive")
        object.__setattr__(self, "weights", w)

    @property
    def bins(self) -> int:
        return len(self.weights)

    @property
    def support(self) -> np.ndarray:
        return np.linspace(0.0, self.l_m, self.bins)

    @property
    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Cell around each atom, clipped to [0, l_m]; end cells are half width."""
        x = self.support
        h = self.l_m / (self.bins - 1)
        return np.maximum(x - h / 2, 0.0), np.minimum(x + h / 2, self.l_m)

    @property
    def mean(self) -> float:
        return float(min(max(self.weights @ self.support, 0.0), self.l_m))

    @classmethod
    def point_mass(cls, at: float, l_m: float, bins: int = DEFAULT_BINS) -> "CrimeDistribution":
        """Mass on the atom nearest to ``at``."""
        w = np.zeros(bins)
        w[int(round(at / l_m * (bins - 1)))] = 1.0
        return cls(w, l_m)

    @classmethod
    def two_point(cls, mean: float, l_m: float, bins: int = DEFAULT_BINS) -> "CrimeDistribution":
        """Mass on 0 and l_m with the given mean."""
        if not 0 <= mean <= l_m:
            raise ValueError(f"mean {mean} outside [0, {l_m}]")
        w = np.zeros(bins)
        w[-1] = mean / l_m
        w[0] = 1.0 - w[-1]
        return cls(w, l_m)

    @classmethod
    def uniform(cls, l_m: float, bins: int = DEFAULT_BINS) -> "CrimeDistribution":
        return cls(np.full(bins, 1.0 / bins), l_m)


@dataclass(frozen=True)
class DistributionCheck:
    ok: bool
    mean_gap: float
    foc_residual: float | None = None

    def __bool__(self):
        return self.ok


def verify_equilibrium_distribution(
    dist: CrimeDistribution,
    target_mean: float,
    tol: float,
    cp: ContinuumParams | None = None,
    cost: CostFunction | None = None,
) -> DistributionCheck:
    """Does ``dist`` have the equilibrium mean? The FOC residual needs ``cp`` and ``cost``."""
    gap = abs(dist.mean - target_mean)
    res = foc_residual(cp, cost, dist.mean) if cp is not None and cost is not None else None
    return DistributionCheck(gap <= tol, gap, res)


def _blend_to_mean(w: np.ndarray, x: np.ndarray, target: float) -> np.ndarray:
    """Convex blend of ``w`` with a point mass at 0 or l_m, with mean ``target``."""
    mu = float(w @ x)
    out = w.copy()
    if mu > target:
        t = target / mu
        out *= t
        out[0] += 1 - t
    elif mu < target:
        t = (x[-1] - target) / (x[-1] - mu)
        out *= t
        out[-1] += 1 - t
    return out / out.sum()


def sample_equilibrium_distributions(
    cp: ContinuumParams,
    cost: CostFunction | None,
    count: int,
    seed: int,
    bins: int = DEFAULT_BINS,
) -> list[CrimeDistribution]:
    """Random crime distributions with the equilibrium mean.

    The target is L* of the population game, or l* of the single-individual
    game when ``cost`` is None. Each sample draws flat Dirichlet weights and
    then blends them with a point mass at an end of [0, l_m] to hit the
    target mean.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    if bins < 2:
        raise ValueError("bins must be >= 2")
    target = single_equilibrium(cp)[0] if cost is None else population_equilibrium(cp, cost)[0]
    rng = np.random.default_rng(seed)
    x = np.linspace(0.0, cp.l_m, bins)
    out = []
    for _ in range(count):
        w = rng.dirichlet(np.ones(bins))
        out.append(CrimeDistribution(_blend_to_mean(w, x, target), cp.l_m))
    return out
