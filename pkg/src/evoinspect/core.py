"""Shared parameter records, cost and norm abstractions, and validity checks.

Everything here is immutable once built. ``GameParams`` refuses to exist
unless every model assumption holds; ``validate_params`` is the forgiving
counterpart that reports on arbitrary candidate values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np


class AssumptionError(ValueError):
    """A model assumption or precondition does not hold.

    ``constraints`` names every violated constraint, e.g. ``["(A1)"]``.
    """

    def __init__(self, message: str, constraints: Iterable[str] = ()):
        super().__init__(message)
        self.constraints = list(constraints)


class IntegrationError(RuntimeError):
    """A trajectory left the admissible region beyond roundoff."""


class ConfigError(ValueError):
    """A configuration file or override could not be parsed."""


# ----------------------------------------------------------------------
# validation
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class ConstraintCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[ConstraintCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> list[ConstraintCheck]:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> ConstraintCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def names(self) -> list[str]:
        return [c.name for c in self.checks]

    def raise_if_failed(self, what: str = "parameters") -> None:
        bad = self.failed()
        if bad:
            lines = "; ".join(f"{c.name}: {c.detail}" for c in bad)
            raise AssumptionError(f"invalid {what}: {lines}", [c.name for c in bad])


A1 = "(A1)"
RESTRICTION_1 = "restriction (1)"
A2_ZERO = "(A2) F(0)=0"
A2_CONVEX = "(A2) F''>0"
A2_POSITIVE = "(A2) F'>=0"
A2_BOUND = "(A2) bound"
A3 = "(A3)"
A4 = "(A4)"


def _get(values, key, default=None):
    if isinstance(values, Mapping):
        return values.get(key, default)
    attr = "lam" if key == "lambda" else key
    return getattr(values, attr, default)


def validate_params(values, cost: "CostFunction | None" = None) -> ValidationReport:
    """Report every named constraint for a candidate parameter set.

    ``values`` is either a ``GameParams`` or a mapping using the
    configuration keys (``lambda`` rather than ``lam``). Missing keys fail
    their positivity check. When ``cost`` is given its (A2) conditions are
    appended to the report.
    """
    r = _get(values, "r")
    l = _get(values, "l")
    f = _get(values, "f")
    c = _get(values, "c")
    lam = _get(values, "lambda")
    n = _get(values, "N")
    omega = _get(values, "omega")
    beta = _get(values, "beta")
    delta = _get(values, "delta")

    def pos(name, v):
        ok = v is not None and math.isfinite(v) and v > 0
        return ConstraintCheck(f"{name} > 0", ok, f"{name}={v}")

    checks = [pos("r", r), pos("l", l), pos("f", f), pos("c", c)]
    lam_ok = lam is not None and 0 < lam < 1
    checks.append(ConstraintCheck("lambda in (0,1)", lam_ok, f"lambda={lam}"))
    checks.append(ConstraintCheck("N >= 2", n is not None and n >= 2, f"N={n}"))
    checks.append(
        ConstraintCheck("omega in [0,1]", omega is not None and 0 <= omega <= 1, f"omega={omega}")
    )
    checks.append(pos("beta", beta))
    if delta is not None:
        checks.append(pos("delta", delta))

    numeric = all(v is not None for v in (l, f, c, lam))
    if numeric:
        lhs, rhs = (1 - lam) * l, lam * f
        checks.append(ConstraintCheck(A1, lhs < rhs, f"(1-lambda)*l={lhs:g} must be < lambda*f={rhs:g}"))
        gain = lam * (l + f)
        checks.append(
            ConstraintCheck(RESTRICTION_1, gain > c, f"lambda*(l+f)={gain:g} must be > c={c:g}")
        )
    else:
        checks.append(ConstraintCheck(A1, False, "missing l, f or lambda"))
        checks.append(ConstraintCheck(RESTRICTION_1, False, "missing l, f, c or lambda"))

    report = ValidationReport(tuple(checks))
    if cost is not None and report.ok:
        report = ValidationReport(report.checks + check_cost(cost, n * lam * (l + f)).checks)
    return report


# ----------------------------------------------------------------------
# parameters
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class GameParams:
    """Scalar model parameters.

    Units: r, l, f, c in currency; lam, omega dimensionless; beta per
    currency; delta per unit time (only the forward-looking inspector uses
    it).
    """

    r: float
    l: float
    f: float
    c: float
    lam: float
    N: int
    omega: float
    beta: float
    delta: float | None = None

    def __post_init__(self):
        validate_params(self).raise_if_failed()

    @property
    def kappa(self) -> float:
        """Imitation rate omega*beta."""
        return self.omega * self.beta

    @property
    def gain(self) -> float:
        """Marginal inspection value per unit crime rate, N*lambda*(l+f)."""
        return self.N * self.lam * (self.l + self.f)

    def check_step(self, dt: float) -> None:
        """Reject ``dt`` when the switching probability could exceed one."""
        if not dt > 0:
            raise AssumptionError(f"step size must be positive, got dt={dt}", ["dt > 0"])
        if self.beta * (self.l + self.f) * dt > 1:
            raise AssumptionError(
                f"beta*(l+f)*dt = {self.beta * (self.l + self.f) * dt:g} exceeds 1",
                ["beta*(l+f)*dt <= 1"],
            )

    def replace(self, **changes) -> "GameParams":
        kw = {k: getattr(self, k) for k in self.__dataclass_fields__}
        kw.update(changes)
        return GameParams(**kw)

    @classmethod
    def from_mapping(cls, values: Mapping[str, float]) -> "GameParams":
        kw = {k: values[k] for k in ("r", "l", "f", "c", "N", "omega", "beta")}
        kw["lam"] = values["lambda"]
        kw["N"] = int(kw["N"])
        kw["delta"] = values.get("delta")
        return cls(**kw)


@dataclass(frozen=True)
class MixedProfile:
    """Crime rate ``p`` and law-enforcement level ``q``."""

    p: float
    q: float

    def __post_init__(self):
        if not (0 <= self.p <= 1 and 0 <= self.q <= 1):
            raise ValueError(f"profile outside the unit square: ({self.p}, {self.q})")


# ----------------------------------------------------------------------
# cost functions
# ----------------------------------------------------------------------


def _bisect_increasing(func, target, lo=0.0, hi=1.0, tol=1e-12):
    """Vectorised bisection for ``func(x) = target`` with ``func`` increasing.

    Assumes ``func(lo) <= target <= func(hi)`` elementwise.
    """
    target = np.asarray(target, dtype=float)
    a = np.full(target.shape, lo, dtype=float)
    b = np.full(target.shape, hi, dtype=float)
    n_iter = max(1, math.ceil(math.log2((hi - lo) / tol)))
    for _ in range(n_iter):
        mid = 0.5 * (a + b)
        below = func(mid) < target
        a = np.where(below, mid, a)
        b = np.where(below, b, mid)
    out = 0.5 * (a + b)
    return out if out.ndim else float(out)


class CostFunction:
    """Enforcement cost F(q) on q in [0, 1] with its first two derivatives.

    Subclasses implement ``value``, ``d1`` and ``d2``; all three must accept
    floats and numpy arrays. ``marginal_inverse`` solves F'(q) = y by
    bisection and may be overridden with a closed form.
    """

    def value(self, q):
        raise NotImplementedError

    def d1(self, q):
        raise NotImplementedError

    def d2(self, q):
        raise NotImplementedError

    def marginal_inverse(self, y):
        """Return q in [0, 1] with F'(q) = y, clamped at the interval ends."""
        return CostFunction.bisect_marginal(self, y)

    def bisect_marginal(self, y, tol: float = 1e-12):
        y = np.asarray(y, dtype=float)
        lo, hi = self.d1(0.0), self.d1(1.0)
        inner = np.clip(y, lo, hi)
        q = np.asarray(_bisect_increasing(self.d1, inner, tol=tol))
        q = np.where(y <= lo, 0.0, np.where(y >= hi, 1.0, q))
        return q if q.ndim else float(q)


@dataclass(frozen=True)
class QuadraticCost(CostFunction):
    """F(q) = alpha * q**2."""

    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise AssumptionError(f"alpha must be positive, got {self.alpha}", ["alpha > 0"])

    def value(self, q):
        return self.alpha * np.square(q) if isinstance(q, np.ndarray) else self.alpha * q * q

    def d1(self, q):
        return 2.0 * self.alpha * q

    def d2(self, q):
        return 2.0 * self.alpha + 0.0 * q

    def marginal_inverse(self, y):
        if isinstance(y, np.ndarray):
            return np.clip(y / (2.0 * self.alpha), 0.0, 1.0)
        return min(max(y / (2.0 * self.alpha), 0.0), 1.0)

    @classmethod
    def linear_response(cls, params: GameParams) -> "QuadraticCost":
        """The cost with alpha = N*lambda*(l+f)/2, for which q_hat(p) = p."""
        return cls(params.gain / 2.0)


def check_cost(cost: CostFunction, gain: float, grid: int = 201) -> ValidationReport:
    """Check the (A2) conditions of ``cost`` on a uniform grid of [0, 1].

    ``gain`` is N*lambda*(l+f), the upper bound on F'.
    """
    q = np.linspace(0.0, 1.0, grid)
    d1 = np.asarray(cost.d1(q), dtype=float)
    d2 = np.asarray(cost.d2(q), dtype=float)
    f0 = float(cost.value(0.0))
    checks = (
        ConstraintCheck(A2_ZERO, f0 == 0.0, f"F(0)={f0:g}"),
        ConstraintCheck(A2_CONVEX, bool(np.all(d2 > 0)), f"min F''={d2.min():g}"),
        ConstraintCheck(
            A2_POSITIVE,
            bool(np.all(d1 >= 0) and np.all(d1[1:] > 0)),
            f"min F'={d1.min():g}",
        ),
        ConstraintCheck(
            A2_BOUND,
            bool(np.all(d1 <= gain * (1 + 1e-12))),
            f"max F'={d1.max():g} must be <= N*lambda*(l+f)={gain:g}",
        ),
    )
    return ValidationReport(checks)


def require_cost(cost: CostFunction, params: GameParams) -> None:
    check_cost(cost, params.gain).raise_if_failed("cost function")


# ----------------------------------------------------------------------
# social norms
# ----------------------------------------------------------------------


class NormFunction:
    """Social disutility g(p) of violating, decreasing in the crime rate.

    Subclasses expose ``m = g(0)``.
    """

    def g(self, p):
        raise NotImplementedError

    def dg(self, p):
        raise NotImplementedError


@dataclass(frozen=True)
class ZeroNorm(NormFunction):
    """g = 0: no social norm; reduces every norm model to the basic one."""

    m: float = 0.0

    def g(self, p):
        return 0.0 * p

    def dg(self, p):
        return 0.0 * p


@dataclass(frozen=True)
class SigmoidNorm(NormFunction):
    """Logistic disutility rescaled so that g(0) = m and g(1) = 0 exactly."""

    m: float
    k: float
    p_mid: float
    _s0: float = field(init=False, repr=False, compare=False)
    _s1: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        bad = []
        if not self.m > 0:
            bad.append(f"m={self.m} must be > 0")
        if not self.k > 0:
            bad.append(f"k={self.k} must be > 0")
        if not 0 < self.p_mid < 1:
            bad.append(f"p_mid={self.p_mid} must lie in (0,1)")
        if bad:
            raise AssumptionError("invalid norm: " + "; ".join(bad), [A3])
        object.__setattr__(self, "_s0", self._s(0.0))
        object.__setattr__(self, "_s1", self._s(1.0))

    def _x(self, p):
        return self.k * (np.asarray(p, dtype=float) - self.p_mid)

    def _s(self, p):
        # exp(-log(1 + e^x)) keeps relative precision deep in both tails
        return np.exp(-np.logaddexp(0.0, self._x(p)))

    def g(self, p):
        s = self._s(p)
        # ratio first so that s == s0 gives exactly m; the clip absorbs ulp wobble of exp near p = 1
        out = self.m * np.clip((s - self._s1) / (self._s0 - self._s1), 0.0, 1.0)
        # pin the endpoints exactly
        out = np.where(np.asarray(p) == 0.0, self.m, np.where(np.asarray(p) == 1.0, 0.0, out))
        return out if out.ndim else float(out)

    def dg(self, p):
        x = self._x(p)
        # s*(1-s) written as s(x)*s(-x)
        out = -self.m * self.k * np.exp(-np.logaddexp(0.0, x) - np.logaddexp(0.0, -x)) / (self._s0 - self._s1)
        return out if np.ndim(out) else float(out)


def norm_sigmoid(m: float, k: float, p_mid: float, params: GameParams | None = None) -> SigmoidNorm:
    """Build the endpoint-normalised logistic norm; with ``params`` also require m < l."""
    norm = SigmoidNorm(m, k, p_mid)
    if params is not None and not m < params.l:
        raise AssumptionError(f"(A3): m={m} must be < l={params.l}", [A3])
    return norm


# ----------------------------------------------------------------------
# configuration files
# ----------------------------------------------------------------------

CONFIG_KEYS = ("r", "l", "f", "c", "lambda", "N", "omega", "beta", "delta", "alpha", "m", "k", "p_mid")
OPTIONAL_KEYS = ("delta", "m", "k", "p_mid")


def parse_assignments(lines: Iterable[str], source: str = "<config>") -> dict[str, float]:
    """Parse ``key = value`` lines. ``#`` starts a comment."""
    values: dict[str, float] = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        try:
            values[key] = float(val)
        except ValueError:
            raise ConfigError(f"{source}:{lineno}: {key} is not a number: {val!r}") from None
    return values


def load_config(path, overrides: Iterable[str] = ()) -> dict[str, float]:
    """Read a configuration file and apply ``key=value`` overrides on top."""
    try:
        with open(path, encoding="utf-8") as fh:
            values = parse_assignments(fh, str(path))
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    values.update(parse_assignments(overrides, "<overrides>"))
    missing = [k for k in CONFIG_KEYS if k not in OPTIONAL_KEYS and k not in values]
    if missing:
        raise ConfigError(f"{path}: missing required keys: {', '.join(missing)}")
    n = values["N"]
    if n != int(n):
        raise ConfigError(f"{path}: N must be an integer, got {n}")
    return values
