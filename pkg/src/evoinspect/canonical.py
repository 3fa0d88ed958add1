"""The one-shot two-player inspection game and its mixed equilibrium."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import A1, RESTRICTION_1, AssumptionError, GameParams, MixedProfile


@dataclass(frozen=True)
class Bimatrix2x2:
    """Payoff pairs (individual, inspector) for each strategy cell.

    Rows are Violate/Comply, columns Inspect/NotInspect.
    """

    vi: tuple[float, float]
    vn: tuple[float, float]
    ci: tuple[float, float]
    cn: tuple[float, float]

    def __post_init__(self):
        if not np.all(np.isfinite([self.vi, self.vn, self.ci, self.cn])):
            raise ValueError("bimatrix entries must be finite")

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Individual and inspector payoff matrices, rows (V, C), columns (I, N)."""
        cells = np.array([[self.vi, self.vn], [self.ci, self.cn]], dtype=float)
        return cells[..., 0], cells[..., 1]


TABLE_1 = Bimatrix2x2(vi=(-1.0, 1.0), vn=(2.0, -2.0), ci=(0.0, -1.0), cn=(0.0, 0.0))


def build_bimatrix(params: GameParams) -> Bimatrix2x2:
    r, l, f, c, lam = params.r, params.l, params.f, params.c, params.lam
    return Bimatrix2x2(
        vi=(r + (1 - lam) * l - lam * f, -c + lam * f - (1 - lam) * l),
        vn=(r + l, -l),
        ci=(r, -c),
        cn=(r, 0.0),
    )


def nash_equilibrium(params: GameParams) -> MixedProfile:
    """Closed-form mixed equilibrium p* = c/(lam(l+f)), q* = l/(lam(l+f))."""
    lam, l, f, c = params.lam, params.l, params.f, params.c
    bad = []
    if not lam * (l + f) > c:
        bad.append(RESTRICTION_1)
    if not lam * f > (1 - lam) * l:
        bad.append(A1)
    if bad:
        raise AssumptionError(f"no interior equilibrium: {', '.join(bad)} violated", bad)
    denom = lam * (l + f)
    return MixedProfile(c / denom, l / denom)


def expected_payoffs(bimatrix: Bimatrix2x2, profile: MixedProfile) -> tuple[float, float]:
    """Bilinear expected payoffs with p = P(Violate) and q = P(Inspect)."""
    a, b = bimatrix.arrays()
    x = np.array([profile.p, 1 - profile.p])
    y = np.array([profile.q, 1 - profile.q])
    return float(x @ a @ y), float(x @ b @ y)


def regret_grid(bimatrix: Bimatrix2x2, resolution: int) -> tuple[np.ndarray, np.ndarray]:
    """Best-response regret on the (resolution+1)^2 grid of [0,1]^2.

    Returns the grid axis and an array indexed ``[i_p, i_q]``.
    """
    a, b = bimatrix.arrays()
    s = np.linspace(0.0, 1.0, resolution + 1)
    # pure-strategy payoffs against the opponent's mix
    ind_v = s * a[0, 0] + (1 - s) * a[0, 1]  # function of q
    ind_c = s * a[1, 0] + (1 - s) * a[1, 1]
    ins_i = s * b[0, 0] + (1 - s) * b[1, 0]  # function of p
    ins_n = s * b[0, 1] + (1 - s) * b[1, 1]
    p = s[:, None]
    q = s[None, :]
    ind = p * ind_v[None, :] + (1 - p) * ind_c[None, :]
    ins = q * ins_i[:, None] + (1 - q) * ins_n[:, None]
    regret_ind = np.maximum(ind_v, ind_c)[None, :] - ind
    regret_ins = np.maximum(ins_i, ins_n)[:, None] - ins
    return s, np.maximum(regret_ind, regret_ins)


def max_regret(bimatrix: Bimatrix2x2, profile: MixedProfile) -> float:
    """Largest gain either player gets from a unilateral deviation."""
    a, b = bimatrix.arrays()
    p, q = profile.p, profile.q
    ind_v = q * a[0, 0] + (1 - q) * a[0, 1]
    ind_c = q * a[1, 0] + (1 - q) * a[1, 1]
    ins_i = p * b[0, 0] + (1 - p) * b[1, 0]
    ins_n = p * b[0, 1] + (1 - p) * b[1, 1]
    ind = p * ind_v + (1 - p) * ind_c
    ins = q * ins_i + (1 - q) * ins_n
    return float(max(max(ind_v, ind_c) - ind, max(ins_i, ins_n) - ins))


def supported_regret_grid(bimatrix: Bimatrix2x2, resolution: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Well-supported deviation gains on the (resolution+1)^2 grid.

    A player's gain is the payoff edge of the best pure strategy over the
    worst pure strategy in the support of its mix, so it is zero exactly
    when every strategy played is a best reply. Returns the axis and the
    individual's and inspector's gains, indexed ``[i_p, i_q]``.
    """
    a, b = bimatrix.arrays()
    s = np.linspace(0.0, 1.0, resolution + 1)
    gap_ind = (s * a[0, 0] + (1 - s) * a[0, 1]) - (s * a[1, 0] + (1 - s) * a[1, 1])  # V - C, function of q
    gap_ins = (s * b[0, 0] + (1 - s) * b[1, 0]) - (s * b[0, 1] + (1 - s) * b[1, 1])  # I - N, function of p

    def gain(gap, weight):
        # weight = probability on the first strategy (V or I)
        return np.where(weight == 1.0, np.maximum(-gap, 0.0), np.where(weight == 0.0, np.maximum(gap, 0.0), np.abs(gap)))

    g_ind = gain(gap_ind[None, :], s[:, None])
    g_ins = gain(gap_ins[:, None], s[None, :])
    return s, g_ind, g_ins


def mixed_equilibrium_oracle(bimatrix: Bimatrix2x2, resolution: int = 1000) -> MixedProfile:
    """Grid profile minimising the larger of the two well-supported deviation gains.

    Exact ties go to the smaller of the two gains, then to the
    lexicographically smallest (p, q).
    """
    if resolution < 100:
        raise ValueError(f"resolution must be >= 100, got {resolution}")
    s, g1, g2 = supported_regret_grid(bimatrix, resolution)
    worst = np.maximum(g1, g2).ravel()
    other = np.minimum(g1, g2).ravel()
    idx = np.arange(worst.size)
    k = int(np.lexsort((idx, other, worst))[0])
    i, j = np.unravel_index(k, g1.shape)
    return MixedProfile(float(s[i]), float(s[j]))
