from types import SimpleNamespace

import numpy as np
import pytest

from evoinspect.canonical import (
    TABLE_1,
    Bimatrix2x2,
    build_bimatrix,
    expected_payoffs,
    max_regret,
    mixed_equilibrium_oracle,
    nash_equilibrium,
    regret_grid,
)
from evoinspect.core import A1, RESTRICTION_1, AssumptionError, MixedProfile

from .helpers import random_params
from .oracles import mixed_equilibrium_2x2


def test_closed_form_clean(clean):
    prof = nash_equilibrium(clean)
    assert (prof.p, prof.q) == (0.25, 0.5)


def test_closed_form_matches_indifference_oracle(clean):
    a, b = build_bimatrix(clean).arrays()
    p, q = mixed_equilibrium_2x2(a, b)
    prof = nash_equilibrium(clean)
    assert abs(prof.p - p) < 1e-14 and abs(prof.q - q) < 1e-14


def test_table_1_equilibrium():
    a, b = TABLE_1.arrays()
    p, q = mixed_equilibrium_2x2(a, b)
    assert (p, q) == pytest.approx((0.25, 2 / 3))
    prof = mixed_equilibrium_oracle(TABLE_1, 1000)
    assert abs(prof.p - p) <= 2e-3 and abs(prof.q - q) <= 2e-3


def test_table_1_layout():
    a, b = TABLE_1.arrays()
    np.testing.assert_array_equal(a, [[-1, 2], [0, 0]])
    np.testing.assert_array_equal(b, [[1, -2], [-1, 0]])


def test_oracle_clean(clean):
    prof = mixed_equilibrium_oracle(build_bimatrix(clean), 1000)
    assert abs(prof.p - 0.25) <= 2e-3 and abs(prof.q - 0.5) <= 2e-3


def test_oracle_random_sets():
    rng = np.random.default_rng(11)
    res = 1000
    for _ in range(50):
        params = random_params(rng)
        exact = nash_equilibrium(params)
        prof = mixed_equilibrium_oracle(build_bimatrix(params), res)
        assert abs(prof.p - exact.p) <= 2 / res
        assert abs(prof.q - exact.q) <= 2 / res


def test_oracle_rejects_coarse_grid():
    with pytest.raises(ValueError):
        mixed_equilibrium_oracle(TABLE_1, 50)


def test_oracle_tie_break_is_lexicographic():
    # every profile has zero regret in a game with constant payoffs
    flat = Bimatrix2x2((0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0))
    prof = mixed_equilibrium_oracle(flat, 100)
    assert (prof.p, prof.q) == (0.0, 0.0)


def test_indifference_at_equilibrium():
    rng = np.random.default_rng(3)
    for _ in range(20):
        params = random_params(rng)
        bm = build_bimatrix(params)
        a, b = bm.arrays()
        prof = nash_equilibrium(params)
        # individual: Violate vs Comply against q*
        v = prof.q * a[0, 0] + (1 - prof.q) * a[0, 1]
        c = prof.q * a[1, 0] + (1 - prof.q) * a[1, 1]
        assert abs(v - c) < 1e-12
        # inspector: Inspect vs Not inspect against p*
        i = prof.p * b[0, 0] + (1 - prof.p) * b[1, 0]
        n = prof.p * b[0, 1] + (1 - prof.p) * b[1, 1]
        assert abs(i - n) < 1e-12
        assert max_regret(bm, prof) < 1e-12


def test_no_pure_equilibrium():
    rng = np.random.default_rng(4)
    for _ in range(20):
        bm = build_bimatrix(random_params(rng))
        for p in (0.0, 1.0):
            for q in (0.0, 1.0):
                assert max_regret(bm, MixedProfile(p, q)) > 0


def test_expected_payoffs_bilinear(clean):
    bm = build_bimatrix(clean)
    # pure cells come back unchanged
    assert expected_payoffs(bm, MixedProfile(1.0, 1.0)) == pytest.approx(bm.vi)
    assert expected_payoffs(bm, MixedProfile(0.0, 0.0)) == pytest.approx(bm.cn)
    ind, _ = expected_payoffs(bm, nash_equilibrium(clean))
    assert ind == pytest.approx(clean.r)


def test_regret_grid_shape_and_sign(clean):
    s, reg = regret_grid(build_bimatrix(clean), 200)
    assert reg.shape == (201, 201)
    assert np.all(reg >= -1e-12)
    assert s[0] == 0.0 and s[-1] == 1.0


def test_assumption_errors_name_the_restriction():
    base = dict(r=1.0, l=2.0, f=3.0, c=10.0, lam=0.8)
    with pytest.raises(AssumptionError) as err:
        nash_equilibrium(SimpleNamespace(**base))
    assert err.value.constraints == [RESTRICTION_1]
    with pytest.raises(AssumptionError) as err:
        nash_equilibrium(SimpleNamespace(**dict(base, c=0.1, lam=0.2, f=1.0)))
    assert A1 in err.value.constraints


def test_bimatrix_rejects_nonfinite():
    with pytest.raises(ValueError):
        Bimatrix2x2((np.nan, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0))


def test_dominance_solvable_game_gives_pure_profile():
    # NotInspect strictly better in both rows; Violate then best
    bm = Bimatrix2x2(vi=(-1.0, -1.0), vn=(2.0, 0.0), ci=(0.0, -1.0), cn=(0.0, 0.0))
    prof = mixed_equilibrium_oracle(bm, 100)
    assert (prof.p, prof.q) == (1.0, 0.0)


@pytest.mark.parametrize("res", [100, 333, 1000])
def test_oracle_within_one_cell(clean, res):
    for bm, (p, q) in ((TABLE_1, (0.25, 2 / 3)), (build_bimatrix(clean), (0.25, 0.5))):
        prof = mixed_equilibrium_oracle(bm, res)
        assert abs(prof.p - p) <= 1 / res and abs(prof.q - q) <= 1 / res


def test_supported_gains_vanish_only_at_equilibrium(clean):
    from evoinspect.canonical import supported_regret_grid

    s, g1, g2 = supported_regret_grid(build_bimatrix(clean), 100)
    worst = np.maximum(g1, g2)
    i, j = np.unravel_index(np.argmin(worst), worst.shape)
    assert worst[i, j] < 1e-12
    assert (s[i], s[j]) == (0.25, 0.5)
    assert np.count_nonzero(worst < 1e-12) == 1
