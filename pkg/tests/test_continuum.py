import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evoinspect import continuum as cm
from evoinspect.core import A4, AssumptionError, CostFunction, QuadraticCost

EX = dict(c=1.0, sigma=0.5, l_m=2.0, lam=0.8)


@pytest.fixture
def cp():
    return cm.ContinuumParams(**EX)


def test_single_equilibrium_example(cp):
    l_star, q_star = cm.single_equilibrium(cp)
    assert abs(l_star - 1 / 1.2) < 1e-12 and abs(q_star - 1 / 1.2) < 1e-12
    assert 0 < q_star < 1 and 0 < l_star < cp.l_m


def test_single_equilibrium_limit():
    _, q = cm.single_equilibrium(cm.ContinuumParams(c=0.1, sigma=1 - 1e-9, l_m=2.0, lam=1 - 1e-9))
    assert q == pytest.approx(0.5, abs=1e-8)


@pytest.mark.parametrize("change", [dict(lam=0.6), dict(l_m=0.8), dict(sigma=1.0), dict(c=0.0)])
def test_a4_and_range_rejections(change):
    with pytest.raises(AssumptionError) as err:
        cm.ContinuumParams(**dict(EX, **change))
    if "lam" in change or "l_m" in change:
        assert err.value.constraints == [A4]


def test_payoff_slope_examples(cp):
    _, q_star = cm.single_equilibrium(cp)
    assert abs(cm.individual_payoff_slope(cp, q_star)) < 1e-15
    assert cm.individual_payoff_slope(cp, 0.0) == 1.0
    assert cm.individual_payoff_slope(cp, 0.5) == pytest.approx(0.4, abs=1e-15)
    with pytest.raises(ValueError):
        cm.individual_payoff_slope(cp, 1.5)


def test_individual_indifference_on_a_grid(cp):
    _, q_star = cm.single_equilibrium(cp)
    l = np.linspace(0, cp.l_m, 100)
    u = cm.individual_expected_payoff(cp, l, q_star)
    assert np.ptp(u) < 1e-12
    # slope matches finite differences away from q*
    u2 = cm.individual_expected_payoff(cp, l, 0.3)
    np.testing.assert_allclose(np.diff(u2) / np.diff(l), cm.individual_payoff_slope(cp, 0.3), rtol=1e-10)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_inspector_indifference_any_distribution(seed):
    rng = np.random.default_rng(seed)
    cp = cm.ContinuumParams(c=rng.uniform(0.1, 1.0), sigma=rng.uniform(0.4, 0.95), l_m=3.0, lam=rng.uniform(0.75, 0.99))
    (dist,) = cm.sample_equilibrium_distributions(cp, None, 1, seed, bins=64)
    inspect, idle = cm.inspector_payoffs(cp, dist.mean)
    assert abs(inspect - idle) < 1e-12


def test_binary_game_consistency():
    rng = np.random.default_rng(51)
    for _ in range(20):
        l = rng.uniform(1.0, 4.0)
        f = l * rng.uniform(0.3, 0.95)
        lam = rng.uniform(1 / (1 + f / l) + 0.01, 0.99)
        cp = cm.ContinuumParams(c=0.1, sigma=f / l, l_m=10.0, lam=lam)
        q_bin = l / (lam * (l + f))
        assert abs(cm.individual_payoff_slope(cp, q_bin)) < 1e-12
        assert cm.single_equilibrium(cp)[1] == pytest.approx(q_bin, rel=1e-14)


# ----------------------------------------------------------------------
# population game
# ----------------------------------------------------------------------


def test_population_equilibrium_example(cp):
    L, q = cm.population_equilibrium(cp, QuadraticCost(500.0))
    assert abs(L - 1000 * (1 / 1.2) / 1200) < 1e-9
    assert L == pytest.approx(0.694444, abs=1e-6)
    assert q == cm.single_equilibrium(cp)[1]


def test_population_infeasible(cp):
    with pytest.raises(cm.InfeasibleEquilibriumError) as err:
        cm.population_equilibrium(cp, QuadraticCost(2000.0))
    assert err.value.constraints == [cm.FEASIBILITY]
    assert isinstance(err.value, AssumptionError)


def test_population_rejects_concave_cost(cp):
    class Concave(CostFunction):
        def value(self, q):
            return np.sqrt(q + 1) - 1

        def d1(self, q):
            return 0.5 / np.sqrt(q + 1)

        def d2(self, q):
            return -0.25 * (q + 1) ** -1.5

    with pytest.raises(AssumptionError):
        cm.population_equilibrium(cp, Concave())


def test_L_star_increases_with_alpha(cp):
    alphas = np.linspace(50, 1400, 40)
    L = [cm.population_equilibrium(cp, QuadraticCost(a))[0] for a in alphas]
    assert np.all(np.diff(L) > 0)


def test_population_foc_maximises_inspector_payoff(cp):
    cost = QuadraticCost(500.0)
    L, q_star = cm.population_equilibrium(cp, cost)
    q = np.linspace(0, 1, 100_001)
    u = cm.population_inspector_payoff(cp, cost, q, L)
    assert abs(q[np.argmax(u)] - q_star) <= 1e-5
    assert abs(cm.foc_residual(cp, cost, L)) < 1e-9


# ----------------------------------------------------------------------
# distributions
# ----------------------------------------------------------------------


def test_distribution_invariants():
    with pytest.raises(ValueError):
        cm.CrimeDistribution(np.array([0.5, 0.6]), 1.0)
    with pytest.raises(ValueError):
        cm.CrimeDistribution(np.array([1.5, -0.5]), 1.0)
    d = cm.CrimeDistribution.uniform(2.0, 5)
    lo, hi = d.edges
    assert lo[0] == 0.0 and hi[-1] == 2.0
    np.testing.assert_allclose(d.support, [0, 0.5, 1, 1.5, 2])
    assert d.mean == pytest.approx(1.0)


def test_verification_examples(cp):
    cost = QuadraticCost(500.0)
    L, _ = cm.population_equilibrium(cp, cost)
    # atoms sit at l_m*i/(B-1), so a point mass only approximates L*
    pm = cm.CrimeDistribution.point_mass(L, cp.l_m, 3601)
    assert cm.verify_equilibrium_distribution(pm, L, 1e-3, cp, cost).ok
    tp = cm.CrimeDistribution.two_point(L, cp.l_m)
    chk = cm.verify_equilibrium_distribution(tp, L, 1e-12, cp, cost)
    assert chk and abs(chk.foc_residual) < 1e-9
    assert not cm.verify_equilibrium_distribution(cm.CrimeDistribution.uniform(cp.l_m), L, 1e-9)


def test_point_mass_on_an_atom():
    d = cm.CrimeDistribution.point_mass(1.5, 2.0, 5)
    chk = cm.verify_equilibrium_distribution(d, 1.5, 0.0)
    assert chk.ok and chk.mean_gap == 0.0 and chk.foc_residual is None


def test_sampled_distributions_pass(cp):
    cost = QuadraticCost(500.0)
    L, _ = cm.population_equilibrium(cp, cost)
    dists = cm.sample_equilibrium_distributions(cp, cost, 20, 7)
    assert len(dists) == 20
    for d in dists:
        assert d.bins == cm.DEFAULT_BINS
        chk = cm.verify_equilibrium_distribution(d, L, 1e-9, cp, cost)
        assert chk.ok
        assert abs(chk.foc_residual) < 1e-6
    # distinct patterns of crime with the same mean
    assert np.ptp([d.weights[5] for d in dists]) > 0


def test_sampling_is_seeded(cp):
    a = cm.sample_equilibrium_distributions(cp, None, 3, 11)
    b = cm.sample_equilibrium_distributions(cp, None, 3, 11)
    c = cm.sample_equilibrium_distributions(cp, None, 3, 12)
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x.weights, y.weights)
    assert not np.array_equal(a[0].weights, c[0].weights)


def test_sampling_at_the_upper_bound():
    cp = cm.ContinuumParams(**EX)
    # alpha chosen so that L* = l_m exactly
    alpha = cp.l_m * cp.N * cp.detection / (2 / cp.detection)
    dists = cm.sample_equilibrium_distributions(cp, QuadraticCost(alpha), 3, 1, bins=16)
    for d in dists:
        assert d.weights[-1] == pytest.approx(1.0, abs=1e-12)
        assert abs(d.mean - cp.l_m) <= 1e-9


def test_sampling_infeasible_raises(cp):
    with pytest.raises(cm.InfeasibleEquilibriumError):
        cm.sample_equilibrium_distributions(cp, QuadraticCost(2000.0), 5, 0)
