"""Parameter samplers shared by the test modules."""

from evoinspect.core import AssumptionError, GameParams, QuadraticCost


def random_params(rng, delta=True, **fixed):
    """Random parameters satisfying (A1) and restriction (1)."""
    lam = rng.uniform(0.3, 0.95)
    l = rng.uniform(0.5, 4.0)
    f = (1 - lam) * l / lam * rng.uniform(1.05, 4.0) + rng.uniform(0.0, 1.0)
    c = lam * (l + f) * rng.uniform(0.05, 0.95)
    kw = dict(
        r=rng.uniform(0.5, 3.0),
        l=l,
        f=f,
        c=c,
        lam=lam,
        N=int(rng.integers(10, 5000)),
        omega=rng.uniform(0.1, 1.0),
        beta=rng.uniform(0.01, 0.2) / (l + f),
        delta=rng.uniform(0.02, 0.3) if delta else None,
    )
    kw.update(fixed)
    return GameParams(**kw)


def random_cost(rng, params):
    """Quadratic cost inside the (A2) bound."""
    return QuadraticCost(params.gain / 2 * rng.uniform(0.3, 1.0))


def near_clean_params(rng):
    """Clean parameters with each entry scaled by U(0.5, 2), redrawn until valid.

    Returns (params, cost) with alpha within [0.7, 1] of the (A2) limit.
    """
    clean = dict(r=1.0, l=2.0, f=3.0, c=1.0, N=1000, omega=0.5, beta=0.05, delta=0.1)
    while True:
        kw = {k: v * rng.uniform(0.5, 2.0) for k, v in clean.items()}
        kw.update(lam=rng.uniform(0.6, 0.95), N=int(kw["N"]), omega=min(1.0, kw["omega"]))
        kw["beta"] = min(kw["beta"], 0.9 / (kw["l"] + kw["f"]))
        try:
            params = GameParams(**kw)
        except AssumptionError:
            continue
        return params, QuadraticCost(params.gain / 2 * rng.uniform(0.7, 1.0))
