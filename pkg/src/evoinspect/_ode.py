"""Fixed-step classical Runge-Kutta, scalar or vector state."""

from __future__ import annotations


def rk4_step(rhs, y, h):
    k1 = rhs(y)
    k2 = rhs(y + 0.5 * h * k1)
    k3 = rhs(y + 0.5 * h * k2)
    k4 = rhs(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def n_steps(t_end: float, dt: float) -> int:
    """Number of whole steps of size ``dt`` covering ``t_end``."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if t_end < 0:
        raise ValueError(f"t_end must be non-negative, got {t_end}")
    return int(round(t_end / dt))
