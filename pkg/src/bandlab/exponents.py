"""Exponent bookkeeping for the cluster-density bounds.

sigma(p) and alpha(p) are the two-branch exponents of the single-function
and orthonormal-system estimates; both branches meet at the critical
exponent p_c = 2(n+1)/(n-1).  shrink_rate gives the torus band width
eps(lambda) = lambda^(-(n-1)/(n+1)), and corollary_rhs assembles the
interpolated right-hand side lambda^(2 sigma) * eps^power * dimR^(1/alpha).

p = infinity is handled symbolically (math.inf with explicit limit
branches), never as a large float.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError


def critical_p(n: int) -> float:
    """The exponent where the two branches of sigma and alpha meet."""
    if n < 2:
        raise DomainError(f"dimension must be >= 2, got {n}")
    return 2 * (n + 1) / (n - 1)


def sigma(n: int, p: float) -> float:
    """Single-function L^p exponent sigma(p)."""
    if p < 2:
        raise DomainError(f"p must be in [2, inf], got {p}")
    if math.isinf(p):
        return n / 2 - 0.5
    if p <= critical_p(n):
        return (n - 1) / 2 * (0.5 - 1.0 / p)
    return n * (0.5 - 1.0 / p) - 0.5


def alpha(n: int, p: float) -> float:
    """Schatten-dual exponent alpha(p) of the orthonormal-system bound."""
    if p < 2:
        raise DomainError(f"p must be in [2, inf], got {p}")
    if math.isinf(p):
        return math.inf
    if p <= critical_p(n):
        return 2 * p / (p + 2)
    return p * (n - 1) / (2 * n)


def eps_power(n: int, p: float) -> float:
    """Power of the band width in the interpolated bound (0 at p_c, 1 at inf)."""
    if math.isinf(p):
        return 1.0
    if p < critical_p(n):
        raise DomainError(f"eps power defined for p >= {critical_p(n):g}, got {p}")
    return 1.0 - 2 * (n + 1) / (p * (n - 1))


def shrink_rate(n: int, lam: float) -> float:
    """Torus band width eps(lambda) = lambda^(-(n-1)/(n+1))."""
    if lam <= 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    return lam ** (-(n - 1) / (n + 1))


def corollary_rhs(n: int, p: float, lam: float, eps: float, dim_r: int) -> float:
    """lambda^(2 sigma(p)) * eps^power * dimR^(1/alpha(p)); the fitted constant
    is supplied externally by the sweep layer."""
    if not math.isinf(p) and p < critical_p(n):
        raise DomainError(
            f"interpolated bound holds for p >= {critical_p(n):g}, got {p}"
        )
    if dim_r < 1:
        raise DomainError(f"dimR must be >= 1, got {dim_r}")
    inv_alpha = 0.0 if math.isinf(p) else 1.0 / alpha(n, p)
    return lam ** (2 * sigma(n, p)) * eps ** eps_power(n, p) * dim_r**inv_alpha


@dataclass(frozen=True)
class ExponentProfile:
    """All exponents of one (n, p) pair, for tables and serialized runs."""

    n: int
    p: float
    sigma: float
    alpha: float
    eps_power: float | None
    critical_p: float

    @classmethod
    def of(cls, n: int, p: float) -> "ExponentProfile":
        pc = critical_p(n)
        power = eps_power(n, p) if (math.isinf(p) or p >= pc) else None
        return cls(
            n=n, p=p, sigma=sigma(n, p), alpha=alpha(n, p), eps_power=power, critical_p=pc
        )


def profile_table(n: int, ps=None) -> list[ExponentProfile]:
    """Profiles for a default or user-supplied list of exponents."""
    if ps is None:
        pc = critical_p(n)
        ps = sorted({2.0, 4.0, pc, 2 * pc, 4 * pc, math.inf})
    return [ExponentProfile.of(n, p) for p in ps]
