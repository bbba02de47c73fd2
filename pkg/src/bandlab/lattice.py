"""Exact enumeration and counting of integer frequency vectors in balls,
spherical shells and thin annuli of Z^n.

The torus is R^n / (2 pi Z)^n with orthonormal eigenfunctions
(2 pi)^(-n/2) exp(i k.x), so sqrt(-Laplacian) has eigenvalue |k| on the
mode with frequency k.  A spectral band [lambda, lambda+eps) therefore
corresponds to the annulus lambda^2 <= |k|^2 < (lambda+eps)^2 in Z^n.
Membership is decided by comparing the exact integer |k|^2 against band
endpoints squared in 40-digit decimal arithmetic; floats never touch the
boundary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import ROUND_CEILING, ROUND_FLOOR, Decimal, localcontext

import numpy as np

from .errors import CapacityError, InvalidConfigError, RangeError

_MAX_DIMENSION = 8
_MAX_BAND_EDGE = 1e12  # keeps m = |k|^2 comfortably inside exact-int range
_DECIMAL_DIGITS = 40


@dataclass(frozen=True)
class TorusConfig:
    """Dimension of the torus; every downstream object references one."""

    n: int

    def __post_init__(self):
        if self.n < 2:
            raise InvalidConfigError(f"torus dimension must be >= 2, got {self.n}")
        if self.n > _MAX_DIMENSION:
            raise InvalidConfigError(
                f"torus dimension capped at {_MAX_DIMENSION}, got {self.n}"
            )


@dataclass(frozen=True)
class SpectralBand:
    """Half-open frequency interval [lam, lam + eps) in sqrt(-Laplacian) units."""

    lam: float
    eps: float

    def __post_init__(self):
        if not (self.lam >= 1):
            raise InvalidConfigError(f"band start must satisfy lambda >= 1, got {self.lam}")
        if not (0 < self.eps <= 1):
            raise InvalidConfigError(
                f"band width must satisfy 0 < eps <= 1, got {self.eps}"
            )
        if self.lam + self.eps > _MAX_BAND_EDGE:
            raise RangeError(
                f"band edge {self.lam + self.eps:g} exceeds exact comparison range"
            )

    @property
    def upper(self) -> float:
        return self.lam + self.eps


@dataclass(frozen=True, order=True)
class FrequencyVector:
    """An integer frequency vector together with its exact squared norm."""

    k: tuple[int, ...]
    norm_sq: int = field(compare=False)

    @classmethod
    def of(cls, coords) -> "FrequencyVector":
        k = tuple(int(c) for c in coords)
        return cls(k=k, norm_sq=sum(c * c for c in k))


@dataclass(frozen=True)
class SpectralCluster:
    """The exact set of frequency vectors inside one band, sorted lexicographically."""

    band: SpectralBand
    n: int
    freqs: tuple[FrequencyVector, ...]

    @property
    def N(self) -> int:
        return len(self.freqs)

    def frequency_array(self) -> np.ndarray:
        """The N x n integer matrix of frequencies (empty -> shape (0, n))."""
        if not self.freqs:
            return np.zeros((0, self.n), dtype=np.int64)
        return np.array([f.k for f in self.freqs], dtype=np.int64)


def band_norm_range(band: SpectralBand) -> tuple[int, int]:
    """Exact integer range [m_lo, m_hi) of squared norms inside the band.

    m is a member iff lam^2 <= m < (lam+eps)^2; both comparisons are done
    on Decimal squares so the half-open boundary is never decided by a float.
    """
    with localcontext() as ctx:
        ctx.prec = _DECIMAL_DIGITS
        lo = Decimal(repr(float(band.lam))) ** 2
        hi = (Decimal(repr(float(band.lam))) + Decimal(repr(float(band.eps)))) ** 2
        m_lo = int(lo.to_integral_value(rounding=ROUND_CEILING))
        m_hi = int(hi.to_integral_value(rounding=ROUND_CEILING))
    return m_lo, m_hi


def _ceil_sqrt(m: int) -> int:
    """Smallest j >= 0 with j*j >= m."""
    if m <= 0:
        return 0
    j = math.isqrt(m - 1) + 1
    return j


def _last_coordinate_values(lo: int, hi: int):
    """Ascending iterator over integers j with lo <= j^2 <= hi."""
    if hi < 0 or hi < lo:
        return
    j_max = math.isqrt(hi)
    j_min = _ceil_sqrt(lo)
    if j_min > j_max:
        return
    for j in range(-j_max, min(-j_min, 0) + 1):
        yield j
    for j in range(max(j_min, 1), j_max + 1):
        yield j


def _last_coordinate_count(lo: int, hi: int) -> int:
    if hi < 0 or hi < lo:
        return 0
    j_max = math.isqrt(hi)
    j_min = _ceil_sqrt(lo)
    if j_min > j_max:
        return 0
    cnt = 2 * (j_max - j_min + 1)
    if j_min == 0:
        cnt -= 1  # j = 0 counted twice
    return cnt


def enumerate_band(cfg: TorusConfig, band: SpectralBand) -> SpectralCluster:
    """All k in Z^n with |k| in [lam, lam+eps), in lexicographic order.

    Coordinate-recursive enumeration: each level loops over the residual
    radius interval, so the work is proportional to the annulus plus its
    boundary, not the enclosing ball.
    """
    m_lo, m_hi = band_norm_range(band)
    freqs: list[FrequencyVector] = []
    if m_hi > m_lo:
        prefix = [0] * cfg.n
        _enumerate_rec(cfg.n, 0, 0, m_lo, m_hi - 1, prefix, freqs)
    return SpectralCluster(band=band, n=cfg.n, freqs=tuple(freqs))


def _enumerate_rec(n, depth, partial, lo, hi, prefix, out):
    remaining = hi - partial
    if depth == n - 1:
        for j in _last_coordinate_values(lo - partial, remaining):
            prefix[depth] = j
            out.append(FrequencyVector(k=tuple(prefix), norm_sq=partial + j * j))
        return
    bound = math.isqrt(remaining)
    for j in range(-bound, bound + 1):
        prefix[depth] = j
        _enumerate_rec(n, depth + 1, partial + j * j, lo, hi, prefix, out)


def count_band(cfg: TorusConfig, band: SpectralBand) -> int:
    """Cardinality of enumerate_band without materializing the vectors."""
    m_lo, m_hi = band_norm_range(band)
    if m_hi <= m_lo:
        return 0
    return _count_rec(cfg.n, 0, m_lo, m_hi - 1)


def _count_rec(n, partial, lo, hi):
    remaining = hi - partial
    if n == 1:
        return _last_coordinate_count(lo - partial, remaining)
    bound = math.isqrt(remaining)
    total = 0
    for j in range(-bound, bound + 1):
        total += _count_rec(n - 1, partial + j * j, lo, hi)
    return total


def brute_force_band_oracle(
    cfg: TorusConfig, band: SpectralBand, *, cube_cap: int = 200_000_000
) -> SpectralCluster:
    """Independent oracle: full scan of the cube [-C, C]^n.

    Intentionally simple; shares nothing with enumerate_band beyond the
    Decimal band endpoints.
    """
    m_lo, m_hi = band_norm_range(band)
    c = math.ceil(band.upper) + 1
    if (2 * c + 1) ** cfg.n > cube_cap:
        raise CapacityError(
            f"cube scan of ({2 * c + 1})^{cfg.n} points exceeds cap {cube_cap}"
        )
    freqs = []
    for k in _cube(cfg.n, c):
        m = sum(c_ * c_ for c_ in k)
        if m_lo <= m < m_hi:
            freqs.append(FrequencyVector(k=k, norm_sq=m))
    freqs.sort(key=lambda f: f.k)
    return SpectralCluster(band=band, n=cfg.n, freqs=tuple(freqs))


def _cube(n, c):
    if n == 1:
        for j in range(-c, c + 1):
            yield (j,)
        return
    for head in range(-c, c + 1):
        for tail in _cube(n - 1, c):
            yield (head,) + tail


def _floor_norm_sq(r: float) -> int:
    """Largest integer m with m <= r^2, decided in Decimal."""
    with localcontext() as ctx:
        ctx.prec = _DECIMAL_DIGITS
        sq = Decimal(repr(float(r))) ** 2
        return int(sq.to_integral_value(rounding=ROUND_FLOOR))


def count_ball(cfg: TorusConfig, r: float) -> int:
    """#{k in Z^n : |k| <= r}."""
    if r < 0:
        raise InvalidConfigError(f"radius must be nonnegative, got {r}")
    if r > _MAX_BAND_EDGE:
        raise RangeError(f"radius {r:g} exceeds exact comparison range")
    m_max = _floor_norm_sq(r)
    return _count_rec(cfg.n, 0, 0, m_max)


def unit_ball_volume(n: int) -> float:
    """Volume of the n-dimensional Euclidean unit ball."""
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def weyl_remainder(cfg: TorusConfig, r: float) -> float:
    """count_ball(r) minus the Weyl main term omega_n r^n."""
    return count_ball(cfg, r) - unit_ball_volume(cfg.n) * r**cfg.n


def shell_multiplicity(cfg: TorusConfig, m: int) -> int:
    """#{k in Z^n : |k|^2 = m}."""
    if m < 0:
        raise InvalidConfigError(f"shell index must be nonnegative, got {m}")
    return _shell_rec(cfg.n, m)


def _shell_rec(n, m):
    if n == 1:
        if m == 0:
            return 1
        j = math.isqrt(m)
        return 2 if j * j == m else 0
    bound = math.isqrt(m)
    total = 0
    for j in range(-bound, bound + 1):
        total += _shell_rec(n - 1, m - j * j)
    return total


def shell_counts(cfg: TorusConfig, m_lo: int, m_hi: int) -> np.ndarray:
    """Histogram of shell multiplicities: out[i] = #{k : |k|^2 = m_lo + i}.

    One pass over the annulus m_lo <= |k|^2 < m_hi; used by the kernel
    shell sums, which group diagonal contributions by |k|.
    """
    if m_lo < 0 or m_hi < m_lo:
        raise InvalidConfigError(f"bad shell window [{m_lo}, {m_hi})")
    out = np.zeros(m_hi - m_lo, dtype=np.int64)
    if m_hi == m_lo:
        return out
    _shell_counts_rec(cfg.n, 0, m_lo, m_hi - 1, out)
    return out


def _shell_counts_rec(n, partial, lo, hi, out):
    remaining = hi - partial
    if n == 1:
        for j in _last_coordinate_values(lo - partial, remaining):
            out[partial + j * j - lo] += 1
        return
    bound = math.isqrt(remaining)
    for j in range(-bound, bound + 1):
        _shell_counts_rec(n - 1, partial + j * j, lo, hi, out)
