"""Diagonal values of the mollified projector kernel and their decomposition.

On the torus the diagonal A(x, x) of a(eps^-1 (sqrt(-Lap) - lam)) is the
constant (2 pi)^-n sum_k a(eps^-1 (|k| - lam)) — an exact shell sum.  The
same quantity is reconstructed from the free-space side: periodization
writes the wave kernel as a sum over translates 2 pi m, m in Z^n, and a
smooth time cutoff (scaled to the torus period) splits the local part from
the tail.  The split pieces mirror the analytic bounds: the zero-translate
local term is of size eps lam^(n-1), the translate tail is controlled by
(lam/eps)^((n-1)/2), and the negative-frequency remainder J is negligible.

Radial integrals over translate frequencies use the Fourier transform of
the unit-sphere surface measure (a Bessel function of order (n-2)/2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import gamma as gamma_fn
from scipy.special import hankel1, jv

from .errors import InvalidConfigError, NumericError, RangeError
from .lattice import TorusConfig, shell_counts, shell_multiplicity
from .mollifier import CutoffFunction, Mollifier, _gauss_panels

TWO_PI = 2 * math.pi
_SHELL_WINDOW_CAP = 40_000_000


def sphere_surface_area(n: int) -> float:
    """Surface area of the unit sphere S^(n-1) in R^n."""
    return 2 * math.pi ** (n / 2) / gamma_fn(n / 2)


def sphere_ft(n: int, r):
    """Radial Fourier transform of the unit-sphere surface measure.

    Equals (2 pi)^(n/2) r^(-(n-2)/2) J_((n-2)/2)(r); real and even, with
    value |S^(n-1)| at r = 0.
    """
    if n < 2:
        raise InvalidConfigError(f"dimension must be >= 2, got {n}")
    nu = (n - 2) / 2
    arr = np.asarray(r, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(np.abs(arr))
    small = arr < 1e-6
    safe = np.where(small, 1.0, arr)
    vals = (TWO_PI) ** (n / 2) * jv(nu, safe) / safe**nu
    area = sphere_surface_area(n)
    vals = np.where(small, area * (1.0 - arr**2 / (2 * n)), vals)
    return float(vals[0]) if scalar else vals


def sphere_ft_envelope(n: int, r):
    """m_+(r): the e^(i r) amplitude of the surface-measure transform after
    factoring out (1 + r)^(-(n-1)/2); m_- is its conjugate."""
    nu = (n - 2) / 2
    arr = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(arr <= 0):
        raise InvalidConfigError("envelope defined for r > 0")
    vals = (
        0.5
        * (1.0 + arr) ** ((n - 1) / 2)
        * (TWO_PI) ** (n / 2)
        * hankel1(nu, arr)
        / arr**nu
        * np.exp(-1j * arr)
    )
    return vals[0] if np.asarray(r).ndim == 0 else vals


# -- shell sums ------------------------------------------------------------


def _shell_window(lam: float, eps: float, radius: float) -> tuple[int, int]:
    lo = max(0.0, lam - eps * radius)
    hi = lam + eps * radius
    m_lo = int(math.floor(lo * lo))
    m_hi = int(math.ceil(hi * hi)) + 1
    if m_hi - m_lo > _SHELL_WINDOW_CAP:
        raise RangeError(
            f"shell window [{m_lo}, {m_hi}) exceeds cap {_SHELL_WINDOW_CAP}"
        )
    return m_lo, m_hi


def mollified_diagonal(
    cfg: TorusConfig, lam: float, eps: float, moll: Mollifier, *, tol: float = 1e-14
) -> float:
    """A(x, x) = (2 pi)^-n sum_m mult(m) a(eps^-1 (sqrt(m) - lam)).

    Constant in x; shells outside the decay radius of a contribute below
    tol each and are truncated.
    """
    if lam < 1 or eps <= 0:
        raise InvalidConfigError(f"need lam >= 1 and eps > 0, got {lam}, {eps}")
    radius = moll.decay_radius(tol)
    m_lo, m_hi = _shell_window(lam, eps, radius)
    counts = shell_counts(cfg, m_lo, m_hi)
    roots = np.sqrt(np.arange(m_lo, m_hi, dtype=float))
    vals = moll.a((roots - lam) / eps)
    return float(np.sum(counts * vals)) / TWO_PI**cfg.n


def negative_branch_diagonal(
    cfg: TorusConfig, lam: float, eps: float, moll: Mollifier, *, tol: float = 1e-18
) -> float:
    """J(x, x) = (2 pi)^-n sum_m mult(m) a(eps^-1 (sqrt(m) + lam))."""
    radius = moll.decay_radius(tol)
    top = eps * radius - lam
    if top <= 0:
        return 0.0
    m_hi = int(math.ceil(top * top)) + 1
    counts = shell_counts(cfg, 0, m_hi)
    roots = np.sqrt(np.arange(0, m_hi, dtype=float))
    vals = moll.a((roots + lam) / eps)
    return float(np.sum(counts * vals)) / TWO_PI**cfg.n


# -- radial quadrature of translate terms ----------------------------------


def _radial_integral(n, z_norm, lo, hi, f, smooth_scale, *, refine=1.0):
    """int_lo^hi r^(n-1) sphere_ft(z r) f(r) dr by panelled Gauss-Legendre.

    Panel density tracks both the oscillation z and the smoothness scale
    of the profile f, so the rule stays spectrally accurate.
    """
    if hi <= lo:
        return 0.0
    density = z_norm / 5.0 + 1.0 / (2.0 * smooth_scale)
    panels = max(8, int(math.ceil((hi - lo) * density * refine)))
    if panels > 400_000:
        raise NumericError(f"radial quadrature needs {panels} panels; refusing")
    r, w = _gauss_panels(lo, hi, panels)
    vals = r ** (n - 1) * sphere_ft(n, z_norm * r) * f(r)
    return float(np.sum(w * vals))


def translate_term(
    cfg: TorusConfig,
    z_norm: float,
    lam: float,
    eps: float,
    moll: Mollifier,
    *,
    refine: float = 1.0,
) -> float:
    """Free-space kernel of a(eps^-1 (sqrt(-Lap) - lam)) at |z| = z_norm.

    (2 pi)^-n int r^(n-1) sphere_ft(|z| r) [a((r-lam)/eps) + a((r+lam)/eps)] dr.
    Vanishes exactly for z_norm > 1/eps (finite propagation speed plus the
    support of a_hat); such terms are not integrated.
    """
    if z_norm > 1.0 / eps:
        return 0.0
    radius = moll.decay_radius(1e-15)
    lo = max(0.0, lam - eps * radius)
    hi = lam + eps * radius

    def f(r):
        return moll.a((r - lam) / eps) + moll.a((r + lam) / eps)

    val = _radial_integral(cfg.n, z_norm, lo, hi, f, eps, refine=refine)
    return val / TWO_PI**cfg.n


class _CutoffKernelTable:
    """Tabulated H(tau) = FT of c(t) a_hat(eps t) for one (eps, cutoff)."""

    def __init__(self, moll, eps, cutoff, tau_max):
        self.eps = eps
        self.cutoff = cutoff
        self.t_max = min(2.0 * cutoff.scale, 1.0 / eps)
        taus = np.arange(0.0, tau_max + 0.02, 0.02)
        vals = np.concatenate(
            [moll.h_eps(eps, chunk, cutoff) for chunk in np.array_split(taus, 16)]
        )
        self._spline = CubicSpline(taus, vals)
        self.tau_max = tau_max
        # radius beyond which |H| stays below a relative floor
        scale = float(np.max(np.abs(vals)))
        above = np.nonzero(np.abs(vals) >= 1e-13 * scale)[0]
        self.decay_radius = float(taus[min(above[-1] + 1, len(taus) - 1)])

    def __call__(self, tau):
        tau = np.abs(np.asarray(tau, dtype=float))
        out = np.where(tau <= self.tau_max, self._spline(np.minimum(tau, self.tau_max)), 0.0)
        return out


def _cutoff_translate_term(cfg, table, z_norm, lam, eps):
    """(eps / (2 pi)^(n+1)) int r^(n-1) sphere_ft(|z| r) [H(lam-r) + H(lam+r)] dr."""
    if z_norm > table.t_max:
        return 0.0
    T = table.decay_radius
    lo = max(0.0, lam - T)
    hi = lam + T

    def f(r):
        return table(lam - r) + table(lam + r)

    # H carries frequencies up to t_max, so it varies on the scale 1/t_max
    val = _radial_integral(cfg.n, z_norm, lo, hi, f, 1.0 / table.t_max)
    return eps * val / TWO_PI ** (cfg.n + 1)


@dataclass(frozen=True)
class KernelDiagonalReport:
    """Diagonal kernel value, its decomposition, and the bound ratios."""

    n: int
    lam: float
    eps: float
    total: float
    j_term: float
    i1_main: float
    i1_neighbor: float
    i21: float
    i2_zero: float
    i22: float
    reassembled: float
    quad_error: float
    ratio_two_term: float
    ratio_i1: float
    ratio_i22: float
    ratio_j: float

    def two_term_bound(self) -> float:
        return self.eps * self.lam ** (self.n - 1) + (self.lam / self.eps) ** (
            (self.n - 1) / 2
        )


def decompose_diagonal(
    cfg: TorusConfig,
    lam: float,
    eps: float,
    moll: Mollifier,
    *,
    cutoff_scale: float = TWO_PI,
) -> KernelDiagonalReport:
    """Split A(x, x) into local, neighbor-translate, tail and negligible parts.

    The time cutoff c is scaled to the torus period 2 pi, so translates
    with |m| <= 2 play the role of the near neighbors.  The c-split
    cancels in the reassembly (i1_neighbor == i21 by construction), which
    reduces the consistency check to periodization plus quadrature.
    """
    if not (1.0 / lam < eps <= 1.0):
        raise InvalidConfigError(f"need 1/lam < eps <= 1, got lam={lam}, eps={eps}")
    cutoff = CutoffFunction(scale=cutoff_scale)

    total = mollified_diagonal(cfg, lam, eps, moll)
    j_term = negative_branch_diagonal(cfg, lam, eps, moll)

    table = _CutoffKernelTable(moll, eps, cutoff, tau_max=160.0)
    i1_main = _cutoff_translate_term(cfg, table, 0.0, lam, eps)

    neighbor = 0.0
    for s2 in (1, 2, 3, 4):  # translate shells |m|^2 with |m| <= 2
        mult = shell_multiplicity(cfg, s2)
        if mult:
            neighbor += mult * _cutoff_translate_term(
                cfg, table, TWO_PI * math.sqrt(s2), lam, eps
            )
    i21 = neighbor  # same integrand and cutoff; reported jointly

    # full translate tail: |2 pi m| <= 1/eps (exactly zero beyond)
    s_max = int(math.floor((1.0 / (TWO_PI * eps)) ** 2)) if eps < 1.0 / TWO_PI else 0
    i22 = 0.0
    for s2 in range(1, s_max + 1):
        mult = shell_multiplicity(cfg, s2)
        if mult:
            i22 += mult * translate_term(cfg, TWO_PI * math.sqrt(s2), lam, eps, moll)

    full_zero = translate_term(cfg, 0.0, lam, eps, moll)
    full_zero_fine = translate_term(cfg, 0.0, lam, eps, moll, refine=2.0)
    quad_error = abs(full_zero_fine - full_zero) + 16 * abs(total) * 1e-14
    i2_zero = full_zero_fine - i1_main

    reassembled = full_zero_fine + i22 - j_term

    two_term = eps * lam ** (cfg.n - 1) + (lam / eps) ** ((cfg.n - 1) / 2)
    return KernelDiagonalReport(
        n=cfg.n,
        lam=lam,
        eps=eps,
        total=total,
        j_term=j_term,
        i1_main=i1_main,
        i1_neighbor=neighbor,
        i21=i21,
        i2_zero=i2_zero,
        i22=i22,
        reassembled=reassembled,
        quad_error=quad_error,
        ratio_two_term=total / two_term,
        ratio_i1=i1_main / (eps * lam ** (cfg.n - 1)),
        ratio_i22=abs(i22) / (lam / eps) ** ((cfg.n - 1) / 2),
        ratio_j=j_term / (eps * lam ** (cfg.n - 1)),
    )


@dataclass(frozen=True)
class PeriodizationReport:
    lattice_side: float
    translate_side: float
    rel_discrepancy: float
    translate_shells: int


def periodized_diagonal_check(
    cfg: TorusConfig,
    lam: float,
    eps: float,
    moll: Mollifier | None = None,
    *,
    gaussian_width: float | None = None,
) -> PeriodizationReport:
    """Smoothed periodization: frequency-side lattice sum vs translate sum.

    Default profile f(mu) = a((mu-lam)/eps) + a((mu+lam)/eps); the lattice
    side (2 pi)^-n sum_k f(|k|) is the exact oracle, the translate side
    sums the free-space kernel over 2 pi m.  With gaussian_width set, f is
    a radial Gaussian instead — classical Poisson summation as a harness
    self-test (the mollifier is bypassed).
    """
    if gaussian_width is not None:
        w = float(gaussian_width)
        if w <= 0:
            raise InvalidConfigError(f"gaussian width must be positive, got {w}")

        def f(r):
            return np.exp(-np.asarray(r, dtype=float) ** 2 / (2 * w * w))

        r_hi = 14.0 * w
        m_hi = int(math.ceil(r_hi * r_hi)) + 1
        smooth_scale = w
        # translate shells: Gaussian transform decays like exp(-z^2 w^2/2)
        s_lim = 14.0 / (TWO_PI * w)
        s_max = max(1, int(math.ceil(s_lim * s_lim)))
    else:
        moll = moll or Mollifier()
        radius = moll.decay_radius(1e-15)

        def f(r):
            r = np.asarray(r, dtype=float)
            return moll.a((r - lam) / eps) + moll.a((r + lam) / eps)

        r_hi = lam + eps * radius
        m_hi = int(math.ceil(r_hi * r_hi)) + 1
        smooth_scale = eps
        s_lim = max(1.0 / (TWO_PI * eps), 1.0)
        s_max = int(math.ceil((s_lim + 1.0) ** 2))

    counts = shell_counts(cfg, 0, m_hi)
    roots = np.sqrt(np.arange(0, m_hi, dtype=float))
    lattice_side = float(np.sum(counts * f(roots))) / TWO_PI**cfg.n

    translate_side = 0.0
    shells = 0
    for s2 in range(0, s_max + 1):
        mult = 1 if s2 == 0 else shell_multiplicity(cfg, s2)
        if not mult:
            continue
        z = TWO_PI * math.sqrt(s2)
        term = _radial_integral(cfg.n, z, 0.0, r_hi, f, smooth_scale) / TWO_PI**cfg.n
        translate_side += mult * term
        shells += 1

    rel = abs(lattice_side - translate_side) / max(abs(lattice_side), 1e-300)
    return PeriodizationReport(
        lattice_side=lattice_side,
        translate_side=translate_side,
        rel_discrepancy=rel,
        translate_shells=shells,
    )
