"""The auxiliary Schwartz pair (a, b) driving the mollified projector.

Construction: take an even nonnegative bump gamma in C_c^inf((-1/2, 1/2))
and set a = (gamma_hat / gamma_hat(0))^2, where gamma_hat is the cosine
transform of gamma.  Then a is even, nonnegative by construction, a(0) = 1,
and its Fourier transform is a constant multiple of gamma * gamma, hence
supported in (-1, 1).  b = a^2 has transform supported in (-2, 2).

a is evaluated millions of times inside kernel shell sums, so the cosine
transform is tabulated once on a dense grid and interpolated with a cubic
spline; direct quadrature remains available for spot checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .errors import InvalidConfigError, NumericError

TWO_PI = 2 * math.pi


def standard_bump(t, sharpness: float = 4.0):
    """exp(-q / (1 - (2t)^2)) on |t| < 1/2, zero outside.

    The default sharpness q = 4 pushes the transform below 1e-14 by
    tau ~ 150, which keeps kernel shell windows narrow.
    """
    t = np.asarray(t, dtype=float)
    u = 1.0 - (2.0 * t) ** 2
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        vals = np.where(u > 0, np.exp(-sharpness / np.where(u > 0, u, 1.0)), 0.0)
    return vals


def _smooth_step(u):
    """C^inf step: 0 for u <= 0, 1 for u >= 1."""
    u = np.asarray(u, dtype=float)

    def f(v):
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(v > 0, np.exp(-1.0 / np.where(v > 0, v, 1.0)), 0.0)

    a = f(u)
    return a / (a + f(1.0 - u))


@dataclass(frozen=True)
class CutoffFunction:
    """Even smooth cutoff: 1 on |t| <= scale, 0 on |t| >= 2*scale."""

    scale: float = 1.0

    def __call__(self, t):
        u = 2.0 - np.abs(np.asarray(t, dtype=float)) / self.scale
        return _smooth_step(u)


def _gauss_panels(lo: float, hi: float, panels: int, order: int = 16):
    """Composite Gauss-Legendre nodes and weights on [lo, hi]."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = np.diff(edges) / 2
    mid = (edges[:-1] + edges[1:]) / 2
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _oscillatory_panels(lo, hi, max_phase, min_panels=16, order=16):
    panels = max(min_panels, int(math.ceil(max_phase / 4.0)))
    return _gauss_panels(lo, hi, panels, order)


class Mollifier:
    """Immutable pair (a, b) with tabulated evaluators.

    Parameters
    ----------
    gamma : callable, optional
        Even nonnegative profile supported in (-1/2, 1/2); defaults to the
        standard smooth bump.  Validated on a sample grid.
    table_radius : float
        Tabulation range for a; beyond it a is below ~1e-18 and treated as 0.
    table_step : float
        Grid spacing of the tabulation.
    """

    gamma_support_half_width = 0.5

    def __init__(self, gamma=None, *, table_radius=260.0, table_step=0.01,
                 profile_name=None):
        self.profile_name = profile_name or ("bump" if gamma is None else "custom")
        self._gamma = gamma if gamma is not None else standard_bump
        self.table_radius = float(table_radius)
        self.table_step = float(table_step)
        self._validate_gamma()

        # quadrature rule for the cosine transform of gamma over [0, 1/2]
        self._t_nodes, self._t_weights = _gauss_panels(0.0, 0.5, panels=48)
        self._gamma_vals = np.asarray(self._gamma(self._t_nodes), dtype=float)
        self._gamma_hat0 = 2.0 * float(self._t_weights @ self._gamma_vals)
        if self._gamma_hat0 <= 0:
            raise InvalidConfigError("gamma integrates to a nonpositive value")

        taus = np.arange(0.0, self.table_radius + self.table_step, self.table_step)
        self._a_table_x = taus
        self._a_table_y = self._a_direct(taus)
        self._a_spline = CubicSpline(taus, self._a_table_y)

        # a_hat = 2*pi*(gamma*gamma)/gamma_hat(0)^2, tabulated on [0, 1]
        ts = np.linspace(0.0, 1.0, 2001)
        conv = np.array([self._gamma_self_convolution(t) for t in ts])
        self._ahat_table_x = ts
        self._ahat_table_y = TWO_PI * conv / self._gamma_hat0**2
        self._ahat_spline = CubicSpline(ts, self._ahat_table_y)

    # -- construction internals ------------------------------------------

    def _validate_gamma(self):
        grid = np.linspace(-0.499, 0.499, 801)
        vals = np.asarray(self._gamma(grid), dtype=float)
        if np.any(vals < -1e-15):
            raise InvalidConfigError("gamma must be nonnegative")
        if np.max(np.abs(vals - vals[::-1])) > 1e-12 * max(1.0, np.max(np.abs(vals))):
            raise InvalidConfigError("gamma must be even")
        if np.max(np.abs(vals)) == 0.0:
            raise InvalidConfigError("gamma must be nonzero")
        edge = np.asarray(self._gamma(np.array([-0.5, 0.5, 0.75])), dtype=float)
        if np.max(np.abs(edge)) > 1e-12:
            raise InvalidConfigError("gamma must vanish outside (-1/2, 1/2)")

    def gamma_hat(self, tau):
        """Cosine transform of gamma (even, real)."""
        tau = np.asarray(tau, dtype=float)
        phases = np.cos(np.multiply.outer(tau, self._t_nodes))
        return 2.0 * phases @ (self._t_weights * self._gamma_vals)

    def _a_direct(self, tau):
        g = self.gamma_hat(tau)
        return (g / self._gamma_hat0) ** 2

    def _gamma_self_convolution(self, t: float) -> float:
        lo, hi = t - 0.5, 0.5
        if hi <= lo:
            return 0.0
        s, w = _gauss_panels(lo, hi, panels=24)
        return float(np.sum(w * np.asarray(self._gamma(s)) * np.asarray(self._gamma(t - s))))

    # -- evaluators ------------------------------------------------------

    def a(self, tau):
        """Tabulated evaluation of a; even, zero beyond the table radius."""
        tau = np.abs(np.asarray(tau, dtype=float))
        out = np.where(tau <= self.table_radius, self._a_spline(np.minimum(tau, self.table_radius)), 0.0)
        if out.ndim == 0:
            return float(out)
        return out

    def b(self, tau):
        av = self.a(tau)
        return av * av

    def a_hat(self, t):
        """Fourier transform of a; supported in (-1, 1) structurally."""
        t = np.abs(np.asarray(t, dtype=float))
        out = np.where(t < 1.0, self._ahat_spline(np.minimum(t, 1.0)), 0.0)
        if out.ndim == 0:
            return float(out)
        return out

    def decay_radius(self, tol: float = 1e-14) -> float:
        """Smallest tabulated radius beyond which a stays below tol."""
        above = np.nonzero(self._a_table_y >= tol)[0]
        if len(above) == 0:
            return 0.0
        idx = above[-1]
        if idx + 1 >= len(self._a_table_x):
            raise NumericError(
                f"a does not decay below {tol:g} within the table radius"
            )
        return float(self._a_table_x[idx + 1])

    # -- frequency-side identities ---------------------------------------

    def frequency_identity_check(self, mu: float, lam: float, eps: float) -> float:
        """|time-side band filter minus a((mu-lam)/eps) - a((mu+lam)/eps)|.

        The time side is (eps/pi) * int a_hat(eps t) e^(-i t lam) cos(t mu) dt,
        which by Fourier inversion equals the frequency side exactly; the
        returned discrepancy is pure quadrature/tabulation error.
        """
        if mu < 0 or lam < 1 or eps <= 0:
            raise InvalidConfigError(f"bad identity arguments mu={mu}, lam={lam}, eps={eps}")
        # substitute s = eps*t; support is |s| < 1
        max_phase = (lam + mu) / eps
        s, w = _oscillatory_panels(0.0, 1.0, max_phase)
        ah = self.a_hat(s)
        time_side = (2.0 / math.pi) * float(
            np.sum(w * ah * np.cos(s * (lam / eps)) * np.cos(s * (mu / eps)))
        )
        freq_side = self.a((mu - lam) / eps) + self.a((mu + lam) / eps)
        return abs(time_side - freq_side)

    def half_level_delta(self) -> float:
        """Largest grid-certified delta with b >= 1/2 on [0, delta]."""
        step = self.table_step
        taus = self._a_table_x
        bv = self._a_table_y**2
        below = np.nonzero(bv < 0.5)[0]
        if len(below) == 0:
            return float(taus[-1])
        first = below[0]
        if first == 0:
            raise NumericError("b(0) < 1/2; mollifier construction is broken")
        root = brentq(lambda t: self.b(t) - 0.5, taus[first - 1], taus[first])
        delta = root - step  # back off one grid step so the claim is certified
        fine = np.linspace(0.0, delta, 4001)
        if np.any(self.b(fine) < 0.5):
            raise NumericError("certification grid found b < 1/2 before delta")
        return float(delta)

    def h_eps(self, eps: float, tau, cutoff: CutoffFunction | None = None):
        """Fourier transform of c(t) a_hat(eps t) at tau (real, even).

        With the default cutoff this is the paper-normalized H_eps; kernel
        decompositions pass a cutoff rescaled to the torus period.
        """
        if not (0 < eps):
            raise InvalidConfigError(f"eps must be positive, got {eps}")
        cutoff = cutoff or CutoffFunction()
        t_max = min(2.0 * cutoff.scale, 1.0 / eps)
        tau_arr = np.atleast_1d(np.asarray(tau, dtype=float))
        max_phase = float(np.max(np.abs(tau_arr))) * t_max
        t, w = _oscillatory_panels(0.0, t_max, max_phase)
        profile = w * cutoff(t) * self.a_hat(eps * t)
        out = 2.0 * np.cos(np.multiply.outer(tau_arr, t)) @ profile
        if np.isscalar(tau) or np.asarray(tau).ndim == 0:
            return float(out[0])
        return out
