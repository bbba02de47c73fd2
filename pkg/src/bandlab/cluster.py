"""Orthonormal subspaces of a spectral cluster and their densities.

A subspace R of the cluster span is given by an N x d matrix B with
orthonormal columns over the cluster's exponential basis.  Its density
rho(x) = sum_j zeta_j |g_j(x)|^2 is stored through the Hermitian matrix
P = B diag(zeta) B*, which makes basis independence structural: rho only
sees P.  Evaluation goes through the Fourier coefficients of rho on the
difference frequencies k - k', so grids are plain inverse FFTs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ShapeError, SubspaceValidationError
from .exponents import shrink_rate
from .lattice import SpectralBand, SpectralCluster, TorusConfig, count_band

TWO_PI = 2 * math.pi
ORTHONORMALITY_TOL = 1e-12


@dataclass(frozen=True)
class ClusterSubspace:
    """d-dimensional subspace of a cluster, as orthonormal coefficients B."""

    cluster: SpectralCluster
    B: np.ndarray

    @property
    def d(self) -> int:
        return self.B.shape[1]


def make_subspace(cluster: SpectralCluster, B) -> ClusterSubspace:
    """Validate orthonormal columns and wrap them as a subspace."""
    B = np.asarray(B, dtype=complex)
    if B.ndim != 2 or B.shape[0] != cluster.N:
        raise ShapeError(f"coefficient matrix must be {cluster.N} x d, got {B.shape}")
    d = B.shape[1]
    if not 1 <= d <= cluster.N:
        raise ShapeError(f"subspace dimension must be in [1, {cluster.N}], got {d}")
    gram = B.conj().T @ B
    dev = np.abs(gram - np.eye(d))
    i, j = np.unravel_index(np.argmax(dev), dev.shape)
    if dev[i, j] > ORTHONORMALITY_TOL:
        raise SubspaceValidationError(
            f"columns not orthonormal: |(B*B - I)[{i},{j}]| = {dev[i, j]:.3e}"
        )
    return ClusterSubspace(cluster=cluster, B=B)


def random_subspace(cluster: SpectralCluster, d: int, seed) -> ClusterSubspace:
    """Orthonormalized seeded complex Gaussian frame; reproducible by seed."""
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((cluster.N, d)) + 1j * rng.standard_normal((cluster.N, d))
    q, _ = np.linalg.qr(raw)
    return make_subspace(cluster, q)


class DensityFunction:
    """rho(x) = (2 pi)^-n sum_{k,k'} P_{k,k'} exp(i (k - k').x)."""

    def __init__(self, cluster: SpectralCluster, P: np.ndarray, weights=None):
        self.cluster = cluster
        self.P = P
        self.weights = weights
        self.n = cluster.n
        self._diffs, self._coeffs = self._difference_coefficients()

    def _difference_coefficients(self):
        K = self.cluster.frequency_array()
        N = K.shape[0]
        diffs = (K[:, None, :] - K[None, :, :]).reshape(N * N, self.n)
        vals = self.P.reshape(N * N) / TWO_PI**self.n
        # collapse duplicate difference vectors
        span = int(diffs.max(initial=0) - diffs.min(initial=0) + 1) if N else 1
        offset = -diffs.min(initial=0) if N else 0
        keys = np.zeros(N * N, dtype=np.int64)
        for axis in range(self.n):
            keys = keys * span + (diffs[:, axis] + offset)
        order = np.argsort(keys, kind="stable")
        keys, diffs, vals = keys[order], diffs[order], vals[order]
        boundaries = np.nonzero(np.diff(keys))[0] + 1
        starts = np.concatenate(([0], boundaries))
        sums = np.add.reduceat(vals, starts) if len(vals) else vals
        return diffs[starts] if len(vals) else diffs, sums

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.P)))

    def __call__(self, points):
        """Evaluate rho at points of shape (..., n); returns real values."""
        pts = np.asarray(points, dtype=float)
        flat = pts.reshape(-1, self.n)
        phases = flat @ self._diffs.T.astype(float)
        vals = np.exp(1j * phases) @ self._coeffs
        return np.real(vals).reshape(pts.shape[:-1])

    def grid_values(self, grid_size: int) -> np.ndarray:
        """rho on the uniform (2 pi / M)^n grid via inverse FFT (exact)."""
        M = int(grid_size)
        A = np.zeros((M,) * self.n, dtype=complex)
        idx = tuple(np.mod(self._diffs[:, axis], M) for axis in range(self.n))
        np.add.at(A, idx, self._coeffs)
        vals = np.fft.ifftn(A) * M**self.n
        return np.real(vals)

    def default_grid_size(self, q: float | None = None) -> int:
        """Next power of two oversampling the difference bandwidth 2(lam+eps);
        widened so even-integer L^q quadrature is exact."""
        edge = self.cluster.band.upper
        need = 4 * edge + 1
        if q is not None and not math.isinf(q):
            bandwidth = 2 * math.floor(edge)
            need = max(need, math.ceil(q) * bandwidth + 2)
        return 1 << max(4, math.ceil(math.log2(max(need, 2))))

    def hessian_bound(self) -> float:
        """sum |c_d| |d|^2 — a global bound on the Hessian norm of rho."""
        d2 = np.sum(self._diffs.astype(float) ** 2, axis=1)
        return float(np.sum(np.abs(self._coeffs) * d2))


def density(subspace: ClusterSubspace, weights=None) -> DensityFunction:
    """Density of a subspace; optional real weights zeta per basis vector."""
    B = subspace.B
    if weights is None:
        P = B @ B.conj().T
    else:
        zeta = np.asarray(weights, dtype=float)
        if zeta.shape != (subspace.d,):
            raise ShapeError(
                f"weights must have length d = {subspace.d}, got shape {zeta.shape}"
            )
        if not np.all(np.isfinite(zeta)):
            raise DomainError("weights must be finite")
        P = (B * zeta) @ B.conj().T
    return DensityFunction(subspace.cluster, P, weights=weights)


def lp_norm(dens: DensityFunction, q: float, *, grid_size: int | None = None) -> float:
    """L^q norm of rho on the torus; q = inf returns the certified upper bound."""
    if q < 1:
        raise DomainError(f"q must be >= 1, got {q}")
    if math.isinf(q):
        return sup_norm_bracket(dens, grid_size=grid_size)[1]
    M = grid_size or dens.default_grid_size(q)
    vals = np.abs(dens.grid_values(M))
    cell = (TWO_PI / M) ** dens.n
    return float((cell * np.sum(vals**q)) ** (1.0 / q))


def sup_norm_bracket(
    dens: DensityFunction, *, grid_size: int | None = None, rel_tol: float = 2e-2
) -> tuple[float, float]:
    """Certified bracket [grid max, grid max + curvature slack] for sup rho.

    Around the true maximizer the gradient vanishes, so the nearest grid
    point is below the sup by at most H * (h sqrt(n) / 2)^2 / 2 with H the
    global Hessian bound.  Without an explicit grid size the grid is
    doubled until the slack is below rel_tol of the grid max (or a size
    cap is hit, keeping the bracket certified either way).
    """
    hess = dens.hessian_bound()
    deg_sq = float(np.max(np.sum(dens._diffs.astype(float) ** 2, axis=1), initial=0.0))

    def bracket(M):
        grid_max = float(np.max(dens.grid_values(M)))
        h = TWO_PI / M
        additive = grid_max + hess * (h * math.sqrt(dens.n) / 2) ** 2 / 2
        # Bernstein: sup|d^2 rho / dv^2| <= deg^2 sup rho, so S <= g + S q
        q = deg_sq * dens.n * h * h / 8.0
        hi = additive if q >= 1 else min(additive, grid_max / (1.0 - q))
        return grid_max, hi

    if grid_size is not None:
        return bracket(grid_size)
    M = max(dens.default_grid_size(), 1024)
    cap = 4096 if dens.n == 2 else 256
    lo, hi = bracket(M)
    while hi - lo > rel_tol * max(lo, 1e-300) and M < cap:
        M *= 2
        lo, hi = bracket(M)
    return lo, hi


def theorem1_ratio(cfg: TorusConfig, lam: float, eps: float | None = None) -> float:
    """sup rho of the full cluster over lambda^(n-1) eps.

    On the torus the full-cluster density is the constant N / (2 pi)^n, so
    the ratio collapses to an exact lattice count; empty band -> 0.
    """
    if lam < 2:
        raise DomainError(f"lambda must be >= 2, got {lam}")
    if eps is None:
        eps = shrink_rate(cfg.n, lam)
    n_pts = count_band(cfg, SpectralBand(lam, eps))
    if n_pts == 0:
        return 0.0
    return n_pts / (TWO_PI**cfg.n * lam ** (cfg.n - 1) * eps)
