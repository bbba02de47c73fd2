"""Schatten norms of the compressed operator h chi h-bar on the torus.

For a finite trigonometric polynomial h and the band projector chi onto a
spectral cluster, the operator h chi h-bar shares its nonzero spectrum
with the Hermitian N x N Gram matrix G_{k,k'} = <h e_k, h e_{k'}> over the
normalized cluster exponentials.  Entries of G are exact coefficient
convolutions of |h|^2, so every Schatten norm reduces to a dense
Hermitian eigenvalue problem.  The module also packages the trace-class
ratio check, the duality pairing between weighted densities and Schatten
norms, and the mollified-versus-unit-band trace comparison chain.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .cluster import ClusterSubspace, density
from .errors import CapacityError, DomainError, InvalidConfigError, ShapeError
from .lattice import SpectralBand, SpectralCluster, TorusConfig, count_band, shell_counts
from .mollifier import Mollifier

TWO_PI = 2 * math.pi
EIGENSOLVER_CAP = 4000


class TestFunction:
    """A finite complex Fourier series h(x) = sum_q c_q exp(i q.x).

    Frequencies must be distinct; all downstream Gram entries are then
    exact finite convolutions of the coefficient list.
    """

    __test__ = False  # keep pytest from collecting this as a test class

    def __init__(self, freqs, coeffs):
        freqs = np.asarray(freqs, dtype=np.int64)
        coeffs = np.asarray(coeffs, dtype=complex)
        if freqs.ndim != 2 or coeffs.ndim != 1 or freqs.shape[0] != coeffs.shape[0]:
            raise ShapeError(
                f"need Q x n frequencies with Q coefficients, got {freqs.shape}, {coeffs.shape}"
            )
        if freqs.shape[0] == 0:
            raise InvalidConfigError("test function needs at least one mode")
        if len({tuple(row) for row in freqs.tolist()}) != freqs.shape[0]:
            raise InvalidConfigError("duplicate frequencies in test function")
        self.freqs = freqs
        self.coeffs = coeffs
        self.n = freqs.shape[1]

    @property
    def l2_norm_sq(self) -> float:
        """||h||_2^2 = (2 pi)^n sum |c_q|^2 (Parseval)."""
        return TWO_PI**self.n * float(np.sum(np.abs(self.coeffs) ** 2))

    @property
    def max_frequency(self) -> int:
        return int(np.max(np.abs(self.freqs), initial=0))

    def __call__(self, points):
        pts = np.asarray(points, dtype=float)
        flat = pts.reshape(-1, self.n)
        vals = np.exp(1j * (flat @ self.freqs.T.astype(float))) @ self.coeffs
        return vals.reshape(pts.shape[:-1])

    @cached_property
    def abs_sq_coefficients(self) -> tuple[np.ndarray, np.ndarray]:
        """Fourier coefficients of |h|^2 on difference frequencies."""
        q = self.freqs
        c = self.coeffs
        diffs = (q[:, None, :] - q[None, :, :]).reshape(-1, self.n)
        vals = (c[:, None] * c[None, :].conj()).reshape(-1)
        keyed: dict[tuple, complex] = {}
        for d, v in zip(map(tuple, diffs.tolist()), vals):
            keyed[d] = keyed.get(d, 0.0) + v
        out_d = np.array(sorted(keyed), dtype=np.int64).reshape(-1, self.n)
        out_v = np.array([keyed[tuple(d)] for d in out_d.tolist()])
        return out_d, out_v

    def abs_sq(self, points):
        vals = self(points)
        return np.abs(vals) ** 2

    def grid_values(self, grid_size: int) -> np.ndarray:
        """h on the uniform (2 pi / M)^n grid via inverse FFT."""
        M = int(grid_size)
        if M <= 2 * self.max_frequency:
            raise InvalidConfigError(f"grid {M} under the Nyquist rate of h")
        A = np.zeros((M,) * self.n, dtype=complex)
        idx = tuple(np.mod(self.freqs[:, axis], M) for axis in range(self.n))
        np.add.at(A, idx, self.coeffs)
        return np.fft.ifftn(A) * M**self.n

    def lp_norm(self, p: float, *, grid_size: int | None = None) -> float:
        """||h||_p by grid quadrature (exact for even integer p below Nyquist)."""
        if p < 1:
            raise DomainError(f"p must be >= 1, got {p}")
        M = grid_size or max(64, 1 << math.ceil(math.log2(8 * (self.max_frequency + 1))))
        vals = np.abs(self.grid_values(M))
        if math.isinf(p):
            return float(np.max(vals))
        cell = (TWO_PI / M) ** self.n
        return float((cell * np.sum(vals**p)) ** (1.0 / p))


def constant_function(n: int, value: complex = 1.0) -> TestFunction:
    return TestFunction(np.zeros((1, n), dtype=np.int64), np.array([value]))


def random_test_function(
    n: int, seed, *, max_freq: int = 3, terms: int = 6
) -> TestFunction:
    """Seeded random trigonometric polynomial with distinct frequencies."""
    rng = np.random.default_rng(seed)
    box = (2 * max_freq + 1) ** n
    if terms > box:
        raise InvalidConfigError(f"cannot draw {terms} distinct modes from {box}")
    flat = rng.choice(box, size=terms, replace=False)
    freqs = np.empty((terms, n), dtype=np.int64)
    for axis in range(n):
        freqs[:, axis] = flat % (2 * max_freq + 1) - max_freq
        flat //= 2 * max_freq + 1
    coeffs = rng.standard_normal(terms) + 1j * rng.standard_normal(terms)
    return TestFunction(freqs, coeffs)


@dataclass(frozen=True)
class GramMatrix:
    """Hermitian Gram matrix of {h e_k} over a cluster; spectrum of h chi h-bar."""

    cluster: SpectralCluster
    h: TestFunction
    G: np.ndarray

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        """Nonincreasing eigenvalues, tiny solver negatives clipped to zero."""
        vals = np.linalg.eigvalsh(self.G)[::-1]
        return np.clip(vals, 0.0, None)

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.G)))


def gram_matrix(cluster: SpectralCluster, h: TestFunction) -> GramMatrix:
    """G_{k,k'} = (2 pi)^-n int |h|^2 exp(i (k - k').x) dx, assembled exactly.

    Equals the |h|^2 Fourier coefficient at k' - k; h identically 1 gives
    the identity.
    """
    if cluster.N == 0:
        raise InvalidConfigError("cluster is empty")
    if h.n != cluster.n:
        raise ShapeError(f"h lives on T^{h.n}, cluster on T^{cluster.n}")
    if cluster.N > EIGENSOLVER_CAP:
        raise CapacityError(
            f"cluster size {cluster.N} exceeds dense-eigensolver cap {EIGENSOLVER_CAP}"
        )
    diffs, vals = h.abs_sq_coefficients
    # dense lookup table over the bounded difference box of |h|^2
    b = h.max_frequency * 2
    table = np.zeros((2 * b + 1,) * cluster.n, dtype=complex)
    table[tuple((diffs + b).T)] = vals
    K = cluster.frequency_array()
    N = cluster.N
    G = np.zeros((N, N), dtype=complex)
    for i0 in range(0, N, 256):
        i1 = min(i0 + 256, N)
        d = K[None, :, :] - K[i0:i1, None, :]  # k' - k
        inside = np.all(np.abs(d) <= b, axis=-1)
        idx = tuple(np.clip(d + b, 0, 2 * b).reshape(-1, cluster.n).T)
        block = np.where(inside, table[idx].reshape(i1 - i0, N), 0.0)
        G[i0:i1] = block
    return GramMatrix(cluster=cluster, h=h, G=G)


@dataclass(frozen=True)
class SchattenReport:
    alpha: float
    value: float
    n: int
    lam: float
    eps: float
    bound_rhs: float | None
    ratio: float | None


def schatten_norm(G: GramMatrix, alpha: float) -> SchattenReport:
    """(sum eig(G)^alpha)^(1/alpha); alpha = inf is the operator norm.

    The trace (alpha = 1) and Frobenius (alpha = 2) cases avoid the
    eigensolver.  Reports attach the reference bound where one exists:
    lam^(n-1) eps ||h||_2^2 at alpha = 1 and lam^((n-1)/(n+1)) ||h||_(n+1)^2
    at the critical alpha = n + 1.
    """
    if alpha < 1:
        raise DomainError(f"Schatten exponent must be >= 1, got {alpha}")
    if alpha == 1:
        value = G.trace
    elif alpha == 2:
        value = float(np.linalg.norm(G.G))
    elif math.isinf(alpha):
        value = float(G.eigenvalues[0])
    else:
        value = float(np.sum(G.eigenvalues**alpha) ** (1.0 / alpha))
    band = G.cluster.band
    n = G.cluster.n
    bound = None
    if alpha == 1:
        bound = band.lam ** (n - 1) * band.eps * G.h.l2_norm_sq
    elif alpha == n + 1:
        bound = band.lam ** ((n - 1) / (n + 1)) * G.h.lp_norm(n + 1) ** 2
    ratio = value / bound if bound else None
    return SchattenReport(
        alpha=alpha, value=value, n=n, lam=band.lam, eps=band.eps,
        bound_rhs=bound, ratio=ratio,
    )


def theorem23_check(cfg: TorusConfig, lam: float, eps: float, h: TestFunction) -> float:
    """Trace norm over the two-term bound, normalized by ||h||_2^2.

    On the torus the trace norm is (2 pi)^-n N ||h||_2^2 exactly, so this
    collapses to a lattice-count ratio, independent of h.
    """
    n_pts = count_band(cfg, SpectralBand(lam, eps))
    if n_pts == 0:
        return 0.0
    two_term = eps * lam ** (cfg.n - 1) + (lam / eps) ** ((cfg.n - 1) / 2)
    return n_pts / (TWO_PI**cfg.n * two_term)


def _pairing_grid_size(subspace: ClusterSubspace, h: TestFunction) -> int:
    band_edge = subspace.cluster.band.upper
    need = 4 * band_edge + 4 * h.max_frequency + 2
    return 1 << max(5, math.ceil(math.log2(need)))


def dual_pairing_check(
    subspace: ClusterSubspace, zeta, h: TestFunction, alpha: float
) -> float:
    """RHS - LHS of the duality pairing; nonnegative up to roundoff.

    LHS = sum_j |zeta_j| int |g_j|^2 |h|^2; RHS = ||h chi h-bar||_{S^alpha'}
    ||zeta||_alpha with chi the full cluster projector and alpha' the
    conjugate exponent.  The weighted density makes the LHS a single grid
    quadrature, exact below the Nyquist rate of the integrand.
    """
    if alpha < 1:
        raise DomainError(f"alpha must be >= 1, got {alpha}")
    zeta = np.asarray(zeta, dtype=float)
    if zeta.shape != (subspace.d,):
        raise ShapeError(f"zeta must have length {subspace.d}, got shape {zeta.shape}")
    az = np.abs(zeta)
    dens = density(subspace, weights=az)
    M = _pairing_grid_size(subspace, h)
    cell = (TWO_PI / M) ** subspace.cluster.n
    lhs = float(np.sum(dens.grid_values(M) * np.abs(h.grid_values(M)) ** 2)) * cell

    G = gram_matrix(subspace.cluster, h)
    alpha_conj = math.inf if alpha == 1 else alpha / (alpha - 1.0)
    op_norm = schatten_norm(G, alpha_conj).value
    zeta_norm = float(np.max(az)) if math.isinf(alpha) else float(
        np.sum(az**alpha) ** (1.0 / alpha)
    )
    return op_norm * zeta_norm - lhs


def opine_chain_check(
    cfg: TorusConfig, lam: float, eps: float, moll: Mollifier, h: TestFunction
) -> float:
    """Fitted C in trace norm: ||h b(.) h-bar||_S1 <= C sum_l w_l ||h chi_l h-bar||_S1.

    b is the squared mollifier, chi_l the unit-band projector at integer l
    and w_l = (1 + |l - lam| / eps)^-2.  Both traces collapse to weighted
    shell sums times (2 pi)^-n ||h||_2^2, which cancels in the ratio; the
    spectrum is truncated at the decay radius of the mollifier.
    """
    radius = moll.decay_radius(1e-14)
    top = lam + eps * radius
    m_hi = int(math.ceil(top * top)) + 1
    counts = shell_counts(cfg, 0, m_hi)
    roots = np.sqrt(np.arange(0, m_hi, dtype=float))
    lhs = float(np.sum(counts * moll.b((roots - lam) / eps)))

    levels = np.arange(0, int(math.ceil(top)) + 1)
    floors = np.floor(roots).astype(np.int64)
    level_counts = np.bincount(floors, weights=counts, minlength=len(levels))[: len(levels)]
    weights = (1.0 + np.abs(levels - lam) / eps) ** -2
    rhs = float(np.sum(weights * level_counts))
    if rhs == 0:
        raise DomainError("empty comparison chain")
    return lhs / rhs
