"""Parameter sweeps, constant fitting and structured result emission.

Every "there exists C" statement upstream becomes an operational triple
here: the max ratio over a geometric lambda grid, the least-squares slope
of log ratio against log lambda, and its standard error.  Bounded ratios
show up as slope approximately zero; scaling laws as slopes matching the
predicted exponent.  Results serialize to a frozen CSV schema and a JSON
document embedding the config hash and seed for reproducibility.
"""
from __future__ import annotations

import hashlib
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy.stats import linregress

from .cluster import density, lp_norm, random_subspace
from .errors import BandlabError, InvalidConfigError, NumericError
from .exponents import corollary_rhs, critical_p, shrink_rate
from .kernels import decompose_diagonal
from .lattice import SpectralBand, TorusConfig, count_band, enumerate_band
from .mollifier import Mollifier
from .schatten import gram_matrix, random_test_function, schatten_norm

TWO_PI = 2 * math.pi
CSV_HEADER = "lambda,epsilon,n_dim,count,bound,ratio,wall_ms"
MODES = ("counts", "kernel", "schatten", "corollary")
EPS_RULES = ("shrink", "fixed", "power")
MAX_FAILURE_FRACTION = 0.2


@dataclass(frozen=True)
class SweepSpec:
    """Declarative description of one sweep run."""

    n: int
    mode: str
    lam_min: float
    lam_max: float
    points: int = 20
    eps_rule: str = "shrink"
    eps_value: float = 1.0
    eps_exponent: float | None = None
    seed: int = 0
    trials: int = 20
    p: float | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.eps_rule not in EPS_RULES:
            raise InvalidConfigError(
                f"eps rule must be one of {EPS_RULES}, got {self.eps_rule!r}"
            )
        if self.eps_rule == "power" and self.eps_exponent is None:
            raise InvalidConfigError("eps rule 'power' needs eps_exponent")
        if not (2 <= self.lam_min <= self.lam_max):
            raise InvalidConfigError(
                f"need 2 <= lam_min <= lam_max, got {self.lam_min}, {self.lam_max}"
            )
        if self.points < 1:
            raise InvalidConfigError(f"points must be >= 1, got {self.points}")
        if self.mode == "corollary":
            if self.p is None:
                raise InvalidConfigError("corollary mode needs an exponent p")
            if not math.isinf(self.p) and self.p < critical_p(self.n):
                raise InvalidConfigError(
                    f"corollary mode needs p >= {critical_p(self.n):g}"
                )

    def lambda_grid(self) -> np.ndarray:
        if self.points == 1:
            return np.array([self.lam_min])
        return np.geomspace(self.lam_min, self.lam_max, self.points)

    def eps_for(self, lam: float) -> float:
        if self.eps_rule == "fixed":
            eps = self.eps_value
        elif self.eps_rule == "shrink":
            eps = shrink_rate(self.n, lam)
        else:
            eps = lam ** (-self.eps_exponent)
        # stay inside the asymptotic regime eps > 1/lam, and inside the band cap
        return float(min(max(eps, 2.0 / lam), 1.0))

    def config_hash(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:12]


@dataclass(frozen=True)
class SweepRow:
    lam: float
    eps: float
    n_dim: int
    count: int
    bound: float
    ratio: float
    wall_ms: float
    p: float | None = None
    dim_r: int | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class FitResult:
    C: float
    slope: float | None
    stderr: float | None


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    rows: tuple[SweepRow, ...]
    fit: FitResult
    count_fit: FitResult | None = None
    fits_by_p: dict = field(default_factory=dict)

    @property
    def meta(self) -> dict:
        return {"seed": self.spec.seed, "config_hash": self.spec.config_hash()}


def fit_constant(rows, column: str = "ratio") -> FitResult:
    """C = max value over successful rows; slope/stderr from log-log OLS."""
    pts = [(r.lam, getattr(r, column)) for r in rows if r.ok and getattr(r, column) > 0]
    if not pts:
        raise NumericError("no successful rows to fit")
    values = [v for _, v in pts]
    C = max(values)
    lams = sorted({lam for lam, _ in pts})
    if len(lams) < 2:
        return FitResult(C=C, slope=None, stderr=None)
    fit = linregress(np.log([p[0] for p in pts]), np.log(values))
    return FitResult(C=C, slope=float(fit.slope), stderr=float(fit.stderr))


# -- per-mode point evaluators ---------------------------------------------


def _counts_point(spec, cfg, lam, eps):
    n_pts = count_band(cfg, SpectralBand(lam, eps))
    bound = lam ** (cfg.n - 1) * eps
    return n_pts, bound, n_pts / bound, None, None


_KERNEL_MOLLIFIER: Mollifier | None = None


def _kernel_mollifier() -> Mollifier:
    global _KERNEL_MOLLIFIER
    if _KERNEL_MOLLIFIER is None:
        _KERNEL_MOLLIFIER = Mollifier()
    return _KERNEL_MOLLIFIER


def _kernel_point(spec, cfg, lam, eps):
    rep = decompose_diagonal(cfg, lam, eps, _kernel_mollifier())
    mismatch = abs(rep.total - rep.reassembled)
    if mismatch > max(1e-8 * abs(rep.total), 100 * rep.quad_error):
        raise NumericError(
            f"decomposition reassembly off by {mismatch:.3e} at lam={lam}, eps={eps}"
        )
    n_pts = count_band(cfg, SpectralBand(lam, eps))
    return n_pts, rep.two_term_bound(), rep.ratio_two_term, None, None


def _schatten_point(spec, cfg, lam, eps):
    cluster = enumerate_band(cfg, SpectralBand(lam, eps))
    if cluster.N == 0:
        raise NumericError(f"empty cluster at lam={lam}, eps={eps}")
    alpha = cfg.n + 1
    worst = 0.0
    for t in range(spec.trials):
        h = random_test_function(cfg.n, (spec.seed, int(round(lam * 1000)), t))
        rep = schatten_norm(gram_matrix(cluster, h), alpha)
        worst = max(worst, rep.ratio)
    bound = lam ** ((cfg.n - 1) / (cfg.n + 1))
    return cluster.N, bound, worst, None, None


def _corollary_rows(spec, cfg, lam, eps, p):
    cluster = enumerate_band(cfg, SpectralBand(lam, eps))
    if cluster.N == 0:
        raise NumericError(f"empty cluster at lam={lam}, eps={eps}")
    N = cluster.N
    dims = sorted({1, math.ceil(N / 4), math.ceil(N / 2), N})
    rows = []
    q = math.inf if math.isinf(p) else p / 2.0
    for dim in dims:
        t0 = time.perf_counter()
        rhs = corollary_rhs(cfg.n, p, lam, eps, dim)
        # max over seeded subspaces; stabilizes the fitted sup constant
        lhs = 0.0
        for t in range(max(1, spec.trials)):
            sub = random_subspace(
                cluster, dim, (spec.seed, int(round(lam * 1000)), dim, t)
            )
            lhs = max(lhs, lp_norm(density(sub), q))
        rows.append(
            SweepRow(
                lam=float(lam), eps=eps, n_dim=cfg.n, count=N, bound=rhs,
                ratio=lhs / rhs, wall_ms=(time.perf_counter() - t0) * 1e3,
                p=p, dim_r=dim,
            )
        )
    return rows


def _evaluate_point(spec: SweepSpec, lam: float) -> list[SweepRow]:
    lam = float(lam)
    cfg = TorusConfig(spec.n)
    eps = spec.eps_for(lam)
    t0 = time.perf_counter()
    try:
        if spec.mode == "corollary":
            return _corollary_rows(spec, cfg, lam, eps, spec.p)
        point = {"counts": _counts_point, "kernel": _kernel_point,
                 "schatten": _schatten_point}[spec.mode]
        count, bound, ratio, p, dim_r = point(spec, cfg, lam, eps)
        wall = (time.perf_counter() - t0) * 1e3
        return [SweepRow(lam=float(lam), eps=eps, n_dim=cfg.n, count=count,
                         bound=bound, ratio=ratio, wall_ms=wall, p=p, dim_r=dim_r)]
    except BandlabError as exc:
        wall = (time.perf_counter() - t0) * 1e3
        return [SweepRow(lam=float(lam), eps=eps, n_dim=cfg.n, count=0, bound=0.0,
                         ratio=0.0, wall_ms=wall, error=f"{type(exc).__name__}: {exc}")]


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Run the selected check over the lambda grid and fit the constants.

    Per-point failures are recorded in their rows and the sweep continues;
    more than 20% failed points aborts with a numeric error.
    """
    grid = spec.lambda_grid()
    if spec.jobs > 1:
        with ThreadPoolExecutor(max_workers=spec.jobs) as pool:
            chunks = list(pool.map(lambda lam: _evaluate_point(spec, lam), grid))
    else:
        chunks = [_evaluate_point(spec, lam) for lam in grid]
    rows = tuple(r for chunk in chunks for r in chunk)
    failed = sum(1 for r in rows if not r.ok)
    if failed > MAX_FAILURE_FRACTION * len(rows):
        raise NumericError(f"{failed}/{len(rows)} sweep points failed")
    fit = fit_constant(rows)
    count_fit = None
    if spec.mode in ("counts", "kernel"):
        count_fit = fit_constant(rows, column="count")
    return SweepResult(spec=spec, rows=rows, fit=fit, count_fit=count_fit)


def corollary_suite(n: int, ps, lam_min: float, lam_max: float, *,
                    points: int = 3, seed: int = 0, trials: int = 8) -> SweepResult:
    """The interpolated-bound suite over several exponents p at once.

    Subspace dimensions {1, N/4, N/2, N} are sampled at every grid point;
    one constant is fitted per p, plus a pooled fit over everything.
    """
    base = None
    all_rows: list[SweepRow] = []
    fits = {}
    for p in ps:
        spec = SweepSpec(n=n, mode="corollary", lam_min=lam_min, lam_max=lam_max,
                         points=points, seed=seed, p=p, trials=trials)
        base = base or spec
        result = run_sweep(spec)
        all_rows.extend(result.rows)
        fits[p] = result.fit
    pooled = fit_constant(all_rows)
    return SweepResult(spec=base, rows=tuple(all_rows), fit=pooled, fits_by_p=fits)


# -- serialization ---------------------------------------------------------


def _row_csv(row: SweepRow, corollary: bool) -> str:
    cells = [f"{row.lam:.10g}", f"{row.eps:.10g}", str(row.n_dim), str(row.count),
             f"{row.bound:.10g}", f"{row.ratio:.10g}", f"{row.wall_ms:.3f}"]
    if corollary:
        cells += [f"{row.p:.6g}" if row.p is not None else "",
                  str(row.dim_r) if row.dim_r is not None else ""]
    if row.error is not None:
        cells.append(row.error.replace(",", ";"))
    return ",".join(cells)


def write_csv(result: SweepResult, path) -> None:
    corollary = result.spec.mode == "corollary"
    header = CSV_HEADER + (",p,dim_r" if corollary else "")
    lines = [f"# config_hash={result.spec.config_hash()} seed={result.spec.seed}",
             header]
    lines += [_row_csv(r, corollary) for r in result.rows]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def result_document(result: SweepResult) -> dict:
    def fit_dict(f):
        return None if f is None else {"slope": f.slope, "stderr": f.stderr, "C": f.C}

    doc = {
        "spec": {k: (str(v) if isinstance(v, float) and math.isinf(v) else v)
                 for k, v in asdict(result.spec).items()},
        "rows": [asdict(r) for r in result.rows],
        "fit": fit_dict(result.fit),
        "meta": result.meta,
    }
    if result.count_fit is not None:
        doc["count_fit"] = fit_dict(result.count_fit)
    if result.fits_by_p:
        doc["fits_by_p"] = {str(p): fit_dict(f) for p, f in result.fits_by_p.items()}
    return doc


def write_json(result: SweepResult, path) -> None:
    with open(path, "w") as fh:
        json.dump(result_document(result), fh, indent=2, default=str)
        fh.write("\n")


def write_svg(result: SweepResult, path) -> None:
    """Static log-log scatter of ratios with the fitted power law."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = [r for r in result.rows if r.ok and r.ratio > 0]
    lams = np.array([r.lam for r in rows])
    ratios = np.array([r.ratio for r in rows])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(lams, ratios, "o", label="ratio")
    if result.fit.slope is not None:
        anchor = ratios[0] / lams[0] ** result.fit.slope
        xs = np.geomspace(lams.min(), lams.max(), 50)
        ax.loglog(xs, anchor * xs**result.fit.slope, "-",
                  label=f"slope {result.fit.slope:.3f}")
    ax.set_xlabel("lambda")
    ax.set_ylabel("ratio")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
