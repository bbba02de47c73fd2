"""FastAPI application wiring the laboratory modules to HTTP endpoints.

Domain errors map onto status codes: invalid inputs to 400, capacity
guards to 413, numeric failures to 500.  The CLI drives this app
in-process through an ASGI transport; a real server is only needed for
remote use.
"""
from __future__ import annotations

import math
from dataclasses import asdict

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..cluster import density, lp_norm, random_subspace, sup_norm_bracket
from ..errors import (
    BandlabError,
    CapacityError,
    DomainError,
    InvalidConfigError,
    NumericError,
    RangeError,
    ShapeError,
    SubspaceValidationError,
)
from ..experiments import SweepSpec, result_document, run_sweep
from ..exponents import profile_table
from ..kernels import decompose_diagonal, periodized_diagonal_check
from ..lattice import (
    SpectralBand,
    TorusConfig,
    band_norm_range,
    brute_force_band_oracle,
    count_ball,
    enumerate_band,
    shell_multiplicity,
    unit_ball_volume,
)
from ..mollifier import Mollifier
from ..schatten import gram_matrix, random_test_function, schatten_norm
from . import schemas

TWO_PI = 2 * math.pi

_VALIDATION_ERRORS = (
    InvalidConfigError,
    DomainError,
    ShapeError,
    SubspaceValidationError,
    RangeError,
)


def _jsonable(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return x


def create_app() -> FastAPI:
    app = FastAPI(title="bandlab", version=__version__)
    mollifier = Mollifier()

    @app.exception_handler(BandlabError)
    async def _domain_error(request: Request, exc: BandlabError):
        if isinstance(exc, _VALIDATION_ERRORS):
            status = 400
        elif isinstance(exc, CapacityError):
            status = 413
        else:
            status = 500
        body = schemas.ErrorResponse(error=type(exc).__name__, detail=str(exc))
        return JSONResponse(status_code=status, content=body.model_dump())

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/count/band", response_model=schemas.CountBandResponse,
              response_model_exclude_none=True)
    def count_band_endpoint(req: schemas.CountBandRequest):
        cfg = TorusConfig(req.n)
        band = SpectralBand(req.lam, req.eps)
        m_lo, m_hi = band_norm_range(band)
        if req.oracle:
            cluster = brute_force_band_oracle(cfg, band)
        else:
            cluster = enumerate_band(cfg, band)
        freqs = [list(f.k) for f in cluster.freqs] if req.list_points else None
        return schemas.CountBandResponse(
            config_hash=req.config_hash(), n=req.n, lam=req.lam, eps=req.eps,
            count=cluster.N, m_lo=m_lo, m_hi=m_hi, freqs=freqs,
        )

    @app.post("/count/ball", response_model=schemas.CountBallResponse)
    def count_ball_endpoint(req: schemas.CountBallRequest):
        cfg = TorusConfig(req.n)
        count = count_ball(cfg, req.r)
        main = unit_ball_volume(req.n) * req.r**req.n
        return schemas.CountBallResponse(
            config_hash=req.config_hash(), n=req.n, r=req.r, count=count,
            weyl_main=main, remainder=count - main,
        )

    @app.post("/count/shell", response_model=schemas.ShellResponse)
    def shell_endpoint(req: schemas.ShellRequest):
        cfg = TorusConfig(req.n)
        return schemas.ShellResponse(
            config_hash=req.config_hash(), n=req.n, m=req.m,
            multiplicity=shell_multiplicity(cfg, req.m),
        )

    @app.post("/exponents", response_model=schemas.ExponentsResponse)
    def exponents_endpoint(req: schemas.ExponentsRequest):
        profiles = profile_table(req.n, req.ps)
        models = [
            schemas.ExponentProfileModel(
                n=p.n, p=_jsonable(p.p), sigma=p.sigma, alpha=_jsonable(p.alpha),
                eps_power=p.eps_power, critical_p=p.critical_p,
            )
            for p in profiles
        ]
        return schemas.ExponentsResponse(config_hash=req.config_hash(), profiles=models)

    @app.post("/density/norms", response_model=schemas.DensityResponse)
    def density_endpoint(req: schemas.DensityRequest):
        cfg = TorusConfig(req.n)
        cluster = enumerate_band(cfg, SpectralBand(req.lam, req.eps))
        if cluster.N == 0:
            raise DomainError("empty cluster: no lattice points in the band")
        dim = req.dim if req.dim is not None else cluster.N
        sub = random_subspace(cluster, dim, req.seed)
        dens = density(sub)
        norms = {str(_jsonable(q)): lp_norm(dens, q) for q in req.qs}
        return schemas.DensityResponse(
            config_hash=req.config_hash(), n=req.n, lam=req.lam, eps=req.eps,
            cluster_size=cluster.N, dim=dim, seed=req.seed, trace=dens.trace,
            norms=norms, sup_bracket=sup_norm_bracket(dens),
        )

    @app.post("/kernel/diagonal", response_model=schemas.KernelResponse)
    def kernel_endpoint(req: schemas.KernelRequest):
        cfg = TorusConfig(req.n)
        rep = decompose_diagonal(cfg, req.lam, req.eps, mollifier)
        fields = asdict(rep)
        fields.pop("n")
        fields.pop("lam")
        fields.pop("eps")
        return schemas.KernelResponse(
            config_hash=req.config_hash(), n=req.n, lam=req.lam, eps=req.eps, **fields
        )

    @app.post("/kernel/poisson", response_model=schemas.PoissonResponse)
    def poisson_endpoint(req: schemas.PoissonRequest):
        cfg = TorusConfig(req.n)
        rep = periodized_diagonal_check(
            cfg, req.lam, req.eps, mollifier, gaussian_width=req.gaussian_width
        )
        return schemas.PoissonResponse(
            config_hash=req.config_hash(), n=req.n, **asdict(rep)
        )

    @app.post("/schatten", response_model=schemas.SchattenResponse)
    def schatten_endpoint(req: schemas.SchattenRequest):
        cfg = TorusConfig(req.n)
        cluster = enumerate_band(cfg, SpectralBand(req.lam, req.eps))
        if cluster.N == 0:
            raise DomainError("empty cluster: no lattice points in the band")
        h = random_test_function(req.n, req.seed, max_freq=req.max_freq,
                                 terms=req.terms)
        G = gram_matrix(cluster, h)
        rep = schatten_norm(G, req.alpha)
        expected_trace = cluster.N * h.l2_norm_sq / TWO_PI**req.n
        trace_err = abs(G.trace - expected_trace) / expected_trace
        return schemas.SchattenResponse(
            config_hash=req.config_hash(), n=req.n, lam=req.lam, eps=req.eps,
            alpha=_jsonable(req.alpha), value=rep.value, bound_rhs=rep.bound_rhs,
            ratio=rep.ratio, cluster_size=cluster.N, seed=req.seed,
            trace_identity_rel_err=trace_err,
        )

    @app.post("/sweep")
    def sweep_endpoint(req: schemas.SweepRequest):
        spec = SweepSpec(
            n=req.n, mode=req.mode, lam_min=req.lam_min, lam_max=req.lam_max,
            points=req.points, eps_rule=req.eps_rule, eps_value=req.eps_value,
            eps_exponent=req.eps_exponent, seed=req.seed, trials=req.trials,
            p=req.p, jobs=req.jobs,
        )
        doc = result_document(run_sweep(spec))
        return _sanitize(doc)

    return app


def _sanitize(obj):
    """Replace non-JSON floats recursively; keep everything else as-is."""
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj
