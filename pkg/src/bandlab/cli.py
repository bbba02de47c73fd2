"""Command-line front door; a thin HTTP client of the service layer.

By default requests are served in-process through an ASGI transport, so
no server needs to run; `--server URL` targets a remote instance started
with `bandlab serve`.  Exit codes: 0 success, 1 validation error,
2 numeric failure, 3 capacity error.
"""
from __future__ import annotations

import asyncio
import json
import sys

import click
import httpx

CSV_HEADER = "lambda,epsilon,n_dim,count,bound,ratio,wall_ms"

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERIC = 2
EXIT_CAPACITY = 3


def _read_config(path):
    """key=value defaults file; '#' starts a comment, flags take precedence."""
    if path is None:
        return {}
    out = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise click.UsageError(f"bad config line (need key=value): {raw!r}")
            key, value = line.split("=", 1)
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _merged(ctx, **flags):
    """Fill flags the user left unset from the config file."""
    config = ctx.obj["config"]
    out = {}
    for key, value in flags.items():
        if value is None or (isinstance(value, tuple) and not value):
            out[key] = config.get(key, value)
        else:
            out[key] = value
    return out


def _post(ctx, path, payload):
    server = ctx.obj["server"]
    payload = {k: v for k, v in payload.items() if v is not None}
    if server:
        return httpx.post(server.rstrip("/") + path, json=payload, timeout=900.0)

    async def go():
        from .service import create_app

        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(
            transport=transport, base_url="http://bandlab", timeout=900.0
        ) as client:
            return await client.post(path, json=payload)

    return asyncio.run(go())


def _finish(resp, render=None) -> int:
    if resp.status_code < 300:
        if render is not None:
            render(resp.json())
        else:
            click.echo(json.dumps(resp.json(), indent=2))
        return EXIT_OK
    click.echo(resp.text, err=True)
    if resp.status_code == 413:
        return EXIT_CAPACITY
    if resp.status_code in (400, 422):
        return EXIT_VALIDATION
    return EXIT_NUMERIC


@click.group()
@click.option("--server", default=None, help="Remote service URL (default: in-process).")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="key=value file supplying flag defaults.")
@click.pass_context
def cli(ctx, server, config_path):
    """Spectral-band laboratory on the flat torus."""
    ctx.obj = {"server": server, "config": _read_config(config_path)}


@cli.command()
@click.option("--n", type=int, default=None, help="Torus dimension (default 2).")
@click.option("--lambda", "lam", type=float, required=True, help="Band start.")
@click.option("--eps", type=float, required=True, help="Band width.")
@click.option("--list/--no-list", "list_points", default=True,
              help="Also print the frequency vectors.")
@click.option("--oracle", is_flag=True, help="Use the brute-force cube scan.")
@click.pass_context
def count(ctx, n, lam, eps, list_points, oracle):
    """Enumerate or count one spectral band."""
    args = _merged(ctx, n=n)
    payload = {"n": int(args["n"] or 2), "lambda": lam, "eps": eps,
               "list_points": list_points, "oracle": oracle}

    def render(doc):
        click.echo(doc["count"])
        for k in doc.get("freqs") or []:
            click.echo(" ".join(str(c) for c in k))
        click.echo(f"# config_hash={doc['config_hash']}")

    return _finish(_post(ctx, "/count/band", payload), render)


@cli.command()
@click.option("--n", type=int, default=None)
@click.option("--lambda", "lam", type=float, required=True)
@click.option("--eps", type=float, required=True)
@click.option("--dim", type=int, default=None, help="Subspace dimension (default: full).")
@click.option("--seed", type=int, default=None)
@click.option("--q", "qs", multiple=True, help="L^q exponents (repeatable; 'inf' allowed).")
@click.pass_context
def density(ctx, n, lam, eps, dim, seed, qs):
    """Norms of a random cluster-subspace density."""
    args = _merged(ctx, n=n, seed=seed, qs=qs)
    payload = {"n": int(args["n"] or 2), "lambda": lam, "eps": eps, "dim": dim,
               "seed": int(args["seed"] or 0),
               "qs": list(args["qs"]) if args["qs"] else None}
    return _finish(_post(ctx, "/density/norms", payload))


@cli.command()
@click.option("--n", type=int, default=None)
@click.option("--lambda", "lam", type=float, required=True)
@click.option("--eps", type=float, required=True)
@click.pass_context
def kernel(ctx, n, lam, eps):
    """Diagonal kernel decomposition report."""
    args = _merged(ctx, n=n)
    payload = {"n": int(args["n"] or 2), "lambda": lam, "eps": eps}
    return _finish(_post(ctx, "/kernel/diagonal", payload))


@cli.command()
@click.option("--n", type=int, default=None)
@click.option("--lambda", "lam", type=float, default=None)
@click.option("--eps", type=float, default=None)
@click.option("--gaussian-width", type=float, default=None,
              help="Bypass the mollifier; classical Poisson self-test.")
@click.pass_context
def poisson(ctx, n, lam, eps, gaussian_width):
    """Smoothed periodization check."""
    args = _merged(ctx, n=n, lam=lam, eps=eps)
    payload = {"n": int(args["n"] or 2),
               "lambda": float(args["lam"]) if args["lam"] is not None else 10.0,
               "eps": float(args["eps"]) if args["eps"] is not None else 0.5,
               "gaussian_width": gaussian_width}
    return _finish(_post(ctx, "/kernel/poisson", payload))


@cli.command()
@click.option("--n", type=int, default=None)
@click.option("--lambda", "lam", type=float, required=True)
@click.option("--eps", type=float, required=True)
@click.option("--alpha", default="1", help="Schatten exponent ('inf' allowed).")
@click.option("--seed", type=int, default=None)
@click.option("--terms", type=int, default=None, help="Modes in the random h.")
@click.option("--max-freq", type=int, default=None, help="Frequency box of h.")
@click.pass_context
def schatten(ctx, n, lam, eps, alpha, seed, terms, max_freq):
    """Schatten norm of h chi h-bar for a seeded random h."""
    args = _merged(ctx, n=n, seed=seed, terms=terms, max_freq=max_freq)
    payload = {"n": int(args["n"] or 2), "lambda": lam, "eps": eps, "alpha": alpha,
               "seed": int(args["seed"] or 0),
               "terms": int(args["terms"]) if args["terms"] else None,
               "max_freq": int(args["max_freq"]) if args["max_freq"] else None}
    return _finish(_post(ctx, "/schatten", payload))


@cli.command()
@click.option("--n", type=int, default=None)
@click.option("--p", "ps", multiple=True, help="Exponents (repeatable; 'inf' allowed).")
@click.pass_context
def exponents(ctx, n, ps):
    """Exponent profile table for dimension n."""
    args = _merged(ctx, n=n, ps=ps)
    payload = {"n": int(args["n"] or 2), "ps": list(args["ps"]) if args["ps"] else None}

    def render(doc):
        header = f"{'p':>10} {'sigma':>10} {'alpha':>10} {'eps_power':>10} {'critical_p':>11}"
        click.echo(header)
        def num(v):
            return str(v) if isinstance(v, str) else f"{v:.6g}"

        for row in doc["profiles"]:
            power = "-" if row["eps_power"] is None else f"{row['eps_power']:.6g}"
            click.echo(f"{num(row['p']):>10} {row['sigma']:>10.6g} "
                       f"{num(row['alpha']):>10} {power:>10} {row['critical_p']:>11.6g}")
        click.echo(f"# config_hash={doc['config_hash']}")

    return _finish(_post(ctx, "/exponents", payload), render)


def _csv_from_doc(doc) -> str:
    corollary = doc["spec"]["mode"] == "corollary"
    header = CSV_HEADER + (",p,dim_r" if corollary else "")
    lines = [f"# config_hash={doc['meta']['config_hash']} seed={doc['meta']['seed']}",
             header]
    for r in doc["rows"]:
        cells = [f"{r['lam']:.10g}", f"{r['eps']:.10g}", str(r["n_dim"]),
                 str(r["count"]), f"{r['bound']:.10g}", f"{r['ratio']:.10g}",
                 f"{r['wall_ms']:.3f}"]
        if corollary:
            cells += [str(r.get("p") or ""), str(r.get("dim_r") or "")]
        if r.get("error"):
            cells.append(str(r["error"]).replace(",", ";"))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _svg_from_doc(doc, path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import numpy as np

    rows = [r for r in doc["rows"] if not r.get("error") and r["ratio"] > 0]
    lams = np.array([r["lam"] for r in rows])
    ratios = np.array([r["ratio"] for r in rows])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(lams, ratios, "o", label="ratio")
    slope = (doc.get("fit") or {}).get("slope")
    if slope is not None:
        anchor = ratios[0] / lams[0] ** slope
        xs = np.geomspace(lams.min(), lams.max(), 50)
        ax.loglog(xs, anchor * xs**slope, "-", label=f"slope {slope:.3f}")
    ax.set_xlabel("lambda")
    ax.set_ylabel("ratio")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


@cli.command()
@click.option("--mode", type=click.Choice(["counts", "kernel", "schatten", "corollary"]),
              default=None)
@click.option("--n", type=int, default=None)
@click.option("--lambda-min", type=float, default=None)
@click.option("--lambda-max", type=float, default=None)
@click.option("--points", type=int, default=None)
@click.option("--eps", default=None,
              help="Band-width rule: 'shrink', a fixed number, or 'power:X'.")
@click.option("--seed", type=int, default=None)
@click.option("--trials", type=int, default=None)
@click.option("--p", default=None, help="Exponent for corollary mode ('inf' allowed).")
@click.option("--jobs", type=int, default=None)
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "svg"]), default="json")
@click.option("--out", type=click.Path(), default=None, help="Output path (default stdout).")
@click.pass_context
def sweep(ctx, mode, n, lambda_min, lambda_max, points, eps, seed, trials, p, jobs,
          fmt, out):
    """Run a full sweep suite and emit CSV/JSON/SVG."""
    args = _merged(ctx, mode=mode, n=n, lambda_min=lambda_min, lambda_max=lambda_max,
                   points=points, eps=eps, seed=seed, trials=trials, p=p, jobs=jobs)
    if args["mode"] is None:
        raise click.UsageError("--mode is required (flag or config file)")
    if args["lambda_min"] is None or args["lambda_max"] is None:
        raise click.UsageError("--lambda-min and --lambda-max are required")
    payload = {
        "n": int(args["n"] or 2), "mode": args["mode"],
        "lambda_min": float(args["lambda_min"]), "lambda_max": float(args["lambda_max"]),
        "points": int(args["points"]) if args["points"] else None,
        "seed": int(args["seed"]) if args["seed"] else None,
        "trials": int(args["trials"]) if args["trials"] else None,
        "p": args["p"], "jobs": int(args["jobs"]) if args["jobs"] else None,
    }
    rule = args["eps"]
    if rule is not None:
        rule = str(rule)
        if rule == "shrink":
            payload["eps_rule"] = "shrink"
        elif rule.startswith("power:"):
            payload["eps_rule"] = "power"
            payload["eps_exponent"] = float(rule.split(":", 1)[1])
        else:
            payload["eps_rule"] = "fixed"
            payload["eps_value"] = float(rule)
    resp = _post(ctx, "/sweep", payload)
    if resp.status_code >= 300:
        return _finish(resp)
    doc = resp.json()
    if fmt == "json":
        text = json.dumps(doc, indent=2) + "\n"
        if out:
            with open(out, "w") as fh:
                fh.write(text)
        else:
            click.echo(text, nl=False)
    elif fmt == "csv":
        text = _csv_from_doc(doc)
        if out:
            with open(out, "w") as fh:
                fh.write(text)
        else:
            click.echo(text, nl=False)
    else:
        if not out:
            raise click.UsageError("--format svg requires --out")
        _svg_from_doc(doc, out)
    return EXIT_OK


@cli.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(host, port):
    """Run the HTTP service with uvicorn."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


def main(argv=None) -> int:
    try:
        code = cli.main(args=argv, standalone_mode=False)
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        return EXIT_VALIDATION
    except click.exceptions.Abort:
        return EXIT_VALIDATION
    except httpx.HTTPError as exc:
        print(f"transport error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return int(code) if isinstance(code, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
