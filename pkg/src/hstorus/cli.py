"""Command-line surface tying the toolkit together.

Subcommands: check, search, dualize, orbit, solve, verify-forms.
Exit codes: 0 success, 1 domain failure (invalid certificate, unsolvable
source, failed identity), 2 usage or parse failure.

All artifacts are JSON (orbit graphs additionally as DOT, grid fields as
raw float64 with a JSON sidecar).  Timestamps never enter artifacts; they
go to a run_meta.json sidecar so archives are byte-reproducible.
"""

from __future__ import annotations

import json
import sys
import time
from pathlib import Path

import click

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import __version__
from .anomaly import SolutionParams, build_certificate
from .forms import run_suite
from .lattice import RANK, LatticeClass
from .poisson import (
    Grid,
    GridTooCoarse,
    NonPositive,
    NonSolvable,
    SourceSpec,
    duality_transport,
    manufactured_case,
    solve as poisson_solve,
    synthesize_and_assemble,
)
from .rationals import parse_rational, rational_to_json
from .tduality import ExtendedParams, dualize, invariance_report, orbit as compute_orbit
from .topology import pi1


def _fail_parse(msg: str):
    click.echo(f"error: {msg}", err=True)
    sys.exit(2)


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        _fail_parse(f"cannot read {path}: {exc}")


def _outdir(ctx) -> Path:
    out = Path(ctx.obj["out"])
    out.mkdir(parents=True, exist_ok=True)
    meta = out / "run_meta.json"
    meta.write_text(json.dumps({"timestamp": time.time(), "version": __version__}))
    return out


@click.group()
@click.option("--config", type=click.Path(), default=None, help="TOML config file (search).")
@click.option("--out", type=click.Path(), default="hstorus_out", help="Output directory.")
@click.option("--seed", type=int, default=0, help="Seed override for synthesized fields.")
@click.option("--json", "json_mode", is_flag=True, help="Machine-readable output.")
@click.option("--threads", type=int, default=1, help="Worker hint (results are schedule-independent).")
@click.version_option(version=__version__)
@click.pass_context
def main(ctx, config, out, seed, json_mode, threads):
    """Certificates, T-duality and anomaly solvers for K3 torus-bundle geometries."""
    ctx.ensure_object(dict)
    ctx.obj.update(config=config, out=out, seed=seed, json=json_mode, threads=threads)


@main.command()
@click.argument("params_file", type=click.Path())
@click.pass_context
def check(ctx, params_file):
    """Build the existence certificate for a parameter file."""
    data = _load_json(params_file)
    try:
        params = SolutionParams.from_json(data)
    except (KeyError, ValueError, TypeError) as exc:
        _fail_parse(f"bad parameter file: {exc}")
    cert = build_certificate(params)
    out = _outdir(ctx)
    (out / "certificate.json").write_text(cert.dumps())
    if ctx.obj["json"]:
        click.echo(cert.dumps())
    else:
        for c in cert.checks:
            click.echo(f"  [{'ok' if c.ok else 'FAIL'}] {c.name:12s} {c.detail}")
        click.echo(f"certificate {'VALID' if cert.valid else 'INVALID'}; "
                   f"c2(W) = {cert.c2W}, pi1 = {cert.pi1}, h2 rank = {cert.h2rank}")
    sys.exit(0 if cert.valid else 1)


_BASIS_NAMES = {
    "e1": 0, "f1": 1, "e2": 2, "f2": 3, "e3": 4, "f3": 5,
    **{f"g1_{i + 1}": 6 + i for i in range(8)},
    **{f"g2_{i + 1}": 14 + i for i in range(8)},
}


def _parse_class(entry) -> LatticeClass:
    """A lattice class in config form: 22-int array or {basis_name: coeff} table."""
    if isinstance(entry, list):
        return LatticeClass.from_json(entry)
    if isinstance(entry, dict):
        coords = [0] * RANK
        for name, coeff in entry.items():
            if name not in _BASIS_NAMES:
                raise ValueError(f"unknown basis name {name!r}")
            coords[_BASIS_NAMES[name]] = int(coeff)
        return LatticeClass(tuple(coords))
    raise ValueError(f"bad lattice class entry: {entry!r}")


@main.command()
@click.pass_context
def search(ctx):
    """Enumerate a parameter box from --config and archive valid certificates."""
    if not ctx.obj["config"]:
        _fail_parse("search requires --config")
    try:
        cfg = tomllib.loads(Path(ctx.obj["config"]).read_text())["search"]
        k1s = [_parse_class(e) for e in cfg["kappa1"]]
        k2s = [_parse_class(e) for e in cfg["kappa2"]]
        ts = [parse_rational(v) for v in cfg["t"]]
        alphas = [parse_rational(v) for v in cfg["alpha"]]
        r_min, r_max = int(cfg["r_min"]), int(cfg["r_max"])
        max_cells = int(cfg.get("max_cells", 100_000))
    except (OSError, KeyError, ValueError, tomllib.TOMLDecodeError) as exc:
        _fail_parse(f"bad config: {exc}")
    cells = len(k1s) * len(k2s) * len(ts) * len(alphas) * max(0, r_max - r_min + 1)
    if cells > max_cells:
        _fail_parse(f"search box has {cells} cells, above max_cells = {max_cells}")

    out = _outdir(ctx)
    certs_dir = out / "certs"
    certs_dir.mkdir(exist_ok=True)
    summary: dict[tuple, int] = {}
    n_valid = 0
    index = 0
    for k1 in k1s:
        for k2 in k2s:
            for tv in ts:
                for av in alphas:
                    for r in range(r_min, r_max + 1):
                        index += 1
                        try:
                            p = SolutionParams(k1, k2, tv, av, r)
                        except ValueError:
                            continue
                        cert = build_certificate(p)
                        if cert.valid:
                            n_valid += 1
                            (certs_dir / f"cert_{index:06d}.json").write_text(cert.dumps())
                            key = (str(cert.c2W), r, str(cert.pi1))
                            summary[key] = summary.get(key, 0) + 1
    rows = [
        {"c2W": c2, "r": r, "pi1": g, "count": n}
        for (c2, r, g), n in sorted(summary.items())
    ]
    report = {"cells": cells, "valid": n_valid, "by_c2_r_pi1": rows, "version": __version__}
    (out / "summary.json").write_text(json.dumps(report, indent=2))
    if ctx.obj["json"]:
        click.echo(json.dumps(report, indent=2))
    else:
        click.echo(f"{n_valid} valid certificates out of {cells} cells")
        for row in rows:
            click.echo(f"  c2W={row['c2W']:>4s} r={row['r']:<3d} pi1={row['pi1']:<12s} x{row['count']}")
    sys.exit(0)


@main.command(name="dualize")
@click.argument("params_file", type=click.Path())
@click.pass_context
def dualize_cmd(ctx, params_file):
    """T-dualize a parameter file; writes dual params and invariance report."""
    data = _load_json(params_file)
    try:
        params = SolutionParams.from_json(data)
    except (KeyError, ValueError, TypeError) as exc:
        _fail_parse(f"bad parameter file: {exc}")
    try:
        dual = dualize(params)
    except ValueError as exc:
        click.echo(f"cannot dualize: {exc}", err=True)
        sys.exit(1)
    report = invariance_report(ExtendedParams.from_params(params), ExtendedParams.from_params(dual))
    out = _outdir(ctx)
    (out / "dual_params.json").write_text(json.dumps(dual.to_json(), indent=2))
    (out / "invariance.json").write_text(json.dumps(report.to_json(), indent=2))
    payload = {
        "dual": dual.to_json(),
        "invariance": report.to_json(),
        "pi1_original": pi1(params.kappa1, params.kappa2).to_json(),
        "pi1_dual": pi1(dual.kappa1, dual.kappa2).to_json(),
    }
    if ctx.obj["json"]:
        click.echo(json.dumps(payload, indent=2))
    else:
        click.echo(f"t' = {dual.t}, alpha = {dual.alpha}, r = {dual.r}")
        click.echo(f"invariants equal: {report.all_invariants_equal}")
        click.echo(f"pi1: {pi1(params.kappa1, params.kappa2)} -> {pi1(dual.kappa1, dual.kappa2)}")
    sys.exit(0 if report.all_invariants_equal else 1)


@main.command(name="orbit")
@click.argument("params_file", type=click.Path())
@click.option("--max-nodes", type=int, default=64)
@click.option("--denominator-bound", type=int, default=8)
@click.pass_context
def orbit_cmd(ctx, params_file, max_nodes, denominator_bound):
    """Enumerate the duality orbit of an extended parameter file (DOT + JSON)."""
    data = _load_json(params_file)
    try:
        if "t1" in data:
            params = ExtendedParams.from_json(data)
        else:
            params = ExtendedParams.from_params(SolutionParams.from_json(data))
    except (KeyError, ValueError, TypeError) as exc:
        _fail_parse(f"bad parameter file: {exc}")
    graph = compute_orbit(params, max_nodes=max_nodes, denominator_bound=denominator_bound)
    out = _outdir(ctx)
    (out / "orbit.json").write_text(graph.dumps())
    (out / "orbit.dot").write_text(graph.to_dot())
    if ctx.obj["json"]:
        click.echo(graph.dumps())
    else:
        click.echo(f"{len(graph.nodes)} nodes, truncated={graph.truncated}")
        for key in graph.node_keys():
            click.echo(f"  {graph.nodes[key].label()}")
    sys.exit(0)


@main.command(name="solve")
@click.argument("spec_file", type=click.Path(), required=False)
@click.option("--manufactured", is_flag=True, help="Run the known-solution oracle case.")
@click.option("--grid-size", type=int, default=16)
@click.option("--grid-dim", type=int, default=4)
@click.option("--gauge", type=float, default=None, help="Mean of e^u (positive).")
@click.option("--tol", type=float, default=1e-12)
@click.option("--transport/--no-transport", default=True, help="Also audit u' = u transport.")
@click.pass_context
def solve_cmd(ctx, spec_file, manufactured, grid_size, grid_dim, gauge, tol, transport):
    """Solve -2*Delta(e^u) = f on the flat proxy geometry."""
    import numpy as np

    out = _outdir(ctx)
    grid = Grid((grid_size,) * grid_dim, (1.0,) * grid_dim)
    if manufactured:
        u_star, f, auto_gauge = manufactured_case(grid)
        try:
            u, report = poisson_solve(f, gauge if gauge is not None else auto_gauge, tol=max(tol, 1e-9))
        except (NonSolvable, NonPositive) as exc:
            click.echo(f"solve failed: {exc}", err=True)
            sys.exit(1)
        err = float(np.abs(u.values - u_star.values).max())
        payload = {"manufactured_error": err, "residual": report.to_json()}
        u.save(out / "u.f64", field_name="u")
        (out / "residual.json").write_text(json.dumps(payload, indent=2))
        click.echo(json.dumps(payload) if ctx.obj["json"] else f"max|u - u*| = {err:.3e}")
        sys.exit(0)

    if not spec_file:
        _fail_parse("provide a source spec file or --manufactured")
    data = _load_json(spec_file)
    try:
        spec = SourceSpec.from_json(data)
        if ctx.obj["seed"]:
            spec = SourceSpec.from_json({**data, "seed": ctx.obj["seed"]})
    except (KeyError, ValueError, TypeError) as exc:
        _fail_parse(f"bad source spec: {exc}")
    try:
        f = synthesize_and_assemble(spec, grid)
    except GridTooCoarse as exc:
        click.echo(f"solve failed: {exc}", err=True)
        sys.exit(1)
    if gauge is None:
        # safe default: well above the zero-mean part's swing
        gauge = 10.0 * float(np.abs(f.values).max()) + 1.0
    try:
        u, report = poisson_solve(f, gauge, tol=tol)
    except (NonSolvable, NonPositive) as exc:
        click.echo(f"solve failed: {exc}", err=True)
        sys.exit(1)
    payload = {"residual": report.to_json()}
    if transport:
        payload["transport"] = duality_transport(u, spec).to_json()
    u.save(out / "u.f64", field_name="u")
    (out / "residual.json").write_text(json.dumps(payload, indent=2))
    if ctx.obj["json"]:
        click.echo(json.dumps(payload, indent=2))
    else:
        click.echo(f"relative residual = {report.relative_residual:.3e}, min v = {report.min_v:.4g}")
        if transport:
            click.echo(f"transport source diff = {payload['transport']['source_max_diff']}")
    sys.exit(0)


@main.command(name="verify-forms")
@click.pass_context
def verify_forms(ctx):
    """Run the builtin differential-form identity suite."""
    results = run_suite()
    out = _outdir(ctx)
    payload = [r.to_json() for r in results]
    (out / "forms_suite.json").write_text(json.dumps(payload, indent=2))
    if ctx.obj["json"]:
        click.echo(json.dumps(payload, indent=2))
    else:
        for r in results:
            click.echo(f"  [{'pass' if r.passed else 'FAIL'}] {r.name}")
            if not r.passed:
                click.echo(f"        witness: {r.witness!r}")
        click.echo(f"{sum(r.passed for r in results)}/{len(results)} identities pass")
    sys.exit(0 if all(r.passed for r in results) else 1)


if __name__ == "__main__":
    main()
