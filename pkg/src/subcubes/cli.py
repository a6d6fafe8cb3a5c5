"""Command-line front door: subcommand dispatch, seeding, CSV/JSON emission.

Every run is reproducible from (subcommand, parameters, seed). Per-trial
random streams are derived with numpy's SeedSequence.spawn, so increasing a
trial count never perturbs earlier trials.

CSV: comma-separated, '.' decimal, 17-significant-digit floats. JSON: UTF-8
with NaN/Inf rejected; fields that are undefined at the requested parameters
are omitted instead.
"""

from __future__ import annotations

import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import click
import numpy as np

from . import analytic, decimation, energy, instance as inst_mod, walkdyn, xsat
from .numerics import DEFAULT_TOL, Tolerances

LN2 = math.log(2.0)


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _write_csv(path: str, sections: list[tuple[list[str], list[list]]]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for header, rows in sections:
            w.writerow(header)
            for row in rows:
                w.writerow([_fmt(v) for v in row])


def _write_json(path: str, doc) -> None:
    def clean(obj):
        if isinstance(obj, float) and not math.isfinite(obj):
            return None
        if isinstance(obj, dict):
            return {k: clean(v) for k, v in obj.items() if clean(v) is not None}
        if isinstance(obj, list):
            return [clean(v) for v in obj]
        return obj

    with open(path, "w", encoding="utf-8") as fh:
        json.dump(clean(doc), fh, allow_nan=False)
        fh.write("\n")


def _emit(ctx, default_stem: str, sections, doc) -> str:
    fmt = ctx.obj["format"]
    out = ctx.obj["out"] or f"{default_stem}.{fmt}"
    if fmt == "csv":
        _write_csv(out, sections)
    else:
        _write_json(out, doc)
    return out


def _tol(ctx) -> Tolerances:
    t = ctx.obj["tol"]
    if t is None:
        return DEFAULT_TOL
    return Tolerances(root_tol=t, opt_tol=max(t, 1e-13))


def _fail(exc: Exception):
    raise click.ClickException(str(exc))


@click.group()
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Output data file (default: <subcommand>.<format>).")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
              default="csv", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True,
              help="64-bit master seed.")
@click.option("--threads", type=int, default=os.cpu_count() or 1,
              help="Worker threads for parallel-across-trials paths "
                   "[default: available cores].")
@click.option("--tol", type=float, default=None,
              help="Root/optimizer tolerance override.")
@click.pass_context
def main(ctx, out, fmt, seed, threads, tol):
    """Random-subcube solution spaces: analytics, instances, dynamics."""
    if threads < 1:
        raise click.UsageError("--threads must be >= 1")
    ctx.obj = {"out": out, "format": fmt, "seed": seed,
               "threads": threads, "tol": tol}


# ---------------------------------------------------------------------------
# phase


@main.command()
@click.option("--alpha", type=float, multiple=True, required=True,
              help="Constraint density; repeatable for a sweep.")
@click.option("--p", type=float, required=True, help="Freezing probability.")
@click.pass_context
def phase(ctx, alpha, p):
    """Phase report rows at fixed p. Phase regions are right-closed: a point
    sitting exactly on a threshold is labeled with the higher-alpha phase."""
    tol = _tol(ctx)
    rows = []
    docs = []
    try:
        for a in alpha:
            r = analytic.phase_report(analytic.ModelPoint(a, p), tol)
            rows.append([r.alpha, r.p, r.phase, r.s_tot, r.s_star,
                         r.sigma_star, r.m])
            docs.append({"alpha": r.alpha, "p": r.p, "phase": r.phase,
                         "s_tot": r.s_tot, "s_star": r.s_star,
                         "sigma_star": r.sigma_star, "m": r.m,
                         "alpha_d": r.alpha_d, "alpha_c": r.alpha_c,
                         "alpha_s": r.alpha_s})
    except ValueError as exc:
        _fail(exc)
    header = ["alpha", "p", "phase", "s_tot", "s_star", "sigma_star", "m"]
    out = _emit(ctx, "phase", [(header, rows)], {"points": docs})
    last = docs[-1]
    click.echo(f"phase={last['phase']} alpha={_fmt(last['alpha'])} "
               f"p={_fmt(last['p'])} s_tot={_fmt(last['s_tot'])} "
               f"s_star={_fmt(last['s_star'])} "
               f"sigma_star={_fmt(last['sigma_star'])} m={_fmt(last['m'])} "
               f"-> {out}")


# ---------------------------------------------------------------------------
# xsat


@main.command(name="xsat")
@click.option("--p", type=float, required=True)
@click.option("--xsteps", type=int, default=512, show_default=True,
              help="Grid points on [0,1].")
@click.pass_context
def xsat_cmd(ctx, p, xsteps):
    """x-satisfiability curve alpha_s(x) plus the auxiliary thresholds."""
    tol = _tol(ctx)
    try:
        alpha_c = analytic.thresholds(p)[1]
        if xsat.is_degenerate(p):
            x0 = alpha_sep = alpha_gap = math.nan
        else:
            x0, alpha_sep, alpha_gap = xsat.auxiliary_thresholds(p, tol)
        xs = np.linspace(0.0, 1.0, xsteps)
        curve = [(float(x), xsat.xsat_threshold(float(x), p, tol)) for x in xs]
    except ValueError as exc:
        _fail(exc)
    sections = [
        (["x0", "alpha_sep", "alpha_gap", "alpha_c"],
         [[x0, alpha_sep, alpha_gap, alpha_c]]),
        (["x", "alpha_s"], [list(row) for row in curve]),
    ]
    doc = {"p": p, "x0": x0, "alpha_sep": alpha_sep, "alpha_gap": alpha_gap,
           "alpha_c": alpha_c,
           "curve": [{"x": x, "alpha_s": a} for x, a in curve]}
    out = _emit(ctx, "xsat", sections, doc)
    click.echo(f"xsat p={_fmt(p)} x0={_fmt(x0)} alpha_sep={_fmt(alpha_sep)} "
               f"alpha_gap={_fmt(alpha_gap)} -> {out}")


# ---------------------------------------------------------------------------
# instance


@main.group()
def instance():
    """Explicit instances: generate, count, stats, sample."""


def _load_instance(path: str) -> inst_mod.Instance:
    try:
        with open(path, encoding="utf-8") as fh:
            return inst_mod.from_json(fh.read())
    except (OSError, ValueError, KeyError) as exc:
        _fail(exc)


@instance.command()
@click.option("--n", type=int, required=True)
@click.option("--alpha", type=float, required=True)
@click.option("--p", type=float, required=True)
@click.pass_context
def gen(ctx, n, alpha, p):
    """Generate an instance file (always JSON)."""
    seed = ctx.obj["seed"]
    try:
        inst = inst_mod.generate(n=n, alpha=alpha, p=p, seed=seed)
    except ValueError as exc:
        _fail(exc)
    out = ctx.obj["out"] or "instance.json"
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(inst_mod.to_json(inst))
        fh.write("\n")
    if alpha > 1.0:
        click.echo("warning: unsat regime (alpha > 1), instance has no "
                   "clusters", err=True)
    click.echo(f"instance n={n} alpha={_fmt(alpha)} p={_fmt(p)} "
               f"seed={seed} M={inst.m} -> {out}")


@instance.command()
@click.option("--instance", "path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="Instance JSON file.")
@click.option("--method", type=click.Choice(["auto", "bitmap", "ie"]),
              default="auto", show_default=True)
@click.pass_context
def count(ctx, path, method):
    """Exact solution count (bitmap enumeration and/or inclusion-exclusion)."""
    inst = _load_instance(path)
    rows = []
    try:
        if method in ("auto", "bitmap") and inst.n <= 26:
            rows.append(["bitmap", inst_mod.count_solutions_bruteforce(inst)])
        if method in ("auto", "ie") and inst.m <= 24:
            rows.append(["ie", inst_mod.count_solutions_ie(inst)])
        if method == "bitmap" and not rows:
            rows.append(["bitmap", inst_mod.count_solutions_bruteforce(inst)])
        if method == "ie" and not rows:
            rows.append(["ie", inst_mod.count_solutions_ie(inst)])
    except inst_mod.SizeError as exc:
        _fail(exc)
    if not rows:
        _fail(ValueError("instance too large for every exact counter"))
    counts = {m: c for m, c in rows}
    if len(set(counts.values())) > 1:
        _fail(RuntimeError(f"counters disagree: {counts}"))
    out = _emit(ctx, "count", [(["method", "count"], rows)],
                {"file": path, "counts": counts})
    click.echo(f"count={rows[0][1]} ({'/'.join(counts)}) -> {out}")


@instance.command()
@click.option("--instance", "path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.pass_context
def stats(ctx, path):
    """Cluster entropy histogram: free-variable count vs number of clusters."""
    inst = _load_instance(path)
    hist = inst_mod.cluster_entropy_histogram(inst)
    rows = [[k, int(c)] for k, c in enumerate(hist)]
    doc = {"file": path, "n": inst.n, "alpha": inst.alpha, "p": inst.p,
           "m": inst.m, "free_count_histogram": [int(c) for c in hist]}
    out = _emit(ctx, "stats", [(["free_count", "n_clusters"], rows)], doc)
    click.echo(f"stats n={inst.n} M={inst.m} mean_free="
               f"{_fmt(float(np.average(np.arange(inst.n + 1), weights=hist)) if inst.m else math.nan)}"
               f" -> {out}")


@instance.command()
@click.option("--instance", "path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--samples", type=int, default=1, show_default=True)
@click.pass_context
def sample(ctx, path, samples):
    """Exactly uniform solution samples, one hex configuration per row."""
    inst = _load_instance(path)
    rng = np.random.Generator(np.random.Philox(
        np.random.SeedSequence(ctx.obj["seed"])))
    width = (inst.n + 3) // 4
    rows = []
    try:
        for i in range(samples):
            cfg = inst_mod.sample_solution(inst, rng)
            rows.append([i, format(cfg.bits, f"0{width}x")])
    except ValueError as exc:
        _fail(exc)
    doc = {"file": path, "samples": [{"sample": i, "config": h}
                                     for i, h in rows]}
    out = _emit(ctx, "sample", [(["sample", "config"], rows)], doc)
    click.echo(f"sampled {samples} solution(s) -> {out}")


# ---------------------------------------------------------------------------
# decimate


@main.command()
@click.option("--estimator", type=click.Choice([decimation.BELIEF,
                                                decimation.SURVEY]),
              required=True)
@click.option("--instance", "path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--batch", type=int, default=1, show_default=True,
              help="Variables fixed per marginal re-estimation.")
@click.pass_context
def decimate(ctx, estimator, path, batch):
    """Decimate an instance; per-step CSV of the fixed variables."""
    inst = _load_instance(path)
    rng = np.random.Generator(np.random.Philox(
        np.random.SeedSequence(ctx.obj["seed"])))
    try:
        config, records = decimation.run_decimation(inst, estimator, rng, batch)
    except ValueError as exc:
        _fail(exc)
    header = ["step", "variable", "value", "n_compatible_clusters", "max_bias"]
    rows = [[r.step, r.variable, r.value, r.n_compatible,
             max(r.bias, 1.0 - r.bias)] for r in records]
    doc = {"file": path, "estimator": estimator, "batch": batch,
           "solved": config is not None,
           "solution": (format(config.bits, f"0{(inst.n + 3) // 4}x")
                        if config else None),
           "steps": [{"step": r.step, "variable": r.variable,
                      "value": r.value,
                      "n_compatible_clusters": r.n_compatible,
                      "max_bias": max(r.bias, 1.0 - r.bias)}
                     for r in records]}
    out = _emit(ctx, "decimate", [(header, rows)], doc)
    status = "solution found" if config is not None else "dead end"
    click.echo(f"decimate estimator={estimator} {status} after "
               f"{len(records)} step(s) -> {out}")


# ---------------------------------------------------------------------------
# walk


@main.command()
@click.option("--instance", "path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--trials", type=int, default=100, show_default=True)
@click.option("--steps", type=int, default=10000, show_default=True)
@click.pass_context
def walk(ctx, path, trials, steps):
    """Lazy solution-space walks; per-trial first cluster-exit step."""
    inst = _load_instance(path)
    children = np.random.SeedSequence(ctx.obj["seed"]).spawn(trials)

    def one(ss):
        rng = np.random.Generator(np.random.Philox(ss))
        start = inst_mod.sample_solution(inst, rng)
        return walkdyn.random_walk(inst, start, steps, rng)

    try:
        with ThreadPoolExecutor(max_workers=ctx.obj["threads"]) as pool:
            traces = list(pool.map(one, children))
    except ValueError as exc:
        _fail(exc)
    header = ["trial", "first_exit_step_or_-1", "acceptance_rate"]
    rows = [[i, t.first_exit_step, t.acceptance_rate]
            for i, t in enumerate(traces)]
    doc = {"file": path, "steps": steps,
           "trials": [{"trial": i, "first_exit_step": t.first_exit_step,
                       "acceptance_rate": t.acceptance_rate}
                      for i, t in enumerate(traces)]}
    out = _emit(ctx, "walk", [(header, rows)], doc)
    exited = sum(1 for t in traces if t.first_exit_step >= 0)
    click.echo(f"walk trials={trials} steps={steps} exited={exited} -> {out}")


# ---------------------------------------------------------------------------
# energy


@main.group(name="energy")
def energy_group():
    """Energetic landscape: diagram, quench, landscape."""


def _params(a, b, c, p) -> energy.LandscapeParams:
    try:
        return energy.LandscapeParams(a=a, b=b, c=c, p=p)
    except ValueError as exc:
        _fail(exc)


_PARAM_OPTS = [
    click.option("--a", type=float, required=True),
    click.option("--b", type=float, required=True),
    click.option("--c", type=float, required=True),
    click.option("--p", type=float, required=True),
]


def _with_params(f):
    for opt in reversed(_PARAM_OPTS):
        f = opt(f)
    return f


@energy_group.command()
@_with_params
@click.option("--tmin", type=float, required=True)
@click.option("--tmax", type=float, required=True)
@click.option("--tsteps", type=int, default=200, show_default=True)
@click.option("--nats", is_flag=True,
              help="Report temperatures in natural (base-e) units.")
@click.pass_context
def diagram(ctx, a, b, c, p, tmin, tmax, tsteps, nats):
    """Energy-temperature diagram: equilibrium, quench, weight parameter."""
    params = _params(a, b, c, p)
    tol = _tol(ctx)
    try:
        grid = np.linspace(tmin, tmax, tsteps)
        points = energy.et_diagram(params, grid, tol)
    except ValueError as exc:
        _fail(exc)
    scale = 1.0 / LN2 if nats else 1.0
    rows = [[q.t * scale, q.e_eq, q.e_dyn, q.m] for q in points]
    doc = {"a": a, "b": b, "c": c, "p": p, "units": "nats" if nats else "bits",
           "curve": [{"T": q.t * scale, "e_eq": q.e_eq, "e_dyn": q.e_dyn,
                      "m": q.m} for q in points]}
    out = _emit(ctx, "diagram", [(["T", "e_eq", "e_dyn", "m"], rows)], doc)
    click.echo(f"diagram {tsteps} points on T=[{_fmt(tmin)},{_fmt(tmax)}] "
               f"-> {out}")


@energy_group.command()
@_with_params
@click.option("--n", type=int, required=True)
@click.option("--t", "temp", type=float, required=True,
              help="Quench temperature.")
@click.option("--sweeps", type=int, default=1000, show_default=True)
@click.pass_context
def quench(ctx, a, b, c, p, n, temp, sweeps):
    """Metropolis quench from a random configuration; per-sweep energy per
    variable."""
    params = _params(a, b, c, p)
    seed = ctx.obj["seed"]
    ss_land, ss_dyn = np.random.SeedSequence(seed).spawn(2)
    try:
        landscape = energy.generate_landscape(params, n, seed)
        rng = np.random.Generator(np.random.Philox(ss_dyn))
        start = inst_mod.Configuration(
            n, int.from_bytes(rng.bytes((n + 7) // 8), "little")
            & ((1 << n) - 1))
        _, means, _ = energy.metropolis(landscape, [(temp, sweeps)], start, rng)
    except ValueError as exc:
        _fail(exc)
    rows = [[i, float(e) / n] for i, e in enumerate(means)]
    doc = {"a": a, "b": b, "c": c, "p": p, "n": n, "T": temp,
           "trace": [{"sweep": i, "energy": float(e) / n}
                     for i, e in enumerate(means)]}
    out = _emit(ctx, "quench", [(["sweep", "energy"], rows)], doc)
    click.echo(f"quench n={n} T={_fmt(temp)} sweeps={sweeps} "
               f"final_energy={_fmt(rows[-1][1])} -> {out}")


@energy_group.command()
@_with_params
@click.option("--n", type=int, required=True)
@click.pass_context
def landscape(ctx, a, b, c, p, n):
    """Generate an explicit landscape; one row per valley."""
    params = _params(a, b, c, p)
    seed = ctx.obj["seed"]
    try:
        land = energy.generate_landscape(params, n, seed)
    except ValueError as exc:
        _fail(exc)
    width = (n + 3) // 4
    rows = [[i, v.e0, format(v.cube.frozen_mask, f"0{width}x"),
             format(v.cube.frozen_values, f"0{width}x")]
            for i, v in enumerate(land.valleys)]
    doc = {"a": a, "b": b, "c": c, "p": p, "n": n, "seed": seed,
           "rng": inst_mod.RNG_NAME,
           "valleys": [{"e0": v.e0,
                        "mask": format(v.cube.frozen_mask, f"0{width}x"),
                        "values": format(v.cube.frozen_values, f"0{width}x")}
                       for v in land.valleys]}
    out = _emit(ctx, "landscape", [(["valley", "e0", "mask", "values"], rows)],
                doc)
    click.echo(f"landscape n={n} valleys={len(land.valleys)} -> {out}")


if __name__ == "__main__":
    sys.exit(main())
