"""Command-line interface.

Subcommands: sample, cdf, invcdf, regions, measures, experiment.  All file
outputs go through atomic writes and are listed with content digests in a
run manifest.  Exit codes: 0 success, 2 usage, 3 domain/infeasible input,
4 numerical-tolerance failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .cdf import (
    CdfValue,
    build_table,
    cdf_numeric,
    invert_radial,
    radial_cdf,
    radial_tail,
    region_bounds,
    region_shares,
    region_tails,
)
from .cdf.chain import get_chain
from .cdf.closed import PHI2_MAX, cdf_phi2_n3, cdf_phi2_n4, cdf_X3_n4
from .chamber import phi2_lower, upper_bound_top
from .errors import DomainError, ToleranceError
from .manifest import RunManifest, atomic_write_text, cache_dir, fmt_float, render_csv, sha256_text
from .matrixcore import DensityMatrix
from .measures import (
    BipartiteSplit,
    WernerSpec,
    bell_state,
    cmi_zx,
    concurrence,
    delta_le,
    delta_le_prime,
    discord_and_classical,
    log_negativity,
    max_qmi_curve,
    negativity,
    partial_trace,
    perturbation_unitary,
    qmi,
    s_min_bound,
    werner_ln,
    werner_mu,
    werner_negativity,
    werner_state,
)
from .induced import InducedSpec, f_trace_mu, p_trace_mu
from .rng import RngStream
from .sampler import SampleBatch, SampleConfig, haar_purity_histogram, sample_density


def _add_common_out(p: argparse.ArgumentParser) -> None:
    p.add_argument("--outdir", type=Path, default=Path("out"), help="output directory")


def _jobs_default() -> int:
    return os.cpu_count() or 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fixedpurity",
                                 description="sampling of density matrices at fixed purity")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("sample", help="sample density matrices at fixed purity")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--purity", type=float, action="append", required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--emit-matrix", action="store_true")
    p.add_argument("--no-permute", action="store_true")
    p.add_argument("--csv", action="store_true", help="also write the flattened CSV")
    p.add_argument("--jobs", type=int, default=_jobs_default())
    _add_common_out(p)

    p = sub.add_parser("cdf", help="evaluate a marginal CDF or build its table")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--level", default="radial", help="'radial' or angle index k")
    p.add_argument("--context", type=float, default=None)
    p.add_argument("--at", type=float, default=None, help="probe coordinate")
    p.add_argument("--at-purity", type=float, default=None, help="probe purity (radial)")
    p.add_argument("--build-table", action="store_true")
    p.add_argument("--knots", type=int, default=96, help="knots per region for --build-table")
    _add_common_out(p)

    p = sub.add_parser("invcdf", help="invert a marginal CDF")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--level", default="radial")
    p.add_argument("--context", type=float, default=None)
    p.add_argument("--p", type=float, required=True)

    p = sub.add_parser("regions", help="purity-region shares and tail masses")
    p.add_argument("--dim", type=int, required=True)

    p = sub.add_parser("measures", help="append measures to a sample batch")
    p.add_argument("--in", dest="infile", type=Path, required=True)
    p.add_argument("--split", required=True, help="AxB, e.g. 2x2")
    p.add_argument("--set", dest="measure_set", required=True,
                   help="comma list: purity_a,concurrence,ln,negativity,dle,dle_prime,qmi,cmi_zx,discord")
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("experiment", help="desk-scale experiment datasets")
    ex = p.add_subparsers(dest="experiment", required=True)

    e = ex.add_parser("cqc-scan")
    e.add_argument("--dim", type=int, default=4)
    e.add_argument("--purities", required=True, help="comma list of purities")
    e.add_argument("--count", type=int, default=500)
    e.add_argument("--seed", type=int, default=1)
    e.add_argument("--include-families", action="store_true")
    e.add_argument("--eps", type=float, default=0.1, help="perturbation strength")
    e.add_argument("--jobs", type=int, default=_jobs_default())
    _add_common_out(e)

    e = ex.add_parser("ent-vs-purity")
    e.add_argument("--purities", required=True)
    e.add_argument("--count", type=int, default=2500)
    e.add_argument("--seed", type=int, default=1)
    e.add_argument("--jobs", type=int, default=_jobs_default())
    _add_common_out(e)

    e = ex.add_parser("haar-hist")
    e.add_argument("--dim", type=int, default=4)
    e.add_argument("--count", type=int, default=100000)
    e.add_argument("--bin", type=float, default=0.005)
    e.add_argument("--seed", type=int, default=1)
    _add_common_out(e)

    e = ex.add_parser("induced-marginal")
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--k", type=int, required=True)
    e.add_argument("--points", type=int, default=200)
    _add_common_out(e)

    e = ex.add_parser("max-qmi-curve")
    e.add_argument("--dim", type=int, default=4)
    e.add_argument("--points", type=int, default=400)
    _add_common_out(e)

    e = ex.add_parser("werner-sweep")
    e.add_argument("--d", type=int, default=2)
    e.add_argument("--points", type=int, default=101)
    _add_common_out(e)

    return ap


# -- sample -------------------------------------------------------------

def _batch_csv(batch: SampleBatch) -> str:
    n = batch.config.dim
    header = (["index", "purity", "r", "phi2"]
              + [f"X{k}" for k in range(3, n)]
              + [f"eig_desc_{i + 1}" for i in range(n)]
              + [f"eig_perm_{i + 1}" for i in range(n)])
    rows = []
    for i, s in enumerate(batch.samples):
        rows.append([i, float(s.purity), float(s.polar.r), float(s.polar.phi2)]
                    + [float(v) for v in s.polar.X]
                    + [float(v) for v in s.eigs_desc]
                    + [float(v) for v in s.eigs_permuted])
    return render_csv(header, rows)


def cmd_sample(args) -> int:
    man = RunManifest("sample", {k: _norm(v) for k, v in vars(args).items() if k != "cmd"})
    for mu in args.purity:
        cfg = SampleConfig(dim=args.dim, mu=mu, count=args.count, seed=args.seed,
                           emit_matrix=args.emit_matrix, permute=not args.no_permute)
        batch = sample_density(cfg, jobs=args.jobs)
        stem = f"sample_dim{args.dim}_mu{mu:g}_seed{args.seed}"
        jpath = args.outdir / f"{stem}.json"
        atomic_write_text(jpath, batch.to_json())
        man.add_output(jpath)
        if args.csv:
            cpath = args.outdir / f"{stem}.csv"
            atomic_write_text(cpath, _batch_csv(batch))
            man.add_output(cpath)
        worst = float(np.max(np.abs(batch.purities() - mu)))
        print(f"dim {args.dim} mu {mu:g}: {args.count} samples, "
              f"max purity error {worst:.3e} -> {jpath}")
    man.write(args.outdir / "manifest_sample.json")
    return 0


# -- cdf / invcdf ---------------------------------------------------------

def _norm(v):
    if isinstance(v, Path):
        return str(v)
    return v


def _closed_conditional(n: int, level: int, x: float, context: float) -> float:
    if n == 3 and level == 2:
        return cdf_phi2_n3(x, context)
    if n == 4 and level == 2:
        return cdf_phi2_n4(x, context)
    if n == 4 and level == 3:
        return cdf_X3_n4(x, context)
    raise DomainError(f"no closed conditional CDF for dim {n} level {level}")


def cmd_cdf(args) -> int:
    n = args.dim
    level = args.level
    if level != "radial":
        level = int(level)
    if args.build_table:
        from .cdf.chain import GridSpec

        grid = GridSpec(knots_per_region=args.knots)
        table = build_table(n, level, args.context, grid)
        text = table.to_json()
        spec_doc = json.dumps({"dim": n, "level": str(level),
                               "context": None if args.context is None else fmt_float(args.context),
                               "knots": args.knots, "version": 1}, sort_keys=True)
        key = sha256_text(spec_doc)[:16]
        path = cache_dir() / f"{key}.json"
        atomic_write_text(path, text)
        man = RunManifest("cdf", {k: _norm(v) for k, v in vars(args).items() if k != "cmd"})
        man.add_output(path)
        man.write(cache_dir() / f"{key}.manifest.json")
        print(f"table dim={n} level={level} context={args.context} -> {path} "
              f"(abs_tol {table.abs_tol:.2e})")
        return 0

    if args.at is None and args.at_purity is None:
        raise DomainError("need --at, --at-purity or --build-table")
    if level == "radial":
        if args.at_purity is not None:
            value = radial_cdf(n, mu=args.at_purity)
            tail = radial_tail(n, mu=args.at_purity)
        else:
            value = radial_cdf(n, r=args.at)
            tail = radial_tail(n, r=args.at)
        tol = 1e-14 if n <= 4 else get_chain(n).abs_tol
        print(f"F = {fmt_float(value)}  (1-F = {fmt_float(tail)}, abs_tol {tol:.2e})")
        return 0
    if args.context is None:
        raise DomainError("conditional CDFs need --context")
    if args.at is None:
        raise DomainError("conditional CDFs need --at")
    if n <= 4:
        value = _closed_conditional(n, level, args.at, args.context)
        tol = 1e-14
    else:
        res: CdfValue = cdf_numeric(n, level, args.at, args.context)
        value, tol = res.value, res.abs_tol
    print(f"F = {fmt_float(value)}  (abs_tol {tol:.2e})")
    return 0


def cmd_invcdf(args) -> int:
    n = args.dim
    level = args.level
    if level != "radial":
        level = int(level)
    if level == "radial":
        r = invert_radial(n, args.p)
        print(f"r = {fmt_float(r)}  mu = {fmt_float(r * r + 1.0 / n)}")
        return 0
    if args.context is None:
        raise DomainError("conditional inversion needs --context")
    if level == 2:
        if n == 3:
            lo = float(np.arccos(min(upper_bound_top(3, args.context), 1.0)))
        else:
            lo = phi2_lower(args.context)
        x = lo + args.p * (PHI2_MAX - lo)
    elif n == 4 and level == 3:
        from .sampler import _invert_x3
        from .cdf.closed import x3_upper

        x = _invert_x3(args.p, x3_upper(args.context))
    else:
        x = get_chain(n).invert_angle(level, args.p, args.context)
    print(f"x = {fmt_float(x)}")
    return 0


def cmd_regions(args) -> int:
    n = args.dim
    shares = region_shares(n)
    bounds = region_bounds(n)
    for (i, share), (lo, hi) in zip(shares, bounds):
        print(f"region {i}: mu in [{lo:.6g}, {hi:.6g}]  share {100 * share:.4f}%")
    for cut, tail in region_tails(n):
        print(f"tail mu in [{cut:g}, 1]: {100 * tail:.6g}%")
    return 0


# -- measures -------------------------------------------------------------

_MEASURES = ("purity_a", "concurrence", "ln", "negativity", "dle", "dle_prime",
             "qmi", "cmi_zx", "discord")


def cmd_measures(args) -> int:
    try:
        da, db = (int(t) for t in args.split.lower().split("x"))
    except ValueError as exc:
        raise DomainError(f"bad --split {args.split!r}, expected AxB") from exc
    split = BipartiteSplit(da, db)
    wanted = [m.strip() for m in args.measure_set.split(",") if m.strip()]
    for m in wanted:
        if m not in _MEASURES:
            raise DomainError(f"unknown measure {m!r}; choose from {', '.join(_MEASURES)}")
    batch = SampleBatch.from_json(Path(args.infile).read_text())
    if batch.config.dim != split.dim:
        raise DomainError(f"batch dim {batch.config.dim} != split {da}x{db}")
    if not batch.config.emit_matrix:
        raise DomainError("batch lacks matrices; regenerate with --emit-matrix")
    if ("concurrence" in wanted or "discord" in wanted) and split.dim != 4:
        raise DomainError("concurrence/discord need a 2x2 split")

    header = ["index", "mu"] + wanted
    rows = []
    for i, s in enumerate(batch.samples):
        rho = DensityMatrix(s.matrix)
        row: list = [i, float(s.purity)]
        for m in wanted:
            if m == "purity_a":
                row.append(partial_trace(rho, split, "a").purity)
            elif m == "concurrence":
                row.append(concurrence(rho))
            elif m == "ln":
                row.append(log_negativity(rho, split))
            elif m == "negativity":
                row.append(negativity(rho, split))
            elif m == "dle":
                row.append(delta_le(rho, split))
            elif m == "dle_prime":
                row.append(delta_le_prime(rho, split))
            elif m == "qmi":
                row.append(qmi(rho, split))
            elif m == "cmi_zx":
                row.append(cmi_zx(rho, split))
            elif m == "discord":
                q, _ = discord_and_classical(rho)
                row.append(q)
        rows.append(row)
    text = render_csv(header, rows)
    infile = Path(args.infile)
    out = args.out or infile.with_name(infile.stem + "_measures.csv")
    atomic_write_text(out, text)
    man = RunManifest("measures", {k: _norm(v) for k, v in vars(args).items() if k != "cmd"})
    man.add_output(out)
    man.write(Path(out).with_name(Path(out).stem + "_manifest.json"))
    print(f"{len(rows)} rows -> {out}")
    return 0


# -- experiments -----------------------------------------------------------

def _parse_purities(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _exp_cqc(args, man: RunManifest) -> list[Path]:
    if args.dim != 4:
        raise DomainError("cqc-scan is implemented for dim 4 (two qubits)")
    split = BipartiteSplit(2, 2)
    rows = []
    for mu in _parse_purities(args.purities):
        cfg = SampleConfig(dim=4, mu=mu, count=args.count, seed=args.seed, emit_matrix=True)
        for i, s in enumerate(sample_density(cfg, jobs=args.jobs).samples):
            rho = DensityMatrix(s.matrix)
            rows.append([float(mu), i, cmi_zx(rho, split), qmi(rho, split)])
    path = args.outdir / "cqc_scan.csv"
    atomic_write_text(path, render_csv(["mu", "index", "cmi_zx", "qmi"], rows))
    outs = [path]
    if args.include_families:
        outs.append(_exp_cqc_families(args))
    return outs


def _exp_cqc_families(args) -> Path:
    split = BipartiteSplit(2, 2)
    d = 2
    bell = np.outer(bell_state(d), bell_state(d).conj())
    mcs = np.diag(np.abs(bell_state(d)) ** 2).astype(complex)
    mms = np.eye(4, dtype=complex) / 4.0
    gen = RngStream(args.seed, 99).generator()
    rows = []
    ps = np.linspace(0.0, 1.0, 101)
    fams = {"bell-mcs": (bell, mcs), "mms-mcs": (mms, mcs), "bell-mms": (bell, mms)}
    for name, (lhs, rhs) in fams.items():
        for p in ps:
            rho = DensityMatrix(p * lhs + (1.0 - p) * rhs)
            rows.append([name, float(p), cmi_zx(rho, split), qmi(rho, split)])
            u = perturbation_unitary(4, args.eps, gen)
            pert = DensityMatrix(u @ rho.matrix @ u.conj().T)
            rows.append([name + "-perturbed", float(p), cmi_zx(pert, split), qmi(pert, split)])
    path = args.outdir / "cqc_families.csv"
    atomic_write_text(path, render_csv(["family", "p", "cmi_zx", "qmi"], rows))
    return path


def _exp_ent(args, man: RunManifest) -> list[Path]:
    split = BipartiteSplit(2, 2)
    rows = []
    for mu in _parse_purities(args.purities):
        cfg = SampleConfig(dim=4, mu=mu, count=args.count, seed=args.seed, emit_matrix=True)
        for i, s in enumerate(sample_density(cfg, jobs=args.jobs).samples):
            rho = DensityMatrix(s.matrix)
            rows.append([float(mu), i,
                         partial_trace(rho, split, "a").purity,
                         concurrence(rho), negativity(rho, split), log_negativity(rho, split),
                         delta_le(rho, split), delta_le_prime(rho, split)])
    path = args.outdir / "ent_vs_purity.csv"
    atomic_write_text(path, render_csv(
        ["mu", "index", "purity_a", "concurrence", "negativity", "ln", "dle", "dle_prime"], rows))
    return [path]


def _exp_haar_hist(args, man: RunManifest) -> list[Path]:
    edges, counts = haar_purity_histogram(args.dim, args.count, args.bin,
                                          RngStream(args.seed))
    total = counts.sum()
    rows = [[float(a), float(b), int(c), float(c / total)]
            for a, b, c in zip(edges[:-1], edges[1:], counts)]
    path = args.outdir / f"haar_hist_dim{args.dim}.csv"
    atomic_write_text(path, render_csv(["bin_left", "bin_right", "count", "fraction"], rows))
    return [path]


def _exp_induced(args, man: RunManifest) -> list[Path]:
    spec = InducedSpec(args.n, args.k)
    mus = np.linspace(1.0 / args.n + 1e-9, 1.0, args.points)
    pdf = p_trace_mu(spec, mus)
    cdfv = f_trace_mu(spec, mus)
    rows = [[float(m), float(p), float(c)] for m, p, c in zip(mus, pdf, cdfv)]
    path = args.outdir / f"induced_n{args.n}_k{args.k}.csv"
    atomic_write_text(path, render_csv(["mu", "pdf", "cdf"], rows))
    return [path]


def _exp_maxqmi(args, man: RunManifest) -> list[Path]:
    mus = np.linspace(0.25, 1.0, args.points)
    rows = [[float(m), max_qmi_curve(float(m)), s_min_bound(float(m), 4)] for m in mus]
    path = args.outdir / "max_qmi_curve.csv"
    atomic_write_text(path, render_csv(["mu", "max_qmi", "s_min"], rows))
    return [path]


def _exp_werner(args, man: RunManifest) -> list[Path]:
    rows = []
    header = ["p", "mu", "negativity", "ln"]
    if args.d == 2:
        header.append("concurrence")
    for p in np.linspace(0.0, 1.0, args.points):
        spec = WernerSpec(d=args.d, p=float(p))
        row = [float(p), werner_mu(spec), werner_negativity(spec), werner_ln(spec)]
        if args.d == 2:
            row.append(concurrence(werner_state(spec)))
        rows.append(row)
    path = args.outdir / f"werner_d{args.d}.csv"
    atomic_write_text(path, render_csv(header, rows))
    return [path]


_EXPERIMENTS = {
    "cqc-scan": _exp_cqc,
    "ent-vs-purity": _exp_ent,
    "haar-hist": _exp_haar_hist,
    "induced-marginal": _exp_induced,
    "max-qmi-curve": _exp_maxqmi,
    "werner-sweep": _exp_werner,
}


def cmd_experiment(args) -> int:
    man = RunManifest(f"experiment {args.experiment}",
                      {k: _norm(v) for k, v in vars(args).items() if k != "cmd"})
    paths = _EXPERIMENTS[args.experiment](args, man)
    for p in paths:
        man.add_output(p)
        print(f"wrote {p}")
    man.write(args.outdir / f"manifest_{args.experiment.replace('-', '_')}.json")
    return 0


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    handlers = {
        "sample": cmd_sample,
        "cdf": cmd_cdf,
        "invcdf": cmd_invcdf,
        "regions": cmd_regions,
        "measures": cmd_measures,
        "experiment": cmd_experiment,
    }
    try:
        return handlers[args.cmd](args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ToleranceError as exc:
        print(f"tolerance failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
