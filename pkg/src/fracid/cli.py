"""Command-line front end.

Subcommands: ``reconstruct``, ``experiment``, ``simulate``, ``plotdata``.
Exit codes: 0 success, 1 configuration or I/O error, 2 numerical failure.
Every run writes its fully resolved configuration to stderr as YAML.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .config import ConfigError, RunConfig, load_config, parse_config
from .directsim import solve_direct
from .identify import Estimate, ffun_delta, identify_pipeline
from .model import Observation
from .problems import example1_direct_config, sample_observation
from .regularize import SelectionError

__all__ = ["main", "read_observation", "write_csv", "fmt", "experiment_rows"]

log = logging.getLogger("fracid")

NU_VALUES = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8)
HEADER = ("t", "psi")


class InputError(ValueError):
    """Malformed input file."""


def fmt(x) -> str:
    """10 significant digits; empty for ``None``."""
    if x is None:
        return ""
    return f"{float(x):.10g}"


def write_csv(path, header, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    if path is None or path == "-":
        sys.stdout.write(buf.getvalue())
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from exc


def read_observation(path) -> Observation:
    """Read a ``t,psi`` CSV whose first row is ``t = 0``."""
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise InputError(f"cannot read data {path}: {exc}") from exc
    if not rows or tuple(c.strip() for c in rows[0]) != HEADER:
        raise InputError(f"{path}: line 1: expected header 't,psi'")
    t, v = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise InputError(f"{path}: line {lineno}: expected 2 fields, got {len(row)}")
        try:
            t.append(float(row[0]))
            v.append(float(row[1]))
        except ValueError as exc:
            raise InputError(f"{path}: line {lineno}: {exc}") from exc
    if len(t) < 2:
        raise InputError(f"{path}: need at least two data rows")
    if t[0] != 0.0:
        raise InputError(f"{path}: line 2: first time must be 0")
    try:
        return Observation(np.array(t), np.array(v), v[0])
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _echo(cfg: RunConfig) -> None:
    sys.stderr.write("# resolved configuration\n" + cfg.dump())


def _status_text(est: Estimate) -> str:
    bad = [f"{k}={v}" for k, v in est.status.items() if v != "ok"]
    return ";".join(bad) if bad else "ok"


def _reconstruct(cfg: RunConfig, obs: Observation) -> Estimate:
    return identify_pipeline(obs, cfg.model(), cfg.recon(obs.times))


def cmd_reconstruct(args) -> int:
    cfg = load_config(args.config)
    _echo(cfg)
    obs = read_observation(args.data)
    est = _reconstruct(cfg, obs)
    write_csv(
        args.out,
        ("nu1", "nu_second", "rho", "sigma_bar", "tbar", "sigma_hat", "that", "status"),
        [(est.nu1, est.nu_second, est.rho, est.sigma_bar, est.tbar, est.sigma_hat, est.that, _status_text(est))],
    )
    if math.isfinite(est.nu1) and math.isfinite(est.nu_second):
        return 0
    print(f"numerical failure: no usable estimate ({_status_text(est)})", file=sys.stderr)
    return 2


def _cell(task):
    table, noise, nu, base = task
    data = {k: v for k, v in base.items() if k != "model"}
    data["model"] = {"example": table, "nu": nu}
    data["noise"] = dict(base.get("noise") or {}, kind=noise)
    cfg = parse_config(data)
    truth, model = cfg.truth_and_model()
    obs = sample_observation(truth, cfg.sampling_times(), cfg.noise())
    est = identify_pipeline(obs, model, cfg.recon(obs.times))
    return nu, est


def experiment_rows(table: int, noise: str, base: dict | None = None, threads: int = 1) -> tuple[tuple, list]:
    """Header and rows of a benchmark table, one row per leading order."""
    base = base or {}
    tasks = [(table, noise, nu, base) for nu in NU_VALUES]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_cell, tasks))
    else:
        results = [_cell(t) for t in tasks]
    second = "nu2" if table == 1 else "nu3"
    div = 2.0 if table == 1 else 3.0
    header = ["nu1", "nu1_bar", f"{second}_bar", f"{second}_hat"]
    if table == 1:
        header.append("rho2_hat")
    header += ["err_nu1_bar", f"err_{second}_bar", f"err_{second}_hat"]
    if table == 1:
        header.append("err_rho2_hat")
    rows = []
    for nu, est in results:
        target = nu / div

        def err(v, ref):
            return None if v is None or not math.isfinite(v) else abs(v - ref)

        row = [nu, est.nu1, est.nu_second_bar, est.nu_second_hat]
        if table == 1:
            row.append(est.rho)
        row += [err(est.nu1, nu), err(est.nu_second_bar, target), err(est.nu_second_hat, target)]
        if table == 1:
            row.append(err(est.rho, 0.25))
        rows.append(row)
    return tuple(header), rows


def cmd_experiment(args) -> int:
    base = load_config(args.config, require_model=False) if args.config else parse_config({}, False)
    _echo(base)
    header, rows = experiment_rows(args.table, args.noise, base.raw, args.threads)
    write_csv(args.out, header, rows)
    return 0


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    _echo(cfg)
    sim = cfg.raw["simulate"]
    times = cfg.sampling_times()
    if sim["source"] == "direct":
        if cfg.example != 1:
            raise ConfigError("simulate.source 'direct' supports model.example 1 only")
        horizon = float(times[-1]) if sim["horizon"] is None else float(sim["horizon"])
        dcfg = example1_direct_config(cfg.raw["model"]["nu"], int(sim["nx"]), int(sim["nt"]), horizon)
        _, trace = solve_direct(dcfg)
        if times[-1] > trace.times[-1] * (1 + 1e-12):
            raise ConfigError("sampling times extend past simulate.horizon")
        exact = lambda t: np.interp(t, trace.times, trace.values)  # noqa: E731
        psi0 = trace.values[0]
    else:
        truth = cfg.truth()
        if truth is None:
            raise ConfigError("analytic simulation needs model.example or model.truth")
        exact, psi0 = truth, None
    obs = sample_observation(exact, times, cfg.noise(), psi0)
    write_csv(args.out, HEADER, zip(obs.times, obs.values))
    return 0


def cmd_plotdata(args) -> int:
    cfg = load_config(args.config)
    _echo(cfg)
    obs = read_observation(args.data)
    model = cfg.model()
    est = _reconstruct(cfg, obs)
    fit = est.diagnostics["fit_step1"]
    n = args.points if args.points is not None else int(cfg.raw["io"]["plot_points"])
    if n < 2:
        raise ConfigError("--points must be at least 2")
    dense = np.linspace(0.0, obs.horizon, n)
    # drop dense points that coincide with an observation time up to rounding
    gap = np.abs(dense[:, None] - obs.times[None, :]).min(axis=1)
    grid = np.union1d(dense[gap > 1e-9 * obs.horizon], obs.times)
    data = dict(zip(obs.times.tolist(), obs.values.tolist()))
    rows = []
    for t in grid:
        f = None
        if t > 0.0:
            f = ffun_delta(fit, model, est.nu1, float(t))
        rows.append((t, data.get(float(t)), float(fit(t)), f))
    write_csv(args.out, ("t", "psi_data", "psi_fit", "F_delta"), rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fracid", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, data=False, config_required=True):
        sp.add_argument("--config", required=config_required, help="YAML configuration file")
        if data:
            sp.add_argument("--data", required=True, help="observation CSV with header t,psi")
        sp.add_argument("--out", default="-", help="output CSV (default: stdout)")
        sp.add_argument("--seed", type=int, default=None, help="reserved; all noise is deterministic")
        sp.add_argument("--verbose", "-v", action="store_true", help="log progress to stderr")

    sp = sub.add_parser("reconstruct", help="recover orders (and a coefficient) from data")
    common(sp, data=True)
    sp.set_defaults(func=cmd_reconstruct)

    sp = sub.add_parser("experiment", help="regenerate a benchmark table")
    common(sp, config_required=False)
    sp.add_argument("--table", type=int, choices=(1, 2), required=True)
    sp.add_argument("--noise", choices=("ftn", "stn", "ttn"), default="ftn")
    sp.add_argument("--threads", type=int, default=1, help="worker processes")
    sp.set_defaults(func=cmd_experiment)

    sp = sub.add_parser("simulate", help="write a synthetic observation CSV")
    common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("plotdata", help="write data and fitted curves on a dense grid")
    common(sp, data=True)
    sp.add_argument("--points", type=int, default=None, help="dense grid size (default: io.plot_points, 400)")
    sp.set_defaults(func=cmd_plotdata)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (ConfigError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ArithmeticError, SelectionError, np.linalg.LinAlgError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
