"""``sidwave`` command-line runner.

Exit codes: 0 on completion (a detected blow-up is a result), 2 on
configuration errors, 3 on numerical instability. Tables are written as CSV
with a header row; every summary is one JSON object.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import diagnostics as dg
from . import experiments as ex
from .config import ExperimentConfig
from .feasibility import InfeasibleError
from .model import ConfigurationError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_UNSTABLE = 3

log = logging.getLogger("sidwave")


class Unstable(RuntimeError):
    pass


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        v = float(v)  # numpy scalars repr with a type prefix
        return repr(v) if math.isfinite(v) else ("nan" if math.isnan(v) else ("inf" if v > 0 else "-inf"))
    return str(v)


def write_table(path: Path, columns: Sequence[str], rows) -> Path:
    """RFC-4180 CSV; floats use ``repr`` so output is locale-free and round-trips."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(columns)
        for row in rows:
            if isinstance(row, dict):
                row = [row.get(c) for c in columns]
            w.writerow([_fmt(v) for v in row])
    return path


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def write_summary(path: Path, summary: dict) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_clean(summary), indent=2, sort_keys=True) + "\n", encoding="ascii")
    return path


def _floats(text: Optional[str]):
    if text is None:
        return None
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigurationError(f"bad number list {text!r}") from exc


def _load(args) -> ExperimentConfig:
    return ExperimentConfig.load(args.config, args.override or [])


def _out(args, cfg: Optional[ExperimentConfig] = None, key: str = "csv_path", default: str = "run.csv") -> Path:
    name = cfg.raw["outputs"][key] if cfg is not None else default
    return Path(args.out) / name


def _echo(summary: dict):
    keys = ("status", "t_star", "p_hat", "slope", "rows")
    print(" ".join(f"{k}={summary[k]}" for k in keys if k in summary))


# ---------------------------------------------------------------------------
# subcommands


def cmd_run(args) -> int:
    cfg = _load(args)
    res = ex.execute(cfg)
    write_table(_out(args, cfg), ex.CSV_COLUMNS, res.record.table())
    if res.record.snapshots is not None:
        rows = [(t, r, u) for t, snap in zip(res.record.snapshot_times, res.record.snapshots)
                for r, u in zip(res.grid.r, snap)]
        write_table(Path(args.out) / "snapshots.csv", ("t", "r", "u"), rows)
    write_summary(_out(args, cfg, "summary_path"), res.summary)
    _echo(res.summary)
    if res.record.status == dg.UNSTABLE:
        raise Unstable(f"numerical instability near t={res.record.times[-1]:.6g}")
    return EXIT_OK


def cmd_sweep_p(args) -> int:
    cfg = _load(args)
    sw = cfg.raw["sweep"]
    p_list = _floats(args.p_list) if args.p_list is not None else sw["p_list"]
    bisect = args.bisect if args.bisect is not None else int(sw["bisect_steps"])
    res = ex.sweep_p(cfg, p_list, bisect, args.jobs)
    cols = ("p", "status", "t_star", "weighted_l2_exponent", "global_looking", "stage")
    write_table(Path(args.out) / "sweep_p.csv", cols, res.rows)
    summary = {"config": cfg.raw, "rows": len(res.rows), "p_hat": res.p_hat,
               "bracket": res.bracket, "errors": [s.get("error") for s in res.summaries if s["status"] == ex.ERROR]}
    write_summary(Path(args.out) / "sweep_p.json", summary)
    _echo(summary)
    return EXIT_OK


def cmd_sweep_mu(args) -> int:
    cfg = _load(args)
    sw = cfg.raw["sweep"]
    mu_list = _floats(args.mu_list) if args.mu_list is not None else sw["mu_list"]
    steps = args.escalate if args.escalate is not None else int(sw["escalation_steps"])
    rows = ex.sweep_mu(cfg, mu_list, steps, float(sw["escalation_factor"]), args.jobs)
    cols = ("mu", "step", "amplitude", "velocity", "horizon", "status", "t_star",
            "weighted_l2_exponent", "global_looking")
    write_table(Path(args.out) / "sweep_mu.csv", cols, rows)
    outcomes = {}
    for mu in sorted({r["mu"] for r in rows}):
        outcomes[repr(mu)] = ex.escalation_outcome([r for r in rows if r["mu"] == mu])
    summary = {"config": cfg.raw, "rows": len(rows), "outcomes": outcomes}
    write_summary(Path(args.out) / "sweep_mu.json", summary)
    _echo(summary)
    return EXIT_OK


def cmd_feasibility(args) -> int:
    cfg = _load(args)
    n = args.n if args.n is not None else int(cfg.raw["model"]["n"])
    p = args.p if args.p is not None else float(cfg.raw["model"]["p"])
    eps = _floats(args.eps_list) if args.eps_list is not None else cfg.raw["analysis"]["eps_list"]
    rows, slope = ex.feasibility_table(n, p, eps)
    cols = ("eps", "delta", "delta1", "delta2", "delta3", "nu", "mu0")
    write_table(Path(args.out) / "feasibility.csv", cols, rows)
    summary = {"n": n, "p": p, "rows": len(rows), "slope": slope}
    write_summary(Path(args.out) / "feasibility.json", summary)
    _echo(summary)
    return EXIT_OK


def cmd_diffusion(args) -> int:
    cfg = _load(args)
    times = _floats(args.times) if args.times is not None else cfg.raw["analysis"]["compare_times"]
    rows = ex.diffusion_table(cfg, times)
    write_table(Path(args.out) / "diffusion.csv", ("t", "gap", "wave_l2", "heat_l2"), rows)
    gaps = [r["gap"] for r in rows]
    summary = {"config": cfg.raw, "rows": len(rows),
               "strictly_decreasing": all(b < a for a, b in zip(gaps, gaps[1:]))}
    write_summary(Path(args.out) / "diffusion.json", summary)
    _echo(summary)
    return EXIT_OK


def cmd_testfn(args) -> int:
    cfg = _load(args)
    Rs = _floats(args.R_list) if args.R_list is not None else cfg.raw["analysis"]["R_list"]
    rows = ex.testfn_table(cfg, Rs)
    cols = ("R", "I_R", "J1", "J2", "J3", "boundary", "residual", "relative_residual",
            "I_hat", "I_tilde", "scaled", "bound_ratio")
    write_table(Path(args.out) / "testfn.csv", cols, rows)
    summary = {"config": cfg.raw, "rows": len(rows)}
    write_summary(Path(args.out) / "testfn.json", summary)
    _echo(summary)
    return EXIT_OK


def cmd_convergence(args) -> int:
    cfg = _load(args)
    nrs = [int(x) for x in _floats(args.nrs)] if args.nrs is not None else cfg.raw["analysis"]["nrs"]
    rows = ex.convergence_table(cfg, nrs)
    write_table(Path(args.out) / "convergence.csv", ("nr", "error", "order"), rows)
    summary = {"config": cfg.raw, "rows": len(rows), "orders": [r["order"] for r in rows[1:]]}
    write_summary(Path(args.out) / "convergence.json", summary)
    _echo(summary)
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "sweep-p": cmd_sweep_p,
    "sweep-mu": cmd_sweep_mu,
    "feasibility": cmd_feasibility,
    "diffusion": cmd_diffusion,
    "testfn": cmd_testfn,
    "convergence": cmd_convergence,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="TOML experiment config")
    common.add_argument("--out", metavar="DIR", default=".", help="output directory")
    common.add_argument("--jobs", metavar="N", type=int, default=1, help="concurrent runs in sweeps")
    common.add_argument("--override", metavar="KEY=VALUE", action="append",
                        help="dotted config override, e.g. model.p=3.5 (repeatable)")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="sidwave", description="Scale-invariant damped wave experiments")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="one simulation: time-series CSV and JSON summary")
    sp = sub.add_parser("sweep-p", parents=[common], help="classify blow-up across exponents")
    sp.add_argument("--p-list", help="comma-separated exponents")
    sp.add_argument("--bisect", type=int, help="bisection refinements of the threshold")
    sm = sub.add_parser("sweep-mu", parents=[common], help="damping sweep with optional (A, T) escalation")
    sm.add_argument("--mu-list", help="comma-separated damping strengths")
    sm.add_argument("--escalate", type=int, help="escalation steps per mu")
    fe = sub.add_parser("feasibility", parents=[common], help="constructive mu0(eps) table and slope")
    fe.add_argument("--n", type=int)
    fe.add_argument("--p", type=float)
    fe.add_argument("--eps-list")
    di = sub.add_parser("diffusion", parents=[common], help="wave versus heat profile gap")
    di.add_argument("--times")
    tf = sub.add_parser("testfn", parents=[common], help="test-function identity report")
    tf.add_argument("--R-list", dest="R_list")
    cv = sub.add_parser("convergence", parents=[common], help="manufactured-solution order study")
    cv.add_argument("--nrs")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](args)
    except (ConfigurationError, InfeasibleError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (Unstable, FloatingPointError) as exc:
        print(f"numerical instability: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
