"""Orchestration of single runs, sweeps and analysis tables.

Everything here returns plain rows (lists of dicts) so the CLI and the demo
scripts share one code path. Sweeps may fan out over processes; results are
always assembled in parameter order.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import diagnostics as dg
from .blowup import (
    data_sign_functional,
    g_transform,
    make_test_functions,
    regime_for,
    scaling_exponent,
    test_functional,
)
from .config import ExperimentConfig
from .diffusion import diffusion_gap, heat_evolve, l2_norm
from .feasibility import loglog_slope, mu0_curve
from .mms import convergence_study
from .model import ConfigurationError, sample_initial_data
from .solver import run

log = logging.getLogger(__name__)

CSV_COLUMNS = ("t", "l2", "weighted_l2", "weighted_energy", "supnorm")
ERROR = "error"


@dataclass
class RunResult:
    config: ExperimentConfig
    record: dg.RunRecord
    summary: dict
    grid: object = None
    data: object = None


def _fit(times, values, window) -> Optional[float]:
    try:
        return dg.fit_decay_rate(times, values, window).exponent
    except ValueError:
        return None


def summarize(cfg: ExperimentConfig, rec: dg.RunRecord, data, grid, wall: float) -> dict:
    """RunSummary as a JSON-ready dict; exponents only for completed runs."""
    model = cfg.model()
    mu = model.mu
    regime = regime_for(mu, cfg.raw["model"]["beta"]) if (mu is None or mu > 0) else None
    dsf = data_sign_functional(data.u0, data.u1, grid, model.n, regime, mu) if regime else None
    out = {
        "config": cfg.raw,
        "status": rec.status,
        "t_star": rec.t_star,
        "t_end": float(rec.times[-1]),
        "data_sign_functional": dsf,
        "wall_clock_s": round(wall, 3),
        "grid": {"r_max": grid.r_max, "nr": grid.nr, "dr": grid.dr, "dt": rec.meta.get("dt")},
    }
    if rec.status == dg.COMPLETED:
        window = cfg.fit_window(float(rec.times[-1]))
        out["exponents"] = {
            "l2": _fit(rec.times, rec.l2, window),
            "weighted_l2": _fit(rec.times, rec.weighted_l2, window),
            "weighted_energy": _fit(rec.energy_times, rec.weighted_energy, window),
        }
    return out


def execute(cfg: ExperimentConfig, snapshot_times: Optional[Sequence[float]] = None) -> RunResult:
    """One simulation from a config."""
    model = cfg.model()
    grid = cfg.grid()
    data = sample_initial_data(cfg.profile(), grid)
    if snapshot_times is None and cfg.snapshot_stride:
        k = int(math.floor(cfg.horizon / cfg.snapshot_stride + 1e-9))
        snapshot_times = [i * cfg.snapshot_stride for i in range(k + 1)]
    start = time.perf_counter()
    rec = run(model, grid, data, cfg.control(), cfg.horizon, weight=cfg.weight(),
              sample_dt=cfg.sample_dt, snapshot_times=snapshot_times)
    wall = time.perf_counter() - start
    return RunResult(cfg, rec, summarize(cfg, rec, data, grid, wall), grid, data)


def global_looking(summary: dict) -> bool:
    """Completed at the horizon with a negative fitted weighted-L2 exponent."""
    if summary.get("status") != dg.COMPLETED:
        return False
    ex = (summary.get("exponents") or {}).get("weighted_l2")
    return ex is not None and ex < 0


def _safe_summary(raw: dict) -> dict:
    """Worker: run a config, turning per-run failures into an ``error`` summary."""
    try:
        return execute(ExperimentConfig.from_dict(raw)).summary
    except (ConfigurationError, ValueError, FloatingPointError) as exc:
        return {"config": raw, "status": ERROR, "error": str(exc), "t_star": None}


def _map(fn, items, jobs: int):
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _row(key: str, value: float, summary: dict, stage: str) -> dict:
    ex = summary.get("exponents") or {}
    return {
        key: value,
        "status": summary["status"],
        "t_star": summary.get("t_star"),
        "weighted_l2_exponent": ex.get("weighted_l2"),
        "global_looking": global_looking(summary),
        "stage": stage,
    }


# ---------------------------------------------------------------------------
# sweeps


@dataclass
class SweepResult:
    rows: list
    p_hat: Optional[float] = None
    bracket: Optional[tuple] = None
    summaries: list = field(default_factory=list)


def sweep_p(cfg: ExperimentConfig, p_list: Sequence[float], bisect_steps: int = 3, jobs: int = 1) -> SweepResult:
    """Classify each ``p`` and bisect between the largest blow-up and smallest global-looking ``p``."""
    ps = sorted({float(p) for p in p_list})
    raws = [cfg.merged(model={"p": p}) for p in ps]
    sums = _map(_safe_summary, raws, jobs)
    rows = [_row("p", p, s, "grid") for p, s in zip(ps, sums)]
    glob = [r["p"] for r in rows if r["global_looking"]]
    if not glob:
        return SweepResult(rows, None, None, sums)
    hi = min(glob)
    blow = [r["p"] for r in rows if r["status"] == dg.BLOWUP and r["p"] < hi]
    if not blow:
        return SweepResult(rows, None, None, sums)
    lo = max(blow)
    for _ in range(bisect_steps):
        mid = 0.5 * (lo + hi)
        s = _safe_summary(cfg.merged(model={"p": mid}))
        sums.append(s)
        rows.append(_row("p", mid, s, "bisect"))
        if s["status"] == dg.BLOWUP:
            lo = mid
        elif global_looking(s):
            hi = mid
        else:
            break
    order = sorted(range(len(rows)), key=lambda i: rows[i]["p"])
    return SweepResult([rows[i] for i in order], 0.5 * (lo + hi), (lo, hi), [sums[i] for i in order])


def escalation_path(cfg: ExperimentConfig, steps: int, factor: float) -> list:
    """Run ``(A, T) * factor**i`` for ``i < steps``, stopping at the first blow-up.

    Both the position and the velocity amplitude are scaled; the grid follows
    the horizon through the automatic ``r_max``.
    """
    d = cfg.raw["data"]
    rows = []
    for i in range(steps):
        f = factor**i
        sub = cfg.merged(
            horizon=cfg.horizon * f,
            data={"amplitude": d["amplitude"] * f, "velocity": d["velocity"] * f},
        )
        s = _safe_summary(sub)
        row = _row("mu", cfg.raw["model"]["mu"], s, f"escalation_{i}")
        row.update(step=i, amplitude=d["amplitude"] * f, velocity=d["velocity"] * f, horizon=sub["horizon"])
        rows.append(row)
        if s["status"] in (dg.BLOWUP, ERROR, dg.UNSTABLE):
            break
    return rows


def _escalate_worker(args):
    raw, steps, factor = args
    try:
        cfg = ExperimentConfig.from_dict(raw)
    except (ConfigurationError, ValueError) as exc:
        err = {"status": ERROR, "error": str(exc)}
        return [dict(_row("mu", raw["model"]["mu"], err, "escalation_0"), step=0)]
    return escalation_path(cfg, steps, factor)


def sweep_mu(cfg: ExperimentConfig, mu_list: Sequence[float], steps: int = 1, factor: float = 2.0, jobs: int = 1) -> list:
    """Escalation path per ``mu`` (a single run each when ``steps == 1``)."""
    mus = sorted({float(m) for m in mu_list})
    args = [(cfg.merged(model={"mu": m}), steps, factor) for m in mus]
    paths = _map(_escalate_worker, args, jobs)
    return [row for path in paths for row in path]


def escalation_outcome(rows: list) -> str:
    """``blowup``, ``global_looking`` or ``inconclusive`` for one mu's path."""
    if any(r["status"] == dg.BLOWUP for r in rows):
        return "blowup"
    if rows and rows[-1]["global_looking"]:
        return "global_looking"
    return "inconclusive"


# ---------------------------------------------------------------------------
# analysis tables


def diffusion_table(cfg: ExperimentConfig, times: Sequence[float]) -> list:
    """Normalised-shape gap between the linear wave and its heat reference."""
    model = cfg.model()
    if not model.is_linear:
        raise ConfigurationError("diffusion comparison needs nonlinearity = 'none'")
    if cfg.raw["model"]["beta"] is not None or not (model.mu and model.mu > 0):
        raise ConfigurationError("diffusion comparison needs scale-invariant damping with mu > 0")
    times = sorted(float(t) for t in times)
    if not times or times[0] <= 0:
        raise ConfigurationError("compare times must be positive")
    if times[-1] > cfg.horizon:
        cfg = cfg.with_overrides(horizon=times[-1])
    res = execute(cfg, snapshot_times=times)
    grid, data, n, mu = res.grid, res.data, model.n, model.mu
    # mass-carrying combination of the data for mu > 1
    v0 = data.u0 + data.u1 / (mu - 1.0) if mu > 1 else data.u0
    rows = []
    for t, u in zip(res.record.snapshot_times, res.record.snapshots):
        v = heat_evolve(v0, grid, mu, n, t)
        rows.append({"t": float(t), "gap": diffusion_gap(u, v, grid, n),
                     "wave_l2": l2_norm(u, grid, n), "heat_l2": l2_norm(v, grid, n)})
    return rows


def testfn_table(cfg: ExperimentConfig, R_list: Sequence[float]) -> list:
    """One run to ``max(R)`` with a dense trace, then the I_R report per ``R``."""
    Rs = sorted(float(R) for R in R_list)
    if not Rs:
        return []
    if Rs[0] <= 0:
        raise ConfigurationError("R must be positive")
    if Rs[-1] > cfg.horizon:
        raise ConfigurationError(f"R={Rs[-1]} exceeds the horizon {cfg.horizon}")
    model = cfg.model()
    if model.is_linear:
        raise ConfigurationError("the test-function identity needs a nonlinear model")
    stride = cfg.snapshot_stride or Rs[0] / 128.0
    if stride > Rs[0] / 32:
        raise ConfigurationError(f"snapshot_stride {stride} exceeds R/32 for R={Rs[0]}")
    k = int(math.ceil(Rs[-1] / stride - 1e-9))
    snaps = [min(i * stride, Rs[-1]) for i in range(k + 1)]
    res = execute(cfg.with_overrides(horizon=Rs[-1]), snapshot_times=sorted(set(snaps + Rs)))
    if res.record.status != dg.COMPLETED:
        raise ConfigurationError(f"trace ended with status {res.record.status} before t={Rs[-1]}")
    beta = cfg.raw["model"]["beta"]
    regime = regime_for(model.mu, beta)
    gt = g_transform(regime, beta if beta is not None else model.mu)
    rows = []
    for R in Rs:
        pair = make_test_functions(R, model.p)
        rep = test_functional(res.record.snapshot_times, res.record.snapshots, res.data.u1, R, pair, gt, res.grid, model.n)
        bound = (rep.I_tilde ** (1 / model.p) + rep.I_hat ** (1 / model.p)) * R ** scaling_exponent(model.n, model.p)
        rows.append({
            "R": R, "I_R": rep.I_R, "J1": rep.J1, "J2": rep.J2, "J3": rep.J3,
            "boundary": rep.boundary_term, "residual": rep.residual,
            "relative_residual": rep.relative_residual, "I_hat": rep.I_hat, "I_tilde": rep.I_tilde,
            "scaled": rep.scaled, "bound_ratio": rep.I_R / bound if bound > 0 else math.nan,
        })
    return rows


def feasibility_table(n: int, p: float, eps_list: Optional[Sequence[float]] = None):
    """Rows ``(eps, delta, nu, mu0)`` and the log-log slope of ``mu0(eps)``."""
    if eps_list is None:
        eps_list = np.logspace(-3, -1, 9)
    curve = mu0_curve(n, p, sorted(float(e) for e in eps_list))
    rows = [{"eps": e, "delta": fp.delta, "delta1": fp.delta1, "delta2": fp.delta2, "delta3": fp.delta3,
             "nu": fp.nu, "mu0": fp.mu} for e, fp in curve]
    slope = loglog_slope([r["eps"] for r in rows], [r["mu0"] for r in rows]) if len(rows) > 1 else None
    return rows, slope


def convergence_table(cfg: ExperimentConfig, nrs: Sequence[int]) -> list:
    """Manufactured-solution error and observed order per resolution."""
    study = convergence_study(cfg.model(), tuple(int(x) for x in nrs))
    rows = []
    for i, (nr, err) in enumerate(zip(study.nrs, study.errors)):
        rows.append({"nr": nr, "error": err, "order": study.orders[i - 1] if i else None})
    return rows
