"""Explicit leapfrog for the radial damped wave equation.

The Laplacian is the standard three-point radial stencil; damping is the
centred average ``b (u^{k+1} - u^{k-1}) / (2 dt)`` so the update stays
explicit and is stable for any size of ``b``. The nonlinearity and any
forcing are evaluated at level ``k``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from . import diagnostics as dg
from .model import ConfigurationError, InitialData, ModelSpec, RadialGrid, radial_integral

log = logging.getLogger(__name__)


class NumericalInstability(FloatingPointError):
    """A time step produced NaN or Inf."""


@dataclass(frozen=True)
class StepControl:
    """Time-step policy.

    ``dt = cfl * dr`` at the start. Whenever the nonlinear time scale
    ``dt * sqrt(f'(sup|u|))`` exceeds ``nonlinear_cfl`` the step is divided by
    ``refine_factor`` (never below ``dt_floor``). ``blowup_threshold`` is an
    absolute sup-norm cap; when unset it is ``blowup_factor`` times the
    initial sup-norm.
    """

    cfl: float = 0.5
    dt_floor: float = 1e-9
    blowup_threshold: Optional[float] = None
    blowup_factor: float = 1e6
    refine_factor: float = 2.0
    nonlinear_cfl: float = 0.1

    def __post_init__(self):
        if not self.cfl > 0:
            raise ConfigurationError(f"cfl must be positive, got {self.cfl}")
        if not self.refine_factor > 1:
            raise ConfigurationError("refine_factor must exceed 1")
        if not self.dt_floor > 0:
            raise ConfigurationError("dt_floor must be positive")

    def threshold_for(self, sup0: float) -> float:
        if self.blowup_threshold is not None:
            return float(self.blowup_threshold)
        return self.blowup_factor * sup0 if sup0 > 0 else math.inf


@dataclass(frozen=True)
class SolutionState:
    """Levels ``u^{k-1}`` and ``u^k``; ``dt_prev = t_k - t_{k-1}``, ``dt`` the next step."""

    u_prev: np.ndarray
    u_curr: np.ndarray
    t: float
    k: int
    dt: float
    dt_prev: float


def laplacian_radial(f: np.ndarray, grid: RadialGrid, n: int) -> np.ndarray:
    f = np.asarray(f, dtype=np.float64)
    h = grid.dr
    out = np.zeros_like(f)
    j = np.arange(1, grid.nr)
    out[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / h**2 + (n - 1) / (j * h) * (f[2:] - f[:-2]) / (2.0 * h)
    out[0] = 2.0 * n * (f[1] - f[0]) / h**2
    return out


def _rhs(u: np.ndarray, t: float, model: ModelSpec, grid: RadialGrid) -> np.ndarray:
    rhs = laplacian_radial(u, grid, model.n)
    if not model.is_linear:
        rhs += model.f(u)
    if model.forcing is not None:
        rhs += model.forcing(t, grid.r)
    return rhs


def first_step(data: InitialData, model: ModelSpec, grid: RadialGrid, dt: float, t0: float = 0.0) -> SolutionState:
    """Taylor start ``u^1 = u0 + dt u1 + dt^2/2 (Lap u0 - b u1 + f(u0) + s)``."""
    u0 = np.asarray(data.u0, dtype=np.float64)
    u1 = np.asarray(data.u1, dtype=np.float64)
    acc = _rhs(u0, t0, model, grid) - model.b(t0) * u1
    un = u0 + dt * u1 + 0.5 * dt * dt * acc
    un[-1] = 0.0
    _check_finite(un, t0 + dt)
    return SolutionState(u0.copy(), un, t0 + dt, 1, dt, dt)


def step(state: SolutionState, model: ModelSpec, grid: RadialGrid, dt: Optional[float] = None) -> SolutionState:
    """Advance one level.

    For equal steps this is
    ``(1 + b dt/2) u^{k+1} = 2 u^k - (1 - b dt/2) u^{k-1} + dt^2 (Lap u^k + f + s)``;
    after a step-size change the variable-step form of the same scheme is used.
    """
    h = state.dt if dt is None else dt
    hp = state.dt_prev
    b = model.b(state.t)
    u, um = state.u_curr, state.u_prev
    rhs = _rhs(u, state.t, model, grid)
    un = (u + (h / hp) * (u - um) + 0.5 * b * h * um + 0.5 * (h + hp) * h * rhs) / (1.0 + 0.5 * b * h)
    un[-1] = 0.0
    _check_finite(un, state.t + h)
    return SolutionState(u, un, state.t + h, state.k + 1, state.dt, h)


def _check_finite(u, t):
    if not np.all(np.isfinite(u)):
        raise NumericalInstability(f"non-finite values at t={t:.6g}")


def _peak(u: np.ndarray) -> float:
    j = int(np.argmax(np.abs(u)))
    return float(u[j])


def run(
    model: ModelSpec,
    grid: RadialGrid,
    data: InitialData,
    ctrl: StepControl = StepControl(),
    T: float = 1.0,
    *,
    weight: Optional[dg.WeightSpec] = None,
    sample_dt: Optional[float] = None,
    snapshot_times: Optional[Sequence[float]] = None,
    t0: float = 0.0,
    check_domain: bool = True,
    observers: Sequence[Callable[[float, np.ndarray], None]] = (),
) -> dg.RunRecord:
    """Integrate from ``t0`` to ``T`` sampling diagnostics every ``sample_dt``.

    Stops early when the sup-norm passes the blow-up threshold or a step turns
    non-finite; the record's status says which. Full fields are kept at
    ``snapshot_times``, which the stepper lands on exactly. Each observer is
    called as ``obs(t, u)`` at every diagnostic sample and must not mutate ``u``.
    """
    if T < t0:
        raise ConfigurationError(f"horizon {T} precedes the start time {t0}")
    support = data.profile.support
    if check_domain and model.forcing is None and grid.r_max < support + (T - t0) + 2 * grid.dr:
        raise ConfigurationError(
            f"r_max={grid.r_max} too small: need r0 + T + 2dr = {support + T - t0 + 2 * grid.dr:.6g}"
        )
    if weight is None:
        weight = dg.WeightSpec.unweighted()
    n = model.n
    u0 = np.asarray(data.u0, dtype=np.float64)
    sup0 = float(np.max(np.abs(u0)))
    # velocity-only data: scale the cap by the velocity amplitude instead
    scale = sup0 if sup0 > 0 else float(np.max(np.abs(data.u1)))
    threshold = ctrl.threshold_for(scale)

    rows = {k: [] for k in ("times", "l2", "wl2", "we", "et", "sup", "peak")}
    snaps_t, snaps = [], []
    wanted = [] if snapshot_times is None else [float(x) for x in snapshot_times]
    events = sorted(x for x in wanted if t0 < x <= T)

    def sample(u_now, t_now, energy, t_energy):
        rows["times"].append(t_now)
        rows["l2"].append(dg.l2_squared(u_now, grid, n))
        rows["wl2"].append(dg.weighted_l2(_Level(u_now, t_now), grid, n, weight))
        rows["we"].append(energy)
        rows["et"].append(t_energy)
        rows["sup"].append(float(np.max(np.abs(u_now))))
        rows["peak"].append(_peak(u_now))
        for obs in observers:
            obs(t_now, u_now)

    sample(u0, t0, _data_energy(data, grid, n, weight, t0), t0)
    if any(abs(x - t0) < 1e-12 for x in wanted):
        snaps_t.append(t0)
        snaps.append(u0.copy())

    span = T - t0
    state = None
    dt = 0.0
    unstable = False
    if span > 0:
        steps = max(1, math.ceil(span / (ctrl.cfl * grid.dr) - 1e-9))
        dt = span / steps
        if sample_dt is None:
            sample_dt = span / min(steps, 1000)
        next_sample = t0 + sample_dt
        # per-step sampling once past the geometric mean of start and cap
        watch = math.sqrt(threshold * scale) if math.isfinite(threshold) else math.inf
        tol = 1e-9 * dt
        try:
            state = first_step(data, model, grid, dt, t0)
            while True:
                sup = float(np.max(np.abs(state.u_curr)))
                done = state.t >= T - tol
                if done or state.t >= next_sample - tol or sup > watch:
                    e = dg.weighted_energy(state, grid, n, weight)
                    sample(state.u_curr, state.t, e, state.t - 0.5 * state.dt_prev)
                    while next_sample <= state.t + tol:
                        next_sample += sample_dt
                while events and events[0] <= state.t + tol:
                    events.pop(0)
                    snaps_t.append(state.t)
                    snaps.append(state.u_curr.copy())
                if done or sup > threshold:
                    break
                h = state.dt
                while h * math.sqrt(model.f_slope(sup)) > ctrl.nonlinear_cfl and h / ctrl.refine_factor >= ctrl.dt_floor:
                    h /= ctrl.refine_factor
                if h != state.dt:
                    state = replace(state, dt=h)
                target = min(T, events[0]) if events else T
                if target - state.t < h * (1.0 + 1e-6):
                    h = target - state.t
                state = step(state, model, grid, h)
        except NumericalInstability:
            unstable = True
            rows["times"].append(rows["times"][-1])
            rows["et"].append(rows["et"][-1])
            for key in ("l2", "wl2", "we", "sup", "peak"):
                rows[key].append(math.nan)

    rec = dg.RunRecord(
        times=np.array(rows["times"]),
        l2=np.array(rows["l2"]),
        weighted_l2=np.array(rows["wl2"]),
        weighted_energy=np.array(rows["we"]),
        energy_times=np.array(rows["et"]),
        supnorm=np.array(rows["sup"]),
        peak=np.array(rows["peak"]),
        threshold=threshold,
        snapshot_times=np.array(snaps_t) if snapshot_times is not None else None,
        snapshots=np.array(snaps) if snapshot_times is not None else None,
        weight=weight,
        meta={"dt": dt, "dr": grid.dr, "nr": grid.nr, "r_max": grid.r_max, "t0": t0, "T": T, "final_state": state},
    )
    rec.status = dg.classify_termination(rec, threshold)
    if unstable and rec.status != dg.BLOWUP:
        rec.status = dg.UNSTABLE
    if rec.status == dg.BLOWUP:
        over = np.nonzero(np.nan_to_num(rec.supnorm, nan=-1.0) > threshold)[0]
        rec.t_star = float(rec.times[over[0]])
    log.debug("run finished: status=%s t=%s", rec.status, rec.times[-1])
    return rec


@dataclass(frozen=True)
class _Level:
    u_curr: np.ndarray
    t: float


def _data_energy(data: InitialData, grid: RadialGrid, n: int, weight: dg.WeightSpec, t0: float) -> float:
    u0 = np.asarray(data.u0, dtype=np.float64)
    u1 = np.asarray(data.u1, dtype=np.float64)
    kinetic = radial_integral(dg._weighted(u1 * u1, dg.psi(t0, grid.r, weight)), grid, n)
    g = np.diff(u0) / grid.dr
    r_face = grid.r[:-1] + 0.5 * grid.dr
    grad = dg.staggered_gradient_weights(grid, n) @ dg._weighted(g * g, dg.psi(t0, r_face, weight))
    return kinetic + float(grad)
