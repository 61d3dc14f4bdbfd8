"""Heat-equation reference for the scale-invariant damped wave.

``(mu / (1+t)) v_t = Lap v`` is the standard heat equation in the effective
time ``s(t) = ((1+t)^2 - 1) / (2 mu)``; its kernel is ``G_mu``. Evolution is
done by exact-kernel quadrature, so the only error is the quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import i0e

from .diagnostics import DecayFit, fit_decay_rate
from .model import RadialGrid, quadrature_weights, radial_integral


@dataclass(frozen=True)
class HeatSpec:
    mu: float
    n: int

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError(f"the heat reference needs mu > 0, got {self.mu}")

    def effective_time(self, t):
        return ((1.0 + np.asarray(t, dtype=np.float64)) ** 2 - 1.0) / (2.0 * self.mu)


def gauss_kernel(t, r, mu: float, n: int):
    if np.any(np.asarray(t) <= 0):
        raise ValueError("the Gauss kernel is singular at t <= 0")
    q = (1.0 + np.asarray(t, dtype=np.float64)) ** 2 - 1.0
    return (mu / (2.0 * math.pi * q)) ** (n / 2.0) * np.exp(-mu * np.asarray(r, dtype=np.float64) ** 2 / (2.0 * q))


def heat_evolve(v0: np.ndarray, grid: RadialGrid, mu: float, n: int, t: float) -> np.ndarray:
    """Radial convolution of ``v0`` with the heat kernel at effective time ``s(t)``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    v0 = np.asarray(v0, dtype=np.float64)
    if t == 0:
        return v0.copy()
    s = float(HeatSpec(mu, n).effective_time(t))
    src = np.nonzero(v0)[0]
    if src.size == 0:
        return np.zeros_like(v0)
    src = np.arange(0, src[-1] + 2 if src[-1] + 1 < grid.size else src[-1] + 1)
    r = grid.r[:, None]
    rp = grid.r[src][None, :]
    # trapezoid weights in r' restricted to the source range (v0 vanishes past it)
    w = np.full(src.size, grid.dr)
    w[0] *= 0.5
    fs = v0[src] * w
    k1 = lambda x: np.exp(-(x**2) / (4.0 * s)) / math.sqrt(4.0 * math.pi * s)
    if n == 1:
        kern = k1(r - rp) + k1(r + rp)
    elif n == 2:
        kern = rp / (2.0 * s) * np.exp(-((r - rp) ** 2) / (4.0 * s)) * i0e(r * rp / (2.0 * s))
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            kern = np.where(r > 0, rp / np.where(r > 0, r, 1.0) * (k1(r - rp) - k1(r + rp)), rp**2 / s * k1(rp))
    return kern @ fs


def l2_norm(v, grid: RadialGrid, n: int) -> float:
    return math.sqrt(radial_integral(np.asarray(v) ** 2, grid, n))


def lp_lq_decay_check(v0, grid: RadialGrid, mu: float, n: int, times: Sequence[float]) -> DecayFit:
    """Fitted exponent of ``||v(t)||_{L^2}`` over ``times`` (all of them form the window)."""
    v0 = np.asarray(v0, dtype=np.float64)
    if np.any(v0 < 0) or not np.any(v0 > 0):
        raise ValueError("v0 must be nonnegative and nonzero")
    times = np.asarray(times, dtype=np.float64)
    norms = [l2_norm(heat_evolve(v0, grid, mu, n, t), grid, n) for t in times]
    return fit_decay_rate(times, norms, (times[0], times[-1]))


def diffusion_gap(u, v, grid: RadialGrid, n: int) -> float:
    """L2 distance between the L2-normalised shapes of ``u`` and ``v``."""
    nu, nv = l2_norm(u, grid, n), l2_norm(v, grid, n)
    if nu == 0 or nv == 0:
        raise ValueError("diffusion_gap needs nonzero fields")
    return l2_norm(np.asarray(u) / nu - np.asarray(v) / nv, grid, n)


def mass(v, grid: RadialGrid, n: int) -> float:
    return float(quadrature_weights(grid, n) @ np.asarray(v))
