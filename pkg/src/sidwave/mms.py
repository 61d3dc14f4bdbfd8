"""Manufactured solutions ``u = exp(-t) (1 - (r/r0)^2)_+^k`` and order studies."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .model import InitialData, ModelSpec, PolynomialBump, make_grid, radial_integral
from .solver import StepControl, run


@dataclass(frozen=True)
class ManufacturedBump:
    r0: float = 2.0
    k: int = 3

    def shape(self, r):
        x = (np.asarray(r, dtype=np.float64) / self.r0) ** 2
        return np.where(x < 1.0, np.clip(1.0 - x, 0.0, None) ** self.k, 0.0)

    def laplacian_shape(self, r, n: int):
        # g(x) with x = r^2/r0^2: Lap g = (4x g'' + 2n g') / r0^2
        k = self.k
        x = (np.asarray(r, dtype=np.float64) / self.r0) ** 2
        w = np.clip(1.0 - x, 0.0, None)
        lap = (4.0 * x * k * (k - 1) * w ** (k - 2) - 2.0 * n * k * w ** (k - 1)) / self.r0**2
        return np.where(x < 1.0, lap, 0.0)

    def exact(self, t, r):
        return math.exp(-t) * self.shape(r)

    def forcing_for(self, model: ModelSpec):
        """Source ``s = u_tt - Lap u + b u_t - f(u)`` making ``exact`` a solution."""
        n = model.n

        def s(t, r):
            e = math.exp(-t)
            B = self.shape(r)
            u = e * B
            return e * B - e * self.laplacian_shape(r, n) - model.b(t) * e * B - model.f(u)

        return s

    def initial_data(self, grid) -> InitialData:
        B = self.shape(grid.r)
        return InitialData(PolynomialBump(1.0, self.r0, self.k, -1.0), B, -B)


@dataclass
class ConvergenceStudy:
    nrs: list
    errors: list
    orders: list


def convergence_study(model: ModelSpec, nrs=(60, 120, 240, 480), r_max: float = 3.0, T: float = 1.0,
                      bump: ManufacturedBump = ManufacturedBump(), cfl: float = 0.5) -> ConvergenceStudy:
    """L2 error at ``T`` under simultaneous refinement of dr and dt (fixed cfl)."""
    model = replace(model, forcing=bump.forcing_for(model))
    errors = []
    for nr in nrs:
        grid = make_grid(r_max, nr)
        rec = run(model, grid, bump.initial_data(grid), StepControl(cfl=cfl), T, sample_dt=T)
        u = rec.meta["final_state"].u_curr
        err = u - bump.exact(T, grid.r)
        errors.append(math.sqrt(radial_integral(err * err, grid, model.n)))
    orders = [math.log(errors[i] / errors[i + 1]) / math.log(nrs[i + 1] / nrs[i]) for i in range(len(nrs) - 1)]
    return ConvergenceStudy(list(nrs), errors, orders)
