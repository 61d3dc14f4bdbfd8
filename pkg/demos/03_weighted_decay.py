# %% [markdown]
# # Weighted energy decay for strong damping
#
# For large mu the weighted quantities `int e^{2 psi} u^2` and
# `int e^{2 psi} (u_t^2 + |u_r|^2)` should decay at least like
# `(1+t)^-(1-eps)` and `(1+t)^-(3-eps)`. The pair (eps, delta) comes from the
# constructive feasibility chain for n = 1, p = 4.

# %%
import numpy as np

from sidwave import ModelSpec, PolynomialBump, ScaleInvariant, WeightSpec, make_grid, run, sample_initial_data
from sidwave.diagnostics import fit_decay_rate, m_functional
from sidwave.feasibility import solve_feasible

fp = solve_feasible(1, 4.0)
print(f"eps={fp.eps:.4f} delta={fp.delta:.4f} (the construction itself asks for mu >= {fp.mu:.3g})")

# %%
mu = 50.0
grid = make_grid(104.0, 8000)
rec = run(ModelSpec(1, ScaleInvariant(mu), nonlinearity="none"), grid,
          sample_initial_data(PolynomialBump(1.0), grid), T=100.0,
          weight=WeightSpec(mu, fp.delta), sample_dt=0.25)

a = fit_decay_rate(rec.times, rec.weighted_l2, (10, 100))
b = fit_decay_rate(rec.energy_times, rec.weighted_energy, (10, 100))
print(f"weighted L2 exponent {a.exponent:.3f} (bound {-(1 - fp.eps):.3f})")
print(f"weighted energy exponent {b.exponent:.3f} (bound {-(3 - fp.eps):.3f})")

# %% [markdown]
# The a priori functional M(t) stays bounded; for linear data it is flat.

# %%
M = m_functional(rec, 1, fp.eps)
print("M at t = 0, 10, 100:", M[0], M[np.searchsorted(rec.times, 10)], M[-1])
