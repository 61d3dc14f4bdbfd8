# %% [markdown]
# # Checking the solver before trusting it
#
# Two sanity checks come first. Without damping the leapfrog scheme should
# conserve its discrete energy, and with a manufactured source the error
# should fall by four whenever the grid is halved.

# %%
import numpy as np

from sidwave import ModelSpec, PolynomialBump, ScaleInvariant, Undamped, make_grid, run, sample_initial_data
from sidwave.mms import convergence_study

# %% [markdown]
# ## Free waves
#
# A smooth bump of radius one, evolved for ten time units in one, two and
# three dimensions. `weighted_energy` is unweighted here (no weight given).

# %%
for n in (1, 2, 3):
    grid = make_grid(14.0, 2000)
    data = sample_initial_data(PolynomialBump(1.0, 1.0, 3), grid)
    rec = run(ModelSpec(n, Undamped(), nonlinearity="none"), grid, data, T=10.0)
    drift = np.max(np.abs(rec.weighted_energy / rec.weighted_energy[0] - 1))
    print(f"n={n}: max relative energy drift {drift:.2e}")

# %% [markdown]
# ## Manufactured solution
#
# `u = exp(-t) (1 - r^2/4)^3` is forced into being a solution. The observed
# order should sit on 2.

# %%
for n in (1, 2, 3):
    study = convergence_study(ModelSpec(n, ScaleInvariant(2.0), p=2.0))
    print(f"n={n}: errors", ["%.2e" % e for e in study.errors], "orders", np.round(study.orders, 3))
