# %% [markdown]
# # Where does blow-up stop?
#
# Fix the data and vary p. For mu = 50, n = 1 theory puts the threshold at
# p_F = 3. A sweep with bisection brackets the empirical threshold.

# %%
from sidwave import experiments as ex
from sidwave.config import ExperimentConfig

base = ExperimentConfig.from_dict({
    "horizon": 400.0,
    "model": {"n": 1, "mu": 50.0},
    "data": {"amplitude": 1.0},
    "weight": {"delta": 4.0 / 7.0},
})
res = ex.sweep_p(base, [2.0, 2.5, 3.5, 4.0], bisect_steps=2, jobs=4)
for row in res.rows:
    print(row["p"], row["status"], row["t_star"], row["weighted_l2_exponent"])
print("empirical threshold", res.p_hat, "bracket", res.bracket)

# %% [markdown]
# ## Weak damping
#
# For mu <= 1 blow-up persists above p_F, up to 1 + 2/(n + mu - 1). Nobody
# knows in advance how long to wait, so amplitude and horizon are doubled
# together until something happens. The same path at mu = 50 should stay quiet.

# %%
cfg = ExperimentConfig.from_dict({
    "horizon": 25.0,
    "model": {"n": 1, "p": 3.5},
    "data": {"amplitude": 0.0, "velocity": 0.25},
    "grid": {"dr": 0.025},
})
rows = ex.sweep_mu(cfg, [0.5, 50.0], steps=4, factor=2.0, jobs=2)
for r in rows:
    print(r["mu"], r["velocity"], r["horizon"], r["status"], r["t_star"])
