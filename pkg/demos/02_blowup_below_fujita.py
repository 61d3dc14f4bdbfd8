# %% [markdown]
# # Blow-up for p below the Fujita exponent
#
# With mu = 2 the damping is effective enough that the equation behaves like
# the heat equation, whose critical power in one dimension is p_F = 3. Positive
# data with p = 2 should blow up in finite time; how soon depends on the size
# of the data.

# %%
from sidwave import BLOWUP, ModelSpec, PolynomialBump, ScaleInvariant, make_grid, run, sample_initial_data
from sidwave.blowup import SUPERCRITICAL, data_sign_functional

model = ModelSpec(1, ScaleInvariant(2.0), p=2.0)

# %% [markdown]
# The sign condition needs `int ((mu - 1) u0 + u1) dx > 0`. For a positive
# bump with zero velocity that is automatic.

# %%
grid = make_grid(12.0, 800)
for amplitude in (1.0, 2.0, 5.0):
    data = sample_initial_data(PolynomialBump(amplitude), grid)
    rec = run(model, grid, data, T=10.0)
    sign = data_sign_functional(data.u0, data.u1, grid, 1, SUPERCRITICAL, 2.0)
    print(f"A={amplitude}: functional {sign:.3f}, status {rec.status}, t* {rec.t_star}")

# %% [markdown]
# The detected time should barely move when the grid is refined.

# %%
for nr in (400, 800, 1600):
    g = make_grid(12.0, nr)
    rec = run(model, g, sample_initial_data(PolynomialBump(1.0), g), T=10.0)
    assert rec.status == BLOWUP
    print(nr, rec.t_star)
