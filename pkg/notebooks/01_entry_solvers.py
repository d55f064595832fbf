# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
# ---

# %% [markdown]
# # One entry at a time
#
# With every entry but one held fixed, each sidelobe is affine in the free
# entry.  This notebook looks at the two exact single-entry solvers: the
# bisection solver for continuous phases and the exhaustive DFT solver for
# M-ary alphabets.

# %%
import numpy as np

from phasecode import (
    Alphabet,
    build_context,
    cpm_entry_optimize,
    dft_lag_table,
    dpm_entry_optimize,
    generate,
    lag_quartics,
    objective_f_theta,
)

seq = generate("random", 16, seed=3)
d = 5
ctx = build_context(seq, d)

# %% [markdown]
# ## The entry objective on a phase grid
#
# Each squared sidelobe, as a function of the free phase, is a quartic in
# `tan(phi/2)` over `(1 + tan^2)^2`.  Compare the quartic form with direct
# evaluation.

# %%
phi = np.linspace(-np.pi + 0.01, np.pi - 0.01, 2001)
beta = np.tan(phi / 2)
P = lag_quartics(ctx)
ratio = np.stack([np.polyval(p, beta) for p in P], axis=1) / ((1 + beta**2) ** 2)[:, None]
print("max |quartic form - direct|:", np.abs(ratio - ctx.sidelobe_power(phi)).max())

# %% [markdown]
# ## Bisection on the min-max value
#
# For a few Pareto weights, the solver result against a fine grid.

# %%
grid = np.linspace(0, 2 * np.pi, 200_000, endpoint=False)
for theta in (0.0, 0.5, 1.0):
    res = cpm_entry_optimize(seq, d, theta)
    g = ctx.objective(grid, theta)
    print(f"theta={theta:.1f}  before {res.previous:9.4f}  solver {res.value:9.4f}  "
          f"grid {g.min():9.4f}  phase {res.phase:.4f}  bisection steps {res.iterations}")

# %% [markdown]
# ## M-ary alphabets
#
# At the M alphabet points every squared sidelobe is one bin of an M-point
# DFT, so one FFT per lag scores all candidates.

# %%
seq8 = generate("random", 16, Alphabet.discrete(8), seed=3)
nu = dft_lag_table(build_context(seq8, d), 8)
print("ISL of each candidate:", np.round(nu.sum(axis=0), 3))
res = dpm_entry_optimize(seq8, d, 0.0)
print("chosen index", res.index, "value", round(res.value, 3),
      "check", round(objective_f_theta(seq8, 0.0) - res.improvement, 3))
