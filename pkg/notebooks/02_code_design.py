# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
# ---

# %% [markdown]
# # Designing codes
#
# Coordinate descent sweeps the entries with the exact single-entry solvers
# until a sweep stops paying off.  Here: a binary peak-sidelobe search, an
# ISL run from a Golomb start, and a short Pareto chain.

# %%
import numpy as np

from phasecode import (
    Alphabet,
    DesignConfig,
    autocorrelation,
    cd_run,
    generate,
    isl,
    multi_start,
    pareto_sweep,
    psl,
)

# %% [markdown]
# ## Binary codes with small peak sidelobes
#
# Three hundred random binary starts at length 13, without the l_p warm-up.
# A length-13 binary code with all sidelobes of modulus at most 1 exists;
# single-flip descent reaches it only from a small fraction of starts.

# %%
starts = tuple(("binary-random", s) for s in range(300))
cfg = DesignConfig(theta=1.0, alphabet=Alphabet.binary(), starts=starts, lp_init="off")
rep = multi_start(cfg, 13)
hits = sum(psl(s.sequence) == 1 for s in rep.starts)
print("best PSL", rep.final_psl, "reached by", hits, "of", len(starts), "starts")
print("signs", (1 - 2 * rep.best_sequence.indices).tolist())
print("|r_k|", np.round(np.abs(autocorrelation(rep.best_sequence).r), 3).tolist())

# %% [markdown]
# ## ISL from a Golomb start

# %%
golomb = generate("golomb", 64)
run = cd_run(DesignConfig(theta=0.0, lp_init="off"), golomb)
trace = run.objective_trace[0]
print(f"ISL {isl(golomb):.1f} -> {run.final_isl:.1f} in {len(trace) - 1} sweeps")
print("first sweeps:", [round(v, 1) for _, v in trace[:6]])

# %% [markdown]
# ## Trading peak against integrated sidelobes
#
# Each weight starts from the optimum of the previous one.

# %%
pts = pareto_sweep(DesignConfig(alphabet=Alphabet.discrete(32), starts=(("random", 1),)), 48)
n = 48
for p in pts:
    print(f"theta {p.theta:.1f}  PSL {20 * np.log10(p.psl / n):7.2f} dB  ISL {10 * np.log10(p.isl / n**2):7.2f} dB")
