# %% [markdown]
# # One-shot advantage over guessing
#
# A single detected photon either came from one source at the origin or
# from a pair of incoherent sources separated by k PSF widths. We compare
# the Helstrom error with the error of simply announcing the likelier
# hypothesis, and map where measuring does not help at all.

# %%
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from twosource import ScenarioParams, forbidden_threshold_asymmetric, helstrom_one_shot

# %% [markdown]
# Advantage in percent, (E_guess / E_min - 1) x 100, over (p1, k) for the
# asymmetric scenario. Forbidden cells are masked out.

# %%
ks = np.linspace(0.0, 3.0, 61)
p1s = np.linspace(0.01, 0.99, 99)
fig, axes = plt.subplots(1, 3, figsize=(12, 3.5), sharey=True)
for ax, q in zip(axes, (0.1, 0.5, 0.9)):
    grid = np.full((ks.size, p1s.size), np.nan)
    for i, k in enumerate(ks):
        for j, p1 in enumerate(p1s):
            rep = helstrom_one_shot(ScenarioParams("asymmetric", k, q, p1))
            if not rep.forbidden:
                grid[i, j] = rep.advantage_pct
    im = ax.pcolormesh(p1s, ks, grid, shading="auto")
    ax.axvline(forbidden_threshold_asymmetric(q), color="w", lw=0.8, ls="--")
    ax.set(title=f"q = {q}", xlabel="P1")
    fig.colorbar(im, ax=ax)
axes[0].set_ylabel("k")
fig.savefig("one_shot_asymmetric.png", dpi=120, bbox_inches="tight")

# %% [markdown]
# The dashed line is q/(1+q). Below it the second hypothesis is so unlikely
# a priori that one photon can never overturn the prior.
#
# The symmetric scenario has no such region. Near-equal brightness is the
# hardest case:

# %%
for q in (0.1, 0.3, 0.5):
    rep = helstrom_one_shot(ScenarioParams("symmetric", 1.0, q, 0.5))
    print(f"q = {q}: E_min = {rep.e_min:.4f}, advantage = {rep.advantage_pct:.2f}%")
