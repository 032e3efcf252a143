# %% [markdown]
# # Many photons
#
# With M detected photons the states become M-fold tensor powers. The fast
# evaluator works in the eigenbasis of rho_2, so M in the hundreds costs
# milliseconds. The dense evaluator is kept as a cross-check.

# %%
import numpy as np

from twosource import ScenarioParams, chernoff_analytic, helstrom_m_shot, minimal_m

params = ScenarioParams("symmetric", 1.0)
for m in (1, 4, 7):
    fast = helstrom_m_shot(params, m, method="fast").e_min
    dense = helstrom_m_shot(params, m, method="dense").e_min
    print(f"M = {m}: fast {fast:.15f}  dense {dense:.15f}")

# %% [markdown]
# The error decays with the Chernoff exponent, here k^2/16.

# %%
ms = np.arange(50, 501, 50)
errs = np.array([helstrom_m_shot(params, int(m)).e_min for m in ms])
slope = np.polyfit(ms, -np.log(2 * errs), 1)[0]
print(f"fitted rate {slope:.6f}, exponent {chernoff_analytic('symmetric', 1.0):.6f}")

# %% [markdown]
# Inside the asymmetric forbidden region a few more photons restore an
# advantage. The threshold for q = 0.5 is P1 = 1/3.

# %%
for p1 in (0.3, 0.2, 0.1, 0.05):
    rep = minimal_m(ScenarioParams("asymmetric", 2.0, 0.5, p1), m_cap=50)
    print(f"P1 = {p1}: minimal M = {rep.m_min}")
