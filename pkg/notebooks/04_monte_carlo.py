# %% [markdown]
# # Simulating the protocol
#
# Each hypothesis gets `trials` decisions of M shots. Random numbers come
# from Philox substreams keyed by (seed, hypothesis, block), so the result
# does not depend on how many workers share the job.

# %%
from twosource import SimConfig, run_experiment

for kind in ("asymmetric", "symmetric"):
    for k in (0.5, 1.0, 2.0):
        for m in (1, 50):
            rep = run_experiment(SimConfig(kind, k, m=m, trials=20_000, seed=7), workers=2)
            z = (rep.p_hat - rep.p_theory) / rep.stderr if rep.stderr else 0.0
            print(f"{kind:10s} k={k:3.1f} M={m:2d}  p_hat={rep.p_hat:.5f}  theory={rep.p_theory:.5f}  z={z:+.2f}")

# %% [markdown]
# The same grid is available from the command line:
#
# ```
# twosource simulate --axis k:0.5:2:4 --m 50 --trials 100000 --seed 7
# ```
