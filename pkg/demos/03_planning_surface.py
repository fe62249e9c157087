# %% [markdown]
# # Choosing the sampling stage
#
# Given an accuracy eps for the L_2 error on [0, 1] and a reliability
# 1 - delta, the planner finds the smallest stage N on the dyadic
# schedule whose uniform bound is small enough. The signal model only
# assumes unit variance and spectral tail mass at most 1/Lambda.

# %%
import numpy as np

from _plotting import plt, save
from wksbounds import PlanRequest, plan, plan_sweep

# %%
res = plan(PlanRequest(epsilon=0.1, delta=0.1))
print(f"eps=delta=0.1 -> N={res.N}, omega={res.omega:g}, n={res.n}")
print(f"  bound {res.a_tilde_value:.5f} <= target {res.rhs_value:.5f}")
print(f"  at N-1 the bound was {res.previous['a_tilde']:.5f}")

# %% [markdown]
# The surface over a grid of accuracies and reliabilities.

# %%
eps = np.geomspace(0.01, 1.0, 9)
deltas = np.array([0.01, 0.05, 0.1, 0.2, 0.5])
cells = plan_sweep(PlanRequest(0.1, 0.1), eps, deltas, workers=4)
surface = np.array([c.result.N for c in cells]).reshape(eps.size, deltas.size)
print("rows: eps, columns: delta =", deltas)
for e, row in zip(eps, surface):
    print(f"{e:6.3f}  " + " ".join(f"{v:3d}" for v in row))

# %%
if plt is not None:
    fig, ax = plt.subplots(figsize=(6, 4))
    for j, d in enumerate(deltas):
        ax.step(eps, surface[:, j], where="post", label=f"delta={d:g}")
    ax.set_xscale("log")
    ax.set_xlabel("eps")
    ax.set_ylabel("N")
    ax.legend()
    save(fig, "planning_surface.png")
