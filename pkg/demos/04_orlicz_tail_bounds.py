# %% [markdown]
# # Tail bounds for the L_p error under lighter-than-Gaussian assumptions
#
# The power N-functions |x|^alpha/alpha interpolate between alpha = 2
# (Gaussian) and classes with lighter tails (alpha < 2). The tail estimate
# 2 exp(-phi*((eps/S)^(1/p))) only applies above a validity threshold.

# %%
import numpy as np

from _plotting import plt, save
from wksbounds import MaternHalfModel, PowerOrlicz, Schedule, s_np, tail_probability, validity_threshold
from wksbounds.orlicz import conjugate_numeric, phi_conjugate

# %% [markdown]
# The closed-form conjugate agrees with a direct numerical supremum.

# %%
for alpha in (1.25, 1.5, 2.0):
    f = PowerOrlicz(alpha)
    x = 1.3
    print(f"alpha={alpha}: phi*({x}) = {phi_conjugate(f, x):.10f}, numeric {conjugate_numeric(f, x).value:.10f}")

# %%
scheme = Schedule().scheme(4)
S = s_np(scheme, MaternHalfModel(1.0), T=1.0, p=2.0).value
print(f"S for N=4, p=2: {S:.5f}")
curves = {}
for alpha in (1.25, 1.5, 2.0):
    f = PowerOrlicz(alpha)
    thr = validity_threshold(S, 2.0, f)
    eps = np.linspace(1.01 * thr, 8 * S, 100)
    curves[alpha] = (eps, np.array([min(1.0, tail_probability(e, S, 2.0, f)) for e in eps]))
    print(f"alpha={alpha}: threshold {thr:.4f}; bound at eps=6S: {min(1, tail_probability(6 * S, S, 2.0, f)):.3e}")

# %%
if plt is not None:
    fig, ax = plt.subplots(figsize=(6, 4))
    for alpha, (e, b) in curves.items():
        ax.semilogy(e / S, b, label=f"alpha={alpha}")
    ax.set_xlabel("eps / S")
    ax.set_ylabel("tail bound")
    ax.legend()
    save(fig, "orlicz_tail_bounds.png")
