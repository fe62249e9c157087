# %% [markdown]
# # How tight is the uniform bound?
#
# For each stage we compare the uniform RMS bound on [0, 1] with the
# Monte Carlo supremum of the RMS error over 50 realizations, and with the
# exact RMS error computed from the covariance.

# %%
import numpy as np

from _plotting import plt, save
from wksbounds import McConfig, MaternHalfModel, Schedule, a_n_auto, a_tilde, empirical_sup_rms
from wksbounds.wks import exact_mse_grid

model = MaternHalfModel(1.0)
cfg = McConfig(num_realizations=50, master_seed=0)

# %%
rows = []
for N in (3, 4, 5):
    scheme = Schedule().scheme(N)
    at = a_tilde(1.0, scheme, model).total
    mc = empirical_sup_rms(scheme, model, 1.0, cfg)
    exact_sup = np.sqrt(exact_mse_grid(mc.eval_times, scheme, model).max())
    rows.append((N, at, mc.estimate, mc.stderr, exact_sup))

print(" N   bound    MC sup (se)        exact sup   gap")
for N, at, est, se, ex in rows:
    print(f"{N:2d}  {at:7.4f}  {est:7.4f} ({se:.4f})  {ex:9.4f}  {at - est:6.4f}")

# %% [markdown]
# The gap stays positive and narrows as N grows: the bound decays, and the
# true error decays faster.

# %%
scheme = Schedule().scheme(4)
ts = np.linspace(0.0, 1.0, 201)
pointwise = np.array([a_n_auto(t, scheme, model).total for t in ts])
exact = np.sqrt(exact_mse_grid(ts, scheme, model))
print("largest exact-to-bound ratio at N=4:", (exact / pointwise).max())

# %%
if plt is not None:
    fig, (a1, a2) = plt.subplots(1, 2, figsize=(11, 4))
    Ns = [r[0] for r in rows]
    a1.plot(Ns, [r[1] - r[2] for r in rows], "o-")
    a1.set_xlabel("N")
    a1.set_ylabel("bound - MC sup RMS")
    a2.semilogy(ts, pointwise, label="pointwise bound")
    a2.semilogy(ts, np.maximum(exact, 1e-12), label="exact RMS error")
    a2.set_xlabel("t")
    a2.legend()
    save(fig, "bound_vs_monte_carlo.png")
