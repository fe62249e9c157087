# %% [markdown]
# # Reconstructing an exponential-covariance signal from its samples
#
# The signal has spectral density 1/(1 + l^2), so it is not bandlimited.
# We sample it at spacing pi/omega, rebuild it with the truncated sinc
# series and look at how the error shrinks along the dyadic schedule.

# %%
import numpy as np

from _plotting import plt, save
from wksbounds import McConfig, MaternHalfModel, Schedule, a_tilde, exact_mse
from wksbounds.simulate import error_paths

model = MaternHalfModel(1.0)
ev = np.linspace(0.0, 1.0, 401)

# %% [markdown]
# One realization per stage, all driven by the same master seed.

# %%
paths = {}
for N in (3, 4, 5):
    scheme = Schedule().scheme(N)
    err, x, x_n = error_paths(scheme, model, ev, McConfig(1, master_seed=2), keep_paths=True)
    paths[N] = (x[0], x_n[0])
    print(f"N={N}: omega={scheme.omega:g}, n={scheme.n}, max |X - X_n| = {np.abs(err).max():.4f}")

# %% [markdown]
# The exact mean-square error vanishes at the sample points and peaks
# between them.

# %%
scheme = Schedule().scheme(4)
fine = np.linspace(0.0, 3 * scheme.spacing, 13)
for t in fine:
    print(f"t={t:.4f}  E|X - X_n|^2 = {exact_mse(t, scheme, model):.3e}")
print("uniform RMS bound on [0, 1]:", a_tilde(1.0, scheme, model).total)

# %%
if plt is not None:
    fig, axes = plt.subplots(3, 1, figsize=(8, 7), sharex=True)
    for ax, (N, (x, x_n)) in zip(axes, paths.items()):
        ax.plot(ev, x, lw=1, label="X(t)")
        ax.plot(ev, x_n, lw=1, ls="--", label="X_n(t)")
        ax.set_ylabel(f"N={N}")
    axes[0].legend()
    axes[-1].set_xlabel("t")
    save(fig, "reconstruction_paths.png")
