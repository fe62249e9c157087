"""Truncated sinc-series reconstruction and its exact mean-square error.

The reconstruction from samples ``X(k*pi/omega)``, ``|k| <= n``, is

    X_n(t) = sum_k sinc_k(t) * X(k*pi/omega),
    sinc_k(t) = sin(omega*t - k*pi) / (omega*t - k*pi).

For a centered stationary signal with covariance ``B`` the mean-square error
is the quadratic form

    E|X(t) - X_n(t)|^2 = B(0) - 2 s.b + s' G s

with ``s_k = sinc_k(t)``, ``b_k = B(t - t_k)`` and the Gram matrix
``G_kj = B(t_k - t_j)``. It serves as ground truth for the error bounds.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from .bounds import SamplingScheme
from .exceptions import DomainError, NumericalError
from .spectral import SpectralModel

__all__ = [
    "SampleSet",
    "sinc_kernel",
    "kernel_matrix",
    "reconstruct",
    "reconstruct_grid",
    "exact_mse",
    "exact_mse_grid",
    "gram_matrix",
]

_TAYLOR_THRESHOLD = 1e-8
_SNAP_ULPS = 8.0
_MSE_ROUNDOFF = 1e-10


def _fractional_index(omega, t):
    """``omega*t/pi``, snapped to the nearest integer when within a few ulps.

    Sample times ``k*pi/omega`` computed in floating point then give an
    exactly integer index, which makes the kernel exactly 1 or 0 there.
    """
    r = np.asarray(omega * np.asarray(t, dtype=float) / math.pi)
    j = np.rint(r)
    close = np.abs(r - j) <= _SNAP_ULPS * np.spacing(np.maximum(np.abs(r), 1.0))
    return np.where(close, j, r)


def _sinc_pi(x):
    """``sin(pi*x)/(pi*x)`` with exact range reduction of the argument."""
    x = np.asarray(x, dtype=float)
    m = np.rint(x)
    f = x - m  # exact for |f| <= 1/2
    sign = np.where(np.fmod(m, 2.0) == 0.0, 1.0, -1.0)
    u = math.pi * x
    small = np.abs(u) < _TAYLOR_THRESHOLD
    safe_u = np.where(small, 1.0, u)
    out = np.where(small, 1.0 - u * u / 6.0, sign * np.sin(math.pi * f) / safe_u)
    return out


def sinc_kernel(omega: float, t, k):
    """Kernel ``sin(omega*(t - k*pi/omega)) / (omega*(t - k*pi/omega))``.

    Broadcasts over ``t`` and ``k``. The removable singularity at the sample
    point uses ``1 - u**2/6`` for ``|u| < 1e-8``.
    """
    if not omega > 0:
        raise DomainError("omega must be positive")
    out = _sinc_pi(_fractional_index(omega, t) - np.asarray(k, dtype=float))
    return float(out) if out.ndim == 0 else out


def kernel_matrix(omega: float, n: int, times) -> np.ndarray:
    """Matrix ``K[i, k+n] = sinc_kernel(omega, times[i], k)`` for ``|k| <= n``."""
    r = _fractional_index(omega, np.atleast_1d(np.asarray(times, dtype=float)))
    ks = np.arange(-n, n + 1, dtype=float)
    return _sinc_pi(r[:, None] - ks[None, :])


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Samples ``values[k+n] = X(k*pi/omega)`` for ``k = -n..n``."""

    omega: float
    n: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (2 * self.n + 1,):
            raise DomainError(f"expected {2 * self.n + 1} sample values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise DomainError("sample values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def times(self) -> np.ndarray:
        return np.arange(-self.n, self.n + 1) * (math.pi / self.omega)

    @classmethod
    def from_function(cls, func, omega: float, n: int) -> "SampleSet":
        t = np.arange(-n, n + 1) * (math.pi / omega)
        return cls(omega, n, np.asarray(func(t), dtype=float))


def reconstruct(samples: SampleSet, t: float) -> float:
    """Evaluate the truncated series at one time, with compensated summation."""
    s = kernel_matrix(samples.omega, samples.n, [t])[0]
    return math.fsum(s * samples.values)


def reconstruct_grid(samples: SampleSet, grid) -> np.ndarray:
    """Evaluate the truncated series at each point of ``grid``."""
    K = kernel_matrix(samples.omega, samples.n, grid)
    prod = K * samples.values[None, :]
    return np.array([math.fsum(row) for row in prod])


class _GramCache:
    """Gram matrices keyed by ``(omega, n, model)``; models hash by value or identity."""

    def __init__(self, maxsize=8):
        self._lock = threading.Lock()
        self._data: dict = {}
        self._maxsize = maxsize

    def get(self, omega, n, model):
        key = (float(omega), int(n), model)
        with self._lock:
            G = self._data.get(key)
            if G is None:
                tk = np.arange(-n, n + 1) * (math.pi / omega)
                G = np.asarray(model.covariance(tk[:, None] - tk[None, :]), dtype=float)
                G.setflags(write=False)
                if len(self._data) >= self._maxsize:
                    self._data.pop(next(iter(self._data)))
                self._data[key] = G
            return G

    def clear(self):
        with self._lock:
            self._data.clear()


_GRAM = _GramCache()


def gram_matrix(scheme: SamplingScheme, model: SpectralModel) -> np.ndarray:
    """Cached covariance matrix of the samples (read-only)."""
    return _GRAM.get(scheme.omega, scheme.n, model)


def _clamp(value, t):
    if value < 0:
        if value < -_MSE_ROUNDOFF:
            raise NumericalError(f"exact mean-square error is negative ({value:.3e}) at t={t}")
        return 0.0
    return value


def exact_mse(t: float, scheme: SamplingScheme, model: SpectralModel) -> float:
    """Exact ``E|X(t) - X_n(t)|**2`` from the covariance.

    Round-off down to ``-1e-10`` is clamped to zero.

    Raises:
        NumericalError: for a value below ``-1e-10``.
    """
    G = gram_matrix(scheme, model)
    s = kernel_matrix(scheme.omega, scheme.n, [t])[0]
    b = np.asarray(model.covariance(t - scheme.sample_times()), dtype=float)
    quad = math.fsum(s * (G @ s))
    cross = math.fsum(s * b)
    value = math.fsum([model.variance(), -2.0 * cross, quad])
    return _clamp(value, t)


def exact_mse_grid(ts, scheme: SamplingScheme, model: SpectralModel) -> np.ndarray:
    """:func:`exact_mse` at every point of ``ts``."""
    return np.array([exact_mse(float(t), scheme, model) for t in np.atleast_1d(ts)])
