"""Spectral and covariance models of centered stationary signals.

Each model exposes the covariance ``B(tau)``, the variance ``B(0)`` and the
spectral tail mass ``Q(L) = int_{|lambda| > L} dF(lambda)``, which is all
the error bounds need.

The Matérn model with smoothness 1/2 has covariance
``sqrt(2*pi*tau/alpha) * K_{1/2}(alpha*tau)``. Since
``K_{1/2}(z) = sqrt(pi/(2z)) * exp(-z)``, this reduces to
``(pi/alpha) * exp(-alpha*|tau|)``, the form used here.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import integrate

from .exceptions import DomainError, NumericalError

__all__ = [
    "SpectralModel",
    "MaternHalfModel",
    "NormalizedTailModel",
    "TabulatedDensityModel",
    "covariance",
    "variance",
    "tail_mass",
]


class SpectralModel:
    """Base class for models; subclasses override the three accessors."""

    def covariance(self, tau):
        raise NotImplementedError(f"{type(self).__name__} has no covariance function")

    def variance(self) -> float:
        return float(self.covariance(0.0))

    def tail_mass(self, Lambda: float) -> float:
        raise NotImplementedError

    @property
    def has_covariance(self) -> bool:
        return True


def _check_lambda(Lambda):
    if not Lambda >= 0:
        raise DomainError(f"Lambda must be >= 0, got {Lambda!r}")


@dataclass(frozen=True)
class MaternHalfModel(SpectralModel):
    """Exponential covariance with spectral density ``1/(alpha_scale**2 + lambda**2)``.

    Args:
        alpha_scale: range parameter (1/time units).
    """

    alpha_scale: float = 1.0

    def __post_init__(self):
        if not self.alpha_scale > 0:
            raise DomainError("alpha_scale must be positive")

    def density(self, lam):
        return 1.0 / (self.alpha_scale ** 2 + np.asarray(lam, dtype=float) ** 2)

    def covariance(self, tau):
        a = self.alpha_scale
        out = (math.pi / a) * np.exp(-a * np.abs(np.asarray(tau, dtype=float)))
        return float(out) if out.ndim == 0 else out

    def variance(self) -> float:
        return math.pi / self.alpha_scale

    def tail_mass(self, Lambda: float) -> float:
        _check_lambda(Lambda)
        a = self.alpha_scale
        if Lambda == 0:
            return math.pi / a
        # pi/2 - arctan(L/a) == arctan(a/L), without cancellation for large L
        return (2.0 / a) * math.atan(a / Lambda)


@dataclass(frozen=True)
class NormalizedTailModel(SpectralModel):
    """Unit-variance signal known only through the tail bound ``Q(L) <= 1/L``.

    Useful for planning when the spectrum is not known exactly. There is no
    covariance function beyond ``B(0) = 1``.
    """

    @property
    def has_covariance(self) -> bool:
        return False

    def covariance(self, tau):
        if np.all(np.asarray(tau) == 0):
            return 1.0
        raise NotImplementedError("NormalizedTailModel only defines B(0)")

    def variance(self) -> float:
        return 1.0

    def tail_mass(self, Lambda: float) -> float:
        _check_lambda(Lambda)
        if Lambda <= 1.0:
            return 1.0
        return 1.0 / Lambda


@dataclass(frozen=True, eq=False)
class TabulatedDensityModel(SpectralModel):
    """Even spectral density given on a grid of nonnegative frequencies.

    The density is linearly interpolated between grid points and held at
    its first value on ``[0, lam[0]]``. Beyond the last grid point it decays
    as ``density[-1] * (lam/lam[-1])**(-tail_exponent)``. When no exponent is
    given the last density value must be zero, i.e. the spectrum is declared
    compactly supported; otherwise the mass beyond the grid is unknown and
    every query raises.

    Instances hash by identity (the arrays are not hashable).
    """

    lam: np.ndarray
    density: np.ndarray
    tail_exponent: float | None = None

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=float)
        dens = np.asarray(self.density, dtype=float)
        if lam.ndim != 1 or lam.shape != dens.shape or lam.size < 2:
            raise DomainError("lam and density must be 1-D arrays of equal length >= 2")
        if lam[0] < 0 or np.any(np.diff(lam) <= 0):
            raise DomainError("lam must be nonnegative and strictly increasing")
        if np.any(dens < 0) or not np.all(np.isfinite(dens)):
            raise DomainError("density must be finite and nonnegative")
        if self.tail_exponent is not None and not self.tail_exponent > 1:
            raise DomainError("tail_exponent must exceed 1 for finite spectral mass")
        lam.setflags(write=False)
        dens.setflags(write=False)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "density", dens)

    @classmethod
    def from_files(cls, csv_path, meta_path=None) -> "TabulatedDensityModel":
        """Load a ``lambda,density`` CSV and optional ``{"tail_exponent": e}`` JSON."""
        with open(csv_path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["lambda", "density"]:
                raise DomainError("density CSV header must be 'lambda,density'")
            rows = [(float(r["lambda"]), float(r["density"])) for r in reader]
        lam, dens = map(np.array, zip(*rows)) if rows else (np.array([]), np.array([]))
        exponent = None
        if meta_path is not None:
            meta = json.loads(Path(meta_path).read_text())
            exponent = meta.get("tail_exponent")
            exponent = None if exponent is None else float(exponent)
        return cls(lam, dens, exponent)

    def _require_tail(self):
        if self.tail_exponent is None and self.density[-1] > 0:
            raise DomainError(
                "density is nonzero at the last grid point and no tail_exponent "
                "was given; spectral mass beyond the grid is unknown")

    def spectral_density(self, lam):
        x = np.abs(np.asarray(lam, dtype=float))
        out = np.interp(x, self.lam, self.density, left=self.density[0], right=0.0)
        if self.tail_exponent is not None:
            beyond = x > self.lam[-1]
            out = np.where(beyond, self.density[-1] * (np.maximum(x, self.lam[-1]) / self.lam[-1])
                           ** (-self.tail_exponent), out)
        return float(out) if out.ndim == 0 else out

    def _beyond_grid_mass(self, start: float) -> float:
        """One-sided mass on ``[start, inf)`` for ``start >= lam[-1]``."""
        if self.tail_exponent is None:
            return 0.0
        e, lmax, d = self.tail_exponent, self.lam[-1], self.density[-1]
        return d * lmax / (e - 1.0) * (start / lmax) ** (1.0 - e)

    def tail_mass(self, Lambda: float) -> float:
        _check_lambda(Lambda)
        self._require_tail()
        lam, dens = self.lam, self.density
        if Lambda >= lam[-1]:
            return 2.0 * self._beyond_grid_mass(Lambda)
        pieces = []
        if Lambda < lam[0]:
            pieces.append(dens[0] * (lam[0] - Lambda))
            x, y = lam, dens
        else:
            i = int(np.searchsorted(lam, Lambda, side="right"))
            d_at = float(np.interp(Lambda, lam, dens))
            x = np.concatenate(([Lambda], lam[i:]))
            y = np.concatenate(([d_at], dens[i:]))
        pieces.extend(0.5 * (y[1:] + y[:-1]) * np.diff(x))
        pieces.append(self._beyond_grid_mass(lam[-1]))
        return 2.0 * math.fsum(pieces)

    def covariance(self, tau):
        tau_arr = np.asarray(tau, dtype=float)
        if tau_arr.ndim:
            return np.array([self._covariance_scalar(float(t)) for t in tau_arr.ravel()]).reshape(tau_arr.shape)
        return self._covariance_scalar(float(tau_arr))

    def variance(self) -> float:
        return self.tail_mass(0.0)

    def _covariance_scalar(self, tau: float) -> float:
        self._require_tail()
        tau = abs(tau)
        if tau == 0.0:
            return self.tail_mass(0.0)
        lam, dens = self.lam, self.density
        a, b = lam[:-1], lam[1:]
        fa, fb = dens[:-1], dens[1:]
        h = b - a
        slope = (fb - fa) / h
        # exact integral of a linear segment times cos(tau*lambda); the
        # cosine difference is written as a product to avoid cancellation
        seg = ((fb * np.sin(tau * b) - fa * np.sin(tau * a)) / tau
               + slope * (-2.0 * np.sin(0.5 * tau * (a + b)) * np.sin(0.5 * tau * h)) / tau ** 2)
        pieces = list(seg)
        pieces.append(dens[0] * math.sin(tau * lam[0]) / tau)
        if self.tail_exponent is not None and dens[-1] > 0:
            e, lmax, d = self.tail_exponent, lam[-1], dens[-1]
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                val, err, info = integrate.quad(
                    lambda x: d * (x / lmax) ** (-e), lmax, np.inf,
                    weight="cos", wvar=tau, full_output=True, limlst=200,
                    epsabs=1e-14 * max(1.0, d * lmax))[:3]
            ier = info.get("ierlst") if isinstance(info, dict) else None
            scale = max(abs(val), 1e-300)
            if not np.isfinite(val) or err > max(1e-8 * scale, 1e-10):
                raise NumericalError(
                    f"tail cosine transform did not converge at tau={tau}: "
                    f"estimate {val}, residual {err}, ierlst={ier}")
            pieces.append(val)
        return 2.0 * math.fsum(pieces)


def covariance(model: SpectralModel, tau):
    """Covariance ``B(tau) = E X(t+tau) X(t)``."""
    return model.covariance(tau)


def variance(model: SpectralModel) -> float:
    """Variance ``B(0)``."""
    return model.variance()


def tail_mass(model: SpectralModel, Lambda: float) -> float:
    """Spectral mass outside ``[-Lambda, Lambda]``."""
    return model.tail_mass(Lambda)
