"""Closed-form aliasing-truncation error bounds.

For a stationary signal sampled at ``t_k = k*pi/omega``, ``|k| <= n``, the
root-mean-square error of the truncated sinc series at time ``t`` is bounded
by

    A_n(t) = sqrt(C_n(t)) / n + D_n(t) * sqrt(Q(Lambda))

where ``Q`` is the spectral mass outside ``[-Lambda, Lambda]``, ``C_n``
depends on a free parameter ``z`` in ``(0, 1)`` subject to
``n >= omega*t / (pi*sqrt(z))``, and ``D_n`` does not depend on ``z``.
This module also provides the uniform bound over ``[0, T]``, the ``L_p``
integral ``S_{n,p}`` of the bound, and the tail probability estimate for the
``L_p`` error of phi-sub-Gaussian signals together with its validity
threshold.
"""

from __future__ import annotations

import functools
import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate, optimize

from .exceptions import DomainError, NumericalError, ValidityError
from .orlicz import OrliczFunction, PowerOrlicz
from .spectral import SpectralModel

__all__ = [
    "SamplingScheme",
    "BoundBreakdown",
    "Integral",
    "Z_FLOOR",
    "Z_CEILING_MARGIN",
    "si_pi",
    "c_n",
    "d_n",
    "a_n",
    "a_n_auto",
    "a_tilde",
    "s_np",
    "s_np_upper",
    "lp_condition_rhs",
    "validity_threshold",
    "tail_probability",
]

Z_FLOOR = 1e-12
Z_CEILING_MARGIN = 1e-9
# relative slack for the sample-size inequality; a_n_auto meets it with equality
_PRECOND_RTOL = 1e-12


@dataclass(frozen=True)
class SamplingScheme:
    """Sampling parameters of a truncated sinc series.

    Args:
        omega: sampling parameter (rad/time); the sample spacing is pi/omega.
        n: truncation index; samples ``k = -n..n`` are used.
        lambda_band: band edge used in the bound, ``0 < lambda_band < omega``.
    """

    omega: float
    n: int
    lambda_band: float

    def __post_init__(self):
        if not self.omega > 0:
            raise DomainError(f"omega must be positive, got {self.omega!r}")
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if not (0 < self.lambda_band < self.omega):
            raise DomainError(
                f"lambda_band must lie in (0, omega); got {self.lambda_band!r} with omega={self.omega!r}")

    @property
    def spacing(self) -> float:
        return math.pi / self.omega

    def sample_times(self) -> np.ndarray:
        return np.arange(-self.n, self.n + 1) * (math.pi / self.omega)


@dataclass(frozen=True)
class BoundBreakdown:
    """Terms of one bound evaluation.

    ``total = sqrt(c_value)/n + d_value*sqrt(tail)``.
    """

    z_used: float
    c_value: float
    d_value: float
    tail: float
    total: float
    valid: bool = True

    def to_dict(self) -> dict:
        return asdict(self)


class Integral(NamedTuple):
    value: float
    error: float


def _si(x: float, nodes: int) -> float:
    # sin(u)/u is entire, so Gauss-Legendre converges geometrically
    u, w = np.polynomial.legendre.leggauss(nodes)
    v = 0.5 * x * (u + 1.0)
    return 0.5 * x * math.fsum(w * np.sin(v) / v)


@functools.lru_cache(maxsize=None)
def si_pi() -> float:
    """Sine integral ``Si(pi) = int_0^pi sin(x)/x dx`` (about 1.8519)."""
    return _si(math.pi, 40)


def _check_t(t):
    if not t >= 0:
        raise DomainError(f"t must be >= 0, got {t!r}")


def _check_z(z):
    if not (0.0 < z < 1.0):
        raise ValidityError(f"z must lie in (0, 1), got {z!r}")


def _require_sample_size(t, scheme, z):
    need = scheme.omega * t / (math.pi * math.sqrt(z))
    if scheme.n * (1.0 + _PRECOND_RTOL) < need:
        raise ValidityError(
            f"n >= omega*t/(pi*sqrt(z)) violated: n={scheme.n}, "
            f"omega*t/(pi*sqrt(z))={need:.17g} (t={t!r}, z={z!r})")


def _c_formula(t, omega, n, lam, b0, z):
    first = 4.0 * omega * t / (math.pi ** 2 * (1.0 - z))
    second = 4.0 * (z + 1.0 + 1.0 / n) / (math.pi * (1.0 - z) ** 2 * (1.0 - lam / omega))
    return b0 * (first + second) ** 2


def _d_formula(t, omega, n, sin_factor):
    r = omega * t / math.pi
    return 2.0 + (2.0 * sin_factor / math.pi) * (1.0 + si_pi() + (r + 0.5) / (n - r))


def c_n(t: float, scheme: SamplingScheme, model: SpectralModel, z: float) -> float:
    """The ``C_n(t, Lambda)`` constant for a given free parameter ``z``.

    Raises:
        ValidityError: if ``z`` is outside ``(0, 1)`` or
            ``n >= omega*t/(pi*sqrt(z))`` fails.
    """
    _check_t(t)
    _check_z(z)
    _require_sample_size(t, scheme, z)
    return _c_formula(t, scheme.omega, scheme.n, scheme.lambda_band, model.variance(), z)


def d_n(t: float, scheme: SamplingScheme) -> float:
    """The ``D_n(t)`` factor multiplying the square root of the tail mass."""
    _check_t(t)
    r = scheme.omega * t / math.pi
    if not scheme.n > r:
        raise ValidityError(f"n > omega*t/pi violated: n={scheme.n}, omega*t/pi={r:.17g}")
    return _d_formula(t, scheme.omega, scheme.n, abs(math.sin(scheme.omega * t)))


def _breakdown(c, d, tail, n, z):
    return BoundBreakdown(z_used=z, c_value=c, d_value=d, tail=tail,
                          total=math.sqrt(c) / n + d * math.sqrt(tail))


def a_n(t: float, scheme: SamplingScheme, model: SpectralModel, z: float) -> BoundBreakdown:
    """Pointwise RMS error bound with an explicit free parameter ``z``."""
    try:
        c = c_n(t, scheme, model, z)
        d = d_n(t, scheme)
    except ValidityError as exc:
        raise ValidityError(f"{exc} [t={t!r}, n={scheme.n}, z={z!r}]") from None
    return _breakdown(c, d, model.tail_mass(scheme.lambda_band), scheme.n, z)


def minimal_z(t: float, scheme: SamplingScheme) -> float:
    """Smallest admissible ``z``, clamped to ``[Z_FLOOR, 1 - Z_CEILING_MARGIN]``."""
    _check_t(t)
    r = scheme.omega * t / math.pi
    if not scheme.n > r:
        raise ValidityError(
            f"no admissible z in (0, 1): n > omega*t/pi violated "
            f"(n={scheme.n}, omega*t/pi={r:.17g})")
    z = (r / scheme.n) ** 2
    if z > 1.0 - Z_CEILING_MARGIN:
        raise ValidityError(
            f"no admissible z below 1 - {Z_CEILING_MARGIN:g}: (omega*t/(pi*n))^2 = {z:.17g}")
    return max(z, Z_FLOOR)


def a_n_auto(t: float, scheme: SamplingScheme, model: SpectralModel) -> BoundBreakdown:
    """Pointwise bound at the minimizing choice ``z = (omega*t/(pi*n))**2``.

    Both z-dependent factors of ``C_n`` increase with ``z`` and ``D_n`` does
    not depend on it, so the smallest admissible ``z`` gives the tightest
    bound. At ``t = 0`` the floor ``Z_FLOOR`` keeps the bound finite (the
    actual error there is zero since ``t = 0`` is a sample point).
    """
    return a_n(t, scheme, model, minimal_z(t, scheme))


def z_star(T: float, scheme: SamplingScheme) -> float:
    return (scheme.omega * T / (math.pi * scheme.n)) ** 2


def a_tilde(T: float, scheme: SamplingScheme, model: SpectralModel) -> BoundBreakdown:
    """Uniform RMS error bound over ``[0, T]``.

    Uses ``z* = omega**2 T**2 / (pi**2 n**2)`` and replaces ``|sin(omega*t)|``
    by one.

    Raises:
        ValidityError: if ``z*`` is not in ``(0, 1)``; the message reports the
            smallest ``n`` for which it is.
    """
    if not T > 0:
        raise DomainError(f"T must be positive, got {T!r}")
    zs = z_star(T, scheme)
    if not zs < 1.0:
        n_min = math.floor(scheme.omega * T / math.pi) + 1
        raise ValidityError(
            f"z* = ω²T²/(π²n²) ∈ (0,1) violated: z* = {zs:.17g} for n={scheme.n}; "
            f"the smallest admissible n is {n_min}")
    c = _c_formula(T, scheme.omega, scheme.n, scheme.lambda_band, model.variance(), zs)
    d = _d_formula(T, scheme.omega, scheme.n, 1.0)
    return _breakdown(c, d, model.tail_mass(scheme.lambda_band), scheme.n, zs)


def _kinks(T, scheme):
    # |sin(omega t)| is not differentiable at multiples of pi/omega
    step = math.pi / scheme.omega
    m = int(math.floor(T / step))
    pts = [k * step for k in range(1, m + 1) if k * step < T]
    return [0.0] + pts + [T]


def s_np(scheme: SamplingScheme, model: SpectralModel, T: float, p: float,
         c_x: float = 1.0, epsrel: float = 1e-8) -> Integral:
    """``C_X**p * int_0^T a_n_auto(t)**p dt`` with its quadrature error.

    The integral is split at the kinks of ``|sin(omega*t)|`` and each piece
    is integrated adaptively.
    """
    if not p >= 1:
        raise DomainError(f"p must be >= 1, got {p!r}")
    if not c_x > 0:
        raise DomainError(f"c_x must be positive, got {c_x!r}")
    if not T > 0:
        raise DomainError(f"T must be positive, got {T!r}")
    minimal_z(T, scheme)  # validity at the far end implies validity on [0, T]

    def integrand(t):
        return a_n_auto(t, scheme, model).total ** p

    edges = _kinks(T, scheme)
    values, errors = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err, info = integrate.quad(integrand, lo, hi, epsabs=0.0, epsrel=epsrel,
                                        limit=200, full_output=True)[:3]
        if err > max(10 * epsrel * abs(val), 1e-300):
            raise NumericalError(
                f"S_np quadrature failed on [{lo}, {hi}]: value {val}, error estimate {err}")
        values.append(val)
        errors.append(err)
    scale = c_x ** p
    return Integral(scale * math.fsum(values), scale * math.fsum(errors))


def s_np_upper(scheme: SamplingScheme, model: SpectralModel, T: float, p: float,
               c_x: float = 1.0) -> float:
    """Conservative bound ``C_X**p * T * a_tilde(T)**p`` on :func:`s_np`."""
    if not p >= 1:
        raise DomainError(f"p must be >= 1, got {p!r}")
    if not c_x > 0:
        raise DomainError(f"c_x must be positive, got {c_x!r}")
    return c_x ** p * T * a_tilde(T, scheme, model).total ** p


def lp_condition_rhs(epsilon: float, S: float, p: float, family: OrliczFunction) -> float:
    """Right side of the validity condition ``eps > S * f(p*(S/eps)**(1/p))**p``."""
    return S * float(family.density(p * (S / epsilon) ** (1.0 / p))) ** p


def validity_threshold(S: float, p: float, family: OrliczFunction,
                       max_iter: int = 400) -> float:
    """Infimum of the accuracies ``eps`` for which the tail estimate applies.

    For the power family this is ``S * p**((alpha-1)*p/alpha)``. For other
    N-functions the condition ``eps > S*f(p*(S/eps)**(1/p))**p`` is solved by
    bracketing and bisection (its right side decreases in ``eps``).
    """
    if not S > 0:
        raise DomainError(f"S must be positive, got {S!r}")
    if not p >= 1:
        raise DomainError(f"p must be >= 1, got {p!r}")
    if isinstance(family, PowerOrlicz):
        a = family.alpha
        return S * p ** ((a - 1.0) * p / a)

    def gap(eps):
        return eps - lp_condition_rhs(eps, S, p, family)

    lo, hi = S, S
    for _ in range(200):
        if gap(hi) > 0:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise NumericalError(f"could not bracket the validity threshold above eps={hi}")
    for _ in range(200):
        if gap(lo) <= 0:
            break
        hi, lo = lo, 0.5 * lo
    else:
        raise NumericalError(f"could not bracket the validity threshold below eps={lo}")
    try:
        return optimize.bisect(gap, lo, hi, xtol=1e-15, rtol=1e-14, maxiter=max_iter)
    except (RuntimeError, ValueError) as exc:
        raise NumericalError(f"bisection failed on bracket [{lo}, {hi}]: {exc}") from None


def tail_probability(epsilon: float, S: float, p: float, family: OrliczFunction) -> float:
    """Bound ``2*exp(-phi*((eps/S)**(1/p)))`` on ``P(int_0^T |X - X_n|**p dt > eps)``.

    The raw value is returned and may exceed one; callers reporting a
    probability should clamp it.

    Raises:
        ValidityError: if ``epsilon`` does not exceed :func:`validity_threshold`.
    """
    thr = validity_threshold(S, p, family)
    if not epsilon > thr:
        raise ValidityError(
            f"eps > S*(f(p*(S/eps)^(1/p)))^p violated: eps={epsilon!r}, threshold={thr:.17g}")
    return 2.0 * math.exp(-float(family.conjugate((epsilon / S) ** (1.0 / p))))
