"""Orlicz N-functions and their Young-Fenchel conjugates.

Only the power family ``phi(x) = |x|**alpha / alpha`` with ``1 < alpha <= 2``
is shipped. ``alpha = 2`` is the Gaussian (sub-Gaussian) case, where
``phi`` is self-conjugate.

Other N-functions can be plugged in by subclassing :class:`OrliczFunction`
and providing ``phi`` and ``density``; the conjugate then falls back to
:func:`legendre_sup`, a numerical maximization of ``x*y - phi(y)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy import optimize

from .exceptions import DomainError

__all__ = [
    "OrliczFunction",
    "PowerOrlicz",
    "GAUSSIAN",
    "ConjugateResult",
    "phi",
    "phi_density",
    "phi_conjugate",
    "conjugate_numeric",
    "legendre_sup",
]



class ConjugateResult(NamedTuple):
    """Outcome of a numerical conjugate evaluation."""

    value: float
    argmax: float
    at_boundary: bool


class OrliczFunction:
    """Interface for an Orlicz N-function.

    Subclasses implement :meth:`phi` and :meth:`density`. :meth:`conjugate`
    defaults to a numerical Legendre transform over ``[-radius, radius]``.
    """

    conjugate_radius: float = 100.0

    @property
    def is_gaussian(self) -> bool:
        return False

    def phi(self, x):
        raise NotImplementedError

    def density(self, x):
        """Right derivative ``f`` with ``phi(u) = int_0^|u| f(v) dv``."""
        raise NotImplementedError

    def conjugate(self, x):
        return legendre_sup(self.phi, float(x), self.conjugate_radius).value


@dataclass(frozen=True)
class PowerOrlicz(OrliczFunction):
    """The N-function ``|x|**alpha / alpha``.

    Args:
        alpha: exponent in ``(1, 2]``. The conjugate exponent ``gamma``
            satisfies ``1/alpha + 1/gamma = 1``.
    """

    alpha: float = 2.0

    def __post_init__(self):
        if not (1.0 < self.alpha <= 2.0):
            raise DomainError(f"alpha must lie in (1, 2], got {self.alpha!r}")

    @property
    def gamma(self) -> float:
        return self.alpha / (self.alpha - 1.0)

    @property
    def is_gaussian(self) -> bool:
        return self.alpha == 2.0

    def phi(self, x):
        return np.abs(x) ** self.alpha / self.alpha

    def density(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise DomainError("density is defined for x >= 0 only")
        out = x ** (self.alpha - 1.0)
        return float(out) if out.ndim == 0 else out

    def conjugate(self, x):
        g = self.gamma
        return np.abs(x) ** g / g


GAUSSIAN = PowerOrlicz(2.0)


def _scalar(v):
    v = np.asarray(v)
    return float(v) if v.ndim == 0 else v


def phi(family: OrliczFunction, x):
    """Evaluate ``phi(x)``; works elementwise on arrays."""
    return _scalar(family.phi(x))


def phi_density(family: OrliczFunction, x):
    """Evaluate the density ``f(x)`` for ``x >= 0``.

    Raises:
        DomainError: if any ``x`` is negative.
    """
    return _scalar(family.density(x))


def phi_conjugate(family: OrliczFunction, x):
    """Evaluate the Young-Fenchel conjugate ``phi*(x)``."""
    return _scalar(family.conjugate(x))


def legendre_sup(func: Callable[[float], float], x: float, radius: float,
                 rtol: float = 1e-10) -> ConjugateResult:
    """Maximize ``x*y - func(y)`` over ``y`` in ``[-radius, radius]``.

    ``func`` must be convex so the objective is concave and the bounded
    Brent search converges to the global maximizer; ``rtol * max(1, radius)``
    is its absolute tolerance on ``y``.

    ``at_boundary`` is set when the maximizer sits on the edge of the search
    interval, meaning the supremum may lie outside it.
    """
    if radius <= 0:
        raise DomainError("search radius must be positive")

    def obj(y):
        return x * y - float(func(y))

    r = float(radius)
    tol = rtol * max(1.0, r)
    res = optimize.minimize_scalar(lambda y: -obj(y), bounds=(-r, r), method="bounded",
                                   options={"xatol": tol, "maxiter": 2000})
    candidates = [(obj(res.x), float(res.x)), (obj(-r), -r), (obj(r), r)]
    val, arg = max(candidates)
    at_boundary = abs(abs(arg) - r) <= 2.0 * tol + 1e-12 * r
    return ConjugateResult(val, arg, at_boundary)


def conjugate_numeric(family: OrliczFunction, x: float,
                      search_radius: float = 100.0) -> ConjugateResult:
    """Numerical conjugate ``sup_y (x*y - phi(y))`` over a bounded interval.

    Used to validate closed-form conjugates and as the fallback for
    user-supplied N-functions.
    """
    return legendre_sup(family.phi, x, search_radius)
