"""Choosing the sampling stage for a prescribed accuracy and reliability.

The signal is sampled on a dyadic schedule: at stage ``N`` the sampling
parameter is ``omega = 2**N``, the band edge is ``Lambda = 0.75*omega`` and
``n = N**2 * 2**N`` samples are taken on each side of the origin. The planner
returns the smallest stage for which the uniform bound satisfies

    a_tilde(T) <= (eps/T)**(1/p) / sqrt(max(p, 2*ln(2/delta)))

and re-checks the resulting ``L_p`` guarantee: for Gaussian signals
``S < eps / max(p**(p/2), (2 ln(2/delta))**(p/2))``; for other power-family
N-functions both the validity condition and ``2*exp(-phi*((eps/S)**(1/p)))
<= delta``.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Iterable, Optional

from . import bounds
from .bounds import SamplingScheme
from .exceptions import DomainError, PlanningInfeasible, ValidityError
from .orlicz import GAUSSIAN, OrliczFunction, PowerOrlicz
from .spectral import NormalizedTailModel, SpectralModel

__all__ = [
    "Schedule",
    "PlanRequest",
    "PlanResult",
    "SweepCell",
    "required_rhs",
    "plan",
    "plan_sweep",
    "sweep_to_csv",
    "SWEEP_COLUMNS",
]

SWEEP_COLUMNS = ("epsilon", "delta", "p", "N", "omega", "n", "lambda", "a_tilde", "rhs", "feasible")


def _default_n(N: int) -> int:
    return N * N * 2 ** N


def _default_omega(N: int) -> float:
    return float(2 ** N)


@dataclass(frozen=True)
class Schedule:
    """Stage-indexed sampling schemes.

    ``band_ratio`` must lie in (0, 1); ``n_of`` and ``omega_of`` map a stage
    to the truncation index and sampling parameter.
    """

    band_ratio: float = 0.75
    N_max: int = 40
    n_of: Callable[[int], int] = _default_n
    omega_of: Callable[[int], float] = _default_omega

    def __post_init__(self):
        if not (0.0 < self.band_ratio < 1.0):
            raise DomainError(f"band_ratio must lie in (0, 1), got {self.band_ratio!r}")
        if self.N_max < 1:
            raise DomainError("N_max must be >= 1")

    def scheme(self, N: int) -> SamplingScheme:
        omega = self.omega_of(N)
        return SamplingScheme(omega=omega, n=self.n_of(N), lambda_band=self.band_ratio * omega)


@dataclass(frozen=True)
class PlanRequest:
    epsilon: float
    delta: float
    p: float = 2.0
    T: float = 1.0
    model: SpectralModel = field(default_factory=NormalizedTailModel)
    c_x: float = 1.0
    family: OrliczFunction = GAUSSIAN
    schedule: Schedule = field(default_factory=Schedule)
    use_quadrature: bool = False

    def __post_init__(self):
        if not self.epsilon > 0:
            raise DomainError("epsilon must be positive")
        if not (0.0 < self.delta < 1.0):
            raise DomainError("delta must lie in (0, 1)")
        if not self.p >= 1:
            raise DomainError("p must be >= 1")
        if not self.T > 0:
            raise DomainError("T must be positive")
        if not self.c_x > 0:
            raise DomainError("c_x must be positive")


@dataclass
class PlanResult:
    N: int
    omega: float
    lambda_band: float
    n: int
    z_star: float
    a_tilde_value: float
    rhs_value: float
    s_upper: float
    s_used: float
    corollary2_satisfied: bool
    threshold_ok: bool
    tail_ok: bool
    route: str
    previous: Optional[dict] = None

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SweepCell:
    index: tuple
    epsilon: float
    delta: float
    p: float
    result: Optional[PlanResult] = None
    error: Optional[str] = None

    @property
    def feasible(self) -> bool:
        return self.result is not None


def required_rhs(epsilon: float, delta: float, p: float, T: float) -> float:
    """Largest uniform RMS bound that still meets the accuracy/reliability target."""
    return (epsilon / T) ** (1.0 / p) / math.sqrt(max(p, 2.0 * math.log(2.0 / delta)))


def _gaussian_cap(epsilon, delta, p):
    return epsilon / max(p ** (p / 2.0), (2.0 * math.log(2.0 / delta)) ** (p / 2.0))


def _evaluate(req: PlanRequest, N: int) -> dict:
    """All checks for one stage; the plan is feasible where ``ok`` is true."""
    scheme = req.schedule.scheme(N)
    zs = bounds.z_star(req.T, scheme)
    rhs = required_rhs(req.epsilon, req.delta, req.p, req.T)
    row = {"N": N, "omega": scheme.omega, "n": scheme.n, "lambda": scheme.lambda_band,
           "z_star": zs, "rhs": rhs, "a_tilde": None, "eq_n": False, "ok": False}
    if not zs < 1.0:
        return row
    at = bounds.a_tilde(req.T, scheme, req.model).total
    row["a_tilde"] = at
    row["eq_n"] = at <= rhs
    s_upper = bounds.s_np_upper(scheme, req.model, req.T, req.p, req.c_x)
    row["s_upper"] = s_upper
    if not row["eq_n"]:
        return row
    if req.use_quadrature:
        s_used = bounds.s_np(scheme, req.model, req.T, req.p, req.c_x).value
    else:
        s_used = s_upper
    row["s_used"] = s_used
    gaussian = req.family.is_gaussian
    row["gaussian_cap_ok"] = s_used < _gaussian_cap(req.epsilon, req.delta, req.p)
    row["threshold_ok"] = req.epsilon > bounds.validity_threshold(s_used, req.p, req.family)
    if row["threshold_ok"]:
        row["tail_ok"] = bounds.tail_probability(req.epsilon, s_used, req.p, req.family) <= req.delta
    else:
        row["tail_ok"] = False
    if gaussian:
        row["ok"] = row["gaussian_cap_ok"]
    else:
        row["ok"] = row["threshold_ok"] and row["tail_ok"]
    return row


def _summary(row):
    return {k: row.get(k) for k in ("N", "z_star", "a_tilde", "rhs", "eq_n", "ok")}


def plan(request: PlanRequest) -> PlanResult:
    """Smallest schedule stage meeting the accuracy/reliability target.

    Stages are scanned upward from 1. ``previous`` in the result records the
    quantities at ``N - 1`` that certify minimality.

    Raises:
        PlanningInfeasible: no stage up to ``schedule.N_max`` qualifies; the
            exception carries the scanned trajectory.
    """
    trajectory = []
    prev = None
    for N in range(1, request.schedule.N_max + 1):
        row = _evaluate(request, N)
        trajectory.append(_summary(row))
        if row["ok"]:
            return PlanResult(
                N=N, omega=row["omega"], lambda_band=row["lambda"], n=row["n"],
                z_star=row["z_star"], a_tilde_value=row["a_tilde"], rhs_value=row["rhs"],
                s_upper=row["s_upper"], s_used=row["s_used"],
                corollary2_satisfied=row["gaussian_cap_ok"], threshold_ok=row["threshold_ok"],
                tail_ok=row["tail_ok"],
                route="gaussian" if request.family.is_gaussian else "sub-gaussian",
                previous=None if prev is None else _summary(prev),
            )
        prev = row
    raise PlanningInfeasible(
        f"no stage N <= {request.schedule.N_max} meets eps={request.epsilon}, "
        f"delta={request.delta}, p={request.p}", trajectory)


def plan_sweep(base: PlanRequest, epsilons: Iterable[float] = (), deltas: Iterable[float] = (),
               ps: Iterable[float] = (), match_alpha_to_p: bool = False,
               workers: int = 1) -> list[SweepCell]:
    """Run :func:`plan` over the Cartesian grid of the given values.

    Empty iterables fall back to the base request's value. Infeasible cells
    keep the error message instead of aborting. With ``match_alpha_to_p``
    each cell uses the power N-function with ``alpha = p``. Cells are
    returned in grid order regardless of ``workers``.
    """
    eps_list = list(epsilons) or [base.epsilon]
    del_list = list(deltas) or [base.delta]
    p_list = list(ps) or [base.p]
    cells = []
    for i, e in enumerate(eps_list):
        for j, d in enumerate(del_list):
            for k, p in enumerate(p_list):
                cells.append(SweepCell(index=(i, j, k), epsilon=e, delta=d, p=p))

    def run(cell):
        kwargs = {"epsilon": cell.epsilon, "delta": cell.delta, "p": cell.p}
        if match_alpha_to_p:
            kwargs["family"] = PowerOrlicz(cell.p)
        try:
            cell.result = plan(replace(base, **kwargs))
        except (PlanningInfeasible, ValidityError, DomainError) as exc:
            cell.error = str(exc)
        return cell

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, cells))
    else:
        for c in cells:
            run(c)
    return cells


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def sweep_to_csv(cells: Iterable[SweepCell], fh=None) -> str:
    """Write sweep cells as CSV with :data:`SWEEP_COLUMNS`; returns the text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for c in cells:
        r = c.result
        if r is None:
            w.writerow([_fmt(c.epsilon), _fmt(c.delta), _fmt(c.p), "", "", "", "", "", "", "false"])
        else:
            w.writerow([_fmt(c.epsilon), _fmt(c.delta), _fmt(c.p), r.N, _fmt(r.omega), r.n,
                        _fmt(r.lambda_band), _fmt(r.a_tilde_value), _fmt(r.rhs_value), "true"])
    text = buf.getvalue()
    if fh is not None:
        fh.write(text)
    return text
