"""Economic dispatch of a fixed committed set via marginal-price bisection."""

from dataclasses import dataclass

import numpy as np

from .kernels import dispatch_core


class DispatchError(ValueError):
    pass


@dataclass(frozen=True)
class DispatchUnit:
    a: float
    b: float
    c: float
    lower: float
    upper: float
    start_penalty: float = 0.0


@dataclass(frozen=True)
class DispatchProblem:
    units: list
    demand: float

    def __post_init__(self):
        if not self.units:
            raise DispatchError("dispatch needs at least one unit")
        if self.demand < 0:
            raise DispatchError("demand must be nonnegative")
        for u in self.units:
            if u.lower > u.upper:
                raise DispatchError("unit lower bound exceeds upper bound")


@dataclass(frozen=True)
class Dispatch:
    outputs: np.ndarray
    lam: float
    objective: float
    feasible: bool


def _arrays(problem):
    a = np.array([u.a for u in problem.units])
    b = np.array([u.b for u in problem.units])
    lo = np.array([u.lower for u in problem.units])
    hi = np.array([u.upper for u in problem.units])
    return a, b, lo, hi


def economic_dispatch(problem):
    """Minimize total quadratic cost plus start penalties s.t. sum(P) >= D.

    Costs increase with output, so the demand inequality binds unless the
    lower-bound floors already exceed demand; in that case every unit sits at
    its floor and demand is over-satisfied.
    """
    a, b, lo, hi = _arrays(problem)
    demand = problem.demand
    penalties = sum(u.start_penalty for u in problem.units)

    if float(np.sum(hi)) < demand * (1.0 - 1e-12):
        outputs = hi.copy()
        obj = _total_cost(problem, outputs) + penalties
        return Dispatch(outputs=outputs, lam=float(np.max(2 * a * hi + b)),
                        objective=obj, feasible=False)

    if float(np.sum(lo)) >= demand:
        outputs = lo.copy()
        obj = _total_cost(problem, outputs) + penalties
        return Dispatch(outputs=outputs, lam=float(np.min(2 * a * lo + b)),
                        objective=obj, feasible=True)

    outputs, lam = dispatch_core(a, b, lo, hi, demand)
    obj = _total_cost(problem, outputs) + penalties
    return Dispatch(outputs=np.asarray(outputs), lam=float(lam),
                    objective=obj, feasible=True)


def _total_cost(problem, outputs):
    return float(sum(u.a * p * p + u.b * p + u.c
                     for u, p in zip(problem.units, outputs)))


def verify_kkt_dispatch(problem, dispatch, tol):
    """Stationarity predicate: every unit's marginal cost equals lambda, or
    the unit is pinned at a bound with a correctly signed multiplier, and the
    demand balance holds."""
    if not dispatch.feasible:
        return False
    lam = dispatch.lam
    scale = 1.0 + abs(lam)
    floors = sum(u.lower for u in problem.units)
    target = max(problem.demand, floors)
    if abs(float(np.sum(dispatch.outputs)) - target) > tol * (1.0 + target):
        return False
    for u, p in zip(problem.units, dispatch.outputs):
        if p < u.lower - tol or p > u.upper + tol:
            return False
        mc = 2.0 * u.a * p + u.b
        span = max(u.upper - u.lower, 1e-12)
        at_lower = (p - u.lower) <= tol * span
        at_upper = (u.upper - p) <= tol * span
        if at_lower and mc >= lam - tol * scale:
            continue
        if at_upper and mc <= lam + tol * scale:
            continue
        if abs(mc - lam) <= tol * scale:
            continue
        return False
    return True
