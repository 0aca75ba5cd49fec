"""Exhaustive ground truth for desk-scale single-period commitment problems.

Enumerates every subset of the discretionary units, filters by the demand,
capacity-reserve, and output-floor constraints, dispatches each feasible
subset, and returns the true minimum.  Hard-capped at 20 discretionary units
(2^20 dispatches); refuses larger instances rather than sampling.
"""

from dataclasses import dataclass

from .dispatch import DispatchProblem, DispatchUnit, economic_dispatch

ENUM_CAP = 20


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class OracleUnit:
    a: float
    b: float
    c: float
    p_min: float
    p_max: float
    switch_penalty: float = 0.0
    prev_committed: bool = False


@dataclass(frozen=True)
class OracleProblem:
    discretionary: list  # OracleUnit
    must_run: list  # OracleUnit (penalties ignored; always committed)
    demand: float
    d_max_72: float
    d_min_72: float
    sigma_d: float


@dataclass
class OracleResult:
    best_commitment: tuple  # indices into discretionary
    best_objective: float
    evaluated: int
    feasible: bool

    def gap_vs(self, candidate_objective):
        return gap(candidate_objective, self)


def exhaustive_uc(problem):
    nd = len(problem.discretionary)
    if nd > ENUM_CAP:
        raise OracleError(f"{nd} discretionary units exceeds the {ENUM_CAP}-unit cap")

    mr = problem.must_run
    mr_p_max = sum(u.p_max for u in mr)
    mr_p_min = sum(u.p_min for u in mr)
    mr_r = max((u.p_max for u in mr), default=0.0)
    upper_rhs = problem.d_max_72 + 3.0 * problem.sigma_d
    lower_rhs = problem.d_min_72 - problem.sigma_d

    best_obj = None
    best_subset = None
    evaluated = 0
    for mask in range(1 << nd):
        evaluated += 1
        subset = tuple(i for i in range(nd) if mask >> i & 1)
        chosen = [problem.discretionary[i] for i in subset]

        cap = mr_p_max + sum(u.p_max for u in chosen)
        reserve = max([mr_r, *(u.p_max for u in chosen)]) if (chosen or mr) else 0.0
        if cap < upper_rhs + reserve:
            continue
        floor = mr_p_min + sum(u.p_min for u in chosen)
        if floor > lower_rhs:
            continue
        if cap < problem.demand:
            continue

        units = [DispatchUnit(u.a, u.b, u.c, u.p_min, u.p_max, 0.0)
                 for u in mr + chosen]
        if not units:
            continue
        d = economic_dispatch(DispatchProblem(units=units, demand=problem.demand))
        if not d.feasible:
            continue
        obj = d.objective
        for i, u in enumerate(problem.discretionary):
            if i in subset:
                if not u.prev_committed:
                    obj += u.switch_penalty
            elif u.prev_committed:
                obj += u.switch_penalty
        if best_obj is None or obj < best_obj - 1e-12 * (1.0 + abs(obj)) or (
                abs(obj - best_obj) <= 1e-12 * (1.0 + abs(obj)) and subset < best_subset):
            best_obj = obj
            best_subset = subset

    if best_obj is None:
        return OracleResult(best_commitment=(), best_objective=float("inf"),
                            evaluated=evaluated, feasible=False)
    return OracleResult(best_commitment=best_subset, best_objective=best_obj,
                        evaluated=evaluated, feasible=True)


def gap(candidate_objective, oracle):
    """(candidate - best) / best relative optimality gap."""
    if not oracle.feasible or oracle.best_objective <= 0:
        raise OracleError("gap undefined: oracle infeasible or nonpositive optimum")
    return (candidate_objective - oracle.best_objective) / oracle.best_objective
