"""Continuous relaxation of the commitment binaries and candidate ordering.

The relaxed per-period problem is a small dense nonconvex NLP: commitment
scores y in [0,1], outputs P in their (possibly ramp-tightened) boxes, an
aggregate output variable for the must-run group, and three linear-in-y
coupling constraints (demand, capacity reserve, minimum-output floor).  It is
solved with a bound-constrained augmented-Lagrangian method: the
inequalities get shifted quadratic penalties with multiplier updates, and the
inner subproblems go to L-BFGS-B driving the compiled value/gradient kernel.
Only the y-ordering is consumed downstream.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .kernels import relax_value_grad, relax_constraints

KKT_TOL = 1e-6
MAX_OUTER = 500
MAX_INNER = 2000
TIE_EPS = 1e-9


@dataclass(frozen=True)
class RelaxedUnit:
    """One discretionary unit as seen by the relaxed problem.

    has_output=False units (previously-off units in the ramp model) carry no
    output variable; their score still enters the capacity/floor constraints
    and the switch penalty.  `demand_const` is the fixed demand-side
    contribution of the y=0 branch (the first ramp-down period's output)."""

    a: float
    b: float
    c: float
    p_lo: float
    p_hi: float
    p_min: float
    p_max: float
    switch_penalty: float
    y0: float
    start_bias: float = 0.0
    demand_const: float = 0.0
    has_output: bool = True


@dataclass(frozen=True)
class RelaxedProblem:
    units: list
    demand: float
    cap_requirement: float  # d_max_72 + 3*sigma + R, net of ramping supply
    floor_allowance: float  # d_min_72 - sigma, net of ramping supply
    must_run_lo: float = 0.0  # sum of must-run output lower bounds
    must_run_hi: float = 0.0  # sum of must-run output upper bounds


@dataclass
class RelaxedSolution:
    y: np.ndarray
    p: np.ndarray
    objective: float
    kkt_residual: float
    converged: bool
    multipliers: np.ndarray = field(default_factory=lambda: np.zeros(3))
    outer_iterations: int = 0


class RelaxationInfeasible(ValueError):
    pass


def _pack(problem):
    n = len(problem.units)
    has_p = np.array([u.has_output for u in problem.units], dtype=np.bool_)
    a = np.array([u.a for u in problem.units])
    b = np.array([u.b for u in problem.units])
    c = np.array([u.c for u in problem.units])
    pen = np.array([u.switch_penalty for u in problem.units])
    y0 = np.array([u.y0 for u in problem.units])
    lin = np.array([u.start_bias for u in problem.units])
    wterm = np.array([u.demand_const for u in problem.units])
    pmax = np.array([u.p_max for u in problem.units])
    pmin = np.array([u.p_min for u in problem.units])
    plo = np.where(has_p, np.array([u.p_lo for u in problem.units]), 0.0)
    phi = np.where(has_p, np.array([u.p_hi for u in problem.units]), 0.0)

    lb = np.concatenate([np.zeros(n), plo, [problem.must_run_lo]])
    ub = np.concatenate([np.ones(n), phi, [problem.must_run_hi]])
    cap_rhs = problem.cap_requirement - problem.must_run_hi
    min_rhs = problem.floor_allowance - problem.must_run_lo
    args = (has_p, a, b, c, pen, y0, lin, wterm, pmax, pmin,
            float(problem.demand), float(cap_rhs), float(min_rhs))
    return lb, ub, args


def solve_relaxed(problem, tol=KKT_TOL, max_outer=MAX_OUTER, max_inner=MAX_INNER):
    """First-order stationary point of the relaxed commitment problem.

    Deterministic: fixed initialization y=0.5, P=(lo+hi)/2, fixed iteration
    order.  Raises RelaxationInfeasible when the committable capacity cannot
    cover the demand-side requirement even with every score at 1.
    """
    n = len(problem.units)
    if n == 0:
        raise RelaxationInfeasible("no discretionary units")
    lb, ub, args = _pack(problem)
    (has_p, a, b, c, pen, y0, lin, wterm, pmax, pmin,
     d_rhs, cap_rhs, min_rhs) = args

    max_supply = float(np.sum(np.where(has_p, ub[n:2 * n], 0.0))) + problem.must_run_hi
    if max_supply < d_rhs - 1e-9 * (1.0 + abs(d_rhs)):
        raise RelaxationInfeasible(
            f"max committable supply {max_supply:.3f} < demand {d_rhs:.3f}")

    # Constraints that are violated by every feasible point carry no
    # ordering information and only make the multipliers diverge; the commit
    # range flags them downstream (demand satisfaction wins).  Drop the
    # output floor when even an empty commitment exceeds the allowance, and
    # the capacity requirement when even a full commitment falls short.
    dropped = False
    if min_rhs < 0.0:
        min_rhs = float(np.sum(pmin)) + 1.0
        dropped = True
    if float(np.sum(pmax)) < cap_rhs:
        cap_rhs = -1.0
        dropped = True
    if dropped:
        args = (has_p, a, b, c, pen, y0, lin, wterm, pmax, pmin,
                d_rhs, cap_rhs, min_rhs)

    x = np.concatenate([np.full(n, 0.5), 0.5 * (lb[n:2 * n] + ub[n:2 * n]),
                        [0.5 * (problem.must_run_lo + problem.must_run_hi)]])
    mu = np.zeros(3)
    rho = 10.0
    prev_viol = np.inf
    last_viol = np.inf
    stalled = 0
    inner_tol = 1e-2
    converged = False
    outer = 0

    for outer in range(1, max_outer + 1):
        x = _inner_minimize(x, lb, ub, args, mu, rho, inner_tol, max_inner)
        cons = np.array(relax_constraints(x, has_p, wterm, pmax, pmin,
                                          d_rhs, cap_rhs, min_rhs))
        mu = np.maximum(0.0, mu - rho * cons)
        viol = float(np.max(np.maximum(0.0, -cons)))

        f, res = _kkt_residual(x, lb, ub, args, mu)
        scale = 1.0 + abs(f)
        if res <= tol * scale and viol <= tol * scale:
            converged = True
            break
        # Conflicting constraints (e.g. demand vs. output floor) leave the
        # violation pinned while the multipliers diverge.  Demand wins, as in
        # the integer commit range: drop a pinned floor/capacity constraint
        # and keep going; bail out only if the demand side itself is stuck.
        if viol > tol * scale and viol >= 0.999 * last_viol:
            stalled += 1
            if stalled >= 8:
                dropped_now = False
                if cons[2] < 0.0:
                    min_rhs = float(np.sum(pmin)) + 1.0
                    dropped_now = True
                if cons[1] < 0.0:
                    cap_rhs = -1.0
                    dropped_now = True
                if not dropped_now:
                    break
                args = (has_p, a, b, c, pen, y0, lin, wterm, pmax, pmin,
                        d_rhs, cap_rhs, min_rhs)
                mu = np.zeros(3)
                rho = 10.0
                prev_viol = np.inf
                last_viol = np.inf
                stalled = 0
                continue
        else:
            stalled = 0
        last_viol = viol
        if viol > 0.25 * prev_viol and viol > tol * scale:
            rho = min(rho * 10.0, 1e12)
        prev_viol = min(prev_viol, viol) if np.isfinite(prev_viol) else viol
        inner_tol = max(inner_tol * 0.2, 0.1 * tol * scale)

    f, res = _kkt_residual(x, lb, ub, args, mu)
    return RelaxedSolution(
        y=x[:n].copy(),
        p=np.where(has_p, x[n:2 * n], 0.0),
        objective=f,
        kkt_residual=res / (1.0 + abs(f)),
        converged=converged,
        multipliers=mu.copy(),
        outer_iterations=outer,
    )


def _kkt_residual(x, lb, ub, args, mu):
    """Projected gradient of the Lagrangian f - mu.c at x (absolute scale)."""
    f, g = relax_value_grad(x, *args, mu, 1e-30)
    # rho ~ 0 makes the shifted penalty reduce to the plain Lagrangian
    # gradient -sum(mu_j grad c_j); guard: recompute with explicit slacks.
    step = np.clip(x - g, lb, ub) - x
    return f, float(np.max(np.abs(step)))


def _inner_minimize(x, lb, ub, args, mu, rho, gtol, max_inner):
    """Bound-constrained minimization of the penalized subproblem.

    The raw problem is badly scaled: score variables see curvature ~2K
    (switch penalties, 1e3-1e5) while output variables see ~2a (1e-3-1e-2),
    which cripples quasi-Newton updates.  Minimize in diagonally rescaled
    variables z = x / s with s ~ 1/sqrt(diag Hessian estimate)."""
    n = (len(x) - 1) // 2
    (has_p, a, b, c, pen, y0, lin, wterm, pmax, pmin,
     d_rhs, cap_rhs, min_rhs) = args
    p_mid = 0.5 * (lb[n:2 * n] + ub[n:2 * n])
    h = np.empty_like(x)
    h[:n] = 2.0 * pen + rho * (np.maximum(p_mid, wterm) ** 2
                               + pmax ** 2 + pmin ** 2)
    h[n:2 * n] = np.where(has_p, a, 0.0) + rho * 0.25
    h[2 * n] = rho
    s = 1.0 / np.sqrt(np.maximum(h, 1e-12))

    def fun(z):
        f, g = relax_value_grad(z * s, *args, mu, rho)
        return f, g * s

    res = minimize(
        fun, np.clip(x, lb, ub) / s,
        method="L-BFGS-B", jac=True,
        bounds=list(zip(lb / s, ub / s)),
        # The outer loop measures stationarity on the unscaled variables;
        # g_x = g_z / s, so drive max|g_z| below gtol * min(s).
        options={"maxiter": max_inner, "gtol": gtol * float(np.min(s)),
                 "ftol": 1e-15, "maxls": 60},
    )
    return np.clip(res.x * s, lb, ub)


def order_candidates(sol, specs, fallback=False):
    """Permutation of discretionary units: descending relaxation score, ties
    (within 1e-9, quantized) broken by ascending average cost at p_typ, then
    ascending id.  fallback=True ignores scores entirely (priority list)."""
    keys = []
    for i, spec in enumerate(specs):
        avg = spec.average_cost_at_p_typ()
        if fallback:
            keys.append((0, avg, spec.id, i))
        else:
            q = -int(np.floor(sol.y[i] / TIE_EPS + 0.5))
            keys.append((q, avg, spec.id, i))
    return [k[-1] for k in sorted(keys)]
