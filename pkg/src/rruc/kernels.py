"""Hot numeric kernels with numba acceleration and a pure-numpy fallback.

Set ``RRUC_NO_NUMBA=1`` in the environment to force the numpy path (useful
for debugging and for benchmarking the two implementations against each
other; see benchmarks/jit_vs_numpy.py).
"""

import os

import numpy as np

_disable = os.environ.get("RRUC_NO_NUMBA", "").lower() in {"1", "true", "yes"}

if not _disable:
    try:
        from numba import njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_ENABLED = False
else:
    NUMBA_ENABLED = False

if not NUMBA_ENABLED:

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap


# ---------------------------------------------------------------------------
# Economic dispatch: marginal-price bisection
# ---------------------------------------------------------------------------

_MAX_BISECT = 200


@njit(cache=True, nogil=True)
def _dispatch_core_jit(a, b, lo, hi, demand):
    n = a.shape[0]
    p = np.empty(n)

    lam_lo = b[0]
    lam_hi = 2.0 * a[0] * hi[0] + b[0]
    for i in range(n):
        if b[i] < lam_lo:
            lam_lo = b[i]
        m = 2.0 * a[i] * hi[i] + b[i]
        if m > lam_hi:
            lam_hi = m
    lam_lo -= 1.0
    lam_hi += 1.0

    lam = lam_hi
    for _ in range(_MAX_BISECT):
        if lam_hi - lam_lo <= 1e-12 * max(1.0, abs(lam_hi)):
            break
        lam = 0.5 * (lam_lo + lam_hi)
        total = 0.0
        for i in range(n):
            if a[i] > 0.0:
                x = (lam - b[i]) / (2.0 * a[i])
                if x < lo[i]:
                    x = lo[i]
                elif x > hi[i]:
                    x = hi[i]
            else:
                x = hi[i] if lam >= b[i] else lo[i]
            total += x
        if total >= demand:
            lam_hi = lam
        else:
            lam_lo = lam

    lam = lam_hi
    total = 0.0
    for i in range(n):
        if a[i] > 0.0:
            x = (lam - b[i]) / (2.0 * a[i])
            if x < lo[i]:
                x = lo[i]
            elif x > hi[i]:
                x = hi[i]
        else:
            x = hi[i] if lam >= b[i] else lo[i]
        p[i] = x
        total += x

    # a == 0 units step discontinuously at lam == b; shed the overshoot from
    # the highest-index marginal units so lower indices fill first.
    excess = total - demand
    if excess > 0.0:
        eps = 1e-9 * (1.0 + abs(lam))
        for i in range(n - 1, -1, -1):
            if excess <= 0.0:
                break
            if a[i] == 0.0 and abs(b[i] - lam) <= eps:
                room = p[i] - lo[i]
                cut = excess if excess < room else room
                p[i] -= cut
                excess -= cut
    return p, lam


def _dispatch_core_numpy(a, b, lo, hi, demand):
    quad = a > 0.0

    def supply(lam):
        with np.errstate(divide="ignore", invalid="ignore"):
            x = np.where(quad, (lam - b) / (2.0 * a), np.where(lam >= b, hi, lo))
        return np.clip(x, lo, hi)

    lam_lo = float(np.min(b)) - 1.0
    lam_hi = float(np.max(2.0 * a * hi + b)) + 1.0
    for _ in range(_MAX_BISECT):
        if lam_hi - lam_lo <= 1e-12 * max(1.0, abs(lam_hi)):
            break
        lam = 0.5 * (lam_lo + lam_hi)
        if float(np.sum(supply(lam))) >= demand:
            lam_hi = lam
        else:
            lam_lo = lam

    lam = lam_hi
    p = supply(lam)
    excess = float(np.sum(p)) - demand
    if excess > 0.0:
        eps = 1e-9 * (1.0 + abs(lam))
        marginal = np.flatnonzero((a == 0.0) & (np.abs(b - lam) <= eps))
        for i in marginal[::-1]:
            if excess <= 0.0:
                break
            cut = min(excess, p[i] - lo[i])
            p[i] -= cut
            excess -= cut
    return p, lam


# ---------------------------------------------------------------------------
# Relaxation: penalized objective value + gradient
#
# Variable layout: x = [y_0..y_{n-1}, p_0..p_{n-1}, p_agg].  Units without an
# output variable carry p bounds [0, 0].  Constraints in c(x) >= 0 form:
#   c1 = sum_i (has_p? y*p : 0) + (1-y)*wterm + p_agg - d_rhs
#   c2 = sum_i y*pmax - cap_rhs
#   c3 = min_rhs - sum_i y*pmin
# Penalty is the standard shifted-quadratic form for inequalities with
# multipliers mu and penalty parameter rho.
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _relax_value_grad_jit(x, has_p, a, b, c, pen, y0, lin, wterm, pmax, pmin,
                          d_rhs, cap_rhs, min_rhs, mu, rho):
    n = has_p.shape[0]
    f = 0.0
    c1 = x[2 * n] - d_rhs
    c2 = -cap_rhs
    c3 = min_rhs
    for i in range(n):
        y = x[i]
        p = x[n + i]
        dy = y - y0[i]
        f += pen[i] * dy * dy + lin[i] * y
        if has_p[i]:
            f += (a[i] * p * p + b[i] * p + c[i]) * y
            c1 += y * p
        c1 += (1.0 - y) * wterm[i]
        c2 += y * pmax[i]
        c3 -= y * pmin[i]

    s1 = mu[0] - rho * c1
    s1 = s1 if s1 > 0.0 else 0.0
    s2 = mu[1] - rho * c2
    s2 = s2 if s2 > 0.0 else 0.0
    s3 = mu[2] - rho * c3
    s3 = s3 if s3 > 0.0 else 0.0

    phi = f + ((s1 * s1 - mu[0] * mu[0]) + (s2 * s2 - mu[1] * mu[1])
               + (s3 * s3 - mu[2] * mu[2])) / (2.0 * rho)

    g = np.empty(2 * n + 1)
    for i in range(n):
        y = x[i]
        p = x[n + i]
        gy = 2.0 * pen[i] * (y - y0[i]) + lin[i]
        gp = 0.0
        dc1_dy = -wterm[i]
        if has_p[i]:
            cost = a[i] * p * p + b[i] * p + c[i]
            gy += cost
            gp = (2.0 * a[i] * p + b[i]) * y
            dc1_dy += p
        gy -= s1 * dc1_dy + s2 * pmax[i] - s3 * pmin[i]
        gp -= s1 * (y if has_p[i] else 0.0)
        g[i] = gy
        g[n + i] = gp
    g[2 * n] = -s1
    return phi, g


def _relax_value_grad_numpy(x, has_p, a, b, c, pen, y0, lin, wterm, pmax, pmin,
                            d_rhs, cap_rhs, min_rhs, mu, rho):
    n = has_p.shape[0]
    y = x[:n]
    p = x[n:2 * n]
    hp = has_p.astype(np.float64)

    cost = a * p * p + b * p + c
    f = float(np.sum(pen * (y - y0) ** 2 + lin * y + hp * cost * y))
    c1 = float(np.sum(hp * y * p + (1.0 - y) * wterm)) + x[2 * n] - d_rhs
    c2 = float(np.sum(y * pmax)) - cap_rhs
    c3 = min_rhs - float(np.sum(y * pmin))

    s = np.maximum(0.0, mu - rho * np.array([c1, c2, c3]))
    phi = f + float(np.sum(s * s - mu * mu)) / (2.0 * rho)

    gy = 2.0 * pen * (y - y0) + lin + hp * cost
    gy -= s[0] * (hp * p - wterm) + s[1] * pmax - s[2] * pmin
    gp = hp * ((2.0 * a * p + b) * y - s[0] * y)
    g = np.concatenate([gy, gp, [-s[0]]])
    return phi, g


@njit(cache=True, nogil=True)
def _relax_constraints_jit(x, has_p, wterm, pmax, pmin, d_rhs, cap_rhs, min_rhs):
    n = has_p.shape[0]
    c1 = x[2 * n] - d_rhs
    c2 = -cap_rhs
    c3 = min_rhs
    for i in range(n):
        y = x[i]
        if has_p[i]:
            c1 += y * x[n + i]
        c1 += (1.0 - y) * wterm[i]
        c2 += y * pmax[i]
        c3 -= y * pmin[i]
    return c1, c2, c3


def _relax_constraints_numpy(x, has_p, wterm, pmax, pmin, d_rhs, cap_rhs, min_rhs):
    n = has_p.shape[0]
    y = x[:n]
    hp = has_p.astype(np.float64)
    c1 = float(np.sum(hp * y * x[n:2 * n] + (1.0 - y) * wterm)) + x[2 * n] - d_rhs
    c2 = float(np.sum(y * pmax)) - cap_rhs
    c3 = min_rhs - float(np.sum(y * pmin))
    return c1, c2, c3


if NUMBA_ENABLED:
    dispatch_core = _dispatch_core_jit
    relax_value_grad = _relax_value_grad_jit
    relax_constraints = _relax_constraints_jit
else:
    dispatch_core = _dispatch_core_numpy
    relax_value_grad = _relax_value_grad_numpy
    relax_constraints = _relax_constraints_numpy
