import numpy as np
import pytest

from rruc import base_fleet, synthesize_fleet
from rruc.demand import DemandTrace
from rruc.fleet import Fleet


@pytest.fixture(scope="session")
def base():
    return base_fleet()


@pytest.fixture(scope="session")
def pool(base):
    """Jittered unit pool for random instance generation."""
    return tuple(synthesize_fleet(base, 2, seed=7))


def small_fleet(base, n, lead=0):
    """Sub-fleet of n units drawn round-robin across the base fleet (mixes
    coal and gas)."""
    gens = list(base)
    picked = [gens[(lead + j * 5) % len(gens)] for j in range(n)]
    seen = {}
    uniq = []
    for g in picked:
        if g.id in seen:
            continue
        seen[g.id] = True
        uniq.append(g)
    j = 0
    while len(uniq) < n:
        if gens[j].id not in seen:
            seen[gens[j].id] = True
            uniq.append(gens[j])
        j += 1
    return Fleet(uniq)


def fleet_trace(fleet, days=2, dt=5.0, seed=0, low_frac=0.45, peak_frac=0.75):
    """Demand trace sized to a fleet's capacity."""
    from rruc import synthesize_demand

    total = fleet.total_p_max
    return synthesize_demand(low=low_frac * total, peak=peak_frac * total,
                             days=days, dt=dt, seed=seed,
                             sigma_d=0.005 * total)


def constant_trace(value, periods, dt=5.0, sigma_d=0.0):
    return DemandTrace(dt=dt, values=np.full(periods, float(value)),
                       sigma_d=sigma_d)
