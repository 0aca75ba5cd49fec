"""Generator data types, quadratic cost fitting, and fleet synthesis.

The bundled 42-unit base fleet is a reconstruction: per-fuel parameters are
drawn from published thermal-plant ranges and rescaled so the total capacity
matches 9047.9 MW.  It is not actual PJM unit data; user fleets can be loaded
from JSON instead.
"""

import json
from dataclasses import dataclass, field, asdict

import numpy as np

BASE_FLEET_CAPACITY_MW = 9047.9
BASE_FLEET_SIZE = 42

_SPEC_FIELDS = {
    "id", "cost", "p_min", "p_max", "fuel", "ramp_up_rate", "ramp_down_rate",
    "min_runtime", "max_daily_starts", "start_durations", "start_costs",
    "shutdown_cost", "p_typ",
}


class FleetError(ValueError):
    pass


@dataclass(frozen=True)
class CostCurve:
    """Quadratic production cost: cost(P) = a*P^2 + b*P + c [$/h]."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        if self.a < 0:
            raise FleetError(f"cost curvature must be nonnegative, got {self.a}")

    def __call__(self, p):
        return self.a * p * p + self.b * p + self.c

    def marginal(self, p):
        return 2.0 * self.a * p + self.b


@dataclass(frozen=True)
class GeneratorSpec:
    id: str
    cost: CostCurve
    p_min: float
    p_max: float
    fuel: str  # "coal" | "gas"
    ramp_up_rate: float  # MW/min
    ramp_down_rate: float  # MW/min
    min_runtime: float  # minutes
    max_daily_starts: int
    start_durations: dict  # {"hot","warm","cold"} -> minutes
    start_costs: dict  # {"hot","warm","cold"} -> $
    shutdown_cost: float

    def __post_init__(self):
        if not (0 < self.p_min <= self.p_max):
            raise FleetError(f"{self.id}: need 0 < p_min <= p_max")
        if self.ramp_up_rate <= 0 or self.ramp_down_rate <= 0:
            raise FleetError(f"{self.id}: ramp rates must be positive")
        if self.min_runtime < 0:
            raise FleetError(f"{self.id}: min_runtime must be >= 0")
        if self.max_daily_starts < 1:
            raise FleetError(f"{self.id}: max_daily_starts must be >= 1")
        for key, dct in (("start_costs", self.start_costs),
                         ("start_durations", self.start_durations)):
            if not (dct["hot"] <= dct["warm"] <= dct["cold"]):
                raise FleetError(f"{self.id}: {key} must be ordered hot <= warm <= cold")

    @property
    def p_typ(self):
        return (4.0 * self.p_max + self.p_min) / 5.0

    def average_cost_at_p_typ(self):
        """$/MWh at typical output; the ordering tie-break key."""
        pt = self.p_typ
        return self.cost.a * pt + self.cost.b + self.cost.c / pt


@dataclass
class Fleet:
    generators: list
    base_multiplier: int = 1
    total_p_max: float = field(init=False)

    def __post_init__(self):
        ids = [g.id for g in self.generators]
        if len(set(ids)) != len(ids):
            raise FleetError("generator ids must be unique")
        self.total_p_max = float(sum(g.p_max for g in self.generators))

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)


def fit_quadratic_cost(bid_points):
    """Least-squares quadratic fit to (MW, $/h) bid points.

    If the fitted curvature is negative it is clamped to zero and the linear
    coefficients are refit.
    """
    pts = [(float(p), float(c)) for p, c in bid_points]
    if len({p for p, _ in pts}) < 3:
        raise FleetError("need at least 3 distinct MW points for a quadratic fit")
    p = np.array([q for q, _ in pts])
    c = np.array([q for _, q in pts])
    vand = np.column_stack([p * p, p, np.ones_like(p)])
    coef, *_ = np.linalg.lstsq(vand, c, rcond=None)
    if coef[0] < 0:
        lin, *_ = np.linalg.lstsq(vand[:, 1:], c, rcond=None)
        return CostCurve(0.0, float(lin[0]), float(lin[1]))
    return CostCurve(float(coef[0]), float(coef[1]), float(coef[2]))


def synthesize_fleet(base, multiplier, seed):
    """Replicate `base` `multiplier` times with symmetry-breaking jitter.

    Copy 1 of every unit is exact.  Copies >= 2 get p_min/p_max scaled by
    independent uniform factors in [0.9, 1.1] and max_daily_starts /
    min_runtime (in whole hours) shifted by a uniform draw from {-1, 0, +1},
    clamped back to validity.  Deterministic in `seed`.
    """
    if multiplier < 1:
        raise FleetError(f"multiplier must be >= 1, got {multiplier}")
    rng = np.random.default_rng(seed)
    out = []
    for k in range(multiplier):
        for g in base:
            if k == 0:
                out.append(g)
                continue
            f_min = rng.uniform(0.9, 1.1)
            f_max = rng.uniform(0.9, 1.1)
            p_min = g.p_min * f_min
            p_max = g.p_max * f_max
            if p_min > p_max:
                p_min = p_max
            starts = int(np.clip(g.max_daily_starts + rng.integers(-1, 2), 1, None))
            runtime = max(0.0, g.min_runtime + 60.0 * rng.integers(-1, 2))
            out.append(GeneratorSpec(
                id=f"{g.id}~{k}",
                cost=g.cost,
                p_min=p_min,
                p_max=p_max,
                fuel=g.fuel,
                ramp_up_rate=g.ramp_up_rate,
                ramp_down_rate=g.ramp_down_rate,
                min_runtime=runtime,
                max_daily_starts=starts,
                start_durations=dict(g.start_durations),
                start_costs=dict(g.start_costs),
                shutdown_cost=g.shutdown_cost,
            ))
    return Fleet(out, base_multiplier=multiplier)


def base_fleet():
    """The bundled reconstructed 42-unit base fleet (deterministic)."""
    rng = np.random.default_rng(20250617)
    units = []
    n_coal = 14
    for i in range(BASE_FLEET_SIZE):
        coal = i < n_coal
        fuel = "coal" if coal else "gas"
        if coal:
            p_max = rng.uniform(300.0, 1300.0)
            ratio = rng.uniform(0.35, 0.6)
            min_runtime = 60.0 * rng.integers(4, 25)  # 240-1440 min
            starts = int(rng.integers(1, 4))
            hot_dur = rng.uniform(60.0, 240.0)
            warm_dur = max(hot_dur, rng.uniform(120.0, 480.0))
            cold_dur = max(warm_dur, rng.uniform(360.0, 720.0))
            ramp_up_pct = rng.uniform(1.0, 6.0)
            ramp_down_pct = 5.0
            b = rng.uniform(12.0, 25.0)
            warm_ratio = rng.uniform(1.19, 1.42)
            cold_ratio = rng.uniform(1.74, 1.93)
        else:
            p_max = rng.uniform(20.0, 400.0)
            ratio = rng.uniform(0.25, 0.5)
            min_runtime = 60.0 * rng.integers(0, 13)  # 0-720 min
            starts = int(rng.integers(2, 13))
            hot_dur = rng.uniform(25.0, 120.0)
            warm_dur = max(hot_dur, rng.uniform(60.0, 240.0))
            cold_dur = max(warm_dur, rng.uniform(120.0, 300.0))
            ramp_up_pct = rng.uniform(2.0, 12.0)
            ramp_down_pct = 15.0
            b = rng.uniform(22.0, 45.0)
            warm_ratio = rng.uniform(1.12, 1.58)
            cold_ratio = max(warm_ratio, rng.uniform(1.35, 2.25))
        a = rng.uniform(0.3, 3.0) / p_max
        c = rng.uniform(0.8, 3.0) * p_max
        hot_cost = rng.uniform(40.0, 110.0) * p_max
        units.append(dict(
            p_max=p_max, ratio=ratio, fuel=fuel, min_runtime=min_runtime,
            starts=starts, durations=(hot_dur, warm_dur, cold_dur),
            ramp_up_pct=ramp_up_pct, ramp_down_pct=ramp_down_pct,
            a=a, b=b, c=c, hot_cost=hot_cost,
            warm_ratio=warm_ratio, cold_ratio=cold_ratio,
        ))

    scale = BASE_FLEET_CAPACITY_MW / sum(u["p_max"] for u in units)
    specs = []
    for i, u in enumerate(units):
        p_max = u["p_max"] * scale
        p_min = p_max * u["ratio"]
        hot = u["hot_cost"] * scale
        specs.append(GeneratorSpec(
            id=f"{u['fuel']}-{i:02d}",
            cost=CostCurve(u["a"] / scale, u["b"], u["c"] * scale),
            p_min=p_min,
            p_max=p_max,
            fuel=u["fuel"],
            ramp_up_rate=u["ramp_up_pct"] / 100.0 * p_max,
            ramp_down_rate=u["ramp_down_pct"] / 100.0 * p_max,
            min_runtime=u["min_runtime"],
            max_daily_starts=u["starts"],
            start_durations={"hot": u["durations"][0], "warm": u["durations"][1],
                             "cold": u["durations"][2]},
            start_costs={"hot": hot, "warm": hot * u["warm_ratio"],
                         "cold": hot * u["cold_ratio"]},
            shutdown_cost=0.5 * hot,
        ))
    return Fleet(specs)


def _spec_to_record(g):
    rec = asdict(g)
    rec["cost"] = {"a": g.cost.a, "b": g.cost.b, "c": g.cost.c}
    rec["p_typ"] = g.p_typ
    return rec


def save_fleet(fleet, path):
    with open(path, "w") as f:
        json.dump([_spec_to_record(g) for g in fleet], f, indent=1, sort_keys=True)


def load_fleet(path):
    with open(path) as f:
        records = json.load(f)
    specs = []
    for rec in records:
        unknown = set(rec) - _SPEC_FIELDS
        if unknown:
            raise FleetError(f"unknown fleet fields: {sorted(unknown)}")
        missing = _SPEC_FIELDS - {"p_typ"} - set(rec)
        if missing:
            raise FleetError(f"missing fleet fields: {sorted(missing)}")
        rec = dict(rec)
        rec.pop("p_typ", None)
        rec["cost"] = CostCurve(**rec["cost"])
        rec["max_daily_starts"] = int(rec["max_daily_starts"])
        specs.append(GeneratorSpec(**rec))
    return Fleet(specs)
