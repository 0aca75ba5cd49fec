"""Shared simulation state: engine configuration and per-unit records."""

import json
from dataclasses import dataclass, field, asdict

STAGE_OFF = "off"
STAGE_PREPARE = "prepare"
STAGE_RAMP_UP = "ramp_up"
STAGE_ON = "on"
STAGE_RAMP_DOWN = "ramp_down"
STAGES = (STAGE_OFF, STAGE_PREPARE, STAGE_RAMP_UP, STAGE_ON, STAGE_RAMP_DOWN)

ROLLING_WINDOW_MIN = 24 * 60
COLD_START_OFF_MIN = 72 * 60


@dataclass
class EngineConfig:
    relax_tol: float = 1e-6
    relax_max_outer: int = 500
    relax_max_inner: int = 2000
    sweep_parallel: bool = False
    sweep_max_width: int | None = None
    ramp_profile: str = "piecewise"  # piecewise | smooth
    beta: float = 0.001
    hot_start_max_off_min: float = 8 * 60
    warm_start_max_off_min: float = 48 * 60


@dataclass
class GeneratorState:
    stage: str = STAGE_OFF
    stage_age: int = 0  # completed periods in the current ramping stage
    prev_output: float = 0.0  # MW at the end of the previous period
    on_duration: float = 0.0  # minutes in the on stage
    off_duration: float = COLD_START_OFF_MIN  # minutes off (cold initial state)
    start_log: list = field(default_factory=list)  # start times, minutes
    profile: object = None  # active RampProfile while ramping

    @property
    def starts_in_window(self):
        return len(self.start_log)

    def prune_window(self, now_min):
        self.start_log = [s for s in self.start_log
                          if s > now_min - ROLLING_WINDOW_MIN]


@dataclass
class System:
    fleet: object  # Fleet
    trace: object  # DemandTrace
    config: EngineConfig
    states: list = None

    def __post_init__(self):
        if self.states is None:
            self.states = [GeneratorState() for _ in self.fleet]

    @property
    def specs(self):
        return self.fleet.generators


def save_states(states, path):
    records = []
    for s in states:
        rec = asdict(s)
        rec.pop("profile")
        records.append(rec)
    with open(path, "w") as f:
        json.dump(records, f, indent=1, sort_keys=True)


def load_states(path):
    with open(path) as f:
        records = json.load(f)
    return [GeneratorState(**rec) for rec in records]
