"""Timetabled trains, model parameters, and the timetable file format.

A timetable instance is the full input of the planner: the train list, the
station universe, the single depot-adjacent station where maintenance can be
performed, and the numeric model parameters (cycle limits, overrun tolerance,
objective weights).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

MINUTES_PER_DAY = 1440


class TimetableError(ValueError):
    """Invalid timetable content. Carries the offending line when known."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        if line is not None:
            place = f"line {line}" + (f", col {col}" if col is not None else "")
            message = f"{place}: {message}"
        super().__init__(message)


class TimetableWarning(UserWarning):
    """Suspicious but tolerated timetable content."""


@dataclass(frozen=True)
class ModelParams:
    """Numeric knobs of the circulation model.

    l_cycle / t_cycle are the maintenance cycle limits (km / minutes);
    lam is the tolerated overrun fraction on both; t_connect the minimum
    turnaround; omega1 weighs total connection time, omega2 the per-rotation
    mileage slack; beta multiplies mileage overrun in the penalized fitness.
    l_cycle=4000 km and t_cycle=2880 min are the routine-inspection limits
    for Chinese high-speed EMUs; the remaining defaults are ours.
    """

    l_cycle: float = 4000.0
    t_cycle: float = 2880.0
    lam: float = 0.05
    t_connect: int = 20
    omega1: float = 1.0
    omega2: float = 0.01
    beta: float = 10.0

    def __post_init__(self):
        if self.l_cycle <= 0 or self.t_cycle <= 0:
            raise TimetableError("cycle limits must be positive")
        if self.t_connect <= 0:
            raise TimetableError("t_connect must be a positive number of minutes")
        if not 0.0 <= self.lam <= 0.10:
            raise TimetableError("lambda must lie in [0, 0.10]")
        if self.omega1 < 0 or self.omega2 < 0:
            raise TimetableError("objective weights must be non-negative")
        if self.beta <= 1.0:
            raise TimetableError("beta must exceed 1")

    @property
    def max_mileage(self) -> float:
        return (1.0 + self.lam) * self.l_cycle

    @property
    def max_time(self) -> float:
        return (1.0 + self.lam) * self.t_cycle


# file keys, in render order; "lambda" is the file spelling of ModelParams.lam
PARAM_KEYS = ("l_cycle", "t_cycle", "lambda", "t_connect", "omega1", "omega2", "beta")


@dataclass(frozen=True)
class Train:
    """One timetabled service: where and when it runs, and what it costs.

    Times are integer minutes since the start of the service day; a train
    never spans midnight, so arr_time > dep_time always. travel_time is an
    independent field (running time), normally equal to arr_time - dep_time.
    """

    id: int
    dep_station: str
    dep_time: int
    arr_station: str
    arr_time: int
    mileage: float
    travel_time: int

    def __post_init__(self):
        if self.id < 1:
            raise TimetableError(f"train id must be >= 1, got {self.id}")
        if self.dep_station == self.arr_station:
            raise TimetableError(f"train {self.id}: departure and arrival station are equal")
        for name, t in (("dep_time", self.dep_time), ("arr_time", self.arr_time)):
            if not 0 <= t < MINUTES_PER_DAY:
                raise TimetableError(f"train {self.id}: {name} {t} outside [0, {MINUTES_PER_DAY})")
        if self.arr_time <= self.dep_time:
            raise TimetableError(f"train {self.id}: arrives at or before departure (spans midnight?)")
        if self.mileage <= 0:
            raise TimetableError(f"train {self.id}: mileage must be positive")
        if self.travel_time <= 0:
            raise TimetableError(f"train {self.id}: travel_time must be positive")


@dataclass(frozen=True)
class TimetableInstance:
    """A validated daily timetable: trains, stations, depot station, params.

    trains are sorted by id and ids form exactly 1..n, so the train with id
    k sits at trains[k-1]; matrix code indexes rows/columns the same way.
    """

    trains: tuple[Train, ...]
    stations: frozenset[str]
    maint_stations: frozenset[str]
    params: ModelParams = field(default_factory=ModelParams)

    def __post_init__(self):
        check_instance(self.trains, self.stations, self.maint_stations, self.params)

    @property
    def n(self) -> int:
        return len(self.trains)

    def train(self, train_id: int) -> Train:
        return self.trains[train_id - 1]

    @property
    def maint_station(self) -> str:
        return next(iter(self.maint_stations))

    @property
    def total_mileage(self) -> float:
        return sum(t.mileage for t in self.trains)

    def with_params(self, **overrides) -> "TimetableInstance":
        return replace(self, params=replace(self.params, **overrides))


def check_instance(trains, stations, maint_stations, params) -> None:
    """Enforce instance-level invariants; warn on tolerated oddities."""
    if not trains:
        raise TimetableError("no trains")
    ids = [t.id for t in trains]
    if sorted(ids) != list(range(1, len(trains) + 1)):
        dup = sorted({i for i in ids if ids.count(i) > 1})
        if dup:
            raise TimetableError(f"duplicate train id(s): {dup}")
        raise TimetableError(f"train ids must form 1..{len(trains)}, got {sorted(ids)}")
    if list(ids) != sorted(ids):
        raise TimetableError("trains must be ordered by id")

    for t in trains:
        if t.dep_station not in stations or t.arr_station not in stations:
            raise TimetableError(f"train {t.id} uses a station outside the station set")
    if len(maint_stations) != 1:
        raise TimetableError(f"exactly one maintenance station required, got {len(maint_stations)}")
    if not maint_stations <= stations:
        raise TimetableError(f"unknown station in maint_stations: {sorted(maint_stations - stations)}")

    # a single closed loop with no empty runs needs per-station flow balance
    arr_counts: dict[str, int] = {}
    dep_counts: dict[str, int] = {}
    for t in trains:
        arr_counts[t.arr_station] = arr_counts.get(t.arr_station, 0) + 1
        dep_counts[t.dep_station] = dep_counts.get(t.dep_station, 0) + 1
    for s in sorted(stations):
        a, d = arr_counts.get(s, 0), dep_counts.get(s, 0)
        if a != d:
            raise TimetableError(f"flow imbalance at station {s}: {a} arrivals vs {d} departures")

    for t in trains:
        if t.travel_time != (t.arr_time - t.dep_time) % MINUTES_PER_DAY:
            warnings.warn(
                f"train {t.id}: travel_time {t.travel_time} differs from timetable span "
                f"{(t.arr_time - t.dep_time) % MINUTES_PER_DAY}",
                TimetableWarning,
                stacklevel=2,
            )
        if t.mileage > params.max_mileage:
            warnings.warn(
                f"train {t.id}: mileage {t.mileage} alone exceeds the cycle allowance "
                f"{params.max_mileage:.1f} km; no feasible plan exists",
                TimetableWarning,
                stacklevel=2,
            )
        if t.travel_time > params.max_time:
            warnings.warn(
                f"train {t.id}: travel_time {t.travel_time} alone exceeds the cycle allowance "
                f"{params.max_time:.0f} min; no feasible plan exists",
                TimetableWarning,
                stacklevel=2,
            )


def _parse_hhmm(token: str, lineno: int, col: int) -> int:
    parts = token.split(":")
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise TimetableError(f"expected HH:MM, got {token!r}", lineno, col)
    h, m = int(parts[0]), int(parts[1])
    if h > 23 or m > 59:
        raise TimetableError(f"clock time out of range: {token!r}", lineno, col)
    return 60 * h + m


def _fmt_hhmm(minutes: int) -> str:
    return f"{minutes // 60:02d}:{minutes % 60:02d}"


def parse_timetable(text: str) -> TimetableInstance:
    """Parse timetable file content into a validated instance.

    Format (UTF-8, line oriented, '#' comments):
        param <name> <value>      one line per model parameter (optional)
        maint_station <id>        required, exactly once
        train <id> <dep> <HH:MM> <arr> <HH:MM> <mileage_km> <travel_min>

    Raises TimetableError with line/column info on malformed input, and on
    any instance-invariant violation (duplicate ids, flow imbalance, ...).
    """
    params_seen: dict[str, float] = {}
    maint: list[str] = []
    trains: list[Train] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = line.split()
        if not tokens:
            continue
        cols = [line.index(tok) + 1 for tok in tokens]  # approximate, first occurrence
        kind = tokens[0]
        if kind == "param":
            if len(tokens) != 3:
                raise TimetableError("param lines take exactly a name and a value", lineno, cols[0])
            name = tokens[1]
            if name not in PARAM_KEYS:
                raise TimetableError(f"unknown parameter {name!r}", lineno, cols[1])
            try:
                params_seen[name] = float(tokens[2])
            except ValueError:
                raise TimetableError(f"bad numeric value {tokens[2]!r}", lineno, cols[2]) from None
        elif kind == "maint_station":
            if len(tokens) != 2:
                raise TimetableError("maint_station takes exactly one station id", lineno, cols[0])
            maint.append(tokens[1])
        elif kind == "train":
            if len(tokens) != 8:
                raise TimetableError(
                    f"train lines take 7 fields, got {len(tokens) - 1}", lineno, cols[0]
                )
            try:
                tid = int(tokens[1])
            except ValueError:
                raise TimetableError(f"bad train id {tokens[1]!r}", lineno, cols[1]) from None
            dep_t = _parse_hhmm(tokens[3], lineno, cols[3])
            arr_t = _parse_hhmm(tokens[5], lineno, cols[5])
            try:
                mileage = float(tokens[6])
                travel = int(tokens[7])
            except ValueError:
                raise TimetableError("bad mileage or travel time", lineno, cols[6]) from None
            try:
                trains.append(
                    Train(tid, tokens[2], dep_t, tokens[4], arr_t, mileage, travel)
                )
            except TimetableError as exc:
                raise TimetableError(str(exc), lineno, cols[0]) from None
        else:
            raise TimetableError(f"unknown directive {kind!r}", lineno, cols[0])

    if not trains:
        raise TimetableError("no trains")
    if len(maint) != 1:
        raise TimetableError(f"exactly one maint_station line required, got {len(maint)}")

    kwargs = {("lam" if k == "lambda" else k): v for k, v in params_seen.items()}
    if "t_connect" in kwargs:
        if kwargs["t_connect"] != int(kwargs["t_connect"]):
            raise TimetableError("t_connect must be an integer number of minutes")
        kwargs["t_connect"] = int(kwargs["t_connect"])
    params = ModelParams(**kwargs)

    trains.sort(key=lambda t: t.id)
    stations = {t.dep_station for t in trains} | {t.arr_station for t in trains}
    if maint[0] not in stations:
        raise TimetableError(f"unknown station in maint_stations: {maint[0]!r}")
    return TimetableInstance(
        trains=tuple(trains),
        stations=frozenset(stations),
        maint_stations=frozenset(maint),
        params=params,
    )


def render_timetable(instance: TimetableInstance) -> str:
    """Render an instance to its file form. Byte-stable: parse(render(x)) == x."""
    p = instance.params
    values = {
        "l_cycle": repr(p.l_cycle),
        "t_cycle": repr(p.t_cycle),
        "lambda": repr(p.lam),
        "t_connect": str(p.t_connect),
        "omega1": repr(p.omega1),
        "omega2": repr(p.omega2),
        "beta": repr(p.beta),
    }
    lines = [f"param {key} {values[key]}" for key in PARAM_KEYS]
    lines.append(f"maint_station {instance.maint_station}")
    for t in instance.trains:  # already sorted by id
        lines.append(
            f"train {t.id} {t.dep_station} {_fmt_hhmm(t.dep_time)} "
            f"{t.arr_station} {_fmt_hhmm(t.arr_time)} {t.mileage:.1f} {t.travel_time}"
        )
    return "\n".join(lines) + "\n"


def generate_instance(
    n_pairs: int,
    n_turnback_stations: int,
    seed: int,
    params: ModelParams | None = None,
) -> TimetableInstance:
    """Build a synthetic paired timetable: n_pairs out-and-back train pairs.

    Every pair runs depot -> turnback -> depot with a common mileage, which
    guarantees flow balance and at least one feasible circulation (maintain
    after every return trip). The return leg departs 20..180 minutes after
    the outbound arrival, as real turn-backs do; both legs stay inside one
    service day. Mileages fall in [100, 1200] km, rounded to 0.1 km so
    rendering round-trips exactly. Deterministic in seed.
    """
    if n_pairs < 1:
        raise ValueError("n_pairs must be >= 1")
    if n_turnback_stations < 1:
        raise ValueError("n_turnback_stations must be >= 1")
    rng = np.random.default_rng(seed)
    depot = "C"
    turnbacks = [f"T{i}" for i in range(1, n_turnback_stations + 1)]

    trains: list[Train] = []
    next_id = 1
    for _ in range(n_pairs):
        station = turnbacks[int(rng.integers(0, n_turnback_stations))]
        mileage = round(float(rng.uniform(100.0, 1200.0)), 1)
        speed = float(rng.uniform(2.5, 5.0))  # km per minute
        travel = max(20, int(round(mileage / speed)))
        turnaround = int(rng.integers(20, 181))
        out_dep = int(rng.integers(0, MINUTES_PER_DAY - 2 * travel - turnaround - 1))
        out = Train(next_id, depot, out_dep, station, out_dep + travel, mileage, travel)
        back_dep = out.arr_time + turnaround
        back = Train(next_id + 1, station, back_dep, depot, back_dep + travel, mileage, travel)
        trains.extend([out, back])
        next_id += 2

    stations = {depot} | {t.dep_station for t in trains} | {t.arr_station for t in trains}
    return TimetableInstance(
        trains=tuple(trains),
        stations=frozenset(stations),
        maint_stations=frozenset({depot}),
        params=params or ModelParams(),
    )
