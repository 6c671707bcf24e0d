"""Discrete particle swarm search over circulation cycles.

Each particle's position assigns a train id to every cycle position. The
classic inertia-weighted velocity/position update proposes a new assignment
per dimension; proposals are pushed through the constructive step logic,
which takes legal ones and repairs the rest, so every scored particle is a
structurally sound plan. Only the mileage allowance may be exceeded, and
such plans are scored with the overrun penalty.

Randomness is counter-based: a Philox block cipher keyed once from the
master seed, with the (iteration, particle) pair in the counter. Particle
evaluation order therefore cannot change any draw, and particles could be
evaluated concurrently without affecting results.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .connection import ConnectionMatrices, build_matrices
from .constructor import DeadEnd, build_cycle, construct_with_stats
from .plan import (
    CirculationPlan,
    _connection_total,
    decode_rotations,
    fitness_from_parts,
)
from .timetable import TimetableInstance

DEFAULT_SEED = 1


@dataclass(frozen=True)
class SwarmConfig:
    n_particles: int = 30
    k_max: int = 500
    w_max: float = 0.9
    w_min: float = 0.4
    c1: float = 2.0  # pull toward the swarm's global best
    c2: float = 2.0  # pull toward the particle's personal best
    v_min: float | None = None  # default -n/2, resolved against the instance
    v_max: float | None = None  # default +n/2
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.n_particles < 1 or self.k_max < 1:
            raise ValueError("need at least one particle and one iteration")
        if self.w_max < self.w_min:
            raise ValueError("w_max must be >= w_min")
        if self.v_min is not None and self.v_max is not None and self.v_min > self.v_max:
            raise ValueError("v_min must not exceed v_max")


def inertia_weight(k: int, cfg: SwarmConfig) -> float:
    """Linear decay from w_max at k=0 to w_min at k=k_max."""
    return cfg.w_max - (cfg.w_max - cfg.w_min) * k / cfg.k_max


def update_velocity(
    v: float,
    x: float,
    p_g_d: float,
    p_m_d: float,
    w: float,
    c1: float,
    c2: float,
    r1: float,
    r2: float,
    v_min: float,
    v_max: float,
) -> float:
    """Inertia-weighted velocity step, clamped to [v_min, v_max].

    c1 weighs the global best and c2 the personal best (with equal defaults
    the distinction is moot).
    """
    return min(max(w * v + c1 * r1 * (p_g_d - x) + c2 * r2 * (p_m_d - x), v_min), v_max)


def update_position(x: int, v_new: float, n: int) -> int:
    """Move by v_new, round half away from zero, clamp into [1, n]."""
    y = x + v_new
    rounded = math.floor(y + 0.5) if y >= 0 else math.ceil(y - 0.5)
    return min(max(rounded, 1), n)


def _philox_key(seed: int) -> np.ndarray:
    return np.random.SeedSequence(seed).generate_state(2, np.uint64)


def substream(key: np.ndarray, k: int, m: int) -> np.random.Generator:
    """Independent deterministic stream for iteration k, particle m."""
    counter = np.array([0, 0, m, k], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def decode(
    position,
    instance: TimetableInstance,
    matrices: ConnectionMatrices,
    rng: np.random.Generator,
    maint_prob: float = 0.5,
    max_restarts: int = 100,
) -> CirculationPlan:
    """Realize a position vector as a plan, repairing illegal entries.

    Falls back to a full fresh construction when the guided walk dead-ends.
    """
    plan, _ = _decode_counting(position, instance, matrices, rng, maint_prob, max_restarts)
    return plan


def _decode_counting(position, instance, matrices, rng, maint_prob, max_restarts):
    try:
        return (
            build_cycle(instance, matrices, rng, maint_prob, proposal=position, overrun_ok=True),
            0,
        )
    except DeadEnd:
        plan, failed = construct_with_stats(instance, matrices, rng, max_restarts, maint_prob)
        return plan, failed + 1


@dataclass(frozen=True)
class TracePoint:
    iteration: int
    global_best_fitness: float
    feasible_fraction: float


@dataclass(frozen=True)
class SolveResult:
    best_plan: CirculationPlan
    best_fitness: float  # equals the objective: the reported plan is feasible
    trace: tuple[TracePoint, ...]
    restarts: int
    wall_time: float


def solve(
    instance: TimetableInstance,
    matrices: ConnectionMatrices | None = None,
    cfg: SwarmConfig | None = None,
    maint_prob: float = 0.5,
    max_restarts: int = 100,
) -> SolveResult:
    """Full swarm run; returns the best fully feasible plan encountered.

    The swarm itself chases raw (penalized) fitness, so its global best may
    pass through mileage-overrun plans; the reported plan is always the best
    one with every rotation inside the allowance. The initial swarm comes
    from the random constructor, so at least one such plan always exists.
    """
    if matrices is None:
        matrices = build_matrices(instance)
    cfg = cfg or SwarmConfig()
    t0 = time.perf_counter()
    n = instance.n
    params = instance.params
    max_l = params.max_mileage
    v_max = cfg.v_max if cfg.v_max is not None else n / 2
    v_min = cfg.v_min if cfg.v_min is not None else -n / 2
    key = _philox_key(cfg.seed)
    restarts = 0

    def evaluate(plan: CirculationPlan) -> tuple[float, bool]:
        rotations = decode_rotations(plan, instance, matrices)
        fit = fitness_from_parts(_connection_total(plan, matrices), rotations, params)
        feasible = all(r.total_mileage <= max_l for r in rotations)
        return fit, feasible

    n_p = cfg.n_particles
    positions = np.zeros((n_p, n), dtype=np.int64)
    velocities = np.zeros((n_p, n), dtype=np.float64)
    pbest_pos = np.zeros((n_p, n), dtype=np.int64)
    pbest_fit = np.full(n_p, np.inf)
    pbest_plan: list[CirculationPlan | None] = [None] * n_p

    best_feasible_fit = np.inf
    best_feasible_plan: CirculationPlan | None = None
    feasible_now = 0

    for m in range(n_p):
        rng = substream(key, 0, m)
        plan, failed = construct_with_stats(instance, matrices, rng, max_restarts, maint_prob)
        restarts += failed
        fit, feasible = evaluate(plan)
        positions[m] = plan.order
        pbest_pos[m] = plan.order
        pbest_fit[m] = fit
        pbest_plan[m] = plan
        if feasible:
            feasible_now += 1
            if fit < best_feasible_fit:
                best_feasible_fit, best_feasible_plan = fit, plan

    g = int(np.argmin(pbest_fit))
    gbest_fit = float(pbest_fit[g])
    gbest_pos = pbest_pos[g].copy()
    trace = [TracePoint(0, gbest_fit, feasible_now / n_p)]

    for k in range(1, cfg.k_max + 1):
        w = inertia_weight(k, cfg)
        feasible_now = 0
        for m in range(n_p):
            rng = substream(key, k, m)
            r = rng.random(2 * n)
            vel = (
                w * velocities[m]
                + cfg.c1 * r[:n] * (gbest_pos - positions[m])
                + cfg.c2 * r[n:] * (pbest_pos[m] - positions[m])
            )
            np.clip(vel, v_min, v_max, out=vel)
            moved = positions[m] + vel
            proposed = np.where(moved >= 0, np.floor(moved + 0.5), np.ceil(moved - 0.5))
            proposed = np.clip(proposed, 1, n).astype(np.int64)

            plan, failed = _decode_counting(
                proposed, instance, matrices, rng, maint_prob, max_restarts
            )
            restarts += failed
            fit, feasible = evaluate(plan)
            positions[m] = plan.order  # repaired dimensions become the realized ids
            velocities[m] = vel
            if fit < pbest_fit[m]:
                pbest_fit[m] = fit
                pbest_pos[m] = plan.order
                pbest_plan[m] = plan
            if feasible:
                feasible_now += 1
                if fit < best_feasible_fit:
                    best_feasible_fit, best_feasible_plan = fit, plan

        g = int(np.argmin(pbest_fit))
        if float(pbest_fit[g]) < gbest_fit:
            gbest_fit = float(pbest_fit[g])
            gbest_pos = pbest_pos[g].copy()
        trace.append(TracePoint(k, gbest_fit, feasible_now / n_p))

    assert best_feasible_plan is not None  # initial swarm is feasible by construction
    return SolveResult(
        best_plan=best_feasible_plan,
        best_fitness=best_feasible_fit,
        trace=tuple(trace),
        restarts=restarts,
        wall_time=time.perf_counter() - t0,
    )
