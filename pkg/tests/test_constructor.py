import numpy as np
import pytest

from emu_roster import (
    AccumState,
    ConstructorState,
    InfeasibleError,
    ModelParams,
    TimetableInstance,
    TimetableWarning,
    Train,
    build_matrices,
    construct,
    construct_with_stats,
    generate_instance,
    step_candidates,
    validate,
)


def tricky_instance():
    """Continuing past the depot without maintenance strands the EMU at X.

    Pair 1 is short (500 km), pair 2 long (1700 km): after serving three
    trains the forced return leg overruns the mileage allowance, so any
    attempt that declines maintenance at the depot dead-ends.
    """
    trains = (
        Train(1, "C", 6 * 60, "X", 7 * 60, 500.0, 60),
        Train(2, "X", 7 * 60 + 30, "C", 8 * 60 + 30, 500.0, 60),
        Train(3, "C", 9 * 60, "X", 10 * 60, 1700.0, 60),
        Train(4, "X", 10 * 60 + 30, "C", 11 * 60 + 30, 1700.0, 60),
    )
    return TimetableInstance(
        trains=trains,
        stations=frozenset({"C", "X"}),
        maint_stations=frozenset({"C"}),
        params=ModelParams(),
    )


def test_two_train_unique_plan(two_train):
    m = build_matrices(two_train)
    for seed in range(10):
        plan = construct(two_train, m, np.random.default_rng(seed))
        assert plan.order == (1, 2)
        assert plan.maint_after == (0, 1)


def test_fig1_hundred_seeds_all_valid(fig1, fig1_matrices):
    for seed in range(100):
        plan = construct(fig1, fig1_matrices, np.random.default_rng(seed))
        assert validate(plan, fig1, fig1_matrices).ok


def test_same_seed_same_plan(fig1, fig1_matrices):
    a = construct(fig1, fig1_matrices, np.random.default_rng(123))
    b = construct(fig1, fig1_matrices, np.random.default_rng(123))
    assert a == b


def test_restarts_recover_from_dead_ends():
    inst = tricky_instance()
    m = build_matrices(inst)
    plan, failed = construct_with_stats(inst, m, np.random.default_rng(0))
    assert validate(plan, inst, m).ok
    # a maintenance cut must separate the two pairs
    assert plan.maint_after[1] == 1 or plan.maint_after[3] == 1


def test_never_maintaining_exhausts_restarts():
    inst = tricky_instance()
    m = build_matrices(inst)
    with pytest.raises(InfeasibleError, match="dead-ended"):
        construct(inst, m, np.random.default_rng(0), max_restarts=5, maint_prob=0.0)


def test_oversized_train_is_globally_infeasible():
    with pytest.warns(TimetableWarning):
        inst = TimetableInstance(
            trains=(
                Train(1, "C", 6 * 60, "X", 10 * 60, 4500.0, 240),
                Train(2, "X", 11 * 60, "C", 15 * 60, 4500.0, 240),
            ),
            stations=frozenset({"C", "X"}),
            maint_stations=frozenset({"C"}),
        )
    m = build_matrices(inst)
    with pytest.raises(InfeasibleError, match="alone exceeds"):
        construct(inst, m, np.random.default_rng(0))


def test_restart_rate_stays_low():
    # informative bound from the build contract: < 5 failed attempts per
    # success on synthetic paired instances
    total_failed = total_built = 0
    for seed in range(1, 26):
        inst = generate_instance(1 + seed % 4, 1 + seed % 2, seed=seed)
        m = build_matrices(inst)
        rng = np.random.default_rng(seed)
        for _ in range(10):
            _, failed = construct_with_stats(inst, m, rng)
            total_failed += failed
            total_built += 1
    assert total_failed / total_built < 5


def _state_at(fig1, prev_train_id, remaining, accum):
    depot = fig1.maint_stations
    return ConstructorState(
        remaining=set(remaining),
        depot_departures={j for j in remaining if fig1.train(j).dep_station in depot},
        position=fig1.n - len(remaining) + 1,
        accum=accum,
        partial=[prev_train_id],
        maint_flags=[0],
    )


def test_step_candidates_split(fig1, fig1_matrices):
    # at A after train 1; train 2 heads to B (turn-back), train 4 to C (depot)
    state = _state_at(fig1, 1, {2, 4}, AccumState(520.0, 125))
    away, to_depot = step_candidates(state, fig1, fig1_matrices)
    assert away == [2]
    assert to_depot == [4]


def test_step_candidates_mileage_filter(fig1, fig1_matrices):
    # near the allowance: 4100 + 280 > 4200 pushes train 2 out of the first set
    state = _state_at(fig1, 1, {2, 4}, AccumState(4100.0, 500))
    away, to_depot = step_candidates(state, fig1, fig1_matrices)
    assert away == []
    assert to_depot == [4]


def test_step_candidates_time_filter(fig1, fig1_matrices):
    # 2900 accumulated minutes + 35 connection + 100 travel > 3024
    state = _state_at(fig1, 1, {2, 4}, AccumState(520.0, 2900))
    away, to_depot = step_candidates(state, fig1, fig1_matrices)
    assert away == []
    assert to_depot == [4]


def test_step_candidates_nothing_connects(fig1, fig1_matrices):
    # train 5 departs C, not A: unreachable after train 1
    state = _state_at(fig1, 1, {5}, AccumState(520.0, 125))
    assert step_candidates(state, fig1, fig1_matrices) == ([], [])


def test_state_rejects_inconsistent_bookkeeping():
    with pytest.raises(ValueError, match="subset"):
        ConstructorState(
            remaining={2, 3},
            depot_departures={1},
            position=2,
            accum=AccumState(0.0, 0),
        )


def test_constructed_plans_cover_multiple_shapes(fig1, fig1_matrices):
    # the random strategy should produce varied rotation counts
    counts = set()
    rng = np.random.default_rng(7)
    for _ in range(60):
        plan = construct(fig1, fig1_matrices, rng)
        counts.add(plan.n_rotations)
    assert len(counts) >= 2


def test_scales_with_eager_maintenance():
    # the myopic depot coin needs a higher cut probability at size
    inst = generate_instance(50, 4, seed=1)
    m = build_matrices(inst)
    rng = np.random.default_rng(0)
    plan, failed = construct_with_stats(inst, m, rng, maint_prob=0.9)
    assert validate(plan, inst, m).ok
    assert failed < 20
