import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))  # naive_oracle helper

from emu_roster import CirculationPlan, build_matrices, parse_timetable

DATA = pathlib.Path(__file__).parent / "data"

FIG1_ORDER = tuple(range(1, 13))
FIG1_MAINT = (0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1)


@pytest.fixture(scope="session")
def fig1_text():
    return (DATA / "fig1.timetable").read_text()


@pytest.fixture(scope="session")
def fig1(fig1_text):
    return parse_timetable(fig1_text)


@pytest.fixture(scope="session")
def fig1_matrices(fig1):
    return build_matrices(fig1)


@pytest.fixture(scope="session")
def fig1_plan():
    return CirculationPlan(order=FIG1_ORDER, maint_after=FIG1_MAINT)


def two_train_instance():
    """Smallest paired instance: one out-and-back pair through depot C."""
    from emu_roster import ModelParams, TimetableInstance, Train

    trains = (
        Train(1, "C", 8 * 60, "X", 10 * 60, 500.0, 120),
        Train(2, "X", 11 * 60, "C", 13 * 60, 500.0, 120),
    )
    return TimetableInstance(
        trains=trains,
        stations=frozenset({"C", "X"}),
        maint_stations=frozenset({"C"}),
        params=ModelParams(),
    )


@pytest.fixture()
def two_train():
    return two_train_instance()
