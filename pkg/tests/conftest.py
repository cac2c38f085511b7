import random

import pytest

from cogmap import (
    BUILDING_IDS,
    MapConfiguration,
    Participant,
    Placement,
    create_session,
    default_assessment_plan,
    default_geometry,
    default_params,
)


class ManualClock:
    """Deterministic engine clock for session tests, in milliseconds."""

    def __init__(self):
        self.now_ms = 0.0

    def advance(self, ms):
        self.now_ms += ms

    def __call__(self):
        return self.now_ms


@pytest.fixture
def geometry():
    return default_geometry()


@pytest.fixture
def params():
    return default_params()


@pytest.fixture
def plan():
    return default_assessment_plan()


@pytest.fixture
def clock():
    return ManualClock()


@pytest.fixture
def session(plan, clock):
    return create_session(Participant("p1", "young"), plan,
                          session_id="testsession", clock=clock)


def random_config(rng: random.Random, geometry, n, ids=BUILDING_IDS):
    """A valid random configuration of n buildings on free slots."""
    free = [
        (c, r)
        for c in range(geometry.columns)
        for r in range(geometry.rows)
        if (c, r) not in geometry.street_mask
    ]
    chosen_ids = rng.sample(ids, n)
    slots = rng.sample(free, n)
    return MapConfiguration.of(
        Placement(b, c, r, rng.choice((0, 90, 180, 270)))
        for b, (c, r) in zip(chosen_ids, slots)
    )


def drive_to_construction(session):
    session.begin_viewing()
    session.complete_tour()
    session.begin_construction()
