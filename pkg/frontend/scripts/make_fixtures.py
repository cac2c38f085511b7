"""Capture protocol fixtures from the engine for the client test suite.

Writes tests/fixtures/schema.json (the service's protocol descriptor)
and tests/fixtures/mirror_script.json (a scripted 20-action board
interaction with the engine's ack status and state hash after every
event). Re-run after any engine protocol change:

    python3 scripts/make_fixtures.py
"""

import json
from pathlib import Path

from cogmap import (
    configuration_hash,
    create_session,
    default_assessment_plan,
)
from cogmap.service import message_schema
from cogmap.session import Participant

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def scripted_actions():
    """20 actions: places, removes, a rotation pair, and rejections."""
    place = lambda b, c, r, o: {"action": "place", "building": b,
                                "col": c, "row": r, "orientation": o}
    remove = lambda b, c, r: {"action": "remove", "building": b,
                              "col": c, "row": r, "orientation": None}
    return [
        place("B01", 2, 2, 0),
        place("B02", 10, 4, 90),
        place("B03", 6, 3, 0),       # street cell -> rejected
        place("B03", 20, 12, 180),
        place("B04", 2, 2, 0),       # occupied slot -> rejected
        place("B04", 4, 10, 270),
        remove("B02", 10, 4),
        place("B02", 11, 4, 90),
        place("B01", 3, 3, 0),       # duplicate id -> rejected
        place("B05", 0, 0, 0),
        remove("B05", 0, 0),
        place("B05", 23, 15, 90),
        # rotation of B03 = remove+place pair at the same slot
        remove("B03", 20, 12),
        place("B03", 20, 12, 270),
        place("B06", 8, 8, 0),       # street cell (horizontal) -> rejected
        place("B06", 8, 9, 0),
        place("B07", 17, 10, 0),     # street cell (T stem) -> rejected
        place("B07", 18, 10, 0),
        remove("B08", 0, 0),         # not on board -> rejected
        place("B08", 13, 1, 180),
    ]


def main():
    FIXTURES.mkdir(parents=True, exist_ok=True)
    (FIXTURES / "schema.json").write_text(
        json.dumps(message_schema(), indent=2, sort_keys=True) + "\n"
    )

    plan = default_assessment_plan()
    now = [0]
    session = create_session(Participant("fixture", "young"), plan,
                             session_id="fixture", clock=lambda: now[0])
    session.begin_viewing()
    session.complete_tour()
    session.begin_construction()

    steps = []
    for action in scripted_actions():
        now[0] += 1000
        outcome = session.record_event(
            action=action["action"], building=action["building"],
            col=action["col"], row=action["row"],
            orientation=action["orientation"],
        )
        steps.append({
            "send": action,
            "ack": {
                "event_id": outcome.event.event_id,
                "status": outcome.status,
                "error": outcome.error_code,
                "state_hash": configuration_hash(
                    session.current_configuration()),
            },
        })
    assert len(steps) == 20
    (FIXTURES / "mirror_script.json").write_text(
        json.dumps({"steps": steps}, indent=2) + "\n"
    )
    print(f"wrote {FIXTURES}/schema.json and mirror_script.json")


if __name__ == "__main__":
    main()
