"""Scripted protocol client used by service and acceptance tests."""


class WsClient:
    """Wraps a test websocket with sequence numbering and kind filtering."""

    def __init__(self, ws):
        self.ws = ws
        self.seq = 0

    def send(self, kind, **payload):
        self.seq += 1
        self.ws.send_json({"kind": kind, "seq": self.seq, **payload})
        return self.seq

    def recv(self):
        return self.ws.receive_json()

    def recv_kind(self, kind, skip=True):
        """Receive until a message of the given kind arrives."""
        while True:
            msg = self.recv()
            if msg["kind"] == kind:
                return msg
            if not skip:
                raise AssertionError(f"expected {kind}, got {msg}")


class StepClock:
    """Monotone engine clock advancing a fixed step per reading."""

    def __init__(self, step_ms=250.0):
        self.now = 0.0
        self.step = step_ms

    def __call__(self):
        self.now += self.step
        return self.now


def join_both(client, token, participant="p1", group="young"):
    pws = client.websocket_connect(f"/ws?token={token}")
    aws = client.websocket_connect(f"/ws?token={token}")
    pws.__enter__()
    aws.__enter__()
    p, a = WsClient(pws), WsClient(aws)
    p.send("join", role="participant", participant=participant, group=group)
    p.recv_kind("joined")
    p.recv_kind("trial_start")
    a.send("join", role="assessor")
    a.recv_kind("joined")
    a.recv_kind("trial_start")
    return (pws, aws), (p, a)


def run_full_session(client, plan, token, participant="p1", group="young"):
    """Drive a complete session (all trials, perfect reconstructions)."""
    contexts, (p, a) = join_both(client, token, participant, group)
    try:
        for i, trial in enumerate(plan.trials):
            p.send("tour_ready")
            p.recv_kind("tour_data")
            p.send("tour_complete")
            p.recv_kind("phase")
            for placement in trial.target.placements:
                p.send("board_event", action="place",
                       building=placement.building, col=placement.col,
                       row=placement.row, orientation=placement.orientation)
                ack = p.recv_kind("event_ack")
                assert ack["status"] == "accepted", ack
            p.send("done")
            if trial.kind == "recorded":
                score = a.recv_kind("trial_score")
                assert score["report"]["similarity"] == 1.0
            if i + 1 < len(plan.trials):
                a.send("advance")
                p.recv_kind("trial_start")
                a.recv_kind("trial_start")
            else:
                p.recv_kind("session_complete")
                a.recv_kind("session_complete")
    finally:
        for ctx in contexts:
            ctx.__exit__(None, None, None)
