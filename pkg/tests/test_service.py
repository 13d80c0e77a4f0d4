"""Session service: protocol flow, budget rejection, trace equivalence."""

import threading

import pytest

from adgame.devils import make_devil
from adgame.match import run_match, verify_trace
from adgame.params import solve_params, toy_params
from adgame.rat import rat
from adgame.service import SessionService, make_server

PS = solve_params(rat(3, 4), 12)
TOY = toy_params(q=8, kappa=3, sigma=rat(1, 4))


def fields(resp: str) -> dict:
    out = {}
    for line in resp.splitlines()[1:]:
        k, _, v = line.partition(" ")
        out.setdefault(k, []).append(v)
    return out


def test_create_session_initial_state():
    svc = SessionService(PS)
    code, resp = svc.handle("/create-session", "")
    assert code == 200 and resp.startswith("ok")
    f = fields(resp)
    assert f["angel"] == ["0,0"]
    assert f["mass"] == ["0/1"]
    assert "pending" in f


def test_two_sessions_independent():
    svc = SessionService(PS)
    _, r1 = svc.handle("/create-session", "")
    _, r2 = svc.handle("/create-session", "")
    assert fields(r1)["session"] != fields(r2)["session"]


def test_toy_watermark():
    svc = SessionService(TOY, toy=True)
    _, resp = svc.handle("/create-session", "")
    assert "watermark" in fields(resp)


def test_zero_deposit_turn_still_moves_angel():
    svc = SessionService(TOY, toy=True)
    _, resp = svc.handle("/create-session", "")
    sid = fields(resp)["session"][0]
    code, r = svc.handle("/devil-turn", f"session {sid}\ndt 1\n")
    assert code == 200
    assert fields(r)["angel"] != ["0,0"]


def test_over_budget_rejected_state_unchanged():
    svc = SessionService(TOY, toy=True)
    _, resp = svc.handle("/create-session", "")
    sid = fields(resp)["session"][0]
    before = svc.handle("/get-view", f"session {sid}\n")[1]
    code, r = svc.handle("/devil-turn", f"session {sid}\ndt 1\ndeposit 2,2 9/1\n")
    assert code == 400 and r.startswith("err")
    after = svc.handle("/get-view", f"session {sid}\n")[1]
    assert fields(before)["angel"] == fields(after)["angel"]
    assert fields(before)["t"] == fields(after)["t"]
    assert fields(before)["mass"] == fields(after)["mass"]


def test_unknown_session_protocol_error():
    svc = SessionService(TOY, toy=True)
    code, r = svc.handle("/get-view", "session nope\n")
    assert code == 400 and r.startswith("err")


def test_scripted_session_matches_harness_trace():
    # the same zero-deposit script through the service and through the
    # harness must export byte-identical traces
    svc = SessionService(PS)
    _, resp = svc.handle("/create-session", "")
    sid = fields(resp)["session"][0]
    turns = 40
    for _ in range(turns):
        code, r = svc.handle("/devil-turn", f"session {sid}\ndt 1\n")
        assert code == 200, r
    _, traced = svc.handle("/export-trace", f"session {sid}\n")
    lines = traced.splitlines()
    body = lines[lines.index("trace-begin") + 1:lines.index("trace-end")]
    # the harness' zero devil also advances dt=1 and never deposits
    rep = run_match(PS, make_devil("zero"), turns)
    harness_lines = rep.trace.splitlines()
    # compare everything up to the service's trailing un-answered angel line
    svc_units = [l for l in body if l.startswith(("a ", "d "))]
    har_units = [l for l in harness_lines if l.startswith(("a ", "d "))]
    assert svc_units[:2 * turns] == har_units[:2 * turns]


def test_service_view_flags_match_offline_predicates():
    from adgame.classify import is_clean, is_i_good, is_i_safe
    from adgame.grid import Run
    from adgame.measure import Measure
    svc = SessionService(TOY, toy=True)
    _, resp = svc.handle("/create-session", "")
    sid = fields(resp)["session"][0]
    svc.handle("/devil-turn", f"session {sid}\ndt 1\ndeposit 3,1 1/4\n")
    _, view = svc.handle("/get-view", f"session {sid}\nzoom 0\n")
    f = fields(view)
    cells = {}
    for item in f["cells"][0].split(";"):
        if item == "-":
            continue
        cell, val = item.split(":")
        x, y = map(int, cell.split(","))
        cells[(x, y)] = rat(val)
    m = Measure(cells)
    for item in f["flags"][0].split(";"):
        cell, tags = item.split(":")
        x, y = map(int, cell.split(","))
        run = Run((x, y), 1, 1, horizontal=True)
        assert ("good" in tags) == is_i_good(m, run, 0, TOY)
        assert ("safe" in tags) == is_i_safe(m, run, 0, TOY)
        assert ("clean" in tags) == is_clean(m, run, 0, TOY)


def test_http_transport():
    import urllib.request
    httpd, _svc = make_server(TOY, port=0, toy=True)
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    port = httpd.server_address[1]
    try:
        def post(path, body=""):
            req = urllib.request.Request(
                f"http://127.0.0.1:{port}{path}", data=body.encode(),
                method="POST")
            with urllib.request.urlopen(req) as fh:
                return fh.read().decode()

        resp = post("/create-session")
        sid = fields(resp)["session"][0]
        r = post("/devil-turn", f"session {sid}\ndt 1\ndeposit 1,1 1/8\n")
        assert r.startswith("ok")
        v = post("/get-view", f"session {sid}\n")
        assert "angel" in v
        t = post("/export-trace", f"session {sid}\n")
        assert "adgame-trace v1" in t
        c = post("/close-session", f"session {sid}\n")
        assert "closed" in c
    finally:
        httpd.shutdown()


def test_session_event_sourced_reconstruction():
    # the exported trace replays cleanly and re-emits byte-identically
    from adgame.match import verify_trace
    svc = SessionService(TOY, toy=True)
    _, resp = svc.handle("/create-session", "devil scripted\nseed 0\nhorizon 12\n")
    sid = fields(resp)["session"][0]
    for i in range(12):
        dep = f"\ndeposit {i % 5},{(i * 3) % 7} 1/16" if i % 2 else ""
        code, r = svc.handle("/devil-turn", f"session {sid}\ndt 1{dep}\n")
        assert code == 200, r
    _, traced = svc.handle("/export-trace", f"session {sid}\n")
    lines = traced.splitlines()
    text = "\n".join(lines[lines.index("trace-begin") + 1:
                           lines.index("trace-end")]) + "\n"
    v = verify_trace(text, toy=True)
    assert v.ok, v.violations
    assert v.replayed_trace == text
