"""Devil policies: legality, budgets, replay determinism."""

import pytest

from adgame.devils import (AdversarialDevil, NoLegalReply, RandomDevil,
                           ReplayDevil, WallDevil, landing_options, make_devil)
from adgame.match import run_match
from adgame.measure import Measure
from adgame.moves import CATALOG, Direction, LocatedMove
from adgame.params import solve_params, toy_params
from adgame.rat import rat
from adgame.rules import (FAIL, SUCC, Configuration, History,
                          TimeBoundTracker, base_game,
                          default_configuration, devil_allowed, unit_witness)

PS = solve_params(rat(3, 4), 12)
G1 = base_game(PS)
N, E = Direction.NORTH, Direction.EAST


def play(devil, n=200):
    history = History(1, default_configuration(q=PS.q))
    tracker = TimeBoundTracker(1, PS)
    d = history.initial
    w = (0, 0)
    for i in range(n):
        mv = LocatedMove(w, G1.catalog.step(N))
        cfg = devil.respond(G1, history, mv, tracker)
        ok, why = devil_allowed(d, mv, cfg, G1, history, tracker)
        assert ok, (i, why)
        tracker.append(mv, d, cfg, witness=unit_witness(history, mv))
        history.append_move(mv)
        history.append_config(cfg)
        d = cfg
        w = (w[0], w[1] + 1)
    return history


def test_budget_accounting_random():
    h = play(RandomDevil(3))
    final = h.last_config()
    assert final.mu.total <= PS.sigma * final.t


def test_budget_accounting_wall():
    h = play(WallDevil(5))
    final = h.last_config()
    assert final.mu.total <= PS.sigma * final.t


def test_landing_options_prefer_failures_first():
    atk = LocatedMove((0, 0), G1.catalog.attack_new(N, E, -2))
    mu = Measure({(0, 2): rat(1)})  # obstacle colony bad
    opts = landing_options(G1, mu, atk)
    assert opts and opts[0][0] == FAIL
    assert opts[0][1] == (0, 1)  # the transit below the obstacle


def test_landing_options_success_only_when_good():
    atk = LocatedMove((0, 0), G1.catalog.attack_new(N, E, -2))
    opts = landing_options(G1, Measure(), atk)
    assert [v for v, _p in opts] == [SUCC]


def test_replay_devil_reproduces_and_rejects():
    rep = run_match(PS, make_devil("random", 9), 300)
    assert rep.survived
    from adgame.trace import parse_trace
    parsed = parse_trace(rep.trace, CATALOG)
    mu = Measure(q=PS.q)
    configs = []
    for idx, lm, t, p, j, deltas in parsed.units:
        mu = mu.deposit_many(deltas) if deltas else mu
        configs.append(Configuration(t, p, mu, j))
    devil = ReplayDevil(configs)
    h = play(devil, n=0)  # fresh empty history
    # replaying against the recorded moves reproduces configurations
    history = History(1, default_configuration(q=PS.q))
    tracker = TimeBoundTracker(1, PS)
    d = history.initial
    for idx, lm, t, p, j, deltas in parsed.units[:50]:
        cfg = devil.respond(G1, history, lm, tracker)
        assert cfg.p == p and cfg.t == t and cfg.j == j
        tracker.append(lm, d, cfg, witness=unit_witness(history, lm))
        history.append_move(lm)
        history.append_config(cfg)
        d = cfg
    # a tampered configuration is rejected loudly
    bad = Configuration(0, (5, 5), Measure(q=PS.q), SUCC)
    devil2 = ReplayDevil([bad])
    history2 = History(1, default_configuration(q=PS.q))
    with pytest.raises(NoLegalReply):
        devil2.respond(G1, history2, LocatedMove((0, 0), G1.catalog.step(N)),
                       None)


def test_wall_devil_beats_naive_walker_in_toy_mode():
    # classic blocking heuristic: with a huge toy budget the wall devil
    # corners a straight-line walker (recorded as a regression scenario,
    # not a theorem)
    ps = toy_params(q=8, kappa=3, sigma=rat(10))
    g = base_game(ps, toy=True)
    devil = WallDevil(0, distance=2, width=3)
    history = History(1, default_configuration(q=ps.q))
    tracker = TimeBoundTracker(1, ps)
    d = history.initial
    cornered = False
    for i in range(60):
        w = g.colony_units_of(d.p)
        mv = LocatedMove(w, g.catalog.step(N))
        from adgame.rules import angel_allowed
        ok, _ = angel_allowed(d, mv, g, prior=history)
        if not ok:
            cornered = True
            break
        try:
            cfg = devil.respond(g, history, mv, tracker)
        except NoLegalReply:
            cornered = True
            break
        tracker.append(mv, d, cfg, witness=unit_witness(history, mv))
        history.append_move(mv)
        history.append_config(cfg)
        d = cfg
    assert cornered
