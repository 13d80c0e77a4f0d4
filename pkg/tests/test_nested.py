"""The amplifier, the nested strategy evaluator and the plain strategy."""

from adgame.devils import make_devil
from adgame.match import run_match
from adgame.measure import Measure
from adgame.nested import AngelSession, build_amplifier
from adgame.params import solve_params
from adgame.rat import rat
from adgame.rules import (SUCC, Configuration, History, TimeBoundTracker,
                          angel_allowed, base_game, default_configuration,
                          devil_allowed, unit_witness)
from adgame.scaleup import k_start_star

PS = solve_params(rat(3, 4), 12)
Q = PS.q


def test_amplifier_depth_one_is_base_game():
    amp = build_amplifier(PS, 1)
    assert amp.depth == 1
    assert amp.games[0].b == 1 and amp.games[0].level == 1


def test_amplifier_scales_by_q():
    amp = build_amplifier(PS, 3)
    assert [g.b for g in amp.games] == [1, Q, Q * Q]


def test_level2_kstar_matches_starred_relation():
    from adgame.moves import Direction
    amp = build_amplifier(PS, 2)
    mu = Measure({(30, 60): rat(1, 3)}, q=Q)
    for p in [(50, 50), (5, Q - 1), (Q + 3, 2)]:
        for d in Direction:
            assert amp.games[1].k_start(mu, p, d) == \
                k_start_star(mu, p, d, amp.games[0])


def test_level2_kstar_zero_measure_interior():
    amp = build_amplifier(PS, 2)
    from adgame.moves import Direction
    assert amp.games[1].k_start(Measure(q=Q), (Q + 5, Q + 5), Direction.NORTH)


def test_first_call_emits_a_permitted_move():
    angel = AngelSession(PS)
    d0 = default_configuration(q=PS.q)
    mv = angel.move(d0)
    g1 = base_game(PS)
    ok, why = angel_allowed(d0, mv, g1)
    assert ok, why
    assert angel.stack_depth() <= 2


def test_stack_restarts_on_halt():
    angel = AngelSession(PS)
    g1 = base_game(PS)
    devil = make_devil("zero")
    tracker = TimeBoundTracker(1, PS)
    history = History(1, default_configuration(q=PS.q))
    d = history.initial
    seen_restart = False
    last_len = 0
    for i in range(250):
        mv = angel.move(d)
        cfg = devil.respond(g1, history, mv, tracker)
        tracker.append(mv, d, cfg, witness=unit_witness(history, mv))
        history.append_move(mv)
        history.append_config(cfg)
        d = cfg
        cur = len(angel.stack[0].moves)
        if cur < last_len:
            seen_restart = True
            assert cur == 1  # fresh level-1 history holds exactly one record
        last_len = cur
    assert seen_restart
    assert angel.big_moves_done >= 1


def test_eta_deterministic():
    def play(n):
        angel = AngelSession(PS)
        g1 = base_game(PS)
        devil = make_devil("random", 42)
        tracker = TimeBoundTracker(1, PS)
        history = History(1, default_configuration(q=PS.q))
        d = history.initial
        out = []
        for _ in range(n):
            mv = angel.move(d)
            out.append((mv.z.name, mv.w))
            cfg = devil.respond(g1, history, mv, tracker)
            tracker.append(mv, d, cfg, witness=unit_witness(history, mv))
            history.append_move(mv)
            history.append_config(cfg)
            d = cfg
        return out

    assert play(150) == play(150)


def test_stack_depth_grows_logarithmically():
    rep = run_match(PS, make_devil("zero"), 400)
    assert rep.survived
    assert rep.max_stack_depth <= 2 + 1  # well under log-scale growth
