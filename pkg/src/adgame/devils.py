"""Devil opponents: legality-respecting adversaries.

The real devil is universally quantified; these policies exist to exercise
the engine.  Each returns, for an angel move, the next configuration
(clock advance, deposits, landing point, verdict), always within the
budget, clearance and time-bound rules.
"""

from __future__ import annotations

import random

from .grid import Cell
from .measure import Measure
from .moves import LocatedMove
from .rat import ZERO, rat
from .rules import (FAIL, SUCC, Configuration, GameSpec, History,
                    TimeBoundTracker, devil_allowed)


class NoLegalReply(Exception):
    """No devil configuration satisfies the rules (surfaced, not assumed)."""


def landing_options(g: GameSpec, mu: Measure, lm: LocatedMove):
    """Legal (verdict, point) landings under measure mu, failures first.

    Point enumeration assumes the base game (one point per colony); the
    engine only ever runs external devils there.
    """
    if g.b != 1:
        raise ValueError("landing enumeration is a base-game service")
    z = lm.z
    out = []
    if z.failable:
        bad_region_mass = ZERO
        for c in lm.offset_colonies(z.cond_attack_good):
            bad_region_mass += mu.get(c)
        if bad_region_mass >= g.b:
            for t in sorted(z.transits):
                p = (lm.w[0] + t[0], lm.w[1] + t[1])
                if g.k_fail(mu, p, lm):
                    out.append((FAIL, p))
    dest = lm.dest_colony()
    if g.k_start(mu, dest, z.land_dir):
        out.append((SUCC, dest))
    return out


class DevilPolicy:
    """Base: compute a legal reply; subclasses choose tactics."""

    name = "devil"

    def __init__(self, seed: int = 0):
        self.rng = random.Random(seed)
        self.seed = seed

    def respond(self, g: GameSpec, history: History, lm: LocatedMove,
                tracker: TimeBoundTracker | None = None) -> Configuration:
        prev = history.last_config()
        want_dt = self.want_dt(g, history, lm)
        if tracker is not None:
            from .rules import unit_witness
            probe = Configuration(prev.t, lm.dest_colony(), prev.mu, SUCC)
            cap = tracker.headroom(lm, prev, probe,
                                   witness=unit_witness(history, lm))
            if cap is not None:
                want_dt = min(want_dt, cap)
        ladder = [want_dt, max(0, want_dt - 2 * int(8 * g.b) - 8),
                  min(want_dt, 1), 0]
        seen_dt = set()
        for dt in ladder:
            if dt in seen_dt:
                continue
            seen_dt.add(dt)
            budget = g.ps.sigma * dt
            deposits = self.choose_deposits(g, history, lm, budget) if budget > 0 else []
            mu2 = prev.mu.deposit_many(deposits) if deposits else prev.mu
            options = landing_options(g, mu2, lm)
            if not options:
                continue
            verdict, p = self.choose_landing(options)
            cand = Configuration(prev.t + dt, p, mu2, verdict)
            ok, _why = devil_allowed(prev, lm, cand, g, history, tracker)
            if ok:
                return cand
        # final fallback: no deposit, no clock, any legal landing
        options = landing_options(g, prev.mu, lm)
        for verdict, p in options:
            cand = Configuration(prev.t, p, prev.mu, verdict)
            ok, _why = devil_allowed(prev, lm, cand, g, history, tracker)
            if ok:
                return cand
        raise NoLegalReply(f"no legal reply to {lm.z.name} at {lm.w}")

    # tactics ---------------------------------------------------------------

    def want_dt(self, g, history, lm) -> int:
        return 1

    def choose_deposits(self, g, history, lm, budget):
        return []

    def choose_landing(self, options):
        return options[0]


class RandomDevil(DevilPolicy):
    """Uniform deposits near the angel; uniform legal landing choice."""

    name = "random"

    def want_dt(self, g, history, lm):
        return self.rng.randint(1, 4)

    def choose_deposits(self, g, history, lm, budget):
        p = history.last_config().p
        span = 3 * g.ps.q
        k = self.rng.randint(1, 3)
        cells = []
        for _ in range(k):
            cells.append((p[0] + self.rng.randint(-span, span),
                          p[1] + self.rng.randint(-span, span)))
        cuts = sorted(self.rng.randint(0, 10 ** 6) for _ in range(k - 1))
        parts = []
        prev = 0
        for c in cuts + [10 ** 6]:
            parts.append(c - prev)
            prev = c
        total = sum(parts)
        return [(cell, budget * rat(part, total))
                for cell, part in zip(cells, parts) if part]

    def choose_landing(self, options):
        return self.rng.choice(options)


class WallDevil(DevilPolicy):
    """Concentrates the budget on an arc ahead of the angel's heading."""

    name = "wall"

    def __init__(self, seed: int = 0, distance: int = 4, width: int = 5):
        super().__init__(seed)
        self.distance = distance
        self.width = width
        self._last_p: Cell | None = None
        self._heading: Cell = (0, 1)

    def want_dt(self, g, history, lm):
        return 4

    def choose_deposits(self, g, history, lm, budget):
        p = history.last_config().p
        if self._last_p is not None:
            dx = p[0] - self._last_p[0]
            dy = p[1] - self._last_p[1]
            if (dx, dy) != (0, 0):
                if abs(dx) >= abs(dy):
                    self._heading = (1 if dx > 0 else -1, 0)
                else:
                    self._heading = (0, 1 if dy > 0 else -1)
        self._last_p = p
        hx, hy = self._heading
        cx, cy = p[0] + hx * self.distance, p[1] + hy * self.distance
        half = self.width // 2
        arc = [(cx - hy * k, cy - hx * k) for k in range(-half, half + 1)]
        share = budget / len(arc)
        return [(cell, share) for cell in arc]

    def choose_landing(self, options):
        return options[0]  # failures first: always obstruct


class AdversarialDevil(DevilPolicy):
    """Fuzzing opponent: spends the full clock headroom, drops its budget
    on the cells straight ahead of the angel, and prefers failure."""

    name = "adversarial"

    def want_dt(self, g, history, lm):
        return 10 ** 9

    def choose_deposits(self, g, history, lm, budget):
        z = lm.z
        if z.failable:
            # try to tip the attack's body over the badness threshold
            region = lm.offset_colonies(z.cond_attack_good)
            mu = history.last_config().mu
            gap = g.b - sum((mu.get(c) for c in region), ZERO)
            if 0 < gap <= budget:
                ob = (lm.w[0] + z.obstacle[0], lm.w[1] + z.obstacle[1])
                rest = budget - gap
                out = [(ob, gap)]
                if rest > 0:
                    out.append(((ob[0], ob[1] + 1), rest))
                return out
        p = history.last_config().p
        vx, vy = z.land_dir.vec
        k = self.rng.randint(1, 3)
        out = []
        share = budget / k
        for i in range(1, k + 1):
            out.append(((p[0] + vx * i, p[1] + vy * i), share))
        return out

    def choose_landing(self, options):
        fails = [o for o in options if o[0] == FAIL]
        if fails:
            return self.rng.choice(fails)
        return self.rng.choice(options)


class ReplayDevil(DevilPolicy):
    """Re-emits recorded configurations, failing loudly on illegality."""

    name = "replay"

    def __init__(self, configs):
        super().__init__(0)
        self.queue = list(configs)
        self.at = 0

    def respond(self, g, history, lm, tracker=None):
        if self.at >= len(self.queue):
            raise NoLegalReply("replay exhausted")
        cand = self.queue[self.at]
        prev = history.last_config()
        ok, why = devil_allowed(prev, lm, cand, g, history, tracker)
        if not ok:
            raise NoLegalReply(f"replayed configuration {self.at} illegal: {why}")
        self.at += 1
        return cand


class ScriptedDevil(DevilPolicy):
    """Plays a fixed script of turns: dt, deposits and a verdict each.

    Script entries are dicts {"dt": int, "deposits": [[x, y, "num/den"],...],
    "verdict": "succ"|"fail"}; shorter scripts repeat their last entry.
    """

    name = "scripted"

    def __init__(self, script: list[dict], seed: int = 0):
        super().__init__(seed)
        self.script = script
        self.at = 0

    def respond(self, g, history, lm, tracker=None):
        entry = self.script[min(self.at, len(self.script) - 1)] \
            if self.script else {}
        self.at += 1
        dt = int(entry.get("dt", 1))
        deposits = [((int(x), int(y)), rat(a))
                    for x, y, a in entry.get("deposits", [])]
        prev = history.last_config()
        mu2 = prev.mu.deposit_many(deposits) if deposits else prev.mu
        verdict = entry.get("verdict", SUCC)
        options = landing_options(g, mu2, lm)
        chosen = next((o for o in options if o[0] == verdict), None) or \
            (options[0] if options else None)
        if chosen is None:
            raise NoLegalReply(f"scripted turn {self.at}: no legal landing")
        cand = Configuration(prev.t + dt, chosen[1], mu2, chosen[0])
        ok, why = devil_allowed(prev, lm, cand, g, history, tracker)
        if not ok:
            raise NoLegalReply(f"scripted turn {self.at} illegal: {why}")
        return cand


def make_devil(name: str, seed: int = 0) -> DevilPolicy:
    if name == "random":
        return RandomDevil(seed)
    if name == "wall":
        return WallDevil(seed)
    if name == "adversarial":
        return AdversarialDevil(seed)
    if name == "zero":
        return DevilPolicy(seed)
    raise ValueError(f"unknown devil {name!r}")
