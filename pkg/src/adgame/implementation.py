"""The implementation map: translating one big move into small moves.

Every local strategy works in canonical coordinates (the big move lands
northward passing east; turns start north landing east) behind a Frame.
Routing decisions are made against the measure at big-move start and every
emitted small move is re-validated against the live measure; a failed
re-validation of a step, jump or turn is a contract violation under valid
parameters, while attacks becoming disallowed is part of the game and is
handled by the sweep's evasion and retreat branches.
"""

from __future__ import annotations

from dataclasses import dataclass

from .classify import (safe_threshold, walk_over_weights, weights_clean,
                       weights_obstacle)
from .grid import Cell, colony_units
from .measure import Measure
from .moves import Direction, Kind, LocatedMove, MoveSpec
from .params import ParamSet
from .rat import ZERO, Rat
from .rules import (FAIL, SUCC, Configuration, GameSpec, History,
                    angel_allowed, geometric_cost)
from .scaleup import CanonView, ChargeLedger, Frame, orientation_sym

N, S, E, W = Direction.NORTH, Direction.SOUTH, Direction.EAST, Direction.WEST


class ContractViolation(Exception):
    """A situation the construction's lemmas forbid under valid parameters."""

    def __init__(self, lemma: str, details: str = ""):
        self.lemma = lemma
        self.details = details
        super().__init__(f"[{lemma}] {details}")


class Halt(Exception):
    """Internal control flow: the local strategy is done."""

    def __init__(self, verdict: str):
        self.verdict = verdict


@dataclass
class BigMoveContext:
    """Everything a local strategy resolves before moving."""

    big_cfg: Configuration
    big_move: LocatedMove
    mu0: Measure
    frame: Frame
    case: str = "undecided"


def _canonical_spec(z: MoveSpec, catalog) -> MoveSpec:
    """The northward/pass-east (turns: north-start, east-land) prototype."""
    k = z.kind
    if k is Kind.STEP:
        return catalog.step(N)
    if k is Kind.JUMP:
        return catalog.jump(N)
    if k is Kind.ESCAPE:
        return catalog.escape(N, E)
    if k is Kind.FINISH:
        return catalog.finish(N, z.finish_len)
    if k is Kind.ATTACK_NEW:
        return catalog.attack_new(N, E, z.level)
    if k is Kind.ATTACK_CONT:
        return catalog.attack_cont(N, E, z.level)
    if z.turn_second is Kind.JUMP:
        return catalog.turn_jump(N, E)
    return catalog.turn_attack(N, E, z.level)


def frame_for(big_move: LocatedMove, b: int, q: int) -> Frame:
    """Frame mapping the canonical prototype onto the located big move."""
    z = big_move.z
    if z.kind is Kind.TURN:
        sym = orientation_sym(z.start_dir, z.land_dir)
    elif z.kind is Kind.FINISH:
        # A finish retreats along the failed attack's axis: canonicalize the
        # opposite of its direction to north so the strategy walks south.
        sym = orientation_sym(z.land_dir.opposite, None)
    elif z.pass_dir is None:
        sym = orientation_sym(z.land_dir, None)
    else:
        sym = orientation_sym(z.land_dir, z.pass_dir)
    return Frame.for_orientation(sym, big_move.w, (0, 0), b, q)


class LocalStrategy:
    """Base driver: a generator of intents, validated and located on emit."""

    def __init__(self, g: GameSpec, big_cfg: Configuration,
                 big_move: LocatedMove, chi: History):
        self.g = g
        self.ps = g.ps
        self.b = g.b
        self.q = g.ps.q
        self.big_move = big_move
        self.big_cfg = big_cfg
        self.frame = frame_for(big_move, self.b, self.q)
        self.mu0 = chi.initial.mu
        self.view0 = CanonView(self.mu0, self.frame, self.ps)
        self.ledger = ChargeLedger(self.frame)
        self.chi = chi
        self.count = 0
        self.verdict: str | None = None
        self.halted = False
        self._gen = None
        self._big_body_bigs = set(big_move.body_colonies())
        self._segments: list[tuple] = []   # (entry, lo_unit, hi_unit or None, extra_flat)
        self._pending_intent = None
        # canonical cells the plans must route around (a turn's second part
        # avoids the first part's path)
        self.avoid: set[Cell] = set()

    # -- canonical measure helpers (mu0 for planning, live for gating) -----

    def cur(self) -> Cell:
        return self.frame.canon_cell(colony_units(self.b, self.chi.last_config().p))

    def live_view(self) -> CanonView:
        return CanonView(self.chi.last_config().mu, self.frame, self.ps)

    def w0(self, c: Cell) -> Rat:
        return self.view0.weight(c)

    def col_weights0(self, x, y_lo, y_hi):
        return self.view0.col_weights(x, y_lo, y_hi)

    def row_weights0(self, y, x_lo, x_hi):
        return self.view0.row_weights(y, x_lo, x_hi)

    def clean_col0(self, x, y_lo, y_hi, i=0) -> bool:
        return self.view0.col_clean(x, y_lo, y_hi - y_lo + 1, i)

    def clean_row0(self, y, x_lo, x_hi, i=0) -> bool:
        return self.view0.row_clean(y, x_lo, x_hi - x_lo + 1, i)

    def safe_pair0(self, c1: Cell, c2: Cell) -> bool:
        return self.w0(c1) + self.w0(c2) < safe_threshold(self.b, 0, self.ps)

    def securely_reachable0(self, c: Cell, row_y: int) -> bool:
        """Row row_y reachable from cell c below it (canonical, at mu0)."""
        if row_y <= c[1]:
            return False
        ws = self.col_weights0(c[0], c[1], row_y)
        below = ws[:-1]
        if len(below) > 1 and not weights_clean(below, self.b, 0, self.ps):
            return False
        return ws[-2] + ws[-1] < safe_threshold(self.b, 0, self.ps)

    # -- planning helpers ----------------------------------------------------

    def _avoid_blocks(self, cells, start: Cell) -> bool:
        if not self.avoid:
            return False
        return any(c in self.avoid and c != start for c in cells)

    def plan_walk_col(self, x, y_from, y_to, relax_start=True):
        """Step/jump intents up (or down) column x; None when impossible."""
        if y_from == y_to:
            return []
        lo, hi = min(y_from, y_to), max(y_from, y_to)
        if self._avoid_blocks(((x, y) for y in range(lo, hi + 1)), (x, y_from)):
            return None
        ws = self.col_weights0(x, lo, hi)
        walk = walk_over_weights(ws, y_from - lo + 1, y_to - lo + 1, self.b,
                                 self.ps, relax_start=relax_start)
        if walk is None:
            return None
        d = N if y_to > y_from else S
        out = []
        for a, bnxt in zip(walk, walk[1:]):
            out.append(("step" if abs(bnxt - a) == 1 else "jump", d))
        return out

    def plan_walk_row(self, y, x_from, x_to, relax_start=True):
        if x_from == x_to:
            return []
        lo, hi = min(x_from, x_to), max(x_from, x_to)
        if self._avoid_blocks(((x, y) for x in range(lo, hi + 1)), (x_from, y)):
            return None
        ws = self.row_weights0(y, lo, hi)
        walk = walk_over_weights(ws, x_from - lo + 1, x_to - lo + 1, self.b,
                                 self.ps, relax_start=relax_start)
        if walk is None:
            return None
        d = E if x_to > x_from else W
        out = []
        for a, bnxt in zip(walk, walk[1:]):
            out.append(("step" if abs(bnxt - a) == 1 else "jump", d))
        return out

    def plan_route(self, waypoints, relax_start=True):
        """Straight legs between consecutive waypoints, corner-fused.

        Each consecutive pair must share a coordinate; None when any leg
        has no walk.
        """
        legs = []
        cur = waypoints[0]
        first = True
        for nxt in waypoints[1:]:
            if cur == nxt:
                continue
            if cur[0] == nxt[0]:
                leg = self.plan_walk_col(cur[0], cur[1], nxt[1],
                                         relax_start=relax_start and first)
            elif cur[1] == nxt[1]:
                leg = self.plan_walk_row(cur[1], cur[0], nxt[0],
                                         relax_start=relax_start and first)
            else:
                raise ValueError(f"waypoints {cur}->{nxt} not axis-aligned")
            if leg is None:
                return None
            legs.append(leg)
            cur = nxt
            first = False
        return self.fuse_corners(legs)

    @staticmethod
    def fuse_corners(legs):
        """Merge a leg-final step with a following perpendicular jump."""
        out = []
        for leg in legs:
            if leg is None:
                return None
            for intent in leg:
                if (out and intent[0] == "jump" and out[-1][0] == "step"
                        and out[-1][1] is not intent[1]
                        and out[-1][1] is not intent[1].opposite):
                    start_d = out[-1][1]
                    out[-1] = ("turn_jump", start_d, intent[1])
                else:
                    out.append(intent)
        return out

    # -- driving ---------------------------------------------------------------

    def _intent_to_move(self, intent) -> LocatedMove:
        cat = self.g.catalog
        kind = intent[0]
        if kind == "step":
            spec = cat.step(intent[1])
        elif kind == "jump":
            spec = cat.jump(intent[1])
        elif kind == "turn_jump":
            spec = cat.turn_jump(intent[1], intent[2])
        elif kind == "turn_attack":
            spec = cat.turn_attack(intent[1], intent[2], intent[3])
        elif kind == "escape":
            spec = cat.escape(intent[1], intent[2])
        elif kind == "finish":
            spec = cat.finish(intent[1], intent[2])
        elif kind == "attack_new":
            spec = cat.attack_new(intent[1], intent[2], intent[3])
        elif kind == "attack_cont":
            spec = cat.attack_cont(intent[1], intent[2], intent[3])
        else:  # pragma: no cover
            raise ValueError(f"unknown intent {intent}")
        return self.frame.world_move(self.cur(), spec, cat)

    def allowed_now(self, intent) -> tuple[bool, str]:
        lm = self._intent_to_move(intent)
        return angel_allowed(self.chi.last_config(), lm, self.g, prior=self.chi)

    def intent_hits_avoid(self, intent) -> bool:
        """Whether the intent's body would touch the avoided cells."""
        if not self.avoid:
            return False
        cur = self.cur()
        lm = self._intent_to_move(intent)
        for wc in lm.body_colonies():
            c = self.frame.canon_cell(wc)
            if c in self.avoid and c != cur:
                return True
        return False

    def next_move(self, chi: History):
        """The next small move for the current history, or None to halt."""
        self.chi = chi
        if self.halted:
            return None
        try:
            if self._gen is None:
                self._gen = self._run()
                intent = next(self._gen)
            else:
                intent = self._gen.send(self._last_outcome())
        except StopIteration:
            self._finish(SUCC)
            return None
        except Halt as h:
            self._finish(h.verdict)
            return None
        lm = self._intent_to_move(intent)
        ok, why = angel_allowed(chi.last_config(), lm, self.g, prior=chi)
        if not ok:
            raise ContractViolation(
                "drift", f"planned {lm.z.name} became disallowed: {why}")
        for c in lm.body_colonies():
            if (c[0] // self.q, c[1] // self.q) not in self._big_body_bigs:
                raise ContractViolation(
                    "nesting", f"{lm.z.name} body leaves the big body at {c}")
        self.count += 1
        if self.count > self.ps.nu:
            raise ContractViolation("move-budget", f"exceeded nu={self.ps.nu}")
        self._pending_intent = intent
        return lm

    def _last_outcome(self):
        d1 = self.chi.last_config()
        return (d1.j, self.frame.canon_cell(colony_units(self.b, d1.p)))

    def _finish(self, verdict: str):
        if self.count < 2:
            raise ContractViolation(
                "halt-too-early", f"halted after {self.count} small moves")
        self.halted = True
        self.verdict = verdict

    # -- shared emission subroutines (generators) -------------------------------

    def emit_plan(self, plan):
        """Yield a list of planned intents, asserting expected outcomes."""
        for intent in plan:
            outcome = yield intent
            j, _cell = outcome
            if intent[0] in ("step", "jump", "turn_jump", "escape", "finish") \
                    and j != SUCC:
                raise ContractViolation("unexpected-failure",
                                        f"{intent} answered with {j}")

    pad_dirs = (N, E, W, S)

    def pad_to_two(self):
        """Ensure at least two small moves before halting."""
        while self.count < 2:
            done = False
            for d in self.pad_dirs:
                intent = ("step", d)
                ok, _ = self.allowed_now(intent)
                if ok:
                    target = self.frame.canon_cell(
                        colony_units(self.b, self.chi.last_config().p))
                    if self._in_big_body((target[0] + d.vec[0],
                                          target[1] + d.vec[1])):
                        yield intent
                        done = True
                        break
            if not done:
                raise ContractViolation("pad", "cannot reach two small moves")

    def _in_big_body(self, c: Cell) -> bool:
        wc = self.frame.world_cell(c)
        return (wc[0] // self.q, wc[1] // self.q) in self._big_body_bigs

    def _run(self):  # pragma: no cover - abstract
        raise NotImplementedError
        yield

    # -- charge bookkeeping -------------------------------------------------------

    def begin_digression(self, region_cells, kind: str, extra_flat=ZERO):
        """Open a charged segment; same-region digressions share one entry
        (a retreat's scapegoat cell also absorbs the following evasion)."""
        region = tuple(sorted(set(region_cells)))
        entry = None
        for e in self.ledger.entries:
            if e.region == region:
                entry = e
                break
        if entry is None:
            entry = self.ledger.charge(region, ZERO, kind)
        self._segments.append([entry, self.count, None, extra_flat])
        return entry

    def end_digression(self):
        if self._segments and self._segments[-1][2] is None:
            self._segments[-1][2] = self.count

    def settle_charges(self):
        """Compute each digression's extra geometric cost from the history."""
        units = list(self.chi.units())
        totals: dict[int, Rat] = {}
        for entry, lo, hi, extra_flat in self._segments:
            hi = self.count if hi is None else hi
            seg = units[lo:hi]
            extra = extra_flat
            if seg:
                gc = sum(geometric_cost(d0, a, d1, self.b) for d0, a, d1 in seg)
                start_p = seg[0][0].p
                end_p = seg[-1][2].p
                land = self.frame.world_dir(N)
                forward = ((end_p[0] - start_p[0]) * land.vec[0]
                           + (end_p[1] - start_p[1]) * land.vec[1])
                if gc - forward > 0:
                    extra = extra + (gc - forward)
            totals[id(entry)] = totals.get(id(entry), ZERO) + extra
            entry.charge = totals[id(entry)]
        mu_end = self.chi.last_config().mu
        for entry, _lo, _hi, _flat in self._segments:
            mass = ZERO
            for c in entry.world_region:
                mass += mu_end.mass_colony(self.b, (c[0] * self.b,
                                                    c[1] * self.b))
            entry.covering = mass


def region_col(x, y_lo, y_hi):
    return [(x, y) for y in range(y_lo, y_hi + 1)]


# -- vertical moves: big step, big jump, big new attack ------------------------


class VerticalStrategy(LocalStrategy):
    """Northward-canonical implementation of a step, jump or new attack.

    Route preference: straight up the starting column; a clean column of
    the body (with one or two intermediate frames); around obstacles or
    through a passage between distant ones; and finally the
    column-by-column sweep (jumps and attacks only; a step always has a
    clean column).
    """

    def __init__(self, g, big_cfg, big_move, chi, pad=True):
        super().__init__(g, big_cfg, big_move, chi)
        self.pad = pad
        canon = _canonical_spec(big_move.z, g.catalog)
        self.kind = canon.kind
        self.level = canon.level
        q = self.q
        self.body_bigs_canon = sorted(canon.cells, key=lambda c: (c[1], c[0]))
        self.dest_big = canon.dest
        self.top_row = max(c[1] for c in self.body_bigs_canon) * q + q - 1
        self.bot_row = min(c[1] for c in self.body_bigs_canon) * q
        if self.kind is Kind.ATTACK_NEW:
            self.rprime_src_big = (0, canon.obstacle[1] - 1)
            self.rprime_level = 1
        else:
            self.rprime_src_big = (0, 0)
            self.rprime_level = 0
        self.sweepable = self.kind in (Kind.JUMP, Kind.ATTACK_NEW)
        self.profit_mode = self.kind is Kind.ATTACK_NEW
        self.sweep_cols = range(q)
        self.northwards_bad_end = False
        self.rdp: list[int] = []

    # frame rows -----------------------------------------------------------

    def rdp_rows(self):
        """Clean rows of the destination big colony with row index > 1."""
        q = self.q
        base = self.dest_big[1] * q
        x0 = self.dest_big[0] * q
        return [y for y in range(base + 1, base + q)
                if self.clean_row0(y, x0, x0 + q - 1)]

    def rprime_rows(self):
        q = self.q
        base = self.rprime_src_big[1] * q
        x0 = self.rprime_src_big[0] * q
        return [y for y in range(base, base + q)
                if self.clean_row0(y, x0, x0 + q - 1, i=self.rprime_level)]

    def pick_blame_row(self, c: Cell):
        """First destination row not securely reachable from c (for charging)."""
        for ry in self.rdp:
            if not self.securely_reachable0(c, ry):
                return ry
        return self.rdp[0]

    def blame_region(self, c: Cell):
        return region_col(c[0], c[1] + 1, self.pick_blame_row(c))

    def viable_target(self, c: Cell, min_i: int = 1, need_reach: bool = True,
                      min_len: int = 2):
        """First R'' row (index >= min_i) walkable from c, with its plan.

        Prefers plans of at least min_len moves so a halt never comes too
        early; a one-step plan is extended into the clean row itself when
        that is sound.
        """
        short = None
        for i, ry in enumerate(self.rdp, start=1):
            if i < min_i or ry <= c[1]:
                continue
            if need_reach and not self.securely_reachable0(c, ry):
                continue
            plan = self.plan_walk_col(c[0], c[1], ry - 1)
            if plan is None:
                continue
            if len(plan) >= min_len:
                return ry - 1, plan
            if short is None:
                ext = self.plan_walk_col(c[0], c[1], ry)
                if ext is not None and len(ext) >= min_len:
                    short = (ry, ext)
                else:
                    short = (ry - 1, plan)
        return short

    # route attempts ---------------------------------------------------------

    def attempt_direct(self, p0):
        hit = self.viable_target(p0, min_i=1)
        if hit is None:
            return None
        return hit[1], None

    def clean_columns(self, cols=None):
        cols = self.sweep_cols if cols is None else cols
        return [x for x in cols
                if self.clean_col0(x, self.bot_row, self.top_row)]

    def attempt_clean_column(self, p0):
        x0, y0 = p0
        r0y = y0 + 1
        if r0y > self.top_row:
            return None
        cols = sorted((x for x in self.clean_columns() if x != x0),
                      key=lambda x: (abs(x - x0), x))
        for x1 in cols:
            hit = self.viable_target((x1, r0y), min_i=2)
            if hit is not None:
                route = self.plan_route([p0, (x0, r0y), (x1, r0y)])
                if route is not None:
                    blame = self.blame_region((x0, r0y))
                    return (self.fuse_corners([route, hit[1]]),
                            (blame, "blameable-run"))
        # intermediate row and column before the clean column (jump routing)
        rps = [y for y in self.rprime_rows() if y > r0y]
        for x1 in cols:
            for rp in rps:
                hit = self.viable_target((x1, rp), min_i=2)
                if hit is None:
                    continue
                for x2 in sorted(self.sweep_cols,
                                 key=lambda x: (abs(x - x0), x)):
                    if x2 in (x0, x1):
                        continue
                    route = self.plan_route(
                        [p0, (x0, r0y), (x2, r0y), (x2, rp), (x1, rp)])
                    if route is None:
                        continue
                    blame = self.blame_region((x0, r0y))
                    return (self.fuse_corners([route, hit[1]]),
                            (blame, "blameable-run"))
        return None

    def attempt_lateral(self, p0):
        """Start beside a clean column rather than under a clean row (case 2)."""
        x0, y0 = p0
        lo, hi = min(self.sweep_cols), max(self.sweep_cols)
        for dx in (1, -1):
            c1x = x0 + dx
            if not lo <= c1x <= hi:
                continue
            if not self.clean_col0(c1x, self.bot_row, self.top_row):
                continue
            hit = self.viable_target((c1x, y0), min_i=1)
            if hit is not None:
                route = self.plan_route([p0, (c1x, y0)])
                if route is not None:
                    blame = self.blame_region(p0)
                    return (self.fuse_corners([route, hit[1]]),
                            (blame, "blameable-run"))
            rps = [y for y in self.rprime_rows() if y > y0]
            for rp in rps:
                for x2 in sorted(self.sweep_cols,
                                 key=lambda x: (abs(x - c1x), x)):
                    if x2 in (x0, c1x):
                        continue
                    if not self.clean_col0(x2, self.bot_row, self.top_row):
                        continue
                    hit = self.viable_target((x2, rp), min_i=2)
                    if hit is None:
                        continue
                    route = self.plan_route(
                        [p0, (c1x, y0), (c1x, rp), (x2, rp)])
                    if route is None:
                        continue
                    blame = self.blame_region(p0)
                    return (self.fuse_corners([route, hit[1]]),
                            (blame, "blameable-run"))
        return None

    def band_obstacles(self) -> dict[int, int]:
        """Obstacle row per column, strictly below the first clean dest row.

        A column with no mass at all gets a virtual obstacle just below the
        exit row, so the sweep simply climbs it and attacks over nothing.
        """
        hi = self.rdp[0] - 1
        out = {}
        self.virtual_cols = set()
        for x in self.sweep_cols:
            ws = self.col_weights0(x, self.bot_row, hi)
            ob = weights_obstacle(ws)
            if ws[ob - 1] == 0:
                out[x] = hi
                self.virtual_cols.add(x)
            else:
                out[x] = self.bot_row + ob - 1
        return out

    def attempt_obstacle_routes(self, p0):
        x0, y0 = p0
        r0y = y0 + 1
        order = sorted(self.sweep_cols, key=lambda x: (abs(x - x0), x))
        full = {}
        for x in self.sweep_cols:
            ws = self.col_weights0(x, self.bot_row, self.top_row)
            full[x] = self.bot_row + weights_obstacle(ws) - 1
        rps = [y for y in self.rprime_rows() if y > r0y]

        # a column whose obstacle sits below a clean fallback row
        for x1 in order:
            for rp in rps:
                if full[x1] >= rp:
                    continue
                hit = self.viable_target((x1, rp), min_i=1, need_reach=False)
                if hit is None:
                    continue
                route = self._route_with_intermediate(p0, r0y, (x1, rp), order)
                if route is None:
                    continue
                blame = self.blame_region((x0, r0y))
                return (self.fuse_corners([route, hit[1]]),
                        (blame, "blameable-run"))
        # a column whose obstacle sits at or above the first dest row
        for x1 in order:
            if full[x1] < self.rdp[0]:
                continue
            up = self.plan_walk_col(x1, r0y, self.rdp[0] - 1)
            if up is None:
                continue
            route = self._route_with_intermediate(p0, r0y, (x1, r0y), order)
            if route is None:
                continue
            blame = self.blame_region((x0, r0y))
            return self.fuse_corners([route, up]), (blame, "blameable-run")
        # a passage between obstacles more than two rows apart
        r = self.band_obstacles()
        cols = sorted(self.sweep_cols)
        for xl in cols[:-1]:
            if abs(r[xl] - r[xl + 1]) <= 2:
                continue
            lowx, highx = (xl, xl + 1) if r[xl] < r[xl + 1] else (xl + 1, xl)
            for qq in (1, 2):
                h = r[highx] - qq
                if h <= r[lowx] or h < self.bot_row:
                    continue
                if not self.safe_pair0((xl, h), (xl + 1, h)):
                    continue
                hit = self.viable_target((highx, h), min_i=1, need_reach=False)
                if hit is None:
                    continue
                route = self._route_with_intermediate(p0, r0y, (lowx, h), order)
                if route is None:
                    continue
                blame = self.blame_region((x0, r0y))
                return (self.fuse_corners([route, hit[1]]),
                        (blame, "blameable-run"))
        return None

    def _route_with_intermediate(self, p0, r0y, target, order):
        """p0 to target via the step-north row, optionally via a clean column."""
        tx, ty = target
        route = self.plan_route([p0, (p0[0], r0y), (tx, r0y), (tx, ty)])
        if route is not None:
            return route
        for x2 in order:
            if x2 == tx:
                continue
            route = self.plan_route(
                [p0, (p0[0], r0y), (x2, r0y), (x2, ty), (tx, ty)])
            if route is not None:
                return route
        return None

    # the marginal sweep -------------------------------------------------------

    def escape_north(self, x, from_y):
        """Plan straight up column x to below a destination row."""
        best = None
        for ry in self.rdp:
            if ry <= from_y:
                continue
            plan = self.plan_walk_col(x, from_y, ry - 1)
            if plan is None:
                continue
            if self.securely_reachable0((x, from_y), ry):
                return plan
            if best is None:
                best = plan
        return best

    @staticmethod
    def _attack_bottom(start: Cell, spec: MoveSpec) -> int:
        return start[1] + min(c[1] for c in spec.cond_attack_good)

    def _escape_and_succeed(self, x, from_y):
        plan = self.escape_north(x, from_y)
        if plan is None:
            raise ContractViolation("escape-target",
                                    f"no clean destination row above column {x}")
        yield from self.emit_plan(plan)
        yield from self.pad_steps()
        raise Halt(SUCC)

    def _sweep(self, x_start, branch, i0, i1=None, pending_lateral=False):
        """Column-by-column attacks with evasions and retreats."""
        cat = self.g.catalog
        r = self.band_obstacles()
        last_x = max(self.sweep_cols)
        x = x_start

        def fail_halt():
            self.end_digression()
            self.northwards_bad_end = True
            if not self.failable:
                raise ContractViolation(
                    "sweep-exhausted",
                    "a step/jump sweep cannot fail through the last column")
            raise Halt(FAIL)

        while True:
            if branch == "success":
                if i0 - r[x] < -4:
                    # entered too low: walk up to attack range first
                    if pending_lateral:
                        yield ("step", E)
                        pending_lateral = False
                    nxt_r = r[x + 1] if x + 1 in r else r[x]
                    target = min(r[x], nxt_r) - 2
                    if target > i0:
                        plan = self.plan_walk_col(x, i0, target)
                        if plan is None:
                            raise ContractViolation(
                                "sweep-climb", f"cannot walk up column {x}")
                        yield from self.emit_plan(plan)
                        i0 = target
                s = i0 - r[x]
                intent = None
                if -4 <= s <= -1:
                    cand = ("turn_attack", E, N, s) if pending_lateral \
                        else ("attack_new", N, E, s)
                    if self.allowed_now(cand)[0] and \
                            not self.intent_hits_avoid(cand):
                        intent = cand
                if intent is not None:
                    start = self.cur()
                    spec = cat.turn_attack(E, N, s) if pending_lateral \
                        else cat.attack_new(N, E, s)
                    outcome = yield intent
                    pending_lateral = False
                    self.end_digression()
                    j, cell = outcome
                    if j == SUCC:
                        yield from self._escape_and_succeed(x, cell[1])
                    branch, i0 = "failure", cell[1]
                    i1 = self._attack_bottom(start, spec)
                    continue
                if pending_lateral:
                    yield ("step", E)
                    pending_lateral = False
                if x >= last_x:
                    fail_halt()
                # evasion under both obstacles; the east step is deferred so
                # it can fuse with the next column's attack into a turn
                self.end_digression()
                self.begin_digression(
                    [(x, r[x])], "scapegoat-cell",
                    extra_flat=(self.ps.rho2 * self.b if self.profit_mode
                                else ZERO))
                base = r[x + 1] if r[x + 1] < r[x] else r[x]
                h = None
                for qq in (2, 1):
                    cand_h = base - qq
                    if cand_h < self.bot_row:
                        continue
                    if not self.safe_pair0((x, cand_h), (x + 1, cand_h)):
                        continue
                    if self._avoid_blocks([(x + 1, cand_h)], (x, i0)):
                        continue
                    plan = self.plan_walk_col(x, i0, cand_h)
                    if plan is None:
                        continue
                    h = cand_h
                    yield from self.emit_plan(plan)
                    break
                if h is None:
                    raise ContractViolation("evasion",
                                            f"no safe slip out of column {x}")
                pending_lateral = True
                i0 = h
                x += 1
                continue

            # failure branch: we just failed an attack in column x
            if x >= last_x:
                fail_halt()
            if (i0 - r[x + 1] > 1 or (x + 1) in self.virtual_cols) \
                    and not self.intent_hits_avoid(("escape", N, E)):
                # above the next obstacle, or the next column is massless:
                # slip east and walk straight out
                self.end_digression()
                outcome = yield ("escape", N, E)
                _j, cell = outcome
                yield from self._escape_and_succeed(x + 1, cell[1])
            s2 = i0 - r[x + 1]
            if -3 <= s2 <= 1 and self.allowed_now(("attack_cont", N, E, s2))[0] \
                    and not self.intent_hits_avoid(("attack_cont", N, E, s2)):
                self.end_digression()
                start = self.cur()
                spec = cat.attack_cont(N, E, s2)
                outcome = yield ("attack_cont", N, E, s2)
                j, cell = outcome
                if j == SUCC:
                    yield from self._escape_and_succeed(x + 1, cell[1])
                branch, i0 = "failure", cell[1]
                i1 = self._attack_bottom(start, spec)
                x += 1
                continue
            # retreat: finish down over the failed body, slip east underneath
            self.end_digression()
            self.begin_digression(
                [(x + 1, r[x + 1])], "scapegoat-cell",
                extra_flat=(self.ps.rho2 * self.b if self.profit_mode else ZERO))
            i2 = min(i0 - 1, r[x] - 1, r[x + 1] - 1)
            h = None
            for qq in (1, 0):
                cand_h = i2 - qq
                if cand_h < self.bot_row:
                    continue
                if not self.safe_pair0((x, cand_h), (x + 1, cand_h)):
                    continue
                if self._avoid_blocks([(x + 1, cand_h)], (x, i0)):
                    continue
                mid = max(i1, cand_h) if i1 is not None else cand_h
                down = self.plan_walk_col(x, mid, cand_h)
                if down is None:
                    continue
                plan = []
                fl = i0 - mid
                while fl > 5:
                    plan.append(("finish", S, 5))
                    fl -= 5
                if fl > 0:
                    plan.append(("finish", S, fl))
                plan += down
                h = cand_h
                yield from self.emit_plan(plan)
                break
            if h is None:
                raise ContractViolation("retreat",
                                        f"no retreat slip out of column {x}")
            pending_lateral = True
            branch, i0, i1 = "success", h, None
            x += 1

    @property
    def failable(self) -> bool:
        return self.kind is Kind.ATTACK_NEW or \
            getattr(self, "is_cont_attack", False)

    # main run -------------------------------------------------------------------

    def _run(self):
        p0 = self.cur()
        self.rdp = self.rdp_rows()
        if not self.rdp:
            raise ContractViolation("no-clean-dest-rows",
                                    "destination colony has no usable clean rows")
        for attempt in (self.attempt_direct, self.attempt_clean_column,
                        self.attempt_lateral):
            hit = attempt(p0)
            if hit is not None:
                plan, charge = hit
                if charge is not None:
                    self.begin_digression(charge[0], charge[1])
                yield from self.emit_plan(plan)
                self.end_digression()
                yield from self.pad_steps()
                return
        if not self.sweepable:
            raise ContractViolation(
                "step-routing",
                "a (-1)-safe step body always admits a clean-column route")
        hit = self.attempt_obstacle_routes(p0)
        if hit is not None:
            plan, charge = hit
            self.begin_digression(charge[0], charge[1])
            yield from self.emit_plan(plan)
            self.end_digression()
            yield from self.pad_steps()
            return
        yield from self._sweep_prep(p0)

    def pad_steps(self):
        if self.pad:
            yield from self.pad_to_two()

    def _sweep_prep(self, p0):
        x0, y0 = p0
        r0y = y0 + 1
        r = self.band_obstacles()
        cols = sorted(self.sweep_cols)
        # pass straight up from some cell of the step-north row if possible
        for x in sorted(cols, key=lambda x: (abs(x - x0), x)):
            if not self.securely_reachable0((x, r0y), self.rdp[0]):
                continue
            up = self.plan_walk_col(x, r0y, self.rdp[0] - 1)
            route = self.plan_route([p0, (x0, r0y), (x, r0y)])
            if up is None or route is None:
                continue
            if x != x0:
                self.begin_digression(self.blame_region((x0, r0y)),
                                      "blameable-run")
            yield from self.emit_plan(self.fuse_corners([route, up]))
            self.end_digression()
            yield from self.pad_steps()
            return
        first, second = cols[0], cols[min(1, len(cols) - 1)]
        route = self.plan_route([p0, (x0, r0y), (first, r0y)])
        if route is None:
            raise ContractViolation("sweep-prep", "cannot reach the first column")
        i0 = min(r[first], r[second]) - 2
        climb = self.plan_walk_col(first, r0y, i0)
        if climb is None:
            raise ContractViolation("sweep-prep", "cannot climb the first column")
        yield from self.emit_plan(self.fuse_corners([route, climb]))
        yield from self._sweep(first, "success", i0)


def classify_case(strategy, cols, rprime_rows) -> str:
    """Marginal when every column is unimodal, the fallback rows carry no
    obstacle, and adjacent obstacle heights differ by at most one."""
    from .classify import weights_unimodal
    r = {}
    for x in cols:
        ws = strategy.col_weights0(x, strategy.bot_row, strategy.top_row)
        if not weights_unimodal(ws, strategy.b, 0, strategy.ps):
            return "straight"
        r[x] = strategy.bot_row + weights_obstacle(ws) - 1
    if any(r[x] in rprime_rows for x in cols):
        return "straight"
    cs = sorted(cols)
    for a, bnxt in zip(cs, cs[1:]):
        if abs(r[a] - r[bnxt]) > 1:
            return "straight"
    return "marginal"


class ContinuationStrategy(VerticalStrategy):
    """Big continuing attacks and big escapes.

    Canonical: the angel sits in the left column pair of the template
    having just finished the previous big attack; the reduced body is the
    column of big colonies one step east.  A marginal reduced body
    continues the sweep seamlessly; otherwise the straight cases route
    around or through it.
    """

    def __init__(self, g, big_cfg, big_move, chi, pad=True):
        LocalStrategy.__init__(self, g, big_cfg, big_move, chi)
        self.pad = pad
        canon = _canonical_spec(big_move.z, g.catalog)
        self.kind = canon.kind
        self.level = canon.level
        q = self.q
        self.body_bigs_canon = sorted(canon.cells, key=lambda c: (c[1], c[0]))
        self.dest_big = canon.dest
        self.obstacle_big = canon.obstacle
        reduced = sorted(canon.reduced, key=lambda c: c[1])
        self.reduced_bigs = reduced
        self.top_row = max(c[1] for c in reduced) * q + q - 1
        self.bot_row = min(c[1] for c in reduced) * q
        self.left_rows = (min(c[1] for c in canon.cells if c[0] == 0) * q,
                          max(c[1] for c in canon.cells if c[0] == 0) * q + q - 1)
        self.sweep_cols = range(q, 2 * q)
        self.is_cont_attack = self.kind is Kind.ATTACK_CONT
        self.profit_mode = self.is_cont_attack
        if self.obstacle_big is not None:
            self.rprime_src_big = (1, self.obstacle_big[1] - 1)
            self.rprime_level = 1
        else:
            self.rprime_src_big = (1, self.dest_big[1] - 1)
            self.rprime_level = 1
        self.sweepable = True
        self.northwards_bad_end = False
        self.rdp = []

    def _witness_canon(self):
        wit = self.chi.initial_witness
        if wit is None:
            return None, None
        cells = [self.frame.canon_cell(c)
                 for c in wit.offset_colonies(wit.z.cond_attack_good)]
        xs = {c[0] for c in cells}
        return min(c[1] for c in cells), (min(xs) if xs else None)

    def band_obstacles(self) -> dict[int, int]:
        """Reduced-body band obstacles plus the arrival column's obstacle,
        which the seamless failure entry needs for its retreat heights."""
        out = super().band_obstacles()
        left_x = min(self.sweep_cols) - 1
        lo = self.left_rows[0]
        hi = min(self.left_rows[1], self.rdp[0] - 1) if self.rdp \
            else self.left_rows[1]
        ws = self.col_weights0(left_x, lo, max(lo, hi))
        ob = weights_obstacle(ws)
        out[left_x] = max(lo, hi) if ws[ob - 1] == 0 else lo + ob - 1
        return out

    def _run(self):
        p0 = self.cur()
        self.rdp = self.rdp_rows()
        if not self.rdp:
            raise ContractViolation("no-clean-dest-rows",
                                    "destination colony has no usable clean rows")
        failed_entry = self.chi.initial.j == FAIL and \
            self.chi.initial_witness is not None
        if self._first_column_run_safe(p0):
            # straight case 1: the way out along the first reduced column
            # is safe, so slip east and walk straight up
            yield from self._case1(p0, failed_entry)
            return
        case = classify_case(self, list(self.sweep_cols),
                             set(self.rprime_rows()))
        gaps_ok = self._gaps_within(2)
        if self.is_cont_attack and (case == "marginal" or gaps_ok):
            yield from self._seamless(p0, failed_entry)
            return
        yield from self._straight(p0, failed_entry)

    def _gaps_within(self, lim):
        from .classify import weights_unimodal
        r = self.band_obstacles()
        cs = sorted(self.sweep_cols)
        for x in cs:
            ws = self.col_weights0(x, self.bot_row, self.top_row)
            if not weights_unimodal(ws, self.b, 0, self.ps):
                return False
        return all(abs(r[a] - r[bn]) <= lim for a, bn in zip(cs, cs[1:]))

    def _seamless(self, p0, failed_entry):
        x0, y0 = p0
        r = self.band_obstacles()
        first = min(self.sweep_cols)
        if failed_entry:
            i1, _wx = self._witness_canon()
            yield from self._sweep(x0, "failure", y0, i1)
        else:
            yield from self._sweep(first, "success", y0, pending_lateral=True)

    def _first_column_run_safe(self, p0) -> bool:
        first_col = min(self.sweep_cols)
        run_lo = max(self.bot_row, p0[1] - 1)
        ws = self.col_weights0(first_col, run_lo, self.rdp[0])
        return sum(ws, ZERO) < safe_threshold(self.b, 0, self.ps)

    def _case1(self, p0, failed_entry):
        x0, y0 = p0
        first_col = min(self.sweep_cols)
        if failed_entry:
            outcome = yield ("escape", N, E)
            _j, cell = outcome
            yield from self._escape_and_succeed(first_col, cell[1])
        # northwards-bad start: slip right, possibly one step down first
        self.begin_digression([(x0, self._left_obstacle_above(y0))],
                              "scapegoat-cell")
        for down in (0, 1):
            yc = y0 - down
            if yc < self.left_rows[0]:
                continue
            if not self.safe_pair0((x0, yc), (first_col, yc)):
                continue
            plan = ([("step", S)] if down else []) + [("step", E)]
            yield from self.emit_plan(plan)
            yield from self._escape_and_succeed(first_col, yc)
        raise ContractViolation("straight-entry",
                                "cannot slip east from a northwards-bad start")

    def _straight(self, p0, failed_entry):
        x0, y0 = p0
        q = self.q
        first_col = min(self.sweep_cols)
        # the first column is blocked: retreat low and route around
        if failed_entry:
            i1, _wx = self._witness_canon()
            bottom = max(i1, self.left_rows[0])
            if y0 > bottom:
                plan = []
                fl = y0 - bottom
                while fl > 5:
                    plan.append(("finish", S, 5))
                    fl -= 5
                if fl:
                    plan.append(("finish", S, fl))
                yield from self.emit_plan(plan)
        yield from self._straight_routes()

    def _left_obstacle_above(self, y0):
        ws = self.col_weights0(self.q - 1, self.left_rows[0], self.left_rows[1])
        return self.left_rows[0] + weights_obstacle(ws) - 1

    def _straight_routes(self):
        p = self.cur()
        x0, y0 = p
        q = self.q
        first_col = min(self.sweep_cols)
        charge = (region_col(first_col, max(self.bot_row, y0 - 1), self.rdp[0]),
                  "blameable-run")
        # V*: the big colony below the obstacle together with the last
        # column of its western neighbour; rows clamped inside the body.
        vlo = self.rprime_src_big[1] * q
        vhi = vlo + q - 1
        cross_lo = max(self.left_rows[0], self.bot_row)
        cross_hi = min(self.left_rows[1], self.top_row)
        rows1 = [y for y in range(vlo, vhi + 1)
                 if cross_lo <= y <= cross_hi
                 and self.clean_row0(y, first_col - 1, first_col + q - 1)]
        for r1 in rows1:
            if r1 >= y0:
                continue
            for x1 in sorted(self.sweep_cols, key=lambda x: (x, )):
                if x1 == first_col:
                    continue
                hit = self.viable_target((x1, r1), min_i=2)
                if hit is None:
                    continue
                route = self.plan_route([p, (x0, r1), (x1, r1)])
                if route is None:
                    continue
                self.begin_digression(*charge)
                yield from self.emit_plan(self.fuse_corners([route, hit[1]]))
                self.end_digression()
                yield from self.pad_steps()
                raise Halt(SUCC)
        # first column is 1-good: enter it low and climb
        ws1 = self.col_weights0(first_col, self.bot_row, self.top_row)
        if sum(ws1, ZERO) < (1 - self.ps.delta) * self.b:
            hit = None
            for i, ry in enumerate(self.rdp, start=1):
                if i <= 2 or ry <= y0:
                    continue
                plan = self.plan_walk_col(first_col, y0, ry - 1)
                if plan is not None:
                    hit = plan
                    break
            if hit is not None and self.safe_pair0((x0, y0), (first_col, y0)):
                blame_rows = [ry for ry in self.rdp[1:]
                              if not self.securely_reachable0((x0, y0), ry)]
                region = region_col(x0, y0 + 2,
                                    blame_rows[0] if blame_rows else self.rdp[1])
                if region:
                    self.begin_digression(region, "blameable-run")
                yield from self.emit_plan([("step", E)] + hit)
                self.end_digression()
                yield from self.pad_steps()
                raise Halt(SUCC)
        # distant obstacles: pass between them inside the reduced body
        r = self.band_obstacles()
        cs = sorted(self.sweep_cols)
        for xl in cs[:-1]:
            if abs(r[xl] - r[xl + 1]) <= 2:
                continue
            lowx, highx = (xl, xl + 1) if r[xl] < r[xl + 1] else (xl + 1, xl)
            for qq in (1, 2):
                h = r[highx] - qq
                if h <= r[lowx] or h < self.bot_row:
                    continue
                if not self.safe_pair0((xl, h), (xl + 1, h)):
                    continue
                hit = self.viable_target((highx, h), min_i=1, need_reach=False)
                if hit is None:
                    continue
                yc_lo = max(cross_lo, self.bot_row)
                routed = None
                for yc in range(min(y0, cross_hi), yc_lo - 1, -1):
                    route = self.plan_route(
                        [self.cur(), (x0, yc), (lowx, yc), (lowx, h), (highx, h)])
                    if route is not None:
                        routed = route
                        break
                if routed is None:
                    continue
                self.begin_digression(*charge)
                yield from self.emit_plan(self.fuse_corners([routed, hit[1]]))
                self.end_digression()
                yield from self.pad_steps()
                raise Halt(SUCC)
        # last resort: the reduced body is sweepable after all
        if self._gaps_within(2):
            first = min(self.sweep_cols)
            yield from self._sweep(first, "success", self.cur()[1],
                                   pending_lateral=True)
            return
        raise ContractViolation("straight-case",
                                "no admissible straight-case route")


class FinishStrategy(LocalStrategy):
    """Big finish: retreat to just above a deep 1-clean row.

    The frame canonicalizes the failed attack's landing direction to
    north, so the finish descends southward in canonical coordinates.
    """

    pad_dirs = (S, E, W, N)

    def __init__(self, g, big_cfg, big_move, chi, pad=True):
        super().__init__(g, big_cfg, big_move, chi)
        self.pad = pad
        canon = _canonical_spec(big_move.z, g.catalog)
        # the canonical prototype points north; this frame walks it south
        self.body_bigs_canon = sorted(((0, -c[1]) for c in canon.cells),
                                      key=lambda c: c[1])
        self.length = canon.finish_len

    def _run(self):
        q = self.q
        x0, y0 = self.cur()
        base = min(c[1] for c in self.body_bigs_canon) * q
        clean1 = [y for y in range(base, base + q)
                  if self.clean_row0(y, 0, q - 1, i=1)]
        if self.chi.initial.j == FAIL and self.chi.initial_witness is not None:
            wit = self.chi.initial_witness
            cells = [self.frame.canon_cell(c)
                     for c in wit.offset_colonies(wit.z.cond_attack_good)]
            i1 = min(c[1] for c in cells)
            bottom = max(i1, base)
            if y0 > bottom:
                fl = y0 - bottom
                plan = []
                while fl > 5:
                    plan.append(("finish", S, 5))
                    fl -= 5
                if fl:
                    plan.append(("finish", S, fl))
                yield from self.emit_plan(plan)
        # step down to the cell above the second-highest deep 1-clean row
        y_now = self.cur()[1]
        done = False
        for t in sorted(clean1, reverse=True)[1:] or sorted(clean1, reverse=True):
            target = t + 1
            if target >= y_now:
                continue
            plan = self.plan_walk_col(x0, y_now, target)
            if plan is not None and len(plan) + self.count >= 2:
                yield from self.emit_plan(plan)
                done = True
                break
        if not done:
            raise ContractViolation("finish-target",
                                    "no reachable deep 1-clean row")


class TurnStrategy(LocalStrategy):
    """Big turn: a steered big step followed by the rotated second part."""

    def __init__(self, g, big_cfg, big_move, chi, pad=True):
        super().__init__(g, big_cfg, big_move, chi)
        z = big_move.z
        cat = g.catalog
        step_spec = cat.step(z.start_dir)
        self.part1 = VerticalStrategy(
            g, big_cfg, LocatedMove(big_move.w, step_spec), chi, pad=False)
        step_dest_big = (big_move.w[0] + step_spec.dest[0],
                         big_move.w[1] + step_spec.dest[1])
        if z.turn_second is Kind.JUMP:
            second_spec = cat.jump(z.land_dir)
        else:
            second_spec = cat.attack_new(z.land_dir, z.start_dir, z.level)
        self.second_move = LocatedMove(step_dest_big, second_spec)
        self.part2 = None
        self.big_cfg = big_cfg

    def next_move(self, chi):
        self.chi = chi
        if self.halted:
            return None
        if self.part2 is None:
            mv = self.part1.next_move(chi)
            if mv is not None:
                self.count = self.part1.count
                self._check_nesting(mv)
                return mv
            self.part2 = make_strategy(self.g, self.big_cfg,
                                       self.second_move, chi, pad=True)
            self.part2.count = self.part1.count
            # the second part must route around the step part's path
            walked = set()
            for prior in chi.moves:
                walked.update(prior.body_colonies())
            self.part2.avoid = {self.part2.frame.canon_cell(c) for c in walked}
        mv = self.part2.next_move(chi)
        self.count = self.part2.count
        if mv is not None:
            self._check_nesting(mv)
            return mv
        self.halted = True
        self.verdict = self.part2.verdict
        self.northwards_bad_end = getattr(self.part2, "northwards_bad_end", False)
        return None

    def _check_nesting(self, lm):
        for c in lm.body_colonies():
            if (c[0] // self.q, c[1] // self.q) not in self._big_body_bigs:
                raise ContractViolation(
                    "nesting", f"{lm.z.name} body leaves the turn body at {c}")

    @property
    def all_ledgers(self):
        out = list(self.part1.ledger.entries)
        if self.part2 is not None:
            out += list(self.part2.ledger.entries)
        return out

    def settle_charges(self):
        self.part1.chi = self.chi
        self.part1.settle_charges()
        if self.part2 is not None:
            self.part2.chi = self.chi
            self.part2.settle_charges()


def make_strategy(g: GameSpec, big_cfg: Configuration, big_move: LocatedMove,
                  chi: History, pad=True) -> LocalStrategy:
    """The local strategy implementing one big move over the small game."""
    k = big_move.z.kind
    if k in (Kind.STEP, Kind.JUMP, Kind.ATTACK_NEW):
        return VerticalStrategy(g, big_cfg, big_move, chi, pad=pad)
    if k in (Kind.ATTACK_CONT, Kind.ESCAPE):
        return ContinuationStrategy(g, big_cfg, big_move, chi, pad=pad)
    if k is Kind.FINISH:
        return FinishStrategy(g, big_cfg, big_move, chi, pad=pad)
    if k is Kind.TURN:
        return TurnStrategy(g, big_cfg, big_move, chi, pad=pad)
    raise ValueError(f"no strategy for {big_move.z.name}")


# Spec-facing constructors for the individual local strategies.

def implement_big_step(g, big_cfg, big_move, chi):
    return VerticalStrategy(g, big_cfg, big_move, chi)


def implement_big_jump(g, big_cfg, big_move, chi):
    return VerticalStrategy(g, big_cfg, big_move, chi)


def implement_big_attack(g, big_cfg, big_move, chi):
    return make_strategy(g, big_cfg, big_move, chi)


def implement_big_escape(g, big_cfg, big_move, chi):
    return ContinuationStrategy(g, big_cfg, big_move, chi)


def implement_big_finish(g, big_cfg, big_move, chi):
    return FinishStrategy(g, big_cfg, big_move, chi)


def implement_big_turn(g, big_cfg, big_move, chi):
    return TurnStrategy(g, big_cfg, big_move, chi)


class ImplementationMap:
    """phi and J: one big move translated into small moves and judged."""

    def __init__(self, small_game: GameSpec):
        self.g = small_game
        self._cache: dict[int, tuple] = {}

    def strategy_for(self, chi: History, big_cfg: Configuration,
                     big_move: LocatedMove) -> LocalStrategy:
        key = chi.uid
        hit = self._cache.get(key)
        if hit is not None:
            strat, mv = hit
            if mv.z is big_move.z and mv.w == big_move.w \
                    and strat.count == chi.nunits():
                return strat
        if len(self._cache) > 16:
            self._cache = {u: v for u, v in self._cache.items()
                           if not v[0].halted}
        strat = make_strategy(self.g, big_cfg, big_move, chi)
        consumed = chi.nunits()
        if consumed:
            # replay a partially implemented move (deterministic catch-up)
            replay = History(chi.b, chi.initial, chi.initial_witness)
            for i in range(consumed):
                mv = strat.next_move(replay)
                expect = chi.moves[i]
                if mv is None or mv != expect:
                    raise ContractViolation(
                        "replay-divergence",
                        f"unit {i}: recomputed {mv} != recorded {expect}")
                replay.append_move(chi.moves[i])
                replay.append_config(chi.configs[i + 1])
        self._cache[key] = (strat, big_move)
        return strat

    def phi(self, chi: History, big_cfg: Configuration,
            big_move: LocatedMove) -> LocatedMove | None:
        """The next small move, or None for Halt."""
        strat = self.strategy_for(chi, big_cfg, big_move)
        return strat.next_move(chi)

    def judge(self, chi: History, big_cfg: Configuration,
              big_move: LocatedMove) -> str:
        strat = self.strategy_for(chi, big_cfg, big_move)
        if not strat.halted:
            raise ContractViolation("judge-before-halt",
                                    "J is defined only after Halt")
        return strat.verdict

    def big_configuration(self, chi: History, big_cfg: Configuration,
                          big_move: LocatedMove) -> Configuration:
        """The scaled game's next configuration after Halt (J applied)."""
        last = chi.last_config()
        return Configuration(last.t, last.p, last.mu,
                             self.judge(chi, big_cfg, big_move))


def strategy_ledger_entries(strat: LocalStrategy):
    if isinstance(strat, TurnStrategy):
        return strat.all_ledgers
    return strat.ledger.entries


def verify_time_transfer(big_cfg: Configuration, big_move: LocatedMove,
                         big_end: Configuration, chi: History,
                         strat: LocalStrategy, ps: ParamSet,
                         b: int) -> tuple[bool, list[str]]:
    """tau(chi_small) <= tau(big unit), plus the ledger audit."""
    from .rules import time_bound
    problems: list[str] = []
    bstar = b * ps.q
    tau_small = time_bound(chi, ps)
    mu_end = big_end.mu
    big_colonies = big_move.body_colonies()
    mass_big = ZERO
    for c in big_colonies:
        mass_big += mu_end.mass_colony(bstar, (c[0] * bstar, c[1] * bstar))
    n_big = 1 if (big_move.z.kind is Kind.ATTACK_CONT and big_end.j == FAIL) \
        else 0
    gc_big = geometric_cost(big_cfg, big_move, big_end, bstar)
    tau_big = ps.rho1 * mass_big - ps.rho2 * n_big * bstar + gc_big
    if tau_small > tau_big:
        problems.append(f"time transfer violated: tau_small={tau_small} "
                        f"> tau_big={tau_big}")
    strat.settle_charges()
    entries = strategy_ledger_entries(strat)
    path_cols = set()
    for mv in chi.moves:
        path_cols.update(mv.body_colonies())
    from .rules import failed_cont_attacks
    profit_count = failed_cont_attacks(chi)
    seen = set()
    profit_budget = ps.rho2 * b * profit_count
    charged_profit = ZERO
    for e in entries:
        cells = set(e.world_region)
        if cells & seen:
            problems.append(f"{e.digression_id}: scapegoat overlaps another")
        if cells & path_cols:
            problems.append(f"{e.digression_id}: scapegoat overlaps the path")
        seen |= cells
        if e.kind == "profit-compensation":
            charged_profit += e.charge
            continue
        mass = ZERO
        for c in cells:
            mass += mu_end.mass_colony(b, (c[0] * b, c[1] * b))
        if ps.rho1 * mass < e.charge:
            problems.append(f"{e.digression_id}: charge {e.charge} exceeds "
                            f"rho1*mass = {ps.rho1 * mass} [{e.kind}]")
    if charged_profit > profit_budget:
        problems.append("profit compensation exceeds failed-attack budget")
    return not problems, problems
