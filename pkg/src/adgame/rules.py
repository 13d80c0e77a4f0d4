"""Game rules: configurations, histories, the angel's and devil's
constraint systems, time bounds and path simplicity.

A game is parameterised by its colony size B and two clearance relations:
k_start decides where new moves may begin, k_fail where failed
attack-bearing moves may deposit the angel.  The base game fixes both;
scaled games derive theirs from the level below (see scaleup).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .grid import Cell, colony_units, floor_to
from .measure import Measure
from .moves import (CATALOG, Catalog, Direction, Kind, LocatedMove, MoveSpec)
from .params import ParamSet, constraint_violations
from .rat import ZERO, Rat

SUCC = "succ"
FAIL = "fail"


@dataclass(frozen=True)
class Configuration:
    """Devil-side game state: time, angel position, measure, last verdict."""

    t: int
    p: Cell
    mu: Measure
    j: str = SUCC

    def essential(self) -> tuple:
        return (self.t, self.p, self.mu)


def default_configuration(q: int | None = None) -> Configuration:
    return Configuration(0, (0, 0), Measure(q=q), SUCC)


def default_move(catalog: Catalog = CATALOG) -> LocatedMove:
    """The default located move: an eastward step at the origin."""
    return LocatedMove((0, 0), catalog.step(Direction.EAST))


import itertools

_history_uids = itertools.count(1)


class History:
    """Alternating configurations and located moves at one scale.

    configs[0] is the initial configuration; len(configs) == len(moves)+1
    for a d-history (devil to move answered) and == len(moves) for an
    a-history.  `initial_witness` carries the located move that produced
    configs[0], so continuing moves stay checkable across the segment
    restarts of the nested strategy.
    """

    __slots__ = ("b", "configs", "moves", "initial_witness", "uid")

    def __init__(self, b: int, initial: Configuration,
                 initial_witness: LocatedMove | None = None):
        self.b = b
        self.configs: list[Configuration] = [initial]
        self.moves: list[LocatedMove] = []
        self.initial_witness = initial_witness
        self.uid = next(_history_uids)

    @property
    def initial(self) -> Configuration:
        return self.configs[0]

    def is_dhistory(self) -> bool:
        return len(self.configs) == len(self.moves) + 1

    def append_move(self, lm: LocatedMove) -> None:
        if not self.is_dhistory():
            raise ValueError("history already awaits the devil")
        self.moves.append(lm)

    def append_config(self, cfg: Configuration) -> None:
        if self.is_dhistory():
            raise ValueError("history already awaits the angel")
        self.configs.append(cfg)

    def last_config(self) -> Configuration:
        return self.configs[-1]

    def last_move(self) -> LocatedMove | None:
        return self.moves[-1] if self.moves else None

    def units(self) -> Iterable[tuple[Configuration, LocatedMove, Configuration]]:
        for i in range(len(self.moves)):
            if i + 1 < len(self.configs):
                yield self.configs[i], self.moves[i], self.configs[i + 1]

    def nunits(self) -> int:
        return min(len(self.moves), len(self.configs) - 1)

    def path(self) -> list[LocatedMove]:
        return list(self.moves)

    def witness_for(self, i: int) -> LocatedMove | None:
        """The failed move preceding unit i, when the closing verdict failed."""
        if i == 0:
            return self.initial_witness if self.configs[0].j == FAIL else None
        if self.configs[i].j == FAIL:
            return self.moves[i - 1]
        return None

    def current_witness(self) -> LocatedMove | None:
        return self.witness_for(len(self.moves))

    def __len__(self):
        return len(self.moves)

    def __repr__(self):
        kind = "d" if self.is_dhistory() else "a"
        return f"History(b={self.b}, {kind}-history, {len(self.moves)} moves)"


# -- geometric cost and time bounds -----------------------------------------


def geometric_cost(prev: Configuration, lm: LocatedMove, nxt: Configuration,
                   b: int) -> int:
    """Signed displacement along the move's direction; a turn costs 8B flat."""
    if lm.z.kind is Kind.TURN:
        return 8 * b
    dx = nxt.p[0] - prev.p[0]
    dy = nxt.p[1] - prev.p[1]
    vx, vy = lm.z.land_dir.vec
    return dx * vx + dy * vy


def tau_gc(history: History) -> int:
    return sum(geometric_cost(d0, a, d1, history.b)
               for d0, a, d1 in history.units())


def path_body_colonies(moves: Iterable[LocatedMove]) -> set[Cell]:
    out: set[Cell] = set()
    for lm in moves:
        out.update(lm.body_colonies())
    return out


def mass_of_colonies(mu: Measure, b: int, colonies: Iterable[Cell]) -> Rat:
    total = ZERO
    for c in colonies:
        total += mu.mass_colony(b, (c[0] * b, c[1] * b))
    return total


def failed_cont_attacks(history: History) -> int:
    return sum(1 for d0, a, d1 in history.units()
               if a.z.kind is Kind.ATTACK_CONT and d1.j == FAIL)


def time_bound(history: History, ps: ParamSet) -> Rat:
    """tau = rho1 * mu(bodies) - rho2 * (failed continuing attacks) * B + tau_gc."""
    b = history.b
    mu = history.last_config().mu
    u = path_body_colonies(history.moves[:history.nunits()])
    return (ps.rho1 * mass_of_colonies(mu, b, u)
            - ps.rho2 * failed_cont_attacks(history) * b
            + tau_gc(history))


# -- paths and simplicity ----------------------------------------------------


def is_path(moves: list[LocatedMove]) -> bool:
    """Consecutive colony positions differ by an end position of the move."""
    for i in range(len(moves) - 1):
        d = (moves[i + 1].w[0] - moves[i].w[0], moves[i + 1].w[1] - moves[i].w[1])
        if d not in moves[i].z.ends:
            return False
    return True


def _behind_cells(lm: LocatedMove) -> set[Cell]:
    """Body colonies strictly behind the start along the landing direction."""
    vx, vy = lm.z.land_dir.vec
    return {(lm.w[0] + x, lm.w[1] + y)
            for (x, y) in lm.z.cells if x * vx + y * vy < 0}


def witness_matches(witness: MoveSpec, cont: MoveSpec) -> bool:
    """A failed move can be continued by moves of matching orientation."""
    if not witness.failable:
        return False
    land, pass_ = witness.fail_dirs
    if cont.kind is Kind.FINISH:
        return cont.land_dir is land.opposite
    return cont.land_dir is land and cont.pass_dir is pass_


def simple_violation(moves: list[LocatedMove],
                     witnesses: list[LocatedMove | None]) -> int | None:
    """Index of the first simplicity violation, or None.

    Finish-move bodies are left out entirely.  A body may meet the
    accumulated union in its start colony, in its own cells behind the
    start (the tail an attack template carries), and in the body of the
    failed move it continues.
    """
    union: set[Cell] = set()
    for i, lm in enumerate(moves):
        if lm.z.kind is Kind.FINISH:
            continue
        body = set(lm.body_colonies())
        if union:
            overlap = body & union
            if overlap:
                allowed = {lm.w} | _behind_cells(lm)
                wit = witnesses[i] if i < len(witnesses) else None
                if wit is not None:
                    allowed |= set(wit.body_colonies())
                if not overlap <= allowed:
                    return i
        union |= body
    return None


def is_simple(moves: list[LocatedMove], b: int | None = None) -> bool:
    """Simplicity of a bare path; witnesses are inferred structurally."""
    witnesses: list[LocatedMove | None] = []
    for i, lm in enumerate(moves):
        wit = None
        if lm.z.is_continuing and i > 0 and witness_matches(moves[i - 1].z, lm.z):
            wit = moves[i - 1]
        witnesses.append(wit)
    return simple_violation(moves, witnesses) is None


def history_is_simple(history: History) -> bool:
    moves = history.moves
    witnesses = matched_witnesses(history.configs, moves,
                                  history.initial_witness)
    return simple_violation(moves, witnesses) is None


# -- game specifications ------------------------------------------------------


@dataclass
class GameSpec:
    """An AD-game: colony size, parameters and the two clearance relations."""

    b: int
    ps: ParamSet
    level: int
    k_start: Callable[[Measure, Cell, Direction], bool]
    k_fail: Callable[[Measure, Cell, LocatedMove], bool]
    catalog: Catalog = field(default_factory=lambda: CATALOG)
    toy: bool = False
    inner: Optional["GameSpec"] = None

    def colony_of(self, p: Cell) -> Cell:
        return floor_to(self.b, p)

    def colony_units_of(self, p: Cell) -> Cell:
        return colony_units(self.b, p)

    def __repr__(self):
        return f"GameSpec(level={self.level}, B={self.b})"


def base_k_start(ps: ParamSet):
    thr = ps.xi + ps.delta

    def k_start(mu: Measure, p: Cell, d: Direction) -> bool:
        return mu.get(p) < thr

    return k_start


def base_k_fail(mu: Measure, p: Cell, lm: LocatedMove) -> bool:
    """Clear for failure at B=1: in the attack body, in the obstacle's
    column, strictly before the obstacle along the landing direction."""
    z = lm.z
    if not z.failable or z.obstacle is None:
        return False
    rel = (p[0] - lm.w[0], p[1] - lm.w[1])
    if rel not in z.cells:
        return False
    dx = rel[0] - z.obstacle[0]
    dy = rel[1] - z.obstacle[1]
    vx, vy = z.land_dir.vec
    along = dx * vx + dy * vy
    lateral = dx * vy - dy * vx
    return lateral == 0 and along < 0


def base_game(ps: ParamSet, toy: bool = False,
              catalog: Catalog = CATALOG) -> GameSpec:
    """The unit-cell game, essentially the original angel-devil game."""
    if not toy:
        if not ps.valid:
            raise ValueError("parameters are not valid; pass toy=True to relax")
        bad = constraint_violations(ps)
        if bad:
            raise ValueError(f"parameter constraints violated: {bad}")
    return GameSpec(b=1, ps=ps, level=1, k_start=base_k_start(ps),
                    k_fail=base_k_fail, catalog=catalog, toy=toy)


# -- the angel's constraints ---------------------------------------------------


def _region_mass(mu: Measure, b: int, w: Cell, offsets) -> Rat:
    total = ZERO
    for (x, y) in offsets:
        total += mu.mass_colony(b, ((w[0] + x) * b, (w[1] + y) * b))
    return total


def find_witness(history: History | None, lm: LocatedMove):
    """The failed located move the continuing move `lm` may continue."""
    if history is None:
        return None
    wit = history.current_witness()
    if wit is not None and witness_matches(wit.z, lm.z):
        return wit
    return None


def unit_witness(history: History | None, lm: LocatedMove):
    """The matched witness for tracker bookkeeping (continuing moves only)."""
    if lm.z.is_continuing:
        return find_witness(history, lm)
    return None


def angel_allowed(cfg: Configuration, lm: LocatedMove, g: GameSpec,
                  prior: History | None = None) -> tuple[bool, str]:
    """Whether the angel may choose `lm` at `cfg`, with a reason when not."""
    z = lm.z
    b = g.b
    ps = g.ps
    mu = cfg.mu
    if colony_units(b, cfg.p) != lm.w:
        return False, "start-colony: angel is not in the move's start colony"

    if z.is_new:
        if not g.k_start(mu, cfg.p, z.start_dir):
            return False, f"k-start: {cfg.p} not clear toward {z.start_dir.letter}"
    else:
        wit = find_witness(prior, lm)
        if wit is None:
            return False, "witness: no matching failed move to continue"
        if not g.k_fail(mu, cfg.p, wit):
            return False, "k-fail: point not clear for the continued failure"

    if _region_mass(mu, b, lm.w, z.cells) > 3 * b:
        return False, "body-weight: body mass exceeds 3B"

    dest = lm.dest_colony()
    if mu.mass_colony(b, (dest[0] * b, dest[1] * b)) >= (ps.xi + ps.delta) * b:
        return False, "dest: destination colony not (-1)-safe"

    if z.cond_safe_cells and \
            _region_mass(mu, b, lm.w, z.cond_safe_cells) >= (ps.xi + ps.delta) * b:
        return False, "safe-region: required cells not (-1)-safe"
    if z.cond_jump_cells and \
            _region_mass(mu, b, lm.w, z.cond_jump_cells) >= (1 - ps.delta / 2) * b:
        return False, "jump-region: jump body not 1/2-good"
    if z.cond_attack_below and \
            _region_mass(mu, b, lm.w, z.cond_attack_below) >= (ps.xi + ps.delta) * b:
        return False, "attack-below: run below obstacle not (-1)-safe"
    if z.cond_attack_good and \
            _region_mass(mu, b, lm.w, z.cond_attack_good) >= b:
        return False, "attack-good: attack body/reduced body not good"
    return True, "ok"


# -- the devil's constraints ----------------------------------------------------


def measure_step_ok(prev: Configuration, nxt: Configuration,
                    ps: ParamSet) -> tuple[bool, str]:
    dt = nxt.t - prev.t
    if dt < 0:
        return False, "time: clock moved backward"
    dmass = nxt.mu.total - prev.mu.total
    if dmass < 0:
        return False, "measure: total decreased"
    if dmass > ps.sigma * dt:
        return False, "budget: deposit exceeds sigma * dt"
    same_backing = nxt.mu._backing is prev.mu._backing and \
        nxt.mu._version >= prev.mu._version
    if not same_backing and not nxt.mu.dominates(prev.mu):
        return False, "measure: not pointwise nondecreasing"
    return True, "ok"


def _temporal_scan(configs: list[Configuration], moves: list[LocatedMove],
                   witnesses: list[LocatedMove | None], b: int,
                   ps: ParamSet) -> tuple[int, Rat] | None:
    """Reference check of every simple-suffix time bound of a d-history.

    Returns (suffix start index, deficit) for the first violated bound,
    scanning from the newest suffix backward and stopping at the first
    non-simple extension.
    """
    m = len(moves)
    if m == 0 or len(configs) != m + 1:
        return None
    mu_end = configs[m].mu
    t_end = configs[m].t
    union: set[Cell] = set()
    seen_strict: set[Cell] = set()
    mass = ZERO
    gc = 0
    profit = 0
    for i in range(m - 1, -1, -1):
        lm = moves[i]
        body = lm.body_colonies()
        if lm.z.kind is not Kind.FINISH:
            if any(c in seen_strict for c in body):
                break  # suffix [i:] and all longer ones are not simple
            allowed = {lm.w} | _behind_cells(lm)
            wit = witnesses[i]
            if wit is not None:
                allowed |= set(wit.body_colonies())
            for c in body:
                if c not in allowed:
                    seen_strict.add(c)
        for c in body:
            if c not in union:
                union.add(c)
                mass += mu_end.mass_colony(b, (c[0] * b, c[1] * b))
        gc += geometric_cost(configs[i], lm, configs[i + 1], b)
        if lm.z.kind is Kind.ATTACK_CONT and configs[i + 1].j == FAIL:
            profit += 1
        tau = ps.rho1 * mass - ps.rho2 * profit * b + gc
        elapsed = t_end - configs[i].t
        if elapsed > tau:
            return i, elapsed - tau
    return None


def matched_witnesses(configs, moves, initial_witness):
    """Per-unit witness bodies for the continuing-move overlap exemption."""
    out = []
    for i, mv in enumerate(moves):
        wit = None
        if mv.z.is_continuing:
            if i == 0:
                cand = initial_witness if configs[0].j == FAIL else None
            else:
                cand = moves[i - 1] if configs[i].j == FAIL else None
            if cand is not None and witness_matches(cand.z, mv.z):
                wit = cand
        out.append(wit)
    return out


def temporal_violation(history: History, ps: ParamSet,
                       extra: tuple[LocatedMove, Configuration] | None = None):
    configs = list(history.configs)
    moves = list(history.moves)
    if extra is not None:
        moves.append(extra[0])
        configs.append(extra[1])
    witnesses = matched_witnesses(configs, moves, history.initial_witness)
    return _temporal_scan(configs, moves, witnesses, history.b, ps)


def devil_allowed(prev: Configuration, lm: LocatedMove, nxt: Configuration,
                  g: GameSpec, history: History | None = None,
                  tracker: "TimeBoundTracker | None" = None) -> tuple[bool, str]:
    """Whether the devil may answer `lm` with configuration `nxt`."""
    z = lm.z
    b = g.b
    ok, why = measure_step_ok(prev, nxt, g.ps)
    if not ok:
        return False, why

    land = colony_units(b, nxt.p)
    rel = (land[0] - lm.w[0], land[1] - lm.w[1])
    if nxt.j == SUCC:
        if rel != z.dest:
            return False, "landing: success must end in the destination colony"
        if not g.k_start(nxt.mu, nxt.p, z.land_dir):
            return False, "landing: success point not clear in landing direction"
    elif nxt.j == FAIL:
        if not z.failable:
            return False, "failure: only attack-bearing moves can fail"
        if rel not in z.transits:
            return False, "failure: must end in a transit colony"
        if not g.k_fail(nxt.mu, nxt.p, lm):
            return False, "failure: point not clear for failure of this move"
        if _region_mass(nxt.mu, b, lm.w, z.cond_attack_good) < b:
            return False, "failure: required run is not bad at end time"
    else:
        return False, f"verdict: unknown j {nxt.j!r}"

    if history is not None:
        if tracker is not None:
            wit = None
            if z.is_continuing:
                wit = find_witness(history, lm)
            bad = tracker.preview_violation(lm, prev, nxt, witness=wit)
        else:
            bad = temporal_violation(history, g.ps, extra=(lm, nxt))
        if bad is not None:
            return False, f"temporal: suffix at {bad[0]} over bound by {bad[1]}"
    return True, "ok"


# -- incremental time-bound tracking -------------------------------------------


class _SegTree:
    """Range-add / range-min tree over exact rationals."""

    def __init__(self):
        self.n = 1
        self.add = [ZERO, ZERO]
        self.mn = [ZERO, ZERO]
        self.size = 0

    def _grow(self):
        old_n, old_size = self.n, self.size
        values = [self.point_value(i) for i in range(old_size)]
        self.n = old_n * 2
        self.add = [ZERO] * (2 * self.n)
        self.mn = [ZERO] * (2 * self.n)
        self.size = 0
        for v in values:
            self.append(v)

    def append(self, value):
        if self.size == self.n:
            self._grow()
        i = self.size
        self.size += 1
        self._set_point(1, 0, self.n - 1, i, value)

    def _set_point(self, node, lo, hi, i, value):
        if lo == hi:
            self.mn[node] = value
            self.add[node] = ZERO
            return
        mid = (lo + hi) // 2
        if i <= mid:
            self._set_point(2 * node, lo, mid, i, value - self.add[node])
        else:
            self._set_point(2 * node + 1, mid + 1, hi, i, value - self.add[node])
        self.mn[node] = min(self.mn[2 * node] + self.add[2 * node],
                            self.mn[2 * node + 1] + self.add[2 * node + 1])

    def point_value(self, i):
        node, lo, hi = 1, 0, self.n - 1
        total = ZERO
        while lo != hi:
            total += self.add[node]
            mid = (lo + hi) // 2
            if i <= mid:
                node, hi = 2 * node, mid
            else:
                node, lo = 2 * node + 1, mid + 1
        return total + self.add[node] + self.mn[node]

    def range_add(self, l, r, delta):
        if l > r:
            return
        self._range_add(1, 0, self.n - 1, l, r, delta)

    def _range_add(self, node, lo, hi, l, r, delta):
        if r < lo or hi < l:
            return
        if l <= lo and hi <= r:
            self.add[node] += delta
            return
        mid = (lo + hi) // 2
        self._range_add(2 * node, lo, mid, l, r, delta)
        self._range_add(2 * node + 1, mid + 1, hi, l, r, delta)
        self.mn[node] = min(self.mn[2 * node] + self.add[2 * node],
                            self.mn[2 * node + 1] + self.add[2 * node + 1])

    def range_min(self, l, r):
        if l > r or self.size == 0:
            return None
        return self._range_min(1, 0, self.n - 1, l, r)

    def _range_min(self, node, lo, hi, l, r):
        if r < lo or hi < l:
            return None
        if l <= lo and hi <= r:
            return self.mn[node] + self.add[node]
        mid = (lo + hi) // 2
        a = self._range_min(2 * node, lo, mid, l, r)
        b = self._range_min(2 * node + 1, mid + 1, hi, l, r)
        if a is None:
            out = b
        elif b is None:
            out = a
        else:
            out = min(a, b)
        return None if out is None else out + self.add[node]


class TimeBoundTracker:
    """Incrementally maintained slack of every simple-suffix time bound.

    Entry i holds tau(suffix from unit i) minus its elapsed time; the
    devil's clock headroom is the minimum over the still-simple window.
    Equivalent to the reference `_temporal_scan`, but O(log) per unit.
    """

    def __init__(self, b: int, ps: ParamSet):
        self.b = b
        self.ps = ps
        self.st = _SegTree()
        self.lo = 0
        self.k = -1
        self.last_mass: dict[Cell, int] = {}
        self.last_union: dict[Cell, int] = {}
        self.prev_mu_total = ZERO

    def _unit_ops(self, lm: LocatedMove, prev: Configuration, nxt: Configuration,
                  witness: LocatedMove | None):
        """The (range_add) operations a new unit implies, plus the new lo."""
        b, ps = self.b, self.ps
        k = self.k + 1
        ops = []
        deposits = nxt.mu.total - prev.mu.total
        body = lm.body_colonies()
        body_set = set(body)
        if deposits != 0:
            # Per-cell deltas: only cells already inside some suffix union
            # matter; fresh body cells are counted at their final mass below.
            for cell, amt in nxt.mu.deltas_since(prev.mu):
                col = colony_units(b, cell)
                last = self.last_mass.get(col)
                if last is not None and col not in body_set:
                    ops.append((0, last, ps.rho1 * amt))
        for col in body_set:
            last = self.last_mass.get(col, -1)
            m = nxt.mu.mass_colony(b, (col[0] * b, col[1] * b))
            if m != 0:
                ops.append((last + 1, k, ps.rho1 * m))
        gc = geometric_cost(prev, lm, nxt, b)
        profit = ps.rho2 * b if (lm.z.kind is Kind.ATTACK_CONT and nxt.j == FAIL) else ZERO
        dt = nxt.t - prev.t
        ops.append((0, k, gc - profit - dt))
        new_lo = self.lo
        if lm.z.kind is not Kind.FINISH:
            allowed = {lm.w} | _behind_cells(lm)
            if witness is not None:
                allowed |= set(witness.body_colonies())
            for col in body_set:
                if col not in allowed:
                    last = self.last_union.get(col)
                    if last is not None and last + 1 > new_lo:
                        new_lo = last + 1
        return ops, body_set, new_lo

    def append(self, lm: LocatedMove, prev: Configuration, nxt: Configuration,
               witness: LocatedMove | None = None):
        ops, body_set, new_lo = self._unit_ops(lm, prev, nxt, witness)
        self.k += 1
        self.st.append(ZERO)
        for l, r, delta in ops:
            self.st.range_add(l, r, delta)
        non_finish = lm.z.kind is not Kind.FINISH
        for col in body_set:
            self.last_mass[col] = self.k
            if non_finish:
                self.last_union[col] = self.k
        self.lo = new_lo

    def min_slack(self):
        if self.k < 0:
            return None
        return self.st.range_min(self.lo, self.k)

    def preview_violation(self, lm, prev, nxt, witness=None):
        """Temporal check for a candidate unit without committing it."""
        ops, _body, new_lo = self._unit_ops(lm, prev, nxt, witness)
        self.st.append(ZERO)
        for l, r, delta in ops:
            self.st.range_add(l, r, delta)
        m = self.st.range_min(new_lo, self.k + 1)
        for l, r, delta in ops:
            self.st.range_add(l, r, -delta)
        self.st.size -= 1
        if m is not None and m < 0:
            return (new_lo, -m)
        return None

    def headroom(self, lm, prev, nxt_at_dt0, witness=None):
        """Largest integer dt the devil may spend on this unit."""
        ops, _body, new_lo = self._unit_ops(lm, prev, nxt_at_dt0, witness)
        self.st.append(ZERO)
        for l, r, delta in ops:
            self.st.range_add(l, r, delta)
        m = self.st.range_min(new_lo, self.k + 1)
        for l, r, delta in ops:
            self.st.range_add(l, r, -delta)
        self.st.size -= 1
        if m is None:
            return None
        import math
        return max(0, math.floor(m))


def _mval(hist, version):
    lo, hi = 0, len(hist)
    while lo < hi:
        mid = (lo + hi) // 2
        if hist[mid][0] <= version:
            lo = mid + 1
        else:
            hi = mid
    return hist[lo - 1][1] if lo else ZERO
