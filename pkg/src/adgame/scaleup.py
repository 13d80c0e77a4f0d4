"""Scaled games: the K*-clearance relations, the frame machinery that lets
local strategies work in one canonical orientation, and the charge ledger
that accounts for digression costs.

A point is clear to start a move in the scaled game when it is clear in
the inner game, its big colony is comfortably safe, and enough clean rows
lie ahead with the first one a single step away.  Clear-for-failure
additionally demands a retreat-ready (1/2)-step-clean column behind the
landing point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .classify import is_clean, is_step_clean
from .grid import Cell, Run, colony_units, floor_to
from .measure import Measure
from .moves import (Direction, Kind, LocatedMove, MoveSpec, Sym,
                    FLIP_X, ROT_TO)
from .params import ParamSet
from .rat import ZERO, Rat, rat
from .rules import Configuration, GameSpec, angel_allowed

N, S, E, W = Direction.NORTH, Direction.SOUTH, Direction.EAST, Direction.WEST


def _band_run(bstar_anchor: Cell, b: int, q: int, d: Direction, i: int) -> Run:
    """The i-th row of a big colony counted along direction d (1-based).

    Rows are perpendicular to d; row 1 is the rearmost along d.
    """
    x0, y0 = bstar_anchor
    if d is N:
        return Run((x0, y0 + (i - 1) * b), b, q, horizontal=True)
    if d is S:
        return Run((x0, y0 + (q - i) * b), b, q, horizontal=True)
    if d is E:
        return Run((x0 + (i - 1) * b, y0), b, q, horizontal=False)
    return Run((x0 + (q - i) * b, y0), b, q, horizontal=False)


def _band_index(bstar_anchor: Cell, b: int, q: int, d: Direction, u: Cell) -> int:
    """1-based band index (along d) of the size-b cell u inside the colony."""
    dx = (u[0] - bstar_anchor[0]) // b
    dy = (u[1] - bstar_anchor[1]) // b
    if d is N:
        return dy + 1
    if d is S:
        return q - dy
    if d is E:
        return dx + 1
    return q - dx


def k_start_star(mu: Measure, p: Cell, d: Direction, inner: GameSpec) -> bool:
    """Clearance to start a move in direction d in the scaled game."""
    b = inner.b
    q = inner.ps.q
    bstar = b * q
    ps = inner.ps
    if not inner.k_start(mu, p, d):
        return False
    big = floor_to(bstar, p)
    if mu.mass_colony(bstar, big) >= (ps.xi + 2 * ps.delta) * bstar:
        return False  # big colony not (-2)-safe
    u = floor_to(b, p)
    idx = _band_index(big, b, q, d, u)
    if idx >= q:
        return False  # no rows ahead inside the colony
    ahead_clean = [i for i in range(idx + 1, q + 1)
                   if is_clean(mu, _band_run(big, b, q, d, i), 0, ps)]
    if len(ahead_clean) < ps.kappa - 2:
        return False
    if not ahead_clean or ahead_clean[0] != idx + 1:
        return False  # first clean row ahead is not one step away
    step = inner.catalog.step(d)
    lm = LocatedMove(colony_units(b, p), step)
    cfg = Configuration(0, p, mu)
    ok, _ = angel_allowed(cfg, lm, inner)
    return ok


def _column_through(body_bigs: list[Cell], bstar: int, b: int, u: Cell,
                    land: Direction, include_u: bool) -> Run | None:
    """Cells of the body in u's column, behind u along `land`, as a run.

    Returns the maximal contiguous run ending at u (inclusive or not);
    None when the run is empty.
    """
    vx, vy = land.vec
    bigset = set(body_bigs)
    cells = []
    c = u if include_u else (u[0] - vx * b, u[1] - vy * b)
    while floor_to(bstar, c) in bigset:
        cells.append(c)
        c = (c[0] - vx * b, c[1] - vy * b)
    if not cells:
        return None
    last = cells[-1]
    anchor = (min(u[0], last[0]), min(u[1], last[1]))
    horizontal = land in (E, W)
    return Run(anchor, b, len(cells), horizontal=horizontal)


def k_fail_star(mu: Measure, p: Cell, lm: LocatedMove, inner: GameSpec) -> bool:
    """Clearance to end the located big move `lm` in failure at p."""
    b = inner.b
    q = inner.ps.q
    bstar = b * q
    ps = inner.ps
    z = lm.z
    if not z.failable:
        return False
    land = z.land_dir
    pass_dir = z.pass_dir
    big = colony_units(bstar, p)
    rel = (big[0] - lm.w[0], big[1] - lm.w[1])
    if rel not in z.ends:
        return False
    u = floor_to(b, p)
    body_bigs = [((lm.w[0] + cx) * bstar, (lm.w[1] + cy) * bstar)
                 for (cx, cy) in z.cells]

    col_inc = _column_through(body_bigs, bstar, b, u, land, include_u=True)
    if inner.k_start(mu, p, pass_dir) and (
            col_inc is None or col_inc.length == 1
            or is_step_clean(mu, col_inc, rat(1, 2), ps)):
        return True

    col_exc = _column_through(body_bigs, bstar, b, u, land, include_u=False)
    col_ok = col_exc is None or col_exc.length == 1 or \
        is_step_clean(mu, col_exc, rat(1, 2), ps)
    if not col_ok:
        return False
    # A continuing located move of the inner game with matching directions
    # for which p is clear for failure.
    for level in range(-3, 2):
        z2 = inner.catalog.attack_cont(land, pass_dir, level)
        wcell = colony_units(b, p)
        for (cx, cy) in z2.cells:
            w2 = (wcell[0] - cx, wcell[1] - cy)
            if inner.k_fail(mu, p, LocatedMove(w2, z2)):
                return True
    return False


def scale_up(inner: GameSpec) -> GameSpec:
    """The game one level up: colony size B*=QB, K relations derived."""
    q = inner.ps.q

    def ks(mu, p, d):
        return k_start_star(mu, p, d, inner)

    def kf(mu, p, lm):
        return k_fail_star(mu, p, lm, inner)

    return GameSpec(b=inner.b * q, ps=inner.ps, level=inner.level + 1,
                    k_start=ks, k_fail=kf, catalog=inner.catalog,
                    toy=inner.toy, inner=inner)


# -- frames: canonical coordinates for the local strategies --------------------


@dataclass(frozen=True)
class Frame:
    """Affine cell map between canonical strategy space and the board.

    Canonical space is measured in small colonies ("cells"); the big move
    being implemented always lands northward passing east (turns: start
    north, land east).  `sym` is the linear part, `t` the translation in
    cell units; t is a multiple of q so big colonies map onto big colonies.
    """

    sym: Sym
    t: Cell
    b: int
    q: int

    @classmethod
    def for_orientation(cls, sym: Sym, big_w: Cell, canon_big: Cell,
                        b: int, q: int) -> "Frame":
        """Map canonical big colony `canon_big` onto world big colony `big_w`."""
        corners = [(canon_big[0] * q, canon_big[1] * q),
                   (canon_big[0] * q + q - 1, canon_big[1] * q + q - 1)]
        imgs = [sym.apply_cell_index(c) for c in corners]
        ax = min(i[0] for i in imgs)
        ay = min(i[1] for i in imgs)
        t = (big_w[0] * q - ax, big_w[1] * q - ay)
        return cls(sym=sym, t=t, b=b, q=q)

    def world_cell(self, c: Cell) -> Cell:
        x, y = self.sym.apply_cell_index(c)
        return (x + self.t[0], y + self.t[1])

    def canon_cell(self, wc: Cell) -> Cell:
        shifted = (wc[0] - self.t[0], wc[1] - self.t[1])
        return self.sym.inverse().apply_cell_index(shifted)

    def world_dir(self, d: Direction) -> Direction:
        return self.sym.apply_dir(d)

    def world_big(self, bc: Cell) -> Cell:
        """Big-colony units: canonical big cell to world big colony units."""
        wc = self.world_cell((bc[0] * self.q, bc[1] * self.q))
        other = self.world_cell((bc[0] * self.q + self.q - 1,
                                 bc[1] * self.q + self.q - 1))
        return (min(wc[0], other[0]) // self.q, min(wc[1], other[1]) // self.q)

    def world_spec(self, spec: MoveSpec, catalog) -> MoveSpec:
        k = spec.kind
        if k is Kind.STEP:
            return catalog.step(self.world_dir(spec.land_dir))
        if k is Kind.JUMP:
            return catalog.jump(self.world_dir(spec.land_dir))
        if k is Kind.ESCAPE:
            return catalog.escape(self.world_dir(spec.land_dir),
                                  self.world_dir(spec.pass_dir))
        if k is Kind.FINISH:
            return catalog.finish(self.world_dir(spec.land_dir), spec.finish_len)
        if k is Kind.ATTACK_NEW:
            return catalog.attack_new(self.world_dir(spec.land_dir),
                                      self.world_dir(spec.pass_dir), spec.level)
        if k is Kind.ATTACK_CONT:
            return catalog.attack_cont(self.world_dir(spec.land_dir),
                                       self.world_dir(spec.pass_dir), spec.level)
        if spec.turn_second is Kind.JUMP:
            return catalog.turn_jump(self.world_dir(spec.start_dir),
                                     self.world_dir(spec.land_dir))
        return catalog.turn_attack(self.world_dir(spec.start_dir),
                                   self.world_dir(spec.land_dir), spec.level)

    def world_move(self, w: Cell, spec: MoveSpec, catalog) -> LocatedMove:
        """Place a canonical move: w is the canonical start cell."""
        return LocatedMove(self.world_cell(w), self.world_spec(spec, catalog))

    def world_run(self, anchor: Cell, length: int, horizontal: bool) -> Run:
        """Canonical cell run to a world run at scale b."""
        if horizontal:
            last = (anchor[0] + length - 1, anchor[1])
        else:
            last = (anchor[0], anchor[1] + length - 1)
        a = self.world_cell(anchor)
        z = self.world_cell(last)
        wa = (min(a[0], z[0]) * self.b, min(a[1], z[1]) * self.b)
        return Run(wa, self.b, length, horizontal=(a[1] == z[1]))


def orientation_sym(land: Direction, pass_dir: Direction | None) -> Sym:
    """The symmetry mapping canonical north/pass-east onto (land, pass)."""
    rot = ROT_TO[land]
    if pass_dir is None:
        return rot
    if rot.apply_dir(E) is pass_dir:
        return rot
    sym = rot.compose(FLIP_X)
    assert sym.apply_dir(N) is land and sym.apply_dir(E) is pass_dir
    return sym


class CanonView:
    """Measure queries in canonical coordinates (weights in canonical order)."""

    def __init__(self, mu: Measure, frame: Frame, ps: ParamSet):
        self.mu = mu
        self.frame = frame
        self.ps = ps
        self.b = frame.b

    def weight(self, c: Cell) -> Rat:
        wc = self.frame.world_cell(c)
        return self.mu.mass_colony(self.b, (wc[0] * self.b, wc[1] * self.b))

    def col_weights(self, x: int, y_lo: int, y_hi: int) -> list[Rat]:
        return [self.weight((x, y)) for y in range(y_lo, y_hi + 1)]

    def row_weights(self, y: int, x_lo: int, x_hi: int) -> list[Rat]:
        return [self.weight((x, y)) for x in range(x_lo, x_hi + 1)]

    def run_mass(self, anchor: Cell, length: int, horizontal: bool) -> Rat:
        return self.mu.mass_run(self.frame.world_run(anchor, length, horizontal))

    def row_clean(self, y: int, x_lo: int, length: int, i=0) -> bool:
        return is_clean(self.mu, self.frame.world_run((x_lo, y), length, True),
                        i, self.ps)

    def col_clean(self, x: int, y_lo: int, length: int, i=0) -> bool:
        return is_clean(self.mu, self.frame.world_run((x, y_lo), length, False),
                        i, self.ps)


# -- charge ledger ---------------------------------------------------------------


@dataclass
class LedgerEntry:
    digression_id: str
    region: tuple[Cell, ...]      # canonical small-colony cells
    world_region: tuple[Cell, ...]  # world small-colony units
    charge: Rat
    kind: str                     # blameable-run | scapegoat-cell | profit-compensation
    covering: Rat = ZERO          # scapegoat mass at settlement time

    def describe(self) -> str:
        cells = ";".join(f"{x},{y}" for x, y in sorted(self.world_region))
        return (f"{self.digression_id} kind={self.kind} "
                f"charge={self.charge.numerator}/{self.charge.denominator} "
                f"covering={self.covering.numerator}/{self.covering.denominator} "
                f"region={cells}")


class ChargeLedger:
    """Scapegoat accounting for one big move's implementation."""

    def __init__(self, frame: Frame):
        self.frame = frame
        self.entries: list[LedgerEntry] = []
        self._n = 0

    def charge(self, region_cells, amount: Rat, kind: str) -> LedgerEntry:
        self._n += 1
        region = tuple(sorted(set(region_cells)))
        world = tuple(sorted(self.frame.world_cell(c) for c in region))
        e = LedgerEntry(f"d{self._n}", region, world, amount, kind)
        self.entries.append(e)
        return e

    def verify(self, mu_end: Measure, b: int, ps: ParamSet,
               path_world_colonies: set[Cell], profit_count: int) -> list[str]:
        """Solvency and disjointness report; empty when the ledger is sound."""
        problems = []
        seen: set[Cell] = set()
        profit_budget = ps.rho2 * b * profit_count
        profit_charged = ZERO
        for e in self.entries:
            cells = set(e.world_region)
            if cells & seen:
                problems.append(f"{e.digression_id}: scapegoat overlaps another")
            if cells & path_world_colonies:
                problems.append(f"{e.digression_id}: scapegoat overlaps the path")
            seen |= cells
            if e.kind == "profit-compensation":
                profit_charged += e.charge
                continue
            mass = ZERO
            for c in cells:
                mass += mu_end.mass_colony(b, (c[0] * b, c[1] * b))
            if ps.rho1 * mass < e.charge:
                problems.append(
                    f"{e.digression_id}: charge {e.charge} exceeds rho1*mass "
                    f"{ps.rho1 * mass}")
        if profit_charged > profit_budget:
            problems.append(
                f"profit compensation {profit_charged} exceeds budget "
                f"{profit_budget} ({profit_count} failed continuing attacks)")
        return problems
