"""The move catalog: templates, end sets, destinations, transit positions
and the symmetry machinery that generates every orientation from the
northward prototypes.

Template coordinates are colony offsets relative to the starting colony
(the angel's colony is always offset (0, 0)).  Scale enters only when a
located move is laid onto the board.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

from .grid import Cell


class Direction(enum.Enum):
    NORTH = (0, 1)
    SOUTH = (0, -1)
    EAST = (1, 0)
    WEST = (-1, 0)

    @property
    def vec(self) -> Cell:
        return self.value

    @property
    def letter(self) -> str:
        return self.name[0]

    @property
    def opposite(self) -> "Direction":
        return _OPP[self]


N, S, E, W = Direction.NORTH, Direction.SOUTH, Direction.EAST, Direction.WEST
_OPP = {N: S, S: N, E: W, W: E}
DIR_BY_LETTER = {d.letter: d for d in Direction}


@dataclass(frozen=True)
class Sym:
    """An element of the square's symmetry group as an integer matrix."""

    a: int
    b: int
    c: int
    d: int

    def apply(self, v: Cell) -> Cell:
        return (self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1])

    def apply_dir(self, d: Direction) -> Direction:
        return Direction(self.apply(d.vec))

    def apply_cells(self, cells) -> frozenset:
        return frozenset(self.apply(c) for c in cells)

    def apply_cell_index(self, c: Cell) -> Cell:
        """Map a unit-square index (square [c, c+1)^2), not just a point."""
        x, y = self.apply(c)
        return (x + min(self.a, 0) + min(self.b, 0),
                y + min(self.c, 0) + min(self.d, 0))

    def compose(self, other: "Sym") -> "Sym":
        """self after other: (self*other).apply(v) == self.apply(other.apply(v))."""
        return Sym(self.a * other.a + self.b * other.c,
                   self.a * other.b + self.b * other.d,
                   self.c * other.a + self.d * other.c,
                   self.c * other.b + self.d * other.d)

    def inverse(self) -> "Sym":
        det = self.a * self.d - self.b * self.c
        assert det in (1, -1)
        return Sym(self.d * det, -self.b * det, -self.c * det, self.a * det)


IDENT = Sym(1, 0, 0, 1)
ROT_CW = Sym(0, 1, -1, 0)        # north -> east
FLIP_X = Sym(-1, 0, 0, 1)        # east <-> west, fixes north
TRANSPOSE = Sym(0, 1, 1, 0)      # swaps north and east

ROT_TO = {N: IDENT, E: ROT_CW, S: ROT_CW.compose(ROT_CW),
          W: ROT_CW.compose(ROT_CW).compose(ROT_CW)}

ALL_SYMS = [ROT_TO[d].compose(f) for d in (N, E, S, W) for f in (IDENT, FLIP_X)]


class Kind(enum.Enum):
    STEP = "step"
    JUMP = "jump"
    TURN = "turn"
    ESCAPE = "escape"
    FINISH = "finish"
    ATTACK_NEW = "attack.new"
    ATTACK_CONT = "attack.cont"


NEW_KINDS = {Kind.STEP, Kind.JUMP, Kind.TURN, Kind.ATTACK_NEW}
CONTINUING_KINDS = {Kind.ESCAPE, Kind.FINISH, Kind.ATTACK_CONT}


@dataclass(frozen=True)
class MoveSpec:
    """One potential move: template, ends, destination and rule regions."""

    name: str
    kind: Kind
    start_dir: Direction
    land_dir: Direction
    pass_dir: Direction | None
    cells: frozenset          # template H, colony offsets
    ends: frozenset           # E subset of H
    dest: Cell
    transits: frozenset       # T subset of E (attack-bearing moves only)
    obstacle: Cell | None = None
    level: int | None = None
    finish_len: int | None = None
    turn_second: Kind | None = None       # JUMP or ATTACK_NEW for turns
    reduced: frozenset | None = None      # continuing attacks and escapes
    # Rule regions (colony offsets) for the angel's constraints:
    cond_safe_cells: frozenset = frozenset()    # must be (-1)-safe
    cond_jump_cells: frozenset = frozenset()    # must be 1/2-good
    cond_attack_below: frozenset = frozenset()  # (A): must be (-1)-safe
    cond_attack_good: frozenset = frozenset()   # (B): must be good; bad on failure

    @property
    def is_new(self) -> bool:
        return self.kind in NEW_KINDS

    @property
    def is_continuing(self) -> bool:
        return self.kind in CONTINUING_KINDS

    @property
    def failable(self) -> bool:
        """Only moves with an attack component can end in failure."""
        return self.kind in (Kind.ATTACK_NEW, Kind.ATTACK_CONT) or \
            self.turn_second is Kind.ATTACK_NEW

    @property
    def fail_dirs(self) -> tuple[Direction, Direction] | None:
        """(landing, passing) of the attack component, for witness matching."""
        if not self.failable:
            return None
        return (self.land_dir, self.pass_dir)

    def __repr__(self):
        return f"MoveSpec({self.name})"


def _spec(name, kind, start, land, pass_, cells, dest, transits=(),
          obstacle=None, level=None, finish_len=None, turn_second=None,
          reduced=None, safe_cells=(), jump_cells=(), attack_below=(),
          attack_good=()) -> MoveSpec:
    cells = frozenset(cells)
    transits = frozenset(transits)
    ends = frozenset({dest}) | transits
    assert ends <= cells and dest in ends
    return MoveSpec(name=name, kind=kind, start_dir=start, land_dir=land,
                    pass_dir=pass_, cells=cells, ends=ends, dest=dest,
                    transits=transits, obstacle=obstacle, level=level,
                    finish_len=finish_len, turn_second=turn_second,
                    reduced=None if reduced is None else frozenset(reduced),
                    cond_safe_cells=frozenset(safe_cells),
                    cond_jump_cells=frozenset(jump_cells),
                    cond_attack_below=frozenset(attack_below),
                    cond_attack_good=frozenset(attack_good))


_ATTACK_PRE = [(0, -3), (0, -2), (0, -1), (0, 0), (0, 1)]  # obstacle (0,0), dest (0,1)


def _new_attack_proto(level: int, literal: bool) -> dict:
    """Northward new attack passing east, level -4 <= level <= -1."""
    start = (0, level)
    pre = set(_ATTACK_PRE) | {start}
    shift = lambda c: (c[0] - start[0], c[1] - start[1])
    cells = {shift(c) for c in pre}
    obstacle = shift((0, 0))
    dest = shift((0, 1))
    transits = {shift((0, -1)), shift((0, 0)), shift((0, 1))}
    below = {c for c in cells if c[1] < obstacle[1]}
    return dict(cells=cells, dest=dest, transits=transits, obstacle=obstacle,
                attack_below=below, attack_good=cells, reduced=None)


def _cont_attack_proto(level: int, literal: bool) -> dict:
    """Northward continuing attack passing east, -3 <= level <= 1.

    The template is U plus the two western start cells; the literal variant
    also carries the (0, -level) cell exactly as written.
    """
    start = (-1, level)
    pre = set(_ATTACK_PRE) | {(-1, level), (-1, level + 1)}
    if literal:
        pre.add((0, -level))
    shift = lambda c: (c[0] - start[0], c[1] - start[1])
    cells = {shift(c) for c in pre}
    obstacle = shift((0, 0))
    dest = shift((0, 1))
    transits = {shift((0, -1)), shift((0, 0)), shift((0, 1))}
    reduced = {c for c in cells if c[0] == 1}
    below = {c for c in reduced if c[1] < obstacle[1]}
    return dict(cells=cells, dest=dest, transits=transits, obstacle=obstacle,
                attack_below=below, attack_good=reduced, reduced=reduced)


def _transform(proto: MoveSpec, sym: Sym, name: str) -> MoveSpec:
    f = sym.apply
    fs = sym.apply_cells
    return MoveSpec(
        name=name, kind=proto.kind,
        start_dir=sym.apply_dir(proto.start_dir),
        land_dir=sym.apply_dir(proto.land_dir),
        pass_dir=None if proto.pass_dir is None else sym.apply_dir(proto.pass_dir),
        cells=fs(proto.cells), ends=fs(proto.ends), dest=f(proto.dest),
        transits=fs(proto.transits),
        obstacle=None if proto.obstacle is None else f(proto.obstacle),
        level=proto.level, finish_len=proto.finish_len,
        turn_second=proto.turn_second,
        reduced=None if proto.reduced is None else fs(proto.reduced),
        cond_safe_cells=fs(proto.cond_safe_cells),
        cond_jump_cells=fs(proto.cond_jump_cells),
        cond_attack_below=fs(proto.cond_attack_below),
        cond_attack_good=fs(proto.cond_attack_good))


def _build_catalog(literal: bool) -> list[MoveSpec]:
    """All orientations of every prototype; northward/pass-east canonical."""
    protos: list[MoveSpec] = []

    protos.append(_spec("step.N", Kind.STEP, N, N, None,
                        {(0, 0), (0, 1)}, (0, 1),
                        safe_cells={(0, 0), (0, 1)}))
    protos.append(_spec("jump.N", Kind.JUMP, N, N, None,
                        {(0, 0), (0, 1), (0, 2)}, (0, 2), obstacle=(0, 1),
                        jump_cells={(0, 0), (0, 1), (0, 2)}))
    protos.append(_spec("escape.N.passE", Kind.ESCAPE, N, N, E,
                        {(0, 0), (0, 1), (1, 0), (1, -1)}, (1, 0),
                        reduced={(1, 0), (1, -1)},
                        safe_cells={(1, 0), (1, -1)}))
    for ln in range(1, 6):
        cells = {(0, k) for k in range(ln + 1)}
        protos.append(_spec(f"finish.N.len{ln}", Kind.FINISH, N, N, None,
                            cells, (0, ln), finish_len=ln))
    for s in range(-4, 0):
        d = _new_attack_proto(s, literal)
        protos.append(_spec(f"attack.new.N.passE.level{s:+d}", Kind.ATTACK_NEW,
                            N, N, E, d["cells"], d["dest"], d["transits"],
                            obstacle=d["obstacle"], level=s,
                            attack_below=d["attack_below"],
                            attack_good=d["attack_good"]))
    for s in range(-3, 2):
        d = _cont_attack_proto(s, literal)
        protos.append(_spec(f"attack.cont.N.passE.level{s:+d}", Kind.ATTACK_CONT,
                            N, N, E, d["cells"], d["dest"], d["transits"],
                            obstacle=d["obstacle"], level=s, reduced=d["reduced"],
                            attack_below=d["attack_below"],
                            attack_good=d["attack_good"]))

    # Turns: northward step + eastward second part (jump or new attack
    # sweeping north).  The attack component's passing direction is the
    # turn's starting direction.
    step_cells = {(0, 0), (0, 1)}
    step_dest = (0, 1)
    off = lambda cs: {(step_dest[0] + x, step_dest[1] + y) for (x, y) in cs}
    ejump = {(0, 0), (1, 0), (2, 0)}
    protos.append(_spec("turn.N.landE.jump", Kind.TURN, N, E, None,
                        step_cells | off(ejump), (step_dest[0] + 2, step_dest[1]),
                        obstacle=(step_dest[0] + 1, step_dest[1]),
                        turn_second=Kind.JUMP,
                        safe_cells=step_cells, jump_cells=off(ejump)))
    for s in range(-4, 0):
        d = _new_attack_proto(s, literal)
        tr = TRANSPOSE  # north attack passing east -> east attack passing north
        cells = {tr.apply(c) for c in d["cells"]}
        protos.append(_spec(f"turn.N.landE.attack.level{s:+d}", Kind.TURN, N, E, N,
                            step_cells | off(cells),
                            (step_dest[0] + tr.apply(d["dest"])[0],
                             step_dest[1] + tr.apply(d["dest"])[1]),
                            off({tr.apply(c) for c in d["transits"]}),
                            obstacle=(step_dest[0] + tr.apply(d["obstacle"])[0],
                                      step_dest[1] + tr.apply(d["obstacle"])[1]),
                            level=s, turn_second=Kind.ATTACK_NEW,
                            safe_cells=step_cells,
                            attack_below=off({tr.apply(c) for c in d["attack_below"]}),
                            attack_good=off({tr.apply(c) for c in d["attack_good"]})))

    out: list[MoveSpec] = []
    seen: set[str] = set()
    for proto in protos:
        reflectable = proto.pass_dir is not None or proto.kind is Kind.TURN
        for d in (N, E, S, W):
            for flip in ((IDENT, FLIP_X) if reflectable else (IDENT,)):
                sym = ROT_TO[d].compose(flip)
                cand = _transform(proto, sym, "?")
                name = _name_of(cand)
                if name in seen:
                    continue
                seen.add(name)
                out.append(_transform(proto, sym, name))
    return out


def _name_of(ms: MoveSpec) -> str:
    k = ms.kind
    if k is Kind.STEP:
        return f"step.{ms.land_dir.letter}"
    if k is Kind.JUMP:
        return f"jump.{ms.land_dir.letter}"
    if k is Kind.ESCAPE:
        return f"escape.{ms.land_dir.letter}.pass{ms.pass_dir.letter}"
    if k is Kind.FINISH:
        return f"finish.{ms.land_dir.letter}.len{ms.finish_len}"
    if k is Kind.ATTACK_NEW:
        return f"attack.new.{ms.land_dir.letter}.pass{ms.pass_dir.letter}.level{ms.level:+d}"
    if k is Kind.ATTACK_CONT:
        return f"attack.cont.{ms.land_dir.letter}.pass{ms.pass_dir.letter}.level{ms.level:+d}"
    if ms.turn_second is Kind.JUMP:
        return f"turn.{ms.start_dir.letter}.land{ms.land_dir.letter}.jump"
    return (f"turn.{ms.start_dir.letter}.land{ms.land_dir.letter}"
            f".attack.level{ms.level:+d}")


class Catalog:
    """The finite move set Pi plus name and kind lookups."""

    def __init__(self, literal_cont_template: bool = True):
        self.literal_cont_template = literal_cont_template
        self.specs = _build_catalog(literal_cont_template)
        self.by_name = {ms.name: ms for ms in self.specs}

    def __iter__(self):
        return iter(self.specs)

    def __len__(self):
        return len(self.specs)

    def get(self, name: str) -> MoveSpec:
        return self.by_name[name]

    def step(self, d: Direction) -> MoveSpec:
        return self.get(f"step.{d.letter}")

    def jump(self, d: Direction) -> MoveSpec:
        return self.get(f"jump.{d.letter}")

    def escape(self, d: Direction, p: Direction) -> MoveSpec:
        return self.get(f"escape.{d.letter}.pass{p.letter}")

    def finish(self, d: Direction, length: int) -> MoveSpec:
        return self.get(f"finish.{d.letter}.len{length}")

    def attack_new(self, d: Direction, p: Direction, level: int) -> MoveSpec:
        return self.get(f"attack.new.{d.letter}.pass{p.letter}.level{level:+d}")

    def attack_cont(self, d: Direction, p: Direction, level: int) -> MoveSpec:
        return self.get(f"attack.cont.{d.letter}.pass{p.letter}.level{level:+d}")

    def turn_jump(self, start: Direction, land: Direction) -> MoveSpec:
        return self.get(f"turn.{start.letter}.land{land.letter}.jump")

    def turn_attack(self, start: Direction, land: Direction, level: int) -> MoveSpec:
        return self.get(f"turn.{start.letter}.land{land.letter}.attack.level{level:+d}")


CATALOG = Catalog(literal_cont_template=True)
CATALOG_TYPOFIX = Catalog(literal_cont_template=False)


class LocatedMove(NamedTuple):
    """A move placed at a colony position (colony units)."""

    w: Cell
    z: MoveSpec

    def body_colonies(self) -> list[Cell]:
        wx, wy = self.w
        return [(wx + x, wy + y) for (x, y) in self.z.cells]

    def offset_colonies(self, offsets) -> list[Cell]:
        wx, wy = self.w
        return [(wx + x, wy + y) for (x, y) in offsets]

    def end_colonies(self) -> list[Cell]:
        return self.offset_colonies(self.z.ends)

    def dest_colony(self) -> Cell:
        return (self.w[0] + self.z.dest[0], self.w[1] + self.z.dest[1])

    def reduced_colonies(self) -> list[Cell]:
        if self.z.reduced is None:
            raise ValueError(f"{self.z.name} has no reduced body")
        return self.offset_colonies(self.z.reduced)

    def name(self) -> str:
        return f"{self.z.name}@{self.w[0]},{self.w[1]}"


def body_cells(lm: LocatedMove, b: int):
    """Every unit cell of the body at scale b (small scales only)."""
    for (cx, cy) in lm.body_colonies():
        for dx in range(b):
            for dy in range(b):
                yield (cx * b + dx, cy * b + dy)
