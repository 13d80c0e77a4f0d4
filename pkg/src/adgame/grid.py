"""Integer lattice geometry: cells, colony alignment, runs and rectangles.

Cells are unit squares of Z^2 identified by their south-west corner.  A
colony of size B is a B-aligned BxB square; a run is a line of adjacent
equal colonies.  All coordinates are unbounded Python ints, so arithmetic
can never wrap.
"""

from __future__ import annotations

from dataclasses import dataclass

Cell = tuple[int, int]


def floor_to(b: int, u: Cell) -> Cell:
    """Anchor of the size-b colony containing u (floor division toward -inf)."""
    if b < 1:
        raise ValueError(f"colony size must be >= 1, got {b}")
    return (b * (u[0] // b), b * (u[1] // b))


def colony_units(b: int, u: Cell) -> Cell:
    """Colony position of u in colony units: floor(u / b) componentwise."""
    return (u[0] // b, u[1] // b)


@dataclass(frozen=True)
class Run:
    """A run of `length` adjacent colonies of size `colony_size`.

    `anchor` is the south-west corner of the first (southmost / westmost)
    colony and must be aligned to the colony size.
    """

    anchor: Cell
    colony_size: int
    length: int
    horizontal: bool = False

    def __post_init__(self):
        b = self.colony_size
        if b < 1 or self.length < 1:
            raise ValueError("run needs colony_size >= 1 and length >= 1")
        if self.anchor[0] % b or self.anchor[1] % b:
            raise ValueError(f"run anchor {self.anchor} not aligned to {b}")

    @property
    def side(self) -> int:
        """|U_1|: the side length of one colony."""
        return self.colony_size

    def colony(self, i: int) -> Cell:
        """Anchor of the i-th colony, 1-based from the anchor end."""
        if not 1 <= i <= self.length:
            raise IndexError(f"colony index {i} out of 1..{self.length}")
        x, y = self.anchor
        b = self.colony_size
        return (x + (i - 1) * b, y) if self.horizontal else (x, y + (i - 1) * b)

    def colonies(self) -> list[Cell]:
        return [self.colony(i) for i in range(1, self.length + 1)]

    def sub(self, start: int, stop: int) -> "Run":
        """Sub-run covering colonies start..stop inclusive (1-based)."""
        if not 1 <= start <= stop <= self.length:
            raise IndexError(f"sub-run {start}..{stop} out of 1..{self.length}")
        return Run(self.colony(start), self.colony_size, stop - start + 1, self.horizontal)

    def index_of(self, anchor: Cell) -> int:
        """1-based index of the colony with the given anchor."""
        dx = anchor[0] - self.anchor[0]
        dy = anchor[1] - self.anchor[1]
        b = self.colony_size
        if self.horizontal:
            if dy != 0 or dx % b or not 0 <= dx // b < self.length:
                raise ValueError(f"{anchor} not a colony of {self}")
            return dx // b + 1
        if dx != 0 or dy % b or not 0 <= dy // b < self.length:
            raise ValueError(f"{anchor} not a colony of {self}")
        return dy // b + 1

    def contains_colony(self, anchor: Cell) -> bool:
        try:
            self.index_of(anchor)
            return True
        except ValueError:
            return False

    def contains_cell(self, u: Cell) -> bool:
        b = self.colony_size
        x, y = self.anchor
        if self.horizontal:
            return y <= u[1] < y + b and x <= u[0] < x + self.length * b
        return x <= u[0] < x + b and y <= u[1] < y + self.length * b

    def cells(self):
        """Iterate every unit cell of the run (use only at small sizes)."""
        b = self.colony_size
        x0, y0 = self.anchor
        w = self.length * b if self.horizontal else b
        h = b if self.horizontal else self.length * b
        for dx in range(w):
            for dy in range(h):
                yield (x0 + dx, y0 + dy)


@dataclass(frozen=True)
class Rect:
    """A grid of colonies: `cols` columns x `rows` rows of size-B squares."""

    anchor: Cell
    colony_size: int
    cols: int
    rows: int

    def __post_init__(self):
        b = self.colony_size
        if self.anchor[0] % b or self.anchor[1] % b:
            raise ValueError(f"rect anchor {self.anchor} not aligned to {b}")

    def row(self, i: int) -> Run:
        """i-th row (1-based, south to north) as a horizontal run."""
        if not 1 <= i <= self.rows:
            raise IndexError(f"row {i} out of 1..{self.rows}")
        x, y = self.anchor
        return Run((x, y + (i - 1) * self.colony_size), self.colony_size, self.cols, True)

    def col(self, j: int) -> Run:
        """j-th column (1-based, west to east) as a vertical run."""
        if not 1 <= j <= self.cols:
            raise IndexError(f"col {j} out of 1..{self.cols}")
        x, y = self.anchor
        return Run((x + (j - 1) * self.colony_size, y), self.colony_size, self.rows, False)

    def row_runs(self) -> list[Run]:
        return [self.row(i) for i in range(1, self.rows + 1)]

    def col_runs(self) -> list[Run]:
        return [self.col(j) for j in range(1, self.cols + 1)]
