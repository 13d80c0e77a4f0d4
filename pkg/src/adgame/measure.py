"""Sparse exact-rational measures on the unit cells of Z^2.

A Measure is an immutable snapshot: deposits return a new value and never
disturb existing ones.  Internally snapshots share a versioned backing
store (per-cell histories of cumulative weights), so keeping thousands of
historical snapshots costs O(total deposits), not O(snapshots x cells).

The backing also maintains aggregate histories per colony scale (colony,
row-of-colonies and column-of-colonies sums), giving O(log) mass queries
for the aligned regions the game rules ask about constantly.
"""

from __future__ import annotations

from typing import Iterable, Iterator

from .grid import Cell, Rect, Run
from .rat import ZERO, Rat, rat


def _value_at(history: list, version: int):
    """Largest-version-<= lookup in a [(version, cumulative), ...] list."""
    lo, hi = 0, len(history)
    while lo < hi:
        mid = (lo + hi) // 2
        if history[mid][0] <= version:
            lo = mid + 1
        else:
            hi = mid
    return history[lo - 1][1] if lo else ZERO


class _Backing:
    """Shared append-only store behind a chain of Measure snapshots."""

    __slots__ = ("cells", "totals", "latest", "colony_aggs", "row_aggs",
                 "col_aggs", "q", "events")

    def __init__(self, q: int | None = None):
        self.cells: dict[Cell, list] = {}
        self.totals: list = []
        self.latest = 0
        self.q = q
        # journal of deposits per version (index = version number)
        self.events: list[list] = [[]]
        # colony_aggs[b][(X, Y)] / row_aggs[b][(Xbig, y)] / col_aggs[b][(x, Ybig)]
        self.colony_aggs: dict[int, dict] = {}
        self.row_aggs: dict[int, dict] = {}
        self.col_aggs: dict[int, dict] = {}

    def agg_keys(self, b: int, u: Cell):
        bx, by = u[0] // b, u[1] // b
        keys = [(self.colony_aggs[b], (bx, by))]
        if self.q:
            bstar = b * self.q
            keys.append((self.row_aggs[b], (u[0] // bstar, by)))
            keys.append((self.col_aggs[b], (bx, u[1] // bstar)))
        return keys

    def ensure_scale(self, b: int):
        if b in self.colony_aggs:
            return
        self.colony_aggs[b] = {}
        self.row_aggs[b] = {}
        self.col_aggs[b] = {}
        # Replay every cell history into the new aggregate histories.
        events: dict = {}
        for u, hist in self.cells.items():
            keys = self.agg_keys(b, u)
            prev = ZERO
            for ver, cum in hist:
                delta = cum - prev
                prev = cum
                if delta == 0:
                    continue
                for d, k in keys:
                    events.setdefault(id(d), (d, {}))[1].setdefault(k, []).append((ver, delta))
        for d, per_key in events.values():
            for k, evs in per_key.items():
                evs.sort()
                cum = ZERO
                hist = []
                for ver, delta in evs:
                    cum = cum + delta
                    if hist and hist[-1][0] == ver:
                        hist[-1] = (ver, cum)
                    else:
                        hist.append((ver, cum))
                d[k] = hist


class Measure:
    """Immutable sparse nonnegative measure with exact-rational weights."""

    __slots__ = ("_backing", "_version")

    def __init__(self, cells: dict | Iterable | None = None, q: int | None = None,
                 _backing: _Backing | None = None, _version: int = 0):
        if _backing is not None:
            self._backing = _backing
            self._version = _version
            return
        self._backing = _Backing(q)
        self._version = 0
        if cells:
            items = cells.items() if isinstance(cells, dict) else cells
            clean = {}
            for u, a in items:
                a = rat(a)
                if a < 0:
                    raise ValueError(f"negative weight {a} at {u}")
                if a != 0:
                    clean[u] = clean.get(u, ZERO) + a
            self._seed(clean)

    def _seed(self, clean: dict):
        b = self._backing
        total = ZERO
        for u, a in clean.items():
            b.cells[u] = [(0, a)]
            total += a
        if total != 0:
            b.totals = [(0, total)]

    # -- queries ----------------------------------------------------------

    @property
    def total(self) -> Rat:
        return _value_at(self._backing.totals, self._version)

    def get(self, u: Cell) -> Rat:
        hist = self._backing.cells.get(u)
        return _value_at(hist, self._version) if hist else ZERO

    def __getitem__(self, u: Cell) -> Rat:
        return self.get(u)

    def items(self) -> Iterator[tuple[Cell, Rat]]:
        """Nonzero cells of this snapshot (unordered)."""
        v = self._version
        for u, hist in self._backing.cells.items():
            if hist[0][0] <= v:
                val = _value_at(hist, v)
                if val != 0:
                    yield u, val

    def ncells(self) -> int:
        return sum(1 for _ in self.items())

    def ensure_scale(self, b: int) -> None:
        """Precompute aggregate indices for colony size b (idempotent)."""
        if b > 1:
            self._backing.ensure_scale(b)

    def mass_colony(self, b: int, anchor: Cell) -> Rat:
        """Mass of the size-b colony anchored at `anchor` (must be aligned)."""
        if b == 1:
            return self.get(anchor)
        bk = self._backing
        if b not in bk.colony_aggs:
            bk.ensure_scale(b)
        hist = bk.colony_aggs[b].get((anchor[0] // b, anchor[1] // b))
        return _value_at(hist, self._version) if hist else ZERO

    def mass_row_band(self, b: int, anchor: Cell) -> Rat:
        """Mass of the row of q size-b colonies starting at `anchor`.

        The row spans one level-(b*q) colony horizontally; anchor must be
        aligned to b vertically and to b*q horizontally.
        """
        bk = self._backing
        if bk.q is None:
            raise ValueError("measure built without a q; row bands unavailable")
        if b not in bk.row_aggs:
            bk.ensure_scale(b)
        hist = bk.row_aggs[b].get((anchor[0] // (b * bk.q), anchor[1] // b))
        return _value_at(hist, self._version) if hist else ZERO

    def mass_col_band(self, b: int, anchor: Cell) -> Rat:
        bk = self._backing
        if bk.q is None:
            raise ValueError("measure built without a q; column bands unavailable")
        if b not in bk.col_aggs:
            bk.ensure_scale(b)
        hist = bk.col_aggs[b].get((anchor[0] // b, anchor[1] // (b * bk.q)))
        return _value_at(hist, self._version) if hist else ZERO

    def mass_run(self, run: Run) -> Rat:
        b = run.colony_size
        q = self._backing.q
        if q and run.length == q:
            # A full row/column band of some colony: one aggregate lookup.
            bstar = b * q
            x, y = run.anchor
            if run.horizontal and x % bstar == 0:
                return self.mass_row_band(b, run.anchor)
            if not run.horizontal and y % bstar == 0:
                return self.mass_col_band(b, run.anchor)
        total = ZERO
        for anchor in run.colonies():
            total += self.mass_colony(b, anchor)
        return total

    def mass_rect(self, rect: Rect) -> Rat:
        total = ZERO
        for run in rect.row_runs():
            total += self.mass_run(run)
        return total

    def mass_cells(self, cells: Iterable[Cell]) -> Rat:
        total = ZERO
        for u in cells:
            total += self.get(u)
        return total

    def mass(self, region) -> Rat:
        """Mass of a Run, Rect, or explicit iterable of cells."""
        if isinstance(region, Run):
            return self.mass_run(region)
        if isinstance(region, Rect):
            return self.mass_rect(region)
        return self.mass_cells(region)

    def run_weights(self, run: Run) -> list[Rat]:
        """Per-colony masses of a run, 1-based order as run.colonies()."""
        b = run.colony_size
        return [self.mass_colony(b, a) for a in run.colonies()]

    # -- updates -----------------------------------------------------------

    def deposit(self, u: Cell, amount) -> "Measure":
        return self.deposit_many([(u, amount)])

    def deposit_many(self, items: Iterable[tuple[Cell, object]]) -> "Measure":
        merged: dict[Cell, Rat] = {}
        for u, a in items:
            a = rat(a)
            if a < 0:
                raise ValueError(f"negative deposit {a} at {u}")
            if a != 0:
                merged[u] = merged.get(u, ZERO) + a
        if not merged:
            return self
        bk = self._backing
        if self._version != bk.latest:
            bk = self._clone_backing()
        ver = bk.latest + 1
        total = _value_at(bk.totals, bk.latest)
        for u, a in merged.items():
            hist = bk.cells.get(u)
            if hist is None:
                bk.cells[u] = [(ver, a)]
            else:
                hist.append((ver, hist[-1][1] + a))
            total += a
            for b in bk.colony_aggs:
                for d, k in bk.agg_keys(b, u):
                    ahist = d.get(k)
                    if ahist is None:
                        d[k] = [(ver, a)]
                    elif ahist[-1][0] == ver:
                        ahist[-1] = (ver, ahist[-1][1] + a)
                    else:
                        ahist.append((ver, ahist[-1][1] + a))
        bk.totals.append((ver, total))
        bk.events.append(list(merged.items()))
        bk.latest = ver
        return Measure(_backing=bk, _version=ver)

    def _clone_backing(self) -> _Backing:
        """Fork the store at this snapshot's version (rare branch path)."""
        nb = _Backing(self._backing.q)
        total = ZERO
        for u, val in self.items():
            nb.cells[u] = [(0, val)]
            total += val
        if total != 0:
            nb.totals = [(0, total)]
        for b in self._backing.colony_aggs:
            nb.ensure_scale(b)
        return nb

    def deltas_since(self, other: "Measure"):
        """(cell, gained amount) pairs from `other` to this snapshot.

        Fast when both snapshots share a backing (the journal is replayed);
        falls back to a full comparison otherwise.
        """
        if other._backing is self._backing and other._version <= self._version:
            merged: dict[Cell, Rat] = {}
            ev = self._backing.events
            for v in range(other._version + 1, self._version + 1):
                for cell, amt in ev[v]:
                    merged[cell] = merged.get(cell, ZERO) + amt
            return list(merged.items())
        keys = set(dict(self.items())) | set(dict(other.items()))
        out = []
        for u in keys:
            d = self.get(u) - other.get(u)
            if d != 0:
                out.append((u, d))
        return out

    # -- comparison & serialization ----------------------------------------

    def as_dict(self) -> dict[Cell, Rat]:
        return dict(self.items())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Measure):
            return NotImplemented
        return self.as_dict() == other.as_dict()

    def __ne__(self, other) -> bool:
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    def __hash__(self):
        return hash(frozenset(self.as_dict().items()))

    def dominates(self, other: "Measure") -> bool:
        """True iff self >= other pointwise."""
        return all(self.get(u) >= v for u, v in other.items())

    def to_lines(self) -> list[str]:
        """One record per cell: 'x y numerator denominator', sorted by (x, y)."""
        out = []
        for (x, y), val in sorted(self.items()):
            out.append(f"{x} {y} {val.numerator} {val.denominator}")
        return out

    @classmethod
    def from_lines(cls, lines: Iterable[str], q: int | None = None) -> "Measure":
        cells = {}
        for line in lines:
            line = line.strip()
            if not line:
                continue
            x, y, num, den = line.split()
            cells[(int(x), int(y))] = rat(int(num), int(den))
        return cls(cells, q=q)

    def __repr__(self):
        n = self.ncells()
        return f"Measure(cells={n}, total={self.total})"
