"""Run classification: good/safe/step-clean/unimodal/clean, obstacles,
walks, secure intersections, blameable runs and clean-row counting.

Thresholds compare masses against multiples of the colony side length
|U_1| = B.  All comparisons are exact; the index arguments i may be any
rational (the rules use values like 1/2 and -1).
"""

from __future__ import annotations

from .grid import Cell, Rect, Run
from .measure import Measure
from .params import ParamSet
from .rat import Rat, rat


def is_bad(m: Measure, run: Run) -> bool:
    """A run is bad when its mass reaches the side length of one colony."""
    return m.mass_run(run) >= run.side


def is_good(m: Measure, run: Run) -> bool:
    return not is_bad(m, run)


def good_threshold(run_side: int, i, ps: ParamSet) -> Rat:
    return (1 - rat(i) * ps.delta) * run_side


def safe_threshold(run_side: int, i, ps: ParamSet) -> Rat:
    return (ps.xi - rat(i) * ps.delta) * run_side


def is_i_good(m: Measure, run: Run, i, ps: ParamSet) -> bool:
    return m.mass_run(run) < good_threshold(run.side, i, ps)


def is_i_safe(m: Measure, run: Run, i, ps: ParamSet) -> bool:
    return m.mass_run(run) < safe_threshold(run.side, i, ps)


def mass_is_i_good(mass, side: int, i, ps: ParamSet) -> bool:
    """i-goodness for an arbitrary region given its mass and colony side."""
    return mass < good_threshold(side, i, ps)


def mass_is_i_safe(mass, side: int, i, ps: ParamSet) -> bool:
    return mass < safe_threshold(side, i, ps)


def obstacle(m: Measure, run: Run) -> int:
    """1-based index of the maximum-weight colony; ties go to the first."""
    weights = m.run_weights(run)
    best, best_i = weights[0], 1
    for k in range(1, len(weights)):
        if weights[k] > best:
            best, best_i = weights[k], k + 1
    return best_i


def is_step_clean(m: Measure, run: Run, i, ps: ParamSet) -> bool:
    """Every run of two consecutive colonies is i-safe (vacuous at n=1)."""
    if run.length == 1:
        return True
    thr = safe_threshold(run.side, i, ps)
    if m.mass_run(run) < thr:
        return True
    w = m.run_weights(run)
    return all(w[k] + w[k + 1] < thr for k in range(len(w) - 1))


def _windows_good(weights, side: int, i, ps: ParamSet) -> bool:
    if len(weights) < 3:
        return True
    thr = good_threshold(side, i, ps)
    return all(weights[k] + weights[k + 1] + weights[k + 2] < thr
               for k in range(len(weights) - 2))


def is_unimodal(m: Measure, run: Run, i, ps: ParamSet) -> bool:
    """The runs on both sides of the obstacle are i-step-clean."""
    thr = safe_threshold(run.side, i, ps)
    if m.mass_run(run) < thr:
        return True
    w = m.run_weights(run)
    ob = obstacle(m, run)
    left = w[:ob - 1]
    right = w[ob:]
    for side_w in (left, right):
        for k in range(len(side_w) - 1):
            if side_w[k] + side_w[k + 1] >= thr:
                return False
    return True


def is_clean(m: Measure, run: Run, i, ps: ParamSet) -> bool:
    """i-unimodal and every run of three consecutive colonies (i+1)-good."""
    total = m.mass_run(run)
    if total < safe_threshold(run.side, i, ps) and \
       total < good_threshold(run.side, rat(i) + 1, ps):
        return True
    w = m.run_weights(run)
    if not _windows_good(w, run.side, rat(i) + 1, ps):
        return False
    thr = safe_threshold(run.side, i, ps)
    ob_i = 1
    best = w[0]
    for k in range(1, len(w)):
        if w[k] > best:
            best, ob_i = w[k], k + 1
    for k in range(len(w) - 1):
        if k + 1 == ob_i or k + 2 == ob_i:
            continue
        if w[k] + w[k + 1] >= thr:
            return False
    return True


def weights_obstacle(weights) -> int:
    """1-based index of the first maximum in a weight list."""
    best, best_i = weights[0], 1
    for k in range(1, len(weights)):
        if weights[k] > best:
            best, best_i = weights[k], k + 1
    return best_i


def weights_step_clean(weights, side: int, i, ps: ParamSet) -> bool:
    thr = safe_threshold(side, i, ps)
    return all(weights[k] + weights[k + 1] < thr for k in range(len(weights) - 1))


def weights_unimodal(weights, side: int, i, ps: ParamSet) -> bool:
    thr = safe_threshold(side, i, ps)
    ob = weights_obstacle(weights)
    for k in range(len(weights) - 1):
        if k + 1 == ob or k + 2 == ob:
            continue
        if weights[k] + weights[k + 1] >= thr:
            return False
    return True


def weights_clean(weights, side: int, i, ps: ParamSet) -> bool:
    return weights_unimodal(weights, side, i, ps) and \
        _windows_good(weights, side, rat(i) + 1, ps)


def walk_over_weights(weights, frm: int, to: int, side: int, ps: ParamSet,
                      relax_start: bool = False):
    """Step/jump walk between 1-based indices over a weight list.

    Indices increase by 1 or 2; every visited entry must be safe and unit
    gaps need the pair safe.  Steps are preferred over jumps, so zero
    weights give the identity walk.  frm > to is handled symmetrically.
    With relax_start the first entry is not required to be safe (the
    angel already stands there; the pair and landing conditions still
    gate how it leaves).
    """
    thr = safe_threshold(side, 0, ps)
    if frm == to:
        return [frm] if relax_start or weights[frm - 1] < thr else None
    reverse = frm > to
    if reverse:
        weights = list(reversed(weights))
        n = len(weights)
        frm, to = n + 1 - frm, n + 1 - to
    safe = [x < thr for x in weights]
    pair_safe = [weights[k] + weights[k + 1] < thr for k in range(len(weights) - 1)]
    if relax_start:
        safe[frm - 1] = True
    if not (safe[frm - 1] and safe[to - 1]):
        return None
    path = [frm]

    def extend(at: int) -> bool:
        if at == to:
            return True
        if at + 1 <= to and safe[at] and pair_safe[at - 1]:
            path.append(at + 1)
            if extend(at + 1):
                return True
            path.pop()
        if at + 2 <= to and safe[at + 1]:
            path.append(at + 2)
            if extend(at + 2):
                return True
            path.pop()
        return False

    if not extend(frm):
        return None
    n = len(weights)
    return [n + 1 - k for k in path] if reverse else path


def find_walk(m: Measure, run: Run, frm: int, to: int, ps: ParamSet):
    """A step/jump index sequence from `frm` to `to` through the run.

    Returns indices frm = n_1 < ... < n_m = to with gaps <= 2, every
    visited colony safe, and for unit gaps the two-colony union safe; or
    None when no such sequence exists.
    """
    return walk_over_weights(m.run_weights(run), frm, to, run.side, ps)


def is_secure_in_run(m: Measure, run: Run, idx: int, ps: ParamSet) -> bool:
    """Colony `idx` is secure when its existing neighbour pairs are safe.

    Boundary colonies only have one neighbour pair; they are secure when
    that single pair is safe.
    """
    if not 1 <= idx <= run.length:
        raise IndexError(f"colony {idx} out of run of length {run.length}")
    if idx > 1 and not is_i_safe(m, run.sub(idx - 1, idx), 0, ps):
        return False
    if idx < run.length and not is_i_safe(m, run.sub(idx, idx + 1), 0, ps):
        return False
    return True


def crossing(row: Run, col: Run) -> Cell:
    """Anchor of the colony where a horizontal and a vertical run cross."""
    if not row.horizontal or col.horizontal:
        raise ValueError("need a horizontal row and a vertical column")
    if row.colony_size != col.colony_size:
        raise ValueError("crossing runs must share a colony size")
    inter = (col.anchor[0], row.anchor[1])
    if not (row.contains_colony(inter) and col.contains_colony(inter)):
        raise ValueError(f"runs do not cross: {row} x {col}")
    return inter


def intersect_securely(m: Measure, row: Run, col: Run, ps: ParamSet) -> bool:
    """True when the crossing colony is secure in the row or in the column."""
    inter = crossing(row, col)
    return (is_secure_in_run(m, row, row.index_of(inter), ps)
            or is_secure_in_run(m, col, col.index_of(inter), ps))


def _column_run_between(u: Cell, row: Run) -> Run:
    b = row.colony_size
    if row.anchor[1] <= u[1]:
        raise ValueError(f"row {row} is not strictly north of {u}")
    if not (row.anchor[0] <= u[0] < row.anchor[0] + row.length * b):
        raise ValueError(f"cell {u} is not under row {row}")
    n = (row.anchor[1] - u[1]) // b
    return Run((u[0], u[1] + b), b, n, horizontal=False)


def blameable_run(u: Cell, row: Run) -> Run:
    """Vertical run from the cell above `u` up to and including the row."""
    return _column_run_between(u, row)


def is_securely_reachable(m: Measure, u: Cell, row: Run, ps: ParamSet) -> bool:
    """Row reachable from `u` below it: the column run up to the last cell
    below the row is clean and the final step into the row is safe."""
    v = blameable_run(u, row)
    b = v.colony_size
    if v.length > 1:
        below = Run(u, b, v.length, horizontal=False)  # u .. last cell below row
        if not is_clean(m, below, 0, ps):
            return False
    last_below = (u[0], row.anchor[1] - b)
    step = Run(last_below, b, 2, horizontal=False)
    return is_i_safe(m, step, 0, ps)


def clean_rows(m: Measure, rect: Rect, i, ps: ParamSet) -> list[int]:
    """1-based indices (south to north) of the rect's i-clean rows."""
    return [k for k in range(1, rect.rows + 1)
            if is_clean(m, rect.row(k), i, ps)]
