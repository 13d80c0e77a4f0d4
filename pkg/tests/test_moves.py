"""Move catalog: templates, orientations, closure properties, bodies."""

from collections import Counter

import pytest

from adgame.moves import (ALL_SYMS, CATALOG, CATALOG_TYPOFIX, FLIP_X, IDENT,
                          ROT_CW, Direction, Kind, LocatedMove, Sym,
                          body_cells)

N, S, E, W = Direction.NORTH, Direction.SOUTH, Direction.EAST, Direction.WEST


def test_catalog_census():
    counts = Counter(ms.kind for ms in CATALOG)
    assert counts[Kind.STEP] == 4
    assert counts[Kind.JUMP] == 4
    assert counts[Kind.ESCAPE] == 8
    assert counts[Kind.FINISH] == 20
    assert counts[Kind.ATTACK_NEW] == 32
    assert counts[Kind.ATTACK_CONT] == 40
    assert counts[Kind.TURN] == 40
    assert len({ms.name for ms in CATALOG}) == len(CATALOG)


def test_northward_step_template():
    ms = CATALOG.step(N)
    assert ms.cells == {(0, 0), (0, 1)}
    assert ms.dest == (0, 1)
    assert ms.ends == {(0, 1)}


def test_eastward_jump_is_rotated_northward_jump():
    ms = CATALOG.jump(E)
    assert ms.cells == {(0, 0), (1, 0), (2, 0)}
    assert ms.dest == (2, 0)
    assert ms.obstacle == (1, 0)


def test_northward_escape_template():
    ms = CATALOG.escape(N, E)
    assert ms.cells == {(0, 0), (0, 1), (1, 0), (1, -1)}
    assert ms.dest == (1, 0)
    assert ms.reduced == {(1, 0), (1, -1)}


def test_southward_finish_template():
    for ln in range(1, 6):
        ms = CATALOG.finish(S, ln)
        assert ms.cells == {(0, -k) for k in range(ln + 1)}
        assert ms.dest == (0, -ln)


def test_new_attack_level_minus4_pretemplate():
    # start p' = (0,-4); template is (U + {(0,-4)}) - p'
    ms = CATALOG.attack_new(N, E, -4)
    assert ms.cells == {(0, k) for k in range(6)}
    assert ms.obstacle == (0, 4)
    assert ms.dest == (0, 5)
    assert ms.transits == {(0, 3), (0, 4), (0, 5)}
    assert ms.level == -4


def test_new_attack_levels_define_obstacle_offset():
    for s in range(-4, 0):
        ms = CATALOG.attack_new(N, E, s)
        assert ms.obstacle == (0, -s)
        assert ms.dest == (0, 1 - s)
        assert ms.cond_attack_good == ms.cells


def test_cont_attack_literal_vs_typofix():
    # literal template carries (0,-s); distinct only for s in {-3,-2}
    lit = CATALOG.attack_cont(N, E, -2)
    fix = CATALOG_TYPOFIX.attack_cont(N, E, -2)
    assert len(lit.reduced) == 6
    assert len(fix.reduced) == 5
    assert (1, 4) in lit.cells and (1, 4) not in fix.cells
    for s in (-1, 0, 1):
        a = CATALOG.attack_cont(N, E, s)
        b = CATALOG_TYPOFIX.attack_cont(N, E, s)
        assert a.cells == b.cells
        assert len(a.reduced) == 5


def test_cont_attack_start_and_left_column():
    ms = CATALOG.attack_cont(N, E, 1)
    # start (0,0) and the cell above it form the left column
    assert (0, 0) in ms.cells and (0, 1) in ms.cells
    assert ms.obstacle == (1, -1)
    assert ms.dest == (1, 0)
    assert all(c[0] == 1 for c in ms.reduced)


def test_turn_composition():
    ms = CATALOG.turn_jump(N, E)
    assert ms.start_dir is N and ms.land_dir is E
    assert ms.cells == {(0, 0), (0, 1), (1, 1), (2, 1)}
    assert ms.dest == (2, 1)
    assert ms.obstacle == (1, 1)
    assert not ms.failable

    ta = CATALOG.turn_attack(E, N, -1)
    # eastward step then a northward new attack passing east
    assert ta.start_dir is E and ta.land_dir is N and ta.pass_dir is E
    assert ta.failable
    assert (0, 0) in ta.cells and (1, 0) in ta.cells
    assert ta.obstacle == (1, 1)
    assert ta.dest == (1, 2)
    assert ta.transits == {(1, 0), (1, 1), (1, 2)}


def test_dest_in_ends_in_cells_everywhere():
    for ms in CATALOG:
        assert ms.dest in ms.ends
        assert ms.ends <= ms.cells
        assert ms.transits <= ms.ends
        if ms.kind in (Kind.ATTACK_NEW, Kind.ATTACK_CONT):
            assert len(ms.transits) == 3
        if ms.failable:
            assert ms.obstacle is not None


def test_level_ranges():
    for ms in CATALOG:
        if ms.kind is Kind.ATTACK_NEW:
            assert -4 <= ms.level <= -1
        if ms.kind is Kind.ATTACK_CONT:
            assert -3 <= ms.level <= 1
        if ms.kind is Kind.FINISH:
            assert 1 <= ms.finish_len <= 5
        if ms.kind is Kind.TURN:
            assert ms.land_dir is not ms.start_dir


def _signature(ms, sym):
    cells = sym.apply_cells(ms.cells)
    return (ms.kind, sym.apply_dir(ms.land_dir),
            None if ms.pass_dir is None else sym.apply_dir(ms.pass_dir),
            cells, sym.apply(ms.dest), ms.level, ms.finish_len, ms.turn_second)


def test_rotation_permutes_catalog():
    plain = {_signature(ms, IDENT) for ms in CATALOG}
    rotated = {_signature(ms, ROT_CW) for ms in CATALOG}
    assert plain == rotated


def test_reflection_swaps_passing_directions():
    for ms in CATALOG:
        if ms.pass_dir is None or ms.kind is Kind.TURN:
            continue
        sig = _signature(ms, FLIP_X)
        # the reflected template exists in the catalog with swapped passing
        matches = [m2 for m2 in CATALOG if _signature(m2, IDENT) == sig]
        assert len(matches) == 1
        if ms.land_dir in (N, S):
            assert matches[0].pass_dir is ms.pass_dir.opposite


def test_sym_inverse_roundtrip():
    for sym in ALL_SYMS:
        inv = sym.inverse()
        for v in [(1, 0), (0, 1), (3, -2), (-5, 7)]:
            assert inv.apply(sym.apply(v)) == v


def test_body_cells_of_step():
    lm = LocatedMove((0, 0), CATALOG.step(N))
    cells = set(body_cells(lm, 3))
    assert cells == {(x, y) for x in range(3) for y in range(6)}
    assert len(cells) == len(lm.z.cells) * 9


def test_body_size_invariant():
    for ms in list(CATALOG)[::7]:
        lm = LocatedMove((2, -1), ms)
        assert len(set(body_cells(lm, 2))) == len(ms.cells) * 4


def test_reduced_body_six_colonies_literal():
    lm = LocatedMove((0, 0), CATALOG.attack_cont(N, E, -2))
    assert len(lm.reduced_colonies()) == 6
    with pytest.raises(ValueError):
        LocatedMove((0, 0), CATALOG.step(N)).reduced_colonies()
