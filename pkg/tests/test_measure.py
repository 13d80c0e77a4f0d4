"""Measure and grid geometry: exact sums, value semantics, round-trips."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adgame.grid import Rect, Run, floor_to
from adgame.measure import Measure
from adgame.rat import rat


def test_floor_to_examples():
    assert floor_to(5, (7, -3)) == (5, -5)
    assert floor_to(1, (4, 9)) == (4, 9)
    # evaluate B * floor(x/B) by hand: 97*floor(97/97)=97, 97*floor(-1/97)=-97
    assert floor_to(97, (97, -1)) == (97, -97)


def test_floor_to_postconditions():
    rng = random.Random(0)
    for _ in range(200):
        b = rng.randint(1, 50)
        u = (rng.randint(-500, 500), rng.randint(-500, 500))
        a = floor_to(b, u)
        assert a[0] % b == 0 and a[1] % b == 0
        assert a[0] <= u[0] < a[0] + b
        assert a[1] <= u[1] < a[1] + b


def test_mass_empty_measure():
    m = Measure()
    run = Run((0, 0), 3, 4, horizontal=True)
    assert m.mass(run) == 0
    assert m.total == 0


def test_mass_outside_cells_ignored():
    m = Measure({(0, 0): rat(1, 3), (2, 0): rat(1, 3)})
    run = Run((0, 0), 1, 2, horizontal=True)  # cells (0,0),(1,0)
    assert m.mass(run) == rat(1, 3)


def test_mass_matches_naive_oracle():
    rng = random.Random(7)
    cells = {}
    for _ in range(120):
        c = (rng.randint(-12, 12), rng.randint(-12, 12))
        cells[c] = cells.get(c, rat(0)) + rat(rng.randint(1, 9), rng.randint(1, 9))
    m = Measure(cells)
    for _ in range(40):
        b = rng.choice([1, 2, 3, 5])
        n = rng.randint(1, 6)
        anchor = (b * rng.randint(-4, 4), b * rng.randint(-4, 4))
        run = Run(anchor, b, n, horizontal=rng.random() < 0.5)
        naive = sum((cells.get(c, rat(0)) for c in run.cells()), rat(0))
        assert m.mass(run) == naive


def test_deposit_zero_is_identity():
    m = Measure({(1, 1): rat(1, 2)})
    m2 = m.deposit((5, 5), 0)
    assert m2 == m


def test_deposit_additivity():
    m = Measure()
    m1 = m.deposit((3, 3), rat(1, 7))
    m2 = m1.deposit((3, 3), rat(1, 7))
    assert m2.get((3, 3)) == rat(2, 7)
    assert m1.get((3, 3)) == rat(1, 7)  # value semantics: snapshot unchanged
    assert m.get((3, 3)) == 0


def test_deposit_total_accumulates():
    rng = random.Random(3)
    m = Measure()
    expected = rat(0)
    for _ in range(300):
        amt = rat(rng.randint(0, 20), rng.randint(1, 20))
        c = (rng.randint(-5, 5), rng.randint(-5, 5))
        m = m.deposit(c, amt)
        expected += amt
    assert m.total == expected


def test_deposit_negative_rejected():
    with pytest.raises(ValueError):
        Measure().deposit((0, 0), rat(-1, 2))


def test_deposit_mass_consistency():
    # mass(deposit(m,c,a), S) == mass(m,S) + a*[c in S]
    rng = random.Random(11)
    base = {(rng.randint(-6, 6), rng.randint(-6, 6)): rat(rng.randint(1, 5), 3)
            for _ in range(30)}
    m = Measure(base)
    for _ in range(50):
        c = (rng.randint(-6, 6), rng.randint(-6, 6))
        a = rat(rng.randint(0, 7), 5)
        region = Run((rng.randint(-6, 0), rng.randint(-6, 0)), 1,
                     rng.randint(1, 8), horizontal=rng.random() < 0.5)
        before = m.mass(region)
        m2 = m.deposit(c, a)
        inside = rat(1) if region.contains_cell(c) else rat(0)
        assert m2.mass(region) == before + a * inside


def test_snapshot_branching():
    m0 = Measure({(0, 0): 1})
    m1 = m0.deposit((1, 0), 2)
    m2 = m0.deposit((2, 0), 3)  # branch from the older snapshot
    assert m1.get((2, 0)) == 0 and m2.get((1, 0)) == 0
    assert m1.total == 3 and m2.total == 4 and m0.total == 1


def test_aggregate_scales_match_naive():
    rng = random.Random(19)
    m = Measure(q=4)
    m.ensure_scale(4)
    cells = {}
    for _ in range(200):
        c = (rng.randint(-20, 20), rng.randint(-20, 20))
        a = rat(rng.randint(1, 5), rng.randint(1, 4))
        cells[c] = cells.get(c, rat(0)) + a
        m = m.deposit(c, a)
    for _ in range(60):
        anchor = (4 * rng.randint(-5, 5), 4 * rng.randint(-5, 5))
        naive = sum((v for c, v in cells.items()
                     if anchor[0] <= c[0] < anchor[0] + 4
                     and anchor[1] <= c[1] < anchor[1] + 4), rat(0))
        assert m.mass_colony(4, anchor) == naive
    # row band: 4 colonies of size 4 starting at a 16-aligned x
    for _ in range(30):
        anchor = (16 * rng.randint(-1, 1), 4 * rng.randint(-5, 5))
        naive = sum((v for c, v in cells.items()
                     if anchor[0] <= c[0] < anchor[0] + 16
                     and anchor[1] <= c[1] < anchor[1] + 4), rat(0))
        assert m.mass_row_band(4, anchor) == naive


def test_serialization_roundtrip_bit_exact():
    rng = random.Random(23)
    cells = {(rng.randint(-9, 9), rng.randint(-9, 9)):
             rat(rng.randint(1, 40), rng.randint(1, 40)) for _ in range(50)}
    m = Measure(cells)
    lines = m.to_lines()
    assert lines == sorted(lines, key=lambda s: (int(s.split()[0]), int(s.split()[1])))
    m2 = Measure.from_lines(lines)
    assert m2 == m
    assert m2.to_lines() == lines


@given(st.lists(st.tuples(st.integers(-8, 8), st.integers(-8, 8),
                          st.fractions(min_value=0, max_value=5)), max_size=30))
@settings(max_examples=60, deadline=None)
def test_total_equals_sum_property(entries):
    m = Measure()
    total = rat(0)
    for x, y, f in entries:
        m = m.deposit((x, y), f)
        total += rat(f)
    assert m.total == total
    assert m.total == sum((v for _, v in m.items()), rat(0))


def test_rect_decomposition():
    r = Rect((0, 0), 2, 3, 4)
    assert len(r.row_runs()) == 4 and len(r.col_runs()) == 3
    assert r.row(1).anchor == (0, 0) and r.row(4).anchor == (0, 6)
    assert r.col(3).anchor == (4, 0)
    assert all(run.horizontal for run in r.row_runs())
    assert not any(run.horizontal for run in r.col_runs())
