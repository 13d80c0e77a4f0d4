"""Lemma fuzz suites and the implementation-map fuzzer.

The lemma suites sample random measures that satisfy each lemma's
hypothesis and check its conclusion exactly; a counterexample is shrunk by
dropping cells and reported.  The implementation fuzzer plays chains of
big moves at level 2 against adversarial devils, with every contract of
the implementation map checked on every big unit.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .classify import (is_clean, is_i_good, is_securely_reachable,
                       is_unimodal, safe_threshold, weights_obstacle,
                       weights_unimodal)
from .grid import Cell, Run
from .implementation import (ContractViolation, ImplementationMap,
                             verify_time_transfer)
from .measure import Measure
from .moves import Direction, LocatedMove
from .params import ParamSet
from .rat import ZERO, Rat, rat
from .rules import (FAIL, SUCC, Configuration, History, TimeBoundTracker,
                    angel_allowed, base_game, devil_allowed, history_is_simple,
                    is_path, unit_witness)
from .scaleup import scale_up
from .devils import NoLegalReply, make_devil

N, S, E, W = Direction.NORTH, Direction.SOUTH, Direction.EAST, Direction.WEST


@dataclass
class FuzzReport:
    name: str
    trials: int
    counterexamples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def describe(self) -> str:
        state = "ok" if self.ok else f"{len(self.counterexamples)} counterexamples"
        return f"{self.name}: {self.trials} trials, {state}"


def _rand_weight(rng, hi, denom=64):
    return rat(rng.randint(0, int(hi * denom)), denom)


# -- lemma suites ---------------------------------------------------------------


def fuzz_good_implies_clean(ps: ParamSet, trials: int, seed: int) -> FuzzReport:
    """(i+1)-good runs are i-clean for i in {0, 1}."""
    rng = random.Random(seed)
    rep = FuzzReport("good-implies-clean", trials)
    b = 1
    for _ in range(trials):
        n = rng.randint(1, 8)
        i = rng.randint(0, 1)
        run = Run((0, 0), b, n, horizontal=False)
        limit = (1 - (i + 1) * ps.delta) * b
        ws = [_rand_weight(rng, 1.0) for _ in range(n)]
        total = sum(ws, ZERO)
        if total >= limit:
            scale = limit * rat(rng.randint(0, 63), 64) / total
            ws = [w * scale for w in ws]
        m = Measure({run.colony(k + 1): w for k, w in enumerate(ws) if w})
        if not is_i_good(m, run, i + 1, ps):
            continue
        if not is_clean(m, run, i, ps):
            rep.counterexamples.append((i, [str(w) for w in ws]))
    return rep


def fuzz_qgood_unimodal(ps: ParamSet, trials: int, seed: int) -> FuzzReport:
    """(-Q)-good runs are 1-unimodal."""
    rng = random.Random(seed)
    rep = FuzzReport("(-Q)-good-implies-1-unimodal", trials)
    b = 1
    limit = (1 + ps.q * ps.delta) * b
    for _ in range(trials):
        n = rng.randint(1, 8)
        run = Run((0, 0), b, n, horizontal=False)
        ws = [_rand_weight(rng, 1.1) for _ in range(n)]
        total = sum(ws, ZERO)
        if total >= limit:
            scale = limit * rat(rng.randint(0, 63), 64) / total
            ws = [w * scale for w in ws]
        m = Measure({run.colony(k + 1): w for k, w in enumerate(ws) if w})
        if not is_i_good(m, run, -ps.q, ps):
            continue
        if not is_unimodal(m, run, 1, ps):
            rep.counterexamples.append([str(w) for w in ws])
    return rep


def _sparse_row_clean(items, q, b, i, ps) -> bool:
    """i-cleanness of one row given its sparse (x, weight) items."""
    if not items:
        return True
    total = sum((w for _x, w in items), ZERO)
    if total < safe_threshold(b, i, ps) and \
            total < (1 - (rat(i) + 1) * ps.delta) * b:
        return True
    from .classify import weights_clean
    ws = [ZERO] * q
    for x, w in items:
        ws[x] += w
    return weights_clean(ws, b, i, ps)


def fuzz_kappa_clean_rows(ps: ParamSet, trials: int, seed: int) -> FuzzReport:
    """A rect with mass <= QB(xi+delta)+B has at least kappa 1-clean rows."""
    rng = random.Random(seed)
    rep = FuzzReport("kappa-clean-rows", trials)
    b, q = 1, ps.q
    cap = q * b * (ps.xi + ps.delta) + b
    for _ in range(trials):
        nnz = rng.randint(0, 60)
        cells = {}
        for _ in range(nnz):
            c = (rng.randint(0, q - 1), rng.randint(0, q - 1))
            cells[c] = cells.get(c, ZERO) + _rand_weight(rng, 1.5)
        total = sum(cells.values(), ZERO)
        if total > cap:
            scale = cap * rat(rng.randint(1, 64), 64) / total
            cells = {c: w * scale for c, w in cells.items()}
        rows: dict[int, list] = {}
        for (x, y), w in cells.items():
            rows.setdefault(y, []).append((x, w))
        dirty = sum(1 for items in rows.values()
                    if not _sparse_row_clean(items, q, b, 1, ps))
        if q - dirty < ps.kappa:
            rep.counterexamples.append((float(total), q - dirty))
    return rep


def fuzz_blameable_run(ps: ParamSet, trials: int, seed: int) -> FuzzReport:
    """An unreachable row above a (-1)-safe cell blames mass >= B(1-xi)/2.

    The run from the cell to the row must have length at least two (the
    adjacent case has no room to jump and is excluded; see the ledger).
    """
    rng = random.Random(seed)
    rep = FuzzReport("blameable-run-mass", trials)
    b = 1
    bound = rat(1, 2) * b * (1 - ps.xi)
    for _ in range(trials):
        n = rng.randint(3, 9)           # cells: u at index 1, row at index n
        ws = [_rand_weight(rng, 1.2) for _ in range(n)]
        ws[0] = _rand_weight(rng, float(ps.xi + ps.delta) * 63 / 64)
        cells = {(0, k): w for k, w in enumerate(ws) if w}
        m = Measure(cells)
        u = (0, 0)
        row = Run((0, n - 1), b, 1, horizontal=True)
        if m.get(u) >= (ps.xi + ps.delta) * b:
            continue
        if is_securely_reachable(m, u, row, ps):
            continue
        blame = sum((m.get((0, k)) for k in range(1, n)), ZERO)
        if blame < bound:
            rep.counterexamples.append([str(w) for w in ws])
    return rep


def fuzz_distant_obstacles(ps: ParamSet, trials: int, seed: int) -> FuzzReport:
    """Two 1-unimodal columns whose obstacles leave two consecutive free
    rows admit a safe horizontal crossing at one of those rows."""
    rng = random.Random(seed)
    rep = FuzzReport("distant-obstacles", trials)
    b = 1
    thr = safe_threshold(b, 0, ps)
    for _ in range(trials):
        n = rng.randint(5, 10)
        cols = []
        obs = []
        okcols = True
        for _ in range(2):
            ws = [_rand_weight(rng, 0.9) for _ in range(n)]
            k = rng.randrange(n)
            ws[k] = ws[k] + rat(1)
            if not weights_unimodal(ws, b, 1, ps):
                okcols = False
            cols.append(ws)
            obs.append(weights_obstacle(ws) - 1)
        if not okcols:
            continue
        r1, r2 = obs
        # two consecutive rows avoiding both obstacles
        cand = None
        for i in range(n - 1):
            if r1 not in (i, i + 1) and r2 not in (i, i + 1):
                cand = i
                break
        if cand is None:
            continue
        ok = any(cols[0][cand + qq] + cols[1][cand + qq] < thr
                 for qq in (0, 1))
        if not ok:
            rep.counterexamples.append(([str(w) for w in cols[0]],
                                        [str(w) for w in cols[1]], cand))
    return rep


def fuzz_scapegoat_cell(ps: ParamSet, trials: int, seed: int) -> FuzzReport:
    """A disallowed attack's obstacle cell held >= (1-delta)B/6 at mu0."""
    rng = random.Random(seed)
    rep = FuzzReport("scapegoat-cell-mass", trials)
    b = 1
    bound = (1 - ps.delta) * b / 6
    for _ in range(trials):
        n = rng.randint(5, 6)
        ws0 = [_rand_weight(rng, 0.4) for _ in range(n)]
        # drift below delta*B, then require the run to have gone bad
        drift_total = ps.delta * b * rat(rng.randint(0, 63), 64)
        extra = [ZERO] * n
        for _ in range(rng.randint(0, 3)):
            extra[rng.randrange(n)] += drift_total / 4
        wst = [a + e for a, e in zip(ws0, extra)]
        if sum(wst, ZERO) < b:
            deficit = b - sum(wst, ZERO)
            k = rng.randrange(n)
            ws0[k] = ws0[k] + deficit
            wst[k] = wst[k] + deficit
        ob = weights_obstacle(ws0) - 1
        if ws0[ob] < bound:
            rep.counterexamples.append([str(w) for w in ws0])
    return rep


def fuzz_no_good_column_unimodal(ps: ParamSet, trials: int, seed: int) -> FuzzReport:
    """A good body with no 1-good column has only unimodal columns."""
    rng = random.Random(seed)
    rep = FuzzReport("no-1-good-column-implies-unimodal", trials)
    b, q = 1, ps.q
    lo = (1 - ps.delta) * b
    for _ in range(trials):
        total_cap = q * b
        cols = []
        total = ZERO
        for _ in range(q):
            mass = lo + _rand_weight(rng, float(b - lo) * 0.9, denom=512)
            nnz = rng.randint(1, 3)
            parts = [rng.randint(1, 8) for _ in range(nnz)]
            s = sum(parts)
            rows = rng.sample(range(12), nnz)
            col = [(r, mass * rat(p, s)) for r, p in zip(rows, parts)]
            total += mass
            cols.append(col)
        if total >= total_cap:
            continue  # body not good; hypothesis void
        for ws in cols:
            if len(ws) == 1:
                continue  # single-cell columns are trivially unimodal
            heights = [ZERO] * 12
            for r, wv in ws:
                heights[r] += wv
            if not weights_unimodal(heights, b, 0, ps):
                rep.counterexamples.append([(r, str(w)) for r, w in ws])
                break
    return rep


LEMMA_SUITES = [
    fuzz_good_implies_clean,
    fuzz_qgood_unimodal,
    fuzz_kappa_clean_rows,
    fuzz_blameable_run,
    fuzz_distant_obstacles,
    fuzz_scapegoat_cell,
    fuzz_no_good_column_unimodal,
]


def fuzz_lemmas(ps: ParamSet, trials: int, seed: int = 0) -> list[FuzzReport]:
    if not ps.valid:
        raise ValueError("lemma suites run only at valid parameters")
    return [suite(ps, trials, seed + k) for k, suite in enumerate(LEMMA_SUITES)]


# -- implementation-map fuzz -------------------------------------------------------


@dataclass
class BigUnitStats:
    kind: str
    small_moves: int
    verdict: str
    devil_failures: int


@dataclass
class ImplFuzzReport:
    big_moves: int = 0
    chains: int = 0
    violations: list = field(default_factory=list)
    kinds: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def describe(self) -> str:
        state = "ok" if self.ok else f"{len(self.violations)} violations"
        return (f"implementation fuzz: {self.big_moves} big moves over "
                f"{self.chains} chains, {state}; kinds={self.kinds}")


def _measure_generator(rng, ps: ParamSet, style: str, origin: Cell) -> Measure:
    """Sparse adversarial measures around the big start colony."""
    q = ps.q
    ox, oy = origin
    cells: dict[Cell, Rat] = {}

    def put(c, w):
        cells[c] = cells.get(c, ZERO) + w

    if style == "noise":
        for _ in range(rng.randint(0, 40)):
            put((ox + rng.randint(-q, 2 * q), oy + rng.randint(-q, 4 * q)),
                _rand_weight(rng, 0.6))
    elif style == "hair":
        row = oy + q + rng.randint(5, q - 6)
        gap = rat(1, 10 ** (14 + rng.randint(0, 4)))
        for x in range(q):
            r = row + rng.randint(0, 2)
            if rng.random() < 0.2:
                put((ox + x, r), rat(1))
            else:
                put((ox + x, r), rat(1) - gap)
    elif style == "walls":
        for _ in range(rng.randint(1, 3)):
            row = oy + rng.randint(2, 3 * q - 3)
            holes = {rng.randrange(q) for _ in range(rng.randint(2, 8))}
            for x in range(q):
                if x not in holes:
                    put((ox + x, row), _rand_weight(rng, 0.74))
    elif style == "blocks":
        for _ in range(rng.randint(2, 6)):
            bx = ox + rng.randint(0, q - 3)
            by = oy + rng.randint(2, 3 * q - 4)
            for dx in range(rng.randint(1, 3)):
                for dy in range(rng.randint(1, 3)):
                    put((bx + dx, by + dy), _rand_weight(rng, 0.5))
    return Measure(cells, q=q)


def _preferred_big_moves(g2, rng, cfg: Configuration, history: History):
    """Candidate big moves in a construction-faithful preference order.

    After a failure: escape when the body is light, else a continuing
    attack, else a finish.  Otherwise: steps, jumps, attacks and turns in
    random orientations.
    """
    cat = g2.catalog
    out = []
    last = history.last_move()
    if cfg.j == FAIL and last is not None:
        land, pass_ = last.z.fail_dirs
        w = g2.colony_units_of(cfg.p)
        for level in range(-3, 2):
            out.append(LocatedMove(w, cat.attack_cont(land, pass_, level)))
        out.append(LocatedMove(w, cat.escape(land, pass_)))
        for ln in (1, 2):
            out.append(LocatedMove(w, cat.finish(land.opposite, ln)))
        return out
    dirs = [N, E, S, W]
    rng.shuffle(dirs)
    w = g2.colony_units_of(cfg.p)
    for d in dirs:
        kinds = ["step", "jump", "attack", "turn"]
        rng.shuffle(kinds)
        for kind in kinds:
            if kind == "step":
                out.append(LocatedMove(w, cat.step(d)))
            elif kind == "jump":
                out.append(LocatedMove(w, cat.jump(d)))
            elif kind == "attack":
                for pdir in _perp(d, rng):
                    out.append(LocatedMove(
                        w, cat.attack_new(d, pdir, rng.choice([-1, -2, -3, -4]))))
            else:
                for pdir in _perp(d, rng):
                    if rng.random() < 0.4:
                        out.append(LocatedMove(
                            w, cat.turn_attack(d, pdir,
                                               rng.choice([-1, -2, -3, -4]))))
                    else:
                        out.append(LocatedMove(w, cat.turn_jump(d, pdir)))
        break  # one direction bundle per turn keeps chains moving
    return out


def _perp(d: Direction, rng):
    opts = [E, W] if d in (N, S) else [N, S]
    rng.shuffle(opts)
    return opts[:1]


def run_big_unit(g1, g2, big_cfg, big_move, devil, witness=None,
                 entry_cfg=None):
    """Implement one big move; returns (chi, end_cfg, strat, stats).

    `big_cfg` is the big record's configuration (its verdict is the judged
    one); `entry_cfg` carries the small game's own last verdict, which
    gates whether the first small move may be a continuing move.
    """
    chi = History(1, entry_cfg or big_cfg, initial_witness=witness)
    imap = ImplementationMap(g1)
    tracker = TimeBoundTracker(1, g1.ps)
    ps = g1.ps
    fails = 0
    while True:
        mv = imap.phi(chi, big_cfg, big_move)
        if mv is None:
            break
        ok, why = angel_allowed(chi.last_config(), mv, g1, prior=chi)
        if not ok:
            raise ContractViolation("angel-allowed", why)
        prev = chi.last_config()
        one_good_attack = False
        if mv.z.failable:
            region_mass = sum((prev.mu.mass_colony(
                g1.b, (c[0] * g1.b, c[1] * g1.b))
                for c in mv.offset_colonies(mv.z.cond_attack_good)), ZERO)
            one_good_attack = region_mass < (1 - ps.delta) * g1.b
        cfg = devil.respond(g1, chi, mv, tracker)
        ok, why = devil_allowed(prev, mv, cfg, g1, chi, tracker)
        if not ok:
            raise ContractViolation("devil-allowed", why)
        if cfg.j == FAIL and one_good_attack:
            raise ContractViolation(
                "one-good-attack-succeeds",
                "an attack with a 1-good reduced body was failed")
        tracker.append(mv, prev, cfg, witness=unit_witness(chi, mv))
        chi.append_move(mv)
        chi.append_config(cfg)
        fails += cfg.j == FAIL
        if len(chi.moves) > ps.nu:
            raise ContractViolation("move-budget", "exceeded nu small moves")
    strat = imap.strategy_for(chi, big_cfg, big_move)
    end_cfg = imap.big_configuration(chi, big_cfg, big_move)
    stats = BigUnitStats(big_move.z.kind.value, len(chi.moves), end_cfg.j, fails)
    return chi, end_cfg, strat, stats


def check_big_unit(g1, ps, big_cfg, big_move, end_cfg, chi, strat):
    """All per-unit implementation-map contracts; returns problem list."""
    problems = []
    if len(chi.moves) < 2:
        problems.append("halted before two small moves")
    if len(chi.moves) > ps.nu:
        problems.append("more than nu small moves")
    big_bigs = set(big_move.body_colonies())
    for mv in chi.moves:
        for c in mv.body_colonies():
            if (c[0] // ps.q, c[1] // ps.q) not in big_bigs:
                problems.append(f"{mv.z.name} leaves the big body")
                break
    if not is_path(chi.moves):
        problems.append("small moves do not form a path")
    if not history_is_simple(chi):
        problems.append("small path is not simple")
    if chi.last_config().t - big_cfg.t > ps.theta * ps.q * g1.b:
        problems.append("big move exceeded theta * B*")
    drift = chi.last_config().mu.total - big_cfg.mu.total
    if drift >= ps.delta * g1.b:
        problems.append("mass drift reached delta * B within the move")
    ok, more = verify_time_transfer(big_cfg, big_move, end_cfg, chi, strat,
                                    ps, g1.b)
    problems.extend(more)
    return problems


def fuzz_implementation(ps: ParamSet, big_moves: int, seed: int = 0,
                        devil_name: str = "adversarial") -> ImplFuzzReport:
    """Chains of big moves at level 2 against an adversarial devil."""
    rng = random.Random(seed)
    g1 = base_game(ps)
    g2 = scale_up(g1)
    rep = ImplFuzzReport()
    styles = ["noise", "hair", "walls", "blocks", "noise", "hair"]
    while rep.big_moves < big_moves:
        rep.chains += 1
        style = styles[rng.randrange(len(styles))]
        origin = (rng.randint(-3, 3) * ps.q, rng.randint(-3, 3) * ps.q)
        mu0 = _measure_generator(rng, ps, style, origin)
        p0 = (origin[0] + rng.randrange(ps.q), origin[1] + rng.randrange(ps.q))
        cfg = Configuration(0, p0, mu0, SUCC)
        entry = cfg
        big_hist = History(ps.q, cfg)
        witness = None
        for _step in range(rng.randint(1, 5)):
            cands = _preferred_big_moves(g2, rng, cfg, big_hist)
            chosen = None
            for cand in cands:
                ok, _why = angel_allowed(cfg, cand, g2, prior=big_hist)
                if ok:
                    chosen = cand
                    break
            if chosen is None:
                break
            devil = make_devil(devil_name, rng.randrange(10 ** 6))
            try:
                chi, end_cfg, strat, stats = run_big_unit(
                    g1, g2, cfg, chosen, devil, witness=witness,
                    entry_cfg=entry)
                problems = check_big_unit(g1, ps, cfg, chosen, end_cfg,
                                          chi, strat)
            except ContractViolation as cv:
                rep.violations.append((style, chosen.z.name, str(cv)))
                break
            except NoLegalReply as nl:
                rep.violations.append((style, chosen.z.name, f"devil stuck: {nl}"))
                break
            if problems:
                rep.violations.append((style, chosen.z.name, problems))
                break
            ok, why = devil_allowed(cfg, chosen, end_cfg, g2, big_hist)
            if not ok:
                rep.violations.append(
                    (style, chosen.z.name, f"judged big configuration: {why}"))
                break
            rep.big_moves += 1
            rep.kinds[stats.kind] = rep.kinds.get(stats.kind, 0) + 1
            big_hist.append_move(chosen)
            big_hist.append_config(end_cfg)
            witness = chi.moves[-1] if chi.moves else None
            # the next small history starts from the small game's own state
            small_last = chi.last_config()
            entry = Configuration(small_last.t, small_last.p, small_last.mu,
                                  small_last.j)
            cfg = end_cfg
            if len(rep.violations) > 20:
                return rep
    return rep
