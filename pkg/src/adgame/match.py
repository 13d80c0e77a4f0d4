"""Match runner: the nested angel against a pluggable devil, with trace
recording, live contract checks and full replay verification."""

from __future__ import annotations

from dataclasses import dataclass, field

from .devils import DevilPolicy, NoLegalReply, ReplayDevil
from .implementation import ContractViolation, strategy_ledger_entries
from .measure import Measure
from .nested import AngelSession
from .params import ParamSet
from .rat import Rat
from .rules import (Configuration, History, TimeBoundTracker,
                    angel_allowed, base_game, default_configuration,
                    devil_allowed, unit_witness)
from .trace import TraceWriter, parse_trace


@dataclass
class MatchReport:
    survived: bool
    moves: int
    violation: str | None
    final_t: int
    final_p: tuple
    total_mass: Rat
    max_stack_depth: int
    big_moves: int
    trace: str

    def summary(self) -> str:
        state = "survived" if self.survived else f"stopped: {self.violation}"
        return (f"{self.moves} moves, {state}, t={self.final_t}, "
                f"p={self.final_p}, mass={self.total_mass}, "
                f"stack depth <= {self.max_stack_depth}, "
                f"big moves {self.big_moves}")


def run_match(ps: ParamSet, devil: DevilPolicy, horizon: int,
              toy: bool = False, stack_lines: bool = False,
              meta: dict | None = None, depth: int = 1) -> MatchReport:
    """Alternate the nested angel and the devil for `horizon` plain moves.

    `depth` pre-builds that many amplifier levels; the tower still grows
    lazily beyond it.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    g1 = base_game(ps, toy)
    writer = TraceWriter(ps, meta=dict(meta or {}, devil=devil.name,
                                       seed=devil.seed, horizon=horizon))
    tracker = TimeBoundTracker(1, ps)
    history = History(1, default_configuration(q=ps.q))
    pending_lines: list[str] = []

    def on_big(level, big_a, strat, chi, dstar):
        strat.settle_charges()
        for entry in strategy_ledger_entries(strat):
            pending_lines.append(("ledger", level, entry))
        pending_lines.append(("bigmove", level, big_a, dstar.j, len(chi.moves)))

    angel = AngelSession(ps, toy=toy, check_contracts=not toy,
                         on_big_move=on_big)
    angel.amp.game(max(1, depth))
    d = history.initial
    survived = True
    violation = None
    window: list[Rat] = [d.mu.total]
    i = 0
    try:
        for i in range(horizon):
            mv = angel.move(d)
            ok, why = angel_allowed(d, mv, g1, prior=history)
            if not ok:
                raise ContractViolation("angel-allowed", why)
            for item in pending_lines:
                if item[0] == "ledger":
                    writer.ledger(item[1], item[2])
                else:
                    writer.big_move(item[1], item[2], item[3], item[4])
            pending_lines.clear()
            writer.angel(i, mv)
            cfg = devil.respond(g1, history, mv, tracker)
            ok, why = devil_allowed(d, mv, cfg, g1, history, tracker)
            if not ok:
                raise ContractViolation("devil-allowed", why)
            writer.devil(i, d.mu, cfg)
            if stack_lines:
                writer.stack(angel.stack_snapshot())
            tracker.append(mv, d, cfg, witness=unit_witness(history, mv))
            history.append_move(mv)
            history.append_config(cfg)
            if not toy:
                if tracker.lo != 0:
                    raise ContractViolation(
                        "simplicity", "the base path stopped being simple")
                window.append(cfg.mu.total)
                if len(window) > ps.nu + 1:
                    window.pop(0)
                if window[-1] - window[0] >= ps.delta * 1:
                    raise ContractViolation(
                        "drift", "window of nu moves gained delta*B")
            d = cfg
        moves_done = horizon
    except ContractViolation as cv:
        survived = False
        violation = str(cv)
        writer.diagnostic(violation)
        moves_done = i
    except NoLegalReply as nl:
        violation = f"devil stuck: {nl}"
        writer.diagnostic(violation)
        moves_done = i
    writer.end(survived, moves_done)
    return MatchReport(survived=survived, moves=moves_done,
                       violation=violation, final_t=d.t, final_p=d.p,
                       total_mass=d.mu.total,
                       max_stack_depth=angel.stack_depth(),
                       big_moves=angel.big_moves_done, trace=writer.text())


@dataclass
class VerifyReport:
    ok: bool
    violations: list[str] = field(default_factory=list)
    moves: int = 0
    replayed_trace: str | None = None

    def describe(self) -> str:
        if self.ok:
            return f"ok: {self.moves} moves verified, zero violations"
        return f"{len(self.violations)} violations:\n" + \
            "\n".join(f"  {v}" for v in self.violations)


def verify_trace(text: str, toy: bool = False) -> VerifyReport:
    """Replay a trace through the rules and the deterministic angel.

    Every half-move is re-checked (angel legality and determinism, devil
    legality including time bounds, path simplicity); the re-emitted trace
    must match the input byte for byte.
    """
    violations: list[str] = []
    from .moves import CATALOG
    try:
        parsed = parse_trace(text, CATALOG)
    except Exception as exc:
        return VerifyReport(ok=False, violations=[f"unparsable trace: {exc}"])
    ps = parsed.ps
    g1 = base_game(ps, toy=toy or not ps.valid)

    configs = []
    mu = Measure(q=ps.q)
    for idx, lm, t, p, j, deltas in parsed.units:
        mu = mu.deposit_many(deltas) if deltas else mu
        configs.append(Configuration(t, p, mu, j))
    devil = ReplayDevil(configs)

    writer = TraceWriter(ps, meta={k: v for k, v in parsed.meta.items()})
    tracker = TimeBoundTracker(1, ps)
    history = History(1, default_configuration(q=ps.q))
    pending_lines: list[str] = []

    def on_big(level, big_a, strat, chi, dstar):
        strat.settle_charges()
        for entry in strategy_ledger_entries(strat):
            pending_lines.append(("ledger", level, entry))
        pending_lines.append(("bigmove", level, big_a, dstar.j, len(chi.moves)))

    angel = AngelSession(ps, toy=toy or not ps.valid,
                         check_contracts=ps.valid and not toy,
                         on_big_move=on_big)
    d = history.initial
    i = 0
    try:
        for i, (idx, lm_rec, t, p, j, deltas) in enumerate(parsed.units):
            mv = angel.move(d)
            if mv != lm_rec:
                violations.append(
                    f"unit {i}: angel determinism broken: replay produced "
                    f"{mv.z.name}@{mv.w}, trace has {lm_rec.z.name}@{lm_rec.w}")
                break
            ok, why = angel_allowed(d, mv, g1, prior=history)
            if not ok:
                violations.append(f"unit {i}: angel move illegal: {why}")
            for item in pending_lines:
                if item[0] == "ledger":
                    writer.ledger(item[1], item[2])
                else:
                    writer.big_move(item[1], item[2], item[3], item[4])
            pending_lines.clear()
            writer.angel(idx, mv)
            cfg = devil.respond(g1, history, mv, tracker)
            ok, why = devil_allowed(d, mv, cfg, g1, history, tracker)
            if not ok:
                violations.append(f"unit {i}: devil move illegal: {why}")
            writer.devil(idx, d.mu, cfg)
            tracker.append(mv, d, cfg, witness=unit_witness(history, mv))
            history.append_move(mv)
            history.append_config(cfg)
            if tracker.lo != 0:
                violations.append(f"unit {i}: base path stopped being simple")
            d = cfg
    except ContractViolation as cv:
        violations.append(f"unit {i}: contract violation: {cv}")
    except NoLegalReply as nl:
        violations.append(f"unit {i}: replayed configuration rejected: {nl}")
    replayed = None
    if not violations and parsed.end is not None:
        writer.end(parsed.end["survived"], parsed.end["moves"])
        replayed = writer.text()
        if replayed != text:
            violations.append("replayed trace differs from the original bytes")
    return VerifyReport(ok=not violations, violations=violations,
                        moves=len(parsed.units), replayed_trace=replayed)
