"""The amplifier and the nested strategy.

Games are numbered from 1 with colony sizes B_k = Q^(k-1); each level's
clearance relations are derived from the level below.  The nested
evaluator keeps a stack of per-level histories: level k's history covers
the implementation of the last move of level k+1.  When a level's
implementation halts, the judged configuration is pushed one level up and
the level restarts on the next big move; the tower grows lazily when the
recursion reaches its top.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .implementation import (ContractViolation, ImplementationMap,
                             LocalStrategy, verify_time_transfer)
from .moves import LocatedMove
from .params import ParamSet
from .rules import (Configuration, GameSpec, History, base_game,
                    default_configuration, default_move, devil_allowed)
from .scaleup import scale_up


@dataclass
class Amplifier:
    """The lazily built tower of games linked by implementation maps."""

    games: list[GameSpec]
    maps: list[ImplementationMap]

    @property
    def depth(self) -> int:
        return len(self.games)

    def game(self, k: int) -> GameSpec:
        while len(self.games) < k:
            self.games.append(scale_up(self.games[-1]))
            self.maps.append(ImplementationMap(self.games[-2]))
        return self.games[k - 1]

    def map_for(self, k: int) -> ImplementationMap:
        """The implementation map translating level-(k+1) moves to level k."""
        self.game(k + 1)
        return self.maps[k - 1]


def build_amplifier(ps: ParamSet, depth: int = 1, toy: bool = False) -> Amplifier:
    g1 = base_game(ps, toy)
    amp = Amplifier(games=[g1], maps=[])
    amp.game(max(1, depth))
    return amp


class AngelSession:
    """The plain strategy eta: feeds devil configurations, yields moves.

    Holds the stack of per-level histories and the per-level local
    strategies; everything is deterministic in the devil's configurations.
    """

    def __init__(self, ps: ParamSet, toy: bool = False,
                 check_contracts: bool = True,
                 on_big_move: Optional[Callable] = None):
        self.ps = ps
        self.amp = build_amplifier(ps, 1, toy)
        self.stack: list[History] | None = None
        self.check_contracts = check_contracts
        self.on_big_move = on_big_move
        self.big_moves_done = 0

    # -- plumbing ---------------------------------------------------------

    def b_of(self, k: int) -> int:
        return self.amp.game(k).b

    def default_record(self, k: int):
        g = self.amp.game(k)
        return (default_configuration(q=self.ps.q), default_move(g.catalog))

    def default_ahistory(self, k: int) -> History:
        d0, a0 = self.default_record(k)
        h = History(self.b_of(k), d0)
        h.append_move(a0)
        return h

    def move(self, d: Configuration) -> LocatedMove:
        """eta: the angel's next base move after the devil's configuration."""
        if self.stack is None:
            self.stack = self._work([History(1, d)], 1)
        else:
            self.stack[0].append_config(d)
            self.stack = self._work(self.stack, 1)
        if self.check_contracts:
            self._check_stack()
        return self.stack[0].moves[-1]

    def _check_stack(self):
        """Well-formedness: scales line up and no trailing default history.

        Histories above the base level must also have simple paths (the
        base level's simplicity is enforced by the session's tracker).
        """
        from .rules import history_is_simple
        for k, h in enumerate(self.stack, start=1):
            if h.b != self.b_of(k):
                raise ContractViolation(
                    "stack-scale", f"level {k} history at colony size {h.b}")
            if not h.moves:
                raise ContractViolation("stack-shape",
                                        f"level {k} history has no moves")
            if k > 1 and not history_is_simple(h):
                raise ContractViolation(
                    "stack-simplicity", f"level {k} history path not simple")
        if len(self.stack) > 1:
            top = self.stack[-1]
            d0, a0 = self.default_record(len(self.stack))
            if len(top.moves) == 1 and top.moves[0] == a0 \
                    and top.configs[0].essential() == d0.essential():
                raise ContractViolation(
                    "stack-shape", "trailing default history stored explicitly")

    def stack_depth(self) -> int:
        return 0 if self.stack is None else len(self.stack)

    def stack_snapshot(self) -> list[tuple[int, int, str]]:
        out = []
        if self.stack:
            for k, h in enumerate(self.stack, start=1):
                last = h.moves[-1].z.name if h.moves else "-"
                out.append((k, len(h.moves), last))
        return out

    # -- the nested strategy ------------------------------------------------

    def _work(self, stack: list[History], k: int) -> list[History]:
        chi1 = stack[0]
        if len(stack) > 1:
            big_d = stack[1].configs[-1]
            big_a = stack[1].moves[-1]
        else:
            big_d, big_a = self.default_record(k + 1)
        imap = self.amp.map_for(k)
        mv = imap.phi(chi1, big_d, big_a)
        if mv is not None:
            chi1.append_move(mv)
            return stack
        # halting: judge, push the configuration a level up, restart here
        dstar = imap.big_configuration(chi1, big_d, big_a)
        strat = imap.strategy_for(chi1, big_d, big_a)
        if self.check_contracts:
            self._check_big_unit(k, stack, big_d, big_a, dstar, chi1, strat)
        if self.on_big_move is not None:
            self.on_big_move(k + 1, big_a, strat, chi1, dstar)
        self.big_moves_done += 1
        substack = stack[1:] if len(stack) > 1 else [self.default_ahistory(k + 1)]
        new_sub = self._psi(dstar, substack, k + 1)
        nd = new_sub[0].configs[-1]
        na = new_sub[0].moves[-1]
        carry = chi1.moves[-1] if chi1.moves else None
        d = chi1.last_config()
        chi1p = History(self.b_of(k), d, initial_witness=carry)
        mv2 = self.amp.map_for(k).phi(chi1p, nd, na)
        if mv2 is None:
            raise ContractViolation(
                "halt-on-fresh-history",
                "an implementation may not halt before two small moves")
        chi1p.append_move(mv2)
        return [chi1p] + new_sub

    def _psi(self, d: Configuration, stack: list[History], k: int) -> list[History]:
        stack[0].append_config(d)
        return self._work(stack, k)

    def _check_big_unit(self, k, stack, big_d, big_a, dstar, chi1,
                        strat: LocalStrategy):
        """Contract checks for one completed big unit."""
        gstar = self.amp.game(k + 1)
        bstar = gstar.b
        if len(stack) > 1:
            h = stack[1]
            before = History(h.b, h.configs[0], h.initial_witness)
            before.configs = list(h.configs)
            before.moves = list(h.moves[:-1])
        else:
            before = History(bstar, big_d)
        ok, why = devil_allowed(big_d, big_a, dstar, gstar, before)
        if not ok:
            raise ContractViolation(
                "big-devil-move", f"judged configuration illegal one level up: {why}")
        ok, problems = verify_time_transfer(big_d, big_a, dstar, chi1,
                                            strat, self.ps, self.b_of(k))
        if not ok:
            raise ContractViolation("time-transfer", "; ".join(problems))
        if chi1.last_config().t - chi1.initial.t > self.ps.theta * bstar:
            raise ContractViolation(
                "move-duration", f"big move took longer than theta*B*")
        drift = chi1.last_config().mu.total - chi1.initial.mu.total
        if drift >= self.ps.delta * self.b_of(k):
            raise ContractViolation("drift", "mass gained delta*B within one move")
