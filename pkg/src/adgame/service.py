"""Turn-based session service: a human (or script) plays the devil.

The service owns the game state; clients never evaluate rules.  Requests
and responses are structured text (one key per line) over local HTTP, and
every payload reuses the canonical trace and measure serializations.  A
session is event-sourced: its exported trace rebuilds it exactly.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .classify import is_clean, is_i_good, is_i_safe
from .devils import landing_options
from .grid import Run, floor_to
from .implementation import strategy_ledger_entries
from .nested import AngelSession
from .params import ParamSet
from .rat import ZERO, rat
from .rules import (SUCC, Configuration, History, TimeBoundTracker,
                    base_game, default_configuration, devil_allowed,
                    unit_witness)
from .trace import TraceWriter

_session_ids = itertools.count(1)


class ProtocolError(Exception):
    pass


@dataclass
class Session:
    sid: str
    ps: ParamSet
    toy: bool
    g1: object
    angel: AngelSession
    history: History
    tracker: TimeBoundTracker
    writer: TraceWriter
    pending: object = None          # the angel's move awaiting the devil
    idx: int = 0
    deposited: object = ZERO
    lock: threading.Lock = field(default_factory=threading.Lock)
    ledger_tail: list = field(default_factory=list)
    pending_lines: list = field(default_factory=list)
    closed: bool = False

    @property
    def cfg(self) -> Configuration:
        return self.history.last_config()

    def flush_pending_lines(self):
        for item in self.pending_lines:
            if item[0] == "ledger":
                self.writer.ledger(item[1], item[2])
            else:
                self.writer.big_move(item[1], item[2], item[3], item[4])
        self.pending_lines.clear()

    def budget_accumulator(self):
        return self.ps.sigma * self.cfg.t - self.deposited

    def headroom(self) -> int:
        probe = Configuration(self.cfg.t, self.pending.dest_colony(),
                              self.cfg.mu, SUCC)
        cap = self.tracker.headroom(self.pending, self.cfg, probe,
                                    witness=unit_witness(self.history,
                                                         self.pending))
        return 0 if cap is None else cap

    def verdict_options(self):
        return landing_options(self.g1, self.cfg.mu, self.pending)


class SessionService:
    """Protocol logic, transport-free; the HTTP layer is a thin shell."""

    def __init__(self, ps: ParamSet, toy: bool = False):
        self.ps = ps
        self.toy = toy
        self.sessions: dict[str, Session] = {}

    # -- endpoints -----------------------------------------------------------

    def create_session(self, body: str) -> str:
        kv = _parse_body(body)
        sid = f"s{next(_session_ids)}"
        g1 = base_game(self.ps, toy=self.toy)
        meta = {"devil": kv.get("devil", "interactive"),
                "seed": int(kv.get("seed", "0")),
                "horizon": int(kv.get("horizon", "0"))}
        writer = TraceWriter(self.ps, meta=meta)
        ledger_tail: list = []
        pending_lines: list = []

        def on_big(level, big_a, strat, chi, dstar):
            strat.settle_charges()
            for entry in strategy_ledger_entries(strat):
                ledger_tail.append((level, entry.describe()))
                pending_lines.append(("ledger", level, entry))
            pending_lines.append(("bigmove", level, big_a, dstar.j,
                                  len(chi.moves)))

        angel = AngelSession(self.ps, toy=self.toy,
                             check_contracts=not self.toy,
                             on_big_move=on_big)
        history = History(1, default_configuration(q=self.ps.q))
        s = Session(sid=sid, ps=self.ps, toy=self.toy, g1=g1, angel=angel,
                    history=history, tracker=TimeBoundTracker(1, self.ps),
                    writer=writer, ledger_tail=ledger_tail)
        s.pending_lines = pending_lines
        s.pending = angel.move(s.cfg)
        s.flush_pending_lines()
        s.writer.angel(s.idx, s.pending)
        self.sessions[sid] = s
        lines = [f"session {sid}"]
        if self.toy:
            lines.append("watermark toy-parameters-not-theorem-covered")
        lines.extend(self._state_lines(s))
        return self._ok(lines)

    def devil_turn(self, body: str) -> str:
        kv = _parse_body(body)
        s = self._session(kv)
        with s.lock:
            if s.closed or s.pending is None:
                raise ProtocolError("session closed")
            dt = int(kv.get("dt", "1"))
            if dt < 0:
                raise ProtocolError("dt must be nonnegative")
            deposits = []
            for item in kv.get("deposit", []):
                cell, amount = item.split(" ")
                x, y = cell.split(",")
                deposits.append(((int(x), int(y)), rat(amount)))
            total = sum((a for _c, a in deposits), ZERO)
            if total > self.ps.sigma * dt:
                raise ProtocolError(
                    f"over budget: {total} > sigma*dt = {self.ps.sigma * dt}")
            verdict = kv.get("verdict", SUCC)
            mu2 = s.cfg.mu.deposit_many(deposits) if deposits else s.cfg.mu
            options = landing_options(s.g1, mu2, s.pending)
            chosen = None
            if "landing" in kv:
                lx, ly = kv["landing"].split(",")
                want_p = (int(lx), int(ly))
                for v, p in options:
                    if v == verdict and p == want_p:
                        chosen = (v, p)
                        break
            else:
                for v, p in options:
                    if v == verdict:
                        chosen = (v, p)
                        break
            if chosen is None:
                raise ProtocolError(
                    f"no legal landing for verdict {verdict}; options: "
                    + " ".join(f"{v}@{p[0]},{p[1]}" for v, p in options))
            cand = Configuration(s.cfg.t + dt, chosen[1], mu2, chosen[0])
            ok, why = devil_allowed(s.cfg, s.pending, cand, s.g1,
                                    s.history, s.tracker)
            if not ok:
                raise ProtocolError(f"illegal devil move: {why}")
            prev = s.cfg
            s.tracker.append(s.pending, prev, cand,
                             witness=unit_witness(s.history, s.pending))
            s.writer.devil(s.idx, prev.mu, cand)
            s.history.append_move(s.pending)
            s.history.append_config(cand)
            s.deposited += total
            s.idx += 1
            try:
                s.pending = s.angel.move(cand)
            except Exception as exc:
                s.pending = None
                s.writer.diagnostic(f"angel stopped: {exc}")
                return self._ok([f"session {s.sid}", "angel stopped",
                                 f"reason {exc}"])
            s.flush_pending_lines()
            s.writer.angel(s.idx, s.pending)
            return self._ok([f"session {s.sid}"] + self._state_lines(s))

    def get_view(self, body: str) -> str:
        kv = _parse_body(body)
        s = self._session(kv)
        with s.lock:
            zoom = int(kv.get("zoom", "0"))
            if "viewport" in kv:
                x0, y0, x1, y1 = (int(v) for v in kv["viewport"].split(","))
            else:
                px, py = s.cfg.p
                x0, y0, x1, y1 = px - 12, py - 12, px + 12, py + 12
            side = self.ps.q ** zoom
            cells = []
            mu = s.cfg.mu
            for (cx, cy), w in sorted(mu.items()):
                if x0 <= cx <= x1 and y0 <= cy <= y1:
                    cells.append(((cx, cy), w))
            colonies: dict = {}
            for (cx, cy), w in cells:
                key = floor_to(side, (cx, cy)) if side > 1 else (cx, cy)
                colonies[key] = colonies.get(key, ZERO) + w
            lines = [f"session {s.sid}"] + self._state_lines(s)
            lines.append("cells " + (";".join(
                f"{c[0]},{c[1]}:{w.numerator}/{w.denominator}"
                for c, w in sorted(colonies.items())) or "-"))
            flags = []
            for c in sorted(colonies):
                run = Run(c, side, 1, horizontal=True)
                tags = []
                if is_i_good(mu, run, 0, self.ps):
                    tags.append("good")
                if is_i_safe(mu, run, 0, self.ps):
                    tags.append("safe")
                if is_clean(mu, run, 0, self.ps):
                    tags.append("clean")
                flags.append(f"{c[0]},{c[1]}:{'+'.join(tags) or '-'}")
            lines.append("flags " + (";".join(flags) or "-"))
            tail = s.writer.lines[-8:]
            for t in tail:
                lines.append("hist " + t)
            for level, desc in s.ledger_tail[-5:]:
                lines.append(f"ledgertail {level} {desc}")
            return self._ok(lines)

    def export_trace(self, body: str) -> str:
        """The session's trace as the harness would have written it: the
        still-unanswered angel move is omitted and an end line appended."""
        kv = _parse_body(body)
        s = self._session(kv)
        with s.lock:
            lines = list(s.writer.lines)
            if lines and s.pending is not None \
                    and lines[-1] == f"a {s.idx} {s.pending.z.name} " \
                                     f"{s.pending.w[0]},{s.pending.w[1]}":
                lines.pop()
            lines.append(f"end survived=1 moves={s.idx}")
            return self._ok([f"session {s.sid}", "trace-begin"]
                            + lines + ["trace-end"])

    def close_session(self, body: str) -> str:
        kv = _parse_body(body)
        s = self._session(kv)
        with s.lock:
            s.closed = True
            s.writer.end(True, s.idx)
            self.sessions.pop(s.sid, None)
            return self._ok([f"session {s.sid}", "closed"])

    # -- helpers ----------------------------------------------------------------

    def _session(self, kv) -> Session:
        sid = kv.get("session")
        if not sid or sid not in self.sessions:
            raise ProtocolError(f"unknown session {sid!r}")
        return self.sessions[sid]

    def _state_lines(self, s: Session) -> list[str]:
        cfg = s.cfg
        lines = [
            f"angel {cfg.p[0]},{cfg.p[1]}",
            f"t {cfg.t}",
            f"mass {cfg.mu.total.numerator}/{cfg.mu.total.denominator}",
            f"budget {s.budget_accumulator().numerator}/"
            f"{s.budget_accumulator().denominator}",
            f"sigma {self.ps.sigma.numerator}/{self.ps.sigma.denominator}",
            f"q {self.ps.q}",
        ]
        if s.pending is not None:
            lines.append(f"pending {s.pending.z.name} "
                         f"{s.pending.w[0]},{s.pending.w[1]}")
            lines.append(f"headroom {s.headroom()}")
            opts = s.verdict_options()
            lines.append("options " + (" ".join(
                f"{v}@{p[0]},{p[1]}" for v, p in opts) or "-"))
        return lines

    @staticmethod
    def _ok(lines: list[str]) -> str:
        return "ok\n" + "\n".join(lines) + "\n"

    def handle(self, path: str, body: str) -> tuple[int, str]:
        try:
            if path == "/create-session":
                return 200, self.create_session(body)
            if path == "/devil-turn":
                return 200, self.devil_turn(body)
            if path == "/get-view":
                return 200, self.get_view(body)
            if path == "/export-trace":
                return 200, self.export_trace(body)
            if path == "/close-session":
                return 200, self.close_session(body)
            return 404, f"err unknown endpoint {path}\n"
        except ProtocolError as pe:
            return 400, f"err {pe}\n"


def _parse_body(body: str) -> dict:
    """key value lines; repeated `deposit` keys collect into a list."""
    out: dict = {}
    for line in body.splitlines():
        line = line.strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        if key == "deposit":
            out.setdefault("deposit", []).append(rest)
        else:
            out[key] = rest
    return out


class _Handler(BaseHTTPRequestHandler):
    service: SessionService = None

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        body = self.rfile.read(length).decode("utf-8")
        code, text = self.service.handle(self.path, body)
        data = text.encode("utf-8")
        self.send_response(code)
        self.send_header("Content-Type", "text/plain; charset=utf-8")
        self.send_header("Content-Length", str(len(data)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(data)

    def do_OPTIONS(self):
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()

    def log_message(self, fmt, *args):
        pass


def make_server(ps: ParamSet, host="127.0.0.1", port=8642, toy=False):
    service = SessionService(ps, toy=toy)
    handler = type("Handler", (_Handler,), {"service": service})
    httpd = ThreadingHTTPServer((host, port), handler)
    return httpd, service


def serve(ps: ParamSet, host="127.0.0.1", port=8642, toy=False):
    httpd, _service = make_server(ps, host, port, toy)
    mode = "toy" if toy else "valid"
    print(f"adgame session service on http://{host}:{httpd.server_address[1]} "
          f"[{mode} parameters]")
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        pass
