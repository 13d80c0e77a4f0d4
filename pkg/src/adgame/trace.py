"""Line-delimited trace format with bit-exact round-trips.

One line per half-move: the angel's line names the move and its colony
position; the devil's line carries the clock, landing point, verdict and
the sorted list of deposit deltas.  Ledger and big-move summary lines are
appended as they happen so traces double as audit logs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .measure import Measure
from .moves import LocatedMove
from .params import ParamSet
from .rat import rat
from .rules import Configuration

HEADER = "adgame-trace v1"


def _fmt_rat(x) -> str:
    return f"{x.numerator}/{x.denominator}"


def params_line(ps: ParamSet) -> str:
    return (f"params q={ps.q} kappa={ps.kappa} nu={ps.nu} theta={ps.theta} "
            f"xi={_fmt_rat(ps.xi)} delta={_fmt_rat(ps.delta)} "
            f"sigma={_fmt_rat(ps.sigma)} rho1={_fmt_rat(ps.rho1)} "
            f"rho2={_fmt_rat(ps.rho2)} valid={int(ps.valid)}")


def parse_params_line(line: str) -> ParamSet:
    kv = dict(part.split("=", 1) for part in line.split()[1:])
    return ParamSet(q=int(kv["q"]), kappa=int(kv["kappa"]), nu=int(kv["nu"]),
                    theta=int(kv["theta"]), xi=rat(kv["xi"]),
                    delta=rat(kv["delta"]), sigma=rat(kv["sigma"]),
                    rho1=rat(kv["rho1"]), rho2=rat(kv["rho2"]),
                    valid=bool(int(kv["valid"])))


def angel_line(idx: int, lm: LocatedMove) -> str:
    return f"a {idx} {lm.z.name} {lm.w[0]},{lm.w[1]}"


def devil_line(idx: int, prev_mu: Measure, cfg: Configuration) -> str:
    deltas = sorted(cfg.mu.deltas_since(prev_mu))
    dmu = ";".join(f"{x},{y}:{_fmt_rat(a)}" for (x, y), a in deltas) or "-"
    return (f"d {idx} t={cfg.t} p={cfg.p[0]},{cfg.p[1]} j={cfg.j} dmu={dmu}")


@dataclass
class TraceWriter:
    ps: ParamSet
    meta: dict = field(default_factory=dict)
    lines: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.lines.append(HEADER)
        self.lines.append(params_line(self.ps))
        if self.meta:
            kv = " ".join(f"{k}={v}" for k, v in sorted(self.meta.items()))
            self.lines.append(f"meta {kv}")

    def angel(self, idx: int, lm: LocatedMove):
        self.lines.append(angel_line(idx, lm))

    def devil(self, idx: int, prev_mu: Measure, cfg: Configuration):
        self.lines.append(devil_line(idx, prev_mu, cfg))

    def big_move(self, level: int, lm: LocatedMove, verdict: str, nmoves: int):
        self.lines.append(
            f"bigmove {level} {lm.z.name} w={lm.w[0]},{lm.w[1]} "
            f"j={verdict} moves={nmoves}")

    def ledger(self, level: int, entry) -> None:
        self.lines.append(f"ledger {level} {entry.describe()}")

    def stack(self, snapshot) -> None:
        parts = " ".join(f"{k}:{n}:{name}" for k, n, name in snapshot)
        self.lines.append(f"stack {parts}")

    def diagnostic(self, text: str):
        self.lines.append(f"diagnostic {text}")

    def end(self, survived: bool, moves: int):
        self.lines.append(f"end survived={int(survived)} moves={moves}")

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


@dataclass
class ParsedTrace:
    ps: ParamSet
    meta: dict
    units: list  # (idx, LocatedMove-name+w, devil config fields)
    lines: list[str]
    end: dict | None


def parse_trace(text: str, catalog) -> ParsedTrace:
    lines = text.splitlines()
    if not lines or lines[0] != HEADER:
        raise ValueError("not an adgame trace")
    ps = parse_params_line(lines[1])
    meta = {}
    units = []
    end = None
    pending = None
    for line in lines[2:]:
        if not line:
            continue
        kind = line.split(" ", 1)[0]
        if kind == "meta":
            meta = dict(p.split("=", 1) for p in line.split()[1:])
        elif kind == "a":
            _, idx, name, w = line.split()
            wx, wy = w.split(",")
            pending = (int(idx), LocatedMove((int(wx), int(wy)),
                                             catalog.get(name)))
        elif kind == "d":
            parts = line.split()
            idx = int(parts[1])
            kv = dict(p.split("=", 1) for p in parts[2:])
            px, py = kv["p"].split(",")
            deltas = []
            if kv["dmu"] != "-":
                for item in kv["dmu"].split(";"):
                    cell, val = item.split(":")
                    x, y = cell.split(",")
                    deltas.append(((int(x), int(y)), rat(val)))
            if pending is None or pending[0] != idx:
                raise ValueError(f"devil line {idx} without matching angel line")
            units.append((idx, pending[1], int(kv["t"]), (int(px), int(py)),
                          kv["j"], deltas))
            pending = None
        elif kind == "end":
            kv = dict(p.split("=", 1) for p in line.split()[1:])
            end = {"survived": bool(int(kv["survived"])),
                   "moves": int(kv["moves"])}
    return ParsedTrace(ps=ps, meta=meta, units=units, lines=lines, end=end)
