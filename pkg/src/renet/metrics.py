"""Per-request cost ledgers, reset-window reports, and the cost ratio rho.

Every served request appends one ledger row {hops, adjust, coord, reset}.
Reset events mark window boundaries: window i spans the requests between the
(i-1)-th and i-th reset, with a trailing partial window after the last one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO, Sequence

from .entropy import X_GIVEN_Y, Y_GIVEN_X, conditional_entropy, normalized
from .trace import Trace


@dataclass
class CostLedger:
    hops: list = field(default_factory=list)
    adjust: list = field(default_factory=list)
    coord: list = field(default_factory=list)
    reset: list = field(default_factory=list)
    reset_marks: list = field(default_factory=list)  # request indices that fired a reset

    @property
    def m(self) -> int:
        return len(self.hops)

    def append(self, hops: int, adjust: int, coord: int, reset: int) -> None:
        if reset:
            self.reset_marks.append(len(self.hops))
        self.hops.append(hops)
        self.adjust.append(adjust)
        self.coord.append(coord)
        self.reset.append(reset)

    def slice(self, start: int, stop: int) -> "CostLedger":
        sub = CostLedger(
            hops=self.hops[start:stop],
            adjust=self.adjust[start:stop],
            coord=self.coord[start:stop],
            reset=self.reset[start:stop],
        )
        sub.reset_marks = [i - start for i in self.reset_marks if start <= i < stop]
        return sub


def average_cost(ledger: CostLedger, include_coord: bool = True) -> float:
    """Mean per-request cost: hops + adjustments, plus control traffic if asked."""
    if ledger.m == 0:
        raise ValueError("empty ledger")
    total = sum(ledger.hops) + sum(ledger.adjust)
    if include_coord:
        total += sum(ledger.coord) + sum(ledger.reset)
    return total / ledger.m


@dataclass(frozen=True)
class WindowRow:
    index: int
    start: int
    length: int
    avg_cost: float
    h_con: float  # max of the two conditional entropies of the window, base Delta


def window_report(
    ledger: CostLedger, trace: Trace, base: float, include_coord: bool = True
) -> list[WindowRow]:
    """One row per reset-delimited window, plus the trailing partial window."""
    if ledger.m != len(trace):
        raise ValueError(f"ledger has {ledger.m} rows but trace has {len(trace)} requests")
    bounds = [0] + list(ledger.reset_marks) + [ledger.m]
    rows = []
    for i in range(len(bounds) - 1):
        start, stop = bounds[i], bounds[i + 1]
        if stop <= start:
            continue
        sub = ledger.slice(start, stop)
        joint = normalized(trace.pair_counts(start, stop))
        h_con = max(
            conditional_entropy(joint, Y_GIVEN_X, base),
            conditional_entropy(joint, X_GIVEN_Y, base),
        )
        rows.append(
            WindowRow(
                index=i,
                start=start,
                length=stop - start,
                avg_cost=average_cost(sub, include_coord),
                h_con=h_con,
            )
        )
    return rows


def rho_estimate(renet_avg: float, stat_avg: float) -> float:
    """Static-optimality ratio: online average cost over the static baseline's."""
    if stat_avg <= 0:
        raise ValueError("static baseline average must be positive")
    return renet_avg / stat_avg


LEDGER_CSV_HEADER = "req_idx,hops,adjust,coord,reset"
WINDOWS_CSV_HEADER = "window,start,length,avg_cost,h_con"


def write_ledger_csv(ledger: CostLedger, fh: IO[str]) -> None:
    fh.write(LEDGER_CSV_HEADER + "\n")
    for i in range(ledger.m):
        fh.write(f"{i},{ledger.hops[i]},{ledger.adjust[i]},{ledger.coord[i]},{ledger.reset[i]}\n")


def write_windows_csv(rows: Sequence[WindowRow], fh: IO[str]) -> None:
    fh.write(WINDOWS_CSV_HEADER + "\n")
    for r in rows:
        fh.write(f"{r.index},{r.start},{r.length},{r.avg_cost:.9f},{r.h_con:.9f}\n")
