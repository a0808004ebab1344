"""Per-event influence contributions and their aggregation into DIN windows.

Each non-null event due to rule ``r`` contributes a sparse vector over target
rules: either the relative activity change (activity kind) or the shift in
firing probabilities (probability kind). Window accumulators sum these per
source rule and divide by the source's hit count on finalization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matching import ActivityVector


@dataclass(frozen=True)
class EventDelta:
    """One event's influence contribution: sparse over target rules."""

    source: int
    entries: tuple[tuple[int, float], ...]


def event_delta_activity(source: int, before: ActivityVector, after: ActivityVector) -> EventDelta:
    """Relative activity change per target; zero (omitted) when the target's
    activity was zero before the event or did not change."""
    entries = []
    for s, (b, a) in enumerate(zip(before.alpha, after.alpha)):
        if b != 0.0 and a != b:
            entries.append((s, (a - b) / b))
    return EventDelta(source, tuple(entries))


def event_delta_probability(source: int, before: ActivityVector, after: ActivityVector) -> EventDelta:
    """Firing-probability shift per target.

    Requires positive system activity before the event. If the event drives
    the system activity to zero, all after-probabilities are taken as zero
    (deadlock convention), so the entries sum to -1 instead of 0.
    """
    lb = before.lam
    assert lb > 0.0, "probability delta undefined at zero prior activity"
    la = after.lam
    entries = []
    for s, (b, a) in enumerate(zip(before.alpha, after.alpha)):
        pb = b / lb
        pa = a / la if la > 0.0 else 0.0
        if pa != pb:
            entries.append((s, pa - pb))
    return EventDelta(source, tuple(entries))


@dataclass
class DinWindow:
    """One tiled interval: per-rule hits and the averaged influence matrix."""

    t_start: float
    t_end: float
    kind: str
    partial: bool
    hits: tuple[int, ...]
    matrix: dict[tuple[int, int], float]


class WindowAccumulator:
    """Running sums of event deltas and hit counts for the open window."""

    def __init__(self, n_rules: int, kind: str):
        self.n_rules = n_rules
        self.kind = kind
        self.sums = np.zeros((n_rules, n_rules))
        self.hits = np.zeros(n_rules, dtype=np.int64)

    def add(self, delta: EventDelta) -> None:
        self.hits[delta.source] += 1
        row = self.sums[delta.source]
        for s, v in delta.entries:
            row[s] += v

    def finalize(self, t_start: float, t_end: float, partial: bool = False) -> DinWindow:
        """Divide rows by hit counts, drop empty entries, reset for the next window."""
        matrix: dict[tuple[int, int], float] = {}
        for r in range(self.n_rules):
            h = int(self.hits[r])
            if h == 0:
                continue
            row = self.sums[r]
            for s in range(self.n_rules):
                v = row[s]
                if v != 0.0:
                    matrix[(r, s)] = float(v / h)
        win = DinWindow(
            t_start, t_end, self.kind, partial, tuple(int(h) for h in self.hits), matrix
        )
        self.sums.fill(0.0)
        self.hits.fill(0)
        return win


def window_tiling(t_end: float, tau: float) -> tuple[int, bool]:
    """Window count tiling [0, t_end] by tau, and whether the last is short."""
    n_full = int(t_end / tau + 1e-9)
    rem = t_end - n_full * tau
    if rem > 1e-9 * max(tau, t_end):
        return n_full + 1, True
    return max(n_full, 1), False


def window_index(t: float, tau: float, n_windows: int) -> int:
    return min(int(t / tau), n_windows - 1)


def window_bounds(k: int, tau: float, t_end: float, n_windows: int) -> tuple[float, float]:
    start = k * tau
    end = t_end if k == n_windows - 1 else (k + 1) * tau
    return start, end


def windows_from_trace(records, n_rules: int, tau: float, t_end: float, kind: str) -> list[DinWindow]:
    """Recompute DIN windows from an event trace (dict records, event order).

    Null events are skipped; deltas are accumulated in record order, so the
    result matches the online accumulation bit for bit.
    """
    n_windows, last_partial = window_tiling(t_end, tau)
    acc = WindowAccumulator(n_rules, kind)
    windows: list[DinWindow] = []
    cur = 0

    def close(upto: int) -> None:
        nonlocal cur
        while cur < upto:
            s, e = window_bounds(cur, tau, t_end, n_windows)
            windows.append(acc.finalize(s, e, cur == n_windows - 1 and last_partial))
            cur += 1

    for rec in records:
        if rec.get("null"):
            continue
        widx = window_index(rec["t"], tau, n_windows)
        close(widx)
        delta = EventDelta(
            int(rec["rule"]), tuple((int(s), float(v)) for s, v in rec.get("deltas", ()))
        )
        acc.add(delta)
    close(n_windows)
    return windows
