"""Clusterings, link filtering and per-rule influence series over DIN windows.

Clustering follows the threshold-union reading: every link whose magnitude
reaches the threshold merges its source and target rules into one cluster
(new cluster / join / join / merge are all union operations). Step mode uses
one window's links, window mode averages links over a half-width of
neighboring windows (truncated at the series boundaries, absent entries
counting as zero), global mode averages over the whole series.
"""

from __future__ import annotations

from dataclasses import dataclass

from .influence import DinWindow

MODES = ("step", "window", "global")


@dataclass(frozen=True)
class ClusterConfig:
    threshold: float
    mode: str = "step"
    half_width: int = 0
    pinned: frozenset[int] = frozenset()

    def validate(self) -> None:
        if self.threshold < 0:
            raise ValueError("threshold must be nonnegative")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.half_width < 0:
            raise ValueError("half_width must be nonnegative")


@dataclass
class Clustering:
    """Partition of the rules that appear in at least one qualifying link."""

    window: int
    assignment: dict[int, int]  # rule -> cluster id (minimum member index)
    clusters: tuple[tuple[int, ...], ...]


def effective_links(
    windows: list[DinWindow], k: int, config: ClusterConfig
) -> dict[tuple[int, int], float]:
    """The link set clustering operates on, per the configured mode."""
    if config.mode == "step":
        return dict(windows[k].matrix)
    if config.mode == "window":
        lo = max(0, k - config.half_width)
        hi = min(len(windows) - 1, k + config.half_width)
        span = windows[lo : hi + 1]
    else:
        span = windows
    denom = len(span)
    sums: dict[tuple[int, int], float] = {}
    for win in span:
        for key, v in win.matrix.items():
            sums[key] = sums.get(key, 0.0) + v
    return {key: v / denom for key, v in sums.items()}


class _UnionFind:
    def __init__(self):
        self.parent: dict[int, int] = {}

    def add(self, x: int) -> None:
        self.parent.setdefault(x, x)

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def cluster(windows: list[DinWindow], k: int, config: ClusterConfig) -> Clustering:
    """Union rules across every link with |value| >= threshold; pinned rules
    never participate."""
    config.validate()
    if not 0 <= k < len(windows):
        raise IndexError(f"window index {k} out of range")
    links = effective_links(windows, k, config)
    uf = _UnionFind()
    pinned = config.pinned
    for (r, s), v in sorted(links.items()):
        if abs(v) >= config.threshold and r not in pinned and s not in pinned:
            uf.add(r)
            uf.add(s)
            uf.union(r, s)
    groups: dict[int, list[int]] = {}
    for rule in uf.parent:
        groups.setdefault(uf.find(rule), []).append(rule)
    clusters = tuple(tuple(sorted(members)) for _, members in sorted(groups.items()))
    assignment = {rule: c[0] for c in clusters for rule in c}
    return Clustering(k, assignment, clusters)


def filter_links(window: DinWindow, visibility_threshold: float) -> DinWindow:
    """Retain exactly the links with |value| >= the threshold; hits unchanged."""
    matrix = {key: v for key, v in window.matrix.items() if abs(v) >= visibility_threshold}
    return DinWindow(window.t_start, window.t_end, window.kind, window.partial, window.hits, matrix)


@dataclass
class RuleSeries:
    """Per-window influence series of one rule; absent entries are None gaps."""

    rule: int
    incoming: dict[int, list[float | None]]  # source -> series
    outgoing: dict[int, list[float | None]]  # target -> series
    self_series: list[float | None]


def rule_series(windows: list[DinWindow], rule: int) -> RuleSeries:
    n = len(windows)
    incoming: dict[int, list[float | None]] = {}
    outgoing: dict[int, list[float | None]] = {}
    for k, win in enumerate(windows):
        for (r, s), v in win.matrix.items():
            if s == rule:
                incoming.setdefault(r, [None] * n)[k] = v
            if r == rule:
                outgoing.setdefault(s, [None] * n)[k] = v
    self_series = [win.matrix.get((rule, rule)) for win in windows]
    return RuleSeries(rule, incoming, outgoing, self_series)
