"""Continuous-time stochastic simulation driving influence accumulation.

The engine is the direct method: one exponential waiting time at the system
activity, a categorical rule choice by relative propensity, then one uniform
embedding per left component. Overlapping component images make the event
null: time advances but nothing else happens.

Randomness comes from a single numpy PCG64 stream seeded by the config. Each
event consumes, in order: one uniform for the waiting time (inverted to an
exponential), one uniform for the rule choice, and one uniform per left
component of the chosen rule. Nothing else draws from the stream, so equal
(model, config) pairs reproduce runs exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .influence import (
    DinWindow,
    EventDelta,
    WindowAccumulator,
    event_delta_activity,
    event_delta_probability,
    window_bounds,
    window_index,
    window_tiling,
)
from .matching import ActivityVector, MatchTracker, count_pattern
from .mixture import CompiledModel, Embedding, Mixture, apply_rule
from .model import Model, Observable

DIN_KINDS = ("activity", "probability")


class ConfigError(ValueError):
    """Invalid simulation configuration, rejected before any work starts."""


class DeadlockReached(Exception):
    """System activity hit zero; the run halts cleanly."""


@dataclass(frozen=True)
class SimConfig:
    t_end: float
    tau: float
    din_kind: str = "activity"
    seed: int = 0
    obs_sample: float | None = None  # defaults to tau
    max_events: int | None = None
    trace_path: str | None = None

    def validate(self) -> None:
        if not self.t_end > 0:
            raise ConfigError("t_end must be positive")
        if not self.tau > 0:
            raise ConfigError("tau must be positive")
        if self.tau > self.t_end:
            raise ConfigError("tau must not exceed t_end")
        if self.din_kind not in DIN_KINDS:
            raise ConfigError(f"din_kind must be one of {DIN_KINDS}")
        if self.obs_sample is not None and not self.obs_sample > 0:
            raise ConfigError("obs_sample must be positive")
        if self.max_events is not None and self.max_events < 0:
            raise ConfigError("max_events must be nonnegative")

    @property
    def obs_period(self) -> float:
        return self.tau if self.obs_sample is None else self.obs_sample


@dataclass(frozen=True)
class EventRecord:
    index: int
    time: float
    rule: int
    is_null: bool


@dataclass
class ObservableSeries:
    names: list[str]
    times: list[float]
    values: list[list[float | int]]  # row per time point


@dataclass
class SimResult:
    din: dict[str, list[DinWindow]]
    observables: ObservableSeries
    event_stats: dict
    config: SimConfig
    n_rules: int


def eval_observable(mix: Mixture, obs: Observable) -> float | int:
    """Pattern count (integer) or weighted sum of pattern counts."""
    if obs.is_count:
        return count_pattern(mix, obs.terms[0].pattern)
    return sum(t.coeff * count_pattern(mix, t.pattern) for t in obs.terms)


class Simulation:
    """One trajectory: mixture, match sets, activities, windows, observables.

    ``step`` executes a single event and returns its record, ``None`` once the
    next event would pass ``t_end`` (the run is then finalized), and raises
    :class:`DeadlockReached` at zero system activity. After a non-null step
    the selected embedding and both influence deltas are available on
    ``last_embedding`` / ``last_delta``.
    """

    def __init__(self, model: Model, config: SimConfig, full_recount: bool = False):
        config.validate()
        self.model = model
        self.config = config
        self.full_recount = full_recount
        self.cm = CompiledModel(model)
        self.mix = self.cm.init_mixture()
        self.tracker = MatchTracker(self.mix)
        self.rng = np.random.Generator(np.random.PCG64(config.seed))
        self.n_rules = len(self.cm.rules)

        self.time = 0.0
        self.index = 0
        self.alpha = self._compute_alpha()
        self.firings = [0] * self.n_rules
        self.null_events = 0

        self.n_windows, self.last_partial = window_tiling(config.t_end, config.tau)
        self.acc = {k: WindowAccumulator(self.n_rules, k) for k in DIN_KINDS}
        self.windows: dict[str, list[DinWindow]] = {k: [] for k in DIN_KINDS}
        self.cur_window = 0

        self.obs_period = config.obs_period
        self.obs_times: list[float] = []
        self.obs_values: list[list[float | int]] = []
        self._next_sample = 0

        self.finished = False
        self.status = "running"
        self.on_event = None  # callable(record, delta_or_None); set by run() for tracing
        self.last_embedding: Embedding | None = None
        self.last_delta: dict[str, EventDelta] | None = None

    # -- activities -----------------------------------------------------

    def _compute_alpha(self) -> tuple[float, ...]:
        count = self.tracker.count
        alpha = []
        for crule in self.cm.rules:
            prod = 1
            for cid in crule.comp_ids:
                prod *= count(cid)
                if prod == 0:
                    break
            alpha.append(crule.rate * prod / crule.symmetry if prod else 0.0)
        return tuple(alpha)

    def activity_vector(self) -> ActivityVector:
        return ActivityVector(self.alpha)

    # -- observables ------------------------------------------------------

    def _eval_observables(self) -> list[float | int]:
        count = self.tracker.count
        out: list[float | int] = []
        for cobs in self.cm.observables:
            if cobs.is_count:
                prod = 1
                for cid in cobs.terms[0][1]:
                    prod *= count(cid)
                out.append(prod)
            else:
                total = 0.0
                for coeff, cids in cobs.terms:
                    prod = 1
                    for cid in cids:
                        prod *= count(cid)
                    total += coeff * prod
                out.append(total)
        return out

    def _sample_obs_before(self, limit: float) -> None:
        """Record observable rows at grid times strictly below ``limit``."""
        t_end = self.config.t_end
        tol = 1e-9 * max(1.0, t_end)
        while True:
            ts = self._next_sample * self.obs_period
            if ts > t_end + tol or ts >= limit:
                break
            self.obs_times.append(min(ts, t_end))
            self.obs_values.append(self._eval_observables())
            self._next_sample += 1

    # -- windows ----------------------------------------------------------

    def _roll_windows(self, upto: int, deadlock_at: int | None = None) -> None:
        cfg = self.config
        while self.cur_window < upto:
            k = self.cur_window
            s, e = window_bounds(k, cfg.tau, cfg.t_end, self.n_windows)
            partial = (k == self.n_windows - 1 and self.last_partial) or k == deadlock_at
            for kind in DIN_KINDS:
                self.windows[kind].append(self.acc[kind].finalize(s, e, partial))
            self.cur_window += 1

    def _finish(self, status: str, deadlock: bool = False) -> None:
        if self.finished:
            return
        self._sample_obs_before(math.inf)
        dead_at = window_index(self.time, self.config.tau, self.n_windows) if deadlock else None
        self._roll_windows(self.n_windows, deadlock_at=dead_at)
        self.finished = True
        self.status = status

    # -- events -----------------------------------------------------------

    def step(self) -> EventRecord | None:
        """Execute one event. None once the horizon is reached."""
        if self.finished:
            return None
        lam = sum(self.alpha)
        if lam <= 0.0:
            self._finish("deadlock", deadlock=True)
            raise DeadlockReached(f"system activity is zero at t={self.time}")
        cfg = self.config
        rng_random = self.rng.random

        dt = -math.log1p(-rng_random()) / lam
        t_next = self.time + dt
        if t_next > cfg.t_end:
            self._finish("completed")
            return None

        self._sample_obs_before(t_next)
        self._roll_windows(window_index(t_next, cfg.tau, self.n_windows))

        u = rng_random() * lam
        acc = 0.0
        rule_idx = -1
        for i, a in enumerate(self.alpha):
            acc += a
            if u < acc:
                rule_idx = i
                break
        if rule_idx < 0:  # u landed on accumulated round-off past the last rule
            rule_idx = max(i for i, a in enumerate(self.alpha) if a > 0.0)

        crule = self.cm.rules[rule_idx]
        maps = []
        seen: set[int] = set()
        clash = False
        for cid in crule.comp_ids:
            images = self.tracker.sample(cid, rng_random())
            maps.append(images)
            for a in images:
                if a in seen:
                    clash = True
            seen.update(images)

        self.time = t_next
        rec = EventRecord(self.index, t_next, rule_idx, clash)
        self.index += 1

        if clash:
            self.null_events += 1
            self.last_embedding = None
            self.last_delta = None
        else:
            emb = Embedding(tuple(maps))
            before = ActivityVector(self.alpha)
            effect = apply_rule(self.mix, rule_idx, emb)
            if self.full_recount:
                self.tracker.rebuild()
            else:
                self.tracker.update(effect.touched)
            self.alpha = self._compute_alpha()
            after = ActivityVector(self.alpha)
            deltas = {
                "activity": event_delta_activity(rule_idx, before, after),
                "probability": event_delta_probability(rule_idx, before, after),
            }
            for kind in DIN_KINDS:
                self.acc[kind].add(deltas[kind])
            self.firings[rule_idx] += 1
            self.last_embedding = emb
            self.last_delta = deltas

        if self.on_event is not None:
            self.on_event(rec, None if clash else self.last_delta[cfg.din_kind])
        if cfg.max_events is not None and self.index >= cfg.max_events:
            self._finish("max_events")
        return rec

    def result(self) -> SimResult:
        if not self.finished:
            self._finish("completed")
        series = ObservableSeries(
            [o.name for o in self.model.observables], self.obs_times, self.obs_values
        )
        stats = {
            "events": self.index,
            "null_events": self.null_events,
            "firings": list(self.firings),
            "end_time": self.time,
            "status": self.status,
        }
        return SimResult(self.windows, series, stats, self.config, self.n_rules)


def _trace_line(rec: EventRecord, delta: EventDelta | None) -> str:
    obj: dict = {"i": rec.index, "t": rec.time, "rule": rec.rule, "null": rec.is_null}
    if delta is not None:
        obj["deltas"] = [[s, v] for s, v in delta.entries]
    return json.dumps(obj, separators=(",", ":"))


def run(model: Model, config: SimConfig, full_recount: bool = False) -> SimResult:
    """Simulate to t_end (or max_events); deterministic in (model, config)."""
    sim = Simulation(model, config, full_recount=full_recount)
    trace_file = open(config.trace_path, "w") if config.trace_path else None
    if trace_file is not None:
        sim.on_event = lambda rec, delta: trace_file.write(_trace_line(rec, delta) + "\n")
    try:
        while True:
            try:
                if sim.step() is None:
                    break
            except DeadlockReached:
                break
    finally:
        if trace_file is not None:
            trace_file.close()
    return sim.result()
