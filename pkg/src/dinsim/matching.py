"""Embedding counting and sampling, rule activities, incremental match sets.

Connected pattern components are rigid: once one position's image is fixed,
following bond predicates determines every other image uniquely. Counting
embeddings therefore reduces to counting root images that extend, and the
incremental tracker only needs to revisit embeddings whose span includes an
agent touched by the last rewrite.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .mixture import (
    L_BOND,
    L_BOUND_ANY,
    L_FREE,
    NO_STATE,
    CompiledComponent,
    Embedding,
    Mixture,
)
from .model import Pattern
from .symmetry import rule_symmetry

__all__ = [
    "extend_component",
    "count_embeddings",
    "count_pattern",
    "sample_embedding",
    "activity",
    "activities",
    "ActivityVector",
    "Clash",
    "CLASH",
    "SampleSet",
    "MatchTracker",
    "rule_symmetry",
]


def extend_component(comp: CompiledComponent, mix: Mixture, start: int, agent: int):
    """Unique embedding with position ``start`` mapped to ``agent``, or None.

    Returns the full local-position -> agent-index tuple when every predicate
    (types, internal states, link states, bonds, injectivity) is satisfied.
    """
    types = mix.types
    if types[agent] != comp.types[start]:
        return None
    image = [-1] * comp.n
    image[start] = agent
    used = {agent: start}
    stack = [start]
    preds = comp.preds
    states = mix.states
    partner = mix.partner
    while stack:
        p = stack.pop()
        a = image[p]
        st = states[a]
        pr = partner[a]
        for sid, state_req, code, bpos, bsite in preds[p]:
            if state_req != NO_STATE and st[sid] != state_req:
                return None
            link = pr[sid]
            if code == L_BOND:
                if link is None:
                    return None
                b, t = link
                if t != bsite:
                    return None
                cur = image[bpos]
                if cur == -1:
                    if types[b] != comp.types[bpos] or b in used:
                        return None
                    image[bpos] = b
                    used[b] = bpos
                    stack.append(bpos)
                elif cur != b:
                    return None
            elif code == L_FREE:
                if link is not None:
                    return None
            elif code == L_BOUND_ANY:
                if link is None:
                    return None
    return tuple(image)


def count_embeddings(mix: Mixture, comp: CompiledComponent) -> int:
    """Number of injective structure-preserving maps of one component."""
    n = 0
    for a in mix.by_type[comp.types[0]]:
        if extend_component(comp, mix, 0, a) is not None:
            n += 1
    return n


def component_roots(mix: Mixture, comp: CompiledComponent) -> list[int]:
    return [a for a in mix.by_type[comp.types[0]] if extend_component(comp, mix, 0, a) is not None]


def count_pattern(mix: Mixture, pattern: Pattern) -> int:
    """Full-pattern embedding count: product over connected components."""
    total = 1
    for comp in mix.cm.compile_pattern(pattern):
        total *= count_embeddings(mix, comp)
        if total == 0:
            return 0
    return total


class Clash:
    """Null-event marker: independently sampled components overlapped."""

    __slots__ = ()

    def __repr__(self) -> str:  # pragma: no cover
        return "CLASH"


CLASH = Clash()


def sample_embedding(mix: Mixture, rule_index: int, rng) -> Embedding | Clash:
    """Uniform embedding per left component; CLASH if the images overlap.

    One uniform draw is consumed per component, clash or not, so the stream
    position is a function of the component count alone.
    """
    crule = mix.cm.rules[rule_index]
    maps = []
    seen: set[int] = set()
    clash = False
    for cid in crule.comp_ids:
        comp = mix.cm.components[cid]
        roots = component_roots(mix, comp)
        n = len(roots)
        assert n > 0, "sample_embedding requires positive activity"
        u = rng.random()
        root = roots[min(int(u * n), n - 1)]
        images = extend_component(comp, mix, 0, root)
        assert images is not None
        maps.append(images)
        for a in images:
            if a in seen:
                clash = True
            seen.add(a)
    if clash:
        return CLASH
    return Embedding(tuple(maps))


@dataclass(frozen=True)
class ActivityVector:
    """Per-rule activities with the derived system activity and probabilities."""

    alpha: tuple[float, ...]

    @cached_property
    def lam(self) -> float:
        return sum(self.alpha)

    def p(self) -> tuple[float, ...]:
        lam = self.lam
        if lam <= 0.0:
            raise ValueError("firing probabilities are undefined at zero system activity")
        return tuple(a / lam for a in self.alpha)


def activity(mix: Mixture, rule_index: int) -> float:
    """rate * (product of per-component embedding counts) / symmetry."""
    crule = mix.cm.rules[rule_index]
    prod = 1
    for cid in crule.comp_ids:
        prod *= count_embeddings(mix, mix.cm.components[cid])
        if prod == 0:
            return 0.0
    return crule.rate * prod / crule.symmetry


def activities(mix: Mixture) -> ActivityVector:
    return ActivityVector(tuple(activity(mix, i) for i in range(len(mix.cm.rules))))


class SampleSet:
    """Dynamic int set with O(1) add/discard and O(1) uniform choice."""

    __slots__ = ("items", "pos")

    def __init__(self):
        self.items: list[int] = []
        self.pos: dict[int, int] = {}

    def add(self, x: int) -> None:
        if x not in self.pos:
            self.pos[x] = len(self.items)
            self.items.append(x)

    def discard(self, x: int) -> None:
        i = self.pos.pop(x, None)
        if i is None:
            return
        last = self.items.pop()
        if last != x:
            self.items[i] = last
            self.pos[last] = i

    def __len__(self) -> int:
        return len(self.items)

    def choose(self, u: float) -> int:
        n = len(self.items)
        return self.items[min(int(u * n), n - 1)]

    def clear(self) -> None:
        self.items.clear()
        self.pos.clear()


class MatchTracker:
    """Incrementally maintained embedding sets for all tracked components.

    Per component we keep the set of root agents whose unique extension
    succeeds; the embedding count is the set size. An embedding's validity
    depends only on the fields of the agents in its span, so after a rewrite
    it suffices to drop every match spanning a touched agent and to re-try
    extensions that place a touched agent at any type-compatible position.
    Ordered dicts stand in for sets throughout so that iteration order, and
    with it the random stream, is reproducible.
    """

    def __init__(self, mix: Mixture):
        self.mix = mix
        self.comps = mix.cm.components
        n = len(self.comps)
        # per component: root -> (root generation, span images)
        self.matches: list[dict[int, tuple[int, tuple[int, ...]]]] = [{} for _ in range(n)]
        self.samplers = [SampleSet() for _ in range(n)]
        self.uses: dict[int, dict[tuple[int, int], None]] = {}
        by_type: dict[int, list[tuple[int, int]]] = {}
        for comp in self.comps:
            for p, t in enumerate(comp.types):
                by_type.setdefault(t, []).append((comp.cid, p))
        self.positions_by_type = by_type
        self.rebuild()

    def rebuild(self) -> None:
        """Full recount from scratch (differential-testing fallback)."""
        for d in self.matches:
            d.clear()
        for s in self.samplers:
            s.clear()
        self.uses.clear()
        mix = self.mix
        for comp in self.comps:
            for a in mix.by_type[comp.types[0]]:
                images = extend_component(comp, mix, 0, a)
                if images is not None:
                    self._register(comp.cid, images)

    def _register(self, cid: int, images: tuple[int, ...]) -> None:
        root = images[0]
        self.matches[cid][root] = (self.mix.generation[root], images)
        self.samplers[cid].add(root)
        key = (cid, root)
        for a in images:
            self.uses.setdefault(a, {})[key] = None

    def _remove(self, cid: int, root: int) -> bool:
        rec = self.matches[cid].pop(root, None)
        if rec is None:
            return False
        self.samplers[cid].discard(root)
        key = (cid, root)
        for a in rec[1]:
            d = self.uses.get(a)
            if d is not None:
                d.pop(key, None)
                if not d:
                    del self.uses[a]
        return True

    def update(self, touched: tuple[int, ...]) -> set[int]:
        """Re-evaluate matches around touched agents; returns changed comps."""
        changed: set[int] = set()
        mix = self.mix
        for t in touched:
            entry = self.uses.get(t)
            if entry:
                for cid, root in list(entry):
                    if self._remove(cid, root):
                        changed.add(cid)
        types = mix.types
        for t in touched:
            tid = types[t]
            if tid == -1:
                continue
            for cid, p in self.positions_by_type.get(tid, ()):
                images = extend_component(self.comps[cid], mix, p, t)
                if images is not None and images[0] not in self.matches[cid]:
                    self._register(cid, images)
                    changed.add(cid)
        return changed

    def count(self, cid: int) -> int:
        return len(self.matches[cid])

    def sample(self, cid: int, u: float) -> tuple[int, ...]:
        root = self.samplers[cid].choose(u)
        gen, images = self.matches[cid][root]
        assert self.mix.generation[root] == gen, "stale embedding in match set"
        return images
