"""Immutable model data structures: agent signatures, patterns, rules, observables.

A model is the parsed, validated form of a ``.ka`` file. Everything here is
frozen; the runtime state lives in :mod:`dinsim.mixture`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

# Link-state markers on a site pattern. A bond is an ``int`` label instead.
LINK_ANY = "#"
LINK_FREE = "."
LINK_BOUND_ANY = "_"


@dataclass(frozen=True)
class SiteSignature:
    name: str
    states: tuple[str, ...] = ()


@dataclass(frozen=True)
class AgentSignature:
    """Declared agent type: ordered sites, each with its allowed internal states."""

    name: str
    sites: tuple[SiteSignature, ...] = ()

    def site_named(self, name: str) -> SiteSignature | None:
        for s in self.sites:
            if s.name == name:
                return s
        return None


@dataclass(frozen=True)
class SitePattern:
    """One site condition inside an agent pattern.

    ``internal`` is ``None`` for "don't care", otherwise a required state name.
    ``link`` is LINK_ANY, LINK_FREE, LINK_BOUND_ANY, or an ``int`` bond label.
    """

    site: str
    internal: str | None = None
    link: int | str = LINK_ANY


@dataclass(frozen=True)
class AgentPattern:
    name: str
    sites: tuple[SitePattern, ...] = ()

    def site_named(self, name: str) -> SitePattern | None:
        for s in self.sites:
            if s.site == name:
                return s
        return None


@dataclass(frozen=True)
class Pattern:
    """An ordered list of agent patterns, possibly with ``None`` placeholders.

    Placeholders only occur on rule sides, where position ``i`` on the left is
    matched with position ``i`` on the right (a ``None`` left slot means the
    right agent is created; a ``None`` right slot means deletion). Patterns in
    ``%init`` and ``%obs`` declarations never contain placeholders.
    """

    agents: tuple[AgentPattern | None, ...] = ()

    @cached_property
    def components(self) -> tuple[tuple[int, ...], ...]:
        """Partition of non-placeholder agent positions by shared bond labels."""
        parent: dict[int, int] = {}

        def find(i: int) -> int:
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        label_owner: dict[int, int] = {}
        for i, ag in enumerate(self.agents):
            if ag is None:
                continue
            parent[i] = i
            for sp in ag.sites:
                if isinstance(sp.link, int):
                    if sp.link in label_owner:
                        a, b = find(label_owner[sp.link]), find(i)
                        if a != b:
                            parent[max(a, b)] = min(a, b)
                    else:
                        label_owner[sp.link] = i
        groups: dict[int, list[int]] = {}
        for i in parent:
            groups.setdefault(find(i), []).append(i)
        return tuple(tuple(sorted(g)) for _, g in sorted(groups.items()))

    @cached_property
    def bonds(self) -> tuple[tuple[tuple[int, str], tuple[int, str]], ...]:
        """All bonds as ((position, site), (position, site)) pairs, endpoint-sorted."""
        ends: dict[int, list[tuple[int, str]]] = {}
        for i, ag in enumerate(self.agents):
            if ag is None:
                continue
            for sp in ag.sites:
                if isinstance(sp.link, int):
                    ends.setdefault(sp.link, []).append((i, sp.site))
        out = []
        for label in sorted(ends):
            a, b = ends[label]
            out.append(tuple(sorted((a, b))))
        return tuple(out)  # type: ignore[return-value]


@dataclass(frozen=True)
class Rule:
    """A rewrite schema ``lhs -> rhs @ rate`` with its symmetry factor.

    The symmetry factor counts permutations of same-type left agents that
    leave both sides invariant; it is computed at parse time and divides the
    rule's activity.
    """

    name: str
    lhs: Pattern
    rhs: Pattern
    rate: float
    symmetry: int = 1


@dataclass(frozen=True)
class ObsTerm:
    coeff: float
    pattern: Pattern


@dataclass(frozen=True)
class Observable:
    """A tracked quantity: a plain pattern count or a weighted sum of counts.

    ``is_count`` is true for a single bare ``|pattern|`` term, in which case
    evaluation yields an integer count.
    """

    name: str
    terms: tuple[ObsTerm, ...]
    is_count: bool = False


@dataclass(frozen=True)
class InitDecl:
    count: int
    pattern: Pattern


@dataclass(frozen=True)
class Model:
    signatures: tuple[AgentSignature, ...] = ()
    rules: tuple[Rule, ...] = ()
    init: tuple[InitDecl, ...] = ()
    observables: tuple[Observable, ...] = ()

    @cached_property
    def signature_by_name(self) -> dict[str, AgentSignature]:
        return {s.name: s for s in self.signatures}
