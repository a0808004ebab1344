"""Runtime site graph and rule rewrites.

The mixture holds fully specified agents in index slots with per-site internal
states and symmetric bonds. Deleted slots go on a free list and carry a
generation counter so stale agent handles are detectable. Patterns and rules
are compiled against the model signatures into integer-indexed forms before
any matching or rewriting happens.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import LINK_BOUND_ANY, LINK_FREE, Model, Pattern, Rule

# Link predicate codes inside compiled components.
L_ANY = 0
L_FREE = 1
L_BOUND_ANY = 2
L_BOND = 3

NO_STATE = -1


class CompiledComponent:
    """One connected pattern component in integer form.

    ``preds[local]`` is a tuple of ``(site, state_req, link_code, bond_pos,
    bond_site)`` entries; ``state_req`` is a state id or ``NO_STATE`` for
    "don't care"; for ``L_BOND`` predicates ``bond_pos``/``bond_site`` name the
    partner's local position and site.
    """

    __slots__ = ("cid", "n", "types", "preds")

    def __init__(self, cid: int, types: tuple[int, ...], preds: tuple[tuple, ...]):
        self.cid = cid
        self.n = len(types)
        self.types = types
        self.preds = preds


@dataclass(frozen=True)
class CompiledAction:
    """The left-to-right difference of a rule, in global position indices."""

    state_sets: tuple[tuple[int, int, int], ...]  # (pos, site, state)
    bond_dels: tuple[tuple[tuple[int, int], tuple[int, int]], ...]
    bond_adds: tuple[tuple[tuple[int, int], tuple[int, int]], ...]
    deletions: tuple[int, ...]
    creations: tuple[tuple[int, int, tuple[int, ...]], ...]  # (pos, type, states)


@dataclass(frozen=True)
class CompiledRule:
    index: int
    name: str
    rate: float
    symmetry: int
    comp_ids: tuple[int, ...]
    layouts: tuple[tuple[int, ...], ...]  # per component: local position -> global position
    action: CompiledAction
    lhs_types: frozenset[int]


@dataclass(frozen=True)
class CompiledObservable:
    name: str
    is_count: bool
    terms: tuple[tuple[float, tuple[int, ...]], ...]  # (coeff, component ids)


@dataclass(frozen=True)
class Embedding:
    """One selected matching: per lhs component, local position -> agent index."""

    maps: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class RewriteEffect:
    """What a rewrite touched, for incremental match maintenance."""

    touched: tuple[int, ...]
    deleted: tuple[int, ...]
    created: tuple[int, ...]
    touched_types: frozenset[int]
    rules_maybe_affected: tuple[int, ...]


class CompiledModel:
    """Integer-indexed form of a model plus its tracked pattern components."""

    def __init__(self, model: Model):
        self.model = model
        self.type_names = [s.name for s in model.signatures]
        self.type_ids = {n: i for i, n in enumerate(self.type_names)}
        self.site_names: list[list[str]] = []
        self.site_ids: list[dict[str, int]] = []
        self.state_names: list[list[list[str]]] = []
        self.state_ids: list[list[dict[str, int]]] = []
        self.default_states: list[tuple[int, ...]] = []
        for sig in model.signatures:
            names = [s.name for s in sig.sites]
            self.site_names.append(names)
            self.site_ids.append({n: i for i, n in enumerate(names)})
            st_names = [list(s.states) for s in sig.sites]
            self.state_names.append(st_names)
            self.state_ids.append([{n: i for i, n in enumerate(states)} for states in st_names])
            self.default_states.append(tuple(0 if s.states else NO_STATE for s in sig.sites))

        self.components: list[CompiledComponent] = []
        self.rules: list[CompiledRule] = []
        for idx, rule in enumerate(model.rules):
            self.rules.append(self._compile_rule(idx, rule))
        self.observables: list[CompiledObservable] = []
        for obs in model.observables:
            terms = tuple(
                (t.coeff, tuple(c.cid for c in self.add_pattern(t.pattern))) for t in obs.terms
            )
            self.observables.append(CompiledObservable(obs.name, obs.is_count, terms))

    # -- pattern compilation --------------------------------------------

    def compile_component(self, pattern: Pattern, positions: tuple[int, ...], cid: int = -1) -> CompiledComponent:
        local = {g: i for i, g in enumerate(positions)}
        bonds: dict[tuple[int, str], tuple[int, int]] = {}
        for (p1, s1), (p2, s2) in pattern.bonds:
            if p1 in local:
                sid1 = self._site_id(pattern, p1, s1)
                sid2 = self._site_id(pattern, p2, s2)
                bonds[(p1, s1)] = (local[p2], sid2)
                bonds[(p2, s2)] = (local[p1], sid1)
        types = []
        preds = []
        for g in positions:
            ag = pattern.agents[g]
            assert ag is not None
            tid = self.type_ids[ag.name]
            types.append(tid)
            row = []
            for sp in ag.sites:
                sid = self.site_ids[tid][sp.site]
                st = NO_STATE if sp.internal is None else self.state_ids[tid][sid][sp.internal]
                if isinstance(sp.link, int):
                    bpos, bsite = bonds[(g, sp.site)]
                    row.append((sid, st, L_BOND, bpos, bsite))
                elif sp.link == LINK_FREE:
                    row.append((sid, st, L_FREE, -1, -1))
                elif sp.link == LINK_BOUND_ANY:
                    row.append((sid, st, L_BOUND_ANY, -1, -1))
                else:
                    row.append((sid, st, L_ANY, -1, -1))
            preds.append(tuple(row))
        return CompiledComponent(cid, tuple(types), tuple(preds))

    def compile_pattern(self, pattern: Pattern) -> tuple[CompiledComponent, ...]:
        return tuple(
            self.compile_component(pattern, pos, cid=-1) for pos in pattern.components
        )

    def add_pattern(self, pattern: Pattern) -> tuple[CompiledComponent, ...]:
        """Compile a pattern's components and register them for tracking."""
        out = []
        for pos in pattern.components:
            comp = self.compile_component(pattern, pos, cid=len(self.components))
            self.components.append(comp)
            out.append(comp)
        return tuple(out)

    def _site_id(self, pattern: Pattern, pos: int, site: str) -> int:
        ag = pattern.agents[pos]
        assert ag is not None
        return self.site_ids[self.type_ids[ag.name]][site]

    # -- rule compilation -------------------------------------------------

    def _bond_set(self, pattern: Pattern) -> set[tuple[tuple[int, int], tuple[int, int]]]:
        out = set()
        for (p1, s1), (p2, s2) in pattern.bonds:
            e1 = (p1, self._site_id(pattern, p1, s1))
            e2 = (p2, self._site_id(pattern, p2, s2))
            out.add(tuple(sorted((e1, e2))))
        return out  # type: ignore[return-value]

    def _compile_rule(self, idx: int, rule: Rule) -> CompiledRule:
        comps = self.add_pattern(rule.lhs)
        layouts = rule.lhs.components

        deletions = []
        creations = []
        state_sets = []
        for pos, (la, ra) in enumerate(zip(rule.lhs.agents, rule.rhs.agents)):
            if ra is None:
                deletions.append(pos)
                continue
            tid = self.type_ids[ra.name]
            if la is None:
                states = list(self.default_states[tid])
                for sp in ra.sites:
                    sid = self.site_ids[tid][sp.site]
                    if sp.internal is not None:
                        states[sid] = self.state_ids[tid][sid][sp.internal]
                creations.append((pos, tid, tuple(states)))
                continue
            lsites = {sp.site: sp for sp in la.sites}
            for sp in ra.sites:
                if sp.internal is None:
                    continue
                ls = lsites[sp.site]
                if ls.internal != sp.internal:
                    sid = self.site_ids[tid][sp.site]
                    state_sets.append((pos, sid, self.state_ids[tid][sid][sp.internal]))

        deleted = set(deletions)
        created = {pos for pos, _, _ in creations}
        lhs_bonds = self._bond_set(rule.lhs)
        rhs_bonds = self._bond_set(rule.rhs)
        bond_dels = sorted(
            b for b in lhs_bonds - rhs_bonds if b[0][0] not in deleted and b[1][0] not in deleted
        )
        bond_adds = sorted(rhs_bonds - lhs_bonds)

        lhs_types = frozenset(
            self.type_ids[ag.name] for ag in rule.lhs.agents if ag is not None
        )
        action = CompiledAction(
            tuple(state_sets), tuple(bond_dels), tuple(bond_adds), tuple(deletions), tuple(creations)
        )
        return CompiledRule(
            idx, rule.name, rule.rate, rule.symmetry,
            tuple(c.cid for c in comps), layouts, action, lhs_types,
        )

    def rules_touching(self, touched_types: frozenset[int]) -> tuple[int, ...]:
        return tuple(r.index for r in self.rules if r.lhs_types & touched_types)

    def init_mixture(self) -> Mixture:
        mix = Mixture(self)
        for decl in self.model.init:
            pattern = decl.pattern
            comp_sites = []  # per position: (type, states, explicit bonds)
            for pos, ag in enumerate(pattern.agents):
                assert ag is not None
                tid = self.type_ids[ag.name]
                states = list(self.default_states[tid])
                for sp in ag.sites:
                    sid = self.site_ids[tid][sp.site]
                    if sp.internal is not None:
                        states[sid] = self.state_ids[tid][sid][sp.internal]
                comp_sites.append((tid, tuple(states)))
            bonds = [
                ((p1, self._site_id(pattern, p1, s1)), (p2, self._site_id(pattern, p2, s2)))
                for (p1, s1), (p2, s2) in pattern.bonds
            ]
            for _ in range(decl.count):
                idx_of = [mix.alloc(tid, states) for tid, states in comp_sites]
                for (p1, s1), (p2, s2) in bonds:
                    mix.bind(idx_of[p1], s1, idx_of[p2], s2)
        return mix


class Mixture:
    """Indexed collection of live agents with states and symmetric bonds."""

    __slots__ = ("cm", "types", "states", "partner", "generation", "free", "by_type", "n_live")

    def __init__(self, cm: CompiledModel):
        self.cm = cm
        self.types: list[int] = []
        self.states: list[list[int]] = []
        self.partner: list[list[tuple[int, int] | None]] = []
        self.generation: list[int] = []
        self.free: list[int] = []
        self.by_type: list[dict[int, None]] = [{} for _ in cm.type_names]
        self.n_live = 0

    def alloc(self, tid: int, states: tuple[int, ...] | list[int]) -> int:
        n_sites = len(self.cm.site_names[tid])
        if self.free:
            idx = self.free.pop()
            self.types[idx] = tid
            self.states[idx] = list(states)
            self.partner[idx] = [None] * n_sites
        else:
            idx = len(self.types)
            self.types.append(tid)
            self.states.append(list(states))
            self.partner.append([None] * n_sites)
            self.generation.append(0)
        self.by_type[tid][idx] = None
        self.n_live += 1
        return idx

    def delete(self, idx: int) -> list[int]:
        """Remove an agent; returns former bond partners (now freed)."""
        freed = []
        for sid, pr in enumerate(self.partner[idx]):
            if pr is not None:
                b, t = pr
                if b != idx:
                    assert self.partner[b][t] == (idx, sid), "broken bond symmetry"
                    self.partner[b][t] = None
                    freed.append(b)
        tid = self.types[idx]
        del self.by_type[tid][idx]
        self.types[idx] = -1
        self.states[idx] = []
        self.partner[idx] = []
        self.generation[idx] += 1
        self.free.append(idx)
        self.n_live -= 1
        return freed

    def bind(self, a: int, s: int, b: int, t: int) -> None:
        assert self.partner[a][s] is None and self.partner[b][t] is None, "bind on occupied site"
        self.partner[a][s] = (b, t)
        self.partner[b][t] = (a, s)

    def unbind(self, a: int, s: int) -> None:
        pr = self.partner[a][s]
        assert pr is not None, "unbind on free site"
        b, t = pr
        assert self.partner[b][t] == (a, s), "broken bond symmetry"
        self.partner[a][s] = None
        self.partner[b][t] = None

    def live_agents(self) -> list[int]:
        return [i for i, t in enumerate(self.types) if t != -1]

    def snapshot(self) -> tuple:
        """Structural dump for equality checks in tests."""
        return (
            tuple(self.types),
            tuple(tuple(s) for s in self.states),
            tuple(tuple(p) for p in self.partner),
        )

    def check_consistency(self) -> None:
        for a, t in enumerate(self.types):
            if t == -1:
                continue
            for s, pr in enumerate(self.partner[a]):
                if pr is not None:
                    b, u = pr
                    assert self.types[b] != -1, f"bond to dead agent {b}"
                    assert self.partner[b][u] == (a, s), f"asymmetric bond {a}.{s}-{b}.{u}"
                    assert pr != (a, s), "site bonded to itself"


def init_mixture(model: Model) -> Mixture:
    """Build the initial mixture declared by a model's %init lines."""
    return CompiledModel(model).init_mixture()


def apply_rule(mix: Mixture, rule_index: int, emb: Embedding) -> RewriteEffect:
    """Rewrite the mixture in place along an embedding of the rule's left side."""
    cm = mix.cm
    crule = cm.rules[rule_index]
    act = crule.action

    gimage: dict[int, int] = {}
    for layout, images in zip(crule.layouts, emb.maps):
        for gpos, agent in zip(layout, images):
            gimage[gpos] = agent

    touched: dict[int, None] = {}
    touched_types: set[int] = set()
    deleted = []
    created = []

    for gpos in act.deletions:
        a = gimage[gpos]
        touched_types.add(mix.types[a])
        for b in mix.delete(a):
            touched[b] = None
            touched_types.add(mix.types[b])
        touched[a] = None
        deleted.append(a)

    for gpos, sid, st in act.state_sets:
        a = gimage[gpos]
        mix.states[a][sid] = st
        touched[a] = None
        touched_types.add(mix.types[a])

    for (p1, s1), (p2, s2) in act.bond_dels:
        a, b = gimage[p1], gimage[p2]
        mix.unbind(a, s1)
        touched[a] = None
        touched[b] = None
        touched_types.add(mix.types[a])
        touched_types.add(mix.types[b])

    for gpos, tid, states in act.creations:
        a = mix.alloc(tid, states)
        gimage[gpos] = a
        touched[a] = None
        touched_types.add(tid)
        created.append(a)

    for (p1, s1), (p2, s2) in act.bond_adds:
        a, b = gimage[p1], gimage[p2]
        mix.bind(a, s1, b, s2)
        touched[a] = None
        touched[b] = None
        touched_types.add(mix.types[a])
        touched_types.add(mix.types[b])

    ttypes = frozenset(touched_types)
    return RewriteEffect(
        tuple(touched), tuple(deleted), tuple(created), ttypes, cm.rules_touching(ttypes)
    )
