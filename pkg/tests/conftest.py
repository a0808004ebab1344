"""Shared fixtures and independent oracle implementations.

The oracles here deliberately avoid the library's matching machinery: the
embedding counter enumerates injective maps directly from the pattern AST,
and the clustering oracle is a plain flood fill over the thresholded link
graph.
"""

from __future__ import annotations

import itertools
import random

import pytest

from dinsim.model import LINK_BOUND_ANY, LINK_FREE, Pattern
from dinsim.mixture import Mixture
from dinsim.parser import parse_model

TWO_STATE_SRC = """\
%agent: A(x{u p})
'phos' A(x{u}) -> A(x{p}) @ 0.3
'dephos' A(x{p}) -> A(x{u}) @ 0.1
%init: 1000 A(x{u})
%obs: 'Au' |A(x{u})|
%obs: 'Ap' |A(x{p})|
%obs: 'frac_p' 0.001 |A(x{p})|
"""

# Signatures used by the randomized matching tests.
RANDOM_SIG_SRC = """\
%agent: A(x{u p}, d, e)
%agent: B(y{u p}, d, e)
%agent: C(d, e)
"""

RANDOM_PATTERNS = [
    "A()",
    "A(x{u})",
    "A(x{p}, d[.])",
    "A(d[_])",
    "B(y{u}, e[.])",
    "C(d[.], e[.])",
    "A(d[1]), B(d[1])",
    "A(d[1]), A(d[1])",
    "A(e[1]), C(e[1])",
    "A(x{p}, d[1]), B(y{u}, d[1])",
    "A(d[1]), B(d[1], e[2]), C(e[2])",
    "A(d[1], e[2]), B(d[1], e[3]), C(d[3], e[2])",
]


def pattern_of(src_sites: str, signatures: str = RANDOM_SIG_SRC) -> Pattern:
    """Parse a pattern expression against a signature block."""
    model = parse_model(signatures + f"%obs: 'x' |{src_sites}|\n")
    return model.observables[0].terms[0].pattern


def random_mixture(seed: int, max_agents: int = 30) -> Mixture:
    """Random live agents over RANDOM_SIG_SRC with random states and wiring."""
    from dinsim.mixture import init_mixture

    rng = random.Random(seed)
    mix = init_mixture(parse_model(RANDOM_SIG_SRC))
    cm = mix.cm
    n = rng.randint(2, max_agents)
    for _ in range(n):
        tid = rng.randrange(len(cm.type_names))
        states = [rng.randrange(len(s)) if s else -1 for s in cm.state_names[tid]]
        mix.alloc(tid, states)
    free = [
        (a, s)
        for a in mix.live_agents()
        for s in range(len(mix.partner[a]))
        if mix.partner[a][s] is None
    ]
    rng.shuffle(free)
    for _ in range(rng.randint(0, len(free) // 2)):
        if len(free) < 2:
            break
        a, s = free.pop()
        b, t = free.pop()
        if a == b and s == t:
            continue
        mix.bind(a, s, b, t)
    return mix


def brute_force_component_count(mix: Mixture, pattern: Pattern, positions: tuple[int, ...]) -> int:
    """Independent oracle: enumerate injective type-consistent maps and check
    every predicate straight off the pattern AST."""
    cm = mix.cm
    candidates = []
    for g in positions:
        ag = pattern.agents[g]
        tid = cm.type_ids[ag.name]
        candidates.append([i for i in mix.live_agents() if mix.types[i] == tid])
    count = 0
    for combo in itertools.product(*candidates):
        if len(set(combo)) != len(combo):
            continue
        if _combo_satisfies(mix, pattern, positions, combo):
            count += 1
    return count


def _combo_satisfies(mix: Mixture, pattern: Pattern, positions, combo) -> bool:
    cm = mix.cm
    image = dict(zip(positions, combo))
    for g, a in zip(positions, combo):
        ag = pattern.agents[g]
        tid = mix.types[a]
        for sp in ag.sites:
            sid = cm.site_ids[tid][sp.site]
            if sp.internal is not None and mix.states[a][sid] != cm.state_ids[tid][sid][sp.internal]:
                return False
            link = mix.partner[a][sid]
            if sp.link == LINK_FREE and link is not None:
                return False
            if sp.link == LINK_BOUND_ANY and link is None:
                return False
    for (g1, s1), (g2, s2) in pattern.bonds:
        if g1 not in image:
            continue
        a, b = image[g1], image[g2]
        sid1 = cm.site_ids[mix.types[a]][s1]
        sid2 = cm.site_ids[mix.types[b]][s2]
        if mix.partner[a][sid1] != (b, sid2):
            return False
    return True


def brute_force_pattern_count(mix: Mixture, pattern: Pattern) -> int:
    total = 1
    for positions in pattern.components:
        total *= brute_force_component_count(mix, pattern, positions)
    return total


def flood_fill_clusters(links: dict, threshold: float, pinned=frozenset()):
    """Connected components of the |value| >= threshold link graph."""
    adj: dict[int, set[int]] = {}
    for (r, s), v in links.items():
        if abs(v) >= threshold and r not in pinned and s not in pinned:
            adj.setdefault(r, set()).add(s)
            adj.setdefault(s, set()).add(r)
    seen: set[int] = set()
    clusters = []
    for start in sorted(adj):
        if start in seen:
            continue
        comp: set[int] = set()
        frontier = [start]
        while frontier:
            x = frontier.pop()
            if x in comp:
                continue
            comp.add(x)
            frontier.extend(adj[x] - comp)
        seen |= comp
        clusters.append(tuple(sorted(comp)))
    return tuple(sorted(clusters))


def random_link_set(rng: random.Random, n_rules: int = 10) -> dict:
    links = {}
    for _ in range(rng.randint(0, 25)):
        r = rng.randrange(n_rules)
        s = rng.randrange(n_rules)
        links[(r, s)] = rng.uniform(-1.0, 1.0)
    return links


@pytest.fixture
def two_state():
    return parse_model(TWO_STATE_SRC)
