"""Rule symmetry factors.

The symmetry factor of a rule counts the permutations of its same-type left
agents that (a) leave the left pattern invariant and (b), applied to the
positionally matched right agents, leave the right pattern invariant too.
Such permutations relate matchings that describe the same physical event, so
the factor divides the rule's activity.
"""

from __future__ import annotations

from itertools import permutations

from .model import Pattern, Rule


def _site_preds(pat: Pattern, pos: int) -> dict[str, tuple]:
    ag = pat.agents[pos]
    assert ag is not None
    preds = {}
    for sp in ag.sites:
        kind = "bond" if isinstance(sp.link, int) else sp.link
        preds[sp.site] = (sp.internal, kind)
    return preds


def _is_automorphism(pat: Pattern, perm: dict[int, int]) -> bool:
    for i, j in perm.items():
        a, b = pat.agents[i], pat.agents[j]
        if (a is None) != (b is None):
            return False
        if a is None or b is None:
            continue
        if a.name != b.name or _site_preds(pat, i) != _site_preds(pat, j):
            return False
    bonds = set(pat.bonds)
    for (i, s), (j, t) in bonds:
        mapped = tuple(sorted(((perm.get(i, i), s), (perm.get(j, j), t))))
        if mapped not in bonds:
            return False
    return True


def rule_symmetry(rule: Rule) -> int:
    """Count of left-agent permutations preserving the rule's action (>= 1)."""
    groups: dict[str, list[int]] = {}
    for i, ag in enumerate(rule.lhs.agents):
        if ag is not None:
            groups.setdefault(ag.name, []).append(i)
    multi = [g for g in groups.values() if len(g) > 1]
    if not multi:
        return 1

    count = 0
    # Cartesian product of within-group permutations, built recursively.
    def explore(k: int, perm: dict[int, int]) -> None:
        nonlocal count
        if k == len(multi):
            if _is_automorphism(rule.lhs, perm) and _is_automorphism(rule.rhs, perm):
                count += 1
            return
        group = multi[k]
        for images in permutations(group):
            sub = dict(perm)
            sub.update(zip(group, images))
            explore(k + 1, sub)

    explore(0, {})
    return count
