"""Brute-force reference implementations.

Everything here works on explicit group tables with full truth access and
serves as the independent route the solvers are checked against.  Nothing
in this module touches handles, oracles or counters.
"""

from __future__ import annotations

from typing import Any, Callable

from .blackbox import GroupTable, closure

BRUTE_FORCE_BOUND = 10**6
ENUMERATION_BOUND = 10**4


def brute_force_hidden_subgroup(table: GroupTable, label_of: Callable[[Any], int]) -> frozenset:
    """The hidden subgroup as the identity's level set, fully validated.

    Requires that label_of is constant on every left coset of some subgroup
    and distinct across cosets; raises if the level-set structure does not
    hold, which flags a broken hiding function rather than guessing.
    """
    if table.order > BRUTE_FORCE_BOUND:
        raise ValueError(f"group of order {table.order} exceeds the brute-force bound")
    labels = {g: label_of(g) for g in table.elements}
    f0 = labels[table.identity]
    H = frozenset(g for g in table.elements if labels[g] == f0)
    for g in table.elements:
        base = labels[g]
        for h in H:
            if labels[table.mul(g, h)] != base:
                raise ValueError("f is not H-periodic")
    if len(set(labels.values())) * len(H) != table.order:
        raise ValueError("f is not H-periodic")
    return H


def _cyclic(table: GroupTable, g: Any) -> frozenset:
    seen = [table.identity]
    cur = g
    while cur != table.identity:
        seen.append(cur)
        cur = table.mul(cur, g)
    return frozenset(seen)


def enumerate_all_subgroups(table: GroupTable) -> list[frozenset]:
    """Every subgroup, found by augmentation closure.

    Seed with all cyclic subgroups, then repeatedly extend each known
    subgroup's generating set by one cyclic generator and close.  Any
    subgroup K with a maximal proper subgroup already found is reached by
    augmenting that subgroup with any element of K outside it, so induction
    on order gives completeness at every rank.
    """
    if table.order > ENUMERATION_BOUND:
        raise ValueError(f"group of order {table.order} exceeds the enumeration bound")
    cyc: dict[frozenset, Any] = {}
    for g in table.elements:
        cyc.setdefault(_cyclic(table, g), g)
    reps = [g for g in cyc.values() if g != table.identity]

    gens_of: dict[frozenset, tuple] = {frozenset([table.identity]): ()}
    for S, g in cyc.items():
        gens_of.setdefault(S, (g,))
    queue = list(gens_of)
    while queue:
        H = queue.pop()
        base = gens_of[H]
        for g in reps:
            if g in H:
                continue
            K = closure(table, base + (g,))
            if K not in gens_of:
                gens_of[K] = base + (g,)
                queue.append(K)
    return sorted(gens_of, key=lambda s: (len(s), sorted(s)))


def subgroup_equal(a, b) -> bool:
    return frozenset(a) == frozenset(b)
