"""Deciding ``<*>x`` for modal ``x`` by searching refinements directly.

For a modal formula, some arrow update makes ``x`` true exactly when some
refinement of the pointed model does.  A refinement can be unravelled into
a tree whose nodes are labelled by states of the original model, where
each child of a node labelled ``s`` is labelled by an ``a``-successor of
``s`` (the back condition) and the children may be chosen freely.  Only the
first ``depth(x)`` levels matter, so we compute, bottom-up, the set of
truth-value vectors ("types") that such trees can realise at each state.

The search shares no code with the rewriting or synthesis modules.
"""

from __future__ import annotations

from itertools import product

from .kripke import KripkeModel
from .syntax import (
    And, Atom, Bot, Box, Diamond, Formula, Not, Or, Top, children, is_ml,
)


def _top_modal(f: Formula, out: list):
    """Collect the modal subformulas of ``f`` not nested under another modality."""
    if isinstance(f, (Box, Diamond)):
        if f not in out:
            out.append(f)
        return
    for c in children(f):
        _top_modal(c, out)


def _eval(f: Formula, atoms: frozenset, modal: dict) -> bool:
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    if isinstance(f, Atom):
        return f.name in atoms
    if isinstance(f, Not):
        return not _eval(f.arg, atoms, modal)
    if isinstance(f, And):
        return all(_eval(x, atoms, modal) for x in f.args)
    if isinstance(f, Or):
        return any(_eval(x, atoms, modal) for x in f.args)
    if isinstance(f, (Box, Diamond)):
        return modal[f]
    raise TypeError(f"not a modal formula: {f!r}")


def _levels(f: Formula) -> list:
    """``levels[k]`` lists the formulas evaluated at tree depth ``k``."""
    levels = [[f]]
    while True:
        nxt: list = []
        for g in levels[-1]:
            mods: list = []
            _top_modal(g, mods)
            for m in mods:
                if m.arg not in nxt:
                    nxt.append(m.arg)
        if not nxt:
            return levels
        levels.append(nxt)


def refinement_types(M: KripkeModel, f: Formula) -> dict:
    """For each state, the set of truth vectors of level-0 formulas (just ``f``)."""
    if not is_ml(f):
        raise ValueError("refinement search needs a modal-logic formula")
    levels = _levels(f)
    deepest = levels[-1]
    types = {s: {tuple(_eval(g, M.true_atoms(s), {}) for g in deepest)} for s in M.states}
    for k in range(len(levels) - 2, -1, -1):
        here = levels[k]
        below = levels[k + 1]
        pos = {g: i for i, g in enumerate(below)}
        mods: list = []
        for g in here:
            _top_modal(g, mods)
        ags = sorted({m.agent for m in mods})
        new_types = {}
        for s in M.states:
            per_agent = []
            for a in ags:
                idx = [pos[m.arg] for m in mods if m.agent == a]
                idx = sorted(set(idx))
                avail = {tuple(t[i] for i in idx) for u in M.succ[a][s] for t in types[u]}
                per_agent.append((a, idx, _aggregates(avail, len(idx))))
            atoms = M.true_atoms(s)
            result = set()
            for choice in product(*(agg for _, _, agg in per_agent)):
                modal = {}
                for (a, idx, _), (all_true, some_true) in zip(per_agent, choice):
                    where = {i: k2 for k2, i in enumerate(idx)}
                    for m in mods:
                        if m.agent != a:
                            continue
                        j = where[pos[m.arg]]
                        modal[m] = all_true[j] if isinstance(m, Box) else some_true[j]
                result.add(tuple(_eval(g, atoms, modal) for g in here))
            new_types[s] = result
        types = new_types
    return types


def _aggregates(avail: set, width: int) -> set:
    """All ``(and-vector, or-vector)`` pairs over subsets of ``avail``."""
    start = (tuple([True] * width), tuple([False] * width))
    seen = {start}
    for t in avail:
        for all_true, some_true in list(seen):
            seen.add((tuple(x and y for x, y in zip(all_true, t)),
                      tuple(x or y for x, y in zip(some_true, t))))
    return seen


def exists_refinement(M: KripkeModel, s, f: Formula) -> bool:
    """Is there a refinement of ``(M, s)`` where the modal formula ``f`` holds?"""
    return any(t[0] for t in refinement_types(M, f)[s])
