"""Translations between action models and arrow update models, and scenario generators.

``action_to_arrow`` keeps the actions as outcomes and decorates every edge
with the preconditions of its endpoints.  ``arrow_to_action`` splits every
outcome by the truth values of all arrow conditions, which makes the action
model exponentially larger than the arrow update.  The generators build the
standard examples where that gap shows up.
"""

from __future__ import annotations

import string
from itertools import product

from .kripke import ActionModel, PointedAction, ResourceCapError
from .syntax import (
    TOP, Arrow, ArrowUpdateModel, Box, Diamond, Formula, Not, PointedUpdate,
    atom, atoms as atoms_of, conj,
)

DEFAULT_CONDITION_CAP = 12


def action_to_arrow(E: ActionModel, name: str | None = None) -> ArrowUpdateModel:
    """``U(E)``: an arrow ``(e, pre(e)) ->a (f, pre(f))`` for every ``a``-edge ``(e, f)``."""
    pre = E.pre
    arrows = tuple(Arrow(a, e, pre[e], f, pre[f]) for a, e, f in E.relations)
    return ArrowUpdateModel(E.actions, arrows, name)


def condition_set(U: ArrowUpdateModel) -> tuple:
    """The distinct source and target conditions of ``U`` in canonical order."""
    return tuple(sorted(set(U.conditions()), key=lambda f: f.sort_key))


def characteristic(phi: tuple, bits: tuple) -> Formula:
    """``delta_v``: each condition or its negation, following ``bits``."""
    return conj(*(f if b else Not(f) for f, b in zip(phi, bits)))


def _action_id(o: str, bits: tuple) -> str:
    return f"{o}:{''.join(str(b) for b in bits)}"


def arrow_to_action(U: ArrowUpdateModel, points=None, *, cap: int = DEFAULT_CONDITION_CAP,
                    prune: bool = False, prune_states: int = 2, name: str | None = None):
    """``E(U)`` with actions ``(o, v)`` for every outcome and valuation of the conditions.

    Action ``(o, v)`` is written ``"o:bits"`` with one bit per condition in
    :func:`condition_set` order and has precondition ``delta_v``.  Returns
    the action model and the actions over ``points`` (all outcomes when
    omitted).  With ``prune`` the actions whose precondition is false on
    every model with at most ``prune_states`` states are dropped; that is a
    bounded check, so pruning is best-effort.
    """
    phi = condition_set(U)
    if len(phi) > cap:
        raise ResourceCapError(f"{len(phi)} distinct conditions exceed the cap of {cap}")
    vals = list(product((1, 0), repeat=len(phi)))
    if prune:
        vals = [v for v in vals if v in _realisable(phi, prune_states)]
    pos = {f: i for i, f in enumerate(phi)}
    actions = {(o, v): _action_id(o, v) for o in U.outcomes for v in vals}
    pre = {actions[o, v]: characteristic(phi, v) for o, v in actions}
    rel = set()
    for arr in U.arrows:
        i, j = pos[arr.pre], pos[arr.post]
        for v in vals:
            if not v[i]:
                continue
            for w in vals:
                if w[j]:
                    rel.add((arr.agent, actions[arr.source, v], actions[arr.target, w]))
    E = ActionModel(tuple(pre), tuple(rel), tuple(pre.items()), name)
    pts = U.outcomes if points is None else tuple(points)
    fibre = tuple(actions[o, v] for o in pts for v in vals)
    return E, fibre


def _realisable(phi: tuple, max_states: int) -> set:
    """Truth-value vectors of ``phi`` occurring at some state of a small model."""
    from .batch import BatchEvaluator, model_families, signature_of

    ags, ats = signature_of(*phi)
    found = set()
    for F in model_families(max_states, ags or ("a",), ats, min_states=1):
        ev = BatchEvaluator(F)
        vecs = [ev.ev(f) for f in phi]
        sp = F.space
        for i in range(F.n):
            for v in product((1, 0), repeat=len(phi)):
                if v in found:
                    continue
                bits = F.ex(i)
                for k, b in enumerate(v):
                    bits = bits & (vecs[k][i] if b else sp.neg(vecs[k][i]))
                if sp.first(bits) is not None:
                    found.add(v)
    return found


def pointed_arrow_to_action(X: PointedUpdate, **kw) -> PointedAction:
    E, pts = arrow_to_action(X.model, X.points, **kw)
    return PointedAction(E, pts)


def pointed_action_to_arrow(X: PointedAction) -> PointedUpdate:
    return PointedUpdate(action_to_arrow(X.model), X.points)


# -- scenarios ------------------------------------------------------------------

def default_agents(n: int) -> tuple:
    if n < 1:
        raise ValueError("need at least one agent")
    if n <= 26:
        return tuple(string.ascii_lowercase[:n])
    return tuple(f"a{i}" for i in range(1, n + 1))


def sceptical_update(agents, phi: Formula, manipulative: bool = False) -> PointedUpdate:
    """One outcome; each agent believes ``phi`` if it was considered possible.

    Arrows ``(o, <a>phi) ->a (o, phi)`` and ``(o, [a]~phi) ->a (o, T)``.  The
    manipulative variant has the single arrow ``(o, T) ->a (o, phi)`` per agent.
    """
    arrows = []
    for a in sorted(agents):
        if manipulative:
            arrows.append(Arrow(a, "o", TOP, "o", phi))
        else:
            arrows.append(Arrow(a, "o", Diamond(a, phi), "o", phi))
            arrows.append(Arrow(a, "o", Box(a, Not(phi)), "o", TOP))
    label = "manipulative" if manipulative else "sceptical"
    return PointedUpdate(ArrowUpdateModel(("o",), tuple(arrows), label), ("o",))


def _lying_id(believes: tuple, truth: bool) -> str:
    return "".join("D" if b else "B" for b in believes) + ("_t" if truth else "_f")


def lying_action_model(n: int, phi: Formula, agents=None, pattern: str = "figure") -> ActionModel:
    """Action model for announcing ``phi`` to sceptical agents.

    One action per choice of ``<a>phi`` or ``[a]~phi`` for each agent and of
    ``phi`` or ``~phi``, so ``2^(n+1)`` actions.  Ids spell the choices, e.g.
    ``DB_t`` for ``<a>phi & [b]~phi & phi``.  An agent in a ``[a]~phi`` action
    considers every action possible.  In the ``figure`` pattern an agent in a
    ``<a>phi`` action considers the ``phi`` actions where it is again in a
    ``<a>phi`` action (this relies on introspection, so it matches the arrow
    update on KD45 models); in the ``general`` pattern it considers all
    ``phi`` actions, which matches on every model.
    """
    if pattern not in ("figure", "general"):
        raise ValueError(f"unknown pattern {pattern!r}")
    agents = tuple(sorted(agents)) if agents is not None else default_agents(n)
    if len(agents) != n:
        raise ValueError("agent list does not have n entries")
    combos = [(bel, t) for bel in product((True, False), repeat=n) for t in (True, False)]
    pre = {}
    for bel, t in combos:
        parts = [Diamond(a, phi) if b else Box(a, Not(phi)) for a, b in zip(agents, bel)]
        parts.append(phi if t else Not(phi))
        pre[_lying_id(bel, t)] = conj(*parts)
    rel = []
    for k, a in enumerate(agents):
        for bel, t in combos:
            src = _lying_id(bel, t)
            for bel2, t2 in combos:
                if not bel[k]:
                    ok = True
                elif pattern == "figure":
                    ok = t2 and bel2[k]
                else:
                    ok = t2
                if ok:
                    rel.append((a, src, _lying_id(bel2, t2)))
    return ActionModel(tuple(pre), tuple(rel), tuple(pre.items()), f"lying{n}")


def lying_points(E: ActionModel, which: str = "lie") -> tuple:
    """Designated actions: the ``~phi`` actions (``lie``), the ``phi`` ones, or all."""
    if which == "all":
        return E.actions
    suffix = {"lie": "_f", "truth": "_t"}[which]
    return tuple(e for e in E.actions if e.endswith(suffix))


def attentive_update(agents, phi: Formula, attention=None) -> PointedUpdate:
    """Announcement heard only by agents paying attention.

    ``attention`` maps each agent to its attention atom (``h_<agent>`` by
    default).  Outcome ``o`` is the announcement and ``o'`` the skip; both
    are designated.
    """
    agents = tuple(sorted(agents))
    attention = dict(attention or {a: f"h_{a}" for a in agents})
    if set(attention) != set(agents):
        raise ValueError("need one attention atom per agent")
    hs = list(attention.values())
    if len(set(hs)) != len(hs) or set(hs) & atoms_of(phi):
        raise ValueError("attention atoms must be distinct and not occur in the announcement")
    arrows = []
    for a in agents:
        h = atom(attention[a])
        arrows.append(Arrow(a, "o", h, "o", phi))
        arrows.append(Arrow(a, "o", Not(h), "o'", TOP))
        arrows.append(Arrow(a, "o'", TOP, "o'", TOP))
    return PointedUpdate(ArrowUpdateModel(("o", "o'"), tuple(arrows), "attentive"), ("o", "o'"))
