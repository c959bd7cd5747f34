"""Formulas of arrow update logic and arrow update models.

Formulas are immutable trees with structural equality.  The primitive
connectives are atoms, ``Not``, ``And``, ``Box``, ``Update`` and ``Quant``;
``Or``, ``Diamond`` and ``QuantDiamond`` are kept as first-class nodes so
that normal forms can be represented and printed without re-encoding.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, fields
from functools import cached_property
from typing import Iterable, Iterator


class Formula:
    """Base class of all formula nodes."""

    def __str__(self) -> str:
        return self.text

    @cached_property
    def text(self) -> str:
        return to_text(self)

    @cached_property
    def sort_key(self) -> tuple:
        if isinstance(self, (Top, Bot)):
            rank = 0
        elif is_literal(self):
            rank = 1
        else:
            rank = 2
        return rank, self.text

    def __invert__(self) -> "Formula":
        return Not(self)

    def __and__(self, other: "Formula") -> "Formula":
        return And((self, other))

    def __or__(self, other: "Formula") -> "Formula":
        return Or((self, other))


def _cached_hash(self) -> int:
    h = self.__dict__.get("_hash")
    if h is None:
        h = hash((type(self).__name__,) + tuple(getattr(self, f.name) for f in fields(self) if f.compare))
        object.__setattr__(self, "_hash", h)
    return h


def _node(cls):
    cls = dataclass(frozen=True, repr=False)(cls)
    cls.__hash__ = _cached_hash
    cls.__repr__ = lambda self: f"{type(self).__name__}({self.text!r})"
    return cls


@_node
class Top(Formula):
    pass


@_node
class Bot(Formula):
    pass


@_node
class Atom(Formula):
    name: str


@_node
class Not(Formula):
    arg: Formula


@_node
class And(Formula):
    args: tuple

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))
        if len(self.args) < 2:
            raise ValueError("And needs at least two conjuncts")


@_node
class Or(Formula):
    args: tuple

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))
        if len(self.args) < 2:
            raise ValueError("Or needs at least two disjuncts")


@_node
class Box(Formula):
    agent: str
    arg: Formula


@_node
class Diamond(Formula):
    agent: str
    arg: Formula


@_node
class Update(Formula):
    """``[U,o]arg``.  Arrow updates are functional, so this is also ``<U,o>arg``."""

    model: "ArrowUpdateModel"
    outcome: str
    arg: Formula

    def __post_init__(self):
        if self.outcome not in self.model.outcome_set:
            raise ValueError(f"outcome {self.outcome!r} is not in update {self.model.label}")


@_node
class Quant(Formula):
    """``[*]arg``: arg holds after every arrow update."""

    arg: Formula


@_node
class QuantDiamond(Formula):
    """``<*>arg``: arg holds after some arrow update."""

    arg: Formula


TOP = Top()
BOT = Bot()


# -- convenience constructors -------------------------------------------------

def atom(name: str) -> Atom:
    return Atom(name)


def top() -> Top:
    return TOP


def bot() -> Bot:
    return BOT


def neg(f: Formula) -> Not:
    return Not(f)


def conj(*args: Formula) -> Formula:
    """n-ary conjunction; the empty conjunction is T."""
    if not args:
        return TOP
    if len(args) == 1:
        return args[0]
    return And(tuple(args))


def disj(*args: Formula) -> Formula:
    """n-ary disjunction; the empty disjunction is F."""
    if not args:
        return BOT
    if len(args) == 1:
        return args[0]
    return Or(tuple(args))


def box(agent: str, f: Formula) -> Box:
    return Box(agent, f)


def dia(agent: str, f: Formula) -> Diamond:
    return Diamond(agent, f)


def upd(model: "ArrowUpdateModel", outcome: str, f: Formula) -> Update:
    return Update(model, outcome, f)


def upd_multi(model: "ArrowUpdateModel", outcomes: Iterable[str], f: Formula) -> Formula:
    """``[U,Q]f``, the conjunction of ``[U,o]f`` over ``o`` in ``Q``."""
    return conj(*(Update(model, o, f) for o in outcomes))


def quant(f: Formula) -> Quant:
    return Quant(f)


def quant_dia(f: Formula) -> QuantDiamond:
    return QuantDiamond(f)


def implies(a: Formula, b: Formula) -> Formula:
    return Or((Not(a), b))


# -- arrow update models ------------------------------------------------------

@dataclass(frozen=True)
class Arrow:
    """``(source, pre) ->agent (target, post)``."""

    agent: str
    source: str
    pre: Formula
    target: str
    post: Formula

    @property
    def key(self) -> tuple:
        return (self.agent, self.source, self.target, self.pre.text, self.post.text)

    def __str__(self) -> str:
        return f"({self.source}, {self.pre}) -{self.agent}-> ({self.target}, {self.post})"


@dataclass(frozen=True, eq=True)
class ArrowUpdateModel:
    """Outcomes plus a multiset of arrows.

    Outcomes and arrows are stored in a canonical order so that two models
    built from the same data compare equal.  ``name`` is only a label for
    printing and does not take part in equality.
    """

    outcomes: tuple
    arrows: tuple
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        outs = tuple(sorted(set(self.outcomes)))
        if not outs:
            raise ValueError("an arrow update model needs at least one outcome")
        arrows = tuple(sorted(self.arrows, key=lambda a: a.key))
        known = set(outs)
        for a in arrows:
            if a.source not in known or a.target not in known:
                raise ValueError(f"arrow {a} mentions an undeclared outcome")
        object.__setattr__(self, "outcomes", outs)
        object.__setattr__(self, "arrows", arrows)

    __hash__ = _cached_hash

    @cached_property
    def outcome_set(self) -> frozenset:
        return frozenset(self.outcomes)

    @cached_property
    def label(self) -> str:
        if self.name:
            return self.name
        body = ";".join(f"{a.agent},{a.source},{a.pre.text},{a.target},{a.post.text}" for a in self.arrows)
        digest = hashlib.sha1(f"{','.join(self.outcomes)}|{body}".encode()).hexdigest()[:6]
        return f"U{digest}"

    @cached_property
    def agents(self) -> tuple:
        return tuple(sorted({a.agent for a in self.arrows}))

    @cached_property
    def _from(self) -> dict:
        out: dict = {}
        for a in self.arrows:
            out.setdefault((a.source, a.agent), []).append(a)
        return out

    def arrows_from(self, outcome: str, agent: str | None = None) -> list:
        if agent is not None:
            return list(self._from.get((outcome, agent), ()))
        return [a for a in self.arrows if a.source == outcome]

    def conditions(self) -> list:
        """All source and target conditions, without duplicates, in a fixed order."""
        seen = {}
        for a in self.arrows:
            seen.setdefault(a.pre, None)
            seen.setdefault(a.post, None)
        return sorted(seen, key=lambda f: f.sort_key)

    def reachable(self, points: Iterable[str]) -> frozenset:
        todo = list(points)
        seen = set(todo)
        while todo:
            o = todo.pop()
            for a in self.arrows:
                if a.source == o and a.target not in seen:
                    seen.add(a.target)
                    todo.append(a.target)
        return frozenset(seen)

    def restrict(self, outcomes: Iterable[str]) -> "ArrowUpdateModel":
        keep = set(outcomes)
        arrows = [a for a in self.arrows if a.source in keep and a.target in keep]
        return ArrowUpdateModel(tuple(keep), tuple(arrows), self.name)

    def map_conditions(self, fn) -> "ArrowUpdateModel":
        arrows = tuple(Arrow(a.agent, a.source, fn(a.pre), a.target, fn(a.post)) for a in self.arrows)
        return ArrowUpdateModel(self.outcomes, arrows, self.name)

    def renamed(self, name: str | None) -> "ArrowUpdateModel":
        return ArrowUpdateModel(self.outcomes, self.arrows, name)

    def __repr__(self) -> str:
        return f"ArrowUpdateModel({self.label}: {len(self.outcomes)} outcomes, {len(self.arrows)} arrows)"


@dataclass(frozen=True)
class PointedUpdate:
    model: ArrowUpdateModel
    points: tuple

    def __post_init__(self):
        pts = tuple(sorted(set(self.points)))
        if not pts:
            raise ValueError("a pointed update needs at least one point")
        for p in pts:
            if p not in self.model.outcome_set:
                raise ValueError(f"point {p!r} is not an outcome")
        object.__setattr__(self, "points", pts)


# -- printing -----------------------------------------------------------------

def to_text(f: Formula) -> str:
    """Print in the concrete syntax read by :func:`aauml.parser.parse_formula`."""
    if isinstance(f, Top):
        return "T"
    if isinstance(f, Bot):
        return "F"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        return "~" + _operand(f.arg)
    if isinstance(f, Box):
        return f"[{f.agent}]" + _operand(f.arg)
    if isinstance(f, Diamond):
        return f"<{f.agent}>" + _operand(f.arg)
    if isinstance(f, Update):
        return f"[{f.model.label}@{f.outcome}]" + _operand(f.arg)
    if isinstance(f, Quant):
        return "[*]" + _operand(f.arg)
    if isinstance(f, QuantDiamond):
        return "<*>" + _operand(f.arg)
    if isinstance(f, And):
        return " & ".join(_operand(x) for x in f.args)
    if isinstance(f, Or):
        return " | ".join(_operand(x) for x in f.args)
    raise TypeError(f"not a formula: {f!r}")


def _operand(f: Formula) -> str:
    s = f.text
    return f"({s})" if isinstance(f, (And, Or)) else s


# -- structural queries -------------------------------------------------------

def is_literal(f: Formula) -> bool:
    return isinstance(f, (Atom, Top, Bot)) or (isinstance(f, Not) and isinstance(f.arg, Atom))


def children(f: Formula) -> tuple:
    if isinstance(f, (And, Or)):
        return f.args
    if isinstance(f, (Not, Box, Diamond, Update, Quant, QuantDiamond)):
        return (f.arg,)
    return ()


def subformulas(f: Formula) -> Iterator[Formula]:
    """Every subformula, including conditions of update models, without repeats."""
    seen = set()
    todo = [f]
    while todo:
        g = todo.pop()
        if g in seen:
            continue
        seen.add(g)
        yield g
        todo.extend(children(g))
        if isinstance(g, Update):
            for a in g.model.arrows:
                todo.append(a.pre)
                todo.append(a.post)


def atoms(f: Formula) -> frozenset:
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Atom))


def agents(f: Formula) -> frozenset:
    out = set()
    for g in subformulas(f):
        if isinstance(g, (Box, Diamond)):
            out.add(g.agent)
        elif isinstance(g, Update):
            out.update(g.model.agents)
    return frozenset(out)


def update_models(f: Formula) -> dict:
    """Map printed label to model for every update modality in ``f``."""
    out = {}
    for g in subformulas(f):
        if isinstance(g, Update):
            out[g.model.label] = g.model
    return out


def is_ml(f: Formula) -> bool:
    """True when ``f`` has no update modalities and no quantifiers."""
    return not any(isinstance(g, (Update, Quant, QuantDiamond)) for g in subformulas(f))


def is_propositional(f: Formula) -> bool:
    return not any(isinstance(g, (Box, Diamond, Update, Quant, QuantDiamond)) for g in subformulas(f))


_depth_cache: dict = {}


def modal_depth(f: Formula) -> int:
    """Nesting depth of agent modalities.

    Update modalities and quantifiers add nothing themselves, but the
    conditions of an update model count.
    """
    if isinstance(f, (Atom, Top, Bot)):
        return 0
    d = _depth_cache.get(f)
    if d is not None:
        return d
    if isinstance(f, (Box, Diamond)):
        d = 1 + modal_depth(f.arg)
    elif isinstance(f, Update):
        d = modal_depth(f.arg)
        for a in f.model.arrows:
            d = max(d, modal_depth(a.pre), modal_depth(a.post))
    else:
        d = max((modal_depth(c) for c in children(f)), default=0)
    if len(_depth_cache) > 200_000:
        _depth_cache.clear()
    _depth_cache[f] = d
    return d


def size(f: Formula) -> int:
    return 1 + sum(size(c) for c in children(f))


def rebuild(f: Formula, args: tuple) -> Formula:
    """Copy of ``f`` with new children (same arity)."""
    if isinstance(f, And):
        return And(args)
    if isinstance(f, Or):
        return Or(args)
    if isinstance(f, Not):
        return Not(args[0])
    if isinstance(f, Box):
        return Box(f.agent, args[0])
    if isinstance(f, Diamond):
        return Diamond(f.agent, args[0])
    if isinstance(f, Update):
        return Update(f.model, f.outcome, args[0])
    if isinstance(f, Quant):
        return Quant(args[0])
    if isinstance(f, QuantDiamond):
        return QuantDiamond(args[0])
    return f


def substitute(f: Formula, target, replacement: Formula | None = None) -> Formula:
    """Replace atoms by formulas everywhere, including inside update conditions.

    Either ``substitute(f, "p", g)`` (or with ``Atom("p")``) for a single
    atom, or ``substitute(f, {"p": g, "q": h})`` for several at once.
    """
    if replacement is not None:
        mapping = {target: replacement}
    else:
        mapping = dict(target)
    mapping = {(k.name if isinstance(k, Atom) else k): v for k, v in mapping.items()}
    return _subst(f, mapping)


def _subst(f: Formula, mapping: dict) -> Formula:
    if isinstance(f, Atom):
        return mapping.get(f.name, f)
    if isinstance(f, Update):
        model = f.model.map_conditions(lambda c: _subst(c, mapping))
        if model != f.model:
            model = model.renamed(None)
        return Update(model, f.outcome, _subst(f.arg, mapping))
    kids = children(f)
    if not kids:
        return f
    return rebuild(f, tuple(_subst(c, mapping) for c in kids))


def expand(f: Formula) -> Formula:
    """Unfold one layer of derived syntax into the primitives."""
    if isinstance(f, Or):
        return Not(And(tuple(Not(x) for x in f.args)))
    if isinstance(f, Diamond):
        return Not(Box(f.agent, Not(f.arg)))
    if isinstance(f, QuantDiamond):
        return Not(Quant(Not(f.arg)))
    return f


def desugar(f: Formula) -> Formula:
    """Rewrite every derived connective into primitives, everywhere."""
    if isinstance(f, Update):
        return Update(f.model.map_conditions(desugar), f.outcome, desugar(f.arg))
    kids = children(f)
    if kids:
        f = rebuild(f, tuple(desugar(c) for c in kids))
    return expand(f)
