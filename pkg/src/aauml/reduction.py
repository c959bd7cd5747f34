"""Rewriting update modalities and quantifiers away.

Each rule below takes a redex and returns its contractum, exactly as the
corresponding equivalence reads left to right:

* U1  ``[U,o]p <-> p``
* U2  ``[U,o]~x <-> ~[U,o]x``
* U3  ``[U,o](x & y) <-> [U,o]x & [U,o]y``
* U4  ``[U,o][a]x <-> AND over a-arrows (o,pre)->(o',post) of (pre -> [a](post -> [U,o']x))``
* A1  ``<*>x0 <-> x0`` for propositional ``x0``
* A2  ``<*>(x | y) <-> <*>x | <*>y``
* A3  ``<*>(x0 & x) <-> x0 & <*>x`` for propositional ``x0``
* A4  ``<*>AND_a(AND <a>x_i & [a]y_a) <-> AND_a AND_i <a><*>(x_i & y_a)``

Bookkeeping steps are ``DEF`` (unfold a derived connective), ``DNNF``
(normalise a quantifier body), ``PAD`` (one box per agent that has
diamonds, adding ``[a]T`` where needed), ``SIMP`` (see
:func:`aauml.normal.simplify`) and ``RE-context`` (splice an eliminated
modality back into its surrounding formula).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .normal import dnnf, simplify
from .syntax import (
    TOP, And, ArrowUpdateModel, Atom, Bot, Box, Diamond, Formula, Not, Or,
    Quant, QuantDiamond, Top, Update, children, conj, expand, implies,
    is_propositional, rebuild,
)


class RuleError(ValueError):
    """A rule was applied to something that is not its redex."""


# -- rules ----------------------------------------------------------------------

def _need(cond: bool, rule: str, f: Formula):
    if not cond:
        raise RuleError(f"{rule} does not apply to {f}")


def rule_U1(f: Formula) -> Formula:
    _need(isinstance(f, Update) and isinstance(f.arg, (Atom, Top, Bot)), "U1", f)
    return f.arg


def rule_U2(f: Formula) -> Formula:
    _need(isinstance(f, Update) and isinstance(f.arg, Not), "U2", f)
    return Not(Update(f.model, f.outcome, f.arg.arg))


def rule_U3(f: Formula) -> Formula:
    _need(isinstance(f, Update) and isinstance(f.arg, And), "U3", f)
    return And(tuple(Update(f.model, f.outcome, x) for x in f.arg.args))


def rule_U4(f: Formula) -> Formula:
    _need(isinstance(f, Update) and isinstance(f.arg, Box), "U4", f)
    a, body = f.arg.agent, f.arg.arg
    parts = [implies(arr.pre, Box(a, implies(arr.post, Update(f.model, arr.target, body))))
             for arr in f.model.arrows_from(f.outcome, a)]
    return conj(*parts)


def rule_A1(f: Formula) -> Formula:
    _need(isinstance(f, QuantDiamond) and is_propositional(f.arg), "A1", f)
    return f.arg


def rule_A2(f: Formula) -> Formula:
    _need(isinstance(f, QuantDiamond) and isinstance(f.arg, Or), "A2", f)
    return Or(tuple(QuantDiamond(x) for x in f.arg.args))


def rule_A3(f: Formula) -> Formula:
    _need(isinstance(f, QuantDiamond) and isinstance(f.arg, And), "A3", f)
    props = [x for x in f.arg.args if is_propositional(x)]
    rest = [x for x in f.arg.args if not is_propositional(x)]
    _need(bool(props) and bool(rest), "A3", f)
    return And((conj(*props), QuantDiamond(conj(*rest))))


def _modal_items(body: Formula) -> tuple:
    items = body.args if isinstance(body, And) else (body,)
    if not all(isinstance(x, (Box, Diamond)) for x in items):
        return ()
    return items


def rule_A4(f: Formula) -> Formula:
    _need(isinstance(f, QuantDiamond), "A4", f)
    items = _modal_items(f.arg)
    _need(bool(items), "A4", f)
    boxes: dict = {}
    for x in items:
        if isinstance(x, Box):
            _need(x.agent not in boxes, "A4", f)
            boxes[x.agent] = x.arg
    parts = []
    for x in items:
        if isinstance(x, Diamond):
            _need(x.agent in boxes, "A4", f)
            parts.append(Diamond(x.agent, QuantDiamond(And((x.arg, boxes[x.agent])))))
    return conj(*parts)


def rule_DEF(f: Formula) -> Formula:
    if isinstance(f, Update) and isinstance(f.arg, (Or, Diamond)):
        return Update(f.model, f.outcome, expand(f.arg))
    if isinstance(f, Quant):
        return Not(QuantDiamond(Not(f.arg)))
    raise RuleError(f"DEF does not apply to {f}")


def rule_DNNF(f: Formula) -> Formula:
    _need(isinstance(f, QuantDiamond), "DNNF", f)
    return QuantDiamond(dnnf(f.arg))


def rule_PAD(f: Formula) -> Formula:
    """Merge the boxes of each agent and add ``[a]T`` for agents with only diamonds."""
    _need(isinstance(f, QuantDiamond), "PAD", f)
    items = _modal_items(f.arg)
    _need(bool(items), "PAD", f)
    ags = sorted({x.agent for x in items})
    out = []
    for a in ags:
        dias = [x for x in items if isinstance(x, Diamond) and x.agent == a]
        boxes = [x.arg for x in items if isinstance(x, Box) and x.agent == a]
        out.extend(dias)
        if boxes or dias:
            out.append(Box(a, conj(*boxes) if boxes else TOP))
    return QuantDiamond(conj(*out))


def rule_SIMP(f: Formula) -> Formula:
    return simplify(f)


RULES = {
    "U1": rule_U1, "U2": rule_U2, "U3": rule_U3, "U4": rule_U4,
    "A1": rule_A1, "A2": rule_A2, "A3": rule_A3, "A4": rule_A4,
    "DEF": rule_DEF, "DNNF": rule_DNNF, "PAD": rule_PAD, "SIMP": rule_SIMP,
}


# -- traces -------------------------------------------------------------------

@dataclass(frozen=True)
class Step:
    rule: str
    before: Formula
    after: Formula
    path: tuple = ()
    redex: Formula | None = None
    contractum: Formula | None = None

    def __str__(self) -> str:
        where = f" at {'.'.join(map(str, self.path)) or 'root'}" if self.rule == "RE-context" else ""
        return f"{self.rule}{where}: {_clip(self.before.text)}  =>  {_clip(self.after.text)}"


def _clip(s: str, width: int = 160) -> str:
    return s if len(s) <= width else s[: width - 3] + "..."


@dataclass
class RewriteTrace:
    steps: list = field(default_factory=list)

    def add(self, rule: str, before: Formula, after: Formula, **extra):
        self.steps.append(Step(rule, before, after, **extra))

    def rules_used(self) -> set:
        return {s.rule for s in self.steps}

    def validate(self) -> bool:
        """Re-apply every step; raise ``RuleError`` on the first mismatch."""
        for i, s in enumerate(self.steps):
            if s.rule == "RE-context":
                if get_at(s.before, s.path) != s.redex:
                    raise RuleError(f"step {i}: redex not found at {s.path}")
                if replace_at(s.before, s.path, s.contractum) != s.after:
                    raise RuleError(f"step {i}: splice does not give the recorded formula")
                if _Reducer(None).eliminate(s.redex) != s.contractum:
                    raise RuleError(f"step {i}: elimination does not give the recorded contractum")
                continue
            rule = RULES.get(s.rule)
            if rule is None:
                raise RuleError(f"step {i}: unknown rule {s.rule}")
            if rule(s.before) != s.after:
                raise RuleError(f"step {i}: {s.rule} does not rewrite {s.before} to {s.after}")
        return True

    def __str__(self) -> str:
        return "\n".join(str(s) for s in self.steps)


# -- positions ------------------------------------------------------------------

def get_at(f: Formula, path: tuple) -> Formula:
    for p in path:
        if isinstance(p, tuple):
            _, i, j = p
            arrow = f.model.arrows[i]
            f = arrow.pre if j == 0 else arrow.post
        else:
            f = children(f)[p]
    return f


def replace_at(f: Formula, path: tuple, new: Formula) -> Formula:
    if not path:
        return new
    p, rest = path[0], path[1:]
    if isinstance(p, tuple):
        _, i, j = p
        arrows = list(f.model.arrows)
        a = arrows[i]
        if j == 0:
            a = type(a)(a.agent, a.source, replace_at(a.pre, rest, new), a.target, a.post)
        else:
            a = type(a)(a.agent, a.source, a.pre, a.target, replace_at(a.post, rest, new))
        arrows[i] = a
        model = ArrowUpdateModel(f.model.outcomes, tuple(arrows), f.model.name)
        return Update(model, f.outcome, f.arg)
    kids = list(children(f))
    kids[p] = replace_at(kids[p], rest, new)
    return rebuild(f, tuple(kids))


_dyn_memo: dict = {}


def _dynamic(f: Formula) -> bool:
    hit = _dyn_memo.get(f)
    if hit is None:
        if isinstance(f, (Update, Quant, QuantDiamond)):
            hit = True
        else:
            hit = any(_dynamic(c) for c in children(f))
        if len(_dyn_memo) > 200_000:
            _dyn_memo.clear()
        _dyn_memo[f] = hit
    return hit


def find_redex(f: Formula, kinds=(Update, Quant, QuantDiamond)) -> tuple | None:
    """Path to the leftmost innermost dynamic modality of the given kinds.

    Conditions of an update model count as being inside the modality and
    come before its argument.
    """
    if not _dynamic(f):
        return None
    if isinstance(f, Update):
        for i, a in enumerate(f.model.arrows):
            for j, c in enumerate((a.pre, a.post)):
                p = find_redex(c, kinds)
                if p is not None:
                    return (("c", i, j),) + p
    for i, c in enumerate(children(f)):
        p = find_redex(c, kinds)
        if p is not None:
            return (i,) + p
    if not isinstance(f, kinds) or any(_dynamic(c) for c in children(f)):
        return None
    if isinstance(f, Update) and any(_dynamic(c) for a in f.model.arrows for c in (a.pre, a.post)):
        return None
    return ()


# -- the reducer ----------------------------------------------------------------

class _Reducer:
    def __init__(self, trace: RewriteTrace | None):
        self.trace = trace
        self.pushed: dict = {}
        self.exists_memo: dict = {}

    def step(self, rule: str, before: Formula, after: Formula):
        if self.trace is not None:
            self.trace.add(rule, before, after)

    def eliminate(self, node: Formula) -> Formula:
        """Modal-logic equivalent of a dynamic modality whose parts are modal logic."""
        if isinstance(node, Update):
            raw = self.push(node)
        elif isinstance(node, QuantDiamond):
            raw = self.exists(node.arg)
        elif isinstance(node, Quant):
            r = rule_DEF(node)
            self.step("DEF", node, r)
            raw = Not(self.exists(r.arg.arg))
        else:
            raise RuleError(f"not a dynamic modality: {node}")
        out = simplify(raw)
        if out != raw:
            self.step("SIMP", raw, out)
        return out

    def push(self, f: Update) -> Formula:
        hit = self.pushed.get(f)
        if hit is not None:
            return hit
        x = f.arg
        if isinstance(x, (Atom, Top, Bot)):
            out = rule_U1(f)
            self.step("U1", f, out)
        elif isinstance(x, Not):
            r = rule_U2(f)
            self.step("U2", f, r)
            out = Not(self.push(r.arg))
        elif isinstance(x, And):
            r = rule_U3(f)
            self.step("U3", f, r)
            out = And(tuple(self.push(u) for u in r.args))
        elif isinstance(x, Box):
            r = rule_U4(f)
            self.step("U4", f, r)
            out = self._push_inside(r)
        elif isinstance(x, (Or, Diamond)):
            r = rule_DEF(f)
            self.step("DEF", f, r)
            out = self.push(r)
        else:
            raise RuleError(f"update body is not modal logic: {x}")
        self.pushed[f] = out
        return out

    def _push_inside(self, f: Formula) -> Formula:
        if isinstance(f, Update):
            return self.push(f)
        if not _dynamic(f):
            return f
        return rebuild(f, tuple(self._push_inside(c) for c in children(f)))

    def exists(self, body: Formula) -> Formula:
        hit = self.exists_memo.get(body)
        if hit is not None:
            return hit
        f = QuantDiamond(body)
        if is_propositional(body):
            out = rule_A1(f)
            self.step("A1", f, out)
        else:
            d = rule_DNNF(f)
            if d != f:
                self.step("DNNF", f, d)
                out = self.exists(d.arg)
            elif isinstance(body, Or):
                r = rule_A2(f)
                self.step("A2", f, r)
                out = Or(tuple(self.exists(q.arg) for q in r.args))
            elif isinstance(body, And) and any(is_propositional(x) for x in body.args):
                r = rule_A3(f)
                self.step("A3", f, r)
                out = And((r.args[0], self.exists(r.args[1].arg)))
            else:
                padded = rule_PAD(f)
                if padded != f:
                    self.step("PAD", f, padded)
                r = rule_A4(padded)
                self.step("A4", padded, r)
                out = self._exists_inside(r)
        self.exists_memo[body] = out
        return out

    def _exists_inside(self, f: Formula) -> Formula:
        if isinstance(f, QuantDiamond):
            return self.exists(f.arg)
        kids = children(f)
        if not kids:
            return f
        return rebuild(f, tuple(self._exists_inside(c) for c in kids))


def _run(f: Formula, trace: RewriteTrace | None, kinds, once: bool) -> Formula:
    red = _Reducer(trace)
    changed = False
    while True:
        path = find_redex(f, kinds)
        if path is None:
            break
        node = get_at(f, path)
        ml = red.eliminate(node)
        new = replace_at(f, path, ml)
        if trace is not None:
            trace.add("RE-context", f, new, path=path, redex=node, contractum=ml)
        f = new
        changed = True
        if once:
            break
    if changed:
        out = simplify(f)
        if out != f and trace is not None:
            trace.add("SIMP", f, out)
        f = out
    return f


def reduce(f: Formula, trace: RewriteTrace | None = None) -> Formula:
    """An equivalent formula of plain modal logic.

    Dynamic modalities are eliminated one at a time, leftmost innermost
    first, and each result is simplified before being spliced back.
    """
    return _run(f, trace, (Update, Quant, QuantDiamond), once=False)


def reduce_update(f: Formula, trace: RewriteTrace | None = None) -> Formula:
    """Eliminate the leftmost innermost update modality of ``f``."""
    return _run(f, trace, (Update,), once=True)


def reduce_quantifier(f: Formula, trace: RewriteTrace | None = None) -> Formula:
    """Modal-logic equivalent of ``[*]x`` or ``<*>x`` for a modal-logic ``x``."""
    if not isinstance(f, (Quant, QuantDiamond)) or _dynamic(f.arg):
        raise RuleError("reduce_quantifier needs a quantifier over a modal-logic formula")
    return _run(f, trace, (Quant, QuantDiamond), once=True)
