"""Building an arrow update that makes a goal formula true.

The construction follows the goal's shape after reduction to modal logic
and conversion to DNNF:

* a disjunction ``x | y`` combines updates ``(U1,o1)`` for ``x`` and
  ``(U2,o2)`` for ``y`` under a fresh root that copies the root arrows of
  ``U1`` guarded by ``<*>x`` and those of ``U2`` guarded by ``~<*>x``;
* a conjunction of literals, boxes ``[a]y_a`` and diamonds ``<a>x_i``
  gets a fresh root with one arrow ``(o,T) ->a (o_i, [U_i,o_i]y_a)`` per
  diamond, where ``(U_i,o_i)`` is synthesised for ``x_i & y_a``;
* with no diamonds the trivial one-outcome update without arrows works.

The longest arrow path from the root never exceeds the goal's modal depth.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .normal import complementary, dnnf, is_dnnf, simplify
from .reduction import reduce
from .syntax import (
    TOP, And, Arrow, ArrowUpdateModel, Bot, Box, Diamond, Formula, Not,
    Or, PointedUpdate, QuantDiamond, Update, agents as agents_of, conj, is_ml,
)


@dataclass(frozen=True)
class Derivation:
    rule: str
    formula: Formula
    outcome: str
    children: tuple = ()

    def lines(self, indent: int = 0) -> list:
        out = [f"{'  ' * indent}{self.rule} -> {self.outcome}: {self.formula}"]
        for c in self.children:
            out.extend(c.lines(indent + 1))
        return out

    def __str__(self) -> str:
        return "\n".join(self.lines())


@dataclass(frozen=True)
class SynthResult:
    model: ArrowUpdateModel
    point: str
    goal: Formula
    derivation: Derivation = field(compare=False)

    @property
    def pointed(self) -> PointedUpdate:
        return PointedUpdate(self.model, (self.point,))

    def achieves(self) -> Formula:
        """``<U,o>goal`` (the same as ``[U,o]goal`` for an arrow update)."""
        return Update(self.model, self.point, self.goal)

    def optimized(self) -> "SynthResult":
        pu = optimize(self.pointed)
        return replace(self, model=pu.model, point=pu.points[0])


class _Synth:
    def __init__(self, ml_conditions: bool):
        self.ml = ml_conditions

    def cond(self, f: Formula) -> Formula:
        return simplify(reduce(f)) if self.ml else f

    def run(self, f: Formula, path: str) -> SynthResult:
        root = "o" + path
        if not is_ml(f):
            sub = self.run(reduce(f), path)
            return replace(sub, goal=f, derivation=Derivation("reduce", f, root, (sub.derivation,)))
        if not is_dnnf(f):
            sub = self.run(dnnf(f), path)
            return replace(sub, goal=f, derivation=Derivation("dnnf", f, root, (sub.derivation,)))
        if isinstance(f, Or):
            return self.disjunction(f, path)
        return self.conjunction(f, path)

    def disjunction(self, f: Or, path: str) -> SynthResult:
        parts = [self.run(d, f"{path}_v{i}") for i, d in enumerate(f.args)]
        acc = parts[0]
        n = len(parts)
        for i in range(1, n):
            rid = "o" + path if i == n - 1 else f"o{path}_c{i}"
            goal = f.args[0] if i == 1 else Or(f.args[:i])
            acc = self.combine_or(replace(acc, goal=goal), parts[i], rid)
        return replace(acc, goal=f)

    def combine_or(self, A: SynthResult, B: SynthResult, rid: str) -> SynthResult:
        guard = self.cond(QuantDiamond(A.goal))
        arrows = list(A.model.arrows) + list(B.model.arrows)
        for arr in A.model.arrows_from(A.point):
            pre = simplify(And((arr.pre, guard))) if self.ml else And((arr.pre, guard))
            arrows.append(Arrow(arr.agent, rid, pre, arr.target, arr.post))
        for arr in B.model.arrows_from(B.point):
            pre = simplify(And((arr.pre, Not(guard)))) if self.ml else And((arr.pre, Not(guard)))
            arrows.append(Arrow(arr.agent, rid, pre, arr.target, arr.post))
        outcomes = {rid} | set(A.model.outcomes) | set(B.model.outcomes)
        model = ArrowUpdateModel(tuple(outcomes), tuple(arrows))
        goal = Or((A.goal, B.goal))
        der = Derivation("disjunction", goal, rid, (A.derivation, B.derivation))
        return SynthResult(model, rid, goal, der)

    def conjunction(self, f: Formula, path: str) -> SynthResult:
        root = "o" + path
        items = f.args if isinstance(f, And) else (f,)
        boxes: dict = {}
        diamonds = []
        for x in items:
            if isinstance(x, Box):
                boxes.setdefault(x.agent, []).append(x.arg)
            elif isinstance(x, Diamond):
                diamonds.append(x)
        chi = {a: conj(*boxes.get(a, ())) for a in sorted(agents_of(f))}
        if not diamonds:
            model = ArrowUpdateModel((root,), ())
            return SynthResult(model, root, f, Derivation("trivial", f, root))
        arrows = []
        outcomes = {root}
        subs = []
        for k, d in enumerate(diamonds):
            sub = self.run(And((d.arg, chi[d.agent])), f"{path}_{k}")
            subs.append(sub)
            post = self.cond(Update(sub.model, sub.point, chi[d.agent]))
            arrows.append(Arrow(d.agent, root, TOP, sub.point, post))
            arrows.extend(sub.model.arrows)
            outcomes.update(sub.model.outcomes)
        model = ArrowUpdateModel(tuple(outcomes), tuple(arrows))
        der = Derivation("conjunction", f, root, tuple(s.derivation for s in subs))
        return SynthResult(model, root, f, der)


def synthesize(goal: Formula, *, ml_conditions: bool = True, optimize_result: bool = False) -> SynthResult:
    """A pointed arrow update ``(U, o)`` with ``<*>goal <-> <U,o>goal`` valid.

    With ``ml_conditions`` (the default) every arrow condition is rewritten
    to plain modal logic; otherwise conditions may mention ``<*>`` and the
    sub-updates, as the construction produces them.
    """
    r = _Synth(ml_conditions).run(goal, "")
    return r.optimized() if optimize_result else r


# -- building blocks ---------------------------------------------------------------

def trivial_update(agents=()) -> PointedUpdate:
    """One outcome and no arrows: every agent loses all its edges."""
    return PointedUpdate(ArrowUpdateModel(("o",), ()), ("o",))


def rename_outcomes(r: SynthResult, prefix: str) -> SynthResult:
    """The same result with every outcome id prefixed, to keep parts disjoint."""
    ren = {o: prefix + o for o in r.model.outcomes}
    arrows = tuple(Arrow(a.agent, ren[a.source], a.pre, ren[a.target], a.post) for a in r.model.arrows)
    model = ArrowUpdateModel(tuple(ren.values()), arrows, r.model.name)
    return SynthResult(model, ren[r.point], r.goal, r.derivation)


def combine_disjunction(phi1: Formula, r1: SynthResult, phi2: Formula, r2: SynthResult, *,
                        ml_conditions: bool = True, root: str = "o") -> SynthResult:
    """A root that acts as ``r1`` where ``<*>phi1`` holds and as ``r2`` elsewhere."""
    A = replace(rename_outcomes(r1, "l_"), goal=phi1)
    B = replace(rename_outcomes(r2, "r_"), goal=phi2)
    return _Synth(ml_conditions).combine_or(A, B, root)


def combine_conjunction(goal: Formula, parts: list, *, ml_conditions: bool = True,
                        root: str = "o") -> SynthResult:
    """A fresh root with one arrow per diamond of ``goal``.

    ``goal`` is a conjunction of literals, boxes and diamonds; ``parts``
    lists, in the order the diamonds occur, a result achieving
    ``x_i & y_a`` for each diamond ``<a>x_i`` where ``[a]y_a`` collects the
    boxes of agent ``a``.
    """
    synth_ = _Synth(ml_conditions)
    items = goal.args if isinstance(goal, And) else (goal,)
    boxes: dict = {}
    diamonds = []
    for x in items:
        if isinstance(x, Box):
            boxes.setdefault(x.agent, []).append(x.arg)
        elif isinstance(x, Diamond):
            diamonds.append(x)
    if len(parts) != len(diamonds):
        raise ValueError(f"need one part per diamond: {len(diamonds)} diamonds, {len(parts)} parts")
    arrows, outcomes, ders = [], {root}, []
    for k, (d, sub) in enumerate(zip(diamonds, parts)):
        sub = rename_outcomes(sub, f"p{k}_")
        chi = conj(*boxes.get(d.agent, ()))
        arrows.append(Arrow(d.agent, root, TOP, sub.point, synth_.cond(Update(sub.model, sub.point, chi))))
        arrows.extend(sub.model.arrows)
        outcomes.update(sub.model.outcomes)
        ders.append(sub.derivation)
    model = ArrowUpdateModel(tuple(outcomes), tuple(arrows))
    rule = "conjunction" if diamonds else "trivial"
    return SynthResult(model, root, goal, Derivation(rule, goal, root, tuple(ders)))


synth = synthesize


# -- measurements ---------------------------------------------------------------

def update_depth(model: ArrowUpdateModel, points) -> int:
    """Length of the longest arrow path from the points (an error on cycles)."""
    if isinstance(points, str):
        points = (points,)
    memo: dict = {}
    active = set()

    def depth(o):
        if o in memo:
            return memo[o]
        if o in active:
            raise ValueError("update model has a cycle reachable from the point")
        active.add(o)
        d = max((1 + depth(a.target) for a in model.arrows_from(o)), default=0)
        active.discard(o)
        memo[o] = d
        return d

    return max(depth(p) for p in points)


# -- optimisation ---------------------------------------------------------------

def optimize(pu: PointedUpdate) -> PointedUpdate:
    """A smaller pointed update with the same effect on every pointed model.

    Repeats until nothing changes: drop outcomes unreachable from the
    points, rewrite conditions into simplified modal logic, drop arrows
    with a ``F`` condition and duplicate arrows, merge outcomes whose
    outgoing arrows coincide, and merge two arrows that differ only in
    complementary source conditions into one with source ``T``.
    """
    model, points = pu.model, tuple(pu.points)
    while True:
        before = (model, points)
        model = model.restrict(model.reachable(points))
        model = model.map_conditions(lambda c: simplify(reduce(c)))
        model = _drop_dead_arrows(model)
        model, points = _merge_outcomes(model, points)
        model = _merge_complements(model)
        if (model, points) == before:
            return PointedUpdate(model, points)


def _drop_dead_arrows(model: ArrowUpdateModel) -> ArrowUpdateModel:
    kept = {}
    for a in model.arrows:
        if isinstance(a.pre, Bot) or isinstance(a.post, Bot):
            continue
        kept.setdefault(a, None)
    return ArrowUpdateModel(model.outcomes, tuple(kept), model.name)


def _merge_outcomes(model: ArrowUpdateModel, points: tuple):
    block = {o: 0 for o in model.outcomes}
    while True:
        sigs = {}
        for o in model.outcomes:
            sig = frozenset((a.agent, a.pre, block[a.target], a.post) for a in model.arrows_from(o))
            sigs[o] = (block[o], sig)
        ids = {}
        new = {o: ids.setdefault(sigs[o], len(ids)) for o in model.outcomes}
        if len(ids) == len(set(block.values())):
            break
        block = new
    members: dict = {}
    for o in model.outcomes:
        members.setdefault(block[o], []).append(o)
    rep = {}
    for b, os_ in members.items():
        pts = [o for o in os_ if o in points]
        chosen = min(pts) if pts else min(os_)
        for o in os_:
            rep[o] = chosen
    keep = set(rep.values())
    arrows = {}
    for a in model.arrows:
        if a.source in keep:
            arrows.setdefault(Arrow(a.agent, a.source, a.pre, rep[a.target], a.post), None)
    new_points = tuple(sorted({rep[p] for p in points}))
    return ArrowUpdateModel(tuple(keep), tuple(arrows), model.name), new_points


def _merge_complements(model: ArrowUpdateModel) -> ArrowUpdateModel:
    arrows = list(model.arrows)
    changed = True
    while changed:
        changed = False
        for i in range(len(arrows)):
            for j in range(i + 1, len(arrows)):
                x, y = arrows[i], arrows[j]
                if (x.agent, x.source, x.target, x.post) != (y.agent, y.source, y.target, y.post):
                    continue
                if complementary(x.pre, y.pre):
                    merged = Arrow(x.agent, x.source, TOP, x.target, x.post)
                    arrows = [a for k, a in enumerate(arrows) if k not in (i, j)] + [merged]
                    changed = True
                    break
            if changed:
                break
    return ArrowUpdateModel(model.outcomes, tuple(dict.fromkeys(arrows)), model.name)
