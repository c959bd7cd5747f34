"""Kripke models, action models, update execution and model checking."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product as iproduct
from typing import Iterable, Iterator, Mapping

from .syntax import (
    And, ArrowUpdateModel, Atom, Bot, Box, Diamond, Formula, Not, Or, Quant,
    QuantDiamond, Top, Update, agents as agents_of, atoms as atoms_of, is_ml,
)


class SignatureError(ValueError):
    pass


class ResourceCapError(RuntimeError):
    """A configured size bound would be exceeded."""


def state_label(s) -> str:
    """Printable id of a (possibly product) state."""
    if isinstance(s, tuple):
        return "(" + ",".join(state_label(x) for x in s) + ")"
    return str(s)


class KripkeModel:
    """A finite multi-agent Kripke model.

    ``relations`` maps each agent to a set of ``(s, t)`` pairs and
    ``valuation`` maps each atom to the states where it is true.  Agents and
    atoms that are declared but unused are part of the signature.
    """

    def __init__(self, states: Iterable, relations: Mapping, valuation: Mapping,
                 agents: Iterable | None = None, atoms: Iterable | None = None,
                 *, allow_empty: bool = False):
        self.states = tuple(states)
        if not self.states and not allow_empty:
            raise ValueError("a Kripke model needs at least one state")
        known = set(self.states)
        if len(known) != len(self.states):
            raise ValueError("duplicate state ids")
        self.agents = tuple(sorted(set(agents if agents is not None else relations)))
        self.atoms = tuple(sorted(set(atoms if atoms is not None else valuation)))
        if set(self.agents) & set(self.atoms):
            raise SignatureError("agents and atoms must be disjoint")
        self.relations = {}
        for a in self.agents:
            pairs = frozenset(tuple(p) for p in relations.get(a, ()))
            for s, t in pairs:
                if s not in known or t not in known:
                    raise ValueError(f"relation {a} mentions an unknown state")
            self.relations[a] = pairs
        for a in relations:
            if a not in self.relations:
                raise SignatureError(f"relation for undeclared agent {a!r}")
        self.valuation = {}
        for p in self.atoms:
            ext = frozenset(valuation.get(p, ()))
            if not ext <= known:
                raise ValueError(f"valuation of {p} mentions an unknown state")
            self.valuation[p] = ext
        for p in valuation:
            if p not in self.valuation:
                raise SignatureError(f"valuation for undeclared atom {p!r}")
        self._key = (frozenset(self.states), tuple(self.relations[a] for a in self.agents),
                     tuple(self.valuation[p] for p in self.atoms), self.agents, self.atoms)
        self._hash = hash(self._key)

    def __eq__(self, other):
        return isinstance(other, KripkeModel) and self._key == other._key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        edges = sum(len(r) for r in self.relations.values())
        return f"KripkeModel({len(self.states)} states, {edges} edges, agents={self.agents}, atoms={self.atoms})"

    @property
    def empty(self) -> bool:
        """True only for the result of an action model that nowhere executes."""
        return not self.states

    @cached_property
    def succ(self) -> dict:
        out = {a: {s: [] for s in self.states} for a in self.agents}
        for a, pairs in self.relations.items():
            for s, t in pairs:
                out[a][s].append(t)
        for a in out:
            for s in out[a]:
                out[a][s].sort(key=repr)
        return out

    def successors(self, agent: str, s) -> list:
        return self.succ[agent][s]

    def true_atoms(self, s) -> frozenset:
        return frozenset(p for p in self.atoms if s in self.valuation[p])

    def check_signature(self, f: Formula):
        extra_agents = agents_of(f) - set(self.agents)
        extra_atoms = atoms_of(f) - set(self.atoms)
        if extra_agents or extra_atoms:
            raise SignatureError(
                f"formula uses symbols not in the model: {sorted(extra_agents | extra_atoms)}")


@dataclass(frozen=True)
class ActionModel:
    """Actions with preconditions and per-agent accessibility."""

    actions: tuple
    relations: tuple        # sorted (agent, e, f) triples
    preconditions: tuple    # sorted (action, formula) pairs
    name: str | None = None

    def __post_init__(self):
        acts = tuple(sorted(set(self.actions)))
        if not acts:
            raise ValueError("an action model needs at least one action")
        known = set(acts)
        rel = tuple(sorted(set(tuple(r) for r in self.relations)))
        for a, e, f in rel:
            if e not in known or f not in known:
                raise ValueError("relation mentions an unknown action")
        pre = dict(self.preconditions)
        if set(pre) != known:
            raise ValueError("every action needs exactly one precondition")
        object.__setattr__(self, "actions", acts)
        object.__setattr__(self, "relations", rel)
        object.__setattr__(self, "preconditions", tuple(sorted(pre.items())))

    @classmethod
    def build(cls, relations: Mapping, preconditions: Mapping, name=None) -> "ActionModel":
        rel = [(a, e, f) for a, pairs in relations.items() for e, f in pairs]
        return cls(tuple(preconditions), tuple(rel), tuple(preconditions.items()), name)

    @cached_property
    def pre(self) -> dict:
        return dict(self.preconditions)

    @cached_property
    def agents(self) -> tuple:
        return tuple(sorted({a for a, _, _ in self.relations}))

    def edges(self, agent: str) -> list:
        return [(e, f) for a, e, f in self.relations if a == agent]


@dataclass(frozen=True)
class PointedAction:
    model: ActionModel
    points: tuple

    def __post_init__(self):
        pts = tuple(sorted(set(self.points)))
        if not pts or not set(pts) <= set(self.model.actions):
            raise ValueError("points must be a nonempty set of actions")
        object.__setattr__(self, "points", pts)


# -- execution ----------------------------------------------------------------

def execute_arrow_update(M: KripkeModel, U: ArrowUpdateModel, quantifiers: str = "reduce") -> KripkeModel:
    """The product ``M * U`` with states ``(s, o)``.

    ``((s,o),(t,o'))`` is an ``a``-edge when ``(s,t)`` is one in ``M`` and
    some ``a``-arrow from ``(o, pre)`` to ``(o', post)`` has ``pre`` true at
    ``s`` and ``post`` true at ``t``.
    """
    ev = Evaluator(M, quantifiers)
    return ev.product(U)


def execute_action_model(M: KripkeModel, E: ActionModel, quantifiers: str = "reduce") -> KripkeModel:
    """``M (x) E``: states ``(s, e)`` with ``pre(e)`` true at ``s``.

    When no precondition holds anywhere the result has no states; check
    ``.empty`` before using it as an ordinary model.
    """
    ev = Evaluator(M, quantifiers)
    ext = {e: ev.ext(E.pre[e]) for e in E.actions}
    states = [(s, e) for s in M.states for e in E.actions if s in ext[e]]
    live = set(states)
    rel = {}
    for a in M.agents:
        pairs = set()
        for e, f in E.edges(a):
            for s, t in M.relations[a]:
                if (s, e) in live and (t, f) in live:
                    pairs.add(((s, e), (t, f)))
        rel[a] = pairs
    val = {p: [x for x in states if x[0] in M.valuation[p]] for p in M.atoms}
    return KripkeModel(states, rel, val, M.agents, M.atoms, allow_empty=True)


def prune_unreachable(M: KripkeModel, points: Iterable) -> KripkeModel:
    """The submodel generated by ``points``."""
    todo = list(points)
    seen = set(todo)
    while todo:
        s = todo.pop()
        for a in M.agents:
            for t in M.succ[a][s]:
                if t not in seen:
                    seen.add(t)
                    todo.append(t)
    states = [s for s in M.states if s in seen]
    rel = {a: [(s, t) for s, t in M.relations[a] if s in seen] for a in M.agents}
    val = {p: [s for s in M.valuation[p] if s in seen] for p in M.atoms}
    return KripkeModel(states, rel, val, M.agents, M.atoms)


# -- model checking -------------------------------------------------------------

QUANTIFIER_MODES = ("reduce", "witness", "refinement")


class Evaluator:
    """Computes truth sets of formulas in one model, with memoisation.

    ``quantifiers`` selects how ``[*]`` and ``<*>`` are decided:
    ``reduce`` rewrites them to modal logic, ``witness`` executes a
    synthesised update, and ``refinement`` searches refinements directly
    (bodies must then be modal formulas).
    """

    def __init__(self, model: KripkeModel, quantifiers: str = "reduce"):
        if quantifiers not in QUANTIFIER_MODES:
            raise ValueError(f"unknown quantifier mode {quantifiers!r}")
        self.model = model
        self.quantifiers = quantifiers
        self.memo: dict = {}
        self.products: dict = {}
        self.all = frozenset(model.states)

    def ext(self, f: Formula) -> frozenset:
        hit = self.memo.get(f)
        if hit is None:
            hit = self._ext(f)
            self.memo[f] = hit
        return hit

    def _ext(self, f: Formula) -> frozenset:
        M = self.model
        if isinstance(f, Top):
            return self.all
        if isinstance(f, Bot):
            return frozenset()
        if isinstance(f, Atom):
            if f.name not in M.valuation:
                raise SignatureError(f"atom {f.name!r} is not in the model")
            return M.valuation[f.name]
        if isinstance(f, Not):
            return self.all - self.ext(f.arg)
        if isinstance(f, And):
            out = self.all
            for x in f.args:
                out &= self.ext(x)
            return out
        if isinstance(f, Or):
            out = frozenset()
            for x in f.args:
                out |= self.ext(x)
            return out
        if isinstance(f, (Box, Diamond)):
            if f.agent not in M.succ:
                raise SignatureError(f"agent {f.agent!r} is not in the model")
            inner = self.ext(f.arg)
            succ = M.succ[f.agent]
            if isinstance(f, Box):
                return frozenset(s for s in M.states if all(t in inner for t in succ[s]))
            return frozenset(s for s in M.states if any(t in inner for t in succ[s]))
        if isinstance(f, Update):
            sub = self.product_evaluator(f.model)
            inner = sub.ext(f.arg)
            return frozenset(s for s in M.states if (s, f.outcome) in inner)
        if isinstance(f, (Quant, QuantDiamond)):
            return self._quantifier(f)
        raise TypeError(f"not a formula: {f!r}")

    def _quantifier(self, f: Formula) -> frozenset:
        if self.quantifiers == "reduce":
            from .reduction import reduce
            return self.ext(reduce(f))
        if isinstance(f, Quant):
            return self.all - self.ext(QuantDiamond(Not(f.arg)))
        if self.quantifiers == "witness":
            from .synthesis import synthesize
            r = synthesize(f.arg, ml_conditions=False)  # raw guards keep this route free of reduce
            return self.ext(Update(r.model, r.point, f.arg))
        from .refinement import exists_refinement
        if not is_ml(f.arg):
            raise ValueError("refinement search needs a modal-logic body")
        return frozenset(s for s in self.model.states if exists_refinement(self.model, s, f.arg))

    def product(self, U: ArrowUpdateModel) -> KripkeModel:
        M = self.model
        states = [(s, o) for s in M.states for o in U.outcomes]
        rel = {a: set() for a in M.agents}
        for arrow in U.arrows:
            if arrow.agent not in rel:
                raise SignatureError(f"update uses agent {arrow.agent!r} not in the model")
            pre = self.ext(arrow.pre)
            post = self.ext(arrow.post)
            pairs = rel[arrow.agent]
            for s, t in M.relations[arrow.agent]:
                if s in pre and t in post:
                    pairs.add(((s, arrow.source), (t, arrow.target)))
        val = {p: [(s, o) for s in M.valuation[p] for o in U.outcomes] for p in M.atoms}
        return KripkeModel(states, rel, val, M.agents, M.atoms)

    def product_evaluator(self, U: ArrowUpdateModel) -> "Evaluator":
        sub = self.products.get(U)
        if sub is None:
            sub = Evaluator(self.product(U), self.quantifiers)
            self.products[U] = sub
        return sub


def extension(M: KripkeModel, f: Formula, quantifiers: str = "reduce") -> frozenset:
    """The set of states of ``M`` where ``f`` holds."""
    M.check_signature(f)
    return Evaluator(M, quantifiers).ext(f)


def mc(M: KripkeModel, s, f: Formula, quantifiers: str = "reduce") -> bool:
    """Does ``f`` hold at state ``s`` of ``M``?"""
    if s not in set(M.states):
        raise ValueError(f"unknown state {s!r}")
    return s in extension(M, f, quantifiers)


def holds_after_action(M: KripkeModel, s, E: ActionModel, e, f: Formula, quantifiers: str = "reduce") -> bool:
    """``[E,e]f`` at ``s``: if ``pre(e)`` holds then ``f`` holds at ``(s,e)``."""
    if not mc(M, s, E.pre[e], quantifiers):
        return True
    return mc(execute_action_model(M, E, quantifiers), (s, e), f, quantifiers)


# -- bounded enumeration ------------------------------------------------------

def model_bits(n: int, agents, atoms) -> int:
    return n * len(atoms) + len(agents) * n * n


def decode_model(n: int, agents, atoms, index: int) -> KripkeModel:
    """The model with ``n`` states ``s0..`` encoded by the bits of ``index``.

    Bit ``s*|atoms| + k`` says atom ``k`` holds at state ``s``; then for each
    agent in order, bit ``base + s*n + t`` says ``(s, t)`` is an edge.
    """
    agents = tuple(sorted(agents))
    atoms = tuple(sorted(atoms))
    states = [f"s{i}" for i in range(n)]
    val = {p: [states[s] for s in range(n) if index >> (s * len(atoms) + k) & 1] for k, p in enumerate(atoms)}
    base = n * len(atoms)
    rel = {}
    for ai, a in enumerate(agents):
        off = base + ai * n * n
        rel[a] = [(states[s], states[t]) for s in range(n) for t in range(n) if index >> (off + s * n + t) & 1]
    return KripkeModel(states, rel, val, agents, atoms)


def enumerate_models(max_states: int, agents: Iterable, atoms: Iterable, *,
                     min_states: int | None = None, cap: int = 4) -> Iterator[KripkeModel]:
    """Every Kripke model on ``min_states..max_states`` states over the signature.

    By default only models with exactly ``max_states`` states are produced:
    a pointed model with fewer states is bisimilar to one of these (add
    unreachable copies), so nothing bisimulation-invariant is missed.
    Models are produced in index order, without isomorphism reduction.
    """
    if max_states < 1:
        raise ValueError("max_states must be at least 1")
    if max_states > cap:
        raise ResourceCapError(f"max_states {max_states} exceeds the cap of {cap}")
    agents = tuple(sorted(agents))
    atoms = tuple(sorted(atoms))
    lo = max_states if min_states is None else max(1, min_states)
    for n in range(lo, max_states + 1):
        for index in range(1 << model_bits(n, agents, atoms)):
            yield decode_model(n, agents, atoms, index)


def frame_relations(n: int, frame: str = "k") -> list:
    """All binary relations on ``range(n)`` in a frame class ("k" or "kd45")."""
    pairs = [(s, t) for s in range(n) for t in range(n)]
    out = []
    for bits in iproduct((0, 1), repeat=len(pairs)):
        rel = frozenset(p for p, b in zip(pairs, bits) if b)
        if frame == "kd45":
            serial = all(any((s, t) in rel for t in range(n)) for s in range(n))
            trans = all((s, u) in rel for s, t in rel for t2, u in rel if t == t2)
            eucl = all((t, u) in rel for s, t in rel for s2, u in rel if s == s2)
            if not (serial and trans and eucl):
                continue
        elif frame != "k":
            raise ValueError(f"unknown frame class {frame!r}")
        out.append(rel)
    return out


def enumerate_frame_models(n: int, agents: Iterable, atoms: Iterable, frame: str) -> Iterator[KripkeModel]:
    """Models on ``n`` states whose relations all lie in a frame class."""
    agents = tuple(sorted(agents))
    atoms = tuple(sorted(atoms))
    states = [f"s{i}" for i in range(n)]
    rels = frame_relations(n, frame)
    for vbits in range(1 << (n * len(atoms))):
        val = {p: [states[s] for s in range(n) if vbits >> (s * len(atoms) + k) & 1] for k, p in enumerate(atoms)}
        for choice in iproduct(rels, repeat=len(agents)):
            rel = {a: [(states[s], states[t]) for s, t in r] for a, r in zip(agents, choice)}
            yield KripkeModel(states, rel, val, agents, atoms)
