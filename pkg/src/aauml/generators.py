"""Seeded random formulas, updates and reduction-axiom instances."""

from __future__ import annotations

import random

from .syntax import (
    BOT, TOP, And, Arrow, ArrowUpdateModel, Atom, Box, Diamond, Formula, Not,
    Or, Quant, QuantDiamond, Update, conj, implies, is_ml, modal_depth,
)

AGENTS = ("a", "b")
ATOMS = ("p", "q")


class Fuzzer:
    """Random formulas over a small signature.

    ``depth`` bounds the nesting of connectives; ``modal`` bounds the
    modal depth; ``quantifiers`` bounds the nesting of ``<*>``/``[*]``;
    ``updates`` allows arrow update modalities with fresh random models.
    """

    def __init__(self, seed: int = 0, agents=AGENTS, atoms=ATOMS):
        self.rng = random.Random(seed)
        self.agents = tuple(agents)
        self.atoms = tuple(atoms)

    def atom(self) -> Formula:
        r = self.rng.random()
        if r < 0.06:
            return TOP
        if r < 0.1:
            return BOT
        return Atom(self.rng.choice(self.atoms))

    def literal(self) -> Formula:
        a = Atom(self.rng.choice(self.atoms))
        return Not(a) if self.rng.random() < 0.4 else a

    def prop(self, depth: int = 2) -> Formula:
        return self.formula(depth, modal=0)

    def formula(self, depth: int = 3, modal: int = 2, quantifiers: int = 0,
                updates: bool = False) -> Formula:
        if depth <= 0:
            return self.atom()
        rng = self.rng
        kinds = ["atom", "not", "and", "or"]
        if modal > 0:
            kinds += ["box", "dia", "box", "dia"]
        if quantifiers > 0:
            kinds += ["quant"]
        if updates:
            kinds += ["upd"]
        k = rng.choice(kinds)
        sub = lambda d=depth - 1, m=modal, q=quantifiers: self.formula(d, m, q, updates)
        if k == "atom":
            return self.atom()
        if k == "not":
            return Not(sub())
        if k in ("and", "or"):
            parts = (sub(), sub())
            return And(parts) if k == "and" else Or(parts)
        if k in ("box", "dia"):
            cls = Box if k == "box" else Diamond
            return cls(rng.choice(self.agents), sub(m=modal - 1))
        if k == "quant":
            body = self.formula(depth - 1, modal, 0, False)
            return QuantDiamond(body) if rng.random() < 0.6 else Quant(body)
        U = self.update()
        return Update(U, rng.choice(U.outcomes), sub())

    def ml(self, depth: int = 3, modal: int = 2) -> Formula:
        return self.formula(depth, modal)

    def condition(self) -> Formula:
        r = self.rng.random()
        if r < 0.35:
            return TOP
        if r < 0.7:
            return self.literal()
        return self.formula(2, 1)

    def update(self, max_outcomes: int = 2, max_arrows: int = 4) -> ArrowUpdateModel:
        rng = self.rng
        outs = [f"o{i}" for i in range(rng.randint(1, max_outcomes))]
        arrows = []
        for _ in range(rng.randint(0, max_arrows)):
            arrows.append(Arrow(rng.choice(self.agents), rng.choice(outs), self.condition(),
                                rng.choice(outs), self.condition()))
        return ArrowUpdateModel(tuple(outs), tuple(arrows))

    def goal(self, modal: int = 3) -> Formula:
        """A modal formula with at least one diamond, for synthesis corpora."""
        while True:
            f = self.formula(4, modal)
            if 1 <= modal_depth(f) <= modal and _has_diamond(f):
                return f


def _has_diamond(f: Formula) -> bool:
    from .normal import dnnf
    from .syntax import subformulas
    return any(isinstance(g, Diamond) for g in subformulas(dnnf(f)))


# -- reduction axiom instances ----------------------------------------------------

def u4_right(U: ArrowUpdateModel, o: str, agent: str, body: Formula) -> Formula:
    """``/\\ (pre -> [a](post -> [U,o']body))`` over the ``agent`` arrows leaving ``o``."""
    parts = [implies(arr.pre, Box(agent, implies(arr.post, Update(U, arr.target, body))))
             for arr in U.arrows_from(o, agent)]
    return conj(*parts)


def axiom_instances(name: str, count: int = 20, seed: int = 0, agents=AGENTS, atoms=ATOMS) -> list:
    """``count`` pairs ``(left, right)`` instantiating one reduction axiom.

    The right-hand sides are built from the axiom schemas here, not by
    the rewriting module, so the pairs can test it.
    """
    fz = Fuzzer(seed * 1009 + sum(map(ord, name)), agents, atoms)
    rng = fz.rng
    out = []
    while len(out) < count:
        if name.startswith("U"):
            U = fz.update(max_outcomes=3, max_arrows=5)
            o = rng.choice(U.outcomes)
            if name == "U1":
                x = fz.atom() if rng.random() < 0.3 else Atom(rng.choice(atoms))
                out.append((Update(U, o, x), x))
            elif name == "U2":
                x = fz.formula(3, 2)
                out.append((Update(U, o, Not(x)), Not(Update(U, o, x))))
            elif name == "U3":
                x, y = fz.formula(3, 2), fz.formula(3, 2)
                out.append((Update(U, o, And((x, y))), And((Update(U, o, x), Update(U, o, y)))))
            elif name == "U4":
                a = rng.choice(agents)
                x = fz.formula(2, 1)
                out.append((Update(U, o, Box(a, x)), u4_right(U, o, a, x)))
            else:
                raise ValueError(f"unknown axiom {name!r}")
        elif name == "A1":
            x = fz.prop(3)
            out.append((QuantDiamond(x), x))
        elif name == "A2":
            x, y = fz.ml(3, 2), fz.ml(3, 2)
            out.append((QuantDiamond(Or((x, y))), Or((QuantDiamond(x), QuantDiamond(y)))))
        elif name == "A3":
            x0, y = fz.prop(2), fz.ml(3, 2)
            out.append((QuantDiamond(And((x0, y))), And((x0, QuantDiamond(y)))))
        elif name == "A4":
            out.append(_a4_instance(fz, agents))
        else:
            raise ValueError(f"unknown axiom {name!r}")
    return out


def _a4_instance(fz: Fuzzer, agents) -> tuple:
    rng = fz.rng
    left, right = [], []
    for a in agents:
        psi = fz.ml(2, 1) if rng.random() < 0.7 else TOP
        phis = [fz.ml(2, 1) for _ in range(rng.randint(0, 2))]
        left.extend(Diamond(a, x) for x in phis)
        left.append(Box(a, psi))
        right.extend(Diamond(a, QuantDiamond(And((x, psi)))) for x in phis)
    return QuantDiamond(conj(*left)), conj(*right)


AXIOMS = ("U1", "U2", "U3", "U4", "A1", "A2", "A3", "A4")


def corpus(size: int = 200, seed: int = 0, modal: int = 3) -> list:
    """Fuzzed formulas with at least one update or quantifier.

    Quantifiers are not nested and every formula has modal depth at most
    ``modal``.
    """
    fz = Fuzzer(seed)
    out = []
    while len(out) < size:
        f = fz.formula(5, modal, quantifiers=1, updates=fz.rng.random() < 0.6)
        if modal_depth(f) <= modal and not is_ml(f):
            out.append(f)
    return out


def goal_corpus(size: int = 30, seed: int = 0, modal: int = 3) -> list:
    fz = Fuzzer(seed)
    return [fz.goal(modal) for _ in range(size)]
