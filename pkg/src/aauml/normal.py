"""Disjunctive negation normal form and light simplification."""

from __future__ import annotations

from itertools import product

from .syntax import (
    BOT, TOP, And, Atom, Bot, Box, Diamond, Formula, Not, Or, Quant,
    QuantDiamond, Top, Update, children, is_literal, rebuild,
)


def _ordered(items) -> tuple:
    unique = {}
    for x in items:
        unique.setdefault(x, None)
    return tuple(sorted(unique, key=lambda f: f.sort_key))


def _assemble(clauses: list) -> Formula:
    conjs = []
    for clause in clauses:
        items = _ordered(clause)
        conjs.append(items[0] if len(items) == 1 else And(items))
    conjs = _ordered(conjs)
    return conjs[0] if len(conjs) == 1 else Or(conjs)


_memo: dict = {}


def dnnf(f: Formula) -> Formula:
    """Equivalent formula in DNNF.

    Negations sit on atoms only, and at every modal depth the formula is a
    disjunction of conjunctions of literals and modal formulas.  Conjuncts
    and disjuncts are flattened, deduplicated and sorted, literals first.
    Nothing is dropped beyond duplicates, so modal depth is preserved.
    """
    return _inner(f, False)


def _inner(f: Formula, negated: bool) -> Formula:
    key = (f, negated)
    hit = _memo.get(key)
    if hit is None:
        hit = _assemble(_clauses(f, negated))
        if len(_memo) > 100_000:
            _memo.clear()
        _memo[key] = hit
    return hit


def _clauses(f: Formula, negated: bool) -> list:
    if isinstance(f, Atom):
        return [(Not(f),)] if negated else [(f,)]
    if isinstance(f, Top):
        return [(BOT,)] if negated else [(TOP,)]
    if isinstance(f, Bot):
        return [(TOP,)] if negated else [(BOT,)]
    if isinstance(f, Not):
        return _clauses(f.arg, not negated)
    if isinstance(f, (And, Or)):
        parts = [_clauses(x, negated) for x in f.args]
        if isinstance(f, And) != negated:
            return [sum(combo, ()) for combo in product(*parts)]
        return [c for part in parts for c in part]
    if isinstance(f, Box):
        return [(Diamond(f.agent, _inner(f.arg, True)),)] if negated else [(Box(f.agent, _inner(f.arg, False)),)]
    if isinstance(f, Diamond):
        return [(Box(f.agent, _inner(f.arg, True)),)] if negated else [(Diamond(f.agent, _inner(f.arg, False)),)]
    if isinstance(f, Update):
        model = f.model.map_conditions(dnnf)
        return [(Update(model, f.outcome, _inner(f.arg, negated)),)]
    if isinstance(f, Quant):
        return [(QuantDiamond(_inner(f.arg, True)),)] if negated else [(Quant(_inner(f.arg, False)),)]
    if isinstance(f, QuantDiamond):
        return [(Quant(_inner(f.arg, True)),)] if negated else [(QuantDiamond(_inner(f.arg, False)),)]
    raise TypeError(f"not a formula: {f!r}")


def is_dnnf(f: Formula) -> bool:
    """Check the DNNF shape, ignoring the order of conjuncts and disjuncts."""
    clauses = f.args if isinstance(f, Or) else (f,)
    return all(_is_clause(c) for c in clauses)


def _is_clause(f: Formula) -> bool:
    items = f.args if isinstance(f, And) else (f,)
    return all(_is_item(x) for x in items)


def _is_item(f: Formula) -> bool:
    if is_literal(f):
        return True
    if isinstance(f, (Box, Diamond, Quant, QuantDiamond)):
        return is_dnnf(f.arg)
    if isinstance(f, Update):
        return is_dnnf(f.arg) and all(is_dnnf(a.pre) and is_dnnf(a.post) for a in f.model.arrows)
    return False


def canonical(f: Formula) -> Formula:
    """Flatten nested conjunctions and disjunctions and sort them, nothing else."""
    if isinstance(f, Update):
        return Update(f.model.map_conditions(canonical), f.outcome, canonical(f.arg))
    kids = children(f)
    if not kids:
        return f
    kids = tuple(canonical(c) for c in kids)
    if isinstance(f, (And, Or)):
        flat = []
        for c in kids:
            flat.extend(c.args if type(c) is type(f) else (c,))
        items = _ordered(flat)
        return items[0] if len(items) == 1 else type(f)(items)
    return rebuild(f, kids)


_simp_memo: dict = {}


def simplify(f: Formula) -> Formula:
    """Absorb T and F, flatten, drop double negation and duplicates.

    Also rewrites ``[a]T``, ``<a>F``, ``[U,o]T``, ``[U,o]F`` and the
    quantifier analogues to constants.  The result is equivalent to ``f``.
    """
    hit = _simp_memo.get(f)
    if hit is not None:
        return hit
    out = _simplify(f)
    if len(_simp_memo) > 100_000:
        _simp_memo.clear()
    _simp_memo[f] = out
    _simp_memo[out] = out
    return out


def _simplify(f: Formula) -> Formula:
    if isinstance(f, (Atom, Top, Bot)):
        return f
    if isinstance(f, Not):
        x = simplify(f.arg)
        if isinstance(x, Top):
            return BOT
        if isinstance(x, Bot):
            return TOP
        if isinstance(x, Not):
            return x.arg
        return Not(x)
    if isinstance(f, (And, Or)):
        unit, zero = (Top, Bot) if isinstance(f, And) else (Bot, Top)
        flat = []
        for c in f.args:
            c = simplify(c)
            if isinstance(c, zero):
                return c
            if isinstance(c, unit):
                continue
            flat.extend(c.args if type(c) is type(f) else (c,))
        items = _ordered(flat)
        present = set(items)
        if any(isinstance(x, Not) and x.arg in present for x in items):
            return BOT if isinstance(f, And) else TOP
        if not items:
            return TOP if isinstance(f, And) else BOT
        return items[0] if len(items) == 1 else type(f)(items)
    if isinstance(f, Box):
        x = simplify(f.arg)
        return TOP if isinstance(x, Top) else Box(f.agent, x)
    if isinstance(f, Diamond):
        x = simplify(f.arg)
        return BOT if isinstance(x, Bot) else Diamond(f.agent, x)
    if isinstance(f, Update):
        x = simplify(f.arg)
        if isinstance(x, (Top, Bot)):
            return x
        return Update(f.model.map_conditions(simplify), f.outcome, x)
    if isinstance(f, (Quant, QuantDiamond)):
        x = simplify(f.arg)
        if isinstance(x, (Top, Bot)):
            return x
        return type(f)(x)
    raise TypeError(f"not a formula: {f!r}")


def complementary(x: Formula, y: Formula) -> bool:
    """Syntactic test that ``y`` is equivalent to the negation of ``x``."""
    if x == Not(y) or y == Not(x):
        return True
    return dnnf(simplify(Not(x))) == dnnf(simplify(y))

