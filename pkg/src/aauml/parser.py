"""Parser for the concrete formula syntax.

::

    form  := disj
    disj  := conj ('|' conj)*
    conj  := unary ('&' unary)*
    unary := '~' unary | '[' AGENT ']' unary | '<' AGENT '>' unary
           | '[' NAME '@' OUTCOME (',' OUTCOME)* ']' unary
           | '<' NAME '@' OUTCOME (',' OUTCOME)* '>' unary
           | '[*]' unary | '<*>' unary
           | '(' form (('->' | '<->') form)? ')' | ATOM | 'T' | 'F'
"""

from __future__ import annotations

import re
from typing import Mapping

from .syntax import (
    BOT, TOP, And, Atom, Box, Diamond, Formula, Not, Or, Quant, QuantDiamond,
    Update, agents as agents_of, atoms as atoms_of,
)


class ParseError(ValueError):
    def __init__(self, message: str, text: str = "", pos: int = 0):
        self.text = text
        self.pos = pos
        where = f" at column {pos + 1}" if text else ""
        super().__init__(f"{message}{where}")

    def pretty(self) -> str:
        if not self.text:
            return str(self)
        return f"{self}\n  {self.text}\n  {' ' * self.pos}^"


_TOKEN = re.compile(r"\s*(?:(<->|->|[()\[\]<>~&|@,*])|([A-Za-z0-9_][A-Za-z0-9_']*))")


def _tokenize(text: str) -> list:
    out = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        start = m.start(1) if m.group(1) else m.start(2)
        out.append((m.group(1) or m.group(2), start, bool(m.group(2))))
        pos = m.end()
    out.append(("<eof>", len(text), False))
    return out


class _Parser:
    def __init__(self, text: str, env: Mapping, desugar: bool):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.env = env
        self.desugar = desugar

    def peek(self, k: int = 0) -> str:
        return self.toks[min(self.i + k, len(self.toks) - 1)][0]

    def error(self, message: str):
        raise ParseError(message, self.text, self.toks[self.i][1])

    def take(self, expected: str | None = None) -> str:
        tok, _, _ = self.toks[self.i]
        if expected is not None and tok != expected:
            self.error(f"expected {expected!r}, found {tok!r}")
        self.i += 1
        return tok

    def ident(self, what: str) -> str:
        tok, _, is_ident = self.toks[self.i]
        if not is_ident:
            self.error(f"expected {what}, found {tok!r}")
        self.i += 1
        return tok

    def formula(self) -> Formula:
        f = self.disj()
        if self.peek() != "<eof>":
            self.error(f"unexpected {self.peek()!r}")
        return f

    def disj(self) -> Formula:
        items = [self.conj()]
        while self.peek() == "|":
            self.take()
            items.append(self.conj())
        if len(items) == 1:
            return items[0]
        return self.make_or(items)

    def conj(self) -> Formula:
        items = [self.unary()]
        while self.peek() == "&":
            self.take()
            items.append(self.unary())
        return items[0] if len(items) == 1 else And(tuple(items))

    def make_or(self, items) -> Formula:
        if self.desugar:
            return Not(And(tuple(Not(x) for x in items)))
        return Or(tuple(items))

    def make_dia(self, agent: str, f: Formula) -> Formula:
        return Not(Box(agent, Not(f))) if self.desugar else Diamond(agent, f)

    def implication(self, a: Formula, b: Formula) -> Formula:
        if self.desugar:
            return Not(And((a, Not(b))))
        return Or((Not(a), b))

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "~":
            self.take()
            return Not(self.unary())
        if tok == "(":
            self.take()
            a = self.disj()
            if self.peek() == "->":
                self.take()
                b = self.disj()
                a = self.implication(a, b)
            elif self.peek() == "<->":
                self.take()
                b = self.disj()
                a = And((self.implication(a, b), self.implication(b, a)))
            self.take(")")
            return a
        if tok in ("[", "<"):
            return self.modal()
        if tok == "T":
            self.take()
            return TOP
        if tok == "F":
            self.take()
            return BOT
        return Atom(self.ident("a formula"))

    def modal(self) -> Formula:
        opening = self.take()
        closing = "]" if opening == "[" else ">"
        if self.peek() == "*":
            self.take()
            self.take(closing)
            body = self.unary()
            if opening == "[":
                return Quant(body)
            return Not(Quant(Not(body))) if self.desugar else QuantDiamond(body)
        name = self.ident("an agent or update name")
        if self.peek() == "@":
            self.take()
            model = self.env.get(name)
            if model is None:
                self.error(f"unknown update model {name!r}")
            outcomes = [self.outcome(model)]
            while self.peek() == ",":
                self.take()
                outcomes.append(self.outcome(model))
            self.take(closing)
            body = self.unary()
            if opening == "[":
                parts = [Update(model, o, body) for o in outcomes]
                return parts[0] if len(parts) == 1 else And(tuple(parts))
            parts = [Update(model, o, Not(body)) for o in outcomes]
            return Not(parts[0] if len(parts) == 1 else And(tuple(parts)))
        self.take(closing)
        body = self.unary()
        return Box(name, body) if opening == "[" else self.make_dia(name, body)

    def outcome(self, model) -> str:
        o = self.ident("an outcome")
        if o not in model.outcome_set:
            self.i -= 1
            self.error(f"{o!r} is not an outcome of {model.label}")
        return o


def parse_formula(
    text: str,
    env: Mapping | None = None,
    *,
    desugar: bool = True,
    signature: tuple | None = None,
) -> Formula:
    """Parse ``text``.

    ``env`` maps update-model names to :class:`ArrowUpdateModel` values.
    With ``desugar`` (the default) disjunction, diamonds, implication and
    the dual quantifier are rewritten into the primitives; otherwise they
    are kept as ``Or``/``Diamond``/``QuantDiamond`` nodes.  ``signature``
    is an optional ``(agents, atoms)`` pair that every symbol must belong to.
    """
    f = _Parser(text, env or {}, desugar).formula()
    if signature is not None:
        ags, ats = signature
        bad_agents = agents_of(f) - set(ags)
        bad_atoms = atoms_of(f) - set(ats)
        if bad_agents or bad_atoms:
            raise ParseError(f"symbols outside the signature: {sorted(bad_agents | bad_atoms)}")
        if set(ags) & set(ats):
            raise ParseError("agents and atoms must be disjoint")
    return f
