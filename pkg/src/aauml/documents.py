"""YAML documents for models, updates and formulas, and a workspace that loads them.

Each document has a ``kind`` and a ``name``::

    kind: kripke
    name: intro
    agents: [a, b]
    atoms: [p]
    states: [np, p]
    relations: {a: [[np, np], [np, p]], b: []}
    valuation: {p: [p]}

    kind: arrow-update
    name: private
    outcomes: [c, n]
    points: [c]
    arrows:
      - [a, c, T, c, p]       # agent, source, source condition, target, target condition

    kind: action-model
    name: private_action
    actions: [p, top]
    points: [p]
    relations: {a: [[p, p]], b: [[p, top]]}
    preconditions: {p: p, top: T}

    kind: formula
    name: goal
    text: <a>[b]p

Conditions, preconditions and formula texts use the formula syntax and may
refer to arrow updates by name, e.g. ``[private@c]p``.
"""

from __future__ import annotations

from pathlib import Path

import yaml

from .kripke import ActionModel, KripkeModel, PointedAction, state_label
from .parser import ParseError, parse_formula
from .syntax import (
    Arrow, ArrowUpdateModel, Formula, PointedUpdate, to_text, update_models,
)

KINDS = ("kripke", "arrow-update", "action-model", "formula")


class DocumentError(ValueError):
    pass


# -- writing ----------------------------------------------------------------------

def kripke_doc(M: KripkeModel, name: str = "model") -> dict:
    key = lambda s: state_label(s)
    states = [key(s) for s in M.states]
    return {
        "kind": "kripke",
        "name": name,
        "agents": list(M.agents),
        "atoms": list(M.atoms),
        "states": states,
        "relations": {a: sorted([key(s), key(t)] for s, t in M.relations[a]) for a in M.agents},
        "valuation": {p: sorted(key(s) for s in M.valuation[p]) for p in M.atoms},
    }


def _nested_update_docs(conditions, seen: dict) -> list:
    """Documents for update models mentioned inside conditions, innermost first."""
    out = []
    for c in conditions:
        for label, U in update_models(c).items():
            if label in seen:
                continue
            seen[label] = U
            out.extend(_nested_update_docs(U.conditions(), seen))
            out.append(update_doc(U, None, label, nested=False))
    return out


def update_doc(U: ArrowUpdateModel, points=None, name: str | None = None, nested: bool = True):
    """The document for ``U``; with ``nested`` a list that first defines every
    update model referred to in its conditions."""
    body = {
        "kind": "arrow-update",
        "name": name or U.label,
        "outcomes": list(U.outcomes),
        "points": sorted(points if points is not None else U.outcomes),
        "arrows": [[a.agent, a.source, to_text(a.pre), a.target, to_text(a.post)] for a in U.arrows],
    }
    if not nested:
        return body
    return _nested_update_docs(U.conditions(), {}) + [body]


def action_doc(E: ActionModel, points=None, name: str | None = None) -> list:
    body = {
        "kind": "action-model",
        "name": name or E.name or "action",
        "actions": list(E.actions),
        "points": sorted(points if points is not None else E.actions),
        "relations": {a: [[e, f] for e, f in E.edges(a)] for a in E.agents},
        "preconditions": {e: to_text(E.pre[e]) for e in E.actions},
    }
    return _nested_update_docs(list(E.pre.values()), {}) + [body]


def formula_doc(f: Formula, name: str = "formula") -> list:
    return _nested_update_docs([f], {}) + [{"kind": "formula", "name": name, "text": to_text(f)}]


def dump(docs, header: list | None = None) -> str:
    """YAML text for one document or a list of them, with optional comment lines first."""
    if isinstance(docs, dict):
        docs = [docs]
    text = yaml.safe_dump_all(docs, sort_keys=False, default_flow_style=None, width=100,
                              explicit_start=True)
    lines = [f"# {h}" for h in header or ()]
    return "\n".join(lines + [text.rstrip()]) + "\n"


def to_dot(M: KripkeModel, points=(), name: str = "model") -> str:
    """Graphviz text for a Kripke model; points are drawn with a double border."""
    ids = {s: f"n{i}" for i, s in enumerate(M.states)}
    lines = [f'digraph "{name}" {{']
    pts = set(points)
    for s in M.states:
        label = state_label(s)
        true = ",".join(sorted(M.true_atoms(s)))
        shape = "doublecircle" if s in pts else "circle"
        lines.append(f'  {ids[s]} [label="{label}\\n{true}", shape={shape}];')
    edges: dict = {}
    for a in M.agents:
        for s, t in M.relations[a]:
            edges.setdefault((s, t), []).append(a)
    for (s, t), ags in sorted(edges.items(), key=lambda kv: (state_label(kv[0][0]), state_label(kv[0][1]))):
        lines.append(f'  {ids[s]} -> {ids[t]} [label="{"".join(sorted(ags))}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- reading ----------------------------------------------------------------------

class Workspace:
    """Named Kripke models, pointed updates, pointed action models and formulas."""

    def __init__(self):
        self.models: dict = {}
        self.updates: dict = {}
        self.actions: dict = {}
        self.formulas: dict = {}

    # names of arrow updates double as update references inside formulas
    @property
    def env(self) -> dict:
        return {n: pu.model for n, pu in self.updates.items()}

    def parse(self, text: str, desugar: bool = True) -> Formula:
        return parse_formula(text, self.env, desugar=desugar)

    @classmethod
    def builtin(cls) -> "Workspace":
        from . import scenarios
        ws = cls()
        for n, M in scenarios.fixture_models().items():
            ws.models[n] = M
        for n, pu in scenarios.fixture_updates().items():
            ws.updates[n] = PointedUpdate(pu.model.renamed(n), pu.points)
        for n, pa in scenarios.fixture_actions().items():
            ws.actions[n] = pa
        return ws

    @classmethod
    def load(cls, directory, builtin: bool = True) -> "Workspace":
        ws = cls.builtin() if builtin else cls()
        paths = sorted(Path(directory).glob("*.y*ml"))
        docs = []
        for path in paths:
            with open(path) as fh:
                try:
                    docs.extend((str(path), d) for d in yaml.safe_load_all(fh) if d is not None)
                except yaml.YAMLError as e:
                    raise DocumentError(f"{path}: {e}") from e
        ws.add_documents(docs)
        return ws

    def add_text(self, text: str, source: str = "<text>"):
        self.add_documents([(source, d) for d in yaml.safe_load_all(text) if d is not None])

    def add_documents(self, docs: list):
        """Add documents, resolving references between arrow updates in any order."""
        seen: dict = {}
        for src, d in docs:
            if not isinstance(d, dict) or d.get("kind") not in KINDS:
                raise DocumentError(f"{src}: document needs a kind among {', '.join(KINDS)}")
            if "name" not in d:
                raise DocumentError(f"{src}: document needs a name")
            key = (d["kind"], str(d["name"]))
            if key in seen:
                raise DocumentError(f"{src}: duplicate {key[0]} named {key[1]!r} (also in {seen[key]})")
            seen[key] = src
        updates = [(s, d) for s, d in docs if d["kind"] == "arrow-update"]
        while updates:
            progress = []
            for s, d in updates:
                try:
                    self._add_update(d)
                    progress.append((s, d))
                except ParseError as e:
                    if "unknown update" not in str(e):
                        raise DocumentError(f"{s}: {e}") from e
            if not progress:
                names = ", ".join(str(d["name"]) for _, d in updates)
                raise DocumentError(f"unresolvable or circular update references among: {names}")
            updates = [u for u in updates if u not in progress]
        for s, d in docs:
            try:
                if d["kind"] == "kripke":
                    self.models[str(d["name"])] = _read_kripke(d)
                elif d["kind"] == "action-model":
                    self.actions[str(d["name"])] = self._read_action(d)
                elif d["kind"] == "formula":
                    self.formulas[str(d["name"])] = self.parse(str(d["text"]), desugar=False)
            except (KeyError, TypeError, ValueError) as e:
                raise DocumentError(f"{s}: {d.get('name')}: {e}") from e

    def _add_update(self, d: dict):
        name = str(d["name"])
        try:
            outcomes = [str(o) for o in d["outcomes"]]
            arrows = []
            for entry in d.get("arrows") or []:
                if len(entry) != 5:
                    raise DocumentError(f"{name}: arrows are [agent, source, condition, target, condition]")
                a, src, pre, tgt, post = entry
                arrows.append(Arrow(str(a), str(src), self.parse(str(pre)), str(tgt), self.parse(str(post))))
            U = ArrowUpdateModel(tuple(outcomes), tuple(arrows), name)
            points = [str(p) for p in d.get("points") or outcomes]
            self.updates[name] = PointedUpdate(U, tuple(points))
        except (KeyError, TypeError) as e:
            raise DocumentError(f"{name}: malformed arrow-update document ({e})") from e

    def _read_action(self, d: dict) -> PointedAction:
        acts = [str(e) for e in d["actions"]]
        rel = {str(a): [(str(e), str(f)) for e, f in pairs] for a, pairs in (d.get("relations") or {}).items()}
        pre = {str(e): self.parse(str(t)) for e, t in (d.get("preconditions") or {}).items()}
        for e in acts:
            pre.setdefault(e, parse_formula("T"))
        E = ActionModel.build(rel, pre, str(d["name"]))
        if set(E.actions) != set(acts):
            raise DocumentError("preconditions mention undeclared actions")
        return PointedAction(E, tuple(str(p) for p in d.get("points") or acts))

    def lookup_update(self, name: str):
        """A pointed arrow update or pointed action model by name."""
        if name in self.updates:
            return self.updates[name]
        if name in self.actions:
            return self.actions[name]
        raise KeyError(f"no arrow update or action model named {name!r}")

    def lookup_model(self, name: str) -> KripkeModel:
        if name not in self.models:
            raise KeyError(f"no Kripke model named {name!r}")
        return self.models[name]

    def formula(self, text: str, desugar: bool = False) -> Formula:
        """A formula given as text, or by the name of a formula document.

        Text is parsed keeping disjunctions and diamonds by default, so that
        results print close to what was typed.
        """
        if text in self.formulas:
            return self.formulas[text]
        return self.parse(text, desugar)


def _read_kripke(d: dict) -> KripkeModel:
    states = [str(s) for s in d["states"]]
    rel = {str(a): [(str(s), str(t)) for s, t in pairs] for a, pairs in (d.get("relations") or {}).items()}
    val = {str(p): [str(s) for s in ss] for p, ss in (d.get("valuation") or {}).items()}
    agents = [str(a) for a in d.get("agents", rel)]
    atoms = [str(p) for p in d.get("atoms", val)]
    return KripkeModel(states, rel, val, agents, atoms)
