from pathlib import Path

import pytest
import yaml

from aauml.documents import (
    DocumentError, Workspace, action_doc, dump, formula_doc, kripke_doc, to_dot, update_doc,
)
from aauml.equivalence import update_equivalent_bounded
from aauml.scenarios import (
    anne_private_action, anne_reads_update, intro_model, pal_gap_model,
)
from aauml.syntax import TOP, Arrow, ArrowUpdateModel, Atom, Box, PointedUpdate, Update

WORKSPACE = Path(__file__).resolve().parents[1] / "workspace"


def load_text(text):
    ws = Workspace()
    ws.add_text(text)
    return ws


def test_kripke_round_trip():
    for M in (intro_model(), pal_gap_model()):
        ws = load_text(dump(kripke_doc(M, "m")))
        assert ws.models["m"] == M


def test_update_round_trip():
    X = anne_reads_update()
    ws = load_text(dump(update_doc(X.model, X.points, "reads")))
    Y = ws.updates["reads"]
    assert Y.points == X.points
    assert set(Y.model.arrows) == set(X.model.arrows)


def test_action_round_trip():
    X = anne_private_action()
    ws = load_text(dump(action_doc(X.model, X.points, "priv")))
    assert ws.actions["priv"].model.relations == X.model.relations
    assert ws.actions["priv"].model.pre == X.model.pre


def test_nested_updates_are_written_first():
    inner = ArrowUpdateModel(("o",), (Arrow("a", "o", TOP, "o", Atom("p")),), "inner")
    outer = ArrowUpdateModel(("o",), (Arrow("b", "o", Update(inner, "o", Box("a", Atom("p"))), "o", TOP),), "outer")
    docs = update_doc(outer, None, "outer")
    assert [d["name"] for d in docs] == ["inner", "outer"]
    ws = load_text(dump(docs))
    got = ws.updates["outer"]
    assert got.model.arrows[0].pre == Update(inner, "o", Box("a", Atom("p")))
    assert update_equivalent_bounded(got, PointedUpdate(outer, ("o",))).equivalent


def test_formula_document():
    f = Update(anne_reads_update().model, "c", Box("a", Atom("p")))
    ws = load_text(dump(formula_doc(f, "claim")))
    assert ws.formulas["claim"] == f


def test_dump_header_and_dot():
    text = dump(kripke_doc(intro_model()), ["seed: 0"])
    assert text.startswith("# seed: 0\n---\n")
    dot = to_dot(intro_model(), ["p"], "intro")
    assert dot.startswith('digraph "intro"') and "doublecircle" in dot


def test_shipped_workspace_loads():
    ws = Workspace.load(WORKSPACE)
    assert {"intro", "announced", "pal_gap", "chain3", "loop"} <= set(ws.models)
    assert {"announce", "reads", "private"} <= set(ws.updates)
    assert "reads_split" in ws.actions
    assert "worked_goal" in ws.formulas


def test_file_documents_override_builtins(tmp_path):
    (tmp_path / "m.yaml").write_text(dump(kripke_doc(pal_gap_model(), "intro")))
    ws = Workspace.load(tmp_path)
    assert ws.models["intro"] == pal_gap_model()


def test_references_resolve_in_any_order():
    ws = load_text("""
kind: arrow-update
name: second
outcomes: [o]
arrows: [[a, o, "[first@o]p", o, T]]
---
kind: arrow-update
name: first
outcomes: [o]
arrows: [[b, o, T, o, p]]
""")
    assert set(ws.updates) == {"first", "second"}


@pytest.mark.parametrize("text, message", [
    ("kind: kripke\nname: m\nstates: [s]\n---\nkind: kripke\nname: m\nstates: [t]\n", "duplicate"),
    ("kind: arrow-update\nname: x\noutcomes: [o]\narrows: [[a, o, '[y@o]p', o, T]]\n---\n"
     "kind: arrow-update\nname: y\noutcomes: [o]\narrows: [[a, o, '[x@o]p', o, T]]\n", "circular"),
    ("kind: arrow-update\nname: x\noutcomes: [o]\narrows: [[a, o, T, o]]\n", "arrows are"),
    ("kind: nonsense\nname: x\n", "kind"),
    ("kind: kripke\nstates: [s]\n", "name"),
    ("kind: formula\nname: f\ntext: '[a'\n", "f"),
])
def test_document_errors(text, message):
    with pytest.raises((DocumentError, ValueError), match=message):
        load_text(text)


def test_lookup_errors():
    ws = Workspace.builtin()
    with pytest.raises(KeyError):
        ws.lookup_model("nope")
    with pytest.raises(KeyError):
        ws.lookup_update("nope")


def test_yaml_is_plain_data():
    docs = list(yaml.safe_load_all(dump(update_doc(anne_reads_update().model, ("c",), "reads"))))
    assert docs[-1]["arrows"][0] == ["a", "c", "p", "c", "p"]
