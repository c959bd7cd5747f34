import pytest
from hypothesis import given

from aauml.conversion import (
    action_to_arrow, arrow_to_action, attentive_update, condition_set, default_agents,
    lying_action_model, lying_points, pointed_action_to_arrow, pointed_arrow_to_action,
    sceptical_update,
)
from aauml.equivalence import bisimilar, update_equivalent_bounded
from aauml.kripke import (
    PointedAction, ResourceCapError, enumerate_models, execute_action_model, execute_arrow_update,
)
from aauml.parser import parse_formula
from aauml.scenarios import (
    anne_reads_action_pruned, anne_reads_update, announcement_action, announcement_update,
    fixture_actions, fixture_updates,
)
from aauml.syntax import TOP, And, Arrow, ArrowUpdateModel, Atom, Not, PointedUpdate

from conftest import update_models

p = Atom("p")


# -- arrow updates to action models ---------------------------------------------------

@pytest.mark.parametrize("name", sorted(fixture_updates()))
def test_action_count_law(name):
    U = fixture_updates()[name].model
    E, _ = arrow_to_action(U)
    assert len(E.actions) == len(U.outcomes) * 2 ** len(condition_set(U))


@given(update_models())
def test_action_count_law_on_random_updates(U):
    E, fibre = arrow_to_action(U)
    assert len(E.actions) == len(U.outcomes) * 2 ** len(condition_set(U))
    assert len(fibre) == len(E.actions)


def test_single_arrow_translation_by_hand():
    U = ArrowUpdateModel(("o",), (Arrow("a", "o", p, "o", TOP),))
    E, fibre = arrow_to_action(U)
    assert condition_set(U) == (TOP, p)
    assert E.actions == ("o:00", "o:01", "o:10", "o:11")
    # the arrow needs p (second bit) at the source and T (first bit) at the target
    assert set(E.edges("a")) == {(s, t) for s in ("o:01", "o:11") for t in ("o:10", "o:11")}
    assert E.pre["o:11"] == And((TOP, p))
    assert E.pre["o:00"] == And((Not(TOP), Not(p)))
    assert set(fibre) == set(E.actions)


def test_fibre_follows_the_points():
    X = anne_reads_update()
    E, fibre = arrow_to_action(X.model, X.points)
    assert len(E.actions) == 16 and len(fibre) == 8
    assert all(e.startswith("c:") for e in fibre)


def test_prune_drops_unrealisable_valuations():
    X = anne_reads_update()
    E, fibre = arrow_to_action(X.model, X.points, prune=True)
    assert len(E.actions) == 4
    assert update_equivalent_bounded(X, pointed_arrow_to_action(X, prune=True),
                                     max_states=2).kind == "equivalent"


def test_condition_cap():
    U = ArrowUpdateModel(("o",), tuple(Arrow("a", "o", Atom(f"x{i}"), "o", TOP) for i in range(4)))
    with pytest.raises(ResourceCapError):
        arrow_to_action(U, cap=3)


# -- action models to arrow updates ---------------------------------------------------

@pytest.mark.parametrize("name", sorted(fixture_actions()))
def test_arrow_form_keeps_edges(name):
    E = fixture_actions()[name].model
    U = action_to_arrow(E)
    assert len(U.arrows) == len(E.relations)
    assert set(U.outcomes) == set(E.actions)
    for arr in U.arrows:
        assert (arr.pre, arr.post) == (E.pre[arr.source], E.pre[arr.target])


# -- bounded update equivalence -------------------------------------------------------

@pytest.mark.parametrize("name", sorted(fixture_actions()))
def test_action_is_conditionally_equivalent_to_its_arrow_form(name):
    X = fixture_actions()[name]
    v = update_equivalent_bounded(X, pointed_action_to_arrow(X), max_states=2)
    assert v.kind == "conditional"
    assert v.counterexample is not None


@pytest.mark.parametrize("name", sorted(fixture_updates()))
def test_arrow_update_is_equivalent_to_its_action_form(name):
    X = fixture_updates()[name]
    assert update_equivalent_bounded(X, pointed_arrow_to_action(X), max_states=2).kind == "equivalent"


def test_hand_pruned_action_model_matches_reads_update():
    v = update_equivalent_bounded(anne_reads_action_pruned(), anne_reads_update(), max_states=2)
    assert v.kind == "equivalent"


def test_announcement_action_only_where_executable():
    v = update_equivalent_bounded(announcement_action(), announcement_update(), max_states=2)
    assert v.kind == "conditional"


# -- scenarios ---------------------------------------------------------------------

def test_default_agents():
    assert default_agents(3) == ("a", "b", "c")
    assert default_agents(27)[0] == "a1"
    with pytest.raises(ValueError):
        default_agents(0)


def test_sceptical_and_manipulative_shapes():
    s = sceptical_update(("a", "b"), p)
    assert s.model.outcomes == ("o",) and len(s.model.arrows) == 4
    m = sceptical_update(("a", "b"), p, manipulative=True)
    assert m.model.arrows == (Arrow("a", "o", TOP, "o", p), Arrow("b", "o", TOP, "o", p))


def test_attentive_shape_and_errors():
    X = attentive_update(("a", "b"), p)
    assert X.points == ("o", "o'") and len(X.model.arrows) == 6
    assert Arrow("a", "o", Atom("h_a"), "o", p) in X.model.arrows
    with pytest.raises(ValueError):
        attentive_update(("a",), Atom("h_a"))
    with pytest.raises(ValueError):
        attentive_update(("a", "b"), p, {"a": "h"})


@pytest.mark.parametrize("n", range(1, 7))
def test_lying_growth(n):
    E = lying_action_model(n, p)
    assert len(E.actions) == 2 ** (n + 1)
    assert len(sceptical_update(default_agents(n), p).model.arrows) == 2 * n


def test_lying_errors():
    with pytest.raises(ValueError):
        lying_action_model(2, p, pattern="other")
    with pytest.raises(ValueError):
        lying_action_model(2, p, agents=("a",))


# Edges of the two-agent lying figure.  D is <x>phi and B is [x]~phi for
# agents a then b; _t and _f say whether phi holds.  The figure is drawn up
# to transitive closure.
A_DRAWN = [
    ("BD_f", "BB_f"), ("BB_f", "BD_f"), ("BD_f", "DD_f"), ("BB_f", "DB_f"),
    ("BD_f", "BD_f"), ("BB_f", "BB_f"),
    ("BD_t", "BB_t"), ("BB_t", "BD_t"), ("DD_t", "DB_t"), ("DB_t", "DD_t"),
    ("BD_t", "DD_t"), ("BB_t", "DB_t"),
    ("BD_t", "BD_t"), ("BB_t", "BB_t"), ("DD_t", "DD_t"), ("DB_t", "DB_t"),
    ("BD_t", "BD_f"), ("BD_f", "BD_t"), ("DD_f", "DD_t"),
    ("BB_t", "BB_f"), ("BB_f", "BB_t"), ("DB_f", "DB_t"),
]
B_DRAWN = [
    ("BB_f", "BD_f"), ("DB_f", "DD_f"), ("BB_f", "DB_f"), ("DB_f", "BB_f"),
    ("BB_f", "BB_f"), ("DB_f", "DB_f"),
    ("BB_t", "BD_t"), ("DB_t", "DD_t"), ("BD_t", "DD_t"), ("DD_t", "BD_t"),
    ("BB_t", "DB_t"), ("DB_t", "BB_t"),
    ("BD_t", "BD_t"), ("BB_t", "BB_t"), ("DD_t", "DD_t"), ("DB_t", "DB_t"),
    ("BD_f", "BD_t"), ("DD_f", "DD_t"),
    ("BB_t", "BB_f"), ("BB_f", "BB_t"), ("DB_t", "DB_f"), ("DB_f", "DB_t"),
]


def _closure(edges):
    rel = set(edges)
    while True:
        extra = {(x, z) for x, y in rel for y2, z in rel if y == y2} - rel
        if not extra:
            return rel
        rel |= extra


def test_lying_figure_pattern_is_the_closed_drawing():
    E = lying_action_model(2, p)
    assert len(E.actions) == 8
    assert set(E.edges("a")) == _closure(A_DRAWN)
    assert set(E.edges("b")) == _closure(B_DRAWN)


def test_lying_preconditions():
    E = lying_action_model(2, p)
    assert E.pre["DB_f"] == parse_formula("<a>p & [b]~p & ~p", desugar=False)
    assert lying_points(E) == ("BB_f", "BD_f", "DB_f", "DD_f")
    assert len(lying_points(E, "all")) == 8


def test_lying_against_sceptical_update():
    S = sceptical_update(("a", "b"), p)
    E = lying_action_model(2, p)
    lie = PointedAction(E, lying_points(E))
    everything = PointedAction(E, E.actions)
    assert update_equivalent_bounded(lie, S, max_states=2, frame="kd45").kind == "conditional"
    assert update_equivalent_bounded(everything, S, max_states=2, frame="kd45").kind == "equivalent"
    assert update_equivalent_bounded(lie, S, max_states=2).kind == "inequivalent"
    G = lying_action_model(2, p, pattern="general")
    assert update_equivalent_bounded(PointedAction(G, lying_points(G)), S, max_states=2).kind == "conditional"


def test_single_pointed_conversion_round_trip_shapes():
    X = PointedUpdate(ArrowUpdateModel(("o",), (Arrow("a", "o", p, "o", TOP),)), ("o",))
    A = pointed_arrow_to_action(X)
    assert len(A.points) == 4
    back = pointed_action_to_arrow(A)
    assert len(back.model.outcomes) == 4


def test_one_agent_lying_model():
    E = lying_action_model(1, p)
    assert E.actions == ("B_f", "B_t", "D_f", "D_t")
    S = sceptical_update(("a",), p)
    v = update_equivalent_bounded(PointedAction(E, lying_points(E)), S, max_states=3, frame="kd45")
    assert v.kind == "conditional"


def test_attention_everywhere_acts_as_manipulative_update():
    att = attentive_update(("a",), p).model
    man = sceptical_update(("a",), p, manipulative=True).model
    for M in enumerate_models(2, ("a",), ("h_a", "p")):
        if M.valuation["h_a"] != frozenset(M.states):
            continue
        A, B = execute_arrow_update(M, att), execute_arrow_update(M, man)
        for s in M.states:
            assert bisimilar(A, (s, "o"), B, (s, "o"))


@pytest.mark.parametrize("name", ["announce_action", "private_action"])
def test_action_product_is_bisimilar_to_arrow_product_where_executable(name):
    E = fixture_actions()[name].model
    U = action_to_arrow(E)
    for M in enumerate_models(2, ("a", "b"), ("p",)):
        A, B = execute_action_model(M, E), execute_arrow_update(M, U)
        for s in M.states:
            for e in E.actions:
                if (s, e) in set(A.states):
                    assert bisimilar(A, (s, e), B, (s, e))
