import pytest
from hypothesis import given, settings

from aauml.equivalence import bisimilar, isomorphic_updates, update_equivalent_bounded
from aauml.kripke import KripkeModel, execute_arrow_update, mc
from aauml.normal import simplify
from aauml.parser import parse_formula
from aauml.reduction import reduce
from aauml.syntax import (
    BOT, TOP, And, Arrow, ArrowUpdateModel, Atom, Not, PointedUpdate, QuantDiamond, Update,
    is_ml, modal_depth,
)
from aauml.synthesis import (
    combine_conjunction, combine_disjunction, optimize, synthesize, trivial_update, update_depth,
)

from conftest import ml_formulas
from helpers import equivalent_on

p, q = Atom("p"), Atom("q")
WORKED = "<a>[b]p & <b>(<a>q | <a>r) & [b]p"


def P(text):
    return parse_formula(text, desugar=False)


def sound(goal, r, max_states=2):
    """``reduce(<*>goal)`` and ``<U,o>goal`` agree on all small models."""
    from aauml.batch import signature_of
    ags, ats = signature_of(goal)
    return equivalent_on(reduce(QuantDiamond(goal)), Update(r.model, r.point, goal),
                         max_states=max_states, agents=tuple(sorted(set(ags) | {"a", "b"})),
                         atoms=tuple(sorted(set(ats) | {"p", "q"})))


# -- building blocks -------------------------------------------------------------

def test_trivial_update():
    t = trivial_update(("a",))
    assert t.model.outcomes == ("o",) and t.model.arrows == () and t.points == ("o",)


def test_goal_without_diamonds_gets_trivial_update():
    r = synthesize(P("p & [a]q"))
    assert len(r.model.outcomes) == 1 and not r.model.arrows
    assert r.derivation.rule == "trivial"


def test_box_false_removes_all_successors():
    r = synthesize(P("[a]F"))
    M = KripkeModel(("s", "t"), {"a": [("s", "t"), ("t", "s")]}, {})
    prod = execute_arrow_update(M, r.model)
    assert not [e for e in prod.relations["a"] if e[0] == ("s", r.point)]
    assert reduce(QuantDiamond(P("[a]F"))) == TOP


def test_single_diamond_panel():
    r = synthesize(P("<a>q & p"), ml_conditions=False)
    (root_arrow,) = r.model.arrows_from(r.point)
    assert (root_arrow.agent, root_arrow.pre) == ("a", TOP)
    sub = root_arrow.post
    assert isinstance(sub, Update) and sub.arg == TOP
    assert sub.model.arrows == ()
    assert synthesize(P("<a>q & p")).model.arrows[0].post == TOP


def test_combine_conjunction_from_parts():
    goal = P("<a>q & [a]T & p")
    part = synthesize(P("q & T"))
    r = combine_conjunction(goal, [part], ml_conditions=False)
    assert len(r.model.outcomes) == 2
    (arr,) = r.model.arrows_from(r.point)
    assert arr.target == "p0_" + part.point
    assert sound(goal, r)
    with pytest.raises(ValueError):
        combine_conjunction(goal, [])


def test_unachievable_conjunction_is_everywhere_false():
    goal = P("<a>p & [a]~p")
    r = synthesize(goal)
    assert equivalent_on(reduce(QuantDiamond(goal)), BOT, max_states=2)
    assert equivalent_on(Update(r.model, r.point, goal), BOT, max_states=2)


def test_disjunction_panel():
    r = synthesize(P("(<a>q & p) | (<a>r & p)"), ml_conditions=False)
    assert len(r.model.outcomes) == 5
    root = r.model.arrows_from(r.point)
    assert len(root) == 2
    first, second = sorted(root, key=lambda a: isinstance(a.pre.args[1], Not))
    guard = first.pre.args[1]
    assert first.pre == And((TOP, guard))
    assert guard == QuantDiamond(P("<a>q & p"))
    assert second.pre == And((TOP, Not(guard)))


def test_combine_disjunction_covers_both_witnesses():
    # <a>p is achievable only in M1, <b>p only in M2; one root serves both
    f1, f2 = P("<a>p"), P("<b>p")
    r = combine_disjunction(f1, synthesize(f1), f2, synthesize(f2))
    assert len(r.model.outcomes) == 5
    goal = P("<a>p | <b>p")
    M1 = KripkeModel(("s", "t"), {"a": [("s", "t")], "b": []}, {"p": ["t"]})
    M2 = KripkeModel(("s", "t"), {"a": [], "b": [("s", "t")]}, {"p": ["t"]})
    for M in (M1, M2):
        assert mc(M, "s", QuantDiamond(goal))
        assert mc(M, "s", Update(r.model, r.point, goal))
    assert sound(goal, r)


def test_combine_disjunction_of_equal_goals():
    f = P("<a>q & p")
    r = combine_disjunction(f, synthesize(f), f, synthesize(f))
    assert sound(f, r)


# -- the worked example ------------------------------------------------------------

def test_worked_example_root_shape():
    r = synthesize(P(WORKED), ml_conditions=False)
    root = r.model.arrows_from(r.point)
    assert sorted(a.agent for a in root) == ["a", "b"]
    a_arrow = next(a for a in root if a.agent == "a")
    b_arrow = next(a for a in root if a.agent == "b")
    assert a_arrow.pre == TOP and a_arrow.post.arg == TOP
    assert b_arrow.pre == TOP and b_arrow.post.arg == p
    assert update_depth(r.model, r.point) == 2 == modal_depth(P(WORKED))


def test_worked_example_optimized():
    r = synthesize(P(WORKED)).optimized()
    expected = PointedUpdate(ArrowUpdateModel(("x", "y", "z"), (
        Arrow("a", "x", TOP, "z", TOP), Arrow("b", "x", TOP, "y", p), Arrow("a", "y", TOP, "z", TOP),
    )), ("x",))
    assert isomorphic_updates(r.pointed, expected) is not None


def test_worked_example_is_sound():
    for ml in (False, True):
        r = synthesize(P(WORKED), ml_conditions=ml)
        assert sound(P(WORKED), r)


# -- optimisation ----------------------------------------------------------------

def test_optimize_keeps_trivial_update():
    t = trivial_update()
    assert optimize(t) == t


def test_optimize_drops_unreachable_outcome():
    U = ArrowUpdateModel(("o", "dead"), (Arrow("a", "o", TOP, "o", p), Arrow("b", "dead", TOP, "o", TOP)))
    out = optimize(PointedUpdate(U, ("o",)))
    assert out.model.outcomes == ("o",)
    M = KripkeModel(("s", "t"), {"a": [("s", "t"), ("t", "t")], "b": [("s", "s")]}, {"p": ["t"]})
    assert bisimilar(execute_arrow_update(M, U), ("s", "o"), execute_arrow_update(M, out.model), ("s", "o"))


def test_optimize_merges_complementary_guards():
    U = ArrowUpdateModel(("o",), (Arrow("a", "o", p, "o", q), Arrow("a", "o", Not(p), "o", q)))
    out = optimize(PointedUpdate(U, ("o",)))
    assert out.model.arrows == (Arrow("a", "o", TOP, "o", q),)


# -- properties ------------------------------------------------------------------

@given(ml_formulas)
def test_synthesis_is_sound(f):
    r = synthesize(f)
    assert is_ml(r.model.arrows[0].pre) if r.model.arrows else True
    assert sound(f, r)


@given(ml_formulas)
def test_raw_synthesis_is_sound(f):
    assert sound(f, synthesize(f, ml_conditions=False))


@given(ml_formulas)
def test_depth_bound_and_single_point(f):
    r = synthesize(f)
    assert r.pointed.points == (r.point,)
    assert update_depth(r.model, r.point) <= modal_depth(f)


@given(ml_formulas)
def test_ml_mode_conditions_are_modal(f):
    r = synthesize(f, ml_conditions=True)
    assert all(is_ml(c) for c in r.model.conditions())


@settings(max_examples=25)
@given(ml_formulas)
def test_optimize_preserves_update_equivalence(f):
    r = synthesize(f)
    v = update_equivalent_bounded(r.pointed, optimize(r.pointed), max_states=2,
                                  agents=("a", "b"), atoms=("p", "q"))
    assert v.kind == "equivalent"


def test_simplified_guard_matches_reduced_quantifier():
    r = synthesize(P("(<a>q & p) | (<a>r & p)"), ml_conditions=True)
    guard = reduce(QuantDiamond(P("<a>q & p")))
    pres = {a.pre for a in r.model.arrows_from(r.point)}
    assert simplify(guard) in pres or any(equivalent_on(x, guard, 1, atoms=("p", "q", "r")) for x in pres)
