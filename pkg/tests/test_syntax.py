import pytest
from hypothesis import given

from aauml.parser import ParseError, parse_formula
from aauml.syntax import (
    BOT, TOP, And, Arrow, ArrowUpdateModel, Atom, Box, Diamond, Not, Or,
    PointedUpdate, Quant, QuantDiamond, Update, atoms, agents, conj, desugar,
    disj, modal_depth, subformulas, substitute, to_text,
)

from conftest import formulas

p, q, r = Atom("p"), Atom("q"), Atom("r")
U1 = ArrowUpdateModel(("o",), (Arrow("a", "o", p, "o", TOP),), "U1")


# -- construction -----------------------------------------------------------------

def test_structural_equality_and_hashing():
    assert And((p, Box("a", q))) == And((p, Box("a", q)))
    assert hash(And((p, Box("a", q)))) == hash(And((p, Box("a", q))))
    assert Box("a", p) != Box("b", p)
    assert len({Not(p), Not(p), Not(q)}) == 2


def test_operators_build_nodes():
    assert ~p == Not(p)
    assert (p & q) == And((p, q))
    assert (p | q) == Or((p, q))


def test_conj_and_disj_of_few_arguments():
    assert conj() == TOP
    assert disj() == BOT
    assert conj(p) == p
    assert conj(p, q) == And((p, q))


def test_and_needs_two_arguments():
    with pytest.raises(ValueError):
        And((p,))


def test_update_outcome_must_exist():
    with pytest.raises(ValueError):
        Update(U1, "x", p)


def test_arrow_update_model_validation():
    with pytest.raises(ValueError):
        ArrowUpdateModel((), ())
    with pytest.raises(ValueError):
        ArrowUpdateModel(("o",), (Arrow("a", "o", TOP, "x", TOP),))
    with pytest.raises(ValueError):
        PointedUpdate(U1, ())
    with pytest.raises(ValueError):
        PointedUpdate(U1, ("x",))


def test_arrow_multiset_keeps_parallel_arrows():
    U = ArrowUpdateModel(("o",), (Arrow("a", "o", p, "o", TOP), Arrow("a", "o", q, "o", TOP)))
    assert len(U.arrows_from("o", "a")) == 2


def test_model_equality_ignores_name_and_order():
    x = ArrowUpdateModel(("o", "n"), (Arrow("a", "o", p, "n", TOP), Arrow("b", "n", TOP, "o", q)), "X")
    y = ArrowUpdateModel(("n", "o"), (Arrow("b", "n", TOP, "o", q), Arrow("a", "o", p, "n", TOP)), "Y")
    assert x == y and hash(x) == hash(y)


# -- parsing ----------------------------------------------------------------------

def test_parse_negated_box():
    assert parse_formula("~[a]p") == Not(Box("a", p))


def test_parse_quantifier_diamond_is_desugared():
    f = parse_formula("<*>( [a]p & ~[b]p )")
    assert f == Not(Quant(Not(And((Box("a", p), Not(Box("b", p)))))))


def test_parse_update_from_environment():
    assert parse_formula("[U1@o]p", {"U1": U1}) == Update(U1, "o", p)


def test_parse_sugar_expands_to_primitives():
    assert parse_formula("p | q") == Not(And((Not(p), Not(q))))
    assert parse_formula("<a>p") == Not(Box("a", Not(p)))
    assert parse_formula("(p -> q)") == Not(And((p, Not(q))))
    assert parse_formula("(p <-> q)") == And((Not(And((p, Not(q)))), Not(And((q, Not(p))))))


def test_parse_without_desugaring_keeps_derived_nodes():
    assert parse_formula("p | <a>q", desugar=False) == Or((p, Diamond("a", q)))
    assert parse_formula("<*>p", desugar=False) == QuantDiamond(p)


def test_parse_multi_pointed_update_is_a_conjunction():
    U = ArrowUpdateModel(("o", "n"), (), "V")
    assert parse_formula("[V@o,n]p", {"V": U}) == And((Update(U, "o", p), Update(U, "n", p)))


def test_parse_dual_update_is_self_dual_form():
    f = parse_formula("<U1@o>p", {"U1": U1})
    assert f == Not(Update(U1, "o", Not(p)))


def test_parse_precedence():
    assert parse_formula("~p & q | r", desugar=False) == Or((And((Not(p), q)), r))
    assert parse_formula("[a]p & q", desugar=False) == And((Box("a", p), q))


@pytest.mark.parametrize("text, pos", [
    ("p &", 3), ("[a]&p", 3), ("(p", 2), ("p q", 2), ("$", 0), ("[a p", 3),
])
def test_parse_errors_report_position(text, pos):
    with pytest.raises(ParseError) as e:
        parse_formula(text)
    assert e.value.pos == pos
    assert "^" in e.value.pretty()


def test_parse_unknown_update_and_outcome():
    with pytest.raises(ParseError, match="unknown update"):
        parse_formula("[V@o]p")
    with pytest.raises(ParseError, match="not an outcome"):
        parse_formula("[U1@x]p", {"U1": U1})


def test_parse_signature_check():
    parse_formula("[a]p", signature=(("a",), ("p",)))
    with pytest.raises(ParseError):
        parse_formula("[b]p", signature=(("a",), ("p",)))
    with pytest.raises(ParseError):
        parse_formula("[a]r", signature=(("a",), ("p",)))


@given(formulas)
def test_print_parse_round_trip(f):
    env = {g.model.label: g.model for g in subformulas(f) if isinstance(g, Update)}
    assert parse_formula(to_text(f), env, desugar=False) == f


@given(formulas)
def test_desugared_round_trip(f):
    g = desugar(f)
    env = {h.model.label: h.model for h in subformulas(g) if isinstance(h, Update)}
    assert parse_formula(to_text(g), env) == g


def test_printer_output():
    f = parse_formula("<a>(p | ~q) & [*][b]T", desugar=False)
    assert to_text(f) == "<a>(p | ~q) & [*][b]T"


# -- structure ----------------------------------------------------------------------

@pytest.mark.parametrize("text, depth", [
    ("p", 0), ("<a>[b]p", 2), ("[*]p", 0), ("[a]p & <b><a>q", 2), ("~[a]~[a][b]p", 3),
])
def test_modal_depth(text, depth):
    assert modal_depth(parse_formula(text)) == depth


def test_modal_depth_counts_update_conditions():
    U = ArrowUpdateModel(("o",), (Arrow("a", "o", Box("a", Box("b", p)), "o", TOP),))
    assert modal_depth(Update(U, "o", p)) == 2
    assert modal_depth(Update(U, "o", Box("a", Box("a", Box("a", p))))) == 3


def test_substitute_examples():
    assert substitute(And((p, q)), "p", r) == And((r, q))
    assert substitute(Box("a", p), Atom("p"), q) == Box("a", q)


def test_substitute_reaches_update_conditions():
    U = ArrowUpdateModel(("o",), (Arrow("a", "o", p, "o", TOP),))
    got = substitute(Update(U, "o", p), "p", q)
    U2 = ArrowUpdateModel(("o",), (Arrow("a", "o", q, "o", TOP),))
    assert got == Update(U2, "o", q)


@given(formulas)
def test_substitute_removes_target(f):
    g = substitute(f, {"p": Box("b", q)})
    assert "p" not in atoms(g)
    assert substitute(f, "p", p) == f


def test_atoms_and_agents_include_conditions():
    U = ArrowUpdateModel(("o",), (Arrow("b", "o", r, "o", TOP),))
    f = Update(U, "o", Box("a", p))
    assert atoms(f) == {"p", "r"}
    assert agents(f) == {"a", "b"}
