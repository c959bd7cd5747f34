import os

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from aauml.syntax import (
    BOT, TOP, And, Arrow, ArrowUpdateModel, Atom, Box, Diamond, Not, Or, Quant,
    QuantDiamond, Update,
)

settings.register_profile(
    "default", max_examples=60, deadline=None, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

AGENTS = ("a", "b")
ATOMS = ("p", "q")

leaves = st.one_of(st.sampled_from([Atom("p"), Atom("q")]), st.sampled_from([TOP, BOT]))


def _ml_step(children):
    return st.one_of(
        children.map(Not),
        st.tuples(children, children).map(And),
        st.tuples(children, children).map(Or),
        st.tuples(st.sampled_from(AGENTS), children).map(lambda t: Box(*t)),
        st.tuples(st.sampled_from(AGENTS), children).map(lambda t: Diamond(*t)),
    )


ml_formulas = st.recursive(leaves, _ml_step, max_leaves=8)

conditions = st.one_of(st.just(TOP), st.sampled_from([Atom("p"), Not(Atom("q"))]), ml_formulas)


@st.composite
def update_models(draw, max_outcomes=2, max_arrows=3):
    n = draw(st.integers(1, max_outcomes))
    outs = [f"o{i}" for i in range(n)]
    arrows = draw(st.lists(
        st.builds(Arrow, st.sampled_from(AGENTS), st.sampled_from(outs), conditions,
                  st.sampled_from(outs), conditions),
        max_size=max_arrows))
    return ArrowUpdateModel(tuple(outs), tuple(arrows))


@st.composite
def updates_on(draw, body):
    U = draw(update_models())
    return Update(U, draw(st.sampled_from(U.outcomes)), draw(body))


def _full_step(children):
    return st.one_of(
        _ml_step(children),
        updates_on(children),
        children.map(Quant),
        children.map(QuantDiamond),
    )


# any formula, including updates and quantifiers
formulas = st.recursive(leaves, _full_step, max_leaves=6)

# dynamic operators allowed, quantifier bodies kept modal
dynamic_formulas = st.recursive(
    leaves,
    lambda c: st.one_of(_ml_step(c), updates_on(c), ml_formulas.map(QuantDiamond), ml_formulas.map(Quant)),
    max_leaves=5,
)
