"""Shared checks used by several test modules."""

from aauml.batch import disagreement, model_families


def equivalent_on(f, g, max_states=2, agents=("a", "b"), atoms=("p", "q"), quantifiers="reduce",
                  quantifiers_g=None, min_states=None):
    """True when ``f`` and ``g`` agree at every state of every small model."""
    lo = max_states if min_states is None else min_states
    fams = model_families(max_states, agents, atoms, min_states=lo)
    return disagreement(f, g, fams, quantifiers, quantifiers_g) is None
