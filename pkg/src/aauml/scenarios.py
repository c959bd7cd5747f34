"""Small hand-built models used in examples, tests and the command line.

The running example has two agents ``a`` (Anne) and ``b`` (Bill) who do
not know whether ``p``.  The updates describe different ways in which
Anne learns that ``p``.
"""

from __future__ import annotations

from .kripke import ActionModel, KripkeModel, PointedAction
from .syntax import TOP, Arrow, ArrowUpdateModel, Not, PointedUpdate, atom

p = atom("p")
AB = ("a", "b")


def intro_model() -> KripkeModel:
    """States ``np`` and ``p``; neither agent can tell them apart."""
    states = ("np", "p")
    full = [(s, t) for s in states for t in states]
    return KripkeModel(states, {"a": full, "b": full}, {"p": ["p"]}, AB, ("p",))


def announcement_restriction() -> KripkeModel:
    """What remains of the intro model after publicly announcing ``p``."""
    return KripkeModel(("p",), {"a": [("p", "p")], "b": [("p", "p")]}, {"p": ["p"]}, AB, ("p",))


def announcement_update(phi=p) -> PointedUpdate:
    """Arrow elimination: every agent keeps only arrows into ``phi`` states."""
    arrows = (Arrow("a", "o", TOP, "o", phi), Arrow("b", "o", TOP, "o", phi))
    return PointedUpdate(ArrowUpdateModel(("o",), arrows, "announce"), ("o",))


def announcement_action(phi=p) -> PointedAction:
    """State elimination: one action with precondition ``phi``."""
    E = ActionModel.build({"a": [("e", "e")], "b": [("e", "e")]}, {"e": phi}, "announce_action")
    return PointedAction(E, ("e",))


def anne_reads_update() -> PointedUpdate:
    """Anne reads that ``p`` while Bill may notice her reading.

    In outcome ``c`` (reading) Anne distinguishes ``p`` from ``~p``; in
    outcome ``n`` (not reading) nothing changes.  Bill cannot tell the
    outcomes apart.
    """
    np_ = Not(p)
    arrows = (
        Arrow("a", "c", p, "c", p), Arrow("a", "c", np_, "c", np_),
        Arrow("b", "c", TOP, "c", TOP), Arrow("b", "c", TOP, "n", TOP),
        Arrow("b", "n", TOP, "c", TOP),
        Arrow("a", "n", TOP, "n", TOP), Arrow("b", "n", TOP, "n", TOP),
    )
    return PointedUpdate(ArrowUpdateModel(("c", "n"), arrows, "reads"), ("c",))


def anne_private_update() -> PointedUpdate:
    """Anne privately learns ``p``; Bill believes nothing happened."""
    arrows = (
        Arrow("a", "c", TOP, "c", p), Arrow("b", "c", TOP, "n", TOP),
        Arrow("a", "n", TOP, "n", TOP), Arrow("b", "n", TOP, "n", TOP),
    )
    return PointedUpdate(ArrowUpdateModel(("c", "n"), arrows, "private"), ("c",))


def anne_reads_action() -> PointedAction:
    """Actions ``p``, ``np`` (Anne reads either) and ``top`` (she does not read)."""
    acts = ("p", "np", "top")
    E = ActionModel.build(
        {"a": [(e, e) for e in acts], "b": [(e, f) for e in acts for f in acts]},
        {"p": p, "np": Not(p), "top": TOP}, "reads_action")
    return PointedAction(E, ("p",))


def anne_private_action() -> PointedAction:
    """Action ``p`` for Anne; Bill sees the skip action ``top``."""
    E = ActionModel.build(
        {"a": [("p", "p"), ("top", "top")], "b": [("p", "top"), ("top", "top")]},
        {"p": p, "top": TOP}, "private_action")
    return PointedAction(E, ("p",))


def anne_reads_action_pruned() -> PointedAction:
    """The four consistent actions of the split ``reads`` update.

    ``(c, p)``, ``(c, np)`` for the reading outcome and ``(n, p)``, ``(n, np)``
    for the other; both reading actions are designated.
    """
    acts = ("c_p", "c_np", "n_p", "n_np")
    pre = {"c_p": p, "c_np": Not(p), "n_p": p, "n_np": Not(p)}
    loops = [(e, e) for e in acts]
    a_rel = loops + [("n_p", "n_np"), ("n_np", "n_p")]
    b_rel = [(e, f) for e in acts for f in acts]
    E = ActionModel.build({"a": a_rel, "b": b_rel}, pre, "reads_split")
    return PointedAction(E, ("c_np", "c_p"))


def pal_gap_model() -> KripkeModel:
    """Four states where one goal needs two different announcements.

    ``<a>``-links join ``s0``-``s1`` and ``s2``-``s3``, ``<b>``-links join
    ``s0``-``s2`` and ``s1``-``s3``; every state has both loops.  At the
    two ``pqr`` states ``[a]p & ~[b]p`` is achievable by announcing ``q``
    at one and ``r`` at the other, but no single announcement does both.
    """
    states = ("s0", "s1", "s2", "s3")
    loops = [(s, s) for s in states]
    sym = lambda pairs: [x for s, t in pairs for x in ((s, t), (t, s))]
    rel = {"a": loops + sym([("s0", "s1"), ("s2", "s3")]),
           "b": loops + sym([("s0", "s2"), ("s1", "s3")])}
    val = {"p": ["s0", "s3"], "q": ["s0", "s2", "s3"], "r": ["s0", "s1", "s3"]}
    return KripkeModel(states, rel, val, AB, ("p", "q", "r"))


def chain_model(length: int, atom_name: str = "p", agent: str = "a") -> KripkeModel:
    """A finite ``agent``-path ``c0 -> c1 -> ...`` with the atom true everywhere."""
    states = tuple(f"c{i}" for i in range(length))
    rel = {agent: [(states[i], states[i + 1]) for i in range(length - 1)]}
    return KripkeModel(states, rel, {atom_name: list(states)}, (agent,), (atom_name,))


def loop_model(atom_name: str = "p", agent: str = "a") -> KripkeModel:
    """One state with a loop and the atom true."""
    return KripkeModel(("l",), {agent: [("l", "l")]}, {atom_name: ["l"]}, (agent,), (atom_name,))


def fixture_models() -> dict:
    """Named Kripke models over agents ``a``, ``b`` for refinement checks."""
    M = intro_model()
    return {
        "intro": M,
        "announced": announcement_restriction(),
        "pal_gap": pal_gap_model(),
    }


def fixture_updates() -> dict:
    return {
        "announce": announcement_update(),
        "reads": anne_reads_update(),
        "private": anne_private_update(),
    }


def fixture_actions() -> dict:
    return {
        "announce_action": announcement_action(),
        "reads_action": anne_reads_action(),
        "private_action": anne_private_action(),
    }
