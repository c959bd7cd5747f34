"""Bisimulation, refinement and update equivalence."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

from .batch import (
    UpdateVerdict, model_families, refinement_violation, signature_of, update_verdict,
)
from .kripke import KripkeModel, SignatureError


@dataclass(frozen=True)
class RelationWitness:
    pairs: frozenset

    def __contains__(self, pair) -> bool:
        return pair in self.pairs

    def __len__(self) -> int:
        return len(self.pairs)


def _shared_signature(M: KripkeModel, N: KripkeModel):
    if M.agents != N.agents or M.atoms != N.atoms:
        raise SignatureError("models have different signatures")


def greatest(M: KripkeModel, N: KripkeModel, *, forth: bool, back: bool, rounds: int | None = None) -> set:
    """Largest atom-preserving relation with the chosen clauses.

    With ``rounds`` the refinement stops early, which gives the ``n``-step
    approximation used for bounded bisimilarity.
    """
    _shared_signature(M, N)
    Z = {(s, t) for s in M.states for t in N.states if M.true_atoms(s) == N.true_atoms(t)}
    k = 0
    while rounds is None or k < rounds:
        k += 1
        keep = set()
        for s, t in Z:
            ok = True
            for a in M.agents:
                ms, nt = M.succ[a][s], N.succ[a][t]
                if forth and not all(any((s2, t2) in Z for t2 in nt) for s2 in ms):
                    ok = False
                    break
                if back and not all(any((s2, t2) in Z for s2 in ms) for t2 in nt):
                    ok = False
                    break
            if ok:
                keep.add((s, t))
        if keep == Z:
            break
        Z = keep
    return Z


def bisimilar(M: KripkeModel, s, N: KripkeModel, t) -> RelationWitness | None:
    """The largest bisimulation between ``M`` and ``N`` if it links ``s`` and ``t``."""
    Z = greatest(M, N, forth=True, back=True)
    return RelationWitness(frozenset(Z)) if (s, t) in Z else None


def refines(M: KripkeModel, s, N: KripkeModel, t) -> RelationWitness | None:
    """Is ``(N, t)`` a refinement of ``(M, s)``?  Atoms plus the back clause."""
    Z = greatest(M, N, forth=False, back=True)
    return RelationWitness(frozenset(Z)) if (s, t) in Z else None


def simulates(M: KripkeModel, s, N: KripkeModel, t) -> RelationWitness | None:
    """Does ``(N, t)`` simulate ``(M, s)``?  Atoms plus the forth clause."""
    Z = greatest(M, N, forth=True, back=False)
    return RelationWitness(frozenset(Z)) if (s, t) in Z else None


def n_bisimilar(M: KripkeModel, s, N: KripkeModel, t, n: int) -> bool:
    """Agreement on every modal formula of depth at most ``n``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return (s, t) in greatest(M, N, forth=True, back=True, rounds=n)


def bisimilar_multi(M: KripkeModel, S, N: KripkeModel, T) -> bool:
    """Every point on one side has a bisimilar point on the other."""
    Z = greatest(M, N, forth=True, back=True)
    return (all(any((s, t) in Z for t in T) for s in S)
            and all(any((s, t) in Z for s in S) for t in T))


def update_equivalent_bounded(X, Y, *, max_states: int = 2, agents=None, atoms=None,
                              frame: str = "k", quantifiers: str = "reduce") -> UpdateVerdict:
    """Compare two pointed updates on every model up to ``max_states`` states.

    ``X`` and ``Y`` are :class:`PointedUpdate` or :class:`PointedAction`
    values.  ``X`` is conditionally equivalent to ``Y`` when, wherever ``X``
    is executable, the two results are bisimilar as multi-pointed models.
    The verdict is ``equivalent``, ``conditional`` (``X`` conditionally
    equivalent to ``Y`` only), ``conditional-reverse`` or ``inequivalent``,
    with a counterexample for a failing direction.
    """
    ags, ats = signature_of(X, Y)
    ags = tuple(sorted(set(ags) | set(agents or ())))
    ats = tuple(sorted(set(ats) | set(atoms or ())))
    fams = model_families(max_states, ags, ats, frame=frame)
    return update_verdict(X, Y, fams, quantifiers)


def refinement_counterexample(X, *, max_states: int = 2, agents=None, atoms=None):
    """A model and state where some product point does not refine the source point."""
    ags, ats = signature_of(X)
    ags = tuple(sorted(set(ags) | set(agents or ())))
    ats = tuple(sorted(set(ats) | set(atoms or ())))
    return refinement_violation(X, model_families(max_states, ags, ats))


def isomorphic_updates(X, Y, same_condition=None) -> dict | None:
    """An outcome bijection mapping points to points and arrows to arrows.

    ``same_condition(f, g)`` decides when two conditions match; by default
    they must be equal.  Returns the bijection or ``None``.
    """
    same = same_condition or (lambda f, g: f == g)
    A, B = X.model, Y.model
    if len(A.outcomes) != len(B.outcomes) or len(A.arrows) != len(B.arrows):
        return None
    for perm in permutations(B.outcomes):
        h = dict(zip(A.outcomes, perm))
        if {h[p] for p in X.points} != set(Y.points):
            continue
        remaining = list(B.arrows)
        ok = True
        for a in A.arrows:
            for k, b in enumerate(remaining):
                if (b.agent, b.source, b.target) == (a.agent, h[a.source], h[a.target]) \
                        and same(a.pre, b.pre) and same(a.post, b.post):
                    del remaining[k]
                    break
            else:
                ok = False
                break
        if ok:
            return h
    return None
