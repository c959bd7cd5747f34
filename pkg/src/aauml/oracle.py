"""Semantic checks of the reduction axioms and of synthesis on bounded model classes.

Every check evaluates both sides of an equivalence on all Kripke models up
to a size bound with the bit-parallel evaluator.  Quantifiers are
evaluated through synthesised witnesses (not through rewriting), and a
sample of models is additionally checked with the refinement search.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from .batch import disagreement, model_families, signature_of
from .generators import AXIOMS, AGENTS, ATOMS, axiom_instances
from .kripke import Evaluator, decode_model, model_bits
from .reduction import RULES, RuleError, reduce
from .syntax import Formula, QuantDiamond, Update


@dataclass
class AxiomReport:
    axiom: str
    instances: int
    failures: list = field(default_factory=list)
    rule_mismatches: list = field(default_factory=list)
    models: int = 0
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures and not self.rule_mismatches

    def line(self) -> str:
        status = "ok" if self.ok else "FAILED"
        return (f"{self.axiom}: {self.instances} instances, {self.models} models, "
                f"{len(self.failures)} disagreements, {len(self.rule_mismatches)} rule mismatches, "
                f"{self.seconds:.1f}s {status}")


def sample_models(count: int, n: int, agents=AGENTS, atoms=ATOMS, seed: int = 0) -> list:
    rng = random.Random(seed)
    bits = model_bits(n, agents, atoms)
    return [decode_model(n, agents, atoms, rng.getrandbits(bits)) for _ in range(count)]


def refinement_disagreement(f: Formula, g: Formula, models) -> tuple | None:
    """First ``(model, state)`` where ``f`` and ``g`` differ when quantifiers are
    decided by the refinement search."""
    for M in models:
        ev = Evaluator(M, "refinement")
        if ev.ext(f) != ev.ext(g):
            s = next(iter(ev.ext(f) ^ ev.ext(g)))
            return M, s
    return None


def check_axiom(name: str, count: int = 20, seed: int = 0, max_states: int = 3,
                sample: int = 200, agents=AGENTS, atoms=ATOMS) -> AxiomReport:
    """Check ``count`` instances of one axiom on every model up to ``max_states`` states.

    Also checks that the rewriting rule of the same name, applied to the
    left-hand side, gives a formula equivalent to the schema's right-hand side.
    """
    t0 = time.perf_counter()
    pairs = axiom_instances(name, count, seed, agents, atoms)
    report = AxiomReport(name, len(pairs))
    mode = "witness" if name.startswith("A") else "reduce"
    fams = list(model_families(max_states, agents, atoms, min_states=max_states))
    report.models = sum(F.space.nbits for F in fams)
    rng_models = sample_models(sample, max_states, agents, atoms, seed) if mode == "witness" else []
    for lhs, rhs in pairs:
        hit = disagreement(lhs, rhs, fams, mode)
        if hit is not None:
            report.failures.append((lhs, rhs, hit))
            continue
        if rng_models:
            bad = refinement_disagreement(lhs, rhs, rng_models)
            if bad is not None:
                report.failures.append((lhs, rhs, bad))
                continue
        try:
            rewritten = RULES[name](lhs)
        except RuleError:
            continue
        if rewritten != rhs and disagreement(rewritten, rhs, fams, mode) is not None:
            report.rule_mismatches.append((lhs, rewritten, rhs))
    report.seconds = time.perf_counter() - t0
    return report


def check_axioms(names=AXIOMS, count: int = 20, seed: int = 0, max_states: int = 3, **kw) -> list:
    return [check_axiom(n, count, seed, max_states, **kw) for n in names]


def _signature(f: Formula, agents, atoms) -> tuple:
    ags, ats = signature_of(f)
    return tuple(sorted(set(agents) | set(ags))), tuple(sorted(set(atoms) | set(ats)))


def reduction_disagreement(f: Formula, max_states: int = 2, agents=AGENTS, atoms=ATOMS):
    """Where ``reduce(f)`` differs from ``f`` with quantifiers decided by witnesses."""
    g = reduce(f)
    agents, atoms = _signature(f, agents, atoms)
    fams = model_families(max_states, agents, atoms, min_states=max_states)
    return disagreement(f, g, fams, "witness", "reduce")


def synthesis_disagreement(goal: Formula, result, max_states: int = 3, agents=AGENTS, atoms=ATOMS):
    """Where ``reduce(<*>goal)`` and ``<U,o>goal`` differ, if anywhere."""
    left = reduce(QuantDiamond(goal))
    right = Update(result.model, result.point, goal)
    agents, atoms = _signature(right, agents, atoms)
    fams = model_families(max_states, agents, atoms, min_states=max_states)
    return disagreement(left, right, fams, "reduce")

