"""Evaluating formulas on every small Kripke model at once.

A *family* is a set of models on the same states; bit ``m`` of every
bit-vector belongs to the ``m``-th model.  Truth values, relations and
product constructions become bitwise operations on numpy ``uint64``
arrays, so a whole bounded model class is handled with a few thousand
vector operations.  This is the independent semantic route used to test
the rewriting and synthesis code.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

import numpy as np

from .kripke import (
    ActionModel, KripkeModel, PointedAction, ResourceCapError, SignatureError,
    decode_model, model_bits,
)
from .syntax import (
    And, ArrowUpdateModel, Atom, Bot, Box, Diamond, Formula, Not, Or,
    PointedUpdate, Quant, QuantDiamond, Top, Update,
    agents as agents_of, atoms as atoms_of,
)

FULL = np.uint64(0xFFFFFFFFFFFFFFFF)
MAX_MODEL_BITS = 30


class Space:
    """Bit-vectors of a fixed length ``nbits``."""

    def __init__(self, nbits: int):
        self.nbits = nbits
        self.words = max(1, (nbits + 63) // 64)
        self.ones = np.full(self.words, FULL, dtype=np.uint64)
        if nbits % 64:
            self.ones[-1] = np.uint64((1 << (nbits % 64)) - 1)
        self.zeros = np.zeros(self.words, dtype=np.uint64)

    def neg(self, x):
        return x ^ self.ones

    def first(self, x) -> int | None:
        nz = np.flatnonzero(x)
        if not len(nz):
            return None
        w = int(nz[0])
        v = int(x[w])
        return w * 64 + (v & -v).bit_length() - 1

    def count(self, x) -> int:
        return int(sum(bin(int(w)).count("1") for w in x))

    def from_bits(self, bits: Iterable[int]):
        out = np.zeros(self.words, dtype=np.uint64)
        for m in bits:
            out[m // 64] |= np.uint64(1 << (m % 64))
        return out


class Family:
    """Models sharing ``n`` states; ``edges[a][i]`` lists ``(j, bits)``."""

    def __init__(self, space: Space, n: int, agents: tuple, atoms: tuple,
                 val: dict, edges: dict, exists: list | None = None,
                 decode: Callable[[int], KripkeModel] | None = None, labels: list | None = None):
        self.space = space
        self.n = n
        self.agents = agents
        self.atoms = atoms
        self.val = val
        self.edges = edges
        self.exists = exists
        self.decode = decode
        self.labels = labels if labels is not None else list(range(n))

    def ex(self, i):
        return self.space.ones if self.exists is None else self.exists[i]


# -- building families ------------------------------------------------------------

def _word_pattern(j: int) -> np.uint64:
    v = 0
    for m in range(64):
        if m >> j & 1:
            v |= 1 << m
    return np.uint64(v)


_WORDS = [_word_pattern(j) for j in range(6)]


def _pattern(space: Space, j: int, low: int, chunk: int):
    """Bit-vector whose bit ``m`` is bit ``j`` of ``chunk * 2**low + m``."""
    if j >= low:
        return space.ones if (chunk >> (j - low)) & 1 else space.zeros
    if space.nbits < 64:
        return np.array([sum(1 << m for m in range(space.nbits) if m >> j & 1)], dtype=np.uint64)
    if j < 6:
        return np.full(space.words, _WORDS[j], dtype=np.uint64)
    sel = (np.arange(space.words) >> (j - 6)) & 1
    return np.where(sel == 1, FULL, np.uint64(0)).astype(np.uint64)


def full_families(n: int, agents, atoms, chunk_bits: int = 20, max_bits: int = MAX_MODEL_BITS) -> Iterator[Family]:
    """All models on ``n`` states over the signature, in chunks of ``2**chunk_bits``.

    Model ``chunk * 2**chunk_bits + m`` is :func:`aauml.kripke.decode_model`
    of that index.
    """
    agents = tuple(sorted(agents))
    atoms = tuple(sorted(atoms))
    total = model_bits(n, agents, atoms)
    if total > max_bits:
        raise ResourceCapError(f"{2 ** total} models on {n} states exceed the cap of 2**{max_bits}")
    low = min(total, chunk_bits)
    space = Space(1 << low)
    for chunk in range(1 << (total - low)):
        val = {p: [_pattern(space, s * len(atoms) + k, low, chunk) for s in range(n)]
               for k, p in enumerate(atoms)}
        base = n * len(atoms)
        edges = {}
        for ai, a in enumerate(agents):
            off = base + ai * n * n
            rows = []
            for s in range(n):
                row = []
                for t in range(n):
                    bits = _pattern(space, off + s * n + t, low, chunk)
                    if bits is not space.zeros:
                        row.append((t, bits))
                rows.append(row)
            edges[a] = rows

        def decode(m, chunk=chunk):
            return decode_model(n, agents, atoms, (chunk << low) + m)

        yield Family(space, n, agents, atoms, val, edges, decode=decode, labels=[f"s{i}" for i in range(n)])


def family_from_models(models: list) -> Family:
    """A family built from explicit models that share their state list."""
    first = models[0]
    states = list(first.states)
    index = {s: i for i, s in enumerate(states)}
    n = len(states)
    space = Space(len(models))
    val = {p: [[] for _ in range(n)] for p in first.atoms}
    edge_bits = {a: {} for a in first.agents}
    for m, M in enumerate(models):
        if list(M.states) != states or M.agents != first.agents or M.atoms != first.atoms:
            raise ValueError("models in a family must share states and signature")
        for p in M.atoms:
            for s in M.valuation[p]:
                val[p][index[s]].append(m)
        for a in M.agents:
            for s, t in M.relations[a]:
                edge_bits[a].setdefault((index[s], index[t]), []).append(m)
    vals = {p: [space.from_bits(b) for b in rows] for p, rows in val.items()}
    edges = {}
    for a, pairs in edge_bits.items():
        rows = [[] for _ in range(n)]
        for (i, j), bits in sorted(pairs.items()):
            rows[i].append((j, space.from_bits(bits)))
        edges[a] = rows
    return Family(space, n, first.agents, first.atoms, vals, edges,
                  decode=lambda m: models[m], labels=states)


def model_families(max_states: int, agents, atoms, *, min_states: int = 1,
                   frame: str = "k", chunk_bits: int = 20) -> Iterator[Family]:
    """Families covering every model on ``min_states..max_states`` states.

    The size bound is checked before anything is produced, so an
    oversized request fails at once rather than after the small sizes.
    """
    from .kripke import enumerate_frame_models
    total = model_bits(max_states, agents, atoms)
    if total > MAX_MODEL_BITS:
        raise ResourceCapError(f"2**{total} models on {max_states} states exceed the cap of 2**{MAX_MODEL_BITS}")
    for n in range(min_states, max_states + 1):
        if frame == "k":
            yield from full_families(n, agents, atoms, chunk_bits)
        else:
            models = list(enumerate_frame_models(n, agents, atoms, frame))
            for i in range(0, len(models), 1 << chunk_bits):
                yield family_from_models(models[i: i + (1 << chunk_bits)])


# -- evaluation -------------------------------------------------------------------

class BatchEvaluator:
    """Truth values of formulas in every model of a family, state by state."""

    def __init__(self, family: Family, quantifiers: str = "reduce"):
        if quantifiers not in ("reduce", "witness"):
            raise ValueError("batch evaluation supports the 'reduce' and 'witness' quantifier modes")
        self.fam = family
        self.sp = family.space
        self.quantifiers = quantifiers
        self.memo: dict = {}
        self.products: dict = {}

    def ev(self, f: Formula) -> list:
        hit = self.memo.get(f)
        if hit is None:
            hit = self._ev(f)
            self.memo[f] = hit
        return hit

    def _ev(self, f: Formula) -> list:
        F, sp = self.fam, self.sp
        n = F.n
        if isinstance(f, Top):
            return [sp.ones] * n
        if isinstance(f, Bot):
            return [sp.zeros] * n
        if isinstance(f, Atom):
            if f.name not in F.val:
                raise SignatureError(f"atom {f.name!r} is not in the signature")
            return F.val[f.name]
        if isinstance(f, Not):
            return [sp.neg(x) for x in self.ev(f.arg)]
        if isinstance(f, And):
            vals = [self.ev(x) for x in f.args]
            out = []
            for i in range(n):
                acc = vals[0][i]
                for v in vals[1:]:
                    acc = acc & v[i]
                out.append(acc)
            return out
        if isinstance(f, Or):
            vals = [self.ev(x) for x in f.args]
            out = []
            for i in range(n):
                acc = vals[0][i]
                for v in vals[1:]:
                    acc = acc | v[i]
                out.append(acc)
            return out
        if isinstance(f, (Box, Diamond)):
            if f.agent not in F.edges:
                raise SignatureError(f"agent {f.agent!r} is not in the signature")
            inner = self.ev(f.arg)
            rows = F.edges[f.agent]
            out = []
            if isinstance(f, Box):
                neg_inner = [sp.neg(x) for x in inner]
                for i in range(n):
                    bad = sp.zeros
                    for j, e in rows[i]:
                        bad = bad | (e & neg_inner[j])
                    out.append(sp.neg(bad))
            else:
                for i in range(n):
                    acc = sp.zeros
                    for j, e in rows[i]:
                        acc = acc | (e & inner[j])
                    out.append(acc)
            return out
        if isinstance(f, Update):
            sub, where = self.product(f.model, f.model.reachable((f.outcome,)))
            inner = sub.ev(f.arg)
            return [inner[where[i, f.outcome]] for i in range(n)]
        if isinstance(f, (Quant, QuantDiamond)):
            if self.quantifiers == "reduce":
                from .reduction import reduce
                return self.ev(reduce(f))
            if isinstance(f, Quant):
                return [sp.neg(x) for x in self.ev(QuantDiamond(Not(f.arg)))]
            from .synthesis import synthesize
            r = synthesize(f.arg, ml_conditions=False)  # raw guards keep this route free of reduce
            return self.ev(Update(r.model, r.point, f.arg))
        raise TypeError(f"not a formula: {f!r}")

    def product(self, U: ArrowUpdateModel, outcomes: frozenset):
        """Evaluator for the product with ``U`` restricted to ``outcomes``."""
        key = (U, outcomes)
        hit = self.products.get(key)
        if hit is None:
            fam, where = arrow_product(self, U, outcomes)
            hit = (BatchEvaluator(fam, self.quantifiers), where)
            self.products[key] = hit
        return hit


def arrow_product(ev: BatchEvaluator, U: ArrowUpdateModel, outcomes=None):
    F, sp = ev.fam, ev.sp
    outs = sorted(outcomes if outcomes is not None else U.outcomes)
    where = {}
    labels = []
    for i in range(F.n):
        for o in outs:
            where[i, o] = len(labels)
            labels.append((F.labels[i], o))
    edges = {a: [dict() for _ in labels] for a in F.agents}
    for arr in U.arrows:
        if (0, arr.source) not in where or (0, arr.target) not in where:
            continue
        if arr.agent not in F.edges:
            raise SignatureError(f"update uses agent {arr.agent!r} outside the signature")
        pre = ev.ev(arr.pre)
        post = ev.ev(arr.post)
        pre_top = isinstance(arr.pre, Top)
        post_top = isinstance(arr.post, Top)
        rows = edges[arr.agent]
        for i in range(F.n):
            row = rows[where[i, arr.source]]
            for j, e in F.edges[arr.agent][i]:
                bits = e
                if not pre_top:
                    bits = bits & pre[i]
                if not post_top:
                    bits = bits & post[j]
                k = where[j, arr.target]
                row[k] = row[k] | bits if k in row else bits
    out_edges = {a: [sorted(r.items(), key=lambda kv: kv[0]) for r in rows] for a, rows in edges.items()}
    val = {p: [F.val[p][i] for i in range(F.n) for _ in outs] for p in F.atoms}
    exists = None if F.exists is None else [F.exists[i] for i in range(F.n) for _ in outs]
    fam = Family(sp, len(labels), F.agents, F.atoms, val, out_edges, exists, F.decode, labels)
    return fam, where


def action_product(ev: BatchEvaluator, E: ActionModel):
    """Family for ``M (x) E``; states whose precondition never holds are dropped."""
    F, sp = ev.fam, ev.sp
    where = {}
    labels = []
    exists = []
    for i in range(F.n):
        for e in E.actions:
            bits = F.ex(i) & ev.ev(E.pre[e])[i]
            if bits.any():
                where[i, e] = len(labels)
                labels.append((F.labels[i], e))
                exists.append(bits)
    edges = {a: [dict() for _ in labels] for a in F.agents}
    for a, e, f in E.relations:
        if a not in F.edges:
            raise SignatureError(f"action model uses agent {a!r} outside the signature")
        for i in range(F.n):
            x = where.get((i, e))
            if x is None:
                continue
            for j, bits in F.edges[a][i]:
                y = where.get((j, f))
                if y is None:
                    continue
                b = bits & exists[x] & exists[y]
                row = edges[a][x]
                row[y] = row[y] | b if y in row else b
    out_edges = {a: [sorted(r.items(), key=lambda kv: kv[0]) for r in rows] for a, rows in edges.items()}
    base = [i for i in range(F.n) for e in E.actions if (i, e) in where]
    val = {p: [F.val[p][i] for i in base] for p in F.atoms}
    fam = Family(sp, len(labels), F.agents, F.atoms, val, out_edges, exists, F.decode, labels)
    return fam, where


# -- relations between families ---------------------------------------------------

def greatest_relation(A: Family, B: Family, *, forth: bool = True, back: bool = True) -> dict:
    """Largest atom-preserving relation with the requested zig/zag clauses.

    Both families must describe the same base models bit for bit.  Entry
    ``(x, y)`` holds the models in which ``x`` and ``y`` are related.
    """
    sp = A.space
    atoms = [p for p in A.atoms if p in B.val]
    Z = {}
    for x in range(A.n):
        for y in range(B.n):
            z = A.ex(x) & B.ex(y)
            for p in atoms:
                z = z & sp.neg(A.val[p][x] ^ B.val[p][y])
            Z[x, y] = z
    agents = [a for a in A.agents if a in B.edges]
    changed = True
    while changed:
        changed = False
        for (x, y), z in Z.items():
            if not z.any():
                continue
            bad = sp.zeros
            for a in agents:
                if forth:
                    for x2, e in A.edges[a][x]:
                        cover = sp.zeros
                        for y2, f in B.edges[a][y]:
                            cover = cover | (f & Z[x2, y2])
                        bad = bad | (e & sp.neg(cover))
                if back:
                    for y2, f in B.edges[a][y]:
                        cover = sp.zeros
                        for x2, e in A.edges[a][x]:
                            cover = cover | (e & Z[x2, y2])
                        bad = bad | (f & sp.neg(cover))
            nz = z & sp.neg(bad)
            if not np.array_equal(nz, z):
                Z[x, y] = nz
                changed = True
    return Z


def _pointed_product(ev: BatchEvaluator, X):
    """Family for ``X`` applied to the family and, per base state, its points."""
    if isinstance(X, PointedUpdate):
        fam, where = arrow_product(ev, X.model)
        pts = [[where[i, o] for o in X.points] for i in range(ev.fam.n)]
    elif isinstance(X, PointedAction):
        fam, where = action_product(ev, X.model)
        pts = [[where[i, e] for e in X.points if (i, e) in where] for i in range(ev.fam.n)]
    else:
        raise TypeError("expected a PointedUpdate or a PointedAction")
    return fam, pts


@dataclass
class Counterexample:
    model: KripkeModel
    state: object
    detail: str = ""


def _locate(F: Family, i: int, bits) -> Counterexample | None:
    m = F.space.first(bits)
    if m is None:
        return None
    return Counterexample(F.decode(m), F.labels[i])


def signature_of(*things) -> tuple:
    ags, ats = set(), set()
    for t in things:
        if isinstance(t, Formula):
            ags |= agents_of(t)
            ats |= atoms_of(t)
        elif isinstance(t, (PointedUpdate, ArrowUpdateModel)):
            model = t.model if isinstance(t, PointedUpdate) else t
            ags |= set(a.agent for a in model.arrows)
            for c in model.conditions():
                ags |= agents_of(c)
                ats |= atoms_of(c)
        elif isinstance(t, (PointedAction, ActionModel)):
            model = t.model if isinstance(t, PointedAction) else t
            ags |= set(model.agents)
            for pre in model.pre.values():
                ags |= agents_of(pre)
                ats |= atoms_of(pre)
    return tuple(sorted(ags)), tuple(sorted(ats))


@dataclass
class UpdateVerdict:
    """``kind`` is equivalent, conditional (first within second),
    conditional-reverse, or inequivalent."""

    kind: str
    counterexample: Counterexample | None = None
    models_checked: int = 0

    @property
    def equivalent(self) -> bool:
        return self.kind == "equivalent"


def update_verdict(X, Y, families: Iterable[Family], quantifiers: str = "reduce") -> UpdateVerdict:
    """Compare two pointed updates (arrow or action) on every model given."""
    fail_xy = fail_yx = None
    checked = 0
    for F in families:
        checked += F.space.nbits
        ev = BatchEvaluator(F, quantifiers)
        PX, px = _pointed_product(ev, X)
        PY, py = _pointed_product(ev, Y)
        Z = greatest_relation(PX, PY)
        sp = F.space
        for i in range(F.n):
            dom_x = sp.zeros
            for q in px[i]:
                dom_x = dom_x | PX.ex(q)
            dom_y = sp.zeros
            for r in py[i]:
                dom_y = dom_y | PY.ex(r)
            ok = sp.ones
            for q in px[i]:
                cover = sp.zeros
                for r in py[i]:
                    cover = cover | Z[q, r]
                ok = ok & (sp.neg(PX.ex(q)) | cover)
            for r in py[i]:
                cover = sp.zeros
                for q in px[i]:
                    cover = cover | Z[q, r]
                ok = ok & (sp.neg(PY.ex(r)) | cover)
            bad = sp.neg(ok)
            if fail_xy is None:
                fail_xy = _locate(F, i, dom_x & bad)
            if fail_yx is None:
                fail_yx = _locate(F, i, dom_y & bad)
        if fail_xy and fail_yx:
            break
    if fail_xy is None and fail_yx is None:
        return UpdateVerdict("equivalent", None, checked)
    if fail_xy is None:
        return UpdateVerdict("conditional", fail_yx, checked)
    if fail_yx is None:
        return UpdateVerdict("conditional-reverse", fail_xy, checked)
    return UpdateVerdict("inequivalent", fail_xy, checked)


def refinement_violation(X, families: Iterable[Family], quantifiers: str = "reduce") -> Counterexample | None:
    """First model and state where a product point fails to refine the base point."""
    for F in families:
        ev = BatchEvaluator(F, quantifiers)
        P, pts = _pointed_product(ev, X)
        Z = greatest_relation(F, P, forth=False, back=True)
        for i in range(F.n):
            for q in pts[i]:
                bad = P.ex(q) & F.space.neg(Z[i, q])
                hit = _locate(F, i, bad)
                if hit is not None:
                    hit.detail = f"product state {P.labels[q]}"
                    return hit
    return None


def disagreement(f: Formula, g: Formula, families: Iterable[Family], quantifiers: str = "reduce",
                 quantifiers_g: str | None = None) -> Counterexample | None:
    """First model and state where ``f`` and ``g`` differ, if any."""
    for F in families:
        ev_f = BatchEvaluator(F, quantifiers)
        ev_g = ev_f if quantifiers_g in (None, quantifiers) else BatchEvaluator(F, quantifiers_g)
        vf = ev_f.ev(f)
        vg = ev_g.ev(g)
        for i in range(F.n):
            hit = _locate(F, i, vf[i] ^ vg[i])
            if hit is not None:
                return hit
    return None


def count_models(families: Iterable[Family]) -> int:
    return sum(F.space.nbits for F in families)
