"""Command line front end.

Exit codes: 0 success or true, 1 false or not equivalent, 2 usage, parse
or lookup error, 3 a resource bound was exceeded.
"""

from __future__ import annotations

import argparse
import sys

from . import conversion
from .batch import disagreement, model_families, signature_of
from .documents import (
    DocumentError, Workspace, action_doc, dump, kripke_doc, to_dot, update_doc,
)
from .equivalence import bisimilar, refines, update_equivalent_bounded
from .kripke import (
    Evaluator, PointedAction, ResourceCapError, SignatureError, execute_action_model,
    execute_arrow_update, prune_unreachable, state_label,
)
from .parser import ParseError
from .reduction import RewriteTrace, reduce
from .syntax import PointedUpdate, Quant, QuantDiamond, Update, children, to_text
from .synthesis import synthesize, update_depth

OK, FALSE, USAGE, CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _out(text: str):
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _header(args) -> list:
    return [f"seed: {args.seed}"]


def _workspace(args) -> Workspace:
    if args.workspace:
        return Workspace.load(args.workspace)
    return Workspace.builtin()


def _state(M, text: str):
    for s in M.states:
        if state_label(s) == text:
            return s
    raise UsageError(f"no state {text!r}; states are {', '.join(state_label(s) for s in M.states)}")


# -- commands ---------------------------------------------------------------------

def cmd_check(args) -> int:
    ws = _workspace(args)
    M = ws.lookup_model(args.model)
    s = _state(M, args.state)
    f = ws.formula(args.formula)
    M.check_signature(f)
    ev = Evaluator(M, args.quantifiers)
    value = s in ev.ext(f)
    if args.explain:
        rows = dict.fromkeys(_outer_subformulas(f))
        for g in sorted(rows, key=lambda g: (len(g.text), g.text)):
            _out(f"{'true ' if s in ev.ext(g) else 'false'}  {g}")
    _out("true" if value else "false")
    return OK if value else FALSE


def _outer_subformulas(f):
    """Subformulas outside update and quantifier scopes, which are about other models."""
    yield f
    if not isinstance(f, (Update, Quant, QuantDiamond)):
        for c in children(f):
            yield from _outer_subformulas(c)


def cmd_exec(args) -> int:
    ws = _workspace(args)
    M = ws.lookup_model(args.model)
    X = ws.lookup_update(args.update)
    if isinstance(X, PointedUpdate):
        P = execute_arrow_update(M, X.model, args.quantifiers)
    else:
        P = execute_action_model(M, X.model, args.quantifiers)
        if P.empty:
            _out("# no state survives: every precondition fails")
            return FALSE
    points = [(s, q) for s in M.states for q in X.points if (s, q) in set(P.states)]
    if args.prune:
        P = prune_unreachable(P, points)
    name = f"{args.model}_{args.update}"
    if args.dot:
        _out(to_dot(P, points, name))
    else:
        _out(dump(kripke_doc(P, name), _header(args)))
    return OK


def cmd_reduce(args) -> int:
    ws = _workspace(args)
    f = ws.formula(args.formula)
    trace = RewriteTrace() if args.trace else None
    g = reduce(f, trace)
    _out(to_text(g))
    if trace is not None:
        _out(str(trace))
    return OK


def cmd_synthesize(args) -> int:
    ws = _workspace(args)
    goal = ws.formula(args.formula)
    r = synthesize(goal, ml_conditions=args.ml_conditions)
    der = r.derivation
    if args.optimize:
        r = r.optimized()
    header = _header(args) + [f"goal: {to_text(goal)}",
                              f"outcomes: {len(r.model.outcomes)}, arrows: {len(r.model.arrows)}, "
                              f"depth: {update_depth(r.model, r.point)}"]
    if args.verify:
        ags, ats = signature_of(goal)
        fams = model_families(args.max_states, ags or ("a",), ats)
        left = reduce(QuantDiamond(goal))
        hit = disagreement(left, Update(r.model, r.point, goal), fams)
        if hit is not None:
            sys.stderr.write(f"verification failed at state {hit.state} of {hit.model}\n")
            return FALSE
        header.append(f"verified on all models with at most {args.max_states} states")
    _out(dump(update_doc(r.model, (r.point,), args.name), header))
    if args.trace:
        _out("\n".join("# " + line for line in der.lines()))
    return OK


def cmd_convert(args) -> int:
    ws = _workspace(args)
    X = ws.lookup_update(args.source)
    if args.direction == "to-action":
        if not isinstance(X, PointedUpdate):
            raise UsageError(f"{args.source!r} is not an arrow update")
        E, pts = conversion.arrow_to_action(X.model, X.points, prune=args.prune,
                                            prune_states=args.max_states)
        sys.stderr.write(f"stats: outcomes={len(X.model.outcomes)} "
                         f"conditions={len(conversion.condition_set(X.model))} actions={len(E.actions)}\n")
        _out(dump(action_doc(E, pts, f"{args.source}_action"), _header(args)))
    else:
        if not isinstance(X, PointedAction):
            raise UsageError(f"{args.source!r} is not an action model")
        U = conversion.action_to_arrow(X.model, f"{args.source}_arrows")
        sys.stderr.write(f"stats: actions={len(X.model.actions)} arrows={len(U.arrows)}\n")
        _out(dump(update_doc(U, X.points), _header(args)))
    return OK


def cmd_equiv(args) -> int:
    ws = _workspace(args)
    if args.relation in ("bisim", "refine"):
        if len(args.items) != 4:
            raise UsageError(f"equiv {args.relation} needs MODEL STATE MODEL STATE")
        M, N = ws.lookup_model(args.items[0]), ws.lookup_model(args.items[2])
        s, t = _state(M, args.items[1]), _state(N, args.items[3])
        check = bisimilar if args.relation == "bisim" else refines
        w = check(M, s, N, t)
        word = "bisimilar" if args.relation == "bisim" else "refines"
        if w is None:
            _out(f"not {word}")
            return FALSE
        _out(word)
        if args.explain:
            for x, y in sorted(w.pairs, key=lambda p: (state_label(p[0]), state_label(p[1]))):
                _out(f"  {state_label(x)} ~ {state_label(y)}")
        return OK
    if len(args.items) != 2:
        raise UsageError("equiv update needs two update names")
    X, Y = ws.lookup_update(args.items[0]), ws.lookup_update(args.items[1])
    v = update_equivalent_bounded(X, Y, max_states=args.max_states, frame=args.frame)
    _out(f"{v.kind} (checked {v.models_checked} models with at most {args.max_states} states)")
    if v.counterexample is not None:
        c = v.counterexample
        _out(f"counterexample at state {c.state}:")
        _out(dump(kripke_doc(c.model, "counterexample")))
    return OK if v.equivalent else FALSE


def cmd_scenario(args) -> int:
    ws = _workspace(args)
    phi = ws.formula(args.formula)
    agents = conversion.default_agents(args.agents)
    if args.kind in ("sceptical", "manipulative"):
        X = conversion.sceptical_update(agents, phi, manipulative=args.kind == "manipulative")
    elif args.kind == "attentive":
        X = conversion.attentive_update(agents, phi)
    else:
        E = conversion.lying_action_model(args.agents, phi, pattern=args.pattern)
        pts = conversion.lying_points(E, args.points)
        sys.stderr.write(f"stats: agents={args.agents} actions={len(E.actions)} edges={len(E.relations)}\n")
        _out(dump(action_doc(E, pts, E.name), _header(args)))
        return OK
    sys.stderr.write(f"stats: agents={args.agents} outcomes={len(X.model.outcomes)} "
                     f"arrows={len(X.model.arrows)}\n")
    _out(dump(update_doc(X.model, X.points, args.kind), _header(args)))
    return OK


def cmd_oracle(args) -> int:
    from .oracle import check_axioms
    from .generators import AXIOMS
    names = args.axioms or AXIOMS
    _out(f"# seed: {args.seed}")
    ok = True
    for r in check_axioms(names, args.count, args.seed, args.max_states):
        _out(r.line())
        ok = ok and r.ok
    return OK if ok else FALSE


# -- argument parsing -------------------------------------------------------------------

def _globals(p: argparse.ArgumentParser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--workspace", metavar="DIR", default=d(None),
                   help="directory of YAML documents (built-in fixtures are always available)")
    p.add_argument("--max-states", type=int, metavar="N", default=d(2),
                   help="size bound for model enumeration")
    p.add_argument("--seed", type=int, default=d(0), help="seed for randomised checks")
    p.add_argument("--trace", action="store_true", default=d(False),
                   help="print the rewrite trace or derivation")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aauml", description="Arrow updates, synthesis and reduction.")
    _globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, fn, help):
        p = sub.add_parser(name, help=help)
        _globals(p, suppress=True)
        p.set_defaults(fn=fn)
        return p

    quant = dict(choices=("reduce", "witness", "refinement"), default="reduce",
                 help="how quantifiers are decided")

    p = command("check", cmd_check, "evaluate a formula at a state")
    p.add_argument("model")
    p.add_argument("state")
    p.add_argument("formula")
    p.add_argument("--explain", action="store_true", help="print the truth value of every subformula")
    p.add_argument("--quantifiers", **quant)

    p = command("exec", cmd_exec, "execute an arrow update or action model")
    p.add_argument("model")
    p.add_argument("update")
    p.add_argument("--prune", action="store_true", help="keep only states reachable from the points")
    p.add_argument("--dot", action="store_true", help="print Graphviz text instead of YAML")
    p.add_argument("--quantifiers", **quant)

    p = command("reduce", cmd_reduce, "rewrite a formula into basic modal logic")
    p.add_argument("formula")

    p = command("synthesize", cmd_synthesize, "build an arrow update achieving a goal")
    p.add_argument("formula")
    p.add_argument("--optimize", action="store_true", help="merge outcomes with the same behaviour")
    p.add_argument("--ml-conditions", dest="ml_conditions", action="store_true", default=True,
                   help="write all conditions in basic modal logic (the default)")
    p.add_argument("--raw-conditions", dest="ml_conditions", action="store_false",
                   help="keep quantifiers and sub-updates in conditions, as constructed")
    p.add_argument("--verify", action="store_true", help="check the result on all small models first")
    p.add_argument("--name", default="synth", help="name of the emitted update document")

    p = command("convert", cmd_convert, "translate between arrow updates and action models")
    p.add_argument("direction", choices=("to-action", "to-arrow"))
    p.add_argument("source")
    p.add_argument("--prune", action="store_true",
                   help="drop actions whose precondition fails on all small models (best effort)")

    p = command("equiv", cmd_equiv, "bisimulation, refinement or bounded update equivalence")
    p.add_argument("relation", choices=("bisim", "refine", "update"))
    p.add_argument("items", nargs="+")
    p.add_argument("--explain", action="store_true", help="print the witnessing relation")
    p.add_argument("--frame", choices=("k", "kd45"), default="k", help="frame class for bounded update equivalence")

    p = command("scenario", cmd_scenario, "generate a standard update")
    p.add_argument("kind", choices=("sceptical", "manipulative", "attentive", "lying-action"))
    p.add_argument("--agents", type=int, default=2, help="number of agents")
    p.add_argument("--formula", default="p", help="the announced formula")
    p.add_argument("--pattern", choices=("figure", "general"), default="figure",
                   help="edge pattern of the lying action model")
    p.add_argument("--points", choices=("lie", "truth", "all"), default="lie",
                   help="designated actions of the lying action model")

    p = command("oracle", cmd_oracle, "check reduction axiom instances on small models")
    p.add_argument("what", choices=("axioms",))
    p.add_argument("--count", type=int, default=20, help="instances per axiom")
    p.add_argument("--axioms", nargs="*", choices=("U1", "U2", "U3", "U4", "A1", "A2", "A3", "A4"))
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.fn(args)
    except ParseError as e:
        sys.stderr.write(f"error: {e.pretty()}\n")
        return USAGE
    except ResourceCapError as e:
        sys.stderr.write(f"error: {e}\n")
        return CAP
    except (UsageError, DocumentError, SignatureError, KeyError, ValueError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        sys.stderr.write(f"error: {msg}\n")
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
