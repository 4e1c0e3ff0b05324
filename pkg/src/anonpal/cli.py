"""Command-line interface.

Exit codes: 0 for a true/positive verdict, 1 for false, negative or
inapplicable, 2 for usage, parse or validation errors.  Model arguments
name a model file; a bundled example (``fig1`` ... ``fig5``, optionally with
``.json``) is used when no such file exists.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from anonpal import fixtures, oracles
from anonpal.dot import to_dot
from anonpal.generators import FRAGMENTS, random_formula, random_model
from anonpal.model import (
    EpistemicModel, ModelError, PointedModel, are_bisimilar, build_model, load_model,
    model_to_spec, save_model,
)
from anonpal.reduce import eliminate_safe, reduce_anon, reduce_pal, reduce_sai
from anonpal.semantics import check_agents, extension, safe_ext
from anonpal.syntax import Formula, Safe, SafeAnonBox, parse_formula, print_formula, subformulas
from anonpal.updates import (
    anon_update, load_action_model, product, public_update, safe_anon_update,
)

TRUE, FALSE, ERROR = 0, 1, 2
UPDATE_OPS = ("public", "anon", "safeanon", "product")
REDUCE_TARGETS = ("pal", "anon", "sai", "safe-elim")
ORACLE_METHODS = ("gfp", "iter", "assign")


@dataclass
class Result:
    code: int
    text: str
    data: dict[str, Any] = field(default_factory=dict)


class _Warnings:
    """Emits each distinct warning at most once per run."""

    def __init__(self):
        self.seen: set[str] = set()

    def emit(self, message: str) -> None:
        if message not in self.seen:
            self.seen.add(message)
            print(f"warning: {message}", file=sys.stderr)


_warnings = _Warnings()


def _resolve_model(path: str) -> tuple[EpistemicModel, int | None]:
    if Path(path).exists():
        return load_model(path)
    try:
        spec = fixtures.figure_spec(Path(path).name)
    except KeyError:
        raise FileNotFoundError(f"no such model file: {path}") from None
    model = build_model(spec)
    return model, model.state_index(spec["point"])


def _formula(model: EpistemicModel, text: str) -> Formula:
    f = parse_formula(text, model.agents)
    check_agents(model, f)
    if len(model.agents) < 3 and any(isinstance(g, (Safe, SafeAnonBox)) for g in subformulas(f)):
        _warnings.emit("safety needs three agents; with fewer, safe ... is false everywhere")
    return f


def _sorted_names(model: EpistemicModel, states) -> list[str]:
    return sorted(model.names(states))


def cmd_check(model_file: str, state: str, formula: str) -> Result:
    model, _ = _resolve_model(model_file)
    f = _formula(model, formula)
    s = model.state_index(state)
    verdict = s in extension(model, f)
    return Result(TRUE if verdict else FALSE, "true" if verdict else "false",
                  {"state": state, "formula": print_formula(f), "verdict": verdict})


def cmd_extension(model_file: str, formula: str) -> Result:
    model, _ = _resolve_model(model_file)
    f = _formula(model, formula)
    names = _sorted_names(model, extension(model, f))
    return Result(TRUE, " ".join(names), {"formula": print_formula(f), "extension": names})


def cmd_update(
    model_file: str,
    op: str,
    formula: str | None = None,
    out_file: str | None = None,
    dot_file: str | None = None,
    action_file: str | None = None,
) -> Result:
    model, point = _resolve_model(model_file)
    if op == "product":
        if action_file is None:
            raise ValueError("the product update needs --action FILE")
        updated = product(model, load_action_model(action_file))
        new_point = None
    else:
        if op not in UPDATE_OPS:
            raise ValueError(f"unknown update {op!r}")
        if formula is None:
            raise ValueError(f"the {op} update needs a formula")
        f = _formula(model, formula)
        if op == "public":
            updated = public_update(model, f)
            keep = model.states[point] if point is not None else None
            new_point = keep if updated is not None and keep in updated.states else None
        else:
            updated = (anon_update if op == "anon" else safe_anon_update)(model, f)
            new_point = None
    if updated is None:
        return Result(FALSE, "inapplicable", {"applicable": False})
    spec = model_to_spec(updated, new_point)
    if out_file:
        save_model(updated, out_file, new_point)
    if dot_file:
        name = Path(out_file).stem if out_file else "updated"
        Path(dot_file).write_text(to_dot(updated, None if new_point is None else updated.state_index(new_point), name))
    data = {"applicable": True, "states": list(updated.states), "model": spec}
    if out_file:
        text = f"{updated.size} states: {' '.join(updated.states)}"
    else:
        text = json.dumps(spec, indent=2)
    return Result(TRUE, text, data)


def cmd_bisim(model_a: str, state_a: str, model_b: str, state_b: str) -> Result:
    left, _ = _resolve_model(model_a)
    right, _ = _resolve_model(model_b)
    verdict = are_bisimilar(left.pointed(state_a), right.pointed(state_b))
    return Result(TRUE if verdict else FALSE, "bisimilar" if verdict else "not bisimilar",
                  {"bisimilar": verdict})


def cmd_reduce(formula: str, target: str, agents: Sequence[str] = ("a", "b", "c")) -> Result:
    agents = tuple(agents)
    f = parse_formula(formula)
    if target == "pal":
        g = reduce_pal(f)
    elif target == "anon":
        g = reduce_anon(f, agents)
    elif target == "sai":
        g = reduce_sai(f, agents)
    elif target == "safe-elim":
        g = eliminate_safe(f)
    else:
        raise ValueError(f"unknown reduction target {target!r}")
    text = print_formula(g)
    return Result(TRUE, text, {"target": target, "input": print_formula(f), "output": text})


def cmd_oracle(model_file: str, formula: str, methods: Sequence[str] = ORACLE_METHODS,
               full_domain: bool = False) -> Result:
    """Evaluate safe(formula) with each selected method and compare."""
    model, _ = _resolve_model(model_file)
    f = _formula(model, formula)
    inner = extension(model, f)
    results = {}
    for method in methods:
        if method == "gfp":
            ext = safe_ext(model, inner)
        elif method == "iter":
            ext = oracles.safe_iterative(model, inner, model.size)
        elif method == "assign":
            ext = oracles.safe_assignment(model, inner, full_domain=full_domain)
        else:
            raise ValueError(f"unknown oracle method {method!r}")
        results[method] = _sorted_names(model, ext)
    agree = len({tuple(v) for v in results.values()}) <= 1
    lines = [f"{m}: {' '.join(v)}" for m, v in results.items()]
    lines.append("agree" if agree else "DISAGREE")
    return Result(TRUE if agree else FALSE, "\n".join(lines), {"results": results, "agree": agree})


def cmd_search_public(model_file: str, state: str, target: str, max_states: int = 8) -> Result:
    model, _ = _resolve_model(model_file)
    oracles.ensure_small(model, max_states)
    f = _formula(model, target)
    verdict = oracles.search_public_counterexample(model, model.state_index(state), f)
    witnesses = [_sorted_names(model, w) for w in verdict.witnesses]
    return _search_result(verdict.searched, [" ".join(w) or "{}" for w in witnesses], witnesses)


def cmd_search_anon(
    model_file: str,
    state: str | None,
    goal: PointedModel,
    max_states: int = 8,
) -> Result:
    model, _ = _resolve_model(model_file)
    oracles.ensure_small(model, max_states)
    point = None if state is None else model.state_index(state)
    verdict = oracles.search_anon_counterexample(model, goal, point)
    witnesses = [(_sorted_names(model, x), u) for x, u in verdict.witnesses]
    lines = [f"announce {{{' '.join(x)}}} at {u}" for x, u in witnesses]
    return _search_result(verdict.searched, lines, [{"announced": x, "point": u} for x, u in witnesses])


def _search_result(searched: int, lines: list[str], witnesses: list) -> Result:
    data = {"searched": searched, "witnesses": witnesses, "impossible": not witnesses}
    if not witnesses:
        return Result(FALSE, f"impossible ({searched} announcements searched)", data)
    return Result(TRUE, "\n".join([f"{len(witnesses)} witness(es):"] + lines), data)


def cmd_random(seed: int, max_states: int = 5, n_agents: int = 3, n_props: int = 2,
               depth: int = 3, fragment: str = "static", out_file: str | None = None) -> Result:
    rng = random.Random(seed)
    model = random_model(rng, rng.randint(1, max_states), n_agents, n_props)
    props = tuple(sorted(model.valuation)) or ("p",)
    f = random_formula(rng, depth, fragment, model.agents, props)
    spec = model_to_spec(model)
    data = {"seed": seed, "model": spec, "formula": print_formula(f)}
    if out_file:
        save_model(model, out_file)
        return Result(TRUE, print_formula(f), data)
    return Result(TRUE, json.dumps(data, indent=2), data)


def cmd_demo(figure: str) -> Result:
    names = fixtures.FIGURES if figure == "all" else (figure,)
    lines, report, ok = [], {}, True
    for name in names:
        checks = fixtures.run_checks(name)
        report[name] = [{"check": label, "pass": passed} for label, passed in checks]
        for label, passed in checks:
            ok &= passed
            lines.append(f"{'PASS' if passed else 'FAIL'} {name}: {label}")
    return Result(TRUE if ok else FALSE, "\n".join(lines), {"figures": report, "pass": ok})


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # SUPPRESS keeps a subcommand's default from clobbering a --json given before it
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="machine-readable output")
    parser = argparse.ArgumentParser(prog="anonpal", description=__doc__.splitlines()[0])
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="evaluate a formula at a state")
    p.add_argument("model")
    p.add_argument("state")
    p.add_argument("formula")

    p = sub.add_parser("extension", parents=[common], help="states where a formula holds")
    p.add_argument("model")
    p.add_argument("formula")

    p = sub.add_parser("update", parents=[common], help="apply an announcement or action model")
    p.add_argument("model")
    p.add_argument("op", choices=UPDATE_OPS)
    p.add_argument("formula", nargs="?")
    p.add_argument("--action", help="action-model file (for op 'product')")
    p.add_argument("--out", help="write the updated model here")
    p.add_argument("--dot", help="write a Graphviz rendering here")

    p = sub.add_parser("bisim", parents=[common], help="compare two pointed models")
    p.add_argument("model_a")
    p.add_argument("state_a")
    p.add_argument("model_b")
    p.add_argument("state_b")

    p = sub.add_parser("reduce", parents=[common], help="translate into a static fragment")
    p.add_argument("formula")
    p.add_argument("--target", required=True, choices=REDUCE_TARGETS)
    p.add_argument("--agents", default="a,b,c", help="comma-separated roster (default a,b,c)")
    p.add_argument("--model", help="take the roster from this model instead")

    p = sub.add_parser("oracle", parents=[common], help="compare the safety evaluators")
    p.add_argument("model")
    p.add_argument("formula", help="the formula under safe")
    p.add_argument("--method", action="append", choices=ORACLE_METHODS,
                   help="repeatable; default runs all three")
    p.add_argument("--full-domain", action="store_true",
                   help="let assignments range over every state")

    p = sub.add_parser("search", parents=[common], help="exhaustive announcement searches")
    kinds = p.add_subparsers(dest="kind", required=True)
    q = kinds.add_parser("public", parents=[common], help="public announcements making a formula true")
    q.add_argument("model")
    q.add_argument("state")
    q.add_argument("formula")
    q.add_argument("--max-states", type=int, default=8)
    q = kinds.add_parser("anon", parents=[common],
                         help="pseudo-anonymous announcements matching a pointed goal model")
    q.add_argument("model")
    q.add_argument("state", nargs="?", help="only try announcer points at this state")
    goal = q.add_mutually_exclusive_group(required=True)
    goal.add_argument("--goal-public", metavar="FORMULA",
                      help="goal: the public update of the model by FORMULA, at --goal-state")
    goal.add_argument("--goal", metavar="FILE", help="goal model file")
    q.add_argument("--goal-state", help="goal point (defaults to the goal file's point or STATE)")
    q.add_argument("--max-states", type=int, default=8)

    p = sub.add_parser("random", parents=[common], help="seeded random model and formula")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-states", type=int, default=5)
    p.add_argument("--agents", type=int, default=3)
    p.add_argument("--props", type=int, default=2)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--fragment", choices=sorted(FRAGMENTS), default="static")
    p.add_argument("--out", help="write the model here and print only the formula")

    p = sub.add_parser("demo", parents=[common], help="run the checks on a bundled example")
    p.add_argument("figure", help="fig1 ... fig5, or all")
    return parser


def _goal(args) -> PointedModel:
    if args.goal_public is not None:
        model, point = _resolve_model(args.model)
        updated = public_update(model, _formula(model, args.goal_public))
        if updated is None:
            raise ModelError("goal announcement is inapplicable")
        name = args.goal_state or args.state or (model.states[point] if point is not None else None)
        if name is None:
            raise ValueError("give --goal-state")
        return updated.pointed(name)
    model, point = _resolve_model(args.goal)
    if args.goal_state is not None:
        return model.pointed(args.goal_state)
    if point is None:
        raise ValueError("goal file has no point; give --goal-state")
    return PointedModel(model, point)


def dispatch(args) -> Result:
    c = args.command
    if c == "check":
        return cmd_check(args.model, args.state, args.formula)
    if c == "extension":
        return cmd_extension(args.model, args.formula)
    if c == "update":
        return cmd_update(args.model, args.op, args.formula, args.out, args.dot, args.action)
    if c == "bisim":
        return cmd_bisim(args.model_a, args.state_a, args.model_b, args.state_b)
    if c == "reduce":
        roster = _resolve_model(args.model)[0].agents if args.model else args.agents.split(",")
        return cmd_reduce(args.formula, args.target, [a.strip() for a in roster if a.strip()])
    if c == "oracle":
        return cmd_oracle(args.model, args.formula, args.method or ORACLE_METHODS, args.full_domain)
    if c == "search":
        if args.kind == "public":
            return cmd_search_public(args.model, args.state, args.formula, args.max_states)
        return cmd_search_anon(args.model, args.state, _goal(args), args.max_states)
    if c == "random":
        return cmd_random(args.seed, args.max_states, args.agents, args.props, args.depth,
                          args.fragment, args.out)
    if c == "demo":
        return cmd_demo(args.figure)
    raise AssertionError(c)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    _warnings.seen.clear()
    try:
        result = dispatch(args)
    except (OSError, ValueError, KeyError) as exc:
        message = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        if args.json:
            print(json.dumps({"error": str(message)}))
        print(f"error: {message}", file=sys.stderr)
        return ERROR
    if args.json:
        print(json.dumps(result.data | {"exit": result.code}, indent=2))
    elif result.text:
        print(result.text)
    return result.code


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
