"""The bundled example models (fig1 ... fig5) and the checks ``demo`` runs on them."""

from __future__ import annotations

import json
from importlib import resources
from itertools import combinations
from typing import Callable

from anonpal.model import EpistemicModel, PointedModel, are_bisimilar, build_model, restrict
from anonpal.oracles import search_anon_counterexample, search_public_counterexample
from anonpal.semantics import extension, satisfies
from anonpal.syntax import parse_formula
from anonpal.updates import anon_update, public_update, safe_anon_update

FIGURES = ("fig1", "fig2", "fig3", "fig4", "fig5")

# the long formula that no public announcement makes true at s of fig1
FIG1_VERBOSE = "r & ~K{a}~q & ~K{b}~K{a}(~q & r) & K{b} p"
FIG1_BODY = "~K{b}~(r & K{a}~q)"


def figure_spec(name: str) -> dict:
    name = name.removesuffix(".json")
    if name not in FIGURES:
        raise KeyError(f"unknown figure {name!r}; choose from {', '.join(FIGURES)}")
    text = resources.files("anonpal").joinpath("figures").joinpath(f"{name}.json").read_text()
    return json.loads(text)


def load_figure(name: str) -> tuple[EpistemicModel, int]:
    """The figure's model and its designated point."""
    spec = figure_spec(name)
    model = build_model(spec)
    return model, model.state_index(spec["point"])


def _holds(model: EpistemicModel, state: str, text: str) -> bool:
    return satisfies(model.pointed(state), parse_formula(text, model.agents))


def _names(model, text):
    return set(model.names(extension(model, parse_formula(text, model.agents))))


def _fig1() -> list[tuple[str, bool]]:
    m, _ = load_figure("fig1")
    p = parse_formula("p")
    somebody = parse_formula("K{a} p | K{b} p | K{c} p")
    checks = [
        (f"[anon p] {FIG1_BODY} at s", _holds(m, "s", f"[anon p] {FIG1_BODY}")),
        (f"not [!p] {FIG1_BODY} at s", not _holds(m, "s", f"[!p] {FIG1_BODY}")),
        (
            f"not [!(K{{a}} p | K{{b}} p | K{{c}} p)] {FIG1_BODY} at s",
            not _holds(m, "s", f"[!(K{{a}} p | K{{b}} p | K{{c}} p)] {FIG1_BODY}"),
        ),
        ("not [anon p] K{a} r at s", not _holds(m, "s", "[anon p] K{a} r")),
    ]
    anon = anon_update(m, p)
    checks.append(("anon p update has states (u,a) (s,a) (s,c) (v,c)",
                   set(anon.states) == {"(u,a)", "(s,a)", "(s,c)", "(v,c)"}))
    points = [public_update(m, p).pointed("s"), public_update(m, somebody).pointed("s")]
    points += [PointedModel(anon, u) for u, tag in enumerate(anon.origin) if m.states[tag.state] == "s"]
    distinct = all(not are_bisimilar(x, y) for x, y in combinations(points, 2))
    checks.append(("p!, anon p and (somebody knows p)! pairwise non-bisimilar at s", distinct))
    verdict = search_public_counterexample(m, m.state_index("s"), parse_formula(FIG1_VERBOSE))
    checks.append(("no public announcement makes the long formula true at s", verdict.impossible))
    wit = anon.state_index("(s,a)") in extension(anon, parse_formula(FIG1_VERBOSE))
    checks.append(("long formula true at (s,a) after anon p", wit))
    return checks


def _fig2() -> list[tuple[str, bool]]:
    m, _ = load_figure("fig2")
    p = parse_formula("p")
    upd = anon_update(m, p)
    linked = upd is not None and set(upd.states) == {"(s,a)", "(s,c)"} and upd.related(
        "b", upd.state_index("(s,a)"), upd.state_index("(s,c)"))
    return [
        ("safe p is empty", not _names(m, "safe p")),
        ("anon p update is (s,a) and (s,c), linked for b", linked),
        ("safe anonymous announcement of p inapplicable", safe_anon_update(m, p) is None),
    ]


def _fig3() -> list[tuple[str, bool]]:
    m, _ = load_figure("fig3")
    return [
        ("safe p is empty", not _names(m, "safe p")),
        ("safe anonymous announcement of p inapplicable", safe_anon_update(m, parse_formula("p")) is None),
    ]


def _fig4() -> list[tuple[str, bool]]:
    m, _ = load_figure("fig4")
    p = parse_formula("p")
    upd = safe_anon_update(m, p)
    expected = {"(v,a)", "(v,b)", "(v,c)", "(w,a)", "(w,b)", "(w,d)"}
    sub = restrict(m, m.state_set(["v", "w"]))
    bisim = upd is not None and all(
        are_bisimilar(PointedModel(upd, u), sub.pointed(m.states[tag.state]))
        for u, tag in enumerate(upd.origin)
    )
    return [
        ("safe p is exactly {v, w}", _names(m, "safe p") == {"v", "w"}),
        ("safe p false at s, t, u", not any(_holds(m, x, "safe p") for x in "stu")),
        ("K{a} safe p at v", _holds(m, "v", "K{a} safe p")),
        ("safe anonymous update has the six expected states",
         upd is not None and set(upd.states) == expected),
        ("[safeanon p] K{c} K{d} q at v", _holds(m, "v", "[safeanon p] K{c} K{d} q")),
        ("each updated point bisimilar to the {v, w} submodel", bisim),
    ]


def _fig5() -> list[tuple[str, bool]]:
    m, point = load_figure("fig5")
    goal = public_update(m, parse_formula("p")).pointed("s")
    at_s = search_anon_counterexample(m, goal, point)
    anywhere = search_anon_counterexample(m, goal)
    return [
        ("no pseudo-anonymous update at s matches p! at s", at_s.impossible),
        ("no pseudo-anonymous update at any point matches p! at s", anywhere.impossible),
    ]


FIGURE_CHECKS: dict[str, Callable[[], list[tuple[str, bool]]]] = {
    "fig1": _fig1, "fig2": _fig2, "fig3": _fig3, "fig4": _fig4, "fig5": _fig5,
}


def run_checks(name: str) -> list[tuple[str, bool]]:
    name = name.removesuffix(".json")
    if name not in FIGURE_CHECKS:
        raise KeyError(f"unknown figure {name!r}; choose from {', '.join(FIGURES)}")
    return FIGURE_CHECKS[name]()
