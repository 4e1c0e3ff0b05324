"""Brute-force semantics used to cross-check the main evaluators, and the
exhaustive enumerations behind the update-incomparability experiments.

Nothing here calls :func:`anonpal.semantics.safe_ext` or the E_G helpers;
the ▲ oracles recompute everything from the partitions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product

from anonpal.generators import random_formula, random_model  # noqa: F401  (re-exported)
from anonpal.model import (
    AnnouncerTag, EpistemicModel, ModelError, PointedModel, StateSet, are_bisimilar, bisim_classes, restrict,
)
from anonpal.semantics import extension
from anonpal.syntax import Formula

ASSIGNMENT_LIMIT = 10**7
SUBSET_LIMIT = 2**16


class OracleTooLarge(ValueError):
    """Raised when an exhaustive search exceeds its hard size guard."""


def _triples(model: EpistemicModel) -> list[tuple[int, ...]]:
    return list(combinations(range(len(model.agents)), 3))


def _all_know(model: EpistemicModel, group, s: int, target: StateSet) -> bool:
    return all(t in target for i in group for t in model.block(i, s))


def safe_iterative(model: EpistemicModel, states: StateSet, n: int) -> StateSet:
    """n-th approximant of safety: level 0 is ``states``; level k+1 keeps the
    states of ``states`` where some triple all know level k."""
    if n < 0:
        raise ValueError("n must be non-negative")
    groups = _triples(model)
    level = frozenset(states)
    for _ in range(n):
        level = frozenset(
            s for s in states if any(_all_know(model, g, s, level) for g in groups)
        )
    return level


def _bits(states) -> int:
    mask = 0
    for s in states:
        mask |= 1 << s
    return mask


def safe_assignment(model: EpistemicModel, states: StateSet, *, full_domain: bool = False) -> StateSet:
    """Safety via group assignment functions.

    s is safe iff some assignment f (state -> triple or none) with f(s) set,
    closed under the chosen agents' relations, makes every state reachable
    from s by f-consistent steps lie in ``states``.

    By default f is only varied on ``states`` (f is none elsewhere): any
    witness can be cut down to the states it reaches, which all lie in
    ``states``.  ``full_domain=True`` enumerates f over every state.
    """
    groups = _triples(model)
    n = model.size
    if (len(groups) + 1) ** n > ASSIGNMENT_LIMIT:
        raise OracleTooLarge("oracle too large: group assignment space exceeds guard")
    if not groups:
        return frozenset()
    # need[s][g]: states reachable from s in one step of group g
    need = [
        [_bits(t for i in g for t in model.block(i, s)) for g in groups]
        for s in range(n)
    ]
    target = _bits(states)
    domain = list(range(n)) if full_domain else sorted(states)
    choices = [None] + list(range(len(groups)))
    found = 0
    for values in product(choices, repeat=len(domain)):
        f = dict(zip(domain, values))
        support = _bits(s for s, g in f.items() if g is not None)
        if not support or support & ~found == 0:
            continue
        if any(g is not None and need[s][g] & ~support for s, g in f.items()):
            continue  # not closed
        for s, g in f.items():
            if g is None or found >> s & 1:
                continue
            reach, frontier = 1 << s, [s]
            while frontier:
                u = frontier.pop()
                step = need[u][f[u]] & ~reach
                reach |= step
                frontier.extend(t for t in range(n) if step >> t & 1)
            if reach & ~target == 0:
                found |= 1 << s
        if found == target:
            break
    return frozenset(s for s in range(n) if found >> s & 1)


def definable_subsets(model: EpistemicModel) -> list[StateSet]:
    """Every union of bisimulation classes, smallest first."""
    classes = bisim_classes(model)
    if 2 ** len(classes) > SUBSET_LIMIT:
        raise OracleTooLarge("oracle too large: too many bisimulation classes")
    subsets = []
    for k in range(len(classes) + 1):
        for combo in combinations(classes, k):
            subsets.append(frozenset().union(*combo))
    return subsets


@dataclass
class Verdict:
    """Result of an exhaustive search; ``witnesses`` empty means impossible."""

    searched: int
    witnesses: list = field(default_factory=list)

    @property
    def impossible(self) -> bool:
        return not self.witnesses


def search_public_counterexample(model: EpistemicModel, point: int, target: Formula) -> Verdict:
    """Every definable announcement extension X (containing the point) after
    whose public announcement ``target`` holds at the point."""
    verdict = Verdict(0)
    for keep in definable_subsets(model):
        if point not in keep:
            continue
        verdict.searched += 1
        sub = restrict(model, keep)
        if sorted(keep).index(point) in extension(sub, target):
            verdict.witnesses.append(keep)
    return verdict


def induced_anon_update(model: EpistemicModel, announced: StateSet) -> EpistemicModel | None:
    """Pseudo-anonymous update for an announcement with extension ``announced``,
    built directly from the relation definition."""
    tags = [
        (s, a) for s in range(model.size) for a in range(len(model.agents))
        if model.block(a, s) <= announced
    ]
    if not tags:
        return None
    partitions = []
    for c in range(len(model.agents)):
        ids: dict[frozenset, int] = {}
        row_ids = []
        for s, a in tags:
            row = frozenset(
                v for v, (t, b) in enumerate(tags)
                if model.related(c, s, t) and ((a == c) == (b == c))
            )
            row_ids.append(ids.setdefault(row, len(ids)))
        partitions.append(tuple(row_ids))
    names = tuple(f"({model.states[s]},{model.agents[a]})" for s, a in tags)
    valuation = {
        p: frozenset(v for v, (s, _) in enumerate(tags) if s in ext)
        for p, ext in model.valuation.items()
    }
    origin = tuple(AnnouncerTag(s, a) for s, a in tags)
    return EpistemicModel(model.agents, names, tuple(partitions), valuation, origin=origin)


def search_anon_counterexample(
    model: EpistemicModel, goal: PointedModel, point: int | None = None
) -> Verdict:
    """Every (X, announcer point) whose pseudo-anonymous update is bisimilar
    to ``goal``.  With ``point`` given only announcer points (point, a) are
    tried, i.e. updates of the pointed model at ``point``."""
    verdict = Verdict(0)
    for announced in definable_subsets(model):
        updated = induced_anon_update(model, announced)
        verdict.searched += 1
        if updated is None:
            continue
        for u, tag in enumerate(updated.origin):
            if point is not None and tag.state != point:
                continue
            if are_bisimilar(PointedModel(updated, u), goal):
                verdict.witnesses.append((announced, updated.states[u]))
    return verdict


def ensure_small(model: EpistemicModel, max_states: int) -> None:
    if model.size > max_states:
        raise ModelError(f"model has {model.size} states; limit is {max_states}")
