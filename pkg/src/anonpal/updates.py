"""Model updates: public, pseudo-anonymous and safe anonymous announcements,
and action-model products.

An update that has no admissible state returns ``None`` ("inapplicable");
box semantics treat that as vacuous truth.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Any, Mapping, Sequence

from anonpal.model import (
    AnnouncerTag, EpistemicModel, ModelError, PointedModel, StateSet,
    _normalize_blocks, partition_from_blocks, partition_from_edges, partition_from_relation,
    restrict,
)
from anonpal.semantics import extension, knows_ext, safe_ext
from anonpal.syntax import ActionProgram, Formula, Knows, parse_formula, print_formula

__all__ = [
    "ActionModel", "public_update", "anon_update", "safe_anon_update", "product",
    "product_update", "anon_action_model", "audit_anonymity", "restrict",
    "build_action_model", "action_model_to_spec", "load_action_model",
]


@dataclass(frozen=True)
class ActionModel:
    agents: tuple[str, ...]
    points: tuple[str, ...]
    partitions: tuple[tuple[int, ...], ...]
    pre: tuple[Formula, ...]
    name: str = "A"

    def __post_init__(self):
        agents, points = tuple(self.agents), tuple(self.points)
        if not points:
            raise ModelError("action model needs at least one point")
        if len(set(points)) != len(points) or len(set(agents)) != len(agents):
            raise ModelError("duplicate name in action model")
        if len(self.partitions) != len(agents) or len(self.pre) != len(points):
            raise ModelError("action model partitions/preconditions do not line up")
        parts = []
        for ids in self.partitions:
            if len(ids) != len(points):
                raise ModelError("action partition does not cover every point")
            parts.append(_normalize_blocks(ids))
        object.__setattr__(self, "agents", agents)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "partitions", tuple(parts))
        object.__setattr__(self, "pre", tuple(self.pre))

    @cached_property
    def _point_index(self) -> dict[str, int]:
        return {x: i for i, x in enumerate(self.points)}

    def point_index(self, point: str | int) -> int:
        if isinstance(point, int):
            if not 0 <= point < len(self.points):
                raise ModelError(f"action point {point} out of range")
            return point
        try:
            return self._point_index[point]
        except KeyError:
            raise ModelError(f"unknown action point {point!r}") from None

    def related(self, agent: str, x: int, y: int) -> bool:
        ids = self.partitions[self.agents.index(agent)]
        return ids[x] == ids[y]

    def program(self, *points: str) -> ActionProgram:
        """Union of the given points (all points when none are given)."""
        return ActionProgram(self, points or self.points)


def anon_action_model(roster: Sequence[str], announced: Formula) -> ActionModel:
    """Pseudo-anonymous action model: one point per agent with precondition
    K_a(announced); agent b tells its own point apart from all others."""
    roster = tuple(roster)
    if not roster:
        raise ModelError("roster must be non-empty")
    parts = []
    for b in roster:
        parts.append(tuple(0 if x == b else 1 for x in roster))
    return ActionModel(
        roster, roster, tuple(parts), tuple(Knows(a, announced) for a in roster),
        name=f"anon({print_formula(announced)})",
    )


def public_update(model: EpistemicModel, announced: Formula) -> EpistemicModel | None:
    keep = extension(model, announced)
    if not keep:
        return None
    return restrict(model, keep)


def _announcer_update(model: EpistemicModel, admissible: Sequence[StateSet]) -> EpistemicModel | None:
    """States (s, a) for s in ``admissible[a]``; (s,a) ~c (t,b) iff s ~c t and
    (a = c iff b = c)."""
    tags = [
        AnnouncerTag(s, a)
        for s in range(model.size)
        for a in range(len(model.agents))
        if s in admissible[a]
    ]
    if not tags:
        return None
    partitions = []
    for c in range(len(model.agents)):
        def rel(x, y, c=c):
            (s, a), (t, b) = tags[x], tags[y]
            return model.related(c, s, t) and ((a == c) == (b == c))
        partitions.append(tuple(partition_from_relation(len(tags), rel)))
    names = tuple(f"({model.states[s]},{model.agents[a]})" for s, a in tags)
    valuation = {
        p: frozenset(u for u, tag in enumerate(tags) if tag.state in ext)
        for p, ext in model.valuation.items()
    }
    return EpistemicModel(model.agents, names, tuple(partitions), valuation, origin=tuple(tags))


def anon_update(model: EpistemicModel, announced: Formula) -> EpistemicModel | None:
    """Pseudo-anonymous announcement: announcer a is admissible at s iff
    M, s |= K_a(announced)."""
    ext = extension(model, announced)
    return _announcer_update(model, [knows_ext(model, a, ext) for a in range(len(model.agents))])


def safe_anon_update(model: EpistemicModel, announced: Formula) -> EpistemicModel | None:
    """Safe anonymous announcement: announcer a is admissible at s iff a knows
    the announcement is safe there."""
    safe = safe_ext(model, extension(model, announced))
    return _announcer_update(model, [knows_ext(model, a, safe) for a in range(len(model.agents))])


def product(model: EpistemicModel, action: ActionModel) -> EpistemicModel | None:
    """Full product update M x A; origin tags record (state, action point)."""
    try:
        agent_map = [action.agents.index(a) for a in model.agents]
    except ValueError:
        raise ModelError("action model roster does not match the epistemic model") from None
    pre_ext = [extension(model, pre) for pre in action.pre]
    tags = [
        AnnouncerTag(s, x)
        for s in range(model.size)
        for x in range(len(action.points))
        if s in pre_ext[x]
    ]
    if not tags:
        return None
    partitions = []
    for i, j in enumerate(agent_map):
        ids: dict[tuple[int, int], int] = {}
        partitions.append(tuple(
            ids.setdefault((model.partitions[i][s], action.partitions[j][x]), len(ids))
            for s, x in tags
        ))
    names = tuple(f"({model.states[s]},{action.points[x]})" for s, x in tags)
    valuation = {
        p: frozenset(u for u, tag in enumerate(tags) if tag.state in ext)
        for p, ext in model.valuation.items()
    }
    return EpistemicModel(model.agents, names, tuple(partitions), valuation, origin=tuple(tags))


def product_update(pointed: PointedModel, program: ActionProgram) -> list[PointedModel]:
    """One pointed result per program point whose precondition holds at the point."""
    updated = product(pointed.model, program.action_model)
    if updated is None:
        return []
    where = {tag: u for u, tag in enumerate(updated.origin)}
    results = []
    for x in program.points:
        tag = AnnouncerTag(pointed.point, program.action_model.point_index(x))
        if tag in where:
            results.append(PointedModel(updated, where[tag]))
    return results


def audit_anonymity(updated: EpistemicModel) -> list[tuple[int, int]]:
    """(state, agent) pairs where a non-announcer can identify the announcer.

    Checks that for every state (s, a) and every agent i != a there is an
    i-indistinguishable state with a different announcer.
    """
    if updated.origin is None:
        raise ValueError("model carries no announcer tags")
    violations = []
    for u, tag in enumerate(updated.origin):
        for i in range(len(updated.agents)):
            if i == tag.agent:
                continue
            if not any(updated.origin[v].agent != tag.agent for v in updated.block(i, u)):
                violations.append((u, i))
    return violations


def build_action_model(spec: Mapping[str, Any], name: str = "A") -> ActionModel:
    """Action-model file format: like a model file, with ``points`` (or
    ``states``) and ``pre`` mapping point name to formula text."""
    agents = list(spec["agents"])
    points = list(spec.get("points", spec.get("states", [])))
    if not points:
        raise ModelError("action model needs at least one point")
    index = {x: i for i, x in enumerate(points)}

    def idx(x):
        if x not in index:
            raise ModelError(f"unknown action point {x!r}")
        return index[x]

    relations = spec.get("relations") or {}
    edges = spec.get("edges") or {}
    partitions = []
    for a in agents:
        if a in relations:
            blocks = [[idx(x) for x in block] for block in relations[a]]
            partitions.append(tuple(partition_from_blocks(len(points), blocks, a)))
        elif a in edges:
            pairs = [(idx(x), idx(y)) for x, y in edges[a]]
            partitions.append(tuple(partition_from_edges(len(points), pairs)))
        else:
            partitions.append(tuple(range(len(points))))
    raw_pre = spec.get("pre") or {}
    for x in raw_pre:
        idx(x)
    pre = tuple(parse_formula(raw_pre.get(x, "true"), agents) for x in points)
    return ActionModel(tuple(agents), tuple(points), tuple(partitions), pre, spec.get("name", name))


def action_model_to_spec(action: ActionModel) -> dict[str, Any]:
    def blocks(ids):
        groups: dict[int, list[str]] = {}
        for x, b in enumerate(ids):
            groups.setdefault(b, []).append(action.points[x])
        return list(groups.values())

    return {
        "name": action.name,
        "agents": list(action.agents),
        "points": list(action.points),
        "pre": {x: print_formula(f) for x, f in zip(action.points, action.pre)},
        "relations": {a: blocks(ids) for a, ids in zip(action.agents, action.partitions)},
    }


def load_action_model(path: str | Path) -> ActionModel:
    with open(path) as fh:
        spec = json.load(fh)
    return build_action_model(spec, name=Path(path).stem)
