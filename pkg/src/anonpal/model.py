"""Finite multi-agent S5 epistemic models.

Accessibility is stored as one partition per agent (a block id for every
state), so every relation is an equivalence by construction.  State sets are
plain ``frozenset`` objects of state indices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Iterable, Mapping, NamedTuple, Sequence

StateSet = frozenset


class ModelError(ValueError):
    """Raised when a model description violates an invariant."""


class AnnouncerTag(NamedTuple):
    """Origin of a state produced by an update: source state and announcer
    (or action point) index."""

    state: int
    agent: int


def _normalize_blocks(block_ids: Sequence[int]) -> tuple[int, ...]:
    # renumber by first occurrence so equal partitions compare equal
    seen: dict[int, int] = {}
    return tuple(seen.setdefault(b, len(seen)) for b in block_ids)


@dataclass(frozen=True)
class EpistemicModel:
    agents: tuple[str, ...]
    states: tuple[str, ...]
    partitions: tuple[tuple[int, ...], ...]
    valuation: Mapping[str, StateSet]
    origin: tuple[AnnouncerTag, ...] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        agents = tuple(self.agents)
        states = tuple(self.states)
        if not agents:
            raise ModelError("agent roster is empty")
        if len(set(agents)) != len(agents):
            raise ModelError("duplicate agent name")
        if not states:
            raise ModelError("empty state set")
        if len(set(states)) != len(states):
            raise ModelError("duplicate state name")
        if len(self.partitions) != len(agents):
            raise ModelError("expected one partition per agent")
        parts = []
        for name, ids in zip(agents, self.partitions):
            if len(ids) != len(states):
                raise ModelError(f"partition for {name!r} does not cover every state")
            parts.append(_normalize_blocks(ids))
        val = {}
        for prop, members in self.valuation.items():
            members = frozenset(members)
            if any(not 0 <= s < len(states) for s in members):
                raise ModelError(f"valuation of {prop!r} out of bounds")
            val[prop] = members
        if self.origin is not None and len(self.origin) != len(states):
            raise ModelError("origin tags must align with states")
        object.__setattr__(self, "agents", agents)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "partitions", tuple(parts))
        object.__setattr__(self, "valuation", val)

    def __eq__(self, other):
        if not isinstance(other, EpistemicModel):
            return NotImplemented
        return (
            self.agents == other.agents
            and self.states == other.states
            and self.partitions == other.partitions
            and _nonempty(self.valuation) == _nonempty(other.valuation)
        )

    __hash__ = None

    @property
    def size(self) -> int:
        return len(self.states)

    @property
    def all_states(self) -> StateSet:
        return frozenset(range(len(self.states)))

    @cached_property
    def _agent_index(self) -> dict[str, int]:
        return {a: i for i, a in enumerate(self.agents)}

    @cached_property
    def _state_index(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.states)}

    @cached_property
    def _blocks(self) -> tuple[tuple[StateSet, ...], ...]:
        # per agent: the block containing each state
        result = []
        for ids in self.partitions:
            groups: dict[int, set[int]] = {}
            for s, b in enumerate(ids):
                groups.setdefault(b, set()).add(s)
            frozen = {b: frozenset(g) for b, g in groups.items()}
            result.append(tuple(frozen[b] for b in ids))
        return tuple(result)

    def agent_index(self, agent: str) -> int:
        try:
            return self._agent_index[agent]
        except KeyError:
            raise ModelError(f"unknown agent {agent!r}") from None

    def state_index(self, state: str | int) -> int:
        if isinstance(state, int):
            if not 0 <= state < len(self.states):
                raise ModelError(f"state index {state} out of range")
            return state
        try:
            return self._state_index[state]
        except KeyError:
            raise ModelError(f"unknown state {state!r}") from None

    def state_set(self, names: Iterable[str | int]) -> StateSet:
        return frozenset(self.state_index(n) for n in names)

    def names(self, states: Iterable[int]) -> list[str]:
        return [self.states[s] for s in sorted(states)]

    def block(self, agent: int | str, state: int) -> StateSet:
        if isinstance(agent, str):
            agent = self.agent_index(agent)
        return self._blocks[agent][state]

    def blocks(self, agent: int | str) -> list[StateSet]:
        """Blocks of an agent's partition, ordered by their least state."""
        if isinstance(agent, str):
            agent = self.agent_index(agent)
        return sorted(set(self._blocks[agent]), key=min)

    def truth(self, prop: str) -> StateSet:
        return self.valuation.get(prop, frozenset())

    def props_at(self, state: int) -> frozenset[str]:
        return frozenset(p for p, ext in self.valuation.items() if state in ext)

    def related(self, agent: int | str, s: int, t: int) -> bool:
        if isinstance(agent, str):
            agent = self.agent_index(agent)
        return self.partitions[agent][s] == self.partitions[agent][t]

    def pointed(self, state: str | int) -> PointedModel:
        return PointedModel(self, self.state_index(state))


def _nonempty(valuation: Mapping[str, StateSet]) -> dict[str, StateSet]:
    return {p: v for p, v in valuation.items() if v}


@dataclass(frozen=True)
class PointedModel:
    model: EpistemicModel
    point: int

    def __post_init__(self):
        if not 0 <= self.point < self.model.size:
            raise ModelError(f"point {self.point} is not a state of the model")

    @property
    def name(self) -> str:
        return self.model.states[self.point]


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)


def partition_from_blocks(n: int, blocks: Iterable[Iterable[int]], agent: str = "?") -> list[int]:
    ids = [-1] * n
    for b, block in enumerate(blocks):
        block = list(block)
        if not block:
            raise ModelError(f"empty block for agent {agent!r}")
        for s in block:
            if ids[s] != -1:
                raise ModelError(f"block overlap for agent {agent!r}")
            ids[s] = b
    if -1 in ids:
        raise ModelError(f"block gap for agent {agent!r}: some state is in no block")
    return ids


def partition_from_edges(n: int, edges: Iterable[tuple[int, int]]) -> list[int]:
    """Close an undirected edge list to an equivalence (block ids per state)."""
    uf = _UnionFind(n)
    for s, t in edges:
        uf.union(s, t)
    return list(_normalize_blocks([uf.find(s) for s in range(n)]))


def partition_from_relation(n: int, related) -> list[int]:
    """Block ids of the relation ``related(s, t)``, verifying it is an
    equivalence first.

    Raises ModelError if the relation is not reflexive, symmetric and
    transitive.
    """
    rows = [frozenset(t for t in range(n) if related(s, t)) for s in range(n)]
    for s, row in enumerate(rows):
        if s not in row:
            raise ModelError(f"relation is not reflexive at state {s}")
        for t in row:
            # symmetric + transitive iff every member has the same row
            if rows[t] != row:
                raise ModelError(f"relation is not an equivalence between {s} and {t}")
    ids: dict[frozenset, int] = {}
    return [ids.setdefault(row, len(ids)) for row in rows]


def build_model(spec: Mapping[str, Any]) -> EpistemicModel:
    """Build a validated model from its JSON-shaped description.

    ``relations`` gives per-agent blocks (which must cover every state),
    ``edges`` gives per-agent edge pairs closed to an equivalence; agents
    appearing in neither get the identity partition.
    """
    try:
        agents = list(spec["agents"])
        states = list(spec["states"])
    except KeyError as exc:
        raise ModelError(f"model description lacks {exc.args[0]!r}") from None
    if not states:
        raise ModelError("empty state set")
    if len(set(agents)) != len(agents):
        raise ModelError("duplicate agent name")
    if len(set(states)) != len(states):
        raise ModelError("duplicate state name")
    index = {s: i for i, s in enumerate(states)}

    def idx(name: str) -> int:
        if name not in index:
            raise ModelError(f"unknown state {name!r}")
        return index[name]

    relations = spec.get("relations") or {}
    edges = spec.get("edges") or {}
    for a in list(relations) + list(edges):
        if a not in agents:
            raise ModelError(f"unknown agent {a!r}")
    partitions = []
    for a in agents:
        if a in relations and a in edges:
            raise ModelError(f"agent {a!r} has both relations and edges")
        if a in relations:
            blocks = [[idx(s) for s in block] for block in relations[a]]
            partitions.append(partition_from_blocks(len(states), blocks, a))
        elif a in edges:
            pairs = []
            for pair in edges[a]:
                if len(pair) != 2:
                    raise ModelError(f"edge for {a!r} must be a pair")
                pairs.append((idx(pair[0]), idx(pair[1])))
            partitions.append(partition_from_edges(len(states), pairs))
        else:
            partitions.append(list(range(len(states))))

    valuation: dict[str, set[int]] = {}
    for state, props in (spec.get("valuation") or {}).items():
        s = idx(state)
        for p in props:
            valuation.setdefault(p, set()).add(s)
    for p in spec.get("props", []):
        valuation.setdefault(p, set())
    if "point" in spec and spec["point"] is not None:
        idx(spec["point"])
    return EpistemicModel(
        tuple(agents), tuple(states), tuple(tuple(p) for p in partitions),
        {p: frozenset(v) for p, v in valuation.items()},
    )


def model_to_spec(model: EpistemicModel, point: int | str | None = None) -> dict[str, Any]:
    """Inverse of :func:`build_model`; every agent's blocks are listed in full."""
    spec: dict[str, Any] = {
        "agents": list(model.agents),
        "states": list(model.states),
        "valuation": {
            model.states[s]: sorted(model.props_at(s))
            for s in range(model.size) if model.props_at(s)
        },
        "relations": {
            a: [model.names(b) for b in model.blocks(i)]
            for i, a in enumerate(model.agents)
        },
    }
    empty = sorted(p for p, v in model.valuation.items() if not v)
    if empty:
        spec["props"] = empty
    if point is not None:
        spec["point"] = model.states[model.state_index(point)]
    return spec


def load_model(path: str | Path) -> tuple[EpistemicModel, int | None]:
    """Read a model file; returns the model and its designated point, if any."""
    with open(path) as fh:
        spec = json.load(fh)
    model = build_model(spec)
    point = spec.get("point")
    return model, (model.state_index(point) if point is not None else None)


def save_model(model: EpistemicModel, path: str | Path, point: int | str | None = None) -> None:
    with open(path, "w") as fh:
        json.dump(model_to_spec(model, point), fh, indent=2)
        fh.write("\n")


def restrict(model: EpistemicModel, keep: Iterable[int]) -> EpistemicModel:
    """Submodel on ``keep`` with induced partitions and valuation."""
    keep = sorted(set(keep))
    if not keep:
        raise ModelError("inapplicable restriction: empty state set")
    pos = {s: i for i, s in enumerate(keep)}
    return EpistemicModel(
        model.agents,
        tuple(model.states[s] for s in keep),
        tuple(tuple(ids[s] for s in keep) for ids in model.partitions),
        {p: frozenset(pos[s] for s in v if s in pos) for p, v in model.valuation.items()},
    )


def _refine(models: Sequence[EpistemicModel]) -> list[list[int]]:
    """Coarsest bisimulation on the disjoint union of ``models``.

    Returns, per model, the class number of each state.
    """
    agents = models[0].agents
    for m in models[1:]:
        if set(m.agents) != set(agents):
            raise ModelError("bisimulation requires the same agent roster")
    props = sorted({p for m in models for p in m.valuation})
    # initial split: atoms
    atoms: dict[tuple, int] = {}
    classes = [
        [atoms.setdefault(tuple(s in m.truth(p) for p in props), len(atoms)) for s in range(m.size)]
        for m in models
    ]
    count = len(atoms)
    while True:
        sigs: dict[tuple, int] = {}
        refined = []
        for m, cls in zip(models, classes):
            row = []
            for s in range(m.size):
                sig = (cls[s],) + tuple(
                    frozenset(cls[t] for t in m.block(a, s)) for a in agents
                )
                row.append(sigs.setdefault(sig, len(sigs)))
            refined.append(row)
        classes = refined
        if len(sigs) == count:
            return classes
        count = len(sigs)


def are_bisimilar(left: PointedModel, right: PointedModel) -> bool:
    cls = _refine([left.model, right.model])
    return cls[0][left.point] == cls[1][right.point]


def bisim_classes(model: EpistemicModel) -> list[StateSet]:
    """Coarsest auto-bisimulation, as classes ordered by least member."""
    (cls,) = _refine([model])
    groups: dict[int, set[int]] = {}
    for s, c in enumerate(cls):
        groups.setdefault(c, set()).add(s)
    return sorted((frozenset(g) for g in groups.values()), key=min)
