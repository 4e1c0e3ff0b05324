"""Extension-based model checking.

``extension(M, f)`` returns the set of state indices where ``f`` holds.
Dynamic boxes are evaluated on the updated models built in
:mod:`anonpal.updates`.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable

from anonpal.model import EpistemicModel, ModelError, PointedModel, StateSet, _UnionFind, restrict
from anonpal.syntax import (
    AnonBox, AnonByBox, And, Atom, Bot, CommonKnows, EveryoneKnows, Formula, Iff,
    Implies, Knows, Not, Or, ProgramBox, PublicBox, Safe, SafeAnonBox, Top,
)


def _agent_ids(model: EpistemicModel, group: Iterable[str | int]) -> list[int]:
    ids = [g if isinstance(g, int) else model.agent_index(g) for g in group]
    if not ids:
        raise ValueError("agent group must be non-empty")
    return ids


def triples(model: EpistemicModel) -> list[tuple[int, int, int]]:
    """All groups of three distinct agents (empty when there are fewer than three)."""
    return list(combinations(range(len(model.agents)), 3))


def knows_ext(model: EpistemicModel, agent: str | int, states: StateSet) -> StateSet:
    """States whose ``agent``-block lies inside ``states``."""
    if isinstance(agent, str):
        agent = model.agent_index(agent)
    return frozenset(s for s in range(model.size) if model.block(agent, s) <= states)


def everyone_ext(model: EpistemicModel, group: Iterable[str | int], states: StateSet) -> StateSet:
    result = model.all_states
    for i in _agent_ids(model, group):
        result &= knows_ext(model, i, states)
    return result


def common_ext(model: EpistemicModel, group: Iterable[str | int], states: StateSet) -> StateSet:
    """States all of whose group-reachable states lie in ``states``."""
    ids = _agent_ids(model, group)
    uf = _UnionFind(model.size)
    for i in ids:
        for block in model.blocks(i):
            first = min(block)
            for t in block:
                uf.union(first, t)
    bad = {uf.find(s) for s in range(model.size) if s not in states}
    return frozenset(s for s in range(model.size) if uf.find(s) not in bad)


def safe_step(model: EpistemicModel, states: StateSet, current: StateSet) -> StateSet:
    """One application of ``A -> union over triples G of E_G(states & A)``."""
    target = states & current
    result: set[int] = set()
    for g in triples(model):
        result |= everyone_ext(model, g, target)
    return frozenset(result)


def safe_ext(model: EpistemicModel, states: StateSet) -> StateSet:
    """Greatest fixpoint of :func:`safe_step` by descending iteration from all states."""
    current = model.all_states
    for _ in range(model.size + 2):
        nxt = safe_step(model, states, current)
        if nxt == current:
            return current
        current = nxt
    raise AssertionError("safety iteration failed to stabilise")  # monotone on a finite lattice


class _Checker:
    def __init__(self, model: EpistemicModel):
        self.model = model
        self.memo: dict[int, tuple[Formula, StateSet]] = {}

    def ext(self, f: Formula) -> StateSet:
        hit = self.memo.get(id(f))
        if hit is not None and hit[0] is f:
            return hit[1]
        result = self._ext(f)
        self.memo[id(f)] = (f, result)
        return result

    def _ext(self, f: Formula) -> StateSet:
        m = self.model
        if isinstance(f, Atom):
            return m.truth(f.name)
        if isinstance(f, Top):
            return m.all_states
        if isinstance(f, Bot):
            return frozenset()
        if isinstance(f, Not):
            return m.all_states - self.ext(f.sub)
        if isinstance(f, And):
            return self.ext(f.left) & self.ext(f.right)
        if isinstance(f, Or):
            return self.ext(f.left) | self.ext(f.right)
        if isinstance(f, Implies):
            return (m.all_states - self.ext(f.left)) | self.ext(f.right)
        if isinstance(f, Iff):
            return m.all_states - (self.ext(f.left) ^ self.ext(f.right))
        if isinstance(f, Knows):
            return knows_ext(m, f.agent, self.ext(f.sub))
        if isinstance(f, EveryoneKnows):
            return everyone_ext(m, f.group, self.ext(f.sub))
        if isinstance(f, CommonKnows):
            return common_ext(m, f.group, self.ext(f.sub))
        if isinstance(f, Safe):
            return safe_ext(m, self.ext(f.sub))
        return self._dynamic(f)

    def _dynamic(self, f: Formula) -> StateSet:
        from anonpal import updates

        m = self.model
        if isinstance(f, PublicBox):
            keep = self.ext(f.announced)
            if not keep:
                return m.all_states
            inner = extension(restrict(m, keep), f.body)
            order = sorted(keep)
            return (m.all_states - keep) | {order[i] for i in inner}
        if isinstance(f, (AnonBox, AnonByBox, SafeAnonBox)):
            if isinstance(f, SafeAnonBox):
                updated = updates.safe_anon_update(m, f.announced)
            else:
                updated = updates.anon_update(m, f.announced)
            if updated is None:
                return m.all_states
            wanted = None if not isinstance(f, AnonByBox) else m.agent_index(f.agent)
            return _all_successors_satisfy(m, updated, extension(updated, f.body), wanted)
        if isinstance(f, ProgramBox):
            prog = f.program
            updated = updates.product(m, prog.action_model)
            if updated is None:
                return m.all_states
            wanted = {prog.action_model.point_index(x) for x in prog.points}
            good = extension(updated, f.body)
            bad = {
                tag.state for u, tag in enumerate(updated.origin)
                if tag.agent in wanted and u not in good
            }
            return m.all_states - bad
        raise TypeError(f"not a formula: {f!r}")


def _all_successors_satisfy(model, updated, good, announcer):
    # s fails iff some admissible (s, a) falsifies the body
    bad = {
        tag.state for u, tag in enumerate(updated.origin)
        if (announcer is None or tag.agent == announcer) and u not in good
    }
    return model.all_states - bad


def extension(model: EpistemicModel, f: Formula) -> StateSet:
    """The set of states of ``model`` where ``f`` is true."""
    return _Checker(model).ext(f)


def satisfies(pointed: PointedModel, f: Formula) -> bool:
    return pointed.point in extension(pointed.model, f)


def check_agents(model: EpistemicModel, f: Formula) -> None:
    """Raise ModelError if ``f`` mentions an agent outside the model's roster."""
    from anonpal.syntax import agents_of

    unknown = sorted(agents_of(f) - set(model.agents))
    if unknown:
        raise ModelError(f"unknown agent(s) {', '.join(unknown)}")
