"""Translations that remove dynamic operators (or ▲) from formulas.

All passes perform only ⊤/⊥ absorption as simplification, so outputs can
be large.  Subformula objects are shared where the rewrite duplicates them.
"""

from __future__ import annotations

from typing import Callable, Sequence

from anonpal.syntax import (
    BOT, TOP, AnonBox, AnonByBox, And, Atom, Bot, CommonKnows, EveryoneKnows, Formula,
    Iff, Implies, Knows, Not, Or, ProgramBox, PublicBox, Safe, SafeAnonBox, Top,
    children, is_dynamic_free,
)
from anonpal.updates import ActionModel, anon_action_model


class ReductionError(ValueError):
    """Raised when a formula is outside the fragment a pass can reduce."""


def rebuild(f: Formula, kids: Sequence[Formula]) -> Formula:
    """Copy of ``f`` with its immediate subformulas replaced."""
    if isinstance(f, (Atom, Top, Bot)):
        return f
    if isinstance(f, Not):
        return Not(kids[0])
    if isinstance(f, (And, Or, Implies, Iff)):
        return type(f)(kids[0], kids[1])
    if isinstance(f, Knows):
        return Knows(f.agent, kids[0])
    if isinstance(f, (EveryoneKnows, CommonKnows)):
        return type(f)(f.group, kids[0])
    if isinstance(f, Safe):
        return Safe(kids[0])
    if isinstance(f, (PublicBox, AnonBox, SafeAnonBox)):
        return type(f)(kids[0], kids[1])
    if isinstance(f, AnonByBox):
        return AnonByBox(f.agent, kids[0], kids[1])
    raise TypeError(f"cannot rebuild {type(f).__name__}")


# ⊤/⊥ absorption only

def _neg(a: Formula) -> Formula:
    if isinstance(a, Top):
        return BOT
    if isinstance(a, Bot):
        return TOP
    return Not(a)


def _and(a: Formula, b: Formula) -> Formula:
    if isinstance(a, Bot) or isinstance(b, Bot):
        return BOT
    if isinstance(a, Top):
        return b
    if isinstance(b, Top):
        return a
    return And(a, b)


def _imp(a: Formula, b: Formula) -> Formula:
    if isinstance(a, Bot) or isinstance(b, Top):
        return TOP
    if isinstance(a, Top):
        return b
    if isinstance(b, Bot):
        return _neg(a)
    return Implies(a, b)


def _conj(parts) -> Formula:
    result = TOP
    for p in parts:
        result = _and(result, p)
    return result


def eliminate_safe(f: Formula) -> Formula:
    """Replace every ▲ψ, innermost first, by ¬[ψ‡]⊥."""
    if isinstance(f, ProgramBox):
        raise ReductionError("action-model programs are not supported by eliminate_safe")
    kids = [eliminate_safe(c) for c in children(f)]
    if isinstance(f, Safe):
        return Not(SafeAnonBox(kids[0], BOT))
    return rebuild(f, kids)


def _reject_static(g: Formula) -> None:
    if isinstance(g, CommonKnows):
        raise ReductionError("common knowledge not reducible in PAL fragment")
    if isinstance(g, EveryoneKnows):
        raise ReductionError("everyone-knows under an announcement is outside the PAL fragment")
    if isinstance(g, Safe):
        raise ReductionError("safety under an announcement is not reducible")


def _push_boolean(g: Formula, pre: Formula, push: Callable[[Formula], Formula]) -> Formula | None:
    """Boolean cases shared by the public and action-model rules."""
    if isinstance(g, Atom):
        return _imp(pre, g)
    if isinstance(g, Top):
        return TOP
    if isinstance(g, Bot):
        return _neg(pre)
    if isinstance(g, Not):
        return _imp(pre, _neg(push(g.sub)))
    if isinstance(g, And):
        return _and(push(g.left), push(g.right))
    if isinstance(g, (Or, Implies, Iff)):
        return _imp(pre, type(g)(push(g.left), push(g.right)))
    return None


def _pal_push(announced: Formula, body: Formula) -> Formula:
    memo: dict[int, Formula] = {}

    def push(g: Formula) -> Formula:
        key = id(g)
        if key in memo:
            return memo[key]
        out = _push_boolean(g, announced, push)
        if out is None:
            if isinstance(g, Knows):
                out = _imp(announced, Knows(g.agent, push(g.sub)))
            else:
                _reject_static(g)
                raise ReductionError(f"unsupported operator {type(g).__name__} in PAL fragment")
        memo[key] = out
        return out

    return push(body)


def reduce_pal(f: Formula) -> Formula:
    """Remove public announcements with the standard reduction rules
    (innermost announcements first); the result is announcement-free."""
    if isinstance(f, PublicBox):
        return _pal_push(reduce_pal(f.announced), reduce_pal(f.body))
    if isinstance(f, (AnonBox, AnonByBox, SafeAnonBox, ProgramBox)):
        raise ReductionError(f"{type(f).__name__} is outside the PAL fragment")
    return rebuild(f, [reduce_pal(c) for c in children(f)])


class _ActionPush:
    """Push pointed actions of one action model through a box-free body."""

    def __init__(self, action: ActionModel, reject: Callable[[Formula], None] = _reject_static):
        self.action = action
        self.reject = reject
        self.memo: dict[tuple[int, int], Formula] = {}

    def __call__(self, x: int, g: Formula) -> Formula:
        key = (x, id(g))
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        pre = self.action.pre[x]
        out = _push_boolean(g, pre, lambda h: self(x, h))
        if out is None:
            if isinstance(g, Knows):
                ids = self.action.partitions[self.action.agents.index(g.agent)]
                alts = [y for y in range(len(self.action.points)) if ids[y] == ids[x]]
                out = _imp(pre, _conj(Knows(g.agent, self(y, g.sub)) for y in alts))
            else:
                self.reject(g)
                raise ReductionError(f"{type(g).__name__} cannot be pushed through an action")
        self.memo[key] = out
        return out


def reduce_anon(f: Formula, agents: Sequence[str]) -> Formula:
    """Translate pseudo-anonymous announcements into the union of the
    pseudo-anonymous action model's points and eliminate them with the
    action-model reduction rules.  ``agents`` is the roster the action model
    ranges over."""
    agents = tuple(agents)

    def go(g: Formula) -> Formula:
        if isinstance(g, (AnonBox, AnonByBox)):
            action = anon_action_model(agents, go(g.announced))
            body = go(g.body)
            push = _ActionPush(action)
            if isinstance(g, AnonByBox):
                return push(action.point_index(g.agent), body)
            return _conj(push(x, body) for x in range(len(action.points)))
        if isinstance(g, PublicBox):
            action = ActionModel(agents, ("!",), tuple((0,) for _ in agents), (go(g.announced),))
            return _ActionPush(action)(0, go(g.body))
        if isinstance(g, ProgramBox):
            prog = g.program
            action = prog.action_model
            action = ActionModel(
                action.agents, action.points, action.partitions,
                tuple(go(p) for p in action.pre), action.name,
            )
            push = _ActionPush(action)
            body = go(g.body)
            return _conj(push(action.point_index(x), body) for x in prog.points)
        if isinstance(g, SafeAnonBox):
            raise ReductionError("safe announcements are outside the pseudo-anonymous fragment")
        return rebuild(g, [go(c) for c in children(g)])

    return go(f)


def safe_action_model(agents: Sequence[str], announced: Formula) -> ActionModel:
    """Pseudo-anonymous action model with preconditions K_a▲(announced)."""
    base = anon_action_model(agents, Safe(announced))
    return ActionModel(base.agents, base.points, base.partitions, base.pre, name="safeanon")


def _reject_nested_safe(g: Formula) -> None:
    if isinstance(g, Safe):
        raise ReductionError("▲ inside the body of a safe announcement is not reducible")
    _reject_static(g)


def reduce_sai(f: Formula, agents: Sequence[str]) -> Formula:
    """Eliminate safe announcements, outermost first, into K/▲ formulas.

    Announced formulas may themselves contain safe announcements (they end
    up under ▲, never under a box).  A further announcement, or a ▲, inside
    the *body* of a safe announcement is rejected.
    """
    agents = tuple(agents)

    def go(g: Formula) -> Formula:
        if isinstance(g, SafeAnonBox):
            if not is_dynamic_free(g.body):
                raise ReductionError("announcement nested in the body of a safe announcement")
            action = safe_action_model(agents, go(g.announced))
            push = _ActionPush(action, _reject_nested_safe)
            return _conj(push(x, g.body) for x in range(len(action.points)))
        if isinstance(g, (PublicBox, AnonBox, AnonByBox, ProgramBox)):
            raise ReductionError(f"{type(g).__name__} is outside the safe-announcement fragment")
        return rebuild(g, [go(c) for c in children(g)])

    return go(f)


def uses_only(f: Formula, allowed: tuple[type, ...]) -> bool:
    """Syntactic fragment check: every node is an instance of ``allowed``."""
    stack = [f]
    while stack:
        g = stack.pop()
        if not isinstance(g, allowed):
            return False
        stack.extend(children(g))
    return True


BOOLEAN_NODES = (Atom, Top, Bot, Not, And, Or, Implies, Iff)
EPISTEMIC_NODES = BOOLEAN_NODES + (Knows,)
SAFE_NODES = EPISTEMIC_NODES + (Safe,)
