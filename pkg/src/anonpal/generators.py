"""Seeded random models and formulas for cross-validation."""

from __future__ import annotations

import random
from functools import lru_cache
from string import ascii_lowercase

from anonpal.model import EpistemicModel
from anonpal.syntax import (
    BOT, TOP, AnonBox, AnonByBox, And, Atom, CommonKnows, EveryoneKnows, Formula, Iff,
    Implies, Knows, Not, Or, PublicBox, Safe, SafeAnonBox,
)

PROPS = ("p", "q", "r", "o", "m", "n")

_BOOLEAN = ("not", "and", "or", "implies", "iff")
FRAGMENTS: dict[str, tuple[str, ...]] = {
    "epistemic": _BOOLEAN + ("knows",),
    "static": _BOOLEAN + ("knows", "everyone", "common", "safe"),
    "safe": _BOOLEAN + ("knows", "safe"),
    "pal": _BOOLEAN + ("knows", "public"),
    "anon": _BOOLEAN + ("knows", "anon", "anonby"),
    "sai": _BOOLEAN + ("knows", "safeanon"),
    "full": _BOOLEAN + (
        "knows", "everyone", "common", "safe", "public", "anon", "anonby", "safeanon",
    ),
}


def _rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


@lru_cache(maxsize=None)
def _completions(remaining: int, blocks: int) -> int:
    # number of restricted-growth tails of length `remaining` given `blocks` used
    if remaining == 0:
        return 1
    return blocks * _completions(remaining - 1, blocks) + _completions(remaining - 1, blocks + 1)


def random_partition(rng: random.Random, n: int) -> tuple[int, ...]:
    """A set partition of range(n), uniform over all Bell(n) partitions."""
    ids: list[int] = []
    blocks = 0
    for k in range(n):
        remaining = n - k - 1
        new_weight = _completions(remaining, blocks + 1)
        total = blocks * _completions(remaining, blocks) + new_weight
        pick = rng.randrange(total)
        if pick < new_weight:
            ids.append(blocks)
            blocks += 1
        else:
            ids.append((pick - new_weight) // _completions(remaining, blocks))
    return tuple(ids)


def agent_names(n: int) -> tuple[str, ...]:
    return tuple(ascii_lowercase[:n])


def random_model(seed, n_states: int, n_agents: int, n_props: int) -> EpistemicModel:
    if n_states < 1 or n_agents < 1 or n_props < 0:
        raise ValueError("model sizes must be positive")
    if n_props > len(PROPS):
        raise ValueError(f"at most {len(PROPS)} propositions")
    rng = _rng(seed)
    agents = agent_names(n_agents)
    states = tuple(f"s{i}" for i in range(n_states))
    partitions = tuple(random_partition(rng, n_states) for _ in agents)
    valuation = {
        p: frozenset(s for s in range(n_states) if rng.random() < 0.5)
        for p in PROPS[:n_props]
    }
    return EpistemicModel(agents, states, partitions, valuation)


def random_formula(
    seed,
    depth: int,
    fragment: str = "static",
    agents: tuple[str, ...] = ("a", "b", "c"),
    props: tuple[str, ...] = ("p", "q"),
) -> Formula:
    """Random formula of nesting depth at most ``depth`` over ``fragment``.

    In the ``sai`` fragment announcement bodies are kept free of further
    announcements (see :func:`anonpal.reduce.reduce_sai`).
    """
    if fragment not in FRAGMENTS:
        raise ValueError(f"unknown fragment {fragment!r}")
    rng = _rng(seed)
    return _gen(rng, depth, FRAGMENTS[fragment], tuple(agents), tuple(props), fragment)


def _leaf(rng, props):
    roll = rng.random()
    if roll < 0.06:
        return TOP
    if roll < 0.12:
        return BOT
    return Atom(rng.choice(props))


def _gen(rng, depth, ops, agents, props, fragment):
    if depth <= 0 or rng.random() < 0.2:
        return _leaf(rng, props)
    op = rng.choice(ops)

    def sub(ops_=ops):
        return _gen(rng, depth - 1, ops_, agents, props, fragment)

    def group():
        k = rng.randint(1, len(agents))
        return tuple(rng.sample(agents, k))

    if op == "not":
        return Not(sub())
    if op in ("and", "or", "implies", "iff"):
        cls = {"and": And, "or": Or, "implies": Implies, "iff": Iff}[op]
        return cls(sub(), sub())
    if op == "knows":
        return Knows(rng.choice(agents), sub())
    if op == "everyone":
        return EveryoneKnows(group(), sub())
    if op == "common":
        return CommonKnows(group(), sub())
    if op == "safe":
        return Safe(sub())
    announced = sub()
    body = sub(FRAGMENTS["epistemic"]) if fragment == "sai" else sub()
    if op == "public":
        return PublicBox(announced, body)
    if op == "anon":
        return AnonBox(announced, body)
    if op == "anonby":
        return AnonByBox(rng.choice(agents), announced, body)
    if op == "safeanon":
        return SafeAnonBox(announced, body)
    raise AssertionError(op)
