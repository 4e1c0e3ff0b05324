"""Graphviz export in the figure style: transitive closure assumed, so each
block of size k contributes a chain of k-1 edges, and edges shared by
several agents are drawn once with the agents concatenated."""

from __future__ import annotations

from anonpal.model import EpistemicModel


def _quote(text: str) -> str:
    return '"' + text.replace('"', '\\"') + '"'


def chain_edges(model: EpistemicModel) -> dict[tuple[int, int], str]:
    """(s, t) with s < t mapped to the concatenated agent label."""
    labels: dict[tuple[int, int], list[str]] = {}
    for i, agent in enumerate(model.agents):
        for block in model.blocks(i):
            members = sorted(block)
            for s, t in zip(members, members[1:]):
                labels.setdefault((s, t), []).append(agent)
    return {pair: "".join(agents) for pair, agents in sorted(labels.items())}


def to_dot(model: EpistemicModel, point: int | None = None, name: str = "M") -> str:
    lines = [f"graph {_quote(name)} {{", "  node [shape=circle];"]
    for s, state in enumerate(model.states):
        props = ",".join(sorted(model.props_at(s)))
        label = f"{state}\\n{props}" if props else state
        attrs = [f"label={_quote(label)}"]
        if s == point:
            attrs.append("shape=doublecircle")
        lines.append(f"  n{s} [{', '.join(attrs)}];")
    for (s, t), label in chain_edges(model).items():
        lines.append(f"  n{s} -- n{t} [label={_quote(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
