"""Formula AST, parser and printer.

Concrete syntax (ASCII)::

    formula := iff
    iff     := imp ("<->" imp)*
    imp     := or ("->" imp)?
    or      := and ("|" and)*
    and     := un ("&" un)*
    un      := "~" un | "K{" ident "}" un | "E{" idents "}" un | "C{" idents "}" un
             | "safe" un | "[!" formula "]" un | "[anon" formula "]" un
             | "[anonby" ident ":" formula "]" un | "[safeanon" formula "]" un
             | "true" | "false" | ident | "(" formula ")"

Action-model programs have no text form; build them in code.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Iterator, Sequence

if TYPE_CHECKING:
    from anonpal.updates import ActionModel


class Formula:
    """Base class of all formula nodes."""

    __slots__ = ()

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True, eq=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Knows(Formula):
    agent: str
    sub: Formula


def _group(names: Iterable[str]) -> tuple[str, ...]:
    group = tuple(sorted(set(names)))
    if not group:
        raise ValueError("agent group must be non-empty")
    return group


@dataclass(frozen=True)
class EveryoneKnows(Formula):
    group: tuple[str, ...]
    sub: Formula

    def __post_init__(self):
        object.__setattr__(self, "group", _group(self.group))


@dataclass(frozen=True)
class CommonKnows(Formula):
    group: tuple[str, ...]
    sub: Formula

    def __post_init__(self):
        object.__setattr__(self, "group", _group(self.group))


@dataclass(frozen=True)
class Safe(Formula):
    sub: Formula


@dataclass(frozen=True)
class PublicBox(Formula):
    announced: Formula
    body: Formula


@dataclass(frozen=True)
class AnonBox(Formula):
    announced: Formula
    body: Formula


@dataclass(frozen=True)
class AnonByBox(Formula):
    agent: str
    announced: Formula
    body: Formula


@dataclass(frozen=True)
class SafeAnonBox(Formula):
    announced: Formula
    body: Formula


@dataclass(frozen=True)
class ActionProgram:
    """Union of pointed actions over one action model."""

    action_model: ActionModel
    points: tuple[str, ...]

    def __post_init__(self):
        points = tuple(self.points)
        if not points:
            raise ValueError("action program needs at least one point")
        for x in points:
            self.action_model.point_index(x)
        object.__setattr__(self, "points", points)


@dataclass(frozen=True)
class ProgramBox(Formula):
    program: ActionProgram
    body: Formula


TOP = Top()
BOT = Bot()

# sugar; the AST has boxes only


def possible(agent: str, sub: Formula) -> Formula:
    return Not(Knows(agent, Not(sub)))


def public_diamond(announced: Formula, body: Formula) -> Formula:
    return Not(PublicBox(announced, Not(body)))


def anon_diamond(announced: Formula, body: Formula) -> Formula:
    return Not(AnonBox(announced, Not(body)))


def safe_anon_diamond(announced: Formula, body: Formula) -> Formula:
    return Not(SafeAnonBox(announced, Not(body)))


def conj(parts: Iterable[Formula]) -> Formula:
    """Left-nested conjunction; the empty conjunction is ``true``."""
    result = None
    for p in parts:
        result = p if result is None else And(result, p)
    return TOP if result is None else result


def disj(parts: Iterable[Formula]) -> Formula:
    result = None
    for p in parts:
        result = p if result is None else Or(result, p)
    return BOT if result is None else result


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (Atom, Top, Bot)):
        return ()
    if isinstance(f, (Not, Knows, EveryoneKnows, CommonKnows, Safe)):
        return (f.sub,)
    if isinstance(f, (And, Or, Implies, Iff)):
        return (f.left, f.right)
    if isinstance(f, (PublicBox, AnonBox, AnonByBox, SafeAnonBox)):
        return (f.announced, f.body)
    if isinstance(f, ProgramBox):
        pre = tuple(f.program.action_model.pre)
        return pre + (f.body,)
    raise TypeError(f"not a formula: {f!r}")


def subformulas(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(children(g))


def agents_of(f: Formula) -> set[str]:
    found: set[str] = set()
    for g in subformulas(f):
        if isinstance(g, (Knows, AnonByBox)):
            found.add(g.agent)
        elif isinstance(g, (EveryoneKnows, CommonKnows)):
            found.update(g.group)
        elif isinstance(g, ProgramBox):
            found.update(g.program.action_model.agents)
    return found


DYNAMIC = (PublicBox, AnonBox, AnonByBox, SafeAnonBox, ProgramBox)


def is_dynamic_free(f: Formula) -> bool:
    return not any(isinstance(g, DYNAMIC) for g in subformulas(f))


# ---------------------------------------------------------------- parsing


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.message = message
        self.position = position
        self.text = text
        super().__init__(f"{message} at offset {position}")


_TOKEN = re.compile(
    r"(?P<ws>\s+)|(?P<op><->|->|K\{|E\{|C\{|[~&|()\[\]{}!:,])|(?P<ident>[a-z0-9_]+)"
)

_KEYWORDS = {"true", "false", "safe"}
_BOX_WORDS = {"anon", "anonby", "safeanon"}


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        if m.lastgroup != "ws":
            tokens.append((m.group(), pos))
        pos = m.end()
    tokens.append(("", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, roster: Sequence[str] | None):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.roster = None if roster is None else set(roster)

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def pos(self) -> int:
        return self.tokens[self.i][1]

    def advance(self) -> tuple[str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message: str, position: int | None = None):
        raise FormulaSyntaxError(message, self.pos() if position is None else position, self.text)

    def expect(self, tok: str) -> None:
        if self.peek() != tok:
            found = self.peek() or "end of input"
            self.error(f"expected {tok!r}, found {found!r}")
        self.advance()

    def agent(self) -> str:
        tok, pos = self.advance()
        if not tok or not re.fullmatch(r"[a-z0-9_]+", tok):
            self.error("expected agent name", pos)
        if self.roster is not None and tok not in self.roster:
            self.error(f"unknown agent {tok!r}", pos)
        return tok

    def operand(self, op: str, op_pos: int, rule) -> Formula:
        # a missing right operand is reported at the operator
        if self.peek() in ("", ")", "]"):
            self.error(f"expected operand after {op!r}", op_pos)
        return rule()

    def parse(self) -> Formula:
        if self.peek() == "":
            self.error("empty formula")
        f = self.iff()
        if self.peek() != "":
            self.error(f"unexpected {self.peek()!r}")
        return f

    def iff(self) -> Formula:
        left = self.imp()
        while self.peek() == "<->":
            _, p = self.advance()
            left = Iff(left, self.operand("<->", p, self.imp))
        return left

    def imp(self) -> Formula:
        left = self.or_()
        if self.peek() == "->":
            _, p = self.advance()
            return Implies(left, self.operand("->", p, self.imp))
        return left

    def or_(self) -> Formula:
        left = self.and_()
        while self.peek() == "|":
            _, p = self.advance()
            left = Or(left, self.operand("|", p, self.and_))
        return left

    def and_(self) -> Formula:
        left = self.un()
        while self.peek() == "&":
            _, p = self.advance()
            left = And(left, self.operand("&", p, self.un))
        return left

    def un(self) -> Formula:
        tok, pos = self.tokens[self.i]
        if tok == "~":
            self.advance()
            return Not(self.operand("~", pos, self.un))
        if tok == "K{":
            self.advance()
            a = self.agent()
            self.expect("}")
            return Knows(a, self.operand("K{", pos, self.un))
        if tok in ("E{", "C{"):
            self.advance()
            group = [self.agent()]
            while self.peek() == ",":
                self.advance()
                group.append(self.agent())
            self.expect("}")
            sub = self.operand(tok, pos, self.un)
            return EveryoneKnows(group, sub) if tok == "E{" else CommonKnows(group, sub)
        if tok == "safe":
            self.advance()
            return Safe(self.operand("safe", pos, self.un))
        if tok == "[":
            return self.box()
        if tok == "(":
            self.advance()
            f = self.iff()
            self.expect(")")
            return f
        if tok == "true":
            self.advance()
            return TOP
        if tok == "false":
            self.advance()
            return BOT
        if tok and re.fullmatch(r"[a-z0-9_]+", tok):
            self.advance()
            return Atom(tok)
        if tok == "":
            self.error("unexpected end of input")
        self.error(f"unexpected {tok!r}")

    def box(self) -> Formula:
        _, pos = self.advance()
        kind = self.peek()
        if kind == "!":
            self.advance()
            ann = self.iff()
            self.expect("]")
            return PublicBox(ann, self.operand("]", pos, self.un))
        if kind not in _BOX_WORDS:
            self.error("expected '!', 'anon', 'anonby' or 'safeanon' after '['")
        self.advance()
        if kind == "anonby":
            a = self.agent()
            self.expect(":")
            ann = self.iff()
            self.expect("]")
            return AnonByBox(a, ann, self.operand("]", pos, self.un))
        ann = self.iff()
        self.expect("]")
        body = self.operand("]", pos, self.un)
        return AnonBox(ann, body) if kind == "anon" else SafeAnonBox(ann, body)


def parse_formula(text: str, roster: Sequence[str] | None = None) -> Formula:
    """Parse ``text``; if ``roster`` is given, agent names are checked against it."""
    return _Parser(text, roster).parse()


# --------------------------------------------------------------- printing

_IFF, _IMP, _OR, _AND, _UNARY = range(1, 6)


def _prec(f: Formula) -> int:
    if isinstance(f, Iff):
        return _IFF
    if isinstance(f, Implies):
        return _IMP
    if isinstance(f, Or):
        return _OR
    if isinstance(f, And):
        return _AND
    return _UNARY


def _wrap(f: Formula, min_prec: int) -> str:
    text = _print(f)
    return f"({text})" if _prec(f) < min_prec else text


def _prefix(head: str, sub: Formula) -> str:
    # "K{a}(p & q)" but "K{a} p"; words and "~" have fixed spacing
    body = _wrap(sub, _UNARY)
    if head == "~":
        return head + body
    if head[-1] in "]}" and body.startswith("("):
        return head + body
    return f"{head} {body}"


def _print(f: Formula) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bot):
        return "false"
    if isinstance(f, Not):
        return _prefix("~", f.sub)
    if isinstance(f, Iff):
        return f"{_wrap(f.left, _IFF)} <-> {_wrap(f.right, _IMP)}"
    if isinstance(f, Implies):
        return f"{_wrap(f.left, _OR)} -> {_wrap(f.right, _IMP)}"
    if isinstance(f, Or):
        return f"{_wrap(f.left, _OR)} | {_wrap(f.right, _AND)}"
    if isinstance(f, And):
        return f"{_wrap(f.left, _AND)} & {_wrap(f.right, _UNARY)}"
    if isinstance(f, Knows):
        return _prefix(f"K{{{f.agent}}}", f.sub)
    if isinstance(f, EveryoneKnows):
        return _prefix(f"E{{{','.join(f.group)}}}", f.sub)
    if isinstance(f, CommonKnows):
        return _prefix(f"C{{{','.join(f.group)}}}", f.sub)
    if isinstance(f, Safe):
        return _prefix("safe", f.sub)
    if isinstance(f, PublicBox):
        return _prefix(f"[!{_print(f.announced)}]", f.body)
    if isinstance(f, AnonBox):
        return _prefix(f"[anon {_print(f.announced)}]", f.body)
    if isinstance(f, AnonByBox):
        return _prefix(f"[anonby {f.agent}: {_print(f.announced)}]", f.body)
    if isinstance(f, SafeAnonBox):
        return _prefix(f"[safeanon {_print(f.announced)}]", f.body)
    if isinstance(f, ProgramBox):
        prog = f.program
        return _prefix(f"[{prog.action_model.name}:{'+'.join(prog.points)}]", f.body)
    raise TypeError(f"not a formula: {f!r}")


def print_formula(f: Formula) -> str:
    """Canonical text with minimal parentheses; parses back to ``f``
    (except for action-model programs, which have no text syntax)."""
    return _print(f)
