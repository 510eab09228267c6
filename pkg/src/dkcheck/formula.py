"""Syntax trees, parser and printer for epistemic formulas with distributed knowledge.

Primitive nodes are ``Atom``, ``Top``, ``Not``, ``Or``, ``Box`` and ``D``.
Conjunction, implication, equivalence, diamonds and ``false`` are parser sugar
and expand into the primitives::

    >>> parse("p & ~[a]p")
    Not(child=Or(left=Not(child=Atom(name='p')), right=Not(child=Not(child=Box(agent='a', child=Atom(name='p'))))))
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union


class FormulaSyntaxError(ValueError):
    """Malformed formula text. ``pos`` is the 0-based character offset."""

    def __init__(self, message: str, text: str = "", pos: int = 0):
        self.text = text
        self.pos = pos
        where = f" at position {pos}" if text else ""
        super().__init__(f"{message}{where}" + (f": {text!r}" if text else ""))


def _node(cls):
    """Frozen dataclass whose hash is computed once; shared subtrees stay cheap."""
    cls = dataclass(frozen=True)(cls)
    raw = cls.__hash__

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = raw(self)
            object.__setattr__(self, "_hash", h)
            return h

    cls.__hash__ = __hash__
    return cls


@_node
class Atom:
    name: str


@_node
class Top:
    """The constant ``true``; ``false`` is ``Not(Top())``."""


@_node
class Not:
    child: "Formula"


@_node
class Or:
    left: "Formula"
    right: "Formula"


@_node
class Box:
    agent: str
    child: "Formula"


@_node
class D:
    group: frozenset
    child: "Formula"

    def __post_init__(self):
        if not self.group:
            raise ValueError("distributed knowledge needs a non-empty group")
        object.__setattr__(self, "group", frozenset(self.group))


Formula = Union[Atom, Top, Not, Or, Box, D]

TRUE = Top()
FALSE = Not(TRUE)


# -- sugar constructors -----------------------------------------------------

def And(left: Formula, right: Formula) -> Formula:
    return Not(Or(Not(left), Not(right)))


def Implies(left: Formula, right: Formula) -> Formula:
    return Or(Not(left), right)


def Iff(left: Formula, right: Formula) -> Formula:
    return And(Implies(left, right), Implies(right, left))


def Diamond(agent: str, child: Formula) -> Formula:
    return Not(Box(agent, Not(child)))


def conjunction(parts) -> Formula:
    parts = list(parts)
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disjunction(parts) -> Formula:
    parts = list(parts)
    if not parts:
        return FALSE
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


# -- metadata ---------------------------------------------------------------

@dataclass(frozen=True)
class FormulaMeta:
    atoms_of: frozenset
    agents_of: frozenset
    is_L0: bool
    modal_depth: int


def subformulas(f: Formula) -> Iterator[Formula]:
    """Yield every distinct subterm of ``f`` once, children before parents."""
    seen = set()
    stack = [(f, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            yield node
            continue
        if node in seen:
            continue
        seen.add(node)
        stack.append((node, True))
        if isinstance(node, (Not, Box, D)):
            stack.append((node.child, False))
        elif isinstance(node, Or):
            stack.append((node.right, False))
            stack.append((node.left, False))


def meta(f: Formula) -> FormulaMeta:
    atoms, agents = set(), set()
    is_l0 = True
    depth: dict = {}
    for node in subformulas(f):
        if isinstance(node, Atom):
            atoms.add(node.name)
            depth[node] = 0
        elif isinstance(node, Top):
            depth[node] = 0
        elif isinstance(node, Not):
            depth[node] = depth[node.child]
        elif isinstance(node, Or):
            depth[node] = max(depth[node.left], depth[node.right])
        elif isinstance(node, Box):
            agents.add(node.agent)
            depth[node] = depth[node.child] + 1
        elif isinstance(node, D):
            agents.update(node.group)
            is_l0 = False
            depth[node] = depth[node.child] + 1
    return FormulaMeta(frozenset(atoms), frozenset(agents), is_l0, depth[f])


def is_l0(f: Formula) -> bool:
    return not any(isinstance(n, D) for n in subformulas(f))


# -- parser -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(<->|->)|([~|&()\[\]{},<>])|([A-Za-z_][A-Za-z0-9_]*))")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise FormulaSyntaxError("unexpected character", text, pos)
        tok = m.group(1) or m.group(2) or m.group(3)
        tokens.append((tok, m.start(m.lastindex)))
        pos = m.end()
    tokens.append(("", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self, k: int = 0) -> str:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)][0]

    def pos(self) -> int:
        return self.tokens[self.i][1]

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if expected is not None and tok != expected:
            shown = repr(tok) if tok else "end of input"
            raise FormulaSyntaxError(f"expected {expected!r}, found {shown}", self.text, self.pos())
        self.i += 1
        return tok

    def ident(self) -> str:
        tok = self.peek()
        if not tok or not (tok[0].isalpha() or tok[0] == "_"):
            raise FormulaSyntaxError("expected identifier", self.text, self.pos())
        return self.take()

    def parse(self) -> Formula:
        if self.peek() == "":
            raise FormulaSyntaxError("empty formula", self.text, 0)
        f = self.iff()
        if self.peek() != "":
            raise FormulaSyntaxError(f"unexpected {self.peek()!r}", self.text, self.pos())
        return f

    def iff(self) -> Formula:
        f = self.imp()
        while self.peek() == "<->":
            self.take()
            f = Iff(f, self.imp())
        return f

    def imp(self) -> Formula:
        f = self.disj()
        if self.peek() == "->":
            self.take()
            return Implies(f, self.imp())
        return f

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.peek() == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "~":
            self.take()
            return Not(self.unary())
        if tok == "[":
            self.take()
            agent = self.ident()
            self.take("]")
            return Box(agent, self.unary())
        if tok == "<":
            self.take()
            agent = self.ident()
            self.take(">")
            return Diamond(agent, self.unary())
        if tok == "D" and self.peek(1) == "{":
            start = self.pos()
            self.take()
            self.take("{")
            if self.peek() == "}":
                raise FormulaSyntaxError("empty group in D{...}", self.text, start)
            group = [self.ident()]
            while self.peek() == ",":
                self.take()
                group.append(self.ident())
            self.take("}")
            return D(frozenset(group), self.unary())
        if tok == "(":
            self.take()
            f = self.iff()
            self.take(")")
            return f
        if tok == "true":
            self.take()
            return TRUE
        if tok == "false":
            self.take()
            return FALSE
        return Atom(self.ident())


def parse(text: str) -> Formula:
    return _Parser(text).parse()


# -- printer ----------------------------------------------------------------

def _and_parts(f: Formula):
    # Not(Or(Not l, Not r)) is printed as "l & r"
    if isinstance(f, Not) and isinstance(f.child, Or):
        l, r = f.child.left, f.child.right
        if isinstance(l, Not) and isinstance(r, Not):
            return l.child, r.child
    return None


def _diamond_parts(f: Formula):
    if isinstance(f, Not) and isinstance(f.child, Box) and isinstance(f.child.child, Not):
        return f.child.agent, f.child.child.child
    return None


def _is_binary(f: Formula) -> bool:
    return isinstance(f, Or) or _and_parts(f) is not None


def _wrap(f: Formula) -> str:
    s = to_string(f)
    return f"({s})" if _is_binary(f) else s


def to_string(f: Formula) -> str:
    """Render ``f`` so that ``parse(to_string(f)) == f``."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Or):
        return f"{_wrap(f.left)} | {_wrap(f.right)}"
    if isinstance(f, Box):
        return f"[{f.agent}]{_wrap(f.child)}"
    if isinstance(f, D):
        return "D{" + ",".join(sorted(f.group)) + "} " + _wrap(f.child)
    if isinstance(f, Not):
        parts = _and_parts(f)
        if parts is not None:
            return f"{_wrap(parts[0])} & {_wrap(parts[1])}"
        dia = _diamond_parts(f)
        if dia is not None:
            return f"<{dia[0]}>{_wrap(dia[1])}"
        return "~" + _wrap(f.child)
    raise TypeError(f"not a formula: {f!r}")


# ``print`` in the public vocabulary; kept off the builtin name at import sites
print_formula = to_string
