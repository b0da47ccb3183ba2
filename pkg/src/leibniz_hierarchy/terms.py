"""Term trees and their s-expression syntax.

Variables are numbered from 0 and printed as ``x``, ``y``, ``x3``, ``x4`` and
so on.  Terms produced by closure computations share subterms, so hashing is
cached at construction and equality short-circuits on identity.
"""
from __future__ import annotations

import re
from typing import Iterator

from .errors import ParseError

_VAR_RE = re.compile(r"^(x|y|x[1-9][0-9]*)$")


def var_name(index: int) -> str:
    if index == 0:
        return "x"
    if index == 1:
        return "y"
    return f"x{index + 1}"


def var_index(name: str) -> int | None:
    """Inverse of :func:`var_name`; ``None`` when ``name`` is not a variable."""
    if not _VAR_RE.match(name):
        return None
    if name == "x":
        return 0
    if name == "y":
        return 1
    idx = int(name[1:]) - 1
    # x1 and x2 would alias x and y; reject them to keep names unique
    return idx if idx >= 2 else None


class Term:
    __slots__ = ()

    def variables(self) -> set[int]:
        out: set[int] = set()
        seen: set[int] = set()
        stack: list[Term] = [self]
        while stack:
            t = stack.pop()
            if id(t) in seen:
                continue
            seen.add(id(t))
            if isinstance(t, Var):
                out.add(t.index)
            else:
                stack.extend(t.args)
        return out

    def arity_needed(self) -> int:
        vs = self.variables()
        return max(vs) + 1 if vs else 0


class Var(Term):
    __slots__ = ("index", "_hash")

    def __init__(self, index: int):
        if index < 0:
            raise ValueError("variable index must be non-negative")
        self.index = index
        self._hash = hash(("var", index))

    def __eq__(self, other):
        return isinstance(other, Var) and other.index == self.index

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Var({self.index})"

    def __str__(self):
        return var_name(self.index)


class App(Term):
    __slots__ = ("op", "args", "_hash", "depth", "size")

    def __init__(self, op: str, args: tuple[Term, ...] = ()):
        self.op = op
        self.args = tuple(args)
        self._hash = hash((op, tuple(hash(a) for a in self.args)))
        self.depth = 1 + max((_depth(a) for a in self.args), default=0)
        self.size = 1 + sum(_size(a) for a in self.args)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, App) or self._hash != other._hash:
            return False
        return self.op == other.op and self.args == other.args

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"App({self.op!r}, {self.args!r})"

    def __str__(self):
        return format_term(self)


def _depth(t: Term) -> int:
    return t.depth if isinstance(t, App) else 0


def _size(t: Term) -> int:
    return t.size if isinstance(t, App) else 1


def term_depth(t: Term) -> int:
    return _depth(t)


def term_size(t: Term) -> int:
    return _size(t)


def substitute(t: Term, mapping: dict[int, Term]) -> Term:
    """Simultaneous substitution of variables, preserving sharing."""
    memo: dict[int, Term] = {}

    def go(s: Term) -> Term:
        key = id(s)
        if key in memo:
            return memo[key]
        if isinstance(s, Var):
            r = mapping.get(s.index, s)
        else:
            r = App(s.op, tuple(go(a) for a in s.args))
        memo[key] = r
        return r

    return go(t)


def format_term(t: Term) -> str:
    memo: dict[int, str] = {}

    def go(s: Term) -> str:
        key = id(s)
        if key not in memo:
            if isinstance(s, Var):
                memo[key] = var_name(s.index)
            elif not s.args:
                # a bare constant name reads as a variable when it looks like one
                memo[key] = f"({s.op})" if var_index(s.op) is not None else s.op
            else:
                memo[key] = "(" + " ".join([s.op] + [go(a) for a in s.args]) + ")"
        return memo[key]

    return go(t)


def _tokens(text: str) -> Iterator[str]:
    for tok in re.findall(r"\(|\)|[^\s()]+", text):
        yield tok


def _read(text: str) -> list:
    """Parse a sequence of s-expressions into nested Python lists of atoms."""
    stack: list[list] = [[]]
    for tok in _tokens(text):
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                raise ParseError(f"unbalanced ')' in {text!r}")
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise ParseError(f"unbalanced '(' in {text!r}")
    return stack[0]


def _build(node) -> Term:
    if isinstance(node, str):
        idx = var_index(node)
        return Var(idx) if idx is not None else App(node, ())
    if not node:
        raise ParseError("empty application '()'")
    head, *rest = node
    if not isinstance(head, str):
        raise ParseError("operation name expected at the head of an application")
    return App(head, tuple(_build(r) for r in rest))


def parse_term(text: str) -> Term:
    items = _read(text)
    if len(items) != 1:
        raise ParseError(f"expected exactly one term, got {len(items)} in {text!r}")
    return _build(items[0])


def parse_term_groups(text: str) -> list[Term]:
    """Parse the CLI list syntax: each top-level group ``( t1 t2 ... )`` holds terms."""
    out: list[Term] = []
    for group in _read(text):
        if isinstance(group, str):
            raise ParseError(f"expected a parenthesised group, got bare atom {group!r}")
        out.extend(_build(node) for node in group)
    return out
