"""Formula AST, concrete syntax, and the substitution machinery.

The surface language is propositional logic over lowercase identifiers,
extended with the binary ability modality ``Kh(f, g)`` and the global
modalities ``A f`` (everywhere) and ``E f`` (somewhere).  Connective
precedence, tightest first::

    ~  A  E            prefix
    &                  left associative
    |                  left associative
    ->                 right associative
    <->                right associative

``true`` and ``false`` are reserved constants, ``#`` starts a comment that
runs to end of line, whitespace is insignificant.

``A``/``E``/``->``/``<->`` are abbreviations: :func:`desugar` rewrites a
formula into the kernel ``{Prop, Top, Bot, Not, Or, And, Kh}`` without
changing its meaning.  Atom identity throughout the package is structural
equality of desugared ASTs; all nodes are immutable and hashable.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

from .errors import ContractError


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Formula:
    """Base class; concrete nodes below."""

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Prop(Formula):
    name: str


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    child: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class And(Formula):
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
class Kh(Formula):
    pre: Formula
    post: Formula


@dataclass(frozen=True)
class A(Formula):
    child: Formula


@dataclass(frozen=True)
class E(Formula):
    child: Formula


TOP = Top()
BOT = Bot()

_BINARY = (Or, And, Implies, Iff)
_UNARY = (Not, A, E)


def props(f: Formula) -> frozenset[str]:
    """All proposition symbols occurring in f."""
    out: set[str] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Prop):
            out.add(g.name)
        elif isinstance(g, _UNARY):
            stack.append(g.child)
        elif isinstance(g, _BINARY):
            stack.extend((g.left, g.right))
        elif isinstance(g, Kh):
            stack.extend((g.pre, g.post))
    return frozenset(out)


def is_kh_free(f: Formula) -> bool:
    """True iff f contains no Kh, A or E node."""
    if isinstance(f, (Kh, A, E)):
        return False
    if isinstance(f, _UNARY):
        return is_kh_free(f.child)
    if isinstance(f, _BINARY):
        return is_kh_free(f.left) and is_kh_free(f.right)
    return True


def size(f: Formula) -> int:
    """Node count of f (used for the cubic model-size bound)."""
    if isinstance(f, _UNARY):
        return 1 + size(f.child)
    if isinstance(f, _BINARY):
        return 1 + size(f.left) + size(f.right)
    if isinstance(f, Kh):
        return 1 + size(f.pre) + size(f.post)
    return 1


def neg(f: Formula) -> Formula:
    """Negation with constant folding (~true = false, ~false = true)."""
    if isinstance(f, Top):
        return BOT
    if isinstance(f, Bot):
        return TOP
    return Not(f)


def conj(parts) -> Formula:
    """Left-folded conjunction; the empty conjunction is true."""
    parts = list(parts)
    if not parts:
        return TOP
    return reduce(And, parts)


def desugar(f: Formula) -> Formula:
    """Eliminate A, E, -> and <->.

    A f becomes Kh(~f, false); E f becomes ~Kh(f, false); -> and <-> expand
    propositionally.  The result uses only Prop/Top/Bot/Not/Or/And/Kh and
    is semantically equivalent to f.
    """
    if isinstance(f, Not):
        return Not(desugar(f.child))
    if isinstance(f, Or):
        return Or(desugar(f.left), desugar(f.right))
    if isinstance(f, And):
        return And(desugar(f.left), desugar(f.right))
    if isinstance(f, Implies):
        return Or(neg(desugar(f.left)), desugar(f.right))
    if isinstance(f, Iff):
        l, r = desugar(f.left), desugar(f.right)
        return And(Or(neg(l), r), Or(neg(r), l))
    if isinstance(f, Kh):
        return Kh(desugar(f.pre), desugar(f.post))
    if isinstance(f, A):
        return Kh(neg(desugar(f.child)), BOT)
    if isinstance(f, E):
        return Not(Kh(desugar(f.child), BOT))
    return f


def substitute_atom(f: Formula, target: tuple[Formula, Formula], value: Formula) -> Formula:
    """Replace every occurrence of Kh(pre, post) matching `target` by `value`.

    Matching is structural equality and proceeds bottom-up, so occurrences
    produced by rewriting nested arguments (e.g. the outer node of
    Kh(Kh(true, false), false) once its argument collapses) are replaced
    too: afterwards the target does not occur at all.  An absent target is
    a no-op.
    """
    pre, post = target

    def go(g: Formula) -> Formula:
        if isinstance(g, Kh):
            rebuilt = Kh(go(g.pre), go(g.post))
            if rebuilt.pre == pre and rebuilt.post == post:
                return value
            return rebuilt
        if isinstance(g, Not):
            return Not(go(g.child))
        if isinstance(g, A):
            return A(go(g.child))
        if isinstance(g, E):
            return E(go(g.child))
        if isinstance(g, _BINARY):
            return type(g)(go(g.left), go(g.right))
        return g

    return go(f)


def find_positive_atom(f: Formula) -> tuple[Formula, Formula] | None:
    """Leftmost-innermost Kh subformula with modality-free arguments.

    Returns its (pre, post) pair, or None iff f is Kh-free.  The fixed
    traversal order makes atom elimination deterministic.
    """
    if isinstance(f, Kh):
        hit = find_positive_atom(f.pre) or find_positive_atom(f.post)
        if hit is not None:
            return hit
        return (f.pre, f.post)
    if isinstance(f, _UNARY):
        return find_positive_atom(f.child)
    if isinstance(f, _BINARY):
        return find_positive_atom(f.left) or find_positive_atom(f.right)
    return None


# ---------------------------------------------------------------------------
# Atom conjunctions (the flat fragment the translation consumes)


@dataclass(frozen=True)
class Atom:
    """A Kh(pre, post) literal with modality-free arguments."""
    positive: bool
    pre: Formula
    post: Formula

    def __post_init__(self):
        if not (is_kh_free(self.pre) and is_kh_free(self.post)):
            raise ContractError(f"atom arguments must be modality-free: {self}")

    def __str__(self) -> str:
        body = f"Kh({to_text(self.pre)}, {to_text(self.post)})"
        return body if self.positive else "~" + body


@dataclass(frozen=True)
class AtomConjunction:
    """An indexed family of positive and negative Kh atoms.

    Positives are indexed 1..len(positives) (the set I); negatives occupy
    the disjoint range that follows (the set J).
    """
    positives: tuple[tuple[Formula, Formula], ...]
    negatives: tuple[tuple[Formula, Formula], ...]

    def __post_init__(self):
        for pre, post in self.positives + self.negatives:
            if not (is_kh_free(pre) and is_kh_free(post)):
                raise ContractError("atom components must be modality-free")

    @property
    def n_pos(self) -> int:
        return len(self.positives)

    @property
    def n_neg(self) -> int:
        return len(self.negatives)

    def formula(self) -> Formula:
        """The conjunction as a plain formula (for display and oracles)."""
        lits = [Kh(p, q) for p, q in self.positives]
        lits += [Not(Kh(p, q)) for p, q in self.negatives]
        return conj(lits)


# ---------------------------------------------------------------------------
# Concrete syntax


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


_SINGLE = {"&": "&", "|": "|", "(": "(", ")": ")", ",": ","}
_KEYWORDS = {"true": "true", "false": "false"}
_MODAL = {"Kh": "Kh", "A": "A", "E": "E"}


def _tokenize(text: str) -> list[tuple[str, str, int, int]]:
    toks: list[tuple[str, str, int, int]] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_col = col
        if c in _SINGLE:
            toks.append((_SINGLE[c], c, line, start_col))
            i += 1
            col += 1
            continue
        if c == "-":
            if text[i:i + 2] == "->":
                toks.append(("->", "->", line, start_col))
                i += 2
                col += 2
                continue
            raise ParseError("unknown token '-'", line, start_col)
        if c == "<":
            if text[i:i + 3] == "<->":
                toks.append(("<->", "<->", line, start_col))
                i += 3
                col += 3
                continue
            raise ParseError("unknown token '<'", line, start_col)
        if c == "~":
            toks.append(("~", "~", line, start_col))
            i += 1
            col += 1
            continue
        if c.isalpha():
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            col += j - i
            i = j
            if word in _KEYWORDS:
                toks.append((word, word, line, start_col))
            elif word in _MODAL:
                toks.append((word, word, line, start_col))
            elif word[0].islower():
                toks.append(("ident", word, line, start_col))
            else:
                raise ParseError(f"unknown token {word!r}", line, start_col)
            continue
        raise ParseError(f"unknown token {c!r}", line, start_col)
    toks.append(("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos]

    def take(self, kind: str | None = None):
        tok = self.toks[self.pos]
        if kind is not None and tok[0] != kind:
            what = tok[1] or "end of input"
            raise ParseError(f"expected {kind!r}, found {what!r}", tok[2], tok[3])
        self.pos += 1
        return tok

    def formula(self) -> Formula:
        return self.iff()

    def iff(self) -> Formula:
        left = self.implies()
        if self.peek()[0] == "<->":
            self.take()
            return Iff(left, self.iff())
        return left

    def implies(self) -> Formula:
        left = self.disj()
        if self.peek()[0] == "->":
            self.take()
            return Implies(left, self.implies())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek()[0] == "|":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.peek()[0] == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind = self.peek()[0]
        if kind == "~":
            self.take()
            return Not(self.unary())
        if kind == "A":
            self.take()
            return A(self.unary())
        if kind == "E":
            self.take()
            return E(self.unary())
        return self.primary()

    def primary(self) -> Formula:
        tok = self.take()
        kind = tok[0]
        if kind == "ident":
            return Prop(tok[1])
        if kind == "true":
            return TOP
        if kind == "false":
            return BOT
        if kind == "Kh":
            self.take("(")
            pre = self.formula()
            self.take(",")
            post = self.formula()
            self.take(")")
            return Kh(pre, post)
        if kind == "(":
            f = self.formula()
            self.take(")")
            return f
        what = tok[1] or "end of input"
        raise ParseError(f"unexpected {what!r}", tok[2], tok[3])


def parse(text: str) -> Formula:
    """Parse concrete syntax into a Formula; raises ParseError with
    line/column on malformed input."""
    p = _Parser(text)
    f = p.formula()
    tok = p.peek()
    if tok[0] != "eof":
        raise ParseError(f"unexpected trailing {tok[1]!r}", tok[2], tok[3])
    return f


_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4, Not: 5, A: 5, E: 5}


def _prec(f: Formula) -> int:
    return _PREC.get(type(f), 6)


def to_text(f: Formula) -> str:
    """Render with minimal parentheses; parse(to_text(f)) == f."""

    def go(g: Formula, need: int) -> str:
        if isinstance(g, Prop):
            s = g.name
        elif isinstance(g, Top):
            s = "true"
        elif isinstance(g, Bot):
            s = "false"
        elif isinstance(g, Not):
            s = "~" + go(g.child, 5)
        elif isinstance(g, A):
            s = "A " + go(g.child, 5)
        elif isinstance(g, E):
            s = "E " + go(g.child, 5)
        elif isinstance(g, And):
            s = go(g.left, 4) + " & " + go(g.right, 5)
        elif isinstance(g, Or):
            s = go(g.left, 3) + " | " + go(g.right, 4)
        elif isinstance(g, Implies):
            s = go(g.left, 3) + " -> " + go(g.right, 2)
        elif isinstance(g, Iff):
            s = go(g.left, 2) + " <-> " + go(g.right, 1)
        else:
            s = f"Kh({go(g.pre, 1)}, {go(g.post, 1)})"
        if _prec(g) < need:
            return "(" + s + ")"
        return s

    return go(f, 1)
