"""First-order language on finite character strings.

Syntax tree, parser, printer and the character-escape codec.  The
connective layer (``Not``, ``And``, ``Or``, ``Implies``, ``Forall``,
``Exists``, ``MacroApp``) is shared with the arithmetic language in
:mod:`godelstr.arith`; only atoms and terms differ.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Callable, Iterator, Union

ALPHABET = 'abcdefghijklmnopqrstuvwxyz0123456789"\\=!()~&|->AE:+*<'
CHAR_NUMBER = {c: i + 1 for i, c in enumerate(ALPHABET)}

assert len(ALPHABET) == 53 and len(set(ALPHABET)) == 53

VAR_RE = re.compile(r"[a-z][0-9]*\Z")


class MalformedEscape(ValueError):
    pass


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


# ---------------------------------------------------------------- codec

def encode_chars(s: str) -> str:
    return s.replace("\\", "\\0").replace('"', "\\1")


def decode_chars(s: str) -> str:
    out = []
    i = 0
    n = len(s)
    while i < n:
        c = s[i]
        if c == "\\":
            if i + 1 >= n:
                raise MalformedEscape(f"trailing backslash at {i}")
            d = s[i + 1]
            if d == "0":
                out.append("\\")
            elif d == "1":
                out.append('"')
            else:
                raise MalformedEscape(f"undefined escape \\{d} at {i}")
            i += 2
        elif c == '"':
            raise MalformedEscape(f'raw " at {i}')
        else:
            out.append(c)
            i += 1
    return "".join(out)


def is_string(s: str) -> bool:
    return all(c in CHAR_NUMBER for c in s)


def literal(s: str) -> str:
    """Source text of the string literal denoting ``s``."""
    return '"' + encode_chars(s) + '"'


# ---------------------------------------------------------------- terms

@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Lit:
    value: str

    def __str__(self):
        return literal(self.value)


@dataclass(frozen=True)
class Term:
    atoms: tuple

    def __post_init__(self):
        if not self.atoms:
            raise ValueError("empty term")

    def variables(self) -> set[str]:
        return {a.name for a in self.atoms if isinstance(a, Var)}

    def rename(self, mapping: dict) -> "Term":
        return Term(tuple(Var(mapping.get(a.name, a.name)) if isinstance(a, Var) else a
                          for a in self.atoms))

    def substitute(self, mapping: dict) -> "Term":
        """Replace variables by terms (splicing their atoms)."""
        out = []
        for a in self.atoms:
            if isinstance(a, Var) and a.name in mapping:
                out.extend(mapping[a.name].atoms)
            else:
                out.append(a)
        return Term(tuple(out))

    def __str__(self):
        return "".join(str(a) for a in self.atoms)


def term(*parts) -> Term:
    """Build a term; ``str`` parts are variable names, ``Lit`` parts literals."""
    return Term(tuple(Var(p) if isinstance(p, str) else p for p in parts))


# ---------------------------------------------------------------- formulas

_TAG = field(default=(), compare=False, repr=False)


@dataclass(frozen=True)
class Atom:
    op: str  # "=" or "!"
    lhs: Term
    rhs: Term
    tags: tuple = _TAG

    def variables(self) -> set[str]:
        return self.lhs.variables() | self.rhs.variables()

    def rename(self, mapping):
        return Atom(self.op, self.lhs.rename(mapping), self.rhs.rename(mapping))

    def substitute(self, mapping):
        return Atom(self.op, self.lhs.substitute(mapping), self.rhs.substitute(mapping))


@dataclass(frozen=True)
class Not:
    body: "Formula"
    tags: tuple = _TAG


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"
    tags: tuple = _TAG


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"
    tags: tuple = _TAG


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"
    tags: tuple = _TAG


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"
    tags: tuple = _TAG


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"
    tags: tuple = _TAG


@dataclass(frozen=True)
class MacroApp:
    """Abbreviation application; only legal inside macro templates."""
    name: str
    args: tuple
    tags: tuple = _TAG

    def variables(self) -> set[str]:
        out = set()
        for a in self.args:
            out |= a.variables()
        return out


Formula = Union[Atom, Not, And, Or, Implies, Forall, Exists, MacroApp]
BINARY = (And, Or, Implies)
QUANT = (Forall, Exists)


def is_atom(f) -> bool:
    return not isinstance(f, (Not, And, Or, Implies, Forall, Exists, MacroApp))


def children(f) -> tuple:
    if isinstance(f, BINARY):
        return (f.left, f.right)
    if isinstance(f, (Not, Forall, Exists)):
        return (f.body,)
    return ()


def preorder(f) -> Iterator:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(children(g)))


def addresses(f) -> dict[int, int]:
    """Map ``id(node)`` to its pre-order index."""
    return {id(g): i for i, g in enumerate(preorder(f))}


def free_vars(f) -> set[str]:
    out: set[str] = set()

    def go(g, bound):
        if isinstance(g, QUANT):
            go(g.body, bound | {g.var})
        elif isinstance(g, (Not, And, Or, Implies)):
            for c in children(g):
                go(c, bound)
        else:
            out.update(g.variables() - bound)

    go(f, frozenset())
    return out


def all_vars(f) -> set[str]:
    out: set[str] = set()
    for g in preorder(f):
        if isinstance(g, QUANT):
            out.add(g.var)
        elif not isinstance(g, (Not, And, Or, Implies)):
            out |= g.variables()
    return out


def is_sentence(f) -> bool:
    return not free_vars(f)


def rebuild(f, kids: tuple):
    if isinstance(f, BINARY):
        return replace(f, left=kids[0], right=kids[1])
    return replace(f, body=kids[0])


def alpha_canonical(f):
    """Rename every binder to a canonical name in pre-order."""
    counter = [0]

    def go(g, mapping):
        if isinstance(g, QUANT):
            counter[0] += 1
            name = f"#{counter[0]}"
            return type(g)(name, go(g.body, {**mapping, g.var: name}))
        if isinstance(g, (Not, And, Or, Implies)):
            return rebuild(g, tuple(go(c, mapping) for c in children(g)))
        if isinstance(g, MacroApp):
            return MacroApp(g.name, tuple(a.rename(mapping) for a in g.args))
        return g.rename(mapping)

    return go(f, {})


def alpha_equivalent(f, g) -> bool:
    return alpha_canonical(f) == alpha_canonical(g)


# ---------------------------------------------------------------- tokenizer

@dataclass
class Token:
    kind: str
    value: str
    pos: int


_SINGLE = {"=": "=", "!": "!", "~": "~", "&": "&", "|": "|", ":": ":",
           "(": "(", ")": ")", ",": ","}


def tokenize(text: str, arith: bool = False) -> list[Token]:
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c in " \t\r\n":
            i += 1
        elif "a" <= c <= "z":
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Token("var", text[i:j], i))
            i = j
        elif c in "AE" and i + 1 < n and "a" <= text[i + 1] <= "z":
            toks.append(Token("quant", c, i))
            i += 1
        elif "A" <= c <= "Z":
            j = i + 1
            while j < n and (text[j].isalnum() and text[j].isascii()):
                j += 1
            toks.append(Token("macro", text[i:j], i))
            i = j
        elif c == '"' and not arith:
            j = text.find('"', i + 1)
            if j < 0:
                raise FormulaSyntaxError("unterminated literal", i)
            body = text[i + 1:j]
            for k, ch in enumerate(body):
                if ch not in CHAR_NUMBER:
                    raise FormulaSyntaxError(f"character {ch!r} not allowed in literal", i + 1 + k)
            try:
                value = decode_chars(body)
            except MalformedEscape as e:
                raise FormulaSyntaxError(f"malformed escape ({e})", i) from None
            toks.append(Token("lit", value, i))
            i = j + 1
        elif c.isdigit() and arith:
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            if c == "0" and j > i + 1:
                raise FormulaSyntaxError("number literal starts with 0", i)
            toks.append(Token("num", text[i:j], i))
            i = j
        elif c == "-" and text.startswith("->", i):
            toks.append(Token("->", "->", i))
            i += 2
        elif arith and c in "+*":
            toks.append(Token(c, c, i))
            i += 1
        elif c in _SINGLE:
            toks.append(Token(_SINGLE[c], c, i))
            i += 1
        else:
            raise FormulaSyntaxError(f"unexpected character {c!r}", i)
    toks.append(Token("eof", "", n))
    return toks


# ---------------------------------------------------------------- parser

class FormulaParser:
    """Recursive descent over the shared connective grammar.

    Precedence, loosest first: quantifier body, ``->``, ``|``, ``&``,
    ``~``, atoms.  Binary operators associate to the left; a quantifier
    body extends as far to the right as possible.
    """

    arith = False

    def __init__(self, text: str, macros: bool = False):
        self.toks = tokenize(text, arith=self.arith)
        self.i = 0
        self.macros = macros

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str) -> Token:
        if self.tok.kind != kind:
            raise FormulaSyntaxError(f"expected {kind!r}, found {self.tok.value or self.tok.kind!r}",
                                     self.tok.pos)
        return self.advance()

    def parse(self):
        f = self.formula()
        if self.tok.kind != "eof":
            raise FormulaSyntaxError(f"unexpected {self.tok.value!r}", self.tok.pos)
        return f

    def formula(self):
        f = self.disjunction()
        while self.tok.kind == "->":
            self.advance()
            f = Implies(f, self.disjunction())
        return f

    def disjunction(self):
        f = self.conjunction()
        while self.tok.kind == "|":
            self.advance()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self):
        f = self.unary()
        while self.tok.kind == "&":
            self.advance()
            f = And(f, self.unary())
        return f

    def unary(self):
        if self.tok.kind == "~":
            self.advance()
            return Not(self.unary())
        return self.primary()

    def primary(self):
        t = self.tok
        if t.kind == "quant":
            self.advance()
            v = self.expect("var").value
            self.expect(":")
            body = self.formula()
            return (Forall if t.value == "A" else Exists)(v, body)
        if t.kind == "macro":
            if not self.macros:
                raise FormulaSyntaxError(f"abbreviation {t.value} is not part of the language", t.pos)
            self.advance()
            self.expect("(")
            args = [self.term()]
            while self.tok.kind == ",":
                self.advance()
                args.append(self.term())
            self.expect(")")
            return MacroApp(t.value, tuple(args))
        if t.kind == "(":
            return self.paren()
        return self.atom()

    def paren(self):
        self.expect("(")
        f = self.formula()
        self.expect(")")
        return f

    def atom(self):
        lhs = self.term()
        if self.tok.kind not in ("=", "!"):
            raise FormulaSyntaxError("expected '=' or '!'", self.tok.pos)
        op = self.advance().value
        return self.make_atom(op, lhs, self.term())

    def make_atom(self, op, lhs, rhs):
        return Atom(op, lhs, rhs)

    def term(self):
        atoms = []
        while self.tok.kind in ("var", "lit"):
            t = self.advance()
            atoms.append(Var(t.value) if t.kind == "var" else Lit(t.value))
        if not atoms:
            raise FormulaSyntaxError("empty term", self.tok.pos)
        return Term(tuple(atoms))


def parse_formula(text: str, macros: bool = False) -> Formula:
    return FormulaParser(text, macros=macros).parse()


def parse_term(text: str) -> Term:
    p = FormulaParser(text)
    t = p.term()
    if p.tok.kind != "eof":
        raise FormulaSyntaxError(f"unexpected {p.tok.value!r}", p.tok.pos)
    return t


def parse_literal(text: str) -> str:
    """Decode a single string literal such as ``"ab\\1"``."""
    t = parse_term(text.strip())
    if len(t.atoms) != 1 or not isinstance(t.atoms[0], Lit):
        raise FormulaSyntaxError("expected a single string literal", 0)
    return t.atoms[0].value


# ---------------------------------------------------------------- printer

_LEVEL = {Implies: 2, Or: 3, And: 4, Not: 5}
_OPS = {Implies: "->", Or: "|", And: "&"}


def _print_atom(a) -> str:
    return f"{a.lhs}{a.op}{a.rhs}"


def print_formula(f, style: str = "minimal", atom_printer: Callable = _print_atom) -> str:
    """Render ``f``; ``style`` is ``"minimal"`` or ``"full"`` (every compound operand bracketed)."""
    if style not in ("minimal", "full"):
        raise ValueError(style)
    full = style == "full"
    out: list[str] = []

    # explicit stack keeps very deep generated formulas off the recursion limit
    stack: list = [(f, 0, True)]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
            continue
        g, need, rightmost = item
        if full:
            paren = need > 0
        elif isinstance(g, QUANT):
            paren = not rightmost
        elif isinstance(g, (Not, And, Or, Implies)):
            paren = _LEVEL[type(g)] < need
        else:
            paren = False
        inner_right = True if paren else rightmost
        todo: list = []
        if paren:
            todo.append("(")
        if isinstance(g, QUANT):
            todo.append(("A" if isinstance(g, Forall) else "E") + g.var + ":")
            todo.append((g.body, 1 if full else 0, True))
        elif isinstance(g, Not):
            todo.append("~")
            todo.append((g.body, 5, inner_right))
        elif isinstance(g, BINARY):
            lvl = _LEVEL[type(g)]
            todo.append((g.left, lvl, False))
            todo.append(_OPS[type(g)])
            todo.append((g.right, lvl + 1, inner_right))
        elif isinstance(g, MacroApp):
            todo.append(g.name + "(" + ",".join(str(a) for a in g.args) + ")")
        else:
            todo.append(atom_printer(g))
        if paren:
            todo.append(")")
        stack.extend(reversed(todo))
    return "".join(out)
