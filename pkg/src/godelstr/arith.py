"""Arithmetic over the naturals and the translation from string formulas.

Strings correspond to numbers through bijective base-53 numeration: the
characters have digit values 1..53 and there is no zero digit, so every
natural number names exactly one string.  Under this correspondence
concatenation is definable with ``+`` and ``*`` (the ``Cat`` formula), which
lets any string sentence be rewritten as an arithmetic one with the same
truth value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import evalcore
from .evalcore import Guard, UnboundVariable, Verdict
from .macroexp import Expander, FreshNamer, MacroDef
from .strlang import (ALPHABET, CHAR_NUMBER, And, Atom, Exists, Forall, FormulaParser,
                      FormulaSyntaxError, Implies, Lit, MacroApp, Not, Or, Var, all_vars,
                      print_formula, rebuild, BINARY, QUANT)

BASE = len(ALPHABET)

__all__ = ["num", "denum", "successor", "iota", "AVar", "ANum", "Add", "Mul", "AAtom",
           "parse_aformula", "parse_aterm", "print_aformula", "ARITH_MACROS", "arith_call",
           "gen_pow53", "gen_lt", "gen_cat",
           "ABounds", "eval_arith", "translate"]


# ---------------------------------------------------------------- numbering

def num(s: str) -> int:
    n = 0
    for ch in s:
        n = n * BASE + CHAR_NUMBER[ch]
    return n


def denum(n: int) -> str:
    if n < 0:
        raise ValueError("negative number")
    out = []
    while n:
        c = (n - 1) % BASE + 1
        out.append(ALPHABET[c - 1])
        n = (n - c) // BASE
    return "".join(reversed(out))


def iota(n: int) -> str:
    return ALPHABET[0] * n


def successor(s: str) -> str:
    last = ALPHABET[-1]
    j = len(s)
    while j and s[j - 1] == last:
        j -= 1
    if j == 0:
        return iota(len(s) + 1)
    return s[:j - 1] + ALPHABET[CHAR_NUMBER[s[j - 1]]] + iota(len(s) - j)


# ---------------------------------------------------------------- syntax

@dataclass(frozen=True)
class AVar:
    name: str

    def variables(self):
        return {self.name}


@dataclass(frozen=True)
class ANum:
    value: int

    def variables(self):
        return set()


@dataclass(frozen=True)
class Add:
    left: object
    right: object

    def variables(self):
        return self.left.variables() | self.right.variables()


@dataclass(frozen=True)
class Mul:
    left: object
    right: object

    def variables(self):
        return self.left.variables() | self.right.variables()


def _subst(t, mapping):
    if isinstance(t, AVar):
        return mapping.get(t.name, t)
    if isinstance(t, ANum):
        return t
    return type(t)(_subst(t.left, mapping), _subst(t.right, mapping))


def term_str(t, need=0) -> str:
    """``need`` is 0 anywhere, 1 as the right operand of ``+`` or any operand of ``*``, 2 right of ``*``."""
    if isinstance(t, AVar):
        return t.name
    if isinstance(t, ANum):
        return str(t.value)
    if isinstance(t, Add):
        s = term_str(t.left, 0) + "+" + term_str(t.right, 1)
        return f"({s})" if need >= 1 else s
    s = term_str(t.left, 1) + "*" + term_str(t.right, 2)
    return f"({s})" if need >= 2 else s


class _TermMixin:
    def substitute(self, mapping):
        return _subst(self, mapping)

    def __str__(self):
        return term_str(self)


for _cls in (AVar, ANum, Add, Mul):
    _cls.substitute = _TermMixin.substitute
    _cls.__str__ = _TermMixin.__str__


@dataclass(frozen=True)
class AAtom:
    op: str
    lhs: object
    rhs: object
    tags: tuple = field(default=(), compare=False, repr=False)

    def variables(self):
        return self.lhs.variables() | self.rhs.variables()

    def substitute(self, mapping):
        return AAtom(self.op, _subst(self.lhs, mapping), _subst(self.rhs, mapping))

    def rename(self, mapping):
        return self.substitute({k: AVar(v) for k, v in mapping.items()})


class ArithParser(FormulaParser):
    arith = True

    def primary(self):
        if self.tok.kind == "(":
            # a parenthesis may open a term (``(x+1)*y=z``) or a formula
            save = self.i
            try:
                return self.atom()
            except FormulaSyntaxError:
                self.i = save
            return self.paren()
        return super().primary()

    def atom(self):
        lhs = self.term()
        if self.tok.kind not in ("=", "!"):
            raise FormulaSyntaxError("expected '=' or '!'", self.tok.pos)
        op = self.advance().value
        return AAtom(op, lhs, self.term())

    def term(self):
        t = self.product()
        while self.tok.kind == "+":
            self.advance()
            t = Add(t, self.product())
        return t

    def product(self):
        t = self.factor()
        while self.tok.kind == "*":
            self.advance()
            t = Mul(t, self.factor())
        return t

    def factor(self):
        t = self.tok
        if t.kind == "var":
            self.advance()
            return AVar(t.value)
        if t.kind == "num":
            self.advance()
            return ANum(int(t.value))
        if t.kind == "(":
            self.advance()
            inner = self.term()
            self.expect(")")
            return inner
        raise FormulaSyntaxError(f"expected a term, found {t.value or t.kind!r}", t.pos)


def parse_aformula(text: str, macros: bool = False):
    return ArithParser(text, macros=macros).parse()


def parse_aterm(text: str):
    p = ArithParser(text)
    t = p.term()
    if p.tok.kind != "eof":
        raise FormulaSyntaxError(f"unexpected {p.tok.value!r}", p.tok.pos)
    return t


def _print_aatom(a) -> str:
    return f"{term_str(a.lhs)}{a.op}{term_str(a.rhs)}"


def print_aformula(f, style: str = "minimal") -> str:
    return print_formula(f, style, atom_printer=_print_aatom)


# ---------------------------------------------------------------- macros

_ARITH_TEMPLATES = {
    "Pow53": (("k",), "( Ax:Ay: k=x*y -> x=1 | Ez: x=53*z )"),
    "lt": (("x", "y"), "( Ei: y=x+i+1 )"),
    "Cat": (("x", "y", "z"),
            "( Ek: Pow53(k) & Lt(y*53+1, 53*k+y) & ~Lt(y*53+1, k+y) & z=k*x+y )"),
}


def _arith_macros():
    reg = {}
    for name, (params, text) in _ARITH_TEMPLATES.items():
        # macro names must start with an upper-case letter in templates
        key = "Lt" if name == "lt" else name
        reg[key] = MacroDef.from_text(key, params, text, parser=parse_aformula)
    return reg


ARITH_MACROS = _arith_macros()


def _avar(name):
    return AVar(name)


def arith_call(name: str, *args, namer=None):
    """Fully expanded ``Pow53``/``lt``/``Cat`` applied to numbers, names or terms."""
    key = "Lt" if name == "lt" else name
    terms = tuple(ANum(a) if isinstance(a, int) else AVar(a) if isinstance(a, str) else a
                  for a in args)
    avoid = set()
    for t in terms:
        avoid |= t.variables()
    ex = Expander(ARITH_MACROS, namer or FreshNamer(avoid), make_var=_avar)
    return ex.apply(ARITH_MACROS[key], terms, (key,))


def gen_pow53(k):
    return arith_call("Pow53", k)


def gen_lt(x, y):
    return arith_call("lt", x, y)


def gen_cat(x, y, z):
    return arith_call("Cat", x, y, z)


# ---------------------------------------------------------------- evaluation

def eval_aterm(t, env) -> int:
    if isinstance(t, ANum):
        return t.value
    if isinstance(t, AVar):
        try:
            return env[t.name]
        except KeyError:
            raise UnboundVariable(t.name) from None
    if isinstance(t, Add):
        return eval_aterm(t.left, env) + eval_aterm(t.right, env)
    return eval_aterm(t.left, env) * eval_aterm(t.right, env)


def poly(t) -> dict:
    """Polynomial of a term: monomial (sorted tuple of names) -> coefficient."""
    if isinstance(t, ANum):
        return {(): t.value} if t.value else {}
    if isinstance(t, AVar):
        return {(t.name,): 1}
    a, b = poly(t.left), poly(t.right)
    out: dict = {}
    if isinstance(t, Add):
        for p in (a, b):
            for m, c in p.items():
                out[m] = out.get(m, 0) + c
    else:
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                m = tuple(sorted(m1 + m2))
                out[m] = out.get(m, 0) + c1 * c2
    return {m: c for m, c in out.items() if c}


def _partial(p, known) -> dict:
    out: dict = {}
    for m, c in p.items():
        rest = []
        for v in m:
            if v in known:
                c *= known[v]
            else:
                rest.append(v)
        if c:
            key = tuple(rest)
            out[key] = out.get(key, 0) + c
    return {m: c for m, c in out.items() if c}


def _divisor_pairs(n):
    """Divisors of n > 0, small and large interleaved."""
    r = math.isqrt(n)
    for d in range(1, r + 1):
        if n % d == 0:
            yield d
            if d * d != n:
                yield n // d


@dataclass
class ABounds:
    max_n: int = 200
    max_solutions: int = 10**6
    budget: int = 10**7


class ArithEngine(evalcore.Engine):
    use_range_leaves = True

    def __init__(self, formula, bounds: ABounds, witnesses=None, oracles=None):
        super().__init__(formula, witnesses, oracles, bounds.budget, bounds.max_solutions)
        self.bounds = bounds
        self._polys: dict = {}

    def eval_atom(self, atom, env):
        eq = eval_aterm(atom.lhs, env) == eval_aterm(atom.rhs, env)
        return eq if atom.op == "=" else not eq

    def diff(self, atom):
        d = self._polys.get(id(atom))
        if d is None:
            d = poly(atom.lhs)
            for m, c in poly(atom.rhs).items():
                d[m] = d.get(m, 0) - c
            d = self._polys[id(atom)] = {m: c for m, c in d.items() if c}
        return d

    def atom_guardable(self, atom, var, known):
        unknown = atom.variables() - known
        return var in unknown and len(unknown) <= 2

    def eq_guard(self, atom, var, env, shadow):
        known = {k: v for k, v in env.items() if k not in shadow}
        d = _partial(self.diff(atom), known)
        const = d.get((), 0)
        rest = {m: c for m, c in d.items() if m}
        if not rest:
            return Guard(0, lambda: ()) if const else None
        if any(var not in m for m in rest):
            return None
        if len(rest) != 1:
            return None
        (m, a), = rest.items()
        if m == (var,):
            q, r = divmod(-const, a)
            return Guard(1, lambda: (q,) if r == 0 and q >= 0 else ())
        if len(m) == 2:
            if -const % a:
                return Guard(0, lambda: ())
            n = -const // a
            if n < 0:
                return Guard(0, lambda: ())
            if n == 0:
                return None
            if m == (var, var):
                s = math.isqrt(n)
                return Guard(1, lambda: (s,) if s * s == n else ())
            return Guard(math.isqrt(n) + 1, lambda: _divisor_pairs(n))
        return None

    def range_usable(self, leaf, var, known):
        g = leaf.node
        unknown = g.body.variables() - (set(known) - {g.var})
        return unknown == {var, g.var}

    def range_guard(self, leaves, var, env):
        lo, hi = 0, None
        used = False
        for leaf in leaves:
            if leaf.kind != "range" or var not in leaf.vars or var in leaf.shadow:
                continue
            g = leaf.node
            if id(g) in self.hoisted and g.var in env:
                continue
            known = {k: v for k, v in env.items() if k not in leaf.shadow and k != g.var}
            d = _partial(self.diff(g.body), known)
            if set(d) - {(), (var,), (g.var,)}:
                continue
            a, s, c = d.get((var,), 0), d.get((g.var,), 0), d.get((), 0)
            if a == 0 or s not in (1, -1):
                continue
            # D = a*v + s*i + c; some i >= 0 solves D = 0 iff s*(a*v + c) <= 0
            a, c = a * s, c * s
            if not leaf.pol:
                # no i >= 0 solves it: a*v + c >= 1
                a, c = -a, -c + 1
            # now the condition reads a*v + c <= 0
            if a > 0:
                bound = (-c) // a
                hi = bound if hi is None else min(hi, bound)
            else:
                lo = max(lo, _ceil_div(c, -a))
            used = True
        if not used or hi is None:
            return None
        return Guard(max(0, hi - lo + 1), lambda: range(lo, hi + 1))

    def fallback_domain(self):
        return range(self.bounds.max_n + 1)


def _ceil_div(a, b):
    return -((-a) // b)


def eval_arith(f, env=None, bounds=None, witnesses=None, oracles=None) -> Verdict:
    eng = ArithEngine(f, bounds or ABounds(), witnesses, oracles)
    return eng.run(env or {})


# ---------------------------------------------------------------- translation

def _tr_atom(a):
    return ANum(num(a.value)) if isinstance(a, Lit) else AVar(a.name)


class Translator:
    def __init__(self, f):
        self.namer = FreshNamer(all_vars(f), letter="w")
        self.expander = Expander(ARITH_MACROS, self.namer, make_var=_avar)

    def cat(self, x, y, z):
        return self.expander.apply(ARITH_MACROS["Cat"], (x, y, z), ("Cat",))

    def side(self, atoms):
        """(value term, fresh names, conjuncts) for a concatenation of atoms."""
        terms = [_tr_atom(a) for a in atoms]
        if len(terms) == 1:
            return terms[0], [], []
        names, parts = [], []
        acc = terms[0]
        for t in terms[1:]:
            w = self.namer.fresh()
            names.append(w)
            parts.append((acc, t, AVar(w)))
            acc = AVar(w)
        # fold right to left so the outermost conjunct yields the whole side
        conj = [self.cat(*p) for p in reversed(parts)]
        return acc, names, conj

    def atom(self, g):
        lt, ln, lc = self.side(g.lhs.atoms)
        rt, rn, rc = self.side(g.rhs.atoms)
        core = AAtom(g.op, lt, rt)
        if not ln and not rn:
            return core
        body = core
        for c in lc + rc:
            body = And(body, c)
        for w in reversed(ln + rn):
            body = Exists(w, body)
        return body

    def walk(self, g):
        if isinstance(g, BINARY):
            spine = []
            while isinstance(g, BINARY):
                spine.append(g)
                g = g.left
            acc = self.walk(g)
            for node in reversed(spine):
                acc = rebuild(node, (acc, self.walk(node.right)))
            return acc
        if isinstance(g, QUANT):
            return type(g)(g.var, self.walk(g.body))
        if isinstance(g, Not):
            return Not(self.walk(g.body))
        if isinstance(g, Atom):
            return self.atom(g)
        raise TypeError(f"cannot translate {type(g).__name__}")


def translate(f):
    """Arithmetic formula true exactly when the string formula ``f`` is (under num)."""
    return Translator(f).walk(f)
