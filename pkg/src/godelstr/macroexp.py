"""Abbreviations and their hygienic expansion.

A :class:`MacroDef` is a formula template over named parameters.  Expanding
it substitutes argument terms for the parameters and renames every binder
of the template to a fresh variable, so no free variable of an argument can
be captured.  Expanded nodes carry provenance tags:

* ``("bind", path, original_name)`` on each renamed quantifier,
* ``("macro", path, name, args)`` on the root of each expansion,

where ``path`` is the chain of applications, e.g. ``("Q", "RepAll#2")``.
Witness lookup in :mod:`godelstr.stringsem` relies on these tags.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

from .strlang import (ALPHABET, BINARY, QUANT, And, Atom, Exists, Forall, Implies, Lit,
                      MacroApp, Not, Or, Term, Var, all_vars, children, literal,
                      parse_formula, rebuild)


class ArityMismatch(TypeError):
    pass


class CycleDetected(RuntimeError):
    pass


class UnknownMacro(KeyError):
    pass


@dataclass(frozen=True)
class MacroDef:
    name: str
    params: tuple
    body: object

    @classmethod
    def from_text(cls, name, params, text, parser=parse_formula):
        return cls(name, tuple(params), parser(text, macros=True))


class FreshNamer:
    """Deterministic supply of ``z1, z2, ...`` avoiding a given set."""

    def __init__(self, avoid=(), letter="z"):
        self.avoid = set(avoid)
        self.letter = letter
        self.counter = 0

    def fresh(self) -> str:
        while True:
            self.counter += 1
            name = f"{self.letter}{self.counter}"
            if name not in self.avoid:
                self.avoid.add(name)
                return name


def string_var(name):
    return Term((Var(name),))


class Expander:
    def __init__(self, registry, namer, make_var=string_var, full=True):
        self.registry = registry
        self.namer = namer
        self.make_var = make_var
        self.full = full
        self.stack: list[str] = []

    def apply(self, mdef: MacroDef, args, path):
        if len(args) != len(mdef.params):
            raise ArityMismatch(f"{mdef.name} takes {len(mdef.params)} arguments, got {len(args)}")
        if mdef.name in self.stack:
            raise CycleDetected(" -> ".join(self.stack + [mdef.name]))
        self.stack.append(mdef.name)
        try:
            env = dict(zip(mdef.params, args))
            counter = [0]
            out = self.walk(mdef.body, env, path, counter, rename=True)
        finally:
            self.stack.pop()
        return replace(out, tags=out.tags + (("macro", path, mdef.name, tuple(args)),))

    def walk(self, g, env, path, counter, rename):
        # iterative over left-nested binary chains, which get very long (Char, rule lists)
        if isinstance(g, BINARY):
            spine = []
            while isinstance(g, BINARY):
                spine.append(g)
                g = g.left
            acc = self.walk(g, env, path, counter, rename)
            for node in reversed(spine):
                acc = rebuild(node, (acc, self.walk(node.right, env, path, counter, rename)))
            return acc
        if isinstance(g, QUANT):
            if rename:
                new = self.namer.fresh()
                body = self.walk(g.body, {**env, g.var: self.make_var(new)}, path, counter, rename)
                return type(g)(new, body, tags=(("bind", path, g.var),))
            inner = {k: v for k, v in env.items() if k != g.var}
            return type(g)(g.var, self.walk(g.body, inner, path, counter, rename), tags=g.tags)
        if isinstance(g, Not):
            return Not(self.walk(g.body, env, path, counter, rename))
        if isinstance(g, MacroApp):
            args = tuple(a.substitute(env) for a in g.args)
            k = counter[0]
            counter[0] += 1
            if not self.full:
                return MacroApp(g.name, args)
            try:
                mdef = self.registry[g.name]
            except KeyError:
                raise UnknownMacro(g.name) from None
            return self.apply(mdef, args, path + (f"{g.name}#{k}",))
        return g.substitute(env)


def _avoid_set(args):
    out = set()
    for a in args:
        out |= a.variables()
    return out


def expand(mdef: MacroDef, args, registry=None, namer=None):
    """One level of expansion; nested applications stay as ``MacroApp``."""
    namer = namer or FreshNamer(_avoid_set(args))
    ex = Expander(registry or BUILTINS, namer, full=False)
    return ex.apply(mdef, tuple(args), (mdef.name,))


def expand_fully(mdef: MacroDef, args, registry=None, namer=None, make_var=string_var):
    namer = namer or FreshNamer(_avoid_set(args))
    ex = Expander(registry or BUILTINS, namer, make_var=make_var)
    return ex.apply(mdef, tuple(args), (mdef.name,))


def expand_in(formula, registry=None, namer=None, make_var=string_var):
    """Expand every abbreviation inside ``formula``, keeping its own binders."""
    namer = namer or FreshNamer(all_vars(formula))
    ex = Expander(registry or BUILTINS, namer, make_var=make_var)
    return ex.walk(formula, {}, (), [0], rename=False)


def expand_call(name: str, *args, registry=None):
    """Convenience: ``expand_call("Sb", "u", "y")`` with variable names or Terms."""
    reg = registry or BUILTINS
    terms = tuple(a if isinstance(a, Term) else Term((Var(a),)) for a in args)
    return expand_fully(reg[name], terms, registry=reg)


def find_tagged(formula, kind, path, extra=None):
    """Yield (address, node) carrying a provenance tag of ``kind`` at exactly ``path``."""
    from .strlang import preorder
    path = tuple(path)
    for i, g in enumerate(preorder(formula)):
        for tag in g.tags:
            if tag[0] != kind or tuple(tag[1]) != path:
                continue
            if extra is not None and tag[2] != extra:
                continue
            yield i, g


# ---------------------------------------------------------------- built-ins

def _char_text(v="a"):
    return "( " + " | ".join(f"{v}={literal(c)}" for c in ALPHABET) + " )"


_TEMPLATES = {
    "Char": (("a",), _char_text()),
    "Sb": (("x", "y"), '( Eu:Ev: y=uxv )'),
    "RepOne": (("x", "u", "v", "y"), '( Ee:Ef: x=euf & y=evf )'),
    "RepAll": (("x", "u", "v", "y", "p"),
               '( Es: (Et: s=pxpt) & (Et: s=tpyp) & ~Sb(u,y)'
               ' & Ah:Ak: ( Sb(phpkp, s) & ~Sb(p,h) & ~Sb(p,k) ) -> RepOne(h,u,v,k) )'),
    "Punct": (("x", "q"), '( ( Aa: Sb(a,q) & Char(a) -> a=":" ) & ~Sb(q,x) )'),
    "Q": (("x", "y"),
          r'( Eq: Punct(x,q)'
          r' & Ex1: RepAll(x, "\0", "*"q, x1, "+"q)'
          r' & Ex2: RepAll(x1, "*"q, "\00", x2, "+"q)'
          r' & Ex3: RepAll(x2, "\1", "*"q, x3, "+"q)'
          r' & RepAll(x3, "*"q, "\01", y, "+"q) )'),
    "EChar": (("e",), r'( e="\00" | e="\01" | e="\02" | Char(e) & e!"\0" & e!"\1" )'),
    "Write": (("x", "e", "y"),
              r'( ( x="" | EChar(x) ) & ( e="\02" & y="" | e!"\02" & y=e )'
              r' | ( Ef:Ez: x=fz & EChar(f) & z!"" & y=ez ) )'),
    "Move": (("f1", "t1", "f2", "t2"),
             r'( ( f1="" & t1="" & f2="" & t2="" )'
             r' | ( f1="" & t1!"" & f2="" & t2="\02"t1 )'
             r' | ( f1="\02"f2 & t1="" & t2="" )'
             r' | ( Ee: EChar(e) & f1=ef2 & (e!"\02" | t1!"") & t2=et1 ) )'),
}

BUILTINS = {name: MacroDef.from_text(name, params, text)
            for name, (params, text) in _TEMPLATES.items()}
