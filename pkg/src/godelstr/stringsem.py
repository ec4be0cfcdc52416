"""Semantics of string formulas: terms, pattern solving and evaluation.

The evaluator is three-valued.  ``True``/``False`` are definitive relative
to the supplied witnesses and oracles; ``Unknown`` means some unguarded
quantifier was only searched up to the configured bounds, or the step
budget ran out.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import evalcore
from .evalcore import Guard, UnboundVariable, Verdict
from .macroexp import expand_call, find_tagged
from .strlang import ALPHABET, Lit, Term, Var

__all__ = ["Bounds", "Verdict", "UnboundVariable", "PreconditionViolated", "eval_term",
           "solve_pattern", "iter_solutions", "evaluate", "native_replace_all",
           "repall_witness", "q_stages", "q_witnesses", "q_oracle"]


class PreconditionViolated(ValueError):
    pass


@dataclass
class Bounds:
    alphabet: str = "ab"
    max_len: int = 3
    max_solutions: int = 10**6
    budget: int = 10**7

    def strings(self):
        for n in range(self.max_len + 1):
            for t in itertools.product(self.alphabet, repeat=n):
                yield "".join(t)


def eval_term(t: Term, env) -> str:
    out = []
    for a in t.atoms:
        if isinstance(a, Lit):
            out.append(a.value)
        else:
            try:
                out.append(env[a.name])
            except KeyError:
                raise UnboundVariable(a.name) from None
    return "".join(out)


def iter_solutions(t: Term, target: str, env=None):
    """Lazily yield every assignment to the unbound variables of ``t`` with ``t == target``."""
    env = env or {}
    items = []
    for a in t.atoms:
        if isinstance(a, Var) and a.name not in env:
            items.append(("v", a.name))
            continue
        s = a.value if isinstance(a, Lit) else env[a.name]
        if not s:
            continue
        if items and items[-1][0] == "g":
            items[-1] = ("g", items[-1][1] + s)
        else:
            items.append(("g", s))
    n = len(target)
    minrest = [0] * (len(items) + 1)
    for k in range(len(items) - 1, -1, -1):
        minrest[k] = minrest[k + 1] + (len(items[k][1]) if items[k][0] == "g" else 0)
    sigma: dict = {}

    def rec(k, pos):
        if k == len(items):
            if pos == n:
                yield dict(sigma)
            return
        kind, val = items[k]
        if kind == "g" or val in sigma:
            s = val if kind == "g" else sigma[val]
            if target.startswith(s, pos):
                yield from rec(k + 1, pos + len(s))
            return
        if k == len(items) - 1:
            sigma[val] = target[pos:]
            yield dict(sigma)
            del sigma[val]
            return
        limit = n - minrest[k + 1]
        nxt = items[k + 1]
        if nxt[0] == "g":
            j = target.find(nxt[1], pos)
            ends = []
            while j != -1 and j <= limit:
                ends.append(j)
                j = target.find(nxt[1], j + 1)
        else:
            ends = range(pos, limit + 1)
        for j in ends:
            sigma[val] = target[pos:j]
            yield from rec(k + 1, j)
            del sigma[val]

    yield from rec(0, 0)


def solve_pattern(t: Term, target: str, env=None) -> list:
    return list(iter_solutions(t, target, env))


class StringEngine(evalcore.Engine):
    def __init__(self, formula, bounds: Bounds, witnesses=None, oracles=None):
        super().__init__(formula, witnesses, oracles, bounds.budget, bounds.max_solutions)
        self.bounds = bounds
        self._domain = None

    def eval_atom(self, atom, env):
        eq = eval_term(atom.lhs, env) == eval_term(atom.rhs, env)
        return eq if atom.op == "=" else not eq

    def eq_guard(self, atom, var, env, shadow):
        def ground(t):
            return all(self.known(n, env, shadow) for n in t.variables())
        if ground(atom.lhs) and var in atom.rhs.variables():
            fixed, pattern = atom.lhs, atom.rhs
        elif ground(atom.rhs) and var in atom.lhs.variables():
            fixed, pattern = atom.rhs, atom.lhs
        else:
            return None
        target = eval_term(fixed, env)
        known = {n: env[n] for n in pattern.variables() if self.known(n, env, shadow)}
        unknown = [a.name for a in pattern.atoms if isinstance(a, Var) and a.name not in known]
        cost = 1 if unknown == [var] else len(target) + 1

        def cands():
            for sol in iter_solutions(pattern, target, known):
                yield sol[var]
        return Guard(cost, cands)

    def fallback_domain(self):
        if self._domain is None:
            self._domain = list(self.bounds.strings())
        return self._domain


def evaluate(formula, env=None, bounds=None, witnesses=None, oracles=None) -> Verdict:
    """Evaluate ``formula`` under ``env``.

    ``witnesses`` maps pre-order addresses of existential nodes to values.
    ``oracles`` maps addresses of subformulas to callables ``env -> bool``
    used in place of evaluating them.
    """
    eng = StringEngine(formula, bounds or Bounds(), witnesses, oracles)
    return eng.run(env or {})


# ---------------------------------------------------------------- replacement

def _check_replacement(x, u, v):
    if not u:
        raise PreconditionViolated("empty search string")
    if set(u) & set(v):
        raise PreconditionViolated("search and replacement share a character")
    i = x.find(u)
    while i != -1:
        j = x.find(u, i + 1)
        if j != -1 and j < i + len(u):
            raise PreconditionViolated("overlapping instances of the search string")
        i = j


def native_replace_all(x: str, u: str, v: str) -> str:
    """Replace every instance of ``u`` in ``x`` by ``v``, left to right."""
    _check_replacement(x, u, v)
    if v:
        # no new instance can straddle a replacement, so one pass suffices
        return x.replace(u, v)
    return _replace_sequence(x, u, v)[-1]


def _replace_sequence(x, u, v):
    seq = [x]
    cur = x
    start = 0
    while True:
        i = cur.find(u, max(0, start))
        if i == -1:
            return seq
        cur = cur[:i] + v + cur[i + len(u):]
        seq.append(cur)
        # occurrences before i - len(u) + 1 cannot appear since v holds no u
        start = i - len(u) + 1


def _self_overlapping(p):
    return any(p[:k] == p[-k:] for k in range(1, len(p)))


def repall_witness(x: str, u: str, v: str, p: str) -> str:
    """The sequence string ``p x0 p x1 p ... p xn p`` certifying a replace-all."""
    _check_replacement(x, u, v)
    if not p or _self_overlapping(p):
        raise PreconditionViolated("separator may overlap itself")
    seq = _replace_sequence(x, u, v)
    for s in seq:
        if p in s:
            raise PreconditionViolated("separator occurs in an intermediate string")
    return p + p.join(seq) + p


# ---------------------------------------------------------------- quotation

def _punct(x):
    k = 1
    while ":" * k in x:
        k += 1
    return ":" * k


def q_stages(x: str, certificates: bool = False) -> dict:
    """Intermediate strings of the quotation function.

    With ``certificates`` the four replacement sequences are included under
    ``"s"``; they can be quadratically larger than ``x``.
    """
    q = _punct(x)
    star, plus = "*" + q, "+" + q
    steps = [("\\", star), (star, "\\0"), ('"', star), (star, "\\1")]
    xs = [x]
    ss = []
    for u, v in steps:
        if certificates:
            ss.append(repall_witness(xs[-1], u, v, plus))
        xs.append(native_replace_all(xs[-1], u, v))
    out = {"q": q, "x1": xs[1], "x2": xs[2], "x3": xs[3], "y": xs[4]}
    if certificates:
        out["s"] = ss
    return out


def q_witnesses(x: str, formula=None, path=("Q",)) -> dict:
    """Witness map for an expansion of ``Q`` found at ``path`` inside ``formula``.

    With no formula, addresses refer to ``expand_call("Q", "x", "y")``.
    """
    if formula is None:
        formula = expand_call("Q", "x", "y")
    st = q_stages(x, certificates=True)
    out = {}
    for addr, node in find_tagged(formula, "bind", path):
        orig = [t[2] for t in node.tags if t[0] == "bind" and tuple(t[1]) == tuple(path)][0]
        if orig in ("q", "x1", "x2", "x3"):
            out[addr] = st[orig]
    for k in range(4):
        sub = path + (f"RepAll#{k + 1}",)
        for addr, node in find_tagged(formula, "bind", sub, "s"):
            out[addr] = st["s"][k]
    if len(out) != 8:
        raise LookupError(f"Q expansion not found at {path}")
    return out


def q_oracle(xterm: Term, yterm: Term):
    """Native decision procedure for ``Q(x, y)`` usable as an evaluation oracle."""
    def fn(env):
        return q_stages(eval_term(xterm, env))["y"] == eval_term(yterm, env)
    return fn
