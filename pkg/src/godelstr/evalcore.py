"""Three-valued evaluation engine shared by the string and number evaluators.

Connectives follow strong Kleene logic (``None`` is Unknown).  Quantifiers
are evaluated in *blocks*: a quantifier together with every same-kind
binder reachable through conjunctive positions of its body (prenex moves
that are valid because names are checked for capture).  Within a block
the search repeatedly binds

1. a variable that has a witness,
2. else the variable with the cheapest *guard*: a finite candidate set
   that provably contains every value under which the body can reach the
   sought truth value,
3. else the first variable by bounded enumeration, which can only ever
   yield a positive finding; exhausting it is recorded as a diagnostic.

Subclasses supply atom evaluation, guard candidates and the fallback
domain.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field

from .strlang import And, Exists, Forall, Implies, Not, Or, QUANT, addresses, free_vars, is_atom

FOUND, NONE, UNKNOWN = "found", "none", "unknown"


class BudgetExhausted(Exception):
    pass


class UnboundVariable(NameError):
    pass


class GuardFailure(Exception):
    """A planned guard turned out unusable for the actual values."""


@dataclass
class Verdict:
    value: bool | None
    diagnostics: list = field(default_factory=list)
    steps: int = 0
    witnessed: list = field(default_factory=list)
    oracled: list = field(default_factory=list)

    def __post_init__(self):
        if self.value is None and not self.diagnostics:
            self.diagnostics = ["unknown"]

    @property
    def name(self) -> str:
        return {True: "True", False: "False", None: "Unknown"}[self.value]

    def as_json(self) -> dict:
        return {"verdict": self.name,
                "bound_limited": [d for d in self.diagnostics if isinstance(d, int)],
                "budget_exhausted": "budget" in self.diagnostics,
                "steps": self.steps}

    def __repr__(self):
        return f"Verdict({self.name}, diagnostics={self.diagnostics[:5]})"


@dataclass
class Guard:
    cost: int
    candidates: object  # callable -> iterable of values


@dataclass
class Leaf:
    kind: str  # "atom", "range", "union", "scope"
    node: object
    pol: bool
    shadow: frozenset
    vars: frozenset
    parts: tuple = ()
    locals: tuple = ()  # for "scope": names bound by the quantifier chain


@dataclass
class Block:
    tp: bool
    vars: list
    names: frozenset
    matrix: object
    leaves: list


def _kleene_not(v):
    return None if v is None else not v


class Engine:
    use_range_leaves = False

    def __init__(self, formula, witnesses=None, oracles=None, budget=10**7, max_solutions=10**6):
        self.formula = formula
        self.addr = addresses(formula)
        by_addr = {a: i for i, a in self.addr.items()}
        self.witness = {}
        for a, w in (witnesses or {}).items():
            if a not in by_addr:
                raise IndexError(f"witness address {a} out of range")
            self.witness[by_addr[a]] = w
        self.oracles = {}
        for a, fn in (oracles or {}).items():
            if a not in by_addr:
                raise IndexError(f"oracle address {a} out of range")
            self.oracles[by_addr[a]] = fn
        self.budget = budget
        self.max_solutions = max_solutions
        self.steps = 0
        self.diags: list = []
        self.used_witness: list = []
        self.used_oracle: list = []
        self.blocks: dict[int, Block] = {}
        self.hoisted: set[int] = set()
        self._plans: dict = {}
        self._names: dict = {}

    # -------------------------------------------------------- hooks
    def eval_atom(self, atom, env):
        raise NotImplementedError

    def eq_guard(self, atom, var, env, shadow):
        """Guard from an atom that must hold as an equation, or None."""
        raise NotImplementedError

    def range_guard(self, leaves, var, env):
        return None

    def range_usable(self, leaf, var, known):
        return False

    def atom_guardable(self, atom, var, known):
        """Static counterpart of :meth:`eq_guard` given only which names are known."""
        for a, b in ((atom.lhs, atom.rhs), (atom.rhs, atom.lhs)):
            if var in b.variables() and a.variables() <= known:
                return True
        return False

    def fallback_domain(self):
        raise NotImplementedError

    # -------------------------------------------------------- driver
    def run(self, env) -> Verdict:
        missing = free_vars(self.formula) - set(env)
        if missing:
            raise UnboundVariable(", ".join(sorted(missing)))
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, 20000))
        try:
            value = self.ev(self.formula, dict(env))
        except BudgetExhausted:
            value = None
            self.diags.append("budget")
        finally:
            sys.setrecursionlimit(old)
        return Verdict(value, list(dict.fromkeys(self.diags)), self.steps,
                       sorted(set(self.used_witness)), sorted(set(self.used_oracle)))

    def tick(self):
        self.steps += 1
        if self.steps > self.budget:
            raise BudgetExhausted()

    def ev(self, f, env):
        self.tick()
        fid = id(f)
        if fid in self.oracles:
            self.used_oracle.append(self.addr[fid])
            return bool(self.oracles[fid](env))
        if isinstance(f, (And, Or)):
            kind = type(f)
            spine = []
            g = f
            while type(g) is kind and id(g) not in self.oracles:
                spine.append(g.right)
                g = g.left
            spine.append(g)
            stop = kind is Or  # value that short-circuits
            seen_unknown = False
            for part in reversed(spine):
                v = self.ev(part, env)
                if v is stop:
                    return stop
                if v is None:
                    seen_unknown = True
            return None if seen_unknown else (not stop)
        if isinstance(f, Not):
            return _kleene_not(self.ev(f.body, env))
        if isinstance(f, Implies):
            a = self.ev(f.left, env)
            if a is False:
                return True
            b = self.ev(f.right, env)
            if b is True:
                return True
            if a is True and b is False:
                return False
            return None
        if isinstance(f, QUANT):
            if fid in self.hoisted:
                return self.ev(f.body, env)
            return self.ev_block(f, env)
        return self.eval_atom(f, env)

    # -------------------------------------------------------- blocks
    def ev_block(self, q, env):
        blk = self.blocks.get(id(q))
        if blk is None:
            blk = self.blocks[id(q)] = self.make_block(q)
        env2 = {k: v for k, v in env.items() if k not in blk.names}
        res = self.search(blk, blk.vars, env2)
        if res == UNKNOWN:
            return None
        found = res == FOUND
        return found if isinstance(q, Exists) else not found

    def make_block(self, q):
        tp = isinstance(q, Exists)
        vars_ = [(q.var, q)]
        names = {q.var}
        matrix_free = free_vars(q.body)

        def hoist(g, p):
            if id(g) in self.oracles:
                return
            if isinstance(g, Not):
                hoist(g.body, not p)
            elif isinstance(g, And) and p or isinstance(g, Or) and not p:
                hoist(g.left, p)
                hoist(g.right, p)
            elif isinstance(g, Implies) and not p:
                hoist(g.left, True)
                hoist(g.right, False)
            elif isinstance(g, QUANT) and (isinstance(g, Exists) == p):
                if g.var in names or g.var in matrix_free:
                    return
                names.add(g.var)
                vars_.append((g.var, g))
                self.hoisted.add(id(g))
                hoist(g.body, p)

        hoist(q.body, tp)
        leaves = self.collect(q.body, tp, frozenset())
        return Block(tp, vars_, frozenset(names), q.body, leaves)

    def collect(self, g, p, shadow):
        """Conditions necessary for ``g`` to take truth value ``p``."""
        if id(g) in self.oracles:
            return []
        if isinstance(g, Not):
            return self.collect(g.body, not p, shadow)
        if isinstance(g, (And, Or, Implies)):
            if isinstance(g, Implies):
                left_p, right_p, conj = (True, False, True) if not p else (False, True, False)
            else:
                conj = (isinstance(g, And) == p)
                left_p = right_p = p
            if isinstance(g, (And, Or)) and type(g.left) is type(g):
                # flatten long chains
                parts = []
                h = g
                while type(h) is type(g) and id(h) not in self.oracles:
                    parts.append(h.right)
                    h = h.left
                parts.append(h)
                sub = [self.collect(x, p, shadow) for x in reversed(parts)]
            else:
                sub = [self.collect(g.left, left_p, shadow), self.collect(g.right, right_p, shadow)]
            if conj:
                return [leaf for s in sub for leaf in s]
            if any(not s for s in sub):
                return []
            vs = frozenset().union(*(leaf.vars for s in sub for leaf in s))
            return [Leaf("union", g, p, shadow, vs, tuple(sub))]
        if isinstance(g, QUANT):
            out = []
            if self.use_range_leaves and isinstance(g, Exists) and is_atom(g.body):
                out.append(Leaf("range", g, p, shadow, frozenset(g.body.variables())))
            if id(g) in self.hoisted:
                return out + self.collect(g.body, p, shadow)
            if isinstance(g, Exists) == p:
                # the body's conditions hold for *some* values of the bound
                # chain, which a guard may enumerate on the way to other vars
                locs = [g.var]
                h = g.body
                while type(h) is type(g) and id(h) not in self.oracles and id(h) not in self.hoisted:
                    locs.append(h.var)
                    h = h.body
                inner = self.collect(h, p, shadow - set(locs))
                if inner:
                    vs = frozenset().union(*(leaf.vars for leaf in inner)) - set(locs)
                    out.append(Leaf("scope", g, p, shadow, vs, (inner,), tuple(locs)))
            return out
        return [Leaf("atom", g, p, shadow, frozenset(g.variables()))]

    def known(self, name, env, shadow):
        return name in env and name not in shadow

    def best_guard(self, leaves, var, env):
        best = None
        for leaf in leaves:
            if leaf.kind == "atom":
                if all(self.known(n, env, leaf.shadow) for n in leaf.vars):
                    if self.eval_atom(leaf.node, env) != leaf.pol:
                        return Guard(0, lambda: ())
                    continue
                if var not in leaf.vars or var in leaf.shadow:
                    continue
                if (leaf.node.op == "=") != leaf.pol:
                    continue
                g = self.eq_guard(leaf.node, var, env, leaf.shadow)
            elif leaf.kind == "union":
                if var not in leaf.vars:
                    continue
                g = self.union_guard(leaf, var, env)
            elif leaf.kind == "scope":
                if var not in leaf.vars or var in leaf.shadow:
                    continue
                g = self.scope_guard(leaf, var, env)
            else:
                continue
            if g is not None and (best is None or g.cost < best.cost):
                best = g
                if g.cost == 0:
                    return g
        rg = self.range_guard(leaves, var, env)
        if rg is not None and (best is None or rg.cost < best.cost):
            best = rg
        return best

    def union_guard(self, leaf, var, env):
        gs = []
        for part in leaf.parts:
            g = self.best_guard(part, var, env)
            if g is None:
                return None
            gs.append(g)

        def cands():
            for g in gs:
                yield from g.candidates()
        return Guard(sum(g.cost for g in gs), cands)

    def scope_guard(self, leaf, var, env):
        inner, locs = leaf.parts[0], leaf.locals
        env0 = {k: v for k, v in env.items() if k not in locs}
        key = (id(leaf), var, frozenset(env0) & self._leaf_names(leaf))
        plan = self._plans.get(key, False)
        if plan is False:
            plan = self._plans[key] = self._plan(inner, var, locs, set(env0))
        if plan is None:
            return None
        return self._chain(inner, var, plan, env0)

    def _leaf_names(self, leaf):
        names = self._names.get(id(leaf))
        if names is None:
            names = set(leaf.vars) | set(leaf.locals) | set(leaf.shadow)
            for sub in leaf.parts:
                for x in sub:
                    names |= self._leaf_names(x)
            names = self._names[id(leaf)] = frozenset(names)
        return names

    def _plan(self, leaves, var, locs, known):
        """Locals to bind, in order, before ``var`` becomes guardable; None if never."""
        known = set(known)
        plan = []
        todo = list(locs)
        while not self._has_guard(leaves, var, known):
            for l in todo:
                if self._has_guard(leaves, l, known):
                    todo.remove(l)
                    plan.append(l)
                    known.add(l)
                    break
            else:
                return None
        return plan

    def _has_guard(self, leaves, var, known):
        for leaf in leaves:
            if var not in leaf.vars or var in leaf.shadow:
                continue
            if leaf.kind == "atom":
                if (leaf.node.op == "=") != leaf.pol:
                    continue
                if self.atom_guardable(leaf.node, var, {n for n in known if n not in leaf.shadow}):
                    return True
            elif leaf.kind == "union":
                if all(self._has_guard(part, var, known) for part in leaf.parts):
                    return True
            elif leaf.kind == "scope":
                k = known - set(leaf.locals)
                if self._plan(leaf.parts[0], var, leaf.locals, k) is not None:
                    return True
            elif leaf.kind == "range" and self.range_usable(leaf, var, known):
                return True
        return False

    def _chain(self, leaves, var, plan, env):
        if not plan:
            return self.best_guard(leaves, var, env)
        loc = plan[0]
        g = self.best_guard(leaves, loc, env)
        if g is None:
            return None

        def cands():
            seen = set()
            for c in g.candidates():
                if c in seen:
                    continue
                seen.add(c)
                self.tick()
                g2 = self._chain(leaves, var, plan[1:], {**env, loc: c})
                if g2 is None:
                    raise GuardFailure()
                yield from g2.candidates()
        return Guard(g.cost + 1, cands)

    def search(self, blk, pending, env):
        self.tick()
        if not pending:
            v = self.ev(blk.matrix, env)
            if v is None:
                return UNKNOWN
            return FOUND if v == blk.tp else NONE
        for i, (name, node) in enumerate(pending):
            if id(node) in self.witness:
                self.used_witness.append(self.addr[id(node)])
                rest = pending[:i] + pending[i + 1:]
                return self.search(blk, rest, {**env, name: self.witness[id(node)]})
        best = None
        for i, (name, node) in enumerate(pending):
            g = self.best_guard(blk.leaves, name, env)
            if g is not None and (best is None or g.cost < best[1].cost):
                best = (i, g)
                if g.cost == 0:
                    break
        if best is not None:
            i, g = best
            name, node = pending[i]
            rest = pending[:i] + pending[i + 1:]
            unknown = False
            seen = set()
            try:
                for c in g.candidates():
                    if c in seen:
                        continue
                    seen.add(c)
                    if len(seen) > self.max_solutions:
                        self.diags.append(self.addr[id(node)])
                        return UNKNOWN
                    r = self.search(blk, rest, {**env, name: c})
                    if r == FOUND:
                        return FOUND
                    if r == UNKNOWN:
                        unknown = True
            except GuardFailure:
                self.diags.append(self.addr[id(node)])
                return UNKNOWN
            return UNKNOWN if unknown else NONE
        name, node = pending[0]
        rest = pending[1:]
        for c in self.fallback_domain():
            if self.search(blk, rest, {**env, name: c}) == FOUND:
                return FOUND
        self.diags.append(self.addr[id(node)])
        return UNKNOWN
