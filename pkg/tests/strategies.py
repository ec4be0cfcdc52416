"""Random formula generators shared by the tests."""
from hypothesis import strategies as st

from godelstr.strlang import (ALPHABET, And, Atom, Exists, Forall, Implies, Lit, Not, Or, Term,
                              Var)

NAMES = ["x", "y", "z", "a1", "q"]


def random_term(rng, names=NAMES, alphabet=ALPHABET, max_lit=3):
    atoms = []
    for _ in range(rng.randint(1, 3)):
        if rng.random() < 0.5:
            atoms.append(Var(rng.choice(names)))
        else:
            atoms.append(Lit("".join(rng.choice(alphabet) for _ in range(rng.randint(0, max_lit)))))
    return Term(tuple(atoms))


def random_formula(rng, depth, names=NAMES, alphabet=ALPHABET, max_lit=3):
    if depth <= 0 or rng.random() < 0.25:
        return Atom(rng.choice("=!"), random_term(rng, names, alphabet, max_lit),
                    random_term(rng, names, alphabet, max_lit))
    k = rng.randrange(6)
    sub = lambda: random_formula(rng, depth - 1, names, alphabet, max_lit)  # noqa: E731
    if k == 0:
        return Not(sub())
    if k in (1, 2, 3):
        return (And, Or, Implies)[k - 1](sub(), sub())
    return (Forall, Exists)[k - 4](rng.choice(names), sub())


def terms(names=NAMES, alphabet=ALPHABET, max_lit=3):
    atom = st.one_of(st.sampled_from(names).map(Var),
                     st.text(alphabet=alphabet, max_size=max_lit).map(Lit))
    return st.lists(atom, min_size=1, max_size=3).map(lambda a: Term(tuple(a)))


def formulas(names=NAMES, alphabet=ALPHABET, max_lit=3, max_leaves=12):
    t = terms(names, alphabet, max_lit)
    leaves = st.builds(Atom, st.sampled_from("=!"), t, t)

    def extend(child):
        var = st.sampled_from(names)
        return st.one_of(child.map(Not),
                         st.builds(And, child, child), st.builds(Or, child, child),
                         st.builds(Implies, child, child),
                         st.builds(Forall, var, child), st.builds(Exists, var, child))
    return st.recursive(leaves, extend, max_leaves=max_leaves)
