import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from godelstr.macroexp import expand_call
from godelstr.strlang import (ALPHABET, And, Atom, Exists, Forall, Implies, Lit, Not, Or, Term,
                              Var, encode_chars, parse_formula, parse_term)
from godelstr.stringsem import (Bounds, PreconditionViolated, UnboundVariable, eval_term,
                                evaluate, native_replace_all, q_stages, q_witnesses,
                                repall_witness, solve_pattern)

from .strategies import formulas


# ---------------------------------------------------------------- terms

def test_eval_term_examples():
    assert eval_term(parse_term('"the"x"em"'), {"x": "or"}) == "theorem"
    assert eval_term(parse_term('""""'), {}) == ""
    assert eval_term(parse_term("xy"), {"x": "a", "y": ""}) == "a"


def test_eval_term_unbound():
    with pytest.raises(UnboundVariable):
        eval_term(parse_term('x"a"'), {})


def test_solve_pattern_examples():
    assert solve_pattern(parse_term('u"b"v'), "abc") == [{"u": "a", "v": "c"}]
    assert solve_pattern(parse_term("uu"), "abab") == [{"u": "ab"}]
    assert solve_pattern(parse_term('u"d"v'), "abc") == []


def test_solve_pattern_uses_env():
    assert solve_pattern(parse_term("uv"), "abc", {"u": "ab"}) == [{"v": "c"}]
    assert solve_pattern(parse_term("uv"), "abc", {"u": "b"}) == []


def _brute(t, target):
    """Every assignment of substrings of target to the variables of t."""
    names = sorted({a.name for a in t.atoms if isinstance(a, Var)})
    subs = {target[i:j] for i in range(len(target) + 1) for j in range(i, len(target) + 1)}
    out = []
    for vals in itertools.product(sorted(subs), repeat=len(names)):
        env = dict(zip(names, vals))
        if eval_term(t, env) == target:
            out.append(env)
    return out


def _key(sols):
    return sorted(tuple(sorted(s.items())) for s in sols)


def _patterns():
    pieces = ["u", "v", "w", '"a"', '"b"', '"ab"', '"c"']
    for n in range(1, 4):
        for combo in itertools.product(pieces, repeat=n):
            t = parse_term("".join(combo))
            if len({a.name for a in t.atoms if isinstance(a, Var)}) <= 3:
                yield t


def test_solve_pattern_complete_against_brute_force():
    targets = ["".join(p) for n in range(6) for p in itertools.product("abc", repeat=n)]
    pats = list(_patterns())
    rng = random.Random(7)
    checked = 0
    for t in pats:
        # exhaustive over targets of length <= 3, a sample above that
        for target in targets:
            if len(target) > 3 and rng.random() > 0.05:
                continue
            sols = solve_pattern(t, target)
            assert len(_key(sols)) == len(sols), "duplicate solutions"
            assert _key(sols) == _key(_brute(t, target)), (t, target)
            checked += 1
    assert checked > 10000


@given(st.text(alphabet="abc", max_size=5),
       st.lists(st.sampled_from(["u", "v", "w", '"a"', '"bc"', '""']), min_size=1, max_size=4))
def test_solve_pattern_property(target, pieces):
    t = parse_term("".join(pieces))
    assert _key(solve_pattern(t, target)) == _key(_brute(t, target))


# ---------------------------------------------------------------- eval

def test_eval_examples():
    assert evaluate(parse_formula('"theorem"="theo""rem"')).value is True
    assert evaluate(parse_formula("Ax:x=x")).value is None
    sb = expand_call("Sb", "u", "y")
    assert evaluate(sb, {"u": "b", "y": "abc"}).value is True
    assert evaluate(sb, {"u": "q", "y": "abc"}).value is False


def test_guarded_quantifiers_are_definitive():
    assert evaluate(parse_formula('Ex: x"a"="ba"')).value is True
    assert evaluate(parse_formula('Ex: x"a"="bb"')).value is False
    assert evaluate(parse_formula('Ax: x"a"="ba" -> x="b"')).value is True
    assert evaluate(parse_formula('Ax: x"a"="aa" -> x="b"')).value is False


def test_unbound_free_variable():
    with pytest.raises(UnboundVariable):
        evaluate(parse_formula('x="a"'))


def test_fallback_reports_the_quantifier():
    v = evaluate(parse_formula('Ax: x"a"!"b"x'))
    assert v.value is None and v.diagnostics


def test_budget_exhaustion_is_unknown():
    v = evaluate(parse_formula("Ax:Ay: xy!yx\"a\""), bounds=Bounds(max_len=6, budget=500))
    assert v.value is None
    assert v.as_json()["budget_exhausted"] is True


def test_witness_is_used():
    f = parse_formula('Ex: x!"a"')
    assert evaluate(f, witnesses={0: "zz"}).value is True
    # a wrong witness makes the claim fail relative to that witness
    assert evaluate(f, witnesses={0: "a"}).value is False


# soundness against the restricted model: one quantifier over x, literals of
# at most one character from {a,b}, terms of at most two atoms

SMALL = [Var("x"), Lit(""), Lit("a"), Lit("b")]
small_terms = st.lists(st.sampled_from(SMALL), min_size=1, max_size=2).map(lambda a: Term(tuple(a)))
small_atoms = st.builds(Atom, st.sampled_from("=!"), small_terms, small_terms)
small_bodies = st.recursive(
    small_atoms,
    lambda c: st.one_of(c.map(Not), st.builds(And, c, c), st.builds(Or, c, c),
                        st.builds(Implies, c, c)),
    max_leaves=5)
DOMAIN = ["".join(p) for n in range(4) for p in itertools.product("ab", repeat=n)]


def _truth(f, env):
    if isinstance(f, Atom):
        eq = eval_term(f.lhs, env) == eval_term(f.rhs, env)
        return eq if f.op == "=" else not eq
    if isinstance(f, Not):
        return not _truth(f.body, env)
    if isinstance(f, And):
        return _truth(f.left, env) and _truth(f.right, env)
    if isinstance(f, Or):
        return _truth(f.left, env) or _truth(f.right, env)
    if isinstance(f, Implies):
        return not _truth(f.left, env) or _truth(f.right, env)
    vals = (_truth(f.body, {**env, f.var: d}) for d in DOMAIN)
    return any(vals) if isinstance(f, Exists) else all(vals)


@settings(max_examples=300)
@given(st.sampled_from([Exists, Forall]), small_bodies)
def test_soundness_against_finite_model(q, body):
    f = q("x", body)
    v = evaluate(f)
    if v.value is not None:
        assert v.value == _truth(f, {})


ENV = {"x": "a", "y": "", "z": "ab", "a1": "b", "q": "ba"}


@settings(max_examples=150, deadline=None)
@given(formulas(alphabet="ab", max_lit=2, max_leaves=6))
def test_negation_involution(f):
    b = Bounds(max_len=2, budget=200000)
    assert evaluate(Not(Not(f)), ENV, b).value == evaluate(f, ENV, b).value


@settings(max_examples=150, deadline=None)
@given(formulas(alphabet="ab", max_lit=2, max_leaves=6))
def test_negation_flips_definite_verdicts(f):
    b = Bounds(max_len=2, budget=200000)
    v, w = evaluate(f, ENV, b).value, evaluate(Not(f), ENV, b).value
    assert w == (None if v is None else not v)


# ---------------------------------------------------------------- replacement

def test_native_replace_all_examples():
    assert native_replace_all("a\\b\\", "\\", "*::") == "a*::b*::"
    assert native_replace_all("abc", "z", "q") == "abc"
    with pytest.raises(PreconditionViolated):
        native_replace_all("aaa", "aa", "b")


@pytest.mark.parametrize("u,v", [("", "a"), ("ab", "bc")])
def test_native_replace_all_preconditions(u, v):
    with pytest.raises(PreconditionViolated):
        native_replace_all("abab", u, v)


def test_native_matches_iterated_single_replacement():
    rng = random.Random(3)
    for _ in range(300):
        x = "".join(rng.choice("abc") for _ in range(rng.randint(0, 8)))
        u = rng.choice(["a", "ab", "ba", "c", "abc"])
        v = rng.choice(["", "d", "dd", "ed"])
        try:
            got = native_replace_all(x, u, v)
        except PreconditionViolated:
            continue
        cur = x
        while u in cur:
            cur = cur.replace(u, v, 1)
        assert got == cur


def test_repall_witness_examples():
    assert repall_witness("ab", "a", "c", "+:") == "+:ab+:cb+:"
    assert repall_witness("aba", "a", "c", "+:") == "+:aba+:cba+:cbc+:"
    assert repall_witness("b", "a", "c", "+:") == "+:b+:"


def test_repall_witness_rejects_bad_separator():
    with pytest.raises(PreconditionViolated):
        repall_witness("ab", "a", "c", "aa")
    with pytest.raises(PreconditionViolated):
        repall_witness("a+:b", "a", "c", "+:")


REPALL_CASES = [
    ("ab", "a", "c"), ("aba", "a", "c"), ("b", "a", "c"), ("", "a", "c"),
    ("aaaa", "a", "b"), ("abab", "ab", "c"), ("abab", "ab", ""), ("cab", "ab", "dd"),
    ("a\\b\\", "\\", "*:"), ("*:*:", "*:", "\\0"), ('a"b', '"', "*:"), ('*:"', "*:", "\\1"),
    ("\\\\", "\\", "*:"), ("x*:y", "*:", "\\0"), ("hello", "l", "L"), ("hello", "ll", "r"),
    ("abc", "abc", ""), ("abcabc", "bc", "e"), ("aab", "b", "aa"), ("ba", "a", "bb"),
    ("zz", "z", "yy"), ("<>", "<", "!"),
]


@pytest.mark.parametrize("x,u,v", REPALL_CASES)
def test_repall_formula_agrees_with_native(x, u, v):
    f = expand_call("RepAll", "x", "u", "v", "y", "p")
    p = "+:"
    want = native_replace_all(x, u, v)
    env = {"x": x, "u": u, "v": v, "p": p}
    w = {0: repall_witness(x, u, v, p)}
    assert evaluate(f, {**env, "y": want}, witnesses=w).value is True
    assert evaluate(f, {**env, "y": want + "a"}, witnesses=w).value is False


# ---------------------------------------------------------------- quotation

def test_q_stage_examples():
    s = q_stages('"')
    assert (s["x1"], s["x2"], s["x3"], s["y"]) == ('"', '"', "*:", "\\1")
    s = q_stages("ab")
    assert (s["x1"], s["x2"], s["x3"], s["y"]) == ("ab", "ab", "ab", "ab")
    s = q_stages("\\")
    assert (s["x1"], s["x2"], s["x3"], s["y"]) == ("*:", "\\0", "\\0", "\\0")


def test_q_punct_is_shortest_absent_run():
    assert q_stages("a:b::c")["q"] == ":::"
    assert q_stages("")["q"] == ":"


def test_q_witness_addresses():
    w = q_witnesses("ab")
    assert len(w) == 8
    assert set(w.values()) >= {":", "ab"}


def test_q_correctness_random():
    f = expand_call("Q", "x", "y")
    rng = random.Random(11)
    for _ in range(50):
        x = "".join(rng.choice(ALPHABET) for _ in range(rng.randint(0, 4)))
        w = q_witnesses(x, f)
        y = encode_chars(x)
        assert evaluate(f, {"x": x, "y": y}, witnesses=w).value is True
        bad = y + "a" if rng.random() < 0.5 else y[:-1]
        if bad != y:
            assert evaluate(f, {"x": x, "y": bad}, witnesses=w).value is False
