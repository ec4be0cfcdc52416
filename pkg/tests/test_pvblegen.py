import itertools

import pytest

from godelstr.evalcore import Verdict
from godelstr.macroexp import BUILTINS, expand_fully
from godelstr.pvblegen import (check_halting_witness, ddot, gen_pvble, gen_rule,
                               halting_witnesses, pvble_applied, rule_text)
from godelstr.strlang import (Term, Var, alpha_equivalent, decode_chars, free_vars, parse_formula,
                              parse_term, print_formula)
from godelstr.stringsem import evaluate
from godelstr.turing import BLANK, SYMBOLS, dot, encode_trace, run


def test_ddot_dot_coherence():
    for c in SYMBOLS:
        assert decode_chars(ddot(c)) == dot(c)
    assert ddot("\\") == "\\00" and ddot('"') == "\\01" and ddot(BLANK) == "\\02"


def test_rule_n_shape():
    text = rule_text("a", 1, "a", 0, "N")
    for piece in ('q1="1"', 'Ex: r1="a"x', 'q2="0"', 'Write(r1,"a",r2)', "l2=l1"):
        assert piece in text


def test_rule_blank_trigger():
    assert 'r1="" & "\\02"="\\02"' in rule_text(BLANK, 1, BLANK, 0, "N")


def test_rule_r_shape():
    text = rule_text("a", 1, BLANK, 1, "R")
    assert 'Er: Write(r1,"\\02",r) & Move(r,l1,r2,l2)' in text
    assert "Move(l1,r,l2,r2)" in rule_text("a", 1, "b", 1, "L")


def test_gen_rule_expands():
    d = gen_rule((("a", 1), ("a", 0, "N")))
    f = expand_fully(d, [parse_term(p) for p in ("l1", "r1", "q1", "l2", "r2", "q2")], BUILTINS)
    env = {"l1": "", "r1": "ab", "q1": "1", "l2": "", "r2": "ab", "q2": "0"}
    assert evaluate(f, env).value is True
    assert evaluate(f, {**env, "r2": "bb"}).value is False
    assert evaluate(f, {**env, "q1": "2"}).value is False


@pytest.mark.parametrize("name", ["halt", "loop", "shiftr"])
def test_template_structure(templates, name):
    tpl = templates[name]
    assert len(tpl.rule_addresses) == 54
    assert free_vars(tpl.formula) == {"x"}
    assert alpha_equivalent(parse_formula(tpl.text()), tpl.formula)
    assert print_formula(parse_formula(tpl.text())) == tpl.text()


def test_rule_order_is_table_order(templates):
    rules = templates["shiftr"].machine.ordered_rules()
    assert rules[0][0] == ("a", 1) and rules[-1][0] == (BLANK, 1)


def test_generation_is_deterministic(machines, templates):
    assert gen_pvble(machines["shiftr"]).text() == templates["shiftr"].text()


def test_check_examples(machines, templates):
    assert check_halting_witness(machines["halt"], "ab", 10, templates["halt"]).value is True
    assert check_halting_witness(machines["halt"], "", 10, templates["halt"]).value is True
    v = check_halting_witness(machines["loop"], "a", 50, templates["loop"])
    assert v.value is None and v.diagnostics == ["out-of-fuel"]


INPUTS = ["".join(p) for n in range(3) for p in itertools.product('a"\\', repeat=n)] + ["abc", "<:>"]


@pytest.mark.parametrize("name", ["halt", "shiftr"])
def test_soundness_pairing(machines, templates, name):
    for inp in INPUTS:
        assert run(machines[name], inp, 50).halted
        assert check_halting_witness(machines[name], inp, 50, templates[name]).value is True, inp


def _tampered(tpl, inp, trace):
    w, o = halting_witnesses(tpl.formula, inp, trace)
    return evaluate(tpl.formula, {"x": inp}, witnesses=w, oracles=o)


def test_tamper_detection(templates):
    tpl = templates["halt"]
    good = encode_trace(run(tpl.machine, "ab", 10))
    assert good == '""ab\\31""ab\\30"'
    assert _tampered(tpl, "ab", good).value is True
    cases = []
    for i, ch in enumerate(good):
        if ch in "ab":
            cases += [good[:i] + r + good[i + 1:] for r in "abz" if r != ch]
        elif ch in "01" and good[i - 1] == "3":
            cases += [good[:i] + r + good[i + 1:] for r in "0129" if r != ch]
        cases.append(good[:i] + good[i + 1:])
    assert len(cases) >= 10
    for bad in cases:
        assert _tampered(tpl, "ab", bad).value is False, bad


def test_tamper_multi_step(templates):
    tpl = templates["shiftr"]
    good = encode_trace(run(tpl.machine, "ab", 10))
    assert _tampered(tpl, "ab", good).value is True
    bad = good.replace('"b\\31"', '"a\\31"')
    assert bad != good
    assert _tampered(tpl, "ab", bad).value is False


def test_initial_state_must_be_one(templates):
    tpl = templates["halt"]
    bad = '""ab\\32""ab\\30"'
    assert _tampered(tpl, "ab", bad).value is False


def test_literal_states_variant_rejects_genuine_trace(machines):
    # without the quote-free side conditions on q1 and q2 a state variable
    # can span a configuration boundary and no rule matches it
    m = machines["shiftr"]
    literal = gen_pvble(m, guard_states=False)
    assert check_halting_witness(m, "ab", 10, literal).value is False
    assert check_halting_witness(m, "a", 10, literal).value is False
    # with only two configurations there is no boundary to span
    h = machines["halt"]
    assert check_halting_witness(h, "ab", 10, gen_pvble(h, guard_states=False)).value is True


FORGED = ['""a\\31"a\\30"', '""a\\31"\\30"', '""a\\31"""\\30"']


@pytest.mark.parametrize("c", FORGED)
def test_forged_trace_rejected(templates, c):
    for name in ("loop", "halt", "shiftr"):
        assert _tampered(templates[name], "a", c).value is False


def test_literal_chain_variant_accepts_forgery(machines):
    # without the chain clause a c with the right ends and no complete pair
    # of configurations satisfies the formula, even for a machine that loops
    m = machines["loop"]
    literal = gen_pvble(m, guard_chain=False)
    assert _tampered(literal, "a", FORGED[0]).value is True
    assert run(m, "a", 100).halted is False


def test_pvble_applied_to_compound_term(templates):
    tpl = templates["halt"]
    arg = parse_term('x"\\1"y"\\1"')
    f = pvble_applied(tpl, arg)
    assert free_vars(f) == {"x", "y"}
    assert len(print_formula(f)) > len(tpl.text())


def test_q_strategies_agree(machines, templates):
    for s in ("witness", "oracle"):
        v = check_halting_witness(machines["halt"], 'a"', 10, templates["halt"], q_strategy=s)
        assert v.value is True
    with pytest.raises(ValueError):
        check_halting_witness(machines["halt"], "a", 10, templates["halt"], q_strategy="nope")
    assert isinstance(Verdict(None), Verdict)
    assert Term((Var("x"),)).variables() == {"x"}
