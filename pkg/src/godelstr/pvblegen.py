"""Compile a Turing machine into the formula ``Pvble(x)``: "the machine halts on x".

Each rule of the table becomes an abbreviation ``Rule<k>`` relating two
consecutive configurations.  ``Pvble`` asks for a trace string ``c`` that
starts in the initial configuration for ``x``, ends in state 0 and whose
every adjacent pair of configurations satisfies some rule.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .evalcore import Verdict
from .macroexp import BUILTINS, FreshNamer, MacroDef, expand_fully, find_tagged
from .strlang import Exists, Term, Var, encode_chars, preorder, print_formula
from .stringsem import Bounds, evaluate, q_oracle, q_witnesses
from .turing import Machine, dot, encode_trace, run

__all__ = ["ddot", "rule_text", "gen_rule", "gen_pvble", "PvbleTemplate", "check_halting_witness",
           "pvble_applied", "ORACLE_THRESHOLD"]

# inputs longer than this get a native Q oracle under q_strategy="auto"
ORACLE_THRESHOLD = 200


def ddot(c: str) -> str:
    """Literal content denoting ``dot(c)``."""
    return encode_chars(dot(c))


def rule_text(c, q, w, q2, d) -> str:
    trig = (f'q1="{q}" & ( r1="" & "{ddot(c)}"="\\02" | Ex: r1="{ddot(c)}"x )'
            f' & q2="{q2}"')
    if d == "N":
        return f'( {trig} & Write(r1,"{ddot(w)}",r2) & l2=l1 )'
    move = "Move(r,l1,r2,l2)" if d == "R" else "Move(l1,r,l2,r2)"
    return f'( {trig} & Er: Write(r1,"{ddot(w)}",r) & {move} )'


RULE_PARAMS = ("l1", "r1", "q1", "l2", "r2", "q2")


def gen_rule(rule, name="Rule") -> MacroDef:
    """``rule`` is ``((c, q), (c2, q2, d))`` as in :meth:`Machine.ordered_rules`."""
    (c, q), (w, q2, d) = rule
    return MacroDef.from_text(name, RULE_PARAMS, rule_text(c, q, w, q2, d))


def pvble_text(n_rules: int, guard_states: bool = True, guard_chain: bool = True) -> str:
    """Template text of ``Pvble``.

    ``guard_states`` adds ``~Sb("\\1",q1) & ~Sb("\\1",q2)`` to the side
    conditions.  Without them ``q1`` may stretch across a configuration
    boundary of a trace with three or more configurations; no rule then
    matches and the formula is false on a genuine halting trace.

    ``guard_chain`` adds a clause saying that every configuration in ``c``
    other than the last is followed by another one.  The pair clause alone
    only constrains substrings shaped like two configurations, so a ``c``
    with the right start and end but no such substring would satisfy it
    vacuously, for any machine.
    """
    args = ",".join(RULE_PARAMS)
    rules = " | ".join(f"Rule{k}({args})" for k in range(1, n_rules + 1))
    states = ' & ~Sb("\\1",q1) & ~Sb("\\1",q2)' if guard_states else ""
    chain = ""
    if guard_chain:
        chain = (' & ( At:Al:Ar:Aq:Au: c=t"\\1"l"\\1"r"\\03"q"\\1"u'
                 ' & ~Sb("\\1",l) & ~Sb("\\1",r) & ~Sb("\\1",q) & u!""'
                 ' -> ( El2:Er2:Eq2:Ev: u=l2"\\1"r2"\\03"q2"\\1"v'
                 ' & ~Sb("\\1",l2) & ~Sb("\\1",r2) & ~Sb("\\1",q2) ) )')
    return ('( Ec: ( Et:Ey: Q(x,y) & c="\\1\\1"y"\\031\\1"t ) & ( Et: c=t"\\030\\1" )' + chain +
            ' & ( Al1:Ar1:Aq1:Al2:Ar2:Aq2:'
            ' ~Sb("\\1",l1) & ~Sb("\\1",r1) & ~Sb("\\1",l2) & ~Sb("\\1",r2)' + states +
            ' & Sb("\\1"l1"\\1"r1"\\03"q1"\\1"l2"\\1"r2"\\03"q2"\\1", c)'
            f' -> ( {rules} ) ) )')


@dataclass
class PvbleTemplate:
    machine: Machine
    macro: MacroDef
    registry: dict
    formula: object  # fully expanded, free variable x
    rule_addresses: list = field(default_factory=list)

    def text(self, style="minimal") -> str:
        return print_formula(self.formula, style)


def gen_pvble(m: Machine, guard_states: bool = True, guard_chain: bool = True) -> PvbleTemplate:
    rules = m.ordered_rules()
    registry = dict(BUILTINS)
    for k, rule in enumerate(rules, 1):
        registry[f"Rule{k}"] = gen_rule(rule, f"Rule{k}")
    macro = MacroDef.from_text("Pvble", ("x",), pvble_text(len(rules), guard_states, guard_chain))
    registry["Pvble"] = macro
    formula = expand_fully(macro, (Term((Var("x"),)),), registry, FreshNamer({"x"}))
    addrs = []
    for i, g in enumerate(preorder(formula)):
        for tag in g.tags:
            if tag[0] == "macro" and len(tag[1]) == 2 and tag[2].startswith("Rule"):
                addrs.append(i)
    return PvbleTemplate(m, macro, registry, formula, addrs)


def pvble_applied(tpl: PvbleTemplate, arg: Term, avoid=()):
    """Closed or open instance ``Pvble(arg)``, binders renamed away from ``arg``."""
    namer = FreshNamer(set(avoid) | arg.variables())
    return expand_fully(tpl.macro, (arg,), tpl.registry, namer)


def _binder(formula, path, name):
    return [a for a, node in find_tagged(formula, "bind", path, name) if isinstance(node, Exists)]


def halting_witnesses(formula, input: str, trace: str, path=("Pvble",), q_strategy="auto"):
    """Witness and oracle maps for ``Pvble`` at ``path`` with argument value ``input``."""
    y = encode_chars(input)
    (c_addr,) = _binder(formula, path, "c")
    t_pre, t_suf = _binder(formula, path, "t")
    (y_addr,) = _binder(formula, path, "y")
    head = '""' + y + '\\31"'
    witnesses = {c_addr: trace, y_addr: y, t_pre: trace[len(head):], t_suf: trace[:-len('\\30"')]}
    oracles = {}
    if q_strategy == "auto":
        q_strategy = "oracle" if len(input) > ORACLE_THRESHOLD else "witness"
    qpath = path + ("Q#0",)
    if q_strategy == "oracle":
        for a, node in find_tagged(formula, "macro", qpath):
            tag = [t for t in node.tags if t[0] == "macro"][-1]
            oracles[a] = q_oracle(*tag[3])
    elif q_strategy == "witness":
        witnesses.update(q_witnesses(input, formula, qpath))
    else:
        raise ValueError(f"unknown q_strategy {q_strategy!r}")
    return witnesses, oracles


def check_halting_witness(m: Machine, input: str, fuel: int, template=None, q_strategy="auto",
                          bounds=None) -> Verdict:
    outcome = run(m, input, fuel)
    if not outcome.halted:
        return Verdict(None, ["out-of-fuel"])
    tpl = template or gen_pvble(m)
    trace = encode_trace(outcome)
    witnesses, oracles = halting_witnesses(tpl.formula, input, trace, q_strategy=q_strategy)
    return evaluate(tpl.formula, {"x": input}, bounds or Bounds(), witnesses, oracles)
