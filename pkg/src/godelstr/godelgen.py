"""The self-referential sentence of a machine's proof system, and its checks.

The sentence has the shape ``Ex:Ey: Q(x,y) & ~Pvble(x"\\1"y"\\1") & x="<alpha>"``
with every abbreviation expanded.  Its text is ``alpha`` followed by a
literal holding ``alpha`` itself, so ``x"\\1"y"\\1"`` evaluates to the whole
sentence.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

from .macroexp import BUILTINS, FreshNamer, expand_in
from .pvblegen import check_halting_witness, gen_pvble
from .strlang import (FormulaSyntaxError, MalformedEscape, decode_chars, encode_chars,
                      is_sentence, parse_formula, print_formula)
from .turing import Machine, run

SKELETON = 'Ex:Ey: Q(x,y) & ~Pvble(x"\\1"y"\\1") & x=""'


class NotHaltedWithinFuel(RuntimeError):
    pass


@dataclass(frozen=True)
class GodelSentence:
    alpha: str
    beta: str

    @property
    def full(self) -> str:
        return self.alpha + '"' + self.beta + '"'


def godel_formula(m: Machine, template=None):
    """The expanded sentence with an empty final literal, tagged for witness lookup."""
    tpl = template or gen_pvble(m)
    registry = {**BUILTINS, **tpl.registry}
    skeleton = parse_formula(SKELETON, macros=True)
    return expand_in(skeleton, registry, FreshNamer({"x", "y"}))


def gen_godel(m: Machine, template=None) -> GodelSentence:
    text = print_formula(godel_formula(m, template))
    assert text.endswith('x=""')
    alpha = text[:-2]
    return GodelSentence(alpha, encode_chars(alpha))


def check_fixed_point(s: str) -> bool:
    """Does ``s`` end in a literal whose decoded content is everything before it?"""
    if not s.endswith('"'):
        return False
    start = s.rfind('"', 0, len(s) - 1)
    if start < 0:
        return False
    alpha, beta = s[:start], s[start + 1:-1]
    try:
        if decode_chars(beta) != alpha:
            return False
        f = parse_formula(s)
    except (MalformedEscape, FormulaSyntaxError):
        return False
    return is_sentence(f)


@dataclass
class FalseBranchReport:
    sentence_length: int
    halted: bool
    steps: int
    verdict: object
    q_oracle_used: bool
    seconds: float

    def lines(self):
        return [f"sentence length: {self.sentence_length}",
                f"machine run on the sentence: {'Halted' if self.halted else 'OutOfFuel'}"
                f" after {self.steps} step(s)",
                f"Pvble(sentence) witnessed verdict: {self.verdict.name}"
                + (" (Q decided natively)" if self.q_oracle_used else ""),
                "the sentence claims it is unprovable, yet it is provable: it is false"
                if self.verdict.value is True else "no conclusion"]


def demo_false_branch(m: Machine, fuel: int, q_strategy="auto") -> FalseBranchReport:
    t0 = time.perf_counter()
    tpl = gen_pvble(m)
    g = gen_godel(m, tpl)
    outcome = run(m, g.full, fuel)
    if not outcome.halted:
        raise NotHaltedWithinFuel(f"no halt within {fuel} steps")
    verdict = check_halting_witness(m, g.full, fuel, tpl, q_strategy=q_strategy)
    return FalseBranchReport(len(g.full), True, len(outcome.trace) - 1, verdict,
                             bool(verdict.oracled), time.perf_counter() - t0)
