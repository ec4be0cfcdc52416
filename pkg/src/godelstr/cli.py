"""Command-line interface.

Strings on the command line are written as string literals, e.g. ``'"ab\\1"'``.
Exit status: 0 success or True, 1 False, 2 Unknown or out of fuel, 3 error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import arith, godelgen, pvblegen, stringsem, turing
from .macroexp import BUILTINS, ArityMismatch, CycleDetected, UnknownMacro, expand_call, expand_in
from .strlang import (FormulaSyntaxError, MalformedEscape, literal, parse_formula,
                      parse_literal, parse_term, print_formula)

EXIT_TRUE, EXIT_FALSE, EXIT_UNKNOWN, EXIT_ERROR = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _write(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _formula_arg(path, arith_mode=False, macros=False):
    text = _read(path).strip()
    if arith_mode:
        return arith.parse_aformula(text, macros=macros)
    return parse_formula(text, macros=macros)


def _binding(spec: str):
    if "=" not in spec:
        raise UsageError(f"expected NAME=VALUE, got {spec!r}")
    name, value = spec.split("=", 1)
    return name.strip(), value


def _verdict_exit(v):
    return {True: EXIT_TRUE, False: EXIT_FALSE, None: EXIT_UNKNOWN}[v.value]


def _report(v, fmt):
    if fmt == "json":
        print(json.dumps(v.as_json(), sort_keys=True))
    else:
        print(v.name)
        limited = [d for d in v.diagnostics if isinstance(d, int)]
        if limited:
            print("bounded search exhausted at quantifiers: " + " ".join(map(str, limited)))
        if "budget" in v.diagnostics:
            print("step budget exhausted")


# ---------------------------------------------------------------- commands

def cmd_parse(a):
    f = _formula_arg(a.file, a.arith)
    printer = arith.print_aformula if a.arith else print_formula
    print(printer(f, "full" if a.full else "minimal"))
    return EXIT_TRUE


def cmd_print(a):
    f = _formula_arg(a.file, a.arith)
    printer = arith.print_aformula if a.arith else print_formula
    print(printer(f, a.style))
    return EXIT_TRUE


def cmd_expand(a):
    if a.target in BUILTINS:
        f = expand_call(a.target, *[parse_term(x) for x in a.args])
    elif a.args:
        raise UsageError(f"unknown abbreviation {a.target}")
    else:
        f = expand_in(_formula_arg(a.target, macros=True))
    print(print_formula(f, a.style))
    return EXIT_TRUE


def cmd_eval(a):
    f = _formula_arg(a.file, a.arith)
    witnesses = {}
    for spec in a.witness or []:
        k, v = _binding(spec)
        witnesses[int(k)] = int(v) if a.arith else parse_literal(v)
    env = {}
    for spec in a.let or []:
        k, v = _binding(spec)
        env[k] = int(v) if a.arith else parse_literal(v)
    if a.arith:
        b = arith.ABounds(max_n=a.max_n, budget=a.budget)
        v = arith.eval_arith(f, env, b, witnesses)
    else:
        b = stringsem.Bounds(alphabet=parse_literal(a.alphabet), max_len=a.max_len, budget=a.budget)
        v = stringsem.evaluate(f, env, b, witnesses)
    _report(v, a.format)
    return _verdict_exit(v)


def _config_str(c):
    return (f"left={literal(turing.dot(c.left))} state={c.state} "
            f"right={literal(turing.dot(c.right))}")


def cmd_tm(a):
    m = turing.load_machine(a.machine)
    inp = parse_literal(a.input)
    out = turing.run(m, inp, a.fuel)
    steps = len(out.trace) - 1
    if a.tm_cmd == "run":
        status = "Halted" if out.halted else "OutOfFuel"
        print(f"{status} after {steps} step{'s' if steps != 1 else ''}")
        print(_config_str(out.final))
    else:
        if not out.halted:
            print(f"OutOfFuel after {steps} steps", file=sys.stderr)
            return EXIT_UNKNOWN
        print(literal(turing.encode_trace(out)))
    return EXIT_TRUE if out.halted else EXIT_UNKNOWN


def cmd_pvble(a):
    m = turing.load_machine(a.machine)
    if a.pvble_cmd == "compile":
        tpl = pvblegen.gen_pvble(m, guard_states=not a.literal, guard_chain=not a.literal)
        _write(tpl.text() + "\n", a.output)
        return EXIT_TRUE
    v = pvblegen.check_halting_witness(m, parse_literal(a.input), a.fuel)
    _report(v, a.format)
    return _verdict_exit(v)


def cmd_godel(a):
    m = turing.load_machine(a.machine)
    g = godelgen.gen_godel(m)
    code = EXIT_TRUE
    if a.output:
        Path(a.output).write_text(g.full)
    if a.check:
        ok = godelgen.check_fixed_point(g.full)
        print(f"length: {len(g.full)}")
        print(f"fixed-point: {'ok' if ok else 'FAILED'}")
        code = EXIT_TRUE if ok else EXIT_FALSE
    if a.demo_false_branch:
        try:
            r = godelgen.demo_false_branch(m, a.fuel)
        except godelgen.NotHaltedWithinFuel as e:
            print(f"machine did not halt on its own sentence: {e}")
            return EXIT_UNKNOWN
        for line in r.lines():
            print(line)
        code = max(code, _verdict_exit(r.verdict))
    if not (a.output or a.check or a.demo_false_branch):
        print(g.full)
    return code


def cmd_num(a):
    if a.num_cmd == "to":
        print(arith.num(parse_literal(a.value)))
    elif a.num_cmd == "from":
        if not a.value.isdigit():
            raise UsageError("expected a decimal natural number")
        print(literal(arith.denum(int(a.value))))
    else:
        print(literal(arith.successor(parse_literal(a.value))))
    return EXIT_TRUE


def cmd_translate(a):
    f = _formula_arg(a.file)
    print(arith.print_aformula(arith.translate(f)))
    return EXIT_TRUE


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="godelstr", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("parse", help="parse a formula file and print it back")
    s.add_argument("file")
    s.add_argument("--full", action="store_true", help="fully parenthesized output")
    s.add_argument("--arith", action="store_true", help="arithmetic language")
    s.set_defaults(fn=cmd_parse)

    s = sub.add_parser("print", help="print a formula in a given style")
    s.add_argument("file")
    s.add_argument("--style", choices=["minimal", "full"], default="minimal")
    s.add_argument("--arith", action="store_true")
    s.set_defaults(fn=cmd_print)

    s = sub.add_parser("expand", help="expand abbreviations")
    s.add_argument("target", help="abbreviation name, or a formula file using abbreviations")
    s.add_argument("args", nargs="*", help="argument terms, e.g. u '\"*\"q'")
    s.add_argument("--style", choices=["minimal", "full"], default="minimal")
    s.set_defaults(fn=cmd_expand)

    s = sub.add_parser("eval", help="evaluate a formula")
    s.add_argument("file")
    s.add_argument("--let", action="append", metavar="NAME=LIT")
    s.add_argument("--witness", action="append", metavar="INDEX=LIT")
    s.add_argument("--alphabet", default='"ab"', help="fallback alphabet as a literal")
    s.add_argument("--max-len", type=int, default=3)
    s.add_argument("--max-n", type=int, default=200, help="fallback range for --arith")
    s.add_argument("--budget", type=int, default=10**7)
    s.add_argument("--arith", action="store_true")
    s.add_argument("--format", choices=["text", "json"], default="text")
    s.set_defaults(fn=cmd_eval)

    s = sub.add_parser("tm", help="run Turing machines")
    tsub = s.add_subparsers(dest="tm_cmd", required=True)
    for name in ("run", "trace"):
        t = tsub.add_parser(name)
        t.add_argument("machine")
        t.add_argument("input", help="input as a string literal")
        t.add_argument("--fuel", type=int, default=1000)
        t.set_defaults(fn=cmd_tm)

    s = sub.add_parser("pvble", help="provability formulas")
    psub = s.add_subparsers(dest="pvble_cmd", required=True)
    t = psub.add_parser("compile")
    t.add_argument("machine")
    t.add_argument("-o", "--output")
    t.add_argument("--literal", action="store_true",
                   help="omit the state and chain side conditions (admits forged traces)")
    t.set_defaults(fn=cmd_pvble)
    t = psub.add_parser("check")
    t.add_argument("machine")
    t.add_argument("input")
    t.add_argument("--fuel", type=int, default=1000)
    t.add_argument("--format", choices=["text", "json"], default="text")
    t.set_defaults(fn=cmd_pvble)

    s = sub.add_parser("godel", help="self-referential sentence of a machine")
    s.add_argument("machine")
    s.add_argument("-o", "--output")
    s.add_argument("--check", action="store_true")
    s.add_argument("--demo-false-branch", action="store_true")
    s.add_argument("--fuel", type=int, default=10)
    s.set_defaults(fn=cmd_godel)

    s = sub.add_parser("num", help="string/number correspondence")
    nsub = s.add_subparsers(dest="num_cmd", required=True)
    for name, meta in (("to", "LIT"), ("from", "N"), ("succ", "LIT")):
        t = nsub.add_parser(name)
        t.add_argument("value", metavar=meta)
        t.set_defaults(fn=cmd_num)

    s = sub.add_parser("translate", help="translate a string sentence to arithmetic")
    s.add_argument("file")
    s.set_defaults(fn=cmd_translate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERROR if e.code else EXIT_TRUE
    try:
        return a.fn(a)
    except (UsageError, FormulaSyntaxError, MalformedEscape, turing.MachineError, OSError,
            ArityMismatch, CycleDetected, UnknownMacro, stringsem.UnboundVariable,
            stringsem.PreconditionViolated, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
