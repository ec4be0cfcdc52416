"""Single-tape Turing machines over the 53 characters plus blank.

A configuration keeps the tape as two b-strings around the head: ``left``
lists the cells to the left of the head, nearest first, and ``right``
starts with the scanned cell.  Neither ever ends with a blank.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .strlang import ALPHABET

BLANK = "_"
SYMBOLS = ALPHABET + BLANK  # blank numbered 54, after every character
SYMBOL_NUMBER = {c: i + 1 for i, c in enumerate(SYMBOLS)}
DIRECTIONS = ("L", "R", "N")

FIXTURES = Path(__file__).with_name("fixtures")


class MachineError(ValueError):
    pass


class IncompleteRuleTable(MachineError):
    pass


class DuplicateRule(MachineError):
    pass


class BadState(MachineError):
    pass


class BadSymbol(MachineError):
    pass


class AlreadyHalted(RuntimeError):
    pass


class NotHalted(ValueError):
    pass


@dataclass(frozen=True)
class Machine:
    r: int
    rules: dict  # (symbol, state) -> (write, next_state, direction)

    def __post_init__(self):
        if self.r < 1:
            raise BadState("a machine needs at least one state")
        for (c, q), (w, q2, d) in self.rules.items():
            if c not in SYMBOLS or w not in SYMBOLS:
                raise BadSymbol(repr(c if c not in SYMBOLS else w))
            if not 1 <= q <= self.r or not 0 <= q2 <= self.r:
                raise BadState(f"state out of range in rule for ({c!r}, {q})")
            if d not in DIRECTIONS:
                raise MachineError(f"bad direction {d!r}")
        missing = [(c, q) for q in range(1, self.r + 1) for c in SYMBOLS if (c, q) not in self.rules]
        if missing:
            raise IncompleteRuleTable(f"no rule for {missing[0]!r} (and {len(missing) - 1} more)")

    def ordered_rules(self):
        """Rules sorted by state, then by symbol number."""
        return [((c, q), self.rules[(c, q)]) for q in range(1, self.r + 1) for c in SYMBOLS]


@dataclass(frozen=True)
class Config:
    left: tuple
    state: int
    right: tuple

    def __post_init__(self):
        if self.left and self.left[-1] == BLANK or self.right and self.right[-1] == BLANK:
            raise ValueError("b-string ends with a blank")


@dataclass
class Outcome:
    halted: bool
    trace: list

    @property
    def final(self) -> Config:
        return self.trace[-1]


def _move(src, dst):
    """Shift the first symbol of ``src`` onto ``dst``."""
    if not src:
        return (), ((BLANK,) + dst if dst else ())
    e, rest = src[0], src[1:]
    if e == BLANK and not dst:
        return rest, ()
    return rest, (e,) + dst


def step(m: Machine, c: Config) -> Config:
    if c.state == 0:
        raise AlreadyHalted()
    sym = c.right[0] if c.right else BLANK
    w, q2, d = m.rules[(sym, c.state)]
    if len(c.right) <= 1:
        right = () if w == BLANK else (w,)
    else:
        right = (w,) + c.right[1:]
    left = c.left
    if d == "R":
        right, left = _move(right, left)
    elif d == "L":
        left, right = _move(left, right)
    return Config(left, q2, right)


def initial(input: str) -> Config:
    bad = [ch for ch in input if ch not in ALPHABET]
    if bad:
        raise BadSymbol(repr(bad[0]))
    return Config((), 1, tuple(input))


def run(m: Machine, input: str, fuel: int) -> Outcome:
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    c = initial(input)
    trace = [c]
    for _ in range(fuel):
        if c.state == 0:
            break
        c = step(m, c)
        trace.append(c)
    return Outcome(c.state == 0, trace)


def dot(symbols) -> str:
    """Per-symbol encoding used inside traces."""
    table = {"\\": "\\0", '"': "\\1", BLANK: "\\2"}
    return "".join(table.get(s, s) for s in symbols)


def encode_trace(trace) -> str:
    if isinstance(trace, Outcome):
        trace = trace.trace
    if not trace or trace[-1].state != 0:
        raise NotHalted()
    parts = ['"']
    for c in trace:
        parts.append(f'{dot(c.left)}"{dot(c.right)}\\3{c.state}"')
    return "".join(parts)


# ---------------------------------------------------------------- files

def parse_machine(text: str) -> Machine:
    r = None
    explicit = {}
    wild = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if r is None:
            if len(parts) != 2 or parts[0] != "states" or not parts[1].isdigit():
                raise MachineError(f"line {lineno}: expected 'states <r>'")
            r = int(parts[1])
            if r < 1:
                raise BadState(f"line {lineno}: need at least one state")
            continue
        if len(parts) != 6 or parts[2] != "->":
            raise MachineError(f"line {lineno}: expected '<q> <sym> -> <q2> <sym2> <L|R|N>'")
        q, c, _, q2, w, d = parts
        if not (q.isdigit() and q2.isdigit()):
            raise BadState(f"line {lineno}: states are decimal numbers")
        q, q2 = int(q), int(q2)
        if not 1 <= q <= r or not 0 <= q2 <= r:
            raise BadState(f"line {lineno}: state out of range")
        for s in (c, w):
            if s != "." and (len(s) != 1 or s not in SYMBOLS):
                raise BadSymbol(f"line {lineno}: {s!r}")
        if d not in DIRECTIONS:
            raise MachineError(f"line {lineno}: direction must be L, R or N")
        table = wild if c == "." else explicit
        key = q if c == "." else (c, q)
        if key in table:
            raise DuplicateRule(f"line {lineno}: second rule for {key!r}")
        table[key] = (w, q2, d)
    if r is None:
        raise MachineError("empty machine description")
    rules = {}
    for q in range(1, r + 1):
        for c in SYMBOLS:
            spec = explicit.get((c, q)) or wild.get(q)
            if spec is None:
                raise IncompleteRuleTable(f"no rule for ({c!r}, {q})")
            w, q2, d = spec
            rules[(c, q)] = (c if w == "." else w, q2, d)
    return Machine(r, rules)


def print_machine(m: Machine) -> str:
    lines = [f"states {m.r}"]
    for (c, q), (w, q2, d) in m.ordered_rules():
        lines.append(f"{q} {c} -> {q2} {w} {d}")
    return "\n".join(lines) + "\n"


def load_machine(path) -> Machine:
    return parse_machine(Path(path).read_text())


def fixture(name: str) -> Machine:
    return load_machine(FIXTURES / f"{name.lower()}.tm")
