"""Build the self-referential sentence of a machine and look at it.

    python3 demos/godel_walkthrough.py [halt|loop|shiftr]
"""
import sys

from godelstr import godelgen, turing
from godelstr.strlang import decode_chars


def main(name="halt"):
    m = turing.fixture(name)
    g = godelgen.gen_godel(m)
    print(f"machine: {name} ({m.r} state(s), {len(m.rules)} rules)")
    print(f"sentence length: {len(g.full)}")
    print(f"starts: {g.full[:60]}...")
    print(f"ends:   ...{g.full[-60:]}")

    # the last literal decodes to everything before it
    assert decode_chars(g.beta) == g.alpha
    print("fixed point:", godelgen.check_fixed_point(g.full))

    try:
        r = godelgen.demo_false_branch(m, fuel=10)
    except godelgen.NotHaltedWithinFuel:
        print("the machine does not halt on its own sentence within 10 steps;")
        print("nothing can be concluded from a finite run")
        return
    for line in r.lines():
        print(line)
    print(f"({r.seconds:.2f}s)")


if __name__ == "__main__":
    main(*sys.argv[1:])
