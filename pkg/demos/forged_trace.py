"""Why the generated Pvble carries a chain clause.

A trace string only has to start in the initial configuration and end in
state 0; the pair clause inspects substrings that look like two adjacent
configurations.  Leave out the chain clause and a string containing no such
substring slips through, even for a machine that never halts.
"""
from godelstr import pvblegen, turing
from godelstr.stringsem import evaluate

m = turing.fixture("loop")
forged = '""a\\31"a\\30"'
print("LOOP on 'a' halts within 1000 steps:", turing.run(m, "a", 1000).halted)
print("forged trace:", forged)

for chain in (False, True):
    tpl = pvblegen.gen_pvble(m, guard_chain=chain)
    w, o = pvblegen.halting_witnesses(tpl.formula, "a", forged)
    v = evaluate(tpl.formula, {"x": "a"}, witnesses=w, oracles=o)
    label = "with chain clause   " if chain else "without chain clause"
    print(f"{label}: Pvble(\"a\") witnessed by the forgery -> {v.name}")
