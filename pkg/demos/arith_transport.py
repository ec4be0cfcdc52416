"""String sentences and their arithmetic translations agree."""
from godelstr import arith
from godelstr.strlang import parse_formula
from godelstr.stringsem import evaluate

for s in ["ab", "<", "a<", "hello"]:
    n = arith.num(s)
    print(f"num({s!r}) = {n}, successor -> {arith.successor(s)!r} = {n + 1}")

for text in ['"a""b"="ab"', 'Ex: x"b"="ab"', '"a"="b"', 'Ex: x"a"="bb"']:
    f = parse_formula(text)
    t = arith.translate(f)
    print()
    print(text, "->", evaluate(f).name)
    shown = arith.print_aformula(t)
    print("  ", shown if len(shown) < 120 else shown[:117] + "...")
    print("   arithmetic verdict:", arith.eval_arith(t).name)
