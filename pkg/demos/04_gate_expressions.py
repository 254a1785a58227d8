# The gate-expression language: how unitaries are written on the command
# line and in program files.
#
# Named gates I X Y Z H S T, parameterized RX RY RZ PHASE (radians),
# matrix literals, products (*), tensors (x, binds looser), and a postfix
# adjoint (').  A*B is the matrix product in written order: B acts first.

import numpy as np

from telegate.gatelang import GateSyntaxError, evaluate, format_expr, parse

for text in ("H", "RZ(0.3)' * H", "S*S", "H x H", "(H x I) * (I x H)",
             "[[0,1],[1,0]]", "[[1,0],[0,0.6+0.8i]]"):
    expr = parse(text)
    u = evaluate(expr)
    print(f"{text!r:<24} -> dim {u.dim}, pretty-printed {format_expr(expr)!r}")

print()
print("S*S equals Z: ", np.allclose(evaluate(parse("S*S")).matrix, [[1, 0], [0, -1]]))
print("H*H equals I: ", np.allclose(evaluate(parse("H*H")).matrix, np.eye(2)))

# The adjoint undoes a gate: RZ(0.3)' * RZ(0.3) = I.
u = evaluate(parse("RZ(0.3)' * RZ(0.3)"))
print("RZ(0.3)' * RZ(0.3) equals I: ", np.allclose(u.matrix, np.eye(2)))

# Errors carry byte offsets, which the CLI forwards to stderr.
for bad in ("RZ(", "FOO", "H * * X", "[[1,1],[1,1]]"):
    try:
        evaluate(parse(bad))
    except (GateSyntaxError, ValueError) as exc:
        print(f"{bad!r:<16} rejected: {exc}")
