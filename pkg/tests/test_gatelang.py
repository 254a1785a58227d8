import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import random_gate_expr, random_unitary_expr
from telegate import qsim
from telegate.gatelang import (
    Adjoint,
    GateEvalError,
    GateSyntaxError,
    MatrixLiteral,
    NamedGate,
    ParamGate,
    Product,
    Tensor,
    evaluate,
    format_expr,
    format_matrix,
    parse,
)


def test_parse_single_gate():
    assert parse("H") == NamedGate("H")


def test_parse_adjoint_product():
    assert parse("RZ(0.3)' * H") == Product(Adjoint(ParamGate("RZ", 0.3)), NamedGate("H"))


def test_unterminated_call_reports_end_of_input():
    with pytest.raises(GateSyntaxError, match="unexpected end of input at offset 3") as exc:
        parse("RZ(")
    assert exc.value.offset == 3


def test_precedence_tensor_binds_loosest():
    assert parse("I x X * Z") == Tensor(NamedGate("I"), Product(NamedGate("X"), NamedGate("Z")))
    assert parse("(I x X) * (Z x I)") == Product(
        Tensor(NamedGate("I"), NamedGate("X")), Tensor(NamedGate("Z"), NamedGate("I"))
    )


def test_left_associativity():
    assert parse("X*Y*Z") == Product(Product(NamedGate("X"), NamedGate("Y")), NamedGate("Z"))
    assert parse("X x Y x Z") == Tensor(Tensor(NamedGate("X"), NamedGate("Y")), NamedGate("Z"))


def test_matrix_literal_forms():
    m = parse("[[0,1],[1,0]]")
    assert m == MatrixLiteral(((0j, 1 + 0j), (1 + 0j, 0j)))
    m = parse("[[1.0-0.5i,0.5i],[1e-3,2]]")  # parse only; not unitary
    assert m.rows[0][0] == complex(1.0, -0.5)
    assert m.rows[0][1] == complex(0.0, 0.5)
    assert m.rows[1][0] == complex(1e-3, 0.0)


def test_evaluate_involutions():
    assert np.abs(evaluate(parse("H*H")).matrix - np.eye(2)).max() < 1e-12
    assert np.abs(evaluate(parse("S*S")).matrix - qsim.Z.matrix).max() < 1e-12


def test_evaluate_matrix_literal_exactly_x():
    assert np.array_equal(evaluate(parse("[[0,1],[1,0]]")).matrix, qsim.X.matrix)


def test_evaluate_param_gates():
    assert evaluate(parse("RZ(0.3)")) == qsim.rz(0.3)
    assert evaluate(parse("RX(1.1)")) == qsim.rx(1.1)
    assert evaluate(parse("PHASE(2e-1)")) == qsim.phase(0.2)


def test_evaluate_written_order():
    # A*B applies B first: (X*H)|0> = X(H|0>)
    got = evaluate(parse("X*H")).matrix @ np.array([1, 0])
    want = qsim.X.matrix @ (qsim.H.matrix @ np.array([1, 0]))
    assert np.allclose(got, want)


def test_tensor_matches_kron():
    assert evaluate(parse("H x X")) == qsim.kron(qsim.H, qsim.X)


@pytest.mark.parametrize(
    "text, fragment, offset",
    [
        ("FOO", "unknown gate name", 0),
        ("H(0.3)", "takes no parameter", 0),
        ("RZ", "requires a parameter", 0),
        ("RZ(1+2i)", "must be real", 3),
        ("H @ X", "unexpected character '@'", 2),
        ("H * * X", "expected a gate", 4),
        ("H'?", "unexpected character", 2),
        ("(H", "unexpected end of input", 2),
        ("H X", "unexpected token 'X'", 2),
        ("[[1,0],[0,1],[0]]", "equal length", 0),
    ],
)
def test_positioned_parse_errors(text, fragment, offset):
    with pytest.raises(GateSyntaxError) as exc:
        parse(text)
    assert fragment in str(exc.value)
    assert exc.value.offset == offset


def test_non_unitary_literal_rejected_with_position():
    with pytest.raises(GateEvalError, match="offset 4") as exc:
        evaluate(parse("H * [[1,1],[1,1]]"))
    assert exc.value.offset == 4


def test_product_dimension_mismatch_rejected():
    with pytest.raises(GateEvalError, match="dimension mismatch"):
        evaluate(parse("(H x H) * X"))


@given(st.integers(0, 2**32 - 1))
def test_round_trip_random_expressions(seed):
    rng = np.random.default_rng(seed)
    expr = random_gate_expr(rng, depth=int(rng.integers(0, 5)))
    assert parse(format_expr(expr)) == expr


@given(st.integers(0, 2**32 - 1))
def test_adjoint_evaluates_to_conjugate_transpose(seed):
    rng = np.random.default_rng(seed)
    expr = random_unitary_expr(rng, depth=3, n_qubits=int(rng.integers(1, 3)))
    u = evaluate(expr)
    udag = evaluate(Adjoint(expr))
    assert np.abs(udag.matrix - u.matrix.conj().T).max() < 1e-12


@given(st.integers(0, 2**32 - 1))
def test_evaluation_never_yields_silently_non_unitary(seed):
    rng = np.random.default_rng(seed)
    u = evaluate(random_unitary_expr(rng, depth=4, n_qubits=2))
    defect = np.abs(u.matrix.conj().T @ u.matrix - np.eye(u.dim)).max()
    assert defect <= 1e-10  # the UnitaryMatrix invariant, re-checked explicitly


def test_format_matrix_round_trips_exactly():
    u = qsim.haar_random_unitary(2, 2718)
    again = evaluate(parse(format_matrix(u)))
    assert np.array_equal(again.matrix, u.matrix)


def test_pretty_print_examples():
    assert format_expr(parse("RZ(0.3)' * H")) == "RZ(0.3)' * H"
    assert format_expr(Tensor(NamedGate("H"), Tensor(NamedGate("X"), NamedGate("Y")))) == "H x (X x Y)"
    assert format_expr(Adjoint(Product(NamedGate("X"), NamedGate("Y")))) == "(X * Y)'"
