import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import choi_of_unitary, deferred_measurement_density
from telegate import qsim
from telegate.builder import NonlocalCUSpec, build_program
from telegate.executor import (
    ChoiMatrix,
    ExecutionError,
    _enumerate,
    branch_density,
    channel_choi,
    choi_distance,
    run_branches,
    unitary_choi,
)
from telegate.protocol import (
    ConditionalPauli,
    DiscardBit,
    ExternalWire,
    MeasureZ,
    Party,
    Program,
    cwire,
    qwire,
)
from telegate.qsim import StateVector


def two_wire_program(*instructions, phases=()) -> Program:
    externals = (ExternalWire(qwire(0), Party.ALICE), ExternalWire(qwire(1), Party.BOB))
    return Program(externals, instructions, phases)


def test_empty_program_single_branch():
    state = qsim.haar_random_state(2, 5)
    outcomes = run_branches(two_wire_program(), state)
    assert len(outcomes) == 1
    assert outcomes[0].transcript == ()
    assert outcomes[0].probability == 1.0
    assert outcomes[0].final_state == state


def test_identity_gate_teleportation_on_00():
    p = build_program(NonlocalCUSpec(qsim.I2, 1))
    outcomes = run_branches(p, StateVector.from_bits("00"))
    assert len(outcomes) == 4
    for o in outcomes:
        assert abs(o.probability - 0.25) < 1e-12
        assert abs(qsim.fidelity(o.final_state, StateVector.from_bits("00")) - 1) < 1e-12


def test_cnot_teleportation_on_10():
    p = build_program(NonlocalCUSpec(qsim.X, 1))
    outcomes = run_branches(p, StateVector.from_bits("10"))
    assert len(outcomes) == 4
    for o in outcomes:
        assert abs(o.probability - 0.25) < 1e-12
        assert abs(qsim.fidelity(o.final_state, StateVector.from_bits("11")) - 1) < 1e-12


def test_outcomes_sorted_by_transcript_bits():
    p = build_program(NonlocalCUSpec(qsim.H, 1))
    outcomes = run_branches(p, StateVector.from_bits("10"))
    assert [o.bits for o in outcomes] == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert [w.name for w, _ in outcomes[0].transcript] == ["c1", "c2"]


@given(st.integers(0, 2**32 - 1))
def test_transcript_uniformity_for_any_gate_and_input(seed):
    rng = np.random.default_rng(seed)
    p = build_program(NonlocalCUSpec.for_gate(qsim.haar_random_unitary(2, rng)))
    outcomes = run_branches(p, qsim.haar_random_state(2, rng))
    assert len(outcomes) == 4
    for o in outcomes:
        assert abs(o.probability - 0.25) < 1e-12


@given(st.integers(0, 2**32 - 1))
def test_branch_mixture_matches_deferred_measurement_oracle(seed):
    rng = np.random.default_rng(seed)
    p = build_program(NonlocalCUSpec.for_gate(qsim.haar_random_unitary(2, rng)))
    state = qsim.haar_random_state(2, rng)
    rho_branches = branch_density(run_branches(p, state))
    rho_oracle = deferred_measurement_density(p, state.amplitudes)
    assert np.abs(rho_branches - rho_oracle).max() < 1e-10


def test_interleaved_alloc_and_measure_keeps_positions_straight():
    """Index compaction: wires allocated/measured in scrambled order must
    still route gates to the right qubits."""
    text = """\
    ext A q0
    alloc A q4 = 1
    alloc A q5 = 0
    gate A q5 : X
    measz A q4 -> c1
    gate A q5 : X
    cpauli A q0 X if c1
    measz A q5 -> c2
    discard c1
    discard c2
    """
    from telegate.protocol import parse_program

    program = parse_program(text)
    outcomes = run_branches(program, StateVector.from_bits("0"))
    # q4 was |1> so c1=1 fires the X on q0; q5 was toggled twice back to |0>
    assert len(outcomes) == 1
    assert outcomes[0].bits == (1, 0)
    assert outcomes[0].final_state == StateVector.from_bits("1")


def test_verify_program_on_handwritten_local_file():
    from telegate.protocol import parse_program
    from telegate.verifier import verify_program

    program = parse_program("ext A q0\ngate A q0 : H\n")
    assert verify_program(program, qsim.H).passed
    assert not verify_program(program, qsim.X).passed


def test_run_rejects_invalid_program():
    p = two_wire_program(MeasureZ(Party.ALICE, qwire(0), cwire(1)), DiscardBit(cwire(1)))
    with pytest.raises(ValueError, match="locality"):
        run_branches(p, StateVector.from_bits("00"))


def test_run_rejects_wrong_input_size():
    with pytest.raises(ValueError, match="declares"):
        run_branches(two_wire_program(), StateVector.from_bits("0"))


def test_unset_conditioning_bit_is_execution_error():
    # bypass validation on purpose: the executor must still refuse
    bad = (ConditionalPauli(Party.ALICE, qwire(0), "X", cwire(7)),)
    with pytest.raises(ExecutionError, match="unset"):
        _enumerate(bad, StateVector.from_bits("0"), [qwire(0)])


# Choi matrices

def test_choi_of_identity_program_is_max_entangled_projector():
    p = Program((ExternalWire(qwire(0), Party.ALICE),))
    j = channel_choi(p)
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    assert np.allclose(j.matrix, np.outer(phi, phi), atol=1e-14)


def test_unitary_choi_matches_empty_program():
    p = Program(
        (ExternalWire(qwire(0), Party.ALICE), ExternalWire(qwire(1), Party.BOB))
    )
    d = choi_distance(channel_choi(p), unitary_choi(qsim.identity(4)))
    assert d <= 1e-12


def test_program_choi_matches_bruteforce_cnot_choi():
    p = build_program(NonlocalCUSpec(qsim.X, 1))
    j_prog = channel_choi(p)
    j_ref = choi_of_unitary(qsim.controlled(qsim.X).matrix)
    assert np.linalg.norm(j_prog.matrix - j_ref) < 1e-10


@given(st.integers(0, 2**32 - 1))
def test_unitary_choi_matches_bruteforce(seed):
    u = qsim.haar_random_unitary(4, seed)
    assert np.abs(unitary_choi(u).matrix - choi_of_unitary(u.matrix)).max() < 1e-12


def test_unitary_choi_of_x_support():
    j = unitary_choi(qsim.X).matrix
    # row-major vec(X)/sqrt(2) lives on |01> and |10>
    expected = np.zeros((4, 4))
    expected[1, 1] = expected[1, 2] = expected[2, 1] = expected[2, 2] = 0.5
    assert np.allclose(j, expected, atol=1e-15)


def test_unitary_choi_trace_one_for_50_random_unitaries():
    rng = np.random.default_rng(31337)
    for _ in range(50):
        u = qsim.haar_random_unitary(int(rng.choice([2, 4])), rng)
        assert abs(np.trace(unitary_choi(u).matrix) - 1.0) < 1e-12


def test_discard_split_does_not_change_channel():
    p = build_program(NonlocalCUSpec(qsim.S, 1))
    trimmed = Program(p.externals, p.instructions[:-1], p.phases[:-1])
    assert choi_distance(channel_choi(p), channel_choi(trimmed)) < 1e-14


def test_choi_invariants_are_enforced():
    with pytest.raises(ValueError, match="Hermitian"):
        ChoiMatrix(np.array([[0.5, 1], [0, 0.5]]))
    with pytest.raises(ValueError, match="trace"):
        ChoiMatrix(np.eye(4))
    with pytest.raises(ValueError, match="semidefinite"):
        ChoiMatrix(np.diag([1.5, -0.5, 0, 0]))
