# Channels as Choi matrices, and how sabotage shows up in them.
#
# Two channels are equal iff their Choi matrices are equal, so channel
# equality reduces to a matrix norm.  Here we extract the Choi matrix of
# the teleportation program, compare it to the ideal controlled gate, and
# then damage the program four different ways to see the distance jump.

import numpy as np

from telegate import (
    MUTATIONS,
    NonlocalCUSpec,
    apply_mutation,
    build_program,
    build_specification,
    channel_choi,
    choi_distance,
    qsim,
    unitary_choi,
)

spec = NonlocalCUSpec.for_gate(qsim.X)
program = build_program(spec, gate_label="X")

j_program = channel_choi(program)
j_ideal = unitary_choi(build_specification(spec))
print(f"Choi dimension: {j_program.dim} x {j_program.dim}")
print(f"trace (normalized to 1): {np.trace(j_program.matrix).real:.12f}")
print(f"distance program vs ideal CNOT: {choi_distance(j_program, j_ideal):.3e}")

print("\nEvery mutation is a different channel:")
for mutation in MUTATIONS:
    damaged = apply_mutation(program, mutation)
    dist = choi_distance(channel_choi(damaged), j_ideal)
    print(f"  {mutation:<18} choi distance {dist:.3f}")

# For intuition: dropping the Z correction leaves a 50/50 mixture of CNOT
# and (Z x I)CNOT -- a dephasing of the control.  Its distance from the
# pure CNOT channel is ||J_CNOT - J_mix||_F = sqrt(2)/2.
print(f"\nexpected for drop-z-correction: {np.sqrt(2) / 2:.3f}")
