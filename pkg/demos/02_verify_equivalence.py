# Certifying that the teleported controlled gate equals the monolithic one.
#
# The verifier gathers two kinds of evidence: per-branch fidelities against
# the specification unitary over basis + Haar-random probe inputs, and the
# Frobenius distance between the Choi matrices of the two channels.  Both
# must clear their tolerances for a pass.

from telegate import NonlocalCUSpec, qsim, verify

gates = {
    "I": qsim.I2,
    "X": qsim.X,
    "H": qsim.H,
    "T": qsim.T,
    "RZ(0.3)": qsim.rz(0.3),
    "RX(1.1)": qsim.rx(1.1),
    "random 2x2": qsim.haar_random_unitary(2, 42),
}

print(f"{'gate':<12} {'verdict':<8} {'max branch infidelity':<24} choi distance")
for name, c in gates.items():
    report = verify(NonlocalCUSpec.for_gate(c))
    print(f"{name:<12} {report.verdict:<8} {report.max_infidelity:<24.3e} "
          f"{report.choi_dist:.3e}")

# A two-qubit target works the same way: Bob applies his half on three wires.
c4 = qsim.haar_random_unitary(4, 43)
report = verify(NonlocalCUSpec(c4, 2))
print(f"\nrandom 4x4 target (5 qubits in flight): {report.verdict}, "
      f"choi distance {report.choi_dist:.3e}")

# The report serializes to a stable JSON document (schema in docs/).
print("\nfull report for H:")
print(verify(NonlocalCUSpec.for_gate(qsim.H)).to_json())
