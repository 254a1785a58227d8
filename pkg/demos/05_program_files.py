# Program files: exporting, parsing, and linting the text format.
#
# Programs round-trip through a line-oriented text form (one instruction
# per line, '#' comments, case-insensitive keywords).  The locality
# validator turns rule breaches into per-line diagnostics, which is what
# `telegate lint` prints.

from pathlib import Path

from telegate import (
    NonlocalCUSpec,
    build_program,
    format_program,
    parse_program,
    qsim,
    validate_locality,
)

here = Path(__file__).resolve().parent

# Export the builder's program; this is exactly how nonlocal_cnot.tg was made.
program = build_program(NonlocalCUSpec.for_gate(qsim.X), gate_label="X")
text = format_program(program)
print("exported program:")
print(text)

# Round-trip: parsing the export reproduces the same instructions.
again = parse_program(text)
print("round-trips exactly:", again.instructions == program.instructions
      and again.phases == program.phases)

# A well-formed file lints clean...
good = parse_program((here / "nonlocal_cnot.tg").read_text())
print("nonlocal_cnot.tg violations:", validate_locality(good))

# ...while a cross-party gate is caught with its line number.
bad_text = (here / "bad_crossparty.tg").read_text()
bad = parse_program(bad_text)
for violation in validate_locality(bad):
    line = bad.source_lines[violation.index]
    print(f"bad_crossparty.tg line {line}: {violation.reason}")

# Unlabelled gates export as matrix literals with full precision, so even
# a random unitary survives the text round trip bit-for-bit.
random_program = build_program(NonlocalCUSpec.for_gate(qsim.haar_random_unitary(2, 99)))
reparsed = parse_program(format_program(random_program))
print("random gate survives text round trip:",
      reparsed.instructions == random_program.instructions)
