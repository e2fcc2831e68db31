"""CHP-style quantum assembly: instruction types, parser, and renderer.

The core dialect is one instruction per line, `#` comments, case-insensitive
mnemonics, 0-based qubit indices:

    c a b    CNOT from control a to target b
    h a      Hadamard on a
    p a      phase gate on a
    m a      measure a in the standard basis

Extensions:

    u name q0 [q1 ...]   apply the named non-stabilizer gate
    if k <instr>         run a unitary instruction iff measurement #k gave 1
    block <b>            followed by a 2^b x 2^b density matrix, one row per
                         line, entries as re,im pairs (initial-state block)
    gate <name> <b>      followed by a 2^b x 2^b unitary in the same format
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError


@dataclass(frozen=True)
class Cnot:
    a: int
    b: int


@dataclass(frozen=True)
class Hadamard:
    a: int


@dataclass(frozen=True)
class Phase:
    a: int


@dataclass(frozen=True)
class Measure:
    a: int


@dataclass(frozen=True)
class NamedUnitary:
    name: str
    qubits: tuple


@dataclass(frozen=True)
class Conditional:
    """Run `inner` iff the outcome of measurement number `bit` was 1."""

    bit: int
    inner: object


UNITARY_TYPES = (Cnot, Hadamard, Phase, NamedUnitary)


@dataclass
class CircuitProgram:
    n: int
    instructions: tuple
    gate_table: dict = field(default_factory=dict)
    blocks: list = field(default_factory=list)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CircuitProgram):
            return NotImplemented
        return (
            self.n == other.n
            and self.instructions == other.instructions
            and sorted(self.gate_table) == sorted(other.gate_table)
            and all(
                np.array_equal(self.gate_table[k][1], other.gate_table[k][1])
                and self.gate_table[k][0] == other.gate_table[k][0]
                for k in self.gate_table
            )
            and len(self.blocks) == len(other.blocks)
            and all(np.array_equal(a, b) for a, b in zip(self.blocks, other.blocks))
        )

    @property
    def is_unitary(self) -> bool:
        return not any(isinstance(i, Measure) for i in self.instructions)

    def measurement_count(self) -> int:
        return sum(isinstance(i, Measure) for i in self.instructions)

    def qubit_span(self) -> int:
        top = -1
        for instr in self.instructions:
            inner = instr.inner if isinstance(instr, Conditional) else instr
            if isinstance(inner, Cnot):
                top = max(top, inner.a, inner.b)
            elif isinstance(inner, (Hadamard, Phase, Measure)):
                top = max(top, inner.a)
            else:
                top = max(top, max(inner.qubits))
        return top + 1


def _parse_index(tok: str, lineno: int) -> int:
    if not tok.isdigit():
        raise ParseError(lineno, f"expected a nonnegative qubit index, got {tok!r}")
    return int(tok)


def _parse_matrix(lines, start: int, dim: int, what: str) -> tuple[np.ndarray, int]:
    """Read a dim x dim complex matrix from re,im pair rows; returns (m, next_line)."""
    m = np.zeros((dim, dim), dtype=complex)
    row = 0
    i = start
    while row < dim:
        if i >= len(lines):
            raise ParseError(len(lines), f"unexpected end of file inside {what}")
        lineno, text = lines[i]
        i += 1
        body = text.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        if len(parts) != dim:
            raise ParseError(lineno, f"{what} row needs {dim} entries, got {len(parts)}")
        for col, pair in enumerate(parts):
            try:
                re_s, im_s = pair.split(",")
                m[row, col] = complex(float(re_s), float(im_s))
            except ValueError:
                raise ParseError(lineno, f"bad complex entry {pair!r} (want re,im)")
        row += 1
    return m, i


def _parse_simple(tokens, lineno: int):
    op = tokens[0].lower()
    if op == "c":
        if len(tokens) != 3:
            raise ParseError(lineno, "c takes exactly two qubit indices")
        a, b = (_parse_index(t, lineno) for t in tokens[1:])
        if a == b:
            raise ParseError(lineno, "CNOT control and target must differ")
        return Cnot(a, b)
    if op in ("h", "p", "m"):
        if len(tokens) != 2:
            raise ParseError(lineno, f"{op} takes exactly one qubit index")
        a = _parse_index(tokens[1], lineno)
        return {"h": Hadamard, "p": Phase, "m": Measure}[op](a)
    if op == "u":
        if len(tokens) < 3:
            raise ParseError(lineno, "u takes a gate name and at least one qubit")
        qubits = tuple(_parse_index(t, lineno) for t in tokens[2:])
        if len(set(qubits)) != len(qubits):
            raise ParseError(lineno, "u qubits must be distinct")
        return NamedUnitary(tokens[1], qubits)
    raise ParseError(lineno, f"unknown instruction {tokens[0]!r}")


def parse(text: str) -> CircuitProgram:
    lines = list(enumerate(text.splitlines(), start=1))
    instructions = []
    gate_table = {}
    blocks = []
    measures_seen = 0
    i = 0
    while i < len(lines):
        lineno, raw = lines[i]
        i += 1
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        tokens = body.split()
        op = tokens[0].lower()
        if op == "block":
            if len(tokens) != 2 or not tokens[1].isdigit():
                raise ParseError(lineno, "block takes one positive size argument")
            b = int(tokens[1])
            if b < 1:
                raise ParseError(lineno, "block size must be >= 1")
            m, i = _parse_matrix(lines, i, 1 << b, "block")
            blocks.append(m)
            continue
        if op == "gate":
            if len(tokens) != 3 or not tokens[2].isdigit():
                raise ParseError(lineno, "gate takes a name and a positive size")
            name, b = tokens[1], int(tokens[2])
            if b < 1:
                raise ParseError(lineno, "gate size must be >= 1")
            if name in gate_table:
                raise ParseError(lineno, f"gate {name!r} defined twice")
            m, i = _parse_matrix(lines, i, 1 << b, f"gate {name}")
            gate_table[name] = (b, m)
            continue
        if op == "if":
            if len(tokens) < 3:
                raise ParseError(lineno, "if takes a measurement index and an instruction")
            k = _parse_index(tokens[1], lineno)
            if k >= measures_seen:
                raise ParseError(
                    lineno, f"condition references measurement {k} before it happens"
                )
            inner = _parse_simple(tokens[2:], lineno)
            if isinstance(inner, Measure):
                raise ParseError(lineno, "measurements cannot be conditional")
            instructions.append(Conditional(k, inner))
            continue
        instr = _parse_simple(tokens, lineno)
        if isinstance(instr, NamedUnitary):
            if instr.name not in gate_table:
                raise ParseError(lineno, f"gate {instr.name!r} used before definition")
            b, _ = gate_table[instr.name]
            if len(instr.qubits) != b:
                raise ParseError(
                    lineno, f"gate {instr.name!r} acts on {b} qubits, got {len(instr.qubits)}"
                )
        if isinstance(instr, Measure):
            measures_seen += 1
        instructions.append(instr)

    program = CircuitProgram(0, tuple(instructions), gate_table, blocks)
    n = program.qubit_span() if instructions else 0
    block_span = sum(int(np.log2(b.shape[0])) for b in blocks)
    program.n = max(n, block_span, 1)
    return program


def _fmt_matrix(m: np.ndarray) -> str:
    rows = []
    for row in m:
        rows.append(" ".join(f"{v.real:.17g},{v.imag:.17g}" for v in row))
    return "\n".join(rows)


def _render_instr(instr) -> str:
    if isinstance(instr, Cnot):
        return f"c {instr.a} {instr.b}"
    if isinstance(instr, Hadamard):
        return f"h {instr.a}"
    if isinstance(instr, Phase):
        return f"p {instr.a}"
    if isinstance(instr, Measure):
        return f"m {instr.a}"
    if isinstance(instr, NamedUnitary):
        return f"u {instr.name} " + " ".join(str(q) for q in instr.qubits)
    if isinstance(instr, Conditional):
        return f"if {instr.bit} " + _render_instr(instr.inner)
    raise TypeError(f"unknown instruction {instr!r}")


def render(program: CircuitProgram) -> str:
    out = []
    for b in program.blocks:
        out.append(f"block {int(np.log2(b.shape[0]))}")
        out.append(_fmt_matrix(b))
    for name in program.gate_table:
        b, m = program.gate_table[name]
        out.append(f"gate {name} {b}")
        out.append(_fmt_matrix(m))
    for instr in program.instructions:
        out.append(_render_instr(instr))
    return "\n".join(out) + "\n"


def random_unitary_program(n: int, ngates: int, rng) -> CircuitProgram:
    """The benchmark circuit distribution: each gate is CNOT, H, or P with
    probability 1/3, operands uniform with control != target."""
    instrs = []
    for _ in range(ngates):
        kind = rng.randrange(3)
        if kind == 0 and n >= 2:
            a = rng.randrange(n)
            b = rng.randrange(n - 1)
            if b >= a:
                b += 1
            instrs.append(Cnot(a, b))
        elif kind == 2:
            instrs.append(Phase(rng.randrange(n)))
        else:
            instrs.append(Hadamard(rng.randrange(n)))
    return CircuitProgram(n, tuple(instrs))
