"""Command-line front end: program runner, benchmark harness, and the
synthesis / overlap / counting subcommands.

Exit codes: 0 success, 2 parse or usage error, 3 resource-cap error,
4 numerical-integrity error.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import random
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .beyond import PauliSumState, ProductState, product_measure_probabilities
from .errors import (
    DimensionError,
    NumericalIntegrityError,
    ParseError,
    ResourceCapError,
    StabsimError,
)
from .mixed import MixedTableau
from .oracle import DenseState
from .overlap import inner_product
from .program import (
    CircuitProgram,
    Cnot,
    Conditional,
    Hadamard,
    Measure,
    NamedUnitary,
    Phase,
    parse,
    random_unitary_program,
    render,
)
from .synth import canonical_synthesize, minimize, tableau_of_program
from .tableau import MeasurementRecord, Tableau, new_zero_state

ENGINES = ("tableau", "mixed", "beyond", "oracle")

PROGRAMS_DIR = Path(__file__).parent / "programs"


def load_demo_program(name: str) -> CircuitProgram:
    """Parse one of the bundled demo programs (teleport, ghz, ...)."""
    return parse((PROGRAMS_DIR / f"{name}.chp").read_text())


# -- program runner -------------------------------------------------------------


def _pad_blocks(program: CircuitProgram) -> ProductState:
    blocks = list(program.blocks)
    covered = sum(int(np.log2(b.shape[0])) for b in blocks)
    zero = np.array([[1, 0], [0, 0]], dtype=complex)
    blocks.extend([zero] * (program.n - covered))
    return ProductState(blocks)


class _TableauEngine:
    def __init__(self, program: CircuitProgram, mixed: bool):
        if program.blocks or program.gate_table:
            raise StabsimError(
                "tableau engines cannot run programs with blocks or custom gates"
            )
        self.t = MixedTableau(program.n) if mixed else new_zero_state(program.n)

    def gate(self, instr):
        if isinstance(instr, Cnot):
            self.t.apply_cnot(instr.a, instr.b)
        elif isinstance(instr, Hadamard):
            self.t.apply_hadamard(instr.a)
        elif isinstance(instr, Phase):
            self.t.apply_phase(instr.a)
        else:
            raise StabsimError(f"engine cannot apply {instr!r}")

    def measure(self, a, rng):
        return self.t.measure(a, rng)


class _OracleEngine:
    def __init__(self, program: CircuitProgram):
        if program.blocks:
            raise StabsimError("the oracle engine starts from |0...0> only")
        self.state = DenseState(program.n)
        self.gate_table = program.gate_table

    def gate(self, instr):
        if isinstance(instr, Cnot):
            self.state.apply_cnot(instr.a, instr.b)
        elif isinstance(instr, Hadamard):
            self.state.apply_hadamard(instr.a)
        elif isinstance(instr, Phase):
            self.state.apply_phase(instr.a)
        elif isinstance(instr, NamedUnitary):
            _, u = self.gate_table[instr.name]
            self.state.apply_unitary(u, instr.qubits)
        else:
            raise StabsimError(f"engine cannot apply {instr!r}")

    def measure(self, a, rng):
        outcome, det = self.state.measure(a, rng)
        return MeasurementRecord(a, outcome, det)


class _PauliSumEngine:
    def __init__(self, program: CircuitProgram, term_cap: int):
        self.state = PauliSumState(program.n, term_cap=term_cap)
        self.gate_table = program.gate_table

    def gate(self, instr):
        if isinstance(instr, Cnot):
            self.state.apply_cnot(instr.a, instr.b)
        elif isinstance(instr, Hadamard):
            self.state.apply_hadamard(instr.a)
        elif isinstance(instr, Phase):
            self.state.apply_phase(instr.a)
        elif isinstance(instr, NamedUnitary):
            _, u = self.gate_table[instr.name]
            self.state.apply_unitary(u, instr.qubits)
        else:
            raise StabsimError(f"engine cannot apply {instr!r}")

    def measure(self, a, rng):
        eps = 1e-10
        outcome, prob = self.state.measure_qubit(a, rng)
        return MeasurementRecord(a, outcome, deterministic=prob > 1 - eps)


def run(
    program: CircuitProgram,
    seed: int = 0,
    engine: str = "tableau",
    verbose: bool = False,
    term_cap: int = 1_000_000,
    max_measurements: int = 16,
) -> str:
    """Execute a program; returns the transcript (one character per
    measurement plus a newline, details appended in verbose mode)."""
    if engine not in ENGINES:
        raise StabsimError(f"unknown engine {engine!r}; pick one of {ENGINES}")
    rng = random.Random(seed)

    if engine == "beyond" and program.blocks:
        if any(isinstance(i, NamedUnitary) for i in program.instructions):
            raise StabsimError(
                "block initial states and non-stabilizer gates cannot be combined"
            )
        result = product_measure_probabilities(
            _pad_blocks(program), program, rng, max_measurements=max_measurements
        )
        records = result.records
    else:
        if engine == "tableau":
            eng = _TableauEngine(program, mixed=False)
        elif engine == "mixed":
            eng = _TableauEngine(program, mixed=True)
        elif engine == "oracle":
            eng = _OracleEngine(program)
        else:
            eng = _PauliSumEngine(program, term_cap)
        records = []
        for instr in program.instructions:
            if isinstance(instr, Conditional):
                if records[instr.bit].outcome != 1:
                    continue
                instr = instr.inner
            if isinstance(instr, Measure):
                records.append(eng.measure(instr.a, rng))
            else:
                eng.gate(instr)

    out = "".join(str(r.outcome) for r in records) + "\n"
    if verbose:
        for r in records:
            kind = "determinate" if r.deterministic else "random"
            out += f"m {r.qubit} -> {r.outcome} ({kind})\n"
        if engine == "beyond" and not program.blocks:
            rep = eng.state.resource_report()
            out += (
                f"# terms {rep['terms']} (bound {rep['term_bound']}, cap "
                f"{rep['term_cap']}), nonstabilizer gates "
                f"{rep['nonstabilizer_gates']}, prune tolerance "
                f"{rep['prune_tolerance']}\n"
            )
    return out


# -- benchmark harness ------------------------------------------------------------


@dataclass
class BenchConfig:
    n_min: int
    n_max: int
    step: int
    beta: float
    trials: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.beta <= 0:
            raise DimensionError("beta must be positive")
        if self.n_min < 2 or self.n_max < self.n_min or self.step < 1:
            raise DimensionError("bad qubit range")
        if self.trials < 1:
            raise DimensionError("trials must be >= 1")


def bench_one(n: int, beta: float, seed: int) -> dict:
    """One trial: floor(beta n log2 n) random gates, then measure every qubit
    in sequence, reporting wall time and rowsum invocations per measurement."""
    rng = random.Random(seed)
    ngates = int(beta * n * math.log2(n))
    program = random_unitary_program(n, ngates, rng)
    t = new_zero_state(n)
    for instr in program.instructions:
        if isinstance(instr, Cnot):
            t.apply_cnot(instr.a, instr.b)
        elif isinstance(instr, Hadamard):
            t.apply_hadamard(instr.a)
        else:
            t.apply_phase(instr.a)
    t.rowsum_count = 0
    start = time.perf_counter()
    for a in range(n):
        t.measure(a, rng)
    elapsed = time.perf_counter() - start
    return {
        "n": n,
        "beta": beta,
        "seed": seed,
        "gates": ngates,
        "total_meas_time": elapsed,
        "rowsums_per_meas": t.rowsum_count / n,
        "time_per_meas": elapsed / n,
    }


def bench(config: BenchConfig) -> str:
    """CSV report over the configured qubit range."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(
        [
            "n",
            "beta",
            "trial",
            "seed",
            "gates",
            "total_meas_time",
            "rowsums_per_meas",
            "time_per_meas",
        ]
    )
    for n in range(config.n_min, config.n_max + 1, config.step):
        for trial in range(config.trials):
            row = bench_one(n, config.beta, config.seed + trial)
            writer.writerow(
                [
                    row["n"],
                    row["beta"],
                    trial,
                    row["seed"],
                    row["gates"],
                    f"{row['total_meas_time']:.6f}",
                    f"{row['rowsums_per_meas']:.3f}",
                    f"{row['time_per_meas']:.9f}",
                ]
            )
    return buf.getvalue()


# -- state counting ------------------------------------------------------------------


def stabilizer_state_count(n: int) -> int:
    """Closed form 2^n prod_{k=0}^{n-1} (2^(n-k) + 1)."""
    if n < 1:
        raise DimensionError("qubit count must be positive")
    total = 1 << n
    for k in range(n):
        total *= (1 << (n - k)) + 1
    return total


def canonical_generator_key(gens: list, n: int) -> bytes:
    """Canonical serialization of the group generated by commuting ±1 Pauli
    generators: the reduced row echelon form of the symplectic bit rows is
    unique per row space, so the key does not depend on the generating set."""
    from .pauli import multiply

    rows = list(gens)

    def bits(p):
        return p.x | (p.z << n)

    idx = 0
    for col in range(2 * n):
        sel = next((k for k in range(idx, len(rows)) if (bits(rows[k]) >> col) & 1), None)
        if sel is None:
            continue
        rows[idx], rows[sel] = rows[sel], rows[idx]
        for k in range(len(rows)):
            if k != idx and (bits(rows[k]) >> col) & 1:
                rows[k] = multiply(rows[idx], rows[k])
        idx += 1
    nbytes = (n + 7) // 8
    return b"".join(
        p.x.to_bytes(nbytes, "little")
        + p.z.to_bytes(nbytes, "little")
        + bytes([p.phase_exp // 2])
        for p in rows[:idx]
    )


def canonical_stabilizer_key(t: Tableau) -> bytes:
    """Canonical key of a pure tableau's stabilizer group, signs included."""
    return canonical_generator_key(t.stabilizer_generators(), t.n)


def enumerate_stabilizer_states(n: int) -> int:
    """Count distinct reachable stabilizer states by breadth-first closure
    under the gate set, keyed by the canonical stabilizer form."""
    if n > 3:
        raise ResourceCapError("exhaustive enumeration is capped at 3 qubits")
    gates = [("h", a) for a in range(n)] + [("p", a) for a in range(n)]
    gates += [("c", a, b) for a in range(n) for b in range(n) if a != b]
    start = new_zero_state(n)
    seen = {canonical_stabilizer_key(start)}
    frontier = [start]
    while frontier:
        t = frontier.pop()
        for g in gates:
            u = t.copy()
            if g[0] == "h":
                u.apply_hadamard(g[1])
            elif g[0] == "p":
                u.apply_phase(g[1])
            else:
                u.apply_cnot(g[1], g[2])
            key = canonical_stabilizer_key(u)
            if key not in seen:
                seen.add(key)
                frontier.append(u)
    return len(seen)


# -- command-line interface ------------------------------------------------------------


def _require_unitary(program: CircuitProgram, what: str) -> CircuitProgram:
    if not all(isinstance(i, (Cnot, Hadamard, Phase)) for i in program.instructions):
        raise StabsimError(f"{what} requires a measurement-free stabilizer circuit")
    return program


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="stabsim", description="stabilizer-circuit simulator and synthesizer"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a CHP program")
    p_run.add_argument("file")
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--engine", choices=ENGINES, default="tableau")
    p_run.add_argument("-v", "--verbose", action="store_true")

    p_bench = sub.add_parser("bench", help="random-circuit measurement benchmark")
    p_bench.add_argument("--beta", type=float, required=True)
    p_bench.add_argument("--n-min", type=int, required=True)
    p_bench.add_argument("--n-max", type=int, required=True)
    p_bench.add_argument("--step", type=int, default=200)
    p_bench.add_argument("--trials", type=int, default=1)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--csv", default=None, help="write the report here")

    p_canon = sub.add_parser("canonicalize", help="emit the 11-round canonical form")
    p_canon.add_argument("file")

    p_min = sub.add_parser("minimize", help="canonicalize and shrink CNOT rounds")
    p_min.add_argument("file")

    p_inner = sub.add_parser("innerprod", help="overlap of two prepared states")
    p_inner.add_argument("file1")
    p_inner.add_argument("file2")

    p_count = sub.add_parser("count-states", help="number of stabilizer states")
    p_count.add_argument("n", type=int)

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            program = parse(Path(args.file).read_text())
            sys.stdout.write(
                run(program, seed=args.seed, engine=args.engine, verbose=args.verbose)
            )
        elif args.command == "bench":
            cfg = BenchConfig(
                n_min=args.n_min,
                n_max=args.n_max,
                step=args.step,
                beta=args.beta,
                trials=args.trials,
                seed=args.seed,
            )
            report = bench(cfg)
            if args.csv:
                Path(args.csv).write_text(report)
            else:
                sys.stdout.write(report)
        elif args.command == "canonicalize":
            program = _require_unitary(parse(Path(args.file).read_text()), "canonicalize")
            circuit = canonical_synthesize(tableau_of_program(program))
            sys.stdout.write(circuit.to_chp_text())
        elif args.command == "minimize":
            program = _require_unitary(parse(Path(args.file).read_text()), "minimize")
            sys.stdout.write(render(minimize(program)))
        elif args.command == "innerprod":
            progs = [
                _require_unitary(parse(Path(f).read_text()), "innerprod")
                for f in (args.file1, args.file2)
            ]
            n = max(p.n for p in progs)
            for p in progs:
                p.n = n
            t1, t2 = (tableau_of_program(p) for p in progs)
            print(inner_product(t1, t2))
        elif args.command == "count-states":
            n = args.n
            formula = stabilizer_state_count(n)
            line = f"n={n} formula={formula}"
            if n <= 3:
                line += f" enumerated={enumerate_stabilizer_states(n)}"
            print(line)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except ResourceCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return 3
    except NumericalIntegrityError as exc:
        print(f"numerical integrity: {exc}", file=sys.stderr)
        return 4
    except (StabsimError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
