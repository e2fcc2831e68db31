"""Stabilizer-circuit toolkit: tableau simulation, synthesis, and a CHP-style CLI."""

from .beyond import (
    PauliSumState,
    ProductState,
    nonstab_apply,
    nonstab_expand,
    nonstab_measure,
    product_measure_probabilities,
)
from .gf2 import BinaryMatrix
from .mixed import MixedTableau, new_mixed
from .overlap import OverlapResult, inner_product
from .pauli import PauliOperator, commutes, multiply, parse_pauli, phase_g
from .program import CircuitProgram, parse, render
from .synth import (
    CanonicalCircuit,
    canonical_synthesize,
    circuits_equivalent,
    cnot_synth_logdepth,
    minimize,
    tableau_of_program,
)
from .tableau import MeasurementRecord, Tableau, new_zero_state

__all__ = [
    "BinaryMatrix",
    "CanonicalCircuit",
    "CircuitProgram",
    "MeasurementRecord",
    "MixedTableau",
    "OverlapResult",
    "PauliOperator",
    "PauliSumState",
    "ProductState",
    "Tableau",
    "canonical_synthesize",
    "circuits_equivalent",
    "cnot_synth_logdepth",
    "commutes",
    "inner_product",
    "minimize",
    "multiply",
    "new_mixed",
    "new_zero_state",
    "nonstab_apply",
    "nonstab_expand",
    "nonstab_measure",
    "parse",
    "parse_pauli",
    "phase_g",
    "product_measure_probabilities",
    "render",
    "tableau_of_program",
]
