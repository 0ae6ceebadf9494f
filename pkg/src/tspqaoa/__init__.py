"""QAOA for the traveling salesperson problem with two qubit encodings.

The edge-selection encoding spends one qubit per directed edge between
non-start vertices, ``(n-1)(n-2)`` qubits in total, and realizes the cost
separator as a product of single-qubit phase gates. The one-hot encoding
uses ``(n-1)^2`` qubits with the start vertex pinned.
"""

from .encoding import (
    EdgeEncoding,
    FeasibleSet,
    InfeasibleStateError,
    OneHotEncoding,
    enumerate_feasible,
    gate_count_report,
    make_encoding,
)
from .exact import brute_force, held_karp
from .instance import (
    InstanceError,
    NormalizedInstance,
    Tour,
    TspInstance,
    generate_random,
    normalize,
    read_instance,
    tour_cost,
    write_instance,
)
from .qaoa import QaoaConfig, QaoaResult, evaluate_expectation, optimize, sample_solution

__all__ = [
    "EdgeEncoding",
    "FeasibleSet",
    "InfeasibleStateError",
    "InstanceError",
    "NormalizedInstance",
    "OneHotEncoding",
    "QaoaConfig",
    "QaoaResult",
    "Tour",
    "TspInstance",
    "brute_force",
    "enumerate_feasible",
    "evaluate_expectation",
    "gate_count_report",
    "generate_random",
    "held_karp",
    "make_encoding",
    "normalize",
    "optimize",
    "read_instance",
    "sample_solution",
    "tour_cost",
    "write_instance",
]
