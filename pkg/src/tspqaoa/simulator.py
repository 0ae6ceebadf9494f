"""Dense statevector backend for constrained QAOA.

Only three operations are needed: preparing the uniform superposition over
feasible states, applying a diagonal phase separator, and applying the Grover
mixer ``exp(-i beta |F><F|)``. Phases follow ``amp(a) <- exp(-i theta(a)) amp(a)``.

Operations act in place on the ``StateVector`` and return it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .encoding import (
    MAX_QUBITS,
    EdgeEncoding,
    Encoding,
    FeasibleSet,
    enumerate_feasible,
)
from .instance import NormalizedInstance, TspInstance, as_normalized

CostForm = Literal["plain", "eq1"]


class SimulatorError(ValueError):
    pass


class StateVector:
    def __init__(self, amplitudes: np.ndarray):
        amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        q = int(amplitudes.size).bit_length() - 1
        if amplitudes.ndim != 1 or amplitudes.size != 1 << q:
            raise SimulatorError(f"amplitude vector length {amplitudes.size} is not a power of two")
        if q > MAX_QUBITS:
            raise SimulatorError(f"{q} qubits exceed the dense limit of {MAX_QUBITS}")
        self.amplitudes = amplitudes
        self.qubit_count = q

    @classmethod
    def zeros(cls, qubit_count: int) -> StateVector:
        if qubit_count > MAX_QUBITS:
            raise SimulatorError(f"{qubit_count} qubits exceed the dense limit of {MAX_QUBITS}")
        return cls(np.zeros(1 << qubit_count, dtype=np.complex128))

    def copy(self) -> StateVector:
        return StateVector(self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def __len__(self) -> int:
        return self.amplitudes.size


def prepare_feasible_superposition(feasible: FeasibleSet) -> StateVector:
    if len(feasible) == 0:
        raise SimulatorError("feasible set is empty")
    state = StateVector.zeros(feasible.qubit_count)
    state.amplitudes[feasible.indices] = 1 / np.sqrt(len(feasible))
    return state


def eq1_offset(inst: NormalizedInstance) -> float:
    """Constant ``(n-2) * sum of all weights`` of the affine one-hot cost ``4 f - offset``."""
    return (inst.n - 2) * float(inst.weights.sum())


def _apply_qubit_phases(amps: np.ndarray, qubit: int, phase0: complex, phase1: complex) -> None:
    view = amps.reshape(-1, 2, 1 << qubit)
    view[:, 0, :] *= phase0
    view[:, 1, :] *= phase1


def apply_phase_separator(
    state: StateVector,
    encoding: Encoding,
    instance: TspInstance | NormalizedInstance,
    gamma: float,
    *,
    feasible: FeasibleSet | None = None,
    cost_form: CostForm = "plain",
) -> StateVector:
    """Apply ``exp(-i gamma C)``.

    For the edge encoding this is the tensor product of one single-qubit
    diagonal per qubit, built from :meth:`EdgeEncoding.phase_table`; no
    ``2**q`` cost table is formed. For the one-hot encoding the tour cost is
    applied on feasible states only and infeasible states are left alone.

    ``cost_form="eq1"`` uses ``C = 4 f - (n-2) * sum(weights)`` instead of
    ``C = f``. Both forms give the same state up to a global phase once
    ``gamma`` is rescaled by 4.
    """
    if state.qubit_count != encoding.qubit_count:
        raise SimulatorError(
            f"state has {state.qubit_count} qubits, {encoding!r} needs {encoding.qubit_count}"
        )
    if cost_form not in ("plain", "eq1"):
        raise SimulatorError(f"unknown cost form {cost_form!r}")
    ninst = as_normalized(instance)
    scale = 4.0 if cost_form == "eq1" else 1.0
    amps = state.amplitudes
    if isinstance(encoding, EdgeEncoding):
        phase0, phase1 = encoding.phase_table(ninst)
        b0 = np.exp(-1j * gamma * scale * phase0)
        b1 = np.exp(-1j * gamma * scale * phase1)
        for i in range(encoding.qubit_count):
            _apply_qubit_phases(amps, i, b0[i], b1[i])
    else:
        if feasible is None:
            feasible = enumerate_feasible(encoding, ninst)
        amps[feasible.indices] *= np.exp(-1j * gamma * scale * feasible.costs)
    if cost_form == "eq1":
        amps *= np.exp(1j * gamma * eq1_offset(ninst))
    return state


def apply_grover_mixer(state: StateVector, feasible: FeasibleSet, beta: float) -> StateVector:
    """Apply ``exp(-i beta |F><F|) = I + (exp(-i beta) - 1) |F><F|`` exactly."""
    if len(feasible) == 0:
        raise SimulatorError("feasible set is empty")
    if state.qubit_count != feasible.qubit_count:
        raise SimulatorError("state and feasible set disagree on qubit count")
    root = np.sqrt(len(feasible))
    overlap = state.amplitudes[feasible.indices].sum() / root
    state.amplitudes[feasible.indices] += (np.exp(-1j * beta) - 1) * overlap / root
    return state


@dataclass(frozen=True)
class Distribution:
    probabilities: dict[int, float]
    infeasible_mass: float

    def argmax(self) -> int:
        # first maximal entry wins, in feasible-set order
        return max(self.probabilities, key=self.probabilities.__getitem__)


def measure_distribution(state: StateVector, feasible: FeasibleSet) -> Distribution:
    probs = state.probabilities()
    outside = np.ones(probs.size, dtype=bool)
    outside[feasible.indices] = False
    return Distribution(
        {int(a): float(probs[a]) for a in feasible.indices},
        float(probs[outside].sum()),
    )
