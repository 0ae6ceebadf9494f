"""Qubit encodings of fixed-start TSP tours.

Basis-state indices are little-endian: qubit ``i`` is bit ``i`` of the index,
i.e. ``(a >> i) & 1``.

Edge encoding
    One qubit per directed edge ``(j, k)`` with ``1 <= j, k <= n-1``, ``j != k``,
    ordered row-major (``j`` outer, ``k`` inner). A set bit selects the edge.
    Edges touching vertex 0 are implicit: a feasible bitstring selects the
    ``n-2`` edges of one directed Hamiltonian path over ``{1, ..., n-1}``, and
    the tour runs 0 -> path -> 0.

One-hot encoding
    Vertex 0 is pinned to the first time step. Qubit ``(s, v)`` for
    ``s, v in {1, ..., n-1}`` means "vertex ``v`` is visited at position ``s``
    of the tour order" and sits at position ``(s-1)*(n-1) + (v-1)``. Feasible
    bitstrings are exactly the ``(n-1) x (n-1)`` permutation matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Literal

import numpy as np

from .instance import (
    InstanceError,
    NormalizedInstance,
    TspInstance,
    Tour,
    as_normalized,
    check_order,
    make_tour,
    tour_cost,
)

EncodingKind = Literal["edge", "onehot"]

MAX_QUBITS = 26


class InfeasibleStateError(ValueError):
    """Raised when a cost is requested for a basis state that encodes no tour."""


class Encoding:
    kind: EncodingKind
    n: int
    qubit_count: int

    def encode(self, order) -> int:
        raise NotImplementedError

    def decode(self, a: int) -> tuple[int, ...] | None:
        """Tour order for basis state ``a``, or ``None`` if ``a`` is infeasible."""
        raise NotImplementedError

    def basis_cost(self, inst: TspInstance | NormalizedInstance, a: int) -> float:
        raise NotImplementedError

    def _check_index(self, a: int) -> int:
        a = int(a)
        if not 0 <= a < 1 << self.qubit_count:
            raise InstanceError(f"basis index {a} out of range for {self.qubit_count} qubits")
        return a

    def _check_tour(self, order) -> tuple[int, ...]:
        if isinstance(order, Tour):
            order = order.order
        return check_order(self.n, order, fixed_start=True)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n})"

    def __eq__(self, other: object) -> bool:
        return type(self) is type(other) and self.n == other.n  # type: ignore[attr-defined]

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.n))


class EdgeEncoding(Encoding):
    kind = "edge"

    def __init__(self, n: int):
        if n < 3:
            raise InstanceError(f"edge encoding needs n >= 3, got n={n}")
        self.n = n
        self.edges: tuple[tuple[int, int], ...] = tuple(
            (j, k) for j in range(1, n) for k in range(1, n) if j != k
        )
        self.qubit_index = {e: i for i, e in enumerate(self.edges)}
        self.qubit_count = len(self.edges)

    def encode(self, order) -> int:
        order = self._check_tour(order)
        a = 0
        for j, k in zip(order[1:], order[2:]):
            a |= 1 << self.qubit_index[(j, k)]
        return a

    def decode(self, a: int) -> tuple[int, ...] | None:
        a = self._check_index(a)
        if a.bit_count() != self.n - 2:
            return None
        succ: dict[int, int] = {}
        has_pred: set[int] = set()
        for i, (j, k) in enumerate(self.edges):
            if a >> i & 1:
                if j in succ or k in has_pred:
                    return None
                succ[j] = k
                has_pred.add(k)
        starts = [v for v in range(1, self.n) if v not in has_pred]
        # degree <= 1 with n-2 edges on n-1 vertices leaves one path component;
        # any extra edges form a cycle, which makes the walk below come up short
        if len(starts) != 1:
            return None
        order = [0, starts[0]]
        while order[-1] in succ:
            order.append(succ[order[-1]])
        if len(order) != self.n:
            return None
        return tuple(order)

    def phase_table(self, inst: TspInstance | NormalizedInstance) -> tuple[np.ndarray, np.ndarray]:
        """Per-qubit phases ``(phase0, phase1)`` in normalized cost units.

        The bit-0 branch carries ``(c[j,0] + c[0,k]) / (n-2)``; the bit-1 branch
        carries ``c[j,k] - (n-3) * (c[j,0] + c[0,k]) / (n-2)``. Summed over all
        qubits of a feasible bitstring they give the tour cost.
        """
        w = as_normalized(inst).weights
        share = np.array([(w[j, 0] + w[0, k]) / (self.n - 2) for j, k in self.edges])
        direct = np.array([w[j, k] for j, k in self.edges])
        return share, direct - (self.n - 3) * share

    def affine_cost(self, inst: TspInstance | NormalizedInstance, a: int) -> float:
        """Edge-selection cost form at any bitstring, feasible or not.

        Constant part: every edge into and out of vertex 0. Each selected edge
        ``(j, k)`` adds ``c[j,k]`` and removes ``c[j,0]`` and ``c[0,k]``, which
        it displaces.
        """
        a = self._check_index(a)
        w = as_normalized(inst).weights
        total = float(w[1:, 0].sum() + w[0, 1:].sum())
        for i, (j, k) in enumerate(self.edges):
            if a >> i & 1:
                total += w[j, k] - w[j, 0] - w[0, k]
        return total

    def basis_cost(self, inst: TspInstance | NormalizedInstance, a: int) -> float:
        if self.decode(a) is None:
            raise InfeasibleStateError(f"basis state {a} is not a tour in {self!r}")
        return self.affine_cost(inst, a)


class OneHotEncoding(Encoding):
    kind = "onehot"

    def __init__(self, n: int):
        if n < 3:
            raise InstanceError(f"one-hot encoding needs n >= 3, got n={n}")
        self.n = n
        self.qubit_count = (n - 1) ** 2

    def qubit(self, step: int, vertex: int) -> int:
        """Qubit position for "``vertex`` at position ``step`` of the order"."""
        return (step - 1) * (self.n - 1) + (vertex - 1)

    def encode(self, order) -> int:
        order = self._check_tour(order)
        a = 0
        for step in range(1, self.n):
            a |= 1 << self.qubit(step, order[step])
        return a

    def decode(self, a: int) -> tuple[int, ...] | None:
        a = self._check_index(a)
        m = self.n - 1
        if a.bit_count() != m:
            return None
        order = [0]
        seen = 0
        for step in range(m):
            row = a >> (step * m) & ((1 << m) - 1)
            if row.bit_count() != 1:
                return None
            seen |= row
            order.append(row.bit_length())
        if seen != (1 << m) - 1:
            return None
        return tuple(order)

    def basis_cost(self, inst: TspInstance | NormalizedInstance, a: int) -> float:
        order = self.decode(a)
        if order is None:
            raise InfeasibleStateError(f"basis state {a} is not a tour in {self!r}")
        return tour_cost(as_normalized(inst), order)


def make_encoding(kind: str, n: int) -> Encoding:
    if kind == "edge":
        return EdgeEncoding(n)
    if kind == "onehot":
        return OneHotEncoding(n)
    raise ValueError(f"unknown encoding {kind!r}; expected 'edge' or 'onehot'")


@dataclass(frozen=True, eq=False)
class FeasibleSet:
    """All basis states of an encoding that encode a tour.

    Entries follow lexicographic order of the tours. ``costs`` are normalized,
    while each ``Tour.cost`` is in raw units.
    """

    kind: str
    qubit_count: int
    indices: np.ndarray
    tours: tuple[Tour, ...]
    costs: np.ndarray

    def __len__(self) -> int:
        return len(self.indices)

    def tour_for(self, a: int) -> Tour:
        pos = np.flatnonzero(self.indices == a)
        if not len(pos):
            raise InfeasibleStateError(f"basis state {a} is not feasible")
        return self.tours[int(pos[0])]


def check_qubit_budget(encoding: Encoding) -> None:
    if encoding.qubit_count > MAX_QUBITS:
        raise InstanceError(
            f"{encoding!r} needs {encoding.qubit_count} qubits; the dense simulator "
            f"supports at most {MAX_QUBITS}"
        )


def enumerate_feasible(encoding: Encoding, inst: TspInstance | NormalizedInstance) -> FeasibleSet:
    """Feasible states built from the ``(n-1)!`` fixed-start tours."""
    check_qubit_budget(encoding)
    ninst = as_normalized(inst)
    if ninst.n != encoding.n:
        raise InstanceError(f"instance has n={ninst.n}, encoding expects n={encoding.n}")
    tours, indices, costs = [], [], []
    for rest in permutations(range(1, encoding.n)):
        order = (0,) + rest
        a = encoding.encode(order)
        tours.append(make_tour(ninst, order))
        indices.append(a)
        costs.append(encoding.basis_cost(ninst, a))
    idx = np.array(indices, dtype=np.int64)
    cst = np.array(costs, dtype=float)
    idx.setflags(write=False)
    cst.setflags(write=False)
    return FeasibleSet(encoding.kind, encoding.qubit_count, idx, tuple(tours), cst)


def scan_feasible(encoding: Encoding) -> list[int]:
    """Exhaustively decode all ``2**q`` basis states; slow, meant for cross-checks."""
    check_qubit_budget(encoding)
    return [a for a in range(1 << encoding.qubit_count) if encoding.decode(a) is not None]


@dataclass(frozen=True)
class GateCountReport:
    """Analytic resource counts for one phase separator; no circuit is built.

    ``onehot_rzz`` counts two-qubit ZZ terms of the fixed-start one-hot
    separator: one per ordered vertex pair ``(u, v)`` of inner vertices and per
    adjacent pair of free positions. ``onehot_rzz_unanchored`` is the same count
    for the full ``n^2``-qubit cyclic encoding. The edge separator uses one
    phase gate per branch per qubit and no two-qubit gates.
    """

    n: int
    onehot_qubits: int
    onehot_qubits_unanchored: int
    edge_qubits: int
    edge_qubits_symmetric: int
    onehot_rzz: int
    onehot_rzz_unanchored: int
    edge_rzz: int
    edge_phase_gates: int


def gate_count_report(n: int) -> GateCountReport:
    if n < 3:
        raise InstanceError(f"need n >= 3, got n={n}")
    edge_qubits = (n - 1) * (n - 2)
    return GateCountReport(
        n=n,
        onehot_qubits=(n - 1) ** 2,
        onehot_qubits_unanchored=n * n,
        edge_qubits=edge_qubits,
        edge_qubits_symmetric=edge_qubits // 2,
        onehot_rzz=(n - 2) * (n - 1) * (n - 2),
        onehot_rzz_unanchored=n * n * (n - 1),
        edge_rzz=0,
        edge_phase_gates=2 * edge_qubits,
    )
