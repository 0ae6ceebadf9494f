"""TSP instances on complete directed graphs.

Weights are stored as a dense ``n x n`` float matrix where ``weights[j, k]``
is the cost of travelling from vertex ``j`` to vertex ``k``. Instances need
not be symmetric and need not satisfy the triangle inequality.

Instance files are JSON documents of the form::

    {"n": 4, "weights": [[0, 3, 7, 1], [2, 0, 5, 9], ...]}

with ``weights`` given row-major and a zero diagonal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

MIN_VERTICES = 3


class InstanceError(ValueError):
    """Raised for malformed instances, tours or instance files."""


def _frozen(matrix: np.ndarray) -> np.ndarray:
    matrix = np.array(matrix, dtype=float)
    matrix.setflags(write=False)
    return matrix


@dataclass(frozen=True, eq=False)
class TspInstance:
    n: int
    weights: np.ndarray

    def __post_init__(self) -> None:
        if self.n < MIN_VERTICES:
            raise InstanceError(f"need at least {MIN_VERTICES} vertices, got n={self.n}")
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (self.n, self.n):
            raise InstanceError(f"weights must be {self.n}x{self.n}, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise InstanceError("weights must be finite")
        if np.any(np.diag(w) != 0):
            raise InstanceError("diagonal weights must be 0")
        if np.any(w < 0):
            raise InstanceError("weights must be nonnegative")
        object.__setattr__(self, "weights", _frozen(w))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TspInstance):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.weights, other.weights)

    __hash__ = None  # type: ignore[assignment]

    def max_weight(self) -> float:
        off = self.weights[~np.eye(self.n, dtype=bool)]
        return float(off.max())


@dataclass(frozen=True, eq=False)
class NormalizedInstance:
    """An instance rescaled so that every tour costs at most 1.

    ``scale`` is ``n`` times the largest single edge weight.
    """

    base: TspInstance
    scale: float
    weights: np.ndarray

    @property
    def n(self) -> int:
        return self.base.n

    def to_raw(self, value: float) -> float:
        return value * self.scale


@dataclass(frozen=True)
class Tour:
    order: tuple[int, ...]
    cost: float

    @property
    def n(self) -> int:
        return len(self.order)


def generate_random(n: int, seed: int, lo: int = 1, hi: int = 20) -> TspInstance:
    """Draw integer weights i.i.d. uniform on ``[lo, hi]`` (both inclusive).

    Uses numpy's PCG64 bit generator, whose integer streams are stable across
    platforms for a given seed.
    """
    if n < MIN_VERTICES:
        raise InstanceError(f"need at least {MIN_VERTICES} vertices, got n={n}")
    if not 1 <= lo <= hi:
        raise InstanceError(f"weight range must satisfy 1 <= lo <= hi, got [{lo}, {hi}]")
    rng = np.random.Generator(np.random.PCG64(seed))
    w = rng.integers(lo, hi, size=(n, n), endpoint=True).astype(float)
    np.fill_diagonal(w, 0.0)
    return TspInstance(n, w)


def normalize(inst: TspInstance) -> NormalizedInstance:
    top = inst.max_weight()
    if top <= 0:
        raise InstanceError("cannot normalize an instance whose weights are all zero")
    scale = inst.n * top
    return NormalizedInstance(inst, scale, _frozen(inst.weights / scale))


def as_normalized(inst: TspInstance | NormalizedInstance) -> NormalizedInstance:
    return inst if isinstance(inst, NormalizedInstance) else normalize(inst)


def check_order(n: int, order: Sequence[int], *, fixed_start: bool = False) -> tuple[int, ...]:
    order = tuple(int(v) for v in order)
    if sorted(order) != list(range(n)):
        raise InstanceError(f"{order} is not a permutation of 0..{n - 1}")
    if fixed_start and order[0] != 0:
        raise InstanceError(f"tour {order} must start at vertex 0")
    return order


def tour_cost(inst: TspInstance | NormalizedInstance, order: Sequence[int]) -> float:
    """Closed-cycle cost of ``order``, including the edge back to ``order[0]``."""
    order = check_order(inst.n, order)
    w = inst.weights
    return float(sum(w[order[i], order[(i + 1) % len(order)]] for i in range(len(order))))


def make_tour(inst: TspInstance | NormalizedInstance, order: Sequence[int]) -> Tour:
    """Build a fixed-start tour, with its cost in raw units."""
    order = check_order(inst.n, order, fixed_start=True)
    raw = inst.base if isinstance(inst, NormalizedInstance) else inst
    return Tour(order, tour_cost(raw, order))


def instance_to_dict(inst: TspInstance) -> dict:
    w = inst.weights
    rows = [[int(x) if float(x).is_integer() else float(x) for x in row] for row in w]
    return {"n": inst.n, "weights": rows}


def instance_from_dict(data: dict) -> TspInstance:
    if not isinstance(data, dict) or "n" not in data or "weights" not in data:
        raise InstanceError("instance document needs fields 'n' and 'weights'")
    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise InstanceError(f"'n' must be an integer, got {n!r}")
    rows = data["weights"]
    if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
        raise InstanceError("'weights' must be a list of rows")
    if len(rows) != n or any(len(r) != n for r in rows):
        raise InstanceError(f"'weights' must be a square {n}x{n} matrix")
    try:
        w = np.array(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InstanceError(f"non-numeric weight: {exc}") from None
    return TspInstance(n, w)


def write_instance(inst: TspInstance, path: str | Path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(inst)) + "\n", encoding="utf-8")


def read_instance(path: str | Path) -> TspInstance:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path}: not valid JSON ({exc})") from None
    return instance_from_dict(data)
