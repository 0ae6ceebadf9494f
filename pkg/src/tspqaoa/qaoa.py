"""Grover-mixer QAOA for TSP: evolution, expectation and the classical loop.

Angles are packed as ``[gamma_1, ..., gamma_p, beta_1, ..., beta_p]``. The
evaluation count reported by :func:`optimize` is the number of objective
calls, which is what the benchmark harness records as "iterations".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
from scipy.optimize import minimize

from .encoding import Encoding, FeasibleSet, enumerate_feasible, make_encoding
from .exact import held_karp
from .instance import NormalizedInstance, TspInstance, Tour, as_normalized
from .simulator import (
    CostForm,
    Distribution,
    StateVector,
    apply_grover_mixer,
    apply_phase_separator,
    measure_distribution,
    prepare_feasible_superposition,
)

OptimizerKind = Literal["cobyla", "nelder-mead"]


class QaoaRunError(RuntimeError):
    """The optimizer produced no usable iterate."""


@dataclass(frozen=True)
class QaoaConfig:
    p: int = 2
    encoding: str = "edge"
    optimizer: OptimizerKind = "cobyla"
    max_evals: int = 200
    initial_angles: tuple[float, ...] | None = None
    seed: int = 0
    cost_form: CostForm = "plain"
    rhobeg: float = 0.5
    tol: float = 1e-4

    def __post_init__(self) -> None:
        if self.p < 1:
            raise ValueError(f"p must be >= 1, got {self.p}")
        if self.encoding not in ("edge", "onehot"):
            raise ValueError(f"unknown encoding {self.encoding!r}")
        if self.optimizer not in ("cobyla", "nelder-mead"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if self.max_evals < 2 * self.p + 1:
            raise ValueError(f"max_evals must be >= 2p+1 = {2 * self.p + 1}, got {self.max_evals}")
        if self.cost_form not in ("plain", "eq1"):
            raise ValueError(f"unknown cost form {self.cost_form!r}")
        if self.initial_angles is not None:
            angles = tuple(float(x) for x in self.initial_angles)
            if len(angles) != 2 * self.p:
                raise ValueError(f"need {2 * self.p} initial angles, got {len(angles)}")
            object.__setattr__(self, "initial_angles", angles)

    def start_angles(self) -> np.ndarray:
        if self.initial_angles is not None:
            return np.array(self.initial_angles)
        rng = np.random.default_rng(self.seed)
        return rng.uniform(0.0, 2 * math.pi, size=2 * self.p)


@dataclass(frozen=True)
class QaoaResult:
    best_angles: tuple[float, ...]
    expectation: float
    eval_count: int
    final_distribution: dict[int, float] = field(repr=False)
    found_tour: Tour
    found_cost: float
    optimal_cost: float
    relative_error: float
    infeasible_mass: float = 0.0


class Evolution:
    """Precomputed pieces for repeatedly evolving one instance under one encoding."""

    def __init__(
        self,
        instance: TspInstance | NormalizedInstance,
        encoding: Encoding,
        *,
        feasible: FeasibleSet | None = None,
        cost_form: CostForm = "plain",
    ):
        self.instance = as_normalized(instance)
        self.encoding = encoding
        self.feasible = feasible if feasible is not None else enumerate_feasible(encoding, self.instance)
        self.cost_form = cost_form

    def state(self, angles: Sequence[float]) -> StateVector:
        angles = np.asarray(angles, dtype=float)
        if angles.ndim != 1 or angles.size % 2 or angles.size == 0:
            raise ValueError(f"expected 2p angles, got {angles.size}")
        p = angles.size // 2
        state = prepare_feasible_superposition(self.feasible)
        for gamma, beta in zip(angles[:p], angles[p:]):
            apply_phase_separator(
                state,
                self.encoding,
                self.instance,
                gamma,
                feasible=self.feasible,
                cost_form=self.cost_form,
            )
            apply_grover_mixer(state, self.feasible, beta)
        return state

    def expectation(self, angles: Sequence[float]) -> float:
        amps = self.state(angles).amplitudes[self.feasible.indices]
        return float(np.dot(np.abs(amps) ** 2, self.feasible.costs))

    def distribution(self, angles: Sequence[float]) -> Distribution:
        return measure_distribution(self.state(angles), self.feasible)


def evaluate_expectation(
    instance: TspInstance | NormalizedInstance,
    encoding: Encoding,
    angles: Sequence[float],
    *,
    cost_form: CostForm = "plain",
) -> float:
    """Exact ``<C>`` in normalized cost units after ``p = len(angles) // 2`` layers."""
    return Evolution(instance, encoding, cost_form=cost_form).expectation(angles)


class _BudgetExhausted(Exception):
    pass


def optimize(instance: TspInstance | NormalizedInstance, config: QaoaConfig = QaoaConfig()) -> QaoaResult:
    ninst = as_normalized(instance)
    evo = Evolution(ninst, make_encoding(config.encoding, ninst.n), cost_form=config.cost_form)

    best_x: np.ndarray | None = None
    best_f = math.inf
    count = 0

    def objective(x: np.ndarray) -> float:
        nonlocal best_x, best_f, count
        if count >= config.max_evals:
            raise _BudgetExhausted
        count += 1
        f = evo.expectation(x)
        if f < best_f:
            best_x, best_f = np.array(x, dtype=float), f
        return f

    x0 = config.start_angles()
    try:
        if config.optimizer == "cobyla":
            minimize(
                objective,
                x0,
                method="COBYLA",
                options={"rhobeg": config.rhobeg, "maxiter": config.max_evals, "tol": config.tol},
            )
        else:
            minimize(
                objective,
                x0,
                method="Nelder-Mead",
                options={
                    "maxfev": config.max_evals,
                    "xatol": config.tol,
                    "fatol": config.tol,
                    "initial_simplex": _initial_simplex(x0, config.rhobeg),
                },
            )
    except _BudgetExhausted:
        pass
    if best_x is None or not math.isfinite(best_f):
        raise QaoaRunError("optimizer produced no finite objective value")

    dist = evo.distribution(best_x)
    found = evo.feasible.tour_for(dist.argmax())
    optimal = held_karp(ninst.base)
    return QaoaResult(
        best_angles=tuple(float(v) for v in best_x),
        expectation=best_f,
        eval_count=count,
        final_distribution=dist.probabilities,
        found_tour=found,
        found_cost=found.cost,
        optimal_cost=optimal.cost,
        relative_error=relative_error(found.cost, optimal.cost),
        infeasible_mass=dist.infeasible_mass,
    )


def _initial_simplex(x0: np.ndarray, step: float) -> np.ndarray:
    return np.vstack([x0, x0 + step * np.eye(x0.size)])


def relative_error(found: float, optimal: float) -> float:
    if optimal == 0:
        return 0.0 if found == 0 else math.inf
    return (found - optimal) / optimal


def sample_solution(
    final_distribution: dict[int, float],
    feasible: FeasibleSet,
    shots: int,
    seed: int,
) -> Tour:
    """Most frequent tour among ``shots`` multinomial samples of the distribution."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    keys = list(final_distribution)
    probs = np.array([final_distribution[k] for k in keys], dtype=float)
    probs = probs / probs.sum()
    counts = np.random.default_rng(seed).multinomial(shots, probs)
    return feasible.tour_for(keys[int(np.argmax(counts))])
