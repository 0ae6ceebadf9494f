"""Exact TSP solvers used as ground truth.

Both solvers anchor tours at vertex 0 and break ties between optimal tours by
taking the lexicographically smallest order.
"""

from __future__ import annotations

import math
from itertools import permutations

from .instance import InstanceError, NormalizedInstance, TspInstance, Tour, make_tour

BRUTE_FORCE_MAX_N = 10
HELD_KARP_MAX_N = 18


def _ties(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-12)


def brute_force(inst: TspInstance | NormalizedInstance) -> Tour:
    if inst.n > BRUTE_FORCE_MAX_N:
        raise InstanceError(f"brute force limited to n <= {BRUTE_FORCE_MAX_N}, got n={inst.n}")
    w = inst.weights
    best_cost = math.inf
    best_order: tuple[int, ...] = ()
    # permutations() yields in lexicographic order, so strict '<' keeps the smallest tie
    for rest in permutations(range(1, inst.n)):
        order = (0,) + rest
        cost = sum(w[order[i - 1], order[i]] for i in range(1, inst.n)) + w[order[-1], 0]
        if cost < best_cost and not _ties(cost, best_cost):
            best_cost, best_order = cost, order
    return make_tour(inst, best_order)


def held_karp(inst: TspInstance | NormalizedInstance) -> Tour:
    """Bitmask dynamic program over subsets of ``{1, ..., n-1}``.

    ``rest[mask][v]`` is the cheapest way to start at ``v`` (already visited,
    as are the vertices in ``mask``), visit the remaining vertices and return
    to 0. Reconstructing forward from vertex 0 and preferring the smallest
    next vertex on ties yields the lexicographically smallest optimal tour.
    """
    n = inst.n
    if n > HELD_KARP_MAX_N:
        raise InstanceError(f"Held-Karp limited to n <= {HELD_KARP_MAX_N}, got n={n}")
    w = inst.weights.tolist()
    m = n - 1  # vertex v is bit v-1
    full = (1 << m) - 1
    rest = [[math.inf] * n for _ in range(1 << m)]
    for v in range(1, n):
        rest[full][v] = w[v][0]
    for mask in range(full - 1, 0, -1):
        row = rest[mask]
        for v in range(1, n):
            if not mask >> (v - 1) & 1:
                continue
            best = math.inf
            for u in range(1, n):
                bit = 1 << (u - 1)
                if mask & bit:
                    continue
                c = w[v][u] + rest[mask | bit][u]
                if c < best:
                    best = c
            row[v] = best

    order = [0]
    mask = 0
    prev = 0
    while mask != full:
        choice = None
        target = math.inf
        for u in range(1, n):
            bit = 1 << (u - 1)
            if mask & bit:
                continue
            c = w[prev][u] + rest[mask | bit][u]
            if choice is None or (c < target and not _ties(c, target)):
                choice, target = u, c
        order.append(choice)
        mask |= 1 << (choice - 1)
        prev = choice
    return make_tour(inst, order)
