"""Brute-force occupation enumeration over small truncated spectra.

Used to check the recursion in ``ensemble``; it shares no code with it.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from qszilard.errors import CapacityError, DomainError
from qszilard.ensemble import Statistics

MAX_LEVELS = 16
MAX_PARTICLES = 4


@dataclass(frozen=True)
class TruncatedSpectrum:
    levels: tuple[float, ...]

    def __post_init__(self):
        levels = tuple(float(e) for e in self.levels)
        object.__setattr__(self, "levels", levels)
        if len(levels) > MAX_LEVELS:
            raise CapacityError(f"at most {MAX_LEVELS} levels, got {len(levels)}")
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise DomainError("levels must be strictly ascending")


def _states(n_levels, n_particles, stat):
    idx = range(n_levels)
    if stat is Statistics.BOSON:
        return itertools.combinations_with_replacement(idx, n_particles)
    if stat is Statistics.FERMION:
        return itertools.combinations(idx, n_particles)
    return itertools.product(idx, repeat=n_particles)


def enumerate_partition(spec: TruncatedSpectrum, n_particles: int, stat, beta: float) -> float:
    """Sum of exp(-beta E) over every many-body state of the truncated spectrum."""
    stat = Statistics(stat)
    if n_particles > MAX_PARTICLES:
        raise CapacityError(f"at most {MAX_PARTICLES} particles, got {n_particles}")
    levels = spec.levels
    return math.fsum(
        math.exp(-beta * sum(levels[i] for i in state))
        for state in _states(len(levels), n_particles, stat)
    )


def enumerate_split_f(
    spec_left: TruncatedSpectrum,
    spec_right: TruncatedSpectrum,
    n_particles: int,
    stat,
    beta: float,
) -> list[float]:
    """f_m for m = 0..N from products of enumerated side partitions."""
    stat = Statistics(stat)
    weights = []
    for m in range(n_particles + 1):
        w = enumerate_partition(spec_left, m, stat, beta) * enumerate_partition(
            spec_right, n_particles - m, stat, beta
        )
        if stat is Statistics.DISTINGUISHABLE:
            # ordered tuples over the union, grouped by which side each particle is on
            w *= math.comb(n_particles, m)
        weights.append(w)
    total = math.fsum(weights)
    return [w / total for w in weights]
