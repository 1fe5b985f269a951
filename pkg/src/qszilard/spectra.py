"""Single-particle spectra and truncated partition sums.

Units: box length L = 1, energies in E_1(L) = h^2 / (8 M L^2), temperatures
in E_1(L) / k_B, so ``beta = 1 / tau``. Both potential families are power
laws ``E_n = coef * n**alpha`` with n >= 1, which is all the summation code
needs to know.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from qszilard import _kernels
from qszilard.errors import DomainError, TruncationError, UnsupportedOperationError

DEFAULT_REL_TOL = 1e-12
DEFAULT_MAX_TERMS = 10_000_000


class PotentialKind(str, Enum):
    INFINITE_WELL = "InfiniteWell"
    POWER_LAW_LADDER = "PowerLawLadder"


@dataclass(frozen=True)
class PotentialModel:
    """Confinement geometry.

    ``InfiniteWell`` has E_n(l) = n^2 / l^2 for a side of length l.
    ``PowerLawLadder`` has E_n = epsilon * n**alpha on each side of a
    symmetric split and carries no length dependence.
    """

    kind: PotentialKind = PotentialKind.INFINITE_WELL
    alpha: float = 2.0
    epsilon: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", PotentialKind(self.kind))
        if self.kind is PotentialKind.INFINITE_WELL:
            object.__setattr__(self, "alpha", 2.0)
            object.__setattr__(self, "epsilon", 1.0)
        if not (self.alpha > 0 and self.epsilon > 0):
            raise DomainError(f"alpha and epsilon must be positive, got {self.alpha}, {self.epsilon}")

    @classmethod
    def infinite_well(cls) -> PotentialModel:
        return cls(PotentialKind.INFINITE_WELL)

    @classmethod
    def ladder(cls, alpha: float, epsilon: float) -> PotentialModel:
        return cls(PotentialKind.POWER_LAW_LADDER, float(alpha), float(epsilon))

    @property
    def is_well(self) -> bool:
        return self.kind is PotentialKind.INFINITE_WELL

    def coefficient(self, side_length: float) -> float:
        """Prefactor ``coef`` in ``E_n = coef * n**alpha``."""
        if self.is_well:
            if not side_length > 0:
                raise DomainError(f"side length must be positive, got {side_length}")
            return 1.0 / (side_length * side_length)
        return self.epsilon


@dataclass(frozen=True)
class PartitionSum:
    """Truncated z(beta) = sum_{n=1}^{N*} exp(-beta E_n) with a certified tail.

    The sum is stored relative to its ground term: ``value ==
    exp(-ground_exponent) * scaled_value``. Use ``log_value`` when the
    ground term underflows.
    """

    scaled_value: float
    scaled_tail: float
    terms_used: int
    ground_exponent: float

    @property
    def value(self) -> float:
        return math.exp(-self.ground_exponent) * self.scaled_value

    @property
    def tail_bound(self) -> float:
        return math.exp(-self.ground_exponent) * self.scaled_tail

    @property
    def log_value(self) -> float:
        if self.scaled_value == 0.0:
            return -math.inf
        return math.log(self.scaled_value) - self.ground_exponent


def eigenenergy(model: PotentialModel, side_length: float, n: int) -> float:
    if n < 1:
        raise DomainError(f"level index must be >= 1, got {n}")
    if model.is_well and not 0 < side_length <= 1:
        raise DomainError(f"side length must lie in (0, 1], got {side_length}")
    return model.coefficient(side_length) * float(n) ** model.alpha


def eigenenergy_length_derivative(model: PotentialModel, side_length: float, n: int) -> float:
    """dE_n/dl for a side of length l; -2 E_n(l) / l for the infinite well."""
    if not model.is_well:
        raise UnsupportedOperationError("the power-law ladder has no movable wall")
    return -2.0 * eigenenergy(model, side_length, n) / side_length


def log_tail_bound(coef: float, alpha: float, beta: float, n_terms: int) -> float:
    """log of a bound on sum_{n > n_terms} x_n, with x_n scaled so x_1 = 1.

    Integral comparison for decreasing terms:
    sum_{n>N} exp(-a n^alpha) <= int_N^inf exp(-a x^alpha) dx
    = a^(-1/alpha) / alpha * Gamma(1/alpha, a N^alpha), and the upper
    incomplete gamma is bounded by y^(s-1) e^(-y) / (1 - (s-1)/y) when
    s = 1/alpha > 1 and y > s - 1 (by y^(s-1) e^(-y) when s <= 1).
    """
    a = beta * coef
    s = 1.0 / alpha
    y = a * float(n_terms) ** alpha
    if s > 1.0:
        if y <= s - 1.0:
            return math.inf
        denom = math.log1p(-(s - 1.0) / y)
    else:
        denom = 0.0
    return a - s * math.log(a) - math.log(alpha) + (s - 1.0) * math.log(y) - y - denom


def terms_for_tail(coef: float, alpha: float, beta: float, log_target: float, max_terms: int) -> int:
    """Smallest N <= max_terms whose scaled tail bound is <= exp(log_target).

    Returns ``max_terms + 1`` when even max_terms does not suffice.
    """
    if log_tail_bound(coef, alpha, beta, 1) <= log_target:
        return 1
    hi = 2
    while log_tail_bound(coef, alpha, beta, hi) > log_target:
        if hi > max_terms:
            return max_terms + 1
        hi *= 2
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if log_tail_bound(coef, alpha, beta, mid) <= log_target:
            hi = mid
        else:
            lo = mid
    return hi if hi <= max_terms else max_terms + 1


def _check_sum_args(beta, rel_tol):
    if not beta > 0 or math.isinf(beta):
        raise DomainError(f"beta must be positive and finite, got {beta}")
    if not rel_tol > 0:
        raise DomainError(f"rel_tol must be positive, got {rel_tol}")


def scaled_power_sums(
    model: PotentialModel,
    side_length: float,
    beta: float,
    n_powers: int,
    rel_tol: float = DEFAULT_REL_TOL,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> tuple[list[float], float, int]:
    """z(k beta) for k = 1..n_powers from one pass over the levels.

    Returns ``(sums, scaled_tail, terms)``; sums[k-1] is z(k beta) *
    exp(k beta E_1). The tail bound certified for k = 1 also bounds every
    higher power, since scaled terms are <= 1.
    """
    _check_sum_args(beta, rel_tol)
    coef = model.coefficient(side_length)
    alpha = model.alpha
    # scaled value >= 1, so a tail <= rel_tol certifies the relative bound
    log_target = math.log(rel_tol)
    n_terms = terms_for_tail(coef, alpha, beta, log_target, max_terms)
    if n_terms > max_terms:
        achieved = math.exp(log_tail_bound(coef, alpha, beta, max_terms))
        raise TruncationError(
            f"partition sum needs more than {max_terms} terms at beta={beta}", achieved
        )
    sums = _kernels.scaled_power_sums(coef, alpha, beta, n_terms, n_powers)
    return sums, math.exp(log_tail_bound(coef, alpha, beta, n_terms)), n_terms


def single_partition(
    model: PotentialModel,
    side_length: float,
    beta: float,
    rel_tol: float = DEFAULT_REL_TOL,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> PartitionSum:
    """Single-particle partition sum z(beta) with a certified truncation bound.

    A zero-width side has no accessible levels and returns z = 0.
    """
    if model.is_well and side_length == 0:
        _check_sum_args(beta, rel_tol)
        return PartitionSum(0.0, 0.0, 0, 0.0)
    sums, tail, n_terms = scaled_power_sums(model, side_length, beta, 1, rel_tol, max_terms)
    ground = beta * eigenenergy(model, side_length if model.is_well else 1.0, 1)
    return PartitionSum(sums[0], tail, n_terms, ground)
