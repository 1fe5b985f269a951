"""Canonical N-particle partition functions and the split-box distribution f_m."""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from enum import Enum

from qszilard import _kernels
from qszilard.errors import DomainError, NumericalLossError, UnsupportedOperationError
from qszilard.spectra import (
    DEFAULT_MAX_TERMS,
    DEFAULT_REL_TOL,
    PotentialModel,
    log_tail_bound,
    scaled_power_sums,
    terms_for_tail,
)

# A recursion result smaller than this fraction of its largest term has lost
# more than ~5 of its 16 digits.
CANCELLATION_TOL = 1e-5


class Statistics(str, Enum):
    BOSON = "Boson"
    FERMION = "Fermion"
    DISTINGUISHABLE = "Distinguishable"

    @classmethod
    def parse(cls, name: str) -> Statistics:
        for stat in cls:
            if name.lower() == stat.value.lower():
                return stat
        raise DomainError(f"unknown statistics {name!r}")


def _recursion(z, n_particles, stat, cancel_tol=None):
    """Z_0..Z_N from the exchange-cycle recursion.

    Z_n = (1/n) sum_{k=1}^n (+-1)^(k-1) z(k beta) Z_{n-k}
    """
    sign = -1.0 if stat is Statistics.FERMION else 1.0
    zs = [1.0]
    for n in range(1, n_particles + 1):
        terms = [sign ** (k - 1) * z[k - 1] * zs[n - k] for k in range(1, n + 1)]
        value = math.fsum(terms) / n
        if cancel_tol is not None:
            largest = max(abs(t) for t in terms) / n
            if value <= cancel_tol * largest:
                raise NumericalLossError(
                    f"fermionic recursion lost precision at n={n} "
                    f"(result {value:.3e}, largest term {largest:.3e})",
                    quantity=f"Z_{n}",
                )
        zs.append(value)
    return zs


def canonical_partition(
    z_at_multiples, n_particles: int, stat: Statistics, cancel_tol: float = CANCELLATION_TOL
) -> float:
    """Canonical partition function of N ideal particles.

    ``z_at_multiples[k-1]`` is the single-particle z(k beta). Bosons and
    fermions use the exchange-cycle recursion; distinguishable particles
    give z(beta)**N.

    For fermions the alternating sum can cancel. An exact zero is returned
    as is (Pauli exclusion on a truncated spectrum); a result that is
    negative or below ``cancel_tol`` times its largest term raises
    NumericalLossError, and the caller should switch to
    ``spectrum_partition``.
    """
    stat = Statistics(stat)
    if n_particles < 0:
        raise DomainError("particle number must be >= 0")
    if n_particles == 0:
        return 1.0
    if len(z_at_multiples) < n_particles:
        raise DomainError("need z(k beta) for every k up to N")
    if stat is Statistics.DISTINGUISHABLE:
        return float(z_at_multiples[0]) ** n_particles
    if stat is Statistics.BOSON:
        return _recursion(z_at_multiples, n_particles, stat)[-1]
    zs = _recursion(z_at_multiples, n_particles, stat)
    n = n_particles
    value = zs[-1]
    if value == 0.0:
        return 0.0
    largest = max(abs(z_at_multiples[k - 1] * zs[n - k]) for k in range(1, n + 1)) / n
    if value <= cancel_tol * largest:
        raise NumericalLossError(
            f"fermionic recursion lost precision (result {value:.3e}, largest term {largest:.3e})",
            quantity=f"Z_{n}",
        )
    return value


def _elementary_levels(levels, beta, n_particles):
    """e_n(exp(-beta E_j)) for n = 0..N by the positive level recurrence."""
    e = [1.0] + [0.0] * n_particles
    for energy in levels:
        x = math.exp(-beta * energy)
        for n in range(n_particles, 0, -1):
            e[n] += x * e[n - 1]
    return e


def spectrum_partition(levels, n_particles: int, stat: Statistics, beta: float) -> float:
    """Canonical partition function over an explicit finite spectrum.

    Runs the recursion and falls back to the cancellation-free level
    recurrence when fermionic cancellation is detected.
    """
    stat = Statistics(stat)
    z = [math.fsum(math.exp(-k * beta * e) for e in levels) for k in range(1, n_particles + 1)]
    try:
        value = canonical_partition(z, n_particles, stat)
    except NumericalLossError:
        return _elementary_levels(levels, beta, n_particles)[n_particles]
    if stat is Statistics.FERMION and value == 0.0 and n_particles <= len(levels):
        return _elementary_levels(levels, beta, n_particles)[n_particles]
    return value


def _log(x):
    return math.log(x) if x > 0 else -math.inf


def _fermion_levels(model, side_length, n_max, beta, rel_tol, max_terms):
    """Positive-term fallback: elementary symmetric polynomials level by level.

    The number of levels grows until the omitted-level correction
    sum_j e_{n-j} T^j is certified below rel_tol * e_n for every n.
    """
    coef = model.coefficient(side_length)
    alpha = model.alpha
    n_terms = max(
        terms_for_tail(coef, alpha, beta, math.log(rel_tol), max_terms), n_max + 1
    )
    # beta*(E_i - E_1) for the n_max lowest levels
    gaps = [beta * coef * (float(i) ** alpha - 1.0) for i in range(1, n_max + 1)]
    for _ in range(64):
        if n_terms > max_terms:
            raise NumericalLossError(
                f"fermionic fallback needs more than {max_terms} levels", quantity="Z_N"
            )
        e = _kernels.scaled_elementary_symmetric(coef, alpha, beta, n_terms, n_max)
        log_e = [math.log(v) for v in e]
        # log e_n (scaled by x_1^n) = log e~_n - sum_{i<=n} gap_i
        log_scaled = [log_e[n] - math.fsum(gaps[:n]) for n in range(n_max + 1)]
        log_t = log_tail_bound(coef, alpha, beta, n_terms)
        need = math.inf
        for n in range(1, n_max + 1):
            for j in range(1, n + 1):
                budget = math.log(rel_tol / n) - (log_scaled[n - j] - log_scaled[n])
                need = min(need, budget / j)
        if log_t <= need:
            return log_scaled
        n_terms = max(terms_for_tail(coef, alpha, beta, need, max_terms), n_terms + 1)
    raise NumericalLossError("fermionic fallback did not converge", quantity="Z_N")


@functools.lru_cache(maxsize=65536)
def side_log_partitions(
    model: PotentialModel,
    side_length: float,
    n_max: int,
    stat: Statistics,
    beta: float,
    rel_tol: float = DEFAULT_REL_TOL,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> tuple[float, ...]:
    """(log Z_0, ..., log Z_{n_max}) for one side of the box.

    A zero-width side holds only the empty state: log Z_0 = 0 and
    log Z_n = -inf for n >= 1.
    """
    if model.is_well and side_length == 0:
        return (0.0,) + (-math.inf,) * n_max
    if n_max == 0:
        return (0.0,)
    ground = beta * model.coefficient(side_length)
    sums, tail, _ = scaled_power_sums(model, side_length, beta, n_max, rel_tol, max_terms)
    if stat is Statistics.DISTINGUISHABLE:
        lz = math.log(sums[0]) - ground
        return tuple(n * lz for n in range(n_max + 1))
    if stat is Statistics.BOSON:
        scaled = _recursion(sums, n_max, stat)
    else:
        try:
            scaled = _recursion(sums, n_max, stat, cancel_tol=CANCELLATION_TOL)
            # omitted levels shift e_n by at most sum_j e_{n-j} T^j
            for n in range(1, n_max + 1):
                err = sum(scaled[n - j] * tail**j for j in range(1, n + 1))
                if err > rel_tol * scaled[n]:
                    raise NumericalLossError("truncation not certified", quantity=f"Z_{n}")
            scaled = [_log(v) for v in scaled]
        except NumericalLossError:
            scaled = _fermion_levels(model, side_length, n_max, beta, rel_tol, max_terms)
        return tuple(v - n * ground for n, v in enumerate(scaled))
    return tuple(_log(v) - n * ground for n, v in enumerate(scaled))


def logsumexp(values) -> float:
    top = max(values)
    if top == -math.inf:
        return -math.inf
    return top + math.log(math.fsum(math.exp(v - top) for v in values))


@dataclass(frozen=True)
class SplitPartition:
    """Z_m(l) for m = 0..N particles on the left of a wall at l.

    Stored in log form; ``per_m`` and ``total`` exponentiate and may
    underflow at very low temperature.
    """

    log_per_m: tuple[float, ...]
    log_total: float
    f: tuple[float, ...]

    @property
    def per_m(self) -> list[float]:
        return [math.exp(v) for v in self.log_per_m]

    @property
    def total(self) -> float:
        return math.exp(self.log_total)

    @property
    def log_f(self) -> list[float]:
        return [v - self.log_total for v in self.log_per_m]


def _side_lengths(model, position):
    if model.is_well:
        if not 0 <= position <= 1:
            raise DomainError(f"wall position must lie in [0, 1], got {position}")
        return position, 1.0 - position
    if position != 0.5:
        raise UnsupportedOperationError("the power-law ladder supports only the symmetric split")
    return 1.0, 1.0


def log_split_terms(model, position, n_particles, stat, beta, rel_tol=DEFAULT_REL_TOL, counting=True):
    """log Z_m(l) for m = 0..N.

    With ``counting=False`` the binomial factor of distinguishable
    particles is left out (see ``multiplicities``).
    """
    stat = Statistics(stat)
    left_len, right_len = _side_lengths(model, position)
    left = side_log_partitions(model, left_len, n_particles, stat, beta, rel_tol)
    right = side_log_partitions(model, right_len, n_particles, stat, beta, rel_tol)
    out = []
    for m in range(n_particles + 1):
        v = left[m] + right[n_particles - m]
        if counting and stat is Statistics.DISTINGUISHABLE:
            v += math.log(math.comb(n_particles, m))
        out.append(v)
    return out


def multiplicities(n_particles, stat):
    """Ways to choose which particles sit on the left; 1 unless distinguishable."""
    if Statistics(stat) is Statistics.DISTINGUISHABLE:
        return [math.comb(n_particles, m) for m in range(n_particles + 1)]
    return [1] * (n_particles + 1)


def split_partition(
    model: PotentialModel,
    position: float,
    n_particles: int,
    stat: Statistics,
    beta: float,
    rel_tol: float = DEFAULT_REL_TOL,
) -> SplitPartition:
    if n_particles < 1:
        raise DomainError("need at least one particle")
    logs = log_split_terms(model, position, n_particles, stat, beta, rel_tol)
    bare = log_split_terms(model, position, n_particles, stat, beta, rel_tol, counting=False)
    f = normalised(bare, multiplicities(n_particles, stat))
    return SplitPartition(tuple(logs), logsumexp(logs), tuple(f))


def normalised(log_weights, counts=None) -> list[float]:
    """counts * exp(log_weights) / sum, without forming the log total."""
    top = max(log_weights)
    counts = counts or [1] * len(log_weights)
    w = [c * math.exp(v - top) for c, v in zip(counts, log_weights)]
    norm = math.fsum(w)
    return [v / norm for v in w]


def f0_closed_form(d: float, stat: Statistics) -> float:
    """Probability that both of two particles sit on the right, from d = z(b)^2/z(2b)."""
    stat = Statistics(stat)
    if not d >= 1:
        raise DomainError(f"d must be >= 1, got {d}")
    if math.isinf(d):
        return 0.25
    if stat is Statistics.BOSON:
        return (d + 1.0) / (4.0 * d + 2.0)
    if stat is Statistics.FERMION:
        return (d - 1.0) / (4.0 * d - 2.0)
    raise DomainError("closed form exists only for bosons and fermions")


def crossover_excess(model: PotentialModel, beta: float, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """d - 1 for d = z(beta)^2 / z(2 beta) on one half of the box.

    With z(k beta) scaled to 1 + excited part (s for k = 1, t for k = 2),
    d - 1 = (2s + s^2 - t) / (1 + t), which stays accurate long after d
    itself has rounded to 1.
    """
    side = 0.5 if model.is_well else 1.0
    _, _, n_terms = scaled_power_sums(model, side, beta, 1, rel_tol)
    s, t = _kernels.scaled_power_sums(model.coefficient(side), model.alpha, beta, n_terms, 2, 2)
    return (2.0 * s + (s * s - t)) / (1.0 + t)


def crossover_parameters(
    model: PotentialModel, beta: float, rel_tol: float = DEFAULT_REL_TOL
) -> tuple[float, float]:
    """(d, b) with d = z(beta)^2 / z(2 beta) on one half of the box, b = 1/d."""
    d = 1.0 + crossover_excess(model, beta, rel_tol)
    return d, 1.0 / d
