"""The four-stage Szilard cycle: insertion, measurement, expansion, removal.

All works are returned in units of k_B T.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from qszilard import _kernels
from qszilard.ensemble import (
    Statistics,
    crossover_parameters,
    log_split_terms,
    logsumexp,
    multiplicities,
    normalised,
    side_log_partitions,
)
from qszilard.errors import (
    DomainError,
    FitDomainError,
    InternalConsistencyError,
    PerturbativeRangeWarning,
    UnsupportedOperationError,
)
from qszilard.spectra import (
    DEFAULT_REL_TOL,
    PotentialModel,
    eigenenergy_length_derivative,
    terms_for_tail,
)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
SCAN_POINTS = 64
IDENTITY_TOL = 1e-10


@dataclass(frozen=True)
class EngineConfig:
    model: PotentialModel = field(default_factory=PotentialModel.infinite_well)
    statistics: Statistics = Statistics.BOSON
    n_particles: int = 1
    insertion_position: float = 0.5
    tau: float = 1.0
    rel_tol: float = DEFAULT_REL_TOL
    position_tol: float = 1e-10

    def __post_init__(self):
        object.__setattr__(self, "statistics", Statistics(self.statistics))
        if self.n_particles < 1:
            raise DomainError(f"n_particles must be >= 1, got {self.n_particles}")
        if not 0 < self.insertion_position < 1:
            raise DomainError(f"insertion position must lie in (0, 1), got {self.insertion_position}")
        if not (self.tau > 0 and math.isfinite(self.tau)):
            raise DomainError(f"tau must be positive and finite, got {self.tau}")
        if not self.model.is_well and (self.n_particles != 2 or self.insertion_position != 0.5):
            raise UnsupportedOperationError(
                "the power-law ladder is defined only for two particles and a central wall"
            )

    @property
    def beta(self) -> float:
        return 1.0 / self.tau

    def with_tau(self, tau: float) -> EngineConfig:
        return replace(self, tau=tau)


@dataclass(frozen=True)
class CycleResult:
    """Per-m distributions, wall positions and stage works of one cycle.

    Stage works are NaN for the power-law ladder, whose unsplit box is
    not defined; ``w_tot`` is then available only from the relative
    entropy form.
    """

    f: tuple[float, ...]
    f_star: tuple[float, ...]
    l_eq: tuple[float, ...]
    w_ins: float
    w_exp: float
    w_rem: float
    w_tot: float

    @property
    def n_particles(self) -> int:
        return len(self.f) - 1


def _log_zm(config, m, position):
    return log_split_terms(
        config.model, position, config.n_particles, config.statistics, config.beta, config.rel_tol
    )[m]


def _log_z_total(config, position):
    return logsumexp(
        log_split_terms(
            config.model, position, config.n_particles, config.statistics, config.beta, config.rel_tol
        )
    )


def _log_z_box(config):
    if not config.model.is_well:
        raise UnsupportedOperationError("the power-law ladder has no unsplit box")
    return side_log_partitions(
        config.model, 1.0, config.n_particles, config.statistics, config.beta, config.rel_tol
    )[config.n_particles]


def insertion_work(config: EngineConfig) -> float:
    return _log_z_total(config, config.insertion_position) - _log_z_box(config)


def _golden_max(func, lo, hi, tol):
    a, b = lo, hi
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, f2 = func(x1), func(x2)
    while b - a > tol:
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1 = func(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2 = func(x2)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def equilibrium_position(config: EngineConfig, m: int) -> float:
    """Wall position that maximises ln Z_m(l), i.e. where the forces balance.

    A coarse scan brackets the maximum before golden-section refinement.
    The insertion point itself is kept unless another position is better
    by more than rounding, so a wall that is already balanced stays put.
    """
    if not config.model.is_well:
        raise UnsupportedOperationError("the power-law ladder has no movable wall")
    n = config.n_particles
    if not 0 <= m <= n:
        raise DomainError(f"m must lie in [0, {n}], got {m}")
    if m == 0:
        return 0.0
    if m == n:
        return 1.0

    def objective(pos):
        return _log_zm(config, m, pos)

    grid = np.linspace(0.0, 1.0, SCAN_POINTS + 2)[1:-1]
    values = [objective(p) for p in grid]
    i = int(np.argmax(values))
    lo = grid[i - 1] if i > 0 else 0.0
    hi = grid[i + 1] if i < len(grid) - 1 else 1.0
    best, best_val = _golden_max(objective, lo, hi, config.position_tol)
    if values[i] > best_val:
        best, best_val = grid[i], values[i]
    l0 = config.insertion_position
    v0 = objective(l0)
    if best_val - v0 <= 4 * np.finfo(float).eps * max(1.0, abs(v0)):
        return l0
    return float(best)


def _equilibria(config):
    if config.model.is_well:
        return [equilibrium_position(config, m) for m in range(config.n_particles + 1)]
    # symmetric two-particle ladder: one particle per side feels no net force
    return [0.0, 0.5, 1.0]


def expansion_work(config: EngineConfig, l_eq) -> float:
    split = log_split_terms(
        config.model, config.insertion_position, config.n_particles, config.statistics,
        config.beta, config.rel_tol,
    )
    total = logsumexp(split)
    terms = []
    for m, pos in enumerate(l_eq):
        fm = math.exp(split[m] - total)
        if fm == 0.0:
            continue
        terms.append(fm * (_log_zm(config, m, pos) - split[m]))
    return math.fsum(terms)


def removal_work(config: EngineConfig, l_eq) -> float:
    split = log_split_terms(
        config.model, config.insertion_position, config.n_particles, config.statistics,
        config.beta, config.rel_tol,
    )
    total = logsumexp(split)
    log_box = _log_z_box(config)
    terms = []
    for m, pos in enumerate(l_eq):
        fm = math.exp(split[m] - total)
        if fm == 0.0:
            continue
        terms.append(fm * (log_box - _log_z_total(config, pos)))
    return math.fsum(terms)


def relative_entropy_work(f, log_f, log_f_star) -> float:
    """-sum_m f_m ln(f_m / f*_m), with f_m = 0 terms dropped."""
    return 0.0 - math.fsum(fm * (lf - lfs) for fm, lf, lfs in zip(f, log_f, log_f_star) if fm > 0)


def total_work(config: EngineConfig) -> CycleResult:
    """Run the full cycle.

    The total is evaluated as a relative entropy and, for the infinite
    well, checked against the sum of the three stage works.
    """
    n = config.n_particles
    split = log_split_terms(
        config.model, config.insertion_position, n, config.statistics, config.beta, config.rel_tol
    )
    total = logsumexp(split)
    log_f = [v - total for v in split]
    bare = log_split_terms(
        config.model, config.insertion_position, n, config.statistics, config.beta,
        config.rel_tol, counting=False,
    )
    f = normalised(bare, multiplicities(n, config.statistics))
    l_eq = _equilibria(config)

    log_f_star = []
    for m, pos in enumerate(l_eq):
        if m in (0, n):
            log_f_star.append(0.0)
        elif pos == config.insertion_position:
            log_f_star.append(log_f[m])
        else:
            terms = log_split_terms(
                config.model, pos, n, config.statistics, config.beta, config.rel_tol
            )
            log_f_star.append(terms[m] - logsumexp(terms))
    f_star = [
        f[m] if 0 < m < n and pos == config.insertion_position else math.exp(v)
        for m, (pos, v) in enumerate(zip(l_eq, log_f_star))
    ]
    w_tot = relative_entropy_work(f, log_f, log_f_star)

    if config.model.is_well:
        w_ins = insertion_work(config)
        w_exp = expansion_work(config, l_eq)
        w_rem = removal_work(config, l_eq)
        stage_sum = w_ins + w_exp + w_rem
        if abs(stage_sum - w_tot) > IDENTITY_TOL * max(1.0, abs(w_ins), abs(w_exp)):
            raise InternalConsistencyError(
                f"stage works sum to {stage_sum!r} but the relative entropy gives {w_tot!r}"
            )
    else:
        w_ins = w_exp = w_rem = math.nan
    return CycleResult(tuple(f), tuple(f_star), tuple(l_eq), w_ins, w_exp, w_rem, w_tot)


def classical_reference(n_particles: int, position: float, tau: float = 1.0) -> CycleResult:
    """Classical ideal-gas engine; tau only sets the unit of work.

    Configurational probabilities are binomial and the wall settles at
    l_eq = m / N. Insertion and removal cost nothing.
    """
    if n_particles < 1:
        raise DomainError("need at least one particle")
    if not 0 < position < 1:
        raise DomainError(f"position must lie in (0, 1), got {position}")
    n = n_particles
    log_f = [
        math.log(math.comb(n, m)) + math.log(position) * m + math.log1p(-position) * (n - m)
        for m in range(n + 1)
    ]
    log_f_star = []
    for m in range(n + 1):
        r = m / n
        v = math.log(math.comb(n, m))
        if 0 < m:
            v += m * math.log(r)
        if m < n:
            v += (n - m) * math.log1p(-r)
        log_f_star.append(v)
    f = [math.exp(v) for v in log_f]
    w = relative_entropy_work(f, log_f, log_f_star)
    return CycleResult(
        tuple(f),
        tuple(math.exp(v) for v in log_f_star),
        tuple(m / n for m in range(n + 1)),
        0.0,
        w,
        0.0,
        w,
    )


def perturbative_work(config: EngineConfig) -> float:
    """High-temperature expansion ln 2 +- (b/4) ln(4/e) for two particles."""
    if config.n_particles != 2 or config.insertion_position != 0.5:
        raise DomainError("expansion holds for two particles and a central wall")
    if config.statistics is Statistics.DISTINGUISHABLE:
        raise DomainError("expansion needs quantum statistics")
    _, b = crossover_parameters(config.model, config.beta, config.rel_tol)
    if b > 0.1:
        warnings.warn(f"b = {b:.3g} is not small; expansion untrustworthy", PerturbativeRangeWarning)
    sign = 1.0 if config.statistics is Statistics.BOSON else -1.0
    return math.log(2.0) + sign * (b / 4.0) * (math.log(4.0) - 1.0)


def work_deviation(config: EngineConfig) -> float:
    """W_tot - W_c in absolute energy units (E_1(L))."""
    w = total_work(config).w_tot
    wc = classical_reference(config.n_particles, config.insertion_position).w_tot
    return config.tau * (w - wc)


def deviation_scaling_fit(config: EngineConfig, tau_grid) -> float:
    """Least-squares slope of ln|W_tot - W_c| against ln tau.

    ``config.tau`` is ignored; every grid point replaces it.
    """
    taus = np.asarray(sorted(tau_grid), dtype=float)
    if len(taus) < 3:
        raise FitDomainError("need at least three temperatures")
    dev = np.abs([work_deviation(config.with_tau(t)) for t in taus])
    steps = np.diff(dev)
    if not (np.all(steps > 0) or np.all(steps < 0) or np.all(steps == 0)):
        raise FitDomainError("|W_tot - W_c| is not monotone on the grid")
    if np.any(dev == 0):
        raise FitDomainError("zero deviation; nothing to fit")
    slope, _ = np.polyfit(np.log(taus), np.log(dev), 1)
    return float(slope)


def _side_force(model, side_length, n_particles, stat, beta, rel_tol):
    """sum_j <n_j> dE_j/dl on one side, in E_1(L)/L units."""
    if n_particles == 0 or side_length == 0:
        return 0.0
    log_z = side_log_partitions(model, side_length, n_particles, stat, beta, rel_tol)
    coef = model.coefficient(side_length)
    n_terms = max(terms_for_tail(coef, model.alpha, beta, math.log(rel_tol), 10**7), n_particles)
    energies = coef * np.arange(1, n_terms + 1, dtype=float) ** 2
    # <n_j> = sum_k (+-1)^(k-1) exp(-k beta E_j) Z_{N-k} / Z_N
    if stat is Statistics.DISTINGUISHABLE:
        orders = [(1, 1.0, math.log(n_particles) + (n_particles - 1) * log_z[1])]
    else:
        sign = -1.0 if stat is Statistics.FERMION else 1.0
        orders = [(k, sign ** (k - 1), log_z[n_particles - k]) for k in range(1, n_particles + 1)]
    occ = np.zeros(n_terms)
    for k, sgn, log_rest in orders:
        occ += sgn * np.exp(log_rest - log_z[n_particles] - k * beta * energies)
    derivs = np.array(
        [eigenenergy_length_derivative(model, side_length, j) for j in range(1, n_terms + 1)]
    )
    return math.fsum(occ * derivs)


def generalized_force(config: EngineConfig, m: int, position: float) -> float:
    """Net force on a wall at ``position`` with m particles on its left.

    Sum over both sides of <n_j> dE_j/dl; zero at the equilibrium
    position. Equals -tau * d ln Z_m / dl.
    """
    if not config.model.is_well:
        raise UnsupportedOperationError("the power-law ladder has no movable wall")
    if not 0 < position < 1:
        raise DomainError("position must be interior")
    args = (config.statistics, config.beta, config.rel_tol)
    left = _side_force(config.model, position, m, *args)
    # the right side shrinks as the wall moves right
    right = -_side_force(config.model, 1.0 - position, config.n_particles - m, *args)
    return left + right


def backend() -> str:
    return _kernels.BACKEND
