"""Acceptance checks.

Every check prints one ``PASS``/``FAIL`` line with the measured value and the
tolerance it was held to, then asserts. Run with ``-s`` to see the lines:

    pytest tests/test_acceptance.py -s
"""
import json
import math
import random
import warnings

import numpy as np
import pytest

from qszilard import (
    EngineConfig,
    PerturbativeRangeWarning,
    PotentialModel,
    Statistics,
    cli,
    crossover_parameters,
    deviation_scaling_fit,
    equilibrium_position,
    expansion_work,
    f0_closed_form,
    insertion_work,
    perturbative_work,
    split_partition,
    total_work,
)
from qszilard.engine import work_deviation
from qszilard.ensemble import spectrum_partition
from qszilard.oracle import TruncatedSpectrum, enumerate_partition

from .test_engine import mp_delta

LN2 = math.log(2.0)
WELL = PotentialModel.infinite_well()
LADDER = PotentialModel.ladder(1.0, 10.0)
B, F, D = Statistics.BOSON, Statistics.FERMION, Statistics.DISTINGUISHABLE


def report(label, ok, detail):
    print(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
    return ok


def pair(stat, tau, model=WELL):
    return EngineConfig(model=model, statistics=stat, n_particles=2, insertion_position=0.5, tau=tau)


# 1 ---------------------------------------------------------------------------

def test_c1_single_molecule():
    worst_tot = worst_stage = 0.0
    for tau in (0.05, 0.5, 5.0, 500.0):
        r = total_work(EngineConfig(tau=tau))
        delta = mp_delta(tau)
        worst_tot = max(worst_tot, abs(r.w_tot - LN2))
        worst_stage = max(
            worst_stage,
            abs(r.w_ins - (LN2 - delta)),
            abs(r.w_exp - delta),
            abs(r.w_rem),
        )
    ok = report("C1 single molecule w_tot = ln 2", worst_tot <= 1e-9, f"max err {worst_tot:.2e} (tol 1e-9)")
    ok &= report("C1 single molecule stage works", worst_stage <= 1e-9, f"max err {worst_stage:.2e} (tol 1e-9)")
    assert ok


# 2 ---------------------------------------------------------------------------

def test_c2_low_temperature_limits():
    wb = total_work(pair(B, 1e-2)).w_tot
    wf = total_work(pair(F, 1e-2)).w_tot
    eb, ef = abs(wb - 2 / 3 * math.log(3)), abs(wf)
    ok = report("C2 tau=1e-2 boson -> (2/3) ln 3", eb <= 1e-6, f"err {eb:.2e} (tol 1e-6)")
    ok &= report("C2 tau=1e-2 fermion -> 0", ef <= 1e-6, f"err {ef:.2e} (tol 1e-6)")
    assert ok


@pytest.mark.parametrize("stat", [B, F], ids=lambda s: s.value)
def test_c2_high_temperature_limit(stat):
    w = total_work(pair(stat, 1e4)).w_tot
    rel = (w - LN2) / LN2
    assert report(
        f"C2 tau=1e4 {stat.value.lower()} -> ln 2",
        abs(rel) <= 2e-3,
        f"relative deviation {rel:+.4%} (tol 0.2%)",
    )


# 3 ---------------------------------------------------------------------------

@pytest.mark.parametrize("stat", [B, F], ids=lambda s: s.value)
def test_c3_closed_form_f0(stat):
    worst = 0.0
    for tau in np.logspace(-2, 4, 61):
        d, _ = crossover_parameters(WELL, 1 / tau)
        f0 = split_partition(WELL, 0.5, 2, stat, 1 / tau).f[0]
        worst = max(worst, abs(f0 - f0_closed_form(d, stat)))
    assert report(f"C3 closed-form f0 {stat.value.lower()}", worst <= 1e-10, f"max err {worst:.2e} over 61 temperatures (tol 1e-10)")


# 4 ---------------------------------------------------------------------------

def test_c4_oracle_equivalence():
    rng = random.Random(4)
    worst = 0.0
    for _ in range(200):
        n_levels = rng.randint(4, 12)
        gaps = [rng.uniform(0.05, 3.0) for _ in range(n_levels)]
        levels = tuple(np.cumsum(gaps) + rng.uniform(-1.0, 1.0))
        spec = TruncatedSpectrum(levels)
        n = rng.randint(1, 4)
        stat = rng.choice(list(Statistics))
        beta = 10 ** rng.uniform(-2, 1)
        ref = enumerate_partition(spec, n, stat, beta)
        got = spectrum_partition(spec.levels, n, stat, beta)
        worst = max(worst, abs(got - ref) / ref)
    assert report("C4 recursion vs enumeration, 200 cases", worst <= 1e-8, f"max rel err {worst:.2e} (tol 1e-8)")


# 5 ---------------------------------------------------------------------------

def _identity_configs():
    for tau in (0.05, 0.5, 5.0, 500.0):
        yield EngineConfig(tau=tau)
    for stat in (B, F):
        for tau in (1e-2, 1e4):
            yield pair(stat, tau)
        for tau in np.logspace(-2, 4, 13):
            yield pair(stat, float(tau))
        for pos in (1 / 3, 0.5):
            for tau in (0.1, 1.0, 10.0):
                yield EngineConfig(statistics=stat, n_particles=3, insertion_position=pos, tau=tau)


def test_c5_cycle_identity():
    worst, count = 0.0, 0
    for config in _identity_configs():
        r = total_work(config)
        worst = max(worst, abs(r.w_ins + r.w_exp + r.w_rem - r.w_tot))
        count += 1
    assert report("C5 stage sum = relative entropy", worst <= 1e-10, f"max err {worst:.2e} over {count} configs (tol 1e-10)")


# 6 ---------------------------------------------------------------------------

GRID6 = np.logspace(-1, 3, 40)


def _f0_series(stat):
    return np.array([split_partition(WELL, 0.5, 2, stat, 1 / t).f[0] for t in GRID6])


def test_c6_boson_f0_strictly_decreasing():
    steps = np.diff(_f0_series(B))
    flat = int(np.sum(steps >= 0))
    assert report(
        "C6 boson f0 strictly decreasing",
        flat == 0,
        f"{flat} of {len(steps)} steps not strictly negative",
    )


def test_c6_fermion_f0_strictly_increasing():
    steps = np.diff(_f0_series(F))
    bad = int(np.sum(steps <= 0))
    assert report("C6 fermion f0 strictly increasing", bad == 0, f"{bad} of {len(steps)} steps not strictly positive")


def test_c6_orderings():
    fb, ff = _f0_series(B), _f0_series(F)
    f0_ok = bool(np.all(ff < 0.25) and np.all(fb > 0.25))
    wb = np.array([total_work(pair(B, t)).w_tot for t in GRID6])
    wf = np.array([total_work(pair(F, t)).w_tot for t in GRID6])
    w_ok = bool(np.all(wb > LN2) and np.all(LN2 > wf))
    ok = report("C6 fermion f0 < 1/4 < boson f0", f0_ok, f"min margin {min(np.min(fb) - 0.25, 0.25 - np.max(ff)):.2e}")
    ok &= report("C6 W(boson) > W_c > W(fermion)", w_ok, f"min margin {min(np.min(wb) - LN2, LN2 - np.max(wf)):.2e}")
    assert ok


# 7 ---------------------------------------------------------------------------

GRID7 = np.logspace(2, 6, 9)


@pytest.mark.parametrize("model, expected", [(WELL, 0.5), (LADDER, 0.0)], ids=["well", "ladder"])
@pytest.mark.parametrize("stat", [B, F], ids=lambda s: s.value)
def test_c7_deviation_slope(model, expected, stat):
    slope = deviation_scaling_fit(pair(stat, 1.0, model), GRID7)
    sign = np.sign(work_deviation(pair(stat, 1e4, model)))
    want = 1 if stat is B else -1
    name = "well" if model.is_well else "ladder"
    ok = report(f"C7 slope {name} {stat.value.lower()}", abs(slope - expected) <= 0.05, f"{slope:.4f} (want {expected} +- 0.05)")
    ok &= report(f"C7 sign {name} {stat.value.lower()}", sign == want, f"deviation sign {sign:+.0f}")
    assert ok


def test_c7_perturbative_accuracy():
    worst_ratio, count = 0.0, 0
    for model in (WELL, LADDER):
        for stat in (B, F):
            for tau in np.logspace(2, 6, 9):
                _, b = crossover_parameters(model, 1 / tau)
                if not b < 0.05:
                    continue
                config = pair(stat, float(tau), model)
                exact = total_work(config).w_tot
                with warnings.catch_warnings():
                    warnings.simplefilter("error", PerturbativeRangeWarning)
                    approx = perturbative_work(config)
                worst_ratio = max(worst_ratio, abs(approx - exact) / abs(exact) / (5 * b * b))
                count += 1
    assert report(
        "C7 perturbative vs exact within 5 b^2",
        count > 0 and worst_ratio <= 1.0,
        f"worst error / (5 b^2) = {worst_ratio:.3f} over {count} points",
    )


# 8 ---------------------------------------------------------------------------

def test_c8_simple_equilibria():
    one = equilibrium_position(EngineConfig(tau=1.0), 1)
    ok = report("C8 l_eq(N=1, m=1) = 1", one == 1.0, f"{one!r}")
    worst = max(abs(equilibrium_position(pair(s, t), 1) - 0.5) for s in Statistics for t in (0.1, 1.0, 1e4))
    ok &= report("C8 l_eq(N=2, m=1) = 1/2", worst <= 1e-10, f"max err {worst:.2e} (tol 1e-10)")
    assert ok


@pytest.mark.parametrize("stat", list(Statistics), ids=lambda s: s.value)
def test_c8_three_particle_classical_limit(stat):
    gap = equilibrium_position(EngineConfig(statistics=stat, n_particles=3, tau=1e4), 1) - 1 / 3
    assert report(f"C8 N=3 tau=1e4 {stat.value.lower()} near 1/3", abs(gap) <= 1e-3, f"l_eq - 1/3 = {gap:+.2e} (tol 1e-3)")


@pytest.mark.parametrize("stat", list(Statistics), ids=lambda s: s.value)
def test_c8_three_particle_quantum_shift(stat):
    gap = equilibrium_position(EngineConfig(statistics=stat, n_particles=3, tau=0.1), 1) - 1 / 3
    assert report(f"C8 N=3 tau=0.1 {stat.value.lower()} away from 1/3", abs(gap) > 1e-3, f"l_eq - 1/3 = {gap:+.2e} (need > 1e-3)")


# 9 ---------------------------------------------------------------------------

def test_c9_cli(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    cli.main(["reproduce", "fig3", "--out-dir", str(a)])
    cli.main(["reproduce", "fig3", "--out-dir", str(b)])
    names = sorted(p.name for p in a.iterdir())
    same = len(names) == 3 and all((a / n).read_bytes() == (b / n).read_bytes() for n in names)
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n_particles": 2, "insertion_position": 0.5, "tau": 1.0}))
    code = cli.main(["cycle", "--config", str(bad)])
    capsys.readouterr()
    ok = report("C9 fig3 byte-identical across runs", same, f"{len(names)} files compared")
    ok &= report("C9 malformed config exit code", code == 2, f"exit {code} (want 2)")
    assert ok
