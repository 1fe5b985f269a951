"""Command-line front end: single cycles, temperature sweeps, figure data."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from qszilard.engine import (
    CycleResult,
    EngineConfig,
    classical_reference,
    perturbative_work,
    total_work,
)
from qszilard.ensemble import Statistics, crossover_parameters
from qszilard.errors import (
    CapacityError,
    ConfigError,
    DomainError,
    PerturbativeRangeWarning,
    QSzilardError,
    UnsupportedOperationError,
)
from qszilard.spectra import DEFAULT_REL_TOL, PotentialKind, PotentialModel

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_CAPACITY = 4

KNOWN_KEYS = {
    "potential.kind",
    "potential.alpha",
    "potential.epsilon",
    "n_particles",
    "statistics",
    "insertion_position",
    "tau",
    "tau_grid",
    "rel_tol",
    "position_tol",
    "outputs",
}


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".12g")


def _flatten(obj, prefix=""):
    flat = {}
    for key, value in obj.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict) and name == "potential":
            flat.update(_flatten(value, name + "."))
        else:
            flat[name] = value
    return flat


def load_config_file(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be an object")
    flat = _flatten(raw)
    unknown = sorted(set(flat) - KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"{path}: unknown key(s): {', '.join(unknown)}")
    return flat


def _require(flat, key, kind):
    if key not in flat:
        raise ConfigError(f"missing required key '{key}'")
    value = flat[key]
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"key '{key}' must be an integer, got {value!r}")
        return value
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"key '{key}' must be a number, got {value!r}")
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"key '{key}' must be a string, got {value!r}")
    return value


def _optional(flat, key, kind, default):
    return _require(flat, key, kind) if key in flat else default


def build_config(flat: dict, tau: float | None = None, rel_tol: float | None = None) -> EngineConfig:
    """EngineConfig from flattened keys; ``tau`` overrides the file's value."""
    kind_name = _optional(flat, "potential.kind", str, PotentialKind.INFINITE_WELL.value)
    try:
        kind = PotentialKind(kind_name)
    except ValueError:
        raise ConfigError(f"key 'potential.kind' must be InfiniteWell or PowerLawLadder, got {kind_name!r}")
    try:
        if kind is PotentialKind.INFINITE_WELL:
            model = PotentialModel.infinite_well()
        else:
            model = PotentialModel.ladder(
                _require(flat, "potential.alpha", float), _require(flat, "potential.epsilon", float)
            )
        stat_name = _require(flat, "statistics", str)
        try:
            stat = Statistics.parse(stat_name)
        except DomainError:
            raise ConfigError(
                f"key 'statistics' must be Boson, Fermion or Distinguishable, got {stat_name!r}"
            )
        if tau is None:
            tau = _require(flat, "tau", float)
        return EngineConfig(
            model=model,
            statistics=stat,
            n_particles=_require(flat, "n_particles", int),
            insertion_position=_require(flat, "insertion_position", float),
            tau=tau,
            rel_tol=rel_tol if rel_tol is not None else _optional(flat, "rel_tol", float, DEFAULT_REL_TOL),
            position_tol=_optional(flat, "position_tol", float, 1e-10),
        )
    except (DomainError, UnsupportedOperationError) as exc:
        raise ConfigError(str(exc)) from exc


def parse_tau_grid(flat) -> list[float]:
    if "tau_grid" not in flat:
        raise ConfigError("missing required key 'tau_grid'")
    grid = flat["tau_grid"]
    if isinstance(grid, dict):
        try:
            lo, hi, count = float(grid["min"]), float(grid["max"]), grid["count"]
        except (KeyError, TypeError, ValueError):
            raise ConfigError("key 'tau_grid' object needs numeric 'min', 'max' and integer 'count'")
        if not isinstance(count, int) or count < 2:
            raise ConfigError("key 'tau_grid.count' must be an integer >= 2")
        if not 0 < lo < hi:
            raise ConfigError("key 'tau_grid' needs 0 < min < max")
        taus = np.logspace(math.log10(lo), math.log10(hi), count).tolist()
    elif isinstance(grid, list):
        if len(grid) < 2 or not all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in grid):
            raise ConfigError("key 'tau_grid' must list at least two numbers")
        taus = [float(t) for t in grid]
    else:
        raise ConfigError("key 'tau_grid' must be a list or a {min, max, count} object")
    if any(t <= 0 for t in taus) or any(b <= a for a, b in zip(taus, taus[1:])):
        raise ConfigError("key 'tau_grid' must be positive and strictly increasing")
    return taus


def cycle_columns(n_particles: int) -> list[str]:
    idx = range(n_particles + 1)
    return (
        ["tau", "statistics", "n_particles", "l"]
        + [f"f_{m}" for m in idx]
        + [f"f*_{m}" for m in idx]
        + [f"l_eq_{m}" for m in idx]
        + ["w_ins", "w_exp", "w_rem", "w_tot", "w_classical"]
    )


def cycle_row(config: EngineConfig, result: CycleResult) -> dict:
    w_c = classical_reference(config.n_particles, config.insertion_position).w_tot
    row = {
        "tau": config.tau,
        "statistics": config.statistics.value,
        "n_particles": config.n_particles,
        "l": config.insertion_position,
    }
    for m in range(config.n_particles + 1):
        row[f"f_{m}"] = result.f[m]
        row[f"f*_{m}"] = result.f_star[m]
        row[f"l_eq_{m}"] = result.l_eq[m]
    row.update(w_ins=result.w_ins, w_exp=result.w_exp, w_rem=result.w_rem, w_tot=result.w_tot, w_classical=w_c)
    return row


def write_csv(rows, columns, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(row.get(c, "")) for c in columns])


def run_cycle(config_path, rel_tol=None) -> str:
    flat = load_config_file(config_path)
    config = build_config(flat, rel_tol=rel_tol)
    result = total_work(config)
    out = io.StringIO()
    write_csv([cycle_row(config, result)], cycle_columns(config.n_particles), out)
    return out.getvalue()


@dataclass
class SweepSpec:
    flat: dict
    taus: list[float]
    outputs: list[str] | None = None


def sweep_columns(n_particles):
    return cycle_columns(n_particles) + ["w_ratio", "error"]


def _sweep_point(flat, tau, rel_tol):
    config = build_config(flat, tau=tau, rel_tol=rel_tol)
    try:
        row = cycle_row(config, total_work(config))
        row["w_ratio"] = row["w_tot"] / row["w_classical"]
        row["error"] = ""
    except QSzilardError as exc:
        row = {
            "tau": tau,
            "statistics": config.statistics.value,
            "n_particles": config.n_particles,
            "l": config.insertion_position,
            "error": f"{type(exc).__name__}: {exc}".replace("\n", " "),
        }
    return row


def sweep_rows(spec: SweepSpec, rel_tol=None, threads=1) -> list[dict]:
    # validate once so config errors surface before any work
    build_config(spec.flat, tau=spec.taus[0], rel_tol=rel_tol)

    def point(tau):
        return _sweep_point(spec.flat, tau, rel_tol)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(point, spec.taus))
    return [point(t) for t in spec.taus]


def load_sweep(config_path) -> SweepSpec:
    flat = load_config_file(config_path)
    outputs = flat.get("outputs")
    if outputs is not None and (
        not isinstance(outputs, list) or not all(isinstance(c, str) for c in outputs)
    ):
        raise ConfigError("key 'outputs' must be a list of column names")
    return SweepSpec(flat, parse_tau_grid(flat), outputs)


def run_sweep(config_path, rel_tol=None, threads=1) -> tuple[str, bool]:
    """CSV text and whether every row succeeded."""
    spec = load_sweep(config_path)
    n = _require(spec.flat, "n_particles", int)
    columns = sweep_columns(n)
    if spec.outputs:
        bad = [c for c in spec.outputs if c not in columns]
        if bad:
            raise ConfigError(f"key 'outputs' names unknown column(s): {', '.join(bad)}")
        columns = list(spec.outputs)
    rows = sweep_rows(spec, rel_tol, threads)
    out = io.StringIO()
    write_csv(rows, columns, out)
    return out.getvalue(), all(not r["error"] for r in rows)


# --- reproduction targets -------------------------------------------------

TABLE1_LOW_TAU = 1e-2
TABLE1_HIGH_TAU = 1e4
FIG3_GRID = (0.1, 1e3, 40)
FIGS1_GRID = (1e-1, 1e6, 29)
FIGS1_FIT_MIN = 1e2
LADDER = PotentialModel.ladder(1.0, 10.0)


def _two_particle(stat, tau, model=None, rel_tol=None):
    return EngineConfig(
        model=model or PotentialModel.infinite_well(),
        statistics=stat,
        n_particles=2,
        insertion_position=0.5,
        tau=tau,
        rel_tol=rel_tol or DEFAULT_REL_TOL,
    )


def table1_rows(rel_tol=None):
    ln2 = math.log(2.0)
    analytic = {
        ("Boson", "low"): 2.0 / 3.0 * math.log(3.0),
        ("Fermion", "low"): 0.0,
        ("Boson", "high"): ln2,
        ("Fermion", "high"): ln2,
    }
    rows = []
    for limit, tau in (("low", TABLE1_LOW_TAU), ("high", TABLE1_HIGH_TAU)):
        for stat in (Statistics.BOSON, Statistics.FERMION):
            w = total_work(_two_particle(stat, tau, rel_tol=rel_tol)).w_tot
            a = analytic[(stat.value, limit)]
            dev = abs(w - a) / a if a else abs(w - a)
            rows.append(
                {"statistics": stat.value, "limit": limit, "tau": tau, "w_tot": w, "analytic": a, "deviation": dev}
            )
    return rows


def figs1_rows(rel_tol=None, threads=1):
    lo, hi, count = FIGS1_GRID
    taus = np.logspace(math.log10(lo), math.log10(hi), count).tolist()
    jobs = [
        (name, model, stat, tau)
        for name, model in (("InfiniteWell", PotentialModel.infinite_well()), ("PowerLawLadder(1,10)", LADDER))
        for stat in (Statistics.BOSON, Statistics.FERMION)
        for tau in taus
    ]

    def point(job):
        name, model, stat, tau = job
        config = _two_particle(stat, tau, model, rel_tol)
        w = total_work(config).w_tot
        w_c = math.log(2.0)
        _, b = crossover_parameters(model, config.beta, config.rel_tol)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", PerturbativeRangeWarning)
            w_pert = perturbative_work(config)
        return {
            "model": name,
            "statistics": stat.value,
            "tau": tau,
            "b": b,
            "w_tot": w,
            "w_classical": w_c,
            "w_ratio": w / w_c,
            "deviation": tau * (w - w_c),
            "w_perturbative": w_pert,
        }

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(point, jobs))
    else:
        rows = [point(j) for j in jobs]
    slopes = []
    for name in ("InfiniteWell", "PowerLawLadder(1,10)"):
        for stat in (Statistics.BOSON, Statistics.FERMION):
            pts = [r for r in rows if r["model"] == name and r["statistics"] == stat.value and r["tau"] >= FIGS1_FIT_MIN]
            x = np.log([r["tau"] for r in pts])
            y = np.log([abs(r["deviation"]) for r in pts])
            slope = float(np.polyfit(x, y, 1)[0])
            expected = 0.5 if name == "InfiniteWell" else 0.0
            slopes.append({"model": name, "statistics": stat.value, "slope": slope, "expected": expected})
    return rows, slopes


def reproduce(target, out_dir, rel_tol=None, threads=1) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    def dump(name, rows, columns):
        path = out_dir / name
        with open(path, "w", encoding="utf-8", newline="") as fh:
            write_csv(rows, columns, fh)
        written.append(path)

    if target == "table1":
        dump("table1.csv", table1_rows(rel_tol), ["statistics", "limit", "tau", "w_tot", "analytic", "deviation"])
    elif target == "fig3":
        lo, hi, count = FIG3_GRID
        for stat in Statistics:
            flat = {
                "statistics": stat.value,
                "n_particles": 2,
                "insertion_position": 0.5,
                "tau_grid": {"min": lo, "max": hi, "count": count},
            }
            spec = SweepSpec(flat, parse_tau_grid(flat))
            rows = sweep_rows(spec, rel_tol, threads)
            if any(r["error"] for r in rows):
                raise QSzilardError(f"fig3 sweep for {stat.value} had failing points")
            dump(f"fig3_{stat.value.lower()}.csv", rows, sweep_columns(2))
    elif target == "figS1":
        rows, slopes = figs1_rows(rel_tol, threads)
        dump(
            "figS1.csv",
            rows,
            ["model", "statistics", "tau", "b", "w_tot", "w_classical", "w_ratio", "deviation", "w_perturbative"],
        )
        dump("figS1_slopes.csv", slopes, ["model", "statistics", "slope", "expected"])
    else:
        raise ConfigError(f"unknown reproduction target {target!r}")
    return written


def _exit_code(exc) -> int:
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, CapacityError):
        return EXIT_CAPACITY
    return EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qszilard", description=__doc__)
    parser.add_argument("--rel-tol", type=float, default=None, help="relative tolerance of partition sums")
    parser.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
    sub = parser.add_subparsers(dest="command", required=True)

    p_cycle = sub.add_parser("cycle", help="run one engine cycle")
    p_cycle.add_argument("--config", required=True)

    p_sweep = sub.add_parser("sweep", help="run a temperature sweep")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--out", default=None)

    p_rep = sub.add_parser("reproduce", help="regenerate table/figure data")
    p_rep.add_argument("target", choices=["table1", "fig3", "figS1"])
    p_rep.add_argument("--out-dir", default=".")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "cycle":
            sys.stdout.write(run_cycle(args.config, args.rel_tol))
            return EXIT_OK
        if args.command == "sweep":
            text, ok = run_sweep(args.config, args.rel_tol, args.threads)
            if args.out:
                Path(args.out).write_text(text, encoding="utf-8")
            else:
                sys.stdout.write(text)
            return EXIT_OK if ok else EXIT_NUMERIC
        for path in reproduce(args.target, args.out_dir, args.rel_tol, args.threads):
            print(path)
        return EXIT_OK
    except QSzilardError as exc:
        name = getattr(exc, "quantity", "")
        detail = f" [{name}]" if name else ""
        print(f"qszilard: error{detail}: {exc}", file=sys.stderr)
        return _exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
