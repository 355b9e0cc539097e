"""Config-driven experiment harness.

An experiment is described by a small TOML file: one operator family
swept over degrees against a fixed reference operator, evaluated on
named corpus functions, with a randomized axiom suite on the side.
Outputs are CSV files plus a plain-text manifest; with fixed seeds the
CSVs are byte-identical across reruns.
"""

from __future__ import annotations

import csv
import hashlib
import math
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import __version__
from .axioms import DEFAULT_AXIOM_TOL, check_axiom, verify_lipschitz_bound
from .bounds import (
    DEFAULT_GRID_POINTS,
    ConvergenceTable,
    convergence_sweep,
)
from .function_space import corpus_names
from .operators import (
    ALL_FLAGS,
    FAMILIES,
    M,
    SL,
    build_operator,
    build_warp,
    grid_divisor,
    registry_grid,
)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "RunManifest",
    "load_config",
    "run",
    "emit_plot_data",
    "list_registry",
    "OUTPUT_DIR_ENV",
]

OUTPUT_DIR_ENV = "KOROVKIN_OUTPUT_DIR"

_FLAG_NOTES = {
    "SL": "subadditive and positively homogeneous",
    "TR": "T(f + a) = T(f) + a T(1) for a >= 0",
    "TR_STAR": "T(f + a) = T(f) + a T(1) for every real a",
    "CA": "additive on comonotone pairs",
    "M": "order preserving",
    "UNITAL": "T(1) = 1",
    "LINEAR": "additive and homogeneous for all real scalars",
}


class ConfigError(ValueError):
    """Experiment config rejected; message names the offending field."""


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    operator: dict
    reference: dict
    n_values: tuple
    grid_points: int
    grid_mode: str  # "per_n" or "shared"
    shared_m: int | None
    functions: tuple
    axiom_trials: int
    axiom_seed: int
    axiom_min_trials: int
    axiom_grid_points: int
    tol_bound: float | None
    tol_axiom: float
    output_dir: str


def _require(table: dict, section: str, allowed: set) -> None:
    extra = set(table) - allowed
    if extra:
        raise ConfigError(f"[{section}]: unknown keys {sorted(extra)}")


def _operator_record(table: dict, section: str, need_family: bool = True) -> dict:
    _require(table, section, {"family", "phi", "n", "scale"})
    family = table.get("family")
    if need_family and family not in FAMILIES:
        raise ConfigError(
            f"[{section}].family: unknown family {family!r}; known: {', '.join(FAMILIES)}"
        )
    rec = {"family": family, "phi": table.get("phi", "identity")}
    if "n" in table:
        rec["n"] = int(table["n"])
    if "scale" in table:
        rec["scale"] = float(table["scale"])
    return rec


def validate_config(doc: dict, default_name: str = "experiment") -> ExperimentConfig:
    """Check every key of a parsed config document; unknown keys are errors."""
    _require(
        doc, "top level",
        {"name", "operator", "reference", "grid", "functions", "axioms", "tolerances", "output"},
    )
    if "operator" not in doc:
        raise ConfigError("missing [operator] section")
    op_table = dict(doc["operator"])
    n_values = op_table.pop("n_values", None)
    if not n_values or not isinstance(n_values, list):
        raise ConfigError("[operator].n_values: need a nonempty list of degrees")
    try:
        ns = tuple(int(n) for n in n_values)
    except (TypeError, ValueError):
        raise ConfigError(f"[operator].n_values: not integers: {n_values!r}") from None
    if any(n < 1 for n in ns) or list(ns) != sorted(set(ns)):
        raise ConfigError("[operator].n_values: must be strictly increasing and >= 1")
    operator = _operator_record(op_table, "operator")

    reference = _operator_record(dict(doc.get("reference", {"family": "composition"})), "reference")
    if FAMILIES[reference["family"]]["needs_n"] and "n" not in reference:
        raise ConfigError(f"[reference]: family {reference['family']!r} needs a fixed n")

    grid = dict(doc.get("grid", {}))
    _require(grid, "grid", {"points", "mode", "m"})
    grid_points = int(grid.get("points", DEFAULT_GRID_POINTS))
    if grid_points < 2:
        raise ConfigError("[grid].points: need at least 2")
    mode = grid.get("mode", "per_n")
    if mode not in ("per_n", "shared"):
        raise ConfigError(f"[grid].mode: expected 'per_n' or 'shared', got {mode!r}")
    shared_m = int(grid["m"]) if "m" in grid else None
    if mode == "shared":
        if shared_m is None:
            raise ConfigError("[grid]: shared mode needs an explicit m")
        _check_shared_grid(shared_m, operator, reference, ns)
    elif shared_m is not None:
        raise ConfigError("[grid].m: only meaningful in shared mode")

    fn_table = dict(doc.get("functions", {}))
    _require(fn_table, "functions", {"names"})
    names = tuple(fn_table.get("names", ("abs_center",)))
    unknown = [f for f in names if f not in corpus_names()]
    if not names or unknown:
        raise ConfigError(
            f"[functions].names: unknown functions {unknown}; known: {', '.join(corpus_names())}"
        )

    ax = dict(doc.get("axioms", {}))
    _require(ax, "axioms", {"trials", "seed", "min_trials", "grid_points"})
    trials = int(ax.get("trials", 200))
    min_trials = int(ax.get("min_trials", 100))
    if trials < 1 or min_trials < 1:
        raise ConfigError("[axioms]: trials and min_trials must be >= 1")
    axiom_grid = int(ax.get("grid_points", 1025))

    tols = dict(doc.get("tolerances", {}))
    _require(tols, "tolerances", {"bound", "axiom"})

    out = dict(doc.get("output", {}))
    _require(out, "output", {"directory"})

    return ExperimentConfig(
        name=str(doc.get("name", default_name)),
        operator=operator,
        reference=reference,
        n_values=ns,
        grid_points=grid_points,
        grid_mode=mode,
        shared_m=shared_m,
        functions=names,
        axiom_trials=trials,
        axiom_seed=int(ax.get("seed", 0)),
        axiom_min_trials=min_trials,
        axiom_grid_points=axiom_grid,
        tol_bound=float(tols["bound"]) if "bound" in tols else None,
        tol_axiom=float(tols.get("axiom", DEFAULT_AXIOM_TOL)),
        output_dir=str(out.get("directory", f"runs/{doc.get('name', default_name)}")),
    )


def _check_shared_grid(m: int, operator: dict, reference: dict, ns: tuple) -> None:
    """Shared grids must carry the nodes of every swept degree exactly."""
    if m < 2:
        raise ConfigError("[grid].m: need at least 2 points")
    for n in ns:
        t_n = n if FAMILIES[operator["family"]]["needs_n"] else None
        a_n = reference.get("n") if FAMILIES[reference["family"]]["needs_n"] else None
        div = math.lcm(
            grid_divisor(operator["family"], t_n), grid_divisor(reference["family"], a_n)
        )
        if (m - 1) % div != 0:
            raise ConfigError(
                f"[grid].m: m - 1 = {m - 1} is not divisible by {div}, so the grid "
                f"misses nodes of {operator['family']} at n = {n}; "
                f"use m - 1 a multiple of lcm of all per-degree divisors"
            )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid TOML: {exc}") from None
    return validate_config(doc, default_name=path.stem)


@dataclass
class RunManifest:
    name: str
    version: str
    output_dir: str
    config_echo: tuple
    checksums: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    bound_failures: int = 0
    axiom_failures: int = 0

    def save(self, path) -> None:
        lines = [
            "korovkin run manifest",
            f"name: {self.name}",
            f"version: {self.version}",
            f"output_dir: {self.output_dir}",
            "",
            "[config]",
            *self.config_echo,
            "",
            "[files]",
            *(f"{name} sha256={digest}" for name, digest in sorted(self.checksums.items())),
            "",
            "[timings]",
            *(f"{phase}: {secs:.3f} s" for phase, secs in self.timings.items()),
            "",
            f"bound_failures: {self.bound_failures}",
            f"axiom_failures: {self.axiom_failures}",
        ]
        Path(path).write_text("\n".join(lines) + "\n")


def _echo(config: ExperimentConfig) -> tuple:
    pairs = []
    for key, value in sorted(vars(config).items()):
        pairs.append(f"{key} = {value!r}")
    return tuple(pairs)


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _axiom_suite_rows(config: ExperimentConfig):
    """Check every claimed flag (plus the Lipschitz estimate where it
    applies) for each swept operator, on a dedicated small grid."""
    rows = []
    failures = 0
    a_rec = config.reference
    for n in config.n_values:
        t_n = n if FAMILIES[config.operator["family"]]["needs_n"] else None
        a_n = a_rec.get("n") if FAMILIES[a_rec["family"]]["needs_n"] else None
        div = math.lcm(
            grid_divisor(config.operator["family"], t_n), grid_divisor(a_rec["family"], a_n)
        )
        grid = registry_grid(div, config.axiom_grid_points)
        phi = build_warp(config.operator["phi"], grid, snap_to=grid)
        T = build_operator(
            config.operator["family"], t_n, phi, grid, grid,
            scale=config.operator.get("scale", 1.0),
        )
        flags = [fl for fl in ALL_FLAGS if fl in T.claims]
        for flag in flags:
            rep = check_axiom(
                T, flag,
                trials=config.axiom_trials,
                seed=config.axiom_seed,
                tol=config.tol_axiom,
                min_trials=config.axiom_min_trials,
            )
            rows.append(rep)
            failures += rep.verdict == "fail"
        if {SL, M} <= set(T.claims):
            rep = verify_lipschitz_bound(
                T,
                trials=config.axiom_trials,
                seed=config.axiom_seed,
                tol=config.tol_axiom,
                min_trials=config.axiom_min_trials,
            )
            rows.append(rep)
            failures += rep.verdict == "fail"
    return rows, failures


def run(config: ExperimentConfig, output_dir: str | None = None) -> RunManifest:
    """Execute an experiment; returns the manifest after writing all files.

    Output directory priority: KOROVKIN_OUTPUT_DIR environment variable,
    then the output_dir argument, then the config's own setting.
    """
    outdir = Path(os.environ.get(OUTPUT_DIR_ENV) or output_dir or config.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(
        name=config.name,
        version=__version__,
        output_dir=str(outdir),
        config_echo=_echo(config),
    )

    t0 = time.perf_counter()
    rows, axiom_failures = _axiom_suite_rows(config)
    manifest.axiom_failures = axiom_failures
    axioms_path = outdir / "axioms.csv"
    with open(axioms_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["operator", "axiom", "verdict", "trials", "worst_violation", "seed"])
        for rep in rows:
            writer.writerow(
                [rep.operator, rep.axiom, rep.verdict, rep.trials,
                 repr(float(rep.worst_violation)), rep.seed]
            )
    manifest.timings["axioms"] = time.perf_counter() - t0

    grid_points = config.shared_m if config.grid_mode == "shared" else config.grid_points
    t0 = time.perf_counter()
    for fname in config.functions:
        table = convergence_sweep(
            config.operator,
            config.reference,
            fname,
            config.n_values,
            grid_points=grid_points,
            strict=True,
            tol=config.tol_bound,
        )
        table.to_csv(outdir / f"convergence_{fname}.csv")
        emit_plot_data(table, outdir / f"plot_{fname}.csv")
    manifest.timings["sweeps"] = time.perf_counter() - t0

    for p in sorted(outdir.glob("*.csv")):
        manifest.checksums[p.name] = _sha256(p)
    manifest.timings["total"] = sum(manifest.timings.values())
    manifest.save(outdir / "manifest.txt")
    return manifest


def emit_plot_data(table: ConvergenceTable, path) -> Path:
    """Long-format series for log-log plotting: one row per (series, n).

    The loggable column marks strictly positive values; zeros are kept as
    explicit rows with loggable=False rather than dropped or log-mangled.
    """
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["series", "n", "value", "loggable"])
        for series, pick in (("lhs", "lhs"), ("rhs", "rhs"), ("mu", "mu")):
            for rep in table.reports:
                value = float(getattr(rep, pick))
                writer.writerow([series, rep.n, repr(value), str(value > 0.0)])
    return path


def list_registry(stream=None) -> None:
    """Print operator families, corpus functions, and axiom flags."""
    out = stream or sys.stdout
    print("operator families:", file=out)
    for name, info in FAMILIES.items():
        degree = "n >= 1" if info["needs_n"] else "no degree"
        print(f"  {name:24s} ({degree}) {info['description']}", file=out)
    print("\ncorpus functions (1-D on [0, 1]):", file=out)
    for name in corpus_names():
        print(f"  {name}", file=out)
    print("\naxiom flags:", file=out)
    for flag in ALL_FLAGS:
        print(f"  {flag:9s} {_FLAG_NOTES[flag]}", file=out)
