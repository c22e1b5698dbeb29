"""Batch experiment runner.

Experiments are described by an INI file. Example::

    [grid]
    xmin = -2
    xmax = 2
    n = 128
    periodic = false

    [operator]
    name = hopf-lax
    hamiltonian = quadratic

    [initial]
    preset = quadratic-well

    [run]
    times = 0.1 0.5 1.0
    properties = MAX_ADDITIVITY PLUS_HOMOGENEITY
    seed = 0
    levels = 2

    [expect]
    PLUS_HOMOGENEITY = HOLDS

Every output file starts with a ``# config_sha256=... version=...`` line and
contains no timestamps, so identical inputs give byte-identical outputs.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .cl_solver import CFLError, burgers_flux, linear_flux, make_godunov
from .constructions import QuotientVerdict, quotient_equivalent
from .function_space import Grid, GridFunction, Norm
from .generator import GENERATOR_CSV_FIELDS, SchemeGenerator, dissipativity_probe, generator_estimate, generator_rows_to_csv
from .hj_solver import (
    Hamiltonian,
    MonotonicityBoundError,
    abs_hamiltonian,
    make_hopf_lax,
    make_lax_friedrichs,
    modulated_hamiltonian,
    quadratic_hamiltonian,
    table_hamiltonian,
)
from .hjb_solver import ControlProblem, double_integrator_problem, hamiltonian_eval, integrator_problem, make_hjb
from .semigroup import (
    Property,
    PropertyReport,
    SemigroupOperator,
    Verdict,
    check_contraction,
    check_isometry_l1,
    check_strong_continuity,
    defect_max_additivity,
    defect_monotonicity,
    defect_plus_homogeneity,
    defect_semigroup_law,
    make_translation,
    ordered_pairs,
    refinement_verdict,
    reports_to_csv,
    sample_functions,
    sample_pairs,
)
from .textio import format_grid_function, format_trajectory, format_vector, read_grid_function

EXPECTATIONS = ("HOLDS", "VIOLATED", "ANY")
CONVERGENCE_FIELDS = ("property", "operator", "t", "n", "dx", "defect", "study_verdict")


class ConfigError(ValueError):
    """Invalid experiment configuration; the message starts with the field path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


# -- initial data presets ------------------------------------------------------

# value and derivative, used by the generator subcommand as an oracle
PRESETS: dict[str, tuple[Callable, Callable]] = {
    "zero": (lambda x: 0.0 * x, lambda x: 0.0 * x),
    "quadratic-well": (lambda x: -0.5 * x * x, lambda x: -x),
    "neg-square": (lambda x: -x * x, lambda x: -2.0 * x),
    "sin": (np.sin, np.cos),
    "gaussian": (lambda x: np.exp(-x * x), lambda x: -2.0 * x * np.exp(-x * x)),
    "riemann-shock": (lambda x: np.where(x < 0, 1.0, 0.0), lambda x: 0.0 * x),
    "riemann-rarefaction": (lambda x: np.where(x < 0, 0.0, 1.0), lambda x: 0.0 * x),
}


@dataclass
class ExperimentConfig:
    grid: Grid
    operator: dict[str, str]
    initial: dict[str, str]
    times: list[float]
    properties: list[Property]
    expectations: dict[Property, str]
    seed: int = 0
    levels: int = 1
    samples: int = 20
    homogeneity_shift: float = 0.75
    norm: Norm | None = None
    t_seq: list[float] = field(default_factory=lambda: [0.04, 0.02, 0.01])
    richardson_order: int = 1
    alpha: float = 0.1
    step: float | None = None
    sha256: str = ""
    base_dir: Path = Path(".")

    def header(self) -> str:
        return f"config_sha256={self.sha256} version={__version__} seed={self.seed}"


def _float(section: configparser.SectionProxy, key: str, default=None) -> float:
    path = f"{section.name}.{key}"
    if key not in section:
        if default is None:
            raise ConfigError(path, "missing")
        return default
    try:
        return float(section[key])
    except ValueError:
        raise ConfigError(path, f"not a number: {section[key]!r}") from None


def _int(section: configparser.SectionProxy, key: str, default=None) -> int:
    path = f"{section.name}.{key}"
    if key not in section:
        if default is None:
            raise ConfigError(path, "missing")
        return default
    try:
        return int(section[key])
    except ValueError:
        raise ConfigError(path, f"not an integer: {section[key]!r}") from None


def _floats(section: configparser.SectionProxy, key: str, default=None) -> list[float]:
    path = f"{section.name}.{key}"
    if key not in section:
        if default is None:
            raise ConfigError(path, "missing")
        return list(default)
    try:
        return [float(tok) for tok in section[key].replace(",", " ").split()]
    except ValueError:
        raise ConfigError(path, f"not a list of numbers: {section[key]!r}") from None


def load_config(path: str | Path, seed: int | None = None, levels: int | None = None) -> ExperimentConfig:
    """Parse and validate; every referenced file must exist."""
    path = Path(path)
    raw = path.read_bytes()
    cp = configparser.ConfigParser()
    cp.optionxform = str  # keep property names upper case
    try:
        cp.read_string(raw.decode("utf-8"), source=str(path))
    except configparser.Error as exc:
        raise ConfigError(str(path), f"malformed config ({exc})") from None
    for name in ("grid", "operator", "run"):
        if not cp.has_section(name):
            raise ConfigError(name, "section missing")
    g = cp["grid"]
    try:
        periodic = g.getboolean("periodic", fallback=False)
    except ValueError:
        raise ConfigError("grid.periodic", f"not a boolean: {g['periodic']!r}") from None
    try:
        grid = Grid(_float(g, "xmin"), _float(g, "xmax"), _int(g, "n"), periodic)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("grid", str(exc)) from None

    run = cp["run"]
    times = _floats(run, "times", [1.0])
    if not times or any(t < 0 or not math.isfinite(t) for t in times):
        raise ConfigError("run.times", "need at least one finite nonnegative time")
    props = run.get("properties", "").replace(",", " ").split()
    if not props:
        raise ConfigError("run.properties", "empty property list")
    try:
        properties = [Property(p.upper()) for p in props]
    except ValueError as exc:
        raise ConfigError("run.properties", str(exc)) from None

    expectations = {p: "HOLDS" for p in properties}
    if cp.has_section("expect"):
        for key, val in cp["expect"].items():
            try:
                prop = Property(key.upper())
            except ValueError:
                raise ConfigError(f"expect.{key}", "unknown property") from None
            if val.upper() not in EXPECTATIONS:
                raise ConfigError(f"expect.{key}", f"expectation must be one of {', '.join(EXPECTATIONS)}")
            expectations[prop] = val.upper()

    norm = None
    if "norm" in run:
        try:
            norm = Norm(run["norm"].upper())
        except ValueError:
            raise ConfigError("run.norm", f"unknown norm {run['norm']!r}") from None

    initial = dict(cp["initial"]) if cp.has_section("initial") else {"preset": "zero"}
    cfg = ExperimentConfig(
        grid=grid,
        operator=dict(cp["operator"]),
        initial=initial,
        times=times,
        properties=properties,
        expectations=expectations,
        seed=seed if seed is not None else _int(run, "seed", 0),
        levels=levels if levels is not None else _int(run, "levels", 1),
        samples=_int(run, "samples", 20),
        homogeneity_shift=_float(run, "homogeneity_shift", 0.75),
        norm=norm,
        t_seq=_floats(run, "t_seq", [0.04, 0.02, 0.01]),
        richardson_order=_int(run, "richardson_order", 1),
        alpha=_float(run, "alpha", 0.1),
        step=_float(run, "step", math.nan),
        sha256=hashlib.sha256(raw).hexdigest(),
        base_dir=path.parent,
    )
    if cfg.step is not None and math.isnan(cfg.step):
        cfg.step = None
    if cfg.levels < 1:
        raise ConfigError("run.levels", "must be at least 1")
    if cfg.samples < 1:
        raise ConfigError("run.samples", "must be at least 1")
    _validate_references(cfg)
    return cfg


def _resolve(cfg: ExperimentConfig, rel: str) -> Path:
    p = Path(rel)
    return p if p.is_absolute() else cfg.base_dir / p


def _validate_references(cfg: ExperimentConfig) -> None:
    preset = cfg.initial.get("preset", "zero")
    if preset == "file":
        if "path" not in cfg.initial:
            raise ConfigError("initial.path", "missing for preset = file")
        if not _resolve(cfg, cfg.initial["path"]).is_file():
            raise ConfigError("initial.path", f"file not found: {cfg.initial['path']}")
    elif preset not in PRESETS:
        raise ConfigError("initial.preset", f"unknown preset {preset!r}; choose from {', '.join(sorted(PRESETS))} or file")
    for key in ("hamiltonian_table", "control_table"):
        if key in cfg.operator and not _resolve(cfg, cfg.operator[key]).is_file():
            raise ConfigError(f"operator.{key}", f"file not found: {cfg.operator[key]}")
    # building once on the base grid surfaces naming errors before any computation
    build_operator(cfg, cfg.grid)


# -- builders ----------------------------------------------------------------------


def _table(path: Path, columns: int, field_path: str) -> np.ndarray:
    try:
        data = np.loadtxt(path, comments="#", ndmin=2)
    except ValueError as exc:
        raise ConfigError(field_path, f"unreadable table ({exc})") from None
    if data.shape[1] != columns:
        raise ConfigError(field_path, f"expected {columns} columns, found {data.shape[1]}")
    return data


def build_hamiltonian(cfg: ExperimentConfig) -> Hamiltonian:
    op = cfg.operator
    name = op.get("hamiltonian", "quadratic")
    if name == "quadratic":
        return quadratic_hamiltonian(float(op.get("p_max", 10.0)), float(op.get("c", 1.0)))
    if name == "abs":
        return abs_hamiltonian(float(op.get("speed", 1.0)))
    if name == "modulated":
        return modulated_hamiltonian(float(op.get("amplitude", 0.5)))
    if name == "custom-table":
        if "hamiltonian_table" not in op:
            raise ConfigError("operator.hamiltonian_table", "missing for hamiltonian = custom-table")
        data = _table(_resolve(cfg, op["hamiltonian_table"]), 2, "operator.hamiltonian_table")
        return table_hamiltonian(data[:, 0], data[:, 1])
    raise ConfigError("operator.hamiltonian", f"unknown hamiltonian {name!r}")


def build_problem(cfg: ExperimentConfig, grid: Grid, phi: GridFunction) -> ControlProblem:
    op = cfg.operator
    name = op.get("problem", "integrator")
    u_max = float(op.get("u_max", 1.0))
    samples = int(op.get("controls", 33))
    horizon = float(op.get("horizon", max(cfg.times) if cfg.times else 1.0))
    horizon = max(horizon, 1e-12)
    if name == "integrator":
        return integrator_problem(grid, phi, u_max, samples, horizon)
    if name == "double-integrator":
        return double_integrator_problem(grid, phi, u_max, samples, horizon, float(op.get("friction", 1.0)))
    if name == "custom-table":
        if "control_table" not in op:
            raise ConfigError("operator.control_table", "missing for problem = custom-table")
        data = _table(_resolve(cfg, op["control_table"]), 3, "operator.control_table")
        u, vel, rew = data[:, 0], data[:, 1], data[:, 2]

        def column(values):
            return lambda x, uu: np.interp(uu, u, values) + 0.0 * x

        return ControlProblem(grid, u, column(vel), column(rew), phi, horizon, True, "custom-table")
    raise ConfigError("operator.problem", f"unknown problem {name!r}")


def build_operator(cfg: ExperimentConfig, grid: Grid) -> SemigroupOperator:
    op = cfg.operator
    name = op.get("name")
    if name is None:
        raise ConfigError("operator.name", "missing")
    if name == "hopf-lax":
        H = build_hamiltonian(cfg)
        if H.lagrangian is None:
            raise ConfigError("operator.hamiltonian", f"{H.name} is not convex; use lax-friedrichs")
        return make_hopf_lax(H.lagrangian)
    if name == "lax-friedrichs":
        return make_lax_friedrichs(build_hamiltonian(cfg), float(op.get("cfl", 0.5)))
    if name == "godunov":
        if not grid.periodic:
            raise ConfigError("grid.periodic", "the godunov operator needs a periodic grid")
        flux_name = op.get("flux", "burgers")
        if flux_name == "burgers":
            flux = burgers_flux()
        elif flux_name == "linear":
            flux = linear_flux(float(op.get("speed", 1.0)))
        else:
            raise ConfigError("operator.flux", f"unknown flux {flux_name!r}")
        lo, hi = (float(v) for v in op.get("u_range", "-3 3").split())
        return make_godunov(flux, (lo, hi), float(op.get("cfl", 0.9)))
    if name == "hjb":
        problem = build_problem(cfg, grid, GridFunction.theta(grid))
        dt = float(op["dt"]) if "dt" in op else None
        return make_hjb(problem, dt)
    if name == "translation":
        return make_translation(op.get("direction", "LEFT").upper())
    raise ConfigError("operator.name", f"unknown operator {name!r}")


def initial_data(cfg: ExperimentConfig, grid: Grid) -> GridFunction:
    preset = cfg.initial.get("preset", "zero")
    if preset == "file":
        f = read_grid_function(_resolve(cfg, cfg.initial["path"]))
        if f.grid != grid:
            raise ConfigError("initial.path", f"file grid {f.grid} differs from the configured grid")
        return f
    return GridFunction.from_callable(grid, PRESETS[preset][0])


def level_grids(cfg: ExperimentConfig) -> list[Grid]:
    grids = [cfg.grid]
    for _ in range(cfg.levels - 1):
        grids.append(grids[-1].refined(2))
    return grids


# -- property suite -------------------------------------------------------------------


def measure_property(
    prop: Property, T: SemigroupOperator, t: float, grid: Grid, cfg: ExperimentConfig
) -> PropertyReport:
    n, seed = cfg.samples, cfg.seed
    if prop is Property.MAX_ADDITIVITY:
        return defect_max_additivity(T, t, sample_pairs(grid, n, seed))
    if prop is Property.PLUS_HOMOGENEITY:
        return defect_plus_homogeneity(T, t, cfg.homogeneity_shift, sample_functions(grid, n, seed))
    if prop is Property.MONOTONICITY:
        return defect_monotonicity(T, t, ordered_pairs(grid, n, seed))
    if prop is Property.SEMIGROUP_LAW:
        return defect_semigroup_law(T, t / 2, t / 2, sample_functions(grid, n, seed))
    if prop is Property.STRONG_CONTINUITY:
        return check_strong_continuity(T, initial_data(cfg, grid), [t * 2.0**-k for k in range(5)])
    if prop is Property.CONTRACTION:
        return check_contraction(T, [t], sample_pairs(grid, n, seed), norm=cfg.norm)
    if prop is Property.ISOMETRY_L1:
        return check_isometry_l1(T, t, ordered_pairs(grid, n, seed))
    if prop is Property.DISSIPATIVITY:
        step = cfg.step if cfg.step is not None else 0.25 * grid.dx
        return dissipativity_probe(T, SchemeGenerator(T, step), cfg.alpha, sample_pairs(grid, n, seed))
    raise ValueError(f"unsupported property {prop}")


def expectation_met(expect: str, verdict: Verdict) -> bool:
    """Only a VIOLATED verdict can fail, and only against a non-VIOLATED expectation."""
    return not (verdict is Verdict.VIOLATED and expect == "HOLDS")


def _write(out: Path, name: str, text: str) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text, encoding="utf-8")


def _with_level(rep: PropertyReport, n: int, levels: int) -> PropertyReport:
    if levels > 1:
        rep.operator = f"{rep.operator}@n={n}"
    return rep


def run_check(cfg: ExperimentConfig, out: Path, times: Sequence[float] | None = None) -> int:
    times = cfg.times if times is None else times
    grids = level_grids(cfg)
    reports: list[PropertyReport] = []
    curves: dict[tuple[Property, float], list[PropertyReport]] = {}
    for grid in grids:
        T = build_operator(cfg, grid)
        for prop in cfg.properties:
            for t in times:
                rep = measure_property(prop, T, t, grid, cfg)
                curves.setdefault((prop, t), []).append(rep)
                reports.append(_with_level(rep, grid.n, len(grids)))
    _write(out, "properties.csv", reports_to_csv(reports, cfg.header()))
    _write(out, "convergence.csv", _convergence_csv(cfg, grids, curves))

    lines = [f"# {cfg.header()}", f"operator: {cfg.operator.get('name')}", f"levels: {[g.n for g in grids]}"]
    failed = 0
    for rep in reports:
        expect = cfg.expectations.get(Property(rep.property), "HOLDS")
        ok = expectation_met(expect, rep.verdict)
        failed += not ok
        lines.append(
            f"{'ok  ' if ok else 'FAIL'} {Property(rep.property).value} t={rep.t!r} op={rep.operator} "
            f"defect={rep.defect!r} verdict={Verdict(rep.verdict).value} expected={expect}"
        )
    lines.append(f"mismatches: {failed}")
    _write(out, "summary.txt", "\n".join(lines) + "\n")
    return 1 if failed else 0


def _convergence_csv(cfg: ExperimentConfig, grids: list[Grid], curves) -> str:
    rows = [f"# {cfg.header()}", ",".join(CONVERGENCE_FIELDS)]
    for (prop, t), reps in curves.items():
        defects = [r.defect for r in reps]
        finite = all(math.isfinite(d) for d in defects)
        if finite:
            verdict = refinement_verdict(defects, [g.dx for g in grids], max(r.scale for r in reps)).value
        else:
            verdict = Verdict.UNKNOWN.value
        if prop in (Property.CONTRACTION, Property.DISSIPATIVITY, Property.STRONG_CONTINUITY):
            # these carry their own absolute tolerance, not a dx-scaled budget
            verdict = reps[-1].verdict.value
        for g, r in zip(grids, reps):
            rows.append(f"{prop.value},{r.operator.split('@')[0]},{t!r},{g.n},{g.dx!r},{r.defect!r},{verdict}")
    return "\n".join(rows) + "\n"


# -- subcommands --------------------------------------------------------------------------


def cmd_evolve(cfg: ExperimentConfig, out: Path) -> int:
    T = build_operator(cfg, cfg.grid)
    h = initial_data(cfg, cfg.grid)
    traj = [(0.0, h)] + [(t, T.evolve(t, h)) for t in sorted(set(cfg.times)) if t > 0]
    _write(out, "trajectory.txt", f"# {cfg.header()}\n" + format_trajectory(traj))
    _write(out, "final.txt", format_grid_function(traj[-1][1]))
    lines = [f"# {cfg.header()}", f"operator: {T.label}"]
    for t, f in traj:
        vals = f.values[np.isfinite(f.values)]
        lo = repr(float(vals.min())) if vals.size else "-inf"
        hi = repr(float(vals.max())) if vals.size else "-inf"
        lines.append(f"t={t!r} min={lo} max={hi}")
    _write(out, "summary.txt", "\n".join(lines) + "\n")
    return 0


def _generator_oracle(cfg: ExperimentConfig, grid: Grid):
    preset = cfg.initial.get("preset", "zero")
    if preset not in PRESETS:
        return None
    deriv = PRESETS[preset][1](grid.x)
    name = cfg.operator.get("name")
    if name == "translation":
        return deriv if cfg.operator.get("direction", "LEFT").upper() == "LEFT" else -deriv
    if name in ("hopf-lax", "lax-friedrichs"):
        return np.asarray(build_hamiltonian(cfg).H(grid.x, deriv), dtype=float)
    if name == "hjb":
        problem = build_problem(cfg, grid, GridFunction.theta(grid))
        return hamiltonian_eval(problem, grid.x, deriv)
    return None


def cmd_generator(cfg: ExperimentConfig, out: Path) -> int:
    rows = []
    for grid in level_grids(cfg):
        T = build_operator(cfg, grid)
        f = initial_data(cfg, grid)
        est = generator_estimate(T, f, cfg.t_seq, cfg.richardson_order)
        oracle = _generator_oracle(cfg, grid)
        mask = est.domain_mask
        if oracle is None or not mask.any():
            err = math.nan
        else:
            err = float(np.max(np.abs(est.Af.values - oracle)[mask]))
        rows.append((f"{T.label}@n={grid.n}", cfg.initial.get("preset", "file"), est.t_used,
                     est.richardson_order, err, est.mask_fraction))
        _write(out, f"generator_n{grid.n}.txt", format_grid_function(est.Af))
    _write(out, "generator.csv", generator_rows_to_csv(rows, cfg.header()))
    lines = [f"# {cfg.header()}"] + [
        f"{r[0]} t_min={r[2]!r} order={r[3]} sup_error={r[4]!r} masked={r[5]!r}" for r in rows
    ]
    _write(out, "summary.txt", "\n".join(lines) + "\n")
    return 0


def cmd_resolvent(cfg: ExperimentConfig, out: Path) -> int:
    reports = []
    for grid in level_grids(cfg):
        T = build_operator(cfg, grid)
        step = cfg.step if cfg.step is not None else 0.25 * grid.dx
        rep = dissipativity_probe(T, SchemeGenerator(T, step), cfg.alpha, sample_pairs(grid, cfg.samples, cfg.seed))
        reports.append(_with_level(rep, grid.n, cfg.levels))
    _write(out, "properties.csv", reports_to_csv(reports, cfg.header()))
    expect = cfg.expectations.get(Property.DISSIPATIVITY, "HOLDS")
    failed = sum(not expectation_met(expect, r.verdict) for r in reports)
    lines = [f"# {cfg.header()}"] + [
        f"{r.operator} alpha={r.t!r} {r.details} verdict={Verdict(r.verdict).value} expected={expect}"
        for r in reports
    ]
    _write(out, "summary.txt", "\n".join(lines + [f"mismatches: {failed}"]) + "\n")
    return 1 if failed else 0


QUOTIENT_INSTANCES = (
    ("reflexive", [0.0, -1.0], [0.0, -1.0], [[0.0, 0.0]], QuotientVerdict.EQUIVALENT),
    ("theta-span", [0.0, -1.0], [-1.0, 0.0], [[0.0, 0.0]], QuotientVerdict.EQUIVALENT),
    ("frozen-coordinate", [-math.inf, 0.0], [-math.inf, 1.0], [[0.0, -math.inf]], QuotientVerdict.NOT_EQUIVALENT),
)


def cmd_quotient_demo(out: Path, header: str) -> int:
    rows = [f"# {header}", "instance,f1,f2,D,verdict,expected,iterations,g1,g2"]
    failed = 0
    for name, f1, f2, D, expected in QUOTIENT_INSTANCES:
        res = quotient_equivalent(f1, f2, D)
        failed += res.verdict is not expected
        g1 = format_vector(res.g1) if res.g1 is not None else ""
        g2 = format_vector(res.g2) if res.g2 is not None else ""
        gens = ";".join(format_vector(d) for d in D)
        rows.append(
            f"{name},{format_vector(f1)},{format_vector(f2)},{gens},{res.verdict.value},{expected.value},"
            f"{res.iterations},{g1},{g2}"
        )
    _write(out, "quotient.csv", "\n".join(rows) + "\n")
    _write(out, "summary.txt", f"# {header}\nquotient instances: {len(QUOTIENT_INSTANCES)} mismatches: {failed}\n")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="maxplus-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("evolve", "evolve the initial data and dump the trajectory"),
        ("check", "run the property suite"),
        ("generator", "estimate the generator on the initial data"),
        ("resolvent", "probe dissipativity through the discrete resolvent"),
        ("quotient-demo", "decide the built-in quotient instances"),
        ("convergence", "refinement study of the configured properties"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=name != "quotient-demo", help="experiment INI file")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override run.seed")
        p.add_argument("--levels", type=int, default=None, help="override run.levels")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out = Path(args.out)
    try:
        if args.command == "quotient-demo":
            seed = args.seed if args.seed is not None else 0
            return cmd_quotient_demo(out, f"config_sha256=none version={__version__} seed={seed}")
        cfg = load_config(args.config, args.seed, args.levels)
        if args.command == "evolve":
            return cmd_evolve(cfg, out)
        if args.command == "check":
            return run_check(cfg, out)
        if args.command == "convergence":
            if cfg.levels < 2:
                cfg.levels = 3
            return run_check(cfg, out)
        if args.command == "generator":
            return cmd_generator(cfg, out)
        if args.command == "resolvent":
            return cmd_resolvent(cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (CFLError, MonotonicityBoundError, ValueError) as exc:
        print(f"solver error in {args.command}: {exc}", file=sys.stderr)
        return 3
    return 2


if __name__ == "__main__":
    sys.exit(main())
