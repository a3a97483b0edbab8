"""Command line front end: ``casimir-polder sweep | crossover | validate | plot``.

Exit statuses: 0 success, 2 configuration or parse error, 3 material
validation error, 4 convergence failure (partial output is still written).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .constants import BOLTZMANN, DEFAULT_TEMPERATURE, ZEPTOJOULE
from .energy import NONRETARDED, RETARDED, Tolerances, find_crossover, sweep, with_quad
from .errors import (
    CasimirPolderError,
    InvariantViolationError,
    MaterialParseError,
    SweepError,
)
from .kernel import HalfSpacePair
from .materials import check_invariants, evaluate, load_material, read_json, shipped_path
from .polarizability import atom_effective_permittivity, load_atom
from .spectrum import MatsubaraSpectrum

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MATERIAL = 3
EXIT_CONVERGENCE = 4

UNITS = ("J", "kT", "zJ")
CSV_HEADER = "z_m,F_{unit},regime,material,atom,N_max,converged"
VALIDATE_ORDERS = (0, 1, 10, 100)


class ConfigError(Exception):
    """Invalid command line configuration (exit status 2)."""


@dataclass
class RunConfig:
    atoms: list[str]
    solvent: str
    oils: list[str]
    temperature: float = DEFAULT_TEMPERATURE
    regime: str = "both"
    z_min: float = 1e-9  # m
    z_max: float = 300e-9  # m
    points: int = 64
    sum_rel_tol: float = 1e-8
    quad_rel_tol: float = 1e-9
    out: str | None = None
    units: str = "J"
    workers: int = 1
    figure: str | None = None
    regimes: tuple[str, ...] = field(init=False)

    def __post_init__(self):
        if not self.temperature > 0:
            raise ConfigError("--temp-kelvin must be > 0")
        if not 0 < self.z_min < self.z_max:
            raise ConfigError("need 0 < --zmin-nm < --zmax-nm")
        if self.points < 2:
            raise ConfigError("--points must be >= 2")
        if not (self.sum_rel_tol > 0 and self.quad_rel_tol > 0):
            raise ConfigError("tolerances must be > 0")
        if self.workers < 1:
            raise ConfigError("--workers must be >= 1")
        self.regimes = (RETARDED, NONRETARDED) if self.regime == "both" else (self.regime,)

    @property
    def z_grid(self) -> np.ndarray:
        return np.geomspace(self.z_min, self.z_max, self.points)

    @property
    def tolerances(self) -> Tolerances:
        return with_quad(Tolerances(sum_rel_tol=self.sum_rel_tol), rel_tol=self.quad_rel_tol)


def resolve(path_or_name: str, kind: str) -> Path:
    """A readable file path, or the name of a bundled file of ``kind``."""
    path = Path(path_or_name)
    if path.is_file():
        return path
    bundled = shipped_path(f"{kind}/{path_or_name}.json")
    if bundled.is_file():
        return bundled
    raise ConfigError(f"cannot read {kind[:-1]} file {path_or_name!r}")


def energy_scale(units: str, T: float) -> float:
    """Joules per output unit."""
    return {"J": 1.0, "kT": BOLTZMANN * T, "zJ": ZEPTOJOULE}[units]


def fmt(x: float) -> str:
    return f"{x:.17g}"


def _load_inputs(cfg: RunConfig):
    try:
        atoms = [load_atom(resolve(a, "atoms")) for a in cfg.atoms]
        solvent = load_material(resolve(cfg.solvent, "materials"))
        oils = [load_material(resolve(o, "materials")) for o in cfg.oils]
    except MaterialParseError as exc:
        raise ConfigError(str(exc)) from exc
    return atoms, solvent, oils


def run_sweep(cfg: RunConfig):
    """All requested curves as ``[(atom, medium, EnergyCurve)]`` plus the failures."""
    atoms, solvent, oils = _load_inputs(cfg)
    tols = cfg.tolerances
    results, failed = [], []
    for atom in atoms:
        for oil in oils:
            pair = HalfSpacePair(solvent, oil)
            for regime in cfg.regimes:
                try:
                    curve = sweep(regime, cfg.z_grid, atom, pair, cfg.temperature, tols, workers=cfg.workers)
                except SweepError as exc:
                    curve = exc.curve
                    failed.append(f"{atom.name}/{oil.name}/{regime}: {exc}")
                results.append((atom, oil, curve))
    return results, failed


def sweep_csv(results, units: str, T: float) -> str:
    scale = energy_scale(units, T)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    buf.write(CSV_HEADER.format(unit=units) + "\n")
    for atom, oil, curve in results:
        for s in curve.samples:
            writer.writerow(
                [fmt(s.z), fmt(s.energy / scale), curve.regime, oil.name, atom.name, s.n_max,
                 "true" if s.converged else "false"]
            )
    return buf.getvalue()


def read_sweep_csv(source) -> list[dict]:
    """Parse a sweep CSV (path or text) back into typed rows."""
    text = Path(source).read_text() if not str(source).startswith("z_m,") else str(source)
    reader = csv.DictReader(io.StringIO(text))
    unit_col = next(c for c in reader.fieldnames if c.startswith("F_"))
    rows = []
    for r in reader:
        rows.append({
            "z": float(r["z_m"]),
            "F": float(r[unit_col]),
            "unit": unit_col[2:],
            "regime": r["regime"],
            "material": r["material"],
            "atom": r["atom"],
            "n_max": int(r["N_max"]),
            "converged": r["converged"] == "true",
        })
    return rows


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cmd_sweep(cfg: RunConfig) -> int:
    results, failed = run_sweep(cfg)
    text = sweep_csv(results, cfg.units, cfg.temperature)
    _emit(text, cfg.out)
    if cfg.figure:
        from .plotting import plot_energy_curves

        plot_energy_curves(read_sweep_csv(text), cfg.figure)
    for msg in failed:
        print(f"convergence failure: {msg}", file=sys.stderr)
    return EXIT_CONVERGENCE if failed else EXIT_OK


def cmd_crossover(cfg: RunConfig) -> int:
    atoms, solvent, oils = _load_inputs(cfg)
    tols = cfg.tolerances
    report, scans, status = [], [], EXIT_OK
    for atom in atoms:
        for oil in oils:
            entry = {"atom": atom.name, "medium": oil.name}
            try:
                rep = find_crossover(
                    atom, HalfSpacePair(solvent, oil), cfg.temperature, cfg.z_min, cfg.z_max, tols,
                    points=cfg.points, workers=cfg.workers,
                )
            except CasimirPolderError as exc:
                entry.update(sign_pattern=None, roots_m=[], brackets=[], error=f"{exc.code}: {exc}")
                status = EXIT_CONVERGENCE
                print(f"convergence failure: {atom.name}/{oil.name}: {exc}", file=sys.stderr)
            else:
                entry.update(
                    sign_pattern=rep.sign_pattern,
                    roots_m=rep.roots,
                    brackets=[list(b) for b in rep.brackets],
                    residuals_J=rep.residuals,
                    residual_bounds_J=rep.tolerances,
                )
                scans.append((entry, rep.scan))
            report.append(entry)
    _emit(json.dumps(report, indent=2) + "\n", cfg.out)
    if cfg.figure and status == EXIT_OK:
        from .plotting import plot_crossover

        plot_crossover(scans, cfg.temperature, cfg.figure)
    return status


def _validate_one(path: Path, T: float) -> list[str]:
    doc = read_json(path)
    xi = MatsubaraSpectrum(T).frequencies(np.array(VALIDATE_ORDERS))
    if "radius_m" in doc:
        atom = load_atom(doc)
        model = None
        values = atom_effective_permittivity(atom, xi)
        label = f"atom {atom.name} (R = {atom.radius:.6g} m): eps_a"
    else:
        model = load_material(doc)
        check_invariants(model)
        values = evaluate(model, xi)
        label = f"material {model.name}: eps"
    lines = [f"{path}: OK", f"  {label}"]
    for n, x, v in zip(VALIDATE_ORDERS, xi, np.atleast_1d(values)):
        lines.append(f"    n={n:<4d} xi={x:.6e} rad/s  {v:.10g}")
    return lines, model


def _resolve_any(p: str) -> Path:
    try:
        return resolve(p, "materials")
    except ConfigError:
        return resolve(p, "atoms")


def cmd_validate(paths, T: float, figure: str | None = None) -> int:
    models = []
    for p in paths:
        try:
            lines, model = _validate_one(_resolve_any(p), T)
        except MaterialParseError as exc:
            print(f"{p}: PARSE_ERROR: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except InvariantViolationError as exc:
            print(f"{p}: INVARIANT_VIOLATION {exc.invariant}: {exc}", file=sys.stderr)
            return EXIT_MATERIAL
        except CasimirPolderError as exc:
            print(f"{p}: {exc.code}: {exc}", file=sys.stderr)
            return EXIT_MATERIAL
        print("\n".join(lines))
        if model is not None:
            models.append(model)
    if figure and models:
        from .materials import PROBE_GRID
        from .plotting import plot_spectra

        plot_spectra(models, PROBE_GRID, figure)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="casimir-polder",
        description="Casimir-Polder free energy of a dissolved atom near a solvent/oil interface.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def run_options(p, points):
        p.add_argument("--atom", action="append", required=True,
                       help="atom file or bundled atom name (repeatable)")
        p.add_argument("--solvent", default="water", help="solvent file or bundled material name")
        p.add_argument("--oil", action="append", required=True,
                       help="medium file or bundled material name (repeatable)")
        p.add_argument("--temp-kelvin", type=float, default=DEFAULT_TEMPERATURE)
        p.add_argument("--zmin-nm", type=float, default=1.0)
        p.add_argument("--zmax-nm", type=float, default=300.0)
        p.add_argument("--points", type=int, default=points, help="log-spaced separations")
        p.add_argument("--sum-rtol", type=float, default=1e-8)
        p.add_argument("--quad-rtol", type=float, default=1e-9)
        p.add_argument("--workers", type=int, default=1, help="threads over separations")
        p.add_argument("--out", help="output file (default stdout)")
        p.add_argument("--figure", help="also render a figure to this file (needs matplotlib)")

    p = sub.add_parser("sweep", help="energy curves as CSV")
    run_options(p, 64)
    p.add_argument("--regime", choices=("retarded", "nonretarded", "both"), default="both")
    p.add_argument("--units", choices=UNITS, default="J")

    p = sub.add_parser("crossover", help="sign changes of the retarded energy as JSON")
    run_options(p, 128)

    p = sub.add_parser("validate", help="check material and atom files")
    p.add_argument("paths", nargs="+", help="files or bundled names")
    p.add_argument("--temp-kelvin", type=float, default=DEFAULT_TEMPERATURE)
    p.add_argument("--figure", help="render the material spectra to this file (needs matplotlib)")

    p = sub.add_parser("plot", help="render a sweep CSV to an image")
    p.add_argument("csv")
    p.add_argument("--out", required=True)
    return parser


def config_from_args(args) -> RunConfig:
    return RunConfig(
        atoms=args.atom,
        solvent=args.solvent,
        oils=args.oil,
        temperature=args.temp_kelvin,
        regime=getattr(args, "regime", RETARDED),
        z_min=args.zmin_nm / 1e9,
        z_max=args.zmax_nm / 1e9,
        points=args.points,
        sum_rel_tol=args.sum_rtol,
        quad_rel_tol=args.quad_rtol,
        out=args.out,
        units=getattr(args, "units", "J"),
        workers=args.workers,
        figure=args.figure,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            if not math.isfinite(args.temp_kelvin) or args.temp_kelvin <= 0:
                raise ConfigError("--temp-kelvin must be > 0")
            return cmd_validate(args.paths, args.temp_kelvin, args.figure)
        if args.command == "plot":
            from .plotting import plot_energy_curves

            plot_energy_curves(read_sweep_csv(resolve_csv(args.csv)), args.out)
            return EXIT_OK
        cfg = config_from_args(args)
        return cmd_sweep(cfg) if args.command == "sweep" else cmd_crossover(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ImportError as exc:
        print(f"figure output needs matplotlib: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CasimirPolderError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return EXIT_MATERIAL


def resolve_csv(path: str) -> Path:
    if not Path(path).is_file():
        raise ConfigError(f"cannot read {path!r}")
    return Path(path)


if __name__ == "__main__":
    sys.exit(main())
