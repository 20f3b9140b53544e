"""SpecWin CLI - Command Line Interface for the spectral laboratory.

This module provides the Typer application that reads a run configuration,
dispatches to the numerical modules and writes JSON, CSV and SVG artifacts
into the output directory.

Commands:
    classify: Classify the automorphism
    predict: Predicted spectrum, with an optional SVG plot
    verify: Run the verification battery for the configured triple
    truncate: Eigenvalues, matrix dump and norm-power radius of a truncation
    pseudospec: sigma_min field on a grid in the lambda plane
    witness: Approximate eigenvectors of the adjoint and their residuals
    ergodic: Running Birkhoff averages and the sup of cocycle roots
    radius: Spectral radius bound
    version: Display version information

Example:
    Basic CLI usage:

    $ specwin classify --config golden.json
    $ specwin predict --config golden.json --svg
    $ specwin pseudospec --config golden.json --N 128 --grid 101x101 --out results
    $ specwin verify --config golden.json --seed 7
"""

from __future__ import annotations

import cmath
import math
import os
import sys
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import typer
from rich.console import Console
from rich.panel import Panel
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn, TimeElapsedColumn
from rich.table import Table

from . import __version__
from .core import report as rep
from .core.config import ConfigManager
from .core.mobius import classify as classify_map, rotation, rotation_number
from .core.oracle import backward_orbit_guarantee, predict_spectrum, spectral_radius_bound
from .core.symbol import delta_psi, ergodic_trace, outer_modulus_at, sup_cocycle_root, zero_report
from .core.truncation import build_truncation, eigenvalues, norm_power_radius, pseudospectrum_grid
from .core.verify import VerificationBattery
from .core.witness import (
    WitnessRun,
    admissible_base_points,
    normalize_elliptic,
    ray_base_points,
    witness_backward_orbit,
    witness_elliptic_boundary,
    witness_inner_zero,
    witness_level_circle,
    witness_rational_rotation,
)
from .settings import METADATA, TRUNCATION
from .types import (
    InvalidParameter,
    MapKind,
    RunConfig,
    SpecWinError,
    SpectrumShape,
    Verdict,
    VerificationFailure,
    WitnessKind,
)
from .utils.log import configure_logging
from .utils.validation import complex_to_pair, pair_to_complex, parse_grid

# Initialize CLI application
app = typer.Typer(
    name="specwin",
    help="🔭 SpecWin - Spectra of weighted composition operators",
    add_completion=True,
    rich_markup_mode="rich",
    context_settings={"help_option_names": ["-h", "--help"]},
)

# In test environments, disable terminal formatting to ensure consistent output
console = Console(
    force_terminal=not bool(os.getenv("CI") or os.getenv("PYTEST_CURRENT_TEST")), width=120, legacy_windows=False
)

config_manager = ConfigManager()

COMPRESSION_CAVEAT = (
    "Eigenvalues of compressions of non-normal operators can pollute or omit spectrum; "
    "treat truncation output as evidence and the witnesses as the authority."
)


# ---------------------------------------------------------------------------
# Shared options and plumbing
# ---------------------------------------------------------------------------


def _config_option() -> Path:
    return typer.Option(..., "--config", "-c", help="Run configuration (JSON or YAML)", exists=False)


def _out_option() -> Path | None:
    return typer.Option(None, "--out", "-o", help="Output directory (overrides out_dir)")


def _n_option() -> int | None:
    return typer.Option(None, "--N", help="Truncation size (overrides truncation.N)")


def _grid_option() -> str | None:
    return typer.Option(None, "--grid", help="Pseudospectrum grid as WxH (overrides grid.width/height)")


def _seed_option() -> int | None:
    return typer.Option(None, "--seed", help="Seed for randomized scans (overrides seed)")


def _svg_option() -> bool:
    return typer.Option(False, "--svg", help="Also write an SVG plot")


@contextmanager
def _errors(action: str) -> Iterator[None]:
    """Report domain errors and exit with their mapped code."""
    try:
        yield
    except SpecWinError as e:
        console.print(f"❌ [bold red]{action} failed:[/bold red] {e}")
        sys.exit(e.exit_code)


def _load(
    config: Path,
    *,
    out: Path | None = None,
    N: int | None = None,
    grid: str | None = None,
    seed: int | None = None,
) -> RunConfig:
    cfg = config_manager.load(config)
    size = None
    if grid is not None:
        try:
            size = parse_grid(grid)
        except ValueError as e:
            raise InvalidParameter(str(e)) from e
    if any(v is not None for v in (out, N, size, seed)):
        cfg = config_manager.with_overrides(cfg, N=N, grid=size, seed=seed, out_dir=out)
    return cfg


def _progress() -> Progress:
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TimeElapsedColumn(),
        console=console,
        transient=True,
    )


def _wrote(*paths: Path) -> None:
    for path in paths:
        console.print(f"📄 [dim]wrote[/dim] {path}")


@app.callback()
def _main(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log numerical selections and diagnostics"),
) -> None:
    """🔭 SpecWin - Spectra of weighted composition operators."""
    configure_logging(verbose)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


@app.command()
def version() -> None:
    """Display version information."""
    table = Table(show_header=False, box=None, padding=(0, 1))
    table.add_column("Label", style="bold blue")
    table.add_column("Value", style="green")
    table.add_row("SpecWin", f"v{__version__}")
    table.add_row("Description", METADATA.description)
    table.add_row("numpy", np.__version__)
    console.print(Panel(table, title="🔭 SpecWin Version Information", border_style="blue", padding=(1, 2)))


@app.command()
def classify(config: Path = _config_option(), out: Path | None = _out_option()) -> None:
    """Classify the automorphism and print the classification as JSON."""
    with _errors("Classification"):
        cfg = _load(config, out=out)
        info = classify_map(config_manager.build_map(cfg), **config_manager.rational_cutoff(cfg))
        report = rep.classification_report(info)
        path = rep.write_json(cfg.out_dir / "classification.json", report)
        console.print_json(rep.to_json(report))
        _wrote(path)


@app.command()
def predict(
    config: Path = _config_option(),
    out: Path | None = _out_option(),
    svg: bool = _svg_option(),
) -> None:
    """Predict the spectrum; sampled closures also get a CSV point list."""
    with _errors("Prediction"):
        cfg = _load(config, out=out)
        spectrum = predict_spectrum(
            config_manager.build_symbol(cfg),
            config_manager.build_map(cfg),
            config_manager.build_space(cfg),
            config_manager.build_sampling(cfg),
            **config_manager.rational_cutoff(cfg),
        )
        paths = [rep.write_json(cfg.out_dir / "spectrum.json", rep.spectrum_report(spectrum))]
        console.print_json(rep.to_json(rep.spectrum_report(spectrum, include_points=False)))
        if spectrum.shape == SpectrumShape.SAMPLED_CLOSURE and spectrum.points is not None:
            paths.append(rep.write_points_csv(cfg.out_dir / "spectrum_points.csv", spectrum.points))
            console.print(f"[dim]{spectrum.points.size} sample points, n0 = {spectrum.n0}[/dim]")
        if svg:
            paths.append(rep.write_svg(cfg.out_dir / "spectrum.svg", rep.render_svg(spectrum, title=spectrum.provenance.rule)))
        _wrote(*paths)


@app.command()
def radius(config: Path = _config_option(), out: Path | None = _out_option()) -> None:
    """Upper bound for the spectral radius."""
    with _errors("Radius bound"):
        cfg = _load(config, out=out)
        bound = spectral_radius_bound(
            config_manager.build_symbol(cfg),
            config_manager.build_map(cfg),
            config_manager.build_space(cfg),
            **config_manager.rational_cutoff(cfg),
        )
        report = rep.radius_report(bound)
        path = rep.write_json(cfg.out_dir / "radius.json", report)
        console.print_json(rep.to_json(report))
        _wrote(path)


@app.command()
def truncate(
    config: Path = _config_option(),
    out: Path | None = _out_option(),
    N: int | None = _n_option(),
) -> None:
    """Eigenvalues, a JSON matrix dump and the norm-power radius sequence of the truncation."""
    with _errors("Truncation"):
        cfg = _load(config, out=out, N=N)
        with _progress() as progress:
            progress.add_task(f"Building the {cfg.truncation.N}x{cfg.truncation.N} truncation", total=None)
            t = build_truncation(
                config_manager.build_symbol(cfg),
                config_manager.build_map(cfg),
                config_manager.build_space(cfg),
                cfg.truncation.N,
                radius=cfg.truncation.radius,
            )
            values = eigenvalues(t)
            sequence = norm_power_radius(t, min(cfg.truncation.n_max, TRUNCATION.max_norm_powers))

        summary = {
            "N": t.dimension,
            "radius": t.radius,
            "samples": t.samples,
            "change": t.change,
            "stable": t.stable,
            "eigenvalues": [complex_to_pair(v) for v in values],
            "caveat": COMPRESSION_CAVEAT,
        }
        matrix = {"N": t.dimension, "entries": [[complex_to_pair(v) for v in row] for row in t.entries]}
        out_dir = cfg.out_dir
        paths = [
            rep.write_plain_json(out_dir / "eigenvalues.json", summary),
            rep.write_plain_json(out_dir / "matrix.json", matrix),
            rep.write_radius_csv(out_dir / "norm_radius.csv", sequence),
        ]

        table = Table(title="Truncation", show_header=False, box=None, padding=(0, 1))
        table.add_column("Label", style="bold blue")
        table.add_column("Value", style="green")
        table.add_row("N", str(t.dimension))
        table.add_row("Sampling", "exact polynomial columns" if t.radius == 0 else f"rho={t.radius:.4f}, M={t.samples}")
        table.add_row("Extraction change", f"{t.change:.3e}" + ("" if t.stable else "  ⚠️ not certified"))
        table.add_row("Largest |eigenvalue|", f"{abs(values[0]):.10g}" if values.size else "-")
        table.add_row(f"||A^n||^(1/n), n={len(sequence)}", f"{sequence[-1]:.10g}")
        console.print(table)
        console.print(f"[dim]{COMPRESSION_CAVEAT}[/dim]")
        _wrote(*paths)


@app.command()
def pseudospec(
    config: Path = _config_option(),
    out: Path | None = _out_option(),
    N: int | None = _n_option(),
    grid: str | None = _grid_option(),
    svg: bool = _svg_option(),
) -> None:
    """sigma_min(A - lambda) on a grid around the predicted spectrum, as CSV re,im,sigma_min."""
    with _errors("Pseudospectrum"):
        cfg = _load(config, out=out, N=N, grid=grid)
        s, m, sp = config_manager.build_symbol(cfg), config_manager.build_map(cfg), config_manager.build_space(cfg)
        spectrum = predict_spectrum(s, m, sp, config_manager.build_sampling(cfg), **config_manager.rational_cutoff(cfg))
        grid_spec = config_manager.build_grid(cfg, spectrum.outer_radius)
        with _progress() as progress:
            task = progress.add_task(f"Building the {cfg.truncation.N}x{cfg.truncation.N} truncation", total=None)
            t = build_truncation(s, m, sp, cfg.truncation.N, radius=cfg.truncation.radius)
            total = grid_spec.width * grid_spec.height
            progress.update(task, description=f"sigma_min on {grid_spec.width}x{grid_spec.height}", total=total)
            field = pseudospectrum_grid(t, grid_spec, on_chunk=lambda done: progress.advance(task, done))

        paths = [rep.write_field_csv(cfg.out_dir / "pseudospectrum.csv", field)]
        if svg:
            drawing = rep.render_svg(spectrum, field, level=cfg.grid.contour_level, title=f"N = {t.dimension}")
            paths.append(rep.write_svg(cfg.out_dir / "pseudospectrum.svg", drawing))
        low = float(np.min(field.values))
        console.print(f"min sigma_min = {low:.3e} over {field.values.size} grid points")
        console.print(f"[dim]{COMPRESSION_CAVEAT}[/dim]")
        _wrote(*paths)


def run_witness(cfg: RunConfig) -> WitnessRun:
    """Pick the construction for the configured triple and run it."""
    s, m, sp = config_manager.build_symbol(cfg), config_manager.build_map(cfg), config_manager.build_space(cfg)
    schedule = config_manager.build_schedule(cfg)
    cutoff = config_manager.rational_cutoff(cfg)
    section = cfg.witness
    info = classify_map(m, **cutoff)
    construction = section.construction
    if construction is None:
        if info.kind in (MapKind.ELLIPTIC_RATIONAL, MapKind.IDENTITY):
            construction = WitnessKind.RATIONAL_ROTATION_EXACT
        elif info.kind == MapKind.ELLIPTIC_IRRATIONAL:
            psi, _, _ = normalize_elliptic(s, m)
            report = zero_report(psi)
            if report.zeros_boundary:
                construction = WitnessKind.ELLIPTIC_BOUNDARY_ZERO
            elif report.zeros_inside and report.min_inner_radius > cfg.tolerances.zero_bucket:
                construction = WitnessKind.ELLIPTIC_INNER_ZERO
            else:
                construction = WitnessKind.ELLIPTIC_LEVEL_CIRCLE
        else:
            construction = WitnessKind.BACKWARD_ORBIT

    def spectral_point(certified: float) -> complex:
        if section.lam is not None:
            return pair_to_complex(section.lam)
        fraction = 0.9 if section.lambda_fraction is None else section.lambda_fraction
        return fraction * certified * cmath.exp(2j * math.pi * section.lambda_angle)

    if construction == WitnessKind.RATIONAL_ROTATION_EXACT:
        z0 = pair_to_complex(section.z0) if section.z0 is not None else 0.5 + 0j
        return witness_rational_rotation(s, m, sp, z0, **cutoff)
    if construction == WitnessKind.BACKWARD_ORBIT:
        zeros = list(zero_report(s).zeros_inside) + list(zero_report(s).zeros_boundary)
        anchor = pair_to_complex(section.z0) if section.z0 is not None else (zeros[0] if zeros else 0j)
        bases = admissible_base_points(s, m, ray_base_points(anchor, section.base_points), section.n_terms)
        lam = spectral_point(backward_orbit_guarantee(s, m, sp, **cutoff))
        return witness_backward_orbit(s, m, sp, lam, bases, section.n_terms)
    psi, _, _ = normalize_elliptic(s, m)
    if construction == WitnessKind.ELLIPTIC_BOUNDARY_ZERO:
        return witness_elliptic_boundary(s, m, sp, spectral_point(outer_modulus_at(psi, 0j)), schedule)
    if construction == WitnessKind.ELLIPTIC_INNER_ZERO:
        report = zero_report(psi)
        t0 = section.t0
        if t0 is None:
            # the witness rejects an empty annulus with its own error
            certified = delta_psi(psi, report.min_inner_radius) if 0 < report.min_inner_radius < 1 else 0.0
            t0 = (0.5 if section.lambda_fraction is None else section.lambda_fraction) * certified
        return witness_inner_zero(s, m, sp, t0, schedule)
    r0 = section.r0 if section.r0 is not None else 0.5
    z0 = pair_to_complex(section.z0) if section.z0 is not None else None
    return witness_level_circle(s, m, sp, r0, schedule, z0=z0)


@app.command()
def witness(
    config: Path = _config_option(),
    out: Path | None = _out_option(),
) -> None:
    """Build approximate eigenvectors of the adjoint and record their residuals."""
    with _errors("Witness"):
        cfg = _load(config, out=out)
        with _progress() as progress:
            progress.add_task("Constructing witnesses", total=None)
            run = run_witness(cfg)

        table = Table(title=f"{run.construction.value} at lambda = {run.lam:.6g}")
        for column in ("stage", "n", "residual", "floor", "norm"):
            table.add_column(column, justify="right")
        for stage in run.stages:
            table.add_row(str(stage.index), str(stage.n), f"{stage.residual:.3e}", f"{stage.floor:.4g}", f"{stage.norm:.4g}")
        console.print(table)
        if run.exhausted:
            console.print("⚠️  [yellow]Scan budget exhausted before the last stage[/yellow]")
        report = rep.witness_report(run)
        paths = [
            rep.write_json(cfg.out_dir / "witness.json", report),
            rep.write_residuals_csv(cfg.out_dir / "witness_residuals.csv", run),
        ]
        _wrote(*paths)


@app.command()
def ergodic(config: Path = _config_option(), out: Path | None = _out_option()) -> None:
    """Running averages of log|psi| along a rotation orbit, as CSV n,average."""
    with _errors("Ergodic average"):
        cfg = _load(config, out=out)
        s, m = config_manager.build_symbol(cfg), config_manager.build_map(cfg)
        psi, eta, _ = normalize_elliptic(s, m)
        base = rotation(rotation_number(eta))
        section = cfg.ergodic
        cutoff = config_manager.rational_cutoff(cfg)
        with _progress() as progress:
            progress.add_task(f"Averaging along {section.n} orbit points", total=None)
            trace = ergodic_trace(psi, base, pair_to_complex(section.z), section.n, section.every, **cutoff)
            sup_root = sup_cocycle_root(psi, base, section.sup_n, section.sup_samples)
        summary = {
            "n": section.n,
            "average": trace[-1][1],
            "sup_n": section.sup_n,
            "sup_samples": section.sup_samples,
            "sup_cocycle_root": sup_root,
            "delta_psi_1": delta_psi(psi, 1.0) if not zero_report(psi).zeros_boundary else None,
        }
        paths = [
            rep.write_ergodic_csv(cfg.out_dir / "ergodic.csv", trace),
            rep.write_plain_json(cfg.out_dir / "ergodic.json", summary),
        ]
        console.print_json(data=rep.plain(summary))
        _wrote(*paths)


@app.command()
def verify(
    config: Path = _config_option(),
    out: Path | None = _out_option(),
    N: int | None = _n_option(),
    seed: int | None = _seed_option(),
) -> None:
    """Run the verification battery; exits 4 when a hard check fails."""
    with _errors("Verification"):
        cfg = _load(config, out=out, N=N, seed=seed)
        battery = VerificationBattery(
            config_manager.build_symbol(cfg),
            config_manager.build_map(cfg),
            config_manager.build_space(cfg),
            N=cfg.truncation.N,
            schedule=config_manager.build_schedule(cfg),
            sampling=config_manager.build_sampling(cfg),
            rng=config_manager.rng(cfg),
        )
        with _progress() as progress:
            task = progress.add_task("Running checks", total=len(battery.checks))
            result = battery.run(on_check=lambda _: progress.advance(task))

        styles = {Verdict.PASS: "green", Verdict.WARN: "yellow", Verdict.FAIL: "bold red", Verdict.SKIP: "dim"}
        table = Table(title="Verification")
        table.add_column("check")
        table.add_column("verdict")
        table.add_column("measured", justify="right")
        table.add_column("threshold", justify="right")
        table.add_column("detail")
        for check in result.checks:
            table.add_row(
                check.name + ("" if check.hard else " (soft)"),
                f"[{styles[check.verdict]}]{check.verdict.value}[/{styles[check.verdict]}]",
                "-" if check.measured is None else f"{check.measured:.3e}",
                "-" if check.threshold is None else f"{check.threshold:.1e}",
                check.detail,
            )
        console.print(table)
        path = rep.write_json(cfg.out_dir / "verify.json", result)
        _wrote(path)
        if not result.passed:
            raise VerificationFailure(f"hard check '{result.first_failure}' failed")
        console.print("✅ [bold green]All hard checks passed[/bold green]")


def main() -> None:
    """Main entry point for the SpecWin CLI application.

    This function serves as the entry point defined in pyproject.toml
    and handles any top-level application setup or error handling.
    """
    try:
        app()
    except KeyboardInterrupt:
        console.print("\n👋 [yellow]SpecWin interrupted by user[/yellow]")
        sys.exit(130)  # Standard exit code for Ctrl+C
    except SpecWinError as e:
        console.print(f"❌ [bold red]SpecWin error:[/bold red] {e}")
        sys.exit(e.exit_code)
    except Exception as e:
        console.print(f"❌ [bold red]Unexpected error:[/bold red] {e}")
        sys.exit(1)


if __name__ == "__main__":
    main()
