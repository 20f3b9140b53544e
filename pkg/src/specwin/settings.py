"""SpecWin Settings and Numerical Constants.

This module centralizes every tolerance, cutoff and default used throughout
the laboratory. It uses Pydantic for type-safe configuration management and
reads the ``SPECWIN_THREADS`` environment variable for parallel sections.
"""

import os

from pydantic import BaseModel, Field


def _threads_from_env() -> int:
    raw = os.getenv("SPECWIN_THREADS", "").strip()
    try:
        value = int(raw) if raw else 0
    except ValueError:
        value = 0
    return value if value > 0 else (os.cpu_count() or 1)


class ToleranceSettings(BaseModel):
    """Tolerances for classification, root finding and quadrature."""

    # Mobius maps
    determinant: float = Field(default=1e-12, description="Smallest |ad - bc| accepted before normalization", gt=0)
    automorphism: float = Field(default=1e-9, description="Boundary-sample tolerance of the automorphism check", gt=0)
    automorphism_samples: int = Field(default=16, description="Number of boundary samples for the check", ge=4)
    rational: float = Field(default=1e-9, description="|eta^n - 1| below which a multiplier is rational", gt=0)
    rational_max_period: int = Field(default=512, description="Largest period tested for rational rotations", ge=1)
    parabolic_discriminant: float = Field(default=1e-8, description="Relative discriminant for a double root", gt=0)
    boundary_fixed_point: float = Field(default=1e-8, description="| |z| - 1 | for a boundary fixed point", gt=0)
    model_check: float = Field(default=1e-9, description="Half-plane model verification tolerance", gt=0)

    # Symbols
    zero_bucket: float = Field(default=1e-8, description="Boundary-zero bucket tolerance", gt=0, le=1e-3)
    denominator_margin: float = Field(default=1e-9, description="Required |root| - 1 for denominator roots", gt=0)
    zero_on_circle: float = Field(default=1e-12, description="Distance of a zero to a circle that routes to Jensen")
    evaluation_slack: float = Field(default=1e-12, description="Allowed excess modulus for closed-disk evaluation")

    # Quadrature
    quadrature: float = Field(default=1e-8, description="Node-doubling stability threshold", gt=0)
    quadrature_initial_nodes: int = Field(default=256, description="Starting number of trapezoid nodes", ge=8)
    quadrature_max_nodes: int = Field(default=2**20, description="Node cap for trapezoid doubling", ge=1024)

    # Kernel combinations
    gram_indefinite: float = Field(default=1e-6, description="Relative negativity alarm for Gram forms", gt=0)
    merge_distance: float = Field(default=1e-12, description="Pseudo-hyperbolic distance merging kernel terms", ge=0)

    # Cocycles
    log_space_threshold: int = Field(default=10_000, description="Orbit length beyond which cocycles use logs", ge=1)


class TruncationSettings(BaseModel):
    """Defaults for matrix compressions and pseudospectra."""

    sampling_radius: float = Field(default=0.95, description="Radius of the Cauchy sampling circle", gt=0, le=1)
    max_sampling_radius: float = Field(default=0.995, description="Upper limit of the automatic radius raise", le=1)
    min_samples: int = Field(default=1024, description="Smallest number of circle samples", ge=16)
    samples_per_dimension: int = Field(default=4, description="Samples per retained coefficient", ge=2)
    extraction_tolerance: float = Field(default=1e-9, description="Accepted entry change under sample doubling")
    unstable_threshold: float = Field(default=1e-4, description="Entry change that aborts the build")
    default_dimension: int = Field(default=256, description="Truncation size for verification runs", ge=1)
    acceptance_dimension: int = Field(default=512, description="Truncation size for acceptance runs", ge=1)
    grid_size: int = Field(default=201, description="Default pseudospectrum grid resolution", ge=2, le=512)
    grid_margin: float = Field(default=0.2, description="Margin added around the predicted radius", ge=0)
    contour_level: float = Field(default=1e-2, description="sigma_min level drawn in SVG plots", gt=0)
    svd_cutoff: int = Field(default=64, description="Largest N using a dense SVD per grid point", ge=1)
    inverse_iterations: int = Field(default=80, description="Inverse iteration cap for sigma_min", ge=1)
    max_norm_powers: int = Field(default=512, description="Largest n for the norm-power radius", ge=1)


class SamplingSettings(BaseModel):
    """Polar sampling grid for closures of sampled sets."""

    radii: int = Field(default=64, description="Number of sampling radii", ge=2)
    angles: int = Field(default=256, description="Number of sampling angles", ge=4)
    uniform_limit: float = Field(default=0.9, description="Radius where geometric spacing begins", gt=0, lt=1)
    innermost_gap: float = Field(default=1e-6, description="Distance of the outermost radius to the circle", gt=0)
    membership: float = Field(default=1e-2, description="Distance-to-sample membership threshold", gt=0)


class WitnessSettings(BaseModel):
    """Scan budgets for the approximate-eigenvector constructions."""

    stages: int = Field(default=8, description="Number of stages per witness run", ge=1)
    candidates: int = Field(default=40, description="Candidate base points scanned per stage", ge=1)
    max_orbit_steps: int = Field(default=10_000, description="Largest orbit length scanned", ge=1)
    birkhoff_fraction: float = Field(default=0.95, description="Threshold q as a fraction of the target", gt=0, lt=1)
    n_terms: int = Field(default=60, description="Backward-orbit terms per stage", ge=1)
    base_points: int = Field(default=40, description="Number of backward-orbit base points", ge=1)
    parabolic_epsilon: float = Field(default=1e-6, description="Exclusion radius around a parabolic fixed point")
    blaschke_guard: float = Field(default=0.5, description="Lower bound on the interpolating Blaschke factor")


class ExecutionSettings(BaseModel):
    """Settings for parallel execution behavior."""

    threads: int = Field(default_factory=_threads_from_env, description="Worker threads for grid sweeps", ge=1)


class SpecWinMetadata(BaseModel):
    """SpecWin metadata and version information."""

    version: str = "0.3.0"
    author: str = "SpecWin contributors"
    project_name: str = "SpecWin"
    description: str = "Spectra of weighted composition operators"


class SpecWinSettings(BaseModel):
    """Main SpecWin settings container."""

    tolerances: ToleranceSettings = Field(default_factory=ToleranceSettings)
    truncation: TruncationSettings = Field(default_factory=TruncationSettings)
    sampling: SamplingSettings = Field(default_factory=SamplingSettings)
    witness: WitnessSettings = Field(default_factory=WitnessSettings)
    execution: ExecutionSettings = Field(default_factory=ExecutionSettings)
    metadata: SpecWinMetadata = Field(default_factory=SpecWinMetadata)


# Global settings instance
settings = SpecWinSettings()

# Convenience exports
TOLERANCES = settings.tolerances
TRUNCATION = settings.truncation
SAMPLING = settings.sampling
WITNESS = settings.witness
EXECUTION = settings.execution
METADATA = settings.metadata

__all__ = [
    "EXECUTION",
    "METADATA",
    "SAMPLING",
    "TOLERANCES",
    "TRUNCATION",
    "WITNESS",
    "ExecutionSettings",
    "SamplingSettings",
    "SpecWinMetadata",
    "SpecWinSettings",
    "ToleranceSettings",
    "TruncationSettings",
    "WitnessSettings",
    "settings",
]
