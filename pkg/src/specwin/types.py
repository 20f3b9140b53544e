"""Core type definitions for SpecWin.

This module provides the shared vocabulary of the laboratory, leveraging
Pydantic for validation of everything that crosses a file boundary. These
types form the foundation for:

- Run configuration files (JSON or YAML) and their validation
- Report models that serialize results and re-parse them losslessly
- Enumerations naming map classes, spaces, spectrum shapes and witnesses
- The exception hierarchy and its mapping onto CLI exit codes

Complex numbers appear in files as ``[re, im]`` pairs everywhere.

Example:
    >>> from specwin.types import RunConfig
    >>> cfg = RunConfig.model_validate({
    ...     "symbol": {"num": [[-0.5, 0], [1, 0]]},
    ...     "map": {"parabolic_cayley": 1},
    ...     "space": "hardy",
    ... })
    >>> cfg.space.kind.value
    'hardy'
"""

from __future__ import annotations

from enum import Enum
from pathlib import Path
from typing import Annotated, Any

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, field_validator, model_validator

from .utils.validation import coerce_complex_pair, validate_tolerance

ComplexPair = Annotated[tuple[float, float], BeforeValidator(coerce_complex_pair)]


# ---------------------------------------------------------------------------
# Enumerations
# ---------------------------------------------------------------------------


class MapKind(str, Enum):
    """Classes of disk automorphisms.

    Attributes:
        IDENTITY: The identity map
        ELLIPTIC_RATIONAL: Interior fixed point, multiplier a root of unity
        ELLIPTIC_IRRATIONAL: Interior fixed point, multiplier of infinite order
        HYPERBOLIC: Two distinct boundary fixed points
        PARABOLIC: One boundary fixed point of multiplicity two

    Example:
        >>> MapKind.HYPERBOLIC.value
        'hyperbolic'
    """

    IDENTITY = "identity"
    ELLIPTIC_RATIONAL = "elliptic_rational"
    ELLIPTIC_IRRATIONAL = "elliptic_irrational"
    HYPERBOLIC = "hyperbolic"
    PARABOLIC = "parabolic"


class SpaceKind(str, Enum):
    """Hilbert spaces of analytic functions on the disk."""

    HARDY = "hardy"
    BERGMAN = "bergman"


class CanonicalKind(str, Enum):
    """Canonical half-plane forms of non-elliptic automorphisms."""

    DILATION = "dilation"
    TRANSLATION = "translation"


class SpectrumShape(str, Enum):
    """Shapes of predicted spectra.

    Attributes:
        DISK: Closed disk centered at the origin
        CIRCLE: Circle centered at the origin
        ANNULUS: Closed annulus centered at the origin
        SAMPLED_CLOSURE: Closure of a sampled point set
    """

    DISK = "disk"
    CIRCLE = "circle"
    ANNULUS = "annulus"
    SAMPLED_CLOSURE = "sampled_closure"


class ResultOrigin(str, Enum):
    """Where the spectrum formula that fired comes from."""

    NONINVERTIBLE_THEOREM = "noninvertible_theorem"
    INVERTIBLE_CLASSICAL = "invertible_classical"
    TOEPLITZ_CLOSURE = "toeplitz_closure"


class RadiusKind(str, Enum):
    """Which spectral-radius bound applies."""

    ELLIPTIC_OUTER = "elliptic_outer"
    PARABOLIC_WEIGHT_AT_DW = "parabolic_weight_at_dw"
    HYPERBOLIC_MAX = "hyperbolic_max"


class WitnessKind(str, Enum):
    """Approximate-eigenvector constructions.

    Attributes:
        ELLIPTIC_BOUNDARY_ZERO: Chains along rotation orbits near a boundary zero
        ELLIPTIC_INNER_ZERO: Roots-of-unity chains on the circle through an inner zero
        ELLIPTIC_LEVEL_CIRCLE: Return-time chains on a level circle
        RATIONAL_ROTATION_EXACT: Exact eigenvectors for periodic rotations
        BACKWARD_ORBIT: Chains along backward orbits of non-elliptic maps
    """

    ELLIPTIC_BOUNDARY_ZERO = "elliptic_boundary_zero"
    ELLIPTIC_INNER_ZERO = "elliptic_inner_zero"
    ELLIPTIC_LEVEL_CIRCLE = "elliptic_level_circle"
    RATIONAL_ROTATION_EXACT = "rational_rotation_exact"
    BACKWARD_ORBIT = "backward_orbit"


class Verdict(str, Enum):
    """Outcome of a verification check."""

    PASS = "PASS"
    WARN = "WARN"
    FAIL = "FAIL"
    SKIP = "SKIP"


# ---------------------------------------------------------------------------
# Exceptions
# ---------------------------------------------------------------------------


class SpecWinError(Exception):
    """Base exception for SpecWin errors.

    Every subclass carries the process exit code the CLI uses when the error
    escapes a command.
    """

    exit_code = 1


class InputError(SpecWinError):
    """Invalid user input: maps, symbols, points or configuration."""

    exit_code = 2


class UnsupportedCase(SpecWinError):
    """The requested operation does not apply to this class of inputs."""

    exit_code = 3


class VerificationFailure(SpecWinError):
    """A hard verification check failed."""

    exit_code = 4


class NumericalInstability(SpecWinError):
    """A numerical procedure failed to reach its stated accuracy."""

    exit_code = 5


class ConfigurationError(InputError):
    """Configuration file could not be read or validated."""


class NotAutomorphism(InputError):
    """The Mobius map does not preserve the unit disk."""


class DegenerateMap(InputError):
    """The coefficient determinant vanishes."""


class PoleAtPoint(InputError):
    """The point is a pole of the map."""


class OutsideDisk(InputError):
    """A point required to lie in the open unit disk does not."""


class OutsideClosedDisk(InputError):
    """A point required to lie in the closed unit disk does not."""


class InvalidSymbol(InputError):
    """The weight violates the rational-times-Blaschke class invariants."""


class InvalidParameter(InputError):
    """A numeric parameter lies outside its admissible range."""


class KernelSingularity(InputError):
    """A reproducing kernel was evaluated at its singularity."""


class LambdaOutsideGuarantee(InputError):
    """The spectral parameter lies outside the region a construction certifies."""


class ZeroOnOrbit(InputError):
    """The weight vanishes on an orbit where it must not."""


class ZeroOnBackwardOrbit(ZeroOnOrbit):
    """The weight vanishes on a backward orbit used by a construction."""


class TooCloseToParabolicFixedPoint(InputError):
    """A point is too close to the fixed point of a parabolic map."""


class WrongKind(UnsupportedCase):
    """The map belongs to the wrong automorphism class."""


class UnsupportedKind(UnsupportedCase):
    """No closed-form result covers this class."""


class RationalMultiplier(UnsupportedCase):
    """The multiplier is a root of unity."""


class ReturnTimesUnavailable(RationalMultiplier):
    """Return times do not exist for a periodic rotation."""


class NoBoundaryZero(UnsupportedCase):
    """The weight has no zero on the unit circle."""


class QuadratureNonConvergence(NumericalInstability):
    """Trapezoid quadrature failed to stabilize under node doubling."""


class RootFindingFailure(NumericalInstability):
    """The companion-matrix eigensolve did not converge."""


class CoefficientExtractionUnstable(NumericalInstability):
    """Taylor coefficients changed too much under sample doubling."""

    def __init__(self, message: str, change: float) -> None:
        super().__init__(message)
        self.change = change


class EigensolverNonconvergence(NumericalInstability):
    """The dense eigensolver did not converge."""


class NumericallyIndefinite(NumericalInstability):
    """A Gram form evaluated significantly below zero."""


class CocycleOverflow(NumericalInstability):
    """A cocycle product exceeds the floating-point range."""


# ---------------------------------------------------------------------------
# Run configuration
# ---------------------------------------------------------------------------


class SymbolConfig(BaseModel):
    """Weight psi = B * p / q as coefficient lists.

    Polynomials are given in ascending-power order.

    Attributes:
        num: Numerator coefficients p_0, p_1, ...
        den: Denominator coefficients q_0, q_1, ...
        blaschke: Zeros of the finite Blaschke factor

    Example:
        >>> SymbolConfig(num=[[-0.5, 0], [1, 0]]).den
        [(1.0, 0.0)]
    """

    model_config = ConfigDict(extra="forbid")

    num: list[ComplexPair] = Field(default_factory=lambda: [(1.0, 0.0)])
    den: list[ComplexPair] = Field(default_factory=lambda: [(1.0, 0.0)])
    blaschke: list[ComplexPair] = Field(default_factory=list)

    @field_validator("num", "den")
    @classmethod
    def validate_nonempty(cls, v: list[tuple[float, float]]) -> list[tuple[float, float]]:
        """Polynomials need at least one coefficient."""
        if not v:
            raise ValueError("Polynomial coefficient list cannot be empty")
        return v


class EllipticConfig(BaseModel):
    """Elliptic automorphism given by its fixed point and rotation in turns."""

    model_config = ConfigDict(extra="forbid")

    fixed: ComplexPair
    turns: float


class MapConfig(BaseModel):
    """Disk automorphism from exactly one constructor.

    Attributes:
        rotation: Rotation about 0 by this many turns
        elliptic: Elliptic map with given fixed point and turns
        hyperbolic_r: The map (z + r) / (1 + r z) with 0 < |r| < 1
        parabolic_cayley: Translation by +1 or -1 conjugated through the Cayley map
        coeffs: Raw coefficients [a, b, c, d]
    """

    model_config = ConfigDict(extra="forbid")

    rotation: float | None = None
    elliptic: EllipticConfig | None = None
    hyperbolic_r: float | None = None
    parabolic_cayley: int | None = None
    coeffs: list[ComplexPair] | None = None

    @field_validator("hyperbolic_r")
    @classmethod
    def validate_hyperbolic_r(cls, v: float | None) -> float | None:
        """The hyperbolic parameter must lie strictly inside (-1, 1) and be nonzero."""
        if v is not None and not (0.0 < abs(v) < 1.0):
            raise ValueError(f"hyperbolic_r must satisfy 0 < |r| < 1, got {v}")
        return v

    @field_validator("parabolic_cayley")
    @classmethod
    def validate_sign(cls, v: int | None) -> int | None:
        """The parabolic translation is by +1 or -1."""
        if v is not None and v not in (-1, 1):
            raise ValueError(f"parabolic_cayley must be +1 or -1, got {v}")
        return v

    @field_validator("coeffs")
    @classmethod
    def validate_coeffs(cls, v: list[tuple[float, float]] | None) -> list[tuple[float, float]] | None:
        """Raw maps need four coefficients."""
        if v is not None and len(v) != 4:
            raise ValueError(f"coeffs must list exactly four complex numbers [a, b, c, d], got {len(v)}")
        return v

    @model_validator(mode="after")
    def validate_single_constructor(self) -> MapConfig:
        """Exactly one constructor key may be present."""
        present = [name for name in type(self).model_fields if getattr(self, name) is not None]
        if len(present) != 1:
            raise ValueError(
                "map needs exactly one of rotation, elliptic, hyperbolic_r, parabolic_cayley, coeffs; "
                f"got {present or 'none'}"
            )
        return self


class SpaceConfig(BaseModel):
    """Hardy space or weighted Bergman space with parameter alpha."""

    model_config = ConfigDict(extra="forbid")

    kind: SpaceKind = SpaceKind.HARDY
    alpha: float = 0.0

    @model_validator(mode="after")
    def validate_alpha(self) -> SpaceConfig:
        """Bergman spaces need alpha > -1."""
        if self.kind == SpaceKind.BERGMAN and self.alpha <= -1.0:
            raise ValueError(f"Bergman parameter alpha must exceed -1, got {self.alpha}")
        return self


class TruncationConfig(BaseModel):
    """Matrix compression parameters."""

    model_config = ConfigDict(extra="forbid")

    N: int = Field(default=256, ge=1, le=4096)
    radius: float | None = Field(default=None, gt=0, le=1)
    n_max: int = Field(default=64, ge=1, le=512)


class GridConfig(BaseModel):
    """Pseudospectrum grid in the lambda plane."""

    model_config = ConfigDict(extra="forbid")

    width: int = Field(default=201, ge=2, le=512)
    height: int = Field(default=201, ge=2, le=512)
    bounds: tuple[float, float, float, float] | None = None
    contour_level: float = Field(default=1e-2, gt=0)

    @field_validator("bounds")
    @classmethod
    def validate_bounds(cls, v: tuple[float, float, float, float] | None) -> tuple[float, float, float, float] | None:
        """Bounds are [re_min, re_max, im_min, im_max] with nonempty extent."""
        if v is not None and not (v[0] < v[1] and v[2] < v[3]):
            raise ValueError(f"Grid bounds must satisfy re_min < re_max and im_min < im_max, got {v}")
        return v


class SamplingConfig(BaseModel):
    """Polar sampling grid for closures of sampled sets."""

    model_config = ConfigDict(extra="forbid")

    radii: int = Field(default=64, ge=2, le=4096)
    angles: int = Field(default=256, ge=4, le=65536)
    membership: float = Field(default=1e-2, gt=0)


class WitnessConfig(BaseModel):
    """Approximate-eigenvector construction parameters.

    Either ``lambda`` (absolute) or ``lambda_fraction`` (relative to the
    radius the construction certifies, at angle ``lambda_angle`` in turns)
    chooses the spectral point.
    """

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    construction: WitnessKind | None = None
    lam: ComplexPair | None = Field(default=None, alias="lambda")
    lambda_fraction: float | None = Field(default=None, ge=0, lt=1)
    lambda_angle: float = 0.0
    z0: ComplexPair | None = None
    r0: float | None = Field(default=None, gt=0, lt=1)
    t0: float | None = Field(default=None, ge=0)
    n_terms: int = Field(default=60, ge=1, le=2000)
    base_points: int = Field(default=40, ge=1, le=10_000)
    stages: int = Field(default=8, ge=1, le=64)
    candidates: int = Field(default=40, ge=1, le=10_000)
    max_orbit_steps: int = Field(default=10_000, ge=1, le=1_000_000)
    birkhoff_fraction: float = Field(default=0.95, gt=0, lt=1)


class ErgodicConfig(BaseModel):
    """Ergodic average and cocycle-root parameters."""

    model_config = ConfigDict(extra="forbid")

    z: ComplexPair = (1.0, 0.0)
    n: int = Field(default=100_000, ge=1)
    every: int = Field(default=1000, ge=1)
    sup_n: int = Field(default=2000, ge=1)
    sup_samples: int = Field(default=4096, ge=1)


class ToleranceConfig(BaseModel):
    """User-adjustable tolerances."""

    model_config = ConfigDict(extra="forbid")

    zero_bucket: float = 1e-8
    rational: float = 1e-9
    rational_max_period: int = Field(default=512, ge=1)

    @field_validator("zero_bucket", "rational")
    @classmethod
    def validate_positive_small(cls, v: float) -> float:
        """Tolerances must lie in (0, 1e-3]."""
        return validate_tolerance(v)


class RunConfig(BaseModel):
    """Complete configuration of one laboratory run.

    Attributes:
        symbol: The weight psi
        map_: The automorphism phi (key ``map`` in files)
        space: ``"hardy"`` or ``{"bergman": alpha}``
        truncation: Matrix compression parameters
        grid: Pseudospectrum grid
        sampling: Sampling grid for sampled closures
        witness: Witness construction parameters
        ergodic: Ergodic average parameters
        tolerances: User-adjustable tolerances
        out_dir: Directory receiving artifacts
        seed: Seed for randomized scans and checks
    """

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    symbol: SymbolConfig = Field(default_factory=SymbolConfig)
    map_: MapConfig = Field(alias="map")
    space: SpaceConfig = Field(default_factory=SpaceConfig)
    truncation: TruncationConfig = Field(default_factory=TruncationConfig)
    grid: GridConfig = Field(default_factory=GridConfig)
    sampling: SamplingConfig = Field(default_factory=SamplingConfig)
    witness: WitnessConfig = Field(default_factory=WitnessConfig)
    ergodic: ErgodicConfig = Field(default_factory=ErgodicConfig)
    tolerances: ToleranceConfig = Field(default_factory=ToleranceConfig)
    out_dir: Path = Path("specwin-out")
    seed: int = 0

    @field_validator("space", mode="before")
    @classmethod
    def parse_space(cls, v: Any) -> Any:
        """Accept the short forms ``"hardy"`` and ``{"bergman": alpha}``."""
        if isinstance(v, str):
            name = v.strip().lower()
            if name == "hardy":
                return {"kind": SpaceKind.HARDY}
            if name == "bergman":
                return {"kind": SpaceKind.BERGMAN, "alpha": 0.0}
            raise ValueError(f"Unknown space {v!r}; use 'hardy' or {{'bergman': alpha}}")
        if isinstance(v, dict) and "bergman" in v:
            if len(v) != 1:
                raise ValueError("A Bergman space is written {'bergman': alpha}")
            return {"kind": SpaceKind.BERGMAN, "alpha": v["bergman"]}
        return v


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


class ClassificationReport(BaseModel):
    """Serialized classification of an automorphism."""

    kind: MapKind
    period: int | None = None
    fixed_points: list[ComplexPair]
    denjoy_wolff: ComplexPair | None = None
    multiplier: ComplexPair
    rational_cutoff: int
    rational_tolerance: float


class ProvenanceModel(BaseModel):
    """Which result produced a spectrum prediction."""

    rule: str
    origin: ResultOrigin
    inputs: dict[str, Any] = Field(default_factory=dict)


class SpectrumReport(BaseModel):
    """Serialized predicted spectrum."""

    shape: SpectrumShape
    parameters: dict[str, float] = Field(default_factory=dict)
    n0: int | None = None
    points: list[ComplexPair] | None = None
    membership: float | None = None
    provenance: ProvenanceModel


class RadiusReport(BaseModel):
    """Serialized spectral radius bound."""

    value: float = Field(ge=0)
    kind: RadiusKind
    details: dict[str, Any] = Field(default_factory=dict)


class WitnessStageReport(BaseModel):
    """One stage of a witness run."""

    index: int
    n: int
    residual: float = Field(ge=0)
    floor: float
    norm: float
    point: ComplexPair | None = None
    lam: ComplexPair | None = Field(default=None, alias="lambda")

    model_config = ConfigDict(populate_by_name=True)


class WitnessReport(BaseModel):
    """Serialized witness run without its kernel vectors."""

    model_config = ConfigDict(populate_by_name=True)

    construction: WitnessKind
    lam: ComplexPair = Field(alias="lambda")
    stages: list[WitnessStageReport]
    metadata: dict[str, Any] = Field(default_factory=dict)


class CheckReport(BaseModel):
    """Outcome of one verification check."""

    name: str
    verdict: Verdict
    hard: bool
    measured: float | None = None
    threshold: float | None = None
    detail: str = ""


class VerifyReport(BaseModel):
    """Outcome of the verification battery."""

    checks: list[CheckReport]
    passed: bool
    first_failure: str | None = None
