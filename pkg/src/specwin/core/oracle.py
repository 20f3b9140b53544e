"""Closed-form spectra of weighted composition operators.

The dispatch depends on three facts about the inputs: the class of the
automorphism, whether the weight is invertible in H^infinity, and which
space the operator acts on (through the kernel exponent e = gamma / 2).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

import numpy as np
from scipy.spatial import cKDTree

from ..settings import SAMPLING
from ..types import InvalidParameter, MapKind, RadiusKind, ResultOrigin, SpectrumShape, UnsupportedKind, WrongKind
from ..utils.validation import complex_to_pair
from .mobius import Classification, MobiusMap, classify, derivative, orbit
from .space import SpaceSpec
from .symbol import SymbolSpec, is_invertible_weight, outer_modulus_at

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Provenance:
    """Which result produced a prediction, with the inputs it consumed."""

    rule: str
    origin: ResultOrigin
    inputs: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class SpectrumSet:
    """A predicted spectrum.

    Attributes:
        shape: Disk, circle, annulus or closure of a sampled set
        parameters: ``radius`` or ``r_min``/``r_max``
        provenance: The rule that fired
        points: Sample points of a sampled closure
        n0: Rotation order whose roots were extracted (1 for the identity)
        membership: Distance-to-sample threshold of sampled closures
    """

    shape: SpectrumShape
    parameters: dict[str, float]
    provenance: Provenance
    points: np.ndarray | None = None
    n0: int | None = None
    membership: float | None = None

    def __post_init__(self) -> None:
        values = self.parameters
        if any(v < 0 for v in values.values()):
            raise InvalidParameter(f"Spectrum parameters must be nonnegative, got {values}")
        if self.shape == SpectrumShape.ANNULUS and values["r_min"] > values["r_max"]:
            raise InvalidParameter("Annulus needs r_min <= r_max")

    @cached_property
    def _tree(self) -> cKDTree:
        pts = np.asarray(self.points)
        return cKDTree(np.column_stack([pts.real, pts.imag]))

    @property
    def outer_radius(self) -> float:
        if self.shape == SpectrumShape.ANNULUS:
            return self.parameters["r_max"]
        if self.shape == SpectrumShape.SAMPLED_CLOSURE:
            return float(np.max(np.abs(self.points))) if self.points is not None and self.points.size else 0.0
        return self.parameters["radius"]

    def contains(self, lam: complex, tol: float | None = None) -> bool:
        """Membership of lambda, up to ``tol``.

        Sampled closures use the distance to the nearest sample and default
        to the configured membership threshold; the other shapes default to 1e-10.
        """
        lam = complex(lam)
        size = abs(lam)
        if self.shape == SpectrumShape.SAMPLED_CLOSURE:
            if tol is None:
                tol = self.membership or SAMPLING.membership
            distance, _ = self._tree.query([lam.real, lam.imag])
            return bool(distance <= tol)
        tol = 1e-10 if tol is None else tol
        if self.shape == SpectrumShape.DISK:
            return size <= self.parameters["radius"] + tol
        if self.shape == SpectrumShape.CIRCLE:
            return abs(size - self.parameters["radius"]) <= tol
        return self.parameters["r_min"] - tol <= size <= self.parameters["r_max"] + tol


@dataclass(frozen=True)
class RadiusBound:
    """An upper bound for the spectral radius."""

    value: float
    kind: RadiusKind
    details: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.value < 0:
            raise InvalidParameter(f"Radius bound must be nonnegative, got {self.value}")


@dataclass(frozen=True)
class SamplingSpec:
    """Polar grid: half the radii uniform on [0, uniform_limit), half geometric toward the circle."""

    radii: int = SAMPLING.radii
    angles: int = SAMPLING.angles
    uniform_limit: float = SAMPLING.uniform_limit
    innermost_gap: float = SAMPLING.innermost_gap
    membership: float = SAMPLING.membership

    def radius_values(self) -> np.ndarray:
        inner = self.radii // 2
        outer = self.radii - inner
        uniform = self.uniform_limit * np.arange(inner) / max(inner, 1)
        gap0 = 1.0 - self.uniform_limit
        steps = np.linspace(0.0, 1.0, outer)
        geometric = 1.0 - gap0 * (self.innermost_gap / gap0) ** steps
        return np.concatenate([uniform, geometric])

    def points(self) -> np.ndarray:
        theta = 2 * np.pi * np.arange(self.angles) / self.angles
        return (self.radius_values()[:, None] * np.exp(1j * theta)[None, :]).ravel()


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _weighted_values(s: SymbolSpec, m: MobiusMap, sp: SpaceSpec, info: Classification) -> dict[str, float]:
    """|psi(p)| phi'(p)^(-e) at the Denjoy-Wolff point and the repelling point."""
    e = sp.exponent
    a = complex(info.denjoy_wolff)  # type: ignore[arg-type]
    b = complex(info.repelling_point)  # type: ignore[arg-type]
    return {
        "at_a": abs(complex(s(a))) * abs(derivative(m, a)) ** (-e),
        "at_b": abs(complex(s(b))) * abs(derivative(m, b)) ** (-e),
    }


def _inputs(info: Classification, sp: SpaceSpec, **extra: Any) -> dict[str, Any]:
    inputs: dict[str, Any] = {
        "kind": info.kind.value,
        "space": sp.label(),
        "fixed_points": [list(complex_to_pair(p)) for p in info.fixed_points],
        "multiplier": list(complex_to_pair(info.multiplier)),
        "rational_cutoff": info.rational_cutoff,
        "rational_tolerance": info.rational_tolerance,
    }
    inputs.update(extra)
    return inputs


def _cocycle_grid(s: SymbolSpec, m: MobiusMap, z: np.ndarray, n: int) -> np.ndarray:
    return np.prod(s(orbit(m, z, n)), axis=0)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def is_invertible_operator(s: SymbolSpec, m: MobiusMap) -> bool:
    """C_{psi,phi} is invertible on either space iff psi and 1/psi are bounded."""
    return is_invertible_weight(s)


def spectral_radius_bound(
    s: SymbolSpec,
    m: MobiusMap,
    sp: SpaceSpec,
    *,
    rational_tolerance: float | None = None,
    max_period: int | None = None,
) -> RadiusBound:
    """Upper bound for the spectral radius by automorphism class.

    ``rational_tolerance`` and ``max_period`` are passed to the classifier.

    Raises:
        UnsupportedKind: For rational rotations and the identity
    """
    info = classify(m, rational_tolerance=rational_tolerance, max_period=max_period)
    if info.kind == MapKind.ELLIPTIC_IRRATIONAL:
        a = info.fixed_points[0]
        value = outer_modulus_at(s, a)
        details = {
            "fixed_point": list(complex_to_pair(a)),
            "rational_cutoff": info.rational_cutoff,
            "rational_tolerance": info.rational_tolerance,
        }
        return RadiusBound(value, RadiusKind.ELLIPTIC_OUTER, details)
    if info.kind == MapKind.PARABOLIC:
        a = complex(info.denjoy_wolff)  # type: ignore[arg-type]
        value = abs(complex(s(a)))
        return RadiusBound(value, RadiusKind.PARABOLIC_WEIGHT_AT_DW, {"denjoy_wolff": list(complex_to_pair(a))})
    if info.kind == MapKind.HYPERBOLIC:
        weighted = _weighted_values(s, m, sp, info)
        return RadiusBound(
            max(weighted.values()), RadiusKind.HYPERBOLIC_MAX, {**weighted, "exponent": sp.exponent}
        )
    raise UnsupportedKind(f"No spectral radius bound for {info.kind.value} maps; use predict_spectrum")


def backward_orbit_guarantee(
    s: SymbolSpec,
    m: MobiusMap,
    sp: SpaceSpec,
    *,
    rational_tolerance: float | None = None,
    max_period: int | None = None,
) -> float:
    """|psi(b)| phi'(b)^(-e) at the Denjoy-Wolff point b of the inverse map.

    Raises:
        WrongKind: For elliptic maps and the identity
    """
    info = classify(m, rational_tolerance=rational_tolerance, max_period=max_period)
    if info.kind not in (MapKind.HYPERBOLIC, MapKind.PARABOLIC):
        raise WrongKind(f"Backward orbits need a hyperbolic or parabolic map, not {info.kind.value}")
    b = complex(info.repelling_point)  # type: ignore[arg-type]
    return abs(complex(s(b))) * abs(derivative(m, b)) ** (-sp.exponent)


def predict_spectrum(
    s: SymbolSpec,
    m: MobiusMap,
    sp: SpaceSpec,
    sampling: SamplingSpec | None = None,
    *,
    rational_tolerance: float | None = None,
    max_period: int | None = None,
) -> SpectrumSet:
    """The predicted spectrum of C_{psi,phi} on ``sp``.

    Args:
        s: The weight
        m: The automorphism
        sp: Hardy or Bergman space
        sampling: Polar grid for sampled closures
        rational_tolerance: Periodicity tolerance of the classifier (defaults to settings)
        max_period: Largest rotation period the classifier tests (defaults to settings)

    Returns:
        SpectrumSet: Shape, parameters and the provenance of the rule that fired
    """
    sampling = sampling or SamplingSpec()
    info = classify(m, rational_tolerance=rational_tolerance, max_period=max_period)

    if info.kind == MapKind.IDENTITY:
        values = s(sampling.points())
        logger.debug("identity map: sampling the closure of psi(D) at %d points", values.size)
        return SpectrumSet(
            SpectrumShape.SAMPLED_CLOSURE,
            {},
            Provenance("multiplication_closure", ResultOrigin.TOEPLITZ_CLOSURE, _inputs(info, sp)),
            points=values,
            n0=1,
            membership=sampling.membership,
        )

    if info.kind == MapKind.ELLIPTIC_RATIONAL:
        n0 = int(info.period)  # type: ignore[arg-type]
        values = _cocycle_grid(s, m, sampling.points(), n0)
        base = np.abs(values) ** (1.0 / n0) * np.exp(1j * np.angle(values) / n0)
        roots = np.exp(2j * np.pi * np.arange(n0) / n0)
        points = (base[None, :] * roots[:, None]).ravel()
        logger.debug("rational rotation of order %d: %d sampled roots", n0, points.size)
        return SpectrumSet(
            SpectrumShape.SAMPLED_CLOSURE,
            {},
            Provenance("rational_rotation_roots", ResultOrigin.NONINVERTIBLE_THEOREM, _inputs(info, sp, n0=n0)),
            points=points,
            n0=n0,
            membership=sampling.membership,
        )

    invertible = is_invertible_weight(s)
    if invertible:
        origin = ResultOrigin.INVERTIBLE_CLASSICAL
        if info.kind == MapKind.HYPERBOLIC:
            weighted = _weighted_values(s, m, sp, info)
            low, high = sorted(weighted.values())
            return SpectrumSet(
                SpectrumShape.ANNULUS,
                {"r_min": low, "r_max": high},
                Provenance("invertible_hyperbolic_annulus", origin, _inputs(info, sp, exponent=sp.exponent)),
            )
        point = complex(info.fixed_points[0])
        radius = abs(complex(s(point)))
        rule = "invertible_elliptic_circle" if info.is_elliptic else "invertible_parabolic_circle"
        return SpectrumSet(SpectrumShape.CIRCLE, {"radius": radius}, Provenance(rule, origin, _inputs(info, sp)))

    origin = ResultOrigin.NONINVERTIBLE_THEOREM
    bound = spectral_radius_bound(s, m, sp, rational_tolerance=rational_tolerance, max_period=max_period)
    rule = {
        MapKind.ELLIPTIC_IRRATIONAL: "irrational_rotation_outer_disk",
        MapKind.PARABOLIC: "parabolic_weight_disk",
        MapKind.HYPERBOLIC: "hyperbolic_weighted_disk",
    }[info.kind]
    return SpectrumSet(
        SpectrumShape.DISK,
        {"radius": bound.value},
        Provenance(rule, origin, _inputs(info, sp, bound=bound.kind.value, exponent=sp.exponent)),
    )
