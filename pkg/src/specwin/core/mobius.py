"""Mobius automorphisms of the unit disk.

This module holds the algebra and dynamics of disk automorphisms
z -> (az + b) / (cz + d):

- Normalization to determinant one and the automorphism check
- Classification by fixed points (elliptic, hyperbolic, parabolic)
- Iteration through matrix powers, composition and inversion
- Half-plane models that conjugate non-elliptic maps to dilations or translations
- Pseudo-hyperbolic distance and continued-fraction return times

Example:
    >>> from specwin.core.mobius import classify, hyperbolic_r, iterate
    >>> phi = hyperbolic_r(0.5)
    >>> classify(phi).kind.value
    'hyperbolic'
    >>> round(iterate(phi, 3, 0).real, 12)
    0.928571428571
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np

from ..settings import TOLERANCES
from ..types import (
    CanonicalKind,
    DegenerateMap,
    InvalidParameter,
    MapKind,
    NotAutomorphism,
    NumericalInstability,
    OutsideDisk,
    PoleAtPoint,
    RationalMultiplier,
    WrongKind,
)

logger = logging.getLogger(__name__)

_TINY = 1e-15


def _canonical_sign(matrix: np.ndarray) -> np.ndarray:
    # M and -M induce the same map; pick the representative with a "positive" leading value
    for value in (matrix[0, 0] + matrix[1, 1], matrix[0, 0], matrix[0, 1], matrix[1, 0]):
        size = abs(value)
        if size <= _TINY:
            continue
        if value.real < -_TINY * size or (abs(value.real) <= _TINY * size and value.imag < 0):
            return -matrix
        return matrix
    return matrix


@dataclass(frozen=True)
class MobiusMap:
    """A Mobius map z -> (az + b) / (cz + d) normalized so that ad - bc = 1.

    Instances built through :meth:`from_matrix` with ``verify=True`` (and all
    public constructors in this module) are checked to be automorphisms of
    the unit disk. Group operations keep that property without re-checking.

    Attributes:
        a: Upper-left coefficient
        b: Upper-right coefficient
        c: Lower-left coefficient
        d: Lower-right coefficient
    """

    a: complex
    b: complex
    c: complex
    d: complex

    @classmethod
    def from_matrix(cls, matrix: Any, *, verify: bool = True) -> MobiusMap:
        """Normalize a 2x2 coefficient array to determinant one.

        Args:
            matrix: Coefficients [[a, b], [c, d]]
            verify: Run the disk-automorphism check

        Raises:
            DegenerateMap: If ad - bc vanishes relative to the coefficient scale
            NotAutomorphism: If ``verify`` is set and the map does not preserve the disk
        """
        m = np.asarray(matrix, dtype=complex).reshape(2, 2)
        scale = float(np.max(np.abs(m)))
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if scale == 0.0 or not np.isfinite(scale) or abs(det) < TOLERANCES.determinant * scale * scale:
            raise DegenerateMap(f"Coefficient determinant {det} is numerically zero")
        m = _canonical_sign(m / cmath.sqrt(det))
        result = cls(complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1]))
        if verify:
            check_automorphism(result)
        return result

    @property
    def matrix(self) -> np.ndarray:
        """The normalized coefficient array."""
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    @property
    def determinant(self) -> complex:
        return self.a * self.d - self.b * self.c

    def __call__(self, z: Any) -> Any:
        if isinstance(z, np.ndarray):
            with np.errstate(divide="ignore", invalid="ignore"):
                return (self.a * z + self.b) / (self.c * z + self.d)
        z = complex(z)
        denominator = self.c * z + self.d
        if denominator == 0:
            raise PoleAtPoint(f"{z} is the pole of the map")
        return (self.a * z + self.b) / denominator


@dataclass(frozen=True)
class Classification:
    """Classification of a disk automorphism.

    Attributes:
        kind: Automorphism class
        fixed_points: One or two fixed points; for hyperbolic maps the
            Denjoy-Wolff point comes first
        denjoy_wolff: Attracting boundary fixed point (non-elliptic maps only)
        multiplier: Derivative at the interior fixed point or the Denjoy-Wolff point
        period: Order n0 of a rational rotation
        rational_cutoff: Largest period that was tested
        rational_tolerance: Tolerance of the periodicity test
    """

    kind: MapKind
    fixed_points: tuple[complex, ...]
    denjoy_wolff: complex | None
    multiplier: complex
    period: int | None = None
    rational_cutoff: int = 512
    rational_tolerance: float = 1e-9

    @property
    def interior_fixed_point(self) -> complex | None:
        """The fixed point inside the disk of an elliptic map."""
        if self.kind in (MapKind.ELLIPTIC_RATIONAL, MapKind.ELLIPTIC_IRRATIONAL, MapKind.IDENTITY):
            return self.fixed_points[0]
        return None

    @property
    def repelling_point(self) -> complex | None:
        """Denjoy-Wolff point of the inverse map."""
        if self.kind == MapKind.HYPERBOLIC:
            return self.fixed_points[1]
        if self.kind == MapKind.PARABOLIC:
            return self.fixed_points[0]
        return None

    @property
    def is_elliptic(self) -> bool:
        return self.kind in (MapKind.ELLIPTIC_RATIONAL, MapKind.ELLIPTIC_IRRATIONAL)


@dataclass(frozen=True)
class CanonicalForm:
    """Canonical half-plane form of a hyperbolic or parabolic map.

    ``DILATION`` stores the Denjoy-Wolff multiplier s in (0, 1); since the
    half-plane chart sends the attracting point to infinity the conjugated
    map acts as w -> w / s. ``TRANSLATION`` stores c = +1 or -1 and acts as
    w -> w + c.
    """

    kind: CanonicalKind
    value: float

    def apply(self, w: Any) -> Any:
        if self.kind == CanonicalKind.DILATION:
            return w / self.value
        return w + self.value

    def apply_inverse(self, w: Any) -> Any:
        if self.kind == CanonicalKind.DILATION:
            return w * self.value
        return w - self.value

    def backward(self, w: complex, k: Any) -> Any:
        """The k-th backward iterate, evaluated in closed form."""
        if self.kind == CanonicalKind.DILATION:
            return w * np.power(self.value, k)
        return w - np.asarray(k) * self.value


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------


def check_automorphism(m: MobiusMap) -> None:
    """Check that ``m`` maps the unit disk onto itself.

    The test requires |m(0)| < 1 and | |m(e^{i theta_k})| - 1 | below the
    automorphism tolerance on equispaced boundary samples.

    Raises:
        NotAutomorphism: If either condition fails
    """
    center = abs(m.b / m.d) if m.d != 0 else math.inf
    if not center < 1.0:
        raise NotAutomorphism(f"The map sends 0 to modulus {center}, outside the unit disk")
    samples = np.exp(2j * np.pi * np.arange(TOLERANCES.automorphism_samples) / TOLERANCES.automorphism_samples)
    images = m(samples)
    deviation = float(np.max(np.abs(np.abs(images) - 1.0)))
    if not deviation < TOLERANCES.automorphism:
        raise NotAutomorphism(f"The map moves boundary points off the unit circle by up to {deviation:.3e}")


def from_coefficients(a: complex, b: complex, c: complex, d: complex) -> MobiusMap:
    """Build a checked automorphism from raw coefficients."""
    return MobiusMap.from_matrix([[a, b], [c, d]])


def identity() -> MobiusMap:
    return MobiusMap(1 + 0j, 0j, 0j, 1 + 0j)


def rotation(turns: float) -> MobiusMap:
    """Rotation z -> e^{2 pi i turns} z."""
    half = cmath.exp(1j * math.pi * turns)
    return MobiusMap.from_matrix([[half, 0], [0, 1 / half]])


def automorphism_to(a: complex) -> MobiusMap:
    """The involution z -> (a - z) / (1 - conj(a) z) exchanging 0 and a."""
    a = complex(a)
    if not abs(a) < 1.0:
        raise OutsideDisk(f"Point {a} is not inside the unit disk")
    return MobiusMap.from_matrix([[-1, a], [-a.conjugate(), 1]])


def elliptic(fixed: complex, turns: float) -> MobiusMap:
    """Elliptic map fixing ``fixed`` whose multiplier there is e^{2 pi i turns}."""
    g = automorphism_to(fixed)
    return compose(g, compose(rotation(turns), g))


def hyperbolic_r(r: float) -> MobiusMap:
    """The hyperbolic map (z + r) / (1 + r z) for real 0 < |r| < 1."""
    if not 0.0 < abs(r) < 1.0:
        raise InvalidParameter(f"hyperbolic_r needs 0 < |r| < 1, got {r}")
    return MobiusMap.from_matrix([[1, r], [r, 1]])


def parabolic_cayley(sign: int = 1) -> MobiusMap:
    """The translation w -> w + sign conjugated through sigma(z) = i(1 + z) / (1 - z)."""
    if sign not in (-1, 1):
        raise InvalidParameter(f"Parabolic sign must be +1 or -1, got {sign}")
    return MobiusMap.from_matrix([[2j - sign, sign], [-sign, 2j + sign]])


# ---------------------------------------------------------------------------
# Group operations
# ---------------------------------------------------------------------------


def compose(m1: MobiusMap, m2: MobiusMap) -> MobiusMap:
    """The composition m1 o m2."""
    return MobiusMap.from_matrix(m1.matrix @ m2.matrix, verify=False)


def inverse(m: MobiusMap) -> MobiusMap:
    return MobiusMap.from_matrix([[m.d, -m.b], [-m.c, m.a]], verify=False)


def conjugate(m: MobiusMap, g: MobiusMap) -> MobiusMap:
    """The conjugate g^{-1} o m o g."""
    return compose(inverse(g), compose(m, g))


def power(m: MobiusMap, n: int) -> MobiusMap:
    """The n-th iterate as a map; negative n iterates the inverse."""
    base = m if n >= 0 else inverse(m)
    return MobiusMap.from_matrix(np.linalg.matrix_power(base.matrix, abs(int(n))), verify=False)


def iterate(m: MobiusMap, n: int, z: Any) -> Any:
    """phi_n(z) through the matrix power of the coefficient array."""
    if n == 0:
        return z
    return power(m, n)(z)


def orbit(m: MobiusMap, z: Any, count: int) -> np.ndarray:
    """The points phi_0(z), ..., phi_{count-1}(z).

    ``z`` may be an array of starting points; the result then has shape
    ``(count, *z.shape)``.
    """
    start = np.asarray(z, dtype=complex)
    out = np.empty((count, *start.shape), dtype=complex)
    current = start.copy()
    for k in range(count):
        out[k] = current
        current = m(current) if current.ndim else np.asarray(m(complex(current)))
    return out


def derivative(m: MobiusMap, z: Any) -> Any:
    """phi'(z) = (ad - bc) / (cz + d)^2.

    Raises:
        PoleAtPoint: If cz + d vanishes at a scalar point
    """
    if isinstance(z, np.ndarray):
        with np.errstate(divide="ignore", invalid="ignore"):
            return m.determinant / (m.c * z + m.d) ** 2
    denominator = m.c * complex(z) + m.d
    if abs(denominator) == 0.0:
        raise PoleAtPoint(f"{z} is the pole of the map")
    return m.determinant / denominator**2


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------


def fixed_points(m: MobiusMap) -> tuple[complex, ...]:
    """Roots of c z^2 + (d - a) z - b = 0 by the stable quadratic formula.

    A numerically vanishing discriminant is reported as a single double root.
    """
    qa, qb, qc = m.c, m.d - m.a, -m.b
    scale = max(abs(qa), abs(qb), abs(qc))
    if scale == 0.0:
        return (0j,)
    if abs(qa) <= _TINY * scale:
        if abs(qb) <= _TINY * scale:
            return (0j,)
        return (-qc / qb,)
    disc = qb * qb - 4 * qa * qc
    if abs(disc) < TOLERANCES.parabolic_discriminant * scale * scale:
        return (-qb / (2 * qa),)
    root = cmath.sqrt(disc)
    if (qb.conjugate() * root).real < 0:
        root = -root
    q = -(qb + root) / 2
    return (q / qa, qc / q)


def rational_period(multiplier: complex, tolerance: float | None = None, max_period: int | None = None) -> int | None:
    """Smallest n <= max_period with |multiplier^n - 1| < tolerance, if any."""
    tolerance = TOLERANCES.rational if tolerance is None else tolerance
    max_period = TOLERANCES.rational_max_period if max_period is None else max_period
    powers = np.power(complex(multiplier), np.arange(1, max_period + 1))
    hits = np.flatnonzero(np.abs(powers - 1.0) < tolerance)
    return int(hits[0]) + 1 if hits.size else None


def classify(
    m: MobiusMap, *, rational_tolerance: float | None = None, max_period: int | None = None
) -> Classification:
    """Classify a disk automorphism by the location of its fixed points.

    Args:
        m: The automorphism
        rational_tolerance: Periodicity tolerance (defaults to settings)
        max_period: Largest rotation period tested (defaults to settings)

    Returns:
        Classification: Kind, fixed points, Denjoy-Wolff point and multiplier

    Raises:
        NotAutomorphism: If the automorphism check fails
        DegenerateMap: If the determinant vanishes
    """
    tolerance = TOLERANCES.rational if rational_tolerance is None else rational_tolerance
    cutoff = TOLERANCES.rational_max_period if max_period is None else max_period
    m = MobiusMap.from_matrix(m.matrix)
    common = {"rational_cutoff": cutoff, "rational_tolerance": tolerance}

    scale = max(abs(m.a), abs(m.b), abs(m.c), abs(m.d))
    if max(abs(m.b), abs(m.c), abs(m.a - m.d)) <= TOLERANCES.determinant * scale:
        return Classification(MapKind.IDENTITY, (0j,), None, 1 + 0j, period=1, **common)

    points = fixed_points(m)
    boundary_tol = TOLERANCES.boundary_fixed_point
    inside = [p for p in points if abs(p) < 1.0 - boundary_tol]

    if inside:
        center = inside[0]
        multiplier = derivative(m, center)
        period = rational_period(multiplier, tolerance, cutoff)
        kind = MapKind.ELLIPTIC_RATIONAL if period is not None else MapKind.ELLIPTIC_IRRATIONAL
        return Classification(kind, (center,), None, multiplier, period=period, **common)

    on_circle = [p / abs(p) if abs(p) > 0 else p for p in points if abs(abs(p) - 1.0) <= 1e3 * boundary_tol]
    if len(on_circle) != len(points):
        raise NumericalInstability(f"Fixed points {points} are neither interior nor on the unit circle")

    if len(points) == 1:
        point = on_circle[0]
        return Classification(MapKind.PARABOLIC, (point,), point, derivative(m, point), **common)

    slopes = [abs(derivative(m, p)) for p in on_circle]
    order = (0, 1) if slopes[0] <= slopes[1] else (1, 0)
    attracting, repelling = on_circle[order[0]], on_circle[order[1]]
    return Classification(
        MapKind.HYPERBOLIC, (attracting, repelling), attracting, derivative(m, attracting), **common
    )


# ---------------------------------------------------------------------------
# Geometry
# ---------------------------------------------------------------------------


def pseudo_hyperbolic(z: complex, w: complex) -> float:
    """|(z - w) / (1 - conj(w) z)| for points of the open disk.

    Raises:
        OutsideDisk: If either point is not inside the unit disk
    """
    z, w = complex(z), complex(w)
    if not (abs(z) < 1.0 and abs(w) < 1.0):
        raise OutsideDisk(f"Pseudo-hyperbolic distance needs points inside the disk, got {z} and {w}")
    return abs((z - w) / (1 - w.conjugate() * z))


def half_plane_model(
    m: MobiusMap, classification: Classification | None = None
) -> tuple[MobiusMap, CanonicalForm]:
    """Conjugate a non-elliptic automorphism to its canonical half-plane form.

    Returns a map sigma from the disk onto the upper half-plane with
    sigma(Denjoy-Wolff point) = infinity (and sigma(other fixed point) = 0 for
    hyperbolic maps), together with the canonical form of sigma o m o sigma^{-1}.

    Raises:
        WrongKind: For elliptic maps and the identity
        NumericalInstability: If the conjugation fails the pointwise check
    """
    info = classification or classify(m)
    if info.kind not in (MapKind.HYPERBOLIC, MapKind.PARABOLIC):
        raise WrongKind(f"Half-plane models exist for hyperbolic and parabolic maps, not {info.kind.value}")

    a = complex(info.denjoy_wolff)  # type: ignore[arg-type]
    cayley = MobiusMap.from_matrix([[1j, 1j * a], [-1, a]], verify=False)

    if info.kind == MapKind.HYPERBOLIC:
        shift = cayley(complex(info.fixed_points[1])).real
        sigma = MobiusMap.from_matrix(np.array([[1, -shift], [0, 1]]) @ cayley.matrix, verify=False)
        canonical = CanonicalForm(CanonicalKind.DILATION, float(abs(info.multiplier)))
    else:
        conjugated = compose(cayley, compose(m, inverse(cayley)))
        step = (conjugated(1j) - 1j).real
        sigma = MobiusMap.from_matrix(np.array([[1 / abs(step), 0], [0, 1]]) @ cayley.matrix, verify=False)
        canonical = CanonicalForm(CanonicalKind.TRANSLATION, 1.0 if step > 0 else -1.0)

    test_points = 0.5 * np.exp(2j * np.pi * np.arange(8) / 8)
    lhs = sigma(m(test_points))
    rhs = canonical.apply(sigma(test_points))
    error = float(np.max(np.abs(lhs - rhs) / np.maximum(1.0, np.abs(rhs))))
    if error > TOLERANCES.model_check:
        raise NumericalInstability(f"Half-plane model check failed with relative error {error:.3e}")
    logger.debug("half-plane model %s(%g) verified, error %.2e", canonical.kind.value, canonical.value, error)
    return sigma, canonical


def rotation_number(multiplier: complex) -> float:
    """The angle of a unimodular multiplier in turns, in [0, 1)."""
    return (cmath.phase(complex(multiplier)) / (2 * math.pi)) % 1.0


def return_times(
    multiplier: complex, count: int, *, rational_tolerance: float | None = None, max_period: int | None = None
) -> list[int]:
    """Continued-fraction convergent denominators of the rotation number.

    The returned n_j are strictly increasing and |multiplier^{n_j} - 1|
    decreases along them.

    Raises:
        InvalidParameter: If the multiplier is not unimodular
        RationalMultiplier: If the multiplier is a root of unity per the classifier cutoff
    """
    eta = complex(multiplier)
    if abs(abs(eta) - 1.0) > TOLERANCES.rational:
        raise InvalidParameter(f"Return times need a unimodular multiplier, got modulus {abs(eta)}")
    period = rational_period(eta, rational_tolerance, max_period)
    if period is not None:
        raise RationalMultiplier(f"Multiplier is a root of unity of order {period}")

    remainder = Fraction(rotation_number(eta))
    remainder -= math.floor(remainder)
    times = [1]
    q_prev, q = 0, 1
    while len(times) < count and remainder != 0:
        x = 1 / remainder
        digit = math.floor(x)
        remainder = x - digit
        q_prev, q = q, digit * q + q_prev
        if q > times[-1]:
            times.append(q)
    if len(times) < count:
        logger.warning("Only %d return times are resolvable in double precision", len(times))
    return times[:count]
