"""Weights psi = B * p / q and their value-distribution quantities.

The weight class is a rational function p / q without poles in the closed
disk, times a finite Blaschke product B. In this class zero sets are exact,
Jensen's formula is exact and the outer part has a closed form, so every
quadrature in this module has an analytic cross-check.

Example:
    >>> from specwin.core.symbol import SymbolSpec, delta_psi
    >>> psi = SymbolSpec.polynomial([-0.5, 1])
    >>> round(delta_psi(psi, 1.0), 8)
    1.0
"""

from __future__ import annotations

import cmath
import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.polynomial import polynomial as P

from ..settings import TOLERANCES
from ..types import (
    CocycleOverflow,
    InvalidParameter,
    InvalidSymbol,
    MapKind,
    OutsideClosedDisk,
    OutsideDisk,
    QuadratureNonConvergence,
    RootFindingFailure,
    WrongKind,
    ZeroOnOrbit,
)
from .mobius import MobiusMap, classify, inverse, orbit

logger = logging.getLogger(__name__)

_COEFF_EPS = 1e-14
_CHUNK = 1 << 16
_LOG_MAX = math.log(np.finfo(float).max)


def _trim(coeffs: Sequence[complex]) -> np.ndarray:
    """Drop numerically zero top coefficients."""
    arr = np.asarray(coeffs, dtype=complex).ravel()
    if arr.size == 0:
        return arr
    scale = float(np.max(np.abs(arr)))
    keep = np.flatnonzero(np.abs(arr) > _COEFF_EPS * scale) if scale > 0 else np.array([], dtype=int)
    return arr[: keep[-1] + 1] if keep.size else arr[:0]


def _zero_order(coeffs: np.ndarray) -> int:
    scale = float(np.max(np.abs(coeffs)))
    return int(np.flatnonzero(np.abs(coeffs) > _COEFF_EPS * scale)[0])


def _cluster(roots: np.ndarray) -> np.ndarray:
    # multiple roots come back split by ~sqrt(eps); their mean is accurate
    out = roots.copy()
    used = np.zeros(len(roots), dtype=bool)
    for i in range(len(roots)):
        if used[i]:
            continue
        close = np.flatnonzero(~used & (np.abs(roots - roots[i]) <= 1e-6 * max(1.0, abs(roots[i]))))
        out[close] = roots[close].mean()
        used[close] = True
    return out


def polynomial_roots(coeffs: Sequence[complex]) -> np.ndarray:
    """Roots of an ascending-order polynomial.

    Companion-matrix eigenvalues, one Newton polish step, and cluster
    averaging of multiple roots.

    Raises:
        RootFindingFailure: If the eigensolve does not converge
    """
    c = _trim(coeffs)
    if c.size <= 1:
        return np.array([], dtype=complex)
    try:
        roots = P.polyroots(c).astype(complex)
    except np.linalg.LinAlgError as e:
        raise RootFindingFailure(f"Companion eigensolve failed: {e}") from e
    if not np.all(np.isfinite(roots)):
        raise RootFindingFailure("Companion eigensolve returned non-finite roots")
    slope = P.polyval(roots, P.polyder(c))
    value = P.polyval(roots, c)
    with np.errstate(divide="ignore", invalid="ignore"):
        polished = np.where(np.abs(slope) > 0, roots - value / slope, roots)
    better = np.abs(P.polyval(polished, c)) <= np.abs(value)
    roots = np.where(better, polished, roots)
    return _cluster(roots)


def _sort_points(points: Sequence[complex]) -> list[complex]:
    return sorted((complex(p) for p in points), key=lambda z: (abs(z), cmath.phase(z)))


def blaschke_factor(zero: complex, z: Any) -> Any:
    """(z - z0) / (1 - conj(z0) z)."""
    return (z - zero) / (1 - np.conj(zero) * z)


@dataclass(frozen=True)
class SymbolSpec:
    """The weight psi = B * p / q.

    Attributes:
        numerator: Ascending coefficients of p
        denominator: Ascending coefficients of q
        blaschke_zeros: Zeros of the finite Blaschke product B

    Raises:
        InvalidSymbol: If p vanishes identically, q has a root in the closed
            disk or a Blaschke zero lies outside the open disk
    """

    numerator: tuple[complex, ...]
    denominator: tuple[complex, ...] = (1 + 0j,)
    blaschke_zeros: tuple[complex, ...] = ()
    _num: np.ndarray = field(init=False, repr=False, compare=False)
    _den: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        num = _trim(self.numerator)
        den = _trim(self.denominator)
        if num.size == 0:
            raise InvalidSymbol("The weight vanishes identically")
        if den.size == 0:
            raise InvalidSymbol("The denominator vanishes identically")
        for zero in self.blaschke_zeros:
            if not abs(zero) < 1.0:
                raise InvalidSymbol(f"Blaschke zero {zero} is not inside the unit disk")
        poles = polynomial_roots(den)
        if poles.size and float(np.min(np.abs(poles))) <= 1.0 + TOLERANCES.denominator_margin:
            raise InvalidSymbol(f"Denominator has a root of modulus {np.min(np.abs(poles)):.12g} in the closed disk")
        object.__setattr__(self, "numerator", tuple(complex(c) for c in num))
        object.__setattr__(self, "denominator", tuple(complex(c) for c in den))
        object.__setattr__(self, "blaschke_zeros", tuple(complex(z) for z in self.blaschke_zeros))
        object.__setattr__(self, "_num", num)
        object.__setattr__(self, "_den", den)

    @classmethod
    def constant(cls, value: complex) -> SymbolSpec:
        return cls((complex(value),))

    @classmethod
    def polynomial(cls, coeffs: Sequence[complex], blaschke: Sequence[complex] = ()) -> SymbolSpec:
        return cls(tuple(complex(c) for c in coeffs), (1 + 0j,), tuple(complex(z) for z in blaschke))

    @property
    def num(self) -> np.ndarray:
        return self._num

    @property
    def den(self) -> np.ndarray:
        return self._den

    def __call__(self, z: Any) -> Any:
        """Vectorized evaluation without domain checks."""
        value = P.polyval(z, self._num) / P.polyval(z, self._den)
        for zero in self.blaschke_zeros:
            value = value * blaschke_factor(zero, z)
        return value

    def numerator_zeros(self) -> np.ndarray:
        return polynomial_roots(self._num)

    def all_zeros(self) -> list[complex]:
        return list(self.numerator_zeros()) + list(self.blaschke_zeros)


@dataclass(frozen=True)
class ZeroReport:
    """Zeros of a weight bucketed by modulus.

    ``min_inner_radius`` is ``math.inf`` when no zero lies inside the disk.
    """

    zeros_inside: tuple[complex, ...]
    zeros_boundary: tuple[complex, ...]
    min_inner_radius: float

    @property
    def has_boundary_zero(self) -> bool:
        return bool(self.zeros_boundary)


# ---------------------------------------------------------------------------
# Evaluation and zeros
# ---------------------------------------------------------------------------


def evaluate(s: SymbolSpec, z: complex) -> complex:
    """psi(z) on the closed disk.

    Raises:
        OutsideClosedDisk: If |z| > 1
    """
    z = complex(z)
    if abs(z) > 1.0 + TOLERANCES.evaluation_slack:
        raise OutsideClosedDisk(f"Point {z} lies outside the closed unit disk")
    return complex(s(z))


def zero_report(s: SymbolSpec, tol: float | None = None) -> ZeroReport:
    """Bucket the zeros of psi into interior and boundary zeros."""
    tol = TOLERANCES.zero_bucket if tol is None else tol
    if not 0.0 < tol <= 1e-3:
        raise InvalidParameter(f"Zero bucket tolerance must lie in (0, 1e-3], got {tol}")
    zeros = s.all_zeros()
    inside = _sort_points([z for z in zeros if abs(z) < 1.0 - tol])
    boundary = _sort_points([z for z in zeros if abs(abs(z) - 1.0) <= tol])
    radius = abs(inside[0]) if inside else math.inf
    return ZeroReport(tuple(inside), tuple(boundary), radius)


def is_invertible_weight(s: SymbolSpec) -> bool:
    """True iff psi has no zero in the closed disk, so that 1/psi is bounded."""
    if s.blaschke_zeros:
        return False
    report = zero_report(s)
    return not report.zeros_inside and not report.zeros_boundary


# ---------------------------------------------------------------------------
# Circle means
# ---------------------------------------------------------------------------


def _periodic_mean(integrand: Callable[[np.ndarray], np.ndarray], what: str) -> float:
    """Trapezoid mean of a 2pi-periodic function with node doubling."""
    n = TOLERANCES.quadrature_initial_nodes
    total = float(np.sum(integrand(2 * np.pi * np.arange(n) / n)))
    mean = total / n
    while n < TOLERANCES.quadrature_max_nodes:
        midpoints = 2 * np.pi * (np.arange(n) + 0.5) / n
        total += float(np.sum(integrand(midpoints)))
        n *= 2
        refined = total / n
        change = abs(math.exp(refined) - math.exp(mean)) if max(refined, mean) < _LOG_MAX else math.inf
        mean = refined
        if change <= TOLERANCES.quadrature * max(1.0, math.exp(min(mean, _LOG_MAX))):
            logger.debug("%s converged with %d nodes", what, n)
            return mean
    raise QuadratureNonConvergence(f"{what} did not stabilize within {n} nodes")


def delta_psi(s: SymbolSpec, r: float) -> float:
    """exp of the mean of log|psi| over the circle of radius r.

    Routed through :func:`jensen_delta` when a zero lies on that circle.

    Raises:
        InvalidParameter: If r is outside [0, 1]
        QuadratureNonConvergence: If node doubling does not stabilize
    """
    if not 0.0 <= r <= 1.0:
        raise InvalidParameter(f"Radius must lie in [0, 1], got {r}")
    if r == 0.0:
        return abs(complex(s(0j)))
    if any(abs(abs(z) - r) <= TOLERANCES.zero_on_circle for z in s.all_zeros()):
        logger.debug("zero on the radius-%g circle, using Jensen's formula", r)
        return jensen_delta(s, r)
    mean = _periodic_mean(lambda t: np.log(np.abs(s(r * np.exp(1j * t)))), f"log-modulus mean at r={r}")
    return math.exp(mean)


def jensen_delta(s: SymbolSpec, r: float) -> float:
    """Jensen's formula evaluation of :func:`delta_psi`.

    A zero of order m at the origin is divided out first and contributes r^m.
    """
    if not 0.0 <= r <= 1.0:
        raise InvalidParameter(f"Radius must lie in [0, 1], got {r}")
    num = s.num
    order = _zero_order(num)
    reduced = num[order:]
    lead = complex(reduced[0]) / complex(s.den[0])
    for zero in s.blaschke_zeros:
        if zero == 0:
            order += 1
        else:
            lead *= -zero
    zeros = [z for z in polynomial_roots(reduced)] + [z for z in s.blaschke_zeros if z != 0]
    if r == 0.0:
        return abs(lead) if order == 0 else 0.0
    log_value = math.log(abs(lead)) + order * math.log(r)
    log_value += sum(math.log(r / abs(z)) for z in zeros if abs(z) < r)
    return math.exp(log_value)


def outer_modulus_closed_form(s: SymbolSpec, a: complex) -> float:
    """|v(a)| for the outer part v of psi, in closed form.

    Interior and boundary zeros of p contribute |1 - conj(z_k) a|, exterior
    zeros |a - z_k|; the Blaschke part has modulus one on the circle.
    """
    a = complex(a)
    if not abs(a) < 1.0:
        raise OutsideDisk(f"Point {a} is not inside the unit disk")
    log_value = math.log(abs(complex(s.num[-1])))
    for zero in polynomial_roots(s.num):
        if abs(zero) <= 1.0:
            log_value += math.log(abs(1 - zero.conjugate() * a))
        else:
            log_value += math.log(abs(a - zero))
    log_value -= math.log(abs(complex(P.polyval(a, s.den))))
    return math.exp(log_value)


def outer_modulus_at(s: SymbolSpec, a: complex) -> float:
    """|v(a)| as the Poisson integral of log|psi| over the unit circle.

    Weights with boundary zeros go through :func:`outer_modulus_closed_form`.

    Raises:
        OutsideDisk: If |a| >= 1
        QuadratureNonConvergence: If node doubling does not stabilize
    """
    a = complex(a)
    if not abs(a) < 1.0:
        raise OutsideDisk(f"Point {a} is not inside the unit disk")
    if zero_report(s).has_boundary_zero:
        logger.debug("boundary zero present, using the closed-form outer modulus")
        return outer_modulus_closed_form(s, a)
    weight = 1.0 - abs(a) ** 2

    def integrand(t: np.ndarray) -> np.ndarray:
        w = np.exp(1j * t)
        return weight / np.abs(w - a) ** 2 * np.log(np.abs(s(w)))

    return math.exp(_periodic_mean(integrand, f"Poisson integral at a={a}"))


# ---------------------------------------------------------------------------
# Cocycles and ergodic averages
# ---------------------------------------------------------------------------


def cocycle_log(s: SymbolSpec, m: MobiusMap, n: int, z: complex) -> complex:
    """A logarithm of psi_(n)(z): the sum of principal logs of the factors.

    Raises:
        ZeroOnOrbit: If psi vanishes at some phi_k(z), k < n
    """
    if n < 0:
        raise InvalidParameter(f"Cocycle order must be nonnegative, got {n}")
    total = 0j
    current = complex(z)
    done = 0
    while done < n:
        count = min(_CHUNK, n - done)
        points = orbit(m, current, count + 1)
        values = s(points[:count])
        if np.any(values == 0):
            k = done + int(np.flatnonzero(values == 0)[0])
            raise ZeroOnOrbit(f"The weight vanishes at phi_{k}(z) = {points[k - done]}")
        total += complex(np.sum(np.log(values)))
        current = complex(points[count])
        done += count
    return total


def cocycle(s: SymbolSpec, m: MobiusMap, n: int, z: complex, *, log_space: bool | None = None) -> complex:
    """psi_(n)(z) = prod_{k<n} psi(phi_k(z)).

    Orbits longer than the log-space threshold are accumulated as logs.

    Raises:
        CocycleOverflow: If the product leaves the floating-point range
    """
    if n < 0:
        raise InvalidParameter(f"Cocycle order must be nonnegative, got {n}")
    if n == 0:
        return 1 + 0j
    if log_space is None:
        log_space = n > TOLERANCES.log_space_threshold
    if not log_space:
        with np.errstate(over="ignore", invalid="ignore"):
            value = complex(np.prod(s(orbit(m, complex(z), n))))
        if cmath.isfinite(value):
            return value
    try:
        log_value = cocycle_log(s, m, n, z)
    except ZeroOnOrbit:
        return 0j
    if log_value.real > _LOG_MAX:
        raise CocycleOverflow(f"|psi_(n)(z)| = exp({log_value.real:.6g}) is not representable")
    return cmath.exp(log_value)


def _rotation_multiplier(
    m: MobiusMap, rational_tolerance: float | None = None, max_period: int | None = None
) -> complex:
    info = classify(m, rational_tolerance=rational_tolerance, max_period=max_period)
    if info.kind != MapKind.ELLIPTIC_IRRATIONAL or abs(info.fixed_points[0]) > TOLERANCES.boundary_fixed_point:
        raise WrongKind("Ergodic averages need an irrational rotation about the origin")
    return info.multiplier / abs(info.multiplier)


def ergodic_trace(
    s: SymbolSpec,
    m: MobiusMap,
    z: complex,
    n: int,
    every: int,
    *,
    rational_tolerance: float | None = None,
    max_period: int | None = None,
) -> list[tuple[int, float]]:
    """Running averages (1/k) sum_{j=1..k} log|psi(phi_j(z))| at k = every, 2 every, ..., n.

    Orbit points are computed as eta^j z from the multiplier, which keeps
    boundary orbits on the circle for any n.

    Raises:
        WrongKind: If m is not an irrational rotation about 0
        ZeroOnOrbit: If psi vanishes on the orbit
    """
    if n < 1 or every < 1:
        raise InvalidParameter(f"Need n >= 1 and every >= 1, got n={n}, every={every}")
    z = complex(z)
    if abs(z) > 1.0 + TOLERANCES.evaluation_slack:
        raise OutsideClosedDisk(f"Point {z} lies outside the closed unit disk")
    eta = _rotation_multiplier(m, rational_tolerance, max_period)
    angle = cmath.phase(eta)
    trace: list[tuple[int, float]] = []
    total = 0.0
    for start in range(1, n + 1, _CHUNK):
        k = np.arange(start, min(start + _CHUNK, n + 1))
        values = np.abs(s(z * np.exp(1j * angle * k)))
        if np.any(values == 0):
            raise ZeroOnOrbit(f"The weight vanishes at phi_{int(k[np.argmax(values == 0)])}(z)")
        partial = total + np.cumsum(np.log(values))
        marks = np.flatnonzero((k % every == 0) | (k == n))
        trace.extend((int(k[i]), float(partial[i] / k[i])) for i in marks)
        total = float(partial[-1])
    return trace


def ergodic_average(
    s: SymbolSpec,
    m: MobiusMap,
    z: complex,
    n: int,
    *,
    rational_tolerance: float | None = None,
    max_period: int | None = None,
) -> float:
    """(1/n) sum_{k=1..n} log|psi(phi_k(z))|."""
    trace = ergodic_trace(s, m, z, n, n, rational_tolerance=rational_tolerance, max_period=max_period)
    return trace[-1][1]


def sup_cocycle_root(s: SymbolSpec, m: MobiusMap, n: int, samples: int) -> float:
    """max over equispaced boundary points of (prod_{k=1..n} |psi(phi_k(z))|)^(1/n)."""
    if n < 1 or samples < 1:
        raise InvalidParameter(f"Need n >= 1 and samples >= 1, got n={n}, samples={samples}")
    points = np.exp(2j * np.pi * np.arange(samples) / samples)
    sums = np.zeros(samples)
    with np.errstate(divide="ignore"):
        for _ in range(n):
            points = m(points)
            points /= np.abs(points)
            sums += np.log(np.abs(s(points)))
    return float(np.exp(np.max(sums) / n))


# ---------------------------------------------------------------------------
# Symbol algebra
# ---------------------------------------------------------------------------


def product(s1: SymbolSpec, s2: SymbolSpec) -> SymbolSpec:
    """The pointwise product psi_1 * psi_2."""
    return SymbolSpec(
        tuple(P.polymul(s1.num, s2.num)),
        tuple(P.polymul(s1.den, s2.den)),
        s1.blaschke_zeros + s2.blaschke_zeros,
    )


def _homogenize(coeffs: np.ndarray, g: MobiusMap, degree: int) -> np.ndarray:
    # sum_k c_k (a z + b)^k (c z + d)^(degree - k)
    out = np.zeros(1, dtype=complex)
    for k, coeff in enumerate(coeffs):
        term = P.polymul(P.polypow([g.b, g.a], k), P.polypow([g.d, g.c], degree - k))
        out = P.polyadd(out, coeff * term)
    return out


def compose_automorphism(s: SymbolSpec, g: MobiusMap) -> SymbolSpec:
    """psi o g for a disk automorphism g, again in the rational times Blaschke class."""
    degree = max(len(s.num), len(s.den)) - 1
    num = _homogenize(s.num, g, degree)
    den = _homogenize(s.den, g, degree)
    g_inv = inverse(g)
    zeros = tuple(complex(g_inv(b)) for b in s.blaschke_zeros)
    # each B_b o g is a Blaschke factor at g^{-1}(b) up to a unimodular constant
    anchor = next(p for p in (0.5 + 0j, -0.5 + 0j, 0.5j) if all(abs(p - w) > 1e-3 for w in zeros))
    constant = 1 + 0j
    for b, w in zip(s.blaschke_zeros, zeros, strict=True):
        constant *= complex(blaschke_factor(b, g(anchor)) / blaschke_factor(w, anchor))
    constant /= abs(constant) if constant != 0 else 1.0
    return SymbolSpec(tuple(constant * num), tuple(den), zeros)
