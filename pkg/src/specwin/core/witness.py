"""Approximate eigenvectors of C* built from reproducing kernels.

Every construction here produces a finite kernel combination h together
with the residual ||(C* - mu) h|| / ||h||, where mu is the adjoint
parameter. A run for the spectral point lambda of C works with
mu = conj(lambda); residuals are evaluated exactly through the adjoint
action on kernels, never through a truncation.

Constructions:

- Backward orbits of hyperbolic and parabolic maps, in normalized kernels
  carried by the half-plane chart
- Exact eigenvectors for rotations of finite order
- Rotation orbits near a boundary zero, guarded by an interpolating
  Blaschke product
- Rotation orbits near an interior zero of minimal modulus, with the
  root-of-unity parameter grid
- Return-time orbits on a level circle
"""

from __future__ import annotations

import cmath
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..settings import TOLERANCES, WITNESS
from ..types import (
    InvalidParameter,
    LambdaOutsideGuarantee,
    MapKind,
    NoBoundaryZero,
    OutsideClosedDisk,
    OutsideDisk,
    RationalMultiplier,
    ReturnTimesUnavailable,
    TooCloseToParabolicFixedPoint,
    UnsupportedKind,
    WitnessKind,
    WrongKind,
    ZeroOnBackwardOrbit,
    ZeroOnOrbit,
)
from ..utils.validation import complex_to_pair
from .mobius import (
    Classification,
    MobiusMap,
    automorphism_to,
    classify,
    half_plane_model,
    inverse,
    orbit,
    return_times,
)
from .oracle import backward_orbit_guarantee
from .space import (
    KernelCombination,
    SpaceSpec,
    adjoint_on_kernels,
    combine,
    combo_norm,
    kernel_norm,
    merge_terms,
    rotation_orbit_norms,
    shift_adjoint_on_kernels,
)
from .symbol import SymbolSpec, compose_automorphism, delta_psi, outer_modulus_at, zero_report

logger = logging.getLogger(__name__)

_LOG_CAP = 700.0
_ZERO_WEIGHT = 1e-14


@dataclass(frozen=True)
class WitnessSchedule:
    """Scan budgets that make the non-constructive choices concrete.

    ``rational_tolerance`` and ``max_period`` are the classifier cutoff that
    decides whether a rotation counts as rational.
    """

    stages: int = WITNESS.stages
    candidates: int = WITNESS.candidates
    max_orbit_steps: int = WITNESS.max_orbit_steps
    birkhoff_fraction: float = WITNESS.birkhoff_fraction
    n_terms: int = WITNESS.n_terms
    base_points: int = WITNESS.base_points
    blaschke_guard: float = WITNESS.blaschke_guard
    parabolic_epsilon: float = WITNESS.parabolic_epsilon
    rational_tolerance: float = TOLERANCES.rational
    max_period: int = TOLERANCES.rational_max_period

    def classification(self, m: MobiusMap) -> Classification:
        return classify(m, rational_tolerance=self.rational_tolerance, max_period=self.max_period)


@dataclass(frozen=True, eq=False)
class WitnessStage:
    """One vector of a witness run.

    ``norm`` and ``floor`` are measured in units where the leading kernel
    of the stage has norm one, except for the level-circle and
    rational-rotation constructions whose floor is ||K_{z0}|| itself.
    """

    index: int
    n: int
    vector: KernelCombination | None
    residual: float
    floor: float
    norm: float
    point: complex | None = None
    lam: complex | None = None


@dataclass(eq=False)
class WitnessRun:
    """A sequence of witness stages for one spectral point."""

    construction: WitnessKind
    lam: complex
    stages: list[WitnessStage] = field(default_factory=list)
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def residuals(self) -> list[float]:
        return [stage.residual for stage in self.stages]

    @property
    def final_residual(self) -> float:
        return self.stages[-1].residual if self.stages else math.inf

    @property
    def exhausted(self) -> bool:
        return bool(self.metadata.get("exhausted", False))


# ---------------------------------------------------------------------------
# Blaschke products and base points
# ---------------------------------------------------------------------------


def blaschke_eval(zeros: Sequence[complex], z: Any) -> Any:
    """Finite Blaschke product prod (z - z_k) / (1 - conj(z_k) z)."""
    zs = np.asarray(zeros, dtype=complex).ravel()
    if zs.size and not np.all(np.abs(zs) < 1.0):
        raise OutsideDisk("Blaschke zeros must lie inside the unit disk")
    w = np.asarray(z, dtype=complex)
    if np.any(np.abs(w) > 1.0 + TOLERANCES.evaluation_slack):
        raise OutsideClosedDisk("Blaschke products are evaluated on the closed disk")
    value = np.ones_like(w)
    for zero in zs:
        value = value * (w - zero) / (1 - np.conj(zero) * w)
    return complex(value) if value.ndim == 0 else value


def hyperbolic_floor(s: float, n_terms: int) -> float:
    """prod_{k=1..n} (1 - s^k) / (1 + s^k)."""
    if not 0.0 < s < 1.0:
        raise InvalidParameter(f"Dilation parameter must lie in (0, 1), got {s}")
    powers = s ** np.arange(1, n_terms + 1)
    return float(np.prod((1 - powers) / (1 + powers)))


def blaschke_lower_bound(m: MobiusMap, z: complex, n_terms: int, *, epsilon: float | None = None) -> float:
    """Partial product prod_{k=1..n} d(z, phi_k(z)) along the forward orbit.

    Since d(z, phi_k(z)) = d(phi^{-k}(z), z) this is also the separation
    product of the backward orbit. It is evaluated in the half-plane chart,
    where the backward iterates have closed forms.

    Raises:
        WrongKind: For elliptic maps and the identity
        TooCloseToParabolicFixedPoint: If z is within ``epsilon`` of a parabolic fixed point
    """
    if n_terms < 0:
        raise InvalidParameter(f"n_terms must be nonnegative, got {n_terms}")
    if n_terms == 0:
        return 1.0
    z = complex(z)
    if not abs(z) < 1.0:
        raise OutsideDisk(f"Point {z} is not inside the unit disk")
    info = classify(m)
    if info.kind not in (MapKind.HYPERBOLIC, MapKind.PARABOLIC):
        raise WrongKind(f"Orbit separation bounds need a hyperbolic or parabolic map, not {info.kind.value}")
    epsilon = WITNESS.parabolic_epsilon if epsilon is None else epsilon
    if info.kind == MapKind.PARABOLIC and abs(z - complex(info.denjoy_wolff)) < epsilon:  # type: ignore[arg-type]
        raise TooCloseToParabolicFixedPoint(f"{z} is within {epsilon:g} of the parabolic fixed point")
    sigma, canonical = half_plane_model(m, info)
    w0 = complex(sigma(z))
    w = np.asarray(canonical.backward(w0, np.arange(1, n_terms + 1)), dtype=complex)
    return float(np.prod(np.abs(w - w0) / np.abs(w0 - np.conj(w))))


def ray_base_points(zero: complex, count: int) -> list[complex]:
    """Points approaching ``zero`` along the ray from the origin (1/(n+1) for a zero at 0)."""
    zero = complex(zero)
    if abs(zero) > 1.0 + TOLERANCES.evaluation_slack:
        raise OutsideClosedDisk(f"Zero {zero} lies outside the closed unit disk")
    k = np.arange(1, count + 1)
    if zero == 0:
        return [complex(v) for v in 1.0 / (k + 1)]
    return [complex(v) for v in zero * (1.0 - 1.0 / (k + 1))]


def admissible_base_points(
    s: SymbolSpec, m: MobiusMap, points: Sequence[complex], n_terms: int, *, threshold: float = 1e-8
) -> list[complex]:
    """Drop base points whose backward orbit passes within ``threshold`` of a zero of psi."""
    back = inverse(m)
    kept = []
    for z in points:
        trail = orbit(back, complex(z), n_terms + 1)[1:]
        if trail.size == 0 or float(np.min(np.abs(s(trail)))) > threshold:
            kept.append(complex(z))
        else:
            logger.debug("base point %s skipped: the weight nearly vanishes on its backward orbit", z)
    return kept


# ---------------------------------------------------------------------------
# Elliptic normalization
# ---------------------------------------------------------------------------


def normalize_elliptic(s: SymbolSpec, m: MobiusMap) -> tuple[SymbolSpec, complex, MobiusMap | None]:
    """Conjugate an elliptic map to the rotation z -> eta z.

    Returns (psi o g, eta, g) with g the involution exchanging 0 and the
    interior fixed point, or g = None when that point is already 0.
    C_{psi,phi} is similar to C_{psi o g, g o phi o g} through C_g.
    """
    info = classify(m)
    if not info.is_elliptic:
        raise WrongKind(f"Elliptic normalization needs an elliptic map, not {info.kind.value}")
    eta = info.multiplier / abs(info.multiplier)
    a = complex(info.fixed_points[0])
    if abs(a) <= TOLERANCES.boundary_fixed_point:
        return s, eta, None
    g = automorphism_to(a)
    return compose_automorphism(s, g), eta, g


def _irrational_rotation(
    s: SymbolSpec, m: MobiusMap, rational_error: type[Exception], schedule: WitnessSchedule
) -> tuple[SymbolSpec, complex, Classification]:
    info = schedule.classification(m)
    if info.kind == MapKind.ELLIPTIC_RATIONAL or info.kind == MapKind.IDENTITY:
        raise rational_error(f"The rotation has finite order {info.period}")
    if info.kind != MapKind.ELLIPTIC_IRRATIONAL:
        raise WrongKind(f"Rotation witnesses need an elliptic map, not {info.kind.value}")
    psi, eta, _ = normalize_elliptic(s, m)
    return psi, eta, info


def _capped_exp(value: float) -> float:
    return math.exp(min(value, _LOG_CAP))


def _two_term_norm(sp: SpaceSpec, first: complex, at_first: complex, second: complex, at_second: complex) -> float:
    return combo_norm(KernelCombination(np.array([first, -second]), np.array([at_first, at_second]), sp))


def _birkhoff_length(psi: SymbolSpec, point: complex, angle: float, log_level: float, n_floor: int, n_max: int) -> int | None:
    """First n >= n_floor with sum_{k=1..n} log|psi(e^{-ik angle} point)| > n log_level."""
    k = np.arange(1, n_max + 1)
    with np.errstate(divide="ignore"):
        sums = np.cumsum(np.log(np.abs(psi(point * np.exp(-1j * angle * k)))))
    hits = np.flatnonzero((k >= n_floor) & (sums > k * log_level))
    return int(k[hits[0]]) if hits.size else None


def _admissible_radius(
    psi: SymbolSpec, point: complex, angle: float, n: int, log_level: float, guard: float, previous: float
) -> tuple[float, float] | None:
    """Smallest r = 1 - 2^-t above ``previous`` where the Blaschke guard and the product bound hold."""
    rot = np.exp(-1j * angle * np.arange(1, n + 1))
    gaps = np.abs(1 - rot)
    for t in range(1, 53):
        r = 1.0 - 2.0**-t
        if r <= previous:
            continue
        log_guard = float(np.sum(np.log(r * gaps) - np.log(np.abs(1 - rot * r * r))))
        with np.errstate(divide="ignore"):
            log_product = float(np.sum(np.log(np.abs(psi(r * point * rot)))))
        if log_guard > math.log(guard) and log_product > n * log_level:
            return r, math.exp(log_guard)
    return None


def _rotation_chain(
    psi: SymbolSpec, z: complex, angle: float, n: int, log_mu: complex | None
) -> tuple[np.ndarray, np.ndarray, float, complex]:
    """Coefficients of K_z + sum_k mu^k u_k K_{conj(eta)^k z} on the backward rotation orbit.

    Returns (points, scaled coefficients, log scale, log u_n) with
    u_k = 1 / prod_{s=1..k} conj(psi(conj(eta)^s z)).
    """
    k = np.arange(n + 1)
    points = z * np.exp(-1j * angle * k)
    weights = np.conj(psi(points[1:]))
    if np.any(np.abs(weights) == 0):
        raise ZeroOnOrbit("The weight vanishes on the backward rotation orbit")
    log_u = -np.cumsum(np.log(weights))
    log_coeff = np.zeros(n + 1, dtype=complex)
    if log_mu is None:
        coeffs = np.zeros(n + 1, dtype=complex)
        coeffs[0] = 1.0
        return points, coeffs, 0.0, complex(log_u[-1]) if n else 0j
    log_coeff[1:] = k[1:] * log_mu + log_u
    shift = float(np.max(log_coeff.real))
    return points, np.exp(log_coeff - shift), shift, complex(log_u[-1]) if n else 0j


# ---------------------------------------------------------------------------
# Constructions
# ---------------------------------------------------------------------------


def witness_backward_orbit(
    s: SymbolSpec,
    m: MobiusMap,
    sp: SpaceSpec,
    lam: complex,
    base_points: Sequence[complex],
    n_terms: int,
    *,
    epsilon: float | None = None,
) -> WitnessRun:
    """Chains of normalized kernels along backward orbits.

    For each base point z the stage vector is
    h = e_0 + sum_{k=1..n} mu^k a_k e_k with e_k the normalized kernel at
    phi^{-k}(z), a_k = 1 / (u_1 ... u_k) and
    u_k = conj(psi(z_k)) ||K_{z_{k-1}}|| / ||K_{z_k}||. Points live in the
    half-plane chart of the map so that orbits hugging the circle keep
    full precision.

    Raises:
        WrongKind: For elliptic maps and the identity
        LambdaOutsideGuarantee: If |lambda| is not below |psi(b)| phi'(b)^(-e)
        ZeroOnBackwardOrbit: If psi vanishes at some phi^{-k}(z), k >= 1
        TooCloseToParabolicFixedPoint: If a base point crowds a parabolic fixed point
    """
    info = classify(m)
    if info.kind not in (MapKind.HYPERBOLIC, MapKind.PARABOLIC):
        raise WrongKind(f"Backward-orbit witnesses need a hyperbolic or parabolic map, not {info.kind.value}")
    if n_terms < 0:
        raise InvalidParameter(f"n_terms must be nonnegative, got {n_terms}")
    lam = complex(lam)
    guarantee = backward_orbit_guarantee(s, m, sp)
    if not abs(lam) < guarantee:
        raise LambdaOutsideGuarantee(f"|lambda| = {abs(lam):.6g} is not below the guaranteed radius {guarantee:.6g}")

    sigma, canonical = half_plane_model(m, info)
    chart = inverse(sigma)
    mu = lam.conjugate()
    gamma = sp.gamma
    epsilon = WITNESS.parabolic_epsilon if epsilon is None else epsilon
    dw = complex(info.denjoy_wolff)  # type: ignore[arg-type]
    k = np.arange(n_terms + 1)

    run = WitnessRun(
        WitnessKind.BACKWARD_ORBIT,
        lam,
        metadata={
            "guarantee": guarantee,
            "canonical": canonical.kind.value,
            "canonical_value": canonical.value,
            "space": sp.label(),
            "adjoint_parameter": list(complex_to_pair(mu)),
            "n_terms": n_terms,
        },
    )
    for index, base in enumerate(base_points):
        z = complex(base)
        if not abs(z) < 1.0:
            raise OutsideDisk(f"Base point {z} is not inside the unit disk")
        if info.kind == MapKind.PARABOLIC and abs(z - dw) < epsilon:
            raise TooCloseToParabolicFixedPoint(f"Base point {z} is within {epsilon:g} of the fixed point")

        w = np.asarray(canonical.backward(sigma(z), k), dtype=complex)
        trial = KernelCombination(np.ones(n_terms + 1), w, sp, normalized=True, chart=chart)
        defect = trial.log_defect()
        weights = np.conj(s(trial.disk_points))
        if n_terms and np.any(np.abs(weights[1:]) == 0):
            raise ZeroOnBackwardOrbit(f"The weight vanishes on the backward orbit of {z}")

        coeffs = np.zeros(n_terms + 1, dtype=complex)
        coeffs[0] = 1.0
        if mu != 0 and n_terms:
            log_u = np.log(weights[1:]) - 0.5 * gamma * (defect[:-1] - defect[1:])
            log_coeff = k[1:] * cmath.log(mu) - np.cumsum(log_u)
            coeffs[1:] = np.exp(np.minimum(log_coeff.real, _LOG_CAP) + 1j * log_coeff.imag)

        h = KernelCombination(coeffs, w, sp, normalized=True, chart=chart)
        image = adjoint_on_kernels(h, s, m, chart_action=canonical.apply)
        norm = combo_norm(h)
        residual = combo_norm(merge_terms(combine((1.0, image), (-mu, h)))) / norm
        floor = blaschke_lower_bound(m, z, n_terms, epsilon=epsilon)
        logger.debug("backward orbit stage %d at %s: residual %.3e, floor %.4f", index, z, residual, floor)
        run.stages.append(WitnessStage(index, n_terms, h, residual, floor, norm, point=z, lam=lam))
    return run


def witness_rational_rotation(
    s: SymbolSpec,
    m: MobiusMap,
    sp: SpaceSpec,
    z0: complex,
    *,
    root: int | None = None,
    rational_tolerance: float | None = None,
    max_period: int | None = None,
) -> WitnessRun:
    """Exact eigenvectors of C* for an automorphism of finite order n0.

    With lambda0^n0 = psi_(n0)(z0) the vector
    h = K_{z0} + sum_{k=1..n0-1} prod_{s<k} conj(psi(phi_s(z0))) / conj(lambda0)^k K_{phi_k(z0)}
    satisfies C* h = conj(lambda0) h. Without an explicit ``root`` the
    n0-th root maximizing ||h|| is used, which guarantees ||h|| >= ||K_{z0}||.
    When psi vanishes at phi_k(z0) the kernel there is an eigenvector for 0.
    """
    info = classify(m, rational_tolerance=rational_tolerance, max_period=max_period)
    if info.kind not in (MapKind.ELLIPTIC_RATIONAL, MapKind.IDENTITY):
        raise WrongKind(f"Exact rotation eigenvectors need a map of finite order, not {info.kind.value}")
    z0 = complex(z0)
    if not abs(z0) < 1.0:
        raise OutsideDisk(f"Point {z0} is not inside the unit disk")
    n0 = int(info.period or 1)
    points = orbit(m, z0, n0)
    values = s(points)

    zero_hits = np.flatnonzero(np.abs(values) <= _ZERO_WEIGHT)
    if zero_hits.size:
        x = complex(points[zero_hits[0]])
        h = KernelCombination(np.array([1.0 + 0j]), np.array([x]), sp)
        norm = combo_norm(h)
        residual = combo_norm(adjoint_on_kernels(h, s, m)) / norm
        stage = WitnessStage(0, n0, h, residual, norm, norm, point=x, lam=0j)
        return WitnessRun(WitnessKind.RATIONAL_ROTATION_EXACT, 0j, [stage], {"n0": n0, "zero_branch": True})

    log_weights = np.log(np.conj(values))
    log_partial = np.concatenate([[0], np.cumsum(log_weights)[:-1]])
    log_base = complex(np.sum(np.log(values))) / n0
    choices = range(n0) if root is None else [root % n0]
    best: tuple[float, complex, KernelCombination] | None = None
    for j in choices:
        lam0 = cmath.exp(log_base + 2j * math.pi * j / n0)
        coeffs = np.exp(log_partial - np.arange(n0) * cmath.log(lam0.conjugate()))
        h = KernelCombination(coeffs, points, sp)
        norm = combo_norm(h)
        if best is None or norm > best[0]:
            best = (norm, lam0, h)
    assert best is not None
    norm, lam0, h = best
    image = adjoint_on_kernels(h, s, m)
    residual = combo_norm(merge_terms(combine((1.0, image), (-lam0.conjugate(), h)))) / norm
    floor = kernel_norm(sp, z0) if root is None else min(norm, kernel_norm(sp, z0))
    logger.debug("rational rotation n0=%d at %s: lambda0=%s residual %.3e", n0, z0, lam0, residual)
    stage = WitnessStage(0, n0, h, residual, floor, norm, point=z0, lam=lam0)
    return WitnessRun(WitnessKind.RATIONAL_ROTATION_EXACT, lam0, [stage], {"n0": n0, "zero_branch": False})


def witness_elliptic_boundary(
    s: SymbolSpec, m: MobiusMap, sp: SpaceSpec, lam: complex, schedule: WitnessSchedule | None = None
) -> WitnessRun:
    """Rotation chains anchored near a boundary zero of the weight.

    Stage j scans boundary points zeta_j approaching the zero for an orbit
    length n_j whose Birkhoff sum beats n_j log q, then pushes
    z_j = r zeta_j inside until the Blaschke product over the orbit points
    exceeds the guard at z_j. The residual of
    h_j = K_{z_j} + sum_k mu^k u_k K_{conj(eta)^k z_j} is exact:
    (C* - mu) h_j = conj(psi(z_j)) K_{eta z_j} - mu^{n+1} u_n K_{conj(eta)^n z_j}.

    Raises:
        NoBoundaryZero: If the weight has no zero on the circle
        LambdaOutsideGuarantee: If |lambda| >= |v(0)|
    """
    schedule = schedule or WitnessSchedule()
    psi, eta, info = _irrational_rotation(s, m, RationalMultiplier, schedule)
    report = zero_report(psi)
    if not report.zeros_boundary:
        raise NoBoundaryZero("The weight has no zero on the unit circle")
    zeta = report.zeros_boundary[0] / abs(report.zeros_boundary[0])
    target = outer_modulus_at(psi, 0j)
    lam = complex(lam)
    if not abs(lam) < target:
        raise LambdaOutsideGuarantee(f"|lambda| = {abs(lam):.6g} is not below |v(0)| = {target:.6g}")

    level_q = abs(lam) + schedule.birkhoff_fraction * (target - abs(lam))
    level_p = 0.5 * (abs(lam) + level_q)
    mu = lam.conjugate()
    log_mu = cmath.log(mu) if mu != 0 else None
    angle = cmath.phase(eta)

    run = WitnessRun(
        WitnessKind.ELLIPTIC_BOUNDARY_ZERO,
        lam,
        metadata={"target": target, "q": level_q, "p": level_p, "zero": list(complex_to_pair(zeta)), "exhausted": False},
    )
    previous = 0.0
    for j in range(schedule.stages):
        n_floor = 8 * (j + 1)
        offset = 2.0 ** -(j + 3)
        chosen: tuple[complex, int] | None = None
        for c in range(schedule.candidates):
            candidate = zeta * cmath.exp(1j * offset * (1 + c / schedule.candidates))
            n = _birkhoff_length(psi, candidate, angle, math.log(level_q), n_floor, schedule.max_orbit_steps)
            if n is not None:
                chosen = (candidate, n)
                break
        admissible = None
        if chosen is not None:
            admissible = _admissible_radius(
                psi, chosen[0], angle, chosen[1], math.log(level_p), schedule.blaschke_guard, previous
            )
        if chosen is None or admissible is None:
            run.metadata["exhausted"] = True
            logger.warning("boundary-zero schedule exhausted at stage %d", j)
            break
        (zeta_j, n), (r, guard) = chosen, admissible
        previous = r
        z = r * zeta_j
        logger.info("stage %d: zeta=%s n=%d r=1-%.3g guard=%.3f", j, zeta_j, n, 1 - r, guard)

        points, coeffs, shift, log_un = _rotation_chain(psi, z, angle, n, log_mu)
        norm_scaled = float(rotation_orbit_norms(coeffs, z, np.conj(eta), sp)[0])
        head = np.conj(complex(psi(z))) * math.exp(-shift)
        tail = cmath.exp((n + 1) * log_mu + log_un - shift) if log_mu is not None else 0j
        residual = _two_term_norm(sp, head, eta * z, tail, complex(points[-1])) / norm_scaled
        norm = norm_scaled * _capped_exp(shift) / kernel_norm(sp, z)
        vector = KernelCombination(coeffs, points, sp)
        run.stages.append(WitnessStage(j, n, vector, residual, guard, norm, point=z, lam=lam))
    return run


def witness_inner_zero(
    s: SymbolSpec, m: MobiusMap, sp: SpaceSpec, t0: float, schedule: WitnessSchedule | None = None
) -> WitnessRun:
    """Rotation chains on the circle through an interior zero of minimal modulus R.

    Stage j picks z_j on that circle approaching the zero with a Birkhoff
    product above p^n, forms h_{j,m} for the parameters
    t0 exp(2 pi i m / (n+1)), m = 0..n, and keeps the m with largest norm;
    averaging over m shows that norm is at least ||K_{z_j}||.

    Raises:
        UnsupportedKind: If psi has no interior zero, or psi(0) = 0
        LambdaOutsideGuarantee: Unless 0 < t0 < Delta_psi(R)
    """
    schedule = schedule or WitnessSchedule()
    psi, eta, info = _irrational_rotation(s, m, RationalMultiplier, schedule)
    report = zero_report(psi)
    if not report.zeros_inside:
        raise UnsupportedKind("The weight has no zero inside the disk")
    radius = report.min_inner_radius
    if radius <= TOLERANCES.zero_bucket:
        raise UnsupportedKind("The weight vanishes at the fixed point, so the inner-zero annulus is empty")
    target = delta_psi(psi, radius)
    if not 0.0 < t0 < target:
        raise LambdaOutsideGuarantee(f"t0 must lie in (0, {target:.6g}), got {t0}")

    level_p = t0 + schedule.birkhoff_fraction * (target - t0)
    anchor = report.zeros_inside[0]
    angle = cmath.phase(eta)
    log_t0 = math.log(t0)

    run = WitnessRun(
        WitnessKind.ELLIPTIC_INNER_ZERO,
        complex(t0),
        metadata={"target": target, "p": level_p, "radius": radius, "exhausted": False},
    )
    for j in range(schedule.stages):
        n_floor = 8 * (j + 1)
        offset = 2.0 ** -(j + 3)
        chosen: tuple[complex, int] | None = None
        for c in range(schedule.candidates):
            candidate = anchor * cmath.exp(1j * offset * (1 + c / schedule.candidates))
            n = _birkhoff_length(psi, candidate, angle, math.log(level_p), n_floor, schedule.max_orbit_steps)
            if n is not None:
                chosen = (candidate, n)
                break
        if chosen is None:
            run.metadata["exhausted"] = True
            logger.warning("inner-zero schedule exhausted at stage %d", j)
            break
        z, n = chosen
        points, coeffs, shift, log_un = _rotation_chain(psi, z, angle, n, complex(log_t0))
        norms = rotation_orbit_norms(coeffs, z, np.conj(eta), sp, twist=1)
        best = int(np.argmax(norms))
        mu = t0 * cmath.exp(2j * math.pi * best / (n + 1))
        head = np.conj(complex(psi(z))) * math.exp(-shift)
        tail = cmath.exp((n + 1) * log_t0 + log_un - shift)
        residual = _two_term_norm(sp, head, eta * z, tail, complex(points[-1])) / float(norms[best])
        knorm = kernel_norm(sp, z)
        norm = float(norms[best]) * _capped_exp(shift) / knorm
        twisted = coeffs * np.exp(2j * math.pi * best * np.arange(n + 1) / (n + 1))
        vector = KernelCombination(twisted, points, sp)
        logger.info("stage %d: z=%s n=%d m=%d residual %.3e", j, z, n, best, residual)
        run.stages.append(WitnessStage(j, n, vector, residual, 1.0, norm, point=z, lam=mu.conjugate()))
    if run.stages:
        run.lam = run.stages[-1].lam  # type: ignore[assignment]
    return run


def witness_level_circle(
    s: SymbolSpec,
    m: MobiusMap,
    sp: SpaceSpec,
    r0: float,
    schedule: WitnessSchedule | None = None,
    *,
    z0: complex | None = None,
) -> WitnessRun:
    """Return-time chains on the circle of radius r0.

    For each return time n the parameters are the n-th roots of
    P_n = prod_{k<n} conj(psi(eta^k z0)); the stage keeps the root whose
    vector has the largest norm, which is at least ||K_{z0}||. The
    residual is |mu| ||K_{eta^n z0} - K_{z0}|| / ||h||. All return times
    up to the orbit budget are used.

    Raises:
        ReturnTimesUnavailable: For rotations of finite order
        ZeroOnOrbit: If psi vanishes on the orbit of z0
    """
    schedule = schedule or WitnessSchedule()
    psi, eta, info = _irrational_rotation(s, m, ReturnTimesUnavailable, schedule)
    if not 0.0 < r0 < 1.0:
        raise InvalidParameter(f"r0 must lie in (0, 1), got {r0}")
    z0 = complex(r0) if z0 is None else complex(z0)
    if abs(abs(z0) - r0) > 1e-12:
        raise InvalidParameter(f"z0 must lie on the circle of radius {r0}")
    try:
        times = [n for n in return_times(
            eta, 64, rational_tolerance=schedule.rational_tolerance, max_period=schedule.max_period
        ) if n <= schedule.max_orbit_steps]
    except RationalMultiplier as e:
        raise ReturnTimesUnavailable(str(e)) from e

    n_max = times[-1]
    angle = cmath.phase(eta)
    orbit_points = z0 * np.exp(1j * angle * np.arange(n_max + 1))
    weights = np.conj(psi(orbit_points[:n_max]))
    if np.any(np.abs(weights) == 0):
        raise ZeroOnOrbit(f"The weight vanishes on the orbit of {z0}")
    cumulative = np.concatenate([[0], np.cumsum(np.log(weights))])
    knorm = kernel_norm(sp, z0)

    run = WitnessRun(
        WitnessKind.ELLIPTIC_LEVEL_CIRCLE,
        0j,
        metadata={"target": delta_psi(psi, r0), "r0": r0, "return_times": times},
    )
    for j, n in enumerate(times):
        log_root = complex(cumulative[n]) / n
        log_g = cumulative[:n] - np.arange(n) * log_root
        shift = float(np.max(log_g.real))
        g = np.exp(log_g - shift)
        norms = rotation_orbit_norms(g, z0, eta, sp, twist=-1)
        best = int(np.argmax(norms))
        mu = cmath.exp(log_root + 2j * math.pi * best / n)
        gap = _two_term_norm(sp, 1.0, complex(orbit_points[n]), 1.0, z0)
        residual = abs(mu) * gap * math.exp(-shift) / float(norms[best])
        norm = float(norms[best]) * _capped_exp(shift)
        vector = KernelCombination(g * np.exp(-2j * math.pi * best * np.arange(n) / n), orbit_points[:n], sp)
        logger.debug("return time %d: |mu|=%.6f residual %.3e", n, abs(mu), residual)
        run.stages.append(WitnessStage(j, n, vector, residual, knorm, norm, point=z0, lam=mu.conjugate()))
    run.lam = run.stages[-1].lam  # type: ignore[assignment]
    return run


def rotate_witness(
    h: KernelCombination, s: SymbolSpec, m: MobiusMap, lam: complex
) -> tuple[KernelCombination, float, float]:
    """Rotate an approximate eigenvector of C* with the adjoint of multiplication by z.

    For a rotation phi(z) = eta z, C T_z = eta T_z C, so g = T_z^* h satisfies
    ||(C* - eta lam) g|| <= ||(C* - lam) h||. Returns g with both residual norms.
    """
    info = classify(m)
    if not info.is_elliptic or abs(info.fixed_points[0]) > TOLERANCES.boundary_fixed_point:
        raise WrongKind("Witness rotation needs a rotation about the origin")
    eta = info.multiplier / abs(info.multiplier)
    lam = complex(lam)
    before = combo_norm(merge_terms(combine((1.0, adjoint_on_kernels(h, s, m)), (-lam, h))))
    g = shift_adjoint_on_kernels(h)
    after = combo_norm(merge_terms(combine((1.0, adjoint_on_kernels(g, s, m)), (-eta * lam, g))))
    return g, before, after
