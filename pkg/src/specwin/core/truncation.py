"""Matrix compressions of weighted composition operators.

The operator f -> psi * (f o phi) is compressed to the span of the first N
orthonormal monomials e_n = z^n / beta_n. Column n holds the Taylor
coefficients of psi * phi^n, read off a discrete Cauchy integral on a circle
of radius rho and certified by a sample-doubling check.

Compression spectra of non-normal operators can pollute or omit spectral
points, so everything computed here is evidence for a prediction rather
than a proof of it.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ..settings import EXECUTION, TOLERANCES, TRUNCATION
from ..types import CoefficientExtractionUnstable, EigensolverNonconvergence, InvalidParameter
from .mobius import MobiusMap
from .space import SpaceSpec, basis_norms, kernel_coefficients
from .symbol import SymbolSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TruncationMatrix:
    """An N x N compression with its provenance.

    Attributes:
        entries: A[m, n] = (beta_m / beta_n) * c_m(psi * phi^n)
        symbol: The weight
        mobius: The automorphism
        space: The ambient space
        radius: Cauchy sampling radius (0 for exact polynomial columns)
        samples: Number of circle samples of the accepted extraction
        change: Largest entry change seen under sample doubling
        stable: Whether the change met the extraction tolerance
    """

    entries: np.ndarray
    symbol: SymbolSpec
    mobius: MobiusMap
    space: SpaceSpec
    radius: float
    samples: int
    change: float
    stable: bool = True

    @property
    def dimension(self) -> int:
        return int(self.entries.shape[0])

    def with_entries(self, entries: np.ndarray) -> TruncationMatrix:
        return TruncationMatrix(
            entries, self.symbol, self.mobius, self.space, self.radius, self.samples, self.change, self.stable
        )


@dataclass(frozen=True)
class GridSpec:
    """Rectangle [re_min, re_max] x [im_min, im_max] sampled width x height."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float
    width: int = 201
    height: int = 201

    def __post_init__(self) -> None:
        if not (2 <= self.width <= 512 and 2 <= self.height <= 512):
            raise InvalidParameter(f"Grid resolution must lie in 2..512, got {self.width}x{self.height}")
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise InvalidParameter("Grid bounds must have positive extent")

    @classmethod
    def around(cls, radius: float, width: int, height: int, margin: float | None = None) -> GridSpec:
        """Square grid [-R - margin, R + margin]^2."""
        margin = TRUNCATION.grid_margin if margin is None else margin
        half = radius + margin
        return cls(-half, half, -half, half, width, height)

    def points(self) -> np.ndarray:
        re = np.linspace(self.re_min, self.re_max, self.width)
        im = np.linspace(self.im_min, self.im_max, self.height)
        return re[None, :] + 1j * im[:, None]


@dataclass(frozen=True, eq=False)
class PseudospectrumField:
    """sigma_min(A - lambda I) on a grid; ``values`` has shape (height, width)."""

    grid: GridSpec
    values: np.ndarray

    def rows(self) -> list[tuple[float, float, float]]:
        pts = self.grid.points()
        return [
            (float(p.real), float(p.imag), float(v)) for p, v in zip(pts.ravel(), self.values.ravel(), strict=True)
        ]


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------


def _is_rotation_about_origin(m: MobiusMap) -> bool:
    scale = max(abs(m.a), abs(m.d))
    return abs(m.b) <= 1e-15 * scale and abs(m.c) <= 1e-15 * scale


def _polynomial_columns(s: SymbolSpec, m: MobiusMap, count: int) -> np.ndarray:
    # psi * (eta z)^n has the shifted coefficients of p times eta^n
    eta = m.a / m.d
    coeffs = np.zeros((count, count), dtype=complex)
    p = s.num / s.den[0]
    for n in range(count):
        top = min(count, n + p.size)
        coeffs[n:top, n] = p[: top - n] * eta**n
    return coeffs


def _cauchy_columns(s: SymbolSpec, m: MobiusMap, count: int, radius: float, samples: int) -> np.ndarray:
    z = radius * np.exp(2j * np.pi * np.arange(samples) / samples)
    phi = m(z)
    values = np.empty((samples, count), dtype=complex)
    values[:, 0] = s(z)
    for n in range(1, count):
        values[:, n] = values[:, n - 1] * phi
    coeffs = np.fft.fft(values, axis=0)[:count] / samples
    return coeffs / (radius ** np.arange(count))[:, None]


def _sampling_radius(count: int, requested: float | None) -> float:
    if requested is not None:
        return requested
    radius = TRUNCATION.sampling_radius
    if count > 1 and 1e-16 * radius ** (-(count - 1)) > TRUNCATION.extraction_tolerance:
        raised = min((1e-7) ** (1.0 / (count - 1)), TRUNCATION.max_sampling_radius)
        logger.info("raising the sampling radius from %.4f to %.4f for N=%d", radius, raised, count)
        radius = max(radius, raised)
    return radius


def build_truncation(
    s: SymbolSpec, m: MobiusMap, sp: SpaceSpec, N: int, *, radius: float | None = None
) -> TruncationMatrix:
    """Compress C_{psi,phi} to the first N orthonormal monomials.

    Args:
        s: The weight
        m: The automorphism
        sp: Hardy or Bergman space
        N: Dimension of the compression
        radius: Cauchy sampling radius (default from settings, raised for large N)

    Returns:
        TruncationMatrix: Entries plus extraction diagnostics

    Raises:
        InvalidParameter: If N < 1 or the radius is outside (0, 1)
        CoefficientExtractionUnstable: If entries change by more than the
            instability threshold under sample doubling
    """
    if N < 1:
        raise InvalidParameter(f"Truncation dimension must be positive, got {N}")
    beta = basis_norms(sp, N)
    ratio = beta[:, None] / beta[None, :]

    if _is_rotation_about_origin(m) and s.den.size == 1 and not s.blaschke_zeros:
        logger.debug("exact polynomial columns for a rotation about the origin")
        return TruncationMatrix(ratio * _polynomial_columns(s, m, N), s, m, sp, 0.0, 0, 0.0, True)

    rho = _sampling_radius(N, radius)
    if not 0.0 < rho < 1.0:
        raise InvalidParameter(f"Sampling radius must lie in (0, 1), got {rho}")
    samples = max(TRUNCATION.samples_per_dimension * N, TRUNCATION.min_samples)
    coarse = _cauchy_columns(s, m, N, rho, samples)
    change = math.inf
    for _ in range(2):
        fine = _cauchy_columns(s, m, N, rho, 2 * samples)
        change = float(np.max(np.abs(ratio * (fine - coarse))))
        coarse, samples = fine, 2 * samples
        if change < TRUNCATION.extraction_tolerance:
            break

    stable = change < TRUNCATION.extraction_tolerance
    if not stable:
        if change > TRUNCATION.unstable_threshold:
            raise CoefficientExtractionUnstable(
                f"Taylor coefficients changed by {change:.3e} under sample doubling at N={N}", change
            )
        logger.warning("coefficient extraction flagged: change %.3e at N=%d, rho=%.4f", change, N, rho)
    return TruncationMatrix(ratio * coarse, s, m, sp, rho, samples, change, stable)


# ---------------------------------------------------------------------------
# Spectral quantities
# ---------------------------------------------------------------------------


def eigenvalues(t: TruncationMatrix) -> np.ndarray:
    """All eigenvalues, sorted by decreasing modulus and then by argument."""
    try:
        values = scipy.linalg.eigvals(t.entries)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise EigensolverNonconvergence(f"Dense eigensolve failed at N={t.dimension}: {e}") from e
    order = np.lexsort((np.angle(values), -np.round(np.abs(values), 12)))
    return values[order]


def _sigma_min_svd(a: np.ndarray, points: np.ndarray) -> np.ndarray:
    eye = np.eye(a.shape[0])
    return np.array([scipy.linalg.svdvals(a - lam * eye)[-1] for lam in points])


def _sigma_min_schur(schur: np.ndarray, points: np.ndarray, start: np.ndarray) -> np.ndarray:
    out = np.empty(points.size)
    for i, lam in enumerate(points):
        shifted = schur - lam * np.eye(schur.shape[0])
        x = start
        estimate = 0.0
        try:
            for _ in range(TRUNCATION.inverse_iterations):
                y = scipy.linalg.solve_triangular(shifted, x)
                z = scipy.linalg.solve_triangular(shifted, y, trans="C")
                size = float(np.linalg.norm(z))
                refined = 1.0 / math.sqrt(size) if size > 0 and math.isfinite(size) else 0.0
                x = z / size if size > 0 and math.isfinite(size) else x
                if estimate and abs(refined - estimate) <= 1e-10 * estimate:
                    estimate = refined
                    break
                estimate = refined
        except (np.linalg.LinAlgError, ValueError):
            estimate = 0.0
        out[i] = estimate
    return out


def sigma_min_at(t: TruncationMatrix, points: np.ndarray, *, on_chunk: Callable[[int], None] | None = None) -> np.ndarray:
    """sigma_min(A - lambda I) for each lambda in ``points``.

    Small matrices use a dense SVD per point; larger ones a complex Schur
    form once and inverse iteration on the triangular factor per point.
    Chunks of points run on a thread pool capped by SPECWIN_THREADS.
    """
    flat = np.asarray(points, dtype=complex).ravel()
    a = t.entries
    if t.dimension <= TRUNCATION.svd_cutoff:

        def work(chunk: np.ndarray) -> np.ndarray:
            return _sigma_min_svd(a, chunk)

    else:
        schur, _ = scipy.linalg.schur(a, output="complex")
        start = np.random.default_rng(0).standard_normal(t.dimension) + 0j
        start /= np.linalg.norm(start)

        def work(chunk: np.ndarray) -> np.ndarray:
            return _sigma_min_schur(schur, chunk, start)

    chunks = np.array_split(flat, max(1, min(len(flat), 4 * EXECUTION.threads)))
    results: list[np.ndarray] = []
    with ThreadPoolExecutor(max_workers=EXECUTION.threads) as pool:
        for chunk, values in zip(chunks, pool.map(work, chunks), strict=True):
            results.append(values)
            if on_chunk is not None:
                on_chunk(len(chunk))
    return np.concatenate(results).reshape(np.shape(points)) if flat.size else np.zeros(np.shape(points))


def pseudospectrum_grid(
    t: TruncationMatrix, grid: GridSpec, *, on_chunk: Callable[[int], None] | None = None
) -> PseudospectrumField:
    return PseudospectrumField(grid, sigma_min_at(t, grid.points(), on_chunk=on_chunk))


def norm_power_radius(t: TruncationMatrix, n_max: int) -> list[float]:
    """||A^n||^(1/n) in the operator 2-norm for n = 1 .. n_max.

    Powers are accumulated on the rescaled matrix A / ||A|| with the
    log of every renormalization carried separately.
    """
    if not 1 <= n_max <= TRUNCATION.max_norm_powers:
        raise InvalidParameter(f"n_max must lie in 1..{TRUNCATION.max_norm_powers}, got {n_max}")
    base_norm = float(np.linalg.norm(t.entries, 2))
    if base_norm == 0.0:
        return [0.0] * n_max
    scaled = t.entries / base_norm
    power = np.eye(t.dimension, dtype=complex)
    log_total = 0.0
    out: list[float] = []
    for n in range(1, n_max + 1):
        power = power @ scaled
        size = float(np.linalg.norm(power, 2))
        if size == 0.0 or size < np.finfo(float).tiny:
            out.extend([0.0] * (n_max - n + 1))
            break
        power /= size
        log_total += math.log(size)
        out.append(math.exp(log_total / n + math.log(base_norm)))
    return out


def kernel_adjoint_error(t: TruncationMatrix, z: complex) -> float:
    """Relative error between A^* k_z and conj(psi(z)) k_{phi(z)} in basis coordinates."""
    z = complex(z)
    lhs = t.entries.conj().T @ kernel_coefficients(t.space, z, t.dimension)
    rhs = np.conj(t.symbol(z)) * kernel_coefficients(t.space, t.mobius(z), t.dimension)
    scale = float(np.linalg.norm(rhs))
    error = float(np.linalg.norm(lhs - rhs))
    return error / scale if scale > TOLERANCES.evaluation_slack else error


def column_function(t: TruncationMatrix, n: int, z: complex) -> complex:
    """sum_m A[m, n] beta_n z^m / beta_m, which approximates psi(z) phi(z)^n."""
    if not 0 <= n < t.dimension:
        raise InvalidParameter(f"Column index must lie in 0..{t.dimension - 1}, got {n}")
    beta = basis_norms(t.space, t.dimension)
    powers = complex(z) ** np.arange(t.dimension)
    return complex(np.sum(t.entries[:, n] * beta[n] * powers / beta))
