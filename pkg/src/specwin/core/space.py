"""Hardy and weighted Bergman space geometry.

Kernels in both spaces are powers of the Szego kernel,
K_z(w) = (1 - conj(z) w)^(-gamma) with gamma = 1 (Hardy) or alpha + 2
(Bergman), so every routine here is written once in terms of gamma.

Finite kernel combinations are the vectors the witness constructions work
with. Their norms come from Gram quadratic forms; combinations whose points
crowd the boundary can carry a half-plane chart so that 1 - |z|^2 and
1 - conj(z) w are formed without cancellation.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np
from scipy.special import gammaln

from ..settings import TOLERANCES
from ..types import InvalidParameter, KernelSingularity, NumericallyIndefinite, OutsideDisk, SpaceKind
from .mobius import MobiusMap, compose, inverse

logger = logging.getLogger(__name__)

_BLOCK = 1024


@dataclass(frozen=True)
class SpaceSpec:
    """Hardy space or the weighted Bergman space with parameter alpha > -1."""

    kind: SpaceKind = SpaceKind.HARDY
    alpha: float = 0.0

    def __post_init__(self) -> None:
        if self.kind == SpaceKind.BERGMAN and not self.alpha > -1.0:
            raise InvalidParameter(f"Bergman parameter alpha must exceed -1, got {self.alpha}")

    @classmethod
    def hardy(cls) -> SpaceSpec:
        return cls(SpaceKind.HARDY)

    @classmethod
    def bergman(cls, alpha: float = 0.0) -> SpaceSpec:
        return cls(SpaceKind.BERGMAN, float(alpha))

    @property
    def gamma(self) -> float:
        """Kernel exponent."""
        return 1.0 if self.kind == SpaceKind.HARDY else self.alpha + 2.0

    @property
    def exponent(self) -> float:
        """The exponent e = gamma / 2 attached to derivatives at fixed points."""
        return self.gamma / 2.0

    def label(self) -> str:
        return "hardy" if self.kind == SpaceKind.HARDY else f"bergman({self.alpha:g})"


def basis_norms(sp: SpaceSpec, count: int) -> np.ndarray:
    """||z^n|| for n = 0 .. count-1."""
    n = np.arange(count, dtype=float)
    if sp.kind == SpaceKind.HARDY:
        return np.ones(count)
    a = sp.alpha
    return np.exp(0.5 * (gammaln(n + 1) + gammaln(a + 2) - gammaln(n + a + 2)))


def basis_norm(sp: SpaceSpec, n: int) -> float:
    if n < 0:
        raise InvalidParameter(f"Basis index must be nonnegative, got {n}")
    return float(basis_norms(sp, n + 1)[n])


def kernel_eval(sp: SpaceSpec, z: complex, w: Any) -> Any:
    """K_z(w) on the principal branch.

    Raises:
        OutsideDisk: If |z| >= 1
        KernelSingularity: If conj(z) w = 1
    """
    z = complex(z)
    if not abs(z) < 1.0:
        raise OutsideDisk(f"Kernel point {z} is not inside the unit disk")
    base = 1 - np.conj(z) * np.asarray(w, dtype=complex)
    if np.any(base == 0):
        raise KernelSingularity(f"K_{z} is singular at {w}")
    value = base ** (-sp.gamma)
    return complex(value) if np.ndim(value) == 0 else value


def kernel_norm(sp: SpaceSpec, z: complex) -> float:
    """||K_z|| = (1 - |z|^2)^(-gamma/2)."""
    z = complex(z)
    if not abs(z) < 1.0:
        raise OutsideDisk(f"Kernel point {z} is not inside the unit disk")
    return float((1.0 - abs(z) ** 2) ** (-sp.exponent))


def kernel_coefficients(sp: SpaceSpec, z: complex, count: int) -> np.ndarray:
    """Coordinates conj(z)^n / beta_n of K_z in the orthonormal monomial basis."""
    powers = np.conj(complex(z)) ** np.arange(count)
    return powers / basis_norms(sp, count)


# ---------------------------------------------------------------------------
# Kernel combinations
# ---------------------------------------------------------------------------


def _chart_kappa(chart: MobiusMap) -> float:
    kappa = abs(chart.c * 1j + chart.d) ** 2 - abs(chart.a * 1j + chart.b) ** 2
    if not kappa > 0:
        raise InvalidParameter("Chart does not map the upper half-plane into the disk")
    return kappa


@dataclass(frozen=True, eq=False)
class KernelCombination:
    """A finite combination sum_k c_k K_{x_k}.

    Attributes:
        coefficients: Complex coefficients c_k
        points: Points x_k of the disk, or half-plane coordinates w_k when
            ``chart`` is set (then x_k = chart(w_k))
        space: Ambient space
        normalized: Coefficients act on K_x / ||K_x|| instead of K_x
        chart: Map from the upper half-plane onto the disk
    """

    coefficients: np.ndarray
    points: np.ndarray
    space: SpaceSpec
    normalized: bool = False
    chart: MobiusMap | None = None
    _kappa: float = field(default=0.0, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        coeffs = np.atleast_1d(np.asarray(self.coefficients, dtype=complex))
        points = np.atleast_1d(np.asarray(self.points, dtype=complex))
        if coeffs.shape != points.shape or coeffs.ndim != 1:
            raise InvalidParameter("Coefficients and points must be one-dimensional and of equal length")
        if self.chart is None:
            if points.size and not np.all(np.abs(points) < 1.0):
                raise OutsideDisk("Kernel points must lie inside the unit disk")
        else:
            if points.size and not np.all(points.imag > 0):
                raise OutsideDisk("Chart coordinates must lie in the upper half-plane")
            object.__setattr__(self, "_kappa", _chart_kappa(self.chart))
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "points", points)

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[complex, complex]], space: SpaceSpec, **kwargs: Any) -> KernelCombination:
        pairs = list(terms)
        return cls(
            np.array([c for c, _ in pairs], dtype=complex),
            np.array([p for _, p in pairs], dtype=complex),
            space,
            **kwargs,
        )

    def __len__(self) -> int:
        return int(self.coefficients.size)

    @property
    def terms(self) -> list[tuple[complex, complex]]:
        return [(complex(c), complex(p)) for c, p in zip(self.coefficients, self.points, strict=True)]

    @property
    def disk_points(self) -> np.ndarray:
        return self.points if self.chart is None else self.chart(self.points)

    def scaled(self, factor: complex) -> KernelCombination:
        return replace(self, coefficients=self.coefficients * factor)

    def log_defect(self) -> np.ndarray:
        """log(1 - |x_k|^2) for every point."""
        if self.chart is None:
            return np.log1p(-np.abs(self.points) ** 2)
        ch = self.chart
        return math.log(self._kappa) + np.log(self.points.imag) - 2 * np.log(np.abs(ch.c * self.points + ch.d))

    def log_cross(self, rows: slice = slice(None)) -> np.ndarray:
        """Principal Log(1 - conj(x_j) x_k) for j in ``rows`` and all k."""
        left = self.points[rows]
        if self.chart is None:
            return np.log(1 - np.conj(left)[:, None] * self.points[None, :])
        ch = self.chart
        value = (
            math.log(self._kappa)
            + np.log((self.points[None, :] - np.conj(left)[:, None]) / 2j)
            - np.log(np.conj(ch.c * left + ch.d))[:, None]
            - np.log(ch.c * self.points + ch.d)[None, :]
        )
        # the true value has positive real part
        return value.real + 1j * (np.mod(value.imag + np.pi, 2 * np.pi) - np.pi)

    def gram_rows(self, rows: slice = slice(None)) -> np.ndarray:
        """Rows of the Gram matrix <K_j, K_k> (normalized kernels if flagged)."""
        gamma = self.space.gamma
        exponent = -gamma * self.log_cross(rows)
        if self.normalized:
            defect = self.log_defect()
            exponent = exponent + 0.5 * gamma * (defect[rows][:, None] + defect[None, :])
        return np.exp(exponent)


def combo_norm(h: KernelCombination) -> float:
    """||sum_k c_k K_{x_k}|| from the Gram quadratic form.

    Raises:
        NumericallyIndefinite: If the form is significantly negative
    """
    if len(h) == 0:
        return 0.0
    c = h.coefficients
    total = 0j
    for start in range(0, len(h), _BLOCK):
        rows = slice(start, start + _BLOCK)
        total += c[rows] @ h.gram_rows(rows) @ np.conj(c)
    if h.normalized:
        scale = float(np.sum(np.abs(c))) ** 2
    else:
        scale = float(np.sum(np.abs(c) * np.exp(-0.5 * h.space.gamma * h.log_defect()))) ** 2
    value = total.real
    if value < -TOLERANCES.gram_indefinite * scale:
        raise NumericallyIndefinite(f"Gram form evaluated to {value:.3e} at scale {scale:.3e}")
    return math.sqrt(max(value, 0.0))


def _chart_distance(w1: complex, w2: complex) -> float:
    return abs(w1 - w2) / abs(w1 - np.conj(w2))


def _disk_distance(z1: complex, z2: complex) -> float:
    return abs(z1 - z2) / abs(1 - np.conj(z2) * z1)


def merge_terms(h: KernelCombination, distance: float | None = None) -> KernelCombination:
    """Add together terms whose points are pseudo-hyperbolically within ``distance``."""
    distance = TOLERANCES.merge_distance if distance is None else distance
    metric = _disk_distance if h.chart is None else _chart_distance
    points: list[complex] = []
    coeffs: list[complex] = []
    for c, p in zip(h.coefficients, h.points, strict=True):
        for i, q in enumerate(points):
            if metric(p, q) <= distance:
                coeffs[i] += c
                break
        else:
            points.append(complex(p))
            coeffs.append(complex(c))
    keep = [i for i, c in enumerate(coeffs) if c != 0]
    return replace(h, coefficients=np.array([coeffs[i] for i in keep]), points=np.array([points[i] for i in keep]))


def combine(*parts: tuple[complex, KernelCombination]) -> KernelCombination:
    """Linear combination of combinations sharing space, normalization and chart."""
    first = parts[0][1]
    for _, h in parts[1:]:
        if (h.space, h.normalized, h.chart) != (first.space, first.normalized, first.chart):
            raise InvalidParameter("Only combinations with the same space, normalization and chart can be added")
    return replace(
        first,
        coefficients=np.concatenate([w * h.coefficients for w, h in parts]),
        points=np.concatenate([h.points for _, h in parts]),
    )


def adjoint_on_kernels(
    h: KernelCombination,
    s: Any,
    m: MobiusMap,
    *,
    chart_action: Callable[[np.ndarray], np.ndarray] | None = None,
) -> KernelCombination:
    """Apply C*: K_x -> conj(psi(x)) K_{phi(x)} termwise.

    For chart-carried combinations the images are taken in chart
    coordinates, through ``chart_action`` when given (a closed form of
    chart^{-1} o phi o chart) and through the conjugated Mobius map otherwise.
    """
    weights = np.conj(s(h.disk_points))
    if h.chart is None:
        images = m(h.points)
    else:
        if chart_action is None:
            conjugated = compose(inverse(h.chart), compose(m, h.chart))
            chart_action = conjugated
        images = np.asarray(chart_action(h.points), dtype=complex)
    coeffs = h.coefficients * weights
    image = replace(h, coefficients=coeffs, points=images)
    if h.normalized:
        ratio = np.exp(-0.5 * h.space.gamma * (image.log_defect() - h.log_defect()))
        image = replace(image, coefficients=coeffs * ratio)
    return image


def shift_adjoint_on_kernels(h: KernelCombination) -> KernelCombination:
    """Apply the adjoint of multiplication by z: K_x -> conj(x) K_x."""
    return replace(h, coefficients=h.coefficients * np.conj(h.disk_points))


def rotation_orbit_norms(
    coeffs: np.ndarray, z: complex, eta: complex, sp: SpaceSpec, twist: int = -1
) -> np.ndarray:
    """Norms of sum_s g_s omega^(twist * m * s) K_{eta^s z} for every m = 0 .. n-1.

    Here n = len(coeffs) and omega = exp(2 pi i / n). The Gram matrix of a
    rotation orbit is Toeplitz, so all n norms follow from the
    autocorrelation of g folded modulo n and one FFT.
    """
    g = np.asarray(coeffs, dtype=complex)
    n = g.size
    if twist not in (-1, 1):
        raise InvalidParameter(f"twist must be +1 or -1, got {twist}")
    size = 1 << int(math.ceil(math.log2(max(2 * n - 1, 2))))
    spectrum = np.fft.fft(g, size)
    auto = np.fft.ifft(spectrum * np.conj(spectrum))
    lags = np.arange(-(n - 1), n)
    autocorr = auto[lags % size]
    r2 = abs(complex(z)) ** 2
    toeplitz = (1 - r2 * complex(eta) ** (-lags)) ** (-sp.gamma)
    folded = np.zeros(n, dtype=complex)
    np.add.at(folded, lags % n, toeplitz * autocorr)
    quad = np.fft.fft(folded) if twist == -1 else n * np.fft.ifft(folded)
    scale = float(np.sum(np.abs(g))) ** 2 * (1 - r2) ** (-sp.gamma)
    if float(np.min(quad.real)) < -TOLERANCES.gram_indefinite * scale:
        raise NumericallyIndefinite(f"Orbit Gram form evaluated to {np.min(quad.real):.3e}")
    return np.sqrt(np.maximum(quad.real, 0.0))
