"""Verification battery for one (psi, phi, space) triple.

Each check compares two independent routes to the same quantity: the
truncated matrix against the exact kernel action, quadrature against
Jensen's formula, the oracle's disk radius against the radius bound, and
witness residuals against the predicted spectrum. Hard checks decide the
verdict; soft checks are diagnostics and can only WARN.
"""

from __future__ import annotations

import cmath
import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..settings import TRUNCATION
from ..types import (
    CheckReport,
    MapKind,
    NumericalInstability,
    SpecWinError,
    SpaceKind,
    SpectrumShape,
    UnsupportedCase,
    Verdict,
    VerifyReport,
)
from .mobius import MobiusMap, classify, rotation
from .oracle import SamplingSpec, SpectrumSet, backward_orbit_guarantee, predict_spectrum, spectral_radius_bound
from .space import SpaceSpec
from .symbol import SymbolSpec, delta_psi, jensen_delta, outer_modulus_at, zero_report
from .truncation import TruncationMatrix, build_truncation, column_function, kernel_adjoint_error, sigma_min_at
from .witness import (
    WitnessRun,
    WitnessSchedule,
    admissible_base_points,
    blaschke_lower_bound,
    hyperbolic_floor,
    normalize_elliptic,
    ray_base_points,
    witness_backward_orbit,
    witness_elliptic_boundary,
    witness_inner_zero,
    witness_level_circle,
    witness_rational_rotation,
)

logger = logging.getLogger(__name__)

MatrixHook = Callable[[np.ndarray], np.ndarray]


class _Skip(Exception):
    """Raised inside a check that does not apply to the triple."""


@dataclass
class VerificationBattery:
    """The checks run by ``specwin verify``.

    Attributes:
        symbol: The weight
        mobius: The automorphism
        space: Hardy or Bergman space
        N: Truncation size
        schedule: Witness scan budgets
        sampling: Sampling grid for sampled closures
        seed: Seed of the random test points when no generator is given
        rng: Generator the random test points are drawn from
        adjoint_points: Number of kernel points in the adjoint check
        matrix_hook: Applied to the truncation entries before any check reads them
    """

    symbol: SymbolSpec
    mobius: MobiusMap
    space: SpaceSpec
    N: int = TRUNCATION.default_dimension
    schedule: WitnessSchedule = field(default_factory=WitnessSchedule)
    sampling: SamplingSpec = field(default_factory=SamplingSpec)
    seed: int = 0
    rng: np.random.Generator | None = None
    adjoint_points: int = 20
    matrix_hook: MatrixHook | None = None
    _matrix: TruncationMatrix | None = field(default=None, init=False, repr=False)

    def __post_init__(self) -> None:
        if self.rng is None:
            self.rng = np.random.default_rng(self.seed)
        self.info = classify(self.mobius, **self.cutoff)
        self.prediction: SpectrumSet = predict_spectrum(
            self.symbol, self.mobius, self.space, self.sampling, **self.cutoff
        )

    @property
    def cutoff(self) -> dict[str, Any]:
        """The rationality cutoff of the schedule, as classifier keywords."""
        return {"rational_tolerance": self.schedule.rational_tolerance, "max_period": self.schedule.max_period}

    @property
    def checks(self) -> list[tuple[str, bool, Callable[[], CheckReport]]]:
        """(name, hard, body) in execution order."""
        return [
            ("adjoint_consistency", True, self.check_adjoint),
            ("column_reproduction", True, self.check_columns),
            ("rotation_exactness", True, self.check_rotation),
            ("jensen_consistency", True, self.check_jensen),
            ("oracle_radius", True, self.check_oracle_radius),
            ("blaschke_floor", True, self.check_blaschke_floor),
            ("witness", True, self.check_witness),
            ("pseudospectrum_direction", False, self.check_pseudospectrum),
        ]

    def matrix(self) -> TruncationMatrix:
        if self._matrix is None:
            t = build_truncation(self.symbol, self.mobius, self.space, self.N)
            if self.matrix_hook is not None:
                t = t.with_entries(self.matrix_hook(t.entries.copy()))
            self._matrix = t
        return self._matrix

    def run(self, on_check: Callable[[CheckReport], None] | None = None) -> VerifyReport:
        """Run every check; a hard FAIL makes the battery fail."""
        reports = []
        for name, hard, body in self.checks:
            report = self._run_one(name, hard, body)
            logger.info("%s: %s %s", name, report.verdict.value, report.detail)
            reports.append(report)
            if on_check is not None:
                on_check(report)
        failures = [r.name for r in reports if r.hard and r.verdict == Verdict.FAIL]
        return VerifyReport(checks=reports, passed=not failures, first_failure=failures[0] if failures else None)

    def _run_one(self, name: str, hard: bool, body: Callable[[], CheckReport]) -> CheckReport:
        try:
            return body()
        except _Skip as e:
            return CheckReport(name=name, verdict=Verdict.SKIP, hard=hard, detail=str(e))
        except UnsupportedCase as e:
            return CheckReport(name=name, verdict=Verdict.SKIP, hard=hard, detail=str(e))
        except SpecWinError as e:
            verdict = Verdict.FAIL if hard else Verdict.WARN
            return CheckReport(name=name, verdict=verdict, hard=hard, detail=f"{type(e).__name__}: {e}")

    @staticmethod
    def _verdict(name: str, hard: bool, measured: float, threshold: float, detail: str = "") -> CheckReport:
        ok = math.isfinite(measured) and measured <= threshold
        verdict = Verdict.PASS if ok else (Verdict.FAIL if hard else Verdict.WARN)
        return CheckReport(name=name, verdict=verdict, hard=hard, measured=measured, threshold=threshold, detail=detail)

    def _disk_samples(self, count: int, radius: float) -> np.ndarray:
        assert self.rng is not None
        r = radius * np.sqrt(self.rng.uniform(0, 1, count))
        return r * np.exp(2j * np.pi * self.rng.uniform(0, 1, count))

    # ------------------------------------------------------------------
    # Checks
    # ------------------------------------------------------------------

    def check_adjoint(self) -> CheckReport:
        t = self.matrix()
        count = self.adjoint_points
        errors = [kernel_adjoint_error(t, z) for z in self._disk_samples(count, 0.9)]
        detail = f"N={t.dimension}, {count} points, |z| <= 0.9"
        return self._verdict("adjoint_consistency", True, max(errors), 1e-6, detail)

    def check_columns(self) -> CheckReport:
        t = self.matrix()
        worst = 0.0
        for z in self._disk_samples(3, 0.5):
            for n in sorted({0, 1, t.dimension // 2}):
                if n >= t.dimension:
                    continue
                exact = complex(self.symbol(z)) * complex(self.mobius(z)) ** n
                approx = column_function(t, n, z)
                worst = max(worst, abs(approx - exact) / max(1.0, abs(exact)))
        return self._verdict("column_reproduction", True, worst, 1e-6, "|z| <= 0.5")

    def check_rotation(self) -> CheckReport:
        if not (self.info.is_elliptic and abs(self.info.fixed_points[0]) < 1e-12):
            raise _Skip("the map is not a rotation about the origin")
        eta = self.info.multiplier
        turns = (cmath.phase(eta) / (2 * math.pi)) % 1.0
        t = build_truncation(SymbolSpec.constant(1.0), rotation(turns), self.space, 8)
        expected = np.diag(eta ** np.arange(8))
        error = float(np.max(np.abs(t.entries - expected)))
        return self._verdict("rotation_exactness", True, error, 1e-12, "psi = 1, N = 8")

    def check_jensen(self) -> CheckReport:
        worst = 0.0
        for r in (0.25, 0.5, 0.9):
            worst = max(worst, abs(delta_psi(self.symbol, r) - jensen_delta(self.symbol, r)))
        return self._verdict("jensen_consistency", True, worst, 1e-8, "r in {0.25, 0.5, 0.9}")

    def check_oracle_radius(self) -> CheckReport:
        if self.prediction.shape != SpectrumShape.DISK:
            raise _Skip(f"prediction is a {self.prediction.shape.value}, not a disk")
        bound = spectral_radius_bound(self.symbol, self.mobius, self.space, **self.cutoff)
        gap = abs(bound.value - self.prediction.parameters["radius"])
        return self._verdict("oracle_radius", True, gap, 1e-10, f"bound {bound.kind.value} = {bound.value:.12g}")

    def check_blaschke_floor(self) -> CheckReport:
        if self.info.kind != MapKind.HYPERBOLIC:
            raise _Skip("orbit separation floors are checked for hyperbolic maps")
        s = abs(self.info.multiplier)
        n = self.schedule.n_terms
        partial = blaschke_lower_bound(self.mobius, 0j, n)
        floor = hyperbolic_floor(s, n)
        return self._verdict(
            "blaschke_floor", True, floor - partial, 1e-12, f"partial {partial:.6f} vs floor {floor:.6f}"
        )

    def check_witness(self) -> CheckReport:
        kind = self.info.kind
        if kind in (MapKind.ELLIPTIC_RATIONAL, MapKind.IDENTITY):
            return self._witness_rational()
        if kind == MapKind.ELLIPTIC_IRRATIONAL:
            return self._witness_elliptic()
        return self._witness_backward()

    def _witness_rational(self) -> CheckReport:
        worst = 0.0
        for z0 in self._disk_samples(5, 0.9):
            run = witness_rational_rotation(self.symbol, self.mobius, self.space, z0, **self.cutoff)
            worst = max(worst, run.final_residual)
        return self._verdict("witness", True, worst, 1e-10, "exact eigenvectors at 5 points")

    def _witness_backward(self) -> CheckReport:
        if self.prediction.shape != SpectrumShape.DISK:
            raise _Skip("no witnesses for the invertible annulus or circle")
        report = zero_report(self.symbol)
        zeros = list(report.zeros_inside) + list(report.zeros_boundary)
        if not zeros:
            raise _Skip("the weight has no zero in the closed disk")
        guarantee = backward_orbit_guarantee(self.symbol, self.mobius, self.space, **self.cutoff)
        n_terms = self.schedule.n_terms
        bases = admissible_base_points(
            self.symbol, self.mobius, ray_base_points(zeros[0], self.schedule.base_points), n_terms
        )
        if not bases:
            raise _Skip("every base point has the weight vanishing on its backward orbit")
        worst = 0.0
        for lam in (0.0, 0.5 * guarantee * cmath.exp(1j * math.pi / 3), 0.9 * guarantee):
            if not self.prediction.contains(lam):
                raise NumericalInstability(f"lambda = {lam} is certified but outside the predicted disk")
            run = witness_backward_orbit(self.symbol, self.mobius, self.space, lam, bases[-1:], n_terms)
            self._check_floors(run)
            worst = max(worst, run.final_residual)
        threshold = 0.05 if self.space.kind == SpaceKind.HARDY else 0.1
        return self._verdict("witness", True, worst, threshold, f"backward orbits, guarantee {guarantee:.6g}")

    def _witness_elliptic(self) -> CheckReport:
        psi, _, _ = normalize_elliptic(self.symbol, self.mobius)
        report = zero_report(psi)
        if report.zeros_boundary:
            lam = 0.5 * outer_modulus_at(psi, 0j)
            run = witness_elliptic_boundary(self.symbol, self.mobius, self.space, lam, self.schedule)
            threshold = 0.1
        elif report.zeros_inside and report.min_inner_radius > 0:
            t0 = 0.5 * delta_psi(psi, report.min_inner_radius)
            run = witness_inner_zero(self.symbol, self.mobius, self.space, t0, self.schedule)
            threshold = 0.1
        else:
            run = witness_level_circle(self.symbol, self.mobius, self.space, 0.5, self.schedule)
            threshold = 0.2 * run.stages[0].residual if run.stages else 0.0
        self._check_floors(run)
        if not run.stages:
            raise NumericalInstability(f"{run.construction.value} produced no stages")
        detail = f"{run.construction.value}, {len(run.stages)} stages"
        if run.exhausted:
            detail += ", schedule exhausted"
        return self._verdict("witness", True, run.final_residual, threshold, detail)

    @staticmethod
    def _check_floors(run: WitnessRun) -> None:
        for stage in run.stages:
            if stage.norm < stage.floor * (1 - 1e-9):
                raise NumericalInstability(
                    f"stage {stage.index}: norm {stage.norm:.6g} below its floor {stage.floor:.6g}"
                )

    def check_pseudospectrum(self) -> CheckReport:
        if self.prediction.shape != SpectrumShape.DISK:
            raise _Skip("direction check applies to disk predictions")
        radius = self.prediction.parameters["radius"]
        if radius <= 0:
            raise _Skip("degenerate disk")
        inside, outside = 0.5 * radius, 2.0 * radius
        values = sigma_min_at(self.matrix(), np.array([inside, outside], dtype=complex))
        ratio = float(values[0] / values[1]) if values[1] > 0 else math.inf
        return self._verdict(
            "pseudospectrum_direction", False, ratio, 0.1, f"sigma_min at {inside:.4g} and {outside:.4g}"
        )
