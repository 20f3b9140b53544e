"""End-to-end numerical checks on the golden cases.

These runs build full-size truncations and long orbits, so they are
marked slow; run them with ``pytest -m slow``.
"""

import math

import numpy as np
import numpy.polynomial.polynomial as npoly
import pytest

from specwin.core.mobius import automorphism_to, compose, elliptic, hyperbolic_r, parabolic_cayley, rotation
from specwin.core.oracle import SamplingSpec, backward_orbit_guarantee, predict_spectrum
from specwin.core.space import SpaceSpec
from specwin.core.symbol import SymbolSpec, delta_psi, ergodic_average, jensen_delta, sup_cocycle_root
from specwin.core.truncation import build_truncation, kernel_adjoint_error, sigma_min_at
from specwin.core.witness import (
    blaschke_lower_bound,
    hyperbolic_floor,
    witness_backward_orbit,
    witness_level_circle,
    witness_rational_rotation,
)
from specwin.types import SpectrumShape

from .conftest import GOLDEN

pytestmark = pytest.mark.slow

SQRT3 = math.sqrt(3)
SPACES = [SpaceSpec.hardy(), SpaceSpec.bergman(0.0)]


class TestTruncationIdentities:
    """Adjoint, rotation and Jensen identities at full size."""

    @pytest.mark.parametrize("space", SPACES, ids=["hardy", "bergman"])
    @pytest.mark.parametrize(
        ("psi", "phi"),
        [
            (SymbolSpec.polynomial([-0.5, 1]), hyperbolic_r(0.5)),
            (SymbolSpec.polynomial([2, 1]), parabolic_cayley(1)),
            (SymbolSpec.polynomial([0.3, 0, 1]), elliptic(0.2 + 0.1j, 0.3)),
            (SymbolSpec.polynomial([1, -0.4j]), automorphism_to(0.3j)),
        ],
        ids=["hyperbolic", "parabolic", "elliptic", "disk-automorphism"],
    )
    def test_adjoint_identity(self, space: SpaceSpec, psi: SymbolSpec, phi) -> None:
        t = build_truncation(psi, phi, space, 256)
        rng = np.random.default_rng(2024)
        for _ in range(5):
            z = 0.9 * math.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
            assert kernel_adjoint_error(t, z) < 1e-6

    @pytest.mark.parametrize("space", SPACES, ids=["hardy", "bergman"])
    def test_adjoint_identity_random_triples(self, space: SpaceSpec) -> None:
        rng = np.random.default_rng(31)
        for _ in range(20):
            size = int(rng.integers(2, 4))
            coefficients = rng.normal(size=size) + 1j * rng.normal(size=size)
            psi = SymbolSpec.polynomial(list(coefficients))
            a = 0.5 * math.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
            phi = compose(automorphism_to(a), rotation(rng.uniform()))
            t = build_truncation(psi, phi, space, 256)
            z = 0.9 * math.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
            assert kernel_adjoint_error(t, z) < 1e-6, (coefficients, a, z)

    @pytest.mark.parametrize("space", SPACES, ids=["hardy", "bergman"])
    @pytest.mark.parametrize("turns", [0.25, 1 / 3, GOLDEN])
    def test_rotation_is_exactly_diagonal(self, space: SpaceSpec, turns: float) -> None:
        t = build_truncation(SymbolSpec.constant(1), rotation(turns), space, 64)
        eta = np.exp(2j * np.pi * turns)
        assert np.max(np.abs(t.entries - np.diag(eta ** np.arange(64)))) < 1e-12

    @pytest.mark.parametrize(
        "psi",
        [SymbolSpec.polynomial([-0.5, 1]), SymbolSpec.polynomial([0.2, -0.7, 1]), SymbolSpec.polynomial([3, 1])],
        ids=["inner-zero", "two-zeros", "zero-free"],
    )
    def test_jensen_consistency(self, psi: SymbolSpec) -> None:
        for r in (0.1, 0.25, 0.5, 0.75, 0.9, 0.99):
            assert abs(delta_psi(psi, r) - jensen_delta(psi, r)) < 1e-8

    def test_jensen_consistency_random_weights(self) -> None:
        """Random weights with a pole outside the disk and a Blaschke factor."""
        rng = np.random.default_rng(17)
        radii = (0.3, 0.7, 0.95)

        def modulus(low: float, high: float) -> float:
            while True:
                value = rng.uniform(low, high)
                if all(abs(value - r) > 0.05 for r in radii):
                    return value

        for _ in range(20):
            roots = [modulus(0.05, 1.6) * np.exp(2j * np.pi * rng.uniform()) for _ in range(int(rng.integers(1, 3)))]
            scale = complex(rng.uniform(0.5, 2.0) * np.exp(2j * np.pi * rng.uniform()))
            pole = rng.uniform(1.5, 3.0) * np.exp(2j * np.pi * rng.uniform())
            zero = modulus(0.05, 0.9) * np.exp(2j * np.pi * rng.uniform())
            psi = SymbolSpec(
                numerator=tuple(complex(c) for c in scale * npoly.polyfromroots(roots)),
                denominator=(1 + 0j, complex(-1 / pole)),
                blaschke_zeros=(complex(zero),),
            )
            for r in radii:
                expected = jensen_delta(psi, r)
                assert abs(delta_psi(psi, r) - expected) <= 1e-8 * max(1.0, expected), (roots, pole, zero, r)

    def test_boundary_level_of_inner_zero(self, psi_half: SymbolSpec) -> None:
        assert abs(delta_psi(psi_half, 1.0) - 1.0) < 1e-8


class TestErgodicAverages:
    """Birkhoff averages along the golden rotation."""

    def test_birkhoff_average_converges(self, psi_half: SymbolSpec, golden_rotation) -> None:
        assert abs(ergodic_average(psi_half, golden_rotation, 1.0, 100_000)) < 5e-3

    def test_sup_cocycle_root(self, psi_half: SymbolSpec, golden_rotation) -> None:
        assert 0.98 <= sup_cocycle_root(psi_half, golden_rotation, 2000, 4096) <= 1.02


class TestGoldenSpectra:
    """The four reference predictions."""

    def test_parabolic_disk(self, hardy: SpaceSpec, psi_half: SymbolSpec, parabolic) -> None:
        spectrum = predict_spectrum(psi_half, parabolic, hardy)
        assert spectrum.shape == SpectrumShape.DISK
        assert abs(spectrum.parameters["radius"] - 0.5) < 1e-6

    def test_hyperbolic_disk(self, hardy: SpaceSpec, psi_z: SymbolSpec, hyperbolic_half) -> None:
        spectrum = predict_spectrum(psi_z, hyperbolic_half, hardy)
        assert spectrum.shape == SpectrumShape.DISK
        assert abs(spectrum.parameters["radius"] - SQRT3) < 1e-10

    def test_hyperbolic_annulus(self, hardy: SpaceSpec, hyperbolic_half) -> None:
        spectrum = predict_spectrum(SymbolSpec.constant(1), hyperbolic_half, hardy)
        assert spectrum.shape == SpectrumShape.ANNULUS
        assert abs(spectrum.parameters["r_min"] - 1 / SQRT3) < 1e-10
        assert abs(spectrum.parameters["r_max"] - SQRT3) < 1e-10

    def test_half_turn_fills_the_disk(self, hardy: SpaceSpec, psi_z: SymbolSpec) -> None:
        spectrum = predict_spectrum(psi_z, rotation(0.5), hardy, SamplingSpec())
        assert spectrum.shape == SpectrumShape.SAMPLED_CLOSURE
        for lam in (0.0, 0.5, -0.7j, 0.6 + 0.6j):
            assert spectrum.contains(lam)
        assert not spectrum.contains(1.2)

    def test_bergman_ratio(self, psi_z: SymbolSpec, hyperbolic_half) -> None:
        hardy = predict_spectrum(psi_z, hyperbolic_half, SpaceSpec.hardy()).outer_radius
        bergman = predict_spectrum(psi_z, hyperbolic_half, SpaceSpec.bergman(0.0)).outer_radius
        assert abs(bergman - 3.0) < 1e-10
        assert abs(bergman / hardy - SQRT3) < 1e-10


class TestWitnessBattery:
    """Approximate eigenvectors on the golden cases."""

    def test_exact_eigenvectors_of_rotations(self) -> None:
        rng = np.random.default_rng(7)
        for index in range(50):
            n0 = int(rng.integers(2, 9))
            j = int(rng.integers(1, n0))
            while math.gcd(j, n0) != 1:
                j = int(rng.integers(1, n0))
            c = 0.5 * rng.uniform() * np.exp(2j * np.pi * rng.uniform())
            psi = SymbolSpec.polynomial([1, c])
            z0 = 0.8 * math.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
            space = SPACES[index % 2]
            run = witness_rational_rotation(psi, rotation(j / n0), space, z0)
            assert run.final_residual <= 1e-10
            assert run.stages[0].norm >= run.stages[0].floor * (1 - 1e-12)

    @pytest.mark.parametrize("fraction", [0.0, 0.5 * np.exp(1j * np.pi / 3), 0.9])
    def test_hyperbolic_hardy(self, hardy: SpaceSpec, psi_z: SymbolSpec, hyperbolic_half, fraction: complex) -> None:
        lam = fraction * backward_orbit_guarantee(psi_z, hyperbolic_half, hardy)
        run = witness_backward_orbit(psi_z, hyperbolic_half, hardy, lam, [0.0], 60)
        assert run.final_residual < 0.05
        assert run.stages[0].floor >= 0.35

    def test_hyperbolic_bergman(self, bergman: SpaceSpec, psi_z: SymbolSpec, hyperbolic_half) -> None:
        lam = 0.9 * backward_orbit_guarantee(psi_z, hyperbolic_half, bergman)
        run = witness_backward_orbit(psi_z, hyperbolic_half, bergman, lam, [0.0], 60)
        assert run.final_residual < 0.1

    @pytest.mark.parametrize("lam", [0.0, 0.25, 0.45 * np.exp(1j * np.pi / 4)])
    def test_parabolic(self, hardy: SpaceSpec, psi_half: SymbolSpec, parabolic, lam: complex) -> None:
        run = witness_backward_orbit(psi_half, parabolic, hardy, lam, [0.5], 200)
        assert run.final_residual < 0.05
        assert predict_spectrum(psi_half, parabolic, hardy).contains(lam)

    def test_blaschke_floor_stabilizes(self, hyperbolic_half) -> None:
        partial = [blaschke_lower_bound(hyperbolic_half, 0.0, n) for n in range(1, 41)]
        assert np.all(np.diff(partial) <= 1e-15)
        assert abs(partial[-1] - 0.358) < 1e-3
        assert min(partial) >= hyperbolic_floor(1 / 3, 200) - 1e-12

    def test_level_circle(self, hardy: SpaceSpec, psi_half: SymbolSpec, golden_rotation) -> None:
        run = witness_level_circle(psi_half, golden_rotation, hardy, 0.25)
        assert abs(abs(run.lam) - 0.5) < 0.02
        assert run.residuals[-1] <= 0.2 * run.residuals[0]


class TestPseudospectrumDirection:
    """Diagnostic comparison of sigma_min inside and outside the parabolic disk."""

    def test_parabolic_two_point(self, hardy: SpaceSpec, psi_half: SymbolSpec, parabolic) -> None:
        t = build_truncation(psi_half, parabolic, hardy, 512)
        inside, outside = sigma_min_at(t, np.array([0.25, 1.0], dtype=complex))
        assert np.isfinite(inside) and np.isfinite(outside)
        assert 0.0 <= inside
        assert outside > 0.0
