"""Tests for Hardy and Bergman kernels and kernel combinations."""

import math

import numpy as np
import pytest

from specwin.core.mobius import half_plane_model, hyperbolic_r, identity, inverse, rotation
from specwin.core.space import (
    KernelCombination,
    SpaceSpec,
    adjoint_on_kernels,
    basis_norm,
    combine,
    combo_norm,
    kernel_coefficients,
    kernel_eval,
    kernel_norm,
    merge_terms,
    rotation_orbit_norms,
    shift_adjoint_on_kernels,
)
from specwin.core.symbol import SymbolSpec
from specwin.types import InvalidParameter, KernelSingularity, OutsideDisk, SpaceKind


class TestSpaceSpec:
    """Test space parameters."""

    def test_hardy_exponent(self, hardy: SpaceSpec) -> None:
        assert hardy.kind == SpaceKind.HARDY
        assert hardy.gamma == 1.0
        assert hardy.exponent == 0.5

    def test_bergman_exponent(self) -> None:
        sp = SpaceSpec.bergman(1.0)
        assert sp.gamma == 3.0
        assert sp.label() == "bergman(1)"

    def test_bergman_alpha_range(self) -> None:
        with pytest.raises(InvalidParameter):
            SpaceSpec.bergman(-1.0)


class TestBasisAndKernels:
    """Test monomial norms and reproducing kernels."""

    @pytest.mark.parametrize("n", [0, 1, 7, 100])
    def test_hardy_basis_norm(self, hardy: SpaceSpec, n: int) -> None:
        assert basis_norm(hardy, n) == 1.0

    def test_bergman_basis_norms(self, bergman: SpaceSpec) -> None:
        assert abs(basis_norm(bergman, 0) - 1.0) < 1e-15
        assert abs(basis_norm(bergman, 1) - 1 / math.sqrt(2)) < 1e-15

    def test_negative_index(self, hardy: SpaceSpec) -> None:
        with pytest.raises(InvalidParameter):
            basis_norm(hardy, -1)

    def test_kernel_at_origin(self, hardy: SpaceSpec) -> None:
        assert kernel_eval(hardy, 0, 0.7 + 0.1j) == 1

    def test_kernel_values(self, hardy: SpaceSpec, bergman: SpaceSpec) -> None:
        assert abs(kernel_eval(hardy, 0.5, 0.5) - 4 / 3) < 1e-15
        assert abs(kernel_eval(bergman, 0.5, 0.5) - 16 / 9) < 1e-15

    def test_kernel_singularity(self, hardy: SpaceSpec) -> None:
        with pytest.raises(KernelSingularity):
            kernel_eval(hardy, 0.5, 2.0)

    def test_kernel_outside_disk(self, hardy: SpaceSpec) -> None:
        with pytest.raises(OutsideDisk):
            kernel_norm(hardy, 1.0)

    def test_kernel_norms(self, hardy: SpaceSpec) -> None:
        assert kernel_norm(hardy, 0) == 1.0
        assert abs(kernel_norm(hardy, 0.6) - 1.25) < 1e-15
        assert abs(kernel_norm(SpaceSpec.bergman(1.0), 0.6j) - 1.953125) < 1e-14

    def test_reproducing_property(self, bergman: SpaceSpec) -> None:
        """<K_z, K_w> = K_z(w) from the coefficient expansion."""
        z, w = 0.3 + 0.2j, -0.1 + 0.4j
        inner = np.vdot(kernel_coefficients(bergman, w, 400), kernel_coefficients(bergman, z, 400))
        assert abs(inner - kernel_eval(bergman, z, w)) < 1e-12


class TestKernelCombination:
    """Test Gram norms of kernel combinations."""

    def test_single_term(self, hardy: SpaceSpec) -> None:
        h = KernelCombination.from_terms([(1, 0.4j)], hardy)
        assert abs(combo_norm(h) - kernel_norm(hardy, 0.4j)) < 1e-14

    def test_cancelling_terms(self, hardy: SpaceSpec) -> None:
        h = KernelCombination.from_terms([(1, 0.3), (-1, 0.3)], hardy)
        assert combo_norm(h) < 1e-7
        assert len(merge_terms(h)) == 0

    def test_two_points(self, hardy: SpaceSpec) -> None:
        h = KernelCombination.from_terms([(1, 0.5), (1, -0.5)], hardy)
        assert abs(combo_norm(h) - math.sqrt(8 / 3 + 8 / 5)) < 1e-14

    def test_points_must_be_inside(self, hardy: SpaceSpec) -> None:
        with pytest.raises(OutsideDisk):
            KernelCombination.from_terms([(1, 1.0)], hardy)

    def test_shape_mismatch(self, hardy: SpaceSpec) -> None:
        with pytest.raises(InvalidParameter):
            KernelCombination(np.ones(2), np.zeros(3), hardy)

    def test_empty_combination(self, hardy: SpaceSpec) -> None:
        assert combo_norm(KernelCombination(np.zeros(0), np.zeros(0), hardy)) == 0.0

    @pytest.mark.parametrize("alpha", [None, 0.0, 1.5])
    def test_gram_norm_matches_coefficients(self, alpha: float | None) -> None:
        sp = SpaceSpec.hardy() if alpha is None else SpaceSpec.bergman(alpha)
        rng = np.random.default_rng(3)
        points = 0.9 * np.sqrt(rng.uniform(size=6)) * np.exp(2j * np.pi * rng.uniform(size=6))
        coeffs = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        h = KernelCombination(coeffs, points, sp)
        vector = sum(c * kernel_coefficients(sp, p, 400) for c, p in zip(coeffs, points))
        expected = float(np.linalg.norm(vector))
        assert abs(combo_norm(h) - expected) < 1e-8 * expected

    def test_normalized_terms(self, hardy: SpaceSpec) -> None:
        h = KernelCombination.from_terms([(1, 0.99)], hardy, normalized=True)
        assert abs(combo_norm(h) - 1.0) < 1e-12

    def test_chart_matches_disk_points(self) -> None:
        sp = SpaceSpec.bergman(0.0)
        sigma, _ = half_plane_model(hyperbolic_r(0.5))
        chart = inverse(sigma)
        w = np.array([1j, 0.3 + 2j, -0.5 + 0.2j])
        coeffs = np.array([1.0, -0.5j, 0.25])
        carried = KernelCombination(coeffs, w, sp, normalized=True, chart=chart)
        plain = KernelCombination(coeffs, chart(w), sp, normalized=True)
        assert abs(combo_norm(carried) - combo_norm(plain)) < 1e-10

    def test_combine_requires_same_space(self, hardy: SpaceSpec, bergman: SpaceSpec) -> None:
        a = KernelCombination.from_terms([(1, 0.1)], hardy)
        b = KernelCombination.from_terms([(1, 0.1)], bergman)
        with pytest.raises(InvalidParameter):
            combine((1, a), (1, b))


class TestAdjointAction:
    """Test C* on kernels."""

    def test_unit_weight_moves_point(self, hardy: SpaceSpec) -> None:
        m = hyperbolic_r(0.5)
        image = adjoint_on_kernels(KernelCombination.from_terms([(1, 0.2j)], hardy), SymbolSpec.constant(1), m)
        assert image.terms == [(1 + 0j, complex(m(0.2j)))]

    def test_multiplication_operator(self, hardy: SpaceSpec, psi_z: SymbolSpec) -> None:
        z = 0.3 + 0.4j
        image = adjoint_on_kernels(KernelCombination.from_terms([(1, z)], hardy), psi_z, identity())
        coeff, point = image.terms[0]
        assert abs(coeff - z.conjugate()) < 1e-15
        assert abs(point - z) < 1e-15

    def test_weight_zero(self, hardy: SpaceSpec, psi_half: SymbolSpec) -> None:
        image = adjoint_on_kernels(KernelCombination.from_terms([(1, 0.5)], hardy), psi_half, rotation(0.25))
        assert image.terms[0][0] == 0

    def test_normalized_adjoint(self, bergman: SpaceSpec, psi_half: SymbolSpec) -> None:
        m = hyperbolic_r(0.5)
        z = 0.1 - 0.3j
        normalized = KernelCombination.from_terms([(1, z)], bergman, normalized=True)
        plain = KernelCombination.from_terms([(1 / kernel_norm(bergman, z), z)], bergman)
        a = adjoint_on_kernels(normalized, psi_half, m)
        b = adjoint_on_kernels(plain, psi_half, m)
        assert abs(combo_norm(a) - combo_norm(b)) < 1e-12

    def test_shift_adjoint(self, hardy: SpaceSpec) -> None:
        z = 0.6j
        image = shift_adjoint_on_kernels(KernelCombination.from_terms([(2, z)], hardy))
        assert abs(image.terms[0][0] - 2 * z.conjugate()) < 1e-15


class TestRotationOrbitNorms:
    """Test the FFT evaluation of rotation-orbit norms."""

    @pytest.mark.parametrize("twist", [-1, 1])
    def test_matches_gram(self, twist: int) -> None:
        sp = SpaceSpec.bergman(0.5)
        eta = np.exp(2j * np.pi * 0.3819660112501051)
        z = 0.7 + 0.1j
        g = np.array([1.0, 0.5 - 0.2j, -0.3, 0.1j, 0.05])
        n = g.size
        points = z * eta ** np.arange(n)
        norms = rotation_orbit_norms(g, z, eta, sp, twist=twist)
        for m in range(n):
            twisted = g * np.exp(twist * 2j * np.pi * m * np.arange(n) / n)
            expected = combo_norm(KernelCombination(twisted, points, sp))
            assert abs(norms[m] - expected) < 1e-10 * expected

    def test_twist_values(self, hardy: SpaceSpec) -> None:
        with pytest.raises(InvalidParameter):
            rotation_orbit_norms(np.ones(3), 0.5, 1j, hardy, twist=0)
