"""Tests for matrix compressions and pseudospectra."""

import cmath
import math

import numpy as np
import pytest

from specwin.core.mobius import identity, parabolic_cayley, rotation
from specwin.core.space import SpaceSpec
from specwin.core.symbol import SymbolSpec
from specwin.core.truncation import (
    GridSpec,
    build_truncation,
    column_function,
    eigenvalues,
    kernel_adjoint_error,
    norm_power_radius,
    pseudospectrum_grid,
    sigma_min_at,
)
from specwin.types import InvalidParameter


class TestBuildTruncation:
    """Test the matrix entries of compressions."""

    def test_rotation_is_diagonal(self, hardy: SpaceSpec) -> None:
        t = build_truncation(SymbolSpec.constant(1), rotation(0.1), hardy, 8)
        eta = cmath.exp(0.2j * math.pi)
        assert np.allclose(t.entries, np.diag(eta ** np.arange(8)), atol=1e-12)
        assert t.radius == 0.0 and t.stable

    def test_shift_matrix(self, hardy: SpaceSpec, psi_z: SymbolSpec) -> None:
        t = build_truncation(psi_z, identity(), hardy, 4)
        assert np.array_equal(t.entries, np.eye(4, k=-1))

    def test_bergman_identity(self, bergman: SpaceSpec) -> None:
        t = build_truncation(SymbolSpec.constant(1), identity(), bergman, 3)
        assert np.allclose(t.entries, np.eye(3), atol=1e-15)

    def test_bergman_shift_ratio(self, bergman: SpaceSpec, psi_z: SymbolSpec) -> None:
        """z e_n = (beta_{n+1} / beta_n) e_{n+1} with beta_n = (n+1)^(-1/2)."""
        t = build_truncation(psi_z, identity(), bergman, 4)
        assert abs(t.entries[1, 0] - 1 / math.sqrt(2)) < 1e-15

    def test_dimension_must_be_positive(self, hardy: SpaceSpec) -> None:
        with pytest.raises(InvalidParameter):
            build_truncation(SymbolSpec.constant(1), identity(), hardy, 0)

    def test_cauchy_extraction_is_stable(self, hardy: SpaceSpec, psi_half: SymbolSpec, hyperbolic_half) -> None:
        t = build_truncation(psi_half, hyperbolic_half, hardy, 32)
        assert t.stable
        assert 0 < t.radius < 1
        assert t.samples >= 1024

    @pytest.mark.parametrize("space", [SpaceSpec.hardy(), SpaceSpec.bergman(0.0)])
    def test_adjoint_identity(self, space: SpaceSpec, psi_half: SymbolSpec) -> None:
        t = build_truncation(psi_half, parabolic_cayley(1), space, 128)
        for z in (0.0, 0.3 + 0.4j, -0.6j):
            assert kernel_adjoint_error(t, z) < 1e-6

    def test_column_reproduction(self, hardy: SpaceSpec, psi_half: SymbolSpec, hyperbolic_half) -> None:
        t = build_truncation(psi_half, hyperbolic_half, hardy, 64)
        z = 0.2 - 0.1j
        for n in (0, 3, 10):
            assert abs(column_function(t, n, z) - psi_half(z) * hyperbolic_half(z) ** n) < 1e-8

    def test_column_index_range(self, hardy: SpaceSpec) -> None:
        t = build_truncation(SymbolSpec.constant(1), identity(), hardy, 2)
        with pytest.raises(InvalidParameter):
            column_function(t, 2, 0.1)

    def test_with_entries(self, hardy: SpaceSpec) -> None:
        t = build_truncation(SymbolSpec.constant(1), identity(), hardy, 2)
        changed = t.with_entries(np.zeros((2, 2)))
        assert np.all(changed.entries == 0)
        assert np.array_equal(t.entries, np.eye(2))


class TestSpectralQuantities:
    """Test eigenvalues, sigma_min and the norm-power radius."""

    def test_rotation_eigenvalues(self, hardy: SpaceSpec) -> None:
        t = build_truncation(SymbolSpec.constant(1), rotation(0.25), hardy, 4)
        values = eigenvalues(t)
        expected = [1, 1j, -1, -1j]
        for v in expected:
            assert np.min(np.abs(values - v)) < 1e-12

    def test_shift_eigenvalues(self, hardy: SpaceSpec, psi_z: SymbolSpec) -> None:
        t = build_truncation(psi_z, identity(), hardy, 4)
        assert np.allclose(eigenvalues(t), 0)

    def test_constant_multiplier(self, hardy: SpaceSpec) -> None:
        t = build_truncation(SymbolSpec.constant(0.7), identity(), hardy, 5)
        assert np.allclose(eigenvalues(t), 0.7)

    def test_sigma_min_on_diagonal(self, hardy: SpaceSpec) -> None:
        t = build_truncation(SymbolSpec.constant(1), rotation(0.25), hardy, 4)
        assert sigma_min_at(t, np.array([1j]))[0] < 1e-12

    def test_sigma_min_of_shift(self, hardy: SpaceSpec, psi_z: SymbolSpec) -> None:
        t = build_truncation(psi_z, identity(), hardy, 4)
        assert sigma_min_at(t, np.array([0.0]))[0] < 1e-12

    def test_sigma_min_of_identity(self, hardy: SpaceSpec) -> None:
        t = build_truncation(SymbolSpec.constant(1), identity(), hardy, 6)
        assert abs(sigma_min_at(t, np.array([1.001]))[0] - 0.001) < 1e-12

    def test_schur_path_matches_svd(self, hardy: SpaceSpec, psi_half: SymbolSpec, hyperbolic_half) -> None:
        t = build_truncation(psi_half, hyperbolic_half, hardy, 80)
        points = np.array([0.3, 1.2j, -0.8 + 0.5j])
        fast = sigma_min_at(t, points)
        eye = np.eye(80)
        exact = [np.linalg.svd(t.entries - p * eye, compute_uv=False)[-1] for p in points]
        assert np.allclose(fast, exact, rtol=1e-4, atol=1e-10)

    def test_grid_field(self, hardy: SpaceSpec) -> None:
        t = build_truncation(SymbolSpec.constant(1), rotation(0.25), hardy, 4)
        grid = GridSpec(-1.0, 1.0, -1.0, 1.0, 3, 3)
        seen: list[int] = []
        field = pseudospectrum_grid(t, grid, on_chunk=seen.append)
        assert field.values.shape == (3, 3)
        assert sum(seen) == 9
        rows = field.rows()
        assert len(rows) == 9
        assert rows[0][:2] == (-1.0, -1.0)
        # the grid hits the eigenvalues 1, i, -1 and -i
        zeros = [(re, im) for re, im, value in rows if value < 1e-12]
        assert set(zeros) == {(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)}

    def test_grid_validation(self) -> None:
        with pytest.raises(InvalidParameter):
            GridSpec(1.0, -1.0, -1.0, 1.0, 3, 3)

    def test_grid_around(self) -> None:
        grid = GridSpec.around(2.0, 11, 11, 0.5)
        assert grid.re_max == pytest.approx(2.5)
        assert grid.im_min == pytest.approx(-2.5)

    def test_norm_power_radius_rotation(self, hardy: SpaceSpec) -> None:
        t = build_truncation(SymbolSpec.constant(1), rotation(0.1), hardy, 6)
        assert np.allclose(norm_power_radius(t, 5), 1.0)

    def test_norm_power_radius_constant(self, hardy: SpaceSpec) -> None:
        t = build_truncation(SymbolSpec.constant(0.3), identity(), hardy, 6)
        assert np.allclose(norm_power_radius(t, 4), 0.3)

    def test_norm_power_radius_nilpotent(self, hardy: SpaceSpec, psi_z: SymbolSpec) -> None:
        t = build_truncation(psi_z, identity(), hardy, 4)
        assert norm_power_radius(t, 4)[-1] == 0.0

    def test_norm_power_range(self, hardy: SpaceSpec) -> None:
        t = build_truncation(SymbolSpec.constant(1), identity(), hardy, 2)
        with pytest.raises(InvalidParameter):
            norm_power_radius(t, 0)
