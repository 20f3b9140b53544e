"""Tests for disk automorphisms and their classification."""

import cmath
import math

import numpy as np
import pytest

from specwin.core.mobius import (
    MobiusMap,
    classify,
    compose,
    derivative,
    elliptic,
    from_coefficients,
    half_plane_model,
    hyperbolic_r,
    identity,
    inverse,
    iterate,
    orbit,
    parabolic_cayley,
    power,
    pseudo_hyperbolic,
    return_times,
    rotation,
)
from specwin.types import (
    CanonicalKind,
    DegenerateMap,
    InvalidParameter,
    MapKind,
    NotAutomorphism,
    OutsideDisk,
    RationalMultiplier,
    WrongKind,
)

from .conftest import GOLDEN


class TestConstruction:
    """Test MobiusMap construction and normalization."""

    def test_degenerate_matrix(self) -> None:
        with pytest.raises(DegenerateMap):
            MobiusMap.from_matrix([[1, 1], [1, 1]])

    def test_not_automorphism(self) -> None:
        """z -> z/2 maps the disk into itself but not onto it."""
        with pytest.raises(NotAutomorphism):
            from_coefficients(1, 0, 0, 2)

    def test_scaling_does_not_change_the_map(self) -> None:
        m1 = from_coefficients(1, 0.5, 0.5, 1)
        m2 = from_coefficients(3, 1.5, 1.5, 3)
        z = np.array([0.1 + 0.2j, -0.4j, 0.7])
        assert np.allclose(m1(z), m2(z))
        assert abs(m1.determinant - 1) < 1e-12

    def test_hyperbolic_parameter_range(self) -> None:
        with pytest.raises(InvalidParameter):
            hyperbolic_r(1.0)

    def test_parabolic_sign(self) -> None:
        with pytest.raises(InvalidParameter):
            parabolic_cayley(2)

    def test_parabolic_cayley_coefficients(self) -> None:
        """((2i - 1) z + 1) / (-z + 1 + 2i)."""
        m = parabolic_cayley(1)
        z = 0.3 - 0.2j
        assert abs(m(z) - ((2j - 1) * z + 1) / (-z + 1 + 2j)) < 1e-14


class TestGroupOperations:
    """Test composition, inversion and iteration."""

    def test_iterate_rotation_period(self) -> None:
        assert abs(iterate(rotation(0.25), 4, 0.3) - 0.3) < 1e-14

    def test_iterate_zero_is_identity(self) -> None:
        assert iterate(hyperbolic_r(0.5), 0, 0.2 + 0.1j) == 0.2 + 0.1j

    def test_iterate_hyperbolic(self) -> None:
        """0 -> 1/2 -> 4/5 -> 13/14."""
        assert abs(iterate(hyperbolic_r(0.5), 3, 0.0) - 13 / 14) < 1e-14

    def test_compose_with_inverse(self) -> None:
        m = parabolic_cayley(1)
        assert classify(compose(m, inverse(m))).kind == MapKind.IDENTITY

    def test_inverse_rotation(self) -> None:
        assert abs(inverse(rotation(0.25))(0.5) - (-0.5j)) < 1e-14

    def test_compose_rotations(self) -> None:
        combined = compose(rotation(0.1), rotation(0.2))
        assert abs(combined(0.5) - 0.5 * cmath.exp(2j * math.pi * 0.3)) < 1e-14

    def test_negative_power_iterates_inverse(self) -> None:
        m = hyperbolic_r(0.5)
        assert abs(power(m, -2)(power(m, 2)(0.3)) - 0.3) < 1e-12

    def test_orbit_shape(self) -> None:
        points = orbit(hyperbolic_r(0.5), np.array([0.0, 0.1]), 4)
        assert points.shape == (4, 2)
        assert abs(points[3, 0] - 13 / 14) < 1e-14


class TestDerivative:
    """Test derivatives of automorphisms."""

    def test_rotation_derivative(self) -> None:
        assert abs(derivative(rotation(0.25), 0.4 + 0.1j) - 1j) < 1e-14

    def test_hyperbolic_derivatives(self) -> None:
        m = hyperbolic_r(0.5)
        assert abs(derivative(m, 1.0) - 1 / 3) < 1e-14
        assert abs(derivative(m, -1.0) - 3) < 1e-12


class TestClassification:
    """Test classify on the three automorphism classes."""

    def test_rational_rotation(self) -> None:
        info = classify(rotation(0.25))
        assert info.kind == MapKind.ELLIPTIC_RATIONAL
        assert info.period == 4
        assert abs(info.fixed_points[0]) < 1e-14
        assert abs(info.multiplier - 1j) < 1e-12

    def test_irrational_rotation(self) -> None:
        info = classify(rotation(GOLDEN))
        assert info.kind == MapKind.ELLIPTIC_IRRATIONAL
        assert info.period is None

    def test_elliptic_off_center(self) -> None:
        info = classify(elliptic(0.3 + 0.1j, GOLDEN))
        assert info.kind == MapKind.ELLIPTIC_IRRATIONAL
        assert abs(info.fixed_points[0] - (0.3 + 0.1j)) < 1e-12
        assert info.interior_fixed_point is not None

    def test_hyperbolic(self) -> None:
        info = classify(hyperbolic_r(0.5))
        assert info.kind == MapKind.HYPERBOLIC
        assert abs(info.denjoy_wolff - 1) < 1e-12
        assert abs(info.repelling_point + 1) < 1e-12
        assert abs(info.multiplier - 1 / 3) < 1e-12

    def test_parabolic(self) -> None:
        info = classify(parabolic_cayley(1))
        assert info.kind == MapKind.PARABOLIC
        assert abs(info.denjoy_wolff - 1) < 1e-7
        assert abs(info.multiplier - 1) < 1e-7

    def test_identity(self) -> None:
        info = classify(identity())
        assert info.kind == MapKind.IDENTITY
        assert info.period == 1

    def test_cutoff_is_reported(self) -> None:
        info = classify(rotation(1 / 600), max_period=512)
        assert info.kind == MapKind.ELLIPTIC_IRRATIONAL
        assert info.rational_cutoff == 512


class TestGeometry:
    """Test the pseudo-hyperbolic distance and half-plane models."""

    def test_distance_to_self(self) -> None:
        assert pseudo_hyperbolic(0.3j, 0.3j) == 0.0

    def test_distance_from_origin(self) -> None:
        assert abs(pseudo_hyperbolic(0, 0.4 + 0.3j) - 0.5) < 1e-15

    def test_distance_value(self) -> None:
        assert abs(pseudo_hyperbolic(0.5, 0.25) - 0.25 / 0.875) < 1e-15

    def test_distance_outside_disk(self) -> None:
        with pytest.raises(OutsideDisk):
            pseudo_hyperbolic(1.0, 0.0)

    def test_hyperbolic_model(self) -> None:
        sigma, canonical = half_plane_model(hyperbolic_r(0.5))
        assert canonical.kind == CanonicalKind.DILATION
        assert abs(canonical.value - 1 / 3) < 1e-12
        assert abs(sigma(-1.0)) < 1e-12

    def test_parabolic_model(self) -> None:
        m = parabolic_cayley(1)
        sigma, canonical = half_plane_model(m)
        assert canonical.kind == CanonicalKind.TRANSLATION
        assert canonical.value == 1.0
        z = 0.2 + 0.3j
        assert abs(sigma(m(z)) - (sigma(z) + 1)) < 1e-9

    def test_elliptic_model_rejected(self) -> None:
        with pytest.raises(WrongKind):
            half_plane_model(rotation(0.25))

    def test_canonical_backward(self) -> None:
        _, canonical = half_plane_model(hyperbolic_r(0.5))
        w = 0.5 + 1j
        assert abs(canonical.apply(canonical.backward(w, 3)) - canonical.backward(w, 2)) < 1e-12


class TestReturnTimes:
    """Test continued-fraction return times."""

    def test_golden_rotation(self) -> None:
        assert return_times(cmath.exp(2j * math.pi * GOLDEN), 6) == [1, 2, 3, 5, 8, 13]

    def test_inverse_pi(self) -> None:
        assert return_times(cmath.exp(2j * math.pi / math.pi), 3) == [1, 3, 22]

    def test_rational_multiplier(self) -> None:
        with pytest.raises(RationalMultiplier):
            return_times(1j, 4)

    def test_times_improve(self) -> None:
        eta = cmath.exp(2j * math.pi * GOLDEN)
        times = return_times(eta, 12)
        gaps = [abs(eta**n - 1) for n in times]
        assert all(b < a for a, b in zip(gaps, gaps[1:]))
