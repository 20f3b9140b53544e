"""Tests for weights and their circle means."""

import math

import pytest

from specwin.core.mobius import automorphism_to, hyperbolic_r, identity, rotation
from specwin.core.symbol import (
    SymbolSpec,
    cocycle,
    cocycle_log,
    compose_automorphism,
    delta_psi,
    ergodic_average,
    ergodic_trace,
    evaluate,
    is_invertible_weight,
    jensen_delta,
    outer_modulus_at,
    product,
    sup_cocycle_root,
    zero_report,
)
from specwin.types import InvalidParameter, InvalidSymbol, OutsideClosedDisk, WrongKind, ZeroOnOrbit


class TestSymbolSpec:
    """Test construction and evaluation of weights."""

    def test_root_is_zero(self, psi_half: SymbolSpec) -> None:
        assert evaluate(psi_half, 0.5) == 0

    def test_blaschke_factor_at_origin(self) -> None:
        psi = SymbolSpec.polynomial([1], blaschke=[0])
        assert abs(evaluate(psi, 0.3) - 0.3) < 1e-15

    def test_boundary_value(self, psi_half: SymbolSpec) -> None:
        assert abs(evaluate(psi_half, 1.0) - 0.5) < 1e-15

    def test_outside_closed_disk(self, psi_half: SymbolSpec) -> None:
        with pytest.raises(OutsideClosedDisk):
            evaluate(psi_half, 1.5)

    def test_zero_weight_rejected(self) -> None:
        with pytest.raises(InvalidSymbol, match="vanishes identically"):
            SymbolSpec.polynomial([0, 0])

    def test_pole_in_disk_rejected(self) -> None:
        with pytest.raises(InvalidSymbol, match="closed disk"):
            SymbolSpec((1,), (0.5, 1))

    def test_blaschke_zero_outside_rejected(self) -> None:
        with pytest.raises(InvalidSymbol):
            SymbolSpec.polynomial([1], blaschke=[1.0])

    def test_rational_weight(self) -> None:
        psi = SymbolSpec((1,), (2, 1))
        assert abs(evaluate(psi, 0.5) - 1 / 2.5) < 1e-15

    def test_product(self, psi_half: SymbolSpec, psi_z: SymbolSpec) -> None:
        both = product(psi_half, psi_z)
        assert abs(evaluate(both, 0.3) - (0.3 - 0.5) * 0.3) < 1e-15

    def test_compose_automorphism(self, psi_half: SymbolSpec) -> None:
        g = automorphism_to(0.3 + 0.2j)
        composed = compose_automorphism(psi_half, g)
        for z in (0.1, -0.4j, 0.5 + 0.5j):
            assert abs(composed(z) - psi_half(g(z))) < 1e-12

    def test_compose_automorphism_blaschke_modulus(self) -> None:
        psi = SymbolSpec.polynomial([1], blaschke=[0.4])
        g = automorphism_to(0.2j)
        composed = compose_automorphism(psi, g)
        z = 0.3 - 0.1j
        assert abs(abs(composed(z)) - abs(psi(g(z)))) < 1e-12


class TestZeros:
    """Test zero bucketing and invertibility."""

    def test_inner_zero(self, psi_half: SymbolSpec) -> None:
        report = zero_report(psi_half)
        assert len(report.zeros_inside) == 1
        assert abs(report.zeros_inside[0] - 0.5) < 1e-14
        assert report.zeros_boundary == ()
        assert abs(report.min_inner_radius - 0.5) < 1e-14

    def test_boundary_zero(self) -> None:
        report = zero_report(SymbolSpec.polynomial([-1, 1]))
        assert report.zeros_inside == ()
        assert len(report.zeros_boundary) == 1
        assert abs(report.zeros_boundary[0] - 1) < 1e-12
        assert report.min_inner_radius == math.inf
        assert report.has_boundary_zero

    def test_both(self) -> None:
        psi = SymbolSpec.polynomial([0.5, -1.5, 1])
        report = zero_report(psi)
        assert len(report.zeros_inside) == 1 and len(report.zeros_boundary) == 1
        assert abs(report.min_inner_radius - 0.5) < 1e-12

    def test_tolerance_range(self, psi_half: SymbolSpec) -> None:
        with pytest.raises(InvalidParameter):
            zero_report(psi_half, tol=0.1)

    @pytest.mark.parametrize(
        ("coeffs", "expected"),
        [([2, 1], True), ([-0.5, 1], False), ([-1, 1], False)],
    )
    def test_invertible_weight(self, coeffs: list[float], expected: bool) -> None:
        assert is_invertible_weight(SymbolSpec.polynomial(coeffs)) is expected

    def test_blaschke_factor_is_not_invertible(self) -> None:
        assert not is_invertible_weight(SymbolSpec.polynomial([1], blaschke=[0.2]))


class TestCircleMeans:
    """Test Delta_psi, Jensen's formula and the outer modulus."""

    def test_delta_of_identity_weight(self, psi_z: SymbolSpec) -> None:
        assert abs(delta_psi(psi_z, 0.7) - 0.7) < 1e-10

    def test_delta_on_unit_circle(self, psi_half: SymbolSpec) -> None:
        assert abs(delta_psi(psi_half, 1.0) - 1.0) < 1e-8

    def test_delta_inside_zero_free_disk(self, psi_half: SymbolSpec) -> None:
        assert abs(delta_psi(psi_half, 0.25) - 0.5) < 1e-10

    def test_delta_at_origin(self, psi_half: SymbolSpec) -> None:
        assert delta_psi(psi_half, 0.0) == 0.5

    def test_delta_radius_range(self, psi_half: SymbolSpec) -> None:
        with pytest.raises(InvalidParameter):
            delta_psi(psi_half, 1.5)

    def test_jensen_values(self, psi_half: SymbolSpec) -> None:
        assert abs(jensen_delta(psi_half, 1.0) - 1.0) < 1e-12
        assert abs(jensen_delta(psi_half, 0.4) - 0.5) < 1e-12

    def test_constant_weight(self) -> None:
        psi = SymbolSpec.constant(2.5)
        for r in (0.1, 0.6, 1.0):
            assert abs(jensen_delta(psi, r) - 2.5) < 1e-12
            assert abs(delta_psi(psi, r) - 2.5) < 1e-10

    @pytest.mark.parametrize("r", [0.2, 0.5, 0.75, 0.95])
    def test_quadrature_matches_jensen(self, r: float) -> None:
        psi = SymbolSpec((0.3, -1.2, 1), (2, 0.5), (0.6j,))
        assert abs(delta_psi(psi, r) - jensen_delta(psi, r)) < 1e-8

    def test_outer_modulus_at_origin(self, psi_half: SymbolSpec) -> None:
        assert abs(outer_modulus_at(psi_half, 0) - 1.0) < 1e-8

    def test_outer_modulus_of_inner_function(self) -> None:
        psi = SymbolSpec.polynomial([1], blaschke=[0.3])
        assert abs(outer_modulus_at(psi, 0.4 + 0.2j) - 1.0) < 1e-8

    def test_outer_modulus_of_constant(self) -> None:
        assert abs(outer_modulus_at(SymbolSpec.constant(-3), 0.5) - 3.0) < 1e-8


class TestCocycle:
    """Test the iteration cocycle."""

    def test_empty_product(self, psi_half: SymbolSpec, hyperbolic_half) -> None:
        assert cocycle(psi_half, hyperbolic_half, 0, 0.3) == 1

    def test_constant_weight(self, hyperbolic_half) -> None:
        assert abs(cocycle(SymbolSpec.constant(0.9), hyperbolic_half, 5, 0.1) - 0.9**5) < 1e-14

    def test_rotation_product(self, psi_z: SymbolSpec) -> None:
        """0.5 * 0.5i * (-0.5) * (-0.5i)."""
        assert abs(cocycle(psi_z, rotation(0.25), 4, 0.5) - (-0.0625)) < 1e-14

    def test_log_space_agrees(self, psi_half: SymbolSpec) -> None:
        m = hyperbolic_r(0.3)
        direct = cocycle(psi_half, m, 40, 0.1j, log_space=False)
        logged = cocycle(psi_half, m, 40, 0.1j, log_space=True)
        assert abs(direct - logged) <= 1e-12 * abs(direct)

    def test_zero_on_orbit(self, psi_half: SymbolSpec) -> None:
        with pytest.raises(ZeroOnOrbit):
            cocycle_log(psi_half, identity(), 3, 0.5)
        assert cocycle(psi_half, identity(), 3, 0.5, log_space=True) == 0


class TestErgodic:
    """Test Birkhoff averages along rotation orbits."""

    def test_constant_weight(self, golden_rotation) -> None:
        assert abs(ergodic_average(SymbolSpec.constant(0.5), golden_rotation, 0.3, 100) - math.log(0.5)) < 1e-12

    def test_identity_weight_keeps_modulus(self, psi_z: SymbolSpec, golden_rotation) -> None:
        assert abs(ergodic_average(psi_z, golden_rotation, 0.5j, 500) - math.log(0.5)) < 1e-12

    def test_trace_marks(self, psi_z: SymbolSpec, golden_rotation) -> None:
        trace = ergodic_trace(psi_z, golden_rotation, 0.5, 2500, 1000)
        assert [n for n, _ in trace] == [1000, 2000, 2500]

    def test_needs_irrational_rotation(self, psi_z: SymbolSpec) -> None:
        with pytest.raises(WrongKind):
            ergodic_average(psi_z, rotation(0.25), 0.5, 10)

    def test_sup_root_of_constant(self, golden_rotation) -> None:
        assert abs(sup_cocycle_root(SymbolSpec.constant(1.5), golden_rotation, 50, 64) - 1.5) < 1e-12

    def test_sup_root_of_identity_weight(self, psi_z: SymbolSpec, golden_rotation) -> None:
        assert abs(sup_cocycle_root(psi_z, golden_rotation, 50, 64) - 1.0) < 1e-12

    @pytest.mark.slow
    def test_boundary_average_converges(self, psi_half: SymbolSpec, golden_rotation) -> None:
        assert abs(ergodic_average(psi_half, golden_rotation, 1.0, 100_000)) < 5e-3

    @pytest.mark.slow
    def test_sup_root_limit(self, psi_half: SymbolSpec, golden_rotation) -> None:
        value = sup_cocycle_root(psi_half, golden_rotation, 2000, 4096)
        assert 0.98 <= value <= 1.02
