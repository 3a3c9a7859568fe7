import math

import numpy as np
import pytest

from sud_estimate.characters import (
    CONFLUENCE_THRESHOLD,
    QuadratureRule,
    TorusPoint,
    haar_quadrature,
    min_resolution,
    orthogonality_defect,
    pieri_residual,
    quadrature_risk,
    random_torus_points,
    schur_eval,
    su_equivalent,
)
from sud_estimate.errors import ResolutionError
from sud_estimate.partitions import enumerate_partitions, weyl_dimension
from sud_estimate.risk import exact_risk
from sud_estimate.weights import product_weights, uniform_weights


def su2_character(k: int, theta: float) -> float:
    """sin((k+1) theta) / sin(theta), the closed form for d=2."""
    if abs(math.sin(theta)) < 1e-12:
        return float(k + 1)
    return math.sin((k + 1) * theta) / math.sin(theta)


class TestTorusPoint:
    def test_eigenphases_sum_to_zero(self):
        p = TorusPoint((0.3, -1.2, 2.5))
        assert p.d == 4
        assert math.fsum(p.eigenphases) == pytest.approx(0.0, abs=1e-15)

    def test_eigenvalue_product_is_one(self):
        for p in random_torus_points(3, 20, seed=7):
            prod = np.prod(p.eigenvalues)
            assert abs(prod - 1.0) < 1e-12

    def test_random_points_deterministic(self):
        a = random_torus_points(3, 5, seed=11)
        b = random_torus_points(3, 5, seed=11)
        c = random_torus_points(3, 5, seed=12)
        assert [p.angles for p in a] == [p.angles for p in b]
        assert [p.angles for p in a] != [p.angles for p in c]


class TestSuEquivalence:
    def test_full_column_shift(self):
        assert su_equivalent((2, 1, 0), (3, 2, 1))
        assert su_equivalent((5, 0), (7, 2))
        assert not su_equivalent((2, 1, 0), (2, 2, 0))
        assert not su_equivalent((3, 1, 0), (4, 1, 0))

    def test_rejects_mismatched_rank(self):
        with pytest.raises(ValueError):
            su_equivalent((2, 1, 0), (2, 1))


class TestSchurEval:
    def test_su2_closed_form(self):
        for theta in (0.17, 1.3, 2.9):
            point = TorusPoint((theta,))
            for k in range(7):
                got = schur_eval((k, 0), point)
                assert got.imag == pytest.approx(0.0, abs=1e-10)
                assert got.real == pytest.approx(su2_character(k, theta), abs=1e-10)

    def test_box_character_is_eigenvalue_sum(self):
        for point in random_torus_points(3, 10, seed=3):
            got = schur_eval((1, 0, 0), point)
            assert got == pytest.approx(sum(point.eigenvalues), abs=1e-10)

    def test_identity_gives_weyl_dimension(self):
        # all eigenvalues collide at 1, forcing the divided-difference path
        for d, parts in [(2, (4, 0)), (3, (3, 1, 0)), (4, (2, 2, 1, 0))]:
            point = TorusPoint((0.0,) * (d - 1))
            got = schur_eval(parts, point)
            assert got == pytest.approx(weyl_dimension(parts), abs=1e-9)

    def test_confluent_path_matches_closed_form(self):
        theta = CONFLUENCE_THRESHOLD / 100  # well inside the fallback regime
        got = schur_eval((5, 0), TorusPoint((theta,)))
        assert got.real == pytest.approx(su2_character(5, theta), abs=1e-8)

    def test_equivalent_labels_agree_pointwise(self):
        for point in random_torus_points(3, 10, seed=5):
            a = schur_eval((2, 1, 0), point)
            b = schur_eval((3, 2, 1), point)
            assert a == pytest.approx(b, abs=1e-9)

    def test_rejects_rank_mismatch(self):
        with pytest.raises(ValueError):
            schur_eval((2, 1, 0), TorusPoint((0.4,)))


class TestQuadrature:
    def test_total_mass_is_one(self):
        for d, resolution in [(2, 8), (2, 31), (3, 12), (4, 9)]:
            rule = haar_quadrature(d, resolution)
            assert math.fsum(rule.weights) == pytest.approx(1.0, abs=1e-12)

    def test_refuses_resolution_below_measure_degree(self):
        with pytest.raises(ResolutionError) as info:
            haar_quadrature(3, 4)
        assert info.value.suggested_resolution == 5

    def test_rejects_d1(self):
        with pytest.raises(ValueError):
            haar_quadrature(1, 8)

    def test_min_resolution_value(self):
        assert min_resolution(2, 5) == 28
        assert min_resolution(3, 0) == 12

    def test_identity_node_survives_with_zero_weight(self):
        # first grid node is the identity; its character value comes from
        # the stable path and its quadrature weight vanishes
        rule = haar_quadrature(2, 12)
        values = rule.character_values((3, 0))
        assert values[0] == pytest.approx(4.0, abs=1e-9)
        assert rule.weights[0] == pytest.approx(0.0, abs=1e-15)

    def test_character_values_cached(self):
        rule = haar_quadrature(2, 16)
        first = rule.character_values((2, 0))
        second = rule.character_values((2, 0))
        assert first is second

    def test_nodes_property(self):
        rule = haar_quadrature(3, 6)
        nodes = rule.nodes
        assert len(nodes) == 36
        assert all(isinstance(p, TorusPoint) and p.d == 3 for p in nodes)

    def test_inner_products_match_equivalence(self):
        rule = haar_quadrature(2, 24)
        assert rule.inner_product((3, 0), (3, 0)) == pytest.approx(1.0, abs=1e-12)
        assert rule.inner_product((4, 1), (3, 0)) == pytest.approx(1.0, abs=1e-12)
        assert abs(rule.inner_product((3, 0), (2, 0))) < 1e-12
        assert abs(rule.inner_product((4, 0), (2, 2))) < 1e-12

    def test_orthogonality_defect_small(self):
        assert orthogonality_defect(2, 8) < 1e-8
        assert orthogonality_defect(3, 4) < 1e-8

    def test_aliasing_at_divisor_resolution(self):
        # |chi_(6,0)|^2 |Delta|^2 / 2 = 2 - 2 cos(14 theta): the rule errs
        # exactly when the resolution divides 14
        exact = haar_quadrature(2, 8)
        assert exact.inner_product((6, 0), (6, 0)) == pytest.approx(1.0, abs=1e-12)
        aliased = haar_quadrature(2, 7)  # chi vanishes on that whole grid
        assert abs(aliased.inner_product((6, 0), (6, 0)) - 1.0) > 0.5


class TestPieriResidual:
    @pytest.mark.parametrize(
        "parts", [(3, 0), (4, 2), (2, 1, 0), (3, 3, 1), (2, 1, 1, 0)]
    )
    def test_branching_identity_pointwise(self, parts):
        points = random_torus_points(len(parts), 25, seed=42)
        assert pieri_residual(parts, points) < 1e-9


class TestQuadratureRisk:
    def test_matches_exact_risk_d2(self):
        for n in (3, 4, 5, 8):
            w = product_weights(2, n)
            want = float(exact_risk(2, n, w).risk)
            assert quadrature_risk(2, n, w) == pytest.approx(want, abs=1e-10)

    def test_matches_exact_risk_uniform(self):
        w = uniform_weights(2, 5)
        assert quadrature_risk(2, 5, w) == pytest.approx(0.25, abs=1e-10)

    def test_matches_exact_risk_d3(self):
        w = product_weights(3, 6)
        want = float(exact_risk(3, 6, w).risk)
        assert quadrature_risk(3, 6, w) == pytest.approx(want, abs=1e-10)

    def test_low_resolution_refused_with_suggestion(self):
        w = product_weights(2, 5)
        with pytest.raises(ResolutionError) as info:
            quadrature_risk(2, 5, w, resolution=6)
        assert info.value.suggested_resolution == min_resolution(2, 5)

    def test_resolution_just_above_bandwidth_is_exact(self):
        # bandwidth at d=2, N=5 is 16, so 17 already suffices even though
        # the default resolution is 28
        w = product_weights(2, 5)
        want = float(exact_risk(2, 5, w).risk)
        assert quadrature_risk(2, 5, w, resolution=17) == pytest.approx(
            want, abs=1e-12
        )
        with pytest.raises(ResolutionError):
            quadrature_risk(2, 5, w, resolution=16)

    def test_weight_metadata_must_match(self):
        w = product_weights(2, 5)
        with pytest.raises(ValueError):
            quadrature_risk(2, 6, w)
        with pytest.raises(ValueError):
            quadrature_risk(3, 5, w)


def test_quadrature_rule_is_reusable_across_levels():
    # one rule at high resolution serves every label below its bandwidth
    rule = haar_quadrature(2, 40)
    assert isinstance(rule, QuadratureRule)
    for n in range(5):
        for parts in enumerate_partitions(2, n):
            values = rule.character_values(parts)
            norm = rule.integrate(values * np.conj(values))
            assert norm.real == pytest.approx(1.0, abs=1e-12)
