from __future__ import annotations

import numpy as np
import pytest

from center_shadow.errors import TooFar, WrongModel
from center_shadow.leaves import (
    MINUS,
    PLUS,
    LeafLift,
    ModelKind,
    PointM,
    distance_M,
    hausdorff_distance,
    holonomy_order,
    leaf,
    lift_for_sign,
    lifts_of,
    map_M,
    matched_lift,
    modified_hausdorff,
    nearest_singular,
    project,
    quotient_map,
    sign_of,
    singular_leaves,
)
from center_shadow.torus import T2Point


def L(m, x, y):
    return leaf(m, (x, y))


class TestCanonicalLeaves:
    def test_pillowcase_representative_is_lexicographic_min(self, pillow):
        assert L(pillow, 0.9, 0.8).base.as_tuple() == pytest.approx((0.1, 0.2))
        assert L(pillow, 0.1, 0.2) == L(pillow, 0.9, 0.8)

    def test_trivial_keeps_point(self, trivial):
        assert L(trivial, 0.9, 0.8).base.as_tuple() == (0.9, 0.8)
        assert L(trivial, 0.1, 0.2) != L(trivial, 0.9, 0.8)

    def test_equality_tolerance(self, pillow):
        assert L(pillow, 0.3, 0.3) == L(pillow, 0.3 + 1e-13, 0.3)
        assert L(pillow, 0.3, 0.3) != L(pillow, 0.3 + 1e-9, 0.3)

    def test_unhashable(self, pillow):
        with pytest.raises(TypeError):
            hash(L(pillow, 0.1, 0.1))

    def test_singular_flags(self, pillow, trivial):
        assert L(pillow, 0.5, 0.0).singular
        assert not L(pillow, 0.25, 0.0).singular
        assert not L(trivial, 0.5, 0.0).singular


class TestQuotientMap:
    def test_singular_fixed(self, pillow):
        for n in (1, 2, -3):
            assert quotient_map(pillow, L(pillow, 0, 0), n) == L(pillow, 0, 0)

    def test_half_point_example(self, pillow):
        assert quotient_map(pillow, L(pillow, 0.5, 0.0)).base.as_tuple() == (0.0, 0.5)

    def test_inverse_roundtrip(self, pillow, rng):
        for x in rng.random((100, 2)):
            W = L(pillow, *x)
            assert quotient_map(pillow, quotient_map(pillow, W, 1), -1) == W

    def test_commutes_with_involution(self, pillow, rng):
        for x in rng.random((50, 2)):
            p = T2Point(*x)
            assert quotient_map(pillow, leaf(pillow, -p)) == quotient_map(pillow, leaf(pillow, p))


class TestHausdorff:
    @pytest.mark.parametrize(
        "x, y, expected",
        [((0.3, 0.4), (0.3, 0.4), 0.0), ((0.1, 0.0), (0.9, 0.0), 0.0), ((0.1, 0.0), (0.15, 0.0), 0.05)],
    )
    def test_examples(self, pillow, x, y, expected):
        assert hausdorff_distance(pillow, L(pillow, *x), L(pillow, *y)) == pytest.approx(expected, abs=1e-12)

    def test_trivial_is_torus_distance(self, trivial):
        assert hausdorff_distance(trivial, L(trivial, 0.1, 0), L(trivial, 0.9, 0)) == pytest.approx(0.2)


class TestModifiedHausdorff:
    def test_identity(self, pillow):
        assert modified_hausdorff(pillow, L(pillow, 0.2, 0.7), L(pillow, 0.2, 0.7)) == 0.0

    def test_threshold_branch(self, pillow):
        d1 = pillow.K.delta1
        got = modified_hausdorff(pillow, L(pillow, 0.3, 0.3), L(pillow, 0.3 + 2 * d1, 0.3))
        assert got == pillow.K.delta0 / 2

    def test_below_threshold(self, pillow):
        assert modified_hausdorff(pillow, L(pillow, 0.1, 0), L(pillow, 0.105, 0)) == pytest.approx(0.005)

    def test_sandwich(self, pillow, rng):
        K = pillow.K
        for a, b in rng.random((2000, 2, 2)):
            W1, W2 = L(pillow, *a), L(pillow, *b)
            d, D = hausdorff_distance(pillow, W1, W2), modified_hausdorff(pillow, W1, W2)
            assert min(K.delta0 / 2, d) <= D + 1e-15
            if d < K.delta1:
                assert D <= d + 1e-15

    def test_triangle_fails_across_the_threshold(self, pillow):
        """Two short steps below delta1 can span a gap above it, where the value jumps to delta0/2."""
        K = pillow.K
        step = 0.6 * K.delta1
        a, b, c = L(pillow, 0.3, 0.3), L(pillow, 0.3 + step, 0.3), L(pillow, 0.3 + 2 * step, 0.3)
        lhs = modified_hausdorff(pillow, a, c)
        rhs = modified_hausdorff(pillow, a, b) + modified_hausdorff(pillow, b, c)
        assert lhs == K.delta0 / 2 and rhs == pytest.approx(2 * step)
        assert lhs > rhs

    def test_triangle_holds_when_all_pairs_are_close(self, pillow, rng):
        s = pillow.K.delta1 / 3
        for c in rng.random((2000, 2)):
            pts = [c + s * rng.uniform(-0.7, 0.7, 2) for _ in range(3)]
            W = [L(pillow, *p) for p in pts]
            D = lambda i, j: modified_hausdorff(pillow, W[i], W[j])  # noqa: E731
            assert D(0, 2) <= D(0, 1) + D(1, 2) + 1e-12


class TestLifts:
    def test_counts(self, pillow, trivial):
        assert len(lifts_of(pillow, L(pillow, 0, 0))) == 1
        assert [lf.rep.as_tuple() for lf in lifts_of(pillow, L(pillow, 0.1, 0.2))] == pytest.approx([(0.1, 0.2), (0.9, 0.8)])
        assert len(lifts_of(trivial, L(trivial, 0.1, 0.2))) == 1

    def test_lift_consistency(self, pillow, rng):
        for x in rng.random((100, 2)):
            W = L(pillow, *x)
            lifts = lifts_of(pillow, W)
            assert all(project(pillow, lf) == W for lf in lifts)
            assert len(lifts) == 2 // holonomy_order(pillow, W)

    def test_signs(self, pillow):
        W = L(pillow, 0.9, 0.8)
        assert lift_for_sign(pillow, W, PLUS).rep.as_tuple() == pytest.approx((0.1, 0.2))
        assert lift_for_sign(pillow, W, MINUS).rep.as_tuple() == pytest.approx((0.9, 0.8))
        assert sign_of(pillow, W, LeafLift(T2Point(0.9, 0.8))) == MINUS

    def test_signs_inert_on_singular(self, pillow):
        W = L(pillow, 0.5, 0.5)
        assert lift_for_sign(pillow, W, PLUS) == lift_for_sign(pillow, W, MINUS)

    def test_bad_sign(self, pillow):
        with pytest.raises(ValueError):
            lift_for_sign(pillow, L(pillow, 0.1, 0.1), "x")


class TestMatchedLift:
    @pytest.mark.parametrize(
        "ref, target, expected",
        [((0.1, 0.0), (0.1, 0.0), (0.1, 0.0)), ((0.1, 0.0), (0.12, 0.0), (0.12, 0.0)), ((0.9, 0.8), (0.12, 0.21), (0.88, 0.79))],
    )
    def test_examples(self, pillow, ref, target, expected):
        lift, dec = matched_lift(pillow, LeafLift(T2Point(*ref)), L(pillow, *target))
        assert lift.rep.as_tuple() == pytest.approx(expected)
        assert lift_for_sign(pillow, L(pillow, *target), dec.sign) == lift

    def test_too_far(self, pillow):
        with pytest.raises(TooFar):
            matched_lift(pillow, LeafLift(T2Point(0.1, 0.1)), L(pillow, 0.4, 0.1))


class TestSingularLeaves:
    def test_four_half_integer_leaves(self, pillow):
        S = singular_leaves(pillow)
        assert len(S) == 4 and all(W.singular and holonomy_order(pillow, W) == 2 for W in S)

    def test_regular_order_one(self, pillow):
        assert holonomy_order(pillow, L(pillow, 0.1, 0.3)) == 1

    def test_trivial_model_rejected(self, trivial):
        with pytest.raises(WrongModel):
            singular_leaves(trivial)

    def test_nearest(self, pillow):
        W, d = nearest_singular(pillow, T2Point(0.49, 0.02))
        assert W == L(pillow, 0.5, 0.0) and d == pytest.approx(np.hypot(0.01, 0.02))


class TestPointsOfM:
    def test_involution_identifies_points(self, pillow):
        p = PointM(T2Point(0.1, 0.2), 0.3)
        q = PointM(T2Point(0.9, 0.8), 0.8)
        assert distance_M(pillow, p, q) == pytest.approx(0.0, abs=1e-15)

    def test_map_rotates_fiber(self):
        from center_shadow.leaves import ModelSystem

        m = ModelSystem.create(ModelKind.TRIVIAL, theta=0.25)
        q = map_M(m, PointM(T2Point(0, 0), 0.9), 2)
        assert q.t == pytest.approx(0.4)
