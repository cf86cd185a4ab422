import math

import numpy as np
import pytest

from conftest import X, Y, in_lens_rsr, not_in_lens_rsr, random_lens_curves, word_curve
from kcurves.dubins import Word
from kcurves.errors import CurveValidationError, DomainError
from kcurves.generator import random_curve
from kcurves.geometry import (
    ArcComponent,
    Config,
    CsCurve,
    KappaParams,
    Point2,
    SegmentComponent,
    circle_through,
    self_intersections,
)
from kcurves.regions import (
    ClassLabel,
    RegionTag,
    UnionMembership,
    are_homotopic,
    assert_no_curve_in_E,
    boundary_contacts,
    build_lens,
    check_union_dichotomy,
    class_count,
    class_label,
    class_minimum_length,
    classify_point,
    classify_points,
    curve_in_cl_lens,
    curve_in_union,
    is_boundary_arc,
    labels_for,
)


def _loop_around(kappa):
    """Right-turning detour from x around (2, 0) and (-1, 0) into y; far outside both disks."""
    return word_curve(Config(X, math.pi / 2), Config(Y, -math.pi / 2), kappa, Word.RSR)


def _bulge(kappa):
    """Radius-0.6 arc from x to y; too tight, and it pokes out of the lens into D1."""
    cy = -math.sqrt(0.36 - 0.25)
    a0, a1 = math.atan2(-cy, -0.5), math.atan2(-cy, 0.5)
    return CsCurve(kappa, (ArcComponent(Point2(0.5, cy), 0.6, a0, a1 - a0),))


class TestLens:
    def test_centers(self, lens):
        """C1 sits left of x -> y, C2 right of it."""
        assert lens.c1 == pytest.approx((0.5, math.sqrt(3) / 2))
        assert lens.c2 == pytest.approx((0.5, -math.sqrt(3) / 2))

    @pytest.mark.parametrize("end", [Point2(0.0, 0.0), Point2(3.0, 0.0), Point2(2.0, 0.0)])
    def test_no_lens(self, kappa, end):
        """Coincident endpoints and d >= 2r have no lens."""
        with pytest.raises(DomainError):
            build_lens(X, end, kappa)

    def test_arcs(self, lens):
        """Shorter arcs sweep pi/3, longer ones 5pi/3, both from x to y."""
        for which in (1, 2):
            assert lens.shorter_arc(which).length == pytest.approx(math.pi / 3)
            assert lens.longer_arc(which).length == pytest.approx(5 * math.pi / 3)
            assert lens.longer_arc(which).end_point == pytest.approx(tuple(Y), abs=1e-12)


class TestClassifyPoint:
    @pytest.mark.parametrize(
        "point, tag",
        [
            ((0.5, 0.0), RegionTag.INTERIOR_LENS),
            ((0.5, 0.9), RegionTag.INTERIOR_E),
            ((0.5, 2.0), RegionTag.OUTSIDE_U),
            ((0.0, 0.0), RegionTag.LENS_BOUNDARY),
            ((0.5, math.sqrt(3) / 2 + 1.0), RegionTag.OUTER_BOUNDARY),
        ],
    )
    def test_tags(self, lens, point, tag):
        """Points of the unit lens get the expected tags."""
        assert classify_point(lens, Point2(*point)) is tag

    def test_reflection_invariance(self, lens):
        """Mirroring across the line xy swaps the circles but keeps every tag."""
        pts = np.random.default_rng(3).uniform(-1.5, 2.5, size=(1000, 2))
        assert classify_points(lens, pts) == classify_points(lens, pts * np.array([1.0, -1.0]))


class TestMembership:
    def test_segment_in_lens(self, lens, unit_segment):
        """The segment lies in cl(I) and never touches the boundary inside."""
        assert curve_in_cl_lens(lens, unit_segment)
        assert boundary_contacts(lens, unit_segment) == []

    def test_boundary_arcs(self, lens):
        """Shorter arcs are in cl(I); longer ones are not."""
        assert curve_in_cl_lens(lens, lens.shorter_arc(1))
        assert is_boundary_arc(lens, lens.shorter_arc(2))
        assert not curve_in_cl_lens(lens, lens.longer_arc(1))

    def test_segment_is_not_a_boundary_arc(self, lens, unit_segment):
        """Interior curves are not boundary arcs."""
        assert not is_boundary_arc(lens, unit_segment)

    def test_endpoint_mismatch(self, lens, kappa):
        """Curves must run from x to y."""
        other = CsCurve(kappa, (SegmentComponent(X, Point2(0.5, 0.0)),))
        with pytest.raises(DomainError):
            curve_in_cl_lens(lens, other)

    def test_union_dichotomy(self, lens, unit_segment, kappa):
        """Curves in D1 u D2 either stay in cl(I) or run along a circle."""
        assert curve_in_union(lens, unit_segment) is UnionMembership.IN_CLOSED_LENS
        assert curve_in_union(lens, lens.longer_arc(1)) is UnionMembership.ON_CIRCLE
        assert curve_in_union(lens, _loop_around(kappa)) is UnionMembership.OUTSIDE
        assert check_union_dichotomy(lens, lens.longer_arc(2))

    def test_union_violation(self, lens, kappa):
        """An over-curved arc in D1 outside cl(I) is flagged."""
        assert curve_in_union(lens, _bulge(kappa)) is UnionMembership.VIOLATION
        assert not check_union_dichotomy(lens, _bulge(kappa))


class TestClasses:
    def test_class_count_table(self, kappa):
        """One class for closed curves and d >= 2r, two in between."""
        ratios = [0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0]
        counts = tuple(class_count(X, Point2(q * kappa.r, 0.0), kappa) for q in ratios)
        assert counts == (1, 2, 2, 2, 2, 2, 2, 2, 1, 1, 1)

    def test_class_count_similarity(self):
        """Rotating, translating and scaling together leave the count alone."""
        lam = 3.0
        x, y = Point2(2.0, -1.0), Point2(2.0 + 1.2 * math.cos(1.0), -1.0 + 1.2 * math.sin(1.0))
        base = class_count(x, y, KappaParams(1.0))
        scaled = class_count(Point2(lam * x.x, lam * x.y), Point2(lam * y.x, lam * y.y), KappaParams(1.0 / lam))
        assert base == scaled == 2

    def test_labels(self, kappa, lens, unit_segment, unit_circle):
        """Segment and longer arc land in different classes; the circle is closed."""
        assert class_label(unit_segment) is ClassLabel.IN_LENS
        assert class_label(lens.longer_arc(1)) is ClassLabel.NOT_IN_LENS
        assert class_label(unit_circle) is ClassLabel.CLOSED
        far = CsCurve(kappa, (SegmentComponent(X, Point2(2.5, 0.0)),))
        assert class_label(far) is ClassLabel.UNRESTRICTED

    def test_corpora(self, kappa):
        """Hand-built RSR curves sit on the predicted side of the lens."""
        assert class_label(in_lens_rsr(kappa, 0.3, 0.2)) is ClassLabel.IN_LENS
        assert class_label(not_in_lens_rsr(kappa, 0.1, 0.2)) is ClassLabel.NOT_IN_LENS
        assert class_label(_loop_around(kappa)) is ClassLabel.NOT_IN_LENS

    def test_invalid_curve(self, kappa):
        """Labels exist only for kappa-constrained curves."""
        with pytest.raises(CurveValidationError):
            class_label(_bulge(kappa))

    def test_labels_for(self, kappa):
        """Available labels follow the distance regime."""
        assert labels_for(X, X, kappa) == (ClassLabel.CLOSED,)
        assert labels_for(X, Y, kappa) == (ClassLabel.IN_LENS, ClassLabel.NOT_IN_LENS)
        assert labels_for(X, Point2(2.0, 0.0), kappa) == (ClassLabel.UNRESTRICTED,)

    def test_are_homotopic(self, lens, unit_segment):
        """Class membership decides homotopy."""
        assert are_homotopic(unit_segment, lens.shorter_arc(1))
        assert not are_homotopic(unit_segment, lens.longer_arc(1))
        assert are_homotopic(lens.longer_arc(1), lens.longer_arc(2))

    def test_are_homotopic_endpoints(self, kappa, unit_segment):
        """Curves with different endpoints cannot be compared."""
        with pytest.raises(DomainError):
            are_homotopic(unit_segment, circle_through(X, 0.0, kappa))


class TestMinimumLength:
    @pytest.mark.parametrize(
        "end, label, expected",
        [
            (Point2(1.0, 0.0), ClassLabel.IN_LENS, 1.0),
            (Point2(1.0, 0.0), ClassLabel.NOT_IN_LENS, 5 * math.pi / 3),
            (Point2(0.0, 0.0), ClassLabel.CLOSED, 2 * math.pi),
            (Point2(3.0, 0.0), ClassLabel.UNRESTRICTED, 3.0),
        ],
    )
    def test_values(self, kappa, end, label, expected):
        """Minimum lengths per class."""
        assert class_minimum_length(X, end, kappa, label) == pytest.approx(expected)

    def test_inconsistent_label(self, kappa):
        """A closed label for distinct endpoints is rejected."""
        with pytest.raises(DomainError):
            class_minimum_length(X, Y, kappa, ClassLabel.CLOSED)


class TestForbiddenRegion:
    def test_no_curve_in_E(self, lens):
        """Random curves aimed at the lobes never stay inside E."""
        report = assert_no_curve_in_E(lens, 40, seed=11)
        assert report.trials == 40
        assert report.holds


class TestRandomCurves:
    @pytest.mark.parametrize("seed", range(20))
    def test_union_dichotomy(self, lens, kappa, seed):
        """No random curve from x to y sits in D1 u D2 outside both cl(I) and the circles."""
        assert check_union_dichotomy(lens, random_curve(X, Y, kappa, 4, seed))

    def test_lens_curves_are_embedded(self, kappa):
        """Random curves confined to cl(I) never cross themselves."""
        for curve in random_lens_curves(kappa, 8):
            assert self_intersections(curve) == []
