import math

import numpy as np
import pytest

from conftest import X, Y, chain
from kcurves.dubins import solve_csc
from kcurves.errors import FormatError, PreconditionError
from kcurves.generator import random_curve
from kcurves.geometry import ArcComponent, Config, CsCurve, Point2, SampledCurve, SegmentComponent, curve_points, sample
from kcurves.validation import (
    DichotomyResult,
    Disk,
    check_band_escape,
    check_disk_dichotomy,
    check_radial_bound,
    check_vertical_bound,
    validate,
    validate_cs,
    validate_sampled,
)


def _arc(kappa, center, radius, start, sweep):
    return CsCurve(kappa, (ArcComponent(Point2(*center), radius, start, sweep),))


class TestValidate:
    def test_unit_circle(self, unit_circle):
        """A radius-r circle sits exactly on the bound."""
        report = validate(unit_circle)
        assert report.valid
        assert report.max_curvature == pytest.approx(1.0)
        assert report.violations == []

    def test_tight_arc(self, kappa):
        """An arc of radius r/2 through x and y violates the bound at its start."""
        report = validate(_arc(kappa, (0.5, 0.0), 0.5, math.pi, -math.pi))
        assert not report.valid
        v = report.violations[0]
        assert v.kind == "curvature"
        assert v.location == 0.0
        assert v.magnitude == pytest.approx(2.0)

    def test_corner(self, kappa):
        """Two segments meeting at a right angle break the joint."""
        corner = CsCurve(kappa, (SegmentComponent(X, Y), SegmentComponent(Y, Point2(1.0, 1.0))))
        report = validate(corner)
        assert [v.kind for v in report.violations] == ["joint"]
        assert report.violations[0].location == pytest.approx(1.0)
        assert report.worst_joint_gap == pytest.approx(math.pi / 2)

    def test_tangent_chain(self, zigzag):
        """Tangent-continuous chains of radius-r arcs are valid."""
        assert validate(zigzag).valid

    def test_sampled_circle(self, unit_circle):
        """Samples of a radius-r circle pass the three-point test."""
        assert validate(sample(unit_circle, 0.05)).valid

    def test_sampled_tight_circle(self, kappa):
        """Samples of a radius-r/2 circle fail it."""
        tight = sample(_arc(kappa, (0.0, 0.5), 0.5, -math.pi / 2, math.pi), 0.05)
        report = validate(tight)
        assert not report.valid
        assert report.max_curvature == pytest.approx(2.0, rel=1e-3)

    def test_sampled_needs_three_points(self, kappa):
        """Two samples cannot carry curvature."""
        with pytest.raises(FormatError):
            validate(SampledCurve.from_points(kappa, [(0, 0), (1, 0)]))

    def test_sampled_duplicates(self, kappa):
        """Repeated consecutive samples are a format error."""
        with pytest.raises(FormatError) as info:
            validate(SampledCurve.from_points(kappa, [(0, 0), (1, 0), (1, 0), (2, 0)]))
        assert info.value.field == "points"


class TestRadialBound:
    def test_half_circle(self, kappa):
        """The boundary half circle attains the bound r * eta."""
        assert check_radial_bound(_arc(kappa, (0.0, 0.0), 1.0, 0.0, math.pi), math.pi)

    def test_winding_too_small(self, kappa):
        """eta above the actual winding is a broken hypothesis."""
        with pytest.raises(PreconditionError):
            check_radial_bound(_arc(kappa, (0.0, 0.0), 1.0, 0.0, math.pi / 2), math.pi)

    def test_start_off_circle(self, kappa, unit_segment):
        """The curve must start on the radius-r circle."""
        with pytest.raises(PreconditionError):
            check_radial_bound(unit_segment, 0.1, center=Point2(0.0, 0.5))


class TestVerticalBound:
    def test_vertical_segment(self, kappa):
        """A straight climb is exactly as long as its height."""
        climb = CsCurve(kappa, (SegmentComponent(X, Point2(0.0, 2.0)),))
        assert check_vertical_bound(climb)

    def test_wrong_origin(self, unit_segment):
        """The curve must start at the origin given."""
        with pytest.raises(PreconditionError):
            check_vertical_bound(unit_segment, origin=Point2(5.0, 0.0))

    def test_negative_height(self, kappa):
        """End heights below the start are outside the hypothesis."""
        down = CsCurve(kappa, (SegmentComponent(X, Point2(0.0, -1.0)),))
        with pytest.raises(PreconditionError):
            check_vertical_bound(down)


class TestDiskDichotomy:
    def test_on_boundary(self, unit_circle):
        """The bounding circle itself lies on the boundary."""
        assert check_disk_dichotomy(unit_circle, Disk(Point2(0.0, 1.0), 1.0)) is DichotomyResult.ON_BOUNDARY

    def test_interior(self, kappa):
        """A chord touches the boundary only at its ends."""
        chord = CsCurve(kappa, (SegmentComponent(X, Point2(1.0, 1.0)),))
        assert check_disk_dichotomy(chord, Disk(Point2(0.0, 1.0), 1.0)) is DichotomyResult.INTERIOR_DISJOINT

    def test_interior_contact_is_violation(self, kappa):
        """A radius-r half circle touching a larger disk's boundary at its top is a counterexample."""
        top = chain(kappa, Config(Point2(1.0, 1.0), math.pi / 2), [("L", math.pi / 2), ("L", math.pi / 2)])
        assert check_disk_dichotomy(top, Disk(Point2(0.0, 0.5), 1.5)) is DichotomyResult.VIOLATION

    def test_leaving_the_disk(self, unit_circle):
        """Curves outside the disk do not meet the hypothesis."""
        with pytest.raises(PreconditionError):
            check_disk_dichotomy(unit_circle, Disk(Point2(0.0, 0.0), 1.0))

    def test_disk_radius(self):
        """Disks need a positive radius."""
        with pytest.raises(PreconditionError):
            Disk(Point2(0.0, 0.0), 0.0)


class TestBandEscape:
    CIRCLE = Disk(Point2(0.0, -0.6), 1.0)

    def _cap(self, kappa):
        a0, a1 = math.atan2(0.6, -0.8), math.atan2(0.6, 0.8)
        return _arc(kappa, (0.0, -0.6), 1.0, a0, a1 - a0)

    def test_cap_stays_below(self, kappa):
        """The circle's own cap above the axis does not escape it."""
        assert check_band_escape(self._cap(kappa), self.CIRCLE)

    def test_radius_mismatch(self, kappa):
        """The circle must have radius r."""
        with pytest.raises(PreconditionError):
            check_band_escape(self._cap(kappa), Disk(Point2(0.0, -0.6), 2.0))

    def test_curve_outside_band(self, kappa):
        """Curves leaving the band do not meet the hypothesis."""
        wide = CsCurve(kappa, (SegmentComponent(Point2(-2.0, 0.0), Point2(2.0, 0.0)),))
        with pytest.raises(PreconditionError):
            check_band_escape(wide, self.CIRCLE)


class TestDirectValidators:
    def test_cs(self, unit_circle):
        """validate_cs accepts a radius-r circle with no joint gap."""
        report = validate_cs(unit_circle)
        assert report.valid
        assert report.max_curvature == pytest.approx(1.0)

    def test_sampled_needs_three_points(self, kappa):
        """Two samples carry no curvature information."""
        with pytest.raises(FormatError):
            validate_sampled(SampledCurve.from_points(kappa, [(0.0, 0.0), (1.0, 0.0)]))

    def test_sampled_straight(self, kappa):
        """Collinear samples have zero curvature."""
        report = validate_sampled(SampledCurve.from_points(kappa, [(0.0, 0.0), (0.5, 0.0), (1.0, 0.0)]))
        assert report.valid
        assert report.max_curvature == pytest.approx(0.0, abs=1e-12)


class TestFalsifiersOnRandomCurves:
    SEEDS = range(20)

    @pytest.mark.parametrize("seed", SEEDS)
    def test_vertical_bound(self, kappa, seed):
        """Random curves climbing from the origin are at least as long as the climb."""
        assert check_vertical_bound(random_curve(X, Point2(0.4, 1.3), kappa, 5, seed))

    def test_radial_bound(self, kappa):
        """Random curves leaving the unit circle are at least as long as r times their winding."""
        start = Point2(1.0, 0.0)
        checked = 0
        for seed in self.SEEDS:
            curve = random_curve(start, Point2(-1.5, 2.5), kappa, 5, seed, start_heading=0.0, heading_spread=0.5)
            _, pts = curve_points(curve)
            ang = np.unwrap(np.arctan2(pts[:, 1], pts[:, 0]))
            try:
                assert check_radial_bound(curve, float(abs(ang[-1] - ang[0])))
            except PreconditionError:
                continue
            checked += 1
        assert checked > 0

    def test_disk_dichotomy(self, kappa):
        """Short CSC paths between random points of a radius-r disk never touch its boundary inside."""
        rng = np.random.default_rng(7)
        disk = Disk(Point2(0.0, 0.0), 1.0)
        checked = 0
        for _ in range(60):
            rho, phi, heading = math.sqrt(rng.uniform(0.0, 0.36)), rng.uniform(-math.pi, math.pi), rng.uniform(-math.pi, math.pi)
            step, bend = rng.uniform(0.05, 0.3), rng.uniform(-0.3, 0.3)
            p = Point2(rho * math.cos(phi), rho * math.sin(phi))
            q = p.offset(step * math.cos(heading + bend), step * math.sin(heading + bend))
            curve = solve_csc(Config(p, heading), Config(q, heading + 2 * bend), kappa).curve()
            try:
                result = check_disk_dichotomy(curve, disk)
            except PreconditionError:
                continue
            checked += 1
            assert result is not DichotomyResult.VIOLATION
        assert checked > 0

    def test_band_escape(self, kappa):
        """CSC paths in the band between the circle's axis points never rise above the circle."""
        rng = np.random.default_rng(3)
        circle = Disk(Point2(0.0, -0.6), 1.0)
        checked = 0
        for _ in range(60):
            start = Config(Point2(-0.8, 0.0), float(rng.uniform(0.1, 1.4)))
            end = Config(Point2(0.8, 0.0), float(rng.uniform(-1.4, -0.1)))
            curve = solve_csc(start, end, kappa).curve()
            try:
                assert check_band_escape(curve, circle)
            except PreconditionError:
                continue
            checked += 1
        assert checked > 0
