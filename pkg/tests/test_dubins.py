import math

import numpy as np
import pytest

from conftest import X, Y, chain
from kcurves.dubins import (
    WORDS,
    Word,
    csc_closed_form,
    fragmentation,
    normalize,
    replace_fragment,
    solve_cs,
    solve_csc,
    solve_word,
    word_path,
)
from kcurves.errors import DomainError
from kcurves.generator import make_rng, random_walk
from kcurves.geometry import Config, CsCurve, KappaParams, Point2, hausdorff, sample, subcurve
from kcurves.homotopy import reduce


class TestSolveCsc:
    def test_semicircle(self, kappa):
        """Turning around onto the parallel line two radii up is a half circle."""
        sol = solve_csc(Config(X, 0.0), Config(Point2(0.0, 2.0), math.pi), kappa)
        assert sol.best.word is Word.LSL
        assert sol.best.length == pytest.approx(math.pi)

    def test_lsl_quarter_turns(self, kappa):
        """Two eighth turns around a diagonal segment."""
        sol = solve_csc(Config(X, 0.0), Config(Point2(2.0, 2.0), math.pi / 2), kappa)
        assert sol.best.word is Word.LSL
        assert sol.best.length == pytest.approx(math.pi / 2 + math.sqrt(2.0))
        assert sol.best.phi == pytest.approx(math.pi / 4)

    def test_straight(self, kappa):
        """Aligned configurations are joined by the segment."""
        sol = solve_csc(Config(X, 0.0), Config(Point2(4.0, 0.0), 0.0), kappa)
        assert sol.best.length == pytest.approx(4.0)
        assert sol.curve().complexity == 1

    def test_mixed_words_need_room(self, kappa):
        """LSR and RSL vanish when the turning circles overlap."""
        start, end = Config(X, math.pi / 2), Config(Point2(0.5, 0.0), -math.pi / 2)
        assert solve_word(start, end, kappa, Word.RSL) is None
        assert {c.word for c in solve_csc(start, end, kappa).candidates} >= {Word.LSL, Word.RSR}

    def test_curves_reach_the_goal(self, kappa):
        """Every candidate path ends in the requested configuration."""
        start, end = Config(X, 0.3), Config(Point2(2.5, -1.0), 2.0)
        sol = solve_csc(start, end, kappa)
        for cand in sol.candidates:
            path = word_path(start, cand, kappa)
            assert path.end_config.gap(end) < 1e-9
            assert path.length == pytest.approx(cand.length)

    def test_radius_scales(self):
        """Halving kappa doubles every length of a scaled problem."""
        a = solve_csc(Config(X, 0.0), Config(Point2(0.0, 2.0), math.pi), KappaParams(1.0))
        b = solve_csc(Config(X, 0.0), Config(Point2(0.0, 4.0), math.pi), KappaParams(0.5))
        assert b.best.length == pytest.approx(2.0 * a.best.length)

    def test_closed_forms_agree(self, kappa):
        """Tangent-line construction and closed forms give the same per-word lengths."""
        rng = np.random.default_rng(7)
        for _ in range(200):
            start = Config(Point2(*rng.uniform(-3, 3, 2)), float(rng.uniform(-math.pi, math.pi)))
            end = Config(Point2(*rng.uniform(-3, 3, 2)), float(rng.uniform(-math.pi, math.pi)))
            oracle = csc_closed_form(start, end, kappa)
            for word in WORDS:
                got = solve_word(start, end, kappa, word)
                if got is None or oracle[word] is None:
                    assert got is None and oracle[word] is None
                    continue
                assert got.length == pytest.approx(oracle[word], abs=1e-9)


class TestSolveCs:
    def test_arc_then_segment(self, kappa):
        """From the origin heading east to (2, 1) on the left: an arc of pi/6 and a segment of sqrt 3."""
        sol = solve_cs(Config(X, 0.0), Point2(2.0, 1.0), kappa, 1)
        assert sol.word is Word.LSL
        assert sol.arc1_sweep == pytest.approx(math.pi / 6)
        assert sol.seg_length == pytest.approx(math.sqrt(3.0))
        assert sol.arc2_sweep == 0.0
        path = word_path(Config(X, 0.0), sol, kappa)
        assert path.end_point.distance((2.0, 1.0)) < 1e-12

    def test_right_side(self, kappa):
        """The mirrored goal is reached by the mirrored path."""
        sol = solve_cs(Config(X, 0.0), Point2(2.0, -1.0), kappa, -1)
        assert sol.word is Word.RSR
        assert sol.arc1_sweep == pytest.approx(-math.pi / 6)

    def test_point_inside_turning_disk(self, kappa):
        """A goal inside the turning disk cannot be reached."""
        assert solve_cs(Config(X, 0.0), Point2(0.0, 1.5), kappa, 1) is None

    def test_point_on_turning_circle(self, kappa):
        """A goal on the turning circle is reached by the arc alone."""
        sol = solve_cs(Config(X, 0.0), Point2(1.0, 1.0), kappa, 1)
        assert sol.arc1_sweep == pytest.approx(math.pi / 2)
        assert sol.seg_length == pytest.approx(0.0, abs=1e-9)


class TestFragmentation:
    def test_pieces_shorter_than_r(self, unit_circle):
        """A full circle splits into seven pieces of length below 0.9 r."""
        frag = fragmentation(unit_circle)
        assert len(frag.pieces) == 7
        assert all(b - a < 0.9 for a, b in frag.pieces)
        assert frag.breakpoints[-1] == unit_circle.length

    @pytest.mark.parametrize("lam", [0.0, 1.0, 1.5])
    def test_lambda_range(self, unit_circle, lam):
        """lambda must lie in (0, 1)."""
        with pytest.raises(DomainError):
            fragmentation(unit_circle, lam)


class TestReplacement:
    def test_zigzag_becomes_segment(self, zigzag):
        """The replacement of a short zigzag is the straight segment."""
        out = replace_fragment(zigzag)
        assert out.complexity == 1
        assert out.length == pytest.approx(4 * math.sin(0.2))
        assert out.length <= zigzag.length

    def test_fragment_too_long(self, unit_circle):
        """Fragments must be shorter than r."""
        with pytest.raises(DomainError):
            replace_fragment(unit_circle)

    def test_arc_is_its_own_replacement(self, unit_circle):
        """A short arc is already minimal."""
        piece = subcurve(unit_circle, 0.0, 0.8)
        out = replace_fragment(piece)
        assert out.length == pytest.approx(0.8)
        assert hausdorff(out, piece) < 1e-9


class TestNormalize:
    def test_circle(self, unit_circle):
        """Normalizing a circle gives back the circle as one arc."""
        out = normalize(unit_circle)
        assert out.complexity == 1
        assert out.length == pytest.approx(2 * math.pi)
        assert hausdorff(out, unit_circle) < 1e-9

    def test_endpoints_fixed(self, s_curve):
        """Normalization keeps the endpoint configurations."""
        out = normalize(s_curve)
        assert out.start_config.gap(s_curve.start_config) < 1e-9
        assert out.end_config.gap(s_curve.end_config) < 1e-9
        assert out.length <= s_curve.length + 1e-9

    def test_segment_untouched(self, unit_segment):
        """A segment is its own normal form."""
        out = normalize(unit_segment)
        assert out.complexity == 1
        assert out.end_point == pytest.approx(tuple(Y))

    def test_sampled_circle_keeps_its_length(self, unit_circle):
        """Dense samples of a circle normalize to the circle, not to a chain of loops."""
        out = normalize(sample(unit_circle, 0.01))
        assert out.length <= 2 * math.pi + 1e-6
        assert out.length == pytest.approx(2 * math.pi, abs=1e-6)
        assert hausdorff(out, unit_circle) < 1e-6

    @pytest.mark.parametrize("spacing", [0.003, 0.05, 0.2])
    def test_sampled_arc_spacings(self, kappa, spacing):
        """A sampled quarter circle normalizes to a quarter circle for coarse and fine spacings."""
        arc = chain(kappa, Config(X, 0.0), [("L", math.pi / 2)])
        out = normalize(sample(arc, spacing))
        assert out.length == pytest.approx(math.pi / 2, abs=1e-6)
        assert hausdorff(out, arc) < 1e-6

    def test_reduce_sampled_circle(self, unit_circle):
        """A sampled circle reduces to the counterclockwise circle through x."""
        trace = reduce(sample(unit_circle, 0.01))
        assert trace.last.length == pytest.approx(2 * math.pi, abs=1e-6)
        assert hausdorff(trace.last, unit_circle) < 1e-6


class TestReplacementProperty:
    @pytest.mark.parametrize("seed", range(20))
    def test_random_fragments_do_not_grow(self, kappa, seed):
        """The CSC replacement of a fragment shorter than r is never longer than the fragment."""
        rng = make_rng(seed)
        start = Config(X, float(rng.uniform(-math.pi, math.pi)))
        walk = CsCurve(kappa, tuple(random_walk(start, kappa, 3, rng)))
        fragment = subcurve(walk, 0.0, min(walk.length, float(rng.uniform(0.05, 0.95))))
        out = replace_fragment(fragment)
        assert out.length <= fragment.length + 1e-9
        assert out.start_config.gap(fragment.start_config) < 1e-9
        assert out.end_config.gap(fragment.end_config) < 1e-9
