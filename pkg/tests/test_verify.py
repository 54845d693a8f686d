import numpy as np
import pytest
from numpy import pi
from scipy.optimize import minimize

from helixknots.blocks import StickKind, build_stick, piece_curve, stick_word_curve
from helixknots.frenet import HelixSegment, PiecewiseCurve
from helixknots.lattice import LatticeWord, realize
from helixknots.verify import (
    VerificationReport,
    certified_min_distance,
    check_c2,
    check_curvature,
    check_simple,
    curvature_samples,
    find_intersection,
    finite_difference_curvature,
    min_distance_certificate,
    tube_radius_check,
    verify_curves,
)

S = StickKind
CIRCLE = PiecewiseCurve.single(HelixSegment(1, 0, 0, 2 * pi)).as_closed()


def _dense_min(curves, exclusion=pi, step=0.01):
    """Brute-force sampled minimum distance (same rule for gaps as the certificate)."""
    s_all, p_all, id_all = [], [], []
    for i, c in enumerate(curves):
        s = np.arange(0.0, c.length, step)
        s_all.append(s)
        p_all.append(c.points(s))
        id_all.append(np.full(len(s), i))
    s, p, ids = map(np.concatenate, (s_all, p_all, id_all))
    best = np.inf
    for a in range(0, len(s), 500):
        d = np.linalg.norm(p[a:a + 500, None] - p[None], axis=2)
        gap = np.abs(s[a:a + 500, None] - s[None])
        for i, c in enumerate(curves):
            if c.closed:
                gap = np.where((ids[a:a + 500, None] == i), np.minimum(gap, c.length - gap), gap)
        ok = (ids[a:a + 500, None] != ids[None]) | (gap >= exclusion)
        if ok.any():
            best = min(best, d[ok].min())
    return best


class TestC2:
    def test_spliced_curve_passes(self):
        rep = check_c2(piece_curve("abcdefgl"))
        assert rep.c2_passed and rep.joint_count == 7
        assert rep.max_position_residual < 1e-12

    def test_perturbed_translation_fails(self):
        c = piece_curve("ab")
        w = c.translations.copy()
        w[1] += (1e-3, 0.0, 0.0)
        bad = PiecewiseCurve(c.params, c.rotations, w)
        rep = check_c2(bad)
        assert not rep.c2_passed
        assert rep.max_position_residual == pytest.approx(1e-3, rel=1e-6)
        assert rep.max_tangent_residual < 1e-12

    def test_closed_curve_includes_seam(self):
        c = realize(LatticeWord.parse("I+ J+ I- J-", closed=True))
        assert check_c2(c).joint_count == len(c)


class TestCurvature:
    @pytest.mark.parametrize("kind", list(S))
    def test_sticks(self, kind):
        rep = check_curvature(build_stick(kind))
        assert rep.curvature_passed
        assert rep.curvature_samples >= 10_000
        assert abs(rep.curvature_fd_min - 1) < 1e-7 and abs(rep.curvature_fd_max - 1) < 1e-7

    def test_wrong_curvature_detected(self):
        helix = PiecewiseCurve.single(HelixSegment(1, 1, 0, 2 * pi))
        rep = check_curvature(helix, target=1.0)
        assert not rep.curvature_passed
        assert rep.curvature_analytic_max == 0.5
        assert rep.curvature_fd_max == pytest.approx(0.5, abs=1e-6)
        assert check_curvature(helix, target=0.5).curvature_passed

    def test_samples_straddle_joints(self):
        c = piece_curve("abc")
        s = curvature_samples(c, samples_per_unit=10, step=1e-4)
        for j in c.cumulative_lengths[1:-1]:
            assert np.any(np.isclose(s, j - 5e-5, atol=1e-15, rtol=0))
            assert np.any(np.isclose(s, j + 5e-5, atol=1e-15, rtol=0))

    def test_joint_straddling_values(self):
        c = stick_word_curve([S.K_MINUS, S.I_PLUS])
        joints = c.cumulative_lengths[1:-1]
        s = np.concatenate([joints - 5e-5, joints, joints + 5e-5])
        assert np.max(np.abs(finite_difference_curvature(c, s) - 1)) < 1e-7

    def test_open_curve_ends_rejected(self):
        with pytest.raises(ValueError):
            finite_difference_curvature(piece_curve("ab"), [0.0])

    def test_step_too_large(self):
        with pytest.raises(ValueError):
            finite_difference_curvature(piece_curve("ab"), [1.0], step=1.0)


class TestDistance:
    def test_unit_circle(self):
        delta = 0.05
        cert = min_distance_certificate([CIRCLE], delta=delta)
        assert cert.certified
        assert 2 * np.cos(delta / 2) - delta - 1e-12 <= cert.bound <= 2.0

    def test_parallel_kplus(self):
        a = realize(LatticeWord.parse("K+"))
        b = realize(LatticeWord.parse("K+"), start=(1, 0, 0))
        delta = 0.05

        def d2(x):
            return np.sum((a.points(x[0]) - b.points(x[1])) ** 2)
        starts = [(s, t) for s in np.linspace(0, a.length, 9) for t in np.linspace(0, b.length, 9)]
        lo = [(0, a.length), (0, b.length)]
        oracle = min(np.sqrt(minimize(d2, x0, bounds=lo).fun) for x0 in starts)
        assert oracle == pytest.approx(11.66412, abs=1e-4)  # also matches a 6001^2 grid
        cert = min_distance_certificate([a, b], delta=delta)
        assert cert.certified
        assert oracle - delta - 1e-9 <= cert.inter_bound <= oracle
        assert 4 * pi - 1 - delta < cert.inter_bound < 4 * pi

    def test_overlap_witness(self):
        c = stick_word_curve([S.I_PLUS, S.I_MINUS])
        w = find_intersection([c])
        assert w is not None and w.distance < 1e-9
        assert abs(w.s_a - w.s_b) >= pi
        cert = min_distance_certificate([c])
        assert cert.status == "intersecting" and not cert.certified
        rep = check_simple(c)
        assert rep.simple_passed is False and rep.distance_status == "intersecting"

    def test_crossing_witness(self):
        # two b circles meet transversally: an isolated crossing point
        c = stick_word_curve([S.I_MINUS, S.K_MINUS])
        w = find_intersection([c])
        assert w is not None and w.distance < 1e-9

    def test_no_witness_on_simple_curve(self):
        assert find_intersection([build_stick(S.I_PLUS)]) is None

    @pytest.mark.parametrize("curves", [
        [build_stick(S.K_MINUS)],
        [stick_word_curve([S.J_PLUS, S.K_MINUS])],
        [realize(LatticeWord.parse("I+ K- I- K+", closed=True))],
    ], ids=["k-", "j+k-", "closed-square"])
    def test_bound_is_sound(self, curves):
        dense = _dense_min(curves)
        for delta in (0.1, 0.05, 0.025):
            cert = min_distance_certificate(curves, delta=delta)
            assert cert.certified
            assert cert.bound <= dense + 1e-9
            # halving the resolution may only tighten the bound by the sampling slack
            finer = min_distance_certificate(curves, delta=delta / 2)
            assert finer.bound >= cert.bound - delta / 2 - 1e-9

    def test_resolution_refines_when_needed(self):
        # the k- stick comes within ~0.064 of itself, so 0.1 is too coarse
        cert = min_distance_certificate([build_stick(S.K_MINUS)], delta=0.1)
        assert cert.certified and cert.delta == 0.05
        assert 0 < cert.bound < 0.064

    def test_indeterminate_at_floor(self):
        cert = min_distance_certificate([build_stick(S.K_MINUS)], delta=0.1, floor=0.06)
        assert cert.status == "indeterminate"

    def test_certified_min_distance_value(self):
        assert certified_min_distance([CIRCLE]) > 1.9


class TestTube:
    @pytest.mark.parametrize("kind", list(S))
    def test_sticks_within_pi(self, kind):
        res = tube_radius_check(build_stick(kind), samples=10_000)
        assert res.passed and res.samples >= 10_000

    def test_coincident_endpoints(self):
        with pytest.raises(ValueError):
            tube_radius_check(realize(LatticeWord.parse("I+ J+ I- J-", closed=True)))


class TestReport:
    def test_empty_report_does_not_pass(self):
        assert not VerificationReport().passed

    def test_roundtrip_and_summary(self):
        rep = verify_curves(build_stick(S.K_PLUS), samples_per_unit=200)
        assert rep.passed
        again = VerificationReport.from_dict(rep.to_dict())
        assert again == rep
        text = rep.summary()
        assert "C2 joints" in text and "curvature" in text and "overall: PASS" in text

    def test_failure_propagates(self):
        helix = PiecewiseCurve.single(HelixSegment(1, 1, 0, 2 * pi))
        rep = verify_curves(helix, samples_per_unit=100)
        assert rep.c2_passed and rep.simple_passed and not rep.passed
