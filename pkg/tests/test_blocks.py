import itertools

import numpy as np
import pytest
from numpy import pi

from helixknots.blocks import (
    DISPLACEMENTS,
    LATTICE_UNIT,
    PIECES,
    PRINTED_STICK_WORDS,
    STICK_WORDS,
    UNALLOWABLE_PAIRS,
    StickKind,
    build_stick,
    frame_F,
    is_allowable_pair,
    piece_curve,
    stick_word_curve,
    validate_stick,
)
from helixknots.frenet import segment_arclength
from helixknots.verify import find_intersection, min_distance_certificate, tube_radius_check

S = StickKind

R2 = np.sqrt(2)
# Closed forms: each piece has length |t_e - t_i| sqrt(r^2 + h^2).
STICK_LENGTHS = {
    S.I_PLUS: 4 * pi + 6 * pi * R2, S.I_MINUS: 4 * pi + 6 * pi * R2,
    S.J_PLUS: 4 * pi + 6 * pi * R2, S.J_MINUS: 4 * pi + 6 * pi * R2,
    S.K_PLUS: 4 * pi * R2, S.K_MINUS: 4 * pi + 5 * pi * R2,
}
# Frozen from dense (2e5-sample) chord-line distances.
TUBE_RADII = {
    S.I_PLUS: 1.7786, S.I_MINUS: 1.7786, S.J_PLUS: 2.1055, S.J_MINUS: 2.1055,
    S.K_PLUS: 1.0, S.K_MINUS: 2.3028,
}


def test_piece_table():
    assert PIECES["a"].as_tuple() == (0.5, 0.5, 0.0, pi / 2)
    assert PIECES["b"].as_tuple() == (1.0, 0.0, 0.0, pi)
    assert PIECES["l"].as_tuple() == (0.5, 0.5, 0.0, 8 * pi)
    for seg in PIECES.values():
        assert seg.r / (seg.r ** 2 + seg.h ** 2) == 1.0


@pytest.mark.parametrize("kind", list(S))
def test_stick_length(kind):
    expected = sum(segment_arclength(PIECES[ch]) for ch in STICK_WORDS[kind])
    assert build_stick(kind).length == pytest.approx(expected, abs=1e-10)
    assert expected == pytest.approx(STICK_LENGTHS[kind], abs=1e-12)


@pytest.mark.parametrize("kind", list(S))
def test_stick_displacement_and_frames(kind):
    c = build_stick(kind)
    assert np.max(np.abs(c.terminal_point() - c.initial_point() - DISPLACEMENTS[kind])) <= 1e-9
    F = frame_F()
    assert c.initial_frame().max_difference(F) <= 1e-9
    assert c.terminal_frame().max_difference(F) <= 1e-9


def test_frame_F_values():
    s = 1 / np.sqrt(2)
    F = frame_F()
    assert np.allclose(F.matrix, [[0, -1, 0], [s, 0, -s], [s, 0, s]], atol=1e-15)


def test_kplus_is_helix_of_height_4pi():
    c = build_stick(S.K_PLUS)
    assert len(c) == 1
    assert np.allclose(c.terminal_point() - c.initial_point(), (0, 0, LATTICE_UNIT))


@pytest.mark.parametrize("kind", [S.J_MINUS, S.K_MINUS])
def test_printed_words_miss_their_targets(kind):
    # regression: the words as originally printed do not produce the stick
    c = piece_curve(PRINTED_STICK_WORDS[kind])
    disp = c.terminal_point() - c.initial_point()
    assert np.max(np.abs(disp - DISPLACEMENTS[kind])) > 1.0


def test_printed_jminus_has_no_displacement():
    c = piece_curve(PRINTED_STICK_WORDS[S.J_MINUS])
    assert np.linalg.norm(c.terminal_point() - c.initial_point()) < 1e-9


def test_printed_kminus_frame_mismatch():
    c = piece_curve(PRINTED_STICK_WORDS[S.K_MINUS])
    assert c.terminal_frame().max_difference(frame_F()) > 0.1


@pytest.mark.parametrize("kind", [k for k in S if k not in (S.J_MINUS, S.K_MINUS)])
def test_other_words_unchanged(kind):
    assert STICK_WORDS[kind] == PRINTED_STICK_WORDS[kind]


@pytest.mark.parametrize("kind", list(S))
def test_validate_stick(kind):
    rep = validate_stick(kind)
    assert rep.passed, rep.failures
    assert rep.tube_radius == pytest.approx(TUBE_RADII[kind], abs=1e-3)
    assert rep.tube_radius <= pi
    d = rep.to_dict()
    assert d["stick"] == kind.value and d["passed"]


def test_kplus_tube_is_unit():
    # the chord joins two points of a radius-1/2 helix lying over the same
    # point of its circle, so the farthest points sit one diameter away
    assert tube_radius_check(build_stick(S.K_PLUS)).max_distance == pytest.approx(1.0, abs=1e-7)


@pytest.mark.parametrize("x, y", sorted(itertools.product(S, S)))
def test_splice_has_no_rotation(x, y):
    xy = stick_word_curve([x, y])
    second = build_stick(y)
    n = len(build_stick(x))
    assert np.allclose(xy.rotations[n:], second.rotations, atol=1e-12)
    shift = xy.translations[n:] - second.translations
    assert np.allclose(shift, DISPLACEMENTS[x], atol=1e-9)


def test_unallowable_table():
    assert len(UNALLOWABLE_PAIRS) == 8
    assert not is_allowable_pair("k-", "j+")
    assert is_allowable_pair("j+", "k-")
    assert not is_allowable_pair(S.I_MINUS, S.K_MINUS)
    assert sum(is_allowable_pair(x, y) for x in S for y in S) == 28


def _dense_min_distance(curve, exclusion=pi, step=0.02):
    """Brute-force minimum over sample pairs at arclength gap >= exclusion."""
    s = np.arange(0.0, curve.length, step)
    p = curve.points(s)
    best = np.inf
    for i in range(0, len(s), 400):
        d = np.linalg.norm(p[i:i + 400, None, :] - p[None, :, :], axis=2)
        far = np.abs(s[i:i + 400, None] - s[None, :]) >= exclusion
        best = min(best, d[far].min())
    return best


@pytest.mark.parametrize("x, y", [
    (S.I_PLUS, S.I_MINUS), (S.K_PLUS, S.K_MINUS), (S.K_MINUS, S.J_PLUS), (S.I_MINUS, S.K_MINUS),
])
def test_unallowable_pairs_intersect(x, y):
    w = find_intersection([stick_word_curve([x, y])])
    assert w is not None and w.distance < 1e-9
    assert _dense_min_distance(stick_word_curve([x, y])) < 0.05


@pytest.mark.parametrize("x, y", [
    (S.I_PLUS, S.J_PLUS), (S.K_PLUS, S.K_PLUS), (S.J_PLUS, S.K_MINUS), (S.K_MINUS, S.I_MINUS),
    (S.J_MINUS, S.K_MINUS), (S.K_MINUS, S.K_MINUS),
])
def test_allowable_pairs_certified(x, y):
    curve = stick_word_curve([x, y])
    cert = min_distance_certificate([curve])
    assert cert.certified and cert.bound > 0
    assert cert.bound <= _dense_min_distance(curve) + 1e-9
