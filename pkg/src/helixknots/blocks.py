"""Elementary helix pieces and the six sticks built from them.

Every stick starts and ends with the same Frenet frame ``F`` (the frame at
the start of piece ``a``), so sticks splice together by pure translation and
imitate unit steps of a cubic lattice of spacing ``4*pi``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from math import pi

import numpy as np

from .frenet import FrenetFrame, HelixSegment, PiecewiseCurve, chain, frenet_frame

LATTICE_UNIT = 4 * pi
FRAME_TOL = 1e-9

PIECES: dict[str, HelixSegment] = {
    "a": HelixSegment(0.5, 0.5, 0.0, pi / 2),
    "b": HelixSegment(1.0, 0.0, 0.0, pi),
    "c": HelixSegment(0.5, 0.5, 0.0, 2 * pi),
    "d": HelixSegment(0.5, -0.5, 3 * pi / 2, 2 * pi),
    "e": HelixSegment(0.5, -0.5, 0.0, 2 * pi),
    "f": HelixSegment(0.5, -0.5, 0.0, 3 * pi / 2),
    "g": HelixSegment(0.5, -0.5, 0.0, pi / 2),
    "l": HelixSegment(0.5, 0.5, 0.0, 8 * pi),
}


class StickKind(str, enum.Enum):
    I_PLUS = "i+"
    I_MINUS = "i-"
    J_PLUS = "j+"
    J_MINUS = "j-"
    K_PLUS = "k+"
    K_MINUS = "k-"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, text: str) -> "StickKind":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown stick {text!r}; expected one of "
                             + ", ".join(k.value for k in cls)) from None


# Words as originally printed.  The j- and k- entries do not
# reproduce their displacement vectors (see STICK_WORDS); they are kept so
# the regression tests can show the mismatch.
PRINTED_STICK_WORDS: dict[StickKind, str] = {
    StickKind.I_PLUS: "abcd" * 4,
    StickKind.I_MINUS: "aebd" * 4,
    StickKind.J_PLUS: "adbe" * 4,
    StickKind.J_MINUS: "adbc" * 4,
    StickKind.K_PLUS: "l",
    StickKind.K_MINUS: "abfdgbabfdfgb",
}

# j- swaps b and c inside the repeated block; k- is the square of abfdegb.
# With these words all six displacement/frame requirements hold and the
# self-intersecting pairs are exactly UNALLOWABLE_PAIRS.
STICK_WORDS: dict[StickKind, str] = {
    **PRINTED_STICK_WORDS,
    StickKind.J_MINUS: "adcb" * 4,
    StickKind.K_MINUS: "abfdegb" * 2,
}

DISPLACEMENTS: dict[StickKind, np.ndarray] = {
    StickKind.I_PLUS: np.array([LATTICE_UNIT, 0.0, 0.0]),
    StickKind.I_MINUS: np.array([-LATTICE_UNIT, 0.0, 0.0]),
    StickKind.J_PLUS: np.array([0.0, LATTICE_UNIT, 0.0]),
    StickKind.J_MINUS: np.array([0.0, -LATTICE_UNIT, 0.0]),
    StickKind.K_PLUS: np.array([0.0, 0.0, LATTICE_UNIT]),
    StickKind.K_MINUS: np.array([0.0, 0.0, -LATTICE_UNIT]),
}

_S = StickKind
UNALLOWABLE_PAIRS: frozenset[tuple[StickKind, StickKind]] = frozenset({
    (_S.I_PLUS, _S.I_MINUS), (_S.I_MINUS, _S.I_PLUS),
    (_S.J_PLUS, _S.J_MINUS), (_S.J_MINUS, _S.J_PLUS),
    (_S.K_PLUS, _S.K_MINUS), (_S.K_MINUS, _S.K_PLUS),
    (_S.K_MINUS, _S.J_PLUS), (_S.I_MINUS, _S.K_MINUS),
})


def elementary(name: str) -> HelixSegment:
    return PIECES[name]


def piece_curve(word: str) -> PiecewiseCurve:
    """Splice the elementary pieces named by ``word``, first piece unmoved."""
    if not word:
        raise ValueError("empty piece word")
    return chain([PiecewiseCurve.single(PIECES[ch]) for ch in word])


@lru_cache(maxsize=None)
def build_stick(kind: StickKind | str) -> PiecewiseCurve:
    return piece_curve(STICK_WORDS[StickKind(kind)])


def frame_F() -> FrenetFrame:
    return frenet_frame(PIECES["a"], 0.0)


def stick_word_curve(sticks) -> PiecewiseCurve:
    """Splice a sequence of sticks into one curve."""
    sticks = [StickKind(s) for s in sticks]
    if not sticks:
        raise ValueError("empty stick word")
    return chain([build_stick(s) for s in sticks])


def is_allowable_pair(x: StickKind | str, y: StickKind | str) -> bool:
    return (StickKind(x), StickKind(y)) not in UNALLOWABLE_PAIRS


@dataclass
class StickReport:
    kind: StickKind
    initial_frame_error: float
    terminal_frame_error: float
    displacement: np.ndarray
    displacement_error: float
    min_distance_bound: float
    simplicity_status: str
    tube_radius: float
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "stick": self.kind.value,
            "initial_frame_error": self.initial_frame_error,
            "terminal_frame_error": self.terminal_frame_error,
            "displacement": [float(x) for x in self.displacement],
            "displacement_error": self.displacement_error,
            "min_distance_bound": self.min_distance_bound,
            "simplicity_status": self.simplicity_status,
            "tube_radius": self.tube_radius,
            "passed": self.passed,
            "failures": list(self.failures),
        }


def validate_stick(kind: StickKind | str, tube_samples: int = 20000) -> StickReport:
    """Check frame, displacement, simplicity and tube bound of one stick."""
    from .verify import min_distance_certificate, tube_radius_check

    kind = StickKind(kind)
    curve = build_stick(kind)
    F = frame_F()
    e0 = curve.initial_frame().max_difference(F)
    e1 = curve.terminal_frame().max_difference(F)
    disp = curve.terminal_point() - curve.initial_point()
    derr = float(np.max(np.abs(disp - DISPLACEMENTS[kind])))
    cert = min_distance_certificate([curve])
    tube = tube_radius_check(curve, samples=tube_samples)

    failures = []
    if e0 > FRAME_TOL:
        failures.append(f"initial frame differs from F by {e0:.3e}")
    if e1 > FRAME_TOL:
        failures.append(f"terminal frame differs from F by {e1:.3e}")
    if derr > FRAME_TOL:
        failures.append(f"displacement off by {derr:.3e}")
    if not cert.certified:
        failures.append(f"simplicity {cert.status} (bound {cert.bound:.3e})")
    if not tube.passed:
        failures.append(f"tube radius {tube.max_distance:.6f} exceeds pi")
    return StickReport(kind, e0, e1, disp, derr, cert.bound, cert.status,
                       tube.max_distance, failures)
