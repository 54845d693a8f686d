"""Lattice words over I+-, J+-, K+- and their paths on the integer grid.

A lattice word stands for a stick word (same letters, lower case) whose
geometric realisation follows the lattice path scaled by ``4*pi``.  The gate
in :func:`lemma1_gate` is pure integer arithmetic: a self-avoiding word
without unallowable adjacent pairs realises a simple curve.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .blocks import LATTICE_UNIT, PIECES, StickKind, is_allowable_pair, stick_word_curve
from .frenet import PiecewiseCurve, _alpha

Vertex = tuple[int, int, int]


class LatticeLetter(str, enum.Enum):
    I_PLUS = "I+"
    I_MINUS = "I-"
    J_PLUS = "J+"
    J_MINUS = "J-"
    K_PLUS = "K+"
    K_MINUS = "K-"

    def __str__(self):
        return self.value

    @property
    def step(self) -> Vertex:
        return _STEPS[self]


_STEPS: dict[LatticeLetter, Vertex] = {
    LatticeLetter.I_PLUS: (1, 0, 0),
    LatticeLetter.I_MINUS: (-1, 0, 0),
    LatticeLetter.J_PLUS: (0, 1, 0),
    LatticeLetter.J_MINUS: (0, -1, 0),
    LatticeLetter.K_PLUS: (0, 0, 1),
    LatticeLetter.K_MINUS: (0, 0, -1),
}


def letter_of_stick(kind: StickKind | str) -> LatticeLetter:
    return LatticeLetter(StickKind(kind).value.upper())


def stick_of_letter(letter: LatticeLetter | str) -> StickKind:
    return StickKind(LatticeLetter(letter).value.lower())


def _add(a: Vertex, b: Vertex) -> Vertex:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


@dataclass(frozen=True)
class LatticeWord:
    letters: tuple[LatticeLetter, ...]
    closed: bool = False

    def __post_init__(self):
        letters = tuple(LatticeLetter(x) for x in self.letters)
        object.__setattr__(self, "letters", letters)
        if self.closed and self.displacement() != (0, 0, 0):
            raise ValueError(f"closed word {self} has net displacement {self.displacement()}")

    @classmethod
    def parse(cls, text: str, closed: bool = False) -> "LatticeWord":
        tokens = text.split()
        try:
            letters = tuple(LatticeLetter(tok.upper()) for tok in tokens)
        except ValueError:
            raise ValueError(f"bad lattice word {text!r}; letters are I+ I- J+ J- K+ K-") from None
        return cls(letters, closed)

    @classmethod
    def from_sticks(cls, sticks: Iterable[StickKind | str], closed: bool = False) -> "LatticeWord":
        return cls(tuple(letter_of_stick(s) for s in sticks), closed)

    def sticks(self) -> list[StickKind]:
        return [stick_of_letter(x) for x in self.letters]

    def displacement(self) -> Vertex:
        v = (0, 0, 0)
        for x in self.letters:
            v = _add(v, x.step)
        return v

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return " ".join(x.value for x in self.letters)


@dataclass(frozen=True)
class LatticePath:
    start: Vertex
    vertices: tuple[Vertex, ...]

    @property
    def is_closed(self) -> bool:
        return len(self.vertices) > 1 and self.vertices[0] == self.vertices[-1]

    def edges(self) -> list[tuple[Vertex, Vertex]]:
        return list(zip(self.vertices[:-1], self.vertices[1:]))


def trace_path(word: LatticeWord | Sequence, start: Vertex = (0, 0, 0)) -> LatticePath:
    if not isinstance(word, LatticeWord):
        word = LatticeWord(tuple(word))
    start = tuple(int(x) for x in start)
    verts = [start]
    for x in word.letters:
        verts.append(_add(verts[-1], x.step))
    return LatticePath(start, tuple(verts))


def _repeated_vertices(word: LatticeWord, start: Vertex) -> list[int]:
    """Indices ``m`` (into the vertex list) at which a vertex is revisited."""
    verts = trace_path(word, start).vertices
    if word.closed and len(verts) > 1:
        verts = verts[:-1]
    seen: set[Vertex] = set()
    repeats = []
    for m, v in enumerate(verts):
        if v in seen:
            repeats.append(m)
        seen.add(v)
    return repeats


def is_self_avoiding(word: LatticeWord, start: Vertex = (0, 0, 0)) -> bool:
    return not _repeated_vertices(word, start)


@dataclass
class GateReport:
    word: LatticeWord
    vertex_repeats: list[int] = field(default_factory=list)
    pair_violations: list[int] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.vertex_repeats and not self.pair_violations

    def describe(self) -> str:
        lines = [f"word: {self.word}" + (" (closed)" if self.word.closed else "")]
        n = len(self.word)
        for m in self.pair_violations:
            a, b = self.word.letters[m], self.word.letters[(m + 1) % n]
            lines.append(f"unallowable pair {a}{b} at index {m}")
        for m in self.vertex_repeats:
            lines.append(f"lattice vertex revisited at step {m}")
        lines.append("gate: " + ("pass" if self.passed else "FAIL"))
        return "\n".join(lines)


def lemma1_gate(word: LatticeWord, start: Vertex = (0, 0, 0)) -> GateReport:
    """Self-avoidance plus allowable adjacent pairs (wrapping around when closed)."""
    sticks = word.sticks()
    n = len(sticks)
    last = n if word.closed else n - 1
    pairs = [m for m in range(max(last, 0))
             if not is_allowable_pair(sticks[m], sticks[(m + 1) % n])]
    return GateReport(word, _repeated_vertices(word, start), pairs)


def multi_path_disjoint(paths: Sequence[LatticePath]) -> bool:
    owner: dict[Vertex, int] = {}
    for i, p in enumerate(paths):
        for v in p.vertices:
            if owner.setdefault(v, i) != i:
                return False
    return True


def realize(word: LatticeWord, start: Vertex = (0, 0, 0)) -> PiecewiseCurve:
    """Stick curve for ``word`` whose initial point sits at ``4*pi*start``.

    Closed words give closed curves (the seam is checked to be C2).
    """
    if len(word) == 0:
        raise ValueError("empty lattice word")
    curve = stick_word_curve(word.sticks())
    origin = _alpha(PIECES["a"].r, PIECES["a"].h, PIECES["a"].t_i)
    curve = curve.translated(LATTICE_UNIT * np.asarray(start, float) - origin)
    return curve.as_closed() if word.closed else curve


# ---------------------------------------------------------------------------
# crossing diagram
# ---------------------------------------------------------------------------

class DegenerateProjection(ValueError):
    pass


@dataclass(frozen=True)
class Crossing:
    position: tuple[float, float]  # projected (x, z) in lattice units
    sign: int
    over: tuple[int, int]  # (path index, edge index)
    under: tuple[int, int]


# Projection (x, y, z) -> (x + y/10, z + y/14).  The shear separates edges
# that overlap in the plain (x, z) view (strands stacked in y); for |y| <= 1
# it never creates new incidences between lattice edges.
DEFAULT_TILT = (0.1, 1 / 14)
_SCALE = 70  # makes projected lattice coordinates integral for the default tilt


def crossing_diagram(paths: Sequence[LatticePath],
                     tilt: tuple[float, float] = DEFAULT_TILT) -> list[Crossing]:
    """Crossings of the projection to the (x, z) plane; larger y is over.

    Sign is ``+1`` when turning the over-strand direction to the under-strand
    direction is counter-clockwise in the (x, z) chart.  ``tilt=(0, 0)`` gives
    the plain projection, which raises :class:`DegenerateProjection` when
    edges overlap.
    """
    ex, ez = tilt
    segs = []  # (path, edge index, p0, p1, y-mid, direction)
    for pi_, p in enumerate(paths):
        for ei, (a, b) in enumerate(p.edges()):
            segs.append((pi_, ei, a, b))
    if not segs:
        return []
    A = np.array([s[2] for s in segs], dtype=float)
    B = np.array([s[3] for s in segs], dtype=float)

    def proj(V):
        return np.round(_SCALE * np.stack([V[:, 0] + ex * V[:, 1], V[:, 2] + ez * V[:, 1]], 1))

    integral = abs(_SCALE * ex - round(_SCALE * ex)) < 1e-12 and abs(_SCALE * ez - round(_SCALE * ez)) < 1e-12
    if integral:
        P0, P1 = proj(A).astype(np.int64), proj(B).astype(np.int64)
    else:
        P0 = np.stack([A[:, 0] + ex * A[:, 1], A[:, 2] + ez * A[:, 1]], 1)
        P1 = np.stack([B[:, 0] + ex * B[:, 1], B[:, 2] + ez * B[:, 1]], 1)

    n_edges = [len(p.vertices) - 1 for p in paths]
    closed = [p.is_closed for p in paths]

    def adjacent(i, j):
        pa, ea = segs[i][0], segs[i][1]
        pb, eb = segs[j][0], segs[j][1]
        if pa != pb:
            return False
        if abs(ea - eb) == 1:
            return True
        return closed[pa] and {ea, eb} == {0, n_edges[pa] - 1}

    lo = np.minimum(P0, P1)
    hi = np.maximum(P0, P1)
    out = []
    m = len(segs)
    for i in range(m):
        j = np.arange(i + 1, m)
        box = np.all(lo[j] <= hi[i], axis=1) & np.all(hi[j] >= lo[i], axis=1)
        for jj in j[box]:
            jj = int(jj)
            if adjacent(i, jj):
                continue
            hit = _segment_crossing(P0[i], P1[i], P0[jj], P1[jj])
            if hit is None:
                continue
            if hit == "degenerate":
                raise DegenerateProjection(
                    f"projected edges {segs[i][:2]} and {segs[jj][:2]} overlap or touch; "
                    "perturb the projection (tilt) before counting crossings")
            u, v = hit
            y_i = A[i, 1] + u * (B[i, 1] - A[i, 1])
            y_j = A[jj, 1] + v * (B[jj, 1] - A[jj, 1])
            if y_i == y_j:
                raise DegenerateProjection("crossing edges at equal depth")
            over, under = (i, jj) if y_i > y_j else (jj, i)
            do = (B[over] - A[over])[[0, 2]]
            du = (B[under] - A[under])[[0, 2]]
            sign = int(np.sign(do[0] * du[1] - do[1] * du[0]))
            pos = P0[i] + u * (P1[i] - P0[i])
            if integral:
                pos = pos / _SCALE
            out.append(Crossing((float(pos[0]), float(pos[1])), sign,
                                segs[over][:2], segs[under][:2]))
    return out


def _segment_crossing(p, q, r, s):
    """Parameters ``(u, v)`` of a transversal interior crossing, ``None``, or ``"degenerate"``."""
    d1 = q - p
    d2 = s - r
    if not np.any(d1) or not np.any(d2):
        # an edge along the projection direction shows up as a point
        a, b, pt = (r, s, p) if not np.any(d1) else (p, q, r)
        e = b - a
        off = pt - a
        on_line = e[0] * off[1] - e[1] * off[0] == 0
        t = float(off @ e) / float(e @ e) if np.any(e) else (0.0 if not np.any(off) else -1.0)
        return "degenerate" if on_line and 0 <= t <= 1 else None
    den = d1[0] * d2[1] - d1[1] * d2[0]
    w = r - p
    if den == 0:
        if w[0] * d1[1] - w[1] * d1[0] != 0:
            return None  # parallel, not collinear
        dd = float(d1 @ d1)
        t0 = float(w @ d1) / dd
        t1 = float((s - p) @ d1) / dd
        if max(min(t0, t1), 0.0) <= min(max(t0, t1), 1.0):
            return "degenerate"
        return None
    u = (w[0] * d2[1] - w[1] * d2[0]) / den
    v = (w[0] * d1[1] - w[1] * d1[0]) / den
    if u < 0 or u > 1 or v < 0 or v > 1:
        return None
    if u in (0, 1) or v in (0, 1):
        return "degenerate"
    return float(u), float(v)
