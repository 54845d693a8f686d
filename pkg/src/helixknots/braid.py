"""Braid words to closed constant-curvature curves.

Each braid letter becomes a component: one stick word per column, all
rising by the same height, with the two crossing columns exchanging places.
Components are stacked bottom to top, every strand top is joined to its
bottom by a closing arc routed to the right of the braid, and each cycle of
the braid permutation becomes one closed lattice word.  Lattice words are
gated (self-avoiding, allowable pairs, mutually disjoint) before any
geometry is built.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Sequence

from .blocks import StickKind, is_allowable_pair
from .frenet import PiecewiseCurve
from .lattice import (
    Crossing,
    GateReport,
    LatticePath,
    LatticeWord,
    Vertex,
    crossing_diagram,
    lemma1_gate,
    multi_path_disjoint,
    realize,
    trace_path,
)

S = StickKind


class BraidParseError(ValueError):
    pass


class GateFailure(RuntimeError):
    """A compiled word failed the lattice gate; this indicates a compiler bug."""

    def __init__(self, message: str, reports: Sequence[GateReport] = ()):
        super().__init__(message)
        self.reports = list(reports)


def _w(text: str) -> tuple[StickKind, ...]:
    return tuple(StickKind(tok) for tok in text.split())


# Crossing words.  The positive under-strand word as printed ends its
# detour with a second j-, leaving the strand at y = -2; its last j- is
# replaced by j+ so the strand returns to the y = 0 plane.
POSITIVE_OVER = _w("k+ k+ i+ k+ k+ k+")
POSITIVE_UNDER_PRINTED = _w("k+ j- k+ k+ i- k+ j- k+")
POSITIVE_UNDER = _w("k+ j- k+ k+ i- k+ j+ k+")
# The printed negative words move the right-going strand in front (y = +1),
# which is the same crossing sign as the positive component.  Mirroring its
# detour to y = -1 puts the left-going strand in front instead.
NEGATIVE_RIGHTWARD_PRINTED = _w("k+ j+ k+ i+ k+ j- k+")
NEGATIVE_RIGHTWARD = _w("k+ j- k+ i+ k+ j+ k+")
NEGATIVE_LEFTWARD = _w("k+ k+ i- k+ k+")


@dataclass(frozen=True)
class BraidWord:
    n: int
    letters: tuple[tuple[int, int], ...]  # (generator index g >= 1, sign +1/-1)

    def __post_init__(self):
        if self.n < 2:
            raise BraidParseError(f"need at least 2 strands, got {self.n}")
        if not self.letters:
            raise BraidParseError("empty braid word")
        for g, sgn in self.letters:
            if not 1 <= g <= self.n - 1:
                raise BraidParseError(f"generator {g} out of range for {self.n} strands")
            if sgn not in (1, -1):
                raise BraidParseError(f"bad sign {sgn}")

    def __str__(self):
        return f"n={self.n}; " + " ".join(str(g * s) for g, s in self.letters)

    def permutation(self) -> list[int]:
        """``perm[c]`` is the top column of the strand starting at bottom column ``c``."""
        pos = list(range(self.n))  # pos[strand] = current column
        for g, _ in self.letters:
            a, b = g - 1, g
            pos = [b if p == a else a if p == b else p for p in pos]
        return pos

    def cycles(self) -> list[list[int]]:
        perm = self.permutation()
        seen, out = set(), []
        for c in range(self.n):
            if c in seen:
                continue
            cyc = []
            while c not in seen:
                seen.add(c)
                cyc.append(c)
                c = perm[c]
            out.append(cyc)
        return out


_HEADER = re.compile(r"^\s*n\s*=\s*([+-]?\d+)\s*;(.*)$", re.S)
_TOKEN = re.compile(r"^[+-]?\d+$")


def parse_braid(text: str) -> BraidWord:
    """Parse ``"[n=<int>;] g1 g2 ..."``; ``+g`` is sigma_g, ``-g`` its inverse."""
    if not text or not text.strip():
        raise BraidParseError("empty braid text")
    n = None
    m = _HEADER.match(text)
    if m:
        n = int(m.group(1))
        text = m.group(2)
    letters = []
    for tok in text.split():
        if not _TOKEN.match(tok):
            raise BraidParseError(f"malformed token {tok!r}")
        v = int(tok)
        if v == 0:
            raise BraidParseError("generator indices start at 1")
        letters.append((abs(v), 1 if v > 0 else -1))
    if not letters:
        raise BraidParseError("no generators given")
    if n is None:
        n = 1 + max(g for g, _ in letters)
    return BraidWord(n, tuple(letters))


@dataclass(frozen=True)
class BraidComponent:
    columns: tuple[tuple[StickKind, ...], ...]
    height: int
    swap: tuple[int, int]  # the two 0-indexed columns that exchange strands
    sign: int


def _net(word: Sequence[StickKind]) -> Vertex:
    return LatticeWord.from_sticks(word).displacement()


def crossing_component(g: int, sign: int, n: int) -> BraidComponent:
    if not 1 <= g <= n - 1:
        raise BraidParseError(f"generator {g} out of range for {n} strands")
    if sign > 0:
        left, right = POSITIVE_OVER, POSITIVE_UNDER
    else:
        left, right = NEGATIVE_RIGHTWARD, NEGATIVE_LEFTWARD
    height = _net(left)[2]
    assert _net(right)[2] == height
    cols = [(S.K_PLUS,) * height] * n
    cols[g - 1] = left
    cols[g] = right
    return BraidComponent(tuple(cols), height, (g - 1, g), 1 if sign > 0 else -1)


@dataclass(frozen=True)
class BraidStack:
    strands: tuple[tuple[StickKind, ...], ...]  # indexed by bottom column
    permutation: tuple[int, ...]
    height: int
    components: tuple[BraidComponent, ...]


def stack_components(word: BraidWord) -> BraidStack:
    comps = [crossing_component(g, s, word.n) for g, s in word.letters]
    strands: list[list[StickKind]] = [[] for _ in range(word.n)]
    pos = list(range(word.n))
    for comp in comps:
        for strand in range(word.n):
            strands[strand].extend(comp.columns[pos[strand]])
        a, b = comp.swap
        pos = [b if p == a else a if p == b else p for p in pos]
    return BraidStack(tuple(tuple(s) for s in strands), tuple(pos),
                      sum(c.height for c in comps), tuple(comps))


@dataclass(frozen=True)
class ClosurePlan:
    arcs: tuple[tuple[StickKind, ...], ...]  # indexed by column
    clearances: tuple[int, ...]
    widths: tuple[int, ...]


def closure_arcs(n: int, total_height: int) -> ClosurePlan:
    """Arcs from the top of each column down to its bottom, nested to the right.

    Column ``m`` rises ``c = n - m`` above the braid, runs right to
    ``x = 2n - 1 - m``, drops below the braid by ``c`` and comes back, so
    inner columns get inner arcs.
    """
    if n < 2 or total_height < 1:
        raise ValueError("need n >= 2 and a positive height")
    arcs, clear, widths = [], [], []
    for m in range(n):
        c = n - m
        w = 2 * n - 1 - 2 * m
        arc = ((S.K_PLUS,) * c + (S.I_PLUS,) * w + (S.K_MINUS,) * (total_height + 2 * c)
               + (S.I_MINUS,) * w + (S.K_PLUS,) * c)
        arcs.append(arc)
        clear.append(c)
        widths.append(w)
    return ClosurePlan(tuple(arcs), tuple(clear), tuple(widths))


@dataclass
class LinkAssembly:
    braid: BraidWord
    components: list[LatticeWord]
    starts: list[Vertex]
    cycles: list[list[int]]
    gate_reports: list[GateReport]
    geometry: list[PiecewiseCurve] = field(default_factory=list)

    def paths(self) -> list[LatticePath]:
        return [trace_path(w, s) for w, s in zip(self.components, self.starts)]

    def crossings(self) -> list[Crossing]:
        return crossing_diagram(self.paths())


def link_words(word: BraidWord) -> LinkAssembly:
    """Closed lattice words (one per permutation cycle) with their gate reports."""
    stack = stack_components(word)
    plan = closure_arcs(word.n, stack.height)
    perm = stack.permutation
    words, starts, cycles, reports = [], [], [], []
    for cyc in word.cycles():
        sticks: list[StickKind] = []
        for c in cyc:
            sticks.extend(stack.strands[c])
            sticks.extend(plan.arcs[perm[c]])
        lw = LatticeWord.from_sticks(sticks, closed=True)
        start = (cyc[0], 0, 0)
        words.append(lw)
        starts.append(start)
        cycles.append(cyc)
        reports.append(lemma1_gate(lw, start))
    return LinkAssembly(word, words, starts, cycles, reports)


def assemble_link(word: BraidWord | str, geometry: bool = True) -> LinkAssembly:
    """Compile ``word`` and (unless ``geometry`` is false) build the closed curves.

    Raises :class:`GateFailure` when any component fails the lattice gate or
    components share lattice vertices.
    """
    if isinstance(word, str):
        word = parse_braid(word)
    asm = link_words(word)
    bad = [r for r in asm.gate_reports if not r.passed]
    if bad:
        raise GateFailure("lattice gate failed:\n" + "\n".join(r.describe() for r in bad), bad)
    if not multi_path_disjoint(asm.paths()):
        raise GateFailure("link components share lattice vertices", asm.gate_reports)
    if geometry:
        asm.geometry = [realize(w, s) for w, s in zip(asm.components, asm.starts)]
    return asm


def junction_pairs_allowable(stack: BraidStack) -> bool:
    """Every adjacent letter pair inside every strand word is allowable."""
    return all(is_allowable_pair(a, b) for s in stack.strands for a, b in zip(s, s[1:]))
