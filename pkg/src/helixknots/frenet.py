"""Helix segments, Frenet frames and C2 splicing of constant-curvature curves.

A curve is stored as a sequence of helix arcs ``[r, h, t_i, t_e]`` (the arc
``t -> (r cos t, r sin t, h t)``), each placed in space by a proper rigid
motion.  Splicing rotates the second curve so that its initial Frenet frame
lands on the terminal frame of the first one, then translates it onto the
first curve's end point.  Because the rotation carries ``(T, N, B)`` onto
``(T, N, B)``, position, tangent and ``kappa * N`` agree at the joint.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

ORTHO_TOL = 1e-12
CURVATURE_TOL = 1e-12


class DomainError(ValueError):
    """Raised when a parameter lies outside the domain of a segment or curve."""


class CurvatureMismatch(ValueError):
    """Raised when splicing curves whose curvatures differ."""


# ---------------------------------------------------------------------------
# vectorised local helpers (segment coordinates)
# ---------------------------------------------------------------------------

def _alpha(r, h, t):
    t = np.asarray(t, dtype=float)
    return np.stack(np.broadcast_arrays(r * np.cos(t), r * np.sin(t), h * t), axis=-1)


def _alpha_diff(r, h, t_mid, dt):
    """``alpha(t_mid + dt/2) - alpha(t_mid - dt/2)`` without cancellation."""
    s = np.sin(0.5 * dt)
    return np.stack(
        np.broadcast_arrays(-2.0 * r * np.sin(t_mid) * s, 2.0 * r * np.cos(t_mid) * s, h * dt),
        axis=-1,
    )


def _frame_local(r, h, t):
    """Frenet frames as ``(..., 3, 3)`` matrices with columns T, N, B."""
    t = np.asarray(t, dtype=float)
    k = np.hypot(r, h)
    c, s = np.cos(t), np.sin(t)
    zero = np.zeros_like(c)
    T = np.stack(np.broadcast_arrays(-r * s / k, r * c / k, h / k + zero), axis=-1)
    N = np.stack([-c, -s, zero], axis=-1)
    B = np.stack(np.broadcast_arrays(h * s / k, -h * c / k, r / k + zero), axis=-1)
    return np.stack([T, N, B], axis=-1)


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FrenetFrame:
    """Orthonormal right-handed frame (tangent, normal, binormal)."""

    T: np.ndarray
    N: np.ndarray
    B: np.ndarray

    @classmethod
    def from_matrix(cls, M) -> "FrenetFrame":
        M = np.asarray(M, dtype=float)
        return cls(M[:, 0].copy(), M[:, 1].copy(), M[:, 2].copy())

    @property
    def matrix(self) -> np.ndarray:
        return np.column_stack([self.T, self.N, self.B])

    def max_difference(self, other: "FrenetFrame") -> float:
        """Largest absolute difference over the nine matrix entries."""
        return float(np.max(np.abs(self.matrix - other.matrix)))

    def orthonormality_error(self) -> float:
        M = self.matrix
        return float(max(np.max(np.abs(M.T @ M - np.eye(3))),
                         np.max(np.abs(np.cross(self.T, self.N) - self.B))))


@dataclass(frozen=True)
class RigidMotion:
    """Proper rigid motion ``x -> R x + w``."""

    R: np.ndarray = field(default_factory=lambda: np.eye(3))
    w: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        R = np.array(self.R, dtype=float).reshape(3, 3)
        w = np.array(self.w, dtype=float).reshape(3)
        if np.max(np.abs(R.T @ R - np.eye(3))) > ORTHO_TOL or abs(np.linalg.det(R) - 1.0) > ORTHO_TOL:
            raise ValueError("R is not a rotation matrix")
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "w", w)

    @classmethod
    def identity(cls) -> "RigidMotion":
        return cls()

    @classmethod
    def translation(cls, v) -> "RigidMotion":
        return cls(np.eye(3), v)

    def apply(self, x):
        return np.asarray(x) @ self.R.T + self.w

    def compose(self, other: "RigidMotion") -> "RigidMotion":
        """``self o other``: apply ``other`` first."""
        return RigidMotion(self.R @ other.R, self.R @ other.w + self.w)


@dataclass(frozen=True)
class HelixSegment:
    """Arc of the helix ``(r cos t, r sin t, h t)`` for ``t_i <= t <= t_e``.

    ``h`` is signed; ``h = 0`` gives a circle of radius ``r``.
    """

    r: float
    h: float
    t_i: float
    t_e: float

    def __post_init__(self):
        vals = (self.r, self.h, self.t_i, self.t_e)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError("helix parameters must be finite")
        if self.r <= 0:
            raise ValueError(f"radius must be positive, got {self.r}")
        if self.t_e <= self.t_i:
            raise ValueError(f"need t_i < t_e, got [{self.t_i}, {self.t_e}]")

    @property
    def speed(self) -> float:
        """``|alpha'(t)|``; arclength per unit angle."""
        return float(np.hypot(self.r, self.h))

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.r, self.h, self.t_i, self.t_e)

    def _check(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < self.t_i) or np.any(t > self.t_e):
            raise DomainError(f"angle outside [{self.t_i}, {self.t_e}]")
        return t


def helix_point(seg: HelixSegment, t) -> np.ndarray:
    t = seg._check(t)
    return _alpha(seg.r, seg.h, t)


def curvature(seg: HelixSegment) -> float:
    return seg.r / (seg.r ** 2 + seg.h ** 2)


def torsion(seg: HelixSegment) -> float:
    return seg.h / (seg.r ** 2 + seg.h ** 2)


def segment_arclength(seg: HelixSegment) -> float:
    return seg.speed * (seg.t_e - seg.t_i)


def frenet_frame(seg: HelixSegment, t: float) -> FrenetFrame:
    t = float(seg._check(t))
    return FrenetFrame.from_matrix(_frame_local(seg.r, seg.h, t))


@dataclass(frozen=True)
class PlacedSegment:
    segment: HelixSegment
    motion: RigidMotion


# ---------------------------------------------------------------------------
# piecewise curves
# ---------------------------------------------------------------------------

class PiecewiseCurve:
    """Ordered rigidly placed helix segments, parameterised by arclength.

    Internally the curve is held as arrays (``params`` of shape ``(n, 4)``,
    ``rotations`` ``(n, 3, 3)``, ``translations`` ``(n, 3)``) so evaluation
    of many samples is vectorised.  Instances are immutable.
    """

    __slots__ = ("params", "rotations", "translations", "closed", "cumulative_lengths", "_speed")

    def __init__(self, params, rotations, translations, closed: bool = False):
        params = np.array(params, dtype=float).reshape(-1, 4)
        rotations = np.array(rotations, dtype=float).reshape(-1, 3, 3)
        translations = np.array(translations, dtype=float).reshape(-1, 3)
        n = len(params)
        if n == 0:
            raise ValueError("a curve needs at least one segment")
        if len(rotations) != n or len(translations) != n:
            raise ValueError("params, rotations and translations disagree in length")
        r, h, ti, te = params.T
        if not (np.all(np.isfinite(params)) and np.all(np.isfinite(rotations))
                and np.all(np.isfinite(translations))):
            raise ValueError("non-finite curve data")
        if np.any(r <= 0) or np.any(te <= ti):
            raise ValueError("invalid helix parameters")
        speed = np.hypot(r, h)
        cum = np.concatenate([[0.0], np.cumsum(speed * (te - ti))])
        for name, arr in (("params", params), ("rotations", rotations),
                          ("translations", translations), ("cumulative_lengths", cum),
                          ("_speed", speed)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "closed", bool(closed))

    def __setattr__(self, name, value):
        raise AttributeError("PiecewiseCurve is immutable")

    @classmethod
    def from_segments(cls, placed: Iterable[PlacedSegment | HelixSegment], closed: bool = False):
        params, rots, trans = [], [], []
        for p in placed:
            if isinstance(p, HelixSegment):
                p = PlacedSegment(p, RigidMotion.identity())
            params.append(p.segment.as_tuple())
            rots.append(p.motion.R)
            trans.append(p.motion.w)
        return cls(params, rots, trans, closed)

    @classmethod
    def single(cls, seg: HelixSegment) -> "PiecewiseCurve":
        return cls.from_segments([seg])

    # -- basic accessors ----------------------------------------------------
    def __len__(self) -> int:
        return len(self.params)

    @property
    def length(self) -> float:
        return float(self.cumulative_lengths[-1])

    @property
    def segments(self) -> tuple[PlacedSegment, ...]:
        return tuple(
            PlacedSegment(HelixSegment(*map(float, p)), RigidMotion(R, w))
            for p, R, w in zip(self.params, self.rotations, self.translations)
        )

    def segment(self, k: int) -> HelixSegment:
        return HelixSegment(*map(float, self.params[k]))

    def curvatures(self) -> np.ndarray:
        r, h = self.params[:, 0], self.params[:, 1]
        return r / (r ** 2 + h ** 2)

    def __repr__(self):
        kind = "closed" if self.closed else "open"
        return f"PiecewiseCurve({len(self)} segments, length={self.length:.6g}, {kind})"

    # -- end data -----------------------------------------------------------
    def _end_data(self, k: int, which: str):
        r, h, ti, te = self.params[k]
        t = ti if which == "start" else te
        p = self.rotations[k] @ _alpha(r, h, t) + self.translations[k]
        F = self.rotations[k] @ _frame_local(r, h, t)
        return p, F

    def initial_point(self) -> np.ndarray:
        return self._end_data(0, "start")[0]

    def terminal_point(self) -> np.ndarray:
        return self._end_data(len(self) - 1, "end")[0]

    def initial_frame(self) -> FrenetFrame:
        return FrenetFrame.from_matrix(self._end_data(0, "start")[1])

    def terminal_frame(self) -> FrenetFrame:
        return FrenetFrame.from_matrix(self._end_data(len(self) - 1, "end")[1])

    def joint_residuals(self, include_seam: bool | None = None) -> np.ndarray:
        """Residuals ``(position, tangent, kappa*N)`` at each joint, shape ``(m, 3)``.

        The seam (last -> first) is included for closed curves unless
        ``include_seam`` says otherwise.
        """
        if include_seam is None:
            include_seam = self.closed
        r, h, ti, te = self.params.T
        kappa = r / (r ** 2 + h ** 2)
        p_end = np.einsum("nij,nj->ni", self.rotations, _alpha(r, h, te)) + self.translations
        p_start = np.einsum("nij,nj->ni", self.rotations, _alpha(r, h, ti)) + self.translations
        F_end = self.rotations @ _frame_local(r, h, te)
        F_start = self.rotations @ _frame_local(r, h, ti)
        left = np.arange(len(self) - 1)
        right = left + 1
        if include_seam:
            left = np.append(left, len(self) - 1)
            right = np.append(right, 0)
        dp = np.linalg.norm(p_end[left] - p_start[right], axis=1)
        dT = np.linalg.norm(F_end[left][:, :, 0] - F_start[right][:, :, 0], axis=1)
        dK = np.linalg.norm(kappa[left, None] * F_end[left][:, :, 1]
                            - kappa[right, None] * F_start[right][:, :, 1], axis=1)
        return np.stack([dp, dT, dK], axis=1)

    # -- evaluation ---------------------------------------------------------
    def locate(self, s):
        """Segment indices and local angles for arclength values ``s``."""
        s = np.asarray(s, dtype=float)
        L = self.length
        if self.closed:
            s = np.mod(s, L)
        elif np.any(s < 0) or np.any(s > L):
            raise DomainError(f"arclength outside [0, {L}]")
        k = np.searchsorted(self.cumulative_lengths, s, side="right") - 1
        k = np.clip(k, 0, len(self) - 1)
        u = s - self.cumulative_lengths[k]
        r, h, ti, te = self.params[k].T
        t = np.minimum(ti + u / self._speed[k], te)
        return k, t

    def points(self, s) -> np.ndarray:
        k, t = self.locate(s)
        r, h = self.params[k, 0], self.params[k, 1]
        return np.einsum("...ij,...j->...i", self.rotations[k], _alpha(r, h, t)) + self.translations[k]

    def frames(self, s) -> np.ndarray:
        """Frenet frames as ``(..., 3, 3)`` matrices with columns T, N, B."""
        k, t = self.locate(s)
        r, h = self.params[k, 0], self.params[k, 1]
        return self.rotations[k] @ _frame_local(r, h, t)

    def eval(self, s: float) -> tuple[np.ndarray, FrenetFrame]:
        return self.points(float(s)), FrenetFrame.from_matrix(self.frames(float(s)))

    def sample(self, delta: float) -> tuple[np.ndarray, np.ndarray]:
        """Points at arclength spacing ``delta`` (end point included when open)."""
        L = self.length
        m = int(np.ceil(L / delta))
        s = np.arange(m) * delta
        s = s[s < L]
        if not self.closed:
            s = np.append(s, L)
        return s, self.points(s)

    # -- rigid motions ------------------------------------------------------
    def moved(self, motion: RigidMotion) -> "PiecewiseCurve":
        R = motion.R @ self.rotations
        w = self.translations @ motion.R.T + motion.w
        return PiecewiseCurve(self.params, R, w, self.closed)

    def translated(self, v) -> "PiecewiseCurve":
        return PiecewiseCurve(self.params, self.rotations, self.translations + np.asarray(v, float),
                              self.closed)

    def as_closed(self, tol: float = 1e-9) -> "PiecewiseCurve":
        """Mark the curve closed after checking the seam is a C2 joint within ``tol``."""
        seam = self.joint_residuals(include_seam=True)[-1]
        if np.max(seam) > tol:
            raise ValueError(f"seam residuals {seam} exceed {tol}; curve does not close up")
        return PiecewiseCurve(self.params, self.rotations, self.translations, closed=True)


def splice_motion(first: PiecewiseCurve, second: PiecewiseCurve) -> RigidMotion:
    """Rigid motion taking ``second``'s initial point and frame onto ``first``'s terminal ones."""
    M1 = first.terminal_frame().matrix
    M2 = second.initial_frame().matrix
    # nearest rotation to M1 M2^T; keeps long splice chains from drifting off SO(3)
    U, _, Vt = np.linalg.svd(M1 @ M2.T)
    A = U @ Vt
    w = first.terminal_point() - A @ second.initial_point()
    return RigidMotion(A, w)


def _check_spliceable(curves: Sequence[PiecewiseCurve]) -> None:
    if not curves:
        raise ValueError("nothing to splice")
    kappa = curves[0].curvatures()[0]
    for c in curves:
        if c.closed:
            raise ValueError("cannot splice a closed curve")
        if np.max(np.abs(c.curvatures() - kappa)) > CURVATURE_TOL:
            raise CurvatureMismatch("curves do not share a constant curvature")


def splice(first: PiecewiseCurve, second: PiecewiseCurve) -> PiecewiseCurve:
    """Return the C2 concatenation ``first * second``."""
    return chain([first, second])


def chain(curves: Sequence[PiecewiseCurve]) -> PiecewiseCurve:
    """Left fold of :func:`splice` over ``curves`` in linear time."""
    curves = list(curves)
    _check_spliceable(curves)
    params = [curves[0].params]
    rots = [curves[0].rotations]
    trans = [curves[0].translations]
    end = curves[0]
    for c in curves[1:]:
        m = splice_motion(end, c)
        R = m.R @ c.rotations
        w = c.translations @ m.R.T + m.w
        params.append(c.params)
        rots.append(R)
        trans.append(w)
        # only the last segment matters for the next splice
        end = PiecewiseCurve(c.params[-1:], R[-1:], w[-1:])
    return PiecewiseCurve(np.concatenate(params), np.concatenate(rots), np.concatenate(trans))
