"""Numerical certification of spliced curves.

Checks C2 joints, constancy of curvature (analytically per segment and by
finite differences of positions), global simplicity through a sampled lower
bound on the self-distance, and the tube bound of single sticks.

The distance bound relies on unit speed: every point lies within ``delta/2``
of a sample, so ``min sampled distance - delta`` bounds the true distance from
below.  Pairs closer than ``diagonal_exclusion`` in arclength on the same
curve are skipped; for curvature at most 1 and arclength gap ``0 < g <= pi``
the chord is at least ``2 sin(g/2) > 0``, so that band cannot meet itself.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from math import pi
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import least_squares
from scipy.spatial import cKDTree

from .frenet import PiecewiseCurve, _alpha_diff

C2_TOL = 1e-9
FD_TOL = 1e-5
FD_STEP = 1e-4
ANALYTIC_TOL = 1e-12
DEFAULT_DELTA = 0.05
DELTA_FLOOR = 1e-3
WITNESS_TOL = 1e-9
TUBE_RADIUS = pi


def _as_list(curves) -> list[PiecewiseCurve]:
    if isinstance(curves, PiecewiseCurve):
        return [curves]
    curves = list(curves)
    if not curves:
        raise ValueError("no curves given")
    return curves


@dataclass
class VerificationReport:
    """Outcome of one or more checks; fields of checks not run stay ``None``."""

    joint_count: Optional[int] = None
    max_position_residual: Optional[float] = None
    max_tangent_residual: Optional[float] = None
    max_curvature_vector_residual: Optional[float] = None
    c2_tol: Optional[float] = None
    c2_passed: Optional[bool] = None

    curvature_target: Optional[float] = None
    curvature_analytic_min: Optional[float] = None
    curvature_analytic_max: Optional[float] = None
    curvature_fd_min: Optional[float] = None
    curvature_fd_max: Optional[float] = None
    curvature_samples: Optional[int] = None
    curvature_fd_tol: Optional[float] = None
    curvature_passed: Optional[bool] = None

    distance_bound: Optional[float] = None
    distance_status: Optional[str] = None
    distance_delta: Optional[float] = None
    distance_samples: Optional[int] = None
    simple_passed: Optional[bool] = None

    @property
    def passed(self) -> bool:
        flags = [self.c2_passed, self.curvature_passed, self.simple_passed]
        flags = [f for f in flags if f is not None]
        return bool(flags) and all(flags)

    def merge(self, other: "VerificationReport") -> "VerificationReport":
        mine = asdict(self)
        for k, v in asdict(other).items():
            if v is not None:
                mine[k] = v
        return VerificationReport(**mine)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        return cls(**{k: v for k, v in d.items() if k in cls.__dataclass_fields__})

    def summary(self) -> str:
        lines = []
        if self.c2_passed is not None:
            lines.append(
                f"C2 joints ({self.joint_count}): position {self.max_position_residual:.3e}, "
                f"tangent {self.max_tangent_residual:.3e}, kappa*N {self.max_curvature_vector_residual:.3e}"
                f" -> {'pass' if self.c2_passed else 'FAIL'}")
        if self.curvature_passed is not None:
            lines.append(
                f"curvature: analytic [{self.curvature_analytic_min:.15g}, {self.curvature_analytic_max:.15g}], "
                f"finite-difference [{self.curvature_fd_min:.9f}, {self.curvature_fd_max:.9f}] "
                f"over {self.curvature_samples} samples -> {'pass' if self.curvature_passed else 'FAIL'}")
        if self.simple_passed is not None:
            lines.append(
                f"simplicity: bound {self.distance_bound:.6g} at delta {self.distance_delta:g} "
                f"({self.distance_status}) -> {'pass' if self.simple_passed else 'FAIL'}")
        lines.append("overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# C2 joints
# ---------------------------------------------------------------------------

def check_c2(curves, tol: float = C2_TOL) -> VerificationReport:
    res = [c.joint_residuals() for c in _as_list(curves)]
    res = np.concatenate(res) if res else np.zeros((0, 3))
    mx = res.max(axis=0) if len(res) else np.zeros(3)
    return VerificationReport(
        joint_count=int(len(res)),
        max_position_residual=float(mx[0]),
        max_tangent_residual=float(mx[1]),
        max_curvature_vector_residual=float(mx[2]),
        c2_tol=tol,
        c2_passed=bool(np.all(mx <= tol)),
    )


# ---------------------------------------------------------------------------
# curvature
# ---------------------------------------------------------------------------

def _second_difference(curve: PiecewiseCurve, s: np.ndarray, step: float) -> np.ndarray:
    """Central second difference of position, expressed in the local segment frame.

    Chords are summed piece by piece so absolute coordinates never enter the
    subtraction; the joint position mismatch is the business of ``check_c2``.
    """
    n = len(curve)
    k, t = curve.locate(s)
    P = curve.params
    speed = curve._speed
    seg_len = np.diff(curve.cumulative_lengths)
    cum = curve.cumulative_lengths
    u = np.clip(np.mod(s, curve.length) if curve.closed else s, 0, None) - cum[k]
    u = np.clip(u, 0.0, seg_len[k])
    r, h, ti, te = P[k].T
    c = speed[k]
    t = ti + u / c

    nxt = (k + 1) % n
    prv = (k - 1) % n

    # forward chord
    rem = seg_len[k] - u
    inside = rem >= step
    d = step / c
    Dp = _alpha_diff(r, h, t + 0.5 * d, d)
    if np.any(~inside):
        j = ~inside
        dt1 = rem[j] / c[j]
        part1 = _alpha_diff(r[j], h[j], te[j] - 0.5 * dt1, dt1)
        kn = nxt[j]
        dt2 = (step - rem[j]) / speed[kn]
        part2 = _alpha_diff(P[kn, 0], P[kn, 1], P[kn, 2] + 0.5 * dt2, dt2)
        Q = np.einsum("nji,njk->nik", curve.rotations[k[j]], curve.rotations[kn])
        Dp[j] = part1 + np.einsum("nij,nj->ni", Q, part2)

    # backward chord
    inside = u >= step
    Dm = _alpha_diff(r, h, t - 0.5 * d, d)
    if np.any(~inside):
        j = ~inside
        dt1 = u[j] / c[j]
        part1 = _alpha_diff(r[j], h[j], ti[j] + 0.5 * dt1, dt1)
        kp = prv[j]
        dt2 = (step - u[j]) / speed[kp]
        part2 = _alpha_diff(P[kp, 0], P[kp, 1], P[kp, 3] - 0.5 * dt2, dt2)
        Q = np.einsum("nji,njk->nik", curve.rotations[k[j]], curve.rotations[kp])
        Dm[j] = part1 + np.einsum("nij,nj->ni", Q, part2)

    return (Dp - Dm) / step ** 2


def curvature_samples(curve: PiecewiseCurve, samples_per_unit: float = 1000,
                      step: float = FD_STEP) -> np.ndarray:
    """Arclength sample positions: a uniform grid plus points straddling every joint."""
    L = curve.length
    m = max(int(np.ceil(L * samples_per_unit)), 2)
    if curve.closed:
        s = np.linspace(0.0, L, m, endpoint=False)
        joints = curve.cumulative_lengths[:-1]
    else:
        s = np.linspace(step, L - step, m)
        joints = curve.cumulative_lengths[1:-1]
    extra = np.concatenate([joints, joints - 0.5 * step, joints + 0.5 * step])
    if not curve.closed:
        extra = extra[(extra >= step) & (extra <= L - step)]
    return np.sort(np.concatenate([s, extra]))


def finite_difference_curvature(curve: PiecewiseCurve, s, step: float = FD_STEP,
                                chunk: int = 1_000_000) -> np.ndarray:
    """``|r''(s)|`` by central differences of step ``step``."""
    if np.min(np.diff(curve.cumulative_lengths)) <= 2 * step:
        raise ValueError("finite-difference step too large for the shortest segment")
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if not curve.closed and (np.any(s < step) or np.any(s > curve.length - step)):
        raise ValueError("samples too close to the ends of an open curve")
    out = np.empty(len(s))
    for a in range(0, len(s), chunk):
        out[a:a + chunk] = np.linalg.norm(_second_difference(curve, s[a:a + chunk], step), axis=1)
    return out


def check_curvature(curves, target: float = 1.0, tol_fd: float = FD_TOL,
                    samples_per_unit: float = 1000, step: float = FD_STEP) -> VerificationReport:
    curves = _as_list(curves)
    analytic = np.concatenate([c.curvatures() for c in curves])
    fd_min, fd_max, count = np.inf, -np.inf, 0
    for c in curves:
        kfd = finite_difference_curvature(c, curvature_samples(c, samples_per_unit, step), step)
        fd_min, fd_max = min(fd_min, kfd.min()), max(fd_max, kfd.max())
        count += len(kfd)
    ok = (np.max(np.abs(analytic - target)) <= ANALYTIC_TOL
          and abs(fd_min - target) <= tol_fd and abs(fd_max - target) <= tol_fd)
    return VerificationReport(
        curvature_target=target,
        curvature_analytic_min=float(analytic.min()),
        curvature_analytic_max=float(analytic.max()),
        curvature_fd_min=float(fd_min),
        curvature_fd_max=float(fd_max),
        curvature_samples=int(count),
        curvature_fd_tol=tol_fd,
        curvature_passed=bool(ok),
    )


def tangent_derivative_residual(curve: PiecewiseCurve, s, step: float = FD_STEP) -> np.ndarray:
    """``|(T(s+step) - T(s-step)) / (2 step) - kappa N(s)|``."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    Tp = curve.frames(s + step)[..., 0]
    Tm = curve.frames(s - step)[..., 0]
    k, _ = curve.locate(s)
    kN = curve.curvatures()[k][:, None] * curve.frames(s)[..., 1]
    return np.linalg.norm((Tp - Tm) / (2 * step) - kN, axis=1)


# ---------------------------------------------------------------------------
# simplicity
# ---------------------------------------------------------------------------

@dataclass
class Witness:
    """Two parameter values whose points (nearly) coincide."""

    curve_a: int
    s_a: float
    curve_b: int
    s_b: float
    distance: float


@dataclass
class DistanceCertificate:
    bound: float
    status: str  # "certified", "intersecting" or "indeterminate"
    delta: float
    samples: int
    min_sample_distance: float
    self_min_sample_distance: float
    inter_min_sample_distance: float
    witness: Optional[Witness] = None

    @property
    def certified(self) -> bool:
        return self.status == "certified"

    @property
    def inter_bound(self) -> float:
        return self.inter_min_sample_distance - self.delta

    @property
    def self_bound(self) -> float:
        return self.self_min_sample_distance - self.delta


class _Samples:
    def __init__(self, curves: list[PiecewiseCurve], delta: float):
        ss, pts, ids = [], [], []
        for i, c in enumerate(curves):
            s, p = c.sample(delta)
            ss.append(s)
            pts.append(p)
            ids.append(np.full(len(s), i))
        self.s = np.concatenate(ss)
        self.points = np.concatenate(pts)
        self.ids = np.concatenate(ids)
        self.lengths = np.array([c.length for c in curves])
        self.closed = np.array([c.closed for c in curves])

    def gap(self, i, j):
        g = np.abs(self.s[i] - self.s[j])
        cid = self.ids[i]
        L = self.lengths[cid]
        return np.where(self.closed[cid], np.minimum(g, L - g), g)

    def valid(self, i, j, min_gap):
        same = self.ids[i] == self.ids[j]
        return ~same | (self.gap(i, j) >= min_gap)


def _closest_pairs(smp: _Samples, min_gap: float, start_radius: float):
    """Valid sample pairs within the smallest radius that contains any, and their distances."""
    tree = cKDTree(smp.points)
    span = np.linalg.norm(np.ptp(smp.points, axis=0)) + 1.0
    r = start_radius
    while True:
        pairs = tree.query_pairs(r, output_type="ndarray")
        if len(pairs):
            keep = smp.valid(pairs[:, 0], pairs[:, 1], min_gap)
            pairs = pairs[keep]
            if len(pairs):
                d = np.linalg.norm(smp.points[pairs[:, 0]] - smp.points[pairs[:, 1]], axis=1)
                return pairs, d
        if r > span:
            return np.zeros((0, 2), dtype=int), np.zeros(0)
        r *= 2


def _inter_sample_distance(smp: _Samples) -> float:
    """Smallest sampled distance between different curves (``inf`` for one curve)."""
    ids = np.unique(smp.ids)
    best = np.inf
    for a in ids[:-1]:
        rest = smp.ids > a
        d, _ = cKDTree(smp.points[rest]).query(smp.points[smp.ids == a])
        best = min(best, float(d.min()))
    return best


def _refine_witness(curves, smp: _Samples, pairs, d, min_gap, delta, tries=20) -> Optional[Witness]:
    best = None
    for idx in np.argsort(d)[:tries]:
        i, j = pairs[idx]
        a, b = int(smp.ids[i]), int(smp.ids[j])
        ca, cb = curves[a], curves[b]
        x0 = np.array([smp.s[i], smp.s[j]])
        lo = x0 - 2 * delta
        hi = x0 + 2 * delta
        if not ca.closed:
            lo[0], hi[0] = max(lo[0], 0.0), min(hi[0], ca.length)
        if not cb.closed:
            lo[1], hi[1] = max(lo[1], 0.0), min(hi[1], cb.length)
        x0 = np.clip(x0, lo, hi)
        fun = lambda x: ca.points(x[0]) - cb.points(x[1])  # noqa: E731
        sol = least_squares(fun, x0, bounds=(lo, hi), xtol=1e-15, ftol=1e-15, gtol=1e-15,
                            max_nfev=200)
        dist = float(np.linalg.norm(fun(sol.x)))
        if a == b:
            g = abs(sol.x[0] - sol.x[1])
            if ca.closed:
                g = min(g, ca.length - g)
            if g < min_gap:
                continue
        if best is None or dist < best.distance:
            best = Witness(a, float(sol.x[0]), b, float(sol.x[1]), dist)
        if dist < WITNESS_TOL:
            break
    return best


def find_intersection(curves, diagonal_exclusion: float = pi,
                      delta: float = DEFAULT_DELTA) -> Optional[Witness]:
    """Search for two points closer than ``WITNESS_TOL`` (arclength gap at least the exclusion)."""
    curves = _as_list(curves)
    smp = _Samples(curves, delta)
    pairs, d = _closest_pairs(smp, diagonal_exclusion, max(4 * delta, 0.25))
    if not len(pairs):
        return None
    w = _refine_witness(curves, smp, pairs, d, diagonal_exclusion, delta)
    return w if w is not None and w.distance < WITNESS_TOL else None


def min_distance_certificate(curves, diagonal_exclusion: float = pi,
                             delta: float = DEFAULT_DELTA,
                             floor: float = DELTA_FLOOR) -> DistanceCertificate:
    """Lower bound on the distance between non-neighbouring points of ``curves``.

    The resolution is halved while the bound is not positive, down to ``floor``.
    """
    curves = _as_list(curves)
    while True:
        smp = _Samples(curves, delta)
        pairs, d = _closest_pairs(smp, diagonal_exclusion - delta, max(4 * delta, 0.25))
        if len(pairs):
            same = smp.ids[pairs[:, 0]] == smp.ids[pairs[:, 1]]
            m = float(d.min())
            m_self = float(d[same].min()) if same.any() else np.inf
        else:
            m = m_self = np.inf
        # the radius search stops at the closest pairs, which may all be self pairs
        m_inter = _inter_sample_distance(smp)
        bound = m - delta
        if bound > 0:
            return DistanceCertificate(bound, "certified", delta, len(smp.s), m, m_self, m_inter)
        witness = _refine_witness(curves, smp, pairs, d, diagonal_exclusion, delta)
        if witness is not None and witness.distance < WITNESS_TOL:
            return DistanceCertificate(bound, "intersecting", delta, len(smp.s), m, m_self,
                                       m_inter, witness)
        if delta / 2 < floor:
            return DistanceCertificate(bound, "indeterminate", delta, len(smp.s), m, m_self,
                                       m_inter, witness)
        delta /= 2


def certified_min_distance(curves, diagonal_exclusion: float = pi,
                           delta: float = DEFAULT_DELTA, floor: float = DELTA_FLOOR) -> float:
    return min_distance_certificate(curves, diagonal_exclusion, delta, floor).bound


def check_simple(curves, diagonal_exclusion: float = pi, delta: float = DEFAULT_DELTA,
                 floor: float = DELTA_FLOOR) -> VerificationReport:
    cert = min_distance_certificate(curves, diagonal_exclusion, delta, floor)
    return VerificationReport(
        distance_bound=float(cert.bound),
        distance_status=cert.status,
        distance_delta=cert.delta,
        distance_samples=cert.samples,
        simple_passed=cert.certified,
    )


# ---------------------------------------------------------------------------
# tube bound
# ---------------------------------------------------------------------------

@dataclass
class TubeResult:
    max_distance: float
    samples: int
    radius: float = TUBE_RADIUS

    @property
    def passed(self) -> bool:
        return self.max_distance <= self.radius * (1 + 1e-9)


def tube_radius_check(curve: PiecewiseCurve, samples: int = 10000) -> TubeResult:
    """Largest distance from the curve to the line through its end points."""
    a, b = curve.initial_point(), curve.terminal_point()
    axis = b - a
    norm = np.linalg.norm(axis)
    if norm < 1e-12:
        raise ValueError("end points coincide; chord line undefined")
    axis = axis / norm
    s = np.unique(np.concatenate([np.linspace(0, curve.length, samples),
                                  curve.cumulative_lengths]))
    v = curve.points(s) - a
    dist = np.linalg.norm(v - np.outer(v @ axis, axis), axis=1)
    return TubeResult(float(dist.max()), len(s))


# ---------------------------------------------------------------------------
# full suite
# ---------------------------------------------------------------------------

def verify_curves(curves, target: float = 1.0, c2_tol: float = C2_TOL, tol_fd: float = FD_TOL,
                  samples_per_unit: float = 1000, delta: float = DEFAULT_DELTA) -> VerificationReport:
    """C2 joints, curvature and simplicity for a set of curves (a knot or link)."""
    curves = _as_list(curves)
    report = check_c2(curves, c2_tol)
    report = report.merge(check_curvature(curves, target, tol_fd, samples_per_unit))
    return report.merge(check_simple(curves, delta=delta))
