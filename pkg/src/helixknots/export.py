"""Curve documents (JSON), OBJ polylines and tube meshes, CSV samples."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, TextIO

import numpy as np

from . import __version__
from .frenet import PiecewiseCurve
from .verify import FD_STEP, finite_difference_curvature

FORMAT_NAME = "helixknots.curve"
FORMAT_VERSION = 1
TOOL = f"helixknots {__version__}"


class DocumentError(ValueError):
    pass


def _num(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        return "null"
    return format(x + 0.0, ".17g")


def _scalar(x) -> bool:
    return x is None or isinstance(x, (str, bool, int, float, np.integer, np.floating, np.bool_))


def _flat(x) -> bool:
    if isinstance(x, dict):
        return all(_scalar(v) or (isinstance(v, list) and all(map(_scalar, v))) for v in x.values())
    if isinstance(x, list):
        return all(map(_scalar, x))
    return True


def _emit(obj, level: int = 0) -> str:
    """Deterministic JSON with 17 significant digits; flat containers on one line."""
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if _scalar(obj):
        return _num(obj)
    pad = "  " * (level + 1)
    end = "  " * level
    if isinstance(obj, dict):
        items = [f"{json.dumps(str(k))}: {_emit(v, level + 1)}" for k, v in obj.items()]
        if _flat(obj):
            return "{" + ", ".join(items) + "}"
        return "{\n" + ",\n".join(pad + it for it in items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        items = [_emit(v, level + 1) for v in obj]
        if _flat(list(obj)):
            return "[" + ", ".join(items) + "]"
        return "[\n" + ",\n".join(pad + it for it in items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


@dataclass
class CurveDocument:
    curves: list[PiecewiseCurve]
    metadata: dict = field(default_factory=dict)
    verification: Optional[dict] = None

    def to_dict(self) -> dict:
        comps = []
        for c in self.curves:
            segs = [{
                "r": float(p[0]), "h": float(p[1]), "t_i": float(p[2]), "t_e": float(p[3]),
                "rotation": [float(v) for v in R.ravel()],
                "translation": [float(v) for v in w],
            } for p, R, w in zip(c.params, c.rotations, c.translations)]
            comps.append({"closed": c.closed, "segments": segs})
        d = {"format": FORMAT_NAME, "version": FORMAT_VERSION,
             "metadata": {"tool": TOOL, **self.metadata}, "components": comps}
        if self.verification is not None:
            d["verification"] = self.verification
        return d

    def dumps(self) -> str:
        return _emit(self.to_dict()) + "\n"

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.dumps())

    @classmethod
    def from_dict(cls, d: dict) -> "CurveDocument":
        if d.get("format") != FORMAT_NAME:
            raise DocumentError(f"not a {FORMAT_NAME} document")
        if d.get("version") != FORMAT_VERSION:
            raise DocumentError(f"unsupported version {d.get('version')!r}")
        curves = []
        try:
            for comp in d["components"]:
                segs = comp["segments"]
                params = [[s["r"], s["h"], s["t_i"], s["t_e"]] for s in segs]
                rots = [s["rotation"] for s in segs]
                trans = [s["translation"] for s in segs]
                curves.append(PiecewiseCurve(params, rots, trans, closed=bool(comp["closed"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise DocumentError(f"malformed component data: {exc}") from exc
        meta = dict(d.get("metadata", {}))
        return cls(curves, meta, d.get("verification"))

    @classmethod
    def loads(cls, text: str) -> "CurveDocument":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise DocumentError(f"invalid JSON: {exc}") from exc

    @classmethod
    def load(cls, path) -> "CurveDocument":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())


def _arclength_grid(curve: PiecewiseCurve, per_unit: float) -> np.ndarray:
    m = max(int(math.ceil(curve.length * per_unit)), 2)
    if curve.closed:
        return np.linspace(0.0, curve.length, m, endpoint=False)
    return np.linspace(0.0, curve.length, m + 1)


def write_obj_polyline(curves, fh: TextIO, samples_per_unit: float = 20) -> None:
    fh.write(f"# {TOOL} polyline\n")
    base = 1
    for ci, c in enumerate(curves):
        pts = c.points(_arclength_grid(c, samples_per_unit))
        fh.write(f"o component_{ci}\n")
        for p in pts:
            fh.write("v " + " ".join(_num(v) for v in p) + "\n")
        n = len(pts)
        idx = list(range(base, base + n))
        if c.closed:
            idx.append(base)
        for a, b in zip(idx, idx[1:]):
            fh.write(f"l {a} {b}\n")
        base += n


def write_obj_tube(curves, fh: TextIO, radius: float = 0.4, sides: int = 12,
                   samples_per_unit: float = 8) -> None:
    """Triangulated tube swept along the curve, cross-sections spanned by N and B."""
    if radius <= 0:
        raise ValueError("tube radius must be positive")
    fh.write(f"# {TOOL} tube radius {_num(radius)}\n")
    ang = 2 * np.pi * np.arange(sides) / sides
    base = 1
    for ci, c in enumerate(curves):
        s = _arclength_grid(c, samples_per_unit)
        P = c.points(s)
        F = c.frames(s)
        ring = (P[:, None, :]
                + radius * (np.cos(ang)[None, :, None] * F[:, None, :, 1]
                            + np.sin(ang)[None, :, None] * F[:, None, :, 2]))
        fh.write(f"o tube_{ci}\n")
        for v in ring.reshape(-1, 3):
            fh.write("v " + " ".join(_num(x) for x in v) + "\n")
        n = len(s)
        rows = n if c.closed else n - 1
        for i in range(rows):
            i2 = (i + 1) % n
            for j in range(sides):
                j2 = (j + 1) % sides
                a = base + i * sides + j
                b = base + i * sides + j2
                cc = base + i2 * sides + j2
                d = base + i2 * sides + j
                fh.write(f"f {a} {b} {cc}\nf {a} {cc} {d}\n")
        base += n * sides


def write_csv(curves, fh: TextIO, samples_per_unit: float = 50, step: float = FD_STEP) -> None:
    """Rows ``s,x,y,z,kappa_fd``; components follow one another, ``s`` restarting at 0."""
    fh.write("s,x,y,z,kappa_fd\n")
    for c in curves:
        s = _arclength_grid(c, samples_per_unit)
        pts = c.points(s)
        s_fd = s if c.closed else np.clip(s, step, c.length - step)
        kappa = finite_difference_curvature(c, s_fd, step)
        for si, p, k in zip(s, pts, kappa):
            fh.write(",".join([_num(si), _num(p[0]), _num(p[1]), _num(p[2]), _num(k)]) + "\n")
