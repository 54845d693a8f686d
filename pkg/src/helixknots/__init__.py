"""Closed C2 space curves of constant curvature 1 realising braid closures."""

__version__ = "0.1.0"

from .frenet import (  # noqa: E402
    FrenetFrame,
    HelixSegment,
    PiecewiseCurve,
    PlacedSegment,
    RigidMotion,
    chain,
    curvature,
    frenet_frame,
    helix_point,
    segment_arclength,
    splice,
    torsion,
)
from .blocks import StickKind, build_stick, frame_F, is_allowable_pair, validate_stick  # noqa: E402
from .lattice import LatticeLetter, LatticeWord, crossing_diagram, lemma1_gate, trace_path  # noqa: E402
from .braid import BraidWord, assemble_link, parse_braid  # noqa: E402
from .verify import (  # noqa: E402
    VerificationReport,
    certified_min_distance,
    check_c2,
    check_curvature,
    tube_radius_check,
    verify_curves,
)

__all__ = [
    "FrenetFrame", "HelixSegment", "PiecewiseCurve", "PlacedSegment", "RigidMotion",
    "chain", "curvature", "frenet_frame", "helix_point", "segment_arclength", "splice", "torsion",
    "StickKind", "build_stick", "frame_F", "is_allowable_pair", "validate_stick",
    "LatticeLetter", "LatticeWord", "crossing_diagram", "lemma1_gate", "trace_path",
    "BraidWord", "assemble_link", "parse_braid",
    "VerificationReport", "certified_min_distance", "check_c2", "check_curvature",
    "tube_radius_check", "verify_curves",
]
