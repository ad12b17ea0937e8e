"""Fault type and severity decisions from a window analysis.

Ground faults tilt the trajectory plane away from the Kirchhoff plane in one
of six characteristic directions; the remaining faults keep the plane and are
told apart by the fitted shape: its inclination sector for line-to-line
faults, a shrinking major axis for three-phase faults.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import enum
import math
from typing import Optional

import numpy as np

from .errors import AmbiguousPattern
from .gac import EllipseParams, LineParams
from .pipeline import CircleParams, WindowAnalysis

REF = 1.0 / math.sqrt(3.0)
# off-template spread tolerated per unit deviation (about 16 degrees off a
# template direction in the tangent plane at the reference)
TEMPLATE_SLACK = 0.5
SQRT3 = math.sqrt(3.0)


class FaultLabel(enum.Enum):
    NONE = "None"
    AG = "AG"
    BG = "BG"
    CG = "CG"
    ABG = "ABG"
    BCG = "BCG"
    CAG = "CAG"
    AB = "AB"
    BC = "BC"
    CA = "CA"
    ABC = "ABC"

    @property
    def kind(self) -> str:
        """'none', 'LG', 'LLG', 'LL' or 'LLL'."""
        return _KINDS[self]

    @classmethod
    def parse(cls, text: str) -> FaultLabel:
        key = text.strip().upper().replace("-", "")
        if key in ("NONE", ""):
            return cls.NONE
        aliases = {"ACG": "CAG", "AC": "CA", "CBG": "BCG", "CB": "BC", "BA": "AB", "BAG": "ABG"}
        return cls(aliases.get(key, key))


_KINDS = {
    FaultLabel.NONE: "none",
    FaultLabel.AG: "LG",
    FaultLabel.BG: "LG",
    FaultLabel.CG: "LG",
    FaultLabel.ABG: "LLG",
    FaultLabel.BCG: "LLG",
    FaultLabel.CAG: "LLG",
    FaultLabel.AB: "LL",
    FaultLabel.BC: "LL",
    FaultLabel.CA: "LL",
    FaultLabel.ABC: "LLL",
}

# bnorm index (s12, s23, s31) whose deviation singles out the pattern
_SINGLE = {0: FaultLabel.CG, 1: FaultLabel.AG, 2: FaultLabel.BG}
_DOUBLE = {0: FaultLabel.ABG, 1: FaultLabel.BCG, 2: FaultLabel.CAG}


@dataclass(frozen=True)
class ClassifierConfig:
    ground_epsilon: float = 0.01
    circle_rel_tol: float = 1e-2
    sector_bounds: tuple = (math.pi / 12, 5 * math.pi / 12, 3 * math.pi / 4)
    nominal_radius: float = math.sqrt(1.5)

    def __post_init__(self):
        if not 0.0 < self.ground_epsilon < 0.1:
            raise ValueError("ground_epsilon must be in (0, 0.1)")
        b = self.sector_bounds
        if len(b) != 3 or not 0.0 <= b[0] < b[1] < b[2] < math.pi:
            raise ValueError("sector_bounds must be 3 increasing angles in [0, pi)")


def _lg_linear_coefficients():
    """Least-squares line s ~ c0 + c1 * (b / A) for line-to-ground faults.

    Along a line-to-ground fault of depth s the minor semi-axis is
    ``A * sqrt(1 + 2 (1 - s)^2)``, running from ``A sqrt(3)`` to ``A``.  The
    line is fitted to that curve over the full severity range.
    """
    s = np.linspace(0.0, 1.0, 1001)
    c1, c0 = np.polyfit(np.sqrt(1.0 + 2.0 * (1.0 - s) ** 2), s, 1)
    return float(c0), float(c1)


@dataclass(frozen=True)
class SeverityModel:
    """Semi-axis bounds per fault kind, scaled by the nominal phase RMS A."""

    A: float = 1.0 / math.sqrt(2.0)
    lg_line: tuple = field(default_factory=_lg_linear_coefficients)

    @property
    def nominal_radius(self) -> float:
        return SQRT3 * self.A

    def bounds(self, kind: str) -> dict:
        A, r3 = self.A, SQRT3 * self.A
        return {
            "LG": {"R": (r3, r3), "r": (r3, A)},
            "LLG": {"R": (r3, math.sqrt(2.0) * A), "r": (r3, 0.0)},
            "LL": {"R": (r3, r3), "r": (r3, 0.0)},
            "LLL": {"R": (r3, 0.0), "r": (r3, 0.0)},
        }[kind]


@dataclass(frozen=True)
class FaultReport:
    label: FaultLabel
    severity: Optional[float]
    bnorm: tuple
    shape: object
    deviation: float
    note: str = ""


def classify_ground(bnorm, cfg: ClassifierConfig = ClassifierConfig()) -> Optional[FaultLabel]:
    """Ground-fault label from unit bivector magnitudes, or None if not grounded.

    Raises AmbiguousPattern when the components deviate from the Kirchhoff
    reference without matching any of the six ground templates.
    """
    b = np.abs(np.asarray(bnorm, dtype=float))
    deviation = float(np.max(np.abs(b - REF)))
    if deviation < cfg.ground_epsilon:
        return None
    # each template pair (single/double ground on one index) is the great
    # circle where the other two components are equal; pick the nearest
    others = ((1, 2), (0, 2), (0, 1))
    spread = [abs(b[j] - b[k]) for j, k in others]
    i = int(np.argmin(spread))
    if spread[i] >= max(cfg.ground_epsilon, TEMPLATE_SLACK * deviation):
        raise AmbiguousPattern(f"components {np.round(b, 4).tolist()} match no template", b)
    j, k = others[i]
    return _SINGLE[i] if b[i] > 0.5 * (b[j] + b[k]) else _DOUBLE[i]


def sector_label(theta: float, cfg: ClassifierConfig = ClassifierConfig()) -> FaultLabel:
    lo, mid, hi = cfg.sector_bounds
    theta %= math.pi
    if lo <= theta < mid:
        return FaultLabel.AB
    if mid <= theta < hi:
        return FaultLabel.CA
    return FaultLabel.BC


def _axes(shape):
    if isinstance(shape, CircleParams):
        return shape.radius, shape.radius
    if isinstance(shape, EllipseParams):
        return shape.a, shape.b
    return shape.half_length, 0.0


def classify_by_shape(
    shape, cfg: ClassifierConfig = ClassifierConfig(), model: Optional[SeverityModel] = None
) -> FaultLabel:
    """Decision for planes that stay in the Kirchhoff plane.

    A line is a collapsed line-to-line fault.  Otherwise the locus is healthy
    when its minor axis is still nominal; it is a three-phase fault when its
    major axis has shrunk (only three-phase faults reduce it); else the
    inclination sector names the faulted pair.
    """
    nominal = model.nominal_radius if model is not None else cfg.nominal_radius
    floor = (1.0 - cfg.circle_rel_tol) * nominal
    if isinstance(shape, LineParams):
        return sector_label(shape.angle, cfg)
    a, b = _axes(shape)
    if b >= floor:
        return FaultLabel.NONE
    if a < floor or isinstance(shape, CircleParams):
        return FaultLabel.ABC
    return sector_label(shape.theta, cfg)


def estimate_severity(label: FaultLabel, shape, model: SeverityModel = SeverityModel()) -> float:
    """Linear map of the governing semi-axis onto [0, 1]."""
    if label is FaultLabel.NONE:
        raise ValueError("no severity for a healthy window")
    r0 = model.nominal_radius
    a, b = _axes(shape)
    kind = label.kind
    if kind == "LLL":
        s = 1.0 - a / r0
    elif kind == "LG":
        c0, c1 = model.lg_line
        s = c0 + c1 * b / model.A
    else:
        s = 1.0 - b / r0
    return min(1.0, max(0.0, s))


def classify(
    analysis: WindowAnalysis,
    cfg: ClassifierConfig = ClassifierConfig(),
    model: SeverityModel = SeverityModel(),
) -> FaultReport:
    bnorm = analysis.bnorm
    deviation = math.acos(max(-1.0, min(1.0, REF * sum(bnorm))))
    try:
        label = classify_ground(bnorm, cfg)
    except AmbiguousPattern as exc:
        return FaultReport(FaultLabel.NONE, None, bnorm, analysis.shape, deviation, str(exc))
    if label is None:
        label = classify_by_shape(analysis.shape, cfg, model)
    severity = None if label is FaultLabel.NONE else estimate_severity(label, analysis.shape, model)
    return FaultReport(label, severity, bnorm, analysis.shape, deviation)
