"""Sliding-window trajectory analysis.

Each window of three-phase samples is reduced to the plane of its first and
last sample vectors, rotated onto s12 and fitted with a centred ellipse (or a
line when the trajectory has collapsed).
"""
from __future__ import annotations

from dataclasses import dataclass
import math
from typing import Optional, Sequence, Union

import numpy as np

from . import ga3
from .errors import (
    AntiparallelPlanes,
    InsufficientPoints,
    NoNonNegativeEigenvalue,
    NonUniformSampling,
    NotAnEllipse,
    SingularNormalization,
)
from .ga3 import KIRCHHOFF_UNIT, SIGMA12, Bivector3, Multivector3, Rotor3
from .gac import (
    CIRCLE_ALPHA,
    EllipseParams,
    LineParams,
    extract_angle,
    extract_semiaxes,
    fit_centered_conic,
    fit_line_tls,
)


@dataclass(frozen=True)
class SampleFrame:
    t: float
    ch: tuple


@dataclass(frozen=True)
class CircleParams:
    radius: float


Shape = Union[EllipseParams, LineParams, CircleParams]


@dataclass(frozen=True)
class WindowConfig:
    f0: float = 50.0
    fs: float = 10_000.0
    window_fraction: float = 0.25
    hop: int = 1
    degenerate_ratio: float = 1e-3
    smooth_width: int = 0
    nominal_amplitude: Optional[float] = None

    def __post_init__(self):
        if not 0.0 < self.window_fraction <= 1.0:
            raise ValueError("window_fraction must be in (0, 1]")
        if self.fs < 20.0 * self.f0:
            raise ValueError("fs must be at least 20 * f0")
        if self.hop < 1:
            raise ValueError("hop must be >= 1")
        if self.smooth_width < 0:
            raise ValueError("smooth_width must be >= 0")

    @property
    def window_length(self) -> int:
        return max(2, int(round(self.window_fraction * self.fs / self.f0)))


@dataclass(frozen=True)
class WindowAnalysis:
    t_start: float
    t_end: float
    bivector: Bivector3
    bnorm: tuple
    shape: Shape
    degenerate: bool

    @property
    def shape_name(self) -> str:
        return {EllipseParams: "ellipse", LineParams: "line", CircleParams: "circle"}[
            type(self.shape)
        ]


def _wedge_vectors(x, y) -> Bivector3:
    m = ga3.wedge(Multivector3.vector(*x), Multivector3.vector(*y))
    return Bivector3.from_multivector(m)


def window_bivector(window) -> Bivector3:
    """``x_1 ^ x_n`` of the first and last sample vectors."""
    w = np.asarray(window, dtype=float)
    if len(w) < 2:
        raise InsufficientPoints("window needs at least 2 samples")
    return _wedge_vectors(w[0], w[-1])


# half turn about s1, used when a plane is exactly opposite to s12
_FLIP = Rotor3.from_angle_plane(math.pi, Bivector3(0.0, 1.0, 0.0))


def plane_rotor(window, B: Bivector3) -> Rotor3:
    """Rotor taking the unit plane of B onto s12.

    Opposite planes retry once with the second sample in place of the first,
    then fall back to a half turn about s1.
    """
    try:
        return ga3.rotor_between_bivectors(SIGMA12, B.normalized())
    except AntiparallelPlanes:
        w = np.asarray(window, dtype=float)
        if len(w) > 2:
            B2 = _wedge_vectors(w[1], w[-1])
            try:
                return ga3.rotor_between_bivectors(SIGMA12, B2.normalized())
            except (AntiparallelPlanes, ga3.ZeroBivector):
                pass
        return _FLIP


def reduce_to_plane(window, B: Bivector3) -> np.ndarray:
    """Rotate window samples so the plane of B becomes s12; (n, 2) coordinates."""
    R = plane_rotor(window, B)
    rotated = ga3.sandwich_vectors(R, np.asarray(window, dtype=float))
    return rotated[:, :2]


_KIRCHHOFF_ROTOR = ga3.rotor_between_bivectors(SIGMA12, KIRCHHOFF_UNIT)
_KIRCHHOFF_BNORM = tuple(float(c) for c in KIRCHHOFF_UNIT.as_array())


def _fit_shape(points) -> tuple[Shape, bool]:
    try:
        q = fit_centered_conic(points)
        a, b = extract_semiaxes(q)
    except (NoNonNegativeEigenvalue, NotAnEllipse, SingularNormalization):
        return fit_line_tls(points), True
    if q.alpha < CIRCLE_ALPHA:
        return CircleParams(0.5 * (a + b)), False
    return EllipseParams(a, b, extract_angle(q)), False


def analyze_window(window, cfg: WindowConfig = WindowConfig(), t=None) -> WindowAnalysis:
    w = np.asarray(window, dtype=float)
    if len(w) < 4:
        raise InsufficientPoints(f"window of {len(w)} samples is too short")
    if t is None:
        t_start, t_end = 0.0, (len(w) - 1) / cfg.fs
    else:
        t_start, t_end = float(t[0]), float(t[-1])
    B = window_bivector(w)
    n1, nn = float(np.linalg.norm(w[0])), float(np.linalg.norm(w[-1]))
    peak = float(np.max(np.linalg.norm(w, axis=1)))
    # an endpoint sitting at the origin leaves the plane to roundoff
    tiny_end = min(n1, nn) < cfg.degenerate_ratio * peak
    if tiny_end or B.magnitude < cfg.degenerate_ratio * n1 * nn:
        # collapsed trajectory: assume it lies in the Kirchhoff plane
        pts = ga3.sandwich_vectors(_KIRCHHOFF_ROTOR, w)[:, :2]
        return WindowAnalysis(t_start, t_end, B, _KIRCHHOFF_BNORM, fit_line_tls(pts), True)
    bnorm = tuple(float(abs(c)) for c in B.normalized().as_array())
    shape, degenerate = _fit_shape(reduce_to_plane(w, B))
    return WindowAnalysis(t_start, t_end, B, bnorm, shape, degenerate)


def moving_average(x: np.ndarray, width: int, f0: float = 0.0, fs: float = 1.0) -> np.ndarray:
    """Causal moving average per channel, rescaled to unit gain at f0.

    The same linear filter runs on every phase, so a steady trajectory keeps
    its shape (delayed by (width - 1) / 2 samples).  The first width - 1 rows
    average over fewer samples.
    """
    if width <= 1:
        return x
    c = np.cumsum(np.vstack([np.zeros((1, x.shape[1])), x]), axis=0)
    idx = np.arange(1, len(x) + 1)
    lo = np.maximum(idx - width, 0)
    out = (c[idx] - c[lo]) / (idx - lo)[:, None]
    if f0 > 0.0:
        w = math.pi * f0 / fs
        out /= math.sin(width * w) / (width * math.sin(w))
    return out


def frames_to_arrays(frames: Sequence[SampleFrame]):
    t = np.array([f.t for f in frames], dtype=float)
    x = np.array([f.ch for f in frames], dtype=float).reshape(-1, 3)
    return t, x


def check_sampling(t: np.ndarray, fs: float, jitter: float = 0.01) -> None:
    if len(t) < 2:
        return
    dt = np.diff(t)
    worst = float(np.max(np.abs(dt * fs - 1.0)))
    if worst > jitter:
        i = int(np.argmax(np.abs(dt * fs - 1.0)))
        raise NonUniformSampling(
            f"sample interval {dt[i]:.6g}s at index {i + 1} deviates {worst:.1%} from 1/fs"
        )


def analyze_arrays(t, x, cfg: WindowConfig = WindowConfig()) -> list[WindowAnalysis]:
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float).reshape(-1, 3)
    check_sampling(t, cfg.fs)
    if cfg.nominal_amplitude:
        x = x / cfg.nominal_amplitude
    x = moving_average(x, cfg.smooth_width, cfg.f0, cfg.fs)
    n = cfg.window_length
    if len(x) < n:
        return []
    return [
        analyze_window(x[i : i + n], cfg, t[i : i + n])
        for i in range(0, len(x) - n + 1, cfg.hop)
    ]


def analyze_record(frames, cfg: WindowConfig = WindowConfig()) -> list[WindowAnalysis]:
    """One WindowAnalysis per hop position, in window order."""
    t, x = frames_to_arrays(frames)
    return analyze_arrays(t, x, cfg)
