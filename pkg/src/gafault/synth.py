"""Synthetic three-phase records and the noise/error experiments.

Fault models (applied from ``fault_time`` on, no transient):

* L-G: the faulted phase is scaled by ``1 - s``.
* L-L: the two faulted phases keep their sum and their difference is scaled
  by ``(1 - s) + s * sin(phase_shift)``.  With a purely resistive path
  (``phase_shift = 0``) a bolted fault collapses the locus to a line; an
  inductive path leaves a residual difference in quadrature with the common
  mode, so the locus stays an ellipse with the same inclination.
* L-L-G: both faulted phases are scaled by ``1 - s``.
* A-B-C: all phases are scaled by ``1 - s``.
"""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .classify import FaultLabel
from .pipeline import SampleFrame

PHASE = {"A": 0, "B": 1, "C": 2}


@dataclass(frozen=True)
class FaultScenario:
    label: FaultLabel = FaultLabel.NONE
    severity: float = 0.0
    phase_shift: float = 0.0
    fault_time: float = 0.1
    f0: float = 50.0
    amplitude: float = 1.0
    duration: float = 0.2
    fs: float = 10_000.0
    noise_std: float = 0.0
    phase0: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.severity <= 1.0:
            raise ValueError(f"severity {self.severity} outside [0, 1]")
        if self.fs <= 2.0 * self.f0:
            raise ValueError("fs must exceed twice f0")
        if self.duration <= 0.0 or self.amplitude <= 0.0:
            raise ValueError("duration and amplitude must be positive")
        if self.noise_std < 0.0:
            raise ValueError("noise_std must be non-negative")

    @property
    def n_samples(self) -> int:
        return int(round(self.duration * self.fs))


def balanced(u: np.ndarray, amplitude: float = 1.0) -> np.ndarray:
    """(N, 3) positive-sequence phase values at electrical angles u."""
    return amplitude * np.column_stack(
        [np.cos(u), np.cos(u - 2 * math.pi / 3), np.cos(u + 2 * math.pi / 3)]
    )


def apply_fault(x: np.ndarray, label: FaultLabel, severity: float, phase_shift: float = 0.0):
    """Return a copy of balanced samples ``x`` with the steady fault applied."""
    y = np.array(x, dtype=float, copy=True)
    if label is FaultLabel.NONE:
        return y
    keep = 1.0 - severity
    name = label.value
    if label.kind == "LG":
        y[:, PHASE[name[0]]] *= keep
    elif label.kind == "LLG":
        for ph in name[:2]:
            y[:, PHASE[ph]] *= keep
    elif label.kind == "LLL":
        y *= keep
    elif label.kind == "LL":
        p, q = PHASE[name[0]], PHASE[name[1]]
        common = y[:, p] + y[:, q]
        diff = (y[:, p] - y[:, q]) * (keep + severity * math.sin(phase_shift))
        y[:, p] = 0.5 * (common + diff)
        y[:, q] = 0.5 * (common - diff)
    return y


def generate_arrays(scn: FaultScenario, seed: int = 0):
    """Sample times (N,) and phase values (N, 3) for a scenario."""
    n = scn.n_samples
    t = np.arange(n) / scn.fs
    u = 2 * math.pi * scn.f0 * t + scn.phase0
    x = balanced(u, scn.amplitude)
    post = t >= scn.fault_time
    if np.any(post):
        x[post] = apply_fault(x[post], scn.label, scn.severity, scn.phase_shift)
    if scn.noise_std > 0.0:
        rng = np.random.default_rng(seed)
        x = x + rng.normal(0.0, scn.noise_std * scn.amplitude, size=x.shape)
    return t, x


def generate(scn: FaultScenario, seed: int = 0) -> list[SampleFrame]:
    t, x = generate_arrays(scn, seed)
    return [SampleFrame(float(ti), tuple(float(v) for v in xi)) for ti, xi in zip(t, x)]


def steady_window(
    label: FaultLabel,
    severity: float,
    phase_shift: float = 0.0,
    *,
    n: int = 50,
    samples_per_cycle: int = 200,
    phase0: float = 0.0,
    amplitude: float = 1.0,
) -> np.ndarray:
    """One analysis window of a steady fault, (n, 3)."""
    u = phase0 + 2 * math.pi * np.arange(n) / samples_per_cycle
    return apply_fault(balanced(u, amplitude), label, severity, phase_shift)


@dataclass
class StudyTable:
    """Plot-ready table: one x column and one error column per noise level."""

    x_name: str
    x: np.ndarray
    noise_levels: tuple
    errors: np.ndarray  # (len(x), len(noise_levels))

    def header(self) -> list[str]:
        return [self.x_name] + [f"noise_{100 * s:g}%" for s in self.noise_levels]

    def column(self, noise: float) -> np.ndarray:
        return self.errors[:, list(self.noise_levels).index(noise)]

    def rows(self):
        for xi, err in zip(self.x, self.errors):
            yield [float(xi), *(float(e) for e in err)]


BIVECTOR_NOISE = (0.001, 0.01, 0.02, 0.05, 0.1)
FIT_NOISE = (0.0, 0.001, 0.01, 0.02, 0.05, 0.1)
FIT_FRACTIONS = tuple(np.round(np.arange(1, 21) * 0.05, 2))
# AB fault at severity 0.4 in p.u.
CANONICAL_ELLIPSE = (math.sqrt(1.5), 0.6 * math.sqrt(1.5), math.pi / 4)


def default_angles() -> np.ndarray:
    k = np.arange(1, 64)
    return 2 * math.pi * k[k != 32] / 64


def _batch_wedge(x, y):
    """Bivectors (s12, s23, s31) of row-wise x ^ y via the G3 outer product table."""
    from .ga3 import OP_TABLE

    mx = np.zeros((len(x), 8))
    my = np.zeros((len(y), 8))
    mx[:, 1:4] = x
    my[:, 1:4] = y
    m = np.einsum("ni,nj,ijk->nk", mx, my, OP_TABLE)
    return np.column_stack([m[:, 4], m[:, 6], -m[:, 5]])


def bivector_error_study(
    noise_levels=BIVECTOR_NOISE, trials: int = 1000, seed: int = 0, angles=None
) -> StudyTable:
    """Mean relative error of the unit plane bivector from two noisy samples.

    For each electrical separation angle the two wedge operands are balanced
    unit-peak samples at a random phase and that phase plus the angle.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    angles = default_angles() if angles is None else np.asarray(angles, dtype=float)
    rng = np.random.default_rng(seed)
    u0 = rng.uniform(0.0, 2 * math.pi, trials)
    n1 = rng.standard_normal((trials, 3))
    n2 = rng.standard_normal((trials, 3))
    errors = np.zeros((len(angles), len(noise_levels)))
    for i, ang in enumerate(angles):
        x1, x2 = balanced(u0), balanced(u0 + ang)
        true = _batch_wedge(x1, x2)
        true /= np.linalg.norm(true, axis=1, keepdims=True)
        for j, sd in enumerate(noise_levels):
            est = _batch_wedge(x1 + sd * n1, x2 + sd * n2)
            est /= np.linalg.norm(est, axis=1, keepdims=True)
            errors[i, j] = np.mean(np.linalg.norm(est - true, axis=1))
    return StudyTable("angle_rad", angles, tuple(noise_levels), errors)


def ellipse_arc(a, b, theta, u):
    """Points (len(u), 2) of a centred ellipse at parametric angles u."""
    c, s = math.cos(theta), math.sin(theta)
    x, y = a * np.cos(u), b * np.sin(u)
    return np.column_stack([c * x - s * y, s * x + c * y])


def relative_fit_error(fit, a, b, theta) -> float:
    """Mean of |da|/a, |db|/b and the inclination error as a fraction of pi."""
    dth = abs((fit.theta - theta + math.pi / 2) % math.pi - math.pi / 2)
    return (abs(fit.a - a) / a + abs(fit.b - b) / b + dth / math.pi) / 3.0


def fit_error_study(
    noise_levels=FIT_NOISE,
    arc_fractions=FIT_FRACTIONS,
    trials: int = 100,
    seed: int = 0,
    ellipse=CANONICAL_ELLIPSE,
    samples_per_cycle: int = 200,
) -> StudyTable:
    """Mean relative (a, b, theta) error of the centred fit versus arc length.

    Trials share their start phase and noise draws across arc fractions, so
    longer arcs extend shorter ones.  A failed fit counts as error 1.
    """
    from .gac import ellipse_params, fit_centered_conic
    from .errors import GaFaultError

    fractions = np.asarray(arc_fractions, dtype=float)
    if np.any((fractions <= 0) | (fractions > 1)):
        raise ValueError("arc fractions must lie in (0, 1]")
    a, b, theta = ellipse
    rng = np.random.default_rng(seed)
    u0 = rng.uniform(0.0, 2 * math.pi, trials)
    noise = rng.standard_normal((trials, samples_per_cycle, 2))
    step = 2 * math.pi / samples_per_cycle
    errors = np.zeros((len(fractions), len(noise_levels)))
    for i, frac in enumerate(fractions):
        n = max(5, int(round(frac * samples_per_cycle)))
        for j, sd in enumerate(noise_levels):
            total = 0.0
            for k in range(trials):
                pts = ellipse_arc(a, b, theta, u0[k] + step * np.arange(n)) + sd * noise[k, :n]
                try:
                    total += min(1.0, relative_fit_error(ellipse_params(fit_centered_conic(pts)), a, b, theta))
                except GaFaultError:
                    total += 1.0
            errors[i, j] = total / trials
    return StudyTable("arc_fraction", fractions, tuple(noise_levels), errors)
