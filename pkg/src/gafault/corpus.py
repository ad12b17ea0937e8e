"""Classification corpus: steady synthetic faults run through the full chain.

Each case is a short record that is faulted from its first sample; only the
last analysis window is classified, so the decision sees a fully faulted
(and, when smoothing is on, fully smoothed) window.
"""
from __future__ import annotations

from dataclasses import dataclass
import math
from typing import Optional

import numpy as np

from .classify import ClassifierConfig, FaultLabel, SeverityModel, classify
from .pipeline import WindowConfig, analyze_window, moving_average
from .synth import FaultScenario, generate_arrays

FAULT_LABELS = tuple(lab for lab in FaultLabel if lab is not FaultLabel.NONE)
SEVERITIES = tuple(round(0.1 * k, 1) for k in range(1, 10))
# inductive fault path: residual phase lead of the faulted pair difference
RL_PHASE_SHIFT = 0.3
IMPEDANCES = {"R": 0.0, "RL": RL_PHASE_SHIFT}

# operating profile for noisy records
NOISY_WINDOW = WindowConfig(smooth_width=25)
NOISY_CLASSIFIER = ClassifierConfig(ground_epsilon=0.03, circle_rel_tol=0.05)


@dataclass(frozen=True)
class CorpusCase:
    label: FaultLabel
    severity: float
    impedance: str = "R"
    phase0: float = 0.0
    noise_std: float = 0.0
    seed: int = 0


@dataclass(frozen=True)
class CorpusResult:
    case: CorpusCase
    predicted: FaultLabel
    severity: Optional[float]

    @property
    def correct(self) -> bool:
        return self.predicted is self.case.label


def run_case(
    case: CorpusCase,
    wcfg: WindowConfig = WindowConfig(),
    ccfg: ClassifierConfig = ClassifierConfig(),
    model: SeverityModel = SeverityModel(),
) -> CorpusResult:
    n = wcfg.window_length + max(wcfg.smooth_width, 1) - 1
    scn = FaultScenario(
        case.label,
        case.severity,
        IMPEDANCES[case.impedance],
        fault_time=0.0,
        f0=wcfg.f0,
        duration=n / wcfg.fs,
        fs=wcfg.fs,
        noise_std=case.noise_std,
        phase0=case.phase0,
    )
    t, x = generate_arrays(scn, case.seed)
    x = moving_average(x, wcfg.smooth_width, wcfg.f0, wcfg.fs)
    m = wcfg.window_length
    last = analyze_window(x[-m:], wcfg, t[-m:])
    report = classify(last, ccfg, model)
    return CorpusResult(case, report.label, report.severity)


def grid_cases(phase0: float = 0.3):
    """Every fault type, severity 0.1-0.9 and impedance, noiseless."""
    return [
        CorpusCase(label, s, imp, phase0)
        for label in FAULT_LABELS
        for s in SEVERITIES
        for imp in IMPEDANCES
    ]


def random_cases(trials: int, noise_std: float, seed: int = 0):
    """Cases drawn uniformly over type, severity, impedance and start phase."""
    rng = np.random.default_rng(seed)
    labels = rng.integers(len(FAULT_LABELS), size=trials)
    sev = rng.integers(len(SEVERITIES), size=trials)
    imp = rng.integers(2, size=trials)
    phase = rng.uniform(0.0, 2 * math.pi, trials)
    seeds = rng.integers(2**31, size=trials)
    names = list(IMPEDANCES)
    return [
        CorpusCase(FAULT_LABELS[l], SEVERITIES[s], names[i], float(p), noise_std, int(sd))
        for l, s, i, p, sd in zip(labels, sev, imp, phase, seeds)
    ]


def run_cases(cases, wcfg=None, ccfg=None, model: SeverityModel = SeverityModel()):
    """Run cases; noisy ones default to the noisy operating profile."""
    out = []
    for case in cases:
        noisy = case.noise_std > 0.0
        w = wcfg or (NOISY_WINDOW if noisy else WindowConfig())
        c = ccfg or (NOISY_CLASSIFIER if noisy else ClassifierConfig())
        out.append(run_case(case, w, c, model))
    return out


@dataclass(frozen=True)
class TypeSummary:
    label: FaultLabel
    cases: int
    accuracy: float
    severity_mae: float


def summarize(results) -> list[TypeSummary]:
    """Per fault type accuracy and mean absolute severity error.

    A missing severity estimate (predicted healthy) counts as the full
    true severity in the error.
    """
    rows = []
    for label in FAULT_LABELS:
        mine = [r for r in results if r.case.label is label]
        if not mine:
            continue
        acc = sum(r.correct for r in mine) / len(mine)
        mae = float(
            np.mean([abs((r.severity or 0.0) - r.case.severity) for r in mine])
        )
        rows.append(TypeSummary(label, len(mine), acc, mae))
    return rows


def accuracy(results) -> float:
    return sum(r.correct for r in results) / len(results) if results else float("nan")
