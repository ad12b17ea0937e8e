"""Geometric-algebra detection and classification of three-phase faults."""
from .classify import ClassifierConfig, FaultLabel, FaultReport, SeverityModel, classify
from .errors import GaFaultError
from .ga3 import Bivector3, Multivector3, Rotor3
from .gac import ConicVector, EllipseParams, LineParams, fit_centered_conic
from .pipeline import CircleParams, SampleFrame, WindowAnalysis, WindowConfig, analyze_record
from .synth import FaultScenario, generate

__all__ = [
    "Bivector3", "CircleParams", "ClassifierConfig", "ConicVector", "EllipseParams",
    "FaultLabel", "FaultReport", "FaultScenario", "GaFaultError", "LineParams",
    "Multivector3", "Rotor3", "SampleFrame", "SeverityModel", "WindowAnalysis",
    "WindowConfig", "analyze_record", "classify", "fit_centered_conic", "generate",
]
__version__ = "0.1.0"
